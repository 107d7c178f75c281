use num_bigint::BigInt;
use num_rational::BigRational;

use super::ring::{Ring, Semiring, UPoly};
use super::SeriesError;

/// Power series in one principal variable, known up to and including `t^order`.
///
/// Extra marked variables live in the coefficient ring `R`. Binary operations
/// truncate to the smaller order of their operands.
#[derive(Clone, Debug, PartialEq)]
pub struct Series<R> {
    coeffs: Vec<R>,
}

impl<R: Ring> Series<R> {
    pub fn zero(order: usize) -> Self {
        Series {
            coeffs: vec![R::zero(); order + 1],
        }
    }

    pub fn constant(c: R, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    pub fn one(order: usize) -> Self {
        Self::constant(R::one(), order)
    }

    /// The principal variable `t`.
    pub fn var(order: usize) -> Self {
        Self::monomial(R::one(), 1, order)
    }

    /// `c·t^k`, or zero when `k > order`.
    pub fn monomial(c: R, k: usize, order: usize) -> Self {
        let mut s = Self::zero(order);
        if k <= order {
            s.coeffs[k] = c;
        }
        s
    }

    /// Pads with zeros (or truncates) to exactly `order + 1` coefficients.
    pub fn from_coeffs(mut coeffs: Vec<R>, order: usize) -> Self {
        coeffs.resize(order + 1, R::zero());
        Series { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[R] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Option<&R> {
        self.coeffs.get(k)
    }

    pub fn into_coeffs(self) -> Vec<R> {
        self.coeffs
    }

    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order());
        Series {
            coeffs: self.coeffs[..=order].to_vec(),
        }
    }

    /// Lowest exponent with a nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn is_zero(&self) -> bool {
        self.valuation().is_none()
    }

    pub fn add(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        Series {
            coeffs: (0..=order)
                .map(|k| self.coeffs[k].add(&other.coeffs[k]))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        Series {
            coeffs: (0..=order)
                .map(|k| self.coeffs[k].sub(&other.coeffs[k]))
                .collect(),
        }
    }

    pub fn neg(&self) -> Self {
        Series {
            coeffs: self.coeffs.iter().map(Ring::neg).collect(),
        }
    }

    pub fn scale(&self, c: &R) -> Self {
        Series {
            coeffs: self.coeffs.iter().map(|a| a.mul(c)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        let mut out = vec![R::zero(); order + 1];
        let hi_b = other.coeffs[..=order].iter().rposition(|c| !c.is_zero());
        let Some(hi_b) = hi_b else {
            return Series { coeffs: out };
        };
        for (i, a) in self.coeffs[..=order].iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let top = (order - i).min(hi_b);
            for (j, b) in other.coeffs[..=top].iter().enumerate() {
                out[i + j].add_mul_assign(a, b);
            }
        }
        Series { coeffs: out }
    }

    /// Multiplicative inverse; the constant term must be a unit of `R`.
    pub fn reciprocal(&self) -> Result<Self, SeriesError> {
        let inv0 = self.coeffs[0]
            .inverse()
            .ok_or(SeriesError::NonUnitConstantTerm)?;
        let order = self.order();
        let mut out: Vec<R> = Vec::with_capacity(order + 1);
        out.push(inv0.clone());
        let hi_a = self.coeffs.iter().rposition(|c| !c.is_zero()).unwrap_or(0);
        for n in 1..=order {
            let mut acc = R::zero();
            for k in 1..=n.min(hi_a) {
                acc.add_mul_assign(&self.coeffs[k], &out[n - k]);
            }
            out.push(acc.mul(&inv0).neg());
        }
        Ok(Series { coeffs: out })
    }

    pub fn div(&self, other: &Self) -> Result<Self, SeriesError> {
        Ok(self.mul(&other.reciprocal()?))
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = Self::one(self.order());
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Composition `self(inner)`; `inner` must have zero constant term
    /// unless `self` is a polynomial of degree at most its order.
    pub fn compose(&self, inner: &Self) -> Result<Self, SeriesError> {
        if !inner.coeffs[0].is_zero() {
            return Err(SeriesError::IllDefinedComposition);
        }
        let order = self.order().min(inner.order());
        let inner = inner.truncate(order);
        // Horner from the top coefficient.
        let mut acc = Self::zero(order);
        for c in self.coeffs[..=order].iter().rev() {
            acc = acc.mul(&inner);
            acc.coeffs[0].add_assign(c);
        }
        Ok(acc)
    }
}

impl<R: Ring> Series<UPoly<R>> {
    /// Collapses a marked variable onto the principal one: each coefficient
    /// `c_k m^k` of `t^n` is sent to `c_k w^k t^(n + shift·k)`.
    pub fn substitute_mark(&self, w: &R, shift: usize) -> Series<R> {
        let order = self.order();
        let mut out = vec![R::zero(); order + 1];
        for (n, poly) in self.coeffs.iter().enumerate() {
            let mut wk = R::one();
            for (k, c) in poly.coeffs().iter().enumerate() {
                if k > 0 {
                    wk = wk.mul(w);
                }
                let e = n + shift * k;
                if e > order {
                    break;
                }
                out[e].add_mul_assign(c, &wk);
            }
        }
        Series { coeffs: out }
    }
}

/// Flattening of nested coefficient rings into `(exponents, rational)` terms.
pub trait Terms {
    fn terms(&self) -> Vec<(Vec<u32>, BigRational)>;
}

impl Terms for BigInt {
    fn terms(&self) -> Vec<(Vec<u32>, BigRational)> {
        if num_traits::Zero::is_zero(self) {
            Vec::new()
        } else {
            vec![(Vec::new(), BigRational::from_integer(self.clone()))]
        }
    }
}

impl Terms for BigRational {
    fn terms(&self) -> Vec<(Vec<u32>, BigRational)> {
        if num_traits::Zero::is_zero(self) {
            Vec::new()
        } else {
            vec![(Vec::new(), self.clone())]
        }
    }
}

impl<R: Semiring + Terms> Terms for UPoly<R> {
    fn terms(&self) -> Vec<(Vec<u32>, BigRational)> {
        let mut out = Vec::new();
        for (k, c) in self.coeffs().iter().enumerate() {
            for (mut exps, v) in c.terms() {
                exps.insert(0, k as u32);
                out.push((exps, v));
            }
        }
        out
    }
}

impl<R: Ring + Terms> Series<R> {
    /// All nonzero terms, principal exponent first.
    pub fn terms(&self) -> Vec<(Vec<u32>, BigRational)> {
        let mut out = Vec::new();
        for (n, c) in self.coeffs.iter().enumerate() {
            for (mut exps, v) in c.terms() {
                exps.insert(0, n as u32);
                out.push((exps, v));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(s: &Series<BigInt>) -> Vec<i64> {
        s.coeffs()
            .iter()
            .map(|c| i64::try_from(c).unwrap())
            .collect()
    }

    fn poly(cs: &[i64]) -> Series<BigInt> {
        let order = cs.len() - 1;
        Series::from_coeffs(cs.iter().map(|&c| BigInt::from(c)).collect(), order)
    }

    #[test]
    fn difference_of_squares() {
        let t = Series::<BigInt>::var(5);
        let one = Series::one(5);
        let p = one.add(&t).mul(&one.sub(&t));
        assert_eq!(ints(&p), vec![1, 0, -1, 0, 0, 0]);
    }

    #[test]
    fn geometric_series() {
        let t = Series::<BigInt>::var(4);
        let g = t.div(&Series::one(4).sub(&t)).unwrap();
        assert_eq!(ints(&g), vec![0, 1, 1, 1, 1]);
    }

    #[test]
    fn fibonacci_reciprocal() {
        let d = poly(&[1, -1, -1, 0, 0, 0]);
        let r = d.reciprocal().unwrap();
        assert_eq!(ints(&r), vec![1, 1, 2, 3, 5, 8]);
        // defining product
        assert_eq!(ints(&d.mul(&r)), vec![1, 0, 0, 0, 0, 0]);
    }

    #[test]
    fn reciprocal_of_two_is_exact_half() {
        let two = Series::constant(BigRational::from_integer(2.into()), 3);
        let half = two.reciprocal().unwrap();
        assert_eq!(
            half.coeff(0).unwrap(),
            &BigRational::new(1.into(), 2.into())
        );
        assert!(Series::constant(BigInt::from(2), 3).reciprocal().is_err());
        assert!(Series::<BigRational>::var(3).reciprocal().is_err());
    }

    #[test]
    fn compose_geometric_in_geometric() {
        // x/(1-x) with x := s/(1-s) gives s/(1-2s)
        let x = Series::<BigInt>::var(4);
        let outer = x.div(&Series::one(4).sub(&x)).unwrap();
        let inner = outer.clone();
        let c = outer.compose(&inner).unwrap();
        assert_eq!(ints(&c), vec![0, 1, 2, 4, 8]);
        assert!(outer.compose(&Series::one(4)).is_err());
    }

    #[test]
    fn substitute_mark_collapses() {
        // (1 + m) t + m t^2 with m := 3 t^2
        let m: UPoly<BigInt> = UPoly::var();
        let one = UPoly::<BigInt>::one();
        let s = Series::from_coeffs(vec![UPoly::zero(), one.add(&m), m.clone()], 5);
        let c = s.substitute_mark(&BigInt::from(3), 2);
        assert_eq!(ints(&c), vec![0, 1, 0, 3, 3, 0]);
    }

    #[test]
    fn mixed_orders_truncate_to_min() {
        let a = Series::<BigInt>::one(7);
        let b = Series::<BigInt>::var(3);
        assert_eq!(a.mul(&b).order(), 3);
        assert_eq!(a.add(&b).order(), 3);
    }
}
