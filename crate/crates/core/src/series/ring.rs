//! Coefficient rings for truncated series.
//!
//! Series are truncated in one principal variable; every other marked
//! variable lives in the coefficient ring. `UPoly<R>` adds one polynomial
//! variable on top of `R` and nests, so `UPoly<UPoly<BigInt>>` is `Z[p][q]`.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Commutative semiring: enough structure for grammar dynamic programs.
pub trait Semiring: Clone + Debug + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;

    fn add_assign(&mut self, other: &Self) {
        *self = self.add(other);
    }

    /// `self += a * b`.
    fn add_mul_assign(&mut self, a: &Self, b: &Self) {
        if a.is_zero() || b.is_zero() {
            return;
        }
        let prod = a.mul(b);
        self.add_assign(&prod);
    }

    fn pow(&self, exp: u32) -> Self {
        let mut acc = Self::one();
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
}

/// Commutative ring with a partial inverse and a rational embedding.
pub trait Ring: Semiring + PartialEq {
    fn neg(&self) -> Self;

    fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Inverse of a unit, `None` otherwise.
    fn inverse(&self) -> Option<Self>;

    /// Image of an exact rational, `None` when the ring cannot hold it.
    fn from_rational(q: &BigRational) -> Option<Self>;

    fn from_i64(n: i64) -> Self {
        Self::from_rational(&BigRational::from_integer(BigInt::from(n)))
            .expect("every ring contains the integers")
    }
}

impl Semiring for BigInt {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn add_assign(&mut self, other: &Self) {
        *self += other;
    }
    fn add_mul_assign(&mut self, a: &Self, b: &Self) {
        if Zero::is_zero(a) || Zero::is_zero(b) {
            return;
        }
        *self += a * b;
    }
}

impl Ring for BigInt {
    fn neg(&self) -> Self {
        -self
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn inverse(&self) -> Option<Self> {
        if self.abs().is_one() {
            Some(self.clone())
        } else {
            None
        }
    }
    fn from_rational(q: &BigRational) -> Option<Self> {
        q.is_integer().then(|| q.to_integer())
    }
}

impl Semiring for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn add_assign(&mut self, other: &Self) {
        *self += other;
    }
}

impl Ring for BigRational {
    fn neg(&self) -> Self {
        -self
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn inverse(&self) -> Option<Self> {
        (!Zero::is_zero(self)).then(|| self.recip())
    }
    fn from_rational(q: &BigRational) -> Option<Self> {
        Some(q.clone())
    }
}

impl Semiring for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn add_assign(&mut self, other: &Self) {
        *self += other;
    }
    fn add_mul_assign(&mut self, a: &Self, b: &Self) {
        *self += a * b;
    }
}

impl Ring for f64 {
    fn neg(&self) -> Self {
        -self
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn inverse(&self) -> Option<Self> {
        (*self != 0.0).then(|| 1.0 / self)
    }
    fn from_rational(q: &BigRational) -> Option<Self> {
        rational_to_f64(q)
    }
}

/// Nearest `f64`, also for numerators and denominators beyond `f64` range.
pub fn rational_to_f64(q: &BigRational) -> Option<f64> {
    if let (Some(n), Some(d)) = (q.numer().to_f64(), q.denom().to_f64()) {
        if n.is_finite() && d.is_finite() {
            return Some(n / d);
        }
    }
    let ln = ln_abs_rational(q)?;
    let v = ln.exp();
    Some(if q.is_negative() { -v } else { v })
}

/// Natural logarithm of `|x|`; `None` for zero.
pub fn ln_abs_bigint(x: &BigInt) -> Option<f64> {
    if Zero::is_zero(x) {
        return None;
    }
    let bits = x.bits();
    if bits <= 1000 {
        return x.abs().to_f64().map(f64::ln);
    }
    let shift = bits - 64;
    let top = (x.abs() >> shift).to_f64()?;
    Some(top.ln() + shift as f64 * std::f64::consts::LN_2)
}

pub fn ln_abs_rational(q: &BigRational) -> Option<f64> {
    Some(ln_abs_bigint(q.numer())? - ln_abs_bigint(q.denom())?)
}

/// Dense univariate polynomial with coefficients in `R`, trailing zeros trimmed.
#[derive(Clone, Debug, PartialEq)]
pub struct UPoly<R> {
    coeffs: Vec<R>,
}

impl<R: Semiring> UPoly<R> {
    pub fn from_coeffs(mut coeffs: Vec<R>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UPoly { coeffs }
    }

    pub fn constant(c: R) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// The polynomial variable itself.
    pub fn var() -> Self {
        UPoly {
            coeffs: vec![R::zero(), R::one()],
        }
    }

    pub fn coeffs(&self) -> &[R] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> R {
        self.coeffs.get(k).cloned().unwrap_or_else(R::zero)
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: &R) -> R {
        let mut acc = R::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x).add(c);
        }
        acc
    }
}

impl<R: Semiring> Semiring for UPoly<R> {
    fn zero() -> Self {
        UPoly { coeffs: Vec::new() }
    }
    fn one() -> Self {
        UPoly {
            coeffs: vec![R::one()],
        }
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }
    fn add_assign(&mut self, other: &Self) {
        if self.coeffs.len() < other.coeffs.len() {
            self.coeffs.resize(other.coeffs.len(), R::zero());
        }
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            a.add_assign(b);
        }
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }
    fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![R::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j].add_mul_assign(a, b);
            }
        }
        Self::from_coeffs(out)
    }
    fn add_mul_assign(&mut self, a: &Self, b: &Self) {
        if a.is_zero() || b.is_zero() {
            return;
        }
        let len = a.coeffs.len() + b.coeffs.len() - 1;
        if self.coeffs.len() < len {
            self.coeffs.resize(len, R::zero());
        }
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                self.coeffs[i + j].add_mul_assign(x, y);
            }
        }
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }
}

impl<R: Ring> Ring for UPoly<R> {
    fn neg(&self) -> Self {
        UPoly {
            coeffs: self.coeffs.iter().map(Ring::neg).collect(),
        }
    }
    fn inverse(&self) -> Option<Self> {
        match self.coeffs.as_slice() {
            [c] => c.inverse().map(Self::constant),
            _ => None,
        }
    }
    fn from_rational(q: &BigRational) -> Option<Self> {
        R::from_rational(q).map(Self::constant)
    }
}

/// First-order dual numbers `a + b·ε`, `ε² = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct Dual<R> {
    pub re: R,
    pub eps: R,
}

impl<R: Semiring> Dual<R> {
    pub fn new(re: R, eps: R) -> Self {
        Dual { re, eps }
    }
}

impl<R: Semiring> Semiring for Dual<R> {
    fn zero() -> Self {
        Dual::new(R::zero(), R::zero())
    }
    fn one() -> Self {
        Dual::new(R::one(), R::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.eps.is_zero()
    }
    fn add(&self, other: &Self) -> Self {
        Dual::new(self.re.add(&other.re), self.eps.add(&other.eps))
    }
    fn add_assign(&mut self, other: &Self) {
        self.re.add_assign(&other.re);
        self.eps.add_assign(&other.eps);
    }
    fn mul(&self, other: &Self) -> Self {
        let mut eps = self.re.mul(&other.eps);
        eps.add_mul_assign(&self.eps, &other.re);
        Dual::new(self.re.mul(&other.re), eps)
    }
    fn add_mul_assign(&mut self, a: &Self, b: &Self) {
        self.re.add_mul_assign(&a.re, &b.re);
        self.eps.add_mul_assign(&a.re, &b.eps);
        self.eps.add_mul_assign(&a.eps, &b.re);
    }
}

impl<R: Ring> Ring for Dual<R> {
    fn neg(&self) -> Self {
        Dual::new(self.re.neg(), self.eps.neg())
    }
    fn inverse(&self) -> Option<Self> {
        let inv = self.re.inverse()?;
        let eps = self.eps.mul(&inv).mul(&inv).neg();
        Some(Dual::new(inv, eps))
    }
    fn from_rational(q: &BigRational) -> Option<Self> {
        Some(Dual::new(R::from_rational(q)?, R::zero()))
    }
}

/// Log-domain expectation semiring: a weight `exp(ln_z)` together with the
/// weighted mean of one additive statistic. Sums pool means, products add them.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogExpectation {
    pub ln_z: f64,
    pub mean: f64,
}

impl LogExpectation {
    /// A single alternative of weight `exp(ln_w)` carrying statistic `value`.
    pub fn weighted(ln_w: f64, value: f64) -> Self {
        LogExpectation { ln_z: ln_w, mean: value }
    }
}

impl Semiring for LogExpectation {
    fn zero() -> Self {
        LogExpectation {
            ln_z: f64::NEG_INFINITY,
            mean: 0.0,
        }
    }
    fn one() -> Self {
        LogExpectation { ln_z: 0.0, mean: 0.0 }
    }
    fn is_zero(&self) -> bool {
        self.ln_z == f64::NEG_INFINITY
    }
    fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return *other;
        }
        if other.is_zero() {
            return *self;
        }
        let m = self.ln_z.max(other.ln_z);
        let wa = (self.ln_z - m).exp();
        let wb = (other.ln_z - m).exp();
        LogExpectation {
            ln_z: m + (wa + wb).ln(),
            mean: (wa * self.mean + wb * other.mean) / (wa + wb),
        }
    }
    fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        LogExpectation {
            ln_z: self.ln_z + other.ln_z,
            mean: self.mean + other.mean,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn bigint_units_only() {
        assert_eq!(BigInt::from(-1).inverse(), Some(BigInt::from(-1)));
        assert_eq!(BigInt::from(2).inverse(), None);
        assert_eq!(BigInt::from_rational(&q(3, 2)), None);
        assert_eq!(BigInt::from_rational(&q(6, 2)), Some(BigInt::from(3)));
    }

    #[test]
    fn nested_polynomials_multiply() {
        // (1 + p)(1 + q) in Z[p][q]
        let p: UPoly<UPoly<BigInt>> = UPoly::var();
        let qv: UPoly<UPoly<BigInt>> = UPoly::constant(UPoly::var());
        let one = UPoly::<UPoly<BigInt>>::one();
        let prod = one.add(&p).mul(&one.add(&qv));
        assert_eq!(prod.coeff(0), UPoly::from_coeffs(vec![1.into(), 1.into()]));
        assert_eq!(prod.coeff(1), UPoly::from_coeffs(vec![1.into(), 1.into()]));
        assert_eq!(prod.degree(), Some(1));
    }

    #[test]
    fn dual_inverse() {
        let x = Dual::new(q(2, 1), q(3, 1));
        let inv = x.inverse().unwrap();
        assert_eq!(x.mul(&inv), Dual::one());
    }

    #[test]
    fn log_expectation_pools_means() {
        let a = LogExpectation::weighted(0.0, 1.0);
        let b = LogExpectation::weighted(2f64.ln(), 4.0);
        let s = a.add(&b);
        assert!((s.ln_z - 3f64.ln()).abs() < 1e-14);
        assert!((s.mean - 3.0).abs() < 1e-14);
        let p = a.mul(&b);
        assert!((p.mean - 5.0).abs() < 1e-14);
    }

    #[test]
    fn huge_rationals_convert() {
        let big = BigInt::from(10).pow(400u32);
        let v = ln_abs_bigint(&big).unwrap();
        assert!((v - 400.0 * 10f64.ln()).abs() < 1e-9);
        let r = BigRational::new(big.clone() * 3, big);
        assert_eq!(rational_to_f64(&r), Some(3.0));
    }
}
