//! Coefficient extraction from the generating-function systems.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use super::systems::{build_system, GfSystem};
use super::{Dangles, ModelError, StructureClass};
use crate::series::{solve_fixed_point, Dual, Env, Evaluator, Ring, Semiring, Series, UPoly};

/// Polynomial in `p` whose coefficients are polynomials in `q`.
pub type PqPoly = UPoly<UPoly<BigInt>>;

/// `g(t, s, r)` plus the pair-free tail, with `t, s, r` bound to the given
/// series (so `t := 4t` or `s := p·u·t²` are just different bindings).
pub fn generating_series<R: Ring>(
    sys: &GfSystem,
    order: usize,
    t: Series<R>,
    s: Series<R>,
    r: Series<R>,
) -> Result<Series<R>, ModelError> {
    let env = Env::new(order).with("t", t).with("s", s).with("r", r);
    let f = solve_fixed_point(&sys.q, "y", &env, order)?;
    let env = env.with("y", f);
    let mut ev = Evaluator::new(&env);
    let g = ev.eval(&sys.r)?;
    let tail = ev.eval(&sys.tail)?;
    Ok(g.add(&tail))
}

fn ring_value<R: Ring>(q: &BigRational) -> Result<R, ModelError> {
    R::from_rational(q).ok_or(ModelError::Series(crate::series::SeriesError::Unrepresentable))
}

fn dangle_weight(class: &StructureClass) -> BigRational {
    match class.dangles {
        Dangles::None => BigRational::zero(),
        Dangles::External => class.params.q.clone(),
    }
}

fn weighted_series<R: Ring>(sys: &GfSystem, order: usize) -> Result<Series<R>, ModelError> {
    let p: R = ring_value(&sys.class.params.p)?;
    let q: R = ring_value(&dangle_weight(&sys.class))?;
    generating_series(
        sys,
        order,
        Series::var(order),
        Series::monomial(p, 2, order),
        Series::constant(q, order),
    )
}

fn to_rational<R: Ring>(c: &R) -> BigRational
where
    R: IntoRational,
{
    c.into_rational()
}

/// Exact embedding of the scalar rings back into the rationals.
pub trait IntoRational {
    fn into_rational(&self) -> BigRational;
}

impl IntoRational for BigInt {
    fn into_rational(&self) -> BigRational {
        BigRational::from_integer(self.clone())
    }
}

impl IntoRational for BigRational {
    fn into_rational(&self) -> BigRational {
        self.clone()
    }
}

/// `[t^n] g_p` (with dangles weighted by `q`) for `n = 0..=n_max`.
pub fn count_range(class: &StructureClass, n_max: usize) -> Result<Vec<BigRational>, ModelError> {
    let sys = build_system(class)?;
    if !dangle_weight(class).is_integer() {
        let s: Series<BigRational> = weighted_series(&sys, n_max)?;
        return Ok(s.into_coeffs());
    }
    if class.params.p.is_integer() {
        let s: Series<BigInt> = weighted_series(&sys, n_max)?;
        Ok(s.coeffs().iter().map(to_rational).collect())
    } else {
        // p = a/b: t := b u, s := a b u^2 keeps every coefficient integral
        let (a, b) = (class.params.p.numer().clone(), class.params.p.denom().clone());
        let q = dangle_weight(class).to_integer();
        let g: Series<BigInt> = generating_series(
            &sys,
            n_max,
            Series::monomial(b.clone(), 1, n_max),
            Series::monomial(&a * &b, 2, n_max),
            Series::constant(q, n_max),
        )?;
        Ok(unscale(g.coeffs(), &b, |c| BigRational::from_integer(c.clone())))
    }
}

/// Divides entry `n` by `b^n`.
fn unscale<T>(coeffs: &[T], b: &BigInt, f: impl Fn(&T) -> BigRational) -> Vec<BigRational> {
    let mut scale = BigInt::from(1);
    coeffs
        .iter()
        .map(|c| {
            let v = f(c) / BigRational::from_integer(scale.clone());
            scale *= b;
            v
        })
        .collect()
}

/// Weighted number of structures of length `n`.
pub fn count(class: &StructureClass, n: usize) -> Result<BigRational, ModelError> {
    Ok(count_range(class, n)?.swap_remove(n))
}

fn links_series<R: Ring>(sys: &GfSystem, order: usize) -> Result<Series<UPoly<R>>, ModelError> {
    let q: R = ring_value(&dangle_weight(&sys.class))?;
    generating_series(
        sys,
        order,
        Series::var(order),
        Series::monomial(UPoly::var(), 2, order),
        Series::constant(UPoly::constant(q), order),
    )
}

/// `[t^n s^k]` for every `n ≤ n_max`: entry `n` maps `k` to the number of
/// structures of length `n` with `k` links (dangles weighted by `q`, links
/// not weighted by `p`).
pub fn link_distribution(
    class: &StructureClass,
    n_max: usize,
) -> Result<Vec<BTreeMap<usize, BigRational>>, ModelError> {
    let sys = build_system(class)?;
    fn collect<R: Ring + IntoRational>(s: &Series<UPoly<R>>) -> Vec<BTreeMap<usize, BigRational>> {
        s.coeffs()
            .iter()
            .map(|poly| {
                poly.coeffs()
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(k, c)| (k, c.into_rational()))
                    .collect()
            })
            .collect()
    }
    if dangle_weight(class).is_integer() {
        Ok(collect(&links_series::<BigInt>(&sys, n_max)?))
    } else {
        Ok(collect(&links_series::<BigRational>(&sys, n_max)?))
    }
}

/// Link-count distribution at a single length `n`.
pub fn count_by_links(class: &StructureClass, n: usize) -> Result<BTreeMap<usize, BigRational>, ModelError> {
    Ok(link_distribution(class, n)?.swap_remove(n))
}

/// Weighted total `Σ p^k N_k` and first moment `Σ k p^k N_k` at one length.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkMoments {
    pub n: usize,
    pub total: BigRational,
    pub link_sum: BigRational,
}

impl LinkMoments {
    pub fn mean(&self) -> f64 {
        if self.total.is_zero() {
            return 0.0;
        }
        (&self.link_sum / &self.total).to_f64().unwrap_or(f64::NAN)
    }
}

/// Exact link moments for every length up to `n_max`, using dual numbers
/// `s := p(1 + ε)t²` so one series solve yields both sums.
pub fn link_moments(class: &StructureClass, n_max: usize) -> Result<Vec<LinkMoments>, ModelError> {
    let sys = build_system(class)?;
    fn run<R: Ring + IntoRational>(sys: &GfSystem, n_max: usize) -> Result<Vec<LinkMoments>, ModelError> {
        let p: R = ring_value(&sys.class.params.p)?;
        let q: R = ring_value(&dangle_weight(&sys.class))?;
        let s = Series::monomial(Dual::new(p.clone(), p), 2, n_max);
        let g = generating_series(
            sys,
            n_max,
            Series::var(n_max),
            s,
            Series::constant(Dual::new(q, R::zero()), n_max),
        )?;
        Ok(g.coeffs()
            .iter()
            .enumerate()
            .map(|(n, d)| LinkMoments {
                n,
                total: d.re.into_rational(),
                link_sum: d.eps.into_rational(),
            })
            .collect())
    }
    if !dangle_weight(class).is_integer() {
        return run::<BigRational>(&sys, n_max);
    }
    if class.params.p.is_integer() {
        return run::<BigInt>(&sys, n_max);
    }
    // same integral rescaling as in `count_range`
    let (a, b) = (class.params.p.numer().clone(), class.params.p.denom().clone());
    let ab = &a * &b;
    let q = dangle_weight(class).to_integer();
    let g = generating_series(
        &sys,
        n_max,
        Series::monomial(Dual::new(b.clone(), BigInt::from(0)), 1, n_max),
        Series::monomial(Dual::new(ab.clone(), ab), 2, n_max),
        Series::constant(Dual::new(q, BigInt::from(0)), n_max),
    )?;
    let totals = unscale(g.coeffs(), &b, |d| BigRational::from_integer(d.re.clone()));
    let sums = unscale(g.coeffs(), &b, |d| BigRational::from_integer(d.eps.clone()));
    Ok(totals
        .into_iter()
        .zip(sums)
        .enumerate()
        .map(|(n, (total, link_sum))| LinkMoments { n, total, link_sum })
        .collect())
}

/// Coefficients of `g_{p,q}(t)` with `p` and `q` kept symbolic.
pub fn symbolic_coefficients(class: &StructureClass, order: usize) -> Result<Vec<PqPoly>, ModelError> {
    let sys = build_system(class)?;
    let p: PqPoly = UPoly::var();
    let q: PqPoly = match class.dangles {
        Dangles::None => PqPoly::zero(),
        Dangles::External => UPoly::constant(UPoly::var()),
    };
    let g = generating_series(
        &sys,
        order,
        Series::var(order),
        Series::monomial(p, 2, order),
        Series::constant(q, order),
    )?;
    Ok(g.into_coeffs())
}

/// `[t^n] g(4t, 6t²)`: structure counts summed over all sequences on a
/// four-letter alphabet with six admissible pair types.
pub fn expected_count_series(class: &StructureClass, order: usize) -> Result<Vec<BigRational>, ModelError> {
    let sys = build_system(class)?;
    let four = BigRational::from_integer(4.into());
    let six = BigRational::from_integer(6.into());
    let q = dangle_weight(class);
    let g: Series<BigRational> = generating_series(
        &sys,
        order,
        Series::monomial(four, 1, order),
        Series::monomial(six, 2, order),
        Series::constant(q, order),
    )?;
    Ok(g.into_coeffs())
}

/// `1+3p+2pq`-style rendering, terms by increasing `p` then `q` degree.
pub fn format_pq(poly: &PqPoly) -> String {
    let mut terms = Vec::new();
    for (i, qpoly) in poly.coeffs().iter().enumerate() {
        for (j, c) in qpoly.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mut mono = String::new();
            for (name, e) in [("p", i), ("q", j)] {
                match e {
                    0 => {}
                    1 => mono.push_str(name),
                    _ => mono.push_str(&format!("{name}^{e}")),
                }
            }
            let one = BigInt::from(1);
            let coef = if mono.is_empty() || *c != one {
                c.to_string()
            } else {
                String::new()
            };
            terms.push(format!("{coef}{mono}"));
        }
    }
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join("+").replace("+-", "-")
    }
}
