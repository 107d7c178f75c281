//! The `(Q, R)` systems: `f = Q(t, s, r, f)` and `g = R(t, s, r, f)`, where
//! `t` marks free bases, `s` links and `r` dangles.

use std::collections::HashMap;

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{Dangles, ModelError, StructureClass};
use crate::series::Expr;
use crate::structures::StructureFamily;

#[derive(Debug, Clone)]
pub struct GfSystem {
    pub class: StructureClass,
    /// `f = Q(t, s, r, y)` at `y = f`.
    pub q: Expr,
    /// `g = R(t, s, r, f)` counts structures with at least one link.
    pub r: Expr,
    /// Pair-free structures, a function of `t` alone.
    pub tail: Expr,
}

fn var(name: &str) -> Expr {
    Expr::var(name)
}

/// Tree-level equations in the corner/edge variables `u, v, x` (and
/// `v1, v2` for lateral and extremal corners under dangles).
fn tree_equations(family: StructureFamily, dangles: Dangles) -> (Expr, Expr) {
    let (u, x, y) = (var("u"), var("x"), var("y"));
    let xy = &x * &y;
    match (family, dangles) {
        (StructureFamily::General, Dangles::None) => {
            let v = var("v");
            let r = &x * (1 + &v).pow(2) * &y / (1 - &x * (1 + &v) * &y);
            (&u + &r - &xy, r)
        }
        (StructureFamily::General, Dangles::External) => {
            let (v1, v2) = (var("v1"), var("v2"));
            let r = &x * (1 + &v1).pow(2) * &y / (1 - &x * (1 + &v2) * &y);
            (&u + &r - &xy, r)
        }
        (StructureFamily::Saturated, Dangles::None) => {
            let v = var("v");
            let g = 1 - &xy;
            let tail = &v / g.pow(2) - &v;
            let q = &u + xy.pow(2) / &g + &tail;
            let r = &xy / &g + &tail;
            (q, r)
        }
        (StructureFamily::Saturated, Dangles::External) => {
            let (v1, v2) = (var("v1"), var("v2"));
            let g = 1 - &xy;
            let tail = &v2 / g.pow(2) - &v2;
            let lateral = 2 * &xy * (&v1 - &v2);
            let q = &u + (xy.pow(2) + &lateral) / &g + &tail;
            let r = &xy * (1 + 2 * (&v1 - &v2)) / &g + &tail;
            (q, r)
        }
        (StructureFamily::GSaturated, Dangles::None) => {
            let v = var("v");
            let den = 1 - &xy - &v * xy.pow(2);
            let q = &u + 2 * &v * &xy + (1 + 2 * &v * xy.pow(2) * (1 + &v * &xy)) / &den - 1 - &xy;
            let r = &xy * (1 + 2 * &v + (1 + &v) * &v * &xy) / &den;
            (q, r)
        }
        (StructureFamily::GSaturated, Dangles::External) => {
            let (v1, v2) = (var("v1"), var("v2"));
            let den = 1 - &xy - &v2 * xy.pow(2);
            let q = &u + 2 * &v1 * &xy + (1 + 2 * &v1 * xy.pow(2) * (1 + &v2 * &xy)) / &den
                - &xy
                - 1;
            let r = &xy * (1 + 2 * &v1 + &xy * (&v2 + v1.pow(2))) / &den;
            (q, r)
        }
    }
}

/// Substitutions of the tree variables by series in `t, s, r`.
fn substitutions(class: &StructureClass) -> HashMap<&'static str, Expr> {
    let (t, s, r) = (var("t"), var("s"), var("r"));
    let theta = class.params.theta;
    let tau = class.params.tau;
    let geometric_t = &t / (1 - &t);
    // free runs of length 1..=theta+1
    let short_runs = (&t - t.pow(theta + 2)) / (1 - &t);
    let (u, v, x) = match class.family {
        StructureFamily::General => (
            t.pow(theta) / (1 - &t),
            geometric_t.clone(),
            s.pow(tau + 1) / (1 - &s),
        ),
        StructureFamily::Saturated => (t.pow(theta) * (1 + &t), short_runs.clone(), &s / (1 - &s)),
        StructureFamily::GSaturated => (
            t.pow(theta) * (1 + &t),
            geometric_t.clone(),
            s.pow(tau + 1) / (1 - &s),
        ),
    };
    let mut map = HashMap::from([("u", u), ("x", x)]);
    match class.dangles {
        Dangles::None => {
            map.insert("v", v);
        }
        Dangles::External => {
            let runs = match class.family {
                StructureFamily::Saturated => short_runs,
                _ => geometric_t,
            };
            map.insert("v1", &runs * (1 + &r));
            map.insert("v2", &runs * (1 + &r).pow(2) - &t * r.pow(2));
        }
    }
    map
}

pub fn build_system(class: &StructureClass) -> Result<GfSystem, ModelError> {
    let class = StructureClass::new(class.family, class.dangles, class.params.clone())?;
    let (q_tree, r_tree) = tree_equations(class.family, class.dangles);
    let subs = substitutions(&class);
    let t = var("t");
    let tail = match class.family {
        StructureFamily::Saturated => t.power_sum(1, class.params.theta + 1),
        _ => &t / (1 - &t),
    };
    Ok(GfSystem {
        q: q_tree.substitute(&subs),
        r: r_tree.substitute(&subs),
        tail,
        class,
    })
}

impl GfSystem {
    /// `1` when `theta = 0` (then `f(0) = 1`), else `0`.
    pub fn shift(&self) -> i64 {
        i64::from(self.class.params.theta == 0)
    }

    /// `(Φ, Ψ)` in `t, u, y`: `s := p·u·t²`, `r := q`, `y := y + c`,
    /// `Φ = Q − c` with `c` the [`shift`](Self::shift). `u` marks links.
    pub fn phi_psi(&self) -> (Expr, Expr) {
        let c = self.shift();
        let (t, u, y) = (var("t"), var("u"), var("y"));
        let p = Expr::constant(self.class.params.p.clone());
        let q = Expr::constant(self.class.params.q.clone());
        let bindings = HashMap::from([("s", p * u * t.pow(2)), ("r", q), ("y", &y + c)]);
        let phi = self.q.substitute(&bindings) - c;
        let psi = self.r.substitute(&bindings);
        (phi, psi)
    }

    /// `(Φ, Ψ)` at `u = 1`, in `t, y`.
    pub fn phi_psi_at_unit_marker(&self) -> (Expr, Expr) {
        let (phi, psi) = self.phi_psi();
        let one = HashMap::from([("u", Expr::constant(BigRational::one()))]);
        (phi.substitute(&one), psi.substitute(&one))
    }

    pub fn has_integral_weights(&self) -> bool {
        self.class.params.p.is_integer() && self.class.params.q.is_integer()
    }

    pub fn without_dangle_weight(&self) -> bool {
        self.class.dangles == Dangles::None || self.class.params.q.is_zero()
    }
}

/// Equations and substitutions, exposed for documentation and the CLI.
pub fn describe(class: &StructureClass) -> Result<String, ModelError> {
    let sys = build_system(class)?;
    Ok(format!("Q = {}\nR = {}\ntail = {}", sys.q, sys.r, sys.tail))
}
