//! Dominant singularities of positive systems `y = Φ(t, y)`.

use std::f64::consts::PI;

use serde::Serialize;

use super::linalg::{adjugate, det, solve};
use super::AsymptoticsError;
use crate::series::{Env, Evaluator, Expr};

/// `y_i = Φ_i(t, y_1, ..., y_k)` with symbolic first and second derivatives.
#[derive(Debug, Clone)]
pub struct PositiveSystem {
    t: String,
    unknowns: Vec<String>,
    fixed: Vec<(String, f64)>,
    phis: Vec<Expr>,
    /// `∂Φ_i/∂y_j`
    jac: Vec<Vec<Expr>>,
    /// `∂Φ_i/∂t`
    phi_t: Vec<Expr>,
    /// `∂²Φ_i/∂y_j∂t`
    jac_t: Vec<Vec<Expr>>,
    /// `∂²Φ_i/∂y_j∂y_l`
    hess: Vec<Vec<Vec<Expr>>>,
    denominators: Vec<Expr>,
    denominator_signs: Vec<f64>,
}

/// Solution of the characteristic system.
#[derive(Debug, Clone, Serialize)]
pub struct SingularPoint {
    pub t0: f64,
    pub y0: Vec<f64>,
    /// Max absolute residual of `y - Φ` and `det(I - J)`.
    pub residual: f64,
    /// Ratio seed that bracketed the search, if one was given.
    pub seed: Option<f64>,
    pub newton_steps: usize,
}

impl SingularPoint {
    pub fn gamma(&self) -> f64 {
        1.0 / self.t0
    }
}

struct Values {
    phi: Vec<f64>,
    jac: Vec<Vec<f64>>,
}

const TOLERANCE: f64 = 1e-10;

impl PositiveSystem {
    /// `fixed` binds any further parameters (such as a link marker `u`).
    pub fn new(
        phis: Vec<Expr>,
        t: &str,
        unknowns: &[&str],
        fixed: &[(&str, f64)],
    ) -> Result<Self, AsymptoticsError> {
        assert_eq!(phis.len(), unknowns.len(), "one equation per unknown");
        let jac: Vec<Vec<Expr>> = phis
            .iter()
            .map(|p| unknowns.iter().map(|u| p.diff(u)).collect())
            .collect();
        let phi_t = phis.iter().map(|p| p.diff(t)).collect();
        let jac_t = jac.iter().map(|row| row.iter().map(|e| e.diff(t)).collect()).collect();
        let hess = jac
            .iter()
            .map(|row| row.iter().map(|e| unknowns.iter().map(|u| e.diff(u)).collect()).collect())
            .collect();
        let mut denominators: Vec<Expr> = Vec::new();
        for p in &phis {
            for d in p.denominators() {
                if !denominators.iter().any(|e| e.ptr_eq(&d) || e.to_string() == d.to_string()) {
                    denominators.push(d);
                }
            }
        }
        let mut sys = PositiveSystem {
            t: t.to_string(),
            unknowns: unknowns.iter().map(|s| s.to_string()).collect(),
            fixed: fixed.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            phis,
            jac,
            phi_t,
            jac_t,
            hess,
            denominators,
            denominator_signs: Vec::new(),
        };
        let origin = vec![0.0; sys.k()];
        let env = sys.env(0.0, &origin);
        let mut ev = Evaluator::new(&env);
        let mut signs = Vec::with_capacity(sys.denominators.len());
        for d in &sys.denominators {
            let v = ev.eval(d)?;
            if v == 0.0 || !v.is_finite() {
                return Err(AsymptoticsError::OutsideDomain { t: 0.0 });
            }
            signs.push(v.signum());
        }
        sys.denominator_signs = signs;
        Ok(sys)
    }

    pub fn k(&self) -> usize {
        self.phis.len()
    }

    fn env(&self, t: f64, y: &[f64]) -> Env<f64> {
        let mut env = Env::new(());
        env.bind(&self.t, t);
        for (name, v) in self.unknowns.iter().zip(y) {
            env.bind(name, *v);
        }
        for (name, v) in &self.fixed {
            env.bind(name, *v);
        }
        env
    }

    /// Whether `(t, y)` lies where every denominator keeps its sign at the
    /// origin.
    pub fn in_domain(&self, t: f64, y: &[f64]) -> bool {
        if !(t.is_finite() && y.iter().all(|v| v.is_finite())) {
            return false;
        }
        let env = self.env(t, y);
        let mut ev = Evaluator::new(&env);
        self.denominators
            .iter()
            .zip(&self.denominator_signs)
            .all(|(d, s)| ev.eval(d).map(|v| v * s > 0.0).unwrap_or(false))
    }

    fn values(&self, t: f64, y: &[f64]) -> Result<Values, AsymptoticsError> {
        let env = self.env(t, y);
        let mut ev = Evaluator::new(&env);
        let phi = self.phis.iter().map(|e| ev.eval(e)).collect::<Result<Vec<_>, _>>()?;
        let jac = self
            .jac
            .iter()
            .map(|row| row.iter().map(|e| ev.eval(e)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Values { phi, jac })
    }

    fn i_minus(jac: &[Vec<f64>]) -> Vec<Vec<f64>> {
        jac.iter()
            .enumerate()
            .map(|(i, row)| {
                row.iter()
                    .enumerate()
                    .map(|(j, v)| if i == j { 1.0 - v } else { -v })
                    .collect()
            })
            .collect()
    }

    /// Least nonnegative solution of `y = Φ(t, y)` by Newton from `y = 0`,
    /// or `None` past the singularity (or a pole).
    pub fn least_fixed_point(&self, t: f64) -> Option<Vec<f64>> {
        let k = self.k();
        let mut y = vec![0.0; k];
        for _ in 0..400 {
            if !self.in_domain(t, &y) {
                return None;
            }
            let v = self.values(t, &y).ok()?;
            let a = Self::i_minus(&v.jac);
            if det(&a) <= 0.0 {
                return None;
            }
            let rhs: Vec<f64> = v.phi.iter().zip(&y).map(|(p, yi)| p - yi).collect();
            let step = solve(a, rhs)?;
            // iterates of a positive system increase monotonically
            if step.iter().zip(&y).any(|(s, yi)| *s < -1e-9 * (1.0 + yi.abs())) {
                return None;
            }
            let mut done = true;
            for (yi, s) in y.iter_mut().zip(&step) {
                *yi += s;
                if s.abs() > 1e-15 * (1.0 + yi.abs()) {
                    done = false;
                }
            }
            if done {
                return self.in_domain(t, &y).then_some(y);
            }
        }
        None
    }

    /// Residuals `(Φ - y, det(I - J))` at a point.
    fn residuals(&self, t: f64, y: &[f64]) -> Result<Vec<f64>, AsymptoticsError> {
        let v = self.values(t, y)?;
        let mut r: Vec<f64> = v.phi.iter().zip(y).map(|(p, yi)| p - yi).collect();
        r.push(det(&Self::i_minus(&v.jac)));
        Ok(r)
    }

    fn newton_matrix(&self, t: f64, y: &[f64]) -> Result<Vec<Vec<f64>>, AsymptoticsError> {
        let k = self.k();
        let env = self.env(t, y);
        let mut ev = Evaluator::new(&env);
        let mut eval = |e: &Expr| ev.eval(e);
        let jac = self
            .jac
            .iter()
            .map(|row| row.iter().map(&mut eval).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        let phi_t = self.phi_t.iter().map(&mut eval).collect::<Result<Vec<_>, _>>()?;
        let jac_t = self
            .jac_t
            .iter()
            .map(|row| row.iter().map(&mut eval).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        let hess = self
            .hess
            .iter()
            .map(|m| {
                m.iter()
                    .map(|row| row.iter().map(&mut eval).collect::<Result<Vec<_>, _>>())
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        let adj = adjugate(&Self::i_minus(&jac));
        // d det(A) = tr(adj(A) dA) with dA = -dJ
        let ddet = |dj: &dyn Fn(usize, usize) -> f64| -> f64 {
            let mut s = 0.0;
            for i in 0..k {
                for j in 0..k {
                    s -= adj[j][i] * dj(i, j);
                }
            }
            s
        };
        let mut m = vec![vec![0.0; k + 1]; k + 1];
        // unknown order: t, y_1..y_k
        for i in 0..k {
            m[i][0] = phi_t[i];
            for j in 0..k {
                m[i][j + 1] = jac[i][j] - if i == j { 1.0 } else { 0.0 };
            }
        }
        m[k][0] = ddet(&|i, j| jac_t[i][j]);
        for l in 0..k {
            m[k][l + 1] = ddet(&|i, j| hess[i][j][l]);
        }
        Ok(m)
    }

    /// Solves `y = Φ(t, y)`, `det(I - J) = 0` for the dominant singularity.
    ///
    /// `seed` (typically a coefficient ratio) brackets a bisection on `t`
    /// using [`Self::least_fixed_point`] as the feasibility test; damped
    /// Newton in `k + 1` unknowns then polishes the point.
    pub fn solve(&self, seed: Option<f64>) -> Result<SingularPoint, AsymptoticsError> {
        let (mut lo, mut hi) = (0.0_f64, f64::NAN);
        if let Some(s) = seed.filter(|s| s.is_finite() && *s > 0.0) {
            if self.least_fixed_point(0.97 * s).is_some() {
                lo = 0.97 * s;
            }
            if self.least_fixed_point(1.03 * s).is_none() {
                hi = 1.03 * s;
            }
        }
        if hi.is_nan() {
            let mut probe = if lo > 0.0 { 2.0 * lo } else { 0.5 };
            for _ in 0..80 {
                if self.least_fixed_point(probe).is_none() {
                    break;
                }
                lo = probe;
                probe *= 2.0;
            }
            hi = probe;
            if self.least_fixed_point(hi).is_some() {
                return Err(AsymptoticsError::NoSingularity);
            }
        }
        let mut y_lo = self.least_fixed_point(lo).ok_or(AsymptoticsError::OutsideDomain { t: lo })?;
        for _ in 0..200 {
            if hi - lo <= 1e-15 * hi {
                break;
            }
            let mid = 0.5 * (lo + hi);
            match self.least_fixed_point(mid) {
                Some(y) => {
                    lo = mid;
                    y_lo = y;
                }
                None => hi = mid,
            }
        }
        self.polish(lo, y_lo, seed)
    }

    fn polish(&self, t: f64, y: Vec<f64>, seed: Option<f64>) -> Result<SingularPoint, AsymptoticsError> {
        let k = self.k();
        let norm = |r: &[f64]| r.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let mut x: Vec<f64> = std::iter::once(t).chain(y).collect();
        let mut res = norm(&self.residuals(x[0], &x[1..])?);
        let mut steps = 0;
        for _ in 0..60 {
            if res <= 1e-15 {
                break;
            }
            let m = self.newton_matrix(x[0], &x[1..])?;
            let r = self.residuals(x[0], &x[1..])?;
            let delta = solve(m, r.iter().map(|v| -v).collect()).ok_or(AsymptoticsError::SingularJacobian)?;
            let mut lambda = 1.0;
            let mut accepted = false;
            for _ in 0..40 {
                let cand: Vec<f64> = x.iter().zip(&delta).map(|(a, d)| a + lambda * d).collect();
                if self.in_domain(cand[0], &cand[1..]) {
                    let rc = norm(&self.residuals(cand[0], &cand[1..])?);
                    if rc < res || (rc <= 1e-15 && res <= 1e-14) {
                        x = cand;
                        res = rc;
                        accepted = true;
                        break;
                    }
                }
                lambda *= 0.5;
            }
            steps += 1;
            if !accepted {
                break;
            }
        }
        if !self.in_domain(x[0], &x[1..]) || x[0] <= 0.0 {
            return Err(AsymptoticsError::OutsideDomain { t: x[0] });
        }
        if !(res <= TOLERANCE) {
            return Err(AsymptoticsError::Divergence { residual: res });
        }
        debug_assert_eq!(x.len(), k + 1);
        Ok(SingularPoint {
            t0: x[0],
            y0: x[1..].to_vec(),
            residual: res,
            seed,
            newton_steps: steps,
        })
    }

    /// Amplitudes `c_i` with `[t^n] y_i ~ c_i t0^{-n} n^{-3/2}`.
    ///
    /// Uses right and left null vectors `v`, `w` of `I - J` (read off the
    /// adjugate): `c_i = v_i sqrt(t0 w·Φ_t / (2π w·Φ_yy[v, v]))`.
    pub fn amplitudes(&self, point: &SingularPoint) -> Result<Vec<f64>, AsymptoticsError> {
        let k = self.k();
        let (t, y) = (point.t0, &point.y0);
        let env = self.env(t, y);
        let mut ev = Evaluator::new(&env);
        let jac = self
            .jac
            .iter()
            .map(|row| row.iter().map(|e| ev.eval(e)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        let phi_t = self.phi_t.iter().map(|e| ev.eval(e)).collect::<Result<Vec<_>, _>>()?;
        let adj = adjugate(&Self::i_minus(&jac));
        let col = (0..k)
            .max_by(|&a, &b| {
                let na: f64 = adj.iter().map(|r| r[a].abs()).sum();
                let nb: f64 = adj.iter().map(|r| r[b].abs()).sum();
                na.total_cmp(&nb)
            })
            .expect("k ≥ 1");
        let row = (0..k)
            .max_by(|&a, &b| {
                let na: f64 = adj[a].iter().map(|v| v.abs()).sum();
                let nb: f64 = adj[b].iter().map(|v| v.abs()).sum();
                na.total_cmp(&nb)
            })
            .expect("k ≥ 1");
        let orient = |v: Vec<f64>| {
            if v.iter().sum::<f64>() < 0.0 {
                v.into_iter().map(|x| -x).collect()
            } else {
                v
            }
        };
        let v: Vec<f64> = orient(adj.iter().map(|r| r[col]).collect());
        let w: Vec<f64> = orient(adj[row].clone());
        let num: f64 = w.iter().zip(&phi_t).map(|(a, b)| a * b).sum();
        let mut den = 0.0;
        for i in 0..k {
            for j in 0..k {
                for l in 0..k {
                    den += w[i] * ev.eval(&self.hess[i][j][l])? * v[j] * v[l];
                }
            }
        }
        if !(den > 0.0) {
            return Err(AsymptoticsError::NonPositiveCurvature { value: den });
        }
        let scale = (t * num / (2.0 * PI * den)).sqrt();
        if !scale.is_finite() || scale <= 0.0 {
            return Err(AsymptoticsError::NonPositiveCurvature { value: num });
        }
        Ok(v.iter().map(|vi| vi * scale).collect())
    }

    /// Value of an auxiliary expression (such as `Ψ_y`) at a point.
    pub fn eval_at(&self, e: &Expr, point: &SingularPoint) -> Result<f64, AsymptoticsError> {
        Ok(e.eval(&self.env(point.t0, &point.y0))?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalan_point_and_amplitude() {
        let (t, y) = (Expr::var("t"), Expr::var("y"));
        let sys = PositiveSystem::new(vec![&t + y.pow(2)], "t", &["y"], &[]).unwrap();
        let pt = sys.solve(None).unwrap();
        assert!((pt.t0 - 0.25).abs() < 1e-13);
        assert!((pt.y0[0] - 0.5).abs() < 1e-7);
        assert!(pt.residual <= 1e-10);
        let c = sys.amplitudes(&pt).unwrap()[0];
        assert!((c - 1.0 / (4.0 * PI.sqrt())).abs() < 1e-7, "{c}");
    }

    #[test]
    fn split_catalan_system_matches_scalar() {
        // a = t + a b, b = a: same as y = t + y^2 in both components
        let (t, a, b) = (Expr::var("t"), Expr::var("a"), Expr::var("b"));
        let sys = PositiveSystem::new(vec![&t + &a * &b, a.clone()], "t", &["a", "b"], &[]).unwrap();
        let pt = sys.solve(Some(0.26)).unwrap();
        assert!((pt.t0 - 0.25).abs() < 1e-12);
        let c = sys.amplitudes(&pt).unwrap();
        let want = 1.0 / (4.0 * PI.sqrt());
        assert!((c[0] - want).abs() < 1e-7 && (c[1] - want).abs() < 1e-7, "{c:?}");
    }

    #[test]
    fn pole_before_branch_point_is_excluded() {
        // y = t/(1 - 2t) + t y^2: domain ends at t = 1/2
        let (t, y) = (Expr::var("t"), Expr::var("y"));
        let sys = PositiveSystem::new(vec![&t / (1 - 2 * &t) + &t * y.pow(2)], "t", &["y"], &[]).unwrap();
        let pt = sys.solve(None).unwrap();
        assert!(pt.t0 < 0.5);
        assert!(!sys.in_domain(0.6, &[0.0]));
    }
}
