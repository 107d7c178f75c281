//! Singularity analysis: growth rates and amplitudes of structure counts,
//! and the Gaussian limit law of the number of links.

mod linalg;
mod singularity;

use num_rational::BigRational;
use serde::Serialize;
use thiserror::Error;

pub use singularity::{PositiveSystem, SingularPoint};

use crate::models::{build_system, count_range, dangle_grammar_system, Dangles, Grammar, ModelError, StructureClass};
use crate::series::{ln_abs_rational, Env, Evaluator, Expr, SeriesError};

#[derive(Debug, Error)]
pub enum AsymptoticsError {
    #[error("Newton iteration did not converge (residual {residual:e})")]
    Divergence { residual: f64 },
    #[error("solution left the convergence domain near t = {t}")]
    OutsideDomain { t: f64 },
    #[error("no singularity found: the system stays solvable for every probed t")]
    NoSingularity,
    #[error("singular Jacobian in the Newton system")]
    SingularJacobian,
    #[error("second derivative is not positive at the singularity ({value:e})")]
    NonPositiveCurvature { value: f64 },
    #[error("variance is not positive after extrapolation (sigma^2 = {sigma2:e})")]
    NonPositiveVariance { sigma2: f64 },
    #[error("coefficient {n} is zero")]
    ZeroCoefficient { n: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Knobs for the ratio seed and the exact-coefficient diagnostics.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AsymptoticsConfig {
    /// Coefficient index whose ratio seeds the search.
    pub seed_n: usize,
    /// Coefficient index compared against the asymptotic formula.
    pub diagnostic_n: usize,
}

impl Default for AsymptoticsConfig {
    fn default() -> Self {
        AsymptoticsConfig {
            seed_n: 200,
            diagnostic_n: 400,
        }
    }
}

/// Ratio estimates from exact coefficients.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RatioDiagnostic {
    pub n: usize,
    /// `a_n / a_{n-1}`
    pub gamma_estimate: f64,
    /// `a_n n^{3/2} / γ^n` with the solver's `γ`
    pub c_estimate: f64,
}

/// `a_n / a_{n-1}` and `a_n n^{3/2} / γ^n`.
pub fn ratio_diagnostic(coeffs: &[BigRational], n: usize, gamma: f64) -> Result<RatioDiagnostic, AsymptoticsError> {
    assert!(n >= 1 && n < coeffs.len(), "series too short for n = {n}");
    let ln = |k: usize| {
        ln_abs_rational(&coeffs[k]).ok_or(AsymptoticsError::ZeroCoefficient { n: k })
    };
    let (a, b) = (ln(n)?, ln(n - 1)?);
    let nf = n as f64;
    Ok(RatioDiagnostic {
        n,
        gamma_estimate: (a - b).exp(),
        c_estimate: (a + 1.5 * nf.ln() - nf * gamma.ln()).exp(),
    })
}

/// `t0 ≈ (a_{n-1}/a_n)(1 - 3/(2n))`, the ratio corrected for `n^{-3/2}`.
pub fn ratio_seed(coeffs: &[BigRational], n: usize) -> Option<f64> {
    let a = ln_abs_rational(coeffs.get(n)?)?;
    let b = ln_abs_rational(coeffs.get(n - 1)?)?;
    Some((b - a).exp() * (1.0 - 1.5 / n as f64))
}

/// `c γ^n n^{-3/2}`
pub fn asymptotic_coefficient(c: f64, gamma: f64, n: usize) -> f64 {
    let nf = n as f64;
    (c.ln() + nf * gamma.ln() - 1.5 * nf.ln()).exp()
}

#[derive(Debug, Clone, Serialize)]
pub struct Diagnostics {
    pub seed: Option<f64>,
    pub newton_steps: usize,
    /// Ratio estimates at `diagnostic_n` for the reported amplitude.
    pub ratio: Option<RatioDiagnostic>,
    /// `|c γ^n n^{-3/2} / a_n - 1|` at `diagnostic_n`.
    pub relative_error: Option<f64>,
}

/// Growth rate and amplitudes of one structure class or grammar.
#[derive(Debug, Clone, Serialize)]
pub struct AsymptoticEstimate {
    pub class: String,
    pub theta: u32,
    pub tau: u32,
    pub p: String,
    pub q: String,
    pub gamma: f64,
    /// Amplitude of the solution `y` of the fixed-point equation.
    pub c: f64,
    /// Amplitude of the structure counts `g = Ψ(t, y)` when they differ
    /// from `y`.
    pub d: Option<f64>,
    /// Amplitude of the reported counts: `d` when present, else `c`.
    pub c_or_d: f64,
    pub t0: f64,
    pub y0: Vec<f64>,
    pub residual: f64,
    pub diagnostics: Diagnostics,
}

impl AsymptoticEstimate {
    /// Predicted count at length `n`.
    pub fn predict(&self, n: usize) -> f64 {
        asymptotic_coefficient(self.c_or_d, self.gamma, n)
    }
}

fn class_q(class: &StructureClass) -> BigRational {
    match class.dangles {
        Dangles::None => BigRational::from_integer(0.into()),
        Dangles::External => class.params.q.clone(),
    }
}

fn diagnostics(
    point: &SingularPoint,
    coeffs: &[BigRational],
    amplitude: f64,
    n: usize,
) -> Result<Diagnostics, AsymptoticsError> {
    let (ratio, relative_error) = if n < coeffs.len() {
        let r = ratio_diagnostic(coeffs, n, point.gamma())?;
        (Some(r), Some((amplitude / r.c_estimate - 1.0).abs()))
    } else {
        (None, None)
    };
    Ok(Diagnostics {
        seed: point.seed,
        newton_steps: point.newton_steps,
        ratio,
        relative_error,
    })
}

/// `γ`, `c` and `d` for a structure class at its bound `p` (and `q`).
pub fn analyze_class(class: &StructureClass, config: AsymptoticsConfig) -> Result<AsymptoticEstimate, AsymptoticsError> {
    let sys = build_system(class)?;
    let (phi, psi) = sys.phi_psi_at_unit_marker();
    let coeffs = count_range(class, config.seed_n.max(config.diagnostic_n))?;
    let seed = ratio_seed(&coeffs, config.seed_n);
    let solver = PositiveSystem::new(vec![phi], "t", &["y"], &[])?;
    let point = solver.solve(seed)?;
    let c = solver.amplitudes(&point)?[0];
    let d = c * solver.eval_at(&psi.diff("y"), &point)?;
    Ok(AsymptoticEstimate {
        class: class.label(),
        theta: class.params.theta,
        tau: class.params.tau,
        p: class.params.p.to_string(),
        q: class_q(class).to_string(),
        gamma: point.gamma(),
        c,
        d: Some(d),
        c_or_d: d,
        t0: point.t0,
        y0: point.y0.clone(),
        residual: point.residual,
        diagnostics: diagnostics(&point, &coeffs, d, config.diagnostic_n)?,
    })
}

/// `γ` and the amplitude of `S` for the dangle grammars `G4` and `G5`.
pub fn analyze_grammar(
    grammar: Grammar,
    theta: u32,
    p: &BigRational,
    q: &BigRational,
    config: AsymptoticsConfig,
) -> Result<AsymptoticEstimate, AsymptoticsError> {
    let gs = dangle_grammar_system(grammar, theta)?;
    let coeffs = gs.counts(config.seed_n.max(config.diagnostic_n), p, q)?;
    let seed = ratio_seed(&coeffs, config.seed_n);
    let solver = PositiveSystem::new(gs.bind(p, q), "z", &gs.unknowns, &[])?;
    let point = solver.solve(seed)?;
    let c = solver.amplitudes(&point)?[0];
    Ok(AsymptoticEstimate {
        class: grammar.to_string(),
        theta,
        tau: 0,
        p: p.to_string(),
        q: q.to_string(),
        gamma: point.gamma(),
        c,
        d: None,
        c_or_d: c,
        t0: point.t0,
        y0: point.y0.clone(),
        residual: point.residual,
        diagnostics: diagnostics(&point, &coeffs, c, config.diagnostic_n)?,
    })
}

/// Mean and variance constants of the number of links.
#[derive(Debug, Clone, Serialize)]
pub struct LimitLaw {
    pub class: String,
    pub theta: u32,
    pub tau: u32,
    pub p: String,
    pub q: String,
    /// Expected links per base.
    pub mu: f64,
    pub sigma: f64,
    pub sigma2: f64,
    pub h: f64,
    /// `(u, ρ(u))` for every marker value solved.
    pub rho_samples: Vec<(f64, f64)>,
    /// Change in `(μ, σ²)` between the extrapolations from `(h, h/2)`
    /// and from `(2h, h)`.
    pub stability: (f64, f64),
    /// `(μ, σ²)` by implicit differentiation of the characteristic system.
    pub implicit: (f64, f64),
}

fn moments(rho: f64, d1: f64, d2: f64) -> (f64, f64) {
    let r1 = d1 / rho;
    (-r1, -d2 / rho - r1 + r1 * r1)
}

/// `μ` and `σ` from `ρ(u)`, the singularity of `y(t, u)`, differentiated
/// by central differences with Richardson extrapolation.
pub fn limit_law(class: &StructureClass, h: f64) -> Result<LimitLaw, AsymptoticsError> {
    assert!(h > 0.0 && h < 0.25, "step must be small and positive");
    let sys = build_system(class)?;
    let (phi, _) = sys.phi_psi();
    let coeffs = count_range(class, 200)?;
    let seed = ratio_seed(&coeffs, 200);
    let base = PositiveSystem::new(vec![phi.clone()], "t", &["y"], &[("u", 1.0)])?;
    let centre = base.solve(seed)?;
    let rho0 = centre.t0;
    let mut samples = vec![(1.0, rho0)];
    let mut rho = |u: f64| -> Result<f64, AsymptoticsError> {
        let s = PositiveSystem::new(vec![phi.clone()], "t", &["y"], &[("u", u)])?;
        let t = s.solve(Some(rho0))?.t0;
        samples.push((u, t));
        Ok(t)
    };
    let mut diffs = Vec::new();
    for step in [2.0 * h, h, 0.5 * h] {
        let (plus, minus) = (rho(1.0 + step)?, rho(1.0 - step)?);
        diffs.push(((plus - minus) / (2.0 * step), (plus - 2.0 * rho0 + minus) / (step * step)));
    }
    let richardson = |fine: (f64, f64), coarse: (f64, f64)| {
        ((4.0 * fine.0 - coarse.0) / 3.0, (4.0 * fine.1 - coarse.1) / 3.0)
    };
    let best = richardson(diffs[2], diffs[1]);
    let prev = richardson(diffs[1], diffs[0]);
    let (mu, sigma2) = moments(rho0, best.0, best.1);
    let (mu_prev, sigma2_prev) = moments(rho0, prev.0, prev.1);
    samples.sort_by(|a, b| a.0.total_cmp(&b.0));
    let implicit = implicit_moments(&phi, &centre)?;
    if !(sigma2 > 0.0) {
        return Err(AsymptoticsError::NonPositiveVariance { sigma2 });
    }
    Ok(LimitLaw {
        class: class.label(),
        theta: class.params.theta,
        tau: class.params.tau,
        p: class.params.p.to_string(),
        q: class_q(class).to_string(),
        mu,
        sigma: sigma2.sqrt(),
        sigma2,
        h,
        rho_samples: samples,
        stability: ((mu - mu_prev).abs(), (sigma2 - sigma2_prev).abs()),
        implicit,
    })
}

/// `(μ, σ²)` from `ρ'(1)` and `ρ''(1)` obtained by differentiating
/// `F = (Φ - y, Φ_y - 1) = 0` implicitly in `u`.
fn implicit_moments(phi: &Expr, point: &SingularPoint) -> Result<(f64, f64), AsymptoticsError> {
    let vars = ["t", "y", "u"];
    let f = [phi - Expr::var("y"), phi.diff("y") - 1];
    let grad: Vec<Vec<Expr>> = f.iter().map(|e| vars.iter().map(|v| e.diff(v)).collect()).collect();
    let hess: Vec<Vec<Vec<Expr>>> = grad
        .iter()
        .map(|row| row.iter().map(|e| vars.iter().map(|v| e.diff(v)).collect()).collect())
        .collect();
    let env = Env::new(()).with("t", point.t0).with("y", point.y0[0]).with("u", 1.0);
    let mut ev = Evaluator::new(&env);
    let mut g = [[0.0; 3]; 2];
    let mut hm = [[[0.0; 3]; 3]; 2];
    for i in 0..2 {
        for a in 0..3 {
            g[i][a] = ev.eval(&grad[i][a])?;
            for b in 0..3 {
                hm[i][a][b] = ev.eval(&hess[i][a][b])?;
            }
        }
    }
    let fz = |i: usize| vec![g[i][0], g[i][1]];
    let jz = vec![fz(0), fz(1)];
    let z1 = linalg::solve(jz.clone(), vec![-g[0][2], -g[1][2]]).ok_or(AsymptoticsError::SingularJacobian)?;
    let x1 = [z1[0], z1[1], 1.0];
    let rhs: Vec<f64> = (0..2)
        .map(|i| {
            let mut s = 0.0;
            for a in 0..3 {
                for b in 0..3 {
                    s += hm[i][a][b] * x1[a] * x1[b];
                }
            }
            -s
        })
        .collect();
    let z2 = linalg::solve(jz, rhs).ok_or(AsymptoticsError::SingularJacobian)?;
    Ok(moments(point.t0, z1[0], z2[0]))
}

/// `(Φ, Ψ)` in `t, u, y` as text.
pub fn phi_psi_text(class: &StructureClass) -> Result<String, AsymptoticsError> {
    let sys = build_system(class)?;
    let (phi, psi) = sys.phi_psi();
    Ok(format!("Phi = {phi}\nPsi = {psi}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::StructureFamily;

    #[test]
    fn nussinov_constants() {
        let class = StructureClass::plain(StructureFamily::General, 1, 0).unwrap();
        let est = analyze_class(&class, AsymptoticsConfig::default()).unwrap();
        assert!((est.gamma - (3.0 + 5f64.sqrt()) / 2.0).abs() < 1e-9, "{}", est.gamma);
        assert!((est.c_or_d - 1.104366).abs() < 1e-4, "{}", est.c_or_d);
        assert!(est.residual <= 1e-10);
    }

    #[test]
    fn saturated_limit_law() {
        let class = StructureClass::plain(StructureFamily::Saturated, 1, 0).unwrap();
        let law = limit_law(&class, 1e-3).unwrap();
        assert!((law.mu - 0.337361).abs() < 1e-4, "{law:?}");
        assert!((law.mu - law.implicit.0).abs() < 1e-7);
        assert!((law.sigma2 - law.implicit.1).abs() < 1e-5);
    }
}
