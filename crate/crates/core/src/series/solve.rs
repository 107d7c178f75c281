//! Series solutions of `y = Q(..., y)`.

use super::expr::{frozen_subtrees, Env, Evaluator, Expr};
use super::ring::Ring;
use super::trunc::Series;
use super::SeriesError;

/// Solves `y = q(y)` for the power series `y` up to `order`.
///
/// `env` binds every other variable of `q` to series of order at least
/// `order`. See [`solve_system`] for the method.
pub fn solve_fixed_point<R: Ring>(
    q: &Expr,
    unknown: &str,
    env: &Env<Series<R>>,
    order: usize,
) -> Result<Series<R>, SeriesError> {
    let mut sol = solve_system(std::slice::from_ref(q), &[unknown], env, order)?;
    Ok(sol.pop().expect("one unknown"))
}

/// Solves the system `y_i = q_i(y_1, ..., y_k)` up to `order`.
///
/// Newton steps with doubling precision are used while `I - J` (the
/// Jacobian of the right-hand sides) can be inverted over the coefficient
/// ring; otherwise plain iteration from zero, which must stabilize within
/// `order + 2` rounds. The returned series have exactly zero residuals.
pub fn solve_system<R: Ring>(
    qs: &[Expr],
    unknowns: &[&str],
    env: &Env<Series<R>>,
    order: usize,
) -> Result<Vec<Series<R>>, SeriesError> {
    let k = qs.len();
    assert_eq!(k, unknowns.len(), "one equation per unknown");
    let jac: Vec<Vec<Expr>> = qs
        .iter()
        .map(|q| unknowns.iter().map(|u| q.diff(u)).collect())
        .collect();
    let all = qs
        .iter()
        .chain(jac.iter().flatten())
        .fold(Expr::int(0), |acc, e| acc + e);
    let frozen = frozen_subtrees(&all, unknowns);
    let mut frozen_values = Vec::with_capacity(frozen.len());
    {
        let mut ev = Evaluator::new(env);
        for e in &frozen {
            frozen_values.push(ev.eval(e)?);
        }
    }

    let eval_at = |ys: &[Series<R>], with_jacobian: bool| -> Result<Evaluated<R>, SeriesError> {
        let prec = ys[0].order();
        let mut local = env.clone();
        for (u, y) in unknowns.iter().zip(ys) {
            local.bind(u, y.clone());
        }
        let mut ev = Evaluator::new(&local);
        for (e, v) in frozen.iter().zip(&frozen_values) {
            ev.preset(e, v.clone());
        }
        let values = qs
            .iter()
            .map(|q| Ok(ev.eval(q)?.truncate(prec)))
            .collect::<Result<Vec<_>, SeriesError>>()?;
        let jacobian = if with_jacobian {
            let mut rows = Vec::with_capacity(k);
            for row in &jac {
                rows.push(
                    row.iter()
                        .map(|e| Ok(ev.eval(e)?.truncate(prec)))
                        .collect::<Result<Vec<_>, SeriesError>>()?,
                );
            }
            Some(rows)
        } else {
            None
        };
        Ok((values, jacobian))
    };

    match newton(&eval_at, k, order) {
        Ok(y) => Ok(y),
        Err(SeriesError::NonUnitConstantTerm) => picard(&eval_at, k, order),
        Err(e) => Err(e),
    }
}

type Evaluated<R> = (Vec<Series<R>>, Option<Vec<Vec<Series<R>>>>);
type EvalFn<'a, R> = dyn Fn(&[Series<R>], bool) -> Result<Evaluated<R>, SeriesError> + 'a;

fn newton<R: Ring>(
    eval_at: &EvalFn<'_, R>,
    k: usize,
    order: usize,
) -> Result<Vec<Series<R>>, SeriesError> {
    let mut ys = vec![Series::zero(0); k];
    let mut prec = 0usize;
    let max_steps = 2 * (usize::BITS as usize) + 4;
    for _ in 0..max_steps {
        let (values, jacobian) = eval_at(&ys, true)?;
        let residual: Vec<Series<R>> = values.iter().zip(&ys).map(|(v, y)| v.sub(y)).collect();
        if prec == order && residual.iter().all(Series::is_zero) {
            return Ok(ys);
        }
        let jacobian = jacobian.expect("jacobian requested");
        let matrix: Vec<Vec<Series<R>>> = (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| {
                        let d = jacobian[i][j].neg();
                        if i == j {
                            d.add(&Series::one(prec))
                        } else {
                            d
                        }
                    })
                    .collect()
            })
            .collect();
        let step = solve_linear(matrix, residual)?;
        let next = if prec == order {
            order
        } else {
            (2 * prec + 1).min(order)
        };
        ys = ys
            .iter()
            .zip(&step)
            .map(|(y, d)| Series::from_coeffs(y.add(d).into_coeffs(), next))
            .collect();
        prec = next;
    }
    let (values, _) = eval_at(&ys, false)?;
    let degree = values
        .iter()
        .zip(&ys)
        .filter_map(|(v, y)| v.sub(y).valuation())
        .min()
        .unwrap_or(0);
    Err(SeriesError::NonzeroResidual { degree })
}

/// Gaussian elimination over series; pivots need an invertible constant term.
fn solve_linear<R: Ring>(
    mut a: Vec<Vec<Series<R>>>,
    mut b: Vec<Series<R>>,
) -> Result<Vec<Series<R>>, SeriesError> {
    let k = b.len();
    for col in 0..k {
        let pivot = (col..k)
            .find(|&r| a[r][col].coeffs()[0].inverse().is_some())
            .ok_or(SeriesError::NonUnitConstantTerm)?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let inv = a[col][col].reciprocal()?;
        for r in 0..k {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].mul(&inv);
            for c in col..k {
                let delta = factor.mul(&a[col][c]);
                a[r][c] = a[r][c].sub(&delta);
            }
            let delta = factor.mul(&b[col]);
            b[r] = b[r].sub(&delta);
        }
    }
    Ok((0..k).map(|i| b[i].mul(&a[i][i].reciprocal().expect("pivot"))).collect())
}

fn picard<R: Ring>(
    eval_at: &EvalFn<'_, R>,
    k: usize,
    order: usize,
) -> Result<Vec<Series<R>>, SeriesError> {
    let mut ys = vec![Series::zero(order); k];
    for _ in 0..order + 2 {
        let (next, _) = eval_at(&ys, false)?;
        if next == ys {
            return Ok(ys);
        }
        ys = next;
    }
    Err(SeriesError::NonContraction {
        iterations: order + 2,
    })
}
