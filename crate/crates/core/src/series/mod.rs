//! Exact truncated power series, rational expressions over them, and
//! fixed-point solving.

pub mod expr;
pub mod ring;
pub mod solve;
pub mod trunc;

use std::fmt::Write as _;

use thiserror::Error;

pub use expr::{Algebra, Env, Evaluator, Expr};
pub use ring::{ln_abs_bigint, ln_abs_rational, rational_to_f64, Dual, LogExpectation, Ring, Semiring, UPoly};
pub use solve::{solve_fixed_point, solve_system};
pub use trunc::{Series, Terms};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SeriesError {
    #[error("constant term is not invertible in the coefficient ring")]
    NonUnitConstantTerm,
    #[error("composition with an inner series of nonzero constant term")]
    IllDefinedComposition,
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("value not representable in the coefficient ring")]
    Unrepresentable,
    #[error("fixed-point iteration did not stabilize after {iterations} iterations")]
    NonContraction { iterations: usize },
    #[error("fixed-point residual is nonzero at degree {degree}")]
    NonzeroResidual { degree: usize },
}

/// CSV dump of the nonzero terms: one exponent column per variable name,
/// then the numerator and denominator of the coefficient.
pub fn to_csv<R: Ring + Terms>(series: &Series<R>, names: &[&str]) -> String {
    let mut out = String::new();
    for name in names {
        out.push_str(name);
        out.push(',');
    }
    out.push_str("numerator,denominator\n");
    for (exps, c) in series.terms() {
        for k in 0..names.len() {
            let e = exps.get(k).copied().unwrap_or(0);
            let _ = write!(out, "{e},");
        }
        let _ = writeln!(out, "{},{}", c.numer(), c.denom());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn csv_rows_carry_exponents_and_fraction() {
        let p: UPoly<BigInt> = UPoly::var();
        let s = Series::from_coeffs(vec![UPoly::zero(), UPoly::one(), p.add(&UPoly::one())], 2);
        let csv = to_csv(&s, &["t", "p"]);
        assert_eq!(csv, "t,p,numerator,denominator\n1,0,1,1\n2,0,1,1\n2,1,1,1\n");
    }

    #[test]
    fn fibonacci_polynomials_from_rational_function() {
        // (1 + v z) / (1 - z - v z^2) with v symbolic
        let z = Expr::var("z");
        let v = Expr::var("v");
        let e = (1 + &v * &z) / (1 - &z - &v * z.pow(2));
        let order = 3;
        let vpoly: UPoly<BigInt> = UPoly::var();
        let env = Env::new(order)
            .with("z", Series::var(order))
            .with("v", Series::constant(vpoly, order));
        let s: Series<UPoly<BigInt>> = e.eval(&env).unwrap();
        let coeffs: Vec<Vec<i64>> = s
            .coeffs()
            .iter()
            .map(|c| c.coeffs().iter().map(|x| i64::try_from(x).unwrap()).collect())
            .collect();
        assert_eq!(coeffs, vec![vec![1], vec![1, 1], vec![1, 2], vec![1, 3, 1]]);
    }
}
