//! Counting dynamic programs derived from unambiguous grammars.
//!
//! * `G1`: `S → • | S• | (S) | S(S)`, all structures at `theta = 1`.
//! * `G2`: `S → • | S• | T | ST`, `T → (•) | (S•) | (T) | (ST)`, marking
//!   pairs and stacked pairs.
//! * `G3`: hairpin / interior-loop / multiloop decomposition, any `theta`.
//! * `G4`, `G5`: dangle-annotated grammars, counted through their
//!   functional equations; dangles are counted by `q`.
//! * `G6`: `S → • | •• | R• | R•• | (S) | S(S)`, `R → (S) | R(S)`,
//!   saturated structures at `theta = 1`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::ModelError;
use crate::series::{solve_system, Env, Expr, Semiring, Series, UPoly};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Grammar {
    G1,
    G2,
    G3,
    G4,
    G5,
    G6,
}

impl Grammar {
    pub const ALL: [Grammar; 6] = [Self::G1, Self::G2, Self::G3, Self::G4, Self::G5, Self::G6];

    fn fixed_theta(self) -> bool {
        matches!(self, Self::G1 | Self::G2 | Self::G6)
    }
}

impl fmt::Display for Grammar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl std::str::FromStr for Grammar {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "G1" => Ok(Self::G1),
            "G2" => Ok(Self::G2),
            "G3" => Ok(Self::G3),
            "G4" => Ok(Self::G4),
            "G5" => Ok(Self::G5),
            "G6" => Ok(Self::G6),
            other => Err(format!("unknown grammar `{other}`")),
        }
    }
}

/// Number of words of each length `0..=n_max` (dangle grammars count each
/// annotation once).
pub fn grammar_counts(grammar: Grammar, n_max: usize, theta: u32) -> Result<Vec<BigInt>, ModelError> {
    if grammar.fixed_theta() && theta != 1 {
        return Err(ModelError::UnsupportedGrammar {
            grammar: grammar.to_string(),
            theta,
        });
    }
    Ok(match grammar {
        Grammar::G1 => nussinov(n_max),
        Grammar::G2 => g2_joint_counts(n_max)
            .into_iter()
            .map(|m| m.values().fold(BigInt::zero(), |a, b| a + b))
            .collect(),
        Grammar::G3 => loop_decomposition_counts(n_max, theta),
        Grammar::G4 | Grammar::G5 => {
            let sys = dangle_grammar_system(grammar, theta)?;
            let one = BigRational::from_integer(1.into());
            sys.counts(n_max, &one, &one)?
                .into_iter()
                .map(|c| c.to_integer())
                .collect()
        }
        Grammar::G6 => saturated_grammar(n_max),
    })
}

pub fn grammar_count(grammar: Grammar, n: usize, theta: u32) -> Result<BigInt, ModelError> {
    Ok(grammar_counts(grammar, n, theta)?.swap_remove(n))
}

fn nussinov(n_max: usize) -> Vec<BigInt> {
    let mut s = vec![BigInt::zero(); n_max + 1];
    for n in 1..=n_max {
        let mut acc = BigInt::from(u8::from(n == 1));
        acc += &s[n - 1];
        if n >= 3 {
            acc += &s[n - 2];
            for k in 1..n - 2 {
                acc += &s[k] * &s[n - 2 - k];
            }
        }
        s[n] = acc;
    }
    s
}

fn saturated_grammar(n_max: usize) -> Vec<BigInt> {
    let mut s = vec![BigInt::zero(); n_max + 1];
    let mut r = vec![BigInt::zero(); n_max + 1];
    for n in 1..=n_max {
        let mut rn = BigInt::zero();
        let mut sn = BigInt::from(u8::from(n == 1 || n == 2));
        if n >= 2 {
            sn += &r[n - 1] + &r[n - 2];
        }
        if n >= 3 {
            rn += &s[n - 2];
            sn += &s[n - 2];
            for k in 1..n - 2 {
                rn += &r[k] * &s[n - 2 - k];
                sn += &s[k] * &s[n - 2 - k];
            }
        }
        r[n] = rn;
        s[n] = sn;
    }
    s
}

/// Joint counts for each length: `(pairs, stacked pairs) → count`.
pub fn g2_joint_counts(n_max: usize) -> Vec<BTreeMap<(usize, usize), BigInt>> {
    // polynomials in u (pairs) over polynomials in v (stacked pairs)
    type P = UPoly<UPoly<BigInt>>;
    let u: P = UPoly::var();
    let uv: P = u.mul(&UPoly::constant(UPoly::var()));
    let mut s: Vec<P> = vec![P::zero(); n_max + 1];
    let mut t: Vec<P> = vec![P::zero(); n_max + 1];
    for n in 1..=n_max {
        let mut tn = P::zero();
        if n >= 3 {
            let mut inner = s[n - 3].clone();
            if n == 3 {
                inner.add_assign(&P::one());
            }
            for k in 1..n - 2 {
                inner.add_mul_assign(&s[k], &t[n - 2 - k]);
            }
            tn = u.mul(&inner);
            tn.add_mul_assign(&uv, &t[n - 2]);
        }
        let mut sn = if n == 1 { P::one() } else { s[n - 1].clone() };
        sn.add_assign(&tn);
        for k in 1..n {
            sn.add_mul_assign(&s[k], &t[n - k]);
        }
        t[n] = tn;
        s[n] = sn;
    }
    s.iter()
        .map(|poly| {
            let mut m = BTreeMap::new();
            for (k, vpoly) in poly.coeffs().iter().enumerate() {
                for (j, c) in vpoly.coeffs().iter().enumerate() {
                    if !c.is_zero() {
                        m.insert((k, j), c.clone());
                    }
                }
            }
            m
        })
        .collect()
}

/// Unweighted loop decomposition: hairpins of at least `theta` bases,
/// interior loops (stacks and bulges included) and multiloops with at least
/// two branches.
pub fn loop_decomposition_counts(n_max: usize, theta: u32) -> Vec<BigInt> {
    let theta = theta as usize;
    let zero = BigInt::zero;
    // closed by a pair spanning m bases
    let mut qb = vec![zero(); n_max + 1];
    // exactly one branch, starting at the first base
    let mut qm1 = vec![zero(); n_max + 1];
    // at least one branch
    let mut qm = vec![zero(); n_max + 1];
    let mut q = vec![zero(); n_max + 1];
    q[0] = BigInt::from(1);
    let mut qb_prefix = zero();
    for m in 1..=n_max {
        if m >= theta + 2 {
            let inner = m - 2;
            let mut acc = BigInt::from(1);
            for mi in theta + 2..=inner {
                acc += &qb[mi] * BigInt::from(inner - mi + 1);
            }
            for a in 1..inner {
                acc += &qm[a] * &qm1[inner - a];
            }
            qb[m] = acc;
        }
        qb_prefix += &qb[m];
        qm1[m] = qb_prefix.clone();
        let mut acc = zero();
        for x in 0..m {
            let rest = &qm1[m - x];
            if rest.is_zero() {
                continue;
            }
            acc += rest * (BigInt::from(1) + &qm[x]);
        }
        qm[m] = acc;
        let mut acc = q[m - 1].clone();
        for l in 1..=m {
            acc += &q[m - l] * &qb[l];
        }
        q[m] = acc;
    }
    q[0] = zero();
    q
}

/// Functional equations of a dangle grammar, in `z` (bases), `p` (pairs)
/// and `q` (dangles). `y_i = equations[i]`, target `unknowns[0]`.
#[derive(Debug, Clone)]
pub struct DangleGrammarSystem {
    pub grammar: Grammar,
    pub unknowns: Vec<&'static str>,
    pub equations: Vec<Expr>,
}

/// Equations for `G4` (dangles on exterior and multiloop branches, with
/// the closing pair of a multiloop counting as a neighbour) and `G5`
/// (dangles on exterior branches and as unpaired runs inside loops).
pub fn dangle_grammar_system(grammar: Grammar, theta: u32) -> Result<DangleGrammarSystem, ModelError> {
    let (z, p, q) = (Expr::var("z"), Expr::var("p"), Expr::var("q"));
    let (s, b, m, m1) = (Expr::var("S"), Expr::var("B"), Expr::var("M"), Expr::var("M1"));
    let free_run = &z / (1 - &z);
    let hairpin = z.pow(theta) / (1 - &z);
    let flank = (1 + &q * &z).pow(2);
    let pz2 = &p * z.pow(2);
    let b_eq = match grammar {
        Grammar::G4 => {
            &pz2 * (&hairpin + &b + 2 * &free_run * &b + free_run.pow(2) * &b + &flank * &m * &m1)
        }
        Grammar::G5 => {
            let run = (1 + &q) * &free_run;
            &pz2 * (&hairpin + &b + 2 * &run * &b + run.pow(2) * &b + &m * &m1)
        }
        other => {
            return Err(ModelError::UnsupportedGrammar {
                grammar: other.to_string(),
                theta,
            })
        }
    };
    let s_eq = &z + &z * &s + (1 + &s) * &flank * &b;
    let m_eq = (1 + &free_run + &m) * &m1;
    let m1_eq = &z * &m1 + &flank * &b;
    Ok(DangleGrammarSystem {
        grammar,
        unknowns: vec!["S", "B", "M", "M1"],
        equations: vec![s_eq, b_eq, m_eq, m1_eq],
    })
}

impl DangleGrammarSystem {
    /// Equations with `p` and `q` bound.
    pub fn bind(&self, p: &BigRational, q: &BigRational) -> Vec<Expr> {
        let bindings = std::collections::HashMap::from([
            ("p", Expr::constant(p.clone())),
            ("q", Expr::constant(q.clone())),
        ]);
        self.equations.iter().map(|e| e.substitute(&bindings)).collect()
    }

    /// `[z^n] S` for `n = 0..=n_max`.
    pub fn counts(&self, n_max: usize, p: &BigRational, q: &BigRational) -> Result<Vec<BigRational>, ModelError> {
        let eqs = self.bind(p, q);
        if p.is_integer() && q.is_integer() {
            let env = Env::new(n_max).with("z", Series::<BigInt>::var(n_max));
            let mut sol = solve_system(&eqs, &self.unknowns, &env, n_max)?;
            return Ok(sol.swap_remove(0).into_coeffs().into_iter().map(BigRational::from_integer).collect());
        }
        let env = Env::new(n_max).with("z", Series::<BigRational>::var(n_max));
        let mut sol = solve_system(&eqs, &self.unknowns, &env, n_max)?;
        Ok(sol.swap_remove(0).into_coeffs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[BigInt]) -> Vec<i64> {
        v.iter().map(|c| i64::try_from(c).unwrap()).collect()
    }

    #[test]
    fn nussinov_and_saturated() {
        assert_eq!(ints(&grammar_counts(Grammar::G1, 7, 1).unwrap()), vec![0, 1, 1, 2, 4, 8, 17, 37]);
        assert_eq!(ints(&grammar_counts(Grammar::G6, 7, 1).unwrap()), vec![0, 1, 1, 1, 3, 5, 8, 18]);
        assert!(grammar_counts(Grammar::G1, 7, 2).is_err());
    }

    #[test]
    fn stacking_marks() {
        let joint = g2_joint_counts(5);
        let want: BTreeMap<(usize, usize), BigInt> =
            [((0, 0), 1), ((1, 0), 6), ((2, 1), 1)].into_iter().map(|(k, c)| (k, c.into())).collect();
        assert_eq!(joint[5], want);
        assert_eq!(ints(&grammar_counts(Grammar::G2, 7, 1).unwrap()), vec![0, 1, 1, 2, 4, 8, 17, 37]);
    }

    #[test]
    fn loop_decomposition_matches_motzkin_and_nussinov() {
        assert_eq!(ints(&loop_decomposition_counts(8, 0)), vec![0, 1, 2, 4, 9, 21, 51, 127, 323]);
        assert_eq!(ints(&loop_decomposition_counts(7, 1)), vec![0, 1, 1, 2, 4, 8, 17, 37]);
    }

    #[test]
    fn dangle_grammars_small_counts() {
        assert_eq!(
            ints(&grammar_counts(Grammar::G4, 8, 1).unwrap()),
            vec![0, 1, 1, 2, 6, 15, 34, 78, 185]
        );
        assert_eq!(
            ints(&grammar_counts(Grammar::G5, 8, 1).unwrap()),
            vec![0, 1, 1, 2, 6, 15, 36, 93, 248]
        );
    }
}
