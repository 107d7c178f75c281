//! Link-addition classifiers and dangle annotations.

use num_bigint::BigInt;
use serde::Serialize;

use super::{validate, ModelParams, SecondaryStructure, StructureError};
use crate::series::{Semiring, UPoly};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub links: usize,
    pub stacked_pairs: usize,
    pub is_saturated: bool,
    pub is_g_saturated: bool,
}

/// Tests every candidate pair of free bases in a common loop.
///
/// A candidate is addable when it respects the hairpin threshold and the
/// enlarged structure still meets the stem threshold; with `tau > 0` that
/// leaves only candidates stacking onto an existing pair. Saturation
/// forbids every addable candidate, G-saturation only the stacking ones.
pub fn classify(s: &SecondaryStructure, params: &ModelParams) -> Result<Classification, StructureError> {
    if !validate(s, params) {
        return Err(StructureError::InvalidForParams {
            theta: params.theta,
            tau: params.tau,
        });
    }
    let n = s.len();
    let partner = s.partners();
    let theta = params.theta as usize;

    // innermost enclosing pair of every free base, 0 for the exterior loop
    let mut loop_of = vec![0usize; n + 1];
    let mut open = Vec::new();
    for b in 1..=n {
        let j = partner[b];
        if j > b {
            open.push(b);
        } else if j != 0 {
            open.pop();
        } else {
            loop_of[b] = open.last().copied().unwrap_or(0);
        }
    }

    let mut saturated = true;
    let mut g_saturated = true;
    'outer: for i in 1..=n {
        if partner[i] != 0 {
            continue;
        }
        for j in i + theta + 1..=n {
            if partner[j] != 0 || loop_of[j] != loop_of[i] {
                continue;
            }
            let inside = j - i > 2 && partner[i + 1] == j - 1;
            let outside = i > 1 && j < n && partner[i - 1] == j + 1;
            let stacks = inside || outside;
            if stacks {
                saturated = false;
                g_saturated = false;
                break 'outer;
            }
            if params.tau == 0 {
                saturated = false;
            }
        }
    }

    Ok(Classification {
        links: s.links(),
        stacked_pairs: s.stacked_pairs(),
        is_saturated: saturated,
        is_g_saturated: g_saturated,
    })
}

/// Dangle annotations grouped by number of dangles, as a polynomial in `q`.
///
/// A free base just before `(` may be a 5' dangle, one just after `)` a 3'
/// dangle; a base eligible both ways takes at most one of the two.
pub fn count_dangle_annotations(s: &SecondaryStructure) -> UPoly<BigInt> {
    let db = s.to_dot_bracket().into_bytes();
    let n = db.len();
    let one_way = UPoly::from_coeffs(vec![BigInt::from(1), BigInt::from(1)]);
    let two_way = UPoly::from_coeffs(vec![BigInt::from(1), BigInt::from(2)]);
    let mut acc = UPoly::<BigInt>::one();
    for b in 0..n {
        if db[b] != b'.' {
            continue;
        }
        let five = b + 1 < n && db[b + 1] == b'(';
        let three = b > 0 && db[b - 1] == b')';
        match (five, three) {
            (true, true) => acc = acc.mul(&two_way),
            (true, false) | (false, true) => acc = acc.mul(&one_way),
            (false, false) => {}
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::parse_dot_bracket;

    fn class(db: &str) -> Classification {
        classify(&parse_dot_bracket(db).unwrap(), &ModelParams::default()).unwrap()
    }

    fn dangles(db: &str) -> Vec<i64> {
        count_dangle_annotations(&parse_dot_bracket(db).unwrap())
            .coeffs()
            .iter()
            .map(|c| i64::try_from(c).unwrap())
            .collect()
    }

    #[test]
    fn classifier_examples() {
        let c = class("((..))");
        assert_eq!((c.links, c.stacked_pairs), (2, 1));
        assert!(c.is_saturated && c.is_g_saturated);
        let c = class("(...)");
        assert!(!c.is_saturated && !c.is_g_saturated);
        let c = class("(.)(.)");
        assert!(c.is_saturated && c.is_g_saturated);
        // .(.). can take (1,5) around the existing pair
        let c = class(".(.).");
        assert!(!c.is_saturated && !c.is_g_saturated);
        // .(.)(.). can take (1,8) but it would not stack
        let c = class(".(.)(.).");
        assert!(!c.is_saturated && c.is_g_saturated);
    }

    #[test]
    fn invalid_structure_is_rejected() {
        let s = parse_dot_bracket("()").unwrap();
        assert!(classify(&s, &ModelParams::default()).is_err());
    }

    #[test]
    fn dangle_examples() {
        assert_eq!(dangles("(...)"), vec![1]);
        assert_eq!(dangles(".(.)"), vec![1, 1]);
        assert_eq!(dangles("(.)(.)"), vec![1]);
        assert_eq!(dangles("(.).(.)"), vec![1, 2]);
        assert_eq!(dangles(".(.)."), vec![1, 2, 1]);
    }
}
