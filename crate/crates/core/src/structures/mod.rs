//! Secondary structures, their dual weighted plane trees, local-optimality
//! classifiers and a brute-force enumerator.

mod classify;
mod enumerate;
mod tree;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use classify::{classify, count_dangle_annotations, Classification};
pub use enumerate::{enumerate, enumerate_with_cap, for_each_structure, StructureFamily, DEFAULT_ENUMERATION_CAP};
pub use tree::{from_tree, to_tree, TreeNode, WeightedPlaneTree};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("illegal character {ch:?} at position {pos}")]
    IllegalCharacter { pos: usize, ch: char },
    #[error("unbalanced parenthesis at position {pos}")]
    Unbalanced { pos: usize },
    #[error("empty structure")]
    Empty,
    #[error("pair ({0}, {1}) is out of range")]
    OutOfRange(usize, usize),
    #[error("base {0} occurs in more than one pair")]
    BaseTriple(usize),
    #[error("pairs ({0}, {1}) and ({2}, {3}) cross")]
    Pseudoknot(usize, usize, usize, usize),
    #[error("structure has no pair, so it has no dual tree")]
    NoPairs,
    #[error("tree is not admissible: {0}")]
    InadmissibleTree(String),
    #[error("structure is not valid for theta = {theta}, tau = {tau}")]
    InvalidForParams { theta: u32, tau: u32 },
    #[error("length {n} exceeds the enumeration cap {cap}")]
    CapExceeded { n: usize, cap: usize },
    #[error("invalid model parameter: {0}")]
    InvalidParams(String),
}

/// Thresholds and weights of the homopolymer model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelParams {
    /// Minimum number of free bases in a hairpin loop.
    pub theta: u32,
    /// Minimum stem length (number of stacking adjacencies).
    pub tau: u32,
    /// Weight per link.
    pub p: BigRational,
    /// Weight per dangle.
    pub q: BigRational,
}

impl ModelParams {
    pub fn new(theta: u32, tau: u32, p: BigRational, q: BigRational) -> Result<Self, StructureError> {
        if !p.is_positive() {
            return Err(StructureError::InvalidParams(format!("p must be positive, got {p}")));
        }
        if q.is_negative() {
            return Err(StructureError::InvalidParams(format!("q must be nonnegative, got {q}")));
        }
        Ok(ModelParams { theta, tau, p, q })
    }

    /// `p = 1`, `q = 0`.
    pub fn thresholds(theta: u32, tau: u32) -> Self {
        ModelParams {
            theta,
            tau,
            p: BigRational::one(),
            q: BigRational::zero(),
        }
    }

    pub fn with_p(mut self, p: BigRational) -> Self {
        self.p = p;
        self
    }

    pub fn with_q(mut self, q: BigRational) -> Self {
        self.q = q;
        self
    }
}

/// Parses `"a/b"`, an integer or a decimal such as `"0.375"` exactly.
pub fn parse_rational(text: &str) -> Result<BigRational, StructureError> {
    let bad = || StructureError::InvalidParams(format!("not a rational number: `{text}`"));
    let t = text.trim();
    if let Some((a, b)) = t.split_once('/') {
        let a: BigInt = a.trim().parse().map_err(|_| bad())?;
        let b: BigInt = b.trim().parse().map_err(|_| bad())?;
        if b.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(a, b));
    }
    let (negative, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty()
        || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let digits: BigInt = format!("0{int}{frac}").parse().map_err(|_| bad())?;
    let scale = num_traits::pow(BigInt::from(10), frac.len());
    let value = BigRational::new(digits, scale);
    Ok(if negative { -value } else { value })
}

impl Default for ModelParams {
    fn default() -> Self {
        Self::thresholds(1, 0)
    }
}

/// A length and a crossing-free set of pairs, 1-based, sorted by opening index.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawStructure")]
pub struct SecondaryStructure {
    n: usize,
    pairs: Vec<(usize, usize)>,
}

#[derive(Deserialize)]
struct RawStructure {
    n: usize,
    pairs: Vec<(usize, usize)>,
}

impl TryFrom<RawStructure> for SecondaryStructure {
    type Error = StructureError;
    fn try_from(raw: RawStructure) -> Result<Self, Self::Error> {
        SecondaryStructure::new(raw.n, raw.pairs)
    }
}

impl SecondaryStructure {
    /// Checks bounds, base triples and crossings; thresholds are checked by
    /// [`validate`].
    pub fn new(n: usize, mut pairs: Vec<(usize, usize)>) -> Result<Self, StructureError> {
        if n == 0 {
            return Err(StructureError::Empty);
        }
        let mut partner = vec![0usize; n + 1];
        for &(i, j) in &pairs {
            if i == 0 || i >= j || j > n {
                return Err(StructureError::OutOfRange(i, j));
            }
            for b in [i, j] {
                if partner[b] != 0 {
                    return Err(StructureError::BaseTriple(b));
                }
            }
            partner[i] = j;
            partner[j] = i;
        }
        pairs.sort_unstable();
        let mut open: Vec<(usize, usize)> = Vec::new();
        for &(i, j) in &pairs {
            while open.last().is_some_and(|&(_, l)| l < i) {
                open.pop();
            }
            if let Some(&(k, l)) = open.last() {
                if j > l {
                    return Err(StructureError::Pseudoknot(k, l, i, j));
                }
            }
            open.push((i, j));
        }
        Ok(SecondaryStructure { n, pairs })
    }

    /// The all-free structure of length `n`.
    pub fn unpaired(n: usize) -> Self {
        SecondaryStructure {
            n: n.max(1),
            pairs: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn links(&self) -> usize {
        self.pairs.len()
    }

    /// `partners()[b]` is the partner of base `b` (1-based), 0 when free;
    /// entry 0 is unused.
    pub fn partners(&self) -> Vec<usize> {
        let mut partner = vec![0usize; self.n + 1];
        for &(i, j) in &self.pairs {
            partner[i] = j;
            partner[j] = i;
        }
        partner
    }

    /// Pairs `(i, j)` with `(i+1, j-1)` also present.
    pub fn stacked_pairs(&self) -> usize {
        let partner = self.partners();
        self.pairs
            .iter()
            .filter(|&&(i, j)| j - i > 2 && partner[i + 1] == j - 1)
            .count()
    }

    /// Lengths of the maximal stems, in order of their outermost pair.
    pub fn stem_lengths(&self) -> Vec<usize> {
        let partner = self.partners();
        let mut out = Vec::new();
        for &(i, j) in &self.pairs {
            let continues_outer = i > 1 && j < self.n && partner[i - 1] == j + 1;
            if continues_outer {
                continue;
            }
            let mut len = 0;
            let (mut a, mut b) = (i, j);
            while b - a > 2 && partner[a + 1] == b - 1 {
                len += 1;
                a += 1;
                b -= 1;
            }
            out.push(len);
        }
        out
    }

    pub fn to_dot_bracket(&self) -> String {
        let mut s = vec![b'.'; self.n];
        for &(i, j) in &self.pairs {
            s[i - 1] = b'(';
            s[j - 1] = b')';
        }
        String::from_utf8(s).expect("ascii")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("structure serializes")
    }
}

impl fmt::Display for SecondaryStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_dot_bracket())
    }
}

impl FromStr for SecondaryStructure {
    type Err = StructureError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_dot_bracket(s)
    }
}

/// Parses `.`, `(`, `)` text; positions in errors are 1-based.
pub fn parse_dot_bracket(text: &str) -> Result<SecondaryStructure, StructureError> {
    let mut stack = Vec::new();
    let mut pairs = Vec::new();
    let mut n = 0;
    for (k, ch) in text.chars().enumerate() {
        let pos = k + 1;
        n = pos;
        match ch {
            '.' => {}
            '(' => stack.push(pos),
            ')' => {
                let i = stack.pop().ok_or(StructureError::Unbalanced { pos })?;
                pairs.push((i, pos));
            }
            _ => return Err(StructureError::IllegalCharacter { pos, ch }),
        }
    }
    if let Some(&pos) = stack.last() {
        return Err(StructureError::Unbalanced { pos });
    }
    if n == 0 {
        return Err(StructureError::Empty);
    }
    pairs.sort_unstable();
    Ok(SecondaryStructure { n, pairs })
}

/// Hairpin and stem thresholds; crossing-freeness holds by construction.
pub fn validate(s: &SecondaryStructure, params: &ModelParams) -> bool {
    let theta = params.theta as usize;
    s.pairs.iter().all(|&(i, j)| j - i > theta)
        && s.stem_lengths().iter().all(|&l| l >= params.tau as usize)
}

/// Weight `p^links` of a structure.
pub fn link_weight(s: &SecondaryStructure, p: &BigRational) -> BigRational {
    num_traits::pow(p.clone(), s.links())
}
