//! Exhaustive enumeration, the ground truth for every counting routine.

use serde::{Deserialize, Serialize};

use super::{classify, validate, ModelParams, SecondaryStructure, StructureError};

pub const DEFAULT_ENUMERATION_CAP: usize = 18;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StructureFamily {
    General,
    Saturated,
    GSaturated,
}

impl StructureFamily {
    pub const ALL: [StructureFamily; 3] = [Self::General, Self::Saturated, Self::GSaturated];

    pub fn name(self) -> &'static str {
        match self {
            Self::General => "general",
            Self::Saturated => "saturated",
            Self::GSaturated => "g-saturated",
        }
    }

    pub fn contains(self, s: &SecondaryStructure, params: &ModelParams) -> bool {
        match self {
            Self::General => true,
            Self::Saturated => classify(s, params).is_ok_and(|c| c.is_saturated),
            Self::GSaturated => classify(s, params).is_ok_and(|c| c.is_g_saturated),
        }
    }
}

impl std::str::FromStr for StructureFamily {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "general" => Ok(Self::General),
            "saturated" => Ok(Self::Saturated),
            "g-saturated" | "gsaturated" | "g_saturated" => Ok(Self::GSaturated),
            other => Err(format!("unknown family `{other}`")),
        }
    }
}

/// Depth-first walk over dot-bracket words of length `n` whose pairs all
/// respect the hairpin threshold. Choices at each position are tried in the
/// order `.`, `(`, `)`.
struct Walk {
    n: usize,
    theta: usize,
    word: Vec<u8>,
    open: Vec<usize>,
    /// Openers consumed by each `)` in `word`, for backtracking.
    closed: Vec<usize>,
    pairs: Vec<(usize, usize)>,
    started: bool,
    done: bool,
}

const CHOICES: [u8; 3] = [b'.', b'(', b')'];

impl Walk {
    fn new(n: usize, theta: usize) -> Self {
        Walk {
            n,
            theta,
            word: Vec::with_capacity(n),
            open: Vec::new(),
            closed: Vec::new(),
            pairs: Vec::new(),
            started: false,
            done: false,
        }
    }

    fn try_push(&mut self, c: u8) -> bool {
        let pos = self.word.len();
        let remaining = self.n - pos - 1;
        match c {
            b'.' => {
                if self.open.len() > remaining {
                    return false;
                }
            }
            b'(' => {
                if self.open.len() + 1 > remaining || pos + self.theta + 1 > self.n - 1 {
                    return false;
                }
                self.open.push(pos);
            }
            _ => {
                let Some(&top) = self.open.last() else {
                    return false;
                };
                if pos - top <= self.theta || self.open.len() - 1 > remaining {
                    return false;
                }
                self.open.pop();
                self.closed.push(top);
                self.pairs.push((top + 1, pos + 1));
            }
        }
        self.word.push(c);
        true
    }

    fn pop(&mut self) -> Option<u8> {
        let c = self.word.pop()?;
        match c {
            b'(' => {
                self.open.pop();
            }
            b')' => {
                let top = self.closed.pop().expect("closed opener");
                self.open.push(top);
                self.pairs.pop();
            }
            _ => {}
        }
        Some(c)
    }

    fn push_from(&mut self, first: usize) -> bool {
        CHOICES[first..].iter().any(|&c| self.try_push(c))
    }

    fn backtrack(&mut self) -> bool {
        while let Some(c) = self.pop() {
            let idx = CHOICES.iter().position(|&x| x == c).expect("known choice");
            if self.push_from(idx + 1) {
                return true;
            }
        }
        false
    }

    fn advance(&mut self) -> Option<&[(usize, usize)]> {
        if self.done {
            return None;
        }
        if self.started && !self.backtrack() {
            self.done = true;
            return None;
        }
        self.started = true;
        loop {
            if self.word.len() == self.n {
                if self.open.is_empty() {
                    return Some(&self.pairs);
                }
                if !self.backtrack() {
                    self.done = true;
                    return None;
                }
            } else if !self.push_from(0) && !self.backtrack() {
                self.done = true;
                return None;
            }
        }
    }
}

/// Calls `f` on every structure of length `n` valid under `(theta, tau)`.
pub fn for_each_structure(n: usize, params: &ModelParams, mut f: impl FnMut(&SecondaryStructure)) {
    if n == 0 {
        return;
    }
    let mut walk = Walk::new(n, params.theta as usize);
    while let Some(pairs) = walk.advance() {
        let mut pairs = pairs.to_vec();
        pairs.sort_unstable();
        let s = SecondaryStructure { n, pairs };
        if params.tau == 0 || validate(&s, params) {
            f(&s);
        }
    }
}

/// Every structure of the family exactly once; lengths above
/// [`DEFAULT_ENUMERATION_CAP`] are refused.
pub fn enumerate(
    n: usize,
    params: &ModelParams,
    family: StructureFamily,
) -> Result<impl Iterator<Item = SecondaryStructure>, StructureError> {
    enumerate_with_cap(n, params, family, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_with_cap(
    n: usize,
    params: &ModelParams,
    family: StructureFamily,
    cap: usize,
) -> Result<impl Iterator<Item = SecondaryStructure>, StructureError> {
    if n == 0 {
        return Err(StructureError::Empty);
    }
    if n > cap {
        return Err(StructureError::CapExceeded { n, cap });
    }
    let params = params.clone();
    let mut walk = Walk::new(n, params.theta as usize);
    Ok(std::iter::from_fn(move || loop {
        let mut pairs = walk.advance()?.to_vec();
        pairs.sort_unstable();
        let s = SecondaryStructure { n, pairs };
        if validate(&s, &params) && family.contains(&s, &params) {
            return Some(s);
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn count(n: usize, theta: u32, tau: u32, family: StructureFamily) -> usize {
        enumerate(n, &ModelParams::thresholds(theta, tau), family)
            .unwrap()
            .count()
    }

    #[test]
    fn small_counts() {
        assert_eq!(count(5, 1, 0, StructureFamily::General), 8);
        assert_eq!(count(5, 1, 0, StructureFamily::Saturated), 5);
        assert_eq!(count(5, 1, 0, StructureFamily::GSaturated), 6);
        assert_eq!(count(3, 1, 1, StructureFamily::General), 1);
        // Motzkin numbers at theta = 0
        let motzkin: Vec<usize> = (1..=8).map(|n| count(n, 0, 0, StructureFamily::General)).collect();
        assert_eq!(motzkin, vec![1, 2, 4, 9, 21, 51, 127, 323]);
    }

    #[test]
    fn structures_are_distinct_and_valid() {
        let params = ModelParams::thresholds(1, 1);
        let all: Vec<_> = enumerate(11, &params, StructureFamily::General).unwrap().collect();
        let set: std::collections::HashSet<_> = all.iter().map(|s| s.to_dot_bracket()).collect();
        assert_eq!(set.len(), all.len());
        assert!(all.iter().all(|s| validate(s, &params)));
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(
            enumerate(19, &ModelParams::default(), StructureFamily::General),
            Err(StructureError::CapExceeded { n: 19, cap: 18 })
        ));
    }
}
