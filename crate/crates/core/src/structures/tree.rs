//! Dual weighted plane trees.
//!
//! Every stem becomes an edge weighted by its length, every loop a node,
//! and every segment of free bases a corner weighted by its size. A node
//! with `k` children has `k + 1` corners listed in sequence order: corner
//! `i - 1` and corner `i` flank child edge `i`.

use serde::{Deserialize, Serialize};

use super::{ModelParams, SecondaryStructure, StructureError};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TreeNode {
    pub corners: Vec<u64>,
    /// `(edge weight, subtree)` in plane order.
    pub children: Vec<(u64, TreeNode)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WeightedPlaneTree {
    pub root: TreeNode,
}

impl TreeNode {
    pub fn leaf(corner: u64) -> Self {
        TreeNode {
            corners: vec![corner],
            children: Vec::new(),
        }
    }

    pub fn arity(&self) -> usize {
        self.children.len()
    }

    fn walk<'a>(&'a self, is_root: bool, f: &mut impl FnMut(&'a TreeNode, bool)) {
        f(self, is_root);
        for (_, child) in &self.children {
            child.walk(false, f);
        }
    }

    /// Positive corners flanking a common edge. The two root corners are
    /// flanked by the root marker, not an edge, unless the root has arity 1.
    fn has_adjacent_positive(&self, is_root: bool) -> bool {
        let k = self.children.len();
        let c = &self.corners;
        let via_child = (1..=k).any(|i| c[i - 1] > 0 && c[i] > 0);
        let via_parent = !is_root && k >= 1 && c[0] > 0 && c[k] > 0;
        via_child || via_parent
    }
}

impl WeightedPlaneTree {
    pub fn new(root: TreeNode) -> Self {
        WeightedPlaneTree { root }
    }

    fn walk<'a>(&'a self, mut f: impl FnMut(&'a TreeNode, bool)) {
        self.root.walk(true, &mut f);
    }

    pub fn edges(&self) -> usize {
        let mut e = 0;
        self.walk(|node, _| e += node.arity());
        e
    }

    pub fn total_edge_weight(&self) -> u64 {
        let mut w = 0;
        self.walk(|node, _| w += node.children.iter().map(|(x, _)| x).sum::<u64>());
        w
    }

    pub fn total_corner_weight(&self) -> u64 {
        let mut w = 0;
        self.walk(|node, _| w += node.corners.iter().sum::<u64>());
        w
    }

    /// Non-root nodes without children (hairpins).
    pub fn leaves(&self) -> usize {
        let mut l = 0;
        self.walk(|node, is_root| {
            if !is_root && node.arity() == 0 {
                l += 1
            }
        });
        l
    }

    /// Sequence length `2|E| + 2·(edge weights) + (corner weights)`.
    pub fn sequence_length(&self) -> u64 {
        2 * self.edges() as u64 + 2 * self.total_edge_weight() + self.total_corner_weight()
    }

    /// Why the tree is not the dual of a valid structure, if it is not.
    pub fn admissibility_violation(&self, params: &ModelParams) -> Option<String> {
        let mut problem = None;
        self.walk(|node, is_root| {
            if problem.is_some() {
                return;
            }
            let k = node.arity();
            if node.corners.len() != k + 1 {
                problem = Some(format!("node of arity {k} has {} corners", node.corners.len()));
            } else if is_root && k == 0 {
                problem = Some("root has no child".into());
            } else if !is_root && k == 1 && node.corners.iter().all(|&c| c == 0) {
                problem = Some("unary node with two empty corners".into());
            } else if !is_root && k == 0 && node.corners[0] < u64::from(params.theta) {
                problem = Some(format!("leaf corner {} below theta", node.corners[0]));
            } else if let Some((w, _)) = node.children.iter().find(|(w, _)| *w < u64::from(params.tau)) {
                problem = Some(format!("edge weight {w} below tau"));
            }
        });
        problem
    }

    pub fn is_admissible(&self, params: &ModelParams) -> bool {
        self.admissibility_violation(params).is_none()
    }

    /// All corners at most `theta + 1` and at most one positive corner per
    /// node: the dual shape of saturated structures when `tau = 0`.
    pub fn meets_saturation_shape(&self, theta: u32) -> bool {
        let cap = u64::from(theta) + 1;
        let mut ok = true;
        self.walk(|node, _| {
            ok &= node.corners.iter().all(|&c| c <= cap)
                && node.corners.iter().filter(|&&c| c > 0).count() <= 1;
        });
        ok
    }

    /// Leaf corners at most `theta + 1` and no two adjacent positive
    /// corners: the dual shape of G-saturated structures.
    pub fn meets_g_saturation_shape(&self, theta: u32) -> bool {
        let cap = u64::from(theta) + 1;
        let mut ok = true;
        self.walk(|node, is_root| {
            let leaf_ok = is_root || node.arity() > 0 || node.corners[0] <= cap;
            ok &= leaf_ok && !node.has_adjacent_positive(is_root);
        });
        ok
    }

    /// Dual tree of a structure with at least one pair.
    pub fn from_structure(s: &SecondaryStructure) -> Result<Self, StructureError> {
        if s.links() == 0 {
            return Err(StructureError::NoPairs);
        }
        let partner = s.partners();
        Ok(WeightedPlaneTree {
            root: build_loop(&partner, 1, s.len()),
        })
    }

    /// Structure of an admissible tree.
    pub fn to_structure(&self, params: &ModelParams) -> Result<SecondaryStructure, StructureError> {
        if let Some(why) = self.admissibility_violation(params) {
            return Err(StructureError::InadmissibleTree(why));
        }
        let mut text = String::with_capacity(self.sequence_length() as usize);
        emit(&self.root, &mut text);
        super::parse_dot_bracket(&text)
    }
}

/// Loop spanning positions `lo..=hi`.
fn build_loop(partner: &[usize], lo: usize, hi: usize) -> TreeNode {
    let mut corners = vec![0u64];
    let mut children = Vec::new();
    let mut k = lo;
    while k <= hi {
        let j = partner[k];
        if j > k {
            let (mut a, mut b, mut len) = (k, j, 0u64);
            while b - a > 2 && partner[a + 1] == b - 1 {
                a += 1;
                b -= 1;
                len += 1;
            }
            children.push((len, build_loop(partner, a + 1, b - 1)));
            corners.push(0);
            k = j + 1;
        } else {
            *corners.last_mut().expect("nonempty") += 1;
            k += 1;
        }
    }
    TreeNode { corners, children }
}

fn emit(node: &TreeNode, out: &mut String) {
    for (i, &c) in node.corners.iter().enumerate() {
        out.extend(std::iter::repeat('.').take(c as usize));
        if let Some((w, child)) = node.children.get(i) {
            let depth = *w as usize + 1;
            out.extend(std::iter::repeat('(').take(depth));
            emit(child, out);
            out.extend(std::iter::repeat(')').take(depth));
        }
    }
}

/// Dual tree of `s`; see [`WeightedPlaneTree::from_structure`].
pub fn to_tree(s: &SecondaryStructure) -> Result<WeightedPlaneTree, StructureError> {
    WeightedPlaneTree::from_structure(s)
}

/// Inverse of [`to_tree`] on admissible trees.
pub fn from_tree(t: &WeightedPlaneTree, params: &ModelParams) -> Result<SecondaryStructure, StructureError> {
    t.to_structure(params)
}
