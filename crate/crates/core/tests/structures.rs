use rayon::prelude::*;

use rnaenum::structures::{
    classify, enumerate, for_each_structure, from_tree, parse_dot_bracket, to_tree, ModelParams,
    SecondaryStructure, StructureFamily, TreeNode, WeightedPlaneTree,
};

const THRESHOLDS: [(u32, u32); 6] = [(0, 0), (1, 0), (3, 0), (0, 1), (1, 1), (3, 1)];

#[test]
fn structures_survive_the_tree_round_trip() {
    for (theta, tau) in THRESHOLDS {
        let params = ModelParams::thresholds(theta, tau);
        for n in 1..=12 {
            for_each_structure(n, &params, |s| {
                if s.links() == 0 {
                    return;
                }
                let tree = to_tree(s).unwrap();
                assert!(tree.is_admissible(&params), "{s}");
                assert_eq!(tree.sequence_length(), n as u64, "{s}");
                assert_eq!(
                    n as u64,
                    2 * tree.edges() as u64 + 2 * tree.total_edge_weight() + tree.total_corner_weight()
                );
                assert_eq!(tree.edges() as u64 + tree.total_edge_weight(), s.links() as u64);
                assert_eq!(&from_tree(&tree, &params).unwrap(), s);
            });
        }
    }
}

#[test]
fn tree_shapes_match_the_local_optimality_classifiers() {
    for (theta, tau) in THRESHOLDS {
        let params = ModelParams::thresholds(theta, tau);
        for n in 1..=12 {
            for_each_structure(n, &params, |s| {
                let c = classify(s, &params).unwrap();
                if s.links() == 0 {
                    // nothing can pair in a chain no longer than a hairpin
                    let fits = n as u32 > theta + 1 + 2 * tau;
                    assert_eq!(c.is_g_saturated, true);
                    if tau == 0 {
                        assert_eq!(c.is_saturated, !fits, "{s}");
                    }
                    return;
                }
                let tree = to_tree(s).unwrap();
                assert_eq!(c.is_g_saturated, tree.meets_g_saturation_shape(theta), "{s} θ={theta} τ={tau}");
                if tau == 0 {
                    assert_eq!(c.is_saturated, tree.meets_saturation_shape(theta), "{s} θ={theta}");
                } else {
                    assert_eq!(c.is_saturated, c.is_g_saturated, "{s}");
                }
            });
        }
    }
}

/// Every plane tree with `edges` edges, as child lists of the root.
fn shapes(edges: usize) -> Vec<Vec<TreeNode>> {
    fn forests(edges: usize) -> Vec<Vec<TreeNode>> {
        if edges == 0 {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        for first in 1..=edges {
            for inner in forests(first - 1) {
                for rest in forests(edges - first) {
                    let node = TreeNode {
                        corners: vec![0; inner.len() + 1],
                        children: inner.iter().cloned().map(|c| (0, c)).collect(),
                    };
                    let mut f = vec![node];
                    f.extend(rest);
                    out.push(f);
                }
            }
        }
        out
    }
    forests(edges)
}

fn slots(node: &TreeNode) -> usize {
    node.corners.len() + node.children.iter().map(|(_, c)| 1 + slots(c)).sum::<usize>()
}

fn assign(node: &mut TreeNode, values: &mut impl Iterator<Item = u64>) {
    for c in node.corners.iter_mut() {
        *c = values.next().unwrap();
    }
    for (w, child) in node.children.iter_mut() {
        *w = values.next().unwrap();
        assign(child, values);
    }
}

#[test]
fn admissible_trees_survive_the_structure_round_trip() {
    // (0, 0) is the weakest threshold pair: trees inadmissible there are
    // inadmissible everywhere, and the structure of a tree does not depend
    // on the thresholds
    let loose = ModelParams::thresholds(0, 0);
    let mut templates = Vec::new();
    for e in 1..=4 {
        for children in shapes(e) {
            let root = TreeNode {
                corners: vec![0; children.len() + 1],
                children: children.into_iter().map(|c| (0, c)).collect(),
            };
            templates.push(WeightedPlaneTree::new(root));
        }
    }
    assert_eq!(templates.len(), 1 + 2 + 5 + 14);
    let checked: usize = templates
        .par_iter()
        .map(|template| {
            let k = slots(&template.root);
            let mut t = template.clone();
            let mut checked = 0;
            for code in 0..3u64.pow(k as u32) {
                let mut digits = (0..k).map(|i| code / 3u64.pow(i as u32) % 3);
                assign(&mut t.root, &mut digits);
                if !t.is_admissible(&loose) {
                    if code % 1024 == 0 {
                        assert!(from_tree(&t, &loose).is_err());
                    }
                    continue;
                }
                let s = from_tree(&t, &loose).unwrap();
                assert_eq!(to_tree(&s).unwrap(), t);
                checked += 1;
            }
            checked
        })
        .sum();
    assert!(checked > 1_000_000);
}

#[test]
fn saturated_family_counts() {
    let params = ModelParams::default();
    let sizes: Vec<usize> = (1..=7)
        .map(|n| enumerate(n, &params, StructureFamily::Saturated).unwrap().count())
        .collect();
    assert_eq!(sizes, vec![1, 1, 1, 3, 5, 8, 18]);
}

#[test]
fn text_formats() {
    let s = parse_dot_bracket("((..))..(...)").unwrap();
    let json = s.to_json();
    let back: SecondaryStructure = serde_json::from_str(&json).unwrap();
    assert_eq!(back, s);
    assert_eq!(back.to_dot_bracket(), "((..))..(...)");
    assert!(serde_json::from_str::<SecondaryStructure>(r#"{"n": 4, "pairs": [[1, 3], [2, 4]]}"#).is_err());
}
