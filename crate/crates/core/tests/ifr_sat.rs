mod common;

use common::*;
use markovcad_core::cad::{render_tree, RenderOptions};
use markovcad_core::simplex::{encode_3sat, ifr_cad, specialized_cad, Literal, SpecializedOptions};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

#[test]
fn ifr_tree_golden() {
    let text = render_tree(&ifr_cad(2), RenderOptions::default());
    assert!(text.contains("    0 <= a2_1 <= a1_1\n"));
}

#[test]
fn ifr_membership() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for phi in [2usize, 3] {
        let tree = ifr_cad(phi);
        let a = ifr_vars(&tree, phi);
        for leaf in tree.leaves() {
            for _ in 0..100 {
                let pt = sample_in_leaf(&tree, &leaf.path, &mut rng);
                assert!(is_ifr(&a, &pt), "phi {phi} leaf {:?}", leaf.path);
                assert_eq!(tree.locate(&pt).map(|l| l.path), Some(leaf.path.clone()));
            }
        }
        let mut rejected = 0;
        while rejected < 100 {
            let mut pt = BTreeMap::new();
            for row in &a {
                for (v, q) in row.iter().zip(stochastic_row(&mut rng, phi)) {
                    pt.insert(*v, q);
                }
            }
            if is_ifr(&a, &pt) {
                continue;
            }
            assert!(tree.locate(&pt).is_none(), "phi {phi}: {pt:?}");
            rejected += 1;
        }
    }
}

#[test]
fn sat_encoder_matches_brute_force() {
    let cases = sat_corpus();
    let mut sat = 0;
    for (n, clauses) in &cases {
        let cnf: Vec<Vec<Literal>> = clauses
            .iter()
            .map(|c| c.iter().map(|&(var, positive)| Literal { var, positive }).collect())
            .collect();
        let sys = encode_3sat(*n, &cnf).unwrap();
        let cad = specialized_cad(&sys, &SpecializedOptions::default()).unwrap();
        let feasible = cad.tree.leaf_count() > 0;
        assert_eq!(feasible, brute_sat(*n, clauses), "{clauses:?}");
        sat += usize::from(feasible);
    }
    assert!(sat > 0 && sat < cases.len(), "corpus mixes both outcomes");
}
