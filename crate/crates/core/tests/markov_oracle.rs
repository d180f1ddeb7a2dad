mod common;

use common::*;
use markovcad_core::arith::{rat, rational_to_f64};
use markovcad_core::markov::{
    adjugate_identity_holds, det_adj, finite_reward_poly, infinite_reward,
    Rewards,
};
use markovcad_core::poly::{Polynomial, Vars};
use markovcad_core::projection::PolyMatrix;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig { cases: 120, ..ProptestConfig::default() })]

    #[test]
    fn every_metric_matches_linear_solve(seed in any::<u64>(), n in 1usize..=4, transient in any::<bool>()) {
        if let Err(e) = metric_signs_agree(seed, n, transient) {
            return Err(TestCaseError::fail(e));
        }
    }

    #[test]
    fn reward_ratio_matches_solve(seed in any::<u64>(), n in 1usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = numeric_model(&mut rng, n, false, false);
        let r = match &m.rewards { Rewards::R(r) => r.clone(), _ => unreachable!() };
        let (num, den) = infinite_reward(&m, &r, &mut Vars::new()).unwrap();
        let q = num.constant_value().unwrap() / den.constant_value().unwrap();
        prop_assert_eq!(q, oracle_infinite(&m, &num_vec(&r)));
    }
}

#[test]
fn det_adj_sign_spot_checks() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for trial in 0..100 {
        det_adj_sign_trial(&mut rng, 2 + trial % 3).unwrap();
    }
}

#[test]
fn adjugate_identity_symbolic() {
    for n in 1..=3 {
        let mut vars = Vars::new();
        let m: PolyMatrix = (0..n)
            .map(|i| (0..n).map(|j| Polynomial::var(vars.intern(&format!("m{i}{j}")))).collect())
            .collect();
        let (d, adj) = det_adj(&m);
        assert!(adjugate_identity_holds(&m, &d, &adj), "n = {n}");
    }
}

#[test]
fn finite_matches_iteration_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let m = numeric_model(&mut rng, 2, false, false);
        let r = match &m.rewards { Rewards::R(r) => r.clone(), _ => unreachable!() };
        let p = finite_reward_poly(&m, &r, 3, &mut Vars::new()).unwrap();
        assert_eq!(p.constant_value().unwrap(), oracle_finite(&m, &num_vec(&r), 3));
    }
}

#[test]
fn finite_approaches_infinite() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10 {
        let mut m = numeric_model(&mut rng, 3, false, false);
        m.lambda = Some(rat(1, 2));
        let r = match &m.rewards { Rewards::R(r) => r.clone(), _ => unreachable!() };
        let (num, den) = infinite_reward(&m, &r, &mut Vars::new()).unwrap();
        let inf = num.constant_value().unwrap() / den.constant_value().unwrap();
        let mut prev_gap = f64::INFINITY;
        for t in [10u32, 25, 50] {
            let f = finite_reward_poly(&m, &r, t, &mut Vars::new()).unwrap().constant_value().unwrap();
            let gap = rational_to_f64(&(&inf - &f)).abs();
            assert!(gap <= prev_gap + 1e-15);
            prev_gap = gap;
        }
        assert!(prev_gap < 1e-6);
    }
}
