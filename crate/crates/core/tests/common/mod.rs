#![allow(dead_code)]

use markovcad_core::arith::{rat, Rational, Sign};
use markovcad_core::cad::{Bound, CadTree, CellKind};
use markovcad_core::markov::{build_system, det_adj, Entry, MarkovModel, Metric, Query, Rewards};
use markovcad_core::projection::PolyMatrix;
use markovcad_core::poly::{Monomial, Polynomial, Var, Vars};
use markovcad_core::simplex::{check_simplex_extensible, CheckOptions, SimplexConstraint, SimplexSpec, SystemM, XVar};
use markovcad_core::Real;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

pub fn rand_rat(rng: &mut ChaCha8Rng, lo: i64, hi: i64, den: i64) -> Rational {
    rat(rng.gen_range(lo * den..=hi * den), den)
}

/// Random probability vector of length `n` with small denominators.
pub fn stochastic_row(rng: &mut ChaCha8Rng, n: usize) -> Vec<Rational> {
    loop {
        let w: Vec<i64> = (0..n).map(|_| if rng.gen_bool(0.25) { 0 } else { rng.gen_range(1..=6) }).collect();
        let s: i64 = w.iter().sum();
        if s > 0 {
            return w.iter().map(|&x| rat(x, s)).collect();
        }
    }
}

fn nums(v: &[Rational]) -> Vec<Entry> {
    v.iter().cloned().map(Entry::Num).collect()
}

/// Fully numeric model; discounted, or with the last state absorbing and
/// every transient row leaking some mass to it.
pub fn numeric_model(rng: &mut ChaCha8Rng, n: usize, transient: bool, bc: bool) -> MarkovModel {
    let mut p = Vec::new();
    for i in 0..n {
        if transient && i == n - 1 {
            let mut r = vec![Rational::zero(); n];
            r[n - 1] = Rational::one();
            p.push(r);
            continue;
        }
        let mut r = stochastic_row(rng, n);
        if transient {
            // guarantee a nonzero transient part and some absorbing mass
            while r[n - 1].is_zero() || r[..n - 1].iter().all(Zero::is_zero) {
                r = stochastic_row(rng, n);
            }
        }
        p.push(r);
    }
    let reward = |rng: &mut ChaCha8Rng| -> Vec<Rational> {
        (0..n)
            .map(|i| if transient && i == n - 1 { Rational::zero() } else { rand_rat(rng, -3, 5, 4) })
            .collect()
    };
    let rewards = if bc {
        let b = reward(rng);
        let c = reward(rng);
        Rewards::BenefitCost { b: nums(&b), c: nums(&c) }
    } else {
        Rewards::R(nums(&reward(rng)))
    };
    MarkovModel {
        n,
        lambda: if transient { None } else { Some(rat(rng.gen_range(1..=9), 10)) },
        p: p.iter().map(|r| nums(r)).collect(),
        rewards,
        pi: nums(&stochastic_row(rng, n)),
        absorbing: if transient { vec![n - 1] } else { Vec::new() },
    }
}

pub fn num_vec(v: &[Entry]) -> Vec<Rational> {
    v.iter().map(|e| e.as_num().expect("numeric").clone()).collect()
}

/// Solves `A x = b` by exact Gaussian elimination with pivot search.
pub fn solve(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Vec<Rational> {
    let n = b.len();
    for k in 0..n {
        let piv = (k..n).find(|&i| !a[i][k].is_zero()).expect("nonsingular");
        a.swap(k, piv);
        b.swap(k, piv);
        for i in 0..n {
            if i == k || a[i][k].is_zero() {
                continue;
            }
            let f = &a[i][k] / &a[k][k];
            for j in k..n {
                let t = &f * &a[k][j];
                a[i][j] -= t;
            }
            let t = &f * &b[k];
            b[i] -= t;
        }
    }
    (0..n).map(|i| &b[i] / &a[i][i]).collect()
}

fn states(m: &MarkovModel) -> Vec<usize> {
    if m.lambda.is_some() {
        (0..m.n).collect()
    } else {
        m.transient_states()
    }
}

/// `R_inf` for reward vector `r` by linear solve.
pub fn oracle_infinite(m: &MarkovModel, r: &[Rational]) -> Rational {
    let st = states(m);
    let lam = m.lambda.clone().unwrap_or_else(Rational::one);
    let a: Vec<Vec<Rational>> = st
        .iter()
        .map(|&i| {
            st.iter()
                .map(|&j| {
                    let pij = &lam * m.p[i][j].as_num().unwrap();
                    if i == j {
                        Rational::one() - pij
                    } else {
                        -pij
                    }
                })
                .collect()
        })
        .collect();
    let x = solve(a, st.iter().map(|&i| r[i].clone()).collect());
    let pi = num_vec(&m.pi);
    st.iter().zip(&x).map(|(&i, xi)| &pi[i] * xi).sum()
}

/// Finite-horizon reward by propagating the state distribution forward.
pub fn oracle_finite(m: &MarkovModel, r: &[Rational], t: u32) -> Rational {
    let n = m.n;
    let lam = m.lambda.clone().unwrap_or_else(Rational::one);
    let mut dist = num_vec(&m.pi);
    let mut total = Rational::zero();
    let mut weight = Rational::one();
    for step in 0..=t {
        total += &weight * dist.iter().zip(r).map(|(d, x)| d * x).sum::<Rational>();
        if step < t {
            let mut next = vec![Rational::zero(); n];
            for i in 0..n {
                for (j, slot) in next.iter_mut().enumerate() {
                    *slot += &dist[i] * m.p[i][j].as_num().unwrap();
                }
            }
            dist = next;
            weight *= &lam;
        }
    }
    total
}

/// A uniformly random rational point of a leaf, walking bounds top down.
/// Bounds must evaluate to rationals.
pub fn sample_in_leaf(tree: &CadTree, path: &[usize], rng: &mut ChaCha8Rng) -> BTreeMap<Var, Rational> {
    let mut pt = BTreeMap::new();
    let mut level = &tree.cells;
    for &i in path {
        let c = &level[i];
        let val = |b: &Bound, pt: &BTreeMap<Var, Rational>| -> Option<Rational> {
            match b.eval(c.var, pt)? {
                Real::Rational(q) => Some(q),
                other => Some(other.as_rational().expect("rational bound").clone()),
            }
        };
        let x = match &c.kind {
            CellKind::Section(b) => val(b, &pt).expect("finite section"),
            CellKind::Sector(lo, hi) => {
                let l = val(lo, &pt);
                let h = val(hi, &pt);
                let t = rat(rng.gen_range(1..1000), 1000);
                match (l, h) {
                    (Some(l), Some(h)) => &l + &(&h - &l) * t,
                    (Some(l), None) => l + rat(rng.gen_range(1..400), 100),
                    (None, Some(h)) => h - rat(rng.gen_range(1..400), 100),
                    (None, None) => rand_rat(rng, -3, 3, 7),
                }
            }
        };
        pt.insert(c.var, x);
        level = &c.children;
    }
    pt
}

/// Brute-force satisfiability of a CNF given as `(var, positive)` triples.
pub fn brute_sat(n: usize, clauses: &[Vec<(usize, bool)>]) -> bool {
    (0..1u32 << n).any(|mask| {
        clauses
            .iter()
            .all(|c| c.iter().any(|&(v, pos)| ((mask >> v) & 1 == 1) == pos))
    })
}

/// Positive constant plus a nonnegative combination of a few coordinates,
/// times a random sign: sign-invariant on every simplex cell.
fn signed_uniform(rng: &mut ChaCha8Rng, alphas: &[Var]) -> Polynomial {
    let mut p = Polynomial::constant(rat(rng.gen_range(1..=3), rng.gen_range(1..=3)));
    for &a in alphas {
        if rng.gen_bool(0.4) {
            p = &p + &Polynomial::var(a).scale(&rat(rng.gen_range(1..=4), 2));
        }
    }
    if rng.gen_bool(0.5) {
        -&p
    } else {
        p
    }
}

/// Random simplex-extensible system with at most 5 variables.
pub fn random_instance(rng: &mut ChaCha8Rng) -> SystemM {
    loop {
        let budget = rng.gen_range(2..=5);
        let eta = rng.gen_range(1..=budget.min(3));
        let mut left = budget - eta;
        let mut vars = Vars::new();
        let mut simplices = Vec::new();
        while left > 0 {
            let tau = rng.gen_range(1..=left.min(3));
            left -= tau;
            let idx = simplices.len();
            let vs: Vec<Var> = (0..tau).map(|j| vars.intern(&format!("a{}_{}", idx + 1, j + 1))).collect();
            let kappa = [rat(1, 1), rat(1, 2), rat(2, 3)][rng.gen_range(0..3)].clone();
            let c = if rng.gen_bool(0.5) { SimplexConstraint::Eq(kappa) } else { SimplexConstraint::Leq(kappa) };
            simplices.push(SimplexSpec::new(idx, vs, c));
        }
        let alphas: Vec<Var> = simplices.iter().flat_map(|s| s.vars.clone()).collect();
        let xs: Vec<XVar> = (0..eta)
            .map(|i| XVar {
                var: vars.intern(&format!("x{}", i + 1)),
                nonneg: rng.gen_bool(0.7),
            })
            .collect();
        let mut g0 = signed_uniform(rng, &alphas);
        if rng.gen_bool(0.3) {
            g0 = Polynomial::constant(rat(rng.gen_range(-2..=2), 1));
        }
        let mut fstar = g0;
        for x in &xs {
            let g = signed_uniform(rng, &alphas);
            let f = if x.nonneg && rng.gen_bool(0.2) {
                Polynomial::from_term(Monomial::var(x.var, 2), Rational::one())
            } else {
                Polynomial::var(x.var)
            };
            fstar = &fstar + &(&g * &f);
        }
        let sys = match SystemM::new(vars, simplices, xs, fstar, false) {
            Ok(s) => s,
            Err(_) => continue,
        };
        if check_simplex_extensible(&sys, &CheckOptions::default()).unwrap().extensible {
            return sys;
        }
    }
}

pub fn random_point(rng: &mut ChaCha8Rng, sys: &SystemM) -> BTreeMap<Var, Rational> {
    let mut pt = BTreeMap::new();
    for s in &sys.simplices {
        let on_simplex = rng.gen_bool(0.7);
        if on_simplex {
            let w = stochastic_row(rng, s.size() + 1);
            let kappa = s.constraint.kappa().clone();
            let full = s.constraint.is_eq() || rng.gen_bool(0.3);
            let total: Rational = w[..s.size()].iter().cloned().sum();
            for (j, v) in s.vars.iter().enumerate() {
                let q = if full && !total.is_zero() {
                    &w[j] / &total * &kappa
                } else {
                    &w[j] * &kappa
                };
                pt.insert(*v, q);
            }
        } else {
            for v in &s.vars {
                pt.insert(*v, rand_rat(rng, -1, 2, 8));
            }
        }
    }
    for x in &sys.x_vars {
        pt.insert(x.var, rand_rat(rng, -2, 4, 4));
    }
    pt
}

pub fn ifr_vars(tree: &markovcad_core::cad::CadTree, phi: usize) -> Vec<Vec<Var>> {
    (1..=phi)
        .map(|i| (1..=phi).map(|j| tree.vars.lookup(&format!("a{i}_{j}")).unwrap()).collect())
        .collect()
}

/// Rows are distributions and each row's partial sums dominate the next's.
pub fn is_ifr(a: &[Vec<Var>], pt: &BTreeMap<Var, Rational>) -> bool {
    let phi = a.len();
    let rows_ok = a.iter().all(|row| {
        row.iter().all(|v| pt[v] >= rat(0, 1)) && row.iter().map(|v| pt[v].clone()).sum::<Rational>() == rat(1, 1)
    });
    let dominance = (1..phi).all(|i| {
        (0..phi - 1).all(|j| {
            let s = |r: usize| (0..=j).map(|l| pt[&a[r][l]].clone()).sum::<Rational>();
            s(i - 1) >= s(i)
        })
    });
    rows_ok && dominance
}

/// Clauses of `(var, positive)` literals.
pub type Cnf = Vec<Vec<(usize, bool)>>;

/// Fixed corpus of 3-literal CNFs over at most 3 variables and 4 clauses.
pub fn sat_corpus() -> Vec<(usize, Cnf)> {
    let mut rng = ChaCha8Rng::seed_from_u64(31337);
    (0..50)
        .map(|_| {
            let n = rng.gen_range(1..=3);
            let m = rng.gen_range(1..=4);
            let clauses = (0..m)
                .map(|_| (0..3).map(|_| (rng.gen_range(0..n), rng.gen_bool(0.5))).collect())
                .collect();
            (n, clauses)
        })
        .collect()
}

pub fn fstar_sign(models: &[&MarkovModel], metric: Metric) -> Sign {
    let ms = build_system(models, &Query::new(metric), &CheckOptions::default()).unwrap();
    let c = ms.system.fstar.constant_value().expect("numeric model gives a constant");
    Sign::of(&c)
}

fn sign_diff(a: &Rational, b: &Rational) -> Sign {
    Sign::of(&(a - b))
}

fn r_of(m: &MarkovModel) -> Vec<Rational> {
    match &m.rewards {
        Rewards::R(r) => num_vec(r),
        _ => unreachable!(),
    }
}

fn bc_of(m: &MarkovModel) -> (Vec<Rational>, Vec<Rational>) {
    match &m.rewards {
        Rewards::BenefitCost { b, c } => (num_vec(b), num_vec(c)),
        _ => unreachable!(),
    }
}

fn same(got: Sign, want: Sign) -> Result<(), String> {
    if got == want {
        Ok(())
    } else {
        Err(format!("f* sign {got:?}, direct evaluation {want:?}"))
    }
}

/// Every metric builder on random numeric models against exact solves.
pub fn metric_signs_agree(seed: u64, n: usize, transient: bool) -> Result<(), String> {
    let n = if transient { n.max(2) } else { n };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = numeric_model(&mut rng, n, transient, false);
    let b = numeric_model(&mut rng, n, transient, false);
    let t = rand_rat(&mut rng, -2, 6, 3);

    let ra = oracle_infinite(&a, &r_of(&a));
    let rb = oracle_infinite(&b, &r_of(&b));
    same(fstar_sign(&[&a], Metric::TotalRewardGE { threshold: t.clone() }), sign_diff(&ra, &t))?;
    same(fstar_sign(&[&a, &b], Metric::CompareRewards), sign_diff(&ra, &rb))?;

    let horizon = rng.gen_range(0..=4);
    let fa = oracle_finite(&a, &r_of(&a), horizon);
    same(
        fstar_sign(&[&a], Metric::FiniteRewardGE { threshold: t.clone(), horizon }),
        sign_diff(&fa, &t),
    )?;

    let ca = numeric_model(&mut rng, n, transient, true);
    let cb = numeric_model(&mut rng, n, transient, true);
    let w = rand_rat(&mut rng, 0, 5, 2);
    let nmb = |m: &MarkovModel| {
        let (b, c) = bc_of(m);
        &w * oracle_infinite(m, &b) - oracle_infinite(m, &c)
    };
    same(
        fstar_sign(&[&ca], Metric::NmbGE { wtp: w.clone(), threshold: t.clone() }),
        sign_diff(&nmb(&ca), &t),
    )?;
    same(
        fstar_sign(&[&ca, &cb], Metric::NmbGE { wtp: w.clone(), threshold: t.clone() }),
        sign_diff(&(nmb(&ca) - nmb(&cb)), &t),
    )?;

    let (ba, cca) = bc_of(&ca);
    let (bb, ccb) = bc_of(&cb);
    let db = oracle_infinite(&ca, &ba) - oracle_infinite(&cb, &bb);
    let dc = oracle_infinite(&ca, &cca) - oracle_infinite(&cb, &ccb);
    if !db.is_zero() {
        let icer = &dc / &db;
        let metric = Metric::IcerLE { threshold: t.clone(), benefit_positive: Some(db > Rational::zero()) };
        same(fstar_sign(&[&ca, &cb], metric), sign_diff(&t, &icer))?;
    }
    Ok(())
}

/// Substitutes a random stochastic matrix into `I - lambda P` with symbolic P.
pub fn det_adj_sign_trial(rng: &mut ChaCha8Rng, n: usize) -> Result<(), String> {
    let mut vars = Vars::new();
    let lam = rat(rng.gen_range(1..=9), 10);
    let syms: Vec<Vec<_>> = (0..n)
        .map(|i| (0..n).map(|j| vars.intern(&format!("p{i}_{j}"))).collect())
        .collect();
    let m: PolyMatrix = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let lp = Polynomial::var(syms[i][j]).scale(&lam);
                    if i == j {
                        &Polynomial::one() - &lp
                    } else {
                        -&lp
                    }
                })
                .collect()
        })
        .collect();
    let (d, adj) = det_adj(&m);
    let mut pt = BTreeMap::new();
    for row in &syms {
        for (v, q) in row.iter().zip(stochastic_row(rng, n)) {
            pt.insert(*v, q);
        }
    }
    if d.eval(&pt).unwrap() <= Rational::zero() {
        return Err(format!("det not positive at {pt:?}"));
    }
    for row in &adj {
        for e in row {
            if e.eval(&pt).unwrap() < Rational::zero() {
                return Err(format!("negative adjugate entry at {pt:?}"));
            }
        }
    }
    Ok(())
}
