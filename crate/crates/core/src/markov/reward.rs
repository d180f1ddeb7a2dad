use super::model::{Entry, MarkovModel};
use super::MarkovError;
use crate::arith::Rational;
use crate::poly::{Polynomial, Vars};
use crate::projection::{det, PolyMatrix};
use alloc::vec::Vec;

/// Determinant and adjugate (transposed cofactor matrix).
pub fn det_adj(m: &PolyMatrix) -> (Polynomial, PolyMatrix) {
    let n = m.len();
    if n == 0 {
        return (Polynomial::one(), Vec::new());
    }
    let minor = |skip_r: usize, skip_c: usize| -> PolyMatrix {
        m.iter()
            .enumerate()
            .filter(|(r, _)| *r != skip_r)
            .map(|(_, row)| {
                row.iter()
                    .enumerate()
                    .filter(|(c, _)| *c != skip_c)
                    .map(|(_, e)| e.clone())
                    .collect()
            })
            .collect()
    };
    let mut adj = alloc::vec![alloc::vec![Polynomial::zero(); n]; n];
    for (i, row) in adj.iter_mut().enumerate() {
        for (j, e) in row.iter_mut().enumerate() {
            let c = det(&minor(j, i));
            *e = if (i + j) % 2 == 0 { c } else { -c };
        }
    }
    (det(m), adj)
}

pub fn mat_mul(a: &PolyMatrix, b: &PolyMatrix) -> PolyMatrix {
    let n = a.len();
    let k = b.first().map_or(0, Vec::len);
    (0..n)
        .map(|i| {
            (0..k)
                .map(|j| {
                    a[i].iter()
                        .zip(b)
                        .fold(Polynomial::zero(), |acc, (x, row)| &acc + &(x * &row[j]))
                })
                .collect()
        })
        .collect()
}

/// Whether `M adj(M) = det(M) I` holds identically.
pub fn adjugate_identity_holds(m: &PolyMatrix, d: &Polynomial, adj: &PolyMatrix) -> bool {
    let prod = mat_mul(m, adj);
    prod.iter().enumerate().all(|(i, row)| {
        row.iter()
            .enumerate()
            .all(|(j, e)| if i == j { e == d } else { e.is_zero() })
    })
}

/// The pieces entering the reward formulas: the chain matrix (`lambda P`
/// or `Q`), the initial vector and a reward vector, restricted to
/// transient states in undiscounted mode.
pub struct RewardPolys {
    pub chain: PolyMatrix,
    pub pi: Vec<Polynomial>,
    pub r: Vec<Polynomial>,
}

impl RewardPolys {
    /// `rewards` are already polynomials over `vars` (fixed values applied).
    pub fn new(model: &MarkovModel, rewards: &[Polynomial], vars: &mut Vars, fixed: &dyn Fn(&Entry) -> Entry) -> RewardPolys {
        let states: Vec<usize> = if model.is_transient() {
            model.transient_states()
        } else {
            (0..model.n).collect()
        };
        let scale = model.lambda.clone().unwrap_or_else(|| Rational::from_integer(1.into()));
        let chain = states
            .iter()
            .map(|&i| {
                states
                    .iter()
                    .map(|&j| fixed(&model.p[i][j]).to_poly(vars).scale(&scale))
                    .collect()
            })
            .collect();
        RewardPolys {
            chain,
            pi: states.iter().map(|&i| fixed(&model.pi[i]).to_poly(vars)).collect(),
            r: states.iter().map(|&i| rewards[i].clone()).collect(),
        }
    }

    /// `I - chain`.
    pub fn system_matrix(&self) -> PolyMatrix {
        self.chain
            .iter()
            .enumerate()
            .map(|(i, row)| {
                row.iter()
                    .enumerate()
                    .map(|(j, e)| if i == j { &Polynomial::one() - e } else { -e })
                    .collect()
            })
            .collect()
    }

    /// `(pi^T adj(I - chain) r, det(I - chain))`.
    pub fn infinite(&self) -> (Polynomial, Polynomial) {
        let (d, adj) = det_adj(&self.system_matrix());
        let n = self.r.len();
        let mut num = Polynomial::zero();
        for i in 0..n {
            if self.pi[i].is_zero() {
                continue;
            }
            let mut row = Polynomial::zero();
            for j in 0..n {
                row = &row + &(&adj[i][j] * &self.r[j]);
            }
            num = &num + &(&self.pi[i] * &row);
        }
        (num, d)
    }

    /// `sum_{m=0}^{t} pi^T chain^m r`.
    pub fn finite(&self, t: u32) -> Polynomial {
        let mut v = self.r.clone();
        let mut total = Polynomial::zero();
        for m in 0..=t {
            let term = self
                .pi
                .iter()
                .zip(&v)
                .fold(Polynomial::zero(), |acc, (p, x)| &acc + &(p * x));
            total = &total + &term;
            if m < t {
                v = self
                    .chain
                    .iter()
                    .map(|row| row.iter().zip(&v).fold(Polynomial::zero(), |acc, (a, x)| &acc + &(a * x)))
                    .collect();
            }
        }
        total
    }
}

/// `R_inf` as `(numerator, denominator)` for the reward vector `r`.
pub fn infinite_reward(model: &MarkovModel, r: &[Entry], vars: &mut Vars) -> Result<(Polynomial, Polynomial), MarkovError> {
    model.validate()?;
    let rewards: Vec<Polynomial> = r.iter().map(|e| e.to_poly(vars)).collect();
    Ok(RewardPolys::new(model, &rewards, vars, &|e| e.clone()).infinite())
}

/// Expected reward accumulated over periods `0..=t`.
pub fn finite_reward_poly(model: &MarkovModel, r: &[Entry], t: u32, vars: &mut Vars) -> Result<Polynomial, MarkovError> {
    model.validate()?;
    let rewards: Vec<Polynomial> = r.iter().map(|e| e.to_poly(vars)).collect();
    Ok(RewardPolys::new(model, &rewards, vars, &|e| e.clone()).finite(t))
}
