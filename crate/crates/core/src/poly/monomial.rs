use super::Var;
use alloc::vec::Vec;

/// Power product stored as a dense exponent vector indexed by variable id,
/// without trailing zeros.
///
/// The derived order is graded lexicographic: total degree first, then the
/// exponent of the lowest-id variable, and so on.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial {
    degree: u32,
    exps: Vec<u32>,
}

impl Monomial {
    pub fn one() -> Monomial {
        Monomial::default()
    }

    pub fn var(v: Var, e: u32) -> Monomial {
        Monomial::from_exps(
            (0..=v.index())
                .map(|i| if i == v.index() { e } else { 0 })
                .collect(),
        )
    }

    pub fn from_exps(mut exps: Vec<u32>) -> Monomial {
        while exps.last() == Some(&0) {
            exps.pop();
        }
        Monomial {
            degree: exps.iter().sum(),
            exps,
        }
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_one(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn exp(&self, v: Var) -> u32 {
        self.exps.get(v.index()).copied().unwrap_or(0)
    }

    pub fn with_exp(&self, v: Var, e: u32) -> Monomial {
        let mut exps = self.exps.clone();
        if exps.len() <= v.index() {
            exps.resize(v.index() + 1, 0);
        }
        exps[v.index()] = e;
        Monomial::from_exps(exps)
    }

    pub fn mul(&self, o: &Monomial) -> Monomial {
        let n = self.exps.len().max(o.exps.len());
        Monomial::from_exps(
            (0..n)
                .map(|i| self.exps.get(i).unwrap_or(&0) + o.exps.get(i).unwrap_or(&0))
                .collect(),
        )
    }

    /// `self / o` when `o` divides `self`.
    pub fn div(&self, o: &Monomial) -> Option<Monomial> {
        if o.exps.len() > self.exps.len() {
            return None;
        }
        let mut exps = self.exps.clone();
        for (i, e) in o.exps.iter().enumerate() {
            if exps[i] < *e {
                return None;
            }
            exps[i] -= e;
        }
        Some(Monomial::from_exps(exps))
    }

    pub fn vars(&self) -> impl Iterator<Item = (Var, u32)> + '_ {
        self.exps
            .iter()
            .enumerate()
            .filter(|(_, e)| **e > 0)
            .map(|(i, e)| (Var(i as u32), *e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_lex_order() {
        let x = Var(0);
        let y = Var(1);
        let x2 = Monomial::var(x, 2);
        let xy = Monomial::var(x, 1).mul(&Monomial::var(y, 1));
        let y2 = Monomial::var(y, 2);
        let x1 = Monomial::var(x, 1);
        assert!(x2 > xy && xy > y2 && y2 > x1 && x1 > Monomial::one());
        assert_eq!(xy.div(&x1), Some(Monomial::var(y, 1)));
        assert_eq!(x1.div(&xy), None);
    }
}
