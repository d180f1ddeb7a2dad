use crate::poly::Polynomial;
use alloc::vec::Vec;

/// Square matrix of polynomials, row-major.
pub type PolyMatrix = Vec<Vec<Polynomial>>;

/// Determinant: cofactor expansion up to 3x3, fraction-free Bareiss
/// elimination above that.
pub fn det(m: &PolyMatrix) -> Polynomial {
    if m.len() <= 3 {
        det_cofactor(m)
    } else {
        det_bareiss(m)
    }
}

/// Laplace expansion along the first row.
pub fn det_cofactor(m: &PolyMatrix) -> Polynomial {
    let n = m.len();
    match n {
        0 => Polynomial::one(),
        1 => m[0][0].clone(),
        2 => &(&m[0][0] * &m[1][1]) - &(&m[0][1] * &m[1][0]),
        _ => {
            let mut acc = Polynomial::zero();
            for j in 0..n {
                if m[0][j].is_zero() {
                    continue;
                }
                let minor: PolyMatrix = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|(c, _)| *c != j)
                            .map(|(_, e)| e.clone())
                            .collect()
                    })
                    .collect();
                let t = &m[0][j] * &det_cofactor(&minor);
                acc = if j % 2 == 0 { &acc + &t } else { &acc - &t };
            }
            acc
        }
    }
}

/// Fraction-free Gaussian elimination; every division is exact.
pub fn det_bareiss(m: &PolyMatrix) -> Polynomial {
    let n = m.len();
    if n == 0 {
        return Polynomial::one();
    }
    let mut a = m.clone();
    let mut negate = false;
    let mut prev = Polynomial::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    negate = !negate;
                }
                None => return Polynomial::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&a[k][k] * &a[i][j]) - &(&a[i][k] * &a[k][j]);
                a[i][j] = num
                    .div_exact(&prev)
                    .expect("Bareiss step divides exactly");
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if negate {
        -&d
    } else {
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{parse_polynomial, Vars};

    fn matrix(rows: &[&[&str]], vs: &mut Vars) -> PolyMatrix {
        rows.iter()
            .map(|r| r.iter().map(|s| parse_polynomial(s, vs).unwrap()).collect())
            .collect()
    }

    #[test]
    fn bareiss_matches_cofactor() {
        let mut vs = Vars::new();
        let m = matrix(
            &[
                &["a", "1", "0", "b", "2"],
                &["0", "a", "b", "1", "0"],
                &["c", "0", "1", "a", "b"],
                &["1", "c", "0", "0", "a"],
                &["b", "0", "c", "1", "1"],
            ],
            &mut vs,
        );
        assert_eq!(det_bareiss(&m), det_cofactor(&m));
    }

    #[test]
    fn bareiss_pivots_over_zero() {
        let mut vs = Vars::new();
        let m = matrix(&[&["0", "x"], &["y", "1"]], &mut vs);
        assert_eq!(det_bareiss(&m).render(&vs), "-x*y");
    }
}
