use super::{det, PolyMatrix, ProjectionError};
use crate::poly::{Polynomial, Var};
use alloc::vec::Vec;

/// The `i`-th Sylvester-Habicht matrix of `f, g` in `v`.
///
/// Rows are `x^(q-i-1) f, ..., f, g, ..., x^(p-i-1) g` over the basis
/// `x^(p+q-i-1), ..., 1`. Requires `p = deg f >= q = deg g` and
/// `0 <= i <= q` when `p > q`, `0 <= i <= p - 1` when `p = q`.
pub fn sylvester_habicht(
    f: &Polynomial,
    g: &Polynomial,
    v: Var,
    i: u32,
) -> Result<PolyMatrix, ProjectionError> {
    if f.is_zero() || g.is_zero() {
        return Err(ProjectionError::ZeroPolynomial);
    }
    let p = f.degree_in(v);
    let q = g.degree_in(v);
    if p < q {
        return Err(ProjectionError::DegreeOrder { p, q });
    }
    let ok = if p > q { i <= q } else { p >= 1 && i < p };
    if !ok {
        return Err(ProjectionError::IndexOutOfRange { i, p, q });
    }
    let width = (p + q - i) as usize;
    let fv = f.univariate_view(v);
    let gv = g.univariate_view(v);
    let row = |coeffs: &[Polynomial], shift: u32| -> Vec<Polynomial> {
        (0..width)
            .map(|c| {
                let power = (width - 1 - c) as i64 - shift as i64;
                if power >= 0 && (power as usize) < coeffs.len() {
                    coeffs[power as usize].clone()
                } else {
                    Polynomial::zero()
                }
            })
            .collect()
    };
    let mut rows = Vec::with_capacity((p + q - 2 * i) as usize);
    for k in (0..q - i).rev() {
        rows.push(row(&fv, k));
    }
    for k in 0..p - i {
        rows.push(row(&gv, k));
    }
    Ok(rows)
}

/// Principal subresultant coefficient: determinant of the first
/// `p + q - 2i` columns of the Sylvester-Habicht matrix.
pub fn psc(f: &Polynomial, g: &Polynomial, v: Var, i: u32) -> Result<Polynomial, ProjectionError> {
    let m = sylvester_habicht(f, g, v, i)?;
    let n = m.len();
    let square: PolyMatrix = m.into_iter().map(|r| r[..n].to_vec()).collect();
    Ok(det(&square))
}

/// All principal subresultant coefficients of `f, g` in `v`, swapping the
/// pair when `deg g > deg f`. Empty when either polynomial is zero or both
/// are free of `v`.
pub fn psc_set(f: &Polynomial, g: &Polynomial, v: Var) -> Vec<Polynomial> {
    if f.is_zero() || g.is_zero() {
        return Vec::new();
    }
    let (f, g) = if g.degree_in(v) > f.degree_in(v) { (g, f) } else { (f, g) };
    let p = f.degree_in(v);
    let q = g.degree_in(v);
    if p == 0 {
        return Vec::new();
    }
    let top = if p > q { q } else { p - 1 };
    (0..=top)
        .map(|i| psc(f, g, v, i).expect("index range checked"))
        .collect()
}

/// Resultant up to sign: `psc_0`, with the pair swapped if needed.
pub fn resultant(f: &Polynomial, g: &Polynomial, v: Var) -> Polynomial {
    if f.is_zero() || g.is_zero() {
        return Polynomial::zero();
    }
    let (f, g) = if g.degree_in(v) > f.degree_in(v) { (g, f) } else { (f, g) };
    if f.degree_in(v) == 0 {
        return Polynomial::one();
    }
    psc(f, g, v, 0).expect("index 0 is always valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{parse_polynomial, Vars};

    #[test]
    fn worked_integer_example() {
        let mut vs = Vars::new();
        let f = parse_polynomial("3*x^2 + 5*x + 6", &mut vs).unwrap();
        let g = parse_polynomial("4*x^2 + 2*x + 1", &mut vs).unwrap();
        let x = vs.lookup("x").unwrap();
        let m = sylvester_habicht(&f, &g, x, 0).unwrap();
        let rendered: Vec<Vec<alloc::string::String>> = m
            .iter()
            .map(|r| r.iter().map(|e| e.render(&vs)).collect())
            .collect();
        assert_eq!(
            rendered,
            [["3", "5", "6", "0"], ["0", "3", "5", "6"], ["0", "4", "2", "1"], ["4", "2", "1", "0"]]
        );
        assert_eq!(psc(&f, &g, x, 0).unwrap().render(&vs), "-343");
        assert_eq!(psc(&f, &g, x, 1).unwrap().render(&vs), "-14");
    }

    #[test]
    fn precondition_errors() {
        let mut vs = Vars::new();
        let f = parse_polynomial("x + 1", &mut vs).unwrap();
        let g = parse_polynomial("x^2", &mut vs).unwrap();
        let x = vs.lookup("x").unwrap();
        assert!(matches!(sylvester_habicht(&f, &g, x, 0), Err(ProjectionError::DegreeOrder { .. })));
        assert!(matches!(sylvester_habicht(&g, &f, x, 2), Err(ProjectionError::IndexOutOfRange { .. })));
        assert!(psc_set(&f, &Polynomial::zero(), x).is_empty());
    }

    #[test]
    fn sphere_discriminant_entries() {
        let mut vs = Vars::new();
        let f = parse_polynomial("x^2 + y^2 + z^2 - 1", &mut vs).unwrap();
        let z = vs.lookup("z").unwrap();
        let df = f.derivative(z);
        let set = psc_set(&f, &df, z);
        let r: Vec<_> = set.iter().map(|p| p.render(&vs)).collect();
        assert_eq!(r, ["4 - 4*x^2 - 4*y^2", "2"]);
    }
}
