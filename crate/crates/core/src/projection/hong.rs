use super::{psc_set, ProjectionError};
use crate::poly::{canonical_cmp, Polynomial, Var};
use alloc::format;
use alloc::vec::Vec;

/// How a projected set is fed into the next elimination step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ProjectionInput {
    /// Raw outputs, only zeros, constants and exact duplicates removed.
    Raw,
    /// Primitive parts, deduplicated up to scalars, univariate factors made
    /// square-free, perfect powers of kept factors dropped.
    #[default]
    Normalized,
}

/// Which operator component produced a raw factor. Indices refer to the
/// canonically sorted input of [`hong_projection`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FactorOrigin {
    /// Leading coefficient of the `reductum`-th reductum of input `f`.
    LeadingCoeff { f: usize, reductum: usize },
    /// `index`-th psc of a reductum of `f` with its derivative.
    Discriminant { f: usize, reductum: usize, index: u32 },
    /// `index`-th psc of a reductum of `f` with input `g`.
    Resultant { f: usize, g: usize, reductum: usize, index: u32 },
    /// Power shortcut for a pair in which one member is free of the variable.
    Power { f: usize, g: usize, reductum: usize, exponent: u32 },
    /// Input free of the variable, copied through.
    Copied { f: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawFactor {
    pub poly: Polynomial,
    pub origin: FactorOrigin,
}

/// Output of one elimination step.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionFactorSet {
    /// Eliminated variable.
    pub var: Var,
    /// Input, canonically sorted; origin indices point here.
    pub input: Vec<Polynomial>,
    /// Every operator output with its origin, in production order.
    pub provenance: Vec<RawFactor>,
    /// Distinct raw outputs (zeros and constants included), canonical order.
    pub raw: Vec<Polynomial>,
    /// Normalised factors, canonical order.
    pub factors: Vec<Polynomial>,
}

impl ProjectionFactorSet {
    /// Polynomials for the next elimination step.
    pub fn next_input(&self, mode: ProjectionInput) -> Vec<Polynomial> {
        match mode {
            ProjectionInput::Normalized => self.factors.clone(),
            ProjectionInput::Raw => self
                .raw
                .iter()
                .filter(|p| !p.is_constant())
                .cloned()
                .collect(),
        }
    }
}

fn sorted_dedup(mut ps: Vec<Polynomial>) -> Vec<Polynomial> {
    ps.sort_by(canonical_cmp);
    ps.dedup();
    ps
}

/// Primitive parts of the nonconstant inputs, univariate ones square-free,
/// duplicates up to scalar multiples and perfect powers removed.
pub fn normalize_factors(raw: &[Polynomial]) -> Vec<Polynomial> {
    let mut cands: Vec<Polynomial> = raw
        .iter()
        .filter(|p| !p.is_constant())
        .map(|p| {
            let vs = p.vars();
            if vs.len() == 1 {
                let v = *vs.iter().next().unwrap();
                let sf = p.to_upoly(v).unwrap().square_free();
                Polynomial::from_upoly(v, &sf).primitive()
            } else {
                p.primitive()
            }
        })
        .collect();
    cands = sorted_dedup(cands);
    let mut kept: Vec<Polynomial> = Vec::new();
    for p in cands {
        let dp = p.total_degree();
        let is_power = kept.iter().any(|q| {
            let dq = q.total_degree();
            dq > 0 && dp % dq == 0 && dp / dq > 1 && q.pow(dp / dq).primitive() == p
        });
        if !is_power {
            kept.push(p);
        }
    }
    kept
}

/// Degree-0 and degree-1 closed forms.
///
/// With `g = None`: a polynomial free of `v` projects to itself, and a
/// linear one to its leading coefficient and its reductum. With a pair in
/// which one member is free of `v`, the result is that member raised to the
/// degrees of the other's nonconstant reducta (the sign `(-1)^floor(d/2)`
/// is dropped, which leaves the sign-invariance information unchanged).
pub fn shortcut_project(
    f: &Polynomial,
    g: Option<&Polynomial>,
    v: Var,
) -> Result<Vec<Polynomial>, ProjectionError> {
    match g {
        None => match f.degree_in(v) {
            0 => Ok(alloc::vec![f.clone()]),
            1 => Ok(alloc::vec![
                f.leading_coeff(v).expect("nonzero"),
                f.reductum(v)
            ]),
            d => Err(ProjectionError::NotShortcut(format!("single polynomial of degree {d}"))),
        },
        Some(g) => {
            let (c, other) = if f.degree_in(v) == 0 {
                (f, g)
            } else if g.degree_in(v) == 0 {
                (g, f)
            } else {
                return Err(ProjectionError::NotShortcut("both members depend on the variable".into()));
            };
            Ok(other
                .reducta_set(v)
                .iter()
                .map(|r| r.degree_in(v))
                .filter(|&d| d > 0)
                .map(|d| c.pow(d))
                .collect())
        }
    }
}

/// Hong's operator: PROJ1 over every input (leading coefficients of reducta
/// and their pscs with the derivative) plus PROJ2 over ordered pairs
/// (pscs of the reducta of the smaller member with the larger one).
pub fn hong_projection(input: &[Polynomial], v: Var) -> ProjectionFactorSet {
    let input: Vec<Polynomial> = sorted_dedup(input.iter().filter(|p| !p.is_zero()).cloned().collect());
    let mut prov: Vec<RawFactor> = Vec::new();
    let mut push = |poly: Polynomial, origin: FactorOrigin| prov.push(RawFactor { poly, origin });

    for (fi, f) in input.iter().enumerate() {
        if f.degree_in(v) == 0 {
            push(f.clone(), FactorOrigin::Copied { f: fi });
            continue;
        }
        for (ri, r) in f.reducta_set(v).iter().enumerate() {
            push(r.leading_coeff(v).expect("nonzero reductum"), FactorOrigin::LeadingCoeff { f: fi, reductum: ri });
            for (i, s) in psc_set(r, &r.derivative(v), v).into_iter().enumerate() {
                push(s, FactorOrigin::Discriminant { f: fi, reductum: ri, index: i as u32 });
            }
        }
    }
    for (fi, f) in input.iter().enumerate() {
        for (gi, g) in input.iter().enumerate().skip(fi + 1) {
            for (ri, r) in f.reducta_set(v).iter().enumerate() {
                let (dr, dg) = (r.degree_in(v), g.degree_in(v));
                if dr == 0 && dg == 0 {
                    continue;
                }
                if dr == 0 || dg == 0 {
                    let (c, e) = if dr == 0 { (r, dg) } else { (g, dr) };
                    push(c.pow(e), FactorOrigin::Power { f: fi, g: gi, reductum: ri, exponent: e });
                    continue;
                }
                for (i, s) in psc_set(r, g, v).into_iter().enumerate() {
                    push(s, FactorOrigin::Resultant { f: fi, g: gi, reductum: ri, index: i as u32 });
                }
            }
        }
    }
    let raw = sorted_dedup(prov.iter().map(|r| r.poly.clone()).collect());
    let factors = normalize_factors(&raw);
    ProjectionFactorSet {
        var: v,
        input,
        provenance: prov,
        raw,
        factors,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{parse_polynomial, Vars};
    use alloc::string::String;

    fn render(ps: &[Polynomial], vs: &Vars) -> Vec<String> {
        ps.iter().map(|p| p.render(vs)).collect()
    }

    #[test]
    fn linear_shortcut_matches_operator() {
        let mut vs = Vars::new();
        let f = parse_polynomial("a*x + b", &mut vs).unwrap();
        let x = vs.lookup("x").unwrap();
        let s = shortcut_project(&f, None, x).unwrap();
        assert_eq!(render(&s, &vs), ["a", "b"]);
        let h = hong_projection(&[f], x);
        assert_eq!(render(&h.factors, &vs), ["b", "a"]);
    }

    #[test]
    fn not_a_shortcut() {
        let mut vs = Vars::new();
        let f = parse_polynomial("x^2 + a", &mut vs).unwrap();
        let x = vs.lookup("x").unwrap();
        assert!(matches!(shortcut_project(&f, None, x), Err(ProjectionError::NotShortcut(_))));
        assert!(matches!(shortcut_project(&f, Some(&f), x), Err(ProjectionError::NotShortcut(_))));
        let c = parse_polynomial("a - 1", &mut vs).unwrap();
        assert_eq!(render(&shortcut_project(&c, Some(&f), x).unwrap(), &vs), ["a^2 - 2*a + 1"]);
    }

    #[test]
    fn normalisation_drops_powers_and_multiples() {
        let mut vs = Vars::new();
        let ps: Vec<Polynomial> = ["x^4 - 2*x^2 + 1", "4 - 4*x^2", "x^2 - 1", "-8", "0", "x*y + 1", "(x*y + 1)^2"]
            .iter()
            .map(|s| parse_polynomial(s, &mut vs).unwrap())
            .collect();
        assert_eq!(render(&normalize_factors(&ps), &vs), ["x*y + 1", "x^2 - 1"]);
    }

    #[test]
    fn sphere_raw_sets() {
        let mut vs = Vars::new();
        let f = parse_polynomial("x^2 + y^2 + z^2 - 1", &mut vs).unwrap();
        let (y, z) = (vs.lookup("y").unwrap(), vs.lookup("z").unwrap());
        let p3 = hong_projection(&[f], z);
        assert_eq!(render(&p3.raw, &vs), ["1", "2", "x^2 + y^2 - 1", "4 - 4*x^2 - 4*y^2"]);
        let p2 = hong_projection(&p3.next_input(ProjectionInput::Raw), y);
        assert_eq!(
            render(&p2.raw, &vs),
            ["0", "1", "2", "-4", "-8", "x^2 - 1", "4 - 4*x^2", "256*x^2 - 256", "x^4 - 2*x^2 + 1"]
        );
        assert_eq!(render(&p2.factors, &vs), ["x^2 - 1"]);
    }
}
