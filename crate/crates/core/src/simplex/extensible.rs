use super::trees::{glue_simplices, ifr_levels, levels_tree};
use super::{SimplexError, SystemM, XTerm};
use crate::arith::{isolate_real_roots, rational_between, sign_at, Endpoint, Rational, Real, Sign};
use crate::cad::{Bound, CadCell, CadTree, CellKind, CellPath};
use crate::poly::{Monomial, Polynomial, Var};
use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// How a polynomial's sign was shown constant on a cell, weakest last.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum CertMethod {
    /// Constant after substituting the cell's sections.
    Constant,
    /// All coefficients share one sign and every remaining coordinate is
    /// positive on the cell.
    UniformSign,
    /// Uniform sign after homogenizing with the simplex sums (Polya style,
    /// up to two extra degrees).
    Homogenization,
    /// No counterexample among grid and seeded random points.
    Sampling,
}

/// Two points of one cell at which a polynomial takes different signs.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub cell: CellPath,
    pub first: BTreeMap<Var, Rational>,
    pub first_sign: Sign,
    pub second: BTreeMap<Var, Rational>,
    pub second_sign: Sign,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GVerdict {
    /// 0 for `g0`, `i` for the coefficient of the i-th x-type variable.
    pub index: usize,
    pub poly: Polynomial,
    pub invariant: bool,
    /// Weakest method needed over all cells.
    pub method: CertMethod,
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FCheck {
    pub var: Var,
    pub f: Polynomial,
    pub ok: bool,
    /// `f(0) = 0` with `x = 0` kept as its own cell.
    pub root_at_zero: bool,
    pub reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtensibilityReport {
    pub extensible: bool,
    pub g_checks: Vec<GVerdict>,
    pub f_checks: Vec<FCheck>,
    /// Some verdict rests on sampling only.
    pub probabilistic: bool,
    pub cells_checked: usize,
    /// The IFR system passed because the plain simplex system did.
    pub ifr_by_inclusion: bool,
}

impl ExtensibilityReport {
    pub fn first_witness(&self) -> Option<&Witness> {
        self.g_checks.iter().find_map(|g| g.witness.as_ref())
    }
}

#[derive(Debug, Clone)]
pub struct CheckOptions {
    /// Random points per cell when exact certificates fail.
    pub samples: usize,
    pub seed: u64,
    pub parallel: bool,
}

impl Default for CheckOptions {
    fn default() -> CheckOptions {
        CheckOptions {
            samples: 50,
            seed: 0,
            parallel: false,
        }
    }
}

/// Checks that every `g_i` is sign-invariant on every cell of the simplex
/// CAD and that every nonlinear `f_i` admits ordered lifting.
pub fn check_simplex_extensible(sys: &SystemM, opts: &CheckOptions) -> Result<ExtensibilityReport, SimplexError> {
    let f_checks: Vec<FCheck> = sys.decomposition.terms.iter().map(|t| check_f(sys, t)).collect();
    let plain = glue_simplices(&sys.vars, &sys.simplices, opts.parallel)?;
    let mut g_checks = check_gs(sys, &plain, true, opts);
    let mut cells_checked = plain.leaf_count();
    let mut ifr_by_inclusion = false;
    if sys.ifr {
        if g_checks.iter().all(|g| g.invariant) {
            ifr_by_inclusion = true;
        } else {
            let tree = levels_tree(&sys.vars, &ifr_levels(&sys.simplices));
            cells_checked = tree.leaf_count();
            g_checks = check_gs(sys, &tree, false, opts);
        }
    }
    let extensible = g_checks.iter().all(|g| g.invariant) && f_checks.iter().all(|f| f.ok);
    let probabilistic = g_checks.iter().any(|g| g.invariant && g.method == CertMethod::Sampling);
    Ok(ExtensibilityReport {
        extensible,
        g_checks,
        f_checks,
        probabilistic,
        cells_checked,
        ifr_by_inclusion,
    })
}

fn check_gs(sys: &SystemM, tree: &CadTree, faces: bool, opts: &CheckOptions) -> Vec<GVerdict> {
    let mut gs = alloc::vec![sys.decomposition.g0.clone()];
    gs.extend(sys.decomposition.terms.iter().map(|t| t.g.clone()));
    let leaves: Vec<(CellPath, Vec<CadCell>)> = tree
        .leaves()
        .into_iter()
        .map(|l| (l.path.clone(), l.cells.into_iter().map(strip).collect()))
        .collect();
    let items: Vec<(usize, Polynomial)> = gs.into_iter().enumerate().collect();
    crate::par::map(items, opts.parallel, |(index, g)| {
        let mut method = CertMethod::Constant;
        for (path, cells) in &leaves {
            match cell_check(sys, &g, path, cells, faces, opts) {
                Ok(m) => method = method.max(m),
                Err(w) => {
                    return GVerdict {
                        index,
                        poly: g,
                        invariant: false,
                        method: CertMethod::Sampling,
                        witness: Some(w),
                    }
                }
            }
        }
        GVerdict {
            index,
            poly: g,
            invariant: true,
            method,
            witness: None,
        }
    })
}

fn strip(c: &CadCell) -> CadCell {
    CadCell {
        var: c.var,
        kind: c.kind.clone(),
        sample: c.sample.clone(),
        truth: c.truth,
        children: Vec::new(),
    }
}

fn rational_sample(cells: &[CadCell]) -> BTreeMap<Var, Rational> {
    cells
        .iter()
        .map(|c| (c.var, c.sample.as_rational().expect("simplex samples are rational").clone()))
        .collect()
}

fn section_poly(b: &Bound) -> Option<Polynomial> {
    match b {
        Bound::Value(Real::Rational(q)) => Some(Polynomial::constant(q.clone())),
        Bound::Expr { num, den } => den.constant_value().map(|d| num.scale(&(Rational::one() / d))),
        _ => None,
    }
}

fn uniform_sign(p: &Polynomial) -> Option<Sign> {
    let mut it = p.terms().map(|(_, c)| Sign::of(c));
    let first = it.next()?;
    it.all(|s| s == first).then_some(first)
}

fn cell_check(
    sys: &SystemM,
    g: &Polynomial,
    path: &CellPath,
    cells: &[CadCell],
    faces: bool,
    opts: &CheckOptions,
) -> Result<CertMethod, Witness> {
    let eqs: BTreeMap<Var, Polynomial> = cells
        .iter()
        .filter_map(|c| match &c.kind {
            CellKind::Section(b) => section_poly(b).map(|p| (c.var, p)),
            CellKind::Sector(..) => None,
        })
        .collect();
    let reduced = g.substitute_all(&eqs);
    if reduced.is_constant() {
        return Ok(CertMethod::Constant);
    }
    if uniform_sign(&reduced).is_some() {
        return Ok(CertMethod::UniformSign);
    }
    let sample = rational_sample(cells);
    if faces && homogenized_certificate(sys, g, &sample) {
        return Ok(CertMethod::Homogenization);
    }
    sampling_check(g, path, cells, &sample, opts)
}

/// On a face of a product of simplices every coordinate is either 0 or
/// positive and each simplex sum (with a slack for `<=`) is fixed, so a
/// homogenized form with one coefficient sign has constant strict sign.
fn homogenized_certificate(sys: &SystemM, g: &Polynomial, sample: &BTreeMap<Var, Rational>) -> bool {
    let zeros: BTreeMap<Var, Rational> = sample
        .iter()
        .filter(|(_, q)| q.is_zero())
        .map(|(v, q)| (*v, q.clone()))
        .collect();
    let g = g.substitute_rationals(&zeros);
    if g.is_zero() {
        return true;
    }
    let mut next_var = sys.vars.len() as u32;
    let mut groups: Vec<(Vec<Var>, Polynomial)> = Vec::new();
    for s in &sys.simplices {
        let kappa = s.constraint.kappa();
        let mut members: Vec<Var> = s.vars.iter().copied().filter(|v| !zeros.contains_key(v)).collect();
        let total: Rational = s.vars.iter().map(|v| sample[v].clone()).sum();
        let mut sum = members
            .iter()
            .fold(Polynomial::zero(), |acc, v| &acc + &Polynomial::var(*v));
        if !s.constraint.is_eq() && &total < kappa {
            let slack = Var(next_var);
            next_var += 1;
            members.push(slack);
            sum = &sum + &Polynomial::var(slack);
        }
        groups.push((members, sum.scale(&(Rational::one() / kappa))));
    }
    let mut h = Polynomial::zero();
    for (m, c) in g.terms() {
        let mut term = Polynomial::from_term(m.clone(), c.clone());
        for (members, unit) in &groups {
            let top = g
                .terms()
                .map(|(m2, _)| group_degree(m2, members))
                .max()
                .unwrap_or(0);
            term = &term * &unit.pow(top - group_degree(m, members));
        }
        h = &h + &term;
    }
    for _ in 0..=2 {
        if uniform_sign(&h).is_some() {
            return true;
        }
        for (_, unit) in &groups {
            h = &h * unit;
        }
    }
    false
}

fn group_degree(m: &Monomial, members: &[Var]) -> u32 {
    members.iter().map(|v| m.exp(*v)).sum()
}

/// Point of the cell at relative positions `ts` (one per sector level).
fn point_in_cell(cells: &[CadCell], ts: &[Rational]) -> BTreeMap<Var, Rational> {
    let mut point = BTreeMap::new();
    let mut k = 0;
    for c in cells {
        let value = match &c.kind {
            CellKind::Section(b) => b.eval(c.var, &point).and_then(|r| r.as_rational().cloned()),
            CellKind::Sector(lo, hi) => {
                let lo = lo.eval(c.var, &point).and_then(|r| r.as_rational().cloned());
                let hi = hi.eval(c.var, &point).and_then(|r| r.as_rational().cloned());
                let t = ts[k].clone();
                k += 1;
                match (lo, hi) {
                    (Some(a), Some(b)) => Some(&a + &(&b - &a) * t),
                    _ => None,
                }
            }
        };
        point.insert(c.var, value.unwrap_or_else(|| c.sample.as_rational().expect("rational sample").clone()));
    }
    point
}

fn sampling_check(
    g: &Polynomial,
    path: &CellPath,
    cells: &[CadCell],
    sample: &BTreeMap<Var, Rational>,
    opts: &CheckOptions,
) -> Result<CertMethod, Witness> {
    let d = cells.iter().filter(|c| !c.is_section()).count();
    let sign = |p: &BTreeMap<Var, Rational>| Sign::of(&g.eval(p).expect("point covers g"));
    let mut points = alloc::vec![sample.clone()];
    if d <= 3 {
        let mut idx = alloc::vec![1i64; d];
        loop {
            let ts: Vec<Rational> = idx.iter().map(|&k| crate::arith::rat(k, 10)).collect();
            points.push(point_in_cell(cells, &ts));
            let mut j = 0;
            while j < d && idx[j] == 9 {
                idx[j] = 1;
                j += 1;
            }
            if j == d {
                break;
            }
            idx[j] += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ (path.iter().fold(17u64, |h, &i| h.wrapping_mul(31).wrapping_add(i as u64))));
    for _ in 0..opts.samples {
        let ts: Vec<Rational> = (0..d).map(|_| Rational::new(rng.gen_range(1..1000).into(), 1000.into())).collect();
        points.push(point_in_cell(cells, &ts));
    }
    let mut pos = None;
    let mut neg = None;
    let mut zero = None;
    for p in points {
        let s = sign(&p);
        let slot = match s {
            Sign::Positive => &mut pos,
            Sign::Negative => &mut neg,
            Sign::Zero => &mut zero,
        };
        if slot.is_none() {
            *slot = Some(p);
        }
    }
    let found: Vec<(BTreeMap<Var, Rational>, Sign)> = [(pos, Sign::Positive), (neg, Sign::Negative), (zero, Sign::Zero)]
        .into_iter()
        .filter_map(|(p, s)| p.map(|p| (p, s)))
        .collect();
    if found.len() < 2 {
        return Ok(CertMethod::Sampling);
    }
    let mut it = found.into_iter();
    let (first, first_sign) = it.next().expect("two entries");
    let (second, second_sign) = it.next().expect("two entries");
    Err(Witness {
        cell: path.clone(),
        first,
        first_sign,
        second,
        second_sign,
    })
}

/// `f` keeps one sign on the allowed x-range apart from a root at 0, and is
/// strictly monotone there so each level has at most one root.
fn check_f(sys: &SystemM, t: &XTerm) -> FCheck {
    let nonneg = sys.x_vars.iter().find(|x| x.var == t.var).map(|x| x.nonneg).unwrap_or(true);
    let mut out = FCheck {
        var: t.var,
        f: t.f.clone(),
        ok: true,
        root_at_zero: false,
        reason: None,
    };
    if t.is_linear() || t.g.is_zero() {
        return out;
    }
    let u = t.f.to_upoly(t.var).expect("univariate f");
    out.root_at_zero = u.coeff(0).is_zero();
    let roots = isolate_real_roots(&u).unwrap_or_default();
    let zero = Real::zero();
    let bad_root = roots.iter().any(|r| {
        let c = crate::arith::compare(r, &zero);
        c == core::cmp::Ordering::Greater || (!nonneg && c == core::cmp::Ordering::Less)
    });
    if bad_root {
        out.ok = false;
        out.reason = Some(if nonneg {
            "f has a positive root".into()
        } else {
            "f has a nonzero real root".into()
        });
        return out;
    }
    let du = u.derivative();
    let lo = if nonneg { Endpoint::Finite(zero.clone()) } else { Endpoint::NegInf };
    let mut crit: Vec<Real> = isolate_real_roots(&du)
        .unwrap_or_default()
        .into_iter()
        .filter(|r| !nonneg || crate::arith::compare(r, &zero) == core::cmp::Ordering::Greater)
        .collect();
    crit.sort_by(crate::arith::compare);
    let mut ends: Vec<Endpoint> = alloc::vec![lo];
    ends.extend(crit.into_iter().map(Endpoint::Finite));
    ends.push(Endpoint::PosInf);
    let mut signs = Vec::new();
    for w in ends.windows(2) {
        if let Ok(q) = rational_between(&w[0], &w[1]) {
            signs.push(sign_at(&du, &Real::Rational(q)));
        }
    }
    let monotone = signs.first().is_some_and(|s| *s != Sign::Zero && signs.iter().all(|x| x == s));
    if !monotone {
        out.ok = false;
        out.reason = Some("f is not monotone on the x-range".into());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};
    use crate::poly::{parse_polynomial, Vars};
    use crate::simplex::{SimplexConstraint, SimplexSpec, XVar};

    fn system(f: &str, alphas: &[&str], xs: &[&str], ifr: bool) -> SystemM {
        let mut vs = Vars::new();
        let a: Vec<Var> = alphas.iter().map(|n| vs.intern(n)).collect();
        let x: Vec<XVar> = xs.iter().map(|n| XVar { var: vs.intern(n), nonneg: true }).collect();
        let f = parse_polynomial(f, &mut vs).unwrap();
        SystemM::new(vs, alloc::vec![SimplexSpec::new(0, a, SimplexConstraint::Eq(int(1)))], x, f, ifr).unwrap()
    }

    #[test]
    fn linear_form_is_extensible() {
        let m = system("a1*x1 + a2*x2 - 1", &["a1", "a2"], &["x1", "x2"], false);
        let r = check_simplex_extensible(&m, &CheckOptions::default()).unwrap();
        assert!(r.extensible);
        assert!(!r.probabilistic);
    }

    #[test]
    fn non_invariant_coefficient_is_rejected_with_witness() {
        let m = system("x1*(a2^2 - a1^2) + x2*a2 - 1", &["a1", "a2"], &["x1", "x2"], false);
        let r = check_simplex_extensible(&m, &CheckOptions::default()).unwrap();
        assert!(!r.extensible);
        let w = r.first_witness().unwrap();
        assert_eq!(w.cell, alloc::vec![1, 0]);
        let a1 = m.vars.lookup("a1").unwrap();
        for p in [&w.first, &w.second] {
            assert!(p[&a1] > rat(0, 1) && p[&a1] < rat(1, 1));
        }
        assert_ne!(w.first_sign, w.second_sign);
        let g = &r.g_checks[1].poly;
        assert_eq!(Sign::of(&g.eval(&w.first).unwrap()), w.first_sign);
        assert_eq!(Sign::of(&g.eval(&w.second).unwrap()), w.second_sign);
    }

    #[test]
    fn nonlinear_term_with_root_at_zero() {
        let m = system("a1*(x1^2 + x1^3) + a2*x2 + a3*x3", &["a1", "a2", "a3"], &["x1", "x2", "x3"], false);
        let r = check_simplex_extensible(&m, &CheckOptions::default()).unwrap();
        assert!(r.extensible);
        assert!(r.f_checks[0].root_at_zero);
        let bad = system("a1*(x1^2 - x1) + a2", &["a1", "a2"], &["x1"], false);
        let r = check_simplex_extensible(&bad, &CheckOptions::default()).unwrap();
        assert!(!r.extensible);
        assert!(!r.f_checks[0].ok);
    }

    #[test]
    fn homogenization_certifies_mixed_coefficients() {
        // 1 - a1 - a2 is positive-only after homogenizing with a1+a2+a3 = 1
        let m = system("x1*(1 - a1 - a2) - 1", &["a1", "a2", "a3"], &["x1"], false);
        let r = check_simplex_extensible(&m, &CheckOptions::default()).unwrap();
        assert!(r.extensible);
        assert!(r.g_checks[1].method <= CertMethod::Homogenization);
    }

    #[test]
    fn ifr_keeps_extensibility() {
        let mut vs = Vars::new();
        let rows: Vec<SimplexSpec> = (0..2)
            .map(|i| {
                SimplexSpec::new(
                    i,
                    (0..2).map(|j| vs.intern(&alloc::format!("p{i}{j}"))).collect(),
                    SimplexConstraint::Eq(int(1)),
                )
            })
            .collect();
        let x = XVar { var: vs.intern("x"), nonneg: true };
        let f = parse_polynomial("p00*x + p11*x - 1", &mut vs).unwrap();
        let m = SystemM::new(vs, rows, alloc::vec![x], f, true).unwrap();
        let r = check_simplex_extensible(&m, &CheckOptions::default()).unwrap();
        assert!(r.extensible);
        assert!(r.ifr_by_inclusion);
    }
}
