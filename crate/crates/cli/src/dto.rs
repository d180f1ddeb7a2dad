//! JSON file formats: models, queries, hand-written systems and CAD trees.

use markovcad_core::arith::{format_rational, parse_rational, ArithError, Rational, Real, RealAlgebraic, UPoly};
use markovcad_core::cad::{Bound, CadCell, CadTree, CellKind, SignedFormula};
use markovcad_core::markov::{Entry, MarkovModel, Metric, Rewards};
use markovcad_core::poly::{parse_polynomial, Var, VarKind, Vars};
use markovcad_core::simplex::{ExtensibilityReport, SimplexConstraint, SimplexSpec, SystemM, XVar};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Malformed input with its location in the file.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{location}: {message}")]
pub struct InputError {
    pub location: String,
    pub message: String,
    /// Byte offset inside the offending value, when known.
    pub position: Option<usize>,
}

impl InputError {
    pub fn new(location: impl Into<String>, message: impl ToString) -> InputError {
        InputError {
            location: location.into(),
            message: message.to_string(),
            position: None,
        }
    }

    fn arith(location: impl Into<String>, e: ArithError) -> InputError {
        let position = match &e {
            ArithError::MalformedRational { position, .. } => Some(*position),
            _ => None,
        };
        InputError {
            location: location.into(),
            message: e.to_string(),
            position,
        }
    }
}

/// A rational string, a bare number, or a symbol name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum JsonValue {
    Text(String),
    Number(serde_json::Number),
}

impl JsonValue {
    pub fn text(&self) -> String {
        match self {
            JsonValue::Text(s) => s.clone(),
            JsonValue::Number(n) => n.to_string(),
        }
    }
}

pub fn rational(v: &JsonValue, location: &str) -> Result<Rational, InputError> {
    parse_rational(v.text().trim()).map_err(|e| InputError::arith(location, e))
}

fn rational_str(s: &str, location: &str) -> Result<Rational, InputError> {
    parse_rational(s.trim()).map_err(|e| InputError::arith(location, e))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub n: usize,
    #[serde(default)]
    pub lambda: Option<JsonValue>,
    #[serde(rename = "P")]
    pub p: Vec<Vec<JsonValue>>,
    #[serde(default)]
    pub r: Option<Vec<JsonValue>>,
    #[serde(default)]
    pub b: Option<Vec<JsonValue>>,
    #[serde(default)]
    pub c: Option<Vec<JsonValue>>,
    pub pi: Vec<JsonValue>,
    #[serde(default)]
    pub absorbing: Vec<usize>,
}

fn probability(v: &JsonValue, location: String) -> Result<Entry, InputError> {
    let t = v.text();
    Entry::parse_probability(&t).map_err(|e| match e {
        markovcad_core::markov::MarkovError::Arith(a) => InputError::arith(location, a),
        other => InputError::new(location, other),
    })
}

fn reward(v: &JsonValue, location: String) -> Result<Entry, InputError> {
    let t = v.text();
    Entry::parse_reward(&t).map_err(|e| match e {
        markovcad_core::markov::MarkovError::Arith(a) => InputError::arith(location, a),
        other => InputError::new(location, other),
    })
}

impl ModelFile {
    pub fn to_model(&self, name: &str) -> Result<MarkovModel, InputError> {
        let mut p = Vec::new();
        for (i, row) in self.p.iter().enumerate() {
            let mut out = Vec::new();
            for (j, v) in row.iter().enumerate() {
                out.push(probability(v, format!("{name}.P[{i}][{j}]"))?);
            }
            p.push(out);
        }
        let vec = |v: &[JsonValue], field: &str| -> Result<Vec<Entry>, InputError> {
            v.iter()
                .enumerate()
                .map(|(i, x)| reward(x, format!("{name}.{field}[{i}]")))
                .collect()
        };
        let rewards = match (&self.r, &self.b, &self.c) {
            (Some(r), None, None) => Rewards::R(vec(r, "r")?),
            (None, Some(b), Some(c)) => Rewards::BenefitCost {
                b: vec(b, "b")?,
                c: vec(c, "c")?,
            },
            _ => return Err(InputError::new(name, "give either \"r\" or both \"b\" and \"c\"")),
        };
        let pi = self
            .pi
            .iter()
            .enumerate()
            .map(|(i, v)| probability(v, format!("{name}.pi[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;
        let lambda = match &self.lambda {
            None => None,
            Some(v) => Some(rational(v, &format!("{name}.lambda"))?),
        };
        let m = MarkovModel {
            n: self.n,
            lambda,
            p,
            rewards,
            pi,
            absorbing: self.absorbing.clone(),
        };
        m.validate().map_err(|e| InputError::new(name, e))?;
        Ok(m)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoWayFile {
    pub pair: [String; 2],
    #[serde(default)]
    pub fixed: BTreeMap<String, JsonValue>,
    /// `[[u_lo, u_hi], [v_lo, v_hi]]`; simplex coordinates default to `[0, kappa]`.
    #[serde(default, rename = "box")]
    pub bbox: Option<[[JsonValue; 2]; 2]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QueryFile {
    pub metric: String,
    #[serde(default, rename = "T")]
    pub threshold: Option<JsonValue>,
    #[serde(default, rename = "t")]
    pub horizon: Option<u32>,
    #[serde(default, rename = "W")]
    pub wtp: Option<JsonValue>,
    #[serde(default)]
    pub benefit_sign: Option<String>,
    #[serde(default)]
    pub free_params: Option<Vec<String>>,
    #[serde(default)]
    pub fixed_params: BTreeMap<String, JsonValue>,
    #[serde(default)]
    pub ifr: bool,
    #[serde(default)]
    pub unsigned: Vec<String>,
    #[serde(default)]
    pub two_way: Option<TwoWayFile>,
}

pub fn parse_sign(s: &str, location: &str) -> Result<bool, InputError> {
    match s {
        "pos" | "positive" | "+" => Ok(true),
        "neg" | "negative" | "-" => Ok(false),
        _ => Err(InputError::new(location, format!("benefit sign must be pos or neg, got '{s}'"))),
    }
}

impl QueryFile {
    pub fn to_query(&self) -> Result<markovcad_core::markov::Query, InputError> {
        let t = || -> Result<Rational, InputError> {
            let v = self.threshold.as_ref().ok_or_else(|| InputError::new("query.T", "missing threshold"))?;
            rational(v, "query.T")
        };
        let metric = match self.metric.as_str() {
            "TotalRewardGE" => Metric::TotalRewardGE { threshold: t()? },
            "FiniteRewardGE" => Metric::FiniteRewardGE {
                threshold: t()?,
                horizon: self.horizon.ok_or_else(|| InputError::new("query.t", "missing horizon"))?,
            },
            "CompareRewards" => Metric::CompareRewards,
            "NMB_GE" => Metric::NmbGE {
                wtp: rational(
                    self.wtp.as_ref().ok_or_else(|| InputError::new("query.W", "missing willingness to pay"))?,
                    "query.W",
                )?,
                threshold: t()?,
            },
            "ICER_LE" => Metric::IcerLE {
                threshold: t()?,
                benefit_positive: match &self.benefit_sign {
                    Some(s) => Some(parse_sign(s, "query.benefit_sign")?),
                    None => None,
                },
            },
            other => return Err(InputError::new("query.metric", format!("unknown metric '{other}'"))),
        };
        let mut fixed = BTreeMap::new();
        for (k, v) in &self.fixed_params {
            fixed.insert(k.clone(), rational(v, &format!("query.fixed_params.{k}"))?);
        }
        Ok(markovcad_core::markov::Query {
            metric,
            free_params: self.free_params.clone(),
            fixed_params: fixed,
            ifr: self.ifr,
            unsigned: self.unsigned.clone(),
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimplexFile {
    pub vars: Vec<String>,
    /// `"eq"` or `"leq"`.
    pub constraint: String,
    #[serde(default)]
    pub kappa: Option<JsonValue>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct XVarFile {
    pub name: String,
    #[serde(default = "yes")]
    pub nonneg: bool,
}

fn yes() -> bool {
    true
}

/// A structured system written by hand.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemFile {
    pub simplices: Vec<SimplexFile>,
    #[serde(default)]
    pub x_vars: Vec<XVarFile>,
    pub fstar: String,
    #[serde(default)]
    pub ifr: bool,
}

impl SystemFile {
    pub fn to_system(&self) -> Result<SystemM, InputError> {
        let mut vars = Vars::new();
        let mut specs = Vec::new();
        for (i, s) in self.simplices.iter().enumerate() {
            let loc = format!("system.simplices[{i}]");
            let kappa = match &s.kappa {
                Some(k) => rational(k, &format!("{loc}.kappa"))?,
                None => Rational::from_integer(1.into()),
            };
            let c = match s.constraint.as_str() {
                "eq" => SimplexConstraint::Eq(kappa),
                "leq" => SimplexConstraint::Leq(kappa),
                other => return Err(InputError::new(loc, format!("constraint must be eq or leq, got '{other}'"))),
            };
            let vs = s.vars.iter().map(|n| vars.intern(n)).collect();
            specs.push(SimplexSpec::new(i, vs, c));
        }
        let xs: Vec<XVar> = self
            .x_vars
            .iter()
            .map(|x| XVar {
                var: vars.intern(&x.name),
                nonneg: x.nonneg,
            })
            .collect();
        let known = vars.len();
        let f = parse_polynomial(&self.fstar, &mut vars).map_err(|e| InputError::new("system.fstar", e))?;
        if vars.len() > known {
            return Err(InputError::new(
                "system.fstar",
                format!("'{}' is neither a simplex coordinate nor an x-type variable", vars.name(Var(known as u32))),
            ));
        }
        SystemM::new(vars, specs, xs, f, self.ifr).map_err(|e| InputError::new("system", e))
    }
}

// ---- trees ----

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum RealJson {
    Rational { value: String },
    /// Root of `coeffs` (constant term first) isolated in `(lo, hi)`.
    Algebraic { coeffs: Vec<String>, lo: String, hi: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum BoundJson {
    NegInf,
    PosInf,
    Value { value: RealJson },
    Expr { num: String, den: String },
    Root { poly: String, index: usize },
    PosRoot { poly: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellJson {
    pub var: String,
    /// `[value]` for a section, `[lo, hi]` for a sector.
    pub bounds: Vec<BoundJson>,
    pub sample: RealJson,
    pub truth: Option<bool>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<CellJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarJson {
    pub name: String,
    /// `plain`, `alpha` or `x`.
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simplex: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub index: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeJson {
    pub vars: Vec<VarJson>,
    pub order: Vec<String>,
    pub cells: Vec<CellJson>,
}

fn real_json(r: &Real) -> RealJson {
    match r {
        Real::Rational(q) => RealJson::Rational { value: format_rational(q) },
        Real::Algebraic(a) => RealJson::Algebraic {
            coeffs: a.poly().coeffs().iter().map(format_rational).collect(),
            lo: format_rational(a.lo()),
            hi: format_rational(a.hi()),
        },
    }
}

fn real_from(r: &RealJson) -> Result<Real, InputError> {
    match r {
        RealJson::Rational { value } => Ok(Real::Rational(rational_str(value, "tree.sample")?)),
        RealJson::Algebraic { coeffs, lo, hi } => {
            let cs = coeffs
                .iter()
                .map(|c| rational_str(c, "tree.sample"))
                .collect::<Result<Vec<_>, _>>()?;
            RealAlgebraic::try_new(&UPoly::new(cs), rational_str(lo, "tree.sample")?, rational_str(hi, "tree.sample")?)
                .map_err(|e| InputError::new("tree.sample", e))
        }
    }
}

fn bound_json(b: &Bound, vars: &Vars) -> BoundJson {
    match b {
        Bound::NegInf => BoundJson::NegInf,
        Bound::PosInf => BoundJson::PosInf,
        Bound::Value(r) => BoundJson::Value { value: real_json(r) },
        Bound::Expr { num, den } => BoundJson::Expr {
            num: num.render(vars),
            den: den.render(vars),
        },
        Bound::Root { poly, index } => BoundJson::Root {
            poly: poly.render(vars),
            index: *index,
        },
        Bound::PosRoot { poly } => BoundJson::PosRoot { poly: poly.render(vars) },
    }
}

fn poly_from(s: &str, vars: &mut Vars) -> Result<markovcad_core::Polynomial, InputError> {
    let known = vars.len();
    let p = parse_polynomial(s, vars).map_err(|e| InputError::new("tree.bound", e))?;
    if vars.len() > known {
        return Err(InputError::new("tree.bound", format!("unknown variable in '{s}'")));
    }
    Ok(p)
}

fn bound_from(b: &BoundJson, vars: &mut Vars) -> Result<Bound, InputError> {
    Ok(match b {
        BoundJson::NegInf => Bound::NegInf,
        BoundJson::PosInf => Bound::PosInf,
        BoundJson::Value { value } => Bound::Value(real_from(value)?),
        BoundJson::Expr { num, den } => Bound::Expr {
            num: poly_from(num, vars)?,
            den: poly_from(den, vars)?,
        },
        BoundJson::Root { poly, index } => Bound::Root {
            poly: poly_from(poly, vars)?,
            index: *index,
        },
        BoundJson::PosRoot { poly } => Bound::PosRoot { poly: poly_from(poly, vars)? },
    })
}

fn cell_json(c: &CadCell, vars: &Vars) -> CellJson {
    CellJson {
        var: vars.name(c.var).into(),
        bounds: match &c.kind {
            CellKind::Section(b) => vec![bound_json(b, vars)],
            CellKind::Sector(lo, hi) => vec![bound_json(lo, vars), bound_json(hi, vars)],
        },
        sample: real_json(&c.sample),
        truth: c.truth,
        children: c.children.iter().map(|ch| cell_json(ch, vars)).collect(),
    }
}

fn cell_from(c: &CellJson, vars: &mut Vars) -> Result<CadCell, InputError> {
    let var = vars
        .lookup(&c.var)
        .ok_or_else(|| InputError::new("tree.cell", format!("unknown variable '{}'", c.var)))?;
    let kind = match c.bounds.as_slice() {
        [b] => CellKind::Section(bound_from(b, vars)?),
        [lo, hi] => CellKind::Sector(bound_from(lo, vars)?, bound_from(hi, vars)?),
        _ => return Err(InputError::new("tree.cell", "bounds must have one or two entries")),
    };
    Ok(CadCell {
        var,
        kind,
        sample: real_from(&c.sample)?,
        truth: c.truth,
        children: c.children.iter().map(|ch| cell_from(ch, vars)).collect::<Result<_, _>>()?,
    })
}

pub fn tree_json(t: &CadTree) -> TreeJson {
    TreeJson {
        vars: t
            .vars
            .infos()
            .iter()
            .map(|i| match i.kind {
                VarKind::Plain => VarJson {
                    name: i.name.clone(),
                    kind: "plain".into(),
                    simplex: None,
                    index: None,
                },
                VarKind::Alpha { simplex, position } => VarJson {
                    name: i.name.clone(),
                    kind: "alpha".into(),
                    simplex: Some(simplex),
                    index: Some(position),
                },
                VarKind::X { index } => VarJson {
                    name: i.name.clone(),
                    kind: "x".into(),
                    simplex: None,
                    index: Some(index),
                },
            })
            .collect(),
        order: t.order.iter().map(|v| t.vars.name(*v).into()).collect(),
        cells: t.cells.iter().map(|c| cell_json(c, &t.vars)).collect(),
    }
}

pub fn tree_from(j: &TreeJson) -> Result<CadTree, InputError> {
    let mut vars = Vars::new();
    for v in &j.vars {
        let kind = match (v.kind.as_str(), v.simplex, v.index) {
            ("plain", _, _) => VarKind::Plain,
            ("alpha", Some(simplex), Some(position)) => VarKind::Alpha { simplex, position },
            ("x", _, Some(index)) => VarKind::X { index },
            _ => return Err(InputError::new("tree.vars", format!("bad kind for '{}'", v.name))),
        };
        vars.intern_kind(&v.name, kind);
    }
    let order = j
        .order
        .iter()
        .map(|n| vars.lookup(n).ok_or_else(|| InputError::new("tree.order", format!("unknown variable '{n}'"))))
        .collect::<Result<Vec<_>, _>>()?;
    let cells = j.cells.iter().map(|c| cell_from(c, &mut vars)).collect::<Result<_, _>>()?;
    Ok(CadTree::new(vars, order, cells))
}

// ---- formulas and reports ----

#[derive(Debug, Clone, Serialize)]
pub struct AtomJson {
    pub poly: String,
    pub rel: String,
}

pub fn formula_json(f: &SignedFormula, vars: &Vars) -> Vec<Vec<AtomJson>> {
    f.conjuncts
        .iter()
        .map(|c| {
            c.iter()
                .map(|a| AtomJson {
                    poly: a.poly.render(vars),
                    rel: a.rel.symbol().into(),
                })
                .collect()
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessJson {
    pub cell: Vec<usize>,
    pub first: BTreeMap<String, String>,
    pub first_sign: String,
    pub second: BTreeMap<String, String>,
    pub second_sign: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct GCheckJson {
    pub index: usize,
    pub poly: String,
    pub invariant: bool,
    pub method: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessJson>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FCheckJson {
    pub var: String,
    pub f: String,
    pub ok: bool,
    pub root_at_zero: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportJson {
    pub extensible: bool,
    pub probabilistic: bool,
    pub cells_checked: usize,
    pub ifr_by_inclusion: bool,
    pub g_checks: Vec<GCheckJson>,
    pub f_checks: Vec<FCheckJson>,
}

fn point_json(p: &BTreeMap<Var, Rational>, vars: &Vars) -> BTreeMap<String, String> {
    p.iter().map(|(v, q)| (vars.name(*v).into(), format_rational(q))).collect()
}

pub fn report_json(r: &ExtensibilityReport, vars: &Vars) -> ReportJson {
    ReportJson {
        extensible: r.extensible,
        probabilistic: r.probabilistic,
        cells_checked: r.cells_checked,
        ifr_by_inclusion: r.ifr_by_inclusion,
        g_checks: r
            .g_checks
            .iter()
            .map(|g| GCheckJson {
                index: g.index,
                poly: g.poly.render(vars),
                invariant: g.invariant,
                method: format!("{:?}", g.method).to_lowercase(),
                witness: g.witness.as_ref().map(|w| WitnessJson {
                    cell: w.cell.clone(),
                    first: point_json(&w.first, vars),
                    first_sign: w.first_sign.symbol().into(),
                    second: point_json(&w.second, vars),
                    second_sign: w.second_sign.symbol().into(),
                }),
            })
            .collect(),
        f_checks: r
            .f_checks
            .iter()
            .map(|f| FCheckJson {
                var: vars.name(f.var).into(),
                f: f.f.render(vars),
                ok: f.ok,
                root_at_zero: f.root_at_zero,
                reason: f.reason.clone(),
            })
            .collect(),
    }
}

/// Plain-text report, one check per line.
pub fn report_text(r: &ExtensibilityReport, vars: &Vars) -> String {
    let mut out = format!(
        "simplex-extensible: {}{}\ncells checked: {}\n",
        r.extensible,
        if r.probabilistic { " (probabilistic)" } else { "" },
        r.cells_checked
    );
    if r.ifr_by_inclusion {
        out.push_str("IFR cells accepted by inclusion\n");
    }
    for g in &r.g_checks {
        out.push_str(&format!(
            "g{} = {}: {} [{:?}]\n",
            g.index,
            g.poly.render(vars),
            if g.invariant { "sign-invariant" } else { "changes sign" },
            g.method
        ));
        if let Some(w) = &g.witness {
            let show = |p: &BTreeMap<Var, Rational>| {
                p.iter()
                    .map(|(v, q)| format!("{} = {}", vars.name(*v), format_rational(q)))
                    .collect::<Vec<_>>()
                    .join(", ")
            };
            out.push_str(&format!(
                "  witness in cell {:?}: {} at ({}) and {} at ({})\n",
                w.cell,
                w.first_sign,
                show(&w.first),
                w.second_sign,
                show(&w.second)
            ));
        }
    }
    for f in &r.f_checks {
        out.push_str(&format!(
            "f({}) = {}: {}{}\n",
            vars.name(f.var),
            f.f.render(vars),
            if f.ok { "ok" } else { "rejected" },
            f.reason.as_ref().map(|r| format!(" ({r})")).unwrap_or_default()
        ));
    }
    out
}
