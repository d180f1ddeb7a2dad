//! Run pipeline behind the command line.

use crate::dto::{self, InputError, ModelFile, QueryFile, SystemFile, TwoWayFile};
use markovcad_core::arith::{format_rational, rational_to_f64, Rational};
use markovcad_core::cad::{decision_cad, render_tree, solution_formula, CadError, CadOptions, CadTree, RenderOptions, SignedFormula};
use markovcad_core::markov::{boundary_curve, classify_two_way, encode_system, grid_compare, MarkovError};
use markovcad_core::poly::{Var, Vars};
use markovcad_core::simplex::{
    check_simplex_extensible, specialized_cad, CheckOptions, ExtensibilityReport, SimplexError,
    SimplexSpec, SpecializedOptions, SystemM, XVar,
};
use serde::Serialize;
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Emit {
    Tree,
    Formula,
    BoundaryCsv,
    GridCsv,
    Report,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

/// Input documents as JSON text.
#[derive(Debug, Clone, Default)]
pub struct Inputs {
    pub model: Option<String>,
    pub model_b: Option<String>,
    pub query: Option<String>,
    pub system: Option<String>,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub emit: Emit,
    pub format: Format,
    pub grid_n: (usize, usize),
    pub boundary_samples: usize,
    pub order: Option<Vec<String>>,
    pub ifr: bool,
    pub icer_benefit_sign: Option<bool>,
    pub parallel: bool,
    pub seed: u64,
    pub verbose: bool,
    pub floats: bool,
    /// Use the general CAD when the system is not simplex-extensible.
    pub fallback_general: bool,
    pub max_cells: usize,
}

impl Default for RunConfig {
    fn default() -> RunConfig {
        RunConfig {
            emit: Emit::Tree,
            format: Format::Text,
            grid_n: (5, 5),
            boundary_samples: 20,
            order: None,
            ifr: false,
            icer_benefit_sign: None,
            parallel: false,
            seed: 0,
            verbose: false,
            floats: false,
            fallback_general: false,
            max_cells: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_NOT_EXTENSIBLE: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_CELL_LIMIT: i32 = 4;

#[derive(Debug, Serialize)]
struct ErrorBody {
    kind: &'static str,
    code: i32,
    message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    location: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    position: Option<usize>,
}

#[derive(Debug, Serialize)]
struct ErrorDoc {
    error: ErrorBody,
}

/// A failed run: exit code, error document and any partial output.
struct Failure {
    code: i32,
    body: ErrorBody,
    stdout: String,
}

impl Failure {
    fn input(e: InputError) -> Failure {
        Failure {
            code: EXIT_INPUT,
            body: ErrorBody {
                kind: "input",
                code: EXIT_INPUT,
                message: e.message,
                location: Some(e.location),
                position: e.position,
            },
            stdout: String::new(),
        }
    }

    fn msg(code: i32, kind: &'static str, message: impl ToString) -> Failure {
        Failure {
            code,
            body: ErrorBody {
                kind,
                code,
                message: message.to_string(),
                location: None,
                position: None,
            },
            stdout: String::new(),
        }
    }

    fn cad(e: CadError) -> Failure {
        match e {
            CadError::CellLimit(_) => Failure::msg(EXIT_CELL_LIMIT, "cell_limit", e),
            other => Failure::msg(EXIT_INPUT, "cad", other),
        }
    }

    fn simplex(e: SimplexError) -> Failure {
        match e {
            SimplexError::Cad(c) => Failure::cad(c),
            SimplexError::NotExtensible(_) => Failure::msg(EXIT_NOT_EXTENSIBLE, "not_extensible", e),
            other => Failure::msg(EXIT_INPUT, "system", other),
        }
    }

    fn markov(e: MarkovError) -> Failure {
        match e {
            MarkovError::Simplex(s) => Failure::simplex(s),
            MarkovError::NotExtensible(_) => Failure::msg(EXIT_NOT_EXTENSIBLE, "not_extensible", e),
            MarkovError::Arith(a) => Failure::input(InputError::new("model", a)),
            other => Failure::msg(EXIT_INPUT, "model", other),
        }
    }
}

fn parse_json<T: serde::de::DeserializeOwned>(text: &str, what: &str) -> Result<T, Failure> {
    serde_json::from_str(text).map_err(|e| {
        Failure::input(InputError {
            location: format!("{what} (line {}, column {})", e.line(), e.column()),
            message: e.to_string(),
            position: None,
        })
    })
}

struct Loaded {
    system: SystemM,
    two_way: Option<TwoWayFile>,
    notes: Vec<String>,
}

fn load(inputs: &Inputs, cfg: &RunConfig) -> Result<Loaded, Failure> {
    if let Some(text) = &inputs.system {
        if inputs.model.is_some() || inputs.query.is_some() {
            return Err(Failure::msg(EXIT_INPUT, "usage", "--system excludes --model and --query"));
        }
        let mut sf: SystemFile = parse_json(text, "system")?;
        sf.ifr |= cfg.ifr;
        let system = sf.to_system().map_err(Failure::input)?;
        return Ok(Loaded {
            system,
            two_way: None,
            notes: Vec::new(),
        });
    }
    let (Some(mt), Some(qt)) = (&inputs.model, &inputs.query) else {
        return Err(Failure::msg(EXIT_INPUT, "usage", "need --model and --query, or --system"));
    };
    let mut models = vec![parse_json::<ModelFile>(mt, "model")?.to_model("model").map_err(Failure::input)?];
    if let Some(bt) = &inputs.model_b {
        models.push(parse_json::<ModelFile>(bt, "model_b")?.to_model("model_b").map_err(Failure::input)?);
    }
    let qf: QueryFile = parse_json(qt, "query")?;
    let mut query = qf.to_query().map_err(Failure::input)?;
    query.ifr |= cfg.ifr;
    if let (Some(sign), markovcad_core::markov::Metric::IcerLE { benefit_positive, .. }) =
        (cfg.icer_benefit_sign, &mut query.metric)
    {
        *benefit_positive = Some(sign);
    }
    let refs: Vec<&markovcad_core::markov::MarkovModel> = models.iter().collect();
    let ms = encode_system(&refs, &query).map_err(Failure::markov)?;
    Ok(Loaded {
        system: ms.system,
        two_way: qf.two_way,
        notes: ms.notes,
    })
}

/// Re-declares the system under a user order: simplices in order of first
/// appearance, coordinates within each simplex as listed, then x-type
/// variables. Each simplex must be contiguous and precede every x-type
/// variable.
fn reorder(sys: &SystemM, names: &[String]) -> Result<SystemM, Failure> {
    let bad = |m: String| Failure::msg(EXIT_INPUT, "order", m);
    let mut order: Vec<Var> = Vec::new();
    for n in names {
        let v = sys.vars.lookup(n).ok_or_else(|| bad(format!("unknown variable '{n}'")))?;
        if order.contains(&v) {
            return Err(bad(format!("'{n}' listed twice")));
        }
        order.push(v);
    }
    let natural = sys.default_order();
    if let Some(v) = natural.iter().find(|v| !order.contains(v)) {
        return Err(bad(format!("order is missing '{}'", sys.vars.name(*v))));
    }
    if sys.ifr && order != natural {
        return Err(bad("IFR systems keep their natural order".into()));
    }
    let mut groups: Vec<(usize, Vec<Var>)> = Vec::new();
    let mut xs: Vec<XVar> = Vec::new();
    for v in &order {
        match sys.simplex_of(*v) {
            Some(_) if !xs.is_empty() => {
                return Err(bad("simplex coordinates must precede x-type variables".into()));
            }
            Some(si) => {
                if groups.last().map(|g| g.0) == Some(si) {
                    groups.last_mut().expect("nonempty").1.push(*v);
                } else if groups.iter().any(|(g, _)| *g == si) {
                    return Err(bad("each simplex must be contiguous in the order".into()));
                } else {
                    groups.push((si, vec![*v]));
                }
            }
            None => xs.push(sys.x_vars.iter().find(|x| x.var == *v).expect("x-type").clone()),
        }
    }
    let simplices = groups
        .into_iter()
        .enumerate()
        .map(|(i, (si, vs))| SimplexSpec::new(i, vs, sys.simplices[si].constraint.clone()))
        .collect();
    SystemM::new(sys.vars.clone(), simplices, xs, sys.fstar.clone(), sys.ifr).map_err(Failure::simplex)
}

fn sig12(q: &Rational) -> String {
    let f = rational_to_f64(q);
    if f == 0.0 || !f.is_finite() {
        return format!("{f}");
    }
    let decimals = (11 - f.abs().log10().floor() as i64).clamp(0, 40) as usize;
    format!("{f:.decimals$}")
}

fn pair_box(
    sys: &SystemM,
    tw: &TwoWayFile,
    u: Var,
    v: Var,
) -> Result<[(Rational, Rational); 2], Failure> {
    if let Some(b) = &tw.bbox {
        let mut out = Vec::new();
        for (k, side) in b.iter().enumerate() {
            let lo = dto::rational(&side[0], &format!("query.two_way.box[{k}][0]")).map_err(Failure::input)?;
            let hi = dto::rational(&side[1], &format!("query.two_way.box[{k}][1]")).map_err(Failure::input)?;
            out.push((lo, hi));
        }
        return Ok([out[0].clone(), out[1].clone()]);
    }
    let range = |w: Var| -> Result<(Rational, Rational), Failure> {
        match sys.simplex_of(w) {
            Some(si) => Ok((Rational::from_integer(0.into()), sys.simplices[si].constraint.kappa().clone())),
            None => Err(Failure::msg(
                EXIT_INPUT,
                "two_way",
                format!("'{}' needs an explicit box", sys.vars.name(w)),
            )),
        }
    };
    Ok([range(u)?, range(v)?])
}

fn two_way(sys: &SystemM, tw: Option<&TwoWayFile>, cfg: &RunConfig, notes: &mut Vec<String>) -> Result<String, Failure> {
    let default_tw;
    let tw = match tw {
        Some(t) => t,
        None => {
            let free = sys.default_order();
            if free.len() != 2 {
                return Err(Failure::msg(
                    EXIT_INPUT,
                    "two_way",
                    "query needs a \"two_way\" section unless exactly two parameters are free",
                ));
            }
            default_tw = TwoWayFile {
                pair: [sys.vars.name(free[0]).into(), sys.vars.name(free[1]).into()],
                fixed: BTreeMap::new(),
                bbox: None,
            };
            &default_tw
        }
    };
    let lookup = |n: &str| {
        sys.vars
            .lookup(n)
            .ok_or_else(|| Failure::msg(EXIT_INPUT, "two_way", format!("'{n}' is not a free parameter")))
    };
    let u = lookup(&tw.pair[0])?;
    let v = lookup(&tw.pair[1])?;
    let mut fixed = BTreeMap::new();
    for (k, val) in &tw.fixed {
        fixed.insert(lookup(k)?, dto::rational(val, &format!("query.two_way.fixed.{k}")).map_err(Failure::input)?);
    }
    let geo = classify_two_way(sys, u, v, &fixed).map_err(Failure::markov)?;
    notes.push(format!("geometry: {}", geo.class.label()));
    let [ub, vb] = pair_box(sys, tw, u, v)?;
    let (un, vn) = (sys.vars.name(u), sys.vars.name(v));
    let mut out = String::new();
    match cfg.emit {
        Emit::BoundaryCsv => {
            let b = boundary_curve(&geo, &sys.vars, (&ub.0, &ub.1), cfg.boundary_samples).map_err(Failure::markov)?;
            notes.push(format!("boundary: {}", b.closed_form));
            for s in &b.skipped {
                notes.push(format!("boundary: skipped abscissa {}", format_rational(s)));
            }
            out.push_str(&format!("{un},{vn}"));
            if cfg.floats {
                out.push_str(&format!(",{un}_float,{vn}_float"));
            }
            out.push('\n');
            for (a, c) in &b.points {
                out.push_str(&format!("{},{}", format_rational(a), format_rational(c)));
                if cfg.floats {
                    out.push_str(&format!(",{},{}", sig12(a), sig12(c)));
                }
                out.push('\n');
            }
        }
        _ => {
            let rows = grid_compare(sys, &geo, (&ub.0, &ub.1), (&vb.0, &vb.1), cfg.grid_n).map_err(Failure::markov)?;
            out.push_str(&format!("{un},{vn}"));
            if cfg.floats {
                out.push_str(&format!(",{un}_float,{vn}_float"));
            }
            out.push_str(",satisfied,on_boundary\n");
            let sat = rows.iter().filter(|r| r.satisfied).count();
            for r in &rows {
                out.push_str(&format!("{},{}", format_rational(&r.u), format_rational(&r.v)));
                if cfg.floats {
                    out.push_str(&format!(",{},{}", sig12(&r.u), sig12(&r.v)));
                }
                out.push_str(&format!(",{},{}\n", r.satisfied, r.on_boundary));
            }
            notes.push(format!("grid: {sat} satisfied, {} violated", rows.len() - sat));
        }
    }
    Ok(out)
}

struct Decomposed {
    tree: CadTree,
    formula: SignedFormula,
    vars: Vars,
}

fn emit_report(report: &ExtensibilityReport, vars: &Vars, format: Format) -> String {
    match format {
        Format::Text => dto::report_text(report, vars),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&dto::report_json(report, vars)).expect("serializable");
            s.push('\n');
            s
        }
    }
}

fn pipeline(inputs: &Inputs, cfg: &RunConfig, notes: &mut Vec<String>) -> Result<String, Failure> {
    let loaded = load(inputs, cfg)?;
    notes.extend(loaded.notes);
    let mut sys = loaded.system;
    if let Some(o) = &cfg.order {
        if !cfg.fallback_general {
            sys = reorder(&sys, o)?;
        }
    }
    if matches!(cfg.emit, Emit::BoundaryCsv | Emit::GridCsv) {
        return two_way(&sys, loaded.two_way.as_ref(), cfg, notes);
    }
    let check = CheckOptions {
        seed: cfg.seed,
        parallel: cfg.parallel,
        ..CheckOptions::default()
    };
    let report = check_simplex_extensible(&sys, &check).map_err(Failure::simplex)?;
    if report.probabilistic {
        notes.push("extensibility certified by sampling only".into());
    }
    if cfg.emit == Emit::Report {
        let out = emit_report(&report, &sys.vars, cfg.format);
        if report.extensible {
            return Ok(out);
        }
        let mut f = Failure::msg(EXIT_NOT_EXTENSIBLE, "not_extensible", "system is not simplex-extensible");
        f.stdout = out;
        return Err(f);
    }
    let d = if report.extensible {
        let opts = SpecializedOptions {
            check,
            max_cells: Some(cfg.max_cells),
            parallel: cfg.parallel,
        };
        let s = specialized_cad(&sys, &opts).map_err(Failure::simplex)?;
        Decomposed {
            tree: s.tree,
            formula: s.formula,
            vars: sys.vars.clone(),
        }
    } else if cfg.fallback_general {
        notes.push("not simplex-extensible: using the general CAD".into());
        let order = match &cfg.order {
            Some(names) => names
                .iter()
                .map(|n| {
                    sys.vars
                        .lookup(n)
                        .ok_or_else(|| Failure::msg(EXIT_INPUT, "order", format!("unknown variable '{n}'")))
                })
                .collect::<Result<Vec<_>, _>>()?,
            None => sys.default_order(),
        };
        let opts = CadOptions {
            max_cells: Some(cfg.max_cells),
            parallel: cfg.parallel,
            ..CadOptions::default()
        };
        let cad = decision_cad(&sys.to_poly_system(), &order, &opts).map_err(Failure::cad)?;
        let formula = solution_formula(&cad);
        let mut tree = cad.tree;
        tree.prune_false();
        Decomposed {
            tree,
            formula,
            vars: sys.vars.clone(),
        }
    } else {
        let mut f = Failure::msg(EXIT_NOT_EXTENSIBLE, "not_extensible", "system is not simplex-extensible");
        f.stdout = emit_report(&report, &sys.vars, cfg.format);
        return Err(f);
    };
    let out = match (cfg.emit, cfg.format) {
        (Emit::Tree, Format::Text) => render_tree(&d.tree, RenderOptions::default()),
        (Emit::Tree, Format::Json) => {
            let mut s = serde_json::to_string_pretty(&dto::tree_json(&d.tree)).expect("serializable");
            s.push('\n');
            s
        }
        (_, Format::Text) => {
            let mut s = d.formula.render(&d.vars);
            s.push('\n');
            s
        }
        (_, Format::Json) => {
            let mut s = serde_json::to_string_pretty(&dto::formula_json(&d.formula, &d.vars)).expect("serializable");
            s.push('\n');
            s
        }
    };
    if d.tree.leaf_count() == 0 {
        let mut f = Failure::msg(EXIT_INFEASIBLE, "infeasible", "no cell satisfies the system");
        f.stdout = out;
        return Err(f);
    }
    Ok(out)
}

/// Runs the whole pipeline on in-memory documents.
pub fn run(inputs: &Inputs, cfg: &RunConfig) -> Outcome {
    let mut notes = Vec::new();
    let result = pipeline(inputs, cfg, &mut notes);
    let mut stderr = String::new();
    if cfg.verbose {
        for n in &notes {
            stderr.push_str(&format!("note: {n}\n"));
        }
    }
    match result {
        Ok(stdout) => Outcome {
            code: EXIT_OK,
            stdout,
            stderr,
        },
        Err(f) => {
            stderr.push_str(&serde_json::to_string(&ErrorDoc { error: f.body }).expect("serializable"));
            stderr.push('\n');
            Outcome {
                code: f.code,
                stdout: f.stdout,
                stderr,
            }
        }
    }
}

/// Accepts `N` or `NxM`.
pub fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("bad grid size '{s}': {e}"));
    let (a, b) = match s.split_once(['x', 'X']) {
        Some((a, b)) => (parse(a)?, parse(b)?),
        None => {
            let n = parse(s)?;
            (n, n)
        }
    };
    if a < 2 || b < 2 {
        return Err("grid needs at least 2 points per axis".into());
    }
    Ok((a, b))
}

