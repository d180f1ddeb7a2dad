use clap::{Parser, ValueEnum};
use markovcad::app::{self, Emit, Format, Inputs, RunConfig};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum EmitArg {
    Tree,
    Formula,
    BoundaryCsv,
    GridCsv,
    Report,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SignArg {
    #[value(name = "pos", alias = "positive")]
    Positive,
    #[value(name = "neg", alias = "negative")]
    Negative,
}

/// Exact cylindrical decomposition of Markov reward parameter spaces.
#[derive(Debug, Parser)]
#[command(name = "markovcad", version)]
struct Cli {
    /// Model JSON file.
    #[arg(long)]
    model: Option<PathBuf>,
    /// Second model for comparison metrics.
    #[arg(long)]
    model_b: Option<PathBuf>,
    /// Query JSON file.
    #[arg(long)]
    query: Option<PathBuf>,
    /// Polynomial system JSON file, instead of models and a query.
    #[arg(long, conflicts_with_all = ["model", "model_b", "query"])]
    system: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "tree")]
    emit: EmitArg,
    #[arg(long, value_enum, default_value = "text")]
    format: FormatArg,
    /// Grid size for grid-csv: `N` or `NxM`.
    #[arg(long, default_value = "5", value_parser = app::parse_grid)]
    grid_n: (usize, usize),
    /// Number of abscissae for boundary-csv.
    #[arg(long, default_value_t = 20)]
    boundary_samples: usize,
    /// Comma-separated variable order.
    #[arg(long, value_delimiter = ',')]
    order: Option<Vec<String>>,
    /// Impose the increasing-failure-rate constraints.
    #[arg(long)]
    ifr: bool,
    /// Sign of the benefit difference for ICER queries.
    #[arg(long, value_enum)]
    icer_benefit_sign: Option<SignArg>,
    /// Lift cells in parallel. Output is identical to the serial run.
    #[arg(long)]
    parallel: bool,
    /// Seed for the sampling fallback of the extensibility check.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Print notes to stderr.
    #[arg(long)]
    verbose: bool,
    /// Add floating-point columns to CSV output.
    #[arg(long)]
    floats: bool,
    /// Use the general CAD when the system is not simplex-extensible.
    #[arg(long)]
    fallback_general: bool,
}

fn read(path: &Option<PathBuf>) -> Result<Option<String>, (String, std::io::Error)> {
    match path {
        None => Ok(None),
        Some(p) => std::fs::read_to_string(p).map(Some).map_err(|e| (p.display().to_string(), e)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let loaded = (|| {
        Ok::<_, (String, std::io::Error)>(Inputs {
            model: read(&cli.model)?,
            model_b: read(&cli.model_b)?,
            query: read(&cli.query)?,
            system: read(&cli.system)?,
        })
    })();
    let inputs = match loaded {
        Ok(i) => i,
        Err((path, e)) => {
            let doc = serde_json::json!({
                "error": {"kind": "io", "code": app::EXIT_INPUT, "message": e.to_string(), "location": path}
            });
            eprintln!("{doc}");
            return ExitCode::from(app::EXIT_INPUT as u8);
        }
    };
    let max_cells = std::env::var("MARKOVCAD_MAX_CELLS")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(RunConfig::default().max_cells);
    let cfg = RunConfig {
        emit: match cli.emit {
            EmitArg::Tree => Emit::Tree,
            EmitArg::Formula => Emit::Formula,
            EmitArg::BoundaryCsv => Emit::BoundaryCsv,
            EmitArg::GridCsv => Emit::GridCsv,
            EmitArg::Report => Emit::Report,
        },
        format: match cli.format {
            FormatArg::Text => Format::Text,
            FormatArg::Json => Format::Json,
        },
        grid_n: cli.grid_n,
        boundary_samples: cli.boundary_samples,
        order: cli.order,
        ifr: cli.ifr,
        icer_benefit_sign: cli.icer_benefit_sign.map(|s| matches!(s, SignArg::Positive)),
        parallel: cli.parallel,
        seed: cli.seed,
        verbose: cli.verbose,
        floats: cli.floats,
        fallback_general: cli.fallback_general,
        max_cells,
    };
    let out = app::run(&inputs, &cfg);
    let _ = std::io::stdout().write_all(out.stdout.as_bytes());
    let _ = std::io::stderr().write_all(out.stderr.as_bytes());
    ExitCode::from(out.code as u8)
}
