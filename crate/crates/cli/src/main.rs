//! `ncmckay`: runs the verification suites, tabulates dimensions and prints
//! the distinguished endomorphisms, all as JSON.
//!
//! Exit status: 0 success, 1 a check failed, 2 bad usage, 3 I/O error,
//! 4 the computation itself failed (e.g. a linear system over the size cap).

mod config;
mod json;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ncmckay_core::endo::{self, EndoElement};
use ncmckay_core::scheme;
use ncmckay_core::suite::{self, Suite, SuiteParams};
use rayon::prelude::*;
use serde_json::{json, Value};

use config::{FileConfig, Overrides, Settings, MAX_UNKNOWNS_VAR};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("I/O error: {0}")]
    Io(String),
    #[error("computation failed: {0}")]
    Math(#[from] ncmckay_core::Error),
    #[error("{0}")]
    ChecksFailed(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::ChecksFailed(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
            CliError::Math(_) => 4,
        }
    }
}

#[derive(Parser)]
#[command(name = "ncmckay", version, about = "Exact verification of the deformed McKay correspondence for A_n")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite; exits 0 iff every check passes.
    Verify {
        #[arg(value_parser = ["scheme", "sheaves", "tilting", "cbh", "iso", "all"])]
        suite: String,
        #[command(flatten)]
        common: Common,
    },
    /// Write a dimension table.
    Dims {
        kind: DimsKind,
        /// Source summand `R(-D_src)` (hom, ext1).
        #[arg(long, default_value_t = 0)]
        src: usize,
        /// Target summand `R(-D_tgt)` (hom, ext1).
        #[arg(long, default_value_t = 0)]
        tgt: usize,
        /// Block row (s-block).
        #[arg(long, default_value_t = 0)]
        i: i64,
        /// Block column (s-block).
        #[arg(long, default_value_t = 0)]
        j: i64,
        /// Also list a basis of each Hom slice (hom).
        #[arg(long)]
        basis: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Print a distinguished endomorphism of the tilting bundle.
    Show {
        element: Element,
        /// Vertex index (alpha, beta, e, x, y, z).
        #[arg(long, default_value_t = 0)]
        i: usize,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum DimsKind {
    Hom,
    Ext1,
    SBlock,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Element {
    U,
    V,
    G,
    Alpha,
    Beta,
    E,
    X,
    Y,
    Z,
}

#[derive(Args, Clone, Debug, Default)]
struct Common {
    #[arg(long)]
    n: Option<usize>,
    /// Bound on `l + m` for chart monomials `x^l y^m`.
    #[arg(long)]
    deg_xy: Option<u32>,
    /// Bound on the parameter degree.
    #[arg(long)]
    deg_t: Option<u32>,
    /// Degree bound for random elements and graded slices; for `dims hom`
    /// and `dims ext1` also the default of both truncation bounds.
    #[arg(long)]
    deg: Option<u32>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// TOML file with the same keys as the flags (`deg_xy`, `max_n`, …).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write the JSON here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn settings(&self, deg_sets_bounds: bool) -> Result<Settings, CliError> {
        let file = match &self.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };
        let mut flags = Overrides {
            n: self.n,
            deg_xy: self.deg_xy,
            deg_t: self.deg_t,
            deg: self.deg,
            samples: self.samples,
            seed: self.seed,
        };
        if deg_sets_bounds {
            flags.deg_xy = flags.deg_xy.or(self.deg);
            flags.deg_t = flags.deg_t.or(self.deg);
        }
        let env = std::env::var(MAX_UNKNOWNS_VAR).ok();
        config::resolve(&file, &flags, env.as_deref())
    }
}

fn emit(v: &Value, out: Option<&Path>) -> Result<(), CliError> {
    let text = json::render(v);
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| CliError::Io(e.to_string())),
    }
}

fn check_index(what: &str, i: usize, n: usize) -> Result<(), CliError> {
    if i > n {
        return Err(CliError::Usage(format!("{what} = {i} is out of range 0..={n}")));
    }
    Ok(())
}

fn verify(suite_name: &str, common: &Common) -> Result<(), CliError> {
    let s = common.settings(false)?;
    let suites = Suite::parse(suite_name).ok_or_else(|| CliError::Usage(format!("unknown suite {suite_name}")))?;
    let params = SuiteParams { n: s.n, bounds: s.bounds, degree: s.deg, samples: s.samples, seed: s.seed };
    let checks = suite::checks_for(&suites);
    // par_iter keeps input order, which is sorted by suite and name
    let reports: Vec<_> = checks.par_iter().map(|c| c.run(&params)).collect();
    for r in &reports {
        eprintln!("{} {}/{}: {} [{}]", if r.passed { "PASS" } else { "FAIL" }, r.suite, r.name, r.claim, r.detail);
    }
    let names: Vec<&str> = suites.iter().map(|s| s.name()).collect();
    emit(&json::verify_report(&s, &names, &reports), common.out.as_deref())?;
    match reports.iter().find(|r| !r.passed) {
        Some(r) => Err(CliError::ChecksFailed(format!("{}/{} failed: {}", r.suite, r.name, r.detail))),
        None => Ok(()),
    }
}

fn dims(kind: DimsKind, src: usize, tgt: usize, i: i64, j: i64, basis: bool, common: &Common) -> Result<(), CliError> {
    let s = common.settings(!matches!(kind, DimsKind::SBlock))?;
    let n = s.n;
    let v = match kind {
        DimsKind::Hom | DimsKind::Ext1 => {
            check_index("src", src, n)?;
            check_index("tgt", tgt, n)?;
            let (sd, td) = (endo::summand(n, src), endo::summand(n, tgt));
            let (slices, total) = if let DimsKind::Hom = kind {
                let mut rows = Vec::new();
                let mut total = 0;
                for (b, dim) in scheme::hom_dims(&sd, &td, &s.bounds)? {
                    let mut row = json::hom_slice(b, dim);
                    if basis {
                        let homs = scheme::hom_basis_slice(&sd, &td, b, &s.bounds)?;
                        row["basis"] = Value::Array(homs.iter().map(json::sheaf_hom).collect());
                    }
                    total += dim;
                    rows.push(row);
                }
                (rows, total)
            } else {
                let reports = scheme::cech_h1_dims(&sd, &td, &s.bounds)?;
                let total = reports.iter().map(|r| r.h1_dim).sum();
                (reports.iter().map(json::ext1_slice).collect(), total)
            };
            json!({
                "bounds": json::bounds(&s.bounds),
                "kind": if let DimsKind::Hom = kind { "hom" } else { "ext1" },
                "n": n,
                "slices": slices,
                "source_d": json::divisor(&sd),
                "target_d": json::divisor(&td),
                "total": total,
            })
        }
        DimsKind::SBlock => {
            let rows: Vec<Value> = (0..=s.deg).map(|d| json!({ "degree": d, "dim": ncmckay_core::cbh::s_graded_dim(n, i, j, d) })).collect();
            json!({ "block": [i, j], "kind": "s-block", "max_degree": s.deg, "n": n, "slices": rows })
        }
    };
    emit(&v, common.out.as_deref())
}

fn show(element: Element, i: usize, common: &Common) -> Result<(), CliError> {
    let n = common.settings(false)?.n;
    check_index("i", i, n)?;
    let a: EndoElement = match element {
        Element::U => endo::make_u(n),
        Element::V => endo::make_v(n),
        Element::G => endo::make_g(n),
        Element::Alpha => endo::make_alpha(n, i)?,
        Element::Beta => endo::make_beta(n, i)?,
        Element::E => endo::make_idempotent(n, i)?,
        Element::X => endo::make_xyz(n, i)?.0,
        Element::Y => endo::make_xyz(n, i)?.1,
        Element::Z => endo::make_xyz(n, i)?.2,
    };
    let mut v = json::endo(&a);
    v["glues"] = Value::Bool(a.glue_check());
    v["summands"] = Value::Array((0..=n).map(|k| json::divisor(&endo::summand(n, k))).collect());
    emit(&v, common.out.as_deref())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Verify { suite, common } => verify(&suite, &common),
        Command::Dims { kind, src, tgt, i, j, basis, common } => dims(kind, src, tgt, i, j, basis, &common),
        Command::Show { element, i, common } => show(element, i, &common),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ncmckay: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
