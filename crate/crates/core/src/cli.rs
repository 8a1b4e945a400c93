//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage, 2 invalid input, 3 resource guard,
//! 4 at least one failed verdict.

use std::io::Write;
use std::path::Path;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::diagram::{build_diagram, parse_graph, KnotDiagram, SaddleSign};
use crate::error::{Error, Result};
use crate::fixtures;
use crate::normal::{fundamental_solutions, qmatching_matrix};
use crate::skein::{colored_jones, Convention};
use crate::states::{khovanov_homology, verify_main_theorem, VerificationReport, STATE_LIMIT};
use crate::triangulation::{build_inflated, export_gluing_table, face_name, validate_triangulation};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;
pub const EXIT_VERDICT: i32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Parser)]
#[command(name = "octanormal", version, about = "Octahedral triangulations, normal surfaces and colored Kauffman states")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    /// Color (number of cable strands).
    #[arg(long, global = true, default_value_t = 1)]
    pub n: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Coordinate bound for the fundamental-solution enumerator.
    #[arg(long, global = true, default_value_t = 2)]
    pub bound: i64,
    /// Largest number of states or solutions a job may visit.
    #[arg(long, global = true, default_value_t = STATE_LIMIT)]
    pub limit: usize,
    /// `verbatim` or `classical`.
    #[arg(long, global = true, default_value = "verbatim")]
    pub convention: String,
    /// `+` or `-`.
    #[arg(long = "saddle-sign", global = true, default_value = "+", allow_hyphen_values = true)]
    pub saddle_sign: String,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Gluing table of the inflated triangulation.
    Triangulate { input: String },
    /// Sparse Q-matching matrix.
    Qmatrix { input: String },
    /// Fundamental admissible solutions up to the coordinate bound.
    Enumerate { input: String },
    /// Slopes of the colored surface states.
    Slopes { input: String },
    /// Colored Jones polynomial.
    Jones { input: String },
    /// Khovanov homology (n = 1).
    Kh { input: String },
    /// Degree against slope for every colored surface state.
    Verify { input: String },
}

impl Command {
    fn input(&self) -> &str {
        match self {
            Command::Triangulate { input }
            | Command::Qmatrix { input }
            | Command::Enumerate { input }
            | Command::Slopes { input }
            | Command::Jones { input }
            | Command::Kh { input }
            | Command::Verify { input } => input,
        }
    }
}

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parameter(_) => EXIT_USAGE,
        Error::Parse(_) | Error::Validation(_) | Error::Construction(_) => EXIT_VALIDATION,
        Error::Resource(_) => EXIT_RESOURCE,
    }
}

/// Load a graph from a JSON file, or by bundled fixture name.
pub fn load_diagram(input: &str) -> Result<KnotDiagram> {
    let text = if Path::new(input).exists() {
        std::fs::read_to_string(input).map_err(|e| Error::Parse(format!("{input}: {e}")))?
    } else if let Some(f) = fixtures::by_name(input) {
        f.json.to_string()
    } else {
        return Err(Error::Parse(format!("{input}: no such file or fixture")));
    };
    build_diagram(&parse_graph(&text)?)
}

/// Parse `argv` (including the program name), run, write to `out`, return the exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cfg = match RunConfig::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{e}");
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cfg) {
        Ok((text, code)) => {
            let _ = out.write_all(text.as_bytes());
            code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn render<S: Serialize>(format: Format, value: &S, text: impl FnOnce() -> String) -> Result<String> {
    match format {
        Format::Json => serde_json::to_string_pretty(value).map(|s| s + "\n").map_err(|e| Error::Validation(e.to_string())),
        Format::Text => Ok(text()),
    }
}

/// Run a parsed configuration; returns the output text and exit code.
pub fn execute(cfg: &RunConfig) -> Result<(String, i32)> {
    if cfg.n == 0 {
        return Err(Error::Parameter("--n must be at least 1".into()));
    }
    if cfg.bound < 1 || cfg.limit == 0 {
        return Err(Error::Parameter("--bound and --limit must be positive".into()));
    }
    let conv = Convention::parse(&cfg.convention).map_err(|e| Error::Parameter(e.to_string()))?;
    let saddle = SaddleSign::parse(&cfg.saddle_sign).map_err(|e| Error::Parameter(e.to_string()))?;
    let d = load_diagram(cfg.command.input())?;
    let f = cfg.format;
    let text = match &cfg.command {
        Command::Triangulate { .. } => {
            let t = build_inflated(&d)?;
            let table = export_gluing_table(&t);
            let free: Vec<String> = t.free_faces().iter().map(|&(a, fc)| format!("{a}:{}", face_name(fc))).collect();
            let v = json!({
                "tetrahedra": t.tet_count(),
                "free_faces": free,
                "validation": validate_triangulation(&t),
                "gluing_table": table,
            });
            render(f, &v, || table.clone())?
        }
        Command::Qmatrix { .. } => {
            let sys = qmatching_matrix(&build_inflated(&d)?);
            let entries: Vec<(usize, usize, i64)> = sys
                .equation_rows()
                .into_iter()
                .flat_map(|e| sys.slopes[e].iter().map(move |(&c, &v)| (e, c, v)).collect::<Vec<_>>())
                .collect();
            let v = json!({ "rows": sys.slopes.len(), "cols": sys.columns, "equations": sys.equation_rows(), "entries": entries });
            render(f, &v, || sys.to_triplets())?
        }
        Command::Enumerate { .. } => {
            let sys = qmatching_matrix(&build_inflated(&d)?);
            let sols = fundamental_solutions(&sys, cfg.bound, cfg.limit)?;
            render(f, &sols, || sols.iter().map(|s| s.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ") + "\n").collect())?
        }
        Command::Slopes { .. } => {
            let report = verify_main_theorem(&d, cfg.n, saddle, cfg.limit)?;
            let rows: Vec<_> = report
                .records
                .iter()
                .map(|r| json!({ "k_vector": r.k_vector, "tau": r.tau, "tau_seifert": r.tau_seifert, "slope": r.slope, "surface": r.surface }))
                .collect();
            render(f, &rows, || {
                report
                    .records
                    .iter()
                    .map(|r| format!("{:?} tau={} tau0={} slope={} {}\n", r.k_vector, r.tau, r.tau_seifert, r.slope, r.surface))
                    .collect()
            })?
        }
        Command::Jones { .. } => {
            let p = colored_jones(&d, cfg.n, conv)?;
            let v = json!({ "n": cfg.n, "convention": cfg.convention, "polynomial": p.to_string(), "terms": p });
            render(f, &v, || format!("{p}\n"))?
        }
        Command::Kh { .. } => {
            let kh = khovanov_homology(&d)?;
            render(f, &kh, || {
                let mut s = String::new();
                for ((i, j), r) in &kh.graded {
                    s.push_str(&format!("i={i} j={j} rank={r}\n"));
                }
                for (k, t) in &kh.torsion {
                    s.push_str(&format!("torsion {k}: {t:?}\n"));
                }
                s.push_str(&format!("euler {}\n", kh.euler));
                s
            })?
        }
        Command::Verify { .. } => {
            let report = verify_main_theorem(&d, cfg.n, saddle, cfg.limit)?;
            let code = if report.all_verdicts() { EXIT_OK } else { EXIT_VERDICT };
            return Ok((render(f, &report.records, || verify_table(&report))?, code));
        }
    };
    Ok((text, EXIT_OK))
}

fn verify_table(r: &VerificationReport) -> String {
    let mut s = format!("n={} states={} surface_states={}\n", r.n, r.states_examined, r.records.len());
    for rec in &r.records {
        s.push_str(&format!(
            "{:?} h={} a={} tau={} slope={} verdict={} surface={} normal={}\n",
            rec.k_vector, rec.h, rec.a, rec.tau, rec.slope, rec.verdict, rec.surface, rec.normal
        ));
    }
    s
}
