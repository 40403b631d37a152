//! Command-line front end.
//!
//! CSV columns per command:
//!
//! * `quad`: `index,node,weight`
//! * `decay`: `field,n_radial,n_lat,parity,lambda_num,lambda_true,e_lambda,e_wavenumber,e_field,floored`
//! * `dynamo-critical`: `model,n_radial,n_lat,parity,c_omega,c_alpha_crit,omega,growth_rate_residual`
//! * `dynamo-snapshot`: `phase,x,theta,B,A`
//!
//! JSON documents carry `schema_version` and `kind` at the top level.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::assembly::FieldKind;
use crate::basis::Parity;
use crate::error::{Error, Result};
use crate::model::DynamoModel;
use crate::problems::{
    DECAY_N_LAT, DEFAULT_BRACKET, SCHEMA_VERSION, SnapshotGrid, convergence_table, critical_snapshots,
    find_critical_calpha,
};
use crate::quadrature::gauss_legendre;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "galerkin-dynamo", version, about = "Spectral-Galerkin dynamo eigenproblems and benchmarks")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,

    #[arg(long, value_enum, default_value = "csv", global = true)]
    pub format: OutputFormat,

    /// Write to this file instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Gauss-Legendre nodes and weights.
    Quad {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = -1.0, allow_negative_numbers = true)]
        a: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        b: f64,
    },
    /// Free-decay convergence rows against the analytic degree-1 mode.
    Decay {
        #[arg(long, value_parser = parse_field)]
        field: FieldKind,
        /// Radial resolution: a number, a comma list, or an inclusive range `3..8`.
        #[arg(long, value_parser = parse_sizes, default_value = "5")]
        nr: SizeList,
        #[arg(long, default_value_t = DECAY_N_LAT)]
        ntheta: usize,
        #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..=1))]
        parity: u8,
        /// Worker threads for multi-row sweeps.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Critical C_alpha and cycle frequency of a dynamo model.
    DynamoCritical(DynamoArgs),
    /// Marginal mode at criticality over half a cycle.
    DynamoSnapshot {
        #[command(flatten)]
        dynamo: DynamoArgs,
        #[arg(long, default_value_t = 64)]
        grid_nx: usize,
        #[arg(long, default_value_t = 128)]
        grid_ntheta: usize,
    },
}

#[derive(Debug, Args)]
pub struct DynamoArgs {
    /// Model file, name in $DYNAMO_MODEL_DIR, or built-in name (`model_b`).
    #[arg(long)]
    pub model: String,
    #[arg(long)]
    pub nr: usize,
    #[arg(long)]
    pub ntheta: usize,
    #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..=1))]
    pub parity: u8,
    #[arg(long, default_value_t = DEFAULT_BRACKET.0)]
    pub lo: f64,
    #[arg(long, default_value_t = DEFAULT_BRACKET.1)]
    pub hi: f64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SizeList(pub Vec<usize>);

fn parse_field(s: &str) -> std::result::Result<FieldKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_sizes(s: &str) -> std::result::Result<SizeList, String> {
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("`{t}` is not a resolution"));
    let sizes = if let Some((a, b)) = s.split_once("..") {
        let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
        if a > b {
            return Err(format!("empty range {s}"));
        }
        (a..=b).collect()
    } else {
        s.split(',').map(num).collect::<std::result::Result<Vec<_>, _>>()?
    };
    Ok(SizeList(sizes))
}

fn parity(index: u8) -> Parity {
    Parity::from_index(index).expect("clap restricts parity to 0 or 1")
}

#[derive(Serialize)]
struct QuadRow {
    index: usize,
    node: f64,
    weight: f64,
}

#[derive(Serialize)]
struct DecayRow {
    field: FieldKind,
    n_radial: usize,
    n_lat: usize,
    parity: u8,
    lambda_num: f64,
    lambda_true: f64,
    e_lambda: f64,
    e_wavenumber: f64,
    e_field: f64,
    floored: bool,
}

#[derive(Serialize)]
struct CriticalRow<'a> {
    model: &'a str,
    n_radial: usize,
    n_lat: usize,
    parity: u8,
    c_omega: f64,
    c_alpha_crit: f64,
    omega: f64,
    growth_rate_residual: f64,
}

#[derive(Serialize)]
struct SnapshotRow {
    phase: f64,
    x: f64,
    theta: f64,
    #[serde(rename = "B")]
    b: f64,
    #[serde(rename = "A")]
    a: f64,
}

#[derive(Serialize)]
struct Document<'a, T: Serialize> {
    schema_version: u32,
    kind: &'a str,
    #[serde(flatten)]
    body: T,
}

fn csv_bytes<T: Serialize>(rows: impl IntoIterator<Item = T>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(|e| Error::InvalidInput(format!("csv: {e}")))?;
    }
    w.into_inner().map_err(|e| Error::InvalidInput(format!("csv: {e}")))
}

fn json_bytes<T: Serialize>(kind: &str, body: T) -> Result<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(&Document {
        schema_version: SCHEMA_VERSION,
        kind,
        body,
    })
    .map_err(|e| Error::InvalidInput(format!("json: {e}")))?;
    out.push(b'\n');
    Ok(out)
}

/// Executes `config` and returns the rendered output.
pub fn render(config: &RunConfig) -> Result<Vec<u8>> {
    let fmt = config.format;
    match &config.command {
        Command::Quad { n, a, b } => {
            let rule = gauss_legendre(*n, *a, *b)?;
            match fmt {
                OutputFormat::Csv => csv_bytes(rule.nodes().iter().zip(rule.weights()).enumerate().map(
                    |(index, (&node, &weight))| QuadRow { index, node, weight },
                )),
                OutputFormat::Json => json_bytes("quadrature", &rule),
            }
        }
        Command::Decay {
            field,
            nr,
            ntheta,
            parity: p,
            jobs,
        } => {
            if nr.0.is_empty() {
                return Err(Error::InvalidInput("no radial resolution given".into()));
            }
            let rows = convergence_table(*field, nr.0.iter().copied(), *ntheta, parity(*p), *jobs)?;
            match fmt {
                OutputFormat::Csv => csv_bytes(rows.iter().map(|r| DecayRow {
                    field: r.field_kind,
                    n_radial: r.n_radial,
                    n_lat: r.n_lat,
                    parity: *p,
                    lambda_num: r.lambda_num,
                    lambda_true: r.lambda_true,
                    e_lambda: r.e_lambda,
                    e_wavenumber: r.e_wavenumber,
                    e_field: r.e_field,
                    floored: r.floored,
                })),
                OutputFormat::Json => {
                    #[derive(Serialize)]
                    struct Body<'a> {
                        parity: u8,
                        rows: &'a [crate::problems::DecayResult],
                    }
                    json_bytes("decay", Body { parity: *p, rows: &rows })
                }
            }
        }
        Command::DynamoCritical(args) => {
            let model = DynamoModel::load(&args.model)?;
            let c = find_critical_calpha(&model, args.nr, args.ntheta, (args.lo, args.hi), parity(args.parity))?;
            let row = CriticalRow {
                model: &model.name,
                n_radial: c.n_radial,
                n_lat: c.n_lat,
                parity: args.parity,
                c_omega: model.c_omega,
                c_alpha_crit: c.c_alpha_crit,
                omega: c.omega,
                growth_rate_residual: c.growth_rate_residual,
            };
            match fmt {
                OutputFormat::Csv => csv_bytes([row]),
                OutputFormat::Json => json_bytes("dynamo-critical", row),
            }
        }
        Command::DynamoSnapshot {
            dynamo,
            grid_nx,
            grid_ntheta,
        } => {
            let model = DynamoModel::load(&dynamo.model)?;
            let grid = SnapshotGrid {
                n_x: *grid_nx,
                n_theta: *grid_ntheta,
            };
            if grid.n_x < 2 || grid.n_theta < 2 {
                return Err(Error::InvalidInput("snapshot grids need at least 2 points per axis".into()));
            }
            let set = critical_snapshots(
                &model,
                dynamo.nr,
                dynamo.ntheta,
                (dynamo.lo, dynamo.hi),
                parity(dynamo.parity),
                grid,
            )?;
            match fmt {
                OutputFormat::Csv => csv_bytes(set.snapshots.iter().flat_map(|s| {
                    s.grid_x.iter().enumerate().flat_map(move |(i, &x)| {
                        s.grid_theta.iter().enumerate().map(move |(j, &theta)| SnapshotRow {
                            phase: s.phase,
                            x,
                            theta,
                            b: s.b[i][j],
                            a: s.a[i][j],
                        })
                    })
                })),
                OutputFormat::Json => json_bytes("dynamo-snapshot", &set),
            }
        }
    }
}

/// Runs `config`, writing to `--output` or `stdout`.
pub fn run(config: &RunConfig, stdout: &mut dyn Write) -> Result<()> {
    let bytes = render(config)?;
    match &config.output {
        Some(path) => std::fs::write(path, &bytes).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        }),
        None => stdout.write_all(&bytes).map_err(|source| Error::Io {
            path: "<stdout>".into(),
            source,
        }),
    }
}

/// Entry point used by the binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if !e.use_stderr() {
                // --help and --version
                print!("{e}");
                return 0;
            }
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("invalid arguments");
            eprintln!("error: {}", first.trim_start_matches("error: "));
            return 2;
        }
    };
    match run(&config, &mut std::io::stdout().lock()) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.to_string().replace('\n', " "));
            1
        }
    }
}
