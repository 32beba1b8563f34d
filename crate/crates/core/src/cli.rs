//! Command-line front end. Every verb prints a JSON certificate (or a CSV
//! table for `family --format csv`).
//!
//! Exit status: 0 on success, 1 on a negative verdict (the certificate is
//! still written), 2 on input errors.

use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::analysis::{
    brute_force_monotone, equivalence_classes, family_diagnose, is_cyclically_monotone, sup_walk, FamilySpec, Sampling,
    WalkBound, DEFAULT_DIVERGENCE_THRESHOLD,
};
use crate::costs::{CostSpec, Point};
use crate::decomposition::{decompose, verify_decomposition, WeightedDag};
use crate::error::Error;
use crate::instance::{Coords, Instance, InstanceDoc};
use crate::numerics::XReal;
use crate::potential::{c_transform, c_transform_dual, rockafellar_construct, solve_potential, verify_subgradient};

/// Largest instance `check --brute` enumerates.
const BRUTE_CHECK_LIMIT: usize = 6;

#[derive(Debug, Parser)]
#[command(
    name = "otpb",
    version,
    about = "Cyclic monotonicity, path-boundedness and potentials for finite couplings"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Write the result here instead of standard output.
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,

    /// Positive-cycle tolerance; overrides the input document.
    #[arg(long, global = true, env = "OTPB_TOLERANCE")]
    pub tolerance: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide cyclic monotonicity.
    Check {
        input: PathBuf,
        /// Cross-check by enumerating permutations (at most 6 pairs).
        #[arg(long)]
        brute: bool,
    },
    /// Solve for a potential and audit it on the subgradient.
    Potential {
        input: PathBuf,
        /// Also run the classical chain construction (finite costs only).
        #[arg(long)]
        classical: bool,
        /// Base pair of the classical construction.
        #[arg(long, default_value_t = 0)]
        base: usize,
    },
    /// Supremum of alpha-sums over walks between two pairs.
    Bound {
        input: PathBuf,
        #[arg(long)]
        from: usize,
        #[arg(long)]
        to: usize,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
        min_edges: u8,
    },
    /// Mutual-reachability classes with walk-bound certificates.
    Classes { input: PathBuf },
    /// Grid-restricted c-transform of the values in a transform document.
    Transform { input: PathBuf },
    /// Path decomposition of a weighted DAG, with verification.
    Decompose { input: PathBuf },
    /// Walk-bound growth over refinements of a built-in family.
    Family {
        #[arg(long)]
        name: String,
        /// Comma-separated resolutions.
        #[arg(long, value_delimiter = ',', required = true)]
        resolutions: Vec<usize>,
        #[arg(long, value_enum, default_value_t = SamplingArg::Uniform)]
        sampling: SamplingArg,
        #[arg(long, default_value_t = DEFAULT_DIVERGENCE_THRESHOLD)]
        threshold: f64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SamplingArg {
    Uniform,
    Decimal,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Input of the `transform` verb. With `dual` the grid holds y points and
/// the values are transformed into functions of x.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TransformDoc {
    cost: CostSpec,
    grid: Vec<Coords>,
    values: Vec<XReal>,
    eval_at: Vec<Coords>,
    #[serde(default)]
    dual: bool,
}

enum Verdict {
    Positive,
    Negative,
}

struct Failure(String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(e.to_string())
    }
}

fn read_input(path: &PathBuf) -> Result<String, Failure> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure(format!("reading standard input: {e}")))?;
        return Ok(s);
    }
    fs::read_to_string(path).map_err(|e| Failure(format!("reading {}: {e}", path.display())))
}

fn parse<T: for<'de> Deserialize<'de>>(path: &PathBuf) -> Result<T, Failure> {
    let text = read_input(path)?;
    serde_json::from_str(&text).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn load(path: &PathBuf, tolerance: Option<f64>) -> Result<Instance, Failure> {
    let doc: InstanceDoc = parse(path)?;
    let inst = Instance::from_doc(doc)?;
    Ok(match tolerance {
        Some(t) => inst.with_tolerance(t)?,
        None => inst,
    })
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("certificates serialize")
}

fn points(coords: Vec<Coords>) -> Result<Vec<Point>, Failure> {
    coords
        .into_iter()
        .map(|c| Point::new(c.into()).map_err(Failure::from))
        .collect()
}

fn csv_table(report: &crate::analysis::FamilyReport) -> String {
    let mut out = String::from("n,size,M,delta,monotone\n");
    for row in &report.rows {
        let delta = row.delta.map(|d| d.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            row.n, row.size, row.m, delta, row.monotone
        ));
    }
    out
}

fn execute(cli: &Cli) -> Result<(String, Verdict), Failure> {
    let tol = cli.tolerance;
    let (value, verdict) = match &cli.command {
        Command::Check { input, brute } => {
            let inst = load(input, tol)?;
            let verdict = is_cyclically_monotone(&inst);
            let mut out = to_value(&verdict);
            if *brute {
                let brute = brute_force_monotone(&inst, BRUTE_CHECK_LIMIT)?;
                if brute != verdict.monotone {
                    log::warn!("exhaustive check disagrees with the cycle search");
                }
                out["brute_force"] = json!(brute);
            }
            (
                out,
                if verdict.monotone {
                    Verdict::Positive
                } else {
                    Verdict::Negative
                },
            )
        }
        Command::Potential { input, classical, base } => {
            let inst = load(input, tol)?;
            let result = solve_potential(&inst);
            let mut out = to_value(&result);
            let mut verdict = Verdict::Negative;
            if result.is_feasible() {
                let report = verify_subgradient(&inst, &result, &[])?;
                if report.failures.is_empty() {
                    verdict = Verdict::Positive;
                }
                out["residuals"] = to_value(&report.residuals);
                out["failures"] = to_value(&report.failures);
            }
            if *classical {
                out["classical"] = match rockafellar_construct(&inst, *base) {
                    Ok(phi) => to_value(&crate::potential::PotentialResult::Feasible(phi))["phi"].clone(),
                    Err(e) => json!({ "error": e.to_string() }),
                };
            }
            (out, verdict)
        }
        Command::Bound {
            input,
            from,
            to,
            min_edges,
        } => {
            let inst = load(input, tol)?;
            let bound = sup_walk(&inst, *from, *to, *min_edges)?;
            let mut out = json!({ "from": from, "to": to, "min_edges": min_edges });
            match &bound {
                WalkBound::Value { value, walk } => {
                    out["bounded"] = json!(true);
                    out["value"] = to_value(value);
                    out["walk"] = to_value(walk);
                }
                WalkBound::Unbounded { positive_cycle } => {
                    out["bounded"] = json!(false);
                    out["positive_cycle"] = to_value(&positive_cycle.cycle);
                    out["cycle_sum"] = json!(positive_cycle.sum);
                }
            }
            let verdict = match bound {
                WalkBound::Value { .. } => Verdict::Positive,
                WalkBound::Unbounded { .. } => Verdict::Negative,
            };
            (out, verdict)
        }
        Command::Classes { input } => {
            let inst = load(input, tol)?;
            (to_value(&equivalence_classes(&inst)), Verdict::Positive)
        }
        Command::Transform { input } => {
            let doc: TransformDoc = parse(input)?;
            let grid = points(doc.grid)?;
            let eval_at = points(doc.eval_at)?;
            let values = if doc.dual {
                c_transform_dual(&grid, &doc.values, &doc.cost, &eval_at)?
            } else {
                c_transform(&grid, &doc.values, &doc.cost, &eval_at)?
            };
            (json!({ "values": values }), Verdict::Positive)
        }
        Command::Decompose { input } => {
            let graph: WeightedDag = parse(input)?;
            let dec = decompose(&graph)?;
            let report = verify_decomposition(&graph, &dec);
            let verdict = if report.passed {
                Verdict::Positive
            } else {
                Verdict::Negative
            };
            let mut out = to_value(&dec);
            out["verification"] = to_value(&report);
            (out, verdict)
        }
        Command::Family {
            name,
            resolutions,
            sampling,
            threshold,
            format,
        } => {
            let sampling = match sampling {
                SamplingArg::Uniform => Sampling::Uniform,
                SamplingArg::Decimal => Sampling::Decimal,
            };
            let mut spec = FamilySpec::new(name.clone()).sampling(sampling).threshold(*threshold);
            if let Some(t) = tol {
                spec = spec.tolerance(t);
            }
            let report = family_diagnose(&spec, resolutions)?;
            if let Format::Csv = format {
                return Ok((csv_table(&report), Verdict::Positive));
            }
            (to_value(&report), Verdict::Positive)
        }
    };
    let mut text = serde_json::to_string_pretty(&value).expect("certificates serialize");
    text.push('\n');
    Ok((text, verdict))
}

fn emit(cli: &Cli, text: &str) -> io::Result<()> {
    match &cli.output {
        Some(path) => fs::write(path, text),
        None => io::stdout().lock().write_all(text.as_bytes()),
    }
}

/// Runs one command and returns the process exit status.
pub fn run(cli: Cli) -> i32 {
    if let Some(t) = cli.tolerance {
        if !(t.is_finite() && t > 0.0) {
            eprintln!("error: tolerance must be positive and finite, got {t}");
            return 2;
        }
    }
    match execute(&cli) {
        Ok((text, verdict)) => {
            if let Err(e) = emit(&cli, &text) {
                eprintln!("error: writing output: {e}");
                return 2;
            }
            match verdict {
                Verdict::Positive => 0,
                Verdict::Negative => 1,
            }
        }
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            2
        }
    }
}
