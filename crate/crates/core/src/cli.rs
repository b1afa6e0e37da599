//! The `sparse-ekr` command line.
//!
//! Reports go to standard output (or `--out`), logs to standard error.
//! Exit status is 0 on success, 1 on invalid input or domain errors and 2
//! when a size guard or solver budget is exceeded.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::baranyai::baranyai_partition;
use crate::error::{Error, Result};
use crate::family::{build_family, family_stats, FamilySpec, GroundParams};
use crate::kneser::{extremal_subgraph, spectrum_cross_check, verify_ekr};
use crate::removal::{center_set_check, removal_check, RemovalConfig};
use crate::spectral::{decompose_affine, kneser_spectrum, residual_bound_check, spectral_chain};
use crate::threshold::{
    analytic_bounds, find_threshold, BoundInputs, Estimate, Simulator, ThresholdParams,
    DEFAULT_EPSILON,
};
use crate::SCHEMA_VERSION;

/// Seed used when `--seed` is not given.
pub const DEFAULT_SEED: u64 = 42;

/// Environment variable holding the default worker count.
pub const WORKERS_ENV: &str = "SPARSE_EKR_WORKERS";

/// Default removal constant `C`.
pub const DEFAULT_C: f64 = 2.0;

#[derive(Debug, Parser)]
#[command(
    name = "sparse-ekr",
    version,
    about = "Removal diagnostics and random Kneser subgraph experiments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Ground set size.
    #[arg(long)]
    pub n: u32,
    /// Set size.
    #[arg(long)]
    pub k: u32,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FamilyArgs {
    /// star:<i>, union:<i,j,..>, antistar:<i>, complement-of:<spec>,
    /// random:<m>:<seed>, file:<path>, full or empty.
    #[arg(long = "family")]
    pub family_spec: FamilySpec,
    /// Number of stars `ℓ`.
    #[arg(long, visible_alias = "l", default_value_t = 1)]
    pub ell: u32,
}

#[derive(Debug, Args)]
pub struct SimArgs {
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Worker threads; 0 uses every core. Does not affect results.
    #[arg(long, env = WORKERS_ENV, default_value_t = 0)]
    pub workers: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Size, disjoint pairs and the (α, β) statistics of a family.
    Stats {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        family: FamilyArgs,
    },
    /// Kneser eigenvalues, and the spectral split of a family if given.
    Spectrum {
        #[command(flatten)]
        common: Common,
        #[arg(long = "family")]
        family_spec: Option<FamilySpec>,
        #[arg(long, visible_alias = "l", default_value_t = 1)]
        ell: u32,
        /// Compare with a dense eigensolver (small graphs only).
        #[arg(long)]
        cross_check: bool,
    },
    /// Distance to the nearest union of stars against the removal bound.
    Removal {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, default_value_t = DEFAULT_C)]
        c_const: f64,
    },
    /// Exact independence number of K(n,k) and uniqueness of the stars.
    Ekr {
        #[command(flatten)]
        common: Common,
    },
    /// Partition of all k-sets into perfect matchings (k | n).
    Baranyai {
        #[command(flatten)]
        common: Common,
        /// Also build and check the union-of-cliques subgraph.
        #[arg(long)]
        extremal: bool,
    },
    /// Success frequency of the stars in K_p(n,k), one row per p.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Retention probabilities, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        p: Vec<f64>,
        #[command(flatten)]
        sim: SimArgs,
    },
    /// Bisection for the p at which the success frequency crosses 1/2.
    Threshold {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sim: SimArgs,
    },
    /// Analytic quantities of the threshold argument at p = ζ p_c.
    Bounds {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1.0 + DEFAULT_EPSILON)]
        zeta: f64,
        #[arg(long, default_value_t = DEFAULT_EPSILON)]
        epsilon: f64,
        #[arg(long, default_value_t = DEFAULT_C)]
        c_const: f64,
        #[arg(long, default_value_t = 1)]
        i: u64,
        #[arg(long, default_value_t = 1)]
        j: u64,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Stats { .. } => "stats",
            Command::Spectrum { .. } => "spectrum",
            Command::Removal { .. } => "removal",
            Command::Ekr { .. } => "ekr",
            Command::Baranyai { .. } => "baranyai",
            Command::Simulate { .. } => "simulate",
            Command::Threshold { .. } => "threshold",
            Command::Bounds { .. } => "bounds",
        }
    }

    fn common(&self) -> &Common {
        match self {
            Command::Stats { common, .. }
            | Command::Spectrum { common, .. }
            | Command::Removal { common, .. }
            | Command::Ekr { common }
            | Command::Baranyai { common, .. }
            | Command::Simulate { common, .. }
            | Command::Threshold { common, .. }
            | Command::Bounds { common, .. } => common,
        }
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

/// Report fields plus the schema version and command name.
fn envelope(command: &str, body: Value) -> Value {
    let mut map = Map::new();
    map.insert("schema_version".into(), json!(SCHEMA_VERSION));
    map.insert("command".into(), json!(command));
    match body {
        Value::Object(fields) => map.extend(fields),
        other => {
            map.insert("report".into(), other);
        }
    }
    Value::Object(map)
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

/// A single JSON object as a two-line CSV table.
fn object_csv(v: &Value) -> Result<String> {
    let obj = v.as_object().expect("reports are objects");
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(obj.keys()).map_err(csv_err)?;
    w.write_record(obj.values().map(csv_cell))
        .map_err(csv_err)?;
    finish_csv(w)
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(io::Error::other(e))
}

fn finish_csv(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Io(io::Error::other(e.to_string())))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn estimates_csv(header: &str, rows: &[Estimate]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "p",
        "trials",
        "successes",
        "fraction",
        "ci_lo",
        "ci_hi",
        "mean_X",
    ])
    .map_err(csv_err)?;
    for e in rows {
        w.write_record([
            e.p.to_string(),
            e.trials.to_string(),
            e.successes.to_string(),
            e.fraction.to_string(),
            e.ci_lo.to_string(),
            e.ci_hi.to_string(),
            e.mean_x.to_string(),
        ])
        .map_err(csv_err)?;
    }
    Ok(format!("{header}\n{}", finish_csv(w)?))
}

fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

/// Renders an ordinary report in the requested format.
fn render(format: Format, command: &str, body: Value) -> Result<String> {
    let v = envelope(command, body);
    match format {
        Format::Json => Ok(json_text(&v)),
        Format::Csv => object_csv(&v),
    }
}

/// Runs one parsed command and returns the report text.
pub fn execute(cli: &Cli) -> Result<String> {
    let cmd = &cli.command;
    let name = cmd.name();
    let common = cmd.common();
    let params = GroundParams::new(common.n, common.k)?;
    let json_default = common.format.unwrap_or(Format::Json);
    match cmd {
        Command::Stats { family, .. } => {
            let fam = build_family(params, &family.family_spec)?;
            let stats = family_stats(&fam, family.ell)?;
            let mut body = to_value(&stats);
            body["n"] = json!(params.n);
            body["k"] = json!(params.k);
            body["family"] = json!(family.family_spec.to_string());
            render(json_default, name, body)
        }
        Command::Spectrum {
            family_spec,
            ell,
            cross_check,
            ..
        } => {
            let mut body = json!({
                "n": params.n,
                "k": params.k,
                "eigenvalues": to_value(&kneser_spectrum(params)?),
            });
            if *cross_check {
                body["cross_check"] = to_value(&spectrum_cross_check(params)?);
            }
            if let Some(spec) = family_spec {
                let fam = build_family(params, spec)?;
                body["family"] = json!(spec.to_string());
                body["decomposition"] = to_value(&decompose_affine(&fam)?);
                body["chain"] = to_value(&spectral_chain(&fam)?);
                body["residual_bound"] = to_value(&residual_bound_check(&fam, *ell)?);
            }
            render(json_default, name, body)
        }
        Command::Removal {
            family, c_const, ..
        } => {
            let fam = build_family(params, &family.family_spec)?;
            let cfg = RemovalConfig::new(family.ell, *c_const)?;
            let mut body = to_value(&removal_check(&fam, cfg)?);
            body["center_set"] = to_value(&center_set_check(&fam, cfg)?);
            body["family"] = json!(family.family_spec.to_string());
            render(json_default, name, body)
        }
        Command::Ekr { .. } => render(json_default, name, to_value(&verify_ekr(params)?)),
        Command::Baranyai { extremal, .. } => {
            let part = baranyai_partition(params)?;
            part.validate()?;
            if common.format == Some(Format::Csv) {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(["class", "sets"]).map_err(csv_err)?;
                for (i, c) in part.classes().iter().enumerate() {
                    let sets: Vec<String> = c.iter().map(|s| s.to_string()).collect();
                    w.write_record([i.to_string(), sets.join("|")])
                        .map_err(csv_err)?;
                }
                return Ok(format!(
                    "# schema_version={SCHEMA_VERSION} n={} k={}\n{}",
                    params.n,
                    params.k,
                    finish_csv(w)?
                ));
            }
            let classes: Vec<String> = part
                .classes()
                .iter()
                .map(|c| {
                    c.iter()
                        .map(|s| s.to_string())
                        .collect::<Vec<_>>()
                        .join("|")
                })
                .collect();
            let mut body = json!({"n": params.n, "k": params.k, "classes": classes, "valid": true});
            if *extremal {
                let ex = extremal_subgraph(params)?;
                body["extremal"] = json!({
                    "alpha": ex.alpha,
                    "degree": ex.degree,
                    "edges": ex.edges,
                    "edge_lower_bound": ex.edge_lower_bound(),
                });
            }
            render(Format::Json, name, body)
        }
        Command::Simulate { p, sim, .. } => {
            log::info!("simulate seed={}", sim.seed);
            let simulator = Simulator::new(params)?;
            let mut rows = Vec::with_capacity(p.len());
            for &pv in p {
                let tp = ThresholdParams::new(params, pv, sim.trials, sim.seed)?;
                rows.push(simulator.estimate(&tp, sim.workers)?);
            }
            match common.format.unwrap_or(Format::Csv) {
                Format::Csv => {
                    let header = format!(
                        "# schema_version={SCHEMA_VERSION} command=simulate n={} k={} seed={}",
                        params.n, params.k, sim.seed
                    );
                    estimates_csv(&header, &rows)
                }
                Format::Json => render(
                    Format::Json,
                    name,
                    json!({"n": params.n, "k": params.k, "seed": sim.seed, "rows": to_value(&rows)}),
                ),
            }
        }
        Command::Threshold { sim, .. } => {
            log::info!("threshold seed={}", sim.seed);
            let r = find_threshold(params, sim.trials, sim.seed, sim.workers)?;
            match common.format.unwrap_or(Format::Json) {
                Format::Csv => {
                    let header = format!(
                        "# schema_version={SCHEMA_VERSION} command=threshold n={} k={} seed={} p_half={} p_c={} p_0={} iterations={}",
                        params.n, params.k, sim.seed, r.p_half, r.p_c, r.p_0, r.iterations
                    );
                    estimates_csv(&header, &r.evaluations)
                }
                Format::Json => {
                    let mut body = to_value(&r);
                    body["n"] = json!(params.n);
                    body["k"] = json!(params.k);
                    body["seed"] = json!(sim.seed);
                    body["trials"] = json!(sim.trials);
                    render(Format::Json, name, body)
                }
            }
        }
        Command::Bounds {
            zeta,
            epsilon,
            c_const,
            i,
            j,
            ..
        } => {
            let inputs = BoundInputs {
                zeta: *zeta,
                epsilon: *epsilon,
                c_const: *c_const,
                i: *i,
                j: *j,
            };
            render(
                json_default,
                name,
                to_value(&analytic_bounds(params, inputs)?),
            )
        }
    }
}

fn emit(cli: &Cli, text: &str) -> Result<()> {
    match &cli.command.common().out {
        Some(path) => File::create(path)?.write_all(text.as_bytes())?,
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}

/// Parses arguments, runs the command and returns the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli).and_then(|text| emit(&cli, &text)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_resource_limit() {
                2
            } else {
                1
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_json(args: &[&str]) -> Value {
        let cli =
            Cli::try_parse_from(std::iter::once("sparse-ekr").chain(args.iter().copied())).unwrap();
        serde_json::from_str(&execute(&cli).unwrap()).unwrap()
    }

    #[test]
    fn ekr_petersen() {
        let v = run_json(&["ekr", "--n", "5", "--k", "2"]);
        assert_eq!(v["alpha"], 4);
        assert_eq!(v["equals_ekr"], true);
        assert_eq!(v["only_stars"], true);
        assert_eq!(v["schema_version"], 1);
    }

    #[test]
    fn stats_antistar() {
        let v = run_json(&[
            "stats",
            "--n",
            "5",
            "--k",
            "2",
            "--family",
            "antistar:5",
            "--l",
            "1",
        ]);
        assert_eq!(v["size"], 6);
        assert_eq!(v["dp"], 3);
        assert_eq!(v["alpha"], -0.5);
        assert_eq!(v["beta"], 0.375);
    }

    #[test]
    fn bounds_payload() {
        let v = run_json(&["bounds", "--n", "12", "--k", "2", "--zeta", "1.0"]);
        assert!((v["p_c"].as_f64().unwrap() - 0.72137).abs() < 2e-5);
        assert_eq!(v["superstar_bound"], 1.0);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run(["sparse-ekr", "frobnicate"]), 1);
        assert_eq!(
            run([
                "sparse-ekr",
                "stats",
                "--n",
                "5",
                "--k",
                "2",
                "--family",
                "bogus"
            ]),
            1
        );
        assert_eq!(
            run([
                "sparse-ekr",
                "ekr",
                "--n",
                "40",
                "--k",
                "5",
                "--out",
                "/dev/null"
            ]),
            2
        );
    }
}
