// Copyright 2026 The alf-entropy Authors
// SPDX-License-Identifier: Apache-2.0

//! `alf`: scenario-driven runs of the alf-core analyses.
//!
//! Exit codes: 0 success, 2 configuration error, 3 size guard exceeded,
//! 4 invariant violation, 1 output I/O failure.

mod config;
mod output;

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use alf_core::collision::{
    coarse_grained_bruteforce, factorized_coarse_grained, factorized_spectrum,
    qr_factorization_test, special_povm, ChainSpectrumMethod,
};
use alf_core::entropy::{entropy_scan, linspace, region_of};
use alf_core::linalg::{hermitian_eigenvalues, shannon_entropy};
use alf_core::pauli::{
    divisibility_classify, random_hermitian_probes, revival_scan, superactivation_witness,
    OneQubitFamily, SearchOptions, Witness,
};
use alf_core::source::ChainParams;
use alf_core::AlfError;
use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use config::{LogBase, Scenario, ScenarioConfig};
use output::{fmt_num, matrix_value, render_json};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Core(AlfError),
    Io(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(m) => write!(f, "output error: {m}"),
        }
    }
}

impl From<AlfError> for CliError {
    fn from(e: AlfError) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io(_) => 1,
            CliError::Core(e) => match e {
                AlfError::GuardExceeded { .. } => 3,
                AlfError::InvariantViolation(_)
                | AlfError::NonFinite
                | AlfError::NotInvertible { .. } => 4,
                _ => 2,
            },
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "alf",
    version,
    about = "Dynamical entropy and divisibility of collisional qubit/qudit models"
)]
struct Cli {
    /// Scenario file (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Report entropies in bits.
    #[arg(long, global = true)]
    bits: bool,
    /// Seed of the probe search.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Entropy and divisibility region along a Δ/p grid (CSV + JSON).
    EntropyScan,
    /// Divisibility class of the chain parameters.
    Divisibility,
    /// Brute-force and factorized coarse-grained states.
    CoarseGrain,
    /// Quantum-regression factorization test of T_n.
    QrCheck,
    /// Revival search on the qubit maps and their two-qubit dilation.
    Superactivation,
}

struct Ctx {
    scenario: Scenario,
    bits: bool,
    seed: u64,
}

impl Ctx {
    fn log_scale(&self) -> f64 {
        if self.bits {
            std::f64::consts::LN_2.recip()
        } else {
            1.0
        }
    }

    fn log_base(&self) -> &'static str {
        if self.bits {
            "2"
        } else {
            "e"
        }
    }

    fn chain(&self, what: &str) -> Result<ChainParams, CliError> {
        self.scenario
            .chain
            .ok_or_else(|| CliError::Config(format!("{what} needs source.kind = \"chain\"")))
    }
}

/// Files to write, in order.
type Outputs = Vec<(String, String)>;

fn cmd_entropy_scan(ctx: &Ctx) -> Result<Outputs, CliError> {
    let chain = ctx.chain("entropy-scan")?;
    let cfg = &ctx.scenario.config;
    if cfg.model.preset != config::Preset::Pauli {
        return Err(CliError::Config(
            "entropy-scan runs the pauli preset".into(),
        ));
    }
    let run = &cfg.run;
    let grid = match &run.delta_over_p {
        Some(g) => g.clone(),
        None => linspace(0.0, 1.0, run.grid_points.unwrap_or(50)),
    };
    let n_max = run.n_max.unwrap_or(4);
    let scan = entropy_scan(chain.p, chain.r, &grid, n_max)?;
    let k = ctx.log_scale();
    let mut csv = String::from(
        "delta_over_p,h_closed_form,h_measured_increment,qr_rate,backflow_measure,region\n",
    );
    for row in &scan.rows {
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            fmt_num(row.delta_over_p),
            fmt_num(row.h_closed_form * k),
            fmt_num(row.h_measured_increment * k),
            fmt_num(row.qr_rate * k),
            fmt_num(row.backflow_measure * k),
            row.region
        ));
    }
    let mut v = serde_json::to_value(&scan).expect("serializable");
    for row in v["rows"].as_array_mut().expect("rows") {
        for key in [
            "h_closed_form",
            "h_measured_increment",
            "qr_rate",
            "backflow_measure",
        ] {
            row[key] = json!(row[key].as_f64().expect("number") * k);
        }
    }
    v["log_base"] = json!(ctx.log_base());
    Ok(vec![
        ("entropy_scan.csv".into(), csv),
        ("entropy_scan.json".into(), render_json(&v)),
    ])
}

fn cmd_divisibility(ctx: &Ctx) -> Result<Outputs, CliError> {
    let chain = ctx.chain("divisibility")?;
    let rep = divisibility_classify(&chain)?;
    let mut v = serde_json::to_value(rep).expect("serializable");
    v["region"] = json!(region_of(&chain).to_string());
    Ok(vec![("divisibility.json".into(), render_json(&v))])
}

fn spectrum_gap(a: &[f64], b: &[f64]) -> f64 {
    let len = a.len().max(b.len());
    (0..len)
        .map(|k| (a.get(k).copied().unwrap_or(0.0) - b.get(k).copied().unwrap_or(0.0)).abs())
        .fold(0.0, f64::max)
}

fn cmd_coarse_grain(ctx: &Ctx) -> Result<Outputs, CliError> {
    let model = &ctx.scenario.model;
    let n = ctx.scenario.config.run.n.unwrap_or(2);
    let k = ctx.log_scale();
    let (povm, povm_name) = match &ctx.scenario.povm {
        Some(p) => (
            p.clone(),
            format!("{:?}", ctx.scenario.config.run.povm).to_lowercase(),
        ),
        None => (special_povm(model.system_state())?, "special".to_string()),
    };
    let brute = coarse_grained_bruteforce(model, &povm, n)?;
    let spectrum = hermitian_eigenvalues(brute.matrix());
    let entropy = brute.entropy();
    let mut v = json!({
        "n": n,
        "povm": povm_name,
        "entries": matrix_value(brute.matrix()),
        "spectrum": spectrum,
        "entropy": entropy * k,
        "log_base": ctx.log_base(),
    });
    if ctx.scenario.povm.is_none() {
        let d = model.d() as u128;
        let (fact, method) = if d.pow(2 * n as u32 + 2) <= alf_core::error::DIM_GUARD as u128 {
            let m = factorized_coarse_grained(model, n)?;
            (hermitian_eigenvalues(m.matrix()), "dense".to_string())
        } else {
            let f = factorized_spectrum(model, n, ChainSpectrumMethod::Auto)?;
            (f.spectrum(), format!("{:?}", f.method).to_lowercase())
        };
        v["factorized"] = json!({
            "spectrum": fact,
            "entropy": shannon_entropy(&fact) * k,
            "method": method,
        });
        v["discrepancy"] = json!(spectrum_gap(&spectrum, &fact));
    } else {
        v["factorized"] = Value::Null;
        v["discrepancy"] = Value::Null;
    }
    Ok(vec![("coarse_grain.json".into(), render_json(&v))])
}

fn cmd_qr_check(ctx: &Ctx) -> Result<Outputs, CliError> {
    let run = &ctx.scenario.config.run;
    let n = run.n.unwrap_or(2);
    let tol = run.qr_tol.unwrap_or(1e-10);
    let rep = qr_factorization_test(&ctx.scenario.model, n, tol)?;
    let factors = match &rep.factors {
        Some(f) => Value::Array(f.iter().map(matrix_value).collect()),
        None => Value::Null,
    };
    let v = json!({
        "n": n,
        "tolerance": tol,
        "holds": rep.holds,
        "deviation": rep.deviation,
        "factors": factors,
    });
    Ok(vec![("qr_check.json".into(), render_json(&v))])
}

fn witness_value(w: &Option<Witness>) -> Value {
    match w {
        Some(w) => json!({
            "probe": matrix_value(&w.probe),
            "step": w.step,
            "magnitude": w.magnitude,
            "index": w.index,
        }),
        None => Value::Null,
    }
}

fn cmd_superactivation(ctx: &Ctx) -> Result<Outputs, CliError> {
    let chain = ctx.chain("superactivation")?;
    let run = &ctx.scenario.config.run;
    let horizon = run.horizon.unwrap_or(50);
    let probes = run.random_probes.unwrap_or(200);
    let opts = SearchOptions {
        seed: ctx.seed,
        refinements: run.refinements.unwrap_or(500),
        one_qubit_random_probes: probes,
    };
    let rep = superactivation_witness(&chain, horizon, &opts)?;
    let fam = OneQubitFamily::new(&chain, horizon)?;
    let random = revival_scan(&fam, &random_hermitian_probes(2, probes, ctx.seed), horizon);
    let v = json!({
        "params": chain,
        "horizon": horizon,
        "seed": ctx.seed,
        "refinements": opts.refinements,
        "random_probes": probes,
        "random_probe_revivals": random.len(),
        "divisibility": rep.divisibility,
        "one_qubit_revives": rep.one_qubit_revives,
        "one_qubit_witness": witness_value(&rep.one_qubit_witness),
        "gns_revives": rep.gns_revives,
        "witness": witness_value(&rep.witness),
    });
    Ok(vec![("superactivation.json".into(), render_json(&v))])
}

fn write_outputs(dir: &Path, files: &Outputs) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    for (name, body) in files {
        let path = dir.join(name);
        std::fs::write(&path, body)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Config("--config PATH is required".into()))?;
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Config(format!("--threads: {e}")))?;
    }
    let cfg = ScenarioConfig::load(path)?;
    let bits = cli.bits || cfg.run.log_base == LogBase::Bits;
    let ctx = Ctx {
        scenario: cfg.build()?,
        bits,
        seed: cli.seed,
    };
    let files = match cli.command {
        Command::EntropyScan => cmd_entropy_scan(&ctx)?,
        Command::Divisibility => cmd_divisibility(&ctx)?,
        Command::CoarseGrain => cmd_coarse_grain(&ctx)?,
        Command::QrCheck => cmd_qr_check(&ctx)?,
        Command::Superactivation => cmd_superactivation(&ctx)?,
    };
    write_outputs(&cli.out, &files)?;
    for (name, body) in &files {
        if name.ends_with(".json") {
            print!("{body}");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("alf: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
