//! Command-line front end.
//!
//! Every subcommand reads a JSON model file, writes its artifacts into the
//! output directory (the `--out` flag, else the model's `output_dir`, else the
//! current directory), and exits 0. Validation problems exit 2, computation
//! failures exit 3, and a failing `verify` run exits 1. Identical inputs
//! produce byte-identical outputs regardless of `--threads`.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::error::Result;
use crate::gibbs::{gibbs_certificate, nu_weights, tightness_report};
use crate::jsr::{countable_jsr, thermo_jsr};
use crate::lyapunov::max_lyapunov;
use crate::model::ModelFile;
use crate::potential::certify_constants;
use crate::pressure::gurevich_pressure;
use crate::verify::{verify_suite, CheckStatus};
use crate::zerotemp::{check_monotonicities, extract_maximiser, run_path};
use crate::Error;

#[derive(Parser)]
#[command(
    name = "thermo-opt",
    version,
    about = "Thermodynamic formalism on truncated Markov shifts: certified pressure, \
             Gibbs measures, zero-temperature limits, joint spectral radii and \
             Lyapunov exponents"
)]
struct Cli {
    /// Worker threads (env fallback: THERMO_OPT_THREADS). Results do not
    /// depend on this; 1 is the reference mode.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Certified Gurevich pressure brackets over the temperature schedule.
    ///
    /// Writes pressure.csv with columns
    ///   t,n,log_Z_n,p_n,bracket_lo,bracket_hi,point
    /// one row per (temperature, depth) sample; bracket and point columns repeat
    /// the per-temperature summary on every row of that temperature.
    Pressure(ModelArgs),

    /// Gibbs cylinder measures with a quantitative certificate per temperature.
    ///
    /// Writes gibbs_certificates.json (one certificate per scheduled t, plus
    /// tightness reports when the model sets tail_cutoff_j) and, when the
    /// measure depth is at most 10, gibbs_weights.csv with columns
    ///   t,word,weight
    Gibbs(ModelArgs),

    /// Temperature path toward the zero-temperature maximising measure.
    ///
    /// Writes zerotemp.csv with columns
    ///   t,pressure,bracket_width,energy,entropy_rate,tail_mass,top_cylinder,top_weight
    /// and zerotemp_result.json with the extracted maximiser, monotonicity
    /// report and (when a tail is declared) the summability report.
    Zerotemp(ModelArgs),

    /// Joint spectral radius of the model's matrix family.
    ///
    /// Writes jsr.json: brute-force norm bounds, periodic lower bound, the
    /// thermodynamic estimate with its bracket, and an ordering verdict.
    /// Models with a "countable" section run the truncation ladder instead.
    Jsr(ModelArgs),

    /// Maximal Lyapunov exponent of a planar expanding repeller.
    ///
    /// Writes lyap.json: verified hypotheses, the exponent, its expansion
    /// floor and the underlying spectral-norm JSR run.
    Lyap(ModelArgs),

    /// Run the full invariant suite and exit nonzero on any FAIL.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct ModelArgs {
    /// JSON model file
    #[arg(long)]
    model: PathBuf,

    /// Output directory (overrides the model's output_dir)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Corrupt a Gibbs measure before checking: the certificate check must
    /// then FAIL, so the whole run exits 1.
    #[arg(long)]
    corrupt_measure: bool,

    /// Also write verify.json into this directory
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Entry point for the binary; returns the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let threads = cli.threads.or_else(|| {
        std::env::var("THERMO_OPT_THREADS")
            .ok()
            .and_then(|s| s.parse().ok())
    });
    if let Some(n) = threads {
        if n == 0 {
            eprintln!("error: BadModel: --threads must be at least 1");
            return 2;
        }
        // ignore AlreadyInitialized: only possible when run() is reentered
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    match dispatch(&cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                2
            } else {
                3
            }
        }
    }
}

fn dispatch(cmd: &Command) -> Result<i32> {
    match cmd {
        Command::Pressure(a) => cmd_pressure(a).map(|_| 0),
        Command::Gibbs(a) => cmd_gibbs(a).map(|_| 0),
        Command::Zerotemp(a) => cmd_zerotemp(a).map(|_| 0),
        Command::Jsr(a) => cmd_jsr(a).map(|_| 0),
        Command::Lyap(a) => cmd_lyap(a).map(|_| 0),
        Command::Verify(a) => cmd_verify(a),
    }
}

fn out_dir(flag: &Option<PathBuf>, model: &ModelFile) -> Result<PathBuf> {
    let dir = flag
        .clone()
        .or_else(|| model.output_dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn write_csv(path: &Path, header: &str, rows: &[String]) -> Result<()> {
    let mut body = String::from("# schema_version=1\n");
    body.push_str(header);
    body.push('\n');
    for row in rows {
        body.push_str(row);
        body.push('\n');
    }
    fs::write(path, body)?;
    Ok(())
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    let mut body = serde_json::to_string_pretty(value)?;
    body.push('\n');
    fs::write(path, body)?;
    Ok(())
}

fn cmd_pressure(args: &ModelArgs) -> Result<()> {
    let model = ModelFile::from_path(&args.model)?;
    let shift = model.build_shift()?;
    let pot = model.build_potential()?;
    let consts = certify_constants(&pot, &shift, model.depths.scan_len)?;
    let cfg = model.path_config(&shift);
    let mut rows = Vec::new();
    for &t in &model.schedule {
        let est = gurevich_pressure(&shift, &pot, t, cfg.n_max, cfg.anchor, &consts)?;
        for s in &est.samples {
            rows.push(format!(
                "{},{},{},{},{},{},{}",
                t, s.n, s.log_z, s.p, est.lower, est.upper, est.point
            ));
        }
    }
    let dir = out_dir(&args.out, &model)?;
    write_csv(
        &dir.join("pressure.csv"),
        "t,n,log_Z_n,p_n,bracket_lo,bracket_hi,point",
        &rows,
    )
}

fn cmd_gibbs(args: &ModelArgs) -> Result<()> {
    let model = ModelFile::from_path(&args.model)?;
    let shift = model.build_shift()?;
    let pot = model.build_potential()?;
    let consts = certify_constants(&pot, &shift, model.depths.scan_len)?;
    let cfg = model.path_config(&shift);
    let mut certs = Vec::new();
    let mut tightness = Vec::new();
    let mut weight_rows = Vec::new();
    for &t in &model.schedule {
        let est = gurevich_pressure(&shift, &pot, t, cfg.n_max, cfg.anchor, &consts)?;
        let nu = nu_weights(&shift, &pot, t, cfg.depth)?;
        let cert = gibbs_certificate(&pot, t, &nu, &est, &consts)?;
        if let Some(j) = model.tail_cutoff_j {
            tightness.push(tightness_report(&nu, &pot, &cert, j)?);
        }
        if cfg.depth <= 10 {
            for (word, weight) in nu.weights() {
                weight_rows.push(format!("{t},{word},{weight}"));
            }
        }
        certs.push(cert);
    }
    let dir = out_dir(&args.out, &model)?;
    let mut doc = json!({
        "schema_version": crate::model::SCHEMA_VERSION,
        "certificates": certs,
    });
    if !tightness.is_empty() {
        doc["tightness"] = serde_json::to_value(&tightness)?;
    }
    write_json(&dir.join("gibbs_certificates.json"), &doc)?;
    if !weight_rows.is_empty() {
        write_csv(&dir.join("gibbs_weights.csv"), "t,word,weight", &weight_rows)?;
    }
    Ok(())
}

fn cmd_zerotemp(args: &ModelArgs) -> Result<()> {
    let model = ModelFile::from_path(&args.model)?;
    let shift = model.build_shift()?;
    let pot = model.build_potential()?;
    let consts = certify_constants(&pot, &shift, model.depths.scan_len)?;
    let cfg = model.path_config(&shift);
    let (path, skipped) = run_path(&shift, &pot, &consts, &cfg)?;
    let mut rows = Vec::new();
    for r in &path {
        let (top_word, top_weight) = r
            .top_cylinders
            .first()
            .map(|(w, p)| (w.clone(), *p))
            .unwrap_or_default();
        rows.push(format!(
            "{},{},{},{},{},{},{},{}",
            r.t,
            r.pressure.point,
            r.pressure.width(),
            r.energy,
            r.entropy_rate,
            r.tail_mass,
            top_word,
            top_weight
        ));
    }
    let maximiser = extract_maximiser(&path, &shift, &pot, &consts, cfg.max_period)?;
    let monotonicity = check_monotonicities(&path, &pot, &consts);
    let dir = out_dir(&args.out, &model)?;
    write_csv(
        &dir.join("zerotemp.csv"),
        "t,pressure,bracket_width,energy,entropy_rate,tail_mass,top_cylinder,top_weight",
        &rows,
    )?;
    let mut doc = json!({
        "schema_version": crate::model::SCHEMA_VERSION,
        "maximiser": maximiser,
        "monotonicity": monotonicity,
        "path": path,
        "skipped_temperatures": skipped
            .iter()
            .map(|(t, e)| json!({"t": t, "error": e.to_string()}))
            .collect::<Vec<_>>(),
    });
    if let Some(report) = model.summability()? {
        doc["summability"] = serde_json::to_value(&report)?;
    }
    write_json(&dir.join("zerotemp_result.json"), &doc)
}

fn cmd_jsr(args: &ModelArgs) -> Result<()> {
    let model = ModelFile::from_path(&args.model)?;
    let cfg = model.jsr_config();
    let dir = out_dir(&args.out, &model)?;
    let doc = if model.countable.is_some() {
        let (family, levels) = model.build_countable()?;
        let res = countable_jsr(&family, &levels, &cfg)?;
        let verdict = if res.levels.iter().all(|l| l.result.ordering_ok) {
            "PASS"
        } else {
            "FAIL"
        };
        json!({
            "schema_version": crate::model::SCHEMA_VERSION,
            "countable": res,
            "verdict": verdict,
        })
    } else {
        let shift = model.build_shift()?;
        let pot = model.build_potential()?;
        let cocycle = pot
            .cocycle()
            .ok_or(Error::BadModel {
                reason: "jsr needs a matrix potential".into(),
            })?
            .clone();
        let res = thermo_jsr(&cocycle, &shift, &cfg)?;
        let verdict = if res.ordering_ok { "PASS" } else { "FAIL" };
        json!({
            "schema_version": crate::model::SCHEMA_VERSION,
            "jsr": res,
            "verdict": verdict,
        })
    };
    write_json(&dir.join("jsr.json"), &doc)
}

fn cmd_lyap(args: &ModelArgs) -> Result<()> {
    let model = ModelFile::from_path(&args.model)?;
    let spec = model.build_repeller()?;
    let res = max_lyapunov(&spec, &model.jsr_config())?;
    let dir = out_dir(&args.out, &model)?;
    write_json(
        &dir.join("lyap.json"),
        &json!({
            "schema_version": crate::model::SCHEMA_VERSION,
            "lyap": res,
        }),
    )
}

fn cmd_verify(args: &VerifyArgs) -> Result<i32> {
    let report = verify_suite(args.corrupt_measure);
    let mut passed = 0usize;
    for check in &report.checks {
        let tag = match check.status {
            CheckStatus::Pass => {
                passed += 1;
                "PASS"
            }
            CheckStatus::Fail => "FAIL",
            CheckStatus::Skip => "SKIP",
        };
        println!("{tag} {}: {}", check.name, check.detail);
    }
    println!("verify: {passed}/{} checks passed", report.checks.len());
    if let Some(dir) = &args.out {
        fs::create_dir_all(dir)?;
        write_json(
            &dir.join("verify.json"),
            &json!({
                "schema_version": crate::model::SCHEMA_VERSION,
                "report": report,
            }),
        )?;
    }
    Ok(if report.all_pass() { 0 } else { 1 })
}
