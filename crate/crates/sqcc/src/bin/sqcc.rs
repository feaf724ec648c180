//! Command-line front end: loss sweeps, Monte-Carlo cross-validation,
//! single-point BER and key-rate queries, and a polarization-optics
//! self-check.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical-domain error.

use clap::{Args, Parser, Subcommand};
use sqcc::config::{ConfigError, KvMap, SweepConfig};
use sqcc::keyrate;
use sqcc::mueller;
use sqcc::sim;
use sqcc::sweep::{self, SweepError};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "sqcc", version, about = "Polarization-encoded quantum-classical link analysis")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sweep the loss grid and emit the deterministic CSV table.
    Sweep(Common),
    /// Simulate one grid point and compare against the analytic model.
    Crosscheck(Common),
    /// Classical bit error rate over the loss grid (analytic, plus Monte
    /// Carlo when --shots is given).
    Ber(Common),
    /// Secret key rates at the grid points (optimized modulation).
    Rate(Common),
    /// Verify the transmitter/receiver polarization calculus.
    OpticsCheck(Common),
}

/// Flags shared by the subcommands; each has the config key of the same
/// name, and a flag, when present, overrides the file.
#[derive(Args, Clone)]
struct Common {
    /// Flat key = value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// RNG seed (config key `seed`).
    #[arg(long)]
    seed: Option<u64>,
    /// Loss grid in dB: comma list or start:stop:step (key `loss_db`).
    #[arg(long)]
    loss_db: Option<String>,
    /// Detection modes, comma-separated hom|het (key `detection`).
    #[arg(long)]
    detection: Option<String>,
    /// Finite-size block sizes, comma list (key `block_sizes`).
    #[arg(long)]
    block_size: Option<String>,
    /// Output path for CSV (key `out`); stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Monte Carlo shots (key `shots`).
    #[arg(long)]
    shots: Option<u64>,
    /// Also write a gnuplot script next to the CSV (key `gnuplot`).
    #[arg(long)]
    gnuplot: bool,
}

impl Common {
    fn resolve(&self) -> Result<SweepConfig, ConfigError> {
        let mut cfg = SweepConfig::default();
        if let Some(path) = &self.config {
            cfg.apply_kv(&sqcc::config::load_kv(path)?)?;
        }
        let mut overrides = KvMap::new();
        if let Some(seed) = self.seed {
            overrides.insert("seed".into(), seed.to_string());
        }
        if let Some(grid) = &self.loss_db {
            overrides.insert("loss_db".into(), grid.clone());
        }
        if let Some(det) = &self.detection {
            overrides.insert("detection".into(), det.clone());
        }
        if let Some(blocks) = &self.block_size {
            overrides.insert("block_sizes".into(), blocks.clone());
        }
        if let Some(out) = &self.out {
            overrides.insert("out".into(), out.display().to_string());
        }
        if let Some(shots) = self.shots {
            overrides.insert("shots".into(), shots.to_string());
        }
        if self.gnuplot {
            overrides.insert("gnuplot".into(), "true".into());
        }
        cfg.apply_kv(&overrides)?;
        Ok(cfg)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.cmd {
        Cmd::Sweep(c) => cmd_sweep(c),
        Cmd::Crosscheck(c) => cmd_crosscheck(c),
        Cmd::Ber(c) => cmd_ber(c),
        Cmd::Rate(c) => cmd_rate(c),
        Cmd::OpticsCheck(c) => cmd_optics_check(c),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(classify(&err))
        }
    }
}

/// Map error chains onto the documented exit codes: 2 for configuration
/// problems, 3 for numerical-domain failures.
fn classify(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(sweep_err) = cause.downcast_ref::<SweepError>() {
            return match sweep_err {
                SweepError::Config(_)
                | SweepError::Output { .. }
                | SweepError::TooFewShots { .. } => 2,
                SweepError::KeyRate(e) => classify_keyrate(e),
                SweepError::Sim(e) => classify_sim(e),
            };
        }
        if cause.downcast_ref::<ConfigError>().is_some() {
            return 2;
        }
        if let Some(e) = cause.downcast_ref::<keyrate::KeyRateError>() {
            return classify_keyrate(e);
        }
        if let Some(e) = cause.downcast_ref::<sim::SimError>() {
            return classify_sim(e);
        }
    }
    1
}

fn classify_keyrate(e: &keyrate::KeyRateError) -> u8 {
    match e {
        keyrate::KeyRateError::InvalidParam(_) => 2,
        _ => 3,
    }
}

fn classify_sim(e: &sim::SimError) -> u8 {
    match e {
        sim::SimError::NormalizationFailure => 3,
        _ => 2,
    }
}

fn cmd_sweep(common: &Common) -> anyhow::Result<ExitCode> {
    let cfg = common.resolve()?;
    let table = sweep::run_sweep_to_output(&cfg)?;
    if let Some(path) = &cfg.out {
        eprintln!("wrote {} rows to {}", table.rows.len(), path.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_crosscheck(common: &Common) -> anyhow::Result<ExitCode> {
    let cfg = common.resolve()?;
    let shots = if cfg.shots > 0 { cfg.shots } else { 1_000_000 };
    let report = sweep::run_crosscheck(&cfg, shots)?;
    println!(
        "crosscheck at {} dB, {} detection, {} shots",
        report.loss_db, report.detection, report.n_shots
    );
    for check in &report.checks {
        println!(
            "{}  {:<10} simulated {:>14.6e}  predicted {:>14.6e}  z = {:+.2}",
            if check.pass { "PASS" } else { "FAIL" },
            check.name,
            check.simulated,
            check.predicted,
            check.z
        );
    }
    if report.all_pass() {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(3))
    }
}

fn cmd_ber(common: &Common) -> anyhow::Result<ExitCode> {
    let cfg = common.resolve()?;
    let p = &cfg.params;
    println!("loss_db,ber_analytic{}", if cfg.shots > 0 { ",ber_empirical,se" } else { "" });
    for &loss in &cfg.loss_db_grid {
        let t = keyrate::transmissivity(loss);
        let ber = keyrate::classical_ber(p.alpha, t, p.eta, p.nu_el)?;
        if cfg.shots > 0 {
            let params = sim::ProtocolParams { loss_db: loss, ..*p };
            let rep = sim::run_classical_campaign(&params, cfg.shots)?;
            println!(
                "{},{},{},{}",
                sweep::fmt_g12(loss),
                sweep::fmt_g12(ber),
                sweep::fmt_g12(rep.ber_empirical),
                sweep::fmt_g12(rep.ber_se)
            );
        } else {
            println!("{},{}", sweep::fmt_g12(loss), sweep::fmt_g12(ber));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_rate(common: &Common) -> anyhow::Result<ExitCode> {
    let mut cfg = common.resolve()?;
    cfg.shots = 0;
    let table = sweep::run_sweep(&cfg)?;
    println!(
        "{:>8} {:>4} {:>10} {:>12} {:>12} {:>12} {:>12} {:>12}",
        "loss_db", "det", "block", "v_mod_opt", "i_ab", "chi_be", "rate", "plob"
    );
    for row in &table.rows {
        println!(
            "{:>8.2} {:>4} {:>10} {:>12.5e} {:>12.5e} {:>12.5e} {:>12.5e} {:>12.5e}",
            row.loss_db,
            row.detection.to_string(),
            row.block_size.map(|b| format!("{b:.0e}")).unwrap_or_else(|| "asym".into()),
            row.v_mod_opt,
            row.i_ab,
            row.chi_be,
            row.rate_finite.unwrap_or(row.rate_asymptotic),
            row.plob,
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_optics_check(common: &Common) -> anyhow::Result<ExitCode> {
    let _ = common.resolve()?; // validate any provided config
    let grid = 100usize;
    let mut worst_chain = 0.0f64;
    let mut worst_dop = 0.0f64;
    let mut worst_homo = 0.0f64;
    for i in 0..grid {
        for j in 0..grid {
            let phi1 = -std::f64::consts::FRAC_PI_2
                + std::f64::consts::PI * (i as f64 + 0.5) / grid as f64;
            let phi2 = -std::f64::consts::FRAC_PI_2
                + std::f64::consts::PI * (j as f64 + 0.5) / grid as f64;
            let out = mueller::alice_chain(phi1, phi2)?;
            let expect = mueller::StokesVector::new(
                1.0,
                phi1.cos() * phi2.cos(),
                phi1.cos() * phi2.sin(),
                phi1.sin(),
            );
            for k in 0..4 {
                worst_chain = worst_chain.max((out.0[k] - expect.0[k]).abs());
            }
            worst_dop = worst_dop.max(out.polarization_defect().abs());
        }
    }
    for &t1 in &[0.1, 0.7, 1.3] {
        for &p1 in &[-0.9, 0.2, 1.1] {
            let j1 = mueller::jones_eom(p1).after(&mueller::jones_hwp(t1));
            let j2 = mueller::jones_mom(0.6).after(&mueller::jones_qwp(-0.4));
            let lhs = mueller::jones_to_mueller(&j2.after(&j1))?;
            let rhs = mueller::jones_to_mueller(&j2)?.after(&mueller::jones_to_mueller(&j1)?);
            worst_homo = worst_homo.max((lhs.0 - rhs.0).amax());
        }
    }
    let chain_ok = worst_chain < 1e-10;
    let dop_ok = worst_dop < 1e-10;
    let homo_ok = worst_homo < 1e-10;
    println!(
        "{} modulation chain closed form   max |err| = {worst_chain:.3e}",
        if chain_ok { "PASS" } else { "FAIL" }
    );
    println!(
        "{} polarization degree conserved  max |err| = {worst_dop:.3e}",
        if dop_ok { "PASS" } else { "FAIL" }
    );
    println!(
        "{} Mueller composition            max |err| = {worst_homo:.3e}",
        if homo_ok { "PASS" } else { "FAIL" }
    );
    Ok(if chain_ok && dop_ok && homo_ok { ExitCode::SUCCESS } else { ExitCode::from(3) })
}
