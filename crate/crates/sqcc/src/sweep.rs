//! Loss sweeps, Monte-Carlo-vs-analytic cross-validation, and
//! deterministic CSV emission.
//!
//! Grid points are dispatched to a worker pool; rows are buffered and
//! written in grid order, so output bytes depend only on the configuration
//! (re-running an identical config and seed reproduces the file exactly).

use crate::config::{ConfigError, SweepConfig};
use crate::keyrate::{
    self, Detection, FiniteSizeParams, NoiseBudget, OptimumVmod,
};
use crate::sim::{self, ProtocolParams, SimReport};
use rayon::prelude::*;
use std::io::Write;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SweepError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    KeyRate(#[from] keyrate::KeyRateError),
    #[error(transparent)]
    Sim(#[from] sim::SimError),
    #[error("cannot write output {path}")]
    Output {
        path: std::path::PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("crosscheck needs at least {min} shots, got {got}")]
    TooFewShots { min: u64, got: u64 },
}

/// Build-time git commit, for the provenance column.
pub const GIT_HASH: &str = env!("SQCC_GIT_HASH");

/// One CSV row: a (loss, detection, block-size) tuple with its rates and,
/// when simulation is enabled, the campaign results.
#[derive(Debug, Clone)]
pub struct ResultRow {
    pub loss_db: f64,
    pub detection: Detection,
    /// None for the asymptotic-only row of a sweep without block sizes.
    pub block_size: Option<f64>,
    pub v_mod_opt: f64,
    pub i_ab: f64,
    pub chi_be: f64,
    pub rate_asymptotic: f64,
    pub rate_finite: Option<f64>,
    pub plob: f64,
    pub c_ber: f64,
    pub sim: Option<SimReport>,
    pub seed: u64,
    pub config_hash: u64,
}

/// Fixed CSV schema (column set and order are part of the output
/// contract).
pub const CSV_COLUMNS: &[&str] = &[
    "loss_db",
    "detection",
    "block_size",
    "v_mod_opt",
    "i_ab",
    "chi_be",
    "rate_asymptotic",
    "rate_finite",
    "plob",
    "c_ber",
    "ber_empirical",
    "var_s2p",
    "var_s3p",
    "t_hat",
    "xi_hat",
    "n_shots",
    "git_hash",
    "seed",
    "config_hash",
];

/// 12-significant-digit rendering used for every float cell.
pub fn fmt_g12(x: f64) -> String {
    format!("{x:.11e}")
}

fn opt_cell(x: Option<f64>) -> String {
    x.map(fmt_g12).unwrap_or_default()
}

impl ResultRow {
    fn to_csv_line(&self) -> String {
        let sim = self.sim.as_ref();
        let cells = [
            fmt_g12(self.loss_db),
            self.detection.to_string(),
            self.block_size.map(|b| format!("{b:.0}")).unwrap_or_default(),
            fmt_g12(self.v_mod_opt),
            fmt_g12(self.i_ab),
            fmt_g12(self.chi_be),
            fmt_g12(self.rate_asymptotic),
            opt_cell(self.rate_finite),
            fmt_g12(self.plob),
            fmt_g12(self.c_ber),
            opt_cell(sim.map(|s| s.ber_empirical)),
            opt_cell(sim.map(|s| s.var_s2p)),
            opt_cell(sim.map(|s| s.var_s3p)),
            opt_cell(sim.map(|s| s.t_hat)),
            opt_cell(sim.map(|s| s.xi_hat)),
            sim.map(|s| s.n_shots.to_string()).unwrap_or_default(),
            GIT_HASH.to_string(),
            self.seed.to_string(),
            format!("{:016x}", self.config_hash),
        ];
        cells.join(",")
    }
}

/// Completed sweep: rows in grid order.
#[derive(Debug, Clone)]
pub struct SweepTable {
    pub rows: Vec<ResultRow>,
}

impl SweepTable {
    /// Serialize with the fixed schema, LF line endings, header row.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(128 * (self.rows.len() + 1));
        out.push_str(&CSV_COLUMNS.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.to_csv_line());
            out.push('\n');
        }
        out
    }
}

fn noise_for(
    config: &SweepConfig,
    loss_db: f64,
) -> Result<NoiseBudget, keyrate::KeyRateError> {
    let p = &config.params;
    let base = NoiseBudget::from_loss_db(loss_db, p.xi, p.eta, p.nu_el)?;
    match config.second_order_alpha {
        Some(alpha_rx) => base.with_second_order(alpha_rx),
        None => Ok(base),
    }
}

fn optimize(
    config: &SweepConfig,
    noise: &NoiseBudget,
    detection: Detection,
    block: Option<f64>,
) -> Result<OptimumVmod, keyrate::KeyRateError> {
    let fs = block.map(|b| FiniteSizeParams {
        block_size: b,
        m_fraction: config.m_fraction,
        epsilon: config.epsilon,
        p_ec: config.p_ec,
    });
    keyrate::optimize_vmod(noise, config.beta, detection, fs.as_ref())
}

/// Evaluate one grid point: optimized asymptotic rate plus, per block
/// size, the optimized finite-size rate.
fn evaluate_point(
    config: &SweepConfig,
    point_index: usize,
    loss_db: f64,
    detection: Detection,
) -> Result<Vec<ResultRow>, SweepError> {
    let noise = noise_for(config, loss_db)?;
    // the repeaterless bound diverges on a lossless channel
    let plob = if noise.t >= 1.0 { f64::INFINITY } else { keyrate::plob_bound(noise.t)? };
    let c_ber = keyrate::classical_ber(
        config.params.alpha,
        noise.t,
        config.params.eta,
        config.params.nu_el,
    )?;
    let asym = optimize(config, &noise, detection, None)?;

    let sim = if config.shots > 0 {
        let params = ProtocolParams {
            loss_db,
            detection,
            seed: config.params.seed.wrapping_add(point_index as u64),
            ..config.params
        };
        Some(sim::run_campaign(&params, config.shots)?)
    } else {
        None
    };

    let hash = config.config_hash();
    let mut rows = Vec::new();
    let blocks: Vec<Option<f64>> = if config.block_sizes.is_empty() {
        vec![None]
    } else {
        config.block_sizes.iter().copied().map(Some).collect()
    };
    for block in blocks {
        let (v_mod_opt, breakdown, rate_finite) = match block {
            None => (asym.v_mod, asym.breakdown, None),
            Some(b) => {
                let fin = optimize(config, &noise, detection, Some(b))?;
                (fin.v_mod, fin.breakdown, Some(fin.breakdown.rate))
            }
        };
        rows.push(ResultRow {
            loss_db,
            detection,
            block_size: block,
            v_mod_opt,
            i_ab: breakdown.i_ab,
            chi_be: breakdown.chi_be,
            rate_asymptotic: asym.breakdown.rate,
            rate_finite,
            plob,
            c_ber,
            sim,
            seed: config.params.seed,
            config_hash: hash,
        });
    }
    Ok(rows)
}

/// Run the full sweep: every (loss, detection) point in parallel, rows
/// assembled in grid order.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepTable, SweepError> {
    config.validate()?;
    let points: Vec<(usize, f64, Detection)> = config
        .loss_db_grid
        .iter()
        .flat_map(|&loss| config.detections.iter().map(move |&d| (loss, d)))
        .enumerate()
        .map(|(i, (loss, d))| (i, loss, d))
        .collect();
    let groups: Result<Vec<Vec<ResultRow>>, SweepError> = points
        .par_iter()
        .map(|&(i, loss, det)| evaluate_point(config, i, loss, det))
        .collect();
    Ok(SweepTable { rows: groups?.into_iter().flatten().collect() })
}

/// Run the sweep and write the CSV (and optional gnuplot script) to the
/// configured output path, or stdout when none is set.
pub fn run_sweep_to_output(config: &SweepConfig) -> Result<SweepTable, SweepError> {
    let table = run_sweep(config)?;
    let csv = table.to_csv();
    match &config.out {
        Some(path) => {
            write_atomically(path, csv.as_bytes())?;
            if config.emit_gnuplot {
                let gp_path = path.with_extension("gp");
                let script = gnuplot_script(path.file_name().and_then(|s| s.to_str()).unwrap_or("sweep.csv"));
                write_atomically(&gp_path, script.as_bytes())?;
            }
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(csv.as_bytes())
                .map_err(|source| SweepError::Output { path: "<stdout>".into(), source })?;
        }
    }
    Ok(table)
}

fn write_atomically(path: &std::path::Path, bytes: &[u8]) -> Result<(), SweepError> {
    std::fs::write(path, bytes)
        .map_err(|source| SweepError::Output { path: path.to_path_buf(), source })
}

/// Data-only plotting companion: rate-vs-loss on a log axis, one series
/// per detection/block column, reading the CSV this sweep wrote.
pub fn gnuplot_script(csv_name: &str) -> String {
    format!(
        "set datafile separator ','\n\
         set logscale y\n\
         set xlabel 'channel loss (dB)'\n\
         set ylabel 'secret key rate (bits/pulse)'\n\
         set key outside\n\
         plot '{csv_name}' using 1:($8 > 0 ? $8 : 1/0) with linespoints title 'finite-size', \\\n     \
         '' using 1:7 with lines title 'asymptotic', \\\n     \
         '' using 1:9 with lines dashtype 2 title 'PLOB'\n"
    )
}

/// One named comparison between a simulated statistic and its analytic
/// prediction.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub simulated: f64,
    pub predicted: f64,
    pub z: f64,
    pub pass: bool,
}

impl Check {
    fn new(name: &'static str, simulated: f64, predicted: f64, se: f64) -> Self {
        let z = if se > 0.0 {
            (simulated - predicted) / se
        } else if simulated == predicted {
            0.0
        } else {
            f64::INFINITY
        };
        Check { name, simulated, predicted, z, pass: z.abs() < 5.0 }
    }
}

/// Monte-Carlo-vs-analytic validation report for one configuration point.
#[derive(Debug, Clone)]
pub struct CrosscheckReport {
    pub loss_db: f64,
    pub detection: Detection,
    pub n_shots: u64,
    pub checks: Vec<Check>,
}

impl CrosscheckReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Minimum shots accepted by [`run_crosscheck`].
pub const MIN_CROSSCHECK_SHOTS: u64 = 100_000;

/// Simulate the configured link at the first grid point and compare the
/// empirical bit error rate, quadrature variances and two-mode covariance
/// entries to their analytic predictions, with z-scores.
///
/// The covariance entries are converted to the entangled-state form before
/// comparison: the modulation variance maps to V = V_mod + 1, the measured
/// correlation scales by sqrt((V+1)/(V-1)), and the trusted detection
/// noise is subtracted from the measured quadrature variance.
pub fn run_crosscheck(config: &SweepConfig, n_shots: u64) -> Result<CrosscheckReport, SweepError> {
    if n_shots < MIN_CROSSCHECK_SHOTS {
        return Err(SweepError::TooFewShots { min: MIN_CROSSCHECK_SHOTS, got: n_shots });
    }
    config.validate()?;
    let loss_db = config.loss_db_grid[0];
    let detection = config.detections[0];
    let params = ProtocolParams { loss_db, detection, ..config.params };
    let rep = sim::run_campaign(&params, n_shots)?;
    let checks = crosscheck_compare(&params, &rep)?;
    Ok(CrosscheckReport { loss_db, detection, n_shots, checks })
}

/// Compare a campaign report against the analytic predictions for
/// `predicted` (normally the same parameters the campaign ran with;
/// passing different ones makes a negative control).
pub fn crosscheck_compare(
    predicted: &ProtocolParams,
    rep: &SimReport,
) -> Result<Vec<Check>, SweepError> {
    let t = predicted.t();
    let v = 1.0 + predicted.v_mod;
    let xi_ch = (1.0 - t) / t + predicted.xi;
    let xi_det = predicted.detection_noise_referred();
    let n_q = (rep.n_plus + rep.n_minus) as f64;

    let mut checks = Vec::new();

    // classical BER against the erfc form
    let ber_pred =
        keyrate::classical_ber(predicted.alpha, t, predicted.eta, predicted.nu_el)?;
    let ber_se = (ber_pred * (1.0 - ber_pred) / rep.n_shots as f64).sqrt();
    checks.push(Check::new("ber", rep.ber_empirical, ber_pred, ber_se));

    // measured quadrature variances: T(V + Xch) + detection penalty
    let var_pred = t * (v + xi_ch) + xi_det;
    checks.push(Check::new("var_s2p", rep.var_s2p, var_pred, rep.var_s2p_se));
    checks.push(Check::new("var_s3p", rep.var_s3p, var_pred, rep.var_s3p_se));

    // two-mode covariance in entangled-state form
    let cm = keyrate::TwoModeCov::channel_output(v, t, xi_ch);
    checks.push(Check::new("cm_mode_a", rep.v_hat, cm.var_a, rep.v_hat_se));
    let conv = ((v + 1.0) / (v - 1.0)).sqrt();
    let cov_pooled = (rep.cov_plus * rep.n_plus as f64 + rep.cov_minus * rep.n_minus as f64) / n_q;
    let cov_se = ((predicted.v_mod * var_pred + cov_pooled * cov_pooled) / n_q).sqrt();
    checks.push(Check::new("cm_cross", conv * cov_pooled, cm.cov, conv * cov_se));
    let w_hat = (rep.var_s2p * rep.n_plus as f64 + rep.var_s3p * rep.n_minus as f64) / n_q - xi_det;
    let w_se = var_pred * (2.0 / n_q).sqrt();
    checks.push(Check::new("cm_mode_b", w_hat, cm.var_b, w_se));

    // channel parameter estimates
    checks.push(Check::new("t_hat", rep.t_hat, t, rep.t_hat_se));
    checks.push(Check::new("xi_hat", rep.xi_hat, predicted.xi, rep.xi_hat_se));

    Ok(checks)
}
