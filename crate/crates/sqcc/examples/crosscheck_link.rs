//! Monte-Carlo-vs-analytic cross-validation of one link configuration:
//! BER, quadrature variances, entangled-form covariance entries and
//! channel estimates, each with a z-score.
//!
//! ```bash
//! cargo run --release --example crosscheck_link
//! ```

use sqcc::config::SweepConfig;
use sqcc::keyrate::Detection;
use sqcc::sweep::run_crosscheck;

fn main() {
    let mut cfg = SweepConfig::default();
    cfg.loss_db_grid = vec![3.0];
    cfg.detections = vec![Detection::Heterodyne];
    cfg.params.seed = 11;

    let report = run_crosscheck(&cfg, 400_000).unwrap();
    println!(
        "crosscheck at {} dB, {} detection, {} shots\n",
        report.loss_db, report.detection, report.n_shots
    );
    println!("check       simulated       predicted       z      verdict");
    for c in &report.checks {
        println!(
            "{:<10} {:>14.6e} {:>14.6e}  {:+6.2}   {}",
            c.name,
            c.simulated,
            c.predicted,
            c.z,
            if c.pass { "PASS" } else { "FAIL" }
        );
    }
    println!(
        "\nall checks {} (|z| < 5 each)",
        if report.all_pass() { "pass" } else { "FAIL" }
    );
}
