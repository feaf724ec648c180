//! Composable finite-size effects: worst-case channel parameters, the
//! rate's approach to the asymptotic limit with block size, and the
//! collapse threshold per detection scheme.
//!
//! ```bash
//! cargo run --release --example finite_size_blocks
//! ```

use sqcc::keyrate::{
    finite_size_rate, optimize_vmod, worst_case_channel, Detection, FiniteSizeParams, NoiseBudget,
};

fn collapse_db(det: Detection, block: f64) -> f64 {
    let rate = |loss: f64| {
        let noise = NoiseBudget::from_loss_db(loss, 0.01, 0.5, 0.1).unwrap();
        let fs = FiniteSizeParams::new(block);
        optimize_vmod(&noise, 0.95, det, Some(&fs)).unwrap().breakdown.rate
    };
    let (mut lo, mut hi) = (5.0, 35.0);
    while hi - lo > 0.01 {
        let mid = 0.5 * (lo + hi);
        if rate(mid) > 0.0 {
            lo = mid
        } else {
            hi = mid
        }
    }
    0.5 * (lo + hi)
}

fn main() {
    let noise = NoiseBudget::from_loss_db(10.0, 0.01, 0.5, 0.1).unwrap();
    let beta = 0.95;
    let v_mod = 4.0;

    println!("worst-case channel parameters at 10 dB, heterodyne, m = N/10:");
    println!("{:>8} {:>12} {:>12} {:>12}", "N", "T_wc", "xi_wc", "r_fin");
    for block in [1e5, 1e6, 1e8, 1e10, 1e12] {
        let fs = FiniteSizeParams::new(block);
        let wc = worst_case_channel(v_mod, &noise, Detection::Heterodyne, &fs).unwrap();
        let r = finite_size_rate(v_mod, &noise, beta, Detection::Heterodyne, &fs)
            .unwrap()
            .rate;
        println!("{block:>8.0e} {:>12.6} {:>12.6} {:>12.4e}", wc.t_wc, wc.xi_wc, r);
    }
    let asym = sqcc::keyrate::asymptotic_rate(v_mod, &noise, beta, Detection::Heterodyne)
        .unwrap()
        .rate;
    println!("asymptotic rate at the same point: {asym:.4e} bits/pulse");

    println!("\ncollapse thresholds (optimized modulation, eps = 2^-32, p_ec = 0.95):");
    for det in [Detection::Homodyne, Detection::Heterodyne] {
        for block in [1e8, 1e10, 1e12] {
            println!("  {det}  N = {block:>6.0e}: {:.2} dB", collapse_db(det, block));
        }
    }
}
