//! Closed-form performance metrics: classical bit error rate, asymptotic
//! and composable finite-size CV-QKD secret key rates, the repeaterless
//! PLOB capacity bound, and modulation-variance optimization.
//!
//! All variances are in shot-noise units, rates in bits per pulse, loss as
//! transmissivity `T = 10^(-dB/10)`. Eve is assumed to hold a collective
//! attack on the channel; the receiver splitting ratio and electronic noise
//! are trusted (inside the receiver, outside Eve's control).

use crate::stokes;
use libm::erfc;
use statrs::function::erf::erfc_inv;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum KeyRateError {
    #[error("symplectic eigenvalue {0} below 1: unphysical covariance matrix")]
    UnphysicalEigenvalue(f64),
    #[error("eigenvalue discriminant {0:.3e} negative beyond tolerance")]
    NegativeDiscriminant(f64),
    #[error("PLOB bound diverges at unit transmissivity")]
    DivergentPlob,
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("parameter estimation infeasible: {0}")]
    ParameterEstimation(String),
    #[error(transparent)]
    Stokes(#[from] stokes::StokesError),
}

/// Quadrature measurement scheme at the receiver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Detection {
    /// One randomly switched quadrature per pulse.
    Homodyne,
    /// Both quadratures simultaneously (50:50 split, one extra vacuum unit).
    Heterodyne,
}

impl std::fmt::Display for Detection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Detection::Homodyne => "hom",
            Detection::Heterodyne => "het",
        })
    }
}

/// Channel and receiver noise parameters.
///
/// `xi` is the untrusted excess noise referred to the channel input; `eta`
/// is the receiver's front beam-splitter transmittance and `nu_el` the
/// electronic noise of a detector pair, both trusted.
#[derive(Debug, Clone, Copy)]
pub struct NoiseBudget {
    pub t: f64,
    pub xi: f64,
    pub eta: f64,
    pub nu_el: f64,
}

impl NoiseBudget {
    pub fn new(t: f64, xi: f64, eta: f64, nu_el: f64) -> Result<Self, KeyRateError> {
        if !(t > 0.0 && t <= 1.0) {
            return Err(KeyRateError::InvalidParam(format!("transmissivity {t} outside (0, 1]")));
        }
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(KeyRateError::InvalidParam(format!("eta {eta} outside (0, 1]")));
        }
        if !(xi >= 0.0) || !(nu_el >= 0.0) {
            return Err(KeyRateError::InvalidParam(format!(
                "noise terms must be non-negative (xi={xi}, nu_el={nu_el})"
            )));
        }
        Ok(NoiseBudget { t, xi, eta, nu_el })
    }

    pub fn from_loss_db(loss_db: f64, xi: f64, eta: f64, nu_el: f64) -> Result<Self, KeyRateError> {
        Self::new(transmissivity(loss_db), xi, eta, nu_el)
    }

    /// Channel-added noise (1 - T)/T + xi, referred to the channel input.
    pub fn xi_ch(&self) -> f64 {
        (1.0 - self.t) / self.t + self.xi
    }

    /// Trusted detection-added noise for the given scheme.
    pub fn xi_det(&self, detection: Detection) -> f64 {
        match detection {
            Detection::Heterodyne => (2.0 - self.eta + 2.0 * self.nu_el) / self.eta,
            Detection::Homodyne => (1.0 - self.eta + self.nu_el) / self.eta,
        }
    }

    /// Total noise xi_ch + xi_det / T.
    pub fn xi_tot(&self, detection: Detection) -> f64 {
        self.xi_ch() + self.xi_det(detection) / self.t
    }

    /// Budget with the second-order Stokes-normalization penalty folded in
    /// as untrusted excess noise.
    ///
    /// The 2/alpha'^2 variance appears at the receiver, so referring it to
    /// the channel input divides by T. (The literal receiver-side value is
    /// available from `stokes::second_order_correction`.)
    pub fn with_second_order(&self, alpha_received: f64) -> Result<Self, KeyRateError> {
        let excess_rx = stokes::second_order_correction(alpha_received)?;
        Ok(NoiseBudget { xi: self.xi + excess_rx / self.t, ..*self })
    }
}

/// dB loss to transmissivity, T = 10^(-L/10).
pub fn transmissivity(loss_db: f64) -> f64 {
    10f64.powf(-loss_db / 10.0)
}

/// Classical bit error rate, erfc-form with trusted electronic noise:
/// BER = erfc( sqrt(2 T eta) alpha / sqrt(1 + nu_el) ) / 2.
pub fn classical_ber(alpha: f64, t: f64, eta: f64, nu_el: f64) -> Result<f64, KeyRateError> {
    if !(alpha >= 0.0 && t >= 0.0 && t <= 1.0 && eta >= 0.0 && eta <= 1.0 && nu_el >= 0.0) {
        return Err(KeyRateError::InvalidParam(
            "classical_ber requires alpha, nu_el >= 0 and t, eta in [0, 1]".into(),
        ));
    }
    Ok(0.5 * erfc((2.0 * t * eta).sqrt() * alpha / (1.0 + nu_el).sqrt()))
}

/// Von Neumann entropy kernel of a symplectic eigenvalue:
/// G(x) = ((x+1)/2) log2((x+1)/2) - ((x-1)/2) log2((x-1)/2), G(1) = 0.
pub fn g_von_neumann(x: f64) -> f64 {
    let delta = x - 1.0;
    if delta <= 0.0 {
        return 0.0;
    }
    if delta < 1e-6 {
        // stable branch near x = 1: G ~ (d/2) log2(2e/d)
        let half = 0.5 * delta;
        return (1.0 + half) * half.ln_1p() / std::f64::consts::LN_2 - half * half.log2();
    }
    let up = 0.5 * (x + 1.0);
    let dn = 0.5 * delta;
    up * up.log2() - dn * dn.log2()
}

fn clamp_lambda(x: f64) -> Result<f64, KeyRateError> {
    if x >= 1.0 {
        Ok(x)
    } else if x > 1.0 - 1e-9 {
        Ok(1.0)
    } else {
        Err(KeyRateError::UnphysicalEigenvalue(x))
    }
}

fn split_quadratic(sum: f64, prod: f64) -> Result<(f64, f64), KeyRateError> {
    // roots^2 of z^2 - sum z + prod, i.e. lambda = sqrt((sum +- sqrt(disc))/2)
    let disc = sum * sum - 4.0 * prod;
    let tol = 1e-9 * sum.abs().max(1.0).powi(2);
    if disc < -tol {
        return Err(KeyRateError::NegativeDiscriminant(disc));
    }
    let root = disc.max(0.0).sqrt();
    let hi = 0.5 * (sum + root);
    let lo = 0.5 * (sum - root);
    if hi < 0.0 || lo < -tol {
        return Err(KeyRateError::NegativeDiscriminant(lo.min(hi)));
    }
    Ok((hi.max(0.0).sqrt(), lo.max(0.0).sqrt()))
}

/// Symplectic eigenvalues (lambda1, lambda2) of the shared state and
/// (lambda3, lambda4) of the state conditioned on the receiver's trusted
/// measurement, from the closed forms
/// A = V^2(1-2T) + 2T + T^2 (V+Xch)^2, B = T^2 (V Xch + 1)^2 and the
/// detection-specific C, D.
pub fn symplectic_lambdas(
    v: f64,
    noise: &NoiseBudget,
    detection: Detection,
) -> Result<[f64; 4], KeyRateError> {
    if !(v >= 1.0) {
        return Err(KeyRateError::InvalidParam(format!("modulated variance V = {v} must be >= 1")));
    }
    let t = noise.t;
    let xch = noise.xi_ch();
    let xdet = noise.xi_det(detection);
    let xtot = noise.xi_tot(detection);

    let a = v * v * (1.0 - 2.0 * t) + 2.0 * t + t * t * (v + xch) * (v + xch);
    let b = t * t * (v * xch + 1.0) * (v * xch + 1.0);
    let (l1, l2) = split_quadratic(a, b)?;

    let sqrt_b = b.sqrt();
    let denom = t * (v + xtot);
    let (c, d) = match detection {
        Detection::Heterodyne => {
            let c = (a * xdet * xdet
                + b
                + 1.0
                + 2.0 * xdet * (v * sqrt_b + t * (v + xch))
                + 2.0 * t * (v * v - 1.0))
                / (denom * denom);
            let d = (v + sqrt_b * xdet) / denom;
            (c, d * d)
        }
        Detection::Homodyne => {
            let c = (v * sqrt_b + t * (v + xch) + a * xdet) / denom;
            let d = sqrt_b * (v + sqrt_b * xdet) / denom;
            (c, d)
        }
    };
    let (l3, l4) = split_quadratic(c, d)?;

    Ok([clamp_lambda(l1)?, clamp_lambda(l2)?, clamp_lambda(l3)?, clamp_lambda(l4)?])
}

/// Holevo information between Eve and the receiver's outcomes under a
/// collective attack: chi = G(l1) + G(l2) - G(l3) - G(l4).
pub fn holevo_bound(v: f64, noise: &NoiseBudget, detection: Detection) -> Result<f64, KeyRateError> {
    let l = symplectic_lambdas(v, noise, detection)?;
    Ok(g_von_neumann(l[0]) + g_von_neumann(l[1]) - g_von_neumann(l[2]) - g_von_neumann(l[3]))
}

/// Mutual information between the modulation and the measurement outcomes.
pub fn mutual_information(v: f64, noise: &NoiseBudget, detection: Detection) -> f64 {
    let xtot = noise.xi_tot(detection);
    let full = ((v + xtot) / (1.0 + xtot)).log2();
    match detection {
        Detection::Heterodyne => full,
        Detection::Homodyne => 0.5 * full,
    }
}

/// One evaluated rate with its information-theoretic pieces.
#[derive(Debug, Clone, Copy)]
pub struct RateBreakdown {
    pub i_ab: f64,
    pub chi_be: f64,
    /// Key rate in bits per pulse, clipped at zero.
    pub rate: f64,
}

/// Asymptotic secret key rate r = max(0, beta I_AB - chi_BE).
pub fn asymptotic_rate(
    v_mod: f64,
    noise: &NoiseBudget,
    beta: f64,
    detection: Detection,
) -> Result<RateBreakdown, KeyRateError> {
    if !(v_mod >= 0.0) {
        return Err(KeyRateError::InvalidParam(format!("v_mod {v_mod} must be >= 0")));
    }
    let v = 1.0 + v_mod;
    let i_ab = mutual_information(v, noise, detection);
    let chi_be = holevo_bound(v, noise, detection)?;
    Ok(RateBreakdown { i_ab, chi_be, rate: (beta * i_ab - chi_be).max(0.0) })
}

/// Repeaterless secret-key capacity of a pure-loss channel, -log2(1 - T).
pub fn plob_bound(t: f64) -> Result<f64, KeyRateError> {
    if !(t > 0.0) {
        return Err(KeyRateError::InvalidParam(format!("transmissivity {t} must be positive")));
    }
    if t >= 1.0 {
        return Err(KeyRateError::DivergentPlob);
    }
    Ok(-(-t).ln_1p() / std::f64::consts::LN_2)
}

/// Outcome-discretization alphabet size used in the leakage term of the
/// finite-size correction (8-bit digitization per quadrature).
pub const DISCRETIZATION_BINS: f64 = 256.0;

/// Composable finite-size evaluation parameters.
#[derive(Debug, Clone, Copy)]
pub struct FiniteSizeParams {
    /// Total number of pulses N in the block.
    pub block_size: f64,
    /// Fraction of pulses sacrificed for parameter estimation (m = f N).
    pub m_fraction: f64,
    /// Security parameter used for estimation confidence, smoothing and
    /// hashing alike.
    pub epsilon: f64,
    /// Probability that error correction succeeds.
    pub p_ec: f64,
}

impl FiniteSizeParams {
    pub fn new(block_size: f64) -> Self {
        FiniteSizeParams { block_size, m_fraction: 0.1, epsilon: 2f64.powi(-32), p_ec: 0.95 }
    }

    fn validate(&self) -> Result<(), KeyRateError> {
        if !(self.block_size >= 1e4) {
            return Err(KeyRateError::InvalidParam(format!(
                "block size {} below 1e4",
                self.block_size
            )));
        }
        if !(self.m_fraction > 0.0 && self.m_fraction < 1.0) {
            return Err(KeyRateError::InvalidParam(format!(
                "m_fraction {} outside (0, 1)",
                self.m_fraction
            )));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 0.5) || !(self.p_ec > 0.0 && self.p_ec <= 1.0) {
            return Err(KeyRateError::InvalidParam("epsilon in (0, 0.5), p_ec in (0, 1] required".into()));
        }
        let m = self.m_fraction * self.block_size;
        if m < 1e3 {
            return Err(KeyRateError::ParameterEstimation(format!(
                "m = {m:.0} estimation pulses too few for confidence epsilon = {:.3e}",
                self.epsilon
            )));
        }
        Ok(())
    }
}

/// Worst-case channel parameters consistent with maximum-likelihood
/// estimation over the sacrificed pulses at confidence epsilon.
#[derive(Debug, Clone, Copy)]
pub struct WorstCaseChannel {
    pub t_wc: f64,
    pub xi_wc: f64,
}

/// Worst-case (T lowered, xi raised) channel parameters seen by the key
/// bound after estimating over m pulses.
///
/// Estimation model: y = sqrt(T) x + z with x the known modulation
/// (variance V_mod) and Var(z) = 1 + T xi after the trusted detector is
/// calibrated out. sqrt(T) carries standard error sqrt(Var(z)/(m_eff V_mod))
/// and the noise-variance estimate carries Var(z) sqrt(2/m_eff); heterodyne
/// yields both quadratures, so m_eff = 2m.
pub fn worst_case_channel(
    v_mod: f64,
    noise: &NoiseBudget,
    detection: Detection,
    fs: &FiniteSizeParams,
) -> Result<WorstCaseChannel, KeyRateError> {
    fs.validate()?;
    if !(v_mod > 0.0) {
        return Err(KeyRateError::InvalidParam("finite-size bound needs v_mod > 0".into()));
    }
    let m = fs.m_fraction * fs.block_size;
    let m_eff = match detection {
        Detection::Heterodyne => 2.0 * m,
        Detection::Homodyne => m,
    };
    let w = std::f64::consts::SQRT_2 * erfc_inv(2.0 * fs.epsilon);
    let sigma2 = 1.0 + noise.t * noise.xi;
    let tau_wc = (noise.t.sqrt() - w * (sigma2 / (m_eff * v_mod)).sqrt()).max(0.0);
    let t_wc = tau_wc * tau_wc;
    let sigma2_wc = sigma2 * (1.0 + w * (2.0 / m_eff).sqrt());
    let xi_wc = if t_wc > 0.0 { ((sigma2_wc - 1.0) / t_wc).max(0.0) } else { f64::INFINITY };
    Ok(WorstCaseChannel { t_wc, xi_wc })
}

/// Composable finite-size key rate
/// r = (n/N) p_ec [ beta I_AB - chi_BE^{wc} - Delta_AEP/sqrt(n) + Theta/n ],
/// clipped at zero, with the Holevo term taken at the worst-case channel
/// parameters and the asymptotic-equipartition and hashing corrections
/// pinned by the block's epsilon budget.
pub fn finite_size_rate(
    v_mod: f64,
    noise: &NoiseBudget,
    beta: f64,
    detection: Detection,
    fs: &FiniteSizeParams,
) -> Result<RateBreakdown, KeyRateError> {
    let wc = worst_case_channel(v_mod, noise, detection, fs)?;
    let n_total = fs.block_size;
    let n = n_total * (1.0 - fs.m_fraction);
    let v = 1.0 + v_mod;

    let i_ab = mutual_information(v, noise, detection);
    if wc.t_wc <= 0.0 {
        return Ok(RateBreakdown { i_ab, chi_be: f64::INFINITY, rate: 0.0 });
    }
    let wc_budget = NoiseBudget { t: wc.t_wc, xi: wc.xi_wc, ..*noise };
    let chi_wc = holevo_bound(v, &wc_budget, detection)?;

    let eps = fs.epsilon;
    let delta_aep = 4.0
        * (DISCRETIZATION_BINS.sqrt() + 2.0).log2()
        * (18.0 / (fs.p_ec * fs.p_ec * eps.powi(4))).log2().sqrt();
    let theta = (fs.p_ec * (1.0 - eps * eps / 3.0)).log2()
        + 2.0 * (std::f64::consts::SQRT_2 * eps).log2();

    let r = (n / n_total)
        * fs.p_ec
        * (beta * i_ab - chi_wc - delta_aep / n.sqrt() + theta / n);
    Ok(RateBreakdown { i_ab, chi_be: chi_wc, rate: r.max(0.0) })
}

/// Result of the modulation-variance search.
#[derive(Debug, Clone, Copy)]
pub struct OptimumVmod {
    /// Optimal modulation variance; NaN when no positive rate exists.
    pub v_mod: f64,
    pub breakdown: RateBreakdown,
}

/// Search bounds for the modulation variance.
pub const VMOD_SEARCH_RANGE: (f64, f64) = (1e-3, 1e3);

/// Maximize the (asymptotic or finite-size) rate over the modulation
/// variance: coarse logarithmic scan to bracket the peak, then
/// golden-section refinement to relative tolerance 1e-4.
pub fn optimize_vmod(
    noise: &NoiseBudget,
    beta: f64,
    detection: Detection,
    fs: Option<&FiniteSizeParams>,
) -> Result<OptimumVmod, KeyRateError> {
    if let Some(fs) = fs {
        fs.validate()?;
    }
    let eval = |v_mod: f64| -> RateBreakdown {
        let res = match fs {
            Some(fs) => finite_size_rate(v_mod, noise, beta, detection, fs),
            None => asymptotic_rate(v_mod, noise, beta, detection),
        };
        res.unwrap_or(RateBreakdown { i_ab: 0.0, chi_be: f64::INFINITY, rate: 0.0 })
    };

    let (lo, hi) = VMOD_SEARCH_RANGE;
    let scan_points = 121;
    let log_lo = lo.log10();
    let step = (hi.log10() - log_lo) / (scan_points - 1) as f64;
    let mut best_idx = 0;
    let mut best = eval(lo);
    let grid: Vec<f64> =
        (0..scan_points).map(|i| 10f64.powf(log_lo + step * i as f64)).collect();
    for (i, &v) in grid.iter().enumerate() {
        let b = eval(v);
        if b.rate > best.rate {
            best = b;
            best_idx = i;
        }
    }
    if best.rate <= 0.0 {
        return Ok(OptimumVmod {
            v_mod: f64::NAN,
            breakdown: RateBreakdown { i_ab: 0.0, chi_be: 0.0, rate: 0.0 },
        });
    }

    // golden-section inside the bracketing neighbours of the scan peak
    let mut a = grid[best_idx.saturating_sub(1)];
    let mut b = grid[(best_idx + 1).min(scan_points - 1)];
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = eval(x1).rate;
    let mut f2 = eval(x2).rate;
    while (b - a) > 1e-4 * 0.5 * (a + b) {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = eval(x2).rate;
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = eval(x1).rate;
        }
    }
    let v_opt = 0.5 * (a + b);
    let refined = eval(v_opt);
    let (v_best, breakdown) =
        if refined.rate >= best.rate { (v_opt, refined) } else { (grid[best_idx], best) };
    Ok(OptimumVmod { v_mod: v_best, breakdown })
}

/// Two-mode covariance matrix in the symmetric block form
/// [[a I2, c sz], [c sz, b I2]] with sz = diag(1, -1).
#[derive(Debug, Clone, Copy)]
pub struct TwoModeCov {
    pub var_a: f64,
    pub cov: f64,
    pub var_b: f64,
}

impl TwoModeCov {
    /// Covariance matrix of the entangled-state description after the
    /// channel: blocks (V, sqrt(T(V^2-1)), T(V+Xch)).
    pub fn channel_output(v: f64, t: f64, xi_ch: f64) -> Self {
        TwoModeCov { var_a: v, cov: (t * (v * v - 1.0)).sqrt(), var_b: t * (v + xi_ch) }
    }

    /// Dense 4x4 matrix, mode order (A, B), quadrature order (x, p).
    pub fn matrix(&self) -> nalgebra::Matrix4<f64> {
        let (a, c, b) = (self.var_a, self.cov, self.var_b);
        nalgebra::Matrix4::new(
            a, 0.0, c, 0.0, //
            0.0, a, 0.0, -c, //
            c, 0.0, b, 0.0, //
            0.0, -c, 0.0, b,
        )
    }

    /// Symplectic eigenvalues from the block invariants
    /// Delta = a^2 + b^2 - 2c^2 and det = (ab - c^2)^2.
    pub fn symplectic_eigenvalues(&self) -> Result<(f64, f64), KeyRateError> {
        let (a, c, b) = (self.var_a, self.cov, self.var_b);
        let delta = a * a + b * b - 2.0 * c * c;
        let det = (a * b - c * c) * (a * b - c * c);
        split_quadratic(delta, det)
    }

    /// Physicality: both symplectic eigenvalues >= 1 - tol.
    pub fn is_physical(&self, tol: f64) -> bool {
        match self.symplectic_eigenvalues() {
            Ok((hi, lo)) => lo >= 1.0 - tol && hi >= 1.0 - tol,
            Err(_) => false,
        }
    }
}
