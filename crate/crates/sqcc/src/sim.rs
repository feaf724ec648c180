//! Shot-level Monte Carlo of the full protocol chain.
//!
//! Each shot carries one classical bit in the dominant linear polarization
//! and a Gaussian QKD modulation on the sideband modes of the weak
//! orthogonal component. The mean fields are time-sampled and pushed
//! through the actual receiver optics (Jones matrices of the measurement
//! arms); quantum fluctuations ride the two sideband modes as Gaussian
//! quadrature samples in shot-noise units and are propagated by
//! beam-splitter algebra. Reported quadratures are referred to the channel
//! output, where the vacuum unit is 1 and the modulated variance is
//! T(V + Xch) plus the trusted detection penalty.
//!
//! Determinism: every shot draws from the ChaCha substream indexed by its
//! shot counter, and campaign reductions fold fixed-size batches in order,
//! so results are bit-identical for a given seed regardless of threading.

use crate::keyrate::{Detection, NoiseBudget};
use crate::mueller::{jones_hwp, jones_pockels, jones_qwp, JonesMatrix, MODULATOR_HWP_ANGLE};
use crate::rng::shot_rng;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use thiserror::Error;

type C = Complex64;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("sideband separation violated: omega_d * sigma_pulse = {0:.3} must exceed 1")]
    SidebandSeparation(f64),
    #[error("invalid protocol parameters: {0}")]
    InvalidParams(String),
    #[error("normalization failure: measured S1 is zero")]
    NormalizationFailure,
    #[error("campaign needs at least {min} shots, got {got}")]
    TooFewShots { min: u64, got: u64 },
}

/// Classical bit source for a campaign.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BitPattern {
    /// Independent uniform bits (default).
    Random,
    /// Constant bit, for regression tests.
    Fixed(bool),
    /// 1, 0, 1, 0, ... by shot index.
    Alternating,
}

/// All physical and protocol knobs of a simulated link.
#[derive(Debug, Clone, Copy)]
pub struct ProtocolParams {
    /// Transmitter carrier amplitude, sqrt-photon units.
    pub alpha: f64,
    /// QKD modulation variance in shot-noise units.
    pub v_mod: f64,
    /// Channel loss in dB; T = 10^(-loss/10).
    pub loss_db: f64,
    /// Receiver front splitter transmittance; the transmitted share eta
    /// feeds the classical decoder, the reflected 1 - eta the quantum one.
    pub eta: f64,
    /// Untrusted excess noise at channel input, shot-noise units.
    pub xi: f64,
    /// Electronic noise of a photodetector pair, shot-noise units.
    pub nu_el: f64,
    /// Sideband modulation angular frequency, rad/s.
    pub omega_d: f64,
    /// Gaussian temporal pulse width (standard deviation), s.
    pub sigma_pulse: f64,
    /// Time samples per pulse across +-4 sigma.
    pub samples_per_pulse: usize,
    pub detection: Detection,
    pub bit_pattern: BitPattern,
    pub seed: u64,
}

impl Default for ProtocolParams {
    fn default() -> Self {
        ProtocolParams {
            alpha: 1e3,
            v_mod: 4.0,
            loss_db: 0.0,
            eta: 0.5,
            xi: 0.01,
            nu_el: 0.1,
            omega_d: 2.0 * std::f64::consts::PI * 30e6,
            sigma_pulse: 20e-9,
            samples_per_pulse: 256,
            detection: Detection::Heterodyne,
            bit_pattern: BitPattern::Random,
            seed: 0,
        }
    }
}

impl ProtocolParams {
    pub fn t(&self) -> f64 {
        crate::keyrate::transmissivity(self.loss_db)
    }

    /// Share of received light routed to the quantum decoder.
    pub fn quantum_share(&self) -> f64 {
        1.0 - self.eta
    }

    pub fn noise_budget(&self) -> Result<NoiseBudget, SimError> {
        NoiseBudget::new(self.t(), self.xi, self.eta, self.nu_el)
            .map_err(|e| SimError::InvalidParams(e.to_string()))
    }

    /// Trusted detection noise on the channel-output-referred quadratures,
    /// evaluated at the quantum arm's actual share (1 - eta).
    pub fn detection_noise_referred(&self) -> f64 {
        let eta_q = self.quantum_share();
        match self.detection {
            Detection::Heterodyne => (2.0 - eta_q + 2.0 * self.nu_el) / eta_q,
            Detection::Homodyne => (1.0 - eta_q + self.nu_el) / eta_q,
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let t = self.t();
        if !(t > 0.0 && t <= 1.0) || !self.loss_db.is_finite() {
            return Err(SimError::InvalidParams(format!("loss_db {} gives T outside (0,1]", self.loss_db)));
        }
        if !(self.eta >= 0.0 && self.eta < 1.0) {
            return Err(SimError::InvalidParams(format!(
                "eta {} must lie in [0, 1) so the quantum arm receives light",
                self.eta
            )));
        }
        if !(self.alpha > 0.0) || !(self.v_mod >= 0.0) || !(self.xi >= 0.0) || !(self.nu_el >= 0.0) {
            return Err(SimError::InvalidParams(
                "alpha > 0 and v_mod, xi, nu_el >= 0 required".into(),
            ));
        }
        if self.samples_per_pulse < 16 {
            return Err(SimError::InvalidParams(format!(
                "samples_per_pulse {} too coarse for the mixdown",
                self.samples_per_pulse
            )));
        }
        let sep = self.omega_d.abs() * self.sigma_pulse;
        if !(sep > 1.0) {
            return Err(SimError::SidebandSeparation(sep));
        }
        Ok(())
    }
}

/// Precomputed time grid, pulse envelope and mixdown constants.
#[derive(Debug, Clone)]
pub struct PulseGrid {
    /// Trapezoid quadrature weights.
    pub weights: Vec<f64>,
    /// Photon-flux envelope f(t_i), normalized to unit integral.
    pub envelope: Vec<f64>,
    pub sqrt_envelope: Vec<f64>,
    pub cos_wd: Vec<f64>,
    pub sin_wd: Vec<f64>,
    /// Discrete mixdown gains sum(w f cos^2) and sum(w f sin^2).
    pub k_cos: f64,
    pub k_sin: f64,
}

impl PulseGrid {
    pub fn new(params: &ProtocolParams) -> Self {
        let n = params.samples_per_pulse;
        let sigma = params.sigma_pulse;
        let half_span = 4.0 * sigma;
        let dt = 2.0 * half_span / (n - 1) as f64;
        let norm = 1.0 / (sigma * (2.0 * std::f64::consts::PI).sqrt());
        let mut weights = vec![dt; n];
        weights[0] = 0.5 * dt;
        weights[n - 1] = 0.5 * dt;
        let mut envelope = Vec::with_capacity(n);
        let mut cos_wd = Vec::with_capacity(n);
        let mut sin_wd = Vec::with_capacity(n);
        for i in 0..n {
            let t = -half_span + dt * i as f64;
            envelope.push(norm * (-0.5 * (t / sigma) * (t / sigma)).exp());
            let (s, c) = (params.omega_d * t).sin_cos();
            cos_wd.push(c);
            sin_wd.push(s);
        }
        let sqrt_envelope = envelope.iter().map(|f| f.sqrt()).collect();
        let k_cos = (0..n).map(|i| weights[i] * envelope[i] * cos_wd[i] * cos_wd[i]).sum();
        let k_sin = (0..n).map(|i| weights[i] * envelope[i] * sin_wd[i] * sin_wd[i]).sum();
        PulseGrid { weights, envelope, sqrt_envelope, cos_wd, sin_wd, k_cos, k_sin }
    }
}

/// Quadrature fluctuation samples riding the two sideband modes, in
/// shot-noise units referred to the current position in the chain.
#[derive(Debug, Clone, Copy, Default)]
pub struct SidebandFluct {
    /// Amplitude-quadrature sample of the cosine sideband mode (S2' path).
    pub plus: f64,
    /// Phase-quadrature sample of the sine sideband mode (S3' path).
    pub minus: f64,
}

/// One propagating pulse: time-sampled mean fields plus sideband
/// fluctuation samples.
#[derive(Debug, Clone)]
pub struct TwoModeField {
    pub a_h: Vec<C>,
    pub a_v: Vec<C>,
    /// Carrier amplitude of the dominant component, sqrt-photon units.
    pub carrier: f64,
    /// True when the dominant component is V (classical bit 0).
    pub strong_v: bool,
    pub fluct: SidebandFluct,
}

fn draw_std(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// Encode one shot: QKD modulation of the sideband modes followed by the
/// Pockels-cell classical encoding.
///
/// The weak component's mean field is alpha sqrt(f(t)) (-i a sin(w_d t)
/// + b cos(w_d t)) with a, b ~ N(0, v_mod/alpha^2) drawn per shot; bit 0
/// swaps the H and V roles. Vacuum quadrature samples are attached to the
/// two sideband modes.
pub fn encode_shot(
    params: &ProtocolParams,
    grid: &PulseGrid,
    bit: bool,
    rng: &mut ChaCha8Rng,
) -> Result<(TwoModeField, f64, f64), SimError> {
    params.validate()?;
    let sigma_mod = params.v_mod.sqrt() / params.alpha;
    let a = sigma_mod * draw_std(rng);
    let b = sigma_mod * draw_std(rng);

    let n = grid.envelope.len();
    let mut a_h = Vec::with_capacity(n);
    let mut a_v = Vec::with_capacity(n);
    fill_encoded_fields(params, grid, bit, a, b, &mut a_h, &mut a_v);

    let fluct = SidebandFluct { plus: draw_std(rng), minus: draw_std(rng) };
    Ok((TwoModeField { a_h, a_v, carrier: params.alpha, strong_v: !bit, fluct }, a, b))
}

fn fill_encoded_fields(
    params: &ProtocolParams,
    grid: &PulseGrid,
    bit: bool,
    a: f64,
    b: f64,
    a_h: &mut Vec<C>,
    a_v: &mut Vec<C>,
) {
    a_h.clear();
    a_v.clear();
    let pockels = jones_pockels(!bit);
    for i in 0..grid.envelope.len() {
        let amp = params.alpha * grid.sqrt_envelope[i];
        let strong = C::new(amp, 0.0);
        let weak = C::new(b * grid.cos_wd[i], -a * grid.sin_wd[i]) * amp;
        let (h, v) = pockels.apply((strong, weak));
        a_h.push(h);
        a_v.push(v);
    }
}

/// Propagate through the fixed-transmissivity channel: amplitudes scale by
/// sqrt(T); each tracked quadrature mixes with vacuum at a T : 1-T beam
/// splitter and picks up excess noise of variance T xi.
pub fn transmit(field: &mut TwoModeField, t: f64, xi: f64, rng: &mut ChaCha8Rng) {
    let root_t = t.sqrt();
    for z in field.a_h.iter_mut().chain(field.a_v.iter_mut()) {
        *z *= root_t;
    }
    field.carrier *= root_t;
    let excess_sd = (t * xi).sqrt();
    let vac_sd = (1.0 - t).sqrt();
    field.fluct.plus = root_t * field.fluct.plus + vac_sd * draw_std(rng) + excess_sd * draw_std(rng);
    field.fluct.minus =
        root_t * field.fluct.minus + vac_sd * draw_std(rng) + excess_sd * draw_std(rng);
}

/// Direct-detection classical decoding on the transmitted splitter port:
/// sign of the measured S1 decides the bit.
///
/// The decision variable uses the carrier powers only (the sideband power
/// is second order in the modulation indices and is dropped with the rest
/// of the second-order terms), with noise variance eta T alpha^2
/// (1 + nu_el)/4 so the ensemble error rate reproduces the erfc-form BER.
pub fn decode_classical(
    field: &TwoModeField,
    eta: f64,
    nu_el: f64,
    rng: &mut ChaCha8Rng,
) -> (bool, f64) {
    let arm_power = eta * field.carrier * field.carrier;
    let signal = if field.strong_v { -arm_power } else { arm_power };
    let sd = 0.5 * (arm_power * (1.0 + nu_el)).sqrt();
    let s1 = signal + sd * draw_std(rng);
    (s1 >= 0.0, s1)
}

/// Measurement-arm Jones matrices, built once per campaign.
#[derive(Debug, Clone, Copy)]
pub struct MeasurementOptics {
    /// S2 arm: half-wave plate at 22.5 deg, PBS difference.
    pub s2_arm: JonesMatrix,
    /// S3 arm: half-wave plate at 22.5 deg then quarter-wave plate at
    /// 45 deg, PBS difference.
    pub s3_arm: JonesMatrix,
}

impl MeasurementOptics {
    pub fn new() -> Self {
        MeasurementOptics {
            s2_arm: jones_hwp(MODULATOR_HWP_ANGLE),
            s3_arm: jones_qwp(std::f64::consts::FRAC_PI_4).after(&jones_hwp(MODULATOR_HWP_ANGLE)),
        }
    }
}

impl Default for MeasurementOptics {
    fn default() -> Self {
        Self::new()
    }
}

fn mixdown_arm(
    optics: &JonesMatrix,
    field: &TwoModeField,
    grid: &PulseGrid,
    arm_amp: f64,
    reference: &[f64],
) -> f64 {
    let mut acc = 0.0;
    for i in 0..grid.envelope.len() {
        let (eh, ev) = optics.apply((field.a_h[i] * arm_amp, field.a_v[i] * arm_amp));
        let diff = eh.norm_sqr() - ev.norm_sqr();
        acc += grid.weights[i] * diff * reference[i];
    }
    acc
}

/// Quantum decoding on the reflected splitter port: photocurrent
/// difference of the arm optics, digital mixdown against cos/sin(w_d t),
/// and normalization by the recorded S1 (share-corrected), yielding
/// quadratures referred to the channel output.
///
/// Homodyne randomly selects one arm per shot; heterodyne splits 50:50 and
/// returns both, each paying the extra vacuum unit.
pub fn decode_quantum(
    field: &TwoModeField,
    params: &ProtocolParams,
    grid: &PulseGrid,
    optics: &MeasurementOptics,
    s1_measured: f64,
    rng: &mut ChaCha8Rng,
) -> Result<(Option<f64>, Option<f64>), SimError> {
    if s1_measured == 0.0 {
        return Err(SimError::NormalizationFailure);
    }
    let eta_q = params.quantum_share();
    let arm_share = match params.detection {
        Detection::Heterodyne => 0.5 * eta_q,
        Detection::Homodyne => eta_q,
    };
    // channel-output carrier power estimated from the recorded S1
    let power_hat = s1_measured.abs() / params.eta;
    let arm_power_hat = power_hat * arm_share;
    let scale_hat = power_hat.sqrt();

    // detection-chain vacuum and electronic noise, referred to channel
    // output by the known arm gain
    let vac_det = ((1.0 - arm_share) / arm_share).sqrt();
    let el_det = (params.nu_el / arm_share).sqrt();

    // draws are consumed in a fixed order regardless of the branch taken
    let det_plus = draw_std(rng);
    let det_minus = draw_std(rng);
    let el_plus = draw_std(rng);
    let el_minus = draw_std(rng);
    let pick_s2 = rng.gen::<bool>();

    let arm_amp = arm_share.sqrt();
    let mut quad_plus = None;
    let mut quad_minus = None;

    let do_plus = params.detection == Detection::Heterodyne || pick_s2;
    let do_minus = params.detection == Detection::Heterodyne || !pick_s2;

    if do_plus {
        let raw = mixdown_arm(&optics.s2_arm, field, grid, arm_amp, &grid.cos_wd);
        let b_hat = raw / (2.0 * grid.k_cos * arm_power_hat);
        // the pi/2 Pockels rotation flips S2 together with S1, so the
        // recorded S1 sign restores the modulation sign
        let sign = s1_measured.signum();
        let noise = field.fluct.plus + vac_det * det_plus + el_det * el_plus;
        quad_plus = Some(sign * b_hat * scale_hat + noise);
    }
    if do_minus {
        let raw = mixdown_arm(&optics.s3_arm, field, grid, arm_amp, &grid.sin_wd);
        let a_hat = raw / (2.0 * grid.k_sin * arm_power_hat);
        // S3 is invariant under the Pockels rotation; the constant sign
        // calibrates the readout to correlate positively with the
        // modulation index a
        let noise = field.fluct.minus + vac_det * det_minus + el_det * el_minus;
        quad_minus = Some(-a_hat * scale_hat + noise);
    }
    Ok((quad_plus, quad_minus))
}

/// One simulated pulse.
#[derive(Debug, Clone, Copy)]
pub struct ShotRecord {
    pub bit_tx: bool,
    /// Gaussian modulation indices of the sine and cosine sidebands.
    pub a: f64,
    pub b: f64,
    pub s1_measured: f64,
    pub bit_rx: bool,
    /// Mixed-down S2' quadrature, channel-output referred (None when the
    /// homodyne switch picked the other arm).
    pub quad_plus: Option<f64>,
    pub quad_minus: Option<f64>,
}

fn pattern_bit(pattern: BitPattern, drawn: bool, shot_index: u64) -> bool {
    match pattern {
        BitPattern::Random => drawn,
        BitPattern::Fixed(b) => b,
        BitPattern::Alternating => shot_index % 2 == 0,
    }
}

/// Simulate one full shot from its counter-indexed substream.
pub fn simulate_shot(
    params: &ProtocolParams,
    grid: &PulseGrid,
    optics: &MeasurementOptics,
    shot_index: u64,
) -> Result<ShotRecord, SimError> {
    let mut rng = shot_rng(params.seed, shot_index);
    // classical-path draws come first so the classical outcome is
    // independent of everything drawn for the quantum path
    let drawn_bit = rng.gen::<bool>();
    let bit_tx = pattern_bit(params.bit_pattern, drawn_bit, shot_index);
    let z_s1: f64 = draw_std(&mut rng);

    let (mut field, a, b) = encode_shot(params, grid, bit_tx, &mut rng)?;
    transmit(&mut field, params.t(), params.xi, &mut rng);

    // classical decode, reusing the pre-drawn noise sample
    let arm_power = params.eta * field.carrier * field.carrier;
    let signal = if field.strong_v { -arm_power } else { arm_power };
    let s1_measured = signal + 0.5 * (arm_power * (1.0 + params.nu_el)).sqrt() * z_s1;
    let bit_rx = s1_measured >= 0.0;

    let (quad_plus, quad_minus) =
        decode_quantum(&field, params, grid, optics, s1_measured, &mut rng)?;
    Ok(ShotRecord { bit_tx, a, b, s1_measured, bit_rx, quad_plus, quad_minus })
}

/// Classical-only fast path: same substream, same leading draws, so the
/// decoded bit matches [`simulate_shot`] exactly.
pub fn simulate_shot_classical(params: &ProtocolParams, shot_index: u64) -> (bool, bool) {
    let mut rng = shot_rng(params.seed, shot_index);
    let drawn_bit = rng.gen::<bool>();
    let bit_tx = pattern_bit(params.bit_pattern, drawn_bit, shot_index);
    let z_s1: f64 = draw_std(&mut rng);
    let arm_power = params.eta * params.t() * params.alpha * params.alpha;
    let signal = if bit_tx { arm_power } else { -arm_power };
    let s1 = signal + 0.5 * (arm_power * (1.0 + params.nu_el)).sqrt() * z_s1;
    (bit_tx, s1 >= 0.0)
}

/// Aggregated campaign results with standard errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimReport {
    pub n_shots: u64,
    pub ber_empirical: f64,
    pub ber_se: f64,
    /// Empirical variance of the channel-output-referred S2' quadrature
    /// (includes the trusted detection penalty).
    pub var_s2p: f64,
    pub var_s2p_se: f64,
    pub var_s3p: f64,
    pub var_s3p_se: f64,
    /// Covariance of Alice's modulation (alpha b, alpha a) with the
    /// matching measured quadrature.
    pub cov_plus: f64,
    pub cov_minus: f64,
    /// Channel transmissivity estimate from the pooled regression.
    pub t_hat: f64,
    pub t_hat_se: f64,
    /// Channel excess-noise estimate (detection noise subtracted).
    pub xi_hat: f64,
    pub xi_hat_se: f64,
    /// Empirical modulated variance V = Var(alpha a, alpha b pooled) + 1.
    pub v_hat: f64,
    pub v_hat_se: f64,
    pub n_plus: u64,
    pub n_minus: u64,
}

#[derive(Default, Clone, Copy)]
struct Accumulator {
    n: u64,
    errors: u64,
    // per quadrature channel: count, sum x, sum y, sum xy, sum x^2, sum y^2
    plus: [f64; 6],
    minus: [f64; 6],
}

impl Accumulator {
    fn add_quad(slot: &mut [f64; 6], x: f64, y: f64) {
        slot[0] += 1.0;
        slot[1] += x;
        slot[2] += y;
        slot[3] += x * y;
        slot[4] += x * x;
        slot[5] += y * y;
    }

    fn merge(&mut self, other: &Accumulator) {
        self.n += other.n;
        self.errors += other.errors;
        for i in 0..6 {
            self.plus[i] += other.plus[i];
            self.minus[i] += other.minus[i];
        }
    }
}

const BATCH: u64 = 1 << 14;

/// Minimum campaign size accepted by [`run_campaign`].
pub const MIN_CAMPAIGN_SHOTS: u64 = 1_000;

/// Run a full campaign of `n_shots` shots and aggregate.
///
/// Deterministic for a given seed: shots use counter-indexed substreams and
/// batches are folded in fixed order.
pub fn run_campaign(params: &ProtocolParams, n_shots: u64) -> Result<SimReport, SimError> {
    if n_shots < MIN_CAMPAIGN_SHOTS {
        return Err(SimError::TooFewShots { min: MIN_CAMPAIGN_SHOTS, got: n_shots });
    }
    params.validate()?;
    let grid = PulseGrid::new(params);
    let optics = MeasurementOptics::new();
    let n_batches = n_shots.div_ceil(BATCH);

    let partials: Result<Vec<Accumulator>, SimError> = (0..n_batches)
        .into_par_iter()
        .map(|batch| {
            let lo = batch * BATCH;
            let hi = ((batch + 1) * BATCH).min(n_shots);
            let mut acc = Accumulator::default();
            for idx in lo..hi {
                let shot = simulate_shot(params, &grid, &optics, idx)?;
                acc.n += 1;
                acc.errors += u64::from(shot.bit_rx != shot.bit_tx);
                let x_plus = params.alpha * shot.b;
                let x_minus = params.alpha * shot.a;
                if let Some(q) = shot.quad_plus {
                    Accumulator::add_quad(&mut acc.plus, x_plus, q);
                }
                if let Some(q) = shot.quad_minus {
                    Accumulator::add_quad(&mut acc.minus, x_minus, q);
                }
            }
            Ok(acc)
        })
        .collect();
    let mut total = Accumulator::default();
    for acc in partials?.iter() {
        total.merge(acc);
    }
    Ok(summarize(params, &total))
}

fn channel_stats(slot: &[f64; 6]) -> (f64, f64, f64, f64) {
    // returns (n, var_y, cov_xy, var_x)
    let n = slot[0];
    if n < 2.0 {
        return (n, f64::NAN, f64::NAN, f64::NAN);
    }
    let mean_x = slot[1] / n;
    let mean_y = slot[2] / n;
    let var_y = slot[5] / n - mean_y * mean_y;
    let cov = slot[3] / n - mean_x * mean_y;
    let var_x = slot[4] / n - mean_x * mean_x;
    (n, var_y, cov, var_x)
}

fn summarize(params: &ProtocolParams, acc: &Accumulator) -> SimReport {
    let n = acc.n as f64;
    let ber = acc.errors as f64 / n;
    let ber_se = (ber * (1.0 - ber) / n).sqrt();

    let (n_p, var_p, cov_p, _) = channel_stats(&acc.plus);
    let (n_m, var_m, cov_m, _) = channel_stats(&acc.minus);

    // pooled regression of measured quadratures on the known modulation
    let sxy = acc.plus[3] + acc.minus[3];
    let sxx = acc.plus[4] + acc.minus[4];
    let syy = acc.plus[5] + acc.minus[5];
    let n_q = acc.plus[0] + acc.minus[0];
    let tau = if sxx > 0.0 { sxy / sxx } else { f64::NAN };
    let resid = ((syy - 2.0 * tau * sxy + tau * tau * sxx) / n_q).max(0.0);
    let xi_det = params.detection_noise_referred();
    let t_hat = tau * tau;
    let tau_se = (resid / sxx).sqrt();
    let xi_hat = (resid - 1.0 - xi_det) / t_hat;
    let resid_se = resid * (2.0 / n_q).sqrt();
    let mean_x = (acc.plus[1] + acc.minus[1]) / n_q;
    let var_x = sxx / n_q - mean_x * mean_x;
    let v_hat = var_x + 1.0;

    SimReport {
        n_shots: acc.n,
        ber_empirical: ber,
        ber_se,
        var_s2p: var_p,
        var_s2p_se: var_p * (2.0 / n_p.max(1.0)).sqrt(),
        var_s3p: var_m,
        var_s3p_se: var_m * (2.0 / n_m.max(1.0)).sqrt(),
        cov_plus: cov_p,
        cov_minus: cov_m,
        t_hat,
        t_hat_se: 2.0 * tau.abs() * tau_se,
        xi_hat,
        xi_hat_se: resid_se / t_hat,
        v_hat,
        v_hat_se: var_x * (2.0 / n_q).sqrt(),
        n_plus: acc.plus[0] as u64,
        n_minus: acc.minus[0] as u64,
    }
}

/// Classical-only campaign report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalReport {
    pub n_shots: u64,
    pub n_errors: u64,
    pub ber_empirical: f64,
    pub ber_se: f64,
}

/// Fast classical-only campaign (skips all quantum-path work); the decoded
/// bit stream is identical to the full campaign's for the same seed.
pub fn run_classical_campaign(
    params: &ProtocolParams,
    n_shots: u64,
) -> Result<ClassicalReport, SimError> {
    if n_shots < MIN_CAMPAIGN_SHOTS {
        return Err(SimError::TooFewShots { min: MIN_CAMPAIGN_SHOTS, got: n_shots });
    }
    params.validate()?;
    let n_batches = n_shots.div_ceil(BATCH);
    let errors: u64 = (0..n_batches)
        .into_par_iter()
        .map(|batch| {
            let lo = batch * BATCH;
            let hi = ((batch + 1) * BATCH).min(n_shots);
            let mut e = 0u64;
            for idx in lo..hi {
                let (tx, rx) = simulate_shot_classical(params, idx);
                e += u64::from(tx != rx);
            }
            e
        })
        .sum();
    let ber = errors as f64 / n_shots as f64;
    Ok(ClassicalReport {
        n_shots,
        n_errors: errors,
        ber_empirical: ber,
        ber_se: (ber * (1.0 - ber) / n_shots as f64).sqrt(),
    })
}

/// Decoded classical bit stream of a full campaign (for paired-stream
/// comparisons).
pub fn decoded_bits(params: &ProtocolParams, n_shots: u64) -> Result<Vec<bool>, SimError> {
    params.validate()?;
    let grid = PulseGrid::new(params);
    let optics = MeasurementOptics::new();
    (0..n_shots)
        .into_par_iter()
        .map(|idx| simulate_shot(params, &grid, &optics, idx).map(|s| s.bit_rx))
        .collect()
}
