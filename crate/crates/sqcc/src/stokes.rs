//! Analytic Stokes-operator statistics for a coherent two-mode beam.
//!
//! Amplitudes are real, in sqrt-photon-number units; quadrature fluctuation
//! variances are in shot-noise units with the vacuum at 1 (hbar = 2). The
//! first-order (linearized) treatment keeps terms linear in the fluctuation
//! operators; the second-order corrections matter only when the received
//! amplitude is small and are exposed as an additive excess-noise term.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum StokesError {
    #[error("received amplitude must be positive for second-order correction (QKD non-viable at zero amplitude)")]
    NonViableAmplitude,
    #[error("invalid coherent state: {0}")]
    InvalidState(String),
}

/// A coherent two-mode (H, V) beam with linearized quadrature fluctuations.
#[derive(Debug, Clone, Copy)]
pub struct CoherentTwoMode {
    /// Real H amplitude, sqrt-photon units.
    pub alpha_h: f64,
    /// Real V amplitude, sqrt-photon units.
    pub alpha_v: f64,
    /// Variance of the amplitude (+) quadrature fluctuation on H.
    pub var_plus_h: f64,
    /// Variance of the amplitude (+) quadrature fluctuation on V.
    pub var_plus_v: f64,
    /// Variance of the phase (-) quadrature fluctuation on H.
    pub var_minus_h: f64,
    /// Variance of the phase (-) quadrature fluctuation on V.
    pub var_minus_v: f64,
    /// Cross-correlation <dX+_H dX+_V>; zero for independent modes.
    pub cross_plus: f64,
    /// Cross-correlation <dX-_H dX-_V>.
    pub cross_minus: f64,
}

impl CoherentTwoMode {
    /// Vacuum-limited beam: all fluctuation variances 1, no correlations.
    pub fn vacuum_limited(alpha_h: f64, alpha_v: f64) -> Result<Self, StokesError> {
        Self::new(alpha_h, alpha_v, [1.0, 1.0, 1.0, 1.0])
    }

    /// Beam with explicit variances [plus_h, plus_v, minus_h, minus_v].
    pub fn new(alpha_h: f64, alpha_v: f64, vars: [f64; 4]) -> Result<Self, StokesError> {
        if !alpha_h.is_finite() || !alpha_v.is_finite() || alpha_h < 0.0 || alpha_v < 0.0 {
            return Err(StokesError::InvalidState(format!(
                "amplitudes must be finite and non-negative, got ({alpha_h}, {alpha_v})"
            )));
        }
        if vars.iter().any(|v| !v.is_finite() || *v < 1.0 - 1e-12) {
            return Err(StokesError::InvalidState(format!(
                "fluctuation variances must be >= 1 (vacuum), got {vars:?}"
            )));
        }
        Ok(CoherentTwoMode {
            alpha_h,
            alpha_v,
            var_plus_h: vars[0],
            var_plus_v: vars[1],
            var_minus_h: vars[2],
            var_minus_v: vars[3],
            cross_plus: 0.0,
            cross_minus: 0.0,
        })
    }

    pub fn with_cross_correlations(mut self, cross_plus: f64, cross_minus: f64) -> Self {
        self.cross_plus = cross_plus;
        self.cross_minus = cross_minus;
        self
    }
}

/// Which fluctuation order a [`StokesMoments`] was computed at.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FluctuationOrder {
    First,
    Second,
}

/// Means and variances of the four Stokes operators.
#[derive(Debug, Clone, Copy)]
pub struct StokesMoments {
    pub mean: [f64; 4],
    pub var: [f64; 4],
    pub order: FluctuationOrder,
}

/// Means of the Stokes operators for real amplitudes:
/// (ah^2 + av^2, ah^2 - av^2, 2 ah av, 0).
pub fn stokes_means(state: &CoherentTwoMode) -> StokesMoments {
    let (ah, av) = (state.alpha_h, state.alpha_v);
    StokesMoments {
        mean: [ah * ah + av * av, ah * ah - av * av, 2.0 * ah * av, 0.0],
        var: [0.0; 4],
        order: FluctuationOrder::First,
    }
}

/// First-order variances of the Stokes operators.
///
/// Var(S0) = ah^2 V+_H + av^2 V+_V + 2 ah av C+
/// Var(S1) = ah^2 V+_H + av^2 V+_V - 2 ah av C+
/// Var(S2) = ah^2 V+_V + av^2 V+_H + 2 ah av C+
/// Var(S3) = ah^2 V-_V + av^2 V-_H + 2 ah av C-
pub fn stokes_variances_first_order(state: &CoherentTwoMode) -> StokesMoments {
    let (ah, av) = (state.alpha_h, state.alpha_v);
    let (ah2, av2) = (ah * ah, av * av);
    let cross = 2.0 * ah * av;
    let means = stokes_means(state);
    StokesMoments {
        mean: means.mean,
        var: [
            ah2 * state.var_plus_h + av2 * state.var_plus_v + cross * state.cross_plus,
            ah2 * state.var_plus_h + av2 * state.var_plus_v - cross * state.cross_plus,
            ah2 * state.var_plus_v + av2 * state.var_plus_h + cross * state.cross_plus,
            ah2 * state.var_minus_v + av2 * state.var_minus_h + cross * state.cross_minus,
        ],
        order: FluctuationOrder::First,
    }
}

/// Statistics of the normalized Stokes quadratures S2' = S2/sqrt(<S1>) and
/// S3' = S3/sqrt(<S1>).
#[derive(Debug, Clone, Copy)]
pub struct NormalizedQuadPair {
    pub mean_s2p: f64,
    pub mean_s3p: f64,
    pub var_s2p: f64,
    pub var_s3p: f64,
    /// Set when the dominant amplitude is too small for the linearized
    /// normalization to be trustworthy (|<S1>| < ~100 photons).
    pub small_amplitude_warning: bool,
}

/// Normalized quadrature statistics with a Gaussian QKD modulation of
/// variance `v_mod` added on each quadrature of the weak component.
///
/// For a strongly polarized vacuum-limited beam this reduces to zero means
/// and Var(S2') = Var(S3') = 1 + v_mod.
pub fn normalized_quads(state: &CoherentTwoMode, v_mod: f64) -> NormalizedQuadPair {
    let m = stokes_variances_first_order(state);
    let s1 = m.mean[1].abs();
    let norm = if s1 > 0.0 { s1 } else { f64::NAN };
    NormalizedQuadPair {
        mean_s2p: m.mean[2] / norm.sqrt(),
        mean_s3p: m.mean[3] / norm.sqrt(),
        var_s2p: m.var[2] / norm + v_mod,
        var_s3p: m.var[3] / norm + v_mod,
        small_amplitude_warning: !(s1 >= 1e4),
    }
}

/// Second-order excess variance on the normalized S2' and S3' at received
/// amplitude `alpha_received`: 2/alpha'^2 (shot-noise units, receiver side).
///
/// Evaluated at the equality lower bound of the second-order expressions;
/// usable as an additive untrusted excess-noise term.
pub fn second_order_correction(alpha_received: f64) -> Result<f64, StokesError> {
    if !(alpha_received > 0.0) {
        return Err(StokesError::NonViableAmplitude);
    }
    Ok(2.0 / (alpha_received * alpha_received))
}

/// Second-order excess on the S1 normalization itself: 1/alpha'^2.
pub fn second_order_s1_correction(alpha_received: f64) -> Result<f64, StokesError> {
    if !(alpha_received > 0.0) {
        return Err(StokesError::NonViableAmplitude);
    }
    Ok(1.0 / (alpha_received * alpha_received))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::rngs::StdRng;
    use rand::SeedableRng;
    use rand_distr::{Distribution, Normal};

    #[test]
    fn means_of_polarized_beams() {
        let h = CoherentTwoMode::vacuum_limited(2.0, 0.0).unwrap();
        assert_eq!(stokes_means(&h).mean, [4.0, 4.0, 0.0, 0.0]);

        let a = 2.0f64;
        let d = CoherentTwoMode::vacuum_limited(a / 2f64.sqrt(), a / 2f64.sqrt()).unwrap();
        let m = stokes_means(&d).mean;
        assert_abs_diff_eq!(m[0], 4.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m[1], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m[2], 4.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m[3], 0.0, epsilon = 1e-12);

        // direct substitution: (3, 4) -> (25, -7, 24, 0)
        let s = CoherentTwoMode::vacuum_limited(3.0, 4.0).unwrap();
        assert_eq!(stokes_means(&s).mean, [25.0, -7.0, 24.0, 0.0]);
    }

    #[test]
    fn vacuum_variances_h_polarized() {
        let a = 1.7f64;
        let s = CoherentTwoMode::vacuum_limited(a, 0.0).unwrap();
        let v = stokes_variances_first_order(&s).var;
        for i in 0..4 {
            assert_abs_diff_eq!(v[i], a * a, epsilon = 1e-12);
        }
    }

    #[test]
    fn zero_amplitudes_give_zero_first_order_variance() {
        let s = CoherentTwoMode::vacuum_limited(0.0, 0.0).unwrap();
        assert_eq!(stokes_variances_first_order(&s).var, [0.0; 4]);
    }

    #[test]
    fn modulated_v_quadrature_raises_s2_variance() {
        let (a, v_mod) = (3.0f64, 0.8);
        let s = CoherentTwoMode::new(a, 0.0, [1.0, 1.0 + v_mod, 1.0, 1.0]).unwrap();
        let v = stokes_variances_first_order(&s).var;
        assert_abs_diff_eq!(v[2], a * a * (1.0 + v_mod), epsilon = 1e-12);
        assert_abs_diff_eq!(v[1], a * a, epsilon = 1e-12);
    }

    #[test]
    fn normalized_quads_examples() {
        let s = CoherentTwoMode::vacuum_limited(1e3, 0.0).unwrap();
        for (v_mod, expect) in [(0.0, 1.0), (4.0, 5.0), (0.5, 1.5)] {
            let q = normalized_quads(&s, v_mod);
            assert_abs_diff_eq!(q.var_s2p, expect, epsilon = 1e-9);
            assert_abs_diff_eq!(q.var_s3p, expect, epsilon = 1e-9);
            assert_abs_diff_eq!(q.mean_s2p, 0.0, epsilon = 1e-12);
            assert!(!q.small_amplitude_warning);
        }
        let weak = CoherentTwoMode::vacuum_limited(5.0, 0.0).unwrap();
        assert!(normalized_quads(&weak, 0.0).small_amplitude_warning);
    }

    #[test]
    fn second_order_examples_and_monotonicity() {
        assert_abs_diff_eq!(second_order_correction(1e3).unwrap(), 2e-6, epsilon = 1e-18);
        assert_abs_diff_eq!(second_order_correction(10.0).unwrap(), 0.02, epsilon = 1e-15);
        assert!(second_order_correction(0.0).is_err());
        assert!(second_order_s1_correction(1e3).unwrap() == 1e-6);
        let mut prev = f64::INFINITY;
        for a in [1.0, 3.0, 10.0, 100.0, 1e4, 1e8] {
            let c = second_order_correction(a).unwrap();
            assert!(c < prev);
            prev = c;
        }
        assert!(prev < 1e-15, "correction vanishes in the large-amplitude limit");
    }

    #[test]
    fn uncertainty_relation_saturated_by_coherent_h_beam() {
        // Var(S2) Var(S3) >= <S1>^2, equality for a vacuum-limited H beam.
        let a = 2.3f64;
        let s = CoherentTwoMode::vacuum_limited(a, 0.0).unwrap();
        let m = stokes_variances_first_order(&s);
        let lhs = m.var[2] * m.var[3];
        let rhs = m.mean[1] * m.mean[1];
        assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-9);
        // a modulated beam satisfies it strictly
        let sm = CoherentTwoMode::new(a, 0.0, [1.0, 1.5, 1.0, 1.5]).unwrap();
        let mm = stokes_variances_first_order(&sm);
        assert!(mm.var[2] * mm.var[3] >= mm.mean[1] * mm.mean[1]);
    }

    #[test]
    fn monte_carlo_agrees_with_first_order_variances() {
        // Sample the linearized Stokes expressions and compare empirical
        // variances against the analytic forms within 5 standard errors.
        let (ah, av) = (2.0f64, 0.5);
        let vars = [1.0, 1.6, 1.0, 1.3];
        let state = CoherentTwoMode::new(ah, av, vars).unwrap();
        let analytic = stokes_variances_first_order(&state);

        let n = 1_000_000usize;
        let mut rng = StdRng::seed_from_u64(42);
        let dists: Vec<Normal<f64>> =
            vars.iter().map(|v| Normal::new(0.0, v.sqrt()).unwrap()).collect();
        let mut sums = [0.0f64; 4];
        let mut sqs = [0.0f64; 4];
        for _ in 0..n {
            let xph = dists[0].sample(&mut rng);
            let xpv = dists[1].sample(&mut rng);
            let xmh = dists[2].sample(&mut rng);
            let xmv = dists[3].sample(&mut rng);
            let s = [
                ah * ah + av * av + ah * xph + av * xpv,
                ah * ah - av * av + ah * xph - av * xpv,
                2.0 * ah * av + ah * xpv + av * xph,
                av * xmh + ah * xmv,
            ];
            for i in 0..4 {
                sums[i] += s[i];
                sqs[i] += s[i] * s[i];
            }
        }
        for i in 0..4 {
            let mean = sums[i] / n as f64;
            let var = sqs[i] / n as f64 - mean * mean;
            // standard error of a sample variance ~ var * sqrt(2/n)
            let se = analytic.var[i] * (2.0 / n as f64).sqrt();
            assert!(
                (var - analytic.var[i]).abs() < 5.0 * se,
                "S{i}: empirical {var} vs analytic {}",
                analytic.var[i]
            );
            assert!((mean - analytic.mean[i]).abs() < 5.0 * (analytic.var[i] / n as f64).sqrt());
        }
    }

    #[test]
    fn rejects_subvacuum_variances_and_negative_amplitudes() {
        assert!(CoherentTwoMode::new(1.0, 0.0, [0.5, 1.0, 1.0, 1.0]).is_err());
        assert!(CoherentTwoMode::new(-1.0, 0.0, [1.0; 4]).is_err());
        assert!(CoherentTwoMode::new(f64::NAN, 0.0, [1.0; 4]).is_err());
    }
}
