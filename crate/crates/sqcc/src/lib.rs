//! Simulation and analysis toolkit for polarization-encoded simultaneous
//! quantum-classical communication (SQCC) over free-space optical channels.
//!
//! One optical pulse carries both a classical bit (in the dominant linear
//! polarization, read out as the sign of the Stokes operator S1) and a
//! Gaussian CV-QKD modulation (in the normalized Stokes operators S2', S3'
//! of the weak orthogonal component). The crate provides:
//!
//! - [`mueller`] — Jones/Mueller calculus for the optical elements of the
//!   transmitter and receiver chains, with the exact closed-form output of
//!   the modulation sandwich.
//! - [`stokes`] — analytic means and variances of the Stokes operators for
//!   a coherent two-mode beam, first- and second-order in the fluctuations.
//! - [`sim`] — shot-level Monte Carlo of the full encode/channel/decode
//!   chain: Pockels-cell classical encoding, sideband QKD modulation,
//!   lossy channel, direct-detection decoding and digital mixdown.
//! - [`keyrate`] — classical BER, asymptotic and composable finite-size
//!   CV-QKD secret key rates (homodyne and heterodyne), the repeaterless
//!   PLOB bound, and modulation-variance optimization.
//! - [`sweep`] — loss sweeps, Monte-Carlo-vs-analytic cross-validation and
//!   deterministic CSV emission, backing the `sqcc` command-line tool.
//!
//! All quadrature variances are in shot-noise units (vacuum = 1, hbar = 2
//! convention); amplitudes are in sqrt-photon-number units; channel loss is
//! `T = 10^(-dB/10)`. Everything is deterministic given a seed: shots draw
//! from counter-indexed ChaCha substreams, so campaigns parallelize without
//! losing reproducibility.
//!
//! Start with the `examples/` directory; each example exercises one
//! capability end to end.

pub mod config;
pub mod keyrate;
pub mod mueller;
pub mod rng;
pub mod sim;
pub mod stokes;
pub mod sweep;

pub use keyrate::{Detection, NoiseBudget};
pub use mueller::{JonesMatrix, MuellerMatrix, StokesVector};
pub use sim::{ProtocolParams, ShotRecord, SimReport};
