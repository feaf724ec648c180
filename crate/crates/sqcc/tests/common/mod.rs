//! Independent oracles used by the acceptance suite.
//!
//! These deliberately avoid the implementation paths they check: the
//! complementary error function is computed from a power series and a
//! Lentz continued fraction, and symplectic spectra come from a
//! Cholesky + SVD Williamson route on explicitly constructed covariance
//! matrices (including purified detector models), not from the closed
//! forms in the library.

use nalgebra::DMatrix;

/// erfc by power series (small x) and Lentz continued fraction (large x).
pub fn erfc_oracle(x: f64) -> f64 {
    assert!(x >= 0.0, "oracle defined for non-negative arguments");
    if x < 2.0 {
        1.0 - erf_series(x)
    } else {
        erfc_continued_fraction(x)
    }
}

fn erf_series(x: f64) -> f64 {
    // erf(x) = 2/sqrt(pi) sum_n (-1)^n x^(2n+1) / (n! (2n+1))
    let mut term = x;
    let mut sum = x;
    let x2 = x * x;
    for n in 1..200 {
        term *= -x2 / n as f64;
        let add = term / (2.0 * n as f64 + 1.0);
        sum += add;
        if add.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    2.0 / std::f64::consts::PI.sqrt() * sum
}

fn erfc_continued_fraction(x: f64) -> f64 {
    // erfc(x) = exp(-x^2)/sqrt(pi) * 1/(x + 1/2/(x + 1/(x + 3/2/(x + ...))))
    // evaluated with the modified Lentz algorithm, coefficients a_n = n/2.
    let tiny = 1e-300;
    let mut f = x.max(tiny);
    let mut c = f;
    let mut d = 0.0;
    for n in 1..400 {
        let a = n as f64 / 2.0;
        d = x + a * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = x + a / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-x * x).exp() / std::f64::consts::PI.sqrt() / f
}

/// Symplectic form for n modes, quadrature order (x1, p1, x2, p2, ...).
pub fn omega(n_modes: usize) -> DMatrix<f64> {
    let mut w = DMatrix::zeros(2 * n_modes, 2 * n_modes);
    for k in 0..n_modes {
        w[(2 * k, 2 * k + 1)] = 1.0;
        w[(2 * k + 1, 2 * k)] = -1.0;
    }
    w
}

/// Williamson spectrum via Cholesky + SVD: the singular values of
/// L^T Omega L come in pairs equal to the symplectic eigenvalues.
pub fn symplectic_eigenvalues(sigma: &DMatrix<f64>) -> Vec<f64> {
    let n = sigma.nrows() / 2;
    let chol = sigma
        .clone()
        .cholesky()
        .expect("covariance matrix must be positive definite");
    let l = chol.l();
    let k = l.transpose() * omega(n) * &l;
    let mut sv: Vec<f64> = k.svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    (0..n).map(|i| 0.5 * (sv[2 * i] + sv[2 * i + 1])).collect()
}

/// Two-mode squeezed state covariance with variance `v` per mode.
pub fn epr_cm(v: f64) -> DMatrix<f64> {
    let c = (v * v - 1.0).max(0.0).sqrt();
    DMatrix::from_row_slice(
        4,
        4,
        &[
            v, 0.0, c, 0.0, //
            0.0, v, 0.0, -c, //
            c, 0.0, v, 0.0, //
            0.0, -c, 0.0, v,
        ],
    )
}

pub fn direct_sum(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let (ra, rb) = (a.nrows(), b.nrows());
    let mut m = DMatrix::zeros(ra + rb, ra + rb);
    m.view_mut((0, 0), (ra, ra)).copy_from(a);
    m.view_mut((ra, ra), (rb, rb)).copy_from(b);
    m
}

/// Beam-splitter symplectic acting on modes i and j with transmittance tau.
pub fn bs_symplectic(n_modes: usize, i: usize, j: usize, tau: f64) -> DMatrix<f64> {
    let mut s = DMatrix::identity(2 * n_modes, 2 * n_modes);
    let (c, r) = (tau.sqrt(), (1.0 - tau).sqrt());
    for k in 0..2 {
        let (a, b) = (2 * i + k, 2 * j + k);
        s[(a, a)] = c;
        s[(b, b)] = c;
        s[(a, b)] = r;
        s[(b, a)] = -r;
    }
    s
}

fn split_out_mode(sigma: &DMatrix<f64>, mode: usize) -> (DMatrix<f64>, DMatrix<f64>, DMatrix<f64>) {
    let n = sigma.nrows();
    let b_rows = [2 * mode, 2 * mode + 1];
    let rest: Vec<usize> = (0..n).filter(|r| !b_rows.contains(r)).collect();
    let mut s_rr = DMatrix::zeros(rest.len(), rest.len());
    let mut s_rb = DMatrix::zeros(rest.len(), 2);
    let mut s_bb = DMatrix::zeros(2, 2);
    for (ri, &r) in rest.iter().enumerate() {
        for (ci, &c) in rest.iter().enumerate() {
            s_rr[(ri, ci)] = sigma[(r, c)];
        }
        for (ci, &c) in b_rows.iter().enumerate() {
            s_rb[(ri, ci)] = sigma[(r, c)];
        }
    }
    for (ri, &r) in b_rows.iter().enumerate() {
        for (ci, &c) in b_rows.iter().enumerate() {
            s_bb[(ri, ci)] = sigma[(r, c)];
        }
    }
    (s_rr, s_rb, s_bb)
}

/// Gaussian conditioning on an x-quadrature (homodyne) measurement of one
/// mode; the measured mode is removed.
pub fn condition_homodyne_x(sigma: &DMatrix<f64>, mode: usize) -> DMatrix<f64> {
    let (s_rr, s_rb, s_bb) = split_out_mode(sigma, mode);
    let mut pinv = DMatrix::zeros(2, 2);
    pinv[(0, 0)] = 1.0 / s_bb[(0, 0)];
    &s_rr - &s_rb * pinv * s_rb.transpose()
}

/// Gaussian conditioning on an ideal double-quadrature (heterodyne)
/// measurement of one mode.
pub fn condition_heterodyne(sigma: &DMatrix<f64>, mode: usize) -> DMatrix<f64> {
    let (s_rr, s_rb, s_bb) = split_out_mode(sigma, mode);
    let inv = (s_bb + DMatrix::identity(2, 2)).try_inverse().expect("invertible");
    &s_rr - &s_rb * inv * s_rb.transpose()
}

/// Oracle symplectic spectra for the shared state and the conditional
/// state after the trusted (noisy) receiver measurement.
///
/// The receiver is purified as a beam splitter of transmittance `eta`
/// in front of an ideal detector, its vacuum port fed by one half of an
/// EPR pair whose variance reproduces the electronic noise.
pub fn oracle_lambdas(
    v: f64,
    t: f64,
    xi: f64,
    eta: f64,
    nu_el: f64,
    heterodyne: bool,
) -> (Vec<f64>, Vec<f64>) {
    let xi_ch = (1.0 - t) / t + xi;
    let c = (t * (v * v - 1.0)).sqrt();
    let w = t * (v + xi_ch);
    let shared = DMatrix::from_row_slice(
        4,
        4,
        &[
            v, 0.0, c, 0.0, //
            0.0, v, 0.0, -c, //
            c, 0.0, w, 0.0, //
            0.0, -c, 0.0, w,
        ],
    );
    let lam12 = symplectic_eigenvalues(&shared);

    let el_scale = if heterodyne { 2.0 } else { 1.0 };
    let v_det = 1.0 + el_scale * nu_el / (1.0 - eta);
    let full = direct_sum(&shared, &epr_cm(v_det));
    let mixed = {
        let bs = bs_symplectic(4, 1, 2, eta);
        &bs * full * bs.transpose()
    };
    let cond = if heterodyne {
        condition_heterodyne(&mixed, 1)
    } else {
        condition_homodyne_x(&mixed, 1)
    };
    (lam12, symplectic_eigenvalues(&cond))
}
