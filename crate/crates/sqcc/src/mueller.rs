//! Jones and Mueller calculus for the polarization optics of the protocol.
//!
//! Jones matrices act on the two-dimensional coherent field (H, V); Mueller
//! matrices act on Stokes vectors (S0, S1, S2, S3). Conversion uses the
//! trace formula over the Pauli basis. All angles are radians.

use nalgebra::{Matrix2, Matrix4, Vector4};
use num_complex::Complex64;
use thiserror::Error;

type C = Complex64;

/// Largest imaginary residue tolerated in a converted Mueller entry.
pub const IM_RESIDUE_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum MuellerError {
    /// The trace formula produced a Mueller entry with a non-negligible
    /// imaginary part, which signals an inconsistent Jones input.
    #[error("Mueller entry ({row},{col}) has imaginary residue {residue:.3e}")]
    ImaginaryResidue { row: usize, col: usize, residue: f64 },
    #[error("beam splitter transmittance {0} outside [0, 1]")]
    InvalidTransmittance(f64),
}

/// Pauli-type basis in the Stokes index order (S0, S1, S2, S3).
fn sigma(i: usize) -> Matrix2<C> {
    let o = C::new(0.0, 0.0);
    let l = C::new(1.0, 0.0);
    match i {
        0 => Matrix2::new(l, o, o, l),
        1 => Matrix2::new(l, o, o, -l),
        2 => Matrix2::new(o, l, l, o),
        _ => Matrix2::new(o, C::new(0.0, -1.0), C::new(0.0, 1.0), o),
    }
}

/// A 2x2 complex field-amplitude transfer matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JonesMatrix(pub Matrix2<C>);

impl JonesMatrix {
    pub fn identity() -> Self {
        JonesMatrix(Matrix2::identity())
    }

    /// Composition: `self` applied after `first`.
    pub fn after(&self, first: &JonesMatrix) -> JonesMatrix {
        JonesMatrix(self.0 * first.0)
    }

    /// Apply to a field vector (e_h, e_v).
    pub fn apply(&self, field: (C, C)) -> (C, C) {
        let v = self.0 * nalgebra::Vector2::new(field.0, field.1);
        (v[0], v[1])
    }

    /// Deviation from unitarity, max |(J^dag J - I)_ij|.
    pub fn unitarity_defect(&self) -> f64 {
        let d = self.0.adjoint() * self.0 - Matrix2::identity();
        d.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// A 4x4 real Stokes transfer matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MuellerMatrix(pub Matrix4<f64>);

impl MuellerMatrix {
    pub fn identity() -> Self {
        MuellerMatrix(Matrix4::identity())
    }

    /// Composition: `self` applied after `first`.
    pub fn after(&self, first: &MuellerMatrix) -> MuellerMatrix {
        MuellerMatrix(self.0 * first.0)
    }

    pub fn apply(&self, s: &StokesVector) -> StokesVector {
        StokesVector(self.0 * s.0)
    }
}

/// Stokes vector in photon-flux units; a pure H beam is [1, 1, 0, 0].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StokesVector(pub Vector4<f64>);

impl StokesVector {
    pub fn new(s0: f64, s1: f64, s2: f64, s3: f64) -> Self {
        StokesVector(Vector4::new(s0, s1, s2, s3))
    }

    /// Horizontal unit beam [1, 1, 0, 0].
    pub fn horizontal() -> Self {
        StokesVector::new(1.0, 1.0, 0.0, 0.0)
    }

    pub fn s0(&self) -> f64 {
        self.0[0]
    }
    pub fn s1(&self) -> f64 {
        self.0[1]
    }
    pub fn s2(&self) -> f64 {
        self.0[2]
    }
    pub fn s3(&self) -> f64 {
        self.0[3]
    }

    /// s1^2 + s2^2 + s3^2 - s0^2; zero for fully polarized light.
    pub fn polarization_defect(&self) -> f64 {
        self.s1() * self.s1() + self.s2() * self.s2() + self.s3() * self.s3()
            - self.s0() * self.s0()
    }

    /// Stokes components of a coherent field (e_h, e_v).
    pub fn from_field(e_h: C, e_v: C) -> Self {
        let s0 = e_h.norm_sqr() + e_v.norm_sqr();
        let s1 = e_h.norm_sqr() - e_v.norm_sqr();
        let cross = e_h.conj() * e_v;
        StokesVector::new(s0, s1, 2.0 * cross.re, 2.0 * cross.im)
    }

    /// True when physical: s0 >= 0 and degree of polarization <= 1.
    pub fn is_physical(&self, tol: f64) -> bool {
        self.s0() >= -tol && self.polarization_defect() <= tol
    }
}

/// Convert a Jones matrix to the Mueller matrix acting as S_out = M S_in.
///
/// The entries are M_ij = Tr{J sigma_j J^dag sigma_i} / 2 over the Pauli
/// basis in Stokes order. (Writing the trace with i and j swapped yields
/// the transpose, i.e. the inverse map for unitary J; the orientation here
/// is fixed by the field-level definition of the Stokes parameters and is
/// pinned by tests against `StokesVector::from_field`.)
pub fn jones_to_mueller(j: &JonesMatrix) -> Result<MuellerMatrix, MuellerError> {
    let mut m = Matrix4::zeros();
    for i in 0..4 {
        for jj in 0..4 {
            let t: C = (j.0 * sigma(jj) * j.0.adjoint() * sigma(i)).trace() * 0.5;
            if t.im.abs() > IM_RESIDUE_TOL {
                return Err(MuellerError::ImaginaryResidue {
                    row: i,
                    col: jj,
                    residue: t.im.abs(),
                });
            }
            m[(i, jj)] = t.re;
        }
    }
    Ok(MuellerMatrix(m))
}

/// Half-wave plate with fast axis at `theta` to the polarization plane.
pub fn jones_hwp(theta: f64) -> JonesMatrix {
    let (s, c) = (2.0 * theta).sin_cos();
    JonesMatrix(Matrix2::new(
        C::new(c, 0.0),
        C::new(s, 0.0),
        C::new(s, 0.0),
        C::new(-c, 0.0),
    ))
}

/// Quarter-wave plate with fast axis at `theta`.
///
/// Convention (not fixed by the protocol description, which defers to
/// textbook optics): J = R(theta) diag(e^{i pi/4}, e^{-i pi/4}) R(theta)^T,
/// chosen so that the S3 measurement arm (HWP at 22.5 deg, QWP at 45 deg,
/// PBS difference) reads out +S3 of its input.
pub fn jones_qwp(theta: f64) -> JonesMatrix {
    let (s, c) = theta.sin_cos();
    let r = Matrix2::new(C::new(c, 0.0), C::new(-s, 0.0), C::new(s, 0.0), C::new(c, 0.0));
    let d = Matrix2::new(
        C::from_polar(1.0, std::f64::consts::FRAC_PI_4),
        C::new(0.0, 0.0),
        C::new(0.0, 0.0),
        C::from_polar(1.0, -std::f64::consts::FRAC_PI_4),
    );
    JonesMatrix(r * d * r.transpose())
}

/// Electro-optic modulator: retards the V component by `phi1`.
/// Couples S1 into S3 when sandwiched between half-wave plates.
pub fn jones_eom(phi1: f64) -> JonesMatrix {
    JonesMatrix(Matrix2::new(
        C::new(1.0, 0.0),
        C::new(0.0, 0.0),
        C::new(0.0, 0.0),
        C::from_polar(1.0, -phi1),
    ))
}

/// Magneto-optic modulator: retards the left-circular component by `phi2`
/// (a Faraday rotation), coupling S1 into S2 in the modulation sandwich.
///
/// Built as B diag(1, e^{-i phi2}) B^dag with B the unitary circular-to-
/// linear basis change (1/sqrt2)[[1, 1], [i, -i]].
pub fn jones_mom(phi2: f64) -> JonesMatrix {
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let b = Matrix2::new(
        C::new(inv_sqrt2, 0.0),
        C::new(inv_sqrt2, 0.0),
        C::new(0.0, inv_sqrt2),
        C::new(0.0, -inv_sqrt2),
    );
    let d = Matrix2::new(
        C::new(1.0, 0.0),
        C::new(0.0, 0.0),
        C::new(0.0, 0.0),
        C::from_polar(1.0, -phi2),
    );
    JonesMatrix(b * d * b.adjoint())
}

/// Pockels cell: rotates the polarization plane by pi/2 when active
/// (H and V swap), identity otherwise.
pub fn jones_pockels(active: bool) -> JonesMatrix {
    if active {
        JonesMatrix(Matrix2::new(
            C::new(0.0, 0.0),
            C::new(-1.0, 0.0),
            C::new(1.0, 0.0),
            C::new(0.0, 0.0),
        ))
    } else {
        JonesMatrix::identity()
    }
}

/// Which output port of a polarizing beam splitter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PbsPort {
    H,
    V,
}

/// Polarizing beam splitter port as a lossy projector (H or V).
pub fn jones_pbs(port: PbsPort) -> JonesMatrix {
    let (h, v) = match port {
        PbsPort::H => (1.0, 0.0),
        PbsPort::V => (0.0, 1.0),
    };
    JonesMatrix(Matrix2::new(
        C::new(h, 0.0),
        C::new(0.0, 0.0),
        C::new(0.0, 0.0),
        C::new(v, 0.0),
    ))
}

/// Transmitted port of a beam splitter with transmittance `tau`
/// (amplitude scaling sqrt(tau); lossy, exempt from unitarity).
pub fn jones_bs(tau: f64) -> Result<JonesMatrix, MuellerError> {
    if !(0.0..=1.0).contains(&tau) || !tau.is_finite() {
        return Err(MuellerError::InvalidTransmittance(tau));
    }
    let a = C::new(tau.sqrt(), 0.0);
    Ok(JonesMatrix(Matrix2::new(a, C::new(0.0, 0.0), C::new(0.0, 0.0), a)))
}

/// Optical elements with known Mueller representations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Element {
    /// Half-wave plate at angle theta.
    Hwp(f64),
    /// Quarter-wave plate at angle theta.
    Qwp(f64),
    /// Electro-optic modulator with H-V retardance phi1.
    Eom(f64),
    /// Magneto-optic modulator with circular retardance phi2.
    Mom(f64),
    /// Pockels cell (H-V swap when active).
    Pockels(bool),
    /// One port of a polarizing beam splitter.
    PbsPort(PbsPort),
    /// Transmitted port of a beam splitter with transmittance tau.
    Bs(f64),
}

impl Element {
    pub fn jones(&self) -> Result<JonesMatrix, MuellerError> {
        Ok(match *self {
            Element::Hwp(t) => jones_hwp(t),
            Element::Qwp(t) => jones_qwp(t),
            Element::Eom(p) => jones_eom(p),
            Element::Mom(p) => jones_mom(p),
            Element::Pockels(a) => jones_pockels(a),
            Element::PbsPort(p) => jones_pbs(p),
            Element::Bs(tau) => jones_bs(tau)?,
        })
    }

    /// Mueller matrix of the element via the trace formula.
    pub fn mueller(&self) -> Result<MuellerMatrix, MuellerError> {
        jones_to_mueller(&self.jones()?)
    }
}

/// Angle of the half-wave plates sandwiching the two modulators (22.5 deg).
pub const MODULATOR_HWP_ANGLE: f64 = std::f64::consts::FRAC_PI_8;

/// Jones matrix of the full transmitter modulation sandwich:
/// HWP(pi/8) -> EOM(phi1) -> MOM(phi2) -> HWP(pi/8).
pub fn alice_chain_jones(phi1: f64, phi2: f64) -> JonesMatrix {
    let h = jones_hwp(MODULATOR_HWP_ANGLE);
    h.after(&jones_mom(phi2).after(&jones_eom(phi1).after(&h)))
}

/// Output Stokes vector of the modulation sandwich on a unit H beam.
///
/// Equals [1, cos(phi1)cos(phi2), cos(phi1)sin(phi2), sin(phi1)] exactly;
/// computed here through the Mueller product so the identity is a test,
/// not an assumption.
pub fn alice_chain(phi1: f64, phi2: f64) -> Result<StokesVector, MuellerError> {
    let m = jones_to_mueller(&alice_chain_jones(phi1, phi2))?;
    Ok(m.apply(&StokesVector::horizontal()))
}

/// Small-angle form of [`alice_chain`]: [1, 1, phi2, phi1].
pub fn alice_chain_small_angle(phi1: f64, phi2: f64) -> StokesVector {
    StokesVector::new(1.0, 1.0, phi2, phi1)
}
