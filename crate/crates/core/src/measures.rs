//! Two-mode reductions and Gaussian nonlocality measures: logarithmic
//! negativity, EPR steering in both directions, quadrature variances,
//! physicality, and the A/B/C/D region classification.

use core::fmt;
use core::str::FromStr;

use libm::{log, sqrt};
use nalgebra::{DMatrix, SMatrix};

use crate::dynamics::CovarianceMatrix;

pub type Mat4 = SMatrix<f64, 4, 4>;

/// Default threshold separating "zero" from "nonzero" entanglement and
/// steering in region classification.
pub const DEFAULT_EPSILON: f64 = 1e-6;

/// Physicality slack on the symplectic-eigenvalue bound ν ≥ 1/2.
pub const PHYSICALITY_TOL: f64 = 1e-9;

/// Discriminants this far below zero are treated as roundoff and clamped.
const CLAMP_TOL: f64 = 1e-9;
const DEGENERATE_DET: f64 = 1e-300;

/// One of the three modes, in quadrature order a₁, a₂, b.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    A1,
    A2,
    B,
}

impl Mode {
    pub fn index(self) -> usize {
        match self {
            Mode::A1 => 0,
            Mode::A2 => 1,
            Mode::B => 2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Mode::A1 => "a1",
            Mode::A2 => "a2",
            Mode::B => "b",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Mode {
    type Err = MeasureError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "a1" => Ok(Mode::A1),
            "a2" => Ok(Mode::A2),
            "b" => Ok(Mode::B),
            _ => Err(MeasureError::InvalidMode),
        }
    }
}

/// Steering direction within an ordered mode pair (mode 1, mode 2).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SteeringDirection {
    OneToTwo,
    TwoToOne,
}

/// 4×4 reduced covariance with its mode labels.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeCovariance {
    pub v: Mat4,
    pub modes: (Mode, Mode),
}

#[derive(Debug, Clone, PartialEq)]
pub enum MeasureError {
    InvalidMode,
    /// The two modes of a reduction must differ.
    SamePair,
    /// Σ² − 4·det𝒱₁₂ is negative beyond roundoff: not a physical state.
    NonPhysical { discriminant: f64 },
    /// det𝒱₁₂ vanished; the steering logarithm is undefined.
    Degenerate { det: f64 },
}

impl fmt::Display for MeasureError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeasureError::InvalidMode => write!(f, "invalid mode label (expected a1, a2 or b)"),
            MeasureError::SamePair => write!(f, "two-mode reduction needs two distinct modes"),
            MeasureError::NonPhysical { discriminant } => {
                write!(f, "non-physical two-mode state (discriminant {discriminant})")
            }
            MeasureError::Degenerate { det } => {
                write!(f, "degenerate two-mode state (det {det})")
            }
        }
    }
}

/// Extract the 4×4 covariance of modes (i, j) from the 6×6 state.
pub fn reduce_two_mode(
    v: &CovarianceMatrix,
    i: Mode,
    j: Mode,
) -> Result<TwoModeCovariance, MeasureError> {
    if i == j {
        return Err(MeasureError::SamePair);
    }
    let sel = [
        2 * i.index(),
        2 * i.index() + 1,
        2 * j.index(),
        2 * j.index() + 1,
    ];
    let mut out = Mat4::zeros();
    for (a, &ra) in sel.iter().enumerate() {
        for (b, &rb) in sel.iter().enumerate() {
            out[(a, b)] = v.0[(ra, rb)];
        }
    }
    Ok(TwoModeCovariance {
        v: out,
        modes: (i, j),
    })
}

fn det2(m: &Mat4, r: usize, c: usize) -> f64 {
    m[(r, c)] * m[(r + 1, c + 1)] - m[(r, c + 1)] * m[(r + 1, c)]
}

/// Logarithmic negativity E_N = max[0, −ln 2η⁻] with
/// η⁻ = √(Σ − √(Σ² − 4·det𝒱₁₂))/√2, Σ = det𝒱₁ + det𝒱₂ − 2·det𝒱_c.
///
/// Returns (E_N, η⁻). Discriminants within roundoff of zero are clamped;
/// larger violations are rejected as non-physical.
pub fn log_negativity(tm: &TwoModeCovariance) -> Result<(f64, f64), MeasureError> {
    let det1 = det2(&tm.v, 0, 0);
    let det2_ = det2(&tm.v, 2, 2);
    let detc = det2(&tm.v, 0, 2);
    let det12 = tm.v.determinant();
    let sigma = det1 + det2_ - 2.0 * detc;
    let disc = sigma * sigma - 4.0 * det12;
    if disc < -CLAMP_TOL {
        return Err(MeasureError::NonPhysical { discriminant: disc });
    }
    let inner = sigma - sqrt(disc.max(0.0));
    if inner <= 0.0 {
        // η⁻ = 0 only for singular inputs; a physical state keeps it > 0.
        return Err(MeasureError::Degenerate { det: det12 });
    }
    let eta_minus = sqrt(inner / 2.0);
    let e_n = (-log(2.0 * eta_minus)).max(0.0);
    Ok((e_n, eta_minus))
}

/// Gaussian EPR steering 𝒢 = max[0, ½·ln(det𝒱_steerer / (4·det𝒱₁₂))].
pub fn steering(tm: &TwoModeCovariance, direction: SteeringDirection) -> Result<f64, MeasureError> {
    let det12 = tm.v.determinant();
    if det12 <= DEGENERATE_DET {
        return Err(MeasureError::Degenerate { det: det12 });
    }
    let det_steerer = match direction {
        SteeringDirection::OneToTwo => det2(&tm.v, 0, 0),
        SteeringDirection::TwoToOne => det2(&tm.v, 2, 2),
    };
    if det_steerer <= 0.0 {
        return Err(MeasureError::NonPhysical {
            discriminant: det_steerer,
        });
    }
    Ok((0.5 * log(det_steerer / (4.0 * det12))).max(0.0))
}

/// Diagonal (X, Y) variances of one mode's 2×2 block.
pub fn quadrature_variances(v: &CovarianceMatrix, mode: Mode) -> (f64, f64) {
    let k = 2 * mode.index();
    (v.0[(k, k)], v.0[(k + 1, k + 1)])
}

fn symplectic_eigenvalue_min(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    // Ω·V for the per-mode symplectic form [[0,1],[-1,0]].
    let mut omega_v = DMatrix::<f64>::zeros(n, n);
    for k in (0..n).step_by(2) {
        for c in 0..n {
            omega_v[(k, c)] = m[(k + 1, c)];
            omega_v[(k + 1, c)] = -m[(k, c)];
        }
    }
    omega_v
        .complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(f64::INFINITY, f64::min)
}

/// Minimum symplectic eigenvalue of a 6×6 covariance.
pub fn min_symplectic(v: &CovarianceMatrix) -> f64 {
    symplectic_eigenvalue_min(&DMatrix::from_iterator(6, 6, v.0.iter().copied()))
}

/// Minimum symplectic eigenvalue of a two-mode covariance.
pub fn min_symplectic_two_mode(tm: &TwoModeCovariance) -> f64 {
    symplectic_eigenvalue_min(&DMatrix::from_iterator(4, 4, tm.v.iter().copied()))
}

/// Minimum symplectic eigenvalue of the partial transpose (Y₂ → −Y₂).
pub fn min_symplectic_partial_transpose(tm: &TwoModeCovariance) -> f64 {
    let mut pt = tm.v;
    for k in 0..4 {
        if k != 3 {
            pt[(k, 3)] = -pt[(k, 3)];
            pt[(3, k)] = -pt[(3, k)];
        }
    }
    symplectic_eigenvalue_min(&DMatrix::from_iterator(4, 4, pt.iter().copied()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Physicality {
    pub ok: bool,
    pub min_symplectic: f64,
}

/// A state is physical when every symplectic eigenvalue is at least
/// 1/2 − [`PHYSICALITY_TOL`].
pub fn physicality(v: &CovarianceMatrix) -> Physicality {
    let min = min_symplectic(v);
    Physicality {
        ok: min >= 0.5 - PHYSICALITY_TOL,
        min_symplectic: min,
    }
}

/// Nonlocality regions: A — no entanglement; B — entanglement without
/// steering; C — one-way steering (direction recorded); D — two-way.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    A,
    B,
    C(SteeringDirection),
    D,
}

/// Total classification of a nonnegative (E_N, 𝒢₁₂, 𝒢₂₁) triple.
pub fn classify_region(e_n: f64, g_12: f64, g_21: f64, epsilon: f64) -> Region {
    if e_n <= epsilon {
        Region::A
    } else if g_12 <= epsilon && g_21 <= epsilon {
        Region::B
    } else if g_12 > epsilon && g_21 > epsilon {
        Region::D
    } else if g_12 > epsilon {
        Region::C(SteeringDirection::OneToTwo)
    } else {
        Region::C(SteeringDirection::TwoToOne)
    }
}

/// Full nonlocality summary for an ordered mode pair.
#[derive(Debug, Clone, PartialEq)]
pub struct NonlocalityReport {
    pub modes: (Mode, Mode),
    pub e_n: f64,
    /// Steering mode1 → mode2.
    pub g_12: f64,
    /// Steering mode2 → mode1.
    pub g_21: f64,
    pub eta_minus: f64,
    /// Minimum symplectic eigenvalue of the reduced two-mode state.
    pub min_symplectic: f64,
    pub region: Region,
    pub epsilon: f64,
}

/// Reduce, measure and classify one mode pair of a 6×6 covariance.
pub fn nonlocality_report(
    v: &CovarianceMatrix,
    i: Mode,
    j: Mode,
    epsilon: f64,
) -> Result<NonlocalityReport, MeasureError> {
    let tm = reduce_two_mode(v, i, j)?;
    let (e_n, eta_minus) = log_negativity(&tm)?;
    let g_12 = steering(&tm, SteeringDirection::OneToTwo)?;
    let g_21 = steering(&tm, SteeringDirection::TwoToOne)?;
    Ok(NonlocalityReport {
        modes: (i, j),
        e_n,
        g_12,
        g_21,
        eta_minus,
        min_symplectic: min_symplectic_two_mode(&tm),
        region: classify_region(e_n, g_12, g_21, epsilon),
        epsilon,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::CovarianceMatrix;
    use crate::model::Mat6;
    use approx::assert_relative_eq;
    use libm::{cosh, exp, sinh};

    fn tmsv(s: f64) -> TwoModeCovariance {
        let c = cosh(2.0 * s) / 2.0;
        let q = sinh(2.0 * s) / 2.0;
        TwoModeCovariance {
            v: Mat4::from_row_slice(&[
                c, 0.0, q, 0.0, //
                0.0, c, 0.0, -q, //
                q, 0.0, c, 0.0, //
                0.0, -q, 0.0, c,
            ]),
            modes: (Mode::A2, Mode::B),
        }
    }

    fn two_mode_vacuum() -> TwoModeCovariance {
        TwoModeCovariance {
            v: Mat4::identity() * 0.5,
            modes: (Mode::A2, Mode::B),
        }
    }

    #[test]
    fn reduction_block_structure() {
        let v = CovarianceMatrix::vacuum();
        let tm = reduce_two_mode(&v, Mode::A1, Mode::B).unwrap();
        assert_eq!(tm.v, Mat4::identity() * 0.5);

        let mut raw = Mat6::identity() * 0.5;
        raw[(2, 4)] = 0.1;
        raw[(4, 2)] = 0.1;
        let v = CovarianceMatrix(raw);
        // (a₂, b): the correlation lands in the off-diagonal block.
        let tm = reduce_two_mode(&v, Mode::A2, Mode::B).unwrap();
        assert_eq!(tm.v[(0, 2)], 0.1);
        // (a₁, a₂): block-diagonal, zero correlation block.
        let tm = reduce_two_mode(&v, Mode::A1, Mode::A2).unwrap();
        assert_eq!(tm.v.view((0, 2), (2, 2)).norm(), 0.0);
    }

    #[test]
    fn reduction_rejects_equal_modes() {
        let v = CovarianceMatrix::vacuum();
        assert!(matches!(
            reduce_two_mode(&v, Mode::B, Mode::B),
            Err(MeasureError::SamePair)
        ));
    }

    #[test]
    fn mode_labels_round_trip() {
        for m in [Mode::A1, Mode::A2, Mode::B] {
            assert_eq!(m.label().parse::<Mode>().unwrap(), m);
        }
        assert!("x".parse::<Mode>().is_err());
    }

    #[test]
    fn vacuum_has_no_nonlocality() {
        let tm = two_mode_vacuum();
        let (e_n, eta) = log_negativity(&tm).unwrap();
        assert_eq!(e_n, 0.0);
        assert_relative_eq!(eta, 0.5, max_relative = 1e-12);
        assert_eq!(steering(&tm, SteeringDirection::OneToTwo).unwrap(), 0.0);
        assert_eq!(steering(&tm, SteeringDirection::TwoToOne).unwrap(), 0.0);
    }

    #[test]
    fn tmsv_closed_forms() {
        let tm = tmsv(0.5);
        let (e_n, eta) = log_negativity(&tm).unwrap();
        assert_relative_eq!(eta, exp(-1.0) / 2.0, max_relative = 1e-12);
        assert_relative_eq!(e_n, 1.0, max_relative = 1e-12);
        let g = steering(&tm, SteeringDirection::OneToTwo).unwrap();
        assert_relative_eq!(g, log(cosh(1.0)), max_relative = 1e-12);
        assert_relative_eq!(g, 0.433781, max_relative = 1e-6);
        let g2 = steering(&tm, SteeringDirection::TwoToOne).unwrap();
        assert_relative_eq!(g, g2, max_relative = 1e-12);
    }

    #[test]
    fn tmsv_family_identities() {
        for s in [0.1, 0.25, 0.5, 1.0] {
            let tm = tmsv(s);
            let (e_n, _) = log_negativity(&tm).unwrap();
            assert_relative_eq!(e_n, 2.0 * s, max_relative = 1e-9);
            let g = steering(&tm, SteeringDirection::OneToTwo).unwrap();
            assert_relative_eq!(g, log(cosh(2.0 * s)), max_relative = 1e-9);
        }
    }

    #[test]
    fn nonphysical_state_is_rejected() {
        // Indefinite symmetric input with Σ² − 4·det𝒱₁₂ ≈ −30.5.
        let v = Mat4::from_row_slice(&[
            0.329, 0.187, 1.294, 0.329, //
            0.187, -2.204, -0.283, 0.809, //
            1.294, -0.283, 1.822, -0.636, //
            0.329, 0.809, -0.636, 2.002,
        ]);
        let tm = TwoModeCovariance {
            v,
            modes: (Mode::A1, Mode::A2),
        };
        assert!(matches!(
            log_negativity(&tm),
            Err(MeasureError::NonPhysical { .. })
        ));
    }

    #[test]
    fn variances_of_squeezed_block() {
        let mut raw = Mat6::identity() * 0.5;
        raw[(2, 2)] = exp(2.0) / 2.0;
        raw[(3, 3)] = exp(-2.0) / 2.0;
        let v = CovarianceMatrix(raw);
        let (vx, vy) = quadrature_variances(&v, Mode::A2);
        assert_relative_eq!(vx, 3.694528, max_relative = 1e-6);
        assert_relative_eq!(vy, 0.067668, max_relative = 1e-5);
        assert_eq!(quadrature_variances(&v, Mode::A1), (0.5, 0.5));
    }

    #[test]
    fn physicality_examples() {
        let p = physicality(&CovarianceMatrix::vacuum());
        assert!(p.ok);
        assert_relative_eq!(p.min_symplectic, 0.5, max_relative = 1e-9);

        let sub = CovarianceMatrix(Mat6::identity() * 0.4);
        let p = physicality(&sub);
        assert!(!p.ok);
        assert_relative_eq!(p.min_symplectic, 0.4, max_relative = 1e-9);
    }

    #[test]
    fn pt_symplectic_matches_closed_form_on_tmsv() {
        for s in [0.0, 0.25, 0.5, 1.0] {
            let tm = tmsv(s);
            let (_, eta) = log_negativity(&tm).unwrap();
            let nu = min_symplectic_partial_transpose(&tm);
            assert_relative_eq!(eta, nu, max_relative = 1e-9);
        }
    }

    #[test]
    fn region_classification_examples() {
        let eps = DEFAULT_EPSILON;
        assert_eq!(classify_region(0.0, 0.0, 0.0, eps), Region::A);
        assert_eq!(
            classify_region(0.3, 0.05, 0.0, eps),
            Region::C(SteeringDirection::OneToTwo)
        );
        assert_eq!(
            classify_region(0.3, 0.0, 0.05, eps),
            Region::C(SteeringDirection::TwoToOne)
        );
        assert_eq!(classify_region(0.3, 0.0, 0.0, eps), Region::B);
        assert_eq!(classify_region(0.533, 0.0164, 0.115, eps), Region::D);
    }

    proptest::proptest! {
        #[test]
        fn classification_is_total(
            e_n in 0.0f64..2.0,
            g12 in 0.0f64..1.0,
            g21 in 0.0f64..1.0,
        ) {
            // Exactly one class for every nonnegative triple.
            let region = classify_region(e_n, g12, g21, DEFAULT_EPSILON);
            let matches = [
                region == Region::A,
                region == Region::B,
                matches!(region, Region::C(_)),
                region == Region::D,
            ];
            proptest::prop_assert_eq!(matches.iter().filter(|&&m| m).count(), 1);
        }
    }
}
