//! Physical inputs and the effective linearized model.
//!
//! All rates and detunings are dimensionless multiples of the mechanical
//! frequency ω_m; ω_m itself only sets the unit and never enters the
//! numerics (it appears as 1.0 wherever the formulas need it).
//!
//! Quadrature ordering everywhere: (X_a1, Y_a1, X_a2, Y_a2, X_b, Y_b),
//! with X = (o + o†)/√2 so the vacuum variance is 1/2 per quadrature.

use core::fmt;

use libm::{atanh, cos, cosh, exp, fabs, sin, sinh, sqrt, tanh};
use num_complex::Complex64;

/// 6×6 real matrix over the quadrature ordering above.
pub type Mat6 = nalgebra::SMatrix<f64, 6, 6>;

/// Mechanical frequency in model units.
pub const OMEGA_M: f64 = 1.0;

/// Advisory threshold on sinh(r)·J / (δ₁ + δ₂ˢ) above which the
/// rotating-wave reduction of the resonator-resonator coupling is suspect.
pub const RWA_WARN_RATIO: f64 = 0.1;

const SELF_CONSISTENT_DAMPING: f64 = 0.5;
const SELF_CONSISTENT_TOL: f64 = 1e-12;
const SELF_CONSISTENT_MAX_ITER: usize = 200;

/// How the parametric pump is specified.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Pump {
    /// Pump amplitude Ω_p; the squeezing parameter follows from
    /// r = ½·arctanh(Ω_p/δ₂) and requires |Ω_p| < δ₂.
    Amplitude { omega_p: f64 },
    /// Squeezing parameter r given directly.
    Squeezing { r: f64 },
}

/// How the effective detuning Δ₁′ of the driven resonator is fixed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DetuningMode {
    /// Δ₁′ := ω_m (red-detuned drive resonant with the mechanics).
    FixedRed,
    /// Δ₁ given; Δ₁′ = Δ₁ − 2g·Re(b_s) solved self-consistently.
    SelfConsistent { delta1: f64 },
}

/// User-facing inputs, all rates in units of ω_m.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalParams {
    /// Optional ω_m in rad/s, for report labeling only.
    pub omega_m_hz: Option<f64>,
    /// Decay rate of the driven resonator a₁.
    pub kappa1: f64,
    /// Decay rate of the pumped resonator a₂.
    pub kappa2: f64,
    /// Mechanical decay rate.
    pub gamma_m: f64,
    /// Bare resonator-resonator coupling J.
    pub j: f64,
    /// Single-photon optomechanical coupling g.
    pub g: f64,
    /// Drive amplitude E.
    pub drive: f64,
    pub pump: Pump,
    /// Pump phase θ.
    pub theta: f64,
    /// Detuning δ₂ = ω₂ − ω_p/2.
    pub delta2: f64,
    /// Detuning δ = ω − ω_p/2.
    pub delta: f64,
    /// Thermal phonon occupancy of the mechanical bath.
    pub mbar: f64,
    pub detuning_mode: DetuningMode,
}

impl PhysicalParams {
    pub fn validate(&self) -> Result<(), ModelError> {
        let positive = [
            ("kappa1", self.kappa1),
            ("kappa2", self.kappa2),
            ("gamma_m", self.gamma_m),
        ];
        for (name, value) in positive {
            if !(value > 0.0) || !value.is_finite() {
                return Err(ModelError::Domain {
                    what: name,
                    value,
                });
            }
        }
        if !(self.mbar >= 0.0) || !self.mbar.is_finite() {
            return Err(ModelError::Domain {
                what: "mbar",
                value: self.mbar,
            });
        }
        for (name, value) in [
            ("J", self.j),
            ("g", self.g),
            ("E", self.drive),
            ("theta", self.theta),
            ("delta2", self.delta2),
            ("delta", self.delta),
        ] {
            if !value.is_finite() {
                return Err(ModelError::Domain {
                    what: name,
                    value,
                });
            }
        }
        if let Pump::Amplitude { omega_p } = self.pump {
            if fabs(omega_p / self.delta2) >= 1.0 {
                return Err(ModelError::PumpOutOfDomain {
                    beta: omega_p / self.delta2,
                });
            }
        }
        Ok(())
    }
}

/// Coupling and squeezing coefficient of the hybrid mode
/// cosh(λ)·δb + sinh(λ)·δa₂†, defined only for G > Jˢ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bogoliubov {
    /// η = √(G² − Jˢ²).
    pub eta: f64,
    /// λ = arctanh(Jˢ/G).
    pub lambda: f64,
}

/// Squeezing-picture quantities derived from [`PhysicalParams`].
#[derive(Debug, Clone, PartialEq)]
pub struct DerivedParams {
    /// β = Ω_p/δ₂ = tanh(2r).
    pub beta: f64,
    /// Squeezing parameter r.
    pub r: f64,
    /// Squeezed-bath occupancy N = sinh²r.
    pub n_bath: f64,
    /// Squeezed-bath correlation M = cosh(r)·sinh(r)·e^{−iθ}.
    pub m_bath: Complex64,
    /// δ₂ˢ = δ₂·√(1−β²).
    pub delta2_squeezed: f64,
    /// Jˢ = cosh(r)·J.
    pub j_squeezed: f64,
    /// Δ₂ = δ₂ˢ − δ.
    pub delta2_eff: f64,
    /// Effective detuning Δ₁′ of the driven resonator.
    pub delta1_eff: f64,
    /// Steady optical amplitude a₁ₛ.
    pub a1_steady: Complex64,
    /// Steady mechanical amplitude b_s.
    pub b_steady: Complex64,
    /// Effective optomechanical coupling G = g·|a₁ₛ|.
    pub g_eff: f64,
    /// Hybrid-mode diagnostics, absent when G ≤ Jˢ.
    pub bogoliubov: Option<Bogoliubov>,
}

/// 6×6 drift matrix of the quadrature fluctuations.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftMatrix(pub Mat6);

/// 6×6 noise diffusion matrix, block-diagonal D₁ ⊕ D₂ ⊕ D₃.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffusionMatrix(pub Mat6);

#[derive(Debug, Clone, PartialEq)]
pub enum ModelError {
    /// A parameter is outside its admissible range.
    Domain { what: &'static str, value: f64 },
    /// |Ω_p/δ₂| ≥ 1: the arctanh defining r has no value.
    PumpOutOfDomain { beta: f64 },
    /// The Δ₁′ fixed-point iteration did not converge.
    NonConvergence { iters: usize },
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::Domain { what, value } => {
                write!(f, "parameter {what} = {value} outside admissible range")
            }
            ModelError::PumpOutOfDomain { beta } => {
                write!(
                    f,
                    "pump ratio Omega_p/delta2 = {beta} outside arctanh domain (|beta| must be < 1)"
                )
            }
            ModelError::NonConvergence { iters } => {
                write!(f, "Delta1' fixed point did not converge in {iters} iterations")
            }
        }
    }
}

/// Steady amplitudes and effective coupling at a given frame:
/// a₁ₛ = E(iΔ₂+κ₂/2)/[Jˢ² + (iΔ₁′+κ₁/2)(iΔ₂+κ₂/2)],
/// b_s = i·g|a₁ₛ|²/(iω_m+γ_m/2), G = g|a₁ₛ|.
fn amplitudes_at(
    p: &PhysicalParams,
    delta1_eff: f64,
    delta2_eff: f64,
    j_squeezed: f64,
) -> (Complex64, Complex64, f64) {
    let z1 = Complex64::new(p.kappa1 / 2.0, delta1_eff);
    let z2 = Complex64::new(p.kappa2 / 2.0, delta2_eff);
    let a1s = p.drive * z2 / (j_squeezed * j_squeezed + z1 * z2);
    let bs = Complex64::new(0.0, p.g * a1s.norm_sqr()) / Complex64::new(p.gamma_m / 2.0, OMEGA_M);
    let g_eff = p.g * a1s.norm();
    (a1s, bs, g_eff)
}

/// Steady mean values for the already-derived frame of `d`.
///
/// Only the modulus of a₁ₛ enters the drift matrix; the drive phase that
/// would make it real is not tracked.
pub fn steady_amplitudes(p: &PhysicalParams, d: &DerivedParams) -> (Complex64, Complex64, f64) {
    amplitudes_at(p, d.delta1_eff, d.delta2_eff, d.j_squeezed)
}

fn solve_delta1_eff(
    p: &PhysicalParams,
    delta1: f64,
    delta2_eff: f64,
    j_squeezed: f64,
) -> Result<f64, ModelError> {
    let mut x = delta1;
    for _ in 0..SELF_CONSISTENT_MAX_ITER {
        let (_, bs, _) = amplitudes_at(p, x, delta2_eff, j_squeezed);
        let target = delta1 - 2.0 * p.g * bs.re;
        let next = (1.0 - SELF_CONSISTENT_DAMPING) * x + SELF_CONSISTENT_DAMPING * target;
        let scale = fabs(x).max(fabs(next)).max(1.0);
        if fabs(next - x) <= SELF_CONSISTENT_TOL * scale {
            return Ok(next);
        }
        x = next;
    }
    Err(ModelError::NonConvergence {
        iters: SELF_CONSISTENT_MAX_ITER,
    })
}

/// Transform physical inputs into the squeezing picture and solve the
/// steady-state amplitudes.
pub fn derive_params(p: &PhysicalParams) -> Result<DerivedParams, ModelError> {
    p.validate()?;
    let (beta, r) = match p.pump {
        Pump::Amplitude { omega_p } => {
            let beta = omega_p / p.delta2;
            if fabs(beta) >= 1.0 {
                return Err(ModelError::PumpOutOfDomain { beta });
            }
            (beta, 0.5 * atanh(beta))
        }
        Pump::Squeezing { r } => (tanh(2.0 * r), r),
    };
    let n_bath = sinh(r) * sinh(r);
    let m_bath = Complex64::from_polar(cosh(r) * sinh(r), -p.theta);
    let delta2_squeezed = p.delta2 * sqrt(1.0 - beta * beta);
    let j_squeezed = cosh(r) * p.j;
    let delta2_eff = delta2_squeezed - p.delta;
    let delta1_eff = match p.detuning_mode {
        DetuningMode::FixedRed => OMEGA_M,
        DetuningMode::SelfConsistent { delta1 } => {
            solve_delta1_eff(p, delta1, delta2_eff, j_squeezed)?
        }
    };
    let (a1_steady, b_steady, g_eff) = amplitudes_at(p, delta1_eff, delta2_eff, j_squeezed);
    Ok(DerivedParams {
        beta,
        r,
        n_bath,
        m_bath,
        delta2_squeezed,
        j_squeezed,
        delta2_eff,
        delta1_eff,
        a1_steady,
        b_steady,
        g_eff,
        bogoliubov: bogoliubov_diagnostics(g_eff, j_squeezed),
    })
}

/// η = √(G²−Jˢ²) and λ = arctanh(Jˢ/G), defined only when G > Jˢ.
pub fn bogoliubov_diagnostics(g_eff: f64, j_squeezed: f64) -> Option<Bogoliubov> {
    if g_eff > j_squeezed && g_eff > 0.0 {
        Some(Bogoliubov {
            eta: sqrt(g_eff * g_eff - j_squeezed * j_squeezed),
            lambda: atanh(j_squeezed / g_eff),
        })
    } else {
        None
    }
}

/// Advisory check of the rotating-wave reduction: the counter-rotating
/// pump sideband of the J coupling is suppressed by δ₁+δ₂ˢ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RwaReport {
    /// sinh(r)·J / (δ₁+δ₂ˢ) with δ₁ = δ + Δ₁′.
    pub ratio: f64,
    pub warn: bool,
}

pub fn rwa_validity(p: &PhysicalParams, d: &DerivedParams) -> RwaReport {
    let delta1 = p.delta + d.delta1_eff;
    let ratio = fabs(sinh(d.r) * p.j) / fabs(delta1 + d.delta2_squeezed);
    RwaReport {
        ratio,
        warn: ratio > RWA_WARN_RATIO,
    }
}

/// Drift matrix of dℛ/dt = Mℛ + 𝒩 over (X_a1, Y_a1, X_a2, Y_a2, X_b, Y_b).
pub fn build_drift(p: &PhysicalParams, d: &DerivedParams) -> DriftMatrix {
    let (k1, k2, gm) = (p.kappa1, p.kappa2, p.gamma_m);
    let (d1, d2, js, g) = (d.delta1_eff, d.delta2_eff, d.j_squeezed, d.g_eff);
    let w = OMEGA_M;
    DriftMatrix(Mat6::from_row_slice(&[
        -k1 / 2.0, d1, 0.0, js, 0.0, -g, //
        -d1, -k1 / 2.0, -js, 0.0, g, 0.0, //
        0.0, js, -k2 / 2.0, d2, 0.0, 0.0, //
        -js, 0.0, -d2, -k2 / 2.0, 0.0, 0.0, //
        0.0, -g, 0.0, 0.0, -gm / 2.0, w, //
        g, 0.0, 0.0, 0.0, -w, -gm / 2.0,
    ]))
}

/// Noise diffusion matrix D = D₁ ⊕ D₂ ⊕ D₃.
///
/// The D₂ diagonal is evaluated as cosh2r ± cosθ·sinh2r =
/// e^{2r}(1±cosθ)/2 + e^{−2r}(1∓cosθ)/2, which stays accurate for large r
/// where the naive difference of hyperbolics cancels.
pub fn build_diffusion(p: &PhysicalParams, d: &DerivedParams) -> DiffusionMatrix {
    let mut m = Mat6::zeros();
    m[(0, 0)] = p.kappa1 / 2.0;
    m[(1, 1)] = p.kappa1 / 2.0;

    let c = cos(p.theta);
    let s = sin(p.theta);
    let e2r = exp(2.0 * d.r);
    let em2r = exp(-2.0 * d.r);
    let sinh2r = (e2r - em2r) / 2.0;
    let half_k2 = p.kappa2 / 2.0;
    m[(2, 2)] = half_k2 * (e2r * (1.0 + c) + em2r * (1.0 - c)) / 2.0;
    m[(3, 3)] = half_k2 * (e2r * (1.0 - c) + em2r * (1.0 + c)) / 2.0;
    let off = -half_k2 * sinh2r * s;
    m[(2, 3)] = off;
    m[(3, 2)] = off;

    let mech = (p.gamma_m / 2.0) * (2.0 * p.mbar + 1.0);
    m[(4, 4)] = mech;
    m[(5, 5)] = mech;
    DiffusionMatrix(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn base_params() -> PhysicalParams {
        PhysicalParams {
            omega_m_hz: None,
            kappa1: 0.6,
            kappa2: 0.6,
            gamma_m: 1e-5,
            j: 1.0,
            g: 8.5e-5,
            drive: 3.7e5,
            pump: Pump::Amplitude { omega_p: 0.5 },
            theta: 0.0,
            delta2: 0.52,
            delta: 0.5,
            mbar: 0.0,
            detuning_mode: DetuningMode::FixedRed,
        }
    }

    #[test]
    fn pump_ratio_and_squeezing_parameter() {
        let d = derive_params(&base_params()).unwrap();
        assert_relative_eq!(d.beta, 0.5 / 0.52, max_relative = 1e-12);
        // r = ½·arctanh(25/26)
        assert_relative_eq!(d.r, 0.982956408, max_relative = 1e-8);
    }

    #[test]
    fn no_pump_is_the_identity_transform() {
        let mut p = base_params();
        p.pump = Pump::Amplitude { omega_p: 0.0 };
        let d = derive_params(&p).unwrap();
        assert_eq!(d.r, 0.0);
        assert_eq!(d.n_bath, 0.0);
        assert_eq!(d.m_bath, Complex64::new(0.0, 0.0));
        assert_eq!(d.j_squeezed, p.j);
        assert_eq!(d.delta2_squeezed, p.delta2);
    }

    #[test]
    fn squeezed_frame_quantities() {
        let mut p = base_params();
        p.pump = Pump::Squeezing { r: 0.98295640717 };
        let d = derive_params(&p).unwrap();
        assert_relative_eq!(d.j_squeezed, 1.523274141, max_relative = 1e-8);
        assert_relative_eq!(d.delta2_squeezed, 0.142828569, max_relative = 1e-8);
        assert_relative_eq!(d.delta2_eff, -0.357171431, max_relative = 1e-8);
    }

    #[test]
    fn pump_at_arctanh_boundary_is_rejected() {
        let mut p = base_params();
        p.pump = Pump::Amplitude { omega_p: 0.52 };
        assert!(matches!(
            derive_params(&p),
            Err(ModelError::PumpOutOfDomain { .. })
        ));
        p.pump = Pump::Amplitude { omega_p: 0.6 };
        assert!(derive_params(&p).is_err());
    }

    #[test]
    fn no_drive_means_no_effective_coupling() {
        let mut p = base_params();
        p.drive = 0.0;
        let d = derive_params(&p).unwrap();
        assert_eq!(d.a1_steady, Complex64::new(0.0, 0.0));
        assert_eq!(d.b_steady, Complex64::new(0.0, 0.0));
        assert_eq!(d.g_eff, 0.0);
    }

    #[test]
    fn single_cavity_amplitude_closed_form() {
        // J = 0, r = 0, Δ₁′ = 1, κ₁ = 0.6: a₁ₛ = E/(i + 0.3).
        let mut p = base_params();
        p.j = 0.0;
        p.pump = Pump::Amplitude { omega_p: 0.0 };
        let d = derive_params(&p).unwrap();
        let expected = p.drive / Complex64::new(0.3, 1.0);
        assert_relative_eq!(d.a1_steady.re, expected.re, max_relative = 1e-12);
        assert_relative_eq!(d.a1_steady.im, expected.im, max_relative = 1e-12);
        assert_relative_eq!(
            d.a1_steady.norm(),
            p.drive / sqrt(1.09),
            max_relative = 1e-12
        );
    }

    #[test]
    fn amplitude_matches_rationalized_evaluation() {
        // Independent route: rationalize the complex quotient by hand.
        let p = base_params();
        let d = derive_params(&p).unwrap();
        let (dr1, dr2, js) = (d.delta1_eff, d.delta2_eff, d.j_squeezed);
        let (nr, ni) = (p.kappa2 / 2.0 * p.drive, dr2 * p.drive);
        let den_re = js * js + p.kappa1 / 2.0 * p.kappa2 / 2.0 - dr1 * dr2;
        let den_im = dr1 * p.kappa2 / 2.0 + dr2 * p.kappa1 / 2.0;
        let den_sq = den_re * den_re + den_im * den_im;
        let re = (nr * den_re + ni * den_im) / den_sq;
        let im = (ni * den_re - nr * den_im) / den_sq;
        assert_relative_eq!(d.a1_steady.re, re, max_relative = 1e-12);
        assert_relative_eq!(d.a1_steady.im, im, max_relative = 1e-12);
        // Frozen reference values for this parameter set.
        assert_relative_eq!(d.a1_steady.norm(), 62209.629478, max_relative = 1e-6);
        assert_relative_eq!(d.g_eff, 5.287818506, max_relative = 1e-6);
    }

    #[test]
    fn drive_rescales_coupling_linearly() {
        let p = base_params();
        let g1 = derive_params(&p).unwrap().g_eff;
        let mut p2 = p.clone();
        p2.drive *= 2.0;
        let g2 = derive_params(&p2).unwrap().g_eff;
        assert_relative_eq!(g2 / g1, 2.0, max_relative = 1e-12);
    }

    #[test]
    fn self_consistent_detuning_without_drive_is_bare() {
        let mut p = base_params();
        p.drive = 0.0;
        p.detuning_mode = DetuningMode::SelfConsistent { delta1: 1.3 };
        let d = derive_params(&p).unwrap();
        assert_relative_eq!(d.delta1_eff, 1.3, max_relative = 1e-12);
    }

    #[test]
    fn self_consistent_detuning_satisfies_fixed_point() {
        let mut p = base_params();
        p.drive = 1e3;
        p.detuning_mode = DetuningMode::SelfConsistent { delta1: 1.0 };
        let d = derive_params(&p).unwrap();
        let (_, bs, _) = steady_amplitudes(&p, &d);
        assert_relative_eq!(
            d.delta1_eff,
            1.0 - 2.0 * p.g * bs.re,
            max_relative = 1e-10
        );
    }

    #[test]
    fn bath_correlation_identities() {
        for r in [0.0, 0.3, 1.0, 2.0, 3.0] {
            let mut p = base_params();
            p.pump = Pump::Squeezing { r };
            p.theta = 0.7;
            let d = derive_params(&p).unwrap();
            assert_relative_eq!(d.n_bath, sinh(r) * sinh(r), max_relative = 1e-12);
            assert_relative_eq!(
                d.m_bath.norm_sqr(),
                d.n_bath * (d.n_bath + 1.0),
                max_relative = 1e-12,
                epsilon = 1e-15
            );
        }
    }

    #[test]
    fn squeezed_frame_against_exponential_forms() {
        // Jˢ/J = cosh r and δ₂ˢ/δ₂ = sech 2r via explicit exponentials.
        for r in [0.0, 0.1, 0.5, 0.982956408, 1.7, 3.0] {
            let mut p = base_params();
            p.pump = Pump::Squeezing { r };
            let d = derive_params(&p).unwrap();
            let cosh_r = (exp(r) + exp(-r)) / 2.0;
            let sech_2r = 2.0 / (exp(2.0 * r) + exp(-2.0 * r));
            assert_relative_eq!(d.j_squeezed / p.j, cosh_r, max_relative = 1e-12);
            assert_relative_eq!(d.delta2_squeezed / p.delta2, sech_2r, max_relative = 1e-12);
        }
    }

    #[test]
    fn drift_matches_reference_first_row() {
        let mut p = base_params();
        p.pump = Pump::Squeezing { r: 0.98295640717 };
        let d = derive_params(&p).unwrap();
        let m = build_drift(&p, &d).0;
        assert_relative_eq!(m[(0, 0)], -0.3, max_relative = 1e-12);
        assert_relative_eq!(m[(0, 1)], 1.0, max_relative = 1e-12);
        assert_eq!(m[(0, 2)], 0.0);
        assert_relative_eq!(m[(0, 3)], 1.523274141, max_relative = 1e-8);
        assert_eq!(m[(0, 4)], 0.0);
        assert_relative_eq!(m[(0, 5)], -d.g_eff, max_relative = 1e-12);
    }

    #[test]
    fn drift_diagonal_and_antisymmetric_structure() {
        let p = base_params();
        let d = derive_params(&p).unwrap();
        let m = build_drift(&p, &d).0;
        for i in 0..2 {
            assert_eq!(m[(i, i)], -p.kappa1 / 2.0);
            assert_eq!(m[(i + 2, i + 2)], -p.kappa2 / 2.0);
            assert_eq!(m[(i + 4, i + 4)], -p.gamma_m / 2.0);
        }
        // Off-diagonal part is antisymmetric for this passive model.
        for i in 0..6 {
            for j in 0..6 {
                if i != j {
                    assert_relative_eq!(m[(i, j)], -m[(j, i)], max_relative = 1e-12);
                }
            }
        }
    }

    #[test]
    fn uncoupled_drift_eigenvalues() {
        let mut p = base_params();
        p.drive = 0.0;
        p.j = 0.0;
        p.pump = Pump::Amplitude { omega_p: 0.0 };
        let d = derive_params(&p).unwrap();
        let m = build_drift(&p, &d).0;
        let mut eigs: alloc::vec::Vec<(f64, f64)> = m
            .complex_eigenvalues()
            .iter()
            .map(|z| (z.re, z.im))
            .collect();
        eigs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let expected = [
            (-0.3, -1.0),
            (-0.3, 1.0),
            (-0.3, -0.02),
            (-0.3, 0.02),
            (-5e-6, -1.0),
            (-5e-6, 1.0),
        ];
        for (re, im) in expected {
            assert!(
                eigs.iter()
                    .any(|&(er, ei)| fabs(er - re) < 1e-9 && fabs(ei - im) < 1e-9),
                "missing eigenvalue ({re}, {im}) in {eigs:?}"
            );
        }
    }

    #[test]
    fn drift_is_passive_over_random_draws() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..100 {
            let p = PhysicalParams {
                omega_m_hz: None,
                kappa1: 0.05 + 1.5 * rng.gen::<f64>(),
                kappa2: 0.05 + 1.5 * rng.gen::<f64>(),
                gamma_m: 1e-6 + 0.1 * rng.gen::<f64>(),
                j: 2.5 * rng.gen::<f64>(),
                g: 2e-4 * rng.gen::<f64>(),
                drive: 8e5 * rng.gen::<f64>(),
                pump: Pump::Squeezing {
                    r: 2.0 * rng.gen::<f64>(),
                },
                theta: 6.283 * rng.gen::<f64>(),
                delta2: 0.1 + 2.0 * rng.gen::<f64>(),
                delta: rng.gen::<f64>(),
                mbar: 5.0 * rng.gen::<f64>(),
                detuning_mode: DetuningMode::FixedRed,
            };
            let d = derive_params(&p).unwrap();
            let m = build_drift(&p, &d).0;
            let max_re = m
                .complex_eigenvalues()
                .iter()
                .map(|z| z.re)
                .fold(f64::NEG_INFINITY, f64::max);
            assert!(max_re < 0.0, "non-passive drift: max Re = {max_re}");
        }
    }

    #[test]
    fn vacuum_bath_diffusion() {
        let mut p = base_params();
        p.pump = Pump::Amplitude { omega_p: 0.0 };
        let d = derive_params(&p).unwrap();
        let m = build_diffusion(&p, &d).0;
        let expected = Mat6::from_diagonal(&nalgebra::SVector::<f64, 6>::from([
            0.3, 0.3, 0.3, 0.3, 5e-6, 5e-6,
        ]));
        assert_relative_eq!((m - expected).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn squeezed_bath_diffusion_at_zero_phase() {
        let mut p = base_params();
        p.pump = Pump::Squeezing { r: 1.0 };
        let d = derive_params(&p).unwrap();
        let m = build_diffusion(&p, &d).0;
        assert_relative_eq!(m[(2, 2)], 0.3 * exp(2.0), max_relative = 1e-12);
        assert_relative_eq!(m[(3, 3)], 0.3 * exp(-2.0), max_relative = 1e-12);
        assert_eq!(m[(2, 3)], 0.0);
        // Frozen: (κ₂/2)e^{±2}
        assert_relative_eq!(m[(2, 2)], 2.216716830, max_relative = 1e-9);
        assert_relative_eq!(m[(3, 3)], 0.040600585, max_relative = 1e-9);
    }

    #[test]
    fn squeezed_bath_diffusion_off_axis_phase() {
        let mut p = base_params();
        p.pump = Pump::Squeezing { r: 0.5 };
        p.theta = core::f64::consts::FRAC_PI_2;
        let d = derive_params(&p).unwrap();
        let m = build_diffusion(&p, &d).0;
        // i(M*−M) = −sinh(2r)·sinθ, symmetric off-diagonal.
        assert_relative_eq!(m[(2, 3)], -0.3 * sinh(1.0), max_relative = 1e-12);
        assert_eq!(m[(2, 3)], m[(3, 2)]);
        let det = m[(2, 2)] * m[(3, 3)] - m[(2, 3)] * m[(3, 2)];
        assert_relative_eq!(det, 0.09, max_relative = 1e-12);
    }

    #[test]
    fn diffusion_determinant_identity_over_r_theta() {
        for i in 0..=30 {
            let r = 3.0 * i as f64 / 30.0;
            for k in 0..12 {
                let theta = core::f64::consts::TAU * k as f64 / 12.0;
                let mut p = base_params();
                p.pump = Pump::Squeezing { r };
                p.theta = theta;
                let d = derive_params(&p).unwrap();
                let m = build_diffusion(&p, &d).0;
                let det = m[(2, 2)] * m[(3, 3)] - m[(2, 3)] * m[(3, 2)];
                assert_relative_eq!(det, 0.09, max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn diffusion_is_positive_semidefinite() {
        for i in 0..=15 {
            let r = 3.0 * i as f64 / 15.0;
            for k in 0..8 {
                let theta = core::f64::consts::TAU * k as f64 / 8.0;
                let mut p = base_params();
                p.pump = Pump::Squeezing { r };
                p.theta = theta;
                p.mbar = 1.5;
                let d = derive_params(&p).unwrap();
                let m = build_diffusion(&p, &d).0;
                let min_eig = m
                    .symmetric_eigenvalues()
                    .iter()
                    .fold(f64::INFINITY, |a, &b| a.min(b));
                let scale = m.norm();
                assert!(min_eig >= -1e-12 * scale, "D not psd: {min_eig}");
            }
        }
    }

    #[test]
    fn rwa_ratio_examples() {
        let mut p = base_params();
        p.pump = Pump::Amplitude { omega_p: 0.0 };
        let d = derive_params(&p).unwrap();
        let rep = rwa_validity(&p, &d);
        assert_eq!(rep.ratio, 0.0);
        assert!(!rep.warn);

        // sinh(2)·J over δ₁+δ₂ˢ = 1.5 by construction: δ = 0.5, Δ₁′ = 1,
        // δ₂ chosen so δ₂ˢ vanishes against the 1.5 total.
        let mut p = base_params();
        p.pump = Pump::Squeezing { r: 2.0 };
        p.delta2 = 0.0;
        let d = derive_params(&p).unwrap();
        let rep = rwa_validity(&p, &d);
        assert_relative_eq!(rep.ratio, sinh(2.0) / 1.5, max_relative = 1e-12);
        assert!(rep.warn);
    }

    #[test]
    fn bogoliubov_examples() {
        let b = bogoliubov_diagnostics(2.0, 0.0).unwrap();
        assert_eq!(b.eta, 2.0);
        assert_eq!(b.lambda, 0.0);

        let b = bogoliubov_diagnostics(2.0, 1.5234).unwrap();
        assert_relative_eq!(b.eta, 1.295860, max_relative = 1e-6);
        assert_relative_eq!(b.lambda, 1.000252, max_relative = 1e-6);

        assert!(bogoliubov_diagnostics(1.0, 1.5).is_none());
        assert!(bogoliubov_diagnostics(1.0, 1.0).is_none());
    }
}
