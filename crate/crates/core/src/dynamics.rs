//! Covariance dynamics dV/dt = MV + VMᵀ + D: fixed-step RK4 evolution,
//! the direct steady-state solve, and stability assessment.

use alloc::vec::Vec;
use core::fmt;

use libm::fabs;
use nalgebra::SMatrix;

use crate::model::{DiffusionMatrix, DriftMatrix, Mat6};

type Mat36 = SMatrix<f64, 36, 36>;
type Vec36 = SMatrix<f64, 36, 1>;

/// Eigenvalues with real part above this are treated as unstable;
/// marginal systems are rejected to protect the steady-state solver.
pub const STABILITY_MARGIN: f64 = -1e-12;

const STEP_HALVING_TOL: f64 = 1e-8;
const RESIDUAL_REL_TOL: f64 = 1e-10;
const REFINEMENT_STEPS: usize = 3;

/// 6×6 covariance of the quadrature fluctuations; vacuum variance is 1/2
/// per quadrature.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix(pub Mat6);

impl CovarianceMatrix {
    /// Three-mode vacuum, V = I/2.
    pub fn vacuum() -> Self {
        CovarianceMatrix(Mat6::identity() * 0.5)
    }

    /// Uncorrelated vacuum ⊗ vacuum ⊗ thermal(m̄) initial state.
    pub fn thermal_initial(mbar: f64) -> Self {
        let mut m = Mat6::identity() * 0.5;
        m[(4, 4)] = mbar + 0.5;
        m[(5, 5)] = mbar + 0.5;
        CovarianceMatrix(m)
    }

    pub fn symmetrized(m: Mat6) -> Self {
        CovarianceMatrix((m + m.transpose()) * 0.5)
    }

    pub fn max_abs(&self) -> f64 {
        max_abs_entry(&self.0)
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        max_abs_entry(&(self.0 - self.0.transpose())) <= tol * self.max_abs().max(f64::MIN_POSITIVE)
    }
}

/// Time-ordered covariance samples from [`evolve`].
#[derive(Debug, Clone)]
pub struct EvolutionTrace {
    /// Sample times in units of 1/ω_m, strictly increasing from 0.
    pub times: Vec<f64>,
    pub covariances: Vec<CovarianceMatrix>,
    /// Halving the step changed the final covariance by less than the
    /// step-halving tolerance (1e-8 entrywise relative).
    pub converged: bool,
    /// ‖MV + VMᵀ + D‖_max at the final covariance.
    pub final_residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DtPolicy {
    /// dt chosen so dt·ρ(M) ≤ factor (ρ = spectral radius).
    SpectralRadius { factor: f64 },
    Fixed { dt: f64 },
}

impl Default for DtPolicy {
    fn default() -> Self {
        DtPolicy::SpectralRadius { factor: 0.1 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DynamicsError {
    /// The dt policy produced a non-positive step.
    StepSize { dt: f64 },
    /// A covariance entry overflowed during integration.
    NonFinite { t: f64 },
    /// The drift matrix has an eigenvalue with non-negative real part.
    UnstableSystem { max_real_part: f64 },
    /// The vectorized steady-state system is rank-deficient.
    SingularSystem,
}

impl fmt::Display for DynamicsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DynamicsError::StepSize { dt } => write!(f, "dt policy produced dt = {dt}"),
            DynamicsError::NonFinite { t } => {
                write!(f, "covariance entry became non-finite at t = {t}")
            }
            DynamicsError::UnstableSystem { max_real_part } => write!(
                f,
                "no steady state: drift eigenvalue real part {max_real_part} >= 0"
            ),
            DynamicsError::SingularSystem => write!(f, "steady-state linear solve is singular"),
        }
    }
}

/// Outcome of the eigenvalue stability test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stability {
    pub stable: bool,
    pub max_real_part: f64,
}

/// Eigenvalue criterion: stable iff every eigenvalue real part is below
/// [`STABILITY_MARGIN`] (equivalent to Routh-Hurwitz for this purpose).
pub fn stability_check(m: &DriftMatrix) -> Stability {
    let max_real_part = m
        .0
        .complex_eigenvalues()
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max);
    Stability {
        stable: max_real_part < STABILITY_MARGIN,
        max_real_part,
    }
}

/// Spectral radius of the drift matrix.
pub fn spectral_radius(m: &DriftMatrix) -> f64 {
    m.0.complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

pub fn max_abs_entry(m: &Mat6) -> f64 {
    m.iter().fold(0.0, |a, &x| a.max(fabs(x)))
}

/// ‖MV + VMᵀ + D‖_max.
pub fn residual(m: &DriftMatrix, d: &DiffusionMatrix, v: &CovarianceMatrix) -> f64 {
    let r = m.0 * v.0 + v.0 * m.0.transpose() + d.0;
    max_abs_entry(&r)
}

fn lyapunov_rhs(m: &Mat6, d: &Mat6, v: &Mat6) -> Mat6 {
    m * v + v * m.transpose() + d
}

fn rk4_step(m: &Mat6, d: &Mat6, v: &Mat6, dt: f64) -> Mat6 {
    let k1 = lyapunov_rhs(m, d, v);
    let k2 = lyapunov_rhs(m, d, &(v + k1 * (dt / 2.0)));
    let k3 = lyapunov_rhs(m, d, &(v + k2 * (dt / 2.0)));
    let k4 = lyapunov_rhs(m, d, &(v + k3 * dt));
    let next = v + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
    (next + next.transpose()) * 0.5
}

fn integrate_final(m: &Mat6, d: &Mat6, v0: &Mat6, dt: f64, steps: usize) -> Result<Mat6, f64> {
    let mut v = *v0;
    for i in 0..steps {
        v = rk4_step(m, d, &v, dt);
        if !v.iter().all(|x| x.is_finite()) {
            return Err(dt * (i + 1) as f64);
        }
    }
    Ok(v)
}

/// Largest entrywise relative difference, ignoring entries more than
/// nine orders below the overall scale.
pub fn max_entrywise_rel(a: &Mat6, b: &Mat6) -> f64 {
    let scale = max_abs_entry(a).max(max_abs_entry(b));
    if scale == 0.0 {
        return 0.0;
    }
    let floor = 1e-9 * scale;
    let mut worst = 0.0f64;
    for i in 0..6 {
        for j in 0..6 {
            let denom = fabs(a[(i, j)]).max(fabs(b[(i, j)]));
            if denom >= floor {
                worst = worst.max(fabs(a[(i, j)] - b[(i, j)]) / denom);
            }
        }
    }
    worst
}

/// Integrate dV/dt = MV + VMᵀ + D with classical fixed-step RK4.
///
/// Symmetry is re-enforced each step. The trace holds every `stride`-th
/// step (plus the endpoint); `converged` reports a step-halving check on
/// the final covariance.
pub fn evolve(
    m: &DriftMatrix,
    d: &DiffusionMatrix,
    v0: &CovarianceMatrix,
    t_max: f64,
    dt_policy: DtPolicy,
    stride: usize,
) -> Result<EvolutionTrace, DynamicsError> {
    let dt_raw = match dt_policy {
        DtPolicy::SpectralRadius { factor } => {
            let rho = spectral_radius(m);
            if rho > 0.0 {
                factor / rho
            } else {
                factor
            }
        }
        DtPolicy::Fixed { dt } => dt,
    };
    if !(dt_raw > 0.0) || !(t_max > 0.0) {
        return Err(DynamicsError::StepSize { dt: dt_raw });
    }
    let steps = libm::ceil(t_max / dt_raw) as usize;
    let dt = t_max / steps as f64;
    let stride = stride.max(1);

    let mut v = v0.0;
    let mut times = Vec::with_capacity(steps / stride + 2);
    let mut covariances = Vec::with_capacity(steps / stride + 2);
    times.push(0.0);
    covariances.push(CovarianceMatrix(v));
    for i in 1..=steps {
        v = rk4_step(&m.0, &d.0, &v, dt);
        if !v.iter().all(|x| x.is_finite()) {
            return Err(DynamicsError::NonFinite { t: dt * i as f64 });
        }
        if i % stride == 0 || i == steps {
            times.push(dt * i as f64);
            covariances.push(CovarianceMatrix(v));
        }
    }

    let halved = integrate_final(&m.0, &d.0, &v0.0, dt / 2.0, 2 * steps)
        .map_err(|t| DynamicsError::NonFinite { t })?;
    let converged = max_entrywise_rel(&v, &halved) < STEP_HALVING_TOL;
    let final_residual = residual(m, d, &CovarianceMatrix(v));

    Ok(EvolutionTrace {
        times,
        covariances,
        converged,
        final_residual,
    })
}

/// Direct steady state of MV + VMᵀ + D = 0 via the vectorized 36×36
/// linear system (I⊗M + M⊗I)·vec(V) = −vec(D).
///
/// Fails on unstable drift (no steady state) or a rank-deficient solve.
/// The result is symmetrized and polished by iterative refinement until
/// the residual is at most 1e-10·‖D‖_max.
pub fn steady_state(
    m: &DriftMatrix,
    d: &DiffusionMatrix,
) -> Result<CovarianceMatrix, DynamicsError> {
    let st = stability_check(m);
    if !st.stable {
        return Err(DynamicsError::UnstableSystem {
            max_real_part: st.max_real_part,
        });
    }

    // Column-major vec: index = col*6 + row.
    // (I⊗M)  couples rows within a column block,
    // (M⊗I)  couples the same row position across column blocks.
    let mut a = Mat36::zeros();
    for col in 0..6 {
        for r in 0..6 {
            for rp in 0..6 {
                a[(col * 6 + r, col * 6 + rp)] += m.0[(r, rp)];
            }
            for cp in 0..6 {
                a[(col * 6 + r, cp * 6 + r)] += m.0[(col, cp)];
            }
        }
    }

    let lu = a.lu();
    let vec_of = |mat: &Mat6| {
        let mut v = Vec36::zeros();
        for col in 0..6 {
            for row in 0..6 {
                v[col * 6 + row] = mat[(col, row)];
            }
        }
        v
    };
    // Mat6 is column-major; vec_of above fills from (col,row) so invert
    // the same way when unpacking.
    let unvec = |v: &Vec36| {
        let mut mat = Mat6::zeros();
        for col in 0..6 {
            for row in 0..6 {
                mat[(col, row)] = v[col * 6 + row];
            }
        }
        mat
    };

    let b = -vec_of(&d.0);
    let x = lu.solve(&b).ok_or(DynamicsError::SingularSystem)?;
    let mut v = {
        let raw = unvec(&x);
        (raw + raw.transpose()) * 0.5
    };

    let d_scale = max_abs_entry(&d.0).max(f64::MIN_POSITIVE);
    for _ in 0..REFINEMENT_STEPS {
        let res = lyapunov_rhs(&m.0, &d.0, &v);
        if max_abs_entry(&res) <= RESIDUAL_REL_TOL * d_scale {
            break;
        }
        let delta = lu
            .solve(&(-vec_of(&res)))
            .ok_or(DynamicsError::SingularSystem)?;
        let raw = v + unvec(&delta);
        v = (raw + raw.transpose()) * 0.5;
    }

    Ok(CovarianceMatrix(v))
}
