//! JSON run configuration: a flat key-value document with every rate in
//! units of ω_m (`_per_wm` suffix). Unknown keys are rejected and
//! validation errors name the offending key.

use serde::{Deserialize, Serialize};

use optomech_core::measures::Mode;
use optomech_core::model::{DetuningMode, PhysicalParams, Pump};

use crate::CliError;

/// Flat configuration document. Optional fields keep their defaults:
/// theta = 0, mbar = 0, detuning_mode = "fixed-red", epsilon = 1e-6.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_m_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa1_per_wm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa2_per_wm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_m_per_wm: Option<f64>,
    #[serde(rename = "J_per_wm", skip_serializing_if = "Option::is_none")]
    pub j_per_wm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g_per_wm: Option<f64>,
    #[serde(rename = "E_per_wm", skip_serializing_if = "Option::is_none")]
    pub e_per_wm: Option<f64>,
    #[serde(rename = "Omega_p_per_wm", skip_serializing_if = "Option::is_none")]
    pub omega_p_per_wm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta2_per_wm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_per_wm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mbar: Option<f64>,
    /// "fixed-red" (default) or "self-consistent".
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detuning_mode: Option<String>,
    #[serde(rename = "Delta1_per_wm", skip_serializing_if = "Option::is_none")]
    pub delta1_per_wm: Option<f64>,
    /// Region-classification threshold, default 1e-6.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    /// Mode pair like "a2-b"; the --pair flag overrides it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pair: Option<String>,
    /// Sweep axes like "delta2=0.1:2.0:101"; --axis flags override.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub axes: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub figure: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
}

impl RunConfig {
    pub fn parse(document: &str) -> Result<RunConfig, CliError> {
        serde_json::from_str(document).map_err(|e| CliError::Validation(format!("config: {e}")))
    }

    pub fn emit(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Validate and convert into model inputs plus the region threshold.
    pub fn physical_params(&self) -> Result<(PhysicalParams, f64), CliError> {
        let mut missing = Vec::new();
        let mut need = |name: &'static str, v: Option<f64>| {
            if v.is_none() {
                missing.push(name);
            }
            v.unwrap_or(f64::NAN)
        };
        let kappa1 = need("kappa1_per_wm", self.kappa1_per_wm);
        let kappa2 = need("kappa2_per_wm", self.kappa2_per_wm);
        let gamma_m = need("gamma_m_per_wm", self.gamma_m_per_wm);
        let j = need("J_per_wm", self.j_per_wm);
        let g = need("g_per_wm", self.g_per_wm);
        let drive = need("E_per_wm", self.e_per_wm);
        let delta2 = need("delta2_per_wm", self.delta2_per_wm);
        let delta = need("delta_per_wm", self.delta_per_wm);
        if self.omega_p_per_wm.is_none() && self.r.is_none() {
            missing.push("Omega_p_per_wm (or r)");
        }
        if !missing.is_empty() {
            return Err(CliError::Validation(format!(
                "missing required keys: {}",
                missing.join(", ")
            )));
        }
        let pump = match (self.omega_p_per_wm, self.r) {
            (Some(_), Some(_)) => {
                return Err(CliError::Validation(
                    "specify exactly one of Omega_p_per_wm or r".into(),
                ))
            }
            (Some(omega_p), None) => {
                if (omega_p / delta2).abs() >= 1.0 {
                    return Err(CliError::Validation(format!(
                        "Omega_p_per_wm/delta2_per_wm = {} outside arctanh domain (|ratio| must be < 1)",
                        omega_p / delta2
                    )));
                }
                Pump::Amplitude { omega_p }
            }
            (None, Some(r)) => Pump::Squeezing { r },
            (None, None) => unreachable!("checked above"),
        };
        let detuning_mode = match self.detuning_mode.as_deref() {
            None | Some("fixed-red") => DetuningMode::FixedRed,
            Some("self-consistent") => match self.delta1_per_wm {
                Some(delta1) => DetuningMode::SelfConsistent { delta1 },
                None => {
                    return Err(CliError::Validation(
                        "detuning_mode self-consistent requires Delta1_per_wm".into(),
                    ))
                }
            },
            Some(other) => {
                return Err(CliError::Validation(format!(
                    "detuning_mode '{other}' (expected fixed-red or self-consistent)"
                )))
            }
        };
        for (key, value) in [
            ("kappa1_per_wm", kappa1),
            ("kappa2_per_wm", kappa2),
            ("gamma_m_per_wm", gamma_m),
        ] {
            if !(value > 0.0) {
                return Err(CliError::Validation(format!("{key} must be positive")));
            }
        }
        if let Some(mbar) = self.mbar {
            if !(mbar >= 0.0) {
                return Err(CliError::Validation("mbar must be nonnegative".into()));
            }
        }
        let epsilon = self.epsilon.unwrap_or(1e-6);
        if !(epsilon > 0.0) {
            return Err(CliError::Validation("epsilon must be positive".into()));
        }
        let params = PhysicalParams {
            omega_m_hz: self.omega_m_hz,
            kappa1,
            kappa2,
            gamma_m,
            j,
            g,
            drive,
            pump,
            theta: self.theta.unwrap_or(0.0),
            delta2,
            delta,
            mbar: self.mbar.unwrap_or(0.0),
            detuning_mode,
        };
        Ok((params, epsilon))
    }
}

/// Parse "a2-b" style mode pairs.
pub fn parse_pair(s: &str) -> Result<(Mode, Mode), CliError> {
    let (a, b) = s
        .split_once('-')
        .ok_or_else(|| CliError::Validation(format!("pair '{s}' (expected like a2-b)")))?;
    let i: Mode = a
        .parse()
        .map_err(|_| CliError::Validation(format!("unknown mode '{a}' in pair")))?;
    let j: Mode = b
        .parse()
        .map_err(|_| CliError::Validation(format!("unknown mode '{b}' in pair")))?;
    if i == j {
        return Err(CliError::Validation("pair modes must differ".into()));
    }
    Ok((i, j))
}
