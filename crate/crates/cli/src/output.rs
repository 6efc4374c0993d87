//! CSV and JSON emission. Floats in CSV are scientific with 9
//! significant digits; row order follows the sweep's row-major grid.

use std::io::Write;

use serde::Serialize;

use optomech_core::dynamics::EvolutionTrace;
use optomech_core::measures::{
    nonlocality_report, Mode, NonlocalityReport, Region, SteeringDirection,
};
use optomech_core::model::DerivedParams;
use optomech_core::sweep::{Extremum, Objective, OutputKind, PointOutcome, SweepResult, SweepSpec};

use crate::CliError;

/// Scientific notation with 9 significant digits.
pub fn fmt_sci(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.8e}")
}

/// Region labels name the steering direction by mode: e.g. `C_b_to_a2`.
pub fn region_label(region: Region, modes: (Mode, Mode)) -> String {
    match region {
        Region::A => "A".into(),
        Region::B => "B".into(),
        Region::C(SteeringDirection::OneToTwo) => {
            format!("C_{}_to_{}", modes.0.label(), modes.1.label())
        }
        Region::C(SteeringDirection::TwoToOne) => {
            format!("C_{}_to_{}", modes.1.label(), modes.0.label())
        }
        Region::D => "D".into(),
    }
}

fn steering_columns(pair: (Mode, Mode)) -> (String, String) {
    (
        format!("G_{}_to_{}", pair.1.label(), pair.0.label()),
        format!("G_{}_to_{}", pair.0.label(), pair.1.label()),
    )
}

fn extra_columns(outputs: &[OutputKind]) -> Vec<String> {
    let mut cols = Vec::new();
    for kind in outputs {
        match kind {
            OutputKind::Variances(mode) => {
                cols.push(format!("var_x_{}", mode.label()));
                cols.push(format!("var_y_{}", mode.label()));
            }
            OutputKind::DiffusionDiag => {
                cols.push("D33".into());
                cols.push("D44".into());
            }
            OutputKind::Diagnostics => {
                cols.push("G_per_wm".into());
                cols.push("Js_per_wm".into());
                cols.push("Delta2_eff_per_wm".into());
            }
        }
    }
    cols
}

/// Grid CSV: axis columns, EN, both steerings, stability flag, region,
/// then any requested extra outputs. Unstable or failed points keep
/// their coordinates with empty measure cells.
pub fn write_grid_csv<W: Write>(w: &mut W, result: &SweepResult) -> Result<(), CliError> {
    let spec = &result.spec;
    let (g21_col, g12_col) = steering_columns(spec.pair);
    let mut header: Vec<String> = spec.axes.iter().map(|a| a.param.key().to_string()).collect();
    header.extend([
        "EN".to_string(),
        g21_col,
        g12_col,
        "stable".to_string(),
        "region".to_string(),
    ]);
    header.extend(extra_columns(&spec.outputs));
    writeln!(w, "{}", header.join(","))?;

    for rec in &result.records {
        let mut row: Vec<String> = rec.coords.iter().map(|&c| fmt_sci(c)).collect();
        match &rec.outcome {
            PointOutcome::Ok(data) => {
                let r = &data.report;
                row.push(fmt_sci(r.e_n));
                row.push(fmt_sci(r.g_21));
                row.push(fmt_sci(r.g_12));
                row.push("1".into());
                row.push(region_label(r.region, r.modes));
                for kind in &spec.outputs {
                    match kind {
                        OutputKind::Variances(mode) => {
                            let (vx, vy) = data.variances[mode.index()];
                            row.push(fmt_sci(vx));
                            row.push(fmt_sci(vy));
                        }
                        OutputKind::DiffusionDiag => {
                            row.push(fmt_sci(data.d33));
                            row.push(fmt_sci(data.d44));
                        }
                        OutputKind::Diagnostics => {
                            row.push(fmt_sci(data.derived.g_eff));
                            row.push(fmt_sci(data.derived.j_squeezed));
                            row.push(fmt_sci(data.derived.delta2_eff));
                        }
                    }
                }
            }
            PointOutcome::Unstable | PointOutcome::Error(_) => {
                for _ in 0..3 {
                    row.push(String::new());
                }
                row.push("0".into());
                row.push(String::new());
                for _ in extra_columns(&spec.outputs) {
                    row.push(String::new());
                }
            }
        }
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

/// Region map CSV: axis columns plus the region label.
pub fn write_regions_csv<W: Write>(w: &mut W, result: &SweepResult) -> Result<(), CliError> {
    let spec = &result.spec;
    let mut header: Vec<String> = spec.axes.iter().map(|a| a.param.key().to_string()).collect();
    header.push("region".to_string());
    writeln!(w, "{}", header.join(","))?;
    for rec in &result.records {
        let mut row: Vec<String> = rec.coords.iter().map(|&c| fmt_sci(c)).collect();
        match &rec.outcome {
            PointOutcome::Ok(data) => row.push(region_label(data.report.region, data.report.modes)),
            _ => row.push(String::new()),
        }
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

/// Evolution trace CSV with per-sample nonlocality measures.
pub fn write_trace_csv<W: Write>(
    w: &mut W,
    trace: &EvolutionTrace,
    pair: (Mode, Mode),
    epsilon: f64,
) -> Result<(), CliError> {
    let (g21_col, g12_col) = steering_columns(pair);
    writeln!(w, "t_wm,EN,{g21_col},{g12_col},min_symplectic")?;
    for (t, v) in trace.times.iter().zip(trace.covariances.iter()) {
        let report = nonlocality_report(v, pair.0, pair.1, epsilon)
            .map_err(|e| CliError::Numerical(format!("trace measure at t={t}: {e}")))?;
        writeln!(
            w,
            "{},{},{},{},{}",
            fmt_sci(*t),
            fmt_sci(report.e_n),
            fmt_sci(report.g_21),
            fmt_sci(report.g_12),
            fmt_sci(report.min_symplectic),
        )?;
    }
    Ok(())
}

#[derive(Serialize)]
pub struct DerivedJson {
    pub beta: f64,
    pub r: f64,
    pub n_bath: f64,
    pub delta2_squeezed_per_wm: f64,
    pub js_per_wm: f64,
    pub delta2_eff_per_wm: f64,
    pub delta1_eff_per_wm: f64,
    pub a1_steady_abs: f64,
    pub g_eff_per_wm: f64,
    pub eta: Option<f64>,
    pub lambda: Option<f64>,
    pub rwa_ratio: f64,
    pub rwa_warn: bool,
}

impl DerivedJson {
    pub fn new(d: &DerivedParams, rwa: optomech_core::model::RwaReport) -> Self {
        DerivedJson {
            beta: d.beta,
            r: d.r,
            n_bath: d.n_bath,
            delta2_squeezed_per_wm: d.delta2_squeezed,
            js_per_wm: d.j_squeezed,
            delta2_eff_per_wm: d.delta2_eff,
            delta1_eff_per_wm: d.delta1_eff,
            a1_steady_abs: d.a1_steady.norm(),
            g_eff_per_wm: d.g_eff,
            eta: d.bogoliubov.map(|b| b.eta),
            lambda: d.bogoliubov.map(|b| b.lambda),
            rwa_ratio: rwa.ratio,
            rwa_warn: rwa.warn,
        }
    }
}

#[derive(Serialize)]
pub struct SteadyReportJson {
    pub pair: [String; 2],
    pub e_n: f64,
    pub g_1_to_2: f64,
    pub g_2_to_1: f64,
    pub eta_minus: f64,
    pub min_symplectic: f64,
    pub region: String,
    pub epsilon: f64,
    pub stable: bool,
    pub derived: DerivedJson,
}

impl SteadyReportJson {
    pub fn new(report: &NonlocalityReport, derived: DerivedJson) -> Self {
        SteadyReportJson {
            pair: [
                report.modes.0.label().to_string(),
                report.modes.1.label().to_string(),
            ],
            e_n: report.e_n,
            g_1_to_2: report.g_12,
            g_2_to_1: report.g_21,
            eta_minus: report.eta_minus,
            min_symplectic: report.min_symplectic,
            region: region_label(report.region, report.modes),
            epsilon: report.epsilon,
            stable: true,
            derived,
        }
    }
}

#[derive(Serialize)]
pub struct AxisJson {
    pub param: String,
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub scale: String,
}

#[derive(Serialize)]
pub struct CoordJson {
    pub param: String,
    pub value: f64,
}

#[derive(Serialize)]
pub struct RoundJson {
    pub coords: Vec<CoordJson>,
    pub value: f64,
}

#[derive(Serialize)]
pub struct ObjectiveJson {
    pub objective: String,
    pub coords: Vec<CoordJson>,
    pub value: f64,
    pub rounds: Vec<RoundJson>,
}

#[derive(Serialize)]
pub struct TolerancesJson {
    pub epsilon: f64,
    pub stability_margin: f64,
    pub steady_residual_rel: f64,
}

/// Per-panel metadata: spec digest, tolerances, refined extrema, recipe
/// notes (recorded deviations included), and any derived scalars.
#[derive(Serialize)]
pub struct ExtremaJson {
    pub figure: String,
    pub panel: String,
    pub digest: String,
    pub pair: [String; 2],
    pub axes: Vec<AxisJson>,
    pub tolerances: TolerancesJson,
    pub objectives: Vec<ObjectiveJson>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub derived_scalars: Vec<CoordJson>,
    pub notes: Vec<String>,
}

pub fn axis_json(spec: &SweepSpec) -> Vec<AxisJson> {
    spec.axes
        .iter()
        .map(|a| AxisJson {
            param: a.param.key().to_string(),
            min: a.min,
            max: a.max,
            count: a.count,
            scale: match a.scale {
                optomech_core::sweep::AxisScale::Linear => "linear".into(),
                optomech_core::sweep::AxisScale::Log => "log".into(),
            },
        })
        .collect()
}

pub fn objective_json(spec: &SweepSpec, objective: Objective, ext: &Extremum) -> ObjectiveJson {
    let coords = |c: &[f64]| {
        spec.axes
            .iter()
            .zip(c)
            .map(|(a, &v)| CoordJson {
                param: a.param.key().to_string(),
                value: v,
            })
            .collect::<Vec<_>>()
    };
    ObjectiveJson {
        objective: objective_label(objective, spec.pair),
        coords: coords(&ext.coords),
        value: objective.report_value(ext.value),
        rounds: ext
            .rounds
            .iter()
            .map(|(c, v)| RoundJson {
                coords: coords(c),
                value: objective.report_value(*v),
            })
            .collect(),
    }
}

pub fn objective_label(objective: Objective, pair: (Mode, Mode)) -> String {
    match objective {
        Objective::MaxEntanglement => "EN".into(),
        Objective::MaxSteering12 => format!("G_{}_to_{}", pair.0.label(), pair.1.label()),
        Objective::MaxSteering21 => format!("G_{}_to_{}", pair.1.label(), pair.0.label()),
        Objective::MinVarY(mode) => format!("min_var_y_{}", mode.label()),
    }
}

pub fn to_json_pretty<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("output serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scientific_format_has_nine_significant_digits() {
        assert_eq!(fmt_sci(0.0), "0.00000000e0");
        assert_eq!(fmt_sci(-0.0), "0.00000000e0");
        assert_eq!(fmt_sci(1.0), "1.00000000e0");
        assert_eq!(fmt_sci(5.287818506), "5.28781851e0");
        assert_eq!(fmt_sci(3.7e5), "3.70000000e5");
        assert_eq!(fmt_sci(-1.234567891e-7), "-1.23456789e-7");
    }

    #[test]
    fn region_labels_carry_mode_names() {
        let pair = (Mode::A2, Mode::B);
        assert_eq!(region_label(Region::A, pair), "A");
        assert_eq!(region_label(Region::B, pair), "B");
        assert_eq!(
            region_label(Region::C(SteeringDirection::OneToTwo), pair),
            "C_a2_to_b"
        );
        assert_eq!(
            region_label(Region::C(SteeringDirection::TwoToOne), pair),
            "C_b_to_a2"
        );
        assert_eq!(region_label(Region::D, pair), "D");
    }

    #[test]
    fn steering_column_order_puts_second_to_first_direction_first() {
        let (g21, g12) = steering_columns((Mode::A2, Mode::B));
        assert_eq!(g21, "G_b_to_a2");
        assert_eq!(g12, "G_a2_to_b");
    }
}
