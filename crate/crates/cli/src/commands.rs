//! Subcommand implementations. Everything written to stdout or disk is a
//! deterministic function of the arguments; timing goes to stderr.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use optomech_core::dynamics::{evolve, steady_state, CovarianceMatrix, DtPolicy, DynamicsError};
use optomech_core::measures::{nonlocality_report, Mode};
use optomech_core::model::{
    build_diffusion, build_drift, derive_params, rwa_validity, ModelError, PhysicalParams,
};
use optomech_core::oracle::{
    longtime_vs_direct, pt_symplectic_oracle, reference_params, tmsv_oracle, OracleReport,
};
use optomech_core::sweep::{
    dynamics_point, figure_recipe, find_extremum, run_sweep, var_y_recross, Axis, AxisParam,
    AxisScale, Objective, Panel, PanelTask, PointOutcome, PointRecord, SweepError, SweepResult,
    SweepSpec, DEFAULT_REFINE_ITERS,
};

use crate::config::{parse_pair, RunConfig};
use crate::output::{
    axis_json, fmt_sci, objective_json, to_json_pretty, write_grid_csv, write_regions_csv,
    write_trace_csv, CoordJson, DerivedJson, ExtremaJson, SteadyReportJson, TolerancesJson,
};
use crate::CliError;

fn model_err(e: ModelError) -> CliError {
    match e {
        ModelError::NonConvergence { .. } => CliError::Numerical(format!("{e}")),
        _ => CliError::Validation(format!("{e}")),
    }
}

fn dynamics_err(e: DynamicsError) -> CliError {
    CliError::Numerical(format!("{e}"))
}

fn sweep_err(e: SweepError) -> CliError {
    match e {
        SweepError::EmptyGrid => CliError::Numerical(format!("{e}")),
        _ => CliError::Validation(format!("{e}")),
    }
}

fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    RunConfig::parse(&text)
}

fn resolve_pair(flag: Option<&str>, cfg: &RunConfig) -> Result<(Mode, Mode), CliError> {
    match flag.or(cfg.pair.as_deref()) {
        Some(s) => parse_pair(s),
        None => Ok((Mode::A2, Mode::B)),
    }
}

/// Parse an axis argument of the form `NAME=MIN:MAX:COUNT[:log]`.
pub fn parse_axis(s: &str) -> Result<Axis, CliError> {
    let (name, rest) = s
        .split_once('=')
        .ok_or_else(|| CliError::Validation(format!("axis '{s}' (expected NAME=MIN:MAX:COUNT)")))?;
    let param = AxisParam::parse(name)
        .ok_or_else(|| CliError::Validation(format!("unknown axis parameter '{name}'")))?;
    let parts: Vec<&str> = rest.split(':').collect();
    if parts.len() < 3 || parts.len() > 4 {
        return Err(CliError::Validation(format!(
            "axis '{s}' (expected NAME=MIN:MAX:COUNT[:log])"
        )));
    }
    let parse_f = |t: &str| {
        t.parse::<f64>()
            .map_err(|_| CliError::Validation(format!("axis '{s}': bad number '{t}'")))
    };
    let min = parse_f(parts[0])?;
    let max = parse_f(parts[1])?;
    let count = parts[2]
        .parse::<usize>()
        .map_err(|_| CliError::Validation(format!("axis '{s}': bad count '{}'", parts[2])))?;
    let scale = match parts.get(3) {
        None => AxisScale::Linear,
        Some(&"log") => AxisScale::Log,
        Some(other) => {
            return Err(CliError::Validation(format!(
                "axis '{s}': unknown scale '{other}'"
            )))
        }
    };
    Ok(Axis {
        param,
        min,
        max,
        count,
        scale,
    })
}

pub fn cmd_steady<W: Write>(
    stdout: &mut W,
    config: &Path,
    pair: Option<&str>,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let cfg = load_config(config)?;
    let (params, epsilon) = cfg.physical_params()?;
    let pair = resolve_pair(pair, &cfg)?;
    let derived = derive_params(&params).map_err(model_err)?;
    let m = build_drift(&params, &derived);
    let d = build_diffusion(&params, &derived);
    let v = steady_state(&m, &d).map_err(dynamics_err)?;
    let report = nonlocality_report(&v, pair.0, pair.1, epsilon)
        .map_err(|e| CliError::Numerical(format!("{e}")))?;
    let json = SteadyReportJson::new(
        &report,
        DerivedJson::new(&derived, rwa_validity(&params, &derived)),
    );
    let text = to_json_pretty(&json);
    writeln!(stdout, "{text}")?;
    if let Some(path) = out {
        fs::write(path, format!("{text}\n"))
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

pub fn cmd_evolve<W: Write>(
    stdout: &mut W,
    config: &Path,
    t_max: f64,
    stride: usize,
    out: &Path,
    pair: Option<&str>,
) -> Result<(), CliError> {
    let cfg = load_config(config)?;
    let (params, epsilon) = cfg.physical_params()?;
    let pair = resolve_pair(pair, &cfg)?;
    let derived = derive_params(&params).map_err(model_err)?;
    let m = build_drift(&params, &derived);
    let d = build_diffusion(&params, &derived);
    let trace = evolve(
        &m,
        &d,
        &CovarianceMatrix::thermal_initial(params.mbar),
        t_max,
        DtPolicy::default(),
        stride,
    )
    .map_err(dynamics_err)?;
    let file = fs::File::create(out).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;
    let mut w = BufWriter::new(file);
    write_trace_csv(&mut w, &trace, pair, epsilon)?;
    w.flush()?;
    writeln!(
        stdout,
        "wrote {} ({} samples, converged={}, final_residual={})",
        out.display(),
        trace.times.len(),
        trace.converged,
        fmt_sci(trace.final_residual)
    )?;
    Ok(())
}

pub fn cmd_sweep<W: Write>(
    stdout: &mut W,
    config: &Path,
    axis_args: &[String],
    out: &Path,
    pair: Option<&str>,
) -> Result<(), CliError> {
    let cfg = load_config(config)?;
    let (params, epsilon) = cfg.physical_params()?;
    let pair = resolve_pair(pair, &cfg)?;
    let axis_strings: Vec<String> = if axis_args.is_empty() {
        cfg.axes.clone().unwrap_or_default()
    } else {
        axis_args.to_vec()
    };
    if axis_strings.is_empty() {
        return Err(CliError::Validation(
            "no axes given (use --axis NAME=MIN:MAX:COUNT[:log])".into(),
        ));
    }
    let axes = axis_strings
        .iter()
        .map(|s| parse_axis(s))
        .collect::<Result<Vec<_>, _>>()?;
    let spec = SweepSpec {
        base: params,
        axes,
        pair,
        epsilon,
        outputs: vec![],
    };
    let result = run_sweep(&spec).map_err(sweep_err)?;
    let file = fs::File::create(out).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;
    let mut w = BufWriter::new(file);
    write_grid_csv(&mut w, &result)?;
    w.flush()?;
    writeln!(
        stdout,
        "wrote {} ({} points, digest 0x{:016x})",
        out.display(),
        result.records.len(),
        result.digest
    )?;
    Ok(())
}

fn write_file<F>(path: &Path, body: F) -> Result<(), CliError>
where
    F: FnOnce(&mut BufWriter<fs::File>) -> Result<(), CliError>,
{
    let file =
        fs::File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let mut w = BufWriter::new(file);
    body(&mut w)?;
    w.flush()?;
    Ok(())
}

fn grid_panel_outputs(
    figure: &str,
    panel: &Panel,
    spec: &SweepSpec,
    dir: &Path,
    notes: &[&'static str],
) -> Result<SweepResult, CliError> {
    let result = run_sweep(spec).map_err(sweep_err)?;
    write_file(&dir.join("grid.csv"), |w| write_grid_csv(w, &result))?;
    write_file(&dir.join("regions.csv"), |w| write_regions_csv(w, &result))?;

    let mut objectives = Vec::new();
    let mut derived_scalars = Vec::new();
    for &objective in &panel.objectives {
        let ext = find_extremum(spec, objective, DEFAULT_REFINE_ITERS).map_err(sweep_err)?;
        if let Objective::MinVarY(mode) = objective {
            derived_scalars.push(CoordJson {
                param: format!("var_y_min_{}", mode.label()),
                value: -ext.value,
            });
            derived_scalars.push(CoordJson {
                param: format!("var_y_argmin_{}", spec.axes[0].param.key()),
                value: ext.coords[0],
            });
            if let Some(rc) = var_y_recross(&result, mode, 0.5) {
                derived_scalars.push(CoordJson {
                    param: format!("var_y_recross_{}", spec.axes[0].param.key()),
                    value: rc,
                });
            }
        }
        objectives.push(objective_json(spec, objective, &ext));
    }

    let meta = ExtremaJson {
        figure: figure.to_string(),
        panel: panel.id.clone(),
        digest: format!("0x{:016x}", result.digest),
        pair: [
            spec.pair.0.label().to_string(),
            spec.pair.1.label().to_string(),
        ],
        axes: axis_json(spec),
        tolerances: TolerancesJson {
            epsilon: spec.epsilon,
            stability_margin: optomech_core::dynamics::STABILITY_MARGIN,
            steady_residual_rel: 1e-10,
        },
        objectives,
        derived_scalars,
        notes: notes.iter().map(|s| s.to_string()).collect(),
    };
    write_file(&dir.join("extrema.json"), |w| {
        writeln!(w, "{}", to_json_pretty(&meta)).map_err(CliError::from)
    })?;
    Ok(result)
}

fn dynamics_panel_outputs(
    figure: &str,
    spec: &optomech_core::sweep::DynamicsSpec,
    dir: &Path,
    notes: &[&'static str],
) -> Result<(), CliError> {
    let mut records: Vec<PointRecord> = Vec::new();
    for &r in &spec.r_values {
        let (trace, record) = dynamics_point(spec, r).map_err(sweep_err)?;
        let name = format!("trace_r{r:.2}.csv");
        write_file(&dir.join(&name), |w| {
            write_trace_csv(w, &trace, spec.pair, spec.epsilon)
        })?;
        records.push(record);
    }

    // Steady-state summary over the r values, one row per trace.
    let r_min = *spec
        .r_values
        .first()
        .ok_or_else(|| CliError::Validation("dynamics recipe has no r values".into()))?;
    let r_max = *spec.r_values.last().unwrap();
    let summary_spec = SweepSpec {
        base: spec.base.clone(),
        axes: vec![Axis::linear(
            AxisParam::R,
            r_min,
            r_max.max(r_min + 1.0),
            spec.r_values.len().max(2),
        )],
        pair: spec.pair,
        epsilon: spec.epsilon,
        outputs: vec![],
    };
    let result = SweepResult {
        digest: summary_spec.digest(),
        spec: summary_spec.clone(),
        records,
    };
    write_file(&dir.join("grid.csv"), |w| write_grid_csv(w, &result))?;
    write_file(&dir.join("regions.csv"), |w| write_regions_csv(w, &result))?;

    let mut derived_scalars = Vec::new();
    for rec in &result.records {
        if let PointOutcome::Ok(data) = &rec.outcome {
            derived_scalars.push(CoordJson {
                param: format!("EN_at_r{:.2}", rec.coords[0]),
                value: data.report.e_n,
            });
        }
    }
    let meta = ExtremaJson {
        figure: figure.to_string(),
        panel: figure.to_string(),
        digest: format!("0x{:016x}", result.digest),
        pair: [
            spec.pair.0.label().to_string(),
            spec.pair.1.label().to_string(),
        ],
        axes: axis_json(&summary_spec),
        tolerances: TolerancesJson {
            epsilon: spec.epsilon,
            stability_margin: optomech_core::dynamics::STABILITY_MARGIN,
            steady_residual_rel: 1e-10,
        },
        objectives: vec![],
        derived_scalars,
        notes: notes.iter().map(|s| s.to_string()).collect(),
    };
    write_file(&dir.join("extrema.json"), |w| {
        writeln!(w, "{}", to_json_pretty(&meta)).map_err(CliError::from)
    })?;
    Ok(())
}

pub fn cmd_figure<W: Write>(stdout: &mut W, name: &str, out_dir: &Path) -> Result<(), CliError> {
    let recipe = figure_recipe(name).map_err(sweep_err)?;
    fs::create_dir_all(out_dir)
        .map_err(|e| CliError::Io(format!("{}: {e}", out_dir.display())))?;
    let single = recipe.panels.len() == 1;
    for panel in &recipe.panels {
        let dir: PathBuf = if single {
            out_dir.to_path_buf()
        } else {
            let d = out_dir.join(&panel.id);
            fs::create_dir_all(&d).map_err(|e| CliError::Io(format!("{}: {e}", d.display())))?;
            d
        };
        match &panel.task {
            PanelTask::Grid(spec) => {
                let result = grid_panel_outputs(&recipe.name, panel, spec, &dir, &recipe.notes)?;
                writeln!(
                    stdout,
                    "{}: wrote grid.csv regions.csv extrema.json ({} points)",
                    panel.id,
                    result.records.len()
                )?;
            }
            PanelTask::Dynamics(spec) => {
                dynamics_panel_outputs(&recipe.name, spec, &dir, &recipe.notes)?;
                writeln!(
                    stdout,
                    "{}: wrote {} traces grid.csv regions.csv extrema.json",
                    panel.id,
                    spec.r_values.len()
                )?;
            }
        }
    }
    Ok(())
}

fn print_oracle<W: Write>(w: &mut W, label: &str, rep: &OracleReport) -> Result<(), CliError> {
    let seed = match rep.seed {
        Some(s) => s.to_string(),
        None => "-".to_string(),
    };
    writeln!(
        w,
        "oracle {label} cases={} max_abs={} max_rel={} tol={} seed={} pass={}",
        rep.cases_run,
        fmt_sci(rep.max_abs_error),
        fmt_sci(rep.max_rel_error),
        fmt_sci(rep.tolerance),
        seed,
        rep.pass
    )?;
    Ok(())
}

pub fn cmd_oracles<W: Write>(stdout: &mut W, seed: u64) -> Result<(), CliError> {
    let mut all_pass = true;
    let tmsv = tmsv_oracle(&[0.1, 0.25, 0.5, 1.0]);
    all_pass &= tmsv.pass;
    print_oracle(stdout, "tmsv", &tmsv)?;

    let pt = pt_symplectic_oracle(1000, seed);
    all_pass &= pt.pass;
    print_oracle(stdout, "pt_symplectic", &pt)?;

    for r in [0.0, 0.5, 0.983] {
        let rep = longtime_vs_direct(&reference_params(r)).map_err(dynamics_err)?;
        all_pass &= rep.pass;
        print_oracle(stdout, &format!("longtime_vs_direct[r={r}]"), &rep)?;
    }

    if all_pass {
        Ok(())
    } else {
        Err(CliError::Numerical("one or more oracles failed".into()))
    }
}

/// The reference configuration as a JSON document (matches
/// [`reference_params`]); used by tests and handy as a starting config.
pub fn reference_config_json() -> String {
    let p: PhysicalParams = reference_params(0.0);
    let cfg = RunConfig {
        kappa1_per_wm: Some(p.kappa1),
        kappa2_per_wm: Some(p.kappa2),
        gamma_m_per_wm: Some(p.gamma_m),
        j_per_wm: Some(p.j),
        g_per_wm: Some(p.g),
        e_per_wm: Some(p.drive),
        omega_p_per_wm: Some(0.5),
        delta2_per_wm: Some(p.delta2),
        delta_per_wm: Some(p.delta),
        ..RunConfig::default()
    };
    cfg.emit()
}
