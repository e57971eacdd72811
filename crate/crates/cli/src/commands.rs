//! Command implementations: argument resolution, computation, and the JSON
//! envelope / CSV renderings.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use ramsey_core::bounds::{single_experiment_reports, total_time_reports, BoundReport};
use ramsey_core::dephasing::{DecoherenceModel, ModelKind, NoiseGeometry};
use ramsey_core::hilbert::{
    css_state, ghz_state, hamiltonian_diagonal, random_pure_state, DensityMatrix, QubitCount,
};
use ramsey_core::protocol::{
    optimize_time_analytic, optimize_time_closed_form, optimize_time_numeric,
    verify_uniform_allocation, OptimumReport, StateClass,
};
use ramsey_core::qfi::{analytic_qfi_css_local, analytic_qfi_ghz, qfi_at, sld_initial_factor};
use ramsey_core::scaling::{
    figure_lines, fit_exponent, log_spaced_grid, ordering_violations, sweep_max_qfi, SweepCase,
};
use ramsey_core::Error as CoreError;

use crate::{
    BoundsArgs, CliError, FigureArgs, FormatArg, GeometryArg, OptimizeArgs, OutputArgs, QfiArgs,
    ScalingArgs, VerifyUniformArgs,
};

#[derive(Clone, Copy, PartialEq, Eq)]
enum StateSpec {
    Ghz,
    Css,
    Random(u64),
}

fn parse_state(text: &str) -> Result<StateSpec, CliError> {
    match text {
        "ghz" => Ok(StateSpec::Ghz),
        "css" => Ok(StateSpec::Css),
        other => {
            if let Some(seed) = other.strip_prefix("random:") {
                let seed = seed.parse::<u64>().map_err(|_| {
                    CliError::Usage(format!("bad seed in `--state {other}`; expected random:<u64>"))
                })?;
                Ok(StateSpec::Random(seed))
            } else {
                Err(CliError::Usage(format!(
                    "unknown state `{other}`; expected ghz, css, or random:<seed>"
                )))
            }
        }
    }
}

enum ModelSpec {
    Markovian,
    Zeno,
    Tabulated(PathBuf),
}

fn parse_model(text: &str) -> Result<ModelSpec, CliError> {
    match text {
        "markovian" => Ok(ModelSpec::Markovian),
        "zeno" => Ok(ModelSpec::Zeno),
        other => {
            if let Some(path) = other.strip_prefix("tabulated:") {
                if path.is_empty() {
                    return Err(CliError::Usage(
                        "empty path in `--model tabulated:<path>`".into(),
                    ));
                }
                Ok(ModelSpec::Tabulated(PathBuf::from(path)))
            } else {
                Err(CliError::Usage(format!(
                    "unknown model `{other}`; expected markovian, zeno, or tabulated:<path>"
                )))
            }
        }
    }
}

/// Resolves --model/--gamma into a decoherence model, a params echo, and a
/// warning list.
fn build_model(
    model_text: &str,
    gamma: Option<f64>,
    warnings: &mut Vec<String>,
) -> Result<DecoherenceModel, CliError> {
    match parse_model(model_text)? {
        ModelSpec::Markovian | ModelSpec::Zeno
            if gamma.is_none() =>
        {
            Err(CliError::Usage(format!(
                "--gamma is required for `--model {model_text}`"
            )))
        }
        ModelSpec::Markovian => {
            let gamma = require_positive("gamma", gamma.unwrap())?;
            Ok(DecoherenceModel::markovian(gamma)?)
        }
        ModelSpec::Zeno => {
            let gamma = require_positive("gamma", gamma.unwrap())?;
            Ok(DecoherenceModel::zeno(gamma)?)
        }
        ModelSpec::Tabulated(path) => {
            if gamma.is_some() {
                warnings.push("--gamma is ignored for tabulated models".into());
            }
            Ok(DecoherenceModel::from_csv(&path)?)
        }
    }
}

fn require_positive(name: &str, value: f64) -> Result<f64, CliError> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(CliError::Usage(format!("--{name} must be positive, got {value}")))
    }
}

fn geometry_of(arg: GeometryArg) -> NoiseGeometry {
    match arg {
        GeometryArg::Local => NoiseGeometry::Local,
        GeometryArg::Collective => NoiseGeometry::Collective,
    }
}

fn geometry_name(arg: GeometryArg) -> &'static str {
    match arg {
        GeometryArg::Local => "local",
        GeometryArg::Collective => "collective",
    }
}

fn build_state(spec: StateSpec, n: QubitCount) -> Result<DensityMatrix, CliError> {
    Ok(match spec {
        StateSpec::Ghz => ghz_state(n)?,
        StateSpec::Css => css_state(n)?,
        StateSpec::Random(seed) => random_pure_state(n, seed)?,
    })
}

fn state_name(spec: StateSpec) -> String {
    match spec {
        StateSpec::Ghz => "ghz".into(),
        StateSpec::Css => "css".into(),
        StateSpec::Random(seed) => format!("random:{seed}"),
    }
}

fn emit(
    out: &OutputArgs,
    command: &str,
    params: Value,
    results: Value,
    warnings: Vec<String>,
    csv: String,
) -> Result<(), CliError> {
    let text = match out.format {
        FormatArg::Json => {
            let envelope = json!({
                "command": command,
                "params": params,
                "results": results,
                "warnings": warnings,
            });
            let mut text = serde_json::to_string_pretty(&envelope)
                .expect("envelope serialization cannot fail");
            text.push('\n');
            text
        }
        FormatArg::Csv => csv,
    };
    write_artifact(out.output.as_deref(), &text).map_err(|e| CliError::Domain(e.to_string()))
}

fn write_artifact(path: Option<&Path>, text: &str) -> std::io::Result<()> {
    match path {
        Some(path) => std::fs::write(path, text),
        None => std::io::stdout().write_all(text.as_bytes()),
    }
}

fn csv_quantities(rows: &[(String, String)]) -> String {
    let mut out = String::from("quantity,value\n");
    for (k, v) in rows {
        let _ = writeln!(out, "{k},{v}");
    }
    out
}

pub fn run_qfi(args: QfiArgs) -> Result<(), CliError> {
    let mut warnings = Vec::new();
    let state_spec = parse_state(&args.state)?;
    let n = QubitCount::new(args.n)?;
    if args.t < 0.0 {
        return Err(CliError::Usage(format!("--t must be nonnegative, got {}", args.t)));
    }
    let model = build_model(&args.model, args.gamma, &mut warnings)?;
    let geometry = geometry_of(args.geometry);

    let state = build_state(state_spec, n)?;
    let qfi_exact = qfi_at(&state, args.t, &model, geometry)?;
    let qfi_analytic = match (state_spec, geometry) {
        (StateSpec::Ghz, _) => Some(analytic_qfi_ghz(n, args.t, &model, geometry)?),
        (StateSpec::Css, NoiseGeometry::Local) => {
            Some(analytic_qfi_css_local(n, args.t, &model)?)
        }
        (StateSpec::Css, NoiseGeometry::Collective) => {
            warnings.push("no analytic formula for css under collective noise".into());
            None
        }
        (StateSpec::Random(_), _) => {
            warnings.push("no analytic formula for random states".into());
            None
        }
    };
    let relative_gap = qfi_analytic
        .map(|a| (qfi_exact - a).abs() / a.abs().max(f64::MIN_POSITIVE).max(1e-300));

    let params = json!({
        "state": state_name(state_spec),
        "n": args.n,
        "t": args.t,
        "model": args.model,
        "gamma": args.gamma,
        "geometry": geometry_name(args.geometry),
    });
    let results = json!({
        "qfi_exact": qfi_exact,
        "qfi_analytic": qfi_analytic,
        "relative_gap": relative_gap,
    });
    let mut rows = vec![("qfi_exact".to_string(), format!("{qfi_exact}"))];
    if let Some(a) = qfi_analytic {
        rows.push(("qfi_analytic".into(), format!("{a}")));
    }
    if let Some(g) = relative_gap {
        rows.push(("relative_gap".into(), format!("{g}")));
    }
    emit(&args.out, "qfi", params, results, warnings, csv_quantities(&rows))
}

fn bounds_csv(reports: &[BoundReport]) -> String {
    let mut out = String::from("bound,value,t_opt\n");
    for report in reports {
        let t_opt = report.t_opt.map(|t| format!("{t}")).unwrap_or_default();
        let _ = writeln!(out, "{},{},{}", report.name, report.value, t_opt);
    }
    out
}

pub fn run_bounds(args: BoundsArgs) -> Result<(), CliError> {
    let mut warnings = Vec::new();
    let n = QubitCount::new(args.n)?;
    if args.t < 0.0 {
        return Err(CliError::Usage(format!("--t must be nonnegative, got {}", args.t)));
    }
    let model = build_model(&args.model, args.gamma, &mut warnings)?;
    let gamma_t = model.gamma_at(args.t)?;
    let i_rho = match (&args.i_rho, &args.state) {
        (Some(i_rho), _) => *i_rho,
        (None, Some(state)) => {
            let rho = build_state(parse_state(state)?, n)?;
            sld_initial_factor(&rho, &hamiltonian_diagonal(n))?
        }
        (None, None) => args.n as f64 * args.n as f64,
    };
    let mut reports = single_experiment_reports(n, args.t, gamma_t, i_rho)?;
    if let Some(total_time) = args.t_total {
        let total_time = require_positive("t-total", total_time)?;
        let kind = model.kind().ok_or_else(|| {
            CliError::Domain(
                "total-time bounds need a markovian or zeno model, not tabulated data".into(),
            )
        })?;
        let gamma = args.gamma.expect("closed-form models always carry gamma");
        reports.extend(total_time_reports(n, total_time, gamma, kind)?);
    }
    let params = json!({
        "n": args.n,
        "t": args.t,
        "model": args.model,
        "gamma": args.gamma,
        "state": args.state,
        "i_rho": i_rho,
        "t_total": args.t_total,
        "gamma_t": gamma_t,
    });
    let results = json!({
        "reports": serde_json::to_value(&reports).expect("bound reports serialize"),
    });
    let csv = bounds_csv(&reports);
    emit(&args.out, "bounds", params, results, warnings, csv)
}

/// Default numeric bracket: rate-scaled for closed-form models, range-scaled
/// for tabulated ones.
fn default_bracket(model: &DecoherenceModel, gamma: Option<f64>, n: usize) -> (f64, f64) {
    match model {
        DecoherenceModel::Tabulated { samples } => {
            let t_max = samples[samples.len() - 1].0;
            (t_max * 1e-6, t_max)
        }
        _ => {
            let gamma = gamma.expect("closed-form models always carry gamma");
            (1e-8 / (gamma * n as f64), 1e2 / gamma)
        }
    }
}

fn optimum_csv(report: &OptimumReport) -> String {
    let method = match report.method {
        ramsey_core::protocol::OptimizeMethod::ClosedForm => "closed_form",
        ramsey_core::protocol::OptimizeMethod::Numeric => "numeric",
    };
    csv_quantities(&[
        ("t_star".into(), format!("{}", report.t_star)),
        ("n_star".into(), format!("{}", report.n_star)),
        ("f_max".into(), format!("{}", report.f_max)),
        ("method".into(), method.into()),
        ("n_integer".into(), format!("{}", report.n_integer)),
        ("f_at_integer".into(), format!("{}", report.f_at_integer)),
    ])
}

pub fn run_optimize(args: OptimizeArgs) -> Result<(), CliError> {
    let mut warnings = Vec::new();
    let state_spec = parse_state(&args.state)?;
    let n = QubitCount::new(args.n)?;
    let total_time = require_positive("t-total", args.t_total)?;
    let model = build_model(&args.model, args.gamma, &mut warnings)?;
    let geometry = geometry_of(args.geometry);
    let bracket = (
        args.t_min
            .unwrap_or(default_bracket(&model, args.gamma, args.n).0),
        args.t_max
            .unwrap_or(default_bracket(&model, args.gamma, args.n).1),
    );

    let report = match state_spec {
        StateSpec::Random(_) => {
            let state = build_state(state_spec, n)?;
            optimize_time_numeric(&state, total_time, &model, geometry, bracket)?
        }
        StateSpec::Ghz | StateSpec::Css => {
            let class = if state_spec == StateSpec::Ghz {
                StateClass::Ghz
            } else {
                StateClass::Css
            };
            let closed = model.kind().and_then(|kind| {
                optimize_time_closed_form(
                    class,
                    n,
                    total_time,
                    kind,
                    args.gamma.expect("closed-form models always carry gamma"),
                    geometry,
                )
                .ok()
            });
            match closed {
                Some(report) => report,
                None => match optimize_time_analytic(
                    class, n, total_time, &model, geometry, bracket,
                ) {
                    Ok(report) => report,
                    Err(CoreError::UnsupportedCombination(_)) => {
                        // css/collective: no formula at any N; fall back to the
                        // exact solver within the dense limit.
                        let state = build_state(state_spec, n)?;
                        optimize_time_numeric(&state, total_time, &model, geometry, bracket)?
                    }
                    Err(err) => return Err(err.into()),
                },
            }
        }
    };
    if report.n_star < 1.0 {
        warnings.push(
            "the continuous optimum uses fewer than one experiment; f_at_integer re-evaluates \
             at n = 1"
                .into(),
        );
    }

    let params = json!({
        "state": state_name(state_spec),
        "n": args.n,
        "geometry": geometry_name(args.geometry),
        "model": args.model,
        "gamma": args.gamma,
        "t_total": args.t_total,
        "bracket": [bracket.0, bracket.1],
    });
    let results = serde_json::to_value(&report).expect("optimum report serializes");
    let csv = optimum_csv(&report);
    emit(&args.out, "optimize", params, results, warnings, csv)
}

pub fn run_verify_uniform(args: VerifyUniformArgs) -> Result<(), CliError> {
    if args.n_experiments < 2 {
        return Err(CliError::Usage(format!(
            "--n-experiments must be at least 2, got {}",
            args.n_experiments
        )));
    }
    let total_time = require_positive("t-total", args.t_total)?;
    let c = require_positive("c", args.c)?;
    let gamma = require_positive("gamma", args.gamma)?;
    let report =
        verify_uniform_allocation(args.n_experiments, total_time, c, gamma, args.trials, args.seed)?;
    let mut warnings = Vec::new();
    if !report.uniform_is_best {
        warnings.push(format!(
            "a non-uniform allocation beats uniform by a relative {:.3e}; these parameters sit \
             outside the regime gamma^2 (T/n)^2 <= c where uniform division is optimal",
            report.gap_relative
        ));
    }
    let params = json!({
        "n_experiments": args.n_experiments,
        "t_total": args.t_total,
        "c": args.c,
        "gamma": args.gamma,
        "trials": args.trials,
        "seed": args.seed,
    });
    let mut rows = vec![
        ("uniform_value".to_string(), format!("{}", report.uniform_value)),
        ("best_value".to_string(), format!("{}", report.best_value)),
        ("gap_relative".to_string(), format!("{}", report.gap_relative)),
        ("uniform_is_best".to_string(), format!("{}", report.uniform_is_best)),
        ("restarts".to_string(), format!("{}", report.restarts)),
        (
            "converged_restarts".to_string(),
            format!("{}", report.converged_restarts),
        ),
    ];
    let uniform_t = report.total_time / report.n as f64;
    for (j, t) in report.best_allocation.iter().enumerate() {
        rows.push((format!("t_uniform_{j}"), format!("{uniform_t}")));
        rows.push((format!("t_best_{j}"), format!("{t}")));
    }
    let results = serde_json::to_value(&report).expect("allocation report serializes");
    emit(
        &args.out,
        "verify-uniform",
        params,
        results,
        warnings,
        csv_quantities(&rows),
    )
}

pub fn run_scaling(args: ScalingArgs) -> Result<(), CliError> {
    let state = match parse_state(&args.state)? {
        StateSpec::Ghz => StateClass::Ghz,
        StateSpec::Css => StateClass::Css,
        StateSpec::Random(_) => {
            return Err(CliError::Usage(
                "sweeps need a closed-form family: --state ghz or css".into(),
            ));
        }
    };
    let kind = match parse_model(&args.model)? {
        ModelSpec::Markovian => ModelKind::Markovian,
        ModelSpec::Zeno => ModelKind::Zeno,
        ModelSpec::Tabulated(_) => {
            return Err(CliError::Usage(
                "sweeps need a closed-form model: --model markovian or zeno".into(),
            ));
        }
    };
    let gamma = require_positive("gamma", args.gamma)?;
    let total_time = require_positive("t-total", args.t_total)?;
    if args.n_min < 1 || args.n_max < args.n_min {
        return Err(CliError::Usage(format!(
            "bad N range [{}, {}]",
            args.n_min, args.n_max
        )));
    }
    if args.points_per_decade == 0 {
        return Err(CliError::Usage("--points-per-decade must be at least 1".into()));
    }
    let grid = log_spaced_grid(args.n_min, args.n_max, args.points_per_decade);
    let case = SweepCase {
        state,
        geometry: geometry_of(args.geometry),
        model: kind,
    };
    let points = sweep_max_qfi(case, &grid, total_time, gamma)?;
    let fit_points: Vec<(f64, f64)> = points.iter().map(|p| (p.n as f64, p.f_max)).collect();
    let fit = fit_exponent(&fit_points)?;

    let params = json!({
        "state": args.state,
        "geometry": geometry_name(args.geometry),
        "model": args.model,
        "gamma": args.gamma,
        "t_total": args.t_total,
        "n_min": args.n_min,
        "n_max": args.n_max,
        "points_per_decade": args.points_per_decade,
    });
    let results = json!({
        "points": serde_json::to_value(&points).expect("sweep points serialize"),
        "fit": {
            "exponent": fit.exponent,
            "intercept": fit.intercept,
            "r_squared": fit.r_squared,
            "residual_se": fit.residual_se,
            "n_range": [fit.n_range.0, fit.n_range.1],
        },
    });
    let mut csv = String::from("N,f_max,t_star\n");
    for p in &points {
        let _ = writeln!(csv, "{},{},{}", p.n, p.f_max, p.t_star);
    }
    emit(&args.out, "scaling", params, results, Vec::new(), csv)
}

pub fn run_figure(args: FigureArgs) -> Result<(), CliError> {
    let gamma = require_positive("gamma", args.gamma)?;
    let total_time = require_positive("t-total", args.t_total)?;
    if args.n_min < 1 || args.n_max < args.n_min {
        return Err(CliError::Usage(format!(
            "bad N range [{}, {}]",
            args.n_min, args.n_max
        )));
    }
    if args.points_per_decade == 0 {
        return Err(CliError::Usage("--points-per-decade must be at least 1".into()));
    }
    let grid = log_spaced_grid(args.n_min, args.n_max, args.points_per_decade);
    let lines = figure_lines(&grid, total_time, gamma)?;
    let warnings = ordering_violations(&lines);

    let params = json!({
        "n_min": args.n_min,
        "n_max": args.n_max,
        "t_total": args.t_total,
        "gamma": args.gamma,
        "points_per_decade": args.points_per_decade,
    });
    let results = json!({
        "lines": serde_json::to_value(&lines).expect("figure lines serialize"),
    });
    let mut csv = String::from("line,N,resolution\n");
    for line in &lines {
        for p in &line.points {
            let _ = writeln!(csv, "{},{},{}", line.label, p.n, p.resolution);
        }
    }
    emit(&args.out, "figure", params, results, warnings, csv)
}
