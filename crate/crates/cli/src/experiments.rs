//! One runner per experiment kind.

use std::fmt::Write as _;

use resetctl_core::analysis::{
    analysis_options, braced_bound, braced_term, chernoff_deviation_with, corrected_chernoff_deviation_with,
    dissipative_scaling_with, effective_state, fit_order, fit_order_with_floor, gradual_reset_ladder,
    lie_algebra_dimension, measured_stroboscopic_deviation_with, stroboscopic_deviation, ScalingReport,
};
use resetctl_core::dynamics::{evolve_sampled, PropagationOptions, ResetSchedule, TrajectoryMeta};
use resetctl_core::generators::effective_hamiltonian;
use resetctl_core::models::{quadrature_p, quadrature_x};
use resetctl_core::qcore::{fidelity_pure, trace_norm, DensityMatrix, Operator};
use serde_json::{json, Map, Value};

use crate::config::{snap, ExperimentConfig, Snap};
use crate::error::CliError;
use crate::output::{Cell, Table};

/// Residuals at or below this level are treated as exact zeros in fits.
const FIT_FLOOR: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Effective,
    Simulate,
    Fig1,
    Chernoff,
    Dissipative,
    Strobe,
    Gradual,
    Lie,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Effective => "effective",
            Kind::Simulate => "simulate",
            Kind::Fig1 => "fig1",
            Kind::Chernoff => "chernoff",
            Kind::Dissipative => "dissipative",
            Kind::Strobe => "strobe",
            Kind::Gradual => "gradual",
            Kind::Lie => "lie",
        }
    }
}

/// Everything an experiment produces before it is written out.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub kind: Kind,
    pub table: Table,
    /// Choices not fixed by the configuration (time axis, snapping).
    pub choices: Value,
    pub diagnostics: Value,
    /// Invariant violations; the run still writes its output.
    pub violations: Vec<String>,
    /// Human-readable summary for stdout.
    pub summary: String,
}

pub fn run(cfg: &ExperimentConfig, kind: Kind) -> Result<Outcome, CliError> {
    cfg.validate()?;
    match kind {
        Kind::Effective => effective(cfg),
        Kind::Simulate => simulate(cfg),
        Kind::Fig1 => fig1(cfg),
        Kind::Chernoff => chernoff(cfg),
        Kind::Dissipative => dissipative(cfg),
        Kind::Strobe => strobe(cfg),
        Kind::Gradual => gradual(cfg),
        Kind::Lie => lie(cfg),
    }
}

fn meta_json(m: &TrajectoryMeta) -> Value {
    json!({
        "resets": m.resets,
        "substeps": m.substeps,
        "residual": m.residual,
        "max_top_population": m.max_top_population,
        "truncation_flagged": m.truncation_flagged,
    })
}

fn report_json(r: &ScalingReport) -> Value {
    json!({
        "fitted_order": finite_or_null(r.fitted_order),
        "r_squared": finite_or_null(r.r_squared),
        "exact_convergence": r.exact_convergence,
    })
}

fn finite_or_null(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

fn fit_cell(fit: &Result<ScalingReport, resetctl_core::Error>) -> (Cell, Cell) {
    match fit {
        Ok(r) if r.exact_convergence => ("exact".into(), "exact".into()),
        Ok(r) => (r.fitted_order.into(), r.r_squared.into()),
        Err(_) => (f64::NAN.into(), f64::NAN.into()),
    }
}

fn fit_json(fit: &Result<ScalingReport, resetctl_core::Error>) -> Value {
    match fit {
        Ok(r) => report_json(r),
        Err(e) => json!({ "error": e.to_string() }),
    }
}

fn snap_json(s: &Snap) -> Value {
    json!({ "f": s.f, "requested_t": s.requested_t, "cycles": s.cycles, "t": s.t })
}

/// Sampled trajectory of one reset rate together with the `H_eff` fidelity.
#[derive(Debug, Clone, PartialEq)]
pub struct FidelityCurve {
    pub snap: Snap,
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    pub fidelities: Vec<f64>,
    /// True at cycle boundaries (including `t = 0`).
    pub boundary: Vec<bool>,
    pub meta: TrajectoryMeta,
}

/// Simulates the configured model at every reset rate of the schedule,
/// sampling `samples_per_cycle` times per cycle.
pub fn fidelity_curves(cfg: &ExperimentConfig) -> Result<Vec<FidelityCurve>, CliError> {
    cfg.validate()?;
    let model = cfg.model()?;
    let gen = model.build()?;
    let rho_a = cfg.states.rho_a.density("states.rho_a")?;
    let psi0 = cfg.states.initial_state.vector(model.cutoff, "states.initial_state")?;
    let rho0 = DensityMatrix::pure(&psi0, gen.space_s().clone())?;
    let h_eff = effective_hamiltonian(&gen, &rho_a)?;
    let opts = cfg.propagation().watch_truncation();
    let samples = cfg.schedule.samples_per_cycle;
    let mut curves = Vec::with_capacity(cfg.schedule.f.len());
    for &f in &cfg.schedule.f {
        let s = snap(f, cfg.schedule.t);
        let schedule = ResetSchedule::uniform(s.cycles, s.t)?;
        let traj = evolve_sampled(&gen, &rho0, &rho_a, &schedule, samples, &opts)?;
        let mut fidelities = Vec::with_capacity(traj.len());
        for (t, rho) in traj.times.iter().zip(&traj.states) {
            fidelities.push(fidelity_pure(rho, &effective_state(&h_eff, &psi0, *t)?)?);
        }
        let boundary = (0..traj.len()).map(|k| k % samples == 0).collect();
        curves.push(FidelityCurve {
            snap: s,
            times: traj.times,
            states: traj.states,
            fidelities,
            boundary,
            meta: traj.meta,
        });
    }
    Ok(curves)
}

fn time_axis_choice(cfg: &ExperimentConfig) -> Value {
    json!({
        "time_axis": format!(
            "t from 0 to {} in model units, {} samples per reset cycle; each rate snapped to a whole number of cycles",
            cfg.schedule.t, cfg.schedule.samples_per_cycle
        ),
    })
}

fn curve_diagnostics(curves: &[FidelityCurve]) -> (Value, Vec<Value>, Vec<String>) {
    let mut per_rate = Vec::new();
    let mut snaps = Vec::new();
    let mut violations = Vec::new();
    for c in curves {
        let mut m = meta_json(&c.meta);
        m["f"] = json!(c.snap.f);
        per_rate.push(m);
        snaps.push(snap_json(&c.snap));
        if c.meta.truncation_flagged {
            violations.push(format!(
                "f = {}: top Fock levels reached population {:e}; raise the cutoff",
                c.snap.f, c.meta.max_top_population
            ));
        }
    }
    (json!({ "rates": per_rate }), snaps, violations)
}

fn fig1(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let curves = fidelity_curves(cfg)?;
    let mut table = Table::new(&["t", "f", "fidelity"]);
    let mut summary = String::new();
    for c in &curves {
        for (t, fid) in c.times.iter().zip(&c.fidelities) {
            table.push(vec![(*t).into(), c.snap.f.into(), (*fid).into()]);
        }
        let min = c.fidelities.iter().copied().fold(f64::INFINITY, f64::min);
        let _ = writeln!(summary, "f = {}: min fidelity {min:.6}", c.snap.f);
    }
    let (diagnostics, snaps, violations) = curve_diagnostics(&curves);
    let mut choices = time_axis_choice(cfg);
    choices["snap"] = json!(snaps);
    Ok(Outcome {
        kind: Kind::Fig1,
        table,
        choices,
        diagnostics,
        violations,
        summary,
    })
}

fn simulate(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let curves = fidelity_curves(cfg)?;
    let cutoff = cfg.model.cutoff;
    let x = Operator::from_matrix(quadrature_x(cutoff))?;
    let p = Operator::from_matrix(quadrature_p(cutoff))?;
    let mut table = Table::new(&["t", "f", "boundary", "purity", "fidelity", "x", "p"]);
    for c in &curves {
        for k in 0..c.times.len() {
            let rho = c.states[k].matrix();
            table.push(vec![
                c.times[k].into(),
                c.snap.f.into(),
                c.boundary[k].into(),
                c.states[k].purity().into(),
                c.fidelities[k].into(),
                (x.matrix() * rho).trace().re.into(),
                (p.matrix() * rho).trace().re.into(),
            ]);
        }
    }
    let (diagnostics, snaps, violations) = curve_diagnostics(&curves);
    let mut choices = time_axis_choice(cfg);
    choices["snap"] = json!(snaps);
    let summary = format!("{} rows over {} reset rates\n", table.rows.len(), curves.len());
    Ok(Outcome {
        kind: Kind::Simulate,
        table,
        choices,
        diagnostics,
        violations,
        summary,
    })
}

fn effective(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let gen = cfg.model()?.build()?;
    let rho_a = cfg.states.rho_a.density("states.rho_a")?;
    let h = effective_hamiltonian(&gen, &rho_a)?;
    let m = h.matrix();
    let mut table = Table::new(&["row", "col", "re", "im"]);
    let mut summary = String::new();
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            table.push(vec![i.into(), j.into(), m[(i, j)].re.into(), m[(i, j)].im.into()]);
            let sep = if j + 1 == m.ncols() { "\n" } else { " " };
            let _ = write!(summary, "{:+.6}{:+.6}i{sep}", m[(i, j)].re, m[(i, j)].im);
        }
    }
    Ok(Outcome {
        kind: Kind::Effective,
        table,
        choices: json!({}),
        diagnostics: json!({ "dimension": m.nrows(), "mean_coupling": gen.switching().mean() }),
        violations: Vec::new(),
        summary,
    })
}

fn analysis_opts(cfg: &ExperimentConfig) -> PropagationOptions {
    PropagationOptions {
        max_substeps: cfg.tolerances.max_substeps,
        ..analysis_options()
    }
}

fn chernoff(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let a = &cfg.analysis;
    let gen = cfg.analysis_model()?.build()?;
    let rho_a = a.rho_a.density("analysis.rho_a")?;
    let opts = analysis_opts(cfg);
    let mut table = Table::new(&["n", "deviation", "corrected_deviation"]);
    let (mut plain, mut corrected) = (Vec::new(), Vec::new());
    for &n in &a.n {
        let d = chernoff_deviation_with(&gen, &rho_a, a.t, n, &opts)?;
        let c = corrected_chernoff_deviation_with(&gen, &rho_a, a.t, n, &opts)?;
        table.push(vec![n.into(), d.into(), c.into()]);
        plain.push(d);
        corrected.push(c);
    }
    let xs: Vec<f64> = a.n.iter().map(|&n| n as f64).collect();
    let fit_plain = fit_order_with_floor(&xs, &plain, FIT_FLOOR);
    let fit_corr = fit_order_with_floor(&xs, &corrected, FIT_FLOOR);
    let (op, rp) = fit_cell(&fit_plain);
    let (oc, rc) = fit_cell(&fit_corr);
    table.push_footer("fitted_order", vec![op.clone(), oc.clone()]);
    table.push_footer("r_squared", vec![rp, rc]);
    let summary = format!("fitted order {op} (first-order corrected: {oc})\n");
    Ok(Outcome {
        kind: Kind::Chernoff,
        table,
        choices: json!({ "t": a.t, "cutoff": a.cutoff }),
        diagnostics: json!({
            "deviation": fit_json(&fit_plain),
            "corrected_deviation": fit_json(&fit_corr),
            "propagation_tol": opts.tol,
        }),
        violations: Vec::new(),
        summary,
    })
}

fn dissipative(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let a = &cfg.analysis;
    let gen = cfg.analysis_model()?.build()?;
    let rho_a = a.rho_a.density("analysis.rho_a")?;
    let psi0 = a.initial_state.vector(a.cutoff, "analysis.initial_state")?;
    let report = dissipative_scaling_with(&gen, &rho_a, &psi0, &a.f, &a.t_grid, &cfg.propagation())?;
    let mut table = Table::new(&["f", "t", "deviation"]);
    for c in &report.curves {
        for (t, d) in c.times.iter().zip(&c.deviations) {
            table.push(vec![c.rate.into(), (*t).into(), (*d).into()]);
        }
    }
    for c in &report.curves {
        table.push_footer("slope", vec![c.rate.into(), c.fit.slope.into()]);
    }
    for c in &report.curves {
        table.push_footer("r_squared", vec![c.rate.into(), c.fit.r_squared.into()]);
    }
    let scaling = Ok(report.scaling.clone());
    let (order, _) = fit_cell(&scaling);
    table.push_footer("fitted_order", vec![Cell::Empty, order.clone()]);
    let snaps: Vec<Value> = report
        .curves
        .iter()
        .map(|c| json!({ "f": c.rate, "times": c.times }))
        .collect();
    Ok(Outcome {
        kind: Kind::Dissipative,
        table,
        choices: json!({ "cutoff": a.cutoff, "snapped_times": snaps }),
        diagnostics: json!({ "slope_scaling": fit_json(&scaling) }),
        violations: Vec::new(),
        summary: format!("slope order in f: {order}\n"),
    })
}

fn strobe(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let a = &cfg.analysis;
    let gen = cfg.analysis_model()?.build()?;
    let rho_a = a.rho_a.density("analysis.rho_a")?;
    let psi0 = a.initial_state.vector(a.cutoff, "analysis.initial_state")?;
    let rho_s = DensityMatrix::pure(&psi0, gen.space_s().clone())?;
    let opts = cfg.propagation();
    let g = gen.switching();
    let mut table = Table::new(&["tau", "dt", "braced_term", "bound", "deviation", "measured", "residual"]);
    let mut violations = Vec::new();
    let mut residuals = Vec::new();
    for &tau in &a.tau {
        let dt = a.tau_ratio * tau;
        let b = braced_term(g, tau, dt)?;
        let bound = braced_bound(g, tau, dt)?;
        if b.abs() > bound + resetctl_core::analysis::BOUND_SLACK {
            violations.push(format!("tau = {tau}: braced term {b} exceeds its bound {bound}"));
        }
        let predicted = stroboscopic_deviation(&gen, &rho_a, &rho_s, tau, dt)?;
        let measured = measured_stroboscopic_deviation_with(&gen, &rho_a, &rho_s, tau, dt, &opts)?;
        let residual = trace_norm(&(measured.matrix() - predicted.matrix()));
        table.push(vec![
            tau.into(),
            dt.into(),
            b.into(),
            bound.into(),
            trace_norm(predicted.matrix()).into(),
            trace_norm(measured.matrix()).into(),
            residual.into(),
        ]);
        residuals.push(residual);
    }
    let fit = fit_order_with_floor(&a.tau, &residuals, FIT_FLOOR);
    let (order, _) = fit_cell(&fit);
    table.push_footer("fitted_order", vec![Cell::Empty, Cell::Empty, Cell::Empty, Cell::Empty, Cell::Empty, order.clone()]);
    Ok(Outcome {
        kind: Kind::Strobe,
        table,
        choices: json!({ "cutoff": a.cutoff, "dt_over_tau": a.tau_ratio }),
        diagnostics: json!({ "residual": fit_json(&fit) }),
        violations,
        summary: format!("residual order in tau: {order}\n"),
    })
}

fn gradual(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let a = &cfg.analysis;
    let gen = cfg.analysis_model()?.build()?;
    let rho_a = a.rho_a.density("analysis.rho_a")?;
    let psi0 = a.initial_state.vector(a.cutoff, "analysis.initial_state")?;
    let ladder = gradual_reset_ladder(&gen, &rho_a, &psi0, &a.kappa, a.gradual_t, a.gradual_samples)?;
    let mut table = Table::new(&["kappa", "deviation"]);
    for (k, d) in &ladder {
        table.push(vec![(*k).into(), (*d).into()]);
    }
    let monotone = ladder.windows(2).all(|w| w[1].1 <= w[0].1 * 1.1);
    let fit = if ladder.len() >= 3 && ladder.iter().all(|(k, _)| *k > 0.0) {
        let (ks, ds): (Vec<f64>, Vec<f64>) = ladder.iter().copied().unzip();
        Some(fit_order(&ks, &ds))
    } else {
        None
    };
    Ok(Outcome {
        kind: Kind::Gradual,
        table,
        choices: json!({ "cutoff": a.cutoff, "t": a.gradual_t, "samples": a.gradual_samples }),
        diagnostics: json!({
            "monotone_within_10_percent": monotone,
            "kappa_scaling": fit.as_ref().map(fit_json),
        }),
        violations: Vec::new(),
        summary: format!("deviation non-increasing in kappa (10% slack): {monotone}\n"),
    })
}

fn lie(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let a = &cfg.analysis;
    let gen = cfg.analysis_model()?.build()?;
    let mut gens = Vec::with_capacity(a.lie_rho_a.len());
    for (k, s) in a.lie_rho_a.iter().enumerate() {
        gens.push(effective_hamiltonian(&gen, &s.density(&format!("analysis.lie_rho_a[{k}]"))?)?);
    }
    let dim = lie_algebra_dimension(&gens, a.lie_tol)?;
    let d = gen.dim_s();
    let mut table = Table::new(&["generators", "dimension", "full_dimension"]);
    table.push(vec![gens.len().into(), dim.into(), (d * d).into()]);
    Ok(Outcome {
        kind: Kind::Lie,
        table,
        choices: json!({ "cutoff": a.cutoff }),
        diagnostics: json!({ "universal": dim == d * d }),
        violations: Vec::new(),
        summary: format!("dim of generated algebra: {dim} of {}\n", d * d),
    })
}

/// SHA-256 of the canonical TOML form, ignoring where output is written.
pub fn config_hash(cfg: &ExperimentConfig) -> String {
    let mut canonical = cfg.clone();
    canonical.output = Default::default();
    crate::output::sha256_hex(&canonical.to_toml())
}

/// Sidecar metadata for an outcome.
pub fn metadata(cfg: &ExperimentConfig, outcome: &Outcome) -> Value {
    let mut m = Map::new();
    m.insert("tool".into(), json!(env!("CARGO_PKG_NAME")));
    m.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    m.insert("kind".into(), json!(outcome.kind.name()));
    m.insert("config_sha256".into(), json!(config_hash(cfg)));
    m.insert("choices".into(), outcome.choices.clone());
    m.insert("diagnostics".into(), outcome.diagnostics.clone());
    m.insert("violations".into(), json!(outcome.violations));
    Value::Object(m)
}
