//! Experiment configuration.
//!
//! A TOML file with sections `model`, `states`, `schedule`, `analysis`,
//! `output` and `tolerances`. Every field has a default; an empty file is
//! the reference oscillator–qubit run.

use std::f64::consts::FRAC_1_SQRT_2;
use std::path::PathBuf;

use resetctl_core::dynamics::PropagationOptions;
use resetctl_core::generators::SwitchingFunction;
use resetctl_core::models::{bloch_state, coherent_state, fock_state, OscillatorQubitModel};
use resetctl_core::qcore::{CMatrix, CVector, Complex64, DensityMatrix, HilbertSpace, Operator};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelConfig,
    pub states: StatesConfig,
    pub schedule: ScheduleConfig,
    pub analysis: AnalysisConfig,
    pub output: OutputConfig,
    pub tolerances: ToleranceConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    pub nu: f64,
    pub omega: f64,
    pub n_vec: [f64; 3],
    pub cutoff: usize,
    pub g: SwitchingConfig,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            nu: 1.0,
            omega: 1.0,
            n_vec: [1.0, 0.0, 0.0],
            cutoff: 30,
            g: SwitchingConfig::SinSquared { amplitude: None },
        }
    }
}

/// Switching function `g(ζ)`, tagged by `shape`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum SwitchingConfig {
    Constant {
        value: f64,
    },
    /// `amplitude · sin²(πζ)`; the amplitude defaults to `2ν`.
    SinSquared {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        amplitude: Option<f64>,
    },
    SquarePulse {
        height: f64,
        start: f64,
        end: f64,
    },
    Table {
        knots: Vec<f64>,
        values: Vec<f64>,
    },
}

/// Actuator reset state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ActuatorState {
    /// Qubit state `(I + r·σ)/2`.
    Bloch([f64; 3]),
    /// Rows of `[re, im]` entries.
    Matrix(Vec<Vec<[f64; 2]>>),
}

/// Initial pure state of the controlled system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialState {
    /// Coherent state with `α = re + i·im`.
    Coherent([f64; 2]),
    Fock(usize),
    /// Amplitudes as `[re, im]` pairs.
    Vector(Vec<[f64; 2]>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StatesConfig {
    pub rho_a: ActuatorState,
    pub initial_state: InitialState,
}

impl Default for StatesConfig {
    fn default() -> Self {
        Self {
            rho_a: ActuatorState::Bloch([1.0, 0.0, 0.0]),
            initial_state: InitialState::Coherent([FRAC_1_SQRT_2, FRAC_1_SQRT_2]),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScheduleConfig {
    /// Reset rates `f = 1/δt`.
    pub f: Vec<f64>,
    /// Total time; snapped per rate to a whole number of cycles.
    pub t: f64,
    pub samples_per_cycle: usize,
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        Self {
            f: vec![2.0, 5.0, 10.0],
            t: 10.0,
            samples_per_cycle: 4,
        }
    }
}

/// Settings of the convergence and error-law experiments. These run on a
/// small instance of the model (Fock cutoff `cutoff`) with their own actuator
/// and initial states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisConfig {
    pub cutoff: usize,
    pub rho_a: ActuatorState,
    pub initial_state: InitialState,
    /// Cycle counts of the product-formula ladder.
    pub n: Vec<usize>,
    /// Evolution time of the product-formula ladder.
    pub t: f64,
    /// Reset rates of the dissipative-law ladder.
    pub f: Vec<f64>,
    pub t_grid: Vec<f64>,
    /// Mid-cycle offsets; each uses a cycle of length `tau_ratio · tau`.
    pub tau: Vec<f64>,
    pub tau_ratio: f64,
    /// Damping rates of the gradual-reset ladder.
    pub kappa: Vec<f64>,
    pub gradual_t: f64,
    pub gradual_samples: usize,
    /// Actuator states whose effective Hamiltonians form the control set.
    pub lie_rho_a: Vec<ActuatorState>,
    pub lie_tol: f64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            cutoff: 2,
            rho_a: ActuatorState::Bloch([0.6, 0.0, 0.8]),
            initial_state: InitialState::Vector(vec![[FRAC_1_SQRT_2, 0.0], [0.0, FRAC_1_SQRT_2]]),
            n: vec![16, 32, 64, 128, 256],
            t: 1.0,
            f: vec![20.0, 40.0, 80.0],
            t_grid: (1..=10).map(|k| 0.2 * k as f64).collect(),
            tau: vec![0.005, 0.01, 0.02, 0.04, 0.08],
            tau_ratio: 4.0,
            kappa: vec![2.0, 4.0, 8.0, 16.0, 32.0],
            gradual_t: 2.0,
            gradual_samples: 10,
            lie_rho_a: vec![ActuatorState::Bloch([1.0, 0.0, 0.0]), ActuatorState::Bloch([0.0, 0.0, 1.0])],
            lie_tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: PathBuf::from("out") }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ToleranceConfig {
    /// Trace-distance threshold between successive substep refinements.
    pub propagation: f64,
    pub max_substeps: usize,
    /// Population of the top two Fock levels above which a run is flagged.
    pub truncation_threshold: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        let d = PropagationOptions::default();
        Self {
            propagation: d.tol,
            max_substeps: d.max_substeps,
            truncation_threshold: d.truncation_threshold,
        }
    }
}

fn field(name: &str, msg: impl Into<String>) -> CliError {
    CliError::Config {
        field: name.to_string(),
        message: msg.into(),
    }
}

fn complex_matrix(rows: &[Vec<[f64; 2]>], name: &str) -> Result<CMatrix, CliError> {
    let d = rows.len();
    if d == 0 || rows.iter().any(|r| r.len() != d) {
        return Err(field(name, "matrix must be square and non-empty"));
    }
    Ok(CMatrix::from_fn(d, d, |i, j| Complex64::new(rows[i][j][0], rows[i][j][1])))
}

impl ActuatorState {
    pub fn density(&self, name: &str) -> Result<DensityMatrix, CliError> {
        match self {
            Self::Bloch(r) => bloch_state(*r).map_err(|e| field(name, e.to_string())),
            Self::Matrix(rows) => {
                let m = complex_matrix(rows, name)?;
                let d = m.nrows();
                Operator::new(m, HilbertSpace::simple(d))
                    .and_then(DensityMatrix::new)
                    .map_err(|e| field(name, e.to_string()))
            }
        }
    }
}

impl InitialState {
    pub fn vector(&self, dim: usize, name: &str) -> Result<CVector, CliError> {
        let v = match self {
            Self::Coherent([re, im]) => coherent_state(Complex64::new(*re, *im), dim),
            Self::Fock(k) => fock_state(*k, dim),
            Self::Vector(amps) => {
                if amps.len() != dim {
                    return Err(field(
                        name,
                        format!("state has {} amplitudes, the system dimension is {dim}", amps.len()),
                    ));
                }
                let v = CVector::from_iterator(dim, amps.iter().map(|[re, im]| Complex64::new(*re, *im)));
                if (v.norm() - 1.0).abs() > 1e-10 {
                    return Err(field(name, format!("state vector norm {} differs from 1", v.norm())));
                }
                Ok(v)
            }
        };
        v.map_err(|e| field(name, e.to_string()))
    }
}

impl SwitchingConfig {
    pub fn build(&self, nu: f64) -> Result<SwitchingFunction, CliError> {
        let g = match self {
            Self::Constant { value } => Ok(SwitchingFunction::constant(*value)),
            Self::SinSquared { amplitude } => Ok(SwitchingFunction::sin_squared(amplitude.unwrap_or(2.0 * nu))),
            Self::SquarePulse { height, start, end } => SwitchingFunction::square_pulse(*height, *start, *end),
            Self::Table { knots, values } => SwitchingFunction::table(knots.clone(), values.clone()),
        };
        g.map_err(|e| field("model.g", e.to_string()))
    }
}

/// Whole cycles per rate for a requested total time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Snap {
    pub f: f64,
    pub requested_t: f64,
    pub cycles: usize,
    pub t: f64,
}

pub fn snap(f: f64, t: f64) -> Snap {
    let cycles = (f * t).round().max(1.0) as usize;
    Snap {
        f,
        requested_t: t,
        cycles,
        t: cycles as f64 / f,
    }
}

fn positive(name: &str, x: f64) -> Result<(), CliError> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(field(name, format!("must be positive and finite, got {x}")))
    }
}

fn non_empty<T>(name: &str, xs: &[T]) -> Result<(), CliError> {
    if xs.is_empty() {
        Err(field(name, "must not be empty"))
    } else {
        Ok(())
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration always serializes")
    }

    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        Self::from_toml(&text)
    }

    fn model_with_cutoff(&self, cutoff: usize) -> Result<OscillatorQubitModel, CliError> {
        let m = &self.model;
        let model = OscillatorQubitModel {
            nu: m.nu,
            omega: m.omega,
            n_vec: m.n_vec,
            cutoff,
            switching: m.g.build(m.nu)?,
        };
        model.validate().map_err(|e| {
            let name = if cutoff < 2 { "model.cutoff" } else { "model" };
            field(name, e.to_string())
        })?;
        Ok(model)
    }

    /// The model used by `effective`, `simulate` and `fig1`.
    pub fn model(&self) -> Result<OscillatorQubitModel, CliError> {
        self.model_with_cutoff(self.model.cutoff)
    }

    /// The small model instance used by the analysis experiments.
    pub fn analysis_model(&self) -> Result<OscillatorQubitModel, CliError> {
        self.model_with_cutoff(self.analysis.cutoff)
    }

    pub fn propagation(&self) -> PropagationOptions {
        PropagationOptions {
            tol: self.tolerances.propagation,
            max_substeps: self.tolerances.max_substeps,
            truncation_threshold: self.tolerances.truncation_threshold,
            ..PropagationOptions::default()
        }
    }

    /// Field-level checks that do not need a model build.
    pub fn validate(&self) -> Result<(), CliError> {
        positive("model.nu", self.model.nu)?;
        if !self.model.omega.is_finite() {
            return Err(field("model.omega", "must be finite"));
        }
        if self.model.cutoff < 2 {
            return Err(field("model.cutoff", "must be at least 2"));
        }
        let len = self.model.n_vec.iter().map(|x| x * x).sum::<f64>().sqrt();
        if (len - 1.0).abs() > 1e-12 {
            return Err(field("model.n_vec", format!("must be a unit vector, |n| = {len}")));
        }
        self.model.g.build(self.model.nu)?;
        self.states.rho_a.density("states.rho_a")?;
        non_empty("schedule.f", &self.schedule.f)?;
        for f in &self.schedule.f {
            positive("schedule.f", *f)?;
        }
        positive("schedule.t", self.schedule.t)?;
        if self.schedule.samples_per_cycle == 0 {
            return Err(field("schedule.samples_per_cycle", "must be at least 1"));
        }
        let a = &self.analysis;
        if a.cutoff < 2 {
            return Err(field("analysis.cutoff", "must be at least 2"));
        }
        a.rho_a.density("analysis.rho_a")?;
        non_empty("analysis.n", &a.n)?;
        if a.n.contains(&0) {
            return Err(field("analysis.n", "cycle counts must be at least 1"));
        }
        positive("analysis.t", a.t)?;
        non_empty("analysis.f", &a.f)?;
        for f in &a.f {
            positive("analysis.f", *f)?;
        }
        non_empty("analysis.t_grid", &a.t_grid)?;
        for tau in &a.tau {
            positive("analysis.tau", *tau)?;
        }
        if !(a.tau_ratio >= 1.0 && a.tau_ratio.is_finite()) {
            return Err(field("analysis.tau_ratio", "must be at least 1"));
        }
        for k in &a.kappa {
            if !(*k >= 0.0 && k.is_finite()) {
                return Err(field("analysis.kappa", "rates must be non-negative"));
            }
        }
        positive("analysis.gradual_t", a.gradual_t)?;
        if a.gradual_samples == 0 {
            return Err(field("analysis.gradual_samples", "must be at least 1"));
        }
        for (k, s) in a.lie_rho_a.iter().enumerate() {
            s.density(&format!("analysis.lie_rho_a[{k}]"))?;
        }
        positive("analysis.lie_tol", a.lie_tol)?;
        positive("tolerances.propagation", self.tolerances.propagation)?;
        if self.tolerances.max_substeps < 2 {
            return Err(field("tolerances.max_substeps", "must be at least 2"));
        }
        positive("tolerances.truncation_threshold", self.tolerances.truncation_threshold)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_reference_run() {
        let cfg = ExperimentConfig::from_toml("").unwrap();
        assert_eq!(cfg, ExperimentConfig::default());
        assert_eq!(cfg.model.cutoff, 30);
        assert_eq!(cfg.schedule.f, vec![2.0, 5.0, 10.0]);
        cfg.validate().unwrap();
    }

    #[test]
    fn round_trip() {
        let mut cfg = ExperimentConfig::default();
        cfg.model.g = SwitchingConfig::SquarePulse {
            height: 2.0,
            start: 0.1,
            end: 0.6,
        };
        cfg.states.rho_a = ActuatorState::Matrix(vec![vec![[0.5, 0.0], [0.0, 0.5]], vec![[0.0, -0.5], [0.5, 0.0]]]);
        cfg.states.initial_state = InitialState::Fock(3);
        let back = ExperimentConfig::from_toml(&cfg.to_toml()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn field_level_errors() {
        let cfg = ExperimentConfig::from_toml("[model]\nn_vec = [1.0, 1.0, 0.0]\n").unwrap();
        match cfg.validate() {
            Err(CliError::Config { field, .. }) => assert_eq!(field, "model.n_vec"),
            other => panic!("unexpected {other:?}"),
        }
        let cfg = ExperimentConfig::from_toml("[schedule]\nf = [2.0, -1.0]\n").unwrap();
        assert!(matches!(cfg.validate(), Err(CliError::Config { field, .. }) if field == "schedule.f"));
        assert!(matches!(
            ExperimentConfig::from_toml("[model]\nfrequency = 2.0\n"),
            Err(CliError::Parse(_))
        ));
    }

    #[test]
    fn snapping() {
        let s = snap(5.0, 1.03);
        assert_eq!(s.cycles, 5);
        assert_eq!(s.t, 1.0);
        assert_eq!(snap(2.0, 0.1).cycles, 1);
    }
}
