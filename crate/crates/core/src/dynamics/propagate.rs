//! Evolve-and-reset propagation.
//!
//! Each stretch between resets is integrated with the exponential midpoint
//! rule: an ordered product of substep exponentials with `g` frozen at the
//! substep midpoint. Substep counts are doubled until successive results
//! agree to the requested tolerance.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::schedule::{ResetSchedule, Segment};
use crate::error::{Error, Result};
use crate::generators::CycleGenerator;
use crate::qcore::operator::trace_second;
use crate::qcore::linalg::{assemble_blocks, block_components, submatrix};
use crate::qcore::{
    exp_action, matmul, trace_distance, CMatrix, DensityMatrix, Lindbladian, Operator, SuperOperator,
};

/// Largest joint dimension for which dense superoperators are built.
pub const SUPEROPERATOR_DIM_LIMIT: usize = 16;

/// Which representation carries the state through a cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PropagationPath {
    /// Superoperators up to [`SUPEROPERATOR_DIM_LIMIT`], states beyond it.
    Auto,
    /// Dense reduced cycle maps applied to vectorized states.
    Superoperator,
    /// Joint density matrices, never materializing superoperators.
    State,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationOptions {
    /// Convergence threshold for successive substep refinements.
    pub tol: f64,
    pub initial_substeps: usize,
    pub max_substeps: usize,
    pub path: PropagationPath,
    /// Number of top levels of `S` whose population is monitored (0 = off).
    pub truncation_levels: usize,
    pub truncation_threshold: f64,
}

impl Default for PropagationOptions {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            initial_substeps: 4,
            max_substeps: 1 << 14,
            path: PropagationPath::Auto,
            truncation_levels: 0,
            truncation_threshold: 1e-6,
        }
    }
}

impl PropagationOptions {
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_path(mut self, path: PropagationPath) -> Self {
        self.path = path;
        self
    }

    /// Monitor the top two Fock levels, as appropriate for oscillator models.
    pub fn watch_truncation(mut self) -> Self {
        self.truncation_levels = 2;
        self
    }
}

/// A converged result and how it was reached.
#[derive(Debug, Clone, PartialEq)]
pub struct Converged<T> {
    pub value: T,
    pub substeps: usize,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryMeta {
    pub resets: usize,
    /// Substeps per segment at convergence.
    pub substeps: usize,
    /// Largest change between the last two refinements.
    pub residual: f64,
    /// Largest population of the monitored top levels (0 when not monitored).
    pub max_top_population: f64,
    pub truncation_flagged: bool,
}

/// Reduced states of `S` at increasing times.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    pub meta: TrajectoryMeta,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> &DensityMatrix {
        self.states.last().expect("trajectories hold at least the initial state")
    }
}

/// `(width, g)` for each midpoint substep covering offsets `[from, to]` of a
/// segment of length `seg_len`.
fn substeps(gen: &CycleGenerator, seg_len: f64, from: f64, to: f64, count: usize) -> impl Iterator<Item = (f64, f64)> + '_ {
    let h = (to - from) / count as f64;
    (0..count).map(move |k| {
        let mid = from + (k as f64 + 0.5) * h;
        (h, gen.switching().evaluate(mid / seg_len))
    })
}

fn minus_i() -> Complex64 {
    Complex64::new(0.0, -1.0)
}

/// `e^x y` by a Taylor series on the action, avoiding a dense exponential.
fn exp_left(x: &CMatrix, y: &CMatrix) -> Result<CMatrix> {
    exp_action(|v| matmul(x, v), x.norm(), 1.0, y)
}

/// `H₀ + g H₁` split into the blocks left invariant by both terms.
struct BlockHamiltonian {
    dim: usize,
    idx: Vec<Vec<usize>>,
    h0: Vec<CMatrix>,
    h1: Vec<CMatrix>,
}

impl BlockHamiltonian {
    fn new(gen: &CycleGenerator) -> Self {
        let h0 = gen.drift().hamiltonian;
        let h1 = gen.h_sa().matrix();
        let idx = block_components(&[&h0, h1]);
        Self {
            dim: gen.total_dim(),
            h0: idx.iter().map(|b| submatrix(&h0, b)).collect(),
            h1: idx.iter().map(|b| submatrix(h1, b)).collect(),
            idx,
        }
    }

    /// Ordered product of `exp(−i h H(g_k))` over a segment piece.
    fn piece(&self, gen: &CycleGenerator, seg_len: f64, from: f64, to: f64, count: usize) -> Result<CMatrix> {
        let mut us: Vec<CMatrix> = self.idx.iter().map(|b| CMatrix::identity(b.len(), b.len())).collect();
        for (h, g) in substeps(gen, seg_len, from, to, count) {
            for (k, u) in us.iter_mut().enumerate() {
                let x = (&self.h0[k] + self.h1[k].scale(g)) * (minus_i() * h);
                *u = exp_left(&x, u)?;
            }
        }
        Ok(assemble_blocks(self.dim, &self.idx, &us))
    }
}

fn piece_unitary(gen: &CycleGenerator, seg_len: f64, from: f64, to: f64, count: usize) -> Result<CMatrix> {
    BlockHamiltonian::new(gen).piece(gen, seg_len, from, to, count)
}

fn conjugate(u: &CMatrix, rho: &CMatrix) -> CMatrix {
    matmul(&matmul(u, rho), &u.adjoint())
}

fn require_small(gen: &CycleGenerator) -> Result<()> {
    if gen.total_dim() > SUPEROPERATOR_DIM_LIMIT {
        return Err(Error::DimensionTooLarge {
            dim: gen.total_dim(),
            limit: SUPEROPERATOR_DIM_LIMIT,
        });
    }
    Ok(())
}

fn piece_superoperator(gen: &CycleGenerator, seg_len: f64, from: f64, to: f64, count: usize) -> Result<CMatrix> {
    let l0 = gen.drift().to_matrix();
    let l1 = gen.coupling().to_matrix();
    let side = l0.nrows();
    let mut p = CMatrix::identity(side, side);
    for (h, g) in substeps(gen, seg_len, from, to, count) {
        p = exp_left(&(&l0 + l1.scale(g)).scale(h), &p)?;
    }
    Ok(p)
}

/// Time-ordered joint propagator over one cycle of length `dt`, built from
/// `substeps` midpoint exponentials. Dense superoperator on `S ⊗ A`.
pub fn cycle_propagator(gen: &CycleGenerator, dt: f64, substeps: usize) -> Result<SuperOperator> {
    check_cycle(dt, substeps)?;
    require_small(gen)?;
    SuperOperator::new(piece_superoperator(gen, dt, 0.0, dt, substeps)?, gen.joint_space())
}

/// Closed-system counterpart of [`cycle_propagator`]: the joint unitary.
pub fn cycle_unitary(gen: &CycleGenerator, dt: f64, substeps: usize) -> Result<CMatrix> {
    check_cycle(dt, substeps)?;
    if !gen.is_closed() {
        return Err(Error::InvalidArgument(
            "the unitary fast path needs a generator without dissipators".into(),
        ));
    }
    piece_unitary(gen, dt, 0.0, dt, substeps)
}

fn check_cycle(dt: f64, substeps: usize) -> Result<()> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidArgument(format!("cycle length must be positive, got {dt}")));
    }
    if substeps == 0 {
        return Err(Error::InvalidArgument("at least one substep is required".into()));
    }
    Ok(())
}

/// Doubles the substep count from `opts.initial_substeps` until `dist`
/// between successive results drops below `opts.tol`.
fn refine<T, F, D>(opts: &PropagationOptions, mut compute: F, dist: D) -> Result<Converged<T>>
where
    F: FnMut(usize) -> Result<T>,
    D: Fn(&T, &T) -> f64,
{
    let mut m = opts.initial_substeps.max(1);
    let mut prev = compute(m)?;
    let mut residual = f64::INFINITY;
    loop {
        let next_m = m * 2;
        if next_m > opts.max_substeps {
            return Err(Error::NonConvergence { substeps: m, residual });
        }
        let next = compute(next_m)?;
        residual = dist(&prev, &next);
        if residual < opts.tol {
            return Ok(Converged {
                value: next,
                substeps: next_m,
                residual,
            });
        }
        prev = next;
        m = next_m;
    }
}

/// [`cycle_propagator`] refined until successive propagators differ by less
/// than `opts.tol` in Frobenius norm.
pub fn converged_cycle_propagator(
    gen: &CycleGenerator,
    dt: f64,
    opts: &PropagationOptions,
) -> Result<Converged<SuperOperator>> {
    refine(
        opts,
        |m| cycle_propagator(gen, dt, m),
        |a, b| (a.matrix() - b.matrix()).norm(),
    )
}

/// Reduced cycle map `Φ(δt) = tr_A[T exp(∫L) (· ⊗ ρ_A)]` with default options.
pub fn cycle_map(gen: &CycleGenerator, rho_a: &DensityMatrix, dt: f64) -> Result<SuperOperator> {
    Ok(cycle_map_with(gen, rho_a, dt, &PropagationOptions::default())?.value)
}

/// Reduced cycle map, refined until successive maps differ by less than
/// `opts.tol` in Frobenius norm. Closed generators use the joint unitary at
/// any dimension; open ones need the dense superoperator path.
pub fn cycle_map_with(
    gen: &CycleGenerator,
    rho_a: &DensityMatrix,
    dt: f64,
    opts: &PropagationOptions,
) -> Result<Converged<SuperOperator>> {
    if dt == 0.0 {
        return Ok(Converged {
            value: SuperOperator::identity(gen.space_s().clone()),
            substeps: 0,
            residual: 0.0,
        });
    }
    if gen.is_closed() && opts.path != PropagationPath::Superoperator {
        return refine(
            opts,
            |m| {
                let u = cycle_unitary(gen, dt, m)?;
                gen.reduce(rho_a, |x| conjugate(&u, x))
            },
            |a, b| (a.matrix() - b.matrix()).norm(),
        );
    }
    refine(
        opts,
        |m| {
            let p = cycle_propagator(gen, dt, m)?;
            gen.reduce(rho_a, |x| p.apply(x))
        },
        |a, b| (a.matrix() - b.matrix()).norm(),
    )
}

fn check_states(gen: &CycleGenerator, rho_s: &DensityMatrix, rho_a: &DensityMatrix) -> Result<()> {
    if rho_s.dim() != gen.dim_s() {
        return Err(Error::DimensionMismatch {
            expected: gen.dim_s(),
            found: rho_s.dim(),
        });
    }
    if rho_a.dim() != gen.dim_a() {
        return Err(Error::DimensionMismatch {
            expected: gen.dim_a(),
            found: rho_a.dim(),
        });
    }
    Ok(())
}

/// Joint-state propagation of one segment piece for an open generator.
#[allow(clippy::too_many_arguments)]
fn evolve_open_piece(
    gen: &CycleGenerator,
    drift: &Lindbladian,
    coupling: &Lindbladian,
    rho: &CMatrix,
    seg_len: f64,
    from: f64,
    to: f64,
    count: usize,
) -> Result<CMatrix> {
    let bound0 = drift.norm_bound();
    let bound1 = coupling.norm_bound();
    let mut state = rho.clone();
    for (h, g) in substeps(gen, seg_len, from, to, count) {
        let apply = |x: &CMatrix| drift.apply(x) + coupling.apply(x).scale(g);
        state = exp_action(apply, bound0 + g.abs() * bound1, h, &state)?;
    }
    Ok(state)
}

// Segment lengths agreeing to 1e-12 of the run share a cached propagator;
// uniform schedules carry rounding jitter in the last bits.
fn len_key(len: f64, total: f64) -> u64 {
    libm::round(len / (total * 1e-12)) as u64
}

struct Recorded {
    times: Vec<f64>,
    states: Vec<CMatrix>,
}

/// One fixed-substep pass over the schedule, `samples` records per segment.
fn run_fixed(
    gen: &CycleGenerator,
    rho_s0: &DensityMatrix,
    rho_a: &DensityMatrix,
    schedule: &ResetSchedule,
    samples: usize,
    m: usize,
    path: PropagationPath,
) -> Result<Recorded> {
    let ra = rho_a.matrix();
    let dim_a = gen.dim_a();
    let mut times = alloc::vec![0.0];
    let mut states = alloc::vec![rho_s0.matrix().clone()];
    let mut rho_s = rho_s0.matrix().clone();
    let per_sample = m.div_ceil(samples);

    match path {
        PropagationPath::Superoperator => {
            require_small(gen)?;
            let mut cache: BTreeMap<u64, SuperOperator> = BTreeMap::new();
            for seg in schedule.segments() {
                let len = seg.len();
                if let alloc::collections::btree_map::Entry::Vacant(e) = cache.entry(len_key(len, schedule.total_time())) {
                    let p = SuperOperator::new(
                        piece_superoperator(gen, len, 0.0, len, m)?,
                        gen.joint_space(),
                    )?;
                    e.insert(gen.reduce(rho_a, |x| p.apply(x))?);
                }
                rho_s = cache[&len_key(len, schedule.total_time())].apply(&rho_s);
                times.push(seg.end);
                states.push(rho_s.clone());
            }
        }
        PropagationPath::State | PropagationPath::Auto if gen.is_closed() => {
            // cumulative unitaries at each sample point, cached per segment length
            let blocks = BlockHamiltonian::new(gen);
            let mut cache: BTreeMap<u64, Vec<CMatrix>> = BTreeMap::new();
            for seg in schedule.segments() {
                let len = seg.len();
                let us = match cache.entry(len_key(len, schedule.total_time())) {
                    alloc::collections::btree_map::Entry::Occupied(e) => e.into_mut(),
                    alloc::collections::btree_map::Entry::Vacant(e) => {
                        let mut acc = CMatrix::identity(gen.total_dim(), gen.total_dim());
                        let mut list = Vec::with_capacity(samples);
                        for k in 0..samples {
                            let from = len * k as f64 / samples as f64;
                            let to = len * (k + 1) as f64 / samples as f64;
                            acc = matmul(&blocks.piece(gen, len, from, to, per_sample)?, &acc);
                            list.push(acc.clone());
                        }
                        e.insert(list)
                    }
                };
                let joint = rho_s.kronecker(ra);
                for (k, u) in us.iter().enumerate() {
                    let evolved = trace_second(&conjugate(u, &joint), dim_a);
                    times.push(sample_time(&seg, k, samples));
                    states.push(evolved);
                }
                rho_s = states.last().expect("just pushed").clone();
            }
        }
        _ => {
            let drift = gen.drift();
            let coupling = gen.coupling();
            for seg in schedule.segments() {
                let len = seg.len();
                let mut joint = rho_s.kronecker(ra);
                for k in 0..samples {
                    let from = len * k as f64 / samples as f64;
                    let to = len * (k + 1) as f64 / samples as f64;
                    joint = evolve_open_piece(gen, &drift, &coupling, &joint, len, from, to, per_sample)?;
                    times.push(sample_time(&seg, k, samples));
                    states.push(trace_second(&joint, dim_a));
                }
                rho_s = states.last().expect("just pushed").clone();
            }
        }
    }
    Ok(Recorded { times, states })
}

fn sample_time(seg: &Segment, k: usize, samples: usize) -> f64 {
    if k + 1 == samples {
        seg.end
    } else {
        seg.start + seg.len() * (k + 1) as f64 / samples as f64
    }
}

fn max_distance(a: &Recorded, b: &Recorded) -> f64 {
    a.states
        .iter()
        .zip(&b.states)
        .map(|(x, y)| trace_distance(x, y))
        .fold(0.0, f64::max)
}

fn resolve_path(gen: &CycleGenerator, samples: usize, requested: PropagationPath) -> Result<PropagationPath> {
    match requested {
        PropagationPath::Superoperator => {
            require_small(gen)?;
            if samples > 1 {
                return Err(Error::InvalidArgument(
                    "intra-cycle sampling is only available on the state path".into(),
                ));
            }
            Ok(PropagationPath::Superoperator)
        }
        PropagationPath::State => Ok(PropagationPath::State),
        PropagationPath::Auto => {
            if samples == 1 && gen.total_dim() <= SUPEROPERATOR_DIM_LIMIT {
                Ok(PropagationPath::Superoperator)
            } else {
                Ok(PropagationPath::State)
            }
        }
    }
}

fn finish(
    gen: &CycleGenerator,
    recorded: Recorded,
    resets: usize,
    substeps: usize,
    residual: f64,
    opts: &PropagationOptions,
) -> Result<Trajectory> {
    let space = gen.space_s().clone();
    let levels = opts.truncation_levels.min(gen.dim_s());
    let mut max_top = 0.0f64;
    if levels > 0 {
        for s in &recorded.states {
            let d = s.nrows();
            let pop: f64 = (d - levels..d).map(|k| s[(k, k)].re).sum();
            max_top = max_top.max(pop);
        }
    }
    let states = recorded
        .states
        .into_iter()
        .map(|m| Operator::new(m, space.clone()).map(DensityMatrix::new_unchecked))
        .collect::<Result<Vec<_>>>()?;
    Ok(Trajectory {
        times: recorded.times,
        states,
        meta: TrajectoryMeta {
            resets,
            substeps,
            residual,
            max_top_population: max_top,
            truncation_flagged: levels > 0 && max_top > opts.truncation_threshold,
        },
    })
}

/// `ρ_S` at every segment boundary of `schedule`, resetting the actuator to
/// `ρ_A` at each reset instant.
pub fn evolve_with_resets(
    gen: &CycleGenerator,
    rho_s0: &DensityMatrix,
    rho_a: &DensityMatrix,
    schedule: &ResetSchedule,
) -> Result<Trajectory> {
    evolve_sampled(gen, rho_s0, rho_a, schedule, 1, &PropagationOptions::default())
}

pub fn evolve_with_resets_opts(
    gen: &CycleGenerator,
    rho_s0: &DensityMatrix,
    rho_a: &DensityMatrix,
    schedule: &ResetSchedule,
    opts: &PropagationOptions,
) -> Result<Trajectory> {
    evolve_sampled(gen, rho_s0, rho_a, schedule, 1, opts)
}

/// Like [`evolve_with_resets`] but records `samples_per_segment` equally
/// spaced states inside every segment (the last one at its end).
pub fn evolve_sampled(
    gen: &CycleGenerator,
    rho_s0: &DensityMatrix,
    rho_a: &DensityMatrix,
    schedule: &ResetSchedule,
    samples_per_segment: usize,
    opts: &PropagationOptions,
) -> Result<Trajectory> {
    check_states(gen, rho_s0, rho_a)?;
    if samples_per_segment == 0 {
        return Err(Error::InvalidArgument("at least one sample per segment is required".into()));
    }
    let path = resolve_path(gen, samples_per_segment, opts.path)?;
    let run = refine(
        opts,
        |m| run_fixed(gen, rho_s0, rho_a, schedule, samples_per_segment, m, path),
        max_distance,
    )?;
    finish(gen, run.value, schedule.reset_count(), run.substeps, run.residual, opts)
}

/// Reduced states at offsets `sample_points ⊂ [0, dt]` into a cycle started
/// from `ρ_S ⊗ ρ_A`.
pub fn intra_cycle_trajectory(
    gen: &CycleGenerator,
    rho_s: &DensityMatrix,
    rho_a: &DensityMatrix,
    dt: f64,
    sample_points: &[f64],
) -> Result<Trajectory> {
    intra_cycle_trajectory_opts(gen, rho_s, rho_a, dt, sample_points, &PropagationOptions::default())
}

pub fn intra_cycle_trajectory_opts(
    gen: &CycleGenerator,
    rho_s: &DensityMatrix,
    rho_a: &DensityMatrix,
    dt: f64,
    sample_points: &[f64],
    opts: &PropagationOptions,
) -> Result<Trajectory> {
    check_states(gen, rho_s, rho_a)?;
    check_cycle(dt, 1)?;
    if let Some(bad) = sample_points.iter().find(|&&t| !(0.0..=dt).contains(&t)) {
        return Err(Error::InvalidArgument(format!(
            "sample point {bad} lies outside [0, {dt}]"
        )));
    }
    let mut points: Vec<f64> = sample_points.to_vec();
    points.sort_by(|a, b| a.partial_cmp(b).expect("sample points are finite"));

    let joint0 = rho_s.matrix().kronecker(rho_a.matrix());
    let dim_a = gen.dim_a();
    let closed = gen.is_closed();
    let blocks = BlockHamiltonian::new(gen);
    let drift = gen.drift();
    let coupling = gen.coupling();
    let compute = |m: usize| -> Result<Recorded> {
        let mut states = Vec::with_capacity(points.len());
        for &tau in &points {
            if tau == 0.0 {
                states.push(rho_s.matrix().clone());
                continue;
            }
            let count = libm::ceil(m as f64 * tau / dt).max(1.0) as usize;
            let joint = if closed {
                conjugate(&blocks.piece(gen, dt, 0.0, tau, count)?, &joint0)
            } else {
                evolve_open_piece(gen, &drift, &coupling, &joint0, dt, 0.0, tau, count)?
            };
            states.push(trace_second(&joint, dim_a));
        }
        Ok(Recorded {
            times: points.clone(),
            states,
        })
    };
    let run = refine(opts, compute, max_distance)?;
    finish(gen, run.value, 0, run.substeps, run.residual, opts)
}
