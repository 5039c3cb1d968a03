use std::fmt;

use super::config::ScenarioConfig;
use super::protocol::{Protocol, Transient};
use crate::dynamics::{evolve_ket, propagator_bra, propagator_ket, refinement_deviation, StateTrajectory, TimeGrid};
use crate::dyson::{fitted_remainder_order, ORDER_FIT_HORIZONS, ORDER_FIT_QUADRATURE};
use crate::error::Result;
use crate::frame::{triangularization_residual, von_neumann_residual};
use crate::linalg::{ComplexMatrix, C64};
use crate::synthesis::{rotated_phase, PhaseFunctional};

/// Largest population change allowed under the `dt/2` re-run.
pub const CONVERGENCE_TOLERANCE: f64 = 1e-8;
/// Residuals of analytic identities (triangularization, von Neumann).
pub const RESIDUAL_TOLERANCE: f64 = 1e-9;
/// Bra-phase relation and stage-end `f_imag`.
pub const PHASE_RELATION_TOLERANCE: f64 = 1e-8;
/// Required drop of the total population below 1 somewhere mid-stage.
pub const NORM_DIP: f64 = 1e-3;
/// Smallest acceptable fitted order of the order-4 Dyson remainder.
pub const DYSON_MIN_ORDER: f64 = 4.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    AtMost,
    Below,
    AtLeast,
}

/// One pass/fail rule, decided only from the recorded value.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub relation: Relation,
    pub limit: f64,
    pub passed: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, value: f64, relation: Relation, limit: f64) -> Self {
        let passed = match relation {
            Relation::AtMost => value <= limit,
            Relation::Below => value < limit,
            Relation::AtLeast => value >= limit,
        };
        Self {
            name: name.into(),
            value,
            relation,
            limit,
            passed,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.relation {
            Relation::AtMost => "<=",
            Relation::Below => "<",
            Relation::AtLeast => ">=",
        };
        write!(
            f,
            "{} {}: {:.3e} {} {:.3e}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.value,
            op,
            self.limit
        )
    }
}

/// Maxima over the whole run.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Residuals {
    pub triangularization: f64,
    /// Closed-form passage phase against the rotated-Hamiltonian diagonal.
    pub phase_formula: f64,
    pub bra_relation: f64,
    /// `‖ψ(t) − c·e^{−i f(t)}|μ(t)⟩‖_max` per stage, `c` fixed at the stage start.
    pub passage_fidelity: f64,
    /// `|‖ψ(t)‖ − ‖ψ(t0)‖·e^{f_imag(t)}|`.
    pub phase_norm: f64,
    pub stage_end_f_imag: f64,
    /// `|Σ_n P_n − 1|` at stage ends.
    pub stage_end_norm: f64,
    pub min_total_norm: f64,
    /// Largest population change under the `dt/2` re-run.
    pub convergence: f64,
    pub periodicity: Option<f64>,
    pub biorthogonality: Option<f64>,
    pub hermitian_triangularization: Option<f64>,
    pub von_neumann: Option<f64>,
    pub dyson_order: Option<f64>,
}

/// Populations at a stage end.
#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint {
    pub label: String,
    pub t: f64,
    pub populations: Vec<f64>,
    pub total: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunReport {
    pub scenario: String,
    pub period: f64,
    pub level_labels: Vec<String>,
    pub trajectory: StateTrajectory,
    /// Cumulative passage phase on the trajectory grid.
    pub phase: PhaseFunctional,
    pub residuals: Residuals,
    pub checkpoints: Vec<Checkpoint>,
    pub checks: Vec<Check>,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn run_grid(protocol: &Protocol, cfg: &ScenarioConfig) -> Result<TimeGrid> {
    let boundaries = protocol.stages[1..].iter().map(|s| s.start).collect();
    TimeGrid::new(protocol.start(), protocol.end(), cfg.dt())?.with_stage_boundaries(boundaries)
}

/// Evolves the initial state stage by stage on `grid`, each stage under its
/// passage generator (`H` or `H†`), handing the final vector of one stage
/// verbatim to the next.
pub fn simulate(protocol: &Protocol, grid: &TimeGrid) -> Result<StateTrajectory> {
    let mut psi = protocol.initial.clone();
    let mut parts = Vec::with_capacity(protocol.stages.len());
    for stage in &protocol.stages {
        let sub = grid.sub_grid(stage.start, stage.end)?;
        let generator = stage.passage.generator(&stage.model.hamiltonian());
        let part = evolve_ket(&generator, &psi, &sub)?;
        psi = part.final_state().clone();
        parts.push(part);
    }
    Ok(StateTrajectory::concat(grid.clone(), parts))
}

struct StageAudit {
    phase: PhaseFunctional,
    triangularization: f64,
    phase_formula: f64,
    bra_relation: f64,
    fidelity: f64,
}

fn audit_stage(
    stage: &super::protocol::StagePlan,
    sub: &TimeGrid,
    states: &[crate::linalg::StateVector],
) -> Result<StageAudit> {
    let h = stage.model.hamiltonian();
    let frame = stage.model.frame();
    let phase = stage.model.phase(stage.passage, sub)?;
    let numeric = rotated_phase(&h, &frame, sub, stage.passage)?;
    let phase_formula = (0..phase.len())
        .map(|i| (phase.value(i) - numeric.value(i)).norm())
        .fold(0.0, f64::max);

    let amplitude = stage.passage.vector(&frame, sub.t0()).inner(&states[0]);
    let mut fidelity: f64 = 0.0;
    for (i, psi) in states.iter().enumerate() {
        let t = sub.time(i);
        let expected = stage
            .passage
            .vector(&frame, t)
            .scale(amplitude * (-C64::new(0.0, 1.0) * phase.value(i)).exp());
        fidelity = fidelity.max(psi.max_abs_diff(&expected));
    }
    Ok(StageAudit {
        phase,
        triangularization: triangularization_residual(&h, &frame, sub)?,
        phase_formula,
        bra_relation: stage.model.bra_relation(sub)?,
        fidelity,
    })
}

/// Simulates `protocol` at `cfg.dt()` and `dt/2`, audits every stage, and
/// evaluates all claims of the protocol. Numerical shortfalls are recorded
/// as failed checks.
pub fn execute(protocol: &Protocol, cfg: &ScenarioConfig) -> Result<RunReport> {
    cfg.validate()?;
    let scaled;
    let protocol = if cfg.omega_scale != 1.0 {
        scaled = protocol.with_omega_scaled(cfg.omega_scale);
        &scaled
    } else {
        protocol
    };
    let grid = run_grid(protocol, cfg)?;
    let trajectory = simulate(protocol, &grid)?;
    let fine = simulate(protocol, &grid.refined())?;

    let mut r = Residuals {
        convergence: refinement_deviation(&trajectory, &fine),
        min_total_norm: trajectory.total_norm.iter().copied().fold(f64::INFINITY, f64::min),
        ..Residuals::default()
    };
    let mut phases = Vec::with_capacity(protocol.stages.len());
    let mut checkpoints = Vec::with_capacity(protocol.stages.len());
    for stage in &protocol.stages {
        let sub = grid.sub_grid(stage.start, stage.end)?;
        let i0 = grid.index_of(sub.t0()).expect("stage start is a grid point");
        let audit = audit_stage(stage, &sub, &trajectory.states[i0..=i0 + sub.steps()])?;
        r.triangularization = r.triangularization.max(audit.triangularization);
        r.phase_formula = r.phase_formula.max(audit.phase_formula);
        r.bra_relation = r.bra_relation.max(audit.bra_relation);
        r.passage_fidelity = r.passage_fidelity.max(audit.fidelity);
        phases.push(audit.phase);

        let ie = i0 + sub.steps();
        checkpoints.push(Checkpoint {
            label: stage.label.clone(),
            t: grid.time(ie),
            populations: trajectory.populations.iter().map(|p| p[ie]).collect(),
            total: trajectory.total_norm[ie],
        });
    }
    let phase = PhaseFunctional::concat(&phases);

    let norm0 = trajectory.states[0].norm();
    r.phase_norm = trajectory
        .states
        .iter()
        .enumerate()
        .map(|(i, s)| (s.norm() - norm0 * phase.norm_factor(i)).abs())
        .fold(0.0, f64::max);
    for cp in &checkpoints {
        let i = grid.index_of(cp.t).expect("checkpoint on grid");
        r.stage_end_f_imag = r.stage_end_f_imag.max(phase.f_imag[i].abs());
        r.stage_end_norm = r.stage_end_norm.max((cp.total - 1.0).abs());
    }
    let per_loop = protocol.stages_per_loop;
    if per_loop > 0 && checkpoints.len() > per_loop {
        let worst = (per_loop..checkpoints.len())
            .flat_map(|j| {
                let (a, b) = (&checkpoints[j].populations, &checkpoints[j - per_loop].populations);
                a.iter().zip(b).map(|(x, y)| (x - y).abs()).collect::<Vec<_>>()
            })
            .fold(0.0, f64::max);
        r.periodicity = Some(worst);
    }

    let tol = cfg.tolerance;
    let mut checks = vec![
        Check::new("convergence under dt/2", r.convergence, Relation::AtMost, CONVERGENCE_TOLERANCE),
        Check::new("triangularization", r.triangularization, Relation::AtMost, RESIDUAL_TOLERANCE),
        Check::new("closed-form phase", r.phase_formula, Relation::AtMost, RESIDUAL_TOLERANCE),
        Check::new("bra phase relation", r.bra_relation, Relation::AtMost, PHASE_RELATION_TOLERANCE),
        Check::new("passage fidelity", r.passage_fidelity, Relation::AtMost, tol),
        Check::new("phase-norm identity", r.phase_norm, Relation::AtMost, tol),
        Check::new("f_imag at stage ends", r.stage_end_f_imag, Relation::AtMost, PHASE_RELATION_TOLERANCE),
        Check::new("norm at stage ends", r.stage_end_norm, Relation::AtMost, tol),
    ];
    if protocol.expect_norm_dip {
        checks.push(Check::new("mid-evolution norm dip", r.min_total_norm, Relation::Below, 1.0 - NORM_DIP));
    }
    for target in &protocol.targets {
        let value = match grid.index_of(target.t) {
            Some(i) => target
                .populations
                .iter()
                .enumerate()
                .map(|(n, p)| (trajectory.populations[n][i] - p).abs())
                .fold(0.0, f64::max),
            None => f64::INFINITY,
        };
        checks.push(Check::new(target.label.clone(), value, Relation::AtMost, tol));
    }
    for transient in &protocol.transients {
        checks.push(match transient {
            Transient::Window {
                label,
                t,
                level,
                value,
                tolerance,
            } => {
                let dev = grid
                    .index_of(*t)
                    .map_or(f64::INFINITY, |i| (trajectory.populations[*level][i] - value).abs());
                Check::new(label.clone(), dev, Relation::AtMost, *tolerance)
            }
            Transient::Ceiling {
                label,
                start,
                end,
                level,
                limit,
            } => {
                let peak = match (grid.index_of(*start), grid.index_of(*end)) {
                    (Some(a), Some(b)) => trajectory.populations[*level][a..=b].iter().copied().fold(0.0, f64::max),
                    _ => f64::INFINITY,
                };
                Check::new(label.clone(), peak, Relation::Below, *limit)
            }
        });
    }
    if let Some(p) = r.periodicity {
        checks.push(Check::new("loop periodicity", p, Relation::AtMost, tol));
    }

    Ok(RunReport {
        scenario: protocol.scenario.clone(),
        period: protocol.period,
        level_labels: protocol.level_labels.iter().map(|s| s.to_string()).collect(),
        trajectory,
        phase,
        residuals: r,
        checkpoints,
        checks,
    })
}

/// Adds the Hermitian-limit, biorthogonality and Dyson-oracle checks.
pub(super) fn extend_verification(
    report: &mut RunReport,
    protocol: &Protocol,
    hermitian: &Protocol,
    cfg: &ScenarioConfig,
) -> Result<()> {
    let scale = |p: &Protocol| {
        if cfg.omega_scale != 1.0 {
            p.with_omega_scaled(cfg.omega_scale)
        } else {
            p.clone()
        }
    };
    let (protocol, hermitian) = (scale(protocol), scale(hermitian));
    let grid = run_grid(&protocol, cfg)?;

    let mut herm_tri: f64 = 0.0;
    let mut vn: f64 = 0.0;
    for stage in &hermitian.stages {
        let sub = grid.sub_grid(stage.start, stage.end)?;
        let (h, frame) = (stage.model.hamiltonian(), stage.model.frame());
        herm_tri = herm_tri.max(triangularization_residual(&h, &frame, &sub)?);
        vn = vn.max(von_neumann_residual(&h, &frame, &sub).unwrap_or(f64::INFINITY));
    }

    let mut bio: f64 = 0.0;
    for stage in &protocol.stages {
        let sub = grid.sub_grid(stage.start, stage.end)?;
        let h = stage.model.hamiltonian();
        let us = propagator_ket(&h, &sub)?;
        let vs = propagator_bra(&h, &sub)?;
        let id = ComplexMatrix::identity(h.dim());
        for (u, v) in us.iter().zip(&vs) {
            bio = bio.max((&v.adjoint() * u).max_abs_diff(&id));
        }
    }

    // The stage start can sit on an exceptional point (nilpotent H(t0) for
    // the two-level ket transfers), where the truncation is exact.
    let first = &protocol.stages[0];
    let frozen = first.model.hamiltonian().checked_value_at(0.5 * (first.start + first.end))?;
    let order = fitted_remainder_order(&frozen, 4, &ORDER_FIT_HORIZONS, ORDER_FIT_QUADRATURE)?;

    let r = &mut report.residuals;
    r.hermitian_triangularization = Some(herm_tri);
    r.von_neumann = Some(vn);
    r.biorthogonality = Some(bio);
    r.dyson_order = Some(order);
    report.checks.extend([
        Check::new("Hermitian-limit triangularization", herm_tri, Relation::AtMost, RESIDUAL_TOLERANCE),
        Check::new("Hermitian-limit von Neumann", vn, Relation::AtMost, RESIDUAL_TOLERANCE),
        Check::new("biorthogonality", bio, Relation::AtMost, cfg.tolerance),
        Check::new("Dyson remainder order", order, Relation::AtLeast, DYSON_MIN_ORDER),
    ]);
    Ok(())
}
