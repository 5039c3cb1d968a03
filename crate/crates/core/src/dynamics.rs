//! Time-dependent generators, time grids and fixed-step propagation of the
//! paired ket (`i dψ/dt = Hψ`) and bra (`i dφ/dt = H†φ`) equations.
//!
//! The integrator is classical RK4 with the step taken from the [`TimeGrid`].
//! Generators are sampled at `t`, `t + dt/2` and `t + dt` only, so a stage
//! boundary that sits on a grid point is never straddled.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, StateVector, C64, I};
use crate::smooth::Signal;

type MatrixFn = Arc<dyn Fn(f64) -> ComplexMatrix + Send + Sync>;

/// `t ↦ H(t)` with an optional analytic derivative.
#[derive(Clone)]
pub struct TimeDependentOperator {
    dim: usize,
    value: MatrixFn,
    derivative: Option<MatrixFn>,
}

impl TimeDependentOperator {
    pub fn new(dim: usize, value: impl Fn(f64) -> ComplexMatrix + Send + Sync + 'static) -> Self {
        Self {
            dim,
            value: Arc::new(value),
            derivative: None,
        }
    }

    pub fn with_derivative(
        mut self,
        derivative: impl Fn(f64) -> ComplexMatrix + Send + Sync + 'static,
    ) -> Self {
        self.derivative = Some(Arc::new(derivative));
        self
    }

    pub fn constant(m: ComplexMatrix) -> Self {
        let dim = m.dim();
        Self::new(dim, move |_| m.clone()).with_derivative(move |_| ComplexMatrix::zeros(dim))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn value_at(&self, t: f64) -> ComplexMatrix {
        (self.value)(t)
    }

    pub fn derivative_at(&self, t: f64) -> Option<ComplexMatrix> {
        self.derivative.as_ref().map(|d| d(t))
    }

    /// Sample that fails on NaN/Inf or a wrong dimension.
    pub fn checked_value_at(&self, t: f64) -> Result<ComplexMatrix> {
        let m = self.value_at(t);
        if m.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: m.dim(),
            });
        }
        if !m.is_finite() {
            return Err(Error::NonFinite { t });
        }
        Ok(m)
    }

    /// `t ↦ H†(t)`.
    pub fn adjoint(&self) -> Self {
        let v = self.value.clone();
        let mut out = Self::new(self.dim, move |t| v(t).adjoint());
        if let Some(d) = self.derivative.clone() {
            out = out.with_derivative(move |t| d(t).adjoint());
        }
        out
    }
}

impl fmt::Debug for TimeDependentOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TimeDependentOperator")
            .field("dim", &self.dim)
            .field("analytic_derivative", &self.derivative.is_some())
            .finish()
    }
}

/// Uniform grid `t0, t0 + dt, …, tf` with optional stage boundaries that must
/// land on grid points.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeGrid {
    t0: f64,
    tf: f64,
    dt: f64,
    steps: usize,
    stage_boundaries: Vec<f64>,
}

impl TimeGrid {
    pub fn new(t0: f64, tf: f64, dt: f64) -> Result<Self> {
        if !(t0.is_finite() && tf.is_finite() && dt.is_finite()) {
            return Err(Error::InvalidGrid("non-finite grid parameter".into()));
        }
        if tf <= t0 {
            return Err(Error::InvalidGrid(format!("tf = {tf} must exceed t0 = {t0}")));
        }
        if dt <= 0.0 {
            return Err(Error::InvalidGrid(format!("dt = {dt} must be positive")));
        }
        let span = tf - t0;
        let steps = (span / dt).round();
        if steps < 1.0 || (steps * dt - span).abs() > 1e-9 * span.max(1.0) {
            return Err(Error::InvalidGrid(format!(
                "dt = {dt} does not divide the interval [{t0}, {tf}]"
            )));
        }
        Ok(Self {
            t0,
            tf,
            dt: span / steps,
            steps: steps as usize,
            stage_boundaries: Vec::new(),
        })
    }

    pub fn with_stage_boundaries(mut self, boundaries: Vec<f64>) -> Result<Self> {
        for w in boundaries.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::InvalidGrid("stage boundaries must be strictly increasing".into()));
            }
        }
        for &b in &boundaries {
            if b < self.t0 || b > self.tf {
                return Err(Error::InvalidGrid(format!("stage boundary {b} outside the grid")));
            }
            if self.index_of(b).is_none() {
                return Err(Error::InvalidGrid(format!("stage boundary {b} is not a grid point")));
            }
        }
        self.stage_boundaries = boundaries;
        Ok(self)
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn tf(&self) -> f64 {
        self.tf
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Number of grid points (`steps + 1`).
    pub fn len(&self) -> usize {
        self.steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn stage_boundaries(&self) -> &[f64] {
        &self.stage_boundaries
    }

    pub fn time(&self, i: usize) -> f64 {
        if i == self.steps {
            self.tf
        } else {
            self.t0 + i as f64 * self.dt
        }
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(move |i| self.time(i))
    }

    /// Index of the grid point at `t`, if `t` is one.
    pub fn index_of(&self, t: f64) -> Option<usize> {
        let x = (t - self.t0) / self.dt;
        let i = x.round();
        if i < 0.0 || i > self.steps as f64 || (x - i).abs() > 1e-6 {
            None
        } else {
            Some(i as usize)
        }
    }

    /// Same interval and boundaries at half the step.
    pub fn refined(&self) -> Self {
        Self {
            t0: self.t0,
            tf: self.tf,
            dt: self.dt / 2.0,
            steps: self.steps * 2,
            stage_boundaries: self.stage_boundaries.clone(),
        }
    }

    /// Sub-grid over `[a, b]`, both grid points, with the same step.
    pub fn sub_grid(&self, a: f64, b: f64) -> Result<Self> {
        let ia = self
            .index_of(a)
            .ok_or_else(|| Error::InvalidGrid(format!("{a} is not a grid point")))?;
        let ib = self
            .index_of(b)
            .ok_or_else(|| Error::InvalidGrid(format!("{b} is not a grid point")))?;
        if ib <= ia {
            return Err(Error::InvalidGrid(format!("empty sub-grid [{a}, {b}]")));
        }
        Ok(Self {
            t0: self.time(ia),
            tf: self.time(ib),
            dt: self.dt,
            steps: ib - ia,
            stage_boundaries: Vec::new(),
        })
    }

    /// Consecutive `[start, end]` stage intervals, covering the grid.
    pub fn stages(&self) -> Vec<(f64, f64)> {
        let mut edges = vec![self.t0];
        edges.extend(
            self.stage_boundaries
                .iter()
                .copied()
                .filter(|&b| b > self.t0 && b < self.tf),
        );
        edges.push(self.tf);
        edges.windows(2).map(|w| (w[0], w[1])).collect()
    }
}

/// States, populations `P_n = |ψ_n|²` and total population on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct StateTrajectory {
    pub grid: TimeGrid,
    pub states: Vec<StateVector>,
    /// `populations[n][i]`: level `n` at grid point `i`.
    pub populations: Vec<Vec<f64>>,
    /// `Σ_n populations[n][i]`.
    pub total_norm: Vec<f64>,
}

impl StateTrajectory {
    pub fn from_states(grid: TimeGrid, states: Vec<StateVector>) -> Self {
        assert_eq!(grid.len(), states.len());
        let dim = states[0].dim();
        let mut populations = vec![Vec::with_capacity(states.len()); dim];
        let mut total_norm = Vec::with_capacity(states.len());
        for s in &states {
            let p = s.populations();
            total_norm.push(p.iter().sum());
            for (n, v) in p.into_iter().enumerate() {
                populations[n].push(v);
            }
        }
        Self {
            grid,
            states,
            populations,
            total_norm,
        }
    }

    /// Joins stage trajectories that share their boundary points.
    pub fn concat(grid: TimeGrid, parts: Vec<StateTrajectory>) -> Self {
        let mut states: Vec<StateVector> = Vec::with_capacity(grid.len());
        for (k, part) in parts.into_iter().enumerate() {
            let skip = usize::from(k > 0);
            states.extend(part.states.into_iter().skip(skip));
        }
        Self::from_states(grid, states)
    }

    pub fn dim(&self) -> usize {
        self.populations.len()
    }

    pub fn final_state(&self) -> &StateVector {
        self.states.last().expect("trajectory is never empty")
    }

    pub fn state_at(&self, t: f64) -> Option<&StateVector> {
        self.grid.index_of(t).map(|i| &self.states[i])
    }

    pub fn population_at(&self, level: usize, t: f64) -> Option<f64> {
        self.grid.index_of(t).map(|i| self.populations[level][i])
    }
}

/// Values that RK4 can combine.
trait Rk4State: Clone {
    fn axpy(&self, s: f64, other: &Self) -> Self;
}

impl Rk4State for StateVector {
    fn axpy(&self, s: f64, other: &Self) -> Self {
        StateVector::axpy(self, C64::new(s, 0.0), other)
    }
}

impl Rk4State for ComplexMatrix {
    fn axpy(&self, s: f64, other: &Self) -> Self {
        self + &other.scale(C64::new(s, 0.0))
    }
}

fn rk4_run<Y: Rk4State>(
    h: &TimeDependentOperator,
    y0: Y,
    grid: &TimeGrid,
    rhs: impl Fn(&ComplexMatrix, &Y) -> Y,
) -> Result<Vec<Y>> {
    let dt = grid.dt();
    let mut out = Vec::with_capacity(grid.len());
    let mut y = y0;
    out.push(y.clone());
    for i in 0..grid.steps() {
        let t = grid.time(i);
        let t_next = grid.time(i + 1);
        let t_mid = 0.5 * (t + t_next);
        let h0 = h.checked_value_at(t)?;
        let hm = h.checked_value_at(t_mid)?;
        let h1 = h.checked_value_at(t_next)?;
        let k1 = rhs(&h0, &y);
        let k2 = rhs(&hm, &y.axpy(0.5 * dt, &k1));
        let k3 = rhs(&hm, &y.axpy(0.5 * dt, &k2));
        let k4 = rhs(&h1, &y.axpy(dt, &k3));
        y = y
            .axpy(dt / 6.0, &k1)
            .axpy(dt / 3.0, &k2)
            .axpy(dt / 3.0, &k3)
            .axpy(dt / 6.0, &k4);
        out.push(y.clone());
    }
    Ok(out)
}

/// Solves `i dψ/dt = H(t)ψ` on `grid` starting from `psi0`.
pub fn evolve_ket(h: &TimeDependentOperator, psi0: &StateVector, grid: &TimeGrid) -> Result<StateTrajectory> {
    if psi0.dim() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            got: psi0.dim(),
        });
    }
    if !psi0.is_finite() {
        return Err(Error::NonFinite { t: grid.t0() });
    }
    let states = rk4_run(h, psi0.clone(), grid, |m, y| m.apply(y).scale(-I))?;
    Ok(StateTrajectory::from_states(grid.clone(), states))
}

/// Solves `i dφ/dt = H†(t)φ` on `grid` starting from `phi0`.
pub fn evolve_bra(h: &TimeDependentOperator, phi0: &StateVector, grid: &TimeGrid) -> Result<StateTrajectory> {
    evolve_ket(&h.adjoint(), phi0, grid)
}

/// `U_0(t)` at every grid point, `U_0(t0) = 1`.
pub fn propagator_ket(h: &TimeDependentOperator, grid: &TimeGrid) -> Result<Vec<ComplexMatrix>> {
    let id = ComplexMatrix::identity(h.dim());
    rk4_run(h, id, grid, |m, u| (m * u).scale(-I))
}

/// `V_0(t)`, generated by `H†(t)`.
pub fn propagator_bra(h: &TimeDependentOperator, grid: &TimeGrid) -> Result<Vec<ComplexMatrix>> {
    propagator_ket(&h.adjoint(), grid)
}

/// Largest population difference between a run and its `dt/2` re-run,
/// compared on the coarse grid points.
pub fn refinement_deviation(coarse: &StateTrajectory, fine: &StateTrajectory) -> f64 {
    let mut worst: f64 = 0.0;
    for (n, levels) in coarse.populations.iter().enumerate() {
        for (i, &p) in levels.iter().enumerate() {
            worst = worst.max((p - fine.populations[n][2 * i]).abs());
        }
    }
    worst
}

/// Runs `simulate` on `grid` and on `grid.refined()`; fails with
/// [`Error::StepSize`] when any population moves by more than `tolerance`.
pub fn self_checked<F>(grid: &TimeGrid, tolerance: f64, simulate: F) -> Result<(StateTrajectory, f64)>
where
    F: Fn(&TimeGrid) -> Result<StateTrajectory>,
{
    let coarse = simulate(grid)?;
    let fine = simulate(&grid.refined())?;
    let deviation = refinement_deviation(&coarse, &fine);
    if deviation > tolerance {
        return Err(Error::StepSize { deviation, tolerance });
    }
    Ok((coarse, deviation))
}

/// PT-symmetry criterion of the two-level gain/loss generator:
/// `|ξ0| = |ξ1|` and a detuning that vanishes on every grid point.
pub fn is_pt_symmetric_two_level(xi0: f64, xi1: f64, delta: &Signal, grid: &TimeGrid) -> bool {
    const EPS: f64 = 1e-12;
    (xi0.abs() - xi1.abs()).abs() <= EPS && grid.times().all(|t| delta(t).abs() <= EPS)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{ONE, ZERO};
    use crate::smooth::constant_signal;
    use std::f64::consts::PI;

    fn sigma_x() -> ComplexMatrix {
        ComplexMatrix::from_rows(vec![vec![ZERO, ONE], vec![ONE, ZERO]]).unwrap()
    }

    #[test]
    fn grid_rejects_bad_input() {
        assert!(TimeGrid::new(1.0, 1.0, 0.1).is_err());
        assert!(TimeGrid::new(0.0, 1.0, -0.1).is_err());
        assert!(TimeGrid::new(0.0, 1.0, 0.3).is_err());
        let g = TimeGrid::new(0.0, 1.0, 0.25).unwrap();
        assert_eq!(g.len(), 5);
        assert!(g.clone().with_stage_boundaries(vec![0.3]).is_err());
        assert!(g.clone().with_stage_boundaries(vec![0.75, 0.5]).is_err());
        let g = g.with_stage_boundaries(vec![0.5]).unwrap();
        assert_eq!(g.stages(), vec![(0.0, 0.5), (0.5, 1.0)]);
    }

    #[test]
    fn zero_generator_keeps_state() {
        let h = TimeDependentOperator::constant(ComplexMatrix::zeros(2));
        let grid = TimeGrid::new(0.0, 3.0, 0.01).unwrap();
        let psi0 = StateVector::basis(2, 0);
        let tr = evolve_ket(&h, &psi0, &grid).unwrap();
        assert!(tr.states.iter().all(|s| s == &psi0));
        let tr = evolve_bra(&h, &psi0, &grid).unwrap();
        assert!(tr.states.iter().all(|s| s == &psi0));
    }

    #[test]
    fn rabi_pi_pulse() {
        // H = (Ω/2)σx; at t = π/Ω the closed form gives (cos(π/2), -i sin(π/2)) = (0, -i).
        let omega = 1.7;
        let h = TimeDependentOperator::constant(sigma_x().scale(C64::new(omega / 2.0, 0.0)));
        let tf = PI / omega;
        let grid = TimeGrid::new(0.0, tf, tf / 2000.0).unwrap();
        let tr = evolve_ket(&h, &StateVector::basis(2, 0), &grid).unwrap();
        let end = tr.final_state();
        assert!(end[0].norm() < 1e-12);
        assert!((end[1] - C64::new(0.0, -1.0)).norm() < 1e-12);
    }

    #[test]
    fn scalar_decay_and_dual_growth() {
        let gamma = 0.8;
        let h = TimeDependentOperator::constant(ComplexMatrix::diagonal(&[C64::new(0.0, -gamma / 2.0), ZERO]));
        let grid = TimeGrid::new(0.0, 2.5, 0.001).unwrap();
        let ket = evolve_ket(&h, &StateVector::basis(2, 0), &grid).unwrap();
        let bra = evolve_bra(&h, &StateVector::basis(2, 0), &grid).unwrap();
        for (i, t) in grid.times().enumerate() {
            assert!((ket.states[i][0].re - (-gamma * t / 2.0).exp()).abs() < 1e-12);
            assert!((bra.states[i][0].re - (gamma * t / 2.0).exp()).abs() < 1e-11);
            assert_eq!(ket.states[i][1], ZERO);
        }
    }

    #[test]
    fn hermitian_bra_equals_ket() {
        let m = ComplexMatrix::from_rows(vec![
            vec![C64::new(0.3, 0.0), C64::new(0.2, -0.5)],
            vec![C64::new(0.2, 0.5), C64::new(-1.0, 0.0)],
        ])
        .unwrap();
        let h = TimeDependentOperator::constant(m);
        let grid = TimeGrid::new(0.0, 1.0, 0.01).unwrap();
        let psi0 = StateVector::from_real(&[0.6, 0.8]);
        let k = evolve_ket(&h, &psi0, &grid).unwrap();
        let b = evolve_bra(&h, &psi0, &grid).unwrap();
        assert_eq!(k, b);
        let u = propagator_ket(&h, &grid).unwrap();
        let v = propagator_bra(&h, &grid).unwrap();
        assert_eq!(u, v);
    }

    #[test]
    fn propagator_starts_at_identity_and_matches_columns() {
        let h = TimeDependentOperator::new(2, |t| {
            ComplexMatrix::from_rows(vec![
                vec![C64::new(0.0, -0.2), C64::new(t.cos(), 0.0)],
                vec![C64::new(0.5, 0.0), C64::new(t, 0.1)],
            ])
            .unwrap()
        });
        let grid = TimeGrid::new(0.0, 1.0, 0.005).unwrap();
        let u = propagator_ket(&h, &grid).unwrap();
        assert_eq!(u[0], ComplexMatrix::identity(2));
        for k in 0..2 {
            let tr = evolve_ket(&h, &StateVector::basis(2, k), &grid).unwrap();
            for (i, s) in tr.states.iter().enumerate() {
                assert!(u[i].column(k).max_abs_diff(s) < 1e-14);
            }
        }
    }

    #[test]
    fn errors_are_reported() {
        let h = TimeDependentOperator::constant(ComplexMatrix::zeros(2));
        let grid = TimeGrid::new(0.0, 1.0, 0.1).unwrap();
        assert!(matches!(
            evolve_ket(&h, &StateVector::basis(3, 0), &grid),
            Err(Error::DimensionMismatch { .. })
        ));
        let bad = TimeDependentOperator::new(2, |t| {
            let mut m = ComplexMatrix::zeros(2);
            if t > 0.5 {
                m[(0, 0)] = C64::new(f64::NAN, 0.0);
            }
            m
        });
        assert!(matches!(
            evolve_ket(&bad, &StateVector::basis(2, 0), &grid),
            Err(Error::NonFinite { .. })
        ));
    }

    #[test]
    fn self_check_flags_coarse_steps() {
        let h = TimeDependentOperator::constant(sigma_x().scale(C64::new(20.0, 0.0)));
        let grid = TimeGrid::new(0.0, 1.0, 0.05).unwrap();
        let psi0 = StateVector::basis(2, 0);
        let err = self_checked(&grid, 1e-8, |g| evolve_ket(&h, &psi0, g)).unwrap_err();
        assert!(matches!(err, Error::StepSize { .. }));
        let fine = TimeGrid::new(0.0, 1.0, 1e-4).unwrap();
        assert!(self_checked(&fine, 1e-8, |g| evolve_ket(&h, &psi0, g)).is_ok());
    }

    #[test]
    fn pt_symmetry_predicate() {
        let grid = TimeGrid::new(0.0, 1.0, 0.1).unwrap();
        let zero = constant_signal(0.0);
        assert!(is_pt_symmetric_two_level(-PI / 2.0, PI / 2.0, &zero, &grid));
        assert!(!is_pt_symmetric_two_level(-PI / 2.0, PI / 2.0, &constant_signal(0.3), &grid));
        assert!(!is_pt_symmetric_two_level(0.0, PI / 2.0, &zero, &grid));
    }
}
