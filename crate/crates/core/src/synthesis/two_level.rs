use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::sync::Arc;

use super::{cot, guarded_product, sample_times, CONSISTENCY_TOLERANCE, SINGULARITY_GUARD};
use crate::dynamics::{is_pt_symmetric_two_level, TimeDependentOperator, TimeGrid};
use crate::error::{Error, Result};
use crate::frame::TwoLevelFrameParams;
use crate::linalg::{ComplexMatrix, C64};
use crate::smooth::{constant_signal, Signal};

/// Everything in the two-level generator except the Rabi frequency:
/// gain/loss rates `γ0, γ1` with phases `ξ0, ξ1`, detuning `Δ(t)` and the
/// drive phase `φ`.
#[derive(Clone)]
pub struct TwoLevelDrive {
    pub gamma0: Signal,
    pub gamma1: Signal,
    pub xi0: f64,
    pub xi1: f64,
    pub delta: Signal,
    pub varphi: f64,
}

impl TwoLevelDrive {
    /// Loss `γ` on `|0⟩`, gain `γ` on `|1⟩` (`ξ0 = −π/2`, `ξ1 = π/2`).
    pub fn balanced(gamma: Signal, delta: Signal, varphi: f64) -> Self {
        Self {
            gamma0: gamma.clone(),
            gamma1: gamma,
            xi0: -FRAC_PI_2,
            xi1: FRAC_PI_2,
            delta,
            varphi,
        }
    }
}

impl fmt::Debug for TwoLevelDrive {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TwoLevelDrive")
            .field("xi0", &self.xi0)
            .field("xi1", &self.xi1)
            .field("varphi", &self.varphi)
            .finish_non_exhaustive()
    }
}

/// Synthesized two-level controls.
///
/// `H = Δ|1⟩⟨1| + ½(e^{iξ0}γ0|0⟩⟨0| + e^{iξ1}γ1|1⟩⟨1|) + (½Ω e^{iφ}|1⟩⟨0| + h.c.)`
#[derive(Clone)]
pub struct TwoLevelControls {
    pub omega: Signal,
    pub delta: Signal,
    pub varphi: f64,
    pub gamma0: Signal,
    pub gamma1: Signal,
    pub xi0: f64,
    pub xi1: f64,
}

impl TwoLevelControls {
    pub fn hamiltonian(&self) -> TimeDependentOperator {
        let c = self.clone();
        TimeDependentOperator::new(2, move |t| {
            let mut h = ComplexMatrix::zeros(2);
            h[(0, 0)] = C64::from_polar(0.5 * (c.gamma0)(t), c.xi0);
            h[(1, 1)] = C64::new((c.delta)(t), 0.0) + C64::from_polar(0.5 * (c.gamma1)(t), c.xi1);
            let drive = C64::from_polar(0.5 * (c.omega)(t), c.varphi);
            h[(1, 0)] = drive;
            h[(0, 1)] = drive.conj();
            h
        })
    }

    /// Copy with `Ω` multiplied by `factor`.
    pub fn with_omega_scaled(&self, factor: f64) -> Self {
        let omega = self.omega.clone();
        Self {
            omega: Arc::new(move |t| factor * omega(t)),
            ..self.clone()
        }
    }

    pub fn is_pt_symmetric(&self, grid: &TimeGrid) -> bool {
        is_pt_symmetric_two_level(self.xi0, self.xi1, &self.delta, grid)
    }
}

impl fmt::Debug for TwoLevelControls {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TwoLevelControls")
            .field("varphi", &self.varphi)
            .field("xi0", &self.xi0)
            .field("xi1", &self.xi1)
            .finish_non_exhaustive()
    }
}

/// `Ω = [−4θ̇ + (γ0 sinξ0 − γ1 sinξ1) sin2θ] / [2 sin(φ + α)]`.
#[allow(clippy::too_many_arguments)]
pub fn rabi_frequency(
    theta: f64,
    theta_dot: f64,
    alpha: f64,
    gamma0: f64,
    gamma1: f64,
    xi0: f64,
    xi1: f64,
    varphi: f64,
) -> f64 {
    (-4.0 * theta_dot + (gamma0 * xi0.sin() - gamma1 * xi1.sin()) * (2.0 * theta).sin())
        / (2.0 * (varphi + alpha).sin())
}

/// Balanced gain/loss form: `Ω = −(2θ̇ + γ sin2θ) / sin(φ + α)`.
pub fn pt_rabi_frequency(theta: f64, theta_dot: f64, alpha: f64, gamma: f64, varphi: f64) -> f64 {
    -(2.0 * theta_dot + gamma * (2.0 * theta).sin()) / (varphi + alpha).sin()
}

/// Right-hand side of the local-phase line
/// `α̇ = Δ − Ω cot2θ cos(φ + α) − ½(γ0 cosξ0 − γ1 cosξ1)`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn alpha_rate(
    delta: f64,
    omega: f64,
    theta: f64,
    alpha: f64,
    gamma0: f64,
    gamma1: f64,
    xi0: f64,
    xi1: f64,
    varphi: f64,
) -> f64 {
    delta
        - guarded_product((varphi + alpha).cos(), || omega * cot(2.0 * theta))
        - 0.5 * (gamma0 * xi0.cos() - gamma1 * xi1.cos())
}

fn omega_signal(frame: &TwoLevelFrameParams, drive: &TwoLevelDrive) -> Signal {
    let (th, al) = (frame.theta.clone(), frame.alpha.clone());
    let (g0, g1) = (drive.gamma0.clone(), drive.gamma1.clone());
    let (xi0, xi1, varphi) = (drive.xi0, drive.xi1, drive.varphi);
    Arc::new(move |t| rabi_frequency(th.value(t), th.derivative(t), al.value(t), g0(t), g1(t), xi0, xi1, varphi))
}

/// Solves the triangularization condition for `Ω(t)` and checks that the
/// supplied `α(t)` and `Δ(t)` satisfy the local-phase line on `grid`.
pub fn synthesize_two_level_general(
    frame: &TwoLevelFrameParams,
    drive: &TwoLevelDrive,
    grid: &TimeGrid,
) -> Result<TwoLevelControls> {
    for t in sample_times(grid) {
        let s = (drive.varphi + frame.alpha.value(t)).sin();
        if s.abs() < SINGULARITY_GUARD {
            return Err(Error::SingularDenominator {
                quantity: "sin(varphi + alpha)",
                t,
                value: s.abs(),
            });
        }
    }
    let omega = omega_signal(frame, drive);
    for t in grid.times() {
        let expected = alpha_rate(
            (drive.delta)(t),
            omega(t),
            frame.theta.value(t),
            frame.alpha.value(t),
            (drive.gamma0)(t),
            (drive.gamma1)(t),
            drive.xi0,
            drive.xi1,
            drive.varphi,
        );
        let residual = (frame.alpha.derivative(t) - expected).abs();
        if !(residual <= CONSISTENCY_TOLERANCE) {
            return Err(Error::InconsistentPhase {
                equation: "alpha-dot",
                t,
                residual,
            });
        }
    }
    Ok(TwoLevelControls {
        omega,
        delta: drive.delta.clone(),
        varphi: drive.varphi,
        gamma0: drive.gamma0.clone(),
        gamma1: drive.gamma1.clone(),
        xi0: drive.xi0,
        xi1: drive.xi1,
    })
}

/// Detuning that closes the local-phase line for the given frame, rates and
/// drive phase: `Δ = α̇ + Ω cot2θ cos(φ + α) + ½(γ0 cosξ0 − γ1 cosξ1)`.
/// The `delta` field of `drive` is ignored.
pub fn consistent_detuning(frame: &TwoLevelFrameParams, drive: &TwoLevelDrive) -> Signal {
    let probe = TwoLevelDrive {
        delta: constant_signal(0.0),
        ..drive.clone()
    };
    let omega = omega_signal(frame, &probe);
    let f = frame.clone();
    Arc::new(move |t| {
        let zero_delta = alpha_rate(
            0.0,
            omega(t),
            f.theta.value(t),
            f.alpha.value(t),
            (probe.gamma0)(t),
            (probe.gamma1)(t),
            probe.xi0,
            probe.xi1,
            probe.varphi,
        );
        f.alpha.derivative(t) - zero_delta
    })
}
