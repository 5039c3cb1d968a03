use std::fmt;
use std::sync::Arc;

use super::two_level::{alpha_rate, rabi_frequency};
use super::{guarded_product, sample_times, CONSISTENCY_TOLERANCE, SINGULARITY_GUARD};
use crate::dynamics::{TimeDependentOperator, TimeGrid};
use crate::error::{Error, Result};
use crate::frame::ThreeLevelFrameParams;
use crate::linalg::{ComplexMatrix, C64};
use crate::smooth::{constant_signal, Signal};

/// Level indices in the three-level basis `(|0⟩, |1⟩, |e⟩)`.
pub const LEVEL_0: usize = 0;
pub const LEVEL_1: usize = 1;
pub const LEVEL_E: usize = 2;

/// Fixed part of the three-level generator: rates, their phases, detunings
/// and the drive phases `φ` (pump pair) and `φ_a` (`|0⟩ ↔ |1⟩`).
#[derive(Clone)]
pub struct ThreeLevelDrive {
    pub gamma0: Signal,
    pub gamma1: Signal,
    pub gamma_e: Signal,
    pub xi0: f64,
    pub xi1: f64,
    pub xi_e: f64,
    pub delta0: Signal,
    pub delta1: Signal,
    pub delta_e: Signal,
    pub varphi: f64,
    pub varphi_a: f64,
}

impl ThreeLevelDrive {
    /// All rates and detunings zero.
    pub fn closed(varphi: f64, varphi_a: f64) -> Self {
        let zero = constant_signal(0.0);
        Self {
            gamma0: zero.clone(),
            gamma1: zero.clone(),
            gamma_e: zero.clone(),
            xi0: 0.0,
            xi1: 0.0,
            xi_e: 0.0,
            delta0: zero.clone(),
            delta1: zero.clone(),
            delta_e: zero,
            varphi,
            varphi_a,
        }
    }
}

impl fmt::Debug for ThreeLevelDrive {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ThreeLevelDrive")
            .field("xi", &[self.xi0, self.xi1, self.xi_e])
            .field("varphi", &self.varphi)
            .field("varphi_a", &self.varphi_a)
            .finish_non_exhaustive()
    }
}

/// Synthesized three-level controls. `|e⟩` couples to `|0⟩` and `|1⟩` with
/// `Ω_0, Ω_1` and phases `φ_0, φ_1`; `|0⟩ ↔ |1⟩` is driven by `Ω_a, φ_a`.
#[derive(Clone)]
pub struct ThreeLevelControls {
    pub omega: Signal,
    pub omega0: Signal,
    pub omega1: Signal,
    pub omega_a: Signal,
    pub varphi: f64,
    pub varphi0: Signal,
    pub varphi1: Signal,
    pub varphi_a: f64,
    pub delta0: Signal,
    pub delta1: Signal,
    pub delta_e: Signal,
    pub gamma0: Signal,
    pub gamma1: Signal,
    pub gamma_e: Signal,
    pub xi0: f64,
    pub xi1: f64,
    pub xi_e: f64,
}

impl ThreeLevelControls {
    pub fn hamiltonian(&self) -> TimeDependentOperator {
        let c = self.clone();
        TimeDependentOperator::new(3, move |t| {
            let mut h = ComplexMatrix::zeros(3);
            h[(LEVEL_0, LEVEL_0)] = C64::new((c.delta0)(t), 0.0) + C64::from_polar(0.5 * (c.gamma0)(t), c.xi0);
            h[(LEVEL_1, LEVEL_1)] = C64::new((c.delta1)(t), 0.0) + C64::from_polar(0.5 * (c.gamma1)(t), c.xi1);
            h[(LEVEL_E, LEVEL_E)] = C64::new((c.delta_e)(t), 0.0) + C64::from_polar(0.5 * (c.gamma_e)(t), c.xi_e);
            let couplings = [
                (LEVEL_E, LEVEL_0, C64::from_polar(0.5 * (c.omega0)(t), (c.varphi0)(t))),
                (LEVEL_E, LEVEL_1, C64::from_polar(0.5 * (c.omega1)(t), (c.varphi1)(t))),
                (LEVEL_1, LEVEL_0, C64::from_polar(0.5 * (c.omega_a)(t), c.varphi_a)),
            ];
            for (r, col, v) in couplings {
                h[(r, col)] = v;
                h[(col, r)] = v.conj();
            }
            h
        })
    }

    /// Copy with `Ω` (hence `Ω_0, Ω_1`) multiplied by `factor`.
    pub fn with_omega_scaled(&self, factor: f64) -> Self {
        let scale = |s: &Signal| -> Signal {
            let s = s.clone();
            Arc::new(move |t| factor * s(t))
        };
        Self {
            omega: scale(&self.omega),
            omega0: scale(&self.omega0),
            omega1: scale(&self.omega1),
            ..self.clone()
        }
    }
}

impl fmt::Debug for ThreeLevelControls {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ThreeLevelControls")
            .field("varphi", &self.varphi)
            .field("varphi_a", &self.varphi_a)
            .field("xi", &[self.xi0, self.xi1, self.xi_e])
            .finish_non_exhaustive()
    }
}

/// `Ω = [(γ0 sinξ0 sin²θ + γ1 sinξ1 cos²θ − γe sinξe)·sin2φ − 4φ̇] / [2 sin(φ_d + β)]`
/// where `φ` is the mixing angle and `φ_d` the drive phase.
#[allow(clippy::too_many_arguments)]
pub fn pump_rabi_frequency(
    theta: f64,
    phi_mix: f64,
    phi_mix_dot: f64,
    beta: f64,
    gammas: [f64; 3],
    xis: [f64; 3],
    varphi: f64,
) -> f64 {
    let (s2, c2) = (theta.sin().powi(2), theta.cos().powi(2));
    let weight = gammas[0] * xis[0].sin() * s2 + gammas[1] * xis[1].sin() * c2 - gammas[2] * xis[2].sin();
    (weight * (2.0 * phi_mix).sin() - 4.0 * phi_mix_dot) / (2.0 * (varphi + beta).sin())
}

/// Values of the drive, frame and synthesized envelopes at one instant.
struct Sample {
    theta: f64,
    alpha: f64,
    alpha_dot: f64,
    phi: f64,
    beta: f64,
    gammas: [f64; 3],
    deltas: [f64; 3],
    omega: f64,
    omega_a: f64,
}

fn sample(frame: &ThreeLevelFrameParams, drive: &ThreeLevelDrive, t: f64) -> Sample {
    let gammas = [(drive.gamma0)(t), (drive.gamma1)(t), (drive.gamma_e)(t)];
    let xis = [drive.xi0, drive.xi1, drive.xi_e];
    let (theta, alpha, phi, beta) = (
        frame.theta.value(t),
        frame.alpha.value(t),
        frame.phi_mix.value(t),
        frame.beta.value(t),
    );
    Sample {
        theta,
        alpha,
        alpha_dot: frame.alpha.derivative(t),
        phi,
        beta,
        gammas,
        deltas: [(drive.delta0)(t), (drive.delta1)(t), (drive.delta_e)(t)],
        omega: pump_rabi_frequency(theta, phi, frame.phi_mix.derivative(t), beta, gammas, xis, drive.varphi),
        omega_a: rabi_frequency(
            theta,
            frame.theta.derivative(t),
            alpha,
            gammas[0],
            gammas[1],
            xis[0],
            xis[1],
            drive.varphi_a,
        ),
    }
}

fn local_alpha_rate(s: &Sample, drive: &ThreeLevelDrive) -> f64 {
    alpha_rate(
        s.deltas[1] - s.deltas[0],
        s.omega_a,
        s.theta,
        s.alpha,
        s.gammas[0],
        s.gammas[1],
        drive.xi0,
        drive.xi1,
        drive.varphi_a,
    )
}

/// Right-hand side of the `β̇` line:
/// `2β̇ = −2(Δ0 sin²θ + Δ1 cos²θ − Δe) − (γ0 cosξ0 sin²θ + γ1 cosξ1 cos²θ − γe cosξe)
///       − 2Ω cot2φ cos(φ_d + β) − Ω_a sin2θ cos(φ_a + α) + α̇ cos2θ`.
fn local_beta_rate(s: &Sample, drive: &ThreeLevelDrive) -> f64 {
    let (s2, c2) = (s.theta.sin().powi(2), s.theta.cos().powi(2));
    let detuning = s.deltas[0] * s2 + s.deltas[1] * c2 - s.deltas[2];
    let shift = s.gammas[0] * drive.xi0.cos() * s2 + s.gammas[1] * drive.xi1.cos() * c2
        - s.gammas[2] * drive.xi_e.cos();
    let pump = guarded_product((drive.varphi + s.beta).cos(), || {
        s.omega * (2.0 * s.phi).cos() / (2.0 * s.phi).sin()
    });
    let pair = s.omega_a * (2.0 * s.theta).sin() * (drive.varphi_a + s.alpha).cos();
    0.5 * (-2.0 * detuning - shift - 2.0 * pump - pair + s.alpha_dot * (2.0 * s.theta).cos())
}

fn check_denominators(frame: &ThreeLevelFrameParams, drive: &ThreeLevelDrive, grid: &TimeGrid) -> Result<()> {
    for t in sample_times(grid) {
        let checks = [
            ("sin(varphi + beta)", (drive.varphi + frame.beta.value(t)).sin()),
            ("sin(varphi_a + alpha)", (drive.varphi_a + frame.alpha.value(t)).sin()),
        ];
        for (quantity, v) in checks {
            if v.abs() < SINGULARITY_GUARD {
                return Err(Error::SingularDenominator {
                    quantity,
                    t,
                    value: v.abs(),
                });
            }
        }
    }
    Ok(())
}

/// Solves the three-level triangularization conditions for the envelopes and
/// checks the `α̇` and `β̇` lines on `grid`.
pub fn synthesize_three_level(
    frame: &ThreeLevelFrameParams,
    drive: &ThreeLevelDrive,
    grid: &TimeGrid,
) -> Result<ThreeLevelControls> {
    check_denominators(frame, drive, grid)?;
    for t in grid.times() {
        let s = sample(frame, drive, t);
        let lines = [
            ("alpha-dot", s.alpha_dot, local_alpha_rate(&s, drive)),
            ("beta-dot", frame.beta.derivative(t), local_beta_rate(&s, drive)),
        ];
        for (equation, lhs, rhs) in lines {
            let residual = (lhs - rhs).abs();
            if !(residual <= CONSISTENCY_TOLERANCE) {
                return Err(Error::InconsistentPhase { equation, t, residual });
            }
        }
    }

    let sig = |f: fn(&Sample) -> f64| -> Signal {
        let (fr, dr) = (frame.clone(), drive.clone());
        Arc::new(move |t| f(&sample(&fr, &dr, t)))
    };
    let (alpha, varphi) = (frame.alpha.clone(), drive.varphi);
    let alpha1 = alpha.clone();
    Ok(ThreeLevelControls {
        omega: sig(|s| s.omega),
        omega0: sig(|s| s.omega * s.theta.sin()),
        omega1: sig(|s| s.omega * s.theta.cos()),
        omega_a: sig(|s| s.omega_a),
        varphi,
        varphi0: Arc::new(move |t| varphi - 0.5 * alpha.value(t)),
        varphi1: Arc::new(move |t| varphi + 0.5 * alpha1.value(t)),
        varphi_a: drive.varphi_a,
        delta0: drive.delta0.clone(),
        delta1: drive.delta1.clone(),
        delta_e: drive.delta_e.clone(),
        gamma0: drive.gamma0.clone(),
        gamma1: drive.gamma1.clone(),
        gamma_e: drive.gamma_e.clone(),
        xi0: drive.xi0,
        xi1: drive.xi1,
        xi_e: drive.xi_e,
    })
}

/// Detunings `(Δ0, Δ1, Δe)` that close both phase lines for the given frame,
/// keeping the supplied `Δ0`.
pub fn consistent_detunings(frame: &ThreeLevelFrameParams, drive: &ThreeLevelDrive) -> (Signal, Signal, Signal) {
    let zeroed = ThreeLevelDrive {
        delta1: drive.delta0.clone(),
        delta_e: constant_signal(0.0),
        ..drive.clone()
    };
    let (f1, d1) = (frame.clone(), zeroed.clone());
    let delta1: Signal = Arc::new(move |t| {
        let s = sample(&f1, &d1, t);
        s.deltas[0] + s.alpha_dot - local_alpha_rate(&s, &d1)
    });
    let with_delta1 = ThreeLevelDrive {
        delta1: delta1.clone(),
        ..zeroed
    };
    let f2 = frame.clone();
    let delta_e: Signal = Arc::new(move |t| {
        let s = sample(&f2, &with_delta1, t);
        f2.beta.derivative(t) - local_beta_rate(&s, &with_delta1)
    });
    (drive.delta0.clone(), delta1, delta_e)
}
