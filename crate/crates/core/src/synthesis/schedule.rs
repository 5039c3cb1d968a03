use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::frame::Passage;
use crate::smooth::SmoothFn;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    /// `|0⟩ → |e⟩ → |1⟩ → |0⟩`
    Clockwise,
    /// `|0⟩ → |1⟩ → |e⟩ → |0⟩`
    Counterclockwise,
}

impl FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cw" | "clockwise" => Ok(Direction::Clockwise),
            "ccw" | "counterclockwise" => Ok(Direction::Counterclockwise),
            other => Err(Error::Config(format!("unknown direction `{other}` (expected cw or ccw)"))),
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Clockwise => "cw",
            Direction::Counterclockwise => "ccw",
        })
    }
}

/// One stage of a cyclic loop: affine `θ` and `φ_mix` on `[start, end]`, the
/// passage that carries the population, and the phase of the `|e⟩` rate.
#[derive(Clone, Debug)]
pub struct Stage {
    /// 1, 2 or 3 within the loop.
    pub index: usize,
    pub start: f64,
    pub end: f64,
    pub theta: SmoothFn,
    pub phi_mix: SmoothFn,
    pub passage: Passage,
    pub xi_e: f64,
}

impl Stage {
    pub fn contains(&self, t: f64) -> bool {
        t >= self.start && t <= self.end
    }
}

/// Loop `k` (1-based) of a cyclic transfer with stage duration `2T`,
/// spanning `[6(k−1)T, 6kT]`.
#[derive(Clone, Debug)]
pub struct StageSchedule {
    pub period: f64,
    pub loop_index: usize,
    pub direction: Direction,
    pub stages: [Stage; 3],
}

impl StageSchedule {
    pub fn new(direction: Direction, k: usize, period: f64) -> Result<Self> {
        match direction {
            Direction::Clockwise => clockwise_schedule(k, period),
            Direction::Counterclockwise => counterclockwise_schedule(k, period),
        }
    }

    pub fn start(&self) -> f64 {
        self.stages[0].start
    }

    pub fn end(&self) -> f64 {
        self.stages[2].end
    }

    /// Stage whose closed interval contains `t`; at a shared boundary the
    /// later stage wins.
    pub fn stage_at(&self, t: f64) -> Option<&Stage> {
        self.stages.iter().rev().find(|s| s.contains(t))
    }
}

fn validate(k: usize, period: f64) -> Result<()> {
    if k < 1 {
        return Err(Error::InvalidSchedule(format!("loop index must be at least 1, got {k}")));
    }
    if !(period > 0.0 && period.is_finite()) {
        return Err(Error::InvalidSchedule(format!("T must be positive, got {period}")));
    }
    Ok(())
}

/// `θ(t) = sign·π(t − shift·T)/(4T)`.
fn ramp(sign: f64, shift: f64, period: f64) -> SmoothFn {
    SmoothFn::affine(shift * period, 0.0, sign * PI / (4.0 * period))
}

fn stages(
    k: usize,
    period: f64,
    pieces: [(SmoothFn, f64, f64, Passage); 3],
) -> [Stage; 3] {
    let base = 6.0 * (k as f64 - 1.0) * period;
    let xi_e = [FRAC_PI_2, -FRAC_PI_2, FRAC_PI_2];
    let mut i = 0;
    pieces.map(|(theta, sign, offset, passage)| {
        let start = base + 2.0 * i as f64 * period;
        let stage = Stage {
            index: i + 1,
            start,
            end: start + 2.0 * period,
            phi_mix: theta.scaled(sign).shifted(offset),
            theta,
            passage,
            xi_e: xi_e[i],
        };
        i += 1;
        stage
    })
}

/// Clockwise loop `k`:
///
/// ```text
/// stage 1: θ = π[t − 2(3k−2)T]/(4T),  φ = θ,        μ_3 under H
/// stage 2: θ = π[t − 2(3k−1)T]/(4T),  φ = θ − π/2,  μ_3 under H
/// stage 3: θ = π[t − 2(3k−2)T]/(4T),  φ = θ + π/2,  μ_1 under H†
/// ```
pub fn clockwise_schedule(k: usize, period: f64) -> Result<StageSchedule> {
    validate(k, period)?;
    let kf = k as f64;
    let a = ramp(1.0, 2.0 * (3.0 * kf - 2.0), period);
    let b = ramp(1.0, 2.0 * (3.0 * kf - 1.0), period);
    Ok(StageSchedule {
        period,
        loop_index: k,
        direction: Direction::Clockwise,
        stages: stages(
            k,
            period,
            [
                (a.clone(), 1.0, 0.0, Passage::Ket),
                (b, 1.0, -FRAC_PI_2, Passage::Ket),
                (a, 1.0, FRAC_PI_2, Passage::Bra),
            ],
        ),
    })
}

/// Counterclockwise loop `k`:
///
/// ```text
/// stage 1: θ = −π[t − 6(k−1)T]/(4T),  φ = −θ,        μ_1 under H†
/// stage 2: θ = −π[t − 2(3k−2)T]/(4T), φ = −θ − π/2,  μ_3 under H
/// stage 3: θ = −π[t − 2(3k−1)T]/(4T), φ = −θ + π,    μ_3 under H
/// ```
pub fn counterclockwise_schedule(k: usize, period: f64) -> Result<StageSchedule> {
    validate(k, period)?;
    let kf = k as f64;
    Ok(StageSchedule {
        period,
        loop_index: k,
        direction: Direction::Counterclockwise,
        stages: stages(
            k,
            period,
            [
                (ramp(-1.0, 6.0 * (kf - 1.0), period), -1.0, 0.0, Passage::Bra),
                (ramp(-1.0, 2.0 * (3.0 * kf - 2.0), period), -1.0, -FRAC_PI_2, Passage::Ket),
                (ramp(-1.0, 2.0 * (3.0 * kf - 1.0), period), -1.0, PI, Passage::Ket),
            ],
        ),
    })
}
