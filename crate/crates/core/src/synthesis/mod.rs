//! Drive synthesis from the triangularization condition, accumulated passage
//! phases, and the three-stage cyclic schedules.

mod phase;
mod schedule;
mod three_level;
mod two_level;

pub use phase::{
    bra_phase_three_level, bra_phase_two_level,
    bra_phase_relation_three_level, bra_phase_relation_two_level, phase_three_level, phase_two_level,
    rotated_phase, PhaseFunctional,
};
pub use schedule::{clockwise_schedule, counterclockwise_schedule, Direction, Stage, StageSchedule};
pub use three_level::{
    consistent_detunings, pump_rabi_frequency, synthesize_three_level, ThreeLevelControls, ThreeLevelDrive, LEVEL_0,
    LEVEL_1, LEVEL_E,
};
pub use two_level::{
    consistent_detuning, pt_rabi_frequency, rabi_frequency, synthesize_two_level_general, TwoLevelControls,
    TwoLevelDrive,
};

/// Lower bound on `|sin(φ + α)|`-type denominators.
pub const SINGULARITY_GUARD: f64 = 1e-6;

/// Maximum residual of the α̇/β̇ consistency lines.
pub const CONSISTENCY_TOLERANCE: f64 = 1e-8;

/// Coefficients at or below this magnitude count as exactly zero in
/// `coefficient × cot(…)` products.
const ZERO_COEFFICIENT: f64 = 1e-12;

/// `coefficient · value()`, taken as zero without evaluating `value` when the
/// coefficient vanishes (the value may sit on a cotangent pole).
fn guarded_product(coefficient: f64, value: impl FnOnce() -> f64) -> f64 {
    if coefficient.abs() <= ZERO_COEFFICIENT {
        0.0
    } else {
        coefficient * value()
    }
}

fn cot(x: f64) -> f64 {
    x.cos() / x.sin()
}

/// Sample times the integrator touches: grid points and step midpoints.
fn sample_times(grid: &crate::dynamics::TimeGrid) -> impl Iterator<Item = f64> + '_ {
    (0..grid.len()).flat_map(move |i| {
        let t = grid.time(i);
        let mid = if i < grid.steps() {
            Some(0.5 * (t + grid.time(i + 1)))
        } else {
            None
        };
        std::iter::once(t).chain(mid)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn guarded_product_skips_poles() {
        assert_eq!(guarded_product(0.0, || f64::INFINITY), 0.0);
        assert_eq!(guarded_product((std::f64::consts::FRAC_PI_2).cos(), || cot(0.0)), 0.0);
        assert_eq!(guarded_product(2.0, || 3.0), 6.0);
    }
}
