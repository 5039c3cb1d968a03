use std::f64::consts::{FRAC_PI_2, PI};

use nhpassage::dynamics::TimeGrid;
use nhpassage::frame::{
    three_level_frame, triangularization_residual, two_level_frame, ThreeLevelFrameParams, TwoLevelFrameParams,
};
use nhpassage::smooth::{constant_signal, SmoothFn};
use nhpassage::synthesis::{
    bra_phase_relation_three_level, bra_phase_relation_two_level, consistent_detuning, consistent_detunings,
    synthesize_three_level, synthesize_two_level_general, ThreeLevelDrive, TwoLevelDrive,
};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn consistent_two_level_drives_triangularize(
        theta0 in 0.15f64..1.3,
        slope in -0.1f64..0.1,
        amp in 0.0f64..0.4,
        w in 0.3f64..2.0,
        ph in 0.0f64..3.0,
        varphi in 0.9f64..2.2,
        gamma in 0.0f64..1.0,
        xi0 in -3.0f64..3.0,
    ) {
        let frame = TwoLevelFrameParams {
            theta: SmoothFn::affine(0.0, theta0, slope),
            alpha: SmoothFn::sine(amp, w, ph),
        };
        let mut drive = TwoLevelDrive {
            gamma0: constant_signal(gamma),
            gamma1: constant_signal(gamma),
            xi0,
            xi1: xi0 + PI,
            delta: constant_signal(0.0),
            varphi,
        };
        drive.delta = consistent_detuning(&frame, &drive);
        let grid = TimeGrid::new(0.0, 1.0, 0.01).unwrap();
        let c = synthesize_two_level_general(&frame, &drive, &grid).unwrap();
        let tri = triangularization_residual(&c.hamiltonian(), &two_level_frame(&frame), &grid).unwrap();
        prop_assert!(tri < 1e-9, "triangularization {tri}");
        let bra = bra_phase_relation_two_level(&c, &frame, &grid).unwrap();
        prop_assert!(bra < 1e-8, "bra relation {bra}");
    }

    #[test]
    fn consistent_three_level_drives_triangularize(
        theta0 in 0.2f64..1.2,
        phi0 in 0.2f64..0.6,
        phi_slope in 0.0f64..0.4,
        amp in 0.0f64..0.3,
        w in 0.3f64..2.0,
        beta_amp in 0.0f64..0.3,
        gamma in 0.0f64..1.0,
        gamma_e in 0.0f64..1.0,
        xi0 in -3.0f64..3.0,
        xi_e in -3.0f64..3.0,
        varphi in 0.9f64..2.2,
        varphi_a in 0.9f64..2.2,
    ) {
        let frame = ThreeLevelFrameParams {
            theta: SmoothFn::sine(0.2, 0.8, 0.0).shifted(theta0),
            alpha: SmoothFn::sine(amp, w, 0.3),
            phi_mix: SmoothFn::affine(0.0, phi0, phi_slope),
            beta: SmoothFn::cosine(beta_amp, 1.1, 0.0),
        };
        let mut drive = ThreeLevelDrive {
            gamma0: constant_signal(gamma),
            gamma1: constant_signal(gamma),
            gamma_e: constant_signal(gamma_e),
            xi0,
            xi1: xi0 + PI,
            xi_e,
            delta0: constant_signal(0.1),
            ..ThreeLevelDrive::closed(varphi, varphi_a)
        };
        let (d0, d1, de) = consistent_detunings(&frame, &drive);
        drive.delta0 = d0;
        drive.delta1 = d1;
        drive.delta_e = de;
        let grid = TimeGrid::new(0.0, 1.0, 0.01).unwrap();
        let c = synthesize_three_level(&frame, &drive, &grid).unwrap();
        let tri = triangularization_residual(&c.hamiltonian(), &three_level_frame(&frame), &grid).unwrap();
        prop_assert!(tri < 1e-9, "triangularization {tri}");
        let bra = bra_phase_relation_three_level(&c, &frame, &grid).unwrap();
        prop_assert!(bra < 1e-8, "bra relation {bra}");
    }
}

#[test]
fn inconsistent_detuning_is_rejected() {
    let frame = TwoLevelFrameParams {
        theta: SmoothFn::affine(0.0, 0.4, 0.1),
        alpha: SmoothFn::sine(0.3, 1.0, 0.0),
    };
    let drive = TwoLevelDrive::balanced(constant_signal(0.5), constant_signal(0.0), FRAC_PI_2);
    let grid = TimeGrid::new(0.0, 1.0, 0.01).unwrap();
    assert!(synthesize_two_level_general(&frame, &drive, &grid).is_err());
}
