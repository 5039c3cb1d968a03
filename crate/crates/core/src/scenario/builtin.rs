use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

use super::config::ScenarioConfig;
use super::protocol::{Protocol, StageModel, StagePlan, Target, Transient};
use super::{Family, Scenario};
use crate::dynamics::TimeGrid;
use crate::error::Result;
use crate::frame::{two_level_frame, Passage, ThreeLevelFrameParams, TwoLevelFrameParams};
use crate::linalg::StateVector;
use crate::smooth::{constant_signal, SmoothFn};
use crate::synthesis::{
    synthesize_three_level, synthesize_two_level_general, Direction, StageSchedule, ThreeLevelDrive, TwoLevelDrive,
    LEVEL_0, LEVEL_1, LEVEL_E,
};

const TWO_LEVEL_LABELS: [&str; 2] = ["P0", "P1"];
const THREE_LEVEL_LABELS: [&str; 3] = ["P0", "P1", "Pe"];

/// Single-stage two-level transfer over `[0, 2T]` with `γ = 2θ̇`, `φ = π/2`,
/// `α = 0` and no detuning.
fn two_level_protocol(
    id: &str,
    cfg: &ScenarioConfig,
    theta: SmoothFn,
    passage: Passage,
    initial: StateVector,
    target: Vec<f64>,
    expect_norm_dip: bool,
) -> Result<Protocol> {
    let end = 2.0 * cfg.period;
    let grid = TimeGrid::new(0.0, end, cfg.dt())?;
    let frame = TwoLevelFrameParams {
        theta: theta.clone(),
        alpha: SmoothFn::constant(0.0),
    };
    let scale = 2.0 * cfg.gamma_scale;
    let gamma = Arc::new(move |t| scale * theta.derivative(t));
    let drive = TwoLevelDrive::balanced(gamma, constant_signal(0.0), FRAC_PI_2);
    let controls = synthesize_two_level_general(&frame, &drive, &grid)?;
    Ok(Protocol {
        scenario: id.to_string(),
        period: cfg.period,
        level_labels: TWO_LEVEL_LABELS.to_vec(),
        initial,
        stages: vec![StagePlan {
            label: "stage 1".into(),
            start: 0.0,
            end,
            model: StageModel::TwoLevel { controls, frame },
            passage,
        }],
        stages_per_loop: 0,
        targets: vec![Target {
            label: "final transfer".into(),
            t: end,
            populations: target,
        }],
        transients: Vec::new(),
        expect_norm_dip,
    })
}

/// The four two-level transfers: (a) `|1⟩→|0⟩` and (b) `|0⟩→|1⟩` along `μ_2`
/// under `H`; (c) `|1⟩→|0⟩` and (d) `|0⟩→|1⟩` along `μ_1` under `H†`.
pub struct TwoLevelTransfer {
    variant: char,
    id: String,
}

impl TwoLevelTransfer {
    pub fn new(variant: char) -> Self {
        assert!(matches!(variant, 'a'..='d'), "two-level variants are a, b, c, d");
        Self {
            variant,
            id: format!("two_level_{variant}"),
        }
    }

    fn theta(&self, period: f64) -> SmoothFn {
        let w = PI / (4.0 * period);
        match self.variant {
            // −[π(t − T)/(4T) + π/4]
            'a' => SmoothFn::affine(period, -PI / 4.0, -w),
            // −[π(−t + T)/(4T) + π/4]
            'b' => SmoothFn::affine(period, -PI / 4.0, w),
            // −(π/2) sin[π(t + 2T)/(4T)]
            'c' => SmoothFn::sine(-FRAC_PI_2, w, FRAC_PI_2),
            // (π/2) cos[π(t + 2T)/(4T)]
            _ => SmoothFn::cosine(FRAC_PI_2, w, FRAC_PI_2),
        }
    }
}

impl Scenario for TwoLevelTransfer {
    fn id(&self) -> &str {
        &self.id
    }

    fn summary(&self) -> &str {
        match self.variant {
            'a' => "two-level |1> -> |0> along the ket passage",
            'b' => "two-level |0> -> |1> along the ket passage",
            'c' => "two-level |1> -> |0> along the bra passage (H^dagger)",
            _ => "two-level |0> -> |1> along the bra passage (H^dagger)",
        }
    }

    fn family(&self) -> Family {
        Family::TwoLevel
    }

    fn build(&self, cfg: &ScenarioConfig) -> Result<Protocol> {
        let (passage, from, to) = match self.variant {
            'a' => (Passage::Ket, 1, 0),
            'b' => (Passage::Ket, 0, 1),
            'c' => (Passage::Bra, 1, 0),
            _ => (Passage::Bra, 0, 1),
        };
        let mut target = vec![0.0; 2];
        target[to] = 1.0;
        two_level_protocol(
            &self.id,
            cfg,
            self.theta(cfg.period),
            passage,
            StateVector::basis(2, from),
            target,
            cfg.gamma_scale != 0.0,
        )
    }
}

/// Three-stage cyclic transfer repeated `loops` times, `γ = 3θ̇`,
/// `γ_e = γ/2`, `φ = φ_a = π/2`, `α = β = 0`, all detunings zero.
pub struct CyclicTransfer {
    direction: Direction,
    id: &'static str,
}

impl CyclicTransfer {
    pub fn new(direction: Direction) -> Self {
        let id = match direction {
            Direction::Clockwise => "cyclic_cw",
            Direction::Counterclockwise => "cyclic_ccw",
        };
        Self { direction, id }
    }

    /// Population order visited at the stage boundaries.
    fn cycle(&self) -> [usize; 3] {
        match self.direction {
            Direction::Clockwise => [LEVEL_E, LEVEL_1, LEVEL_0],
            Direction::Counterclockwise => [LEVEL_1, LEVEL_E, LEVEL_0],
        }
    }
}

impl Scenario for CyclicTransfer {
    fn id(&self) -> &str {
        self.id
    }

    fn summary(&self) -> &str {
        match self.direction {
            Direction::Clockwise => "three-level cycle |0> -> |e> -> |1> -> |0>",
            Direction::Counterclockwise => "three-level cycle |0> -> |1> -> |e> -> |0>",
        }
    }

    fn family(&self) -> Family {
        Family::Cyclic
    }

    fn build(&self, cfg: &ScenarioConfig) -> Result<Protocol> {
        let period = cfg.period;
        let mut stages = Vec::with_capacity(3 * cfg.loops);
        let mut targets = Vec::new();
        let mut transients = Vec::new();
        for k in 1..=cfg.loops {
            let schedule = StageSchedule::new(self.direction, k, period)?;
            for (stage, &level) in schedule.stages.iter().zip(&self.cycle()) {
                let grid = TimeGrid::new(stage.start, stage.end, cfg.dt())?;
                let frame = ThreeLevelFrameParams {
                    theta: stage.theta.clone(),
                    alpha: SmoothFn::constant(0.0),
                    phi_mix: stage.phi_mix.clone(),
                    beta: SmoothFn::constant(0.0),
                };
                let gamma = 3.0 * cfg.gamma_scale * stage.theta.derivative(stage.start);
                let drive = ThreeLevelDrive {
                    gamma0: constant_signal(gamma),
                    gamma1: constant_signal(gamma),
                    gamma_e: constant_signal(gamma / 2.0),
                    xi0: -FRAC_PI_2,
                    xi1: FRAC_PI_2,
                    xi_e: stage.xi_e,
                    ..ThreeLevelDrive::closed(FRAC_PI_2, FRAC_PI_2)
                };
                let controls = synthesize_three_level(&frame, &drive, &grid)?;
                let label = format!("loop {k} stage {}", stage.index);
                let mut populations = vec![0.0; 3];
                populations[level] = 1.0;
                targets.push(Target {
                    label: format!("{label} end"),
                    t: stage.end,
                    populations,
                });
                if stage.passage == Passage::Bra {
                    // μ_1 has no |e⟩ component
                    transients.push(Transient::Ceiling {
                        label: format!("{label} Pe stays empty"),
                        start: stage.start,
                        end: stage.end,
                        level: LEVEL_E,
                        limit: 1e-8,
                    });
                }
                stages.push(StagePlan {
                    label,
                    start: stage.start,
                    end: stage.end,
                    model: StageModel::ThreeLevel { controls, frame },
                    passage: stage.passage,
                });
            }
        }
        if self.direction == Direction::Clockwise {
            transients.push(Transient::Window {
                label: "P1 transient at 1.6T".into(),
                t: 1.6 * period,
                level: LEVEL_1,
                value: 0.07,
                tolerance: 0.02,
            });
        }
        Ok(Protocol {
            scenario: self.id.to_string(),
            period,
            level_labels: THREE_LEVEL_LABELS.to_vec(),
            initial: StateVector::basis(3, LEVEL_0),
            stages,
            stages_per_loop: 3,
            targets,
            transients,
            expect_norm_dip: cfg.gamma_scale != 0.0,
        })
    }
}

/// User-defined two-level passage: `θ` ramps linearly from `theta_start` to
/// `theta_end` over `[0, 2T]`, `γ = 2θ̇·gamma_scale`, along the configured
/// passage. The system starts in the passage vector and is expected to end
/// in it.
pub struct CustomTwoLevel;

impl Scenario for CustomTwoLevel {
    fn id(&self) -> &str {
        "custom"
    }

    fn summary(&self) -> &str {
        "two-level linear theta ramp from config keys theta_start, theta_end, passage"
    }

    fn family(&self) -> Family {
        Family::TwoLevel
    }

    fn build(&self, cfg: &ScenarioConfig) -> Result<Protocol> {
        let end = 2.0 * cfg.period;
        let slope = (cfg.theta_end - cfg.theta_start) / end;
        let theta = SmoothFn::affine(0.0, cfg.theta_start, slope);
        let frame = two_level_frame(&TwoLevelFrameParams {
            theta: theta.clone(),
            alpha: SmoothFn::constant(0.0),
        });
        let initial = cfg.passage.vector(&frame, 0.0);
        let target = cfg.passage.vector(&frame, end).populations();
        two_level_protocol("custom", cfg, theta, cfg.passage, initial, target, false)
    }
}
