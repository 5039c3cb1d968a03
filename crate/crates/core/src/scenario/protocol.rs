use crate::dynamics::{TimeDependentOperator, TimeGrid};
use crate::error::Result;
use crate::frame::{three_level_frame, two_level_frame, AncillaryFrame, Passage, ThreeLevelFrameParams, TwoLevelFrameParams};
use crate::linalg::StateVector;
use crate::synthesis::{
    bra_phase_relation_three_level, bra_phase_relation_two_level, bra_phase_three_level, bra_phase_two_level,
    phase_three_level, phase_two_level, PhaseFunctional, ThreeLevelControls, TwoLevelControls,
};

/// Synthesized controls of one stage together with the frame they
/// triangularize.
#[derive(Clone, Debug)]
pub enum StageModel {
    TwoLevel {
        controls: TwoLevelControls,
        frame: TwoLevelFrameParams,
    },
    ThreeLevel {
        controls: ThreeLevelControls,
        frame: ThreeLevelFrameParams,
    },
}

impl StageModel {
    pub fn hamiltonian(&self) -> TimeDependentOperator {
        match self {
            StageModel::TwoLevel { controls, .. } => controls.hamiltonian(),
            StageModel::ThreeLevel { controls, .. } => controls.hamiltonian(),
        }
    }

    pub fn frame(&self) -> AncillaryFrame {
        match self {
            StageModel::TwoLevel { frame, .. } => two_level_frame(frame),
            StageModel::ThreeLevel { frame, .. } => three_level_frame(frame),
        }
    }

    /// Closed-form passage phase accumulated from the start of `grid`.
    pub fn phase(&self, passage: Passage, grid: &TimeGrid) -> Result<PhaseFunctional> {
        match (self, passage) {
            (StageModel::TwoLevel { controls, frame }, Passage::Ket) => phase_two_level(controls, frame, grid),
            (StageModel::TwoLevel { controls, frame }, Passage::Bra) => bra_phase_two_level(controls, frame, grid),
            (StageModel::ThreeLevel { controls, frame }, Passage::Ket) => phase_three_level(controls, frame, grid),
            (StageModel::ThreeLevel { controls, frame }, Passage::Bra) => bra_phase_three_level(controls, frame, grid),
        }
    }

    pub fn bra_relation(&self, grid: &TimeGrid) -> Result<f64> {
        match self {
            StageModel::TwoLevel { controls, frame } => bra_phase_relation_two_level(controls, frame, grid),
            StageModel::ThreeLevel { controls, frame } => bra_phase_relation_three_level(controls, frame, grid),
        }
    }

    pub fn with_omega_scaled(&self, factor: f64) -> Self {
        match self {
            StageModel::TwoLevel { controls, frame } => StageModel::TwoLevel {
                controls: controls.with_omega_scaled(factor),
                frame: frame.clone(),
            },
            StageModel::ThreeLevel { controls, frame } => StageModel::ThreeLevel {
                controls: controls.with_omega_scaled(factor),
                frame: frame.clone(),
            },
        }
    }
}

#[derive(Clone, Debug)]
pub struct StagePlan {
    pub label: String,
    pub start: f64,
    pub end: f64,
    pub model: StageModel,
    pub passage: Passage,
}

/// Expected populations at a grid time.
#[derive(Clone, Debug, PartialEq)]
pub struct Target {
    pub label: String,
    pub t: f64,
    pub populations: Vec<f64>,
}

/// Additional claims on the population traces.
#[derive(Clone, Debug, PartialEq)]
pub enum Transient {
    /// `|P_level(t) − value| ≤ tolerance`.
    Window {
        label: String,
        t: f64,
        level: usize,
        value: f64,
        tolerance: f64,
    },
    /// `max P_level < limit` on `[start, end]`.
    Ceiling {
        label: String,
        start: f64,
        end: f64,
        level: usize,
        limit: f64,
    },
}

/// A fully specified run: stages with their generators and frames, the
/// initial state, and the claims the run should satisfy.
#[derive(Clone, Debug)]
pub struct Protocol {
    pub scenario: String,
    pub period: f64,
    pub level_labels: Vec<&'static str>,
    pub initial: StateVector,
    pub stages: Vec<StagePlan>,
    /// Stages per repetition, for the loop-periodicity check; 0 if the run
    /// is not periodic.
    pub stages_per_loop: usize,
    pub targets: Vec<Target>,
    pub transients: Vec<Transient>,
    /// Claim that the total population drops below `1 − 10⁻³` somewhere.
    pub expect_norm_dip: bool,
}

impl Protocol {
    pub fn levels(&self) -> usize {
        self.level_labels.len()
    }

    pub fn start(&self) -> f64 {
        self.stages[0].start
    }

    pub fn end(&self) -> f64 {
        self.stages[self.stages.len() - 1].end
    }

    pub fn with_omega_scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        for stage in &mut out.stages {
            stage.model = stage.model.with_omega_scaled(factor);
        }
        out
    }
}
