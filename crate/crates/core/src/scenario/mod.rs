//! End-to-end scenarios: a name-keyed registry of [`Scenario`] builders, the
//! runner that simulates and audits a [`Protocol`], and CSV/SVG export.

mod builtin;
mod config;
mod export;
mod protocol;
mod runner;

use std::collections::BTreeMap;
use std::sync::Arc;

pub use builtin::{CustomTwoLevel, CyclicTransfer, TwoLevelTransfer};
pub use config::{ScenarioConfig, DEFAULT_STEPS_PER_PERIOD};
pub use export::{csv_string, export_csv, export_svg, svg_string};
pub use protocol::{Protocol, StageModel, StagePlan, Target, Transient};
pub use runner::{
    execute, simulate, Check, Checkpoint, Relation, Residuals, RunReport, CONVERGENCE_TOLERANCE, DYSON_MIN_ORDER,
    NORM_DIP, PHASE_RELATION_TOLERANCE, RESIDUAL_TOLERANCE,
};

use crate::error::{Error, Result};
use crate::synthesis::Direction;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    TwoLevel,
    Cyclic,
}

/// A named recipe that turns a configuration into a runnable [`Protocol`].
pub trait Scenario: Send + Sync {
    fn id(&self) -> &str;
    fn summary(&self) -> &str;
    fn family(&self) -> Family;
    fn build(&self, cfg: &ScenarioConfig) -> Result<Protocol>;
}

#[derive(Clone, Default)]
pub struct ScenarioRegistry {
    entries: BTreeMap<String, Arc<dyn Scenario>>,
}

impl ScenarioRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// `two_level_a` … `two_level_d`, `cyclic_cw`, `cyclic_ccw`, `custom`.
    pub fn with_builtins() -> Self {
        let mut r = Self::new();
        for v in ['a', 'b', 'c', 'd'] {
            r.register(Arc::new(TwoLevelTransfer::new(v))).expect("unique id");
        }
        r.register(Arc::new(CyclicTransfer::new(Direction::Clockwise))).expect("unique id");
        r.register(Arc::new(CyclicTransfer::new(Direction::Counterclockwise))).expect("unique id");
        r.register(Arc::new(CustomTwoLevel)).expect("unique id");
        r
    }

    pub fn register(&mut self, scenario: Arc<dyn Scenario>) -> Result<()> {
        let id = scenario.id().to_string();
        if self.entries.contains_key(&id) {
            return Err(Error::Config(format!("scenario `{id}` is already registered")));
        }
        self.entries.insert(id, scenario);
        Ok(())
    }

    pub fn get(&self, id: &str) -> Result<Arc<dyn Scenario>> {
        self.entries
            .get(id)
            .cloned()
            .ok_or_else(|| Error::UnknownScenario(id.to_string()))
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn build(&self, cfg: &ScenarioConfig) -> Result<Protocol> {
        cfg.validate()?;
        self.get(&cfg.scenario)?.build(cfg)
    }
}

fn run_family(registry: &ScenarioRegistry, cfg: &ScenarioConfig, family: Family) -> Result<RunReport> {
    let scenario = registry.get(&cfg.scenario)?;
    if scenario.family() != family {
        return Err(Error::Config(format!(
            "scenario `{}` is not a {} scenario",
            cfg.scenario,
            match family {
                Family::TwoLevel => "two-level",
                Family::Cyclic => "cyclic",
            }
        )));
    }
    let report = execute(&registry.build(cfg)?, cfg)?;
    let deviation = report.residuals.convergence;
    if deviation > CONVERGENCE_TOLERANCE {
        return Err(Error::StepSize {
            deviation,
            tolerance: CONVERGENCE_TOLERANCE,
        });
    }
    Ok(report)
}

/// Runs one of the two-level transfers (or `custom`). Fails when the `dt/2`
/// re-run moves any population by more than [`CONVERGENCE_TOLERANCE`].
pub fn run_two_level(registry: &ScenarioRegistry, cfg: &ScenarioConfig) -> Result<RunReport> {
    run_family(registry, cfg, Family::TwoLevel)
}

/// Runs a cyclic three-level transfer; same convergence contract as
/// [`run_two_level`].
pub fn run_cyclic(registry: &ScenarioRegistry, cfg: &ScenarioConfig) -> Result<RunReport> {
    run_family(registry, cfg, Family::Cyclic)
}

/// Runs any scenario plus the extended residual suite. Numerical failures
/// become failed checks; only configuration and synthesis problems are
/// returned as errors.
pub fn verify(registry: &ScenarioRegistry, cfg: &ScenarioConfig) -> Result<RunReport> {
    let scenario = registry.get(&cfg.scenario)?;
    let protocol = registry.build(cfg)?;
    let hermitian = scenario.build(&ScenarioConfig {
        gamma_scale: 0.0,
        ..cfg.clone()
    })?;
    let mut report = execute(&protocol, cfg)?;
    runner::extend_verification(&mut report, &protocol, &hermitian, cfg)?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_lists_builtins_and_rejects_duplicates() {
        let mut r = ScenarioRegistry::with_builtins();
        let ids: Vec<_> = r.ids().collect();
        assert_eq!(
            ids,
            vec!["custom", "cyclic_ccw", "cyclic_cw", "two_level_a", "two_level_b", "two_level_c", "two_level_d"]
        );
        assert!(r.register(Arc::new(CustomTwoLevel)).is_err());
        assert!(matches!(r.get("nope"), Err(Error::UnknownScenario(_))));
    }

    #[test]
    fn family_mismatch_is_a_config_error() {
        let r = ScenarioRegistry::with_builtins();
        let cfg = ScenarioConfig::for_scenario("cyclic_cw");
        assert!(matches!(run_two_level(&r, &cfg), Err(Error::Config(_))));
    }
}
