use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::frame::Passage;

/// Run configuration. Read from a `key = value` file (`#` starts a comment)
/// and/or set field by field from the command line.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: String,
    /// Half-duration `T` of each stage; stages last `2T`.
    pub period: f64,
    /// Integration step; `None` means `T/2000`.
    pub dt: Option<f64>,
    pub loops: usize,
    /// Multiplies the gain/loss rates of the built-in scenarios.
    pub gamma_scale: f64,
    /// Multiplies the synthesized Rabi frequency after synthesis; anything
    /// other than 1 breaks the triangularization on purpose.
    pub omega_scale: f64,
    /// Absolute tolerance for end-to-end population claims.
    pub tolerance: f64,
    pub csv: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    /// `custom` scenario: linear θ ramp over `[0, 2T]`.
    pub theta_start: f64,
    pub theta_end: f64,
    pub passage: Passage,
}

pub const DEFAULT_STEPS_PER_PERIOD: f64 = 2000.0;

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            scenario: "two_level_a".into(),
            period: 1.0,
            dt: None,
            loops: 1,
            gamma_scale: 1.0,
            omega_scale: 1.0,
            tolerance: 1e-6,
            csv: None,
            svg: None,
            theta_start: 0.0,
            theta_end: -std::f64::consts::FRAC_PI_2,
            passage: Passage::Ket,
        }
    }
}

impl ScenarioConfig {
    pub fn for_scenario(id: &str) -> Self {
        Self {
            scenario: id.into(),
            ..Self::default()
        }
    }

    pub fn dt(&self) -> f64 {
        self.dt.unwrap_or(self.period / DEFAULT_STEPS_PER_PERIOD)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::default();
        cfg.apply_text(&text)?;
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        cfg.apply_text(text)?;
        Ok(cfg)
    }

    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", n + 1)))?;
            self.set(key.trim(), value.trim())
                .map_err(|e| Error::Config(format!("line {}: {e}", n + 1)))?;
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "scenario" => self.scenario = value.to_string(),
            "T" | "period" => self.period = number(key, value)?,
            "dt" => self.dt = Some(number(key, value)?),
            "loops" => {
                self.loops = value
                    .parse()
                    .map_err(|_| Error::Config(format!("loops: `{value}` is not a positive integer")))?
            }
            "gamma_scale" => self.gamma_scale = number(key, value)?,
            "omega_scale" => self.omega_scale = number(key, value)?,
            "tolerance" => self.tolerance = number(key, value)?,
            "csv" => self.csv = Some(PathBuf::from(value)),
            "svg" => self.svg = Some(PathBuf::from(value)),
            "theta_start" => self.theta_start = number(key, value)?,
            "theta_end" => self.theta_end = number(key, value)?,
            "passage" => {
                self.passage = match value {
                    "ket" => Passage::Ket,
                    "bra" => Passage::Bra,
                    _ => return Err(Error::Config(format!("passage: `{value}` is not ket or bra"))),
                }
            }
            _ => return Err(Error::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.period > 0.0 && self.period.is_finite()) {
            return Err(Error::Config(format!("T must be positive, got {}", self.period)));
        }
        let dt = self.dt();
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::Config(format!("dt must be positive, got {dt}")));
        }
        let steps = 2.0 * self.period / dt;
        if (steps - steps.round()).abs() > 1e-6 {
            return Err(Error::Config(format!("dt = {dt} does not divide the stage length 2T")));
        }
        if self.loops < 1 {
            return Err(Error::Config("loops must be at least 1".into()));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::Config("tolerance must be positive".into()));
        }
        for (name, v) in [("gamma_scale", self.gamma_scale), ("omega_scale", self.omega_scale)] {
            if !v.is_finite() {
                return Err(Error::Config(format!("{name} must be finite")));
            }
        }
        Ok(())
    }
}

fn number(key: &str, value: &str) -> Result<f64> {
    value
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::Config(format!("{key}: `{value}` is not a number")))
}
