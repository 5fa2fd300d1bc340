//! Flat `key = value` run-configuration files.
//!
//! The format is line based: `#` starts a comment, blank lines are
//! ignored, every other line must be `key = number`. Unknown and
//! duplicated keys are hard errors with line numbers. `dt` and `horizon`
//! are required; everything else falls back to the documented defaults.
//!
//! Recognized keys:
//!
//! ```text
//! dt, horizon, gravity,
//! ball.mass, ball.radius, ball.mu, ball.restitution,
//! biped.m_l, biped.m_t, biped.l, biped.c, biped.I, biped.kp, biped.kd,
//! foot.width, foot.height,
//! kick.torque, kick.trigger_distance,
//! sweep.start, sweep.end, sweep.step
//! ```

use std::collections::HashMap;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: expected 'key = value', got '{text}'")]
    Syntax { line: usize, text: String },
    #[error("line {line}: value of '{key}' is not a number: '{value}'")]
    BadNumber { line: usize, key: String, value: String },
    #[error("line {line}: unknown key '{key}'")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: duplicate key '{key}'")]
    DuplicateKey { line: usize, key: String },
    #[error("missing required key '{key}'")]
    MissingKey { key: &'static str },
    #[error("invalid config: {0}")]
    Invalid(String),
}

/// Ball body parameters; `mu` and `restitution` are the ball-ground pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallConfig {
    pub mass: f64,
    pub radius: f64,
    pub mu: f64,
    pub restitution: f64,
}

impl Default for BallConfig {
    fn default() -> Self {
        Self { mass: 0.04, radius: 0.2, mu: 0.2, restitution: 0.5 }
    }
}

/// Walker parameters. `leg_inertia` defaults to the uniform thin rod
/// about its centroid, `m_l l^2 / 12`, and the centroid to `l / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BipedConfig {
    pub leg_mass: f64,
    pub torso_mass: f64,
    pub leg_length: f64,
    pub leg_centroid: f64,
    pub leg_inertia: f64,
    pub kp: f64,
    pub kd: f64,
}

impl Default for BipedConfig {
    fn default() -> Self {
        Self {
            leg_mass: 0.5,
            torso_mass: 1.0,
            leg_length: 1.0,
            leg_centroid: 0.5,
            leg_inertia: 0.5 / 12.0,
            kp: 100.0,
            kd: 20.0,
        }
    }
}

/// Foot rectangle, full extents.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FootConfig {
    pub width: f64,
    pub height: f64,
}

impl Default for FootConfig {
    fn default() -> Self {
        Self { width: 0.2, height: 0.04 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KickConfig {
    pub torque: f64,
    pub trigger_distance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepConfig {
    pub start: f64,
    pub end: f64,
    pub step: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub dt: f64,
    pub horizon: f64,
    pub gravity: f64,
    pub ball: BallConfig,
    pub biped: BipedConfig,
    pub foot: FootConfig,
    pub kick: Option<KickConfig>,
    pub sweep: Option<SweepConfig>,
}

impl RunConfig {
    /// Documented defaults for everything except the required time grid.
    pub fn new(dt: f64, horizon: f64) -> Self {
        Self {
            dt,
            horizon,
            gravity: 9.81,
            ball: BallConfig::default(),
            biped: BipedConfig::default(),
            foot: FootConfig::default(),
            kick: None,
            sweep: None,
        }
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let err = |m: &str| Err(ConfigError::Invalid(m.into()));
        if self.dt <= 0.0 {
            return err("dt must be positive");
        }
        if self.horizon <= self.dt {
            return err("horizon must exceed dt");
        }
        if self.ball.mass <= 0.0 || self.ball.radius <= 0.0 {
            return err("ball.mass and ball.radius must be positive");
        }
        if self.ball.mu < 0.0 {
            return err("ball.mu must be nonnegative");
        }
        if !(0.0..=1.0).contains(&self.ball.restitution) {
            return err("ball.restitution must lie in [0, 1]");
        }
        let b = &self.biped;
        if b.leg_mass <= 0.0 || b.torso_mass <= 0.0 || b.leg_length <= 0.0 || b.leg_inertia <= 0.0 {
            return err("biped masses, length and inertia must be positive");
        }
        if b.leg_centroid <= 0.0 || b.leg_centroid >= b.leg_length {
            return err("biped.c must lie strictly between 0 and biped.l");
        }
        if b.kp <= 0.0 || b.kd <= 0.0 {
            return err("biped.kp and biped.kd must be positive");
        }
        if self.foot.width <= 0.0 || self.foot.height <= 0.0 {
            return err("foot dimensions must be positive");
        }
        if let Some(kick) = &self.kick {
            if kick.torque < 0.0 {
                return err("kick.torque must be nonnegative");
            }
            if kick.trigger_distance <= 0.0 {
                return err("kick.trigger_distance must be positive");
            }
        }
        if let Some(sweep) = &self.sweep {
            if sweep.step <= 0.0 {
                return err("sweep.step must be positive");
            }
            if sweep.start > sweep.end {
                return err("sweep.start must not exceed sweep.end");
            }
        }
        Ok(())
    }
}

const KNOWN_KEYS: &[&str] = &[
    "dt",
    "horizon",
    "gravity",
    "ball.mass",
    "ball.radius",
    "ball.mu",
    "ball.restitution",
    "biped.m_l",
    "biped.m_t",
    "biped.l",
    "biped.c",
    "biped.I",
    "biped.kp",
    "biped.kd",
    "foot.width",
    "foot.height",
    "kick.torque",
    "kick.trigger_distance",
    "sweep.start",
    "sweep.end",
    "sweep.step",
];

/// Default horizontal foot-ball distance that arms the kick swing.
pub const DEFAULT_TRIGGER_DISTANCE: f64 = 0.3;

/// Parses config text; see the module docs for the format.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut values: HashMap<&str, f64> = HashMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key_raw, value_raw)) = content.split_once('=') else {
            return Err(ConfigError::Syntax { line, text: content.to_string() });
        };
        let key = key_raw.trim();
        let value_text = value_raw.trim();
        let Some(&known) = KNOWN_KEYS.iter().find(|&&k| k == key) else {
            return Err(ConfigError::UnknownKey { line, key: key.to_string() });
        };
        let value: f64 = value_text.parse().map_err(|_| ConfigError::BadNumber {
            line,
            key: key.to_string(),
            value: value_text.to_string(),
        })?;
        if !value.is_finite() {
            return Err(ConfigError::BadNumber {
                line,
                key: key.to_string(),
                value: value_text.to_string(),
            });
        }
        if values.insert(known, value).is_some() {
            return Err(ConfigError::DuplicateKey { line, key: key.to_string() });
        }
    }

    let dt = *values.get("dt").ok_or(ConfigError::MissingKey { key: "dt" })?;
    let horizon = *values
        .get("horizon")
        .ok_or(ConfigError::MissingKey { key: "horizon" })?;

    let mut config = RunConfig::new(dt, horizon);
    if let Some(&g) = values.get("gravity") {
        config.gravity = g;
    }
    if let Some(&v) = values.get("ball.mass") {
        config.ball.mass = v;
    }
    if let Some(&v) = values.get("ball.radius") {
        config.ball.radius = v;
    }
    if let Some(&v) = values.get("ball.mu") {
        config.ball.mu = v;
    }
    if let Some(&v) = values.get("ball.restitution") {
        config.ball.restitution = v;
    }
    if let Some(&v) = values.get("biped.m_l") {
        config.biped.leg_mass = v;
        // Keep the derived-inertia default consistent with the new mass.
        if !values.contains_key("biped.I") {
            config.biped.leg_inertia = v * config.biped.leg_length * config.biped.leg_length / 12.0;
        }
    }
    if let Some(&v) = values.get("biped.m_t") {
        config.biped.torso_mass = v;
    }
    if let Some(&v) = values.get("biped.l") {
        config.biped.leg_length = v;
        if !values.contains_key("biped.c") {
            config.biped.leg_centroid = v / 2.0;
        }
        if !values.contains_key("biped.I") {
            config.biped.leg_inertia = config.biped.leg_mass * v * v / 12.0;
        }
    }
    if let Some(&v) = values.get("biped.c") {
        config.biped.leg_centroid = v;
    }
    if let Some(&v) = values.get("biped.I") {
        config.biped.leg_inertia = v;
    }
    if let Some(&v) = values.get("biped.kp") {
        config.biped.kp = v;
    }
    if let Some(&v) = values.get("biped.kd") {
        config.biped.kd = v;
    }
    if let Some(&v) = values.get("foot.width") {
        config.foot.width = v;
    }
    if let Some(&v) = values.get("foot.height") {
        config.foot.height = v;
    }
    if let Some(&torque) = values.get("kick.torque") {
        config.kick = Some(KickConfig {
            torque,
            trigger_distance: values
                .get("kick.trigger_distance")
                .copied()
                .unwrap_or(DEFAULT_TRIGGER_DISTANCE),
        });
    } else if values.contains_key("kick.trigger_distance") {
        return Err(ConfigError::Invalid(
            "kick.trigger_distance given without kick.torque".into(),
        ));
    }
    let sweep_keys = ["sweep.start", "sweep.end", "sweep.step"];
    if sweep_keys.iter().any(|k| values.contains_key(*k)) {
        let need = |key: &'static str| {
            values
                .get(key)
                .copied()
                .ok_or(ConfigError::MissingKey { key })
        };
        config.sweep = Some(SweepConfig {
            start: need("sweep.start")?,
            end: need("sweep.end")?,
            step: need("sweep.step")?,
        });
    }

    config.validate()?;
    Ok(config)
}

/// Reads and parses a config file.
pub fn load_config(path: &Path) -> Result<RunConfig, ConfigError> {
    parse_config(&std::fs::read_to_string(path)?)
}
