//! Command entry points behind the thin `contact2d` binary, plus the CSV
//! emitters. Three commands share one config format:
//!
//! * `simulate <config>` — run the configured scenario (kick scenario
//!   when `kick.torque` is set, otherwise a drop test) and write
//!   `trajectory.csv`.
//! * `sweep <config>` — rerun the kick scenario across the configured
//!   torque range, write `sweep.csv` and print the summary table with
//!   deviations from the reference velocities.
//! * `drop-test <config>` — force the drop scenario and print a bounce
//!   summary next to `trajectory.csv`.
//!
//! Output lands in the working directory unless `CONTACT2D_OUT_DIR`
//! (or `--out-dir`) overrides it.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use nalgebra::Vector2;
use thiserror::Error;

use crate::biped::{BipedModel, ControllerGains, JointState};
use crate::collision::Shape;
use crate::config::{load_config, ConfigError, RunConfig};
use crate::contact::MaterialParams;
use crate::dynamics::BodyState;
use crate::sim::{
    self, measure_post_kick_velocity, BipedSetup, BodySetup, GaitParams, IntegrationMode,
    KickSetup, Scenario, SimError, TrajectoryLog, DEFAULT_CONTACT_THRESHOLD,
};

/// Environment variable overriding the output directory.
pub const OUT_DIR_ENV: &str = "CONTACT2D_OUT_DIR";

/// Reference post-kick velocities (torque, vx, vy) the sweep report
/// prints deviations against.
pub const REFERENCE_VELOCITIES: [(f64, f64, f64); 8] = [
    (30.0, 7.29, 1.78),
    (40.0, 9.71, 2.38),
    (50.0, 12.14, 2.97),
    (60.0, 14.57, 3.57),
    (70.0, 17.00, 4.16),
    (80.0, 19.43, 4.75),
    (90.0, 21.86, 5.35),
    (100.0, 24.28, 5.94),
];

/// Height the drop scenario releases the ball's lowest point from.
pub const DROP_HEIGHT: f64 = 1.0;

/// Kick-scenario layout: the ball rests at the origin and the walker
/// starts anchored behind it, first taking a gait swing toward the
/// trigger distance. |x| beyond the arena half-width ends the run.
const KICK_BALL_X: f64 = 0.0;
const KICK_ANCHOR_X: f64 = -0.85;
const KICK_THETA1: f64 = -0.05;
const KICK_THETA1_RATE: f64 = 0.6;
const ARENA_HALF_WIDTH: f64 = 2.5;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    /// 1 for config/usage/io problems, 2 for solver failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) | CliError::Usage(_) => 1,
            CliError::Sim(_) => 2,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CliOptions {
    pub strict_paper: bool,
    pub out_dir: PathBuf,
}

impl Default for CliOptions {
    fn default() -> Self {
        Self {
            strict_paper: false,
            out_dir: std::env::var_os(OUT_DIR_ENV)
                .map(PathBuf::from)
                .unwrap_or_else(|| PathBuf::from(".")),
        }
    }
}

fn integration(strict: bool) -> IntegrationMode {
    if strict {
        IntegrationMode::Explicit
    } else {
        IntegrationMode::SemiImplicit
    }
}

fn ball_setup(config: &RunConfig, state: BodyState) -> BodySetup {
    BodySetup::ball(
        config.ball.mass,
        config.ball.radius,
        MaterialParams::new(config.ball.mu, config.ball.restitution),
        state,
    )
}

/// Ball released with its lowest point [`DROP_HEIGHT`] above the ground.
pub fn drop_scenario(config: &RunConfig, strict: bool) -> Scenario {
    Scenario {
        dt: config.dt,
        horizon: config.horizon,
        gravity: config.gravity,
        integration: integration(strict),
        contact_threshold: DEFAULT_CONTACT_THRESHOLD,
        arena_half_width: f64::INFINITY,
        ground: Shape::ground(),
        bodies: vec![ball_setup(
            config,
            BodyState::at_rest(0.0, DROP_HEIGHT + config.ball.radius),
        )],
        biped: None,
        kick: None,
    }
}

/// Walker-and-ball scenario: the walker strides toward the resting ball
/// and kicks it with the given torque.
pub fn kick_scenario(config: &RunConfig, torque: f64, strict: bool) -> Scenario {
    let b = &config.biped;
    let model = BipedModel::new(
        b.leg_mass,
        b.torso_mass,
        b.leg_length,
        b.leg_centroid,
        b.leg_inertia,
        Shape::rectangle(config.foot.width / 2.0, config.foot.height / 2.0),
    );
    let gait = GaitParams::default();
    let joints = JointState::new(
        Vector2::new(KICK_THETA1, gait.step_angle),
        Vector2::new(KICK_THETA1_RATE, 0.0),
    );
    let trigger = config
        .kick
        .map(|k| k.trigger_distance)
        .unwrap_or(crate::config::DEFAULT_TRIGGER_DISTANCE);
    Scenario {
        dt: config.dt,
        horizon: config.horizon,
        gravity: config.gravity,
        integration: integration(strict),
        contact_threshold: DEFAULT_CONTACT_THRESHOLD,
        arena_half_width: ARENA_HALF_WIDTH,
        ground: Shape::ground(),
        bodies: vec![ball_setup(
            config,
            BodyState::at_rest(KICK_BALL_X, config.ball.radius),
        )],
        biped: Some(BipedSetup {
            model,
            joints,
            gains: ControllerGains::new(b.kp, b.kd),
            anchor: Vector2::new(KICK_ANCHOR_X, 0.0),
            gait,
        }),
        kick: Some(KickSetup::new(torque, trigger)),
    }
}

/// Kick scenario when `kick.torque` is configured, drop test otherwise.
pub fn scenario_from_config(config: &RunConfig, strict: bool) -> Scenario {
    match &config.kick {
        Some(kick) => kick_scenario(config, kick.torque, strict),
        None => drop_scenario(config, strict),
    }
}

/// Trajectory CSV: `t,body,x,y,theta,vx,vy,omega,contacts`, one row per
/// body per logged step, numbers in full-precision decimal.
pub fn write_trajectory_csv(log: &TrajectoryLog, path: &Path) -> Result<(), CliError> {
    let mut out = String::new();
    out.push_str("t,body,x,y,theta,vx,vy,omega,contacts\n");
    for row in &log.rows {
        for (name, sample) in log.body_names.iter().zip(&row.bodies) {
            let q = sample.state.q;
            let v = sample.state.v;
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                row.t, name, q.x, q.y, q.z, v.x, v.y, v.z, sample.contacts
            )
            .expect("string write");
        }
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// The torque grid of a sweep: start, start+step, ..., up to end.
pub fn sweep_torques(sweep: &crate::config::SweepConfig) -> Vec<f64> {
    let n = ((sweep.end - sweep.start) / sweep.step + 1e-9).floor() as usize;
    (0..=n).map(|i| sweep.start + i as f64 * sweep.step).collect()
}

/// Runs `simulate <config>`: writes `trajectory.csv` into the output
/// directory and returns its path.
pub fn cmd_simulate(config_path: &Path, options: &CliOptions) -> Result<PathBuf, CliError> {
    let config = load_config(config_path)?;
    let scenario = scenario_from_config(&config, options.strict_paper);
    let log = sim::run(scenario)?;
    let path = options.out_dir.join("trajectory.csv");
    write_trajectory_csv(&log, &path)?;
    println!(
        "wrote {} ({} steps, {} bodies)",
        path.display(),
        log.rows.len().saturating_sub(1),
        log.body_names.len()
    );
    Ok(path)
}

/// Runs `drop-test <config>`: forces the drop scenario, writes
/// `trajectory.csv` and prints the measured bounce.
pub fn cmd_drop_test(config_path: &Path, options: &CliOptions) -> Result<PathBuf, CliError> {
    let config = load_config(config_path)?;
    let scenario = drop_scenario(&config, options.strict_paper);
    let log = sim::run(scenario)?;
    let path = options.out_dir.join("trajectory.csv");
    write_trajectory_csv(&log, &path)?;

    if let Some(bounce) = log.rows.iter().position(|r| r.bodies[0].contacts > 0) {
        let incoming = -log.rows[bounce - 1].bodies[0].state.v.y;
        let outgoing = log.rows[bounce].bodies[0].state.v.y;
        let apex = log.rows[bounce..]
            .iter()
            .map(|r| r.bodies[0].state.q.y - config.ball.radius)
            .fold(f64::MIN, f64::max);
        println!("drop from {DROP_HEIGHT} m:");
        println!("  impact speed      {incoming:.4} m/s");
        println!("  rebound speed     {outgoing:.4} m/s");
        println!("  speed ratio       {:.4}", outgoing / incoming);
        println!("  rebound apex      {apex:.4} m");
    } else {
        println!("no ground contact within the horizon");
    }
    println!("wrote {}", path.display());
    Ok(path)
}

/// One sweep entry: torque plus measured velocities (None when no kick
/// happened within the horizon).
#[derive(Debug, Clone, Copy)]
pub struct SweepRow {
    pub torque: f64,
    pub velocity: Option<(f64, f64)>,
}

/// Runs the kick scenario per torque (entries in parallel, output in
/// torque order) and returns the measured rows.
pub fn run_sweep(config: &RunConfig, strict: bool) -> Result<Vec<SweepRow>, CliError> {
    let sweep = config
        .sweep
        .ok_or(ConfigError::MissingKey { key: "sweep.start" })?;
    let torques = sweep_torques(&sweep);

    let results: Vec<Result<(f64, f64), SimError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = torques
            .iter()
            .map(|&torque| {
                scope.spawn(move || {
                    let log = sim::run(kick_scenario(config, torque, strict))?;
                    measure_post_kick_velocity(&log)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("sweep thread")).collect()
    });

    let mut rows = Vec::with_capacity(torques.len());
    for (torque, result) in torques.into_iter().zip(results) {
        match result {
            Ok(v) => rows.push(SweepRow { torque, velocity: Some(v) }),
            Err(SimError::NoKickDetected) => rows.push(SweepRow { torque, velocity: None }),
            Err(other) => return Err(other.into()),
        }
    }
    Ok(rows)
}

/// Runs `sweep <config>`: writes `sweep.csv`, prints the table plus the
/// deviation report against the reference velocities. Rows without a
/// detected kick leave the velocity fields empty and make the command
/// fail after writing.
pub fn cmd_sweep(config_path: &Path, options: &CliOptions) -> Result<PathBuf, CliError> {
    let config = load_config(config_path)?;
    let rows = run_sweep(&config, options.strict_paper)?;

    let path = options.out_dir.join("sweep.csv");
    let mut csv = String::from("tau_Nm,vx_ms,vy_ms\n");
    for row in &rows {
        match row.velocity {
            Some((vx, vy)) => writeln!(csv, "{},{},{}", row.torque, vx, vy).expect("string write"),
            None => writeln!(csv, "{},,", row.torque).expect("string write"),
        }
    }
    std::fs::write(&path, &csv)?;

    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    writeln!(out, "{:>8}  {:>10}  {:>10}  {:>8}", "tau_Nm", "vx_ms", "vy_ms", "vy/vx")?;
    for row in &rows {
        match row.velocity {
            Some((vx, vy)) => writeln!(
                out,
                "{:>8.1}  {:>10.4}  {:>10.4}  {:>8.4}",
                row.torque,
                vx,
                vy,
                vy / vx
            )?,
            None => writeln!(out, "{:>8.1}  {:>10}  {:>10}  {:>8}", row.torque, "-", "-", "-")?,
        }
    }

    // Deviation report against the reference velocities, where torques
    // coincide with the reference grid.
    let mut header_printed = false;
    for row in &rows {
        let Some((vx, vy)) = row.velocity else { continue };
        if let Some(&(_, rx, ry)) = REFERENCE_VELOCITIES
            .iter()
            .find(|(t, _, _)| (t - row.torque).abs() < 1e-9)
        {
            if !header_printed {
                writeln!(out, "\ndeviation from reference velocities:")?;
                header_printed = true;
            }
            writeln!(
                out,
                "{:>8.1}  vx {:+7.2}%  vy {:+7.2}%",
                row.torque,
                100.0 * (vx - rx) / rx,
                100.0 * (vy - ry) / ry
            )?;
        }
    }

    println!("wrote {}", path.display());
    if rows.iter().any(|r| r.velocity.is_none()) {
        return Err(SimError::NoKickDetected.into());
    }
    Ok(path)
}
