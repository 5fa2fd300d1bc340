//! Outer time-stepping loop: per step, detect contacts for every body,
//! branch each body into either impulse resolution or free flight,
//! advance the walker's controller, and log the trajectory.
//!
//! Free bodies interact with the ground and with the walker's swing
//! foot (which acts as a kinematically driven obstacle); body-body
//! contacts between free bodies are not part of any scenario here.

use nalgebra::{Vector2, Vector3};
use thiserror::Error;

use crate::biped::{
    self, bias_forces, mass_matrix, pfl_torque, BipedModel, ControllerGains, JointReference,
    JointState,
};
use crate::collision::{check_collision, contact_candidates, CollisionError, ContactFrame, Shape};
use crate::contact::{resolve_step, ContactError, MaterialParams};
use crate::dynamics::{generalized_forces, step_free, step_free_explicit, BodyState, InertialProps};

/// Base contact-activation distance. The simulator widens it per frame by
/// one step of closing motion so fast impacts are resolved before they
/// penetrate.
pub const DEFAULT_CONTACT_THRESHOLD: f64 = 1e-4;

/// Foot-ground pairing: plastic, high friction.
pub const FOOT_GROUND_MATERIAL: MaterialParams = MaterialParams { mu: 0.8, restitution: 0.0 };

/// Foot-ball pairing used when the swing foot meets a ball outside the
/// scripted kick.
pub const FOOT_BALL_MATERIAL: MaterialParams = MaterialParams { mu: 0.1, restitution: 0.7 };

/// Default hip swing rate while the kick reference is active, rad/s.
pub const DEFAULT_KICK_SWING_RATE: f64 = 7.0;

/// Heel strikes are ignored for this long after a stance exchange.
const MIN_STANCE_TIME: f64 = 0.1;

/// Position-update flavor; `Explicit` integrates positions with the
/// pre-step velocity and matches the `--strict-paper` frontend flag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IntegrationMode {
    #[default]
    SemiImplicit,
    Explicit,
}

/// One free rigid body plus its material against the ground.
#[derive(Debug, Clone)]
pub struct BodySetup {
    pub name: String,
    pub shape: Shape,
    pub props: InertialProps,
    pub state: BodyState,
    pub material: MaterialParams,
}

impl BodySetup {
    pub fn ball(mass: f64, radius: f64, material: MaterialParams, state: BodyState) -> Self {
        Self {
            name: "ball".into(),
            shape: Shape::circle(radius),
            props: InertialProps::uniform_disc(mass, radius),
            state,
            material,
        }
    }
}

/// Sinusoidal swing reference of the walking gait.
#[derive(Debug, Clone, Copy)]
pub struct GaitParams {
    /// Hip amplitude: the reference runs from +step_angle to -step_angle.
    pub step_angle: f64,
    /// Duration of one swing, s.
    pub swing_duration: f64,
}

impl Default for GaitParams {
    fn default() -> Self {
        Self { step_angle: 0.35, swing_duration: 0.6 }
    }
}

/// Walker plus controller, anchored at `anchor` by its stance foot.
#[derive(Debug, Clone)]
pub struct BipedSetup {
    pub model: BipedModel,
    pub joints: JointState,
    pub gains: ControllerGains,
    pub anchor: Vector2<f64>,
    pub gait: GaitParams,
}

/// Scripted kick: once the swing foot comes within `trigger_distance`
/// of the kick target (horizontally), the hip reference switches to a
/// swing-through at `swing_rate` and the foot delivers a push of
/// `torque / leg_length` through the first foot-ball contact.
#[derive(Debug, Clone, Copy)]
pub struct KickSetup {
    pub torque: f64,
    pub trigger_distance: f64,
    pub swing_rate: f64,
}

impl KickSetup {
    pub fn new(torque: f64, trigger_distance: f64) -> Self {
        Self {
            torque,
            trigger_distance,
            swing_rate: DEFAULT_KICK_SWING_RATE,
        }
    }
}

/// Everything one run needs. The kick targets the first circular body.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub dt: f64,
    pub horizon: f64,
    pub gravity: f64,
    pub integration: IntegrationMode,
    pub contact_threshold: f64,
    /// Runs end early once a circular body travels beyond this |x|.
    pub arena_half_width: f64,
    pub ground: Shape,
    pub bodies: Vec<BodySetup>,
    pub biped: Option<BipedSetup>,
    pub kick: Option<KickSetup>,
}

impl Scenario {
    fn validate(&self) {
        assert!(self.dt > 0.0, "dt must be positive");
        assert!(self.horizon > self.dt, "horizon must exceed dt");
        assert!(self.contact_threshold >= 0.0);
    }

    fn kick_target(&self) -> Option<usize> {
        self.bodies.iter().position(|b| matches!(b.shape, Shape::Circle { .. }))
    }
}

/// Per-body sample of one logged step.
#[derive(Debug, Clone, Copy)]
pub struct BodySample {
    pub state: BodyState,
    /// Active contacts resolved for this body during the step.
    pub contacts: usize,
    /// Total normal impulse (N·s) applied during the step.
    pub normal_impulse: f64,
}

/// One logged step: uniform time grid, all bodies, controller torque and
/// the kick impulse delivered during the step (zero otherwise).
#[derive(Debug, Clone)]
pub struct LogRow {
    pub t: f64,
    pub bodies: Vec<BodySample>,
    pub torque: f64,
    pub kick_impulse: f64,
}

#[derive(Debug, Clone)]
pub struct TrajectoryLog {
    pub dt: f64,
    pub body_names: Vec<String>,
    pub kick_target: Option<usize>,
    pub rows: Vec<LogRow>,
}

impl TrajectoryLog {
    pub fn body_index(&self, name: &str) -> Option<usize> {
        self.body_names.iter().position(|n| n == name)
    }
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error("contact solve failed at step {step} on body '{body}': {source}")]
    Solver {
        step: usize,
        body: String,
        source: ContactError,
    },
    #[error("collision query failed on body '{body}': {source}")]
    Collision {
        body: String,
        source: CollisionError,
    },
    #[error("no foot-ball impulse occurred in the log")]
    NoKickDetected,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum KickPhase {
    Inactive,
    Armed,
    Swinging { start_angle: f64, start_time: f64 },
    Delivered { hold_angle: f64 },
}

struct BipedRuntime {
    setup: BipedSetup,
    joints: JointState,
    anchor: Vector2<f64>,
    phase_time: f64,
    kick: KickPhase,
    kick_swing_rate: f64,
}

impl BipedRuntime {
    /// Swing-foot rectangle pose and velocity as a contact obstacle. The
    /// foot stays level; its center rides half a foot height above the
    /// leg tip so the sole touches the ground when the tip does. Right
    /// after a stance exchange the trailing foot can scuff, so the pose
    /// is clamped to slide on the surface instead of poking through it.
    fn foot_obstacle(&self) -> (Shape, BodyState) {
        let tip = biped::swing_foot_position(&self.setup.model, self.anchor, &self.joints);
        let vel = biped::swing_foot_velocity(&self.setup.model, &self.joints);
        let half_height = match self.setup.model.foot {
            Shape::Rectangle { half_height, .. } => half_height,
            _ => 0.0,
        };
        let state = BodyState::new(
            Vector3::new(tip.x, tip.y.max(0.0) + half_height, 0.0),
            Vector3::new(vel.x, vel.y, 0.0),
        );
        (self.setup.model.foot, state)
    }

    fn reference(&self, t: f64) -> JointReference {
        match self.kick {
            KickPhase::Swinging { start_angle, start_time } => JointReference {
                angle: start_angle - self.kick_swing_rate * (t - start_time),
                rate: -self.kick_swing_rate,
                accel: 0.0,
            },
            KickPhase::Delivered { hold_angle } => JointReference {
                angle: hold_angle,
                rate: 0.0,
                accel: 0.0,
            },
            _ => {
                let amp = self.setup.gait.step_angle;
                let period = self.setup.gait.swing_duration;
                if self.phase_time >= period {
                    JointReference { angle: -amp, rate: 0.0, accel: 0.0 }
                } else {
                    let omega = std::f64::consts::PI / period;
                    let phase = omega * self.phase_time;
                    JointReference {
                        angle: amp * phase.cos(),
                        rate: -amp * omega * phase.sin(),
                        accel: -amp * omega * omega * phase.cos(),
                    }
                }
            }
        }
    }
}

/// A running simulation; drive it with [`Simulation::step`] or use
/// [`run`] for the whole horizon.
pub struct Simulation {
    scenario: Scenario,
    bodies: Vec<BodyState>,
    biped: Option<BipedRuntime>,
    kick_target: Option<usize>,
    step_index: usize,
    finished: bool,
    log: TrajectoryLog,
}

impl Simulation {
    pub fn new(scenario: Scenario) -> Self {
        scenario.validate();
        let kick_target = if scenario.kick.is_some() { scenario.kick_target() } else { None };
        let bodies: Vec<BodyState> = scenario.bodies.iter().map(|b| b.state).collect();
        let biped = scenario.biped.clone().map(|setup| BipedRuntime {
            joints: setup.joints,
            anchor: setup.anchor,
            phase_time: 0.0,
            kick: if scenario.kick.is_some() { KickPhase::Armed } else { KickPhase::Inactive },
            kick_swing_rate: scenario
                .kick
                .map(|k| k.swing_rate)
                .unwrap_or(DEFAULT_KICK_SWING_RATE),
            setup,
        });

        let mut body_names: Vec<String> = scenario.bodies.iter().map(|b| b.name.clone()).collect();
        if biped.is_some() {
            body_names.push("foot".into());
        }
        let log = TrajectoryLog {
            dt: scenario.dt,
            body_names,
            kick_target,
            rows: Vec::new(),
        };

        let mut sim = Self {
            scenario,
            bodies,
            biped,
            kick_target,
            step_index: 0,
            finished: false,
            log,
        };
        let initial = sim.sample_row(0.0, 0.0, false, &[]);
        sim.log.rows.push(initial);
        sim
    }

    pub fn time(&self) -> f64 {
        self.step_index as f64 * self.scenario.dt
    }

    pub fn log(&self) -> &TrajectoryLog {
        &self.log
    }

    pub fn into_log(self) -> TrajectoryLog {
        self.log
    }

    pub fn finished(&self) -> bool {
        self.finished
    }

    fn sample_row(
        &self,
        torque: f64,
        kick_impulse: f64,
        heel_strike: bool,
        per_body: &[(usize, f64)],
    ) -> LogRow {
        let mut samples: Vec<BodySample> = self
            .bodies
            .iter()
            .enumerate()
            .map(|(i, state)| BodySample {
                state: *state,
                contacts: per_body.get(i).map_or(0, |c| c.0),
                normal_impulse: per_body.get(i).map_or(0.0, |c| c.1),
            })
            .collect();
        if let Some(biped) = &self.biped {
            let (_, foot_state) = biped.foot_obstacle();
            // Heel strikes are kinematic (plastic landing), so the foot
            // row records the contact without an impulse magnitude.
            samples.push(BodySample {
                state: foot_state,
                contacts: usize::from(heel_strike || kick_impulse > 0.0),
                normal_impulse: 0.0,
            });
        }
        LogRow {
            t: self.time(),
            bodies: samples,
            torque,
            kick_impulse,
        }
    }

    /// Advances the world by one step. Exactly one of impulse resolution
    /// and free stepping runs per body.
    pub fn step(&mut self) -> Result<(), SimError> {
        let dt = self.scenario.dt;
        let gravity = self.scenario.gravity;
        let base_threshold = self.scenario.contact_threshold;
        let explicit = self.scenario.integration == IntegrationMode::Explicit;
        let ground_state = BodyState::at_rest(0.0, 0.0);
        let t = self.time();

        // Swing-foot obstacle as of the start of the step.
        let foot = self.biped.as_ref().map(|b| b.foot_obstacle());

        // Arm-to-swing transition: horizontal foot-target distance.
        if let (Some(biped), Some(kick), Some(target)) =
            (self.biped.as_mut(), self.scenario.kick, self.kick_target)
        {
            if biped.kick == KickPhase::Armed {
                let (_, foot_state) = biped.foot_obstacle();
                let distance = (foot_state.q.x - self.bodies[target].q.x).abs();
                if distance < kick.trigger_distance {
                    biped.kick = KickPhase::Swinging {
                        start_angle: biped.joints.angles.y,
                        start_time: t,
                    };
                }
            }
        }

        let swinging = matches!(
            self.biped.as_ref().map(|b| b.kick),
            Some(KickPhase::Swinging { .. })
        );

        let mut kick_impulse = 0.0f64;
        let mut per_body: Vec<(usize, f64)> = Vec::with_capacity(self.bodies.len());

        for i in 0..self.bodies.len() {
            let setup = &self.scenario.bodies[i];
            let state = self.bodies[i];

            // Candidate frames: ground always, swing foot for circles.
            let mut frames: Vec<(ContactFrame, MaterialParams, bool)> = Vec::new();
            let ground_frames =
                contact_candidates(&setup.shape, &state, &self.scenario.ground, &ground_state)
                    .map_err(|source| SimError::Collision { body: setup.name.clone(), source })?;
            frames.extend(ground_frames.into_iter().map(|f| (f, setup.material, false)));
            if let Some((foot_shape, foot_state)) = &foot {
                if matches!(setup.shape, Shape::Circle { .. }) {
                    let foot_frames = contact_candidates(&setup.shape, &state, foot_shape, foot_state)
                        .map_err(|source| SimError::Collision { body: setup.name.clone(), source })?;
                    frames.extend(foot_frames.into_iter().map(|f| (f, FOOT_BALL_MATERIAL, true)));
                }
            }

            // Velocity-expanded activation: widen the threshold by one
            // step of closing motion so fast approaches resolve before
            // penetrating the surface.
            let mut active: Vec<(ContactFrame, MaterialParams, bool)> = Vec::new();
            for (frame, material, is_foot) in frames {
                let closing = (-frame.relative_velocity(&state.v).x).max(0.0);
                let threshold = base_threshold + dt * closing;
                if !check_collision(std::slice::from_ref(&frame), threshold).is_empty() {
                    active.push((frame, material, is_foot));
                }
            }

            // Scripted kick delivery: the first foot contact during the
            // swing turns into a one-step push of tau / l along the
            // contact normal; the foot frame is dropped from the
            // resolution because the push sends the ball away from it.
            let mut external = Vector3::zeros();
            if swinging && Some(i) == self.kick_target {
                if let Some((frame, _, _)) = active.iter().find(|(_, _, is_foot)| *is_foot) {
                    let biped = self.biped.as_mut().unwrap();
                    let force = self.scenario.kick.unwrap().torque / biped.setup.model.leg_length;
                    external = Vector3::new(
                        force * frame.normal.x,
                        force * frame.normal.y,
                        0.0,
                    );
                    kick_impulse = dt * force;
                    biped.kick = KickPhase::Delivered { hold_angle: biped.joints.angles.y };
                    active.retain(|(_, _, is_foot)| !is_foot);
                }
            }

            let forces = generalized_forces(&state, &setup.props, gravity, external);

            // Algorithm branch: contacts -> impulse resolution, none ->
            // free flight. Never both.
            let (mut next, contacts, impulse_total) = if active.is_empty() {
                let next = if explicit {
                    step_free_explicit(&state, &setup.props, forces, dt)
                } else {
                    step_free(&state, &setup.props, forces, dt)
                };
                (next, 0, 0.0)
            } else {
                let frames: Vec<ContactFrame> = active.iter().map(|(f, _, _)| *f).collect();
                let materials: Vec<MaterialParams> = active.iter().map(|(_, m, _)| *m).collect();
                let (next, impulse) =
                    resolve_step(&state, &setup.props, &frames, &materials, forces, dt).map_err(
                        |source| SimError::Solver {
                            step: self.step_index,
                            body: setup.name.clone(),
                            source,
                        },
                    )?;
                (next, frames.len(), impulse.total_normal())
            };
            if explicit {
                next.q = state.q + state.v * dt;
            }

            self.bodies[i] = next;
            per_body.push((contacts, impulse_total));
        }

        // Walker update: torque from the current reference, then one
        // joint-space integration step and the heel-strike exchange.
        let mut torque = 0.0;
        let mut heel_strike = false;
        if let Some(biped) = self.biped.as_mut() {
            let reference = biped.reference(t);
            let mass = mass_matrix(&biped.setup.model, biped.joints.angles.y);
            let bias = bias_forces(&biped.setup.model, &biped.joints, gravity);
            torque = pfl_torque(
                &biped.setup.model,
                &biped.joints,
                &mass,
                &bias,
                &biped.setup.gains,
                &reference,
            )
            .unwrap_or(0.0);
            let accel = crate::biped::biped_accel(&biped.setup.model, &biped.joints, torque, gravity)
                .unwrap_or_else(|_| Vector2::zeros());

            let old_rates = biped.joints.rates;
            biped.joints.rates += accel * dt;
            let rates_for_position = if explicit { old_rates } else { biped.joints.rates };
            biped.joints.angles += rates_for_position * dt;
            biped.phase_time += dt;

            // Heel strike: the swing tip reaches the ground moving down.
            // Landing is plastic, so the new anchor pins exactly at y = 0.
            let tip = biped::swing_foot_position(&biped.setup.model, biped.anchor, &biped.joints);
            let tip_vel = biped::swing_foot_velocity(&biped.setup.model, &biped.joints);
            let in_kick_swing = matches!(biped.kick, KickPhase::Swinging { .. });
            if tip.y <= 0.0
                && tip_vel.y < 0.0
                && biped.phase_time >= MIN_STANCE_TIME
                && !in_kick_swing
            {
                biped.anchor = Vector2::new(tip.x, 0.0);
                biped.joints = crate::biped::heel_strike_map(&biped.setup.model, &biped.joints);
                biped.phase_time = 0.0;
                heel_strike = true;
                // The kick is one-shot; once the kicking leg lands the
                // walker returns to its gait reference.
                if matches!(biped.kick, KickPhase::Delivered { .. }) {
                    biped.kick = KickPhase::Inactive;
                }
            }
        }

        self.step_index += 1;
        let row = self.sample_row(torque, kick_impulse, heel_strike, &per_body);
        self.log.rows.push(row);

        // Arena exit ends kick scenarios early once the ball is away.
        if self.scenario.arena_half_width.is_finite() {
            for (i, b) in self.scenario.bodies.iter().enumerate() {
                if matches!(b.shape, Shape::Circle { .. })
                    && self.bodies[i].q.x.abs() > self.scenario.arena_half_width
                {
                    self.finished = true;
                }
            }
        }
        Ok(())
    }
}

/// Runs a scenario for its whole horizon (or until it leaves the arena)
/// and returns the log. Deterministic: identical scenarios produce
/// identical logs.
pub fn run(scenario: Scenario) -> Result<TrajectoryLog, SimError> {
    let steps = ((scenario.horizon / scenario.dt) - 1e-9).ceil() as usize;
    let mut sim = Simulation::new(scenario);
    for _ in 0..steps {
        if sim.finished() {
            break;
        }
        sim.step()?;
    }
    Ok(sim.into_log())
}

/// Ball velocity right after the last nonzero foot-ball impulse.
pub fn measure_post_kick_velocity(log: &TrajectoryLog) -> Result<(f64, f64), SimError> {
    let target = log.kick_target.ok_or(SimError::NoKickDetected)?;
    let row = log
        .rows
        .iter()
        .rev()
        .find(|r| r.kick_impulse > 0.0)
        .ok_or(SimError::NoKickDetected)?;
    let v = row.bodies[target].state.v;
    Ok((v.x, v.y))
}
