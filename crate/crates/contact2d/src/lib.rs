//! Planar rigid-body contact dynamics.
//!
//! The crate simulates SE(2) rigid bodies whose frictional impacts are
//! resolved through velocity-level complementarity problems, one per time
//! step: detect contacts, assemble the contact system, solve it with a
//! pivoting method, apply the impulses. On top of the engine sits a
//! two-link walker with a partially feedback-linearized hip actuator and
//! a scripted ball-kicking scenario with a torque sweep.
//!
//! Module map:
//! * [`lcp`] — complementarity problems, Lemke solver, enumeration oracle
//! * [`dynamics`] — body state and contact-free stepping
//! * [`collision`] — gap functions, contact frames, contact Jacobians
//! * [`contact`] — per-step assembly and impulse application
//! * [`biped`] — walker dynamics and partial feedback linearization
//! * [`sim`] — the outer time-stepping loop and trajectory logs
//! * [`config`] — key-value run configuration files
//! * [`cli`] — `simulate` / `sweep` / `drop-test` entry points and CSV output
//!
//! The `examples/` directory contains one runnable program per major
//! capability; `contact2d --help` describes the thin command-line
//! frontend.

pub mod biped;
pub mod cli;
pub mod collision;
pub mod config;
pub mod contact;
pub mod dynamics;
pub mod lcp;
pub mod sim;

pub use biped::{BipedModel, ControllerGains, JointReference, JointState};
pub use collision::{check_collision, contact_candidates, gap_and_frame, ContactFrame, Shape};
pub use contact::{assemble_lcp, resolve_step, ContactImpulse, MaterialParams};
pub use dynamics::{generalized_forces, step_free, BodyState, InertialProps};
pub use lcp::{
    check_qp_optimality, solve_enumeration, solve_lemke, LcpProblem, LcpSolution, LcpStatus,
};
pub use sim::{Scenario, TrajectoryLog};
