//! Two-link walker with a torso point mass at the hip and a single hip
//! actuator, controlled through partial feedback linearization.
//!
//! Joint coordinates
//! -----------------
//! * `theta1`: absolute angle of the stance leg, measured from the upward
//!   vertical at the anchored foot; positive leans the hip toward +x.
//!   The hip sits at `anchor + l (sin theta1, cos theta1)`.
//! * `theta2`: hip joint angle, the swing leg's absolute angle minus the
//!   stance leg's. The swing foot hangs at
//!   `hip - l (sin psi, cos psi)` with `psi = theta1 + theta2`, so
//!   `theta2 = 0` means the legs coincide and the swing foot moves
//!   forward as `theta2` decreases.
//!
//! In these coordinates the hip torque enters only the second equation
//! (selection vector `B = (0, 1)`), which is what makes the actuated
//! coordinate exactly linearizable. The bias vector is derived from the
//! same Lagrangian as the mass matrix, so the unactuated swing conserves
//! energy (checked in the tests).

use nalgebra::{Matrix2, Matrix3, Vector2};
use thiserror::Error;

use crate::collision::Shape;

/// Decoupling terms below this magnitude are treated as singular.
const SINGULAR_DECOUPLING: f64 = 1e-10;

/// Masses, lengths and foot geometry of the walker.
#[derive(Debug, Clone, PartialEq)]
pub struct BipedModel {
    pub leg_mass: f64,
    pub torso_mass: f64,
    pub leg_length: f64,
    /// Distance of the leg's centroid from the hip joint.
    pub leg_centroid: f64,
    pub leg_inertia: f64,
    pub foot: Shape,
}

impl BipedModel {
    pub fn new(
        leg_mass: f64,
        torso_mass: f64,
        leg_length: f64,
        leg_centroid: f64,
        leg_inertia: f64,
        foot: Shape,
    ) -> Self {
        assert!(leg_mass > 0.0 && torso_mass > 0.0 && leg_length > 0.0);
        assert!(
            leg_centroid > 0.0 && leg_centroid < leg_length,
            "leg centroid must lie strictly between hip and foot"
        );
        assert!(leg_inertia > 0.0);
        Self {
            leg_mass,
            torso_mass,
            leg_length,
            leg_centroid,
            leg_inertia,
            foot,
        }
    }
}

/// Joint angles and rates, ordered (theta1, theta2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointState {
    pub angles: Vector2<f64>,
    pub rates: Vector2<f64>,
}

impl JointState {
    pub fn new(angles: Vector2<f64>, rates: Vector2<f64>) -> Self {
        Self { angles, rates }
    }

    /// Absolute angle of the swing leg.
    pub fn swing_angle(&self) -> f64 {
        self.angles.x + self.angles.y
    }
}

/// PD gains of the hip tracking loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerGains {
    pub kp: f64,
    pub kd: f64,
}

impl ControllerGains {
    pub fn new(kp: f64, kd: f64) -> Self {
        assert!(kp > 0.0 && kd > 0.0);
        Self { kp, kd }
    }
}

/// Reference for the controlled hip coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointReference {
    pub angle: f64,
    pub rate: f64,
    pub accel: f64,
}

#[derive(Debug, Error)]
pub enum BipedError {
    #[error("decoupling term S M^-1 B is numerically singular ({value:e})")]
    SingularDecoupling { value: f64 },
    #[error("joint-space mass matrix is singular at this configuration")]
    SingularMass,
}

/// Mass-inertia matrix at the given inter-leg angle:
///
/// ```text
/// [ M11 M12 0 ]     M11 = 2 (I + m_l (c^2 + l^2 - c l - c l cos t)) + m_t l^2
/// [ M21 M22 0 ]     M12 = M21 = I + m_l (c^2 - c l cos t)
/// [ 0   0   I ]     M22 = I + c^2 m_l
/// ```
///
/// The upper-left block is the joint-space inertia; the corner entry is
/// the leg inertia kept for the floating orientation coordinate used
/// during flight phases.
pub fn mass_matrix(model: &BipedModel, inter_leg_angle: f64) -> Matrix3<f64> {
    let (m_l, m_t) = (model.leg_mass, model.torso_mass);
    let (l, c, i) = (model.leg_length, model.leg_centroid, model.leg_inertia);
    let cl_cos = c * l * inter_leg_angle.cos();
    let m11 = 2.0 * (i + m_l * (c * c + l * l - c * l - cl_cos)) + m_t * l * l;
    let m12 = i + m_l * (c * c - cl_cos);
    let m22 = i + c * c * m_l;
    Matrix3::new(m11, m12, 0.0, m12, m22, 0.0, 0.0, 0.0, i)
}

/// Joint-space 2x2 block of [`mass_matrix`].
pub fn joint_mass_matrix(model: &BipedModel, inter_leg_angle: f64) -> Matrix2<f64> {
    let m = mass_matrix(model, inter_leg_angle);
    Matrix2::new(m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)])
}

/// Coriolis, centrifugal and gravity terms `N(theta, theta_dot)` of the
/// joint dynamics `M theta_dd + N = B u`, derived from the same
/// Lagrangian as the mass matrix.
pub fn bias_forces(model: &BipedModel, joints: &JointState, gravity: f64) -> Vector2<f64> {
    let (m_l, m_t) = (model.leg_mass, model.torso_mass);
    let (l, c) = (model.leg_length, model.leg_centroid);
    let (t1, t2) = (joints.angles.x, joints.angles.y);
    let (d1, d2) = (joints.rates.x, joints.rates.y);

    let sigma = m_l * c * l * t2.sin();
    let swing = t1 + t2;
    let g1 = gravity * (-(m_l * (l - c) + m_t * l + m_l * l) * t1.sin() + m_l * c * swing.sin());
    let g2 = gravity * m_l * c * swing.sin();

    Vector2::new(
        2.0 * sigma * d1 * d2 + sigma * d2 * d2 + g1,
        -sigma * d1 * d1 + g2,
    )
}

/// Forward dynamics of the joint subsystem: `theta_dd = M^-1 (B u - N)`.
pub fn biped_accel(
    model: &BipedModel,
    joints: &JointState,
    torque: f64,
    gravity: f64,
) -> Result<Vector2<f64>, BipedError> {
    let m = joint_mass_matrix(model, joints.angles.y);
    let n = bias_forces(model, joints, gravity);
    let rhs = Vector2::new(-n.x, torque - n.y);
    m.lu().solve(&rhs).ok_or(BipedError::SingularMass)
}

/// Hip torque that drives the controlled coordinate `theta2` to the PD
/// command `accel_ref - kp e - kd e_dot`:
///
/// `u = (S M^-1 B)^-1 (theta2_dd_cmd + S M^-1 N)` with `S = [0 1]`.
///
/// Substituting the result back into the forward dynamics reproduces the
/// commanded acceleration exactly.
pub fn pfl_torque(
    _model: &BipedModel,
    joints: &JointState,
    mass: &Matrix3<f64>,
    bias: &Vector2<f64>,
    gains: &ControllerGains,
    reference: &JointReference,
) -> Result<f64, BipedError> {
    let m = Matrix2::new(mass[(0, 0)], mass[(0, 1)], mass[(1, 0)], mass[(1, 1)]);
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    if det.abs() < SINGULAR_DECOUPLING {
        return Err(BipedError::SingularDecoupling { value: det });
    }
    // (M^-1)_22 and row 2 of M^-1 N, written out for the 2x2 block.
    let decoupling = m[(0, 0)] / det;
    if decoupling.abs() < SINGULAR_DECOUPLING {
        return Err(BipedError::SingularDecoupling { value: decoupling });
    }
    let minv_n_2 = (-m[(1, 0)] * bias.x + m[(0, 0)] * bias.y) / det;

    let err = joints.angles.y - reference.angle;
    let err_rate = joints.rates.y - reference.rate;
    let commanded = reference.accel - gains.kp * err - gains.kd * err_rate;

    Ok((commanded + minv_n_2) / decoupling)
}

/// Torque a desired kick force at the foot maps to: `tau = F l`.
pub fn kick_torque(force: f64, model: &BipedModel) -> f64 {
    assert!(force >= 0.0);
    force * model.leg_length
}

/// Hip position for a stance foot anchored at `anchor`.
pub fn hip_position(model: &BipedModel, anchor: Vector2<f64>, joints: &JointState) -> Vector2<f64> {
    let t1 = joints.angles.x;
    anchor + Vector2::new(t1.sin(), t1.cos()) * model.leg_length
}

/// World position of the swing foot tip.
pub fn swing_foot_position(
    model: &BipedModel,
    anchor: Vector2<f64>,
    joints: &JointState,
) -> Vector2<f64> {
    let psi = joints.swing_angle();
    hip_position(model, anchor, joints) - Vector2::new(psi.sin(), psi.cos()) * model.leg_length
}

/// World velocity of the swing foot tip.
pub fn swing_foot_velocity(model: &BipedModel, joints: &JointState) -> Vector2<f64> {
    let l = model.leg_length;
    let t1 = joints.angles.x;
    let psi = joints.swing_angle();
    let psi_dot = joints.rates.x + joints.rates.y;
    Vector2::new(t1.cos(), -t1.sin()) * (l * joints.rates.x)
        - Vector2::new(psi.cos(), -psi.sin()) * (l * psi_dot)
}

/// Total mechanical energy of the free swing (kinetic plus potential),
/// with the potential zeroed at the anchor height.
pub fn total_energy(model: &BipedModel, joints: &JointState, gravity: f64) -> f64 {
    let m = joint_mass_matrix(model, joints.angles.y);
    let kinetic = 0.5 * joints.rates.dot(&(m * joints.rates));
    let (m_l, m_t) = (model.leg_mass, model.torso_mass);
    let (l, c) = (model.leg_length, model.leg_centroid);
    let potential = gravity
        * ((m_l * (l - c) + m_t * l + m_l * l) * joints.angles.x.cos()
            - m_l * c * joints.swing_angle().cos());
    kinetic + potential
}

/// Stance exchange at heel strike: the swing leg becomes the new stance
/// leg and the angles are relabeled about the new anchor. Landing is
/// plastic, so the new stance foot is pinned where it touched down.
pub fn heel_strike_relabel(joints: &JointState) -> JointState {
    JointState {
        angles: Vector2::new(joints.swing_angle(), -joints.angles.y),
        rates: Vector2::new(joints.rates.x + joints.rates.y, -joints.rates.y),
    }
}

/// Plastic heel-strike impact: relabels the legs and maps the rates
/// through the impulsive contact at the landing foot.
///
/// The contact impulse acts at the new anchor and the hip transmits only
/// forces, so two angular momenta survive the impact unchanged: the whole
/// system's about the landing point, and the trailing leg's about the
/// hip. Solving those two conservation laws for the post-impact rates
/// gives the map. Spin terms use the counterclockwise convention, where a
/// leg with lean rate `d` has angular velocity `-d`.
pub fn heel_strike_map(model: &BipedModel, joints: &JointState) -> JointState {
    let (m_l, m_t) = (model.leg_mass, model.torso_mass);
    let (l, c, i) = (model.leg_length, model.leg_centroid, model.leg_inertia);
    let cos2 = joints.angles.y.cos();
    let d1 = joints.rates.x;
    let swing_rate = joints.rates.x + joints.rates.y;

    // Trailing-leg momentum about the hip, pre and post coefficients.
    let leg_about_hip = m_l * c * (l - c) - i;
    let b11 = m_l * c * l * cos2;
    let b12 = -(m_l * c * c + i);
    let rhs_b = leg_about_hip * d1;

    // System momentum about the landing point.
    let a11 = -(m_l * (l - c) * (l - c) + i) - m_t * l * l - m_l * l * l + m_l * l * c * cos2;
    let a12 = m_l * l * c * cos2 - m_l * c * c - i;
    let rhs_a = d1
        * (m_l * (l - c) * (c - l * cos2)
            - i
            - m_t * l * l * cos2
            - m_l * (l - c) * l * cos2)
        + swing_rate * leg_about_hip;

    let det = a11 * b12 - a12 * b11;
    let new_stance_rate = (rhs_a * b12 - a12 * rhs_b) / det;
    let new_swing_abs_rate = (a11 * rhs_b - rhs_a * b11) / det;

    JointState {
        angles: Vector2::new(joints.swing_angle(), -joints.angles.y),
        rates: Vector2::new(new_stance_rate, new_swing_abs_rate - new_stance_rate),
    }
}
