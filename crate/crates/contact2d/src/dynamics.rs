//! SE(2) rigid-body state and contact-free time stepping.

use nalgebra::Vector3;

/// Configuration `q = (x, y, theta)` and velocity `v = (vx, vy, omega)`
/// of one planar rigid body. Angles are radians, counterclockwise
/// positive; y points up.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BodyState {
    pub q: Vector3<f64>,
    pub v: Vector3<f64>,
}

impl BodyState {
    pub fn new(q: Vector3<f64>, v: Vector3<f64>) -> Self {
        Self { q, v }
    }

    pub fn at_rest(x: f64, y: f64) -> Self {
        Self {
            q: Vector3::new(x, y, 0.0),
            v: Vector3::zeros(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.q.iter().chain(self.v.iter()).all(|c| c.is_finite())
    }

    /// Kinetic energy for the given inertial properties.
    pub fn kinetic_energy(&self, props: &InertialProps) -> f64 {
        0.5 * props.mass * (self.v.x * self.v.x + self.v.y * self.v.y)
            + 0.5 * props.rot_inertia * self.v.z * self.v.z
    }
}

/// Mass and rotational inertia; the generalized mass matrix of a free
/// planar body is diag(mass, mass, rot_inertia).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InertialProps {
    pub mass: f64,
    pub rot_inertia: f64,
}

impl InertialProps {
    pub fn new(mass: f64, rot_inertia: f64) -> Self {
        assert!(mass > 0.0 && rot_inertia > 0.0, "inertial properties must be positive");
        Self { mass, rot_inertia }
    }

    /// Uniform disc of the given mass and radius: I = m r^2 / 2.
    pub fn uniform_disc(mass: f64, radius: f64) -> Self {
        Self::new(mass, 0.5 * mass * radius * radius)
    }

    /// Uniform rectangle: I = m (w^2 + h^2) / 12 from full extents.
    pub fn uniform_rectangle(mass: f64, width: f64, height: f64) -> Self {
        Self::new(mass, mass * (width * width + height * height) / 12.0)
    }

    /// M^-1 f, componentwise since M is diagonal.
    pub fn inv_mass_mul(&self, f: &Vector3<f64>) -> Vector3<f64> {
        Vector3::new(f.x / self.mass, f.y / self.mass, f.z / self.rot_inertia)
    }
}

/// Sum of conservative and external generalized forces for a free planar
/// body: gravity acts along -y and there is no Coriolis term because the
/// mass matrix is constant and diagonal.
pub fn generalized_forces(
    _state: &BodyState,
    props: &InertialProps,
    gravity: f64,
    external: Vector3<f64>,
) -> Vector3<f64> {
    Vector3::new(0.0, -props.mass * gravity, 0.0) + external
}

/// One semi-implicit Euler step: velocity first, then position from the
/// new velocity. The velocity-level contact constraints only prevent
/// interpenetration if the position integrates the post-impulse velocity,
/// so this is the default integrator everywhere.
pub fn step_free(state: &BodyState, props: &InertialProps, forces: Vector3<f64>, dt: f64) -> BodyState {
    debug_assert!(dt > 0.0);
    let v = state.v + props.inv_mass_mul(&forces) * dt;
    BodyState {
        q: state.q + v * dt,
        v,
    }
}

/// Explicit variant: position integrates the pre-update velocity. Kept
/// for side-by-side comparison; selected by the `--strict-paper` flag of
/// the command-line frontend.
pub fn step_free_explicit(
    state: &BodyState,
    props: &InertialProps,
    forces: Vector3<f64>,
    dt: f64,
) -> BodyState {
    debug_assert!(dt > 0.0);
    BodyState {
        q: state.q + state.v * dt,
        v: state.v + props.inv_mass_mul(&forces) * dt,
    }
}
