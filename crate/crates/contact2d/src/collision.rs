//! Gap functions, contact frames and contact Jacobians for the shape
//! pairs the simulator needs: circles, rectangles and half-planes.

use nalgebra::{Matrix2, Matrix2x3, Rotation2, Vector2, Vector3};
use thiserror::Error;

use crate::dynamics::BodyState;

/// Collision geometry attached to a body. Rectangles are axis-aligned in
/// their body frame and rotate with it; half-planes are parameterized by
/// an outward unit normal and the offset of the surface along it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shape {
    Circle { radius: f64 },
    Rectangle { half_width: f64, half_height: f64 },
    HalfPlane { normal: Vector2<f64>, offset: f64 },
}

impl Shape {
    pub fn circle(radius: f64) -> Self {
        assert!(radius > 0.0);
        Shape::Circle { radius }
    }

    pub fn rectangle(half_width: f64, half_height: f64) -> Self {
        assert!(half_width > 0.0 && half_height > 0.0);
        Shape::Rectangle { half_width, half_height }
    }

    pub fn half_plane(normal: Vector2<f64>, offset: f64) -> Self {
        let n = normal.norm();
        assert!((n - 1.0).abs() < 1e-9, "half-plane normal must be unit length");
        Shape::HalfPlane { normal, offset }
    }

    /// The flat ground: surface y = 0, outward normal +y.
    pub fn ground() -> Self {
        Shape::HalfPlane { normal: Vector2::new(0.0, 1.0), offset: 0.0 }
    }
}

#[derive(Debug, Error)]
pub enum CollisionError {
    #[error("unsupported shape pair: {a} vs {b}")]
    UnsupportedPair { a: &'static str, b: &'static str },
    #[error("no contact candidate (degenerate geometry)")]
    NoContactCandidate,
}

/// One potential contact: signed gap, contact frame and the Jacobian of
/// the owning body's contact-point velocity.
///
/// The normal points from the other shape toward the owning body, so a
/// positive normal impulse pushes the bodies apart. `tangent` is the
/// first friction direction; the second is its negation, so the
/// direction matrix D always has two columns in 2D.
#[derive(Debug, Clone, Copy)]
pub struct ContactFrame {
    /// Signed minimum distance; negative iff the shapes overlap.
    pub gap: f64,
    pub normal: Vector2<f64>,
    pub tangent: Vector2<f64>,
    /// Contact point in world coordinates, on the owning body's surface.
    pub point: Vector2<f64>,
    /// Rows: contact-point velocity along `normal`, then along `tangent`.
    pub jacobian: Matrix2x3<f64>,
    /// World velocity of the other body's material point at `point`;
    /// zero for static obstacles.
    pub obstacle_vel: Vector2<f64>,
}

impl ContactFrame {
    /// Friction direction matrix with columns (tangent, -tangent).
    pub fn direction_matrix(&self) -> Matrix2<f64> {
        Matrix2::from_columns(&[self.tangent, -self.tangent])
    }

    /// Relative contact-point velocity in frame coordinates
    /// (normal component, tangent component) for body velocity `v`.
    pub fn relative_velocity(&self, v: &Vector3<f64>) -> Vector2<f64> {
        let own = self.jacobian * v;
        Vector2::new(
            own.x - self.normal.dot(&self.obstacle_vel),
            own.y - self.tangent.dot(&self.obstacle_vel),
        )
    }
}

fn perp(v: Vector2<f64>) -> Vector2<f64> {
    Vector2::new(-v.y, v.x)
}

fn center(state: &BodyState) -> Vector2<f64> {
    Vector2::new(state.q.x, state.q.y)
}

/// Contact Jacobian for a frame owned by `state`'s body: each row maps
/// (vx, vy, omega) to the contact-point velocity along one frame
/// direction. The lever arm enters through perp(point - center).
pub fn contact_jacobian(frame: &ContactFrame, state: &BodyState) -> Matrix2x3<f64> {
    jacobian_rows(frame.normal, frame.tangent, frame.point, state)
}

fn jacobian_rows(
    normal: Vector2<f64>,
    tangent: Vector2<f64>,
    point: Vector2<f64>,
    state: &BodyState,
) -> Matrix2x3<f64> {
    let r_perp = perp(point - center(state));
    Matrix2x3::new(
        normal.x, normal.y, normal.dot(&r_perp),
        tangent.x, tangent.y, tangent.dot(&r_perp),
    )
}

/// Velocity of the material point of `state`'s body currently at `point`.
fn point_velocity(state: &BodyState, point: Vector2<f64>) -> Vector2<f64> {
    Vector2::new(state.v.x, state.v.y) + perp(point - center(state)) * state.v.z
}

fn build_frame(
    gap: f64,
    normal: Vector2<f64>,
    point: Vector2<f64>,
    state_a: &BodyState,
    state_b: &BodyState,
) -> ContactFrame {
    // Tangent chosen so that (normal, tangent) is a right-handed frame
    // rotated -90 degrees: ground normal (0,1) gives tangent (1,0).
    let tangent = Vector2::new(normal.y, -normal.x);
    ContactFrame {
        gap,
        normal,
        tangent,
        point,
        jacobian: jacobian_rows(normal, tangent, point, state_a),
        obstacle_vel: point_velocity(state_b, point),
    }
}

fn shape_name(shape: &Shape) -> &'static str {
    match shape {
        Shape::Circle { .. } => "circle",
        Shape::Rectangle { .. } => "rectangle",
        Shape::HalfPlane { .. } => "half-plane",
    }
}

/// World-frame (normal, offset) of a half-plane owned by `state`.
fn world_plane(normal: Vector2<f64>, offset: f64, state: &BodyState) -> (Vector2<f64>, f64) {
    let n = Rotation2::new(state.q.z) * normal;
    (n, offset + n.dot(&center(state)))
}

/// All candidate contact frames between two shapes, owned by body a.
/// Rectangle vs half-plane reports one frame per corner so that a
/// resting rectangle yields two simultaneous contacts after filtering.
pub fn contact_candidates(
    shape_a: &Shape,
    state_a: &BodyState,
    shape_b: &Shape,
    state_b: &BodyState,
) -> Result<Vec<ContactFrame>, CollisionError> {
    use Shape::*;
    match (shape_a, shape_b) {
        (Circle { radius }, HalfPlane { normal, offset }) => {
            let (n, off) = world_plane(*normal, *offset, state_b);
            let c = center(state_a);
            let gap = n.dot(&c) - off - radius;
            Ok(vec![build_frame(gap, n, c - n * *radius, state_a, state_b)])
        }
        (Rectangle { half_width, half_height }, HalfPlane { normal, offset }) => {
            let (n, off) = world_plane(*normal, *offset, state_b);
            let rot = Rotation2::new(state_a.q.z);
            let c = center(state_a);
            let mut frames = Vec::with_capacity(4);
            for &sx in &[-1.0, 1.0] {
                for &sy in &[-1.0, 1.0] {
                    let corner = c + rot * Vector2::new(sx * half_width, sy * half_height);
                    let gap = n.dot(&corner) - off;
                    frames.push(build_frame(gap, n, corner, state_a, state_b));
                }
            }
            Ok(frames)
        }
        (Circle { radius }, Rectangle { half_width, half_height }) => {
            let rot = Rotation2::new(state_b.q.z);
            let local = rot.inverse() * (center(state_a) - center(state_b));
            let clamped = Vector2::new(
                local.x.clamp(-half_width, *half_width),
                local.y.clamp(-half_height, *half_height),
            );
            let delta = local - clamped;
            let dist = delta.norm();
            let (gap, n_local) = if dist > 1e-12 {
                (dist - radius, delta / dist)
            } else {
                // Center inside the box: push out through the nearest face.
                let faces = [
                    (half_width - local.x, Vector2::new(1.0, 0.0)),
                    (local.x + half_width, Vector2::new(-1.0, 0.0)),
                    (half_height - local.y, Vector2::new(0.0, 1.0)),
                    (local.y + half_height, Vector2::new(0.0, -1.0)),
                ];
                let (depth, dir) = faces
                    .iter()
                    .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap())
                    .copied()
                    .unwrap();
                (-depth - radius, dir)
            };
            let n = rot * n_local;
            let point = center(state_a) - n * *radius;
            Ok(vec![build_frame(gap, n, point, state_a, state_b)])
        }
        (Circle { radius: ra }, Circle { radius: rb }) => {
            let d = center(state_a) - center(state_b);
            let dist = d.norm();
            if dist < 1e-12 {
                return Err(CollisionError::NoContactCandidate);
            }
            let n = d / dist;
            let gap = dist - ra - rb;
            Ok(vec![build_frame(gap, n, center(state_a) - n * *ra, state_a, state_b)])
        }
        // Flipped orders reuse the mirrored query with the normal negated.
        (HalfPlane { .. }, Circle { .. })
        | (HalfPlane { .. }, Rectangle { .. })
        | (Rectangle { .. }, Circle { .. }) => {
            let mirrored = contact_candidates(shape_b, state_b, shape_a, state_a)?;
            Ok(mirrored
                .into_iter()
                .map(|f| build_frame(f.gap, -f.normal, f.point, state_a, state_b))
                .collect())
        }
        (a, b) => Err(CollisionError::UnsupportedPair {
            a: shape_name(a),
            b: shape_name(b),
        }),
    }
}

/// The closest-feature frame: the candidate with the smallest gap.
pub fn gap_and_frame(
    shape_a: &Shape,
    state_a: &BodyState,
    shape_b: &Shape,
    state_b: &BodyState,
) -> Result<ContactFrame, CollisionError> {
    contact_candidates(shape_a, state_a, shape_b, state_b)?
        .into_iter()
        .min_by(|a, b| a.gap.partial_cmp(&b.gap).unwrap())
        .ok_or(CollisionError::NoContactCandidate)
}

/// Active subset of candidate frames: those with gap <= threshold. An
/// empty result means the caller takes the contact-free branch.
pub fn check_collision(frames: &[ContactFrame], threshold: f64) -> Vec<ContactFrame> {
    debug_assert!(threshold >= 0.0);
    frames.iter().filter(|f| f.gap <= threshold).copied().collect()
}
