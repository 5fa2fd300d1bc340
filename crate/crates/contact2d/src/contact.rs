//! Per-step contact resolution: assemble the active contacts of one body
//! into a complementarity problem, solve it, and apply the resulting
//! impulses.
//!
//! The unknowns per frictional contact are the normal force, two
//! friction-direction forces and a slip-speed slack; frictionless
//! contacts reduce to the single normal unknown. Forces are solved at
//! force scale and applied as impulses (force times the step length).

use nalgebra::{DMatrix, DVector, Vector3};
use thiserror::Error;

use crate::collision::ContactFrame;
use crate::dynamics::{BodyState, InertialProps};
use crate::lcp::{self, LcpProblem, LcpSolution, LcpStatus};

/// Friction coefficient and coefficient of restitution for one contact
/// pairing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialParams {
    pub mu: f64,
    pub restitution: f64,
}

impl MaterialParams {
    pub fn new(mu: f64, restitution: f64) -> Self {
        assert!(mu >= 0.0, "friction coefficient must be nonnegative");
        assert!((0.0..=1.0).contains(&restitution), "restitution must lie in [0, 1]");
        Self { mu, restitution }
    }

    pub fn frictionless(restitution: f64) -> Self {
        Self::new(0.0, restitution)
    }
}

/// Impulses applied by one resolution step, one entry per active contact.
/// Normal and tangential entries are impulses (N·s); `lambda` is the
/// slip-speed slack (m/s) from the friction-cone rows.
#[derive(Debug, Clone, Default)]
pub struct ContactImpulse {
    pub normal: Vec<f64>,
    pub tangent: Vec<[f64; 2]>,
    pub lambda: Vec<f64>,
}

impl ContactImpulse {
    /// Largest violation of nonnegativity and the friction cone
    /// `mu * f_n - sum(f_t) >= 0` across contacts.
    pub fn cone_violation(&self, materials: &[MaterialParams]) -> f64 {
        let mut worst = 0.0f64;
        for ((fn_i, ft_i), mat) in self.normal.iter().zip(&self.tangent).zip(materials) {
            worst = worst.max(-fn_i).max(-ft_i[0]).max(-ft_i[1]);
            worst = worst.max(-(mat.mu * fn_i - ft_i[0] - ft_i[1]));
        }
        worst
    }

    /// Total normal impulse over all contacts.
    pub fn total_normal(&self) -> f64 {
        self.normal.iter().sum()
    }
}

#[derive(Debug, Error)]
pub enum ContactError {
    #[error("{frames} frames but {materials} material entries")]
    DimensionMismatch { frames: usize, materials: usize },
    #[error("assembled contact system contains non-finite entries")]
    NonFinite,
    #[error("contact solve failed ({status:?}) on a {n}x{n} system")]
    SolverFailed {
        status: LcpStatus,
        n: usize,
        /// The offending system, kept for diagnosis.
        problem: LcpProblem,
    },
}

/// Index bookkeeping for the assembled system: normals first, then
/// friction-direction pairs, then one cone row per frictional contact.
struct Layout {
    normal: Vec<usize>,
    tangent: Vec<Option<usize>>, // first of two adjacent rows
    lambda: Vec<Option<usize>>,
    size: usize,
}

fn layout(materials: &[MaterialParams]) -> Layout {
    let c = materials.len();
    let frictional: Vec<usize> = (0..c).filter(|&i| materials[i].mu > 0.0).collect();
    let mut tangent = vec![None; c];
    let mut lambda = vec![None; c];
    for (slot, &i) in frictional.iter().enumerate() {
        tangent[i] = Some(c + 2 * slot);
        lambda[i] = Some(c + 2 * frictional.len() + slot);
    }
    Layout {
        normal: (0..c).collect(),
        tangent,
        lambda,
        size: c + 3 * frictional.len(),
    }
}

/// Generalized (Jacobian-lifted) normal and first friction direction of a
/// frame; the second friction direction is the negation of the first.
fn lifted(frame: &ContactFrame) -> (Vector3<f64>, Vector3<f64>) {
    (frame.jacobian.row(0).transpose(), frame.jacobian.row(1).transpose())
}

/// Builds the contact LCP for one body. Per frictional contact the block
/// structure is
///
/// ```text
/// V = [ dt n'M^-1 n   dt n'M^-1 D   0 ]      p = [ n'((1+e) v_rel + dt M^-1 f) ]
///     [ dt D'M^-1 n   dt D'M^-1 D   e ]          [ D'(v_rel + dt M^-1 f)       ]
///     [ mu            -e'           0 ]          [ 0                           ]
/// ```
///
/// with contacts coupling densely through the shared inverse mass matrix
/// and `v_rel` measured against the obstacle's contact-point velocity.
/// `forces` is the sum of conservative and external forces for the step.
pub fn assemble_lcp(
    state: &BodyState,
    props: &InertialProps,
    frames: &[ContactFrame],
    materials: &[MaterialParams],
    forces: Vector3<f64>,
    dt: f64,
) -> Result<LcpProblem, ContactError> {
    assert!(!frames.is_empty(), "assemble_lcp requires at least one active frame");
    assert!(dt > 0.0);
    if frames.len() != materials.len() {
        return Err(ContactError::DimensionMismatch {
            frames: frames.len(),
            materials: materials.len(),
        });
    }

    let lay = layout(materials);
    let c = frames.len();
    let mut v = DMatrix::zeros(lay.size, lay.size);
    let mut p = DVector::zeros(lay.size);

    let dv_free = props.inv_mass_mul(&forces) * dt;

    // Generalized directions per contact: n, then +/- tangent.
    let dirs: Vec<(Vector3<f64>, Vector3<f64>)> = frames.iter().map(lifted).collect();

    for i in 0..c {
        let (n_i, t_i) = &dirs[i];
        let rel = frames[i].relative_velocity(&state.v);

        for j in 0..c {
            let (n_j, t_j) = &dirs[j];
            let minv_n = props.inv_mass_mul(n_j);
            let minv_t = props.inv_mass_mul(t_j);

            v[(lay.normal[i], lay.normal[j])] = dt * n_i.dot(&minv_n);
            if let Some(tj) = lay.tangent[j] {
                v[(lay.normal[i], tj)] = dt * n_i.dot(&minv_t);
                v[(lay.normal[i], tj + 1)] = -dt * n_i.dot(&minv_t);
            }
            if let Some(ti) = lay.tangent[i] {
                v[(ti, lay.normal[j])] = dt * t_i.dot(&minv_n);
                v[(ti + 1, lay.normal[j])] = -dt * t_i.dot(&minv_n);
                if let Some(tj) = lay.tangent[j] {
                    let tt = dt * t_i.dot(&minv_t);
                    v[(ti, tj)] = tt;
                    v[(ti, tj + 1)] = -tt;
                    v[(ti + 1, tj)] = -tt;
                    v[(ti + 1, tj + 1)] = tt;
                }
            }
        }

        p[lay.normal[i]] = (1.0 + materials[i].restitution) * rel.x + n_i.dot(&dv_free);

        if let (Some(ti), Some(li)) = (lay.tangent[i], lay.lambda[i]) {
            let drift = rel.y + t_i.dot(&dv_free);
            p[ti] = drift;
            p[ti + 1] = -drift;
            // Slip slack couples into both friction directions.
            v[(ti, li)] = 1.0;
            v[(ti + 1, li)] = 1.0;
            // Cone row: mu f_n - e' f_t >= 0.
            v[(li, lay.normal[i])] = materials[i].mu;
            v[(li, ti)] = -1.0;
            v[(li, ti + 1)] = -1.0;
        }
    }

    // Square by construction; only non-finite inputs can fail here.
    LcpProblem::new(v, p).map_err(|_| ContactError::NonFinite)
}

/// Solves the assembled system and applies the impulses:
/// `v+ = v + dt M^-1 f + M^-1 J' (dt z)`, `q+ = q + dt v+`.
pub fn resolve_step(
    state: &BodyState,
    props: &InertialProps,
    frames: &[ContactFrame],
    materials: &[MaterialParams],
    forces: Vector3<f64>,
    dt: f64,
) -> Result<(BodyState, ContactImpulse), ContactError> {
    let problem = assemble_lcp(state, props, frames, materials, forces, dt)?;
    let solution = lcp::solve_lemke(&problem, lcp::DEFAULT_TOL, lcp::DEFAULT_MAX_PIVOTS);
    if solution.status != LcpStatus::Solved {
        return Err(ContactError::SolverFailed {
            status: solution.status,
            n: problem.size(),
            problem,
        });
    }
    Ok(apply_impulses(state, props, frames, materials, forces, dt, &solution))
}

#[allow(clippy::needless_range_loop)]
fn apply_impulses(
    state: &BodyState,
    props: &InertialProps,
    frames: &[ContactFrame],
    materials: &[MaterialParams],
    forces: Vector3<f64>,
    dt: f64,
    solution: &LcpSolution,
) -> (BodyState, ContactImpulse) {
    let lay = layout(materials);
    let c = frames.len();

    let mut impulse = ContactImpulse {
        normal: vec![0.0; c],
        tangent: vec![[0.0, 0.0]; c],
        lambda: vec![0.0; c],
    };
    let mut generalized = Vector3::zeros();
    for i in 0..c {
        let (n_i, t_i) = lifted(&frames[i]);
        let fn_i = solution.z[lay.normal[i]];
        impulse.normal[i] = dt * fn_i;
        generalized += n_i * (dt * fn_i);
        if let (Some(ti), Some(li)) = (lay.tangent[i], lay.lambda[i]) {
            let ft = [solution.z[ti], solution.z[ti + 1]];
            impulse.tangent[i] = [dt * ft[0], dt * ft[1]];
            impulse.lambda[i] = solution.z[li];
            generalized += t_i * (dt * (ft[0] - ft[1]));
        }
    }

    let v = state.v + props.inv_mass_mul(&forces) * dt + props.inv_mass_mul(&generalized);
    let next = BodyState { q: state.q + v * dt, v };
    (next, impulse)
}
