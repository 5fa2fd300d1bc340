//! Dense Linear Complementarity Problems and two independent solvers.
//!
//! A problem is the pair `(V, p)`; a solution is a vector `z >= 0` with
//! slack `w = V z + p >= 0` and `z' w = 0`. Contact resolution assembles
//! small LCPs of this form every time step, so the solvers here are tuned
//! for dense systems with at most a few dozen unknowns.
//!
//! Two routes are provided on purpose: [`solve_lemke`] is the production
//! path (complementary pivoting with lexicographic tie-breaking), while
//! [`solve_enumeration`] brute-forces every active index set and acts as
//! an oracle the pivoting solver can be checked against.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

/// Default residual tolerance used by callers that have no better idea.
pub const DEFAULT_TOL: f64 = 1e-8;

/// Default pivot budget for [`solve_lemke`]; generous for n <= ~10.
pub const DEFAULT_MAX_PIVOTS: usize = 500;

/// Pivot entries with magnitude below this are treated as zero.
const NEAR_SINGULAR_PIVOT: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum LcpError {
    #[error("LCP matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("LCP matrix is {n}x{n} but the bias vector has length {len}")]
    DimensionMismatch { n: usize, len: usize },
    #[error("LCP data contains a non-finite entry")]
    NonFinite,
}

/// The pair `(V, p)` defining `w = V z + p`.
#[derive(Debug, Clone, PartialEq)]
pub struct LcpProblem {
    matrix: DMatrix<f64>,
    bias: DVector<f64>,
}

impl LcpProblem {
    /// Validates squareness, matching lengths and finiteness.
    pub fn new(matrix: DMatrix<f64>, bias: DVector<f64>) -> Result<Self, LcpError> {
        if matrix.nrows() != matrix.ncols() {
            return Err(LcpError::NotSquare {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        if matrix.nrows() != bias.len() {
            return Err(LcpError::DimensionMismatch {
                n: matrix.nrows(),
                len: bias.len(),
            });
        }
        if matrix.iter().any(|v| !v.is_finite()) || bias.iter().any(|v| !v.is_finite()) {
            return Err(LcpError::NonFinite);
        }
        Ok(Self { matrix, bias })
    }

    pub fn size(&self) -> usize {
        self.bias.len()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn bias(&self) -> &DVector<f64> {
        &self.bias
    }

    /// Slack `w = V z + p` for a candidate `z`.
    pub fn slack(&self, z: &DVector<f64>) -> DVector<f64> {
        &self.matrix * z + &self.bias
    }
}

/// Outcome classification of a solve attempt.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LcpStatus {
    /// `z` satisfies nonnegativity and complementarity at the tolerance.
    Solved,
    /// The pivoting ray left the feasible region (secondary ray), or no
    /// active index set admits a feasible candidate.
    Infeasible,
    /// The pivot budget ran out before termination.
    IterationLimit,
}

/// Solution candidate plus its slack and status.
#[derive(Debug, Clone)]
pub struct LcpSolution {
    pub z: DVector<f64>,
    pub w: DVector<f64>,
    pub status: LcpStatus,
}

/// Scale-aware complementarity residual of a candidate `z`:
/// `max(||min(z,0)||_inf, ||min(w,0)||_inf, |z'w| / (1 + ||p||_inf))`.
pub fn complementarity_residual(problem: &LcpProblem, z: &DVector<f64>) -> f64 {
    let w = problem.slack(z);
    let neg_z = z.iter().fold(0.0f64, |m, &v| m.max(-v));
    let neg_w = w.iter().fold(0.0f64, |m, &v| m.max(-v));
    let bilinear = z.dot(&w).abs() / (1.0 + problem.bias.amax());
    neg_z.max(neg_w).max(bilinear)
}

/// True iff `z` is feasible and the bilinear objective `z'(Vz + p)` sits at
/// its extremal feasible value 0, within `tol`. This is the optimality
/// certificate for the complementarity program: both factors are
/// constrained nonnegative, so the objective is bounded below by zero and
/// a complementary point attains it.
pub fn check_qp_optimality(problem: &LcpProblem, z: &DVector<f64>, tol: f64) -> bool {
    assert_eq!(problem.size(), z.len(), "dimension mismatch");
    complementarity_residual(problem, z) <= tol
}

/// Lemke's complementary pivoting method with a covering vector of ones
/// and lexicographic tie-breaking for degenerate pivots.
///
/// Deterministic: identical inputs produce identical outputs. If `p >= 0`
/// elementwise the trivial solution `z = 0` is returned without pivoting.
pub fn solve_lemke(problem: &LcpProblem, tol: f64, max_pivots: usize) -> LcpSolution {
    assert!(tol > 0.0, "tolerance must be positive");
    let n = problem.size();
    if n == 0 {
        return LcpSolution {
            z: DVector::zeros(0),
            w: DVector::zeros(0),
            status: LcpStatus::Solved,
        };
    }
    if problem.bias.iter().all(|&v| v >= 0.0) {
        return LcpSolution {
            z: DVector::zeros(n),
            w: problem.bias.clone(),
            status: LcpStatus::Solved,
        };
    }

    // Tableau for  I w - V z - d z0 = p  with d = ones.
    // Columns: [0, n) -> w_i, [n, 2n) -> z_i, 2n -> z0, 2n+1 -> rhs.
    let z0 = 2 * n;
    let rhs = 2 * n + 1;
    let mut t = DMatrix::<f64>::zeros(n, 2 * n + 2);
    for i in 0..n {
        t[(i, i)] = 1.0;
        for j in 0..n {
            t[(i, n + j)] = -problem.matrix[(i, j)];
        }
        t[(i, z0)] = -1.0;
        t[(i, rhs)] = problem.bias[i];
    }
    let mut basis: Vec<usize> = (0..n).collect();

    // First pivot is special: z0 enters at the most negative rhs row,
    // which makes the right-hand side nonnegative.
    let mut row = 0;
    for i in 1..n {
        if t[(i, rhs)] < t[(row, rhs)] {
            row = i;
        }
    }
    pivot(&mut t, row, z0);
    let mut leaving = basis[row];
    basis[row] = z0;

    for _ in 0..max_pivots {
        // Drive in the complement of whatever just left the basis.
        let entering = if leaving < n { leaving + n } else { leaving - n };

        let Some(row) = lexicographic_ratio_row(&t, entering, n) else {
            return extract(problem, &t, &basis, LcpStatus::Infeasible);
        };
        pivot(&mut t, row, entering);
        leaving = basis[row];
        basis[row] = entering;

        if leaving == z0 {
            return extract(problem, &t, &basis, LcpStatus::Solved);
        }
    }
    extract(problem, &t, &basis, LcpStatus::IterationLimit)
}

/// Gauss-Jordan pivot on (row, col).
fn pivot(t: &mut DMatrix<f64>, row: usize, col: usize) {
    let pv = t[(row, col)];
    let ncols = t.ncols();
    for c in 0..ncols {
        t[(row, c)] /= pv;
    }
    for r in 0..t.nrows() {
        if r == row {
            continue;
        }
        let factor = t[(r, col)];
        if factor != 0.0 {
            for c in 0..ncols {
                t[(r, c)] -= factor * t[(row, c)];
            }
        }
    }
}

/// Minimum-ratio row for the entering column, ties broken by comparing
/// the rows of (rhs | basis inverse) lexicographically. Returns None when
/// the entering column has no positive entry (ray termination).
fn lexicographic_ratio_row(t: &DMatrix<f64>, entering: usize, n: usize) -> Option<usize> {
    let rhs = 2 * n + 1;
    let mut best: Option<usize> = None;
    for i in 0..t.nrows() {
        let piv = t[(i, entering)];
        if piv <= NEAR_SINGULAR_PIVOT {
            continue;
        }
        best = Some(match best {
            None => i,
            Some(b) => {
                // Compare (rhs, w-columns)/pivot componentwise; the
                // w-columns hold the inverse of the current basis, whose
                // rows are independent, so a full tie cannot occur.
                let bp = t[(b, entering)];
                let mut choose_i = false;
                for c in std::iter::once(rhs).chain(0..n) {
                    let a = t[(i, c)] / piv;
                    let bv = t[(b, c)] / bp;
                    let scale = 1.0f64.max(a.abs()).max(bv.abs());
                    if (a - bv).abs() <= 1e-12 * scale {
                        continue;
                    }
                    choose_i = a < bv;
                    break;
                }
                if choose_i {
                    i
                } else {
                    b
                }
            }
        });
    }
    best
}

fn extract(
    problem: &LcpProblem,
    t: &DMatrix<f64>,
    basis: &[usize],
    status: LcpStatus,
) -> LcpSolution {
    let n = problem.size();
    let rhs = 2 * n + 1;
    let mut z = DVector::zeros(n);
    for (row, &var) in basis.iter().enumerate() {
        if (n..2 * n).contains(&var) {
            z[var - n] = t[(row, rhs)];
        }
    }
    let w = problem.slack(&z);
    LcpSolution { z, w, status }
}

/// Brute-force oracle: tries every active index set `a`, solves
/// `V_aa z_a = -p_a` with `z` zero elsewhere, and accepts the first
/// candidate with `z >= -tol` and `w >= -tol`. Exponential in n, so the
/// problem size is capped.
///
/// Singular (or numerically unreliable) principal submatrices are
/// skipped, not fatal.
pub fn solve_enumeration(problem: &LcpProblem, tol: f64) -> LcpSolution {
    let n = problem.size();
    assert!(n <= 20, "enumeration is exponential; n must be <= 20");

    for mask in 0u32..(1u32 << n) {
        let active: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let k = active.len();
        let mut z = DVector::zeros(n);
        if k > 0 {
            let sub = DMatrix::from_fn(k, k, |r, c| problem.matrix[(active[r], active[c])]);
            let neg_p = DVector::from_fn(k, |r, _| -problem.bias[active[r]]);
            let Some(sol) = sub.clone().lu().solve(&neg_p) else {
                continue;
            };
            // Guard against near-singular blocks that LU "solved" badly.
            let residual = (&sub * &sol - &neg_p).amax();
            if residual > 1e-9 * (1.0 + neg_p.amax()) {
                continue;
            }
            for (slot, &idx) in active.iter().enumerate() {
                z[idx] = sol[slot];
            }
        }
        let w = problem.slack(&z);
        if z.iter().all(|&v| v >= -tol) && w.iter().all(|&v| v >= -tol) {
            return LcpSolution {
                z,
                w,
                status: LcpStatus::Solved,
            };
        }
    }
    LcpSolution {
        z: DVector::zeros(n),
        w: problem.bias.clone(),
        status: LcpStatus::Infeasible,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn problem(matrix: &[f64], n: usize, bias: &[f64]) -> LcpProblem {
        LcpProblem::new(
            DMatrix::from_row_slice(n, n, matrix),
            DVector::from_row_slice(bias),
        )
        .unwrap()
    }

    /// Random positive-definite test problem: V = A'A + 1e-3 I.
    fn random_problem(rng: &mut ChaCha8Rng, n: usize) -> LcpProblem {
        let a = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
        let v = a.transpose() * &a + DMatrix::identity(n, n) * 1e-3;
        let p = DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
        LcpProblem::new(v, p).unwrap()
    }

    #[test]
    fn rejects_bad_dimensions() {
        assert!(matches!(
            LcpProblem::new(DMatrix::zeros(2, 3), DVector::zeros(2)),
            Err(LcpError::NotSquare { .. })
        ));
        assert!(matches!(
            LcpProblem::new(DMatrix::zeros(2, 2), DVector::zeros(3)),
            Err(LcpError::DimensionMismatch { .. })
        ));
        assert!(matches!(
            LcpProblem::new(DMatrix::from_element(1, 1, f64::NAN), DVector::zeros(1)),
            Err(LcpError::NonFinite)
        ));
    }

    #[test]
    fn lemke_trivial_when_bias_nonnegative() {
        let p = problem(&[1.0], 1, &[1.0]);
        let sol = solve_lemke(&p, DEFAULT_TOL, DEFAULT_MAX_PIVOTS);
        assert_eq!(sol.status, LcpStatus::Solved);
        assert_eq!(sol.z[0], 0.0);
        assert_eq!(sol.w[0], 1.0);
    }

    #[test]
    fn lemke_scalar_negative_bias() {
        let p = problem(&[1.0], 1, &[-1.0]);
        let sol = solve_lemke(&p, DEFAULT_TOL, DEFAULT_MAX_PIVOTS);
        assert_eq!(sol.status, LcpStatus::Solved);
        assert_relative_eq!(sol.z[0], 1.0, epsilon = 1e-12);
        assert_relative_eq!(sol.w[0], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn lemke_two_by_two_matches_enumeration() {
        let p = problem(&[2.0, 1.0, 1.0, 2.0], 2, &[-1.0, -1.0]);
        let oracle = solve_enumeration(&p, DEFAULT_TOL);
        assert_eq!(oracle.status, LcpStatus::Solved);
        // Oracle-computed values, frozen: the only feasible active set is
        // {0, 1}, giving z = (1/3, 1/3) and w = 0.
        assert_relative_eq!(oracle.z[0], 1.0 / 3.0, epsilon = 1e-12);
        assert_relative_eq!(oracle.z[1], 1.0 / 3.0, epsilon = 1e-12);

        let sol = solve_lemke(&p, DEFAULT_TOL, DEFAULT_MAX_PIVOTS);
        assert_eq!(sol.status, LcpStatus::Solved);
        assert_relative_eq!(sol.z[0], 1.0 / 3.0, epsilon = 1e-10);
        assert_relative_eq!(sol.z[1], 1.0 / 3.0, epsilon = 1e-10);
        assert!(sol.w.amax() < 1e-10);
    }

    #[test]
    fn enumeration_examples() {
        let sol = solve_enumeration(&problem(&[1.0], 1, &[1.0]), DEFAULT_TOL);
        assert_eq!(sol.status, LcpStatus::Solved);
        assert_eq!(sol.z[0], 0.0);

        let sol = solve_enumeration(&problem(&[0.0], 1, &[-1.0]), DEFAULT_TOL);
        assert_eq!(sol.status, LcpStatus::Infeasible);
    }

    #[test]
    fn lemke_ray_termination() {
        let sol = solve_lemke(&problem(&[0.0], 1, &[-1.0]), DEFAULT_TOL, DEFAULT_MAX_PIVOTS);
        assert_eq!(sol.status, LcpStatus::Infeasible);
    }

    #[test]
    fn lemke_pivot_budget_exhaustion() {
        let p = problem(&[2.0, 1.0, 1.0, 2.0], 2, &[-1.0, -1.0]);
        let sol = solve_lemke(&p, DEFAULT_TOL, 0);
        assert_eq!(sol.status, LcpStatus::IterationLimit);
    }

    #[test]
    fn qp_optimality_examples() {
        let p = problem(&[1.0], 1, &[-1.0]);
        assert!(check_qp_optimality(&p, &DVector::from_row_slice(&[1.0]), DEFAULT_TOL));

        let p = problem(&[1.0], 1, &[1.0]);
        assert!(!check_qp_optimality(&p, &DVector::from_row_slice(&[1.0]), DEFAULT_TOL));

        let p = problem(&[2.0, 1.0, 1.0, 2.0], 2, &[-1.0, -1.0]);
        let z = DVector::from_row_slice(&[1.0 / 3.0, 1.0 / 3.0]);
        assert!(check_qp_optimality(&p, &z, DEFAULT_TOL));
    }

    #[test]
    fn oracle_agreement_on_random_problems() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for trial in 0..200 {
            let n = rng.gen_range(1..=6);
            let p = random_problem(&mut rng, n);
            let lemke = solve_lemke(&p, DEFAULT_TOL, DEFAULT_MAX_PIVOTS);
            let brute = solve_enumeration(&p, DEFAULT_TOL);
            assert_eq!(lemke.status, LcpStatus::Solved, "trial {trial}");
            assert_eq!(brute.status, LcpStatus::Solved, "trial {trial}");
            assert!(check_qp_optimality(&p, &lemke.z, DEFAULT_TOL), "trial {trial}");
            assert!(check_qp_optimality(&p, &brute.z, DEFAULT_TOL), "trial {trial}");
        }
    }

    #[test]
    fn deterministic_repeat_solves() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let p = random_problem(&mut rng, 5);
        let a = solve_lemke(&p, DEFAULT_TOL, DEFAULT_MAX_PIVOTS);
        let b = solve_lemke(&p, DEFAULT_TOL, DEFAULT_MAX_PIVOTS);
        assert_eq!(a.z.as_slice(), b.z.as_slice());
        assert_eq!(a.w.as_slice(), b.w.as_slice());
    }

    #[test]
    fn scaling_covariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for &scale in &[0.05, 0.5, 3.0, 40.0, 1000.0] {
            let base = random_problem(&mut rng, 4);
            let scaled = LcpProblem::new(base.matrix() * scale, base.bias() * scale).unwrap();
            let sol = solve_lemke(&scaled, DEFAULT_TOL, DEFAULT_MAX_PIVOTS);
            assert_eq!(sol.status, LcpStatus::Solved);
            // The same z must certify the unscaled problem.
            assert!(check_qp_optimality(&base, &sol.z, DEFAULT_TOL));
        }
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn spd_problem(n: usize) -> impl Strategy<Value = LcpProblem> {
            (
                proptest::collection::vec(-1.0..1.0f64, n * n),
                proptest::collection::vec(-1.0..1.0f64, n),
            )
                .prop_map(move |(a, p)| {
                    let a = DMatrix::from_vec(n, n, a);
                    let v = a.transpose() * &a + DMatrix::identity(n, n) * 1e-3;
                    LcpProblem::new(v, DVector::from_vec(p)).unwrap()
                })
        }

        proptest! {
            #[test]
            fn lemke_satisfies_complementarity(
                problem in (1usize..=5).prop_flat_map(spd_problem)
            ) {
                let sol = solve_lemke(&problem, DEFAULT_TOL, DEFAULT_MAX_PIVOTS);
                prop_assert_eq!(sol.status, LcpStatus::Solved);
                prop_assert!(complementarity_residual(&problem, &sol.z) <= DEFAULT_TOL);
            }

            #[test]
            fn positive_scaling_keeps_the_certificate(
                problem in (1usize..=4).prop_flat_map(spd_problem),
                scale in 0.01..100.0f64,
            ) {
                let scaled =
                    LcpProblem::new(problem.matrix() * scale, problem.bias() * scale).unwrap();
                let sol = solve_lemke(&scaled, DEFAULT_TOL, DEFAULT_MAX_PIVOTS);
                prop_assert_eq!(sol.status, LcpStatus::Solved);
                prop_assert!(check_qp_optimality(&problem, &sol.z, DEFAULT_TOL));
            }
        }
    }
}
