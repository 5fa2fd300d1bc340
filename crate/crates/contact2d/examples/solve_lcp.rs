//! Solve a small complementarity problem two ways and certify both
//! answers.
//!
//! The system is w = V z + p with V positive definite, solved once with
//! the pivoting method and once by enumerating active index sets.

use contact2d::lcp::{
    check_qp_optimality, complementarity_residual, solve_enumeration, solve_lemke, LcpProblem,
    DEFAULT_MAX_PIVOTS, DEFAULT_TOL,
};
use nalgebra::{DMatrix, DVector};

fn main() {
    let problem = LcpProblem::new(
        DMatrix::from_row_slice(3, 3, &[2.0, 1.0, 0.0, 1.0, 2.0, 1.0, 0.0, 1.0, 2.0]),
        DVector::from_row_slice(&[-1.0, 0.5, -2.0]),
    )
    .unwrap();

    let lemke = solve_lemke(&problem, DEFAULT_TOL, DEFAULT_MAX_PIVOTS);
    let brute = solve_enumeration(&problem, DEFAULT_TOL);

    println!("pivoting:    status {:?}", lemke.status);
    println!("  z = {:?}", lemke.z.as_slice());
    println!("  w = {:?}", lemke.w.as_slice());
    println!("  residual   {:.3e}", complementarity_residual(&problem, &lemke.z));
    println!("enumeration: status {:?}", brute.status);
    println!("  z = {:?}", brute.z.as_slice());
    println!("  residual   {:.3e}", complementarity_residual(&problem, &brute.z));

    assert!(check_qp_optimality(&problem, &lemke.z, DEFAULT_TOL));
    assert!(check_qp_optimality(&problem, &brute.z, DEFAULT_TOL));
    println!("both candidates certify optimal (objective z'(Vz+p) = 0 at feasibility)");
}
