//! Track a hip-angle step reference with the partially feedback
//! linearized controller.
//!
//! The hip torque cancels the coupled dynamics exactly, leaving the
//! commanded second-order error dynamics; with kp = 100, kd = 20 the
//! loop is critically damped at 10 rad/s.

use contact2d::biped::{
    bias_forces, biped_accel, mass_matrix, pfl_torque, BipedModel, ControllerGains,
    JointReference, JointState,
};
use contact2d::Shape;
use nalgebra::Vector2;

fn main() {
    let model = BipedModel::new(0.5, 1.0, 1.0, 0.5, 0.5 / 12.0, Shape::rectangle(0.1, 0.02));
    let gains = ControllerGains::new(100.0, 20.0);
    let dt = 1e-3;

    let mut joints = JointState::new(Vector2::new(0.0, 0.1), Vector2::zeros());
    let reference = JointReference { angle: 0.4, rate: 0.0, accel: 0.0 };

    println!("0.3 rad step on the hip angle, kp = 100, kd = 20");
    println!("{:>8} {:>12} {:>12} {:>12}", "t [s]", "theta2", "error", "torque");
    for step in 0..=2000 {
        let mass = mass_matrix(&model, joints.angles.y);
        let bias = bias_forces(&model, &joints, 9.81);
        let torque = pfl_torque(&model, &joints, &mass, &bias, &gains, &reference).unwrap();
        if step % 200 == 0 {
            println!(
                "{:>8.3} {:>12.6} {:>12.3e} {:>12.4}",
                step as f64 * dt,
                joints.angles.y,
                joints.angles.y - reference.angle,
                torque
            );
        }
        let accel = biped_accel(&model, &joints, torque, 9.81).unwrap();
        joints.rates += accel * dt;
        joints.angles += joints.rates * dt;
    }
}
