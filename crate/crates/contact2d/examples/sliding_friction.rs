//! Slide a spinning-free ball along the ground and watch friction slow
//! it into rolling.
//!
//! During slip the tangential impulse sits on the friction cone, so the
//! center decelerates at mu * g while the spin builds up; once the
//! contact point stops slipping the ball rolls at constant speed.

use contact2d::contact::MaterialParams;
use contact2d::dynamics::BodyState;
use contact2d::sim::{self, BodySetup, IntegrationMode, Scenario, DEFAULT_CONTACT_THRESHOLD};
use contact2d::Shape;
use nalgebra::Vector3;

fn main() {
    let mu = 0.3;
    let scenario = Scenario {
        dt: 1e-3,
        horizon: 0.6,
        gravity: 9.81,
        integration: IntegrationMode::SemiImplicit,
        contact_threshold: DEFAULT_CONTACT_THRESHOLD,
        arena_half_width: f64::INFINITY,
        ground: Shape::ground(),
        bodies: vec![BodySetup::ball(
            0.04,
            0.2,
            MaterialParams::new(mu, 0.0),
            BodyState::new(Vector3::new(0.0, 0.2, 0.0), Vector3::new(2.0, 0.0, 0.0)),
        )],
        biped: None,
        kick: None,
    };
    let log = sim::run(scenario).unwrap();

    println!("ball sliding at 2 m/s, mu = {mu}");
    println!("{:>8} {:>10} {:>12} {:>14}", "t [s]", "vx [m/s]", "omega [1/s]", "slip [m/s]");
    for row in log.rows.iter().step_by(50) {
        let s = row.bodies[0].state;
        let slip = s.v.x + 0.2 * s.v.z;
        println!("{:>8.3} {:>10.4} {:>12.4} {:>14.6}", row.t, s.v.x, s.v.z, slip);
    }

    let rolling_at = 2.0 / (3.0 * mu * 9.81);
    println!("expected transition to rolling near t = {rolling_at:.3} s, decel mu*g = {:.3} m/s^2", mu * 9.81);
}
