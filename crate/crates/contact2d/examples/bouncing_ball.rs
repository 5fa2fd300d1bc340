//! Drop a ball and tabulate its bounces.
//!
//! Each impact is resolved at the velocity level, so successive rebound
//! speeds decay by the coefficient of restitution and the apexes by its
//! square.

use contact2d::contact::MaterialParams;
use contact2d::dynamics::BodyState;
use contact2d::sim::{self, BodySetup, IntegrationMode, Scenario, DEFAULT_CONTACT_THRESHOLD};
use contact2d::Shape;

fn main() {
    let restitution = 0.5;
    let radius = 0.2;
    let scenario = Scenario {
        dt: 1e-3,
        horizon: 3.0,
        gravity: 9.81,
        integration: IntegrationMode::SemiImplicit,
        contact_threshold: DEFAULT_CONTACT_THRESHOLD,
        arena_half_width: f64::INFINITY,
        ground: Shape::ground(),
        bodies: vec![BodySetup::ball(
            0.04,
            radius,
            MaterialParams::frictionless(restitution),
            BodyState::at_rest(0.0, 1.0 + radius),
        )],
        biped: None,
        kick: None,
    };
    let log = sim::run(scenario).unwrap();

    println!("drop from 1 m with restitution {restitution}");
    println!("{:>8} {:>12} {:>12} {:>12}", "bounce", "t [s]", "v_in [m/s]", "apex [m]");

    let mut bounce = 0usize;
    let mut i = 1;
    while i < log.rows.len() {
        let prev = &log.rows[i - 1].bodies[0].state;
        let here = &log.rows[i].bodies[0].state;
        if prev.v.y < 0.0 && here.v.y > 0.0 && log.rows[i].bodies[0].contacts > 0 {
            bounce += 1;
            // Apex of the flight that follows this impact.
            let mut apex = here.q.y - radius;
            let mut j = i;
            while j < log.rows.len() && log.rows[j].bodies[0].state.v.y > 0.0 {
                apex = apex.max(log.rows[j].bodies[0].state.q.y - radius);
                j += 1;
            }
            println!(
                "{bounce:>8} {:>12.3} {:>12.4} {:>12.4}",
                log.rows[i].t,
                -prev.v.y,
                apex
            );
            i = j;
        }
        i += 1;
        if bounce >= 6 {
            break;
        }
    }
}
