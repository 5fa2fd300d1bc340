//! Full kick scenario at 50 N·m: the walker strides toward the resting
//! ball, the swing-through triggers, and the foot delivers the kick.

use contact2d::cli::kick_scenario;
use contact2d::config::{KickConfig, RunConfig};
use contact2d::sim::{self, measure_post_kick_velocity};

fn main() {
    let mut config = RunConfig::new(0.01, 1.5);
    config.kick = Some(KickConfig { torque: 50.0, trigger_distance: 1.0 });

    let log = sim::run(kick_scenario(&config, 50.0, false)).unwrap();
    let ball = log.body_index("ball").unwrap();
    let foot = log.body_index("foot").unwrap();

    println!("{:>7} {:>9} {:>9} {:>9} {:>9} {:>9}", "t [s]", "foot x", "foot y", "ball x", "ball vx", "torque");
    for row in log.rows.iter().step_by(5) {
        let f = row.bodies[foot].state;
        let b = row.bodies[ball].state;
        println!(
            "{:>7.2} {:>9.3} {:>9.3} {:>9.3} {:>9.3} {:>9.2}",
            row.t, f.q.x, f.q.y, b.q.x, b.v.x, row.torque
        );
    }

    let impact = log.rows.iter().find(|r| r.kick_impulse > 0.0).expect("kick happened");
    let (vx, vy) = measure_post_kick_velocity(&log).unwrap();
    println!();
    println!("kick at t = {:.2} s, impulse {:.4} N·s", impact.t, impact.kick_impulse);
    println!("ball leaves at vx = {vx:.3} m/s, vy = {vy:.3} m/s (vy/vx = {:.4})", vy / vx);
}
