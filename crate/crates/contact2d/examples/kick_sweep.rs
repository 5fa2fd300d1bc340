//! Rerun the kick for torques 30..100 N·m and print the velocity table.
//!
//! The approach is identical for every entry, so the post-kick speed is
//! exactly proportional to the torque and the launch direction is fixed
//! by the strike geometry.

use contact2d::cli::run_sweep;
use contact2d::config::{KickConfig, RunConfig, SweepConfig};

fn main() {
    let mut config = RunConfig::new(0.01, 1.5);
    config.kick = Some(KickConfig { torque: 50.0, trigger_distance: 1.0 });
    config.sweep = Some(SweepConfig { start: 30.0, end: 100.0, step: 10.0 });

    let rows = run_sweep(&config, false).unwrap();
    println!("{:>8} {:>10} {:>10} {:>10} {:>14}", "tau", "vx", "vy", "vy/vx", "vx * 30/tau");
    for row in rows {
        let (vx, vy) = row.velocity.expect("kick landed");
        println!(
            "{:>8.1} {:>10.4} {:>10.4} {:>10.4} {:>14.6}",
            row.torque,
            vx,
            vy,
            vy / vx,
            vx * 30.0 / row.torque
        );
    }
}
