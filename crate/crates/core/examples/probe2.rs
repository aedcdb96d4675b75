//! Development probe: full-state dump of the stalled phase.

use fisim::geometry::{is_illuminated, InspectionGrid, SunState};
use fisim::guidance::default_controller;
use fisim::sim::{run_episode, EpisodeConfig};

fn main() {
    let cfg = EpisodeConfig::default();
    let ctl = default_controller();
    let res = run_episode(&cfg, &ctl).unwrap();
    println!("insp={:.1}% dv={:.2}", res.inspection_rate, res.delta_v);
    for s in res.trajectory.iter().skip(100).step_by(20).take(14) {
        let lon = s.r.y.atan2(s.r.x).to_degrees();
        println!(
            "t={:5.0} r=({:7.1},{:7.1},{:7.1}) lon={:7.1} v=({:+.3},{:+.3},{:+.3}) f=({:+.3},{:+.3},{:+.3}) rate={:.1}",
            s.t, s.r.x, s.r.y, s.r.z, lon, s.v.x, s.v.y, s.v.z, s.force.x, s.force.y, s.force.z,
            s.cumulative_rate
        );
    }
    // Where are the leftover points at the end?
    let mut grid = InspectionGrid::generate(cfg.grid.points, cfg.grid.radius).unwrap();
    let n = cfg.body.mean_motion;
    for s in &res.trajectory {
        let sun = SunState { theta: cfg.sun.initial_angle - n * s.t, distance: cfg.sun.distance };
        grid.update_inspected(s.r, &s.q, &cfg.sensor, sun.position());
    }
    let theta_end = cfg.sun.initial_angle - n * cfg.duration;
    let sun_end = SunState { theta: theta_end, distance: cfg.sun.distance }.position();
    println!("sun end longitude: {:.1} deg", theta_end.to_degrees());
    for (i, p) in grid.points().iter().enumerate() {
        if !grid.inspected()[i] {
            println!(
                "  uninspected {}: lon={:7.1} z={:+6.2} lit_end={}",
                i,
                p.y.atan2(p.x).to_degrees(),
                p.z / cfg.grid.radius,
                is_illuminated(*p, sun_end)
            );
        }
    }
}
