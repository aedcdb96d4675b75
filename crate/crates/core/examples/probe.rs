//! Development probe: prints closed-loop episode internals.

use fisim::guidance::default_controller;
use fisim::sim::{run_episode, EpisodeConfig};

fn main() {
    let cfg = EpisodeConfig::default();
    let ctl = default_controller();
    let res = run_episode(&cfg, &ctl).unwrap();
    println!(
        "delta_v={:.3} insp={:.1}% mean={:.1} min={:.1} max={:.1} viol={:?} drift={:.2e} diverged={}",
        res.delta_v,
        res.inspection_rate,
        res.mean_distance,
        res.min_distance,
        res.max_distance,
        res.violations,
        res.quat_drift,
        res.diverged
    );
    for s in res.trajectory.iter().step_by(30) {
        let b_hill = s.q.dcm().transpose() * cfg.sensor.boresight;
        let want = -s.r.normalize();
        let point_err = b_hill.dot(&want).clamp(-1.0, 1.0).acos().to_degrees();
        println!(
            "t={:6.0} |r|={:7.2} rate={:6.2}% new={:2} pt_err={:6.2}deg |w|={:.4} f=({:+.3},{:+.3},{:+.3}) tau=({:+.4},{:+.4},{:+.4})",
            s.t,
            s.r.norm(),
            s.cumulative_rate,
            s.newly_inspected,
            point_err,
            s.w.norm(),
            s.force.x,
            s.force.y,
            s.force.z,
            s.torque.x,
            s.torque.y,
            s.torque.z,
        );
    }
}
