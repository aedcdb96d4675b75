//! Development probe: default-controller performance across scenarios.

use fisim::guidance::default_controller;
use fisim::sim::{
    monte_carlo, run_episode, training_scenarios, McParams,
};
use std::time::Instant;

fn main() {
    let ctl = default_controller();
    let t0 = Instant::now();
    for (i, cfg) in training_scenarios().iter().enumerate() {
        let res = run_episode(cfg, &ctl).unwrap();
        println!(
            "octant {i}: insp={:6.2}% dv={:6.2} min_d={:6.1} max_d={:6.1} coll={} corr={} drift={:.1e}",
            res.inspection_rate,
            res.delta_v,
            res.min_distance,
            res.max_distance,
            res.violations.collision,
            res.violations.corridor,
            res.quat_drift,
        );
    }
    println!("8 octants in {:.2?}", t0.elapsed());

    let base = fisim::sim::EpisodeConfig::default();
    let params = McParams { runs: 20, seed: 42, ..Default::default() };
    let t0 = Instant::now();
    let (runs, summary) = monte_carlo(&base, &ctl, &params).unwrap();
    println!(
        "MC20: dv={:.2}+-{:.2} insp={:.2}+-{:.2} dist={:.1}+-{:.1} ({:.2?})",
        summary.delta_v_mean,
        summary.delta_v_std,
        summary.inspection_rate_mean,
        summary.inspection_rate_std,
        summary.mean_distance_mean,
        summary.mean_distance_std,
        t0.elapsed()
    );
    let n_ok = runs.iter().filter(|r| r.inspection_rate >= 95.0).count();
    let n_coll = runs.iter().filter(|r| r.violations.collision).count();
    let worst = runs.iter().map(|r| r.min_distance).fold(f64::INFINITY, f64::min);
    println!("MC20: insp>=95 in {n_ok}/20, collisions {n_coll}, worst min_d {worst:.1}");
}
