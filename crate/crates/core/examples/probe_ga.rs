//! Development probe: GA anneal-schedule sweep on the sphere objective.

use fisim::ga::{encode, evolve_with_objective, Chromosome, GaConfig};
use fisim::guidance::default_controller;
use std::time::Instant;

fn sphere(ch: &Chromosome) -> f64 {
    ch.reals
        .iter()
        .zip(ch.bounds.iter())
        .map(|(g, (lo, hi))| {
            let t = (g - lo) / (hi - lo) - 0.5;
            t * t
        })
        .sum::<f64>()
        / ch.reals.len() as f64
}

fn main() {
    let ctl = default_controller();
    let template = encode(&ctl.fis_x, &ctl.fis_y, &ctl.fis_z).unwrap();
    for (start, end) in [(0.10, 0.01), (0.10, 0.002), (0.05, 0.002), (0.10, 0.0005), (0.20, 0.001)] {
        for seed in [42u64, 7, 123] {
            let cfg = GaConfig {
                population: 50,
                generations: 100,
                mutation_scale_start: start,
                mutation_scale_end: end,
                seed,
                ..Default::default()
            };
            let t0 = Instant::now();
            let res = evolve_with_objective(&cfg, sphere, &template, None, |_, _, _| {}).unwrap();
            println!(
                "start={start:<5} end={end:<7} seed={seed:<4} best={:<12.6} ({:?})",
                res.best_fitness,
                t0.elapsed()
            );
        }
    }
}
