//! Development probe: desk-scale training run.

use fisim::ga::{decode, encode, evolve, fitness, GaConfig};
use fisim::guidance::{default_controller, Controller};
use fisim::sim::{run_episode, training_scenarios};
use std::time::Instant;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let pop: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(40);
    let gens: usize = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(50);
    let n_scen: usize = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(2);
    let seed: u64 = args.get(4).and_then(|s| s.parse().ok()).unwrap_or(2024);
    let warm: bool = args.get(5).map(|s| s == "warm").unwrap_or(true);

    let scenarios: Vec<_> = training_scenarios().into_iter().take(n_scen).collect();
    let ctl = default_controller();
    let template = encode(&ctl.fis_x, &ctl.fis_y, &ctl.fis_z).unwrap();
    println!("warm-start fitness: {:.3}", fitness(&template, &scenarios));

    let cfg = GaConfig { population: pop, generations: gens, seed, ..Default::default() };
    let t0 = Instant::now();
    let init = warm.then_some(&template);
    let result = evolve(&cfg, &scenarios, init).unwrap();
    println!(
        "pop={pop} gens={gens} scen={n_scen} seed={seed} warm={warm}: best {:.3} in {:.1?}",
        result.best_fitness,
        t0.elapsed()
    );
    for (g, f) in result.history.iter().enumerate() {
        if g % 5 == 0 || g == result.history.len() - 1 {
            println!("  gen {g:>3}: {f:.3}");
        }
    }
    let [fx, fy, fz] = decode(&result.best).unwrap();
    let tuned = Controller::new(fx, fy, fz).unwrap();
    for (i, cfg) in scenarios.iter().enumerate() {
        let res = run_episode(cfg, &tuned).unwrap();
        println!(
            "scenario {i}: insp={:.2}% dv={:.3} min_d={:.1} max_d={:.1} coll={} corr={}",
            res.inspection_rate,
            res.delta_v,
            res.min_distance,
            res.max_distance,
            res.violations.collision,
            res.violations.corridor
        );
    }
}
