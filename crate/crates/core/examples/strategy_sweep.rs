//! Adaptive vs uniform vs LHS sampling on the ACC safe set, several seeds.

use std::time::Instant;

use probreach::gpc::{GpcConfig, SamplingStrategy};
use probreach::scenario::AccScenario;
use probreach::SeededRng;

fn main() {
    let seeds: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    let scenario = AccScenario::default();
    let cfg = GpcConfig::default();
    for m in [50, 200] {
        for strategy in [
            SamplingStrategy::Adaptive,
            SamplingStrategy::Uniform,
            SamplingStrategy::LatinHypercube,
        ] {
            let start = Instant::now();
            let mut accs: Vec<f64> = (0..seeds)
                .map(|seed| {
                    let est = scenario
                        .estimate(strategy, m, 1000, &cfg, &SeededRng::new(seed))
                        .unwrap();
                    scenario.accuracy(&est, 200)
                })
                .collect();
            accs.sort_by(f64::total_cmp);
            println!(
                "m={m} {strategy:?}: median {:.4} all {:?} ({:.1?})",
                accs[accs.len() / 2],
                accs,
                start.elapsed()
            );
        }
    }
}
