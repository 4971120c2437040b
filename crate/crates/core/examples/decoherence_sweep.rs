//! Prints variance, mean and mode count of the decohered walk for a range of
//! measurement probabilities at t = 100, p = 0.5.

use std::time::Instant;

use cqwalk::decoherence::count_modes;
use cqwalk::{run_ensemble, DecoherenceConfig};

fn main() {
    let trials = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(100_000);
    println!("q,mean,variance,variance_se,modes,seconds");
    for q in [0.0, 0.05, 0.1, 0.25, 0.4, 0.6, 0.7, 0.8, 0.9, 1.0] {
        let start = Instant::now();
        let config = DecoherenceConfig::new(0.5, q, 100, trials, 42).unwrap();
        let r = run_ensemble(&config).unwrap();
        println!(
            "{q},{:.4},{:.3},{:.3},{},{:.2}",
            r.mean,
            r.variance,
            r.variance_std_error(),
            count_modes(&r.empirical_pmf).unwrap(),
            start.elapsed().as_secs_f64()
        );
    }
}
