//! Posterior-predictive forecasting on the synthetic study: fit the joint
//! model on the 30 training days, forecast the 10 held-out days, and print
//! the 90% predictive intervals against the counts that were actually drawn.
//!
//! Usage: `cargo run --example forecast_intervals [seed]`

use epical::data::make_synthetic;
use epical::mcmc::{run_chain, ChainConfig, PriorConfig};
use epical::posterior::{predictive_samples, summarize};
use epical::sir::MeanModel;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let seed: u64 = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(2);
    let (train, test, _) = make_synthetic(seed);
    let cfg = ChainConfig {
        seed,
        ..ChainConfig::default()
    };
    let chain = run_chain(&train, &MeanModel::Test, &PriorConfig::default(), &cfg)
        .expect("sampler should run on the synthetic series");

    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xF0F0);
    let draws = predictive_samples(&test.x, &chain, &train, &MeanModel::Test, &mut rng)
        .expect("forecast the held-out days");

    println!("day   observed    mean   [ 5%, 95%]   covered");
    let mut hits = 0usize;
    for (i, (&day, &obs)) in test.days.iter().zip(&test.y).enumerate() {
        let ys: Vec<f64> = draws.iter().map(|d| d[i].y as f64).collect();
        let s = summarize(&ys, 0.90).unwrap();
        let covered = (obs as f64) >= s.lo && (obs as f64) <= s.hi;
        hits += covered as usize;
        println!(
            "{day:>3}   {obs:>6}    {:>6.1}   [{:>4.0}, {:>4.0}]   {}",
            s.mean,
            s.lo,
            s.hi,
            if covered { "yes" } else { "NO" }
        );
    }
    println!(
        "\n90% predictive intervals covered {hits}/{} held-out days",
        test.len()
    );
}
