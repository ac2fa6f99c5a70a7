//! Fit the bundled city dataset through the library API and map the basic
//! reproduction number R₀(x) = β(x)/γ(x) across intervention levels at a
//! typical weather day — the "what does tightening restrictions buy" view.
//!
//! Usage: `cargo run --example r0_surface [city_dir] [seed]`
//! where `city_dir` holds `cases.csv` and `covariates.csv` (defaults to the
//! bundled springfield fixture).

use std::path::PathBuf;

use epical::data::{apply_infectious_shift, load_series, scale_covariates, CountKind};
use epical::mcmc::{run_chain, ChainConfig, PriorConfig};
use epical::posterior::{r0_samples, summarize};
use epical::sir::{Compartments, MeanModel, NegativeStateMode};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let dir = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/springfield")
    });
    let population = 800_000.0;
    let (raw, _) = load_series(
        &dir.join("cases.csv"),
        &dir.join("covariates.csv"),
        population,
        CountKind::Auto,
    )
    .expect("load the city series");
    let mut series = apply_infectious_shift(&raw, 11).expect("apply the 11-day shift");
    let ranges = scale_covariates(&mut series).expect("scale covariates");

    let i0 = (series.y[0] as f64).max(1.0);
    let model = MeanModel::Sir {
        init: Compartments::from_population(population, i0).unwrap(),
        mode: NegativeStateMode::Error,
    };
    let seed: u64 = std::env::args()
        .nth(2)
        .and_then(|s| s.parse().ok())
        .unwrap_or(1);
    let cfg = ChainConfig {
        seed,
        ..ChainConfig::default()
    };
    println!("fitting {} ({} training days)...", series.city, series.len());
    let chain = run_chain(&series, &model, &PriorConfig::default(), &cfg)
        .expect("sampler should run on the city series");

    // median training day as the base covariate, in natural units
    let d = series.dim();
    let mut base = vec![0.0; d];
    for j in 0..d {
        let mut col: Vec<f64> = series.x.iter().map(|r| r[j]).collect();
        col.sort_by(|a, b| a.partial_cmp(b).unwrap());
        base[j] = col[col.len() / 2];
    }
    let intervention = series
        .factor_names
        .iter()
        .position(|n| n == "intervention")
        .expect("intervention factor present");

    println!("\nR0 at the median weather day, by intervention level:");
    println!("level   median   [2.5%, 97.5%]");
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for level in 0..=3 {
        // query point: base day with the intervention pinned, rescaled to the
        // kernel domain through the stored training ranges
        let mut natural = ranges.unscale_row(&base);
        natural[intervention] = level as f64;
        let q = ranges.scale_row(&natural);
        let draws = r0_samples(&q, &chain, &series.x, &mut rng).expect("query R0");
        let r0s: Vec<f64> = draws.iter().map(|s| s.r0).collect();
        let s = summarize(&r0s, 0.95).unwrap();
        println!(
            "  {level}     {:.3}   [{:.3}, {:.3}]",
            s.median, s.lo, s.hi
        );
    }
}
