//! Generate a synthetic city dataset in the on-disk layout the CLI consumes:
//! `cases.csv` (date, cumulative count), `covariates.csv` (date + six daily
//! factors), and `future.csv` (a 14-day covariate forecast past the last case
//! date). The epidemic is rolled through the discrete SIR recursion with
//! covariate-driven rates and an 11-day reporting lag, so the files exercise
//! the full fit → predict → sensitivity → report pipeline.
//!
//! Usage: `cargo run --example make_city_data [seed] [out_dir]`

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use epical::data::SIR_FACTORS;
use epical::gp::inv_logit;
use epical::sir::{sir_step, Compartments, NegativeStateMode};

const DAYS: usize = 90;
const HORIZON: usize = 14;
const REPORT_LAG: usize = 11;
const POPULATION: f64 = 800_000.0;

/// Daily covariate rows: a seasonal drift plus noise per weather factor and a
/// week-by-week intervention level. The level is re-drawn weekly rather than
/// ramped monotonically so it is not confounded with the seasonal wave and
/// its effect on transmission stays identifiable.
fn covariates(rng: &mut ChaCha8Rng, days: usize) -> Vec<[f64; 6]> {
    let weeks = days / 7 + 1;
    let levels: Vec<f64> = (0..weeks).map(|_| rng.random_range(0..4) as f64).collect();
    (0..days)
        .map(|t| {
            let s = t as f64 / days as f64;
            let wave = (2.0 * std::f64::consts::PI * s).sin();
            [
                55.0 + 18.0 * wave + rng.random_range(-4.0..4.0),
                60.0 - 15.0 * wave + rng.random_range(-8.0..8.0),
                8.0 + 5.0 * (4.0 * s).sin().abs() + rng.random_range(0.0..4.0),
                1012.0 + 9.0 * (3.0 * s + 1.0).cos() + rng.random_range(-3.0..3.0),
                if rng.random::<f64>() < 0.3 { rng.random_range(0.0..1.2) } else { 0.0 },
                levels[t / 7],
            ]
        })
        .collect()
}

/// True transmission rate: falls with temperature and intervention level.
fn beta(x: &[f64; 6]) -> f64 {
    inv_logit(-1.0 - 0.035 * (x[0] - 55.0) - 0.35 * x[5] + 0.01 * (x[1] - 60.0))
}

/// True removal rate: mildly seasonal around 0.15.
fn gamma(x: &[f64; 6]) -> f64 {
    inv_logit(-1.75 + 0.012 * (x[0] - 55.0))
}

fn main() {
    let seed: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(7);
    let out = PathBuf::from(
        std::env::args().nth(2).unwrap_or_else(|| "city_data".to_owned()),
    );
    fs::create_dir_all(&out).expect("create output directory");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // infections on day t are driven by that day's weather but reported
    // REPORT_LAG days later, matching the lag the fitting pipeline removes
    let x = covariates(&mut rng, DAYS + HORIZON + REPORT_LAG);
    let mut state = Compartments::from_population(POPULATION, 25.0).unwrap();
    let mut cases = String::from("date,count\n");
    let mut cov = String::from("date,");
    cov.push_str(&SIR_FACTORS.join(","));
    cov.push('\n');
    let mut future = cov.clone();

    let start = chrono::NaiveDate::from_ymd_opt(2024, 3, 1).unwrap();
    let mut cumulative = 0u64;
    for t in 0..DAYS + HORIZON {
        // reported date of the infections seeded on day t
        let date = start + chrono::Days::new((t + REPORT_LAG) as u64);
        let row = &x[t + REPORT_LAG];
        let line = format!(
            "{date},{:.2},{:.2},{:.2},{:.2},{:.2},{}\n",
            row[0], row[1], row[2], row[3], row[4], row[5]
        );
        if t < DAYS {
            let (b, g) = (beta(&x[t]), gamma(&x[t]));
            let lambda = (b * state.i * state.s / state.n).max(1e-9);
            let y = Poisson::new(lambda).unwrap().sample(&mut rng) as u64;
            cumulative += y;
            let _ = writeln!(cases, "{date},{cumulative}");
            cov.push_str(&line);
            state = sir_step(&state, b, g, NegativeStateMode::Clamp).unwrap();
        } else {
            future.push_str(&line);
        }
    }

    fs::write(out.join("cases.csv"), cases).expect("write cases.csv");
    fs::write(out.join("covariates.csv"), cov).expect("write covariates.csv");
    fs::write(out.join("future.csv"), future).expect("write future.csv");
    println!(
        "wrote cases.csv ({DAYS} days), covariates.csv, future.csv ({HORIZON} days) to {} \
         (population {POPULATION})",
        out.display()
    );
}
