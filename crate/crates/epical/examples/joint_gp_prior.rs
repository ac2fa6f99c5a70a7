//! Draw paired surfaces from the joint GP prior on (logit β, logit γ) and
//! show what the hyperparameters do: the cross-correlation ρ couples the two
//! surfaces, and the kernel parameter φ sets how fast correlation decays with
//! distance (φ near 1 = very smooth, φ near 0 = nearly independent points).
//!
//! Usage: `cargo run --example joint_gp_prior [seed]`

use epical::gp::{correlation, sample_joint, CovStructure, Hyperparams};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let seed: u64 = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid: Vec<Vec<f64>> = (0..60).map(|i| vec![i as f64 / 59.0]).collect();

    println!("kernel decay K(0, h) for a few phi:");
    for phi in [0.99, 0.9, 0.5, 0.1] {
        let ks: Vec<String> = [0.1, 0.25, 0.5, 1.0]
            .iter()
            .map(|&h| format!("{:.3}", correlation(&[0.0], &[h], &[phi]).unwrap()))
            .collect();
        println!("  phi = {phi:<4}  h = 0.1/0.25/0.5/1.0 -> {}", ks.join(" / "));
    }

    // empirical cross-correlation between the two surfaces vs the prior rho
    println!("\nempirical corr(logit beta, logit gamma) over 400 prior draws:");
    for rho in [0.0, 0.5, 0.9, 0.99] {
        let psi = Hyperparams {
            rho,
            phi: vec![0.9],
            mu1: 0.0,
            mu2: 0.0,
            tau: 1.0,
        };
        let cov = CovStructure::build(&grid, &psi.phi).unwrap();
        let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
        for _ in 0..400 {
            let (v1, v2) = sample_joint(&cov, &psi, &mut rng);
            for (a, b) in v1.iter().zip(v2.iter()) {
                sxy += a * b;
                sxx += a * a;
                syy += b * b;
            }
        }
        println!("  rho = {rho:<4}  empirical {:.3}", sxy / (sxx * syy).sqrt());
    }

    // one joint draw, printed as curves on the probability scale
    let psi = Hyperparams {
        rho: 0.8,
        phi: vec![0.9],
        mu1: 0.0,
        mu2: 0.0,
        tau: 1.0,
    };
    let cov = CovStructure::build(&grid, &psi.phi).unwrap();
    let (v1, v2) = sample_joint(&cov, &psi, &mut rng);
    println!("\none joint draw (rho = 0.8, phi = 0.9), probability scale:");
    println!("  x      beta    gamma");
    for i in (0..grid.len()).step_by(6) {
        println!(
            "  {:.2}   {:.3}   {:.3}",
            grid[i][0],
            epical::gp::inv_logit(v1[i]),
            epical::gp::inv_logit(v2[i])
        );
    }
}
