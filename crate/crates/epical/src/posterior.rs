//! Posterior functionals: R₀(x) draws, posterior-predictive forecasts, and
//! summary statistics.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::data::{fmt_f64, ObservationSeries};
use crate::error::{Error, Result};
use crate::gp::{conditional_bg, inv_logit, CovStructure};
use crate::mcmc::ChainSamples;
use crate::sir::{sir_step, MeanModel, ParamPath};

/// One draw of the parameter surfaces and R₀ at a query covariate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceDraw {
    pub beta: f64,
    pub gamma: f64,
    pub r0: f64,
}

/// One posterior-predictive draw for a future day.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictiveDraw {
    pub y: u64,
    pub lambda: f64,
}

/// Sample (β(x), γ(x), R₀(x)) at each query point for every stored draw.
/// Returns one vector per query point, each with one entry per chain draw.
pub fn r0_surface<R: Rng>(
    points: &[Vec<f64>],
    chain: &ChainSamples,
    x_train: &[Vec<f64>],
    rng: &mut R,
) -> Result<Vec<Vec<SurfaceDraw>>> {
    if chain.draws.is_empty() {
        return Err(Error::EmptyDraws);
    }
    let mut out = vec![Vec::with_capacity(chain.draws.len()); points.len()];
    for draw in &chain.draws {
        let cov = CovStructure::build(x_train, &draw.psi.phi)?;
        for (slot, x) in out.iter_mut().zip(points) {
            let bn = conditional_bg(x, &draw.beta, &draw.gamma, &draw.psi, &cov, x_train)?;
            let z = bn.sample(rng);
            let beta = inv_logit(z[0]);
            let gamma = inv_logit(z[1]);
            slot.push(SurfaceDraw {
                beta,
                gamma,
                r0: beta / gamma,
            });
        }
    }
    Ok(out)
}

/// R₀ draws at a single query covariate (scaled like the training rows).
pub fn r0_samples<R: Rng>(
    x: &[f64],
    chain: &ChainSamples,
    x_train: &[Vec<f64>],
    rng: &mut R,
) -> Result<Vec<SurfaceDraw>> {
    Ok(r0_surface(std::slice::from_ref(&x.to_vec()), chain, x_train, rng)?
        .pop()
        .expect("one query point"))
}

/// Posterior-predictive draws over an h-day horizon.
///
/// Per stored draw: roll the model through the training days with that draw's
/// parameter path, then for each future day sample (β, γ) at the forecast
/// covariates from the GP conditional, extend the trajectory one day, and draw
/// y ~ Poisson(λ). Returns draw-major results: `out[draw][day]`.
pub fn predictive_samples<R: Rng>(
    x_future: &[Vec<f64>],
    chain: &ChainSamples,
    data: &ObservationSeries,
    model: &MeanModel,
    rng: &mut R,
) -> Result<Vec<Vec<PredictiveDraw>>> {
    if chain.draws.is_empty() {
        return Err(Error::EmptyDraws);
    }
    let h = x_future.len();
    let last_day = *data.days.last().ok_or(Error::EmptyDraws)?;
    let mut out = Vec::with_capacity(chain.draws.len());
    for draw in &chain.draws {
        let cov = CovStructure::build(&data.x, &draw.psi.phi)?;
        // roll the SIR trajectory through the training window
        let mut state = match model {
            MeanModel::Sir { init, mode } => {
                let mut c = *init;
                let path = ParamPath::new(draw.beta.clone(), draw.gamma.clone())?;
                for (&b, &g) in path.beta().iter().zip(path.gamma()) {
                    c = sir_step(&c, b, g, *mode)?;
                }
                Some(c)
            }
            MeanModel::Test => None,
        };
        let mut days = Vec::with_capacity(h);
        for (i, x) in x_future.iter().enumerate() {
            let bn = conditional_bg(x, &draw.beta, &draw.gamma, &draw.psi, &cov, &data.x)?;
            let z = bn.sample(rng);
            let beta = inv_logit(z[0]);
            let gamma = inv_logit(z[1]);
            let day = last_day + i + 1;
            let lambda = match &mut state {
                Some(c) => {
                    let next = sir_step(
                        c,
                        beta,
                        gamma,
                        match model {
                            MeanModel::Sir { mode, .. } => *mode,
                            MeanModel::Test => unreachable!(),
                        },
                    )?;
                    let lam = c.s - next.s;
                    *c = next;
                    lam
                }
                None => MeanModel::day_mean(beta, gamma, day, None),
            };
            if !(lambda > 0.0) {
                return Err(Error::NonpositiveMean { day, value: lambda });
            }
            let y = Poisson::new(lambda)
                .map_err(|_| Error::NonpositiveMean { day, value: lambda })?
                .sample(rng) as u64;
            days.push(PredictiveDraw { y, lambda });
        }
        out.push(days);
    }
    Ok(out)
}

/// Empirical summary with an equal-tailed credible interval at level `q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub mean: f64,
    pub median: f64,
    pub lo: f64,
    pub hi: f64,
}

/// Linear-interpolation (type-7) empirical quantile.
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n as f64 - 1.0) * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    let w = h - lo as f64;
    sorted[lo] * (1.0 - w) + sorted[hi] * w
}

/// Mean, median, and equal-tailed interval at level `q` (e.g. 0.95).
pub fn summarize(draws: &[f64], q: f64) -> Result<Summary> {
    if draws.is_empty() {
        return Err(Error::EmptyDraws);
    }
    let mut sorted = draws.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mean = sorted.iter().sum::<f64>() / sorted.len() as f64;
    let alpha = (1.0 - q) / 2.0;
    Ok(Summary {
        mean,
        median: quantile(&sorted, 0.5),
        lo: quantile(&sorted, alpha),
        hi: quantile(&sorted, 1.0 - alpha),
    })
}

/// Posterior-mean fitted curve: the mean over draws of the model's daily means.
pub fn fitted_curve(chain: &ChainSamples, data: &ObservationSeries, model: &MeanModel) -> Result<Vec<f64>> {
    if chain.draws.is_empty() {
        return Err(Error::EmptyDraws);
    }
    let first_day = data.days[0];
    let mut acc = vec![0.0; data.len()];
    let mut used = 0usize;
    for draw in &chain.draws {
        let path = ParamPath::new(draw.beta.clone(), draw.gamma.clone())?;
        if let Ok(curve) = model.mean_curve(&path, first_day) {
            for (a, l) in acc.iter_mut().zip(&curve) {
                *a += l;
            }
            used += 1;
        }
    }
    if used == 0 {
        return Err(Error::EmptyDraws);
    }
    for a in &mut acc {
        *a /= used as f64;
    }
    Ok(acc)
}

/// Write per-day forecast summaries as `day,mean,median,lo,hi`.
pub fn write_forecast(path: &Path, first_day: usize, per_day: &[Summary]) -> Result<()> {
    let mut out = String::from("day,mean,median,lo,hi\n");
    for (i, s) in per_day.iter().enumerate() {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            first_day + i,
            fmt_f64(s.mean),
            fmt_f64(s.median),
            fmt_f64(s.lo),
            fmt_f64(s.hi)
        );
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Write every predictive draw as `day,draw,lambda,y`.
pub fn write_forecast_draws(
    path: &Path,
    first_day: usize,
    draws: &[Vec<PredictiveDraw>],
) -> Result<()> {
    let mut out = String::from("day,draw,lambda,y\n");
    for (d, days) in draws.iter().enumerate() {
        for (i, pd) in days.iter().enumerate() {
            let _ = writeln!(out, "{},{},{},{}", first_day + i, d, fmt_f64(pd.lambda), pd.y);
        }
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gp::Hyperparams;
    use crate::mcmc::Draw;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn toy_chain(n_draws: usize, beta: f64, gamma: f64) -> ChainSamples {
        let draws = (0..n_draws)
            .map(|_| Draw {
                beta: vec![beta, beta],
                gamma: vec![gamma, gamma],
                psi: Hyperparams {
                    rho: 0.3,
                    phi: vec![0.6],
                    mu1: 0.0,
                    mu2: 0.0,
                    tau: 0.5,
                },
            })
            .collect();
        ChainSamples {
            draws,
            acceptance: Vec::new(),
        }
    }

    fn toy_train() -> Vec<Vec<f64>> {
        vec![vec![0.2], vec![0.8]]
    }

    #[test]
    fn summarize_basics() {
        let s = summarize(&[3.0, 3.0, 3.0], 0.95).unwrap();
        assert_eq!(s.lo, s.hi);
        assert_eq!(s.mean, 3.0);

        let draws: Vec<f64> = (1..=100).map(|v| v as f64).collect();
        let s = summarize(&draws, 0.9).unwrap();
        assert_relative_eq!(s.lo, 5.95, epsilon = 1e-12);
        assert_relative_eq!(s.hi, 95.05, epsilon = 1e-12);

        assert!(summarize(&[], 0.9).is_err());
    }

    #[test]
    fn summarize_standard_normal_mean() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let draws: Vec<f64> = (0..10_000)
            .map(|_| rand_distr::StandardNormal.sample(&mut rng))
            .collect();
        let s = summarize(&draws, 0.95).unwrap();
        assert!(s.mean.abs() < 0.05);
    }

    #[test]
    fn r0_ratio_identity() {
        // β = γ at every training point and τ ≈ 0: every R₀ draw is 1
        let mut chain = toy_chain(50, 0.4, 0.4);
        for d in &mut chain.draws {
            d.psi.tau = 1e-18;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let draws = r0_samples(&[0.5], &chain, &toy_train(), &mut rng).unwrap();
        for s in draws {
            assert_relative_eq!(s.r0, 1.0, epsilon = 1e-6);
        }
    }

    #[test]
    fn r0_concentrates_at_training_point() {
        let chain = toy_chain(400, 0.55, 0.3);
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let train = toy_train();
        let draws = r0_samples(&train[0], &chain, &train, &mut rng).unwrap();
        let betas: Vec<f64> = draws.iter().map(|s| s.beta).collect();
        let s = summarize(&betas, 0.95).unwrap();
        // interpolation at a design point: mean within 2 posterior sd of the draw value
        let sd = (betas.iter().map(|b| (b - s.mean).powi(2)).sum::<f64>() / betas.len() as f64)
            .sqrt();
        assert!((s.mean - 0.55).abs() < 2.0 * sd.max(1e-6));
    }

    #[test]
    fn r0_draws_match_direct_conditional_sampling() {
        // independent resampling oracle on an n = 2 toy chain with hand-set draws
        let chain = toy_chain(2000, 0.5, 0.25);
        let train = toy_train();
        let x = [0.4];
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        let draws = r0_samples(&x, &chain, &train, &mut rng).unwrap();

        let mut rng2 = ChaCha8Rng::seed_from_u64(777);
        let d0 = &chain.draws[0];
        let cov = CovStructure::build(&train, &d0.psi.phi).unwrap();
        let bn = conditional_bg(&x, &d0.beta, &d0.gamma, &d0.psi, &cov, &train).unwrap();
        let oracle: Vec<f64> = (0..2000)
            .map(|_| {
                let z = bn.sample(&mut rng2);
                inv_logit(z[0]) / inv_logit(z[1])
            })
            .collect();
        let a = summarize(&draws.iter().map(|s| s.r0).collect::<Vec<_>>(), 0.9).unwrap();
        let b = summarize(&oracle, 0.9).unwrap();
        assert_relative_eq!(a.mean, b.mean, max_relative = 0.05);
        assert_relative_eq!(a.lo, b.lo, max_relative = 0.10);
        assert_relative_eq!(a.hi, b.hi, max_relative = 0.10);
    }

    #[test]
    fn r0_independent_rho_decorrelates_noise() {
        let mut chain = toy_chain(10_000, 0.5, 0.25);
        for d in &mut chain.draws {
            d.psi.rho = 0.0;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        let draws = r0_samples(&[0.5], &chain, &toy_train(), &mut rng).unwrap();
        // correlation of the conditional-noise components across draws
        let mb = draws.iter().map(|s| s.beta).sum::<f64>() / draws.len() as f64;
        let mg = draws.iter().map(|s| s.gamma).sum::<f64>() / draws.len() as f64;
        let (mut sbb, mut sgg, mut sbg) = (0.0, 0.0, 0.0);
        for s in &draws {
            sbb += (s.beta - mb).powi(2);
            sgg += (s.gamma - mg).powi(2);
            sbg += (s.beta - mb) * (s.gamma - mg);
        }
        let corr = sbg / (sbb * sgg).sqrt();
        assert!(corr.abs() < 0.05, "noise correlation {corr}");
    }

    #[test]
    fn predictive_mean_matches_lambda_mean() {
        // law of total expectation: mean of y draws ≈ mean of λ draws
        let chain = toy_chain(3000, 0.5, 0.3);
        let data = ObservationSeries {
            days: vec![1, 2],
            dates: None,
            y: vec![2, 3],
            x: toy_train(),
            population: 0.0,
            factor_names: vec!["x".to_owned()],
            city: "t".to_owned(),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(26);
        let out =
            predictive_samples(&[vec![0.5]], &chain, &data, &MeanModel::Test, &mut rng).unwrap();
        let ys: Vec<f64> = out.iter().map(|d| d[0].y as f64).collect();
        let lams: Vec<f64> = out.iter().map(|d| d[0].lambda).collect();
        let my = ys.iter().sum::<f64>() / ys.len() as f64;
        let ml = lams.iter().sum::<f64>() / lams.len() as f64;
        // within 3 standard errors (Poisson variance plus λ spread)
        let se = (lams.iter().map(|l| l + (l - ml).powi(2)).sum::<f64>()
            / (lams.len() as f64).powi(2))
        .sqrt();
        assert!((my - ml).abs() < 3.0 * se + 0.05, "my={my} ml={ml}");
    }

    #[test]
    fn quantile_edges() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile(&v, 0.0), 1.0);
        assert_eq!(quantile(&v, 1.0), 4.0);
        assert_relative_eq!(quantile(&v, 0.5), 2.5, epsilon = 1e-15);
    }
}
