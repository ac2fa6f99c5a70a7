//! Gibbs-within-Metropolis sampler for π(β, γ, ψ | data).
//!
//! One sweep updates, in order:
//! 1. the whole (β, γ) block by a Metropolis step whose proposal is colored by
//!    the prior covariance, c τ^{1/2} ([1,ρ;ρ,1] ⊗ K)^{1/2} Z,
//! 2. ρ and each φ_j by random walks on the log(−log) scale (with the Jacobian
//!    correction, so the stationary law is the intended posterior),
//! 3. (μ₁, μ₂) from its conjugate bivariate-normal conditional,
//! 4. τ from its conjugate inverse-gamma conditional.
//!
//! Step sizes adapt every 100 burn-in iterations and are frozen afterwards, so
//! the post-burn-in chain is time-homogeneous.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Normal, StandardNormal};

use crate::data::{fmt_f64, ObservationSeries};
use crate::error::{Error, Result};
use crate::gp::{
    cross_chol, inv_logit, joint_log_density, joint_quad_form, logit_vec, CovStructure,
    Hyperparams,
};
use crate::sir::{MeanModel, ParamPath};

/// Hyperprior constants for ψ.
#[derive(Debug, Clone, PartialEq)]
pub struct PriorConfig {
    /// Inverse-gamma shape for τ.
    pub a: f64,
    /// Inverse-gamma rate for τ.
    pub b: f64,
    /// Beta(1, b_ρ) shape for ρ.
    pub b_rho: f64,
    /// Beta(1, b_φ) shape for each φ_j.
    pub b_phi: f64,
    /// Normal prior means for (μ₁, μ₂).
    pub alpha1: f64,
    pub alpha2: f64,
    /// Normal prior variances for (μ₁, μ₂).
    pub sigma2_1: f64,
    pub sigma2_2: f64,
}

impl Default for PriorConfig {
    fn default() -> Self {
        PriorConfig {
            a: 0.01,
            b: 0.01,
            b_rho: 0.1,
            b_phi: 0.1,
            alpha1: 0.0,
            alpha2: 0.0,
            sigma2_1: 1.0,
            sigma2_2: 1.0,
        }
    }
}

impl PriorConfig {
    pub fn validate(&self) -> Result<()> {
        for &v in &[self.a, self.b, self.b_rho, self.b_phi, self.sigma2_1, self.sigma2_2] {
            if !(v > 0.0) {
                return Err(Error::Config(format!("prior constant must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// Run-length and reproducibility settings for one chain.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainConfig {
    pub burn_in: usize,
    pub samples: usize,
    /// Keep every `thin`-th post-burn-in draw.
    pub thin: usize,
    pub seed: u64,
    /// Fix ρ = 0 and skip its update (the independent-GP ablation).
    pub independent_gp: bool,
    pub target_accept: f64,
}

impl Default for ChainConfig {
    fn default() -> Self {
        ChainConfig {
            burn_in: 2000,
            samples: 2000,
            thin: 2,
            seed: 0,
            independent_gp: false,
            target_accept: 0.30,
        }
    }
}

impl ChainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.burn_in < 1 || self.samples < 1 || self.thin < 1 {
            return Err(Error::Config(
                "burn_in, samples and thin must all be at least 1".into(),
            ));
        }
        if !(self.target_accept > 0.0 && self.target_accept < 1.0) {
            return Err(Error::Config("target_accept must be in (0,1)".into()));
        }
        Ok(())
    }
}

/// One stored posterior draw.
#[derive(Debug, Clone, PartialEq)]
pub struct Draw {
    pub beta: Vec<f64>,
    pub gamma: Vec<f64>,
    pub psi: Hyperparams,
}

/// Post-burn-in, thinned draws plus per-block acceptance rates.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainSamples {
    pub draws: Vec<Draw>,
    /// (block name, acceptance rate) over the sampling phase.
    pub acceptance: Vec<(String, f64)>,
}

impl ChainSamples {
    pub fn n(&self) -> usize {
        self.draws.first().map_or(0, |d| d.beta.len())
    }

    pub fn dim(&self) -> usize {
        self.draws.first().map_or(0, |d| d.psi.phi.len())
    }
}

/// Log of the unnormalized posterior π(β, γ, ψ | data), dropping only terms
/// constant in every sampled quantity (the y! factorials and the fixed prior
/// normalizers). The Gaussian 2π constant is kept so oracles can match the
/// value, not just differences. Returns −∞ for parameter values the model
/// rejects (nonpositive means, degenerate trajectories, failed factorization).
pub fn log_unnorm_posterior(
    beta: &[f64],
    gamma: &[f64],
    psi: &Hyperparams,
    data: &ObservationSeries,
    model: &MeanModel,
    prior: &PriorConfig,
) -> f64 {
    let cov = match CovStructure::build(&data.x, &psi.phi) {
        Ok(c) => c,
        Err(_) => return f64::NEG_INFINITY,
    };
    let (lb, lg) = match (logit_vec(beta), logit_vec(gamma)) {
        (Ok(a), Ok(b)) => (a, b),
        _ => return f64::NEG_INFINITY,
    };
    log_post_parts(&lb, &lg, psi, &cov, data, model, prior)
}

fn poisson_loglik(
    lbeta: &DVector<f64>,
    lgamma: &DVector<f64>,
    data: &ObservationSeries,
    model: &MeanModel,
) -> Option<f64> {
    let beta: Vec<f64> = lbeta.iter().map(|&z| inv_logit(z)).collect();
    let gamma: Vec<f64> = lgamma.iter().map(|&z| inv_logit(z)).collect();
    let path = ParamPath::new(beta, gamma).ok()?;
    let first_day = *data.days.first()?;
    let lambda = model.mean_curve(&path, first_day).ok()?;
    let mut ll = 0.0;
    for (&y, &lam) in data.y.iter().zip(&lambda) {
        ll += y as f64 * lam.ln() - lam;
    }
    Some(ll)
}

fn psi_log_prior(psi: &Hyperparams, prior: &PriorConfig) -> f64 {
    let mut lp = -(prior.a + 1.0) * psi.tau.ln() - prior.b / psi.tau;
    lp += (prior.b_rho - 1.0) * (1.0 - psi.rho).ln();
    for &p in &psi.phi {
        lp += (prior.b_phi - 1.0) * (1.0 - p).ln();
    }
    lp += -0.5 * (psi.mu1 - prior.alpha1).powi(2) / prior.sigma2_1;
    lp += -0.5 * (psi.mu2 - prior.alpha2).powi(2) / prior.sigma2_2;
    lp
}

fn log_post_parts(
    lbeta: &DVector<f64>,
    lgamma: &DVector<f64>,
    psi: &Hyperparams,
    cov: &CovStructure,
    data: &ObservationSeries,
    model: &MeanModel,
    prior: &PriorConfig,
) -> f64 {
    let Some(pois) = poisson_loglik(lbeta, lgamma, data, model) else {
        return f64::NEG_INFINITY;
    };
    let gauss = joint_log_density(cov, psi, lbeta, lgamma);
    let lp = pois + gauss + psi_log_prior(psi, prior);
    if lp.is_nan() {
        f64::NEG_INFINITY
    } else {
        lp
    }
}

/// Draw a (β, γ) proposal on the logit scale:
/// (logit β'; logit γ') = current + c τ^{1/2} (L_A ⊗ L_K) Z with Z ∈ ℝ^{2n}.
pub fn propose_bg<R: Rng>(
    lbeta: &DVector<f64>,
    lgamma: &DVector<f64>,
    psi: &Hyperparams,
    cov: &CovStructure,
    c: f64,
    rng: &mut R,
) -> (DVector<f64>, DVector<f64>) {
    let n = cov.n();
    let z1 = DVector::from_fn(n, |_, _| StandardNormal.sample(rng));
    let z2 = DVector::from_fn(n, |_, _| StandardNormal.sample(rng));
    let la = cross_chol(psi.rho);
    let scale = c * psi.tau.sqrt();
    let c1 = cov.color(&z1);
    let c2 = cov.color(&z2);
    let lb = lbeta + &c1 * scale;
    let lg = lgamma + (&c1 * la[1][0] + &c2 * la[1][1]) * scale;
    (lb, lg)
}

/// Exact conjugate draw of (μ₁, μ₂) given everything else.
///
/// Precision (1ᵀK⁻¹1/τ) [1,ρ;ρ,1]⁻¹ + diag(1/σ²₁, 1/σ²₂); the linear term adds
/// the prior pull α_j/σ²_j to the Kronecker projection of the logit residuals.
pub fn draw_mu_conditional<R: Rng>(
    cov: &CovStructure,
    rho: f64,
    tau: f64,
    lbeta: &DVector<f64>,
    lgamma: &DVector<f64>,
    prior: &PriorConfig,
    rng: &mut R,
) -> (f64, f64) {
    let ones = DVector::from_element(cov.n(), 1.0);
    let kinv1 = cov.solve(&ones);
    let s0 = ones.dot(&kinv1);
    let t1 = kinv1.dot(lbeta);
    let t2 = kinv1.dot(lgamma);
    let r2 = 1.0 - rho * rho;
    // precision matrix
    let p11 = s0 / (tau * r2) + 1.0 / prior.sigma2_1;
    let p22 = s0 / (tau * r2) + 1.0 / prior.sigma2_2;
    let p12 = -rho * s0 / (tau * r2);
    // linear term
    let h1 = prior.alpha1 / prior.sigma2_1 + (t1 - rho * t2) / (tau * r2);
    let h2 = prior.alpha2 / prior.sigma2_2 + (t2 - rho * t1) / (tau * r2);
    // covariance = precision⁻¹
    let det = p11 * p22 - p12 * p12;
    let c11 = p22 / det;
    let c22 = p11 / det;
    let c12 = -p12 / det;
    let m1 = c11 * h1 + c12 * h2;
    let m2 = c12 * h1 + c22 * h2;
    // sample via the 2×2 Cholesky of the covariance
    let l11 = c11.sqrt();
    let l21 = c12 / l11;
    let l22 = (c22 - l21 * l21).max(0.0).sqrt();
    let z1: f64 = StandardNormal.sample(rng);
    let z2: f64 = StandardNormal.sample(rng);
    (m1 + l11 * z1, m2 + l21 * z1 + l22 * z2)
}

/// Exact conjugate draw of τ | rest ~ InvGamma(a + n, b + q/2) with
/// q = (logit β − μ₁1; logit γ − μ₂1)ᵀ ([1,ρ;ρ,1]⁻¹ ⊗ K⁻¹) (…).
#[allow(clippy::too_many_arguments)]
pub fn draw_tau_conditional<R: Rng>(
    cov: &CovStructure,
    rho: f64,
    mu1: f64,
    mu2: f64,
    lbeta: &DVector<f64>,
    lgamma: &DVector<f64>,
    prior: &PriorConfig,
    rng: &mut R,
) -> f64 {
    let (shape, rate) = tau_conditional_params(cov, rho, mu1, mu2, lbeta, lgamma, prior);
    let g = Gamma::new(shape, 1.0 / rate).expect("valid gamma parameters");
    1.0 / g.sample(rng)
}

/// (shape, rate) of the τ conditional, exposed for the oracle tests.
pub fn tau_conditional_params(
    cov: &CovStructure,
    rho: f64,
    mu1: f64,
    mu2: f64,
    lbeta: &DVector<f64>,
    lgamma: &DVector<f64>,
    prior: &PriorConfig,
) -> (f64, f64) {
    let q1 = lbeta.map(|v| v - mu1);
    let q2 = lgamma.map(|v| v - mu2);
    let q = joint_quad_form(cov, rho, &q1, &q2);
    (prior.a + cov.n() as f64, prior.b + 0.5 * q)
}

#[derive(Debug, Clone, Copy, Default)]
struct Counter {
    acc: u64,
    att: u64,
    win_acc: u64,
    win_att: u64,
}

impl Counter {
    fn record(&mut self, accepted: bool) {
        self.att += 1;
        self.win_att += 1;
        if accepted {
            self.acc += 1;
            self.win_acc += 1;
        }
    }

    fn window_rate(&self) -> Option<f64> {
        (self.win_att > 0).then(|| self.win_acc as f64 / self.win_att as f64)
    }

    fn reset_window(&mut self) {
        self.win_acc = 0;
        self.win_att = 0;
    }

    fn reset_all(&mut self) {
        *self = Counter::default();
    }

    fn rate(&self) -> f64 {
        if self.att == 0 {
            f64::NAN
        } else {
            self.acc as f64 / self.att as f64
        }
    }
}

/// Multiply a step size by exp(±0.1) to steer a window acceptance rate toward
/// the target.
fn adapt_step(step: &mut f64, rate: f64, target: f64) {
    if rate < target {
        *step *= (-0.1f64).exp();
    } else if rate > target {
        *step *= 0.1f64.exp();
    }
}

struct Sampler<'a> {
    data: &'a ObservationSeries,
    model: &'a MeanModel,
    prior: &'a PriorConfig,
    cfg: &'a ChainConfig,
    lbeta: DVector<f64>,
    lgamma: DVector<f64>,
    psi: Hyperparams,
    cov: CovStructure,
    lp: f64,
    c: f64,
    c_rho: f64,
    c_phi: Vec<f64>,
    acc_bg: Counter,
    acc_rho: Counter,
    acc_phi: Vec<Counter>,
}

impl<'a> Sampler<'a> {
    fn init(
        data: &'a ObservationSeries,
        model: &'a MeanModel,
        prior: &'a PriorConfig,
        cfg: &'a ChainConfig,
        rng: &mut ChaCha8Rng,
    ) -> Result<Self> {
        let n = data.len();
        let d = data.dim();
        let psi = Hyperparams {
            rho: if cfg.independent_gp { 0.0 } else { 0.5 },
            phi: vec![0.9; d],
            mu1: 0.0,
            mu2: 0.0,
            tau: 1.0,
        };
        let cov = CovStructure::build(&data.x, &psi.phi).map_err(|e| Error::Numerical {
            iter: 0,
            source: Box::new(e),
        })?;
        // start at logit 0 (= 0.5) plus N(0, 0.01²) noise colored by K: the
        // perturbation must be smooth, or its rough components are amplified
        // by K⁻¹ (eigenvalues down at the nugget) and the first conjugate τ
        // draw explodes
        let z1 = DVector::from_fn(n, |_, _| StandardNormal.sample(rng));
        let z2 = DVector::from_fn(n, |_, _| StandardNormal.sample(rng));
        let lbeta = cov.color(&z1) * 0.01;
        let lgamma = cov.color(&z2) * 0.01;
        let lp = log_post_parts(&lbeta, &lgamma, &psi, &cov, data, model, prior);
        Ok(Sampler {
            data,
            model,
            prior,
            cfg,
            lbeta,
            lgamma,
            psi,
            cov,
            lp,
            // initial step sizes, adapted during burn-in; the large φ step
            // lets the correlation parameters make big early jumps instead
            // of ratcheting into the degenerate φ → 1 corner where K_φ is
            // numerically singular and the chain mixes very slowly
            c: 0.3,
            c_rho: 0.5,
            c_phi: vec![3.0; d],
            acc_bg: Counter::default(),
            acc_rho: Counter::default(),
            acc_phi: vec![Counter::default(); d],
        })
    }

    fn log_post(&self, lbeta: &DVector<f64>, lgamma: &DVector<f64>, psi: &Hyperparams, cov: &CovStructure) -> f64 {
        log_post_parts(lbeta, lgamma, psi, cov, self.data, self.model, self.prior)
    }

    fn mh_accept(&self, lp_new: f64, extra: f64, rng: &mut ChaCha8Rng) -> bool {
        let log_ratio = lp_new - self.lp + extra;
        log_ratio >= 0.0 || rng.random::<f64>().ln() < log_ratio
    }

    fn update_bg(&mut self, rng: &mut ChaCha8Rng) {
        let (lb, lg) = propose_bg(&self.lbeta, &self.lgamma, &self.psi, &self.cov, self.c, rng);
        let lp_new = self.log_post(&lb, &lg, &self.psi, &self.cov);
        let accepted = self.mh_accept(lp_new, 0.0, rng);
        if accepted {
            self.lbeta = lb;
            self.lgamma = lg;
            self.lp = lp_new;
        }
        self.acc_bg.record(accepted);
    }

    /// Random walk on log(−log v) for v ∈ (0,1). Returns (v', log-Jacobian
    /// correction ln|v' ln v'| − ln|v ln v|).
    fn loglog_step(v: f64, step: f64, rng: &mut ChaCha8Rng) -> (f64, f64) {
        let theta = (-(v.ln())).ln();
        // clamp so exp(−exp θ) cannot round to exactly 0 or 1, where the
        // Beta(1, b) prior term is singular
        let theta_new = (theta + Normal::new(0.0, step).unwrap().sample(rng)).clamp(-35.0, 6.5);
        let v_new = (-theta_new.exp()).exp();
        let jac = (v_new * v_new.ln().abs()).ln() - (v * v.ln().abs()).ln();
        (v_new, jac)
    }

    fn update_rho(&mut self, rng: &mut ChaCha8Rng) {
        if self.cfg.independent_gp {
            return;
        }
        let (rho_new, jac) = Self::loglog_step(self.psi.rho, self.c_rho, rng);
        let mut psi_new = self.psi.clone();
        psi_new.rho = rho_new;
        let lp_new = self.log_post(&self.lbeta, &self.lgamma, &psi_new, &self.cov);
        let accepted = self.mh_accept(lp_new, jac, rng);
        if accepted {
            self.psi = psi_new;
            self.lp = lp_new;
        }
        self.acc_rho.record(accepted);
    }

    fn update_phi(&mut self, j: usize, rng: &mut ChaCha8Rng) {
        let (phi_new, jac) = Self::loglog_step(self.psi.phi[j], self.c_phi[j], rng);
        let mut psi_new = self.psi.clone();
        psi_new.phi[j] = phi_new;
        let cov_new = match CovStructure::build(&self.data.x, &psi_new.phi) {
            Ok(c) => c,
            Err(_) => {
                self.acc_phi[j].record(false);
                return;
            }
        };
        let lp_new = self.log_post(&self.lbeta, &self.lgamma, &psi_new, &cov_new);
        let accepted = self.mh_accept(lp_new, jac, rng);
        if accepted {
            self.psi = psi_new;
            self.cov = cov_new;
            self.lp = lp_new;
        }
        self.acc_phi[j].record(accepted);
    }

    fn update_mu(&mut self, rng: &mut ChaCha8Rng) {
        let (mu1, mu2) = draw_mu_conditional(
            &self.cov,
            self.psi.rho,
            self.psi.tau,
            &self.lbeta,
            &self.lgamma,
            self.prior,
            rng,
        );
        self.psi.mu1 = mu1;
        self.psi.mu2 = mu2;
    }

    fn update_tau(&mut self, rng: &mut ChaCha8Rng) {
        self.psi.tau = draw_tau_conditional(
            &self.cov,
            self.psi.rho,
            self.psi.mu1,
            self.psi.mu2,
            &self.lbeta,
            &self.lgamma,
            self.prior,
            rng,
        );
    }

    fn sweep(&mut self, rng: &mut ChaCha8Rng) {
        self.update_bg(rng);
        self.update_rho(rng);
        for j in 0..self.psi.phi.len() {
            self.update_phi(j, rng);
        }
        self.update_mu(rng);
        self.update_tau(rng);
        // conjugate updates changed ψ; refresh the cached posterior value
        self.lp = self.log_post(&self.lbeta, &self.lgamma, &self.psi, &self.cov);
    }

    fn adapt(&mut self) {
        let target = self.cfg.target_accept;
        if let Some(r) = self.acc_bg.window_rate() {
            adapt_step(&mut self.c, r, target);
        }
        if let Some(r) = self.acc_rho.window_rate() {
            adapt_step(&mut self.c_rho, r, target);
        }
        for (j, cnt) in self.acc_phi.iter().enumerate() {
            if let Some(r) = cnt.window_rate() {
                adapt_step(&mut self.c_phi[j], r, target);
            }
        }
        self.acc_bg.reset_window();
        self.acc_rho.reset_window();
        for c in &mut self.acc_phi {
            c.reset_window();
        }
    }

    fn draw(&self) -> Draw {
        Draw {
            beta: self.lbeta.iter().map(|&z| inv_logit(z)).collect(),
            gamma: self.lgamma.iter().map(|&z| inv_logit(z)).collect(),
            psi: self.psi.clone(),
        }
    }
}

/// Run one chain: `burn_in` adaptive sweeps, then `samples` sweeps of which
/// every `thin`-th draw is stored. Fully deterministic given the seed.
pub fn run_chain(
    data: &ObservationSeries,
    model: &MeanModel,
    prior: &PriorConfig,
    cfg: &ChainConfig,
) -> Result<ChainSamples> {
    if data.is_empty() {
        return Err(Error::EmptyDraws);
    }
    prior.validate()?;
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut s = Sampler::init(data, model, prior, cfg, &mut rng)?;

    for iter in 0..cfg.burn_in {
        s.sweep(&mut rng);
        if (iter + 1) % 100 == 0 {
            s.adapt();
        }
    }
    // count acceptance over the sampling phase only
    s.acc_bg.reset_all();
    s.acc_rho.reset_all();
    for c in &mut s.acc_phi {
        c.reset_all();
    }

    let mut draws = Vec::with_capacity(cfg.samples / cfg.thin);
    for iter in 0..cfg.samples {
        s.sweep(&mut rng);
        if (iter + 1) % cfg.thin == 0 {
            draws.push(s.draw());
        }
    }

    let mut acceptance = vec![("beta_gamma".to_owned(), s.acc_bg.rate())];
    if !cfg.independent_gp {
        acceptance.push(("rho".to_owned(), s.acc_rho.rate()));
    }
    for (j, c) in s.acc_phi.iter().enumerate() {
        acceptance.push((format!("phi_{}", j + 1), c.rate()));
    }
    Ok(ChainSamples { draws, acceptance })
}

/// Write stored draws as a comma-delimited file, one row per draw, columns
/// `draw, beta_1..beta_n, gamma_1..gamma_n, rho, phi_1..phi_d, mu1, mu2, tau`.
/// Reals carry 17 significant digits so the round-trip is bit-exact.
pub fn write_chain(path: &Path, samples: &ChainSamples) -> Result<()> {
    let n = samples.n();
    let d = samples.dim();
    let mut out = String::from("draw");
    for i in 1..=n {
        let _ = write!(out, ",beta_{i}");
    }
    for i in 1..=n {
        let _ = write!(out, ",gamma_{i}");
    }
    out.push_str(",rho");
    for j in 1..=d {
        let _ = write!(out, ",phi_{j}");
    }
    out.push_str(",mu1,mu2,tau\n");
    for (idx, draw) in samples.draws.iter().enumerate() {
        let _ = write!(out, "{idx}");
        for v in draw.beta.iter().chain(&draw.gamma) {
            let _ = write!(out, ",{}", fmt_f64(*v));
        }
        let _ = write!(out, ",{}", fmt_f64(draw.psi.rho));
        for p in &draw.psi.phi {
            let _ = write!(out, ",{}", fmt_f64(*p));
        }
        let _ = writeln!(
            out,
            ",{},{},{}",
            fmt_f64(draw.psi.mu1),
            fmt_f64(draw.psi.mu2),
            fmt_f64(draw.psi.tau)
        );
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Read a chain file written by [`write_chain`]. Acceptance rates are not part
/// of the file format, so the returned summary is empty.
pub fn read_chain(path: &Path) -> Result<ChainSamples> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| Error::Parse {
        path: path.to_path_buf(),
        line: 1,
        msg: "empty chain file".into(),
    })?;
    let cols: Vec<&str> = header.split(',').collect();
    let n = cols.iter().filter(|c| c.starts_with("beta_")).count();
    let d = cols.iter().filter(|c| c.starts_with("phi_")).count();
    let expected = 1 + 2 * n + 1 + d + 3;
    if cols.len() != expected || n == 0 {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: 1,
            msg: format!("malformed chain header ({} columns)", cols.len()),
        });
    }
    let mut draws = Vec::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != expected {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: idx + 1,
                msg: format!("expected {expected} columns, got {}", parts.len()),
            });
        }
        let mut vals = Vec::with_capacity(expected - 1);
        for p in &parts[1..] {
            vals.push(p.trim().parse::<f64>().map_err(|e| Error::Parse {
                path: path.to_path_buf(),
                line: idx + 1,
                msg: e.to_string(),
            })?);
        }
        let beta = vals[..n].to_vec();
        let gamma = vals[n..2 * n].to_vec();
        let rho = vals[2 * n];
        let phi = vals[2 * n + 1..2 * n + 1 + d].to_vec();
        let mu1 = vals[2 * n + 1 + d];
        let mu2 = vals[2 * n + 2 + d];
        let tau = vals[2 * n + 3 + d];
        draws.push(Draw {
            beta,
            gamma,
            psi: Hyperparams {
                rho,
                phi,
                mu1,
                mu2,
                tau,
            },
        });
    }
    Ok(ChainSamples {
        draws,
        acceptance: Vec::new(),
    })
}
