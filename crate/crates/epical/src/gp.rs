//! Joint Gaussian-process prior on the logit-scale parameter surfaces.
//!
//! The two surfaces logit β(·) and logit γ(·) share a correlation kernel
//!
//! ```text
//! K_φ(x, x') = ∏_j φ_j^{4 (x_j − x'_j)²},   φ_j ∈ (0, 1)
//! ```
//!
//! and are coupled by a cross-correlation ρ, giving the 2n-dimensional prior
//! covariance τ ([1, ρ; ρ, 1] ⊗ K). All algebra (inverse, determinant, square
//! root) exploits the Kronecker structure so only n×n factors are ever formed.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

/// Diagonal nugget added to every correlation matrix for conditioning.
pub const NUGGET: f64 = 1e-8;

/// GP parameter bundle ψ = (ρ, φ₁..φ_d, μ₁, μ₂, τ).
#[derive(Debug, Clone, PartialEq)]
pub struct Hyperparams {
    /// Cross-correlation between the two logit surfaces, in [0, 1).
    /// ρ = 0 encodes the independent-GP ablation.
    pub rho: f64,
    /// Per-coordinate correlation parameters, each in (0, 1).
    pub phi: Vec<f64>,
    /// Mean of logit β.
    pub mu1: f64,
    /// Mean of logit γ.
    pub mu2: f64,
    /// Process variance, > 0.
    pub tau: f64,
}

impl Hyperparams {
    pub fn validate(&self) -> Result<()> {
        if !(self.rho >= 0.0 && self.rho < 1.0) {
            return Err(Error::DomainError { value: self.rho });
        }
        for &p in &self.phi {
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::DomainError { value: p });
            }
        }
        if !(self.tau > 0.0) {
            return Err(Error::DomainError { value: self.tau });
        }
        Ok(())
    }
}

/// Log-odds transform, ln(p / (1 − p)).
pub fn logit(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::DomainError { value: p });
    }
    Ok((p / (1.0 - p)).ln())
}

/// Inverse of [`logit`]: 1 / (1 + e^{−z}), strictly increasing onto (0, 1).
pub fn inv_logit(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

pub fn logit_vec(p: &[f64]) -> Result<DVector<f64>> {
    let mut out = DVector::zeros(p.len());
    for (o, &v) in out.iter_mut().zip(p) {
        *o = logit(v)?;
    }
    Ok(out)
}

/// Kernel value ∏_j φ_j^{4 (x_j − x'_j)²}; equals 1 iff x = x'.
pub fn correlation(x: &[f64], x2: &[f64], phi: &[f64]) -> Result<f64> {
    if x.len() != phi.len() {
        return Err(Error::DimensionMismatch {
            expected: phi.len(),
            got: x.len(),
        });
    }
    if x2.len() != phi.len() {
        return Err(Error::DimensionMismatch {
            expected: phi.len(),
            got: x2.len(),
        });
    }
    let mut log_k = 0.0;
    for j in 0..phi.len() {
        let d = x[j] - x2[j];
        log_k += 4.0 * d * d * phi[j].ln();
    }
    Ok(log_k.exp())
}

/// Nugget-augmented training correlation matrix with its Cholesky factor.
#[derive(Debug, Clone)]
pub struct CovStructure {
    corr: DMatrix<f64>,
    factor: Cholesky<f64, Dyn>,
    log_det: f64,
}

impl CovStructure {
    /// Build K_φ over the training rows, add the nugget, and factor it.
    pub fn build(x_rows: &[Vec<f64>], phi: &[f64]) -> Result<CovStructure> {
        let n = x_rows.len();
        let mut corr = DMatrix::zeros(n, n);
        for i in 0..n {
            corr[(i, i)] = 1.0 + NUGGET;
            for j in 0..i {
                let k = correlation(&x_rows[i], &x_rows[j], phi)?;
                corr[(i, j)] = k;
                corr[(j, i)] = k;
            }
        }
        let factor = Cholesky::new(corr.clone()).ok_or(Error::FactorizationFailure)?;
        let log_det = 2.0 * factor.l_dirty().diagonal().iter().map(|v| v.ln()).sum::<f64>();
        Ok(CovStructure {
            corr,
            factor,
            log_det,
        })
    }

    pub fn n(&self) -> usize {
        self.corr.nrows()
    }

    pub fn corr(&self) -> &DMatrix<f64> {
        &self.corr
    }

    /// ln det K.
    pub fn log_det(&self) -> f64 {
        self.log_det
    }

    /// K⁻¹ v.
    pub fn solve(&self, v: &DVector<f64>) -> DVector<f64> {
        self.factor.solve(v)
    }

    /// vᵀ K⁻¹ w.
    pub fn inner(&self, v: &DVector<f64>, w: &DVector<f64>) -> f64 {
        self.solve(w).dot(v)
    }

    /// L z for K = L Lᵀ, used to color standard-normal draws.
    pub fn color(&self, z: &DVector<f64>) -> DVector<f64> {
        self.factor.l_dirty().lower_triangle() * z
    }
}

/// Lower Cholesky factor of [1, ρ; ρ, 1].
pub fn cross_chol(rho: f64) -> [[f64; 2]; 2] {
    [[1.0, 0.0], [rho, (1.0 - rho * rho).sqrt()]]
}

/// Quadratic form qᵀ ([1,ρ;ρ,1]⁻¹ ⊗ K⁻¹) q for q = (q1; q2).
pub fn joint_quad_form(cov: &CovStructure, rho: f64, q1: &DVector<f64>, q2: &DVector<f64>) -> f64 {
    let s1 = cov.solve(q1);
    let s2 = cov.solve(q2);
    let a = q1.dot(&s1);
    let b = q1.dot(&s2);
    let c = q2.dot(&s2);
    (a - 2.0 * rho * b + c) / (1.0 - rho * rho)
}

/// Full log-density of (v1; v2) under N((μ₁1; μ₂1), τ [1,ρ;ρ,1] ⊗ K),
/// including the 2π normalization.
pub fn joint_log_density(
    cov: &CovStructure,
    psi: &Hyperparams,
    v1: &DVector<f64>,
    v2: &DVector<f64>,
) -> f64 {
    let n = cov.n() as f64;
    let q1 = v1.map(|v| v - psi.mu1);
    let q2 = v2.map(|v| v - psi.mu2);
    let quad = joint_quad_form(cov, psi.rho, &q1, &q2);
    // ln det(τ A ⊗ K) = 2n ln τ + n ln(1 − ρ²) + 2 ln det K
    let log_det =
        2.0 * n * psi.tau.ln() + n * (1.0 - psi.rho * psi.rho).ln() + 2.0 * cov.log_det();
    -n * (2.0 * std::f64::consts::PI).ln() - 0.5 * log_det - 0.5 * quad / psi.tau
}

/// Draw (v1; v2) from the joint prior N((μ₁1; μ₂1), τ [1,ρ;ρ,1] ⊗ K) using the
/// Kronecker square root (L_A ⊗ L_K).
pub fn sample_joint<R: Rng>(
    cov: &CovStructure,
    psi: &Hyperparams,
    rng: &mut R,
) -> (DVector<f64>, DVector<f64>) {
    let n = cov.n();
    let z1 = DVector::from_fn(n, |_, _| StandardNormal.sample(rng));
    let z2 = DVector::from_fn(n, |_, _| StandardNormal.sample(rng));
    let la = cross_chol(psi.rho);
    let sqrt_tau = psi.tau.sqrt();
    let c1 = cov.color(&z1);
    let c2 = cov.color(&z2);
    let v1 = c1.map(|v| psi.mu1 + sqrt_tau * v);
    let v2 = (&c1 * la[1][0] + &c2 * la[1][1]).map(|v| psi.mu2 + sqrt_tau * v);
    (v1, v2)
}

/// Conditional law of (logit β(x*), logit γ(x*)) given the training values.
#[derive(Debug, Clone, Copy)]
pub struct BivariateNormal {
    pub mean: [f64; 2],
    pub cov: [[f64; 2]; 2],
}

impl BivariateNormal {
    pub fn sample<R: Rng>(&self, rng: &mut R) -> [f64; 2] {
        // 2x2 Cholesky with a guard for the degenerate (zero-variance) case
        let l11 = self.cov[0][0].max(0.0).sqrt();
        let (l21, l22) = if l11 > 0.0 {
            let l21 = self.cov[1][0] / l11;
            (l21, (self.cov[1][1] - l21 * l21).max(0.0).sqrt())
        } else {
            (0.0, self.cov[1][1].max(0.0).sqrt())
        };
        let z1: f64 = StandardNormal.sample(rng);
        let z2: f64 = StandardNormal.sample(rng);
        [
            self.mean[0] + l11 * z1,
            self.mean[1] + l21 * z1 + l22 * z2,
        ]
    }
}

/// Kernel vector k(x*) against the training rows.
pub fn kernel_vector(x_rows: &[Vec<f64>], x_star: &[f64], phi: &[f64]) -> Result<DVector<f64>> {
    let mut k = DVector::zeros(x_rows.len());
    for (o, row) in k.iter_mut().zip(x_rows) {
        *o = correlation(row, x_star, phi)?;
    }
    Ok(k)
}

/// Conditional bivariate normal for (logit β(x*), logit γ(x*)) given training
/// values on the logit scale:
///
/// ```text
/// mean_j = μ_j + k(x*)ᵀ K⁻¹ (v_j − μ_j 1)
/// cov    = τ (1 − k(x*)ᵀ K⁻¹ k(x*)) [1, ρ; ρ, 1]
/// ```
///
/// The scalar variance factor is clamped at zero from below.
pub fn conditional_bg(
    x_star: &[f64],
    beta: &[f64],
    gamma: &[f64],
    psi: &Hyperparams,
    cov: &CovStructure,
    x_rows: &[Vec<f64>],
) -> Result<BivariateNormal> {
    let k = kernel_vector(x_rows, x_star, &psi.phi)?;
    let kinv_k = cov.solve(&k);
    let lb = logit_vec(beta)?;
    let lg = logit_vec(gamma)?;
    let m1 = psi.mu1 + kinv_k.dot(&lb.map(|v| v - psi.mu1));
    let m2 = psi.mu2 + kinv_k.dot(&lg.map(|v| v - psi.mu2));
    let var = (psi.tau * (1.0 - kinv_k.dot(&k))).max(0.0);
    Ok(BivariateNormal {
        mean: [m1, m2],
        cov: [[var, var * psi.rho], [var * psi.rho, var]],
    })
}

/// Conditional means only (the deterministic surface used for sensitivity
/// analysis). Returns (E logit β(x*), E logit γ(x*)).
pub struct ConditionalSurface {
    x_rows: Vec<Vec<f64>>,
    log_phi: Vec<f64>,
    w_beta: DVector<f64>,
    w_gamma: DVector<f64>,
    mu1: f64,
    mu2: f64,
}

impl ConditionalSurface {
    /// Precompute the K⁻¹-weighted residuals so each query costs O(n d).
    pub fn new(
        x_rows: &[Vec<f64>],
        beta: &[f64],
        gamma: &[f64],
        psi: &Hyperparams,
        cov: &CovStructure,
    ) -> Result<Self> {
        let lb = logit_vec(beta)?;
        let lg = logit_vec(gamma)?;
        Ok(ConditionalSurface {
            x_rows: x_rows.to_vec(),
            log_phi: psi.phi.iter().map(|p| p.ln()).collect(),
            w_beta: cov.solve(&lb.map(|v| v - psi.mu1)),
            w_gamma: cov.solve(&lg.map(|v| v - psi.mu2)),
            mu1: psi.mu1,
            mu2: psi.mu2,
        })
    }

    pub fn logit_means(&self, x: &[f64]) -> (f64, f64) {
        let mut m1 = self.mu1;
        let mut m2 = self.mu2;
        for (row, (wb, wg)) in self
            .x_rows
            .iter()
            .zip(self.w_beta.iter().zip(self.w_gamma.iter()))
        {
            let mut log_k = 0.0;
            for j in 0..self.log_phi.len() {
                let d = row[j] - x[j];
                log_k += 4.0 * d * d * self.log_phi[j];
            }
            let k = log_k.exp();
            m1 += k * wb;
            m2 += k * wg;
        }
        (m1, m2)
    }

    /// Conditional-mean basic reproduction number at x.
    pub fn r0(&self, x: &[f64]) -> f64 {
        let (m1, m2) = self.logit_means(x);
        inv_logit(m1) / inv_logit(m2)
    }
}
