//! Functional-ANOVA decomposition of R₀(x) under a product input distribution.
//!
//! With x ~ F = ∏_j F_j, the decomposition is
//!
//! ```text
//! m₀ = ∫ g(x) dF(x)
//! m_j(x_j) = ∫ (g(x) − m₀) dF_{−j}(x_{−j})
//! m_jk(x_j, x_k) = ∫ (g(x) − m₀ − m_j − m_k) dF_{−jk}
//! ```
//!
//! with first-order Sobol indices S_j = Var(m_j(X_j)) / Var(g(X)) and pairwise
//! interaction indices S_jk = Var(m_jk) / Var(g), estimated by Monte Carlo
//! (Saltelli-style pick-freeze for the variance ratios, pinned-coordinate
//! averages for the effect curves). All integration points are generated once
//! and shared across posterior draws, so draw-to-draw comparisons are not
//! polluted by integration noise.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::data::fmt_f64;
use crate::error::{Error, Result};
use crate::gp::{ConditionalSurface, CovStructure};
use crate::mcmc::ChainSamples;

/// Marginal distribution of one input coordinate.
#[derive(Debug, Clone, PartialEq)]
pub enum Marginal {
    /// Resample the observed values of the coordinate.
    Empirical(Vec<f64>),
    Uniform { lo: f64, hi: f64 },
}

impl Marginal {
    fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        match self {
            Marginal::Empirical(vals) => vals[rng.random_range(0..vals.len())],
            Marginal::Uniform { lo, hi } => rng.random_range(*lo..*hi),
        }
    }

    fn support(&self) -> (f64, f64) {
        match self {
            Marginal::Empirical(vals) => {
                let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                (lo, hi)
            }
            Marginal::Uniform { lo, hi } => (*lo, *hi),
        }
    }
}

/// Product-form input distribution F = ∏ F_j plus the Monte-Carlo sample count.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorDistribution {
    pub marginals: Vec<Marginal>,
    /// Number of integration points M.
    pub m: usize,
}

impl FactorDistribution {
    /// Independent resampling of the empirical marginals of the given rows.
    pub fn empirical(rows: &[Vec<f64>], m: usize) -> FactorDistribution {
        let d = rows.first().map_or(0, Vec::len);
        let marginals = (0..d)
            .map(|j| Marginal::Empirical(rows.iter().map(|r| r[j]).collect()))
            .collect();
        FactorDistribution { marginals, m }
    }

    /// Uniform over each coordinate range.
    pub fn uniform(ranges: &[(f64, f64)], m: usize) -> FactorDistribution {
        let marginals = ranges
            .iter()
            .map(|&(lo, hi)| Marginal::Uniform { lo, hi })
            .collect();
        FactorDistribution { marginals, m }
    }

    /// Uniform over the observed range of each column.
    pub fn uniform_from_rows(rows: &[Vec<f64>], m: usize) -> FactorDistribution {
        let emp = Self::empirical(rows, m);
        let ranges: Vec<(f64, f64)> = emp.marginals.iter().map(Marginal::support).collect();
        Self::uniform(&ranges, m)
    }

    pub fn dim(&self) -> usize {
        self.marginals.len()
    }

    pub fn sample_point<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        self.marginals.iter().map(|f| f.sample(rng)).collect()
    }

    pub fn sample_matrix<R: Rng>(&self, count: usize, rng: &mut R) -> Vec<Vec<f64>> {
        (0..count).map(|_| self.sample_point(rng)).collect()
    }

    /// Equispaced grid spanning the support of coordinate j.
    pub fn grid(&self, j: usize, points: usize) -> Vec<f64> {
        let (lo, hi) = self.marginals[j].support();
        if points == 1 {
            return vec![0.5 * (lo + hi)];
        }
        (0..points)
            .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
            .collect()
    }
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn eval_all<G: Fn(&[f64]) -> f64>(g: &G, pts: &[Vec<f64>]) -> Vec<f64> {
    pts.iter().map(|p| g(p)).collect()
}

/// Monte-Carlo estimate of m₀ = ∫ g dF with M points.
pub fn overall_mean<G: Fn(&[f64]) -> f64, R: Rng>(
    g: &G,
    f: &FactorDistribution,
    rng: &mut R,
) -> f64 {
    let pts = f.sample_matrix(f.m, rng);
    mean(&eval_all(g, &pts))
}

fn pinned_mean<G: Fn(&[f64]) -> f64>(g: &G, base: &[Vec<f64>], pins: &[(usize, f64)]) -> f64 {
    let mut acc = 0.0;
    let mut x = vec![0.0; base.first().map_or(0, Vec::len)];
    for row in base {
        x.copy_from_slice(row);
        for &(j, v) in pins {
            x[j] = v;
        }
        acc += g(&x);
    }
    acc / base.len() as f64
}

/// Main-effect curve m_j on a grid: the MC average of g − m₀ with coordinate j
/// pinned to each grid value.
pub fn main_effect<G: Fn(&[f64]) -> f64, R: Rng>(
    g: &G,
    f: &FactorDistribution,
    j: usize,
    grid: &[f64],
    rng: &mut R,
) -> Vec<f64> {
    let base = f.sample_matrix(f.m, rng);
    let m0 = mean(&eval_all(g, &base));
    grid.iter()
        .map(|&v| pinned_mean(g, &base, &[(j, v)]) - m0)
        .collect()
}

/// Interaction surface m_jk on a grid² (row-major over `grid_j` × `grid_k`).
pub fn interaction_effect<G: Fn(&[f64]) -> f64, R: Rng>(
    g: &G,
    f: &FactorDistribution,
    j: usize,
    k: usize,
    grid_j: &[f64],
    grid_k: &[f64],
    rng: &mut R,
) -> Vec<f64> {
    let base = f.sample_matrix(f.m, rng);
    let m0 = mean(&eval_all(g, &base));
    let mj: Vec<f64> = grid_j
        .iter()
        .map(|&v| pinned_mean(g, &base, &[(j, v)]) - m0)
        .collect();
    let mk: Vec<f64> = grid_k
        .iter()
        .map(|&v| pinned_mean(g, &base, &[(k, v)]) - m0)
        .collect();
    let mut out = Vec::with_capacity(grid_j.len() * grid_k.len());
    for (a, &vj) in grid_j.iter().enumerate() {
        for (b, &vk) in grid_k.iter().enumerate() {
            let pinned = pinned_mean(g, &base, &[(j, vj), (k, vk)]);
            out.push(pinned - m0 - mj[a] - mk[b]);
        }
    }
    out
}

/// Pick-freeze machinery shared by the index estimators: two independent base
/// matrices plus the evaluations of g on both.
struct PickFreeze {
    a: Vec<Vec<f64>>,
    b: Vec<Vec<f64>>,
    f_a: Vec<f64>,
    f_b: Vec<f64>,
    variance: f64,
}

impl PickFreeze {
    fn new<G: Fn(&[f64]) -> f64>(g: &G, a: Vec<Vec<f64>>, b: Vec<Vec<f64>>) -> PickFreeze {
        let f_a = eval_all(g, &a);
        let f_b = eval_all(g, &b);
        let all: Vec<f64> = f_a.iter().chain(&f_b).cloned().collect();
        let mu = mean(&all);
        let variance = all.iter().map(|v| (v - mu) * (v - mu)).sum::<f64>() / all.len() as f64;
        PickFreeze {
            a,
            b,
            f_a,
            f_b,
            variance,
        }
    }

    fn sample<G: Fn(&[f64]) -> f64, R: Rng>(
        g: &G,
        f: &FactorDistribution,
        rng: &mut R,
    ) -> PickFreeze {
        let a = f.sample_matrix(f.m, rng);
        let b = f.sample_matrix(f.m, rng);
        PickFreeze::new(g, a, b)
    }

    /// Unclipped closed Sobol index of the coordinate set `coords`:
    /// Var(E[g | x_coords]) / Var(g) via (1/M) Σ f_A (f_C − f_B) with C = B
    /// carrying the `coords` columns of A.
    fn closed_raw<G: Fn(&[f64]) -> f64>(&self, g: &G, coords: &[usize]) -> Result<f64> {
        if self.variance <= 1e-14 * (1.0 + mean(&self.f_a).powi(2)) {
            return Err(Error::ZeroVariance);
        }
        let mut num = 0.0;
        let mut x = vec![0.0; self.a.first().map_or(0, Vec::len)];
        for i in 0..self.a.len() {
            x.copy_from_slice(&self.b[i]);
            for &j in coords {
                x[j] = self.a[i][j];
            }
            num += self.f_a[i] * (g(&x) - self.f_b[i]);
        }
        Ok(num / self.a.len() as f64 / self.variance)
    }
}

fn clip01(v: f64) -> f64 {
    v.clamp(0.0, 1.0)
}

/// First-order Sobol index S_j = Var(m_j(X_j)) / Var(g(X)), clipped to [0, 1].
pub fn main_effect_index<G: Fn(&[f64]) -> f64, R: Rng>(
    g: &G,
    f: &FactorDistribution,
    j: usize,
    rng: &mut R,
) -> Result<f64> {
    let pf = PickFreeze::sample(g, f, rng);
    Ok(clip01(pf.closed_raw(g, &[j])?))
}

/// Pairwise interaction index S_jk = S^closed_jk − S_j − S_k, clipped to [0, 1].
pub fn interaction_index<G: Fn(&[f64]) -> f64, R: Rng>(
    g: &G,
    f: &FactorDistribution,
    j: usize,
    k: usize,
    rng: &mut R,
) -> Result<f64> {
    let pf = PickFreeze::sample(g, f, rng);
    let sj = pf.closed_raw(g, &[j])?;
    let sk = pf.closed_raw(g, &[k])?;
    let sjk = pf.closed_raw(g, &[j, k])?;
    Ok(clip01(sjk - sj - sk))
}

/// Knobs for the per-draw posterior decomposition.
#[derive(Debug, Clone)]
pub struct SensitivityOptions {
    /// Points per main-effect curve.
    pub grid_points: usize,
    /// Points per axis of an interaction surface.
    pub pair_grid: usize,
    /// Evenly subsample the chain to at most this many draws (0 = all).
    pub max_draws: usize,
    /// Seed for the shared integration point set.
    pub seed: u64,
    /// Pairs (by factor index) whose interaction surfaces should be computed.
    pub pair_curves: Vec<(usize, usize)>,
}

impl Default for SensitivityOptions {
    fn default() -> Self {
        SensitivityOptions {
            grid_points: 25,
            pair_grid: 15,
            max_draws: 0,
            seed: 0,
            pair_curves: Vec::new(),
        }
    }
}

/// Posterior distributions of the decomposition: one value per retained draw
/// for m₀ and every index, one curve per retained draw for every effect.
#[derive(Debug, Clone)]
pub struct SensitivityReport {
    pub factor_names: Vec<String>,
    /// m₀ per draw.
    pub m0: Vec<f64>,
    /// Main-effect grid per factor.
    pub grids: Vec<Vec<f64>>,
    /// Main-effect curves: `[factor][draw][grid point]`.
    pub main_curves: Vec<Vec<Vec<f64>>>,
    /// First-order indices: `[draw][factor]`.
    pub s_main: Vec<Vec<f64>>,
    /// All factor pairs (j < k), lexicographic.
    pub pairs: Vec<(usize, usize)>,
    /// Interaction indices: `[draw][pair]`.
    pub s_pair: Vec<Vec<f64>>,
    /// Interaction surfaces for the requested pairs.
    pub pair_surfaces: Vec<PairSurface>,
}

/// One requested interaction surface: (pair, grid_j, grid_k,
/// `[draw][row-major surface]`).
pub type PairSurface = ((usize, usize), Vec<f64>, Vec<f64>, Vec<Vec<f64>>);

fn subsample_indices(total: usize, max: usize) -> Vec<usize> {
    if max == 0 || total <= max {
        return (0..total).collect();
    }
    (0..max)
        .map(|i| i * total / max)
        .collect()
}

/// Run the full decomposition for every retained posterior draw, treating the
/// conditional-mean surface x ↦ R₀(x) of each draw as the function under
/// analysis. Function-level uncertainty enters across draws; within a draw the
/// surface is deterministic so the ANOVA decomposition is well-defined.
pub fn posterior_sensitivity(
    chain: &ChainSamples,
    x_train: &[Vec<f64>],
    factor_names: &[String],
    f: &FactorDistribution,
    opts: &SensitivityOptions,
) -> Result<SensitivityReport> {
    if chain.draws.is_empty() {
        return Err(Error::EmptyDraws);
    }
    let d = f.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    // common random numbers: one point set shared by every draw
    let base_a = f.sample_matrix(f.m, &mut rng);
    let base_b = f.sample_matrix(f.m, &mut rng);
    let grids: Vec<Vec<f64>> = (0..d).map(|j| f.grid(j, opts.grid_points)).collect();
    let pair_grids: Vec<Vec<f64>> = (0..d).map(|j| f.grid(j, opts.pair_grid)).collect();
    let pairs: Vec<(usize, usize)> = (0..d)
        .flat_map(|j| ((j + 1)..d).map(move |k| (j, k)))
        .collect();

    let keep = subsample_indices(chain.draws.len(), opts.max_draws);
    let mut report = SensitivityReport {
        factor_names: factor_names.to_vec(),
        m0: Vec::with_capacity(keep.len()),
        grids: grids.clone(),
        main_curves: vec![Vec::with_capacity(keep.len()); d],
        s_main: Vec::with_capacity(keep.len()),
        pairs: pairs.clone(),
        s_pair: Vec::with_capacity(keep.len()),
        pair_surfaces: opts
            .pair_curves
            .iter()
            .map(|&(j, k)| ((j, k), pair_grids[j].clone(), pair_grids[k].clone(), Vec::new()))
            .collect(),
    };

    for (pos, &di) in keep.iter().enumerate() {
        let draw = &chain.draws[di];
        let cov = CovStructure::build(x_train, &draw.psi.phi).map_err(|e| Error::Numerical {
            iter: pos,
            source: Box::new(e),
        })?;
        let surface = ConditionalSurface::new(x_train, &draw.beta, &draw.gamma, &draw.psi, &cov)
            .map_err(|e| Error::Numerical {
                iter: pos,
                source: Box::new(e),
            })?;
        let g = |x: &[f64]| surface.r0(x);

        let pf = PickFreeze::new(&g, base_a.clone(), base_b.clone());
        let m0 = 0.5 * (mean(&pf.f_a) + mean(&pf.f_b));
        report.m0.push(m0);

        // constant surfaces have no variance to attribute; all indices are 0
        let constant = matches!(pf.closed_raw(&g, &[0]), Err(Error::ZeroVariance));

        let mut s_main = Vec::with_capacity(d);
        for (j, grid) in grids.iter().enumerate() {
            let curve: Vec<f64> = grid
                .iter()
                .map(|&v| pinned_mean(&g, &base_a, &[(j, v)]) - m0)
                .collect();
            report.main_curves[j].push(curve);
            let s = if constant {
                0.0
            } else {
                clip01(pf.closed_raw(&g, &[j]).unwrap_or(0.0))
            };
            s_main.push(s);
        }
        let mut s_pair = Vec::with_capacity(pairs.len());
        for &(j, k) in &pairs {
            let s = if constant {
                0.0
            } else {
                let sj = pf.closed_raw(&g, &[j]).unwrap_or(0.0);
                let sk = pf.closed_raw(&g, &[k]).unwrap_or(0.0);
                let sjk = pf.closed_raw(&g, &[j, k]).unwrap_or(0.0);
                clip01(sjk - sj - sk)
            };
            s_pair.push(s);
        }
        report.s_main.push(s_main);
        report.s_pair.push(s_pair);

        for ((j, k), gj, gk, surfaces) in &mut report.pair_surfaces {
            let mj: Vec<f64> = gj
                .iter()
                .map(|&v| pinned_mean(&g, &base_a, &[(*j, v)]) - m0)
                .collect();
            let mk: Vec<f64> = gk
                .iter()
                .map(|&v| pinned_mean(&g, &base_a, &[(*k, v)]) - m0)
                .collect();
            let mut surf = Vec::with_capacity(gj.len() * gk.len());
            for (a, &vj) in gj.iter().enumerate() {
                for (b, &vk) in gk.iter().enumerate() {
                    surf.push(pinned_mean(&g, &base_a, &[(*j, vj), (*k, vk)]) - m0 - mj[a] - mk[b]);
                }
            }
            surfaces.push(surf);
        }
    }
    Ok(report)
}

/// Write the report as plot-ready delimited files under `dir`:
/// `m0_draws.csv`, one `main_effect_<factor>.csv` per factor,
/// `indices_main.csv`, `indices_interaction.csv`, and one
/// `interaction_effect_<a>_<b>.csv` per requested pair.
pub fn write_report(dir: &Path, report: &SensitivityReport) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut m0 = String::from("draw,m0\n");
    for (i, v) in report.m0.iter().enumerate() {
        let _ = writeln!(m0, "{i},{}", fmt_f64(*v));
    }
    let p = dir.join("m0_draws.csv");
    fs::write(&p, m0).map_err(|e| Error::io(&p, e))?;

    for (j, name) in report.factor_names.iter().enumerate() {
        let mut out = format!("{name},draw,value\n");
        for (di, curve) in report.main_curves[j].iter().enumerate() {
            for (&x, &v) in report.grids[j].iter().zip(curve) {
                let _ = writeln!(out, "{},{di},{}", fmt_f64(x), fmt_f64(v));
            }
        }
        let p = dir.join(format!("main_effect_{name}.csv"));
        fs::write(&p, out).map_err(|e| Error::io(&p, e))?;
    }

    let mut main = String::from("draw");
    for name in &report.factor_names {
        let _ = write!(main, ",S_{name}");
    }
    main.push('\n');
    for (di, row) in report.s_main.iter().enumerate() {
        let _ = write!(main, "{di}");
        for v in row {
            let _ = write!(main, ",{}", fmt_f64(*v));
        }
        main.push('\n');
    }
    let p = dir.join("indices_main.csv");
    fs::write(&p, main).map_err(|e| Error::io(&p, e))?;

    let mut inter = String::from("draw");
    for &(j, k) in &report.pairs {
        let _ = write!(
            inter,
            ",S_{}:{}",
            report.factor_names[j], report.factor_names[k]
        );
    }
    inter.push('\n');
    for (di, row) in report.s_pair.iter().enumerate() {
        let _ = write!(inter, "{di}");
        for v in row {
            let _ = write!(inter, ",{}", fmt_f64(*v));
        }
        inter.push('\n');
    }
    let p = dir.join("indices_interaction.csv");
    fs::write(&p, inter).map_err(|e| Error::io(&p, e))?;

    for ((j, k), gj, gk, surfaces) in &report.pair_surfaces {
        let n1 = &report.factor_names[*j];
        let n2 = &report.factor_names[*k];
        let mut out = format!("{n1},{n2},draw,value\n");
        for (di, surf) in surfaces.iter().enumerate() {
            for (a, &vj) in gj.iter().enumerate() {
                for (b, &vk) in gk.iter().enumerate() {
                    let _ = writeln!(
                        out,
                        "{},{},{di},{}",
                        fmt_f64(vj),
                        fmt_f64(vk),
                        fmt_f64(surf[a * gk.len() + b])
                    );
                }
            }
        }
        let p = dir.join(format!("interaction_effect_{n1}_{n2}.csv"));
        fs::write(&p, out).map_err(|e| Error::io(&p, e))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn uniform2(m: usize) -> FactorDistribution {
        FactorDistribution::uniform(&[(0.0, 1.0), (0.0, 1.0)], m)
    }

    #[test]
    fn overall_mean_constant_is_exact() {
        let f = uniform2(500);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m0 = overall_mean(&|_: &[f64]| 4.2, &f, &mut rng);
        assert_relative_eq!(m0, 4.2, epsilon = 1e-12);
    }

    #[test]
    fn overall_mean_analytic_integrals() {
        let f = uniform2(200_000);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let m0 = overall_mean(&|x: &[f64]| x[0], &f, &mut rng);
        assert!((m0 - 0.5).abs() < 3.0 / (12.0 * f.m as f64).sqrt());
        let m0 = overall_mean(&|x: &[f64]| x[0] * x[1], &f, &mut rng);
        assert!((m0 - 0.25).abs() < 0.01);
    }

    #[test]
    fn main_effect_constant_and_additive() {
        let f = uniform2(50_000);
        let grid: Vec<f64> = (0..11).map(|i| i as f64 / 10.0).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let flat = main_effect(&|_: &[f64]| 2.0, &f, 0, &grid, &mut rng);
        assert!(flat.iter().all(|v| v.abs() < 1e-12));

        // g = x₁ + x₂: m₁(v) = v − 0.5
        let curve = main_effect(&|x: &[f64]| x[0] + x[1], &f, 0, &grid, &mut rng);
        for (&v, &m) in grid.iter().zip(&curve) {
            assert!((m - (v - 0.5)).abs() < 0.02, "m1({v}) = {m}");
        }
    }

    #[test]
    fn main_effect_integrates_to_zero() {
        // |MC mean of m_j(X_j)| below 3 standard errors
        let f = uniform2(20_000);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let g = |x: &[f64]| (3.0 * x[0]).sin() + x[1] * x[1];
        let grid: Vec<f64> = (0..200).map(|i| (i as f64 + 0.5) / 200.0).collect();
        let curve = main_effect(&g, &f, 0, &grid, &mut rng);
        let avg = mean(&curve);
        assert!(avg.abs() < 0.01, "avg {avg}");
    }

    #[test]
    fn single_active_factor_indices() {
        let f = uniform2(50_000);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = |x: &[f64]| x[0];
        let s1 = main_effect_index(&g, &f, 0, &mut rng).unwrap();
        let s2 = main_effect_index(&g, &f, 1, &mut rng).unwrap();
        assert!((s1 - 1.0).abs() < 0.02);
        assert!(s2 < 0.02);
    }

    #[test]
    fn additive_function_indices() {
        let f = uniform2(100_000);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let g = |x: &[f64]| x[0] + x[1];
        let s1 = main_effect_index(&g, &f, 0, &mut rng).unwrap();
        let s2 = main_effect_index(&g, &f, 1, &mut rng).unwrap();
        assert!((s1 - 0.5).abs() < 0.03, "s1 {s1}");
        assert!((s2 - 0.5).abs() < 0.03, "s2 {s2}");
        let s12 = interaction_index(&g, &f, 0, 1, &mut rng).unwrap();
        assert!(s12 < 0.01, "s12 {s12}");
    }

    #[test]
    fn product_function_indices() {
        // g = x₁ x₂ uniform: S₁ = S₂ = (1/48)/(7/144) = 3/7, S₁₂ = 1/7
        let f = uniform2(100_000);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let g = |x: &[f64]| x[0] * x[1];
        let s1 = main_effect_index(&g, &f, 0, &mut rng).unwrap();
        assert!((s1 - 3.0 / 7.0).abs() < 0.02, "s1 {s1}");
        let s12 = interaction_index(&g, &f, 0, 1, &mut rng).unwrap();
        assert!((s12 - 1.0 / 7.0).abs() < 0.02, "s12 {s12}");
    }

    #[test]
    fn zero_variance_is_error() {
        let f = uniform2(1000);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        assert!(matches!(
            main_effect_index(&|_: &[f64]| 1.0, &f, 0, &mut rng),
            Err(Error::ZeroVariance)
        ));
    }

    #[test]
    fn interaction_effect_vanishes_for_additive() {
        let f = uniform2(20_000);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let grid: Vec<f64> = (0..5).map(|i| i as f64 / 4.0).collect();
        let surf = interaction_effect(&|x: &[f64]| x[0] + x[1], &f, 0, 1, &grid, &grid, &mut rng);
        assert!(surf.iter().all(|v| v.abs() < 0.03));
    }

    #[test]
    fn raw_indices_within_mc_tolerance_of_unit_interval() {
        let f = uniform2(20_000);
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let g = |x: &[f64]| (5.0 * x[0]).sin() * x[1] + x[0];
        let pf = PickFreeze::sample(&g, &f, &mut rng);
        for coords in [&[0usize][..], &[1], &[0, 1]] {
            let raw = pf.closed_raw(&g, coords).unwrap();
            assert!(raw > -0.05 && raw < 1.05, "raw {raw}");
        }
    }

    #[test]
    fn doubling_m_shrinks_error() {
        // SE of m₀ drops by about √2 when M doubles (within 20%)
        let g = |x: &[f64]| x[0] + x[1];
        let se = |m: usize, reps: usize| {
            let f = uniform2(m);
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            let vals: Vec<f64> = (0..reps).map(|_| overall_mean(&g, &f, &mut rng)).collect();
            let mu = mean(&vals);
            (vals.iter().map(|v| (v - mu) * (v - mu)).sum::<f64>() / reps as f64).sqrt()
        };
        let se1 = se(2000, 200);
        let se2 = se(4000, 200);
        let ratio = se1 / se2;
        assert!(
            (ratio - std::f64::consts::SQRT_2).abs() < 0.2 * std::f64::consts::SQRT_2,
            "ratio {ratio}"
        );
    }

    #[test]
    fn empirical_marginal_resamples_columns() {
        let rows = vec![vec![1.0, 10.0], vec![2.0, 20.0], vec![3.0, 30.0]];
        let f = FactorDistribution::empirical(&rows, 100);
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..200 {
            let p = f.sample_point(&mut rng);
            assert!([1.0, 2.0, 3.0].contains(&p[0]));
            assert!([10.0, 20.0, 30.0].contains(&p[1]));
        }
        assert_eq!(f.grid(0, 3), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn subsampling_is_even_and_capped() {
        assert_eq!(subsample_indices(10, 0), (0..10).collect::<Vec<_>>());
        assert_eq!(subsample_indices(10, 20), (0..10).collect::<Vec<_>>());
        let idx = subsample_indices(100, 10);
        assert_eq!(idx.len(), 10);
        assert_eq!(idx[0], 0);
        assert!(idx.windows(2).all(|w| w[1] > w[0]));
    }
}
