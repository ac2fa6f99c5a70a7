//! Discrete SIR recursion with day-varying parameters.
//!
//! The compartments evolve by
//!
//! ```text
//! I(t+1) = (1 + β_t − γ_t) I(t) − β_t I(t) (I(t) + R(t)) / N
//! R(t+1) = R(t) + γ_t I(t)
//! S(t+1) = N − I(t+1) − R(t+1)
//! ```
//!
//! and the expected number of newly reported cases on day t is the drop in
//! susceptibles, S(t−1) − S(t) = β_t I(t−1) S(t−1) / N, which serves as the
//! Poisson mean for the observed counts.

use crate::error::{Error, Result};

/// Relative tolerance for the S + I + R = N conservation check.
pub const CONSERVATION_TOL: f64 = 1e-9;

/// One day's compartment state. Counts are real-valued: the recursion is
/// deterministic and feeds a Poisson mean, so fractional counts are fine.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Compartments {
    pub s: f64,
    pub i: f64,
    pub r: f64,
    pub n: f64,
}

impl Compartments {
    pub fn new(s: f64, i: f64, r: f64) -> Result<Self> {
        let n = s + i + r;
        if n <= 0.0 {
            return Err(Error::NegativePopulation(n));
        }
        let c = Compartments { s, i, r, n };
        c.check(0)?;
        Ok(c)
    }

    /// Initial state from a population and a first-day infectious count:
    /// i(0) = first count, r(0) = 0, s(0) = N − i(0).
    pub fn from_population(n: f64, i0: f64) -> Result<Self> {
        if n <= 0.0 {
            return Err(Error::NegativePopulation(n));
        }
        Compartments::new(n - i0, i0, 0.0)
    }

    fn check(&self, step: usize) -> Result<()> {
        for (name, v) in [("s", self.s), ("i", self.i), ("r", self.r)] {
            if v < 0.0 {
                return Err(Error::DegenerateState {
                    step,
                    compartment: name,
                    value: v,
                });
            }
        }
        debug_assert!((self.s + self.i + self.r - self.n).abs() <= CONSERVATION_TOL * self.n);
        Ok(())
    }
}

/// What to do when the recursion would push a compartment below zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NegativeStateMode {
    /// Raise [`Error::DegenerateState`]. Surfaces bad parameter regions.
    #[default]
    Error,
    /// Clamp at zero, keeping the likelihood finite during early exploration.
    Clamp,
}

/// Advance the state one day with contact rate `beta` and removal rate `gamma`.
pub fn sir_step(
    c: &Compartments,
    beta: f64,
    gamma: f64,
    mode: NegativeStateMode,
) -> Result<Compartments> {
    sir_step_at(c, beta, gamma, mode, 0)
}

fn sir_step_at(
    c: &Compartments,
    beta: f64,
    gamma: f64,
    mode: NegativeStateMode,
    step: usize,
) -> Result<Compartments> {
    let mut i = (1.0 + beta - gamma) * c.i - beta * c.i * (c.i + c.r) / c.n;
    let r = c.r + gamma * c.i;
    if i < 0.0 {
        match mode {
            NegativeStateMode::Error => {
                return Err(Error::DegenerateState {
                    step,
                    compartment: "i",
                    value: i,
                })
            }
            NegativeStateMode::Clamp => i = 0.0,
        }
    }
    let mut s = c.n - i - r;
    if s < 0.0 {
        match mode {
            NegativeStateMode::Error => {
                return Err(Error::DegenerateState {
                    step,
                    compartment: "s",
                    value: s,
                })
            }
            NegativeStateMode::Clamp => {
                s = 0.0;
                i = c.n - r;
            }
        }
    }
    Ok(Compartments { s, i, r, n: c.n })
}

/// Day-indexed parameter sequences β_t = β(x_t), γ_t = γ(x_t), each in (0,1).
#[derive(Debug, Clone, PartialEq)]
pub struct ParamPath {
    beta: Vec<f64>,
    gamma: Vec<f64>,
}

impl ParamPath {
    pub fn new(beta: Vec<f64>, gamma: Vec<f64>) -> Result<Self> {
        if beta.len() != gamma.len() {
            return Err(Error::DimensionMismatch {
                expected: beta.len(),
                got: gamma.len(),
            });
        }
        for &v in beta.iter().chain(gamma.iter()) {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::DomainError { value: v });
            }
        }
        Ok(ParamPath { beta, gamma })
    }

    pub fn len(&self) -> usize {
        self.beta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.beta.is_empty()
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }
}

/// Maps a parameter path to the vector of daily Poisson means.
#[derive(Debug, Clone, PartialEq)]
pub enum MeanModel {
    /// Rolls the discrete SIR recursion forward from `init`.
    Sir {
        init: Compartments,
        mode: NegativeStateMode,
    },
    /// The analytic test model λ_t = 5 β_t + γ_t (t/10)².
    Test,
}

impl MeanModel {
    /// Poisson mean for one day given that day's parameters.
    ///
    /// For the SIR kind `state` is the compartment state at the *start* of the
    /// day; the mean is the susceptible drop over the day.
    pub fn day_mean(beta: f64, gamma: f64, day: usize, state: Option<&Compartments>) -> f64 {
        match state {
            Some(c) => beta * c.i * c.s / c.n,
            None => {
                let t = day as f64;
                5.0 * beta + gamma * (t / 10.0) * (t / 10.0)
            }
        }
    }

    /// Mean curve over the whole path, with day indices starting at `first_day`
    /// (1-based in the usual setup).
    pub fn mean_curve(&self, path: &ParamPath, first_day: usize) -> Result<Vec<f64>> {
        if path.is_empty() {
            return Err(Error::EmptyDraws);
        }
        let mut out = Vec::with_capacity(path.len());
        match self {
            MeanModel::Test => {
                for (k, (&b, &g)) in path.beta().iter().zip(path.gamma()).enumerate() {
                    out.push(Self::day_mean(b, g, first_day + k, None));
                }
            }
            MeanModel::Sir { init, mode } => {
                let mut state = *init;
                for (k, (&b, &g)) in path.beta().iter().zip(path.gamma()).enumerate() {
                    let next = sir_step_at(&state, b, g, *mode, k)?;
                    out.push(state.s - next.s);
                    state = next;
                }
            }
        }
        for (k, &lam) in out.iter().enumerate() {
            if !(lam > 0.0) {
                return Err(Error::NonpositiveMean {
                    day: first_day + k,
                    value: lam,
                });
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn state(s: f64, i: f64, r: f64) -> Compartments {
        Compartments::new(s, i, r).unwrap()
    }

    #[test]
    fn step_matches_hand_computation() {
        let c = state(990.0, 10.0, 0.0);
        let next = sir_step(&c, 0.3, 0.1, NegativeStateMode::Error).unwrap();
        assert_relative_eq!(next.s, 987.03, epsilon = 1e-12);
        assert_relative_eq!(next.i, 11.97, epsilon = 1e-12);
        assert_relative_eq!(next.r, 1.0, epsilon = 1e-12);
        // susceptible drop equals β I S / N
        assert_relative_eq!(c.s - next.s, 0.3 * 10.0 * 990.0 / 1000.0, epsilon = 1e-12);
    }

    #[test]
    fn step_fixed_points() {
        let c = state(990.0, 0.0, 10.0);
        let next = sir_step(&c, 0.3, 0.1, NegativeStateMode::Error).unwrap();
        assert_eq!(next, c);

        let c = state(990.0, 10.0, 0.0);
        let next = sir_step(&c, 0.0, 0.0, NegativeStateMode::Error).unwrap();
        assert_eq!(next, c);
    }

    #[test]
    fn conservation_over_long_rollout() {
        let mut c = state(9990.0, 10.0, 0.0);
        for _ in 0..1000 {
            c = sir_step(&c, 0.25, 0.1, NegativeStateMode::Error).unwrap();
            assert!((c.s + c.i + c.r - c.n).abs() <= CONSERVATION_TOL * c.n);
        }
    }

    #[test]
    fn removed_is_nondecreasing() {
        let mut c = state(990.0, 10.0, 0.0);
        let mut prev_r = c.r;
        for _ in 0..200 {
            c = sir_step(&c, 0.4, 0.2, NegativeStateMode::Error).unwrap();
            assert!(c.r >= prev_r);
            prev_r = c.r;
        }
    }

    #[test]
    fn new_infection_identity() {
        let path = ParamPath::new(vec![0.3, 0.25, 0.2], vec![0.1, 0.1, 0.15]).unwrap();
        let init = state(990.0, 10.0, 0.0);
        let model = MeanModel::Sir {
            init,
            mode: NegativeStateMode::Error,
        };
        let curve = model.mean_curve(&path, 1).unwrap();
        let mut c = init;
        for (k, (&b, &g)) in path.beta().iter().zip(path.gamma()).enumerate() {
            let direct = b * c.i * c.s / c.n;
            assert_relative_eq!(curve[k], direct, max_relative = 1e-12);
            c = sir_step(&c, b, g, NegativeStateMode::Error).unwrap();
        }
    }

    #[test]
    fn sir_single_day_mean() {
        let model = MeanModel::Sir {
            init: state(990.0, 10.0, 0.0),
            mode: NegativeStateMode::Error,
        };
        let path = ParamPath::new(vec![0.3], vec![0.1]).unwrap();
        let curve = model.mean_curve(&path, 1).unwrap();
        assert_relative_eq!(curve[0], 2.97, epsilon = 1e-12);
    }

    #[test]
    fn test_model_day_ten() {
        let lam = MeanModel::day_mean(0.2, 0.5, 10, None);
        assert_relative_eq!(lam, 1.5, epsilon = 1e-15);
    }

    #[test]
    fn test_model_linear_in_params() {
        // λ_t is linear in (β_t, γ_t) for fixed t
        let t = 7;
        let f = |b: f64, g: f64| MeanModel::day_mean(b, g, t, None);
        let (b1, g1, b2, g2) = (0.2, 0.3, 0.6, 0.7);
        let mid = f(0.5 * (b1 + b2), 0.5 * (g1 + g2));
        assert_relative_eq!(mid, 0.5 * (f(b1, g1) + f(b2, g2)), max_relative = 1e-14);
    }

    #[test]
    fn empty_epidemic_is_nonpositive_mean() {
        let model = MeanModel::Sir {
            init: state(1000.0, 0.0, 0.0),
            mode: NegativeStateMode::Error,
        };
        let path = ParamPath::new(vec![0.3, 0.3], vec![0.1, 0.1]).unwrap();
        assert!(matches!(
            model.mean_curve(&path, 1),
            Err(Error::NonpositiveMean { .. })
        ));
    }

    #[test]
    fn param_path_rejects_bounds() {
        assert!(ParamPath::new(vec![0.0], vec![0.5]).is_err());
        assert!(ParamPath::new(vec![0.5], vec![1.0]).is_err());
        assert!(ParamPath::new(vec![0.5, 0.5], vec![0.5]).is_err());
    }

    #[test]
    fn clamp_mode_keeps_state_valid() {
        // aggressive parameters that would overshoot in error mode
        let mut c = state(1.0, 998.0, 1.0);
        for _ in 0..50 {
            c = sir_step(&c, 0.99, 0.9999, NegativeStateMode::Clamp).unwrap();
            assert!(c.s >= 0.0 && c.i >= 0.0 && c.r >= 0.0);
            assert!((c.s + c.i + c.r - c.n).abs() <= CONSERVATION_TOL * c.n);
        }
    }
}
