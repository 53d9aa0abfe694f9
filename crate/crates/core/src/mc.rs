//! Monte Carlo simulation of the SABR dynamics.
//!
//! The volatility is advanced exactly, `σ ← σ exp(ν ΔW² - ν²Δ/2)`, and the
//! forward by full-truncation Euler, `S ← S + σ max(S, 0)^β ΔW¹`, with
//! `ΔW¹ = ρ ΔW² + √(1-ρ²) ΔW⊥`. Both steps use `σ` at the start of the step.
//!
//! Every draw (a single path, or an antithetic pair) owns a ChaCha8 stream
//! selected by its index, so results do not depend on how rayon schedules
//! the work. Reductions run over fixed-size blocks in index order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::black_scholes::{implied_vol_from_price, price_band};
use crate::error::{domain, Result, SabrError};
use crate::params::SabrParams;
use crate::structures::TriangleSpec;

const BLOCK: usize = 4096;

/// Simulation settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McConfig {
    pub paths: usize,
    /// Time steps per year; the grid has `ceil(steps * tau)` steps.
    pub steps: usize,
    pub seed: u64,
    /// Freeze `S` at zero once it reaches zero.
    pub absorption: bool,
    /// Pair every path with its mirror image.
    pub antithetic: bool,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            paths: 200_000,
            steps: 250,
            seed: 42,
            absorption: true,
            antithetic: true,
        }
    }
}

impl McConfig {
    pub fn validate(&self) -> Result<()> {
        if self.paths == 0 {
            return Err(domain("MC needs at least one path"));
        }
        if self.steps == 0 {
            return Err(domain("MC needs at least one step per year"));
        }
        Ok(())
    }

    pub fn time_steps(&self, tau: f64) -> usize {
        ((self.steps as f64 * tau).ceil() as usize).max(1)
    }

    fn draws(&self) -> usize {
        if self.antithetic {
            self.paths.div_ceil(2)
        } else {
            self.paths
        }
    }
}

/// A Monte Carlo estimate and its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
    pub paths_used: usize,
}

impl McEstimate {
    /// `(value - reference) / std_error`, or zero when both coincide.
    pub fn z_score(&self, reference: f64) -> f64 {
        let diff = self.value - reference;
        if self.std_error > 0.0 {
            diff / self.std_error
        } else if diff == 0.0 {
            0.0
        } else {
            diff.signum() * f64::INFINITY
        }
    }
}

/// Terminal forward levels, stored in path order. With antithetics, paths
/// `2j` and `2j + 1` are mirror images.
#[derive(Debug, Clone, PartialEq)]
pub struct TerminalSample {
    pub values: Vec<f64>,
    pub antithetic: bool,
    pub absorbed: usize,
}

impl TerminalSample {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn absorbed_fraction(&self) -> f64 {
        self.absorbed as f64 / self.values.len() as f64
    }

    /// Mean of `payoff` with a standard error over independent draws
    /// (antithetic pairs count as one draw).
    pub fn estimate<F>(&self, payoff: F) -> McEstimate
    where
        F: Fn(f64) -> f64 + Sync,
    {
        let unit = if self.antithetic { 2 } else { 1 };
        let n = self.values.len() / unit;
        let units: Vec<f64> = self
            .values
            .par_chunks(unit)
            .map(|c| c.iter().map(|&s| payoff(s)).sum::<f64>() / unit as f64)
            .collect();
        let mean = block_sum(&units) / n as f64;
        let sq: Vec<f64> = units.par_iter().map(|u| (u - mean) * (u - mean)).collect();
        let std_error = if n > 1 {
            (block_sum(&sq) / (n - 1) as f64 / n as f64).sqrt()
        } else {
            0.0
        };
        McEstimate {
            value: mean,
            std_error,
            paths_used: self.values.len(),
        }
    }
}

/// Sum in fixed blocks, independent of the thread schedule.
fn block_sum(xs: &[f64]) -> f64 {
    let partial: Vec<f64> = xs
        .par_chunks(BLOCK)
        .map(|c| c.iter().sum::<f64>())
        .collect();
    partial.iter().sum()
}

struct PathStepper {
    beta: f64,
    rho_perp: f64,
    rho: f64,
    nu: f64,
    sqrt_dt: f64,
    vol_drift: f64,
    absorption: bool,
}

impl PathStepper {
    /// One step for a path at `(s, sigma)` driven by standard normals.
    #[inline]
    fn step(&self, s: &mut f64, sigma: &mut f64, z_vol: f64, z_perp: f64) {
        let dw2 = self.sqrt_dt * z_vol;
        let dw1 = self.rho * dw2 + self.rho_perp * self.sqrt_dt * z_perp;
        let level = s.max(0.0);
        let local = if self.beta == 1.0 {
            level
        } else {
            level.powf(self.beta)
        };
        *s += *sigma * local * dw1;
        *sigma *= (self.nu * dw2 + self.vol_drift).exp();
        if self.absorption && *s <= 0.0 {
            *s = 0.0;
        }
    }
}

/// Simulates `S_τ` for `cfg.paths` paths (rounded up to even with
/// antithetics).
pub fn simulate_terminal(p: &SabrParams, tau: f64, cfg: &McConfig) -> Result<TerminalSample> {
    cfg.validate()?;
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(domain(format!("MC needs tau > 0, got {tau}")));
    }
    let n = cfg.time_steps(tau);
    let dt = tau / n as f64;
    let stepper = PathStepper {
        beta: p.beta(),
        rho: p.rho(),
        rho_perp: (1.0 - p.rho() * p.rho()).sqrt(),
        nu: p.nu(),
        sqrt_dt: dt.sqrt(),
        vol_drift: -0.5 * p.nu() * p.nu() * dt,
        absorption: cfg.absorption,
    };
    let (s0, a0) = (p.forward(), p.alpha());
    let antithetic = cfg.antithetic;

    let per_draw: Vec<[f64; 2]> = (0..cfg.draws())
        .into_par_iter()
        .map(|draw| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(draw as u64);
            let (mut s, mut sigma) = (s0, a0);
            let (mut s_m, mut sigma_m) = (s0, a0);
            for _ in 0..n {
                let z_vol: f64 = rng.sample(StandardNormal);
                let z_perp: f64 = rng.sample(StandardNormal);
                if !cfg.absorption || s > 0.0 {
                    stepper.step(&mut s, &mut sigma, z_vol, z_perp);
                }
                if antithetic && (!cfg.absorption || s_m > 0.0) {
                    stepper.step(&mut s_m, &mut sigma_m, -z_vol, -z_perp);
                }
            }
            [s, s_m]
        })
        .collect();

    let values: Vec<f64> = if antithetic {
        per_draw.into_iter().flatten().collect()
    } else {
        per_draw.into_iter().map(|d| d[0]).collect()
    };
    if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
        return Err(SabrError::Numerical(format!(
            "non-finite terminal value on path {bad}"
        )));
    }
    let absorbed = values.iter().filter(|&&v| v <= 0.0).count();
    Ok(TerminalSample {
        values,
        antithetic,
        absorbed,
    })
}

/// Undiscounted call `E[(S_τ - K)⁺]`.
pub fn mc_call_price(p: &SabrParams, strike: f64, tau: f64, cfg: &McConfig) -> Result<McEstimate> {
    let sample = simulate_terminal(p, tau, cfg)?;
    Ok(sample.estimate(|s| (s - strike).max(0.0)))
}

/// Undiscounted put `E[(K - S_τ)⁺]`.
pub fn mc_put_price(p: &SabrParams, strike: f64, tau: f64, cfg: &McConfig) -> Result<McEstimate> {
    let sample = simulate_terminal(p, tau, cfg)?;
    Ok(sample.estimate(|s| (strike - s).max(0.0)))
}

/// Implied vol of an already simulated sample at `strike`.
///
/// The out-of-the-money option is priced (put below the forward, call at
/// or above it) and its standard error is carried to vol space by
/// repricing at `price ± SE`.
pub fn implied_vol_from_sample(
    sample: &TerminalSample,
    forward: f64,
    strike: f64,
    tau: f64,
) -> Result<McEstimate> {
    let is_call = strike >= forward;
    let price = if is_call {
        sample.estimate(|s| (s - strike).max(0.0))
    } else {
        sample.estimate(|s| (strike - s).max(0.0))
    };
    let vol = implied_vol_from_price(forward, strike, tau, price.value, is_call)?;
    let (lower, upper) = price_band(forward, strike, is_call);
    let bumped = |q: f64| {
        if q > lower && q < upper {
            implied_vol_from_price(forward, strike, tau, q, is_call).ok()
        } else {
            None
        }
    };
    let se = price.std_error;
    let std_error = match (bumped(price.value + se), bumped(price.value - se)) {
        _ if se == 0.0 => 0.0,
        (Some(up), Some(down)) => 0.5 * (up - down),
        (Some(up), None) => up - vol,
        (None, Some(down)) => vol - down,
        (None, None) => f64::INFINITY,
    };
    Ok(McEstimate {
        value: vol,
        std_error,
        paths_used: price.paths_used,
    })
}

/// Implied vol of the simulated model at one strike.
pub fn mc_implied_vol(p: &SabrParams, strike: f64, tau: f64, cfg: &McConfig) -> Result<McEstimate> {
    let sample = simulate_terminal(p, tau, cfg)?;
    implied_vol_from_sample(&sample, p.forward(), strike, tau)
}

/// Price of `T(K)` on a simulated sample.
pub fn mc_triangle_price(sample: &TerminalSample, spec: &TriangleSpec) -> McEstimate {
    sample.estimate(|s| spec.payoff(s))
}
