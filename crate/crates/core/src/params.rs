//! SABR parameters and the moneyness transforms shared by every zero-order
//! formula.
//!
//! The model is
//!
//! ```text
//! dS = σ S^β dW¹,   S₀ = s
//! dσ = ν σ dW²,     σ₀ = α,   d⟨W¹, W²⟩ = ρ dt
//! ```
//!
//! Two transforms of the strike appear in the short-maturity smile:
//!
//! ```text
//! z = (ν/α) (s^{1-β} - K^{1-β}) / (1-β)
//! ζ = (ν/α) (s - K) / (sK)^{β/2}
//! ```
//!
//! and both enter through the distance function
//! `D(z) = ln((√(1 - 2ρz + z²) + z - ρ) / (1 - ρ))`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Below this distance from one, `β` is treated as exactly one and the CEV
/// transforms switch to their logarithmic limit.
pub const BETA_EPS: f64 = 1e-8;

/// Below this magnitude, `D(z)/z` is evaluated from its Taylor series.
pub const Z_EPS: f64 = 1e-6;

/// Validated SABR model state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SabrParams {
    alpha: f64,
    beta: f64,
    rho: f64,
    nu: f64,
    forward: f64,
}

impl SabrParams {
    /// Builds a parameter set, rejecting anything outside
    /// `α > 0, β ∈ (0, 1], |ρ| < 1, ν ≥ 0, s > 0`.
    pub fn new(alpha: f64, beta: f64, rho: f64, nu: f64, forward: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(domain(format!(
                "alpha must be positive and finite, got {alpha}"
            )));
        }
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(domain(format!("beta must lie in (0, 1], got {beta}")));
        }
        if !(rho.abs() < 1.0) {
            return Err(domain(format!("rho must satisfy |rho| < 1, got {rho}")));
        }
        if !(nu >= 0.0 && nu.is_finite()) {
            return Err(domain(format!(
                "nu must be non-negative and finite, got {nu}"
            )));
        }
        if !(forward > 0.0 && forward.is_finite()) {
            return Err(domain(format!(
                "forward must be positive and finite, got {forward}"
            )));
        }
        Ok(Self {
            alpha,
            beta,
            rho,
            nu,
            forward,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn forward(&self) -> f64 {
        self.forward
    }

    /// Same parameters with a different `α`.
    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        Self::new(alpha, self.beta, self.rho, self.nu, self.forward)
    }

    /// Same parameters with a different `β`.
    pub fn with_beta(&self, beta: f64) -> Result<Self> {
        Self::new(self.alpha, beta, self.rho, self.nu, self.forward)
    }

    /// Same parameters with a different `ν`.
    pub fn with_nu(&self, nu: f64) -> Result<Self> {
        Self::new(self.alpha, self.beta, self.rho, nu, self.forward)
    }

    /// True when `β` is within [`BETA_EPS`] of one.
    pub fn is_lognormal(&self) -> bool {
        (1.0 - self.beta).abs() < BETA_EPS
    }
}

/// Which zero-order term to use for the smile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormulaKind {
    /// The original expansion (formula A.65) with the `ζ` transform.
    HaganA65,
    /// The corrected term, consistent as `β → 1`.
    Berestycki,
}

impl FormulaKind {
    pub const ALL: [FormulaKind; 2] = [FormulaKind::HaganA65, FormulaKind::Berestycki];

    /// Short lowercase label used in column names.
    pub fn label(&self) -> &'static str {
        match self {
            FormulaKind::HaganA65 => "hagan",
            FormulaKind::Berestycki => "berestycki",
        }
    }
}

impl fmt::Display for FormulaKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for FormulaKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "hagan" | "hagan_a65" | "a65" => Ok(FormulaKind::HaganA65),
            "berestycki" | "bbf" => Ok(FormulaKind::Berestycki),
            other => Err(format!("unknown formula '{other}'")),
        }
    }
}

/// `ln(s/K)`.
pub fn log_moneyness(forward: f64, strike: f64) -> Result<f64> {
    if !(forward > 0.0) || !(strike > 0.0) {
        return Err(domain(format!(
            "log-moneyness needs positive forward and strike, got s={forward}, K={strike}"
        )));
    }
    if forward == strike {
        return Ok(0.0);
    }
    Ok((forward / strike).ln())
}

/// `expm1(u)/u`, continuous through `u = 0`.
fn expm1_ratio(u: f64) -> f64 {
    if u.abs() < 1e-300 {
        1.0
    } else {
        u.exp_m1() / u
    }
}

/// `(s^c - K^c) / (c x)` with `c = 1 - β` and `x = ln(s/K)`, so that the
/// CEV distance is `x * cev_scale`. Written as `K^c * expm1(c x) / (c x)`
/// which has no cancellation near `K = s` or `β = 1`.
pub(crate) fn cev_scale(beta: f64, strike: f64, x: f64) -> f64 {
    let c = 1.0 - beta;
    if c.abs() < BETA_EPS {
        return 1.0;
    }
    strike.powf(c) * expm1_ratio(c * x)
}

fn check_strike(strike: f64) -> Result<()> {
    if strike > 0.0 && strike.is_finite() {
        Ok(())
    } else {
        Err(domain(format!(
            "strike must be positive and finite, got {strike}"
        )))
    }
}

/// `z` from raw inputs. `β` may be any value in `[0, 1]` here.
pub fn z_value(nu: f64, alpha: f64, beta: f64, forward: f64, strike: f64) -> Result<f64> {
    let x = log_moneyness(forward, strike)?;
    Ok(nu / alpha * x * cev_scale(beta, strike, x))
}

/// `ζ` from raw inputs. `β` may be any value in `[0, 1]` here.
pub fn zeta_value(nu: f64, alpha: f64, beta: f64, forward: f64, strike: f64) -> Result<f64> {
    check_strike(strike)?;
    if !(forward > 0.0) {
        return Err(domain(format!("forward must be positive, got {forward}")));
    }
    Ok(nu / alpha * (forward - strike) / (forward * strike).powf(0.5 * beta))
}

/// `z = (ν/α)(s^{1-β} - K^{1-β})/(1-β)`, with the `(ν/α) ln(s/K)` limit
/// for `|1-β| < BETA_EPS`.
pub fn z_transform(p: &SabrParams, strike: f64) -> Result<f64> {
    z_value(p.nu, p.alpha, p.beta, p.forward, strike)
}

/// `ζ = (ν/α)(s - K)/(sK)^{β/2}`.
pub fn zeta_transform(p: &SabrParams, strike: f64) -> Result<f64> {
    zeta_value(p.nu, p.alpha, p.beta, p.forward, strike)
}

/// `D(z) = ln((√(1 - 2ρz + z²) + z - ρ)/(1 - ρ))`.
///
/// Strictly increasing with `D(0) = 0`; small arguments go through the
/// Taylor series of `D(z)/z`.
pub fn d_function(z: f64, rho: f64) -> Result<f64> {
    if !(rho.abs() < 1.0) {
        return Err(domain(format!("D(z) needs |rho| < 1, got {rho}")));
    }
    if !z.is_finite() {
        return Err(domain(format!("D(z) needs finite z, got {z}")));
    }
    Ok(distance(z, rho))
}

pub(crate) fn distance(z: f64, rho: f64) -> f64 {
    if z.abs() < Z_EPS {
        z * distance_ratio_series(z, rho)
    } else {
        distance_closed(z, rho)
    }
}

/// `D(z)/z`, equal to one at `z = 0`.
pub(crate) fn distance_ratio(z: f64, rho: f64) -> f64 {
    if z.abs() < Z_EPS {
        distance_ratio_series(z, rho)
    } else {
        distance_closed(z, rho) / z
    }
}

/// `D(z)/z = 1 + ρz/2 + (3ρ² - 1)z²/6 + (5ρ³ - 3ρ)z³/8 + O(z⁴)`,
/// obtained by integrating `D'(z) = (1 - 2ρz + z²)^{-1/2}`.
pub(crate) fn distance_ratio_series(z: f64, rho: f64) -> f64 {
    let r2 = rho * rho;
    let c1 = 0.5 * rho;
    let c2 = (3.0 * r2 - 1.0) / 6.0;
    let c3 = (5.0 * r2 * rho - 3.0 * rho) / 8.0;
    1.0 + z * (c1 + z * (c2 + z * c3))
}

/// Closed form of `D`, arranged as a `ln_1p` so that small `z` keeps full
/// relative precision. For `z < 0` the reflected identity
/// `D(z) = -ln((√(…) - z + ρ)/(1 + ρ))` avoids cancellation in `√(…) + z`.
pub(crate) fn distance_closed(z: f64, rho: f64) -> f64 {
    let u = z * (z - 2.0 * rho);
    let root = (1.0 + u).sqrt();
    // root - 1 without cancellation
    let root_m1 = u / (root + 1.0);
    if z >= 0.0 {
        ((root_m1 + z) / (1.0 - rho)).ln_1p()
    } else {
        -((root_m1 - z) / (1.0 + rho)).ln_1p()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn validation_rejects_bad_params() {
        assert!(SabrParams::new(0.0, 0.5, 0.0, 0.2, 1.0).is_err());
        assert!(SabrParams::new(0.2, 0.0, 0.0, 0.2, 1.0).is_err());
        assert!(SabrParams::new(0.2, 1.0 + 1e-12, 0.0, 0.2, 1.0).is_err());
        assert!(SabrParams::new(0.2, 0.5, 1.0, 0.2, 1.0).is_err());
        assert!(SabrParams::new(0.2, 0.5, -1.0, 0.2, 1.0).is_err());
        assert!(SabrParams::new(0.2, 0.5, 0.0, -0.1, 1.0).is_err());
        assert!(SabrParams::new(0.2, 0.5, 0.0, 0.2, 0.0).is_err());
        assert!(SabrParams::new(0.2, 0.5, f64::NAN, 0.2, 1.0).is_err());
        assert!(SabrParams::new(0.2, 1.0, 0.0, 0.0, 1.0).is_ok());
    }

    #[test]
    fn log_moneyness_examples() {
        assert_eq!(log_moneyness(1.0, 1.0).unwrap(), 0.0);
        assert_eq!(log_moneyness(0.0801, 0.0801).unwrap(), 0.0);
        assert!(rel(log_moneyness(1.0, (-1.0f64).exp()).unwrap(), 1.0) < 1e-15);
        assert!(log_moneyness(0.0, 1.0).is_err());
        assert!(log_moneyness(1.0, -1.0).is_err());
    }

    #[test]
    fn z_examples() {
        let p = SabrParams::new(0.3, 0.5, 0.0, 0.25, 1.0).unwrap();
        assert!(rel(z_transform(&p, 0.64).unwrap(), 1.0 / 3.0) < 1e-14);
        assert_eq!(z_transform(&p, 1.0).unwrap(), 0.0);

        let p1 = SabrParams::new(0.3, 1.0, 0.0, 0.25, 1.3).unwrap();
        let expected = 0.25 / 0.3 * (1.3f64 / 0.9).ln();
        assert!(rel(z_transform(&p1, 0.9).unwrap(), expected) < 1e-15);
    }

    #[test]
    fn z_limit_branch_near_beta_one() {
        let p = SabrParams::new(0.3, 1.0 - 1e-12, 0.0, 0.25, 1.0).unwrap();
        for k in [0.3, 0.7, 1.4, 3.0] {
            let expected = 0.25 / 0.3 * (1.0f64 / k).ln();
            assert!(rel(z_transform(&p, k).unwrap(), expected) < 1e-6);
        }
        // just outside the switch the direct expression is still accurate
        let p = SabrParams::new(0.3, 1.0 - 1e-7, 0.0, 0.25, 1.0).unwrap();
        let expected = 0.25 / 0.3 * (1.0f64 / 0.5).ln();
        assert!(rel(z_transform(&p, 0.5).unwrap(), expected) < 1e-6);
    }

    #[test]
    fn zeta_examples() {
        // beta = 0 is outside SabrParams but admitted by the raw helper
        let v = zeta_value(0.25, 0.3, 0.0, 1.0, 0.5).unwrap();
        assert!(rel(v, 0.25 / 0.3 * 0.5) < 1e-15);

        let e = std::f64::consts::E;
        let p = SabrParams::new(0.3, 1.0, 0.0, 0.25, e).unwrap();
        let expected = 0.25 / 0.3 * (e - 1.0) / e.sqrt();
        assert!(rel(zeta_transform(&p, 1.0).unwrap(), expected) < 1e-15);
        assert_eq!(zeta_transform(&p, e).unwrap(), 0.0);
    }

    #[test]
    fn d_function_examples() {
        assert_eq!(d_function(0.0, -0.33).unwrap(), 0.0);
        let expected = (1.0 + 2f64.sqrt()).ln();
        assert!(rel(d_function(1.0, 0.0).unwrap(), expected) < 1e-15);
        assert!(rel(d_function(1e-9, 0.5).unwrap(), 1e-9) < 1e-9);
        assert!(d_function(0.1, 1.0).is_err());
        assert!(d_function(0.1, -1.0).is_err());
        assert!(d_function(f64::INFINITY, 0.0).is_err());
    }

    #[test]
    fn d_function_matches_naive_form_away_from_zero() {
        for &rho in &[-0.9f64, -0.3, 0.0, 0.4, 0.9] {
            for &z in &[-5.0f64, -1.0, -0.2, 0.2, 1.0, 5.0] {
                let naive = (((1.0 - 2.0 * rho * z + z * z).sqrt() + z - rho) / (1.0 - rho)).ln();
                assert!(
                    rel(d_function(z, rho).unwrap(), naive) < 1e-13,
                    "z={z} rho={rho}"
                );
            }
        }
    }

    #[test]
    fn branches_agree_at_switch_point() {
        for &rho in &[-0.99, -0.5, 0.0, 0.5, 0.99] {
            for &sign in &[-1.0, 1.0] {
                for &bump in &[1.0 - 1e-3, 1.0 + 1e-3] {
                    let z = sign * Z_EPS * bump;
                    let series = z * distance_ratio_series(z, rho);
                    let closed = distance_closed(z, rho);
                    assert!(
                        rel(series, closed) < 1e-12,
                        "rho={rho} z={z}: {series} vs {closed}"
                    );
                }
            }
        }
    }

    #[test]
    fn formula_kind_parses() {
        assert_eq!(
            "hagan".parse::<FormulaKind>().unwrap(),
            FormulaKind::HaganA65
        );
        assert_eq!(
            "Berestycki".parse::<FormulaKind>().unwrap(),
            FormulaKind::Berestycki
        );
        assert!("both".parse::<FormulaKind>().is_err());
    }
}
