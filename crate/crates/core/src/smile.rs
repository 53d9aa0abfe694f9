//! Zero- and first-order terms of the short-maturity implied volatility
//! expansion `I(x, τ) = I⁰(x)(1 + I¹(x)τ) + O(τ²)`.
//!
//! Both zero-order terms factor through the CEV scale
//! `q(K) = (s^{1-β} - K^{1-β}) / ((1-β) x)`:
//!
//! ```text
//! I⁰_B = ν x / D(z)          = α / (q · D(z)/z)
//! I⁰_H = ν x (ζ/z) / D(ζ)    = α / (q · D(ζ)/ζ)
//! ```
//!
//! so the ATM, `ν = 0` and `β = 1` limits are reached without any `0/0`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result, SabrError};
use crate::params::{
    cev_scale, distance_ratio, log_moneyness, z_transform, zeta_transform, FormulaKind, SabrParams,
};

/// One point of a smile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmilePoint {
    pub strike: f64,
    /// `ln(s/K)`.
    pub x: f64,
    /// Zero-order vol.
    pub i0: f64,
    /// First-order coefficient (per year).
    pub i1: f64,
    /// `i0 * (1 + i1 * tau)`.
    pub vol: f64,
}

/// `α s^{β-1}`.
pub fn i0_atm(p: &SabrParams) -> f64 {
    p.alpha() * p.forward().powf(p.beta() - 1.0)
}

/// Local-volatility (`ν = 0`) zero-order term `x α (1-β) / (s^{1-β} - K^{1-β})`.
/// `ν` is ignored.
pub fn i0_localvol(p: &SabrParams, strike: f64) -> Result<f64> {
    let x = log_moneyness(p.forward(), strike)?;
    Ok(p.alpha() / cev_scale(p.beta(), strike, x))
}

/// Corrected zero-order term `ν x / D(z)`.
pub fn i0_berestycki(p: &SabrParams, strike: f64) -> Result<f64> {
    let x = log_moneyness(p.forward(), strike)?;
    let q = cev_scale(p.beta(), strike, x);
    let z = z_transform(p, strike)?;
    Ok(p.alpha() / (q * distance_ratio(z, p.rho())))
}

/// Original zero-order term `ν x (ζ/z) / D(ζ)`.
///
/// At `β = 1` (within [`crate::params::BETA_EPS`]) this evaluates the common
/// `z`-form shared with [`i0_berestycki`].
pub fn i0_hagan(p: &SabrParams, strike: f64) -> Result<f64> {
    if p.is_lognormal() {
        return i0_berestycki(p, strike);
    }
    let x = log_moneyness(p.forward(), strike)?;
    let q = cev_scale(p.beta(), strike, x);
    let zeta = zeta_transform(p, strike)?;
    Ok(p.alpha() / (q * distance_ratio(zeta, p.rho())))
}

/// Zero-order term selected by `kind`.
pub fn i0(kind: FormulaKind, p: &SabrParams, strike: f64) -> Result<f64> {
    match kind {
        FormulaKind::HaganA65 => i0_hagan(p, strike),
        FormulaKind::Berestycki => i0_berestycki(p, strike),
    }
}

/// First-order coefficient, shared by both kinds:
///
/// ```text
/// I¹ = (β-1)²/24 · α²/(sK)^{1-β} + ρναβ/(4 (sK)^{(1-β)/2}) + (2-3ρ²)ν²/24
/// ```
pub fn i1_hagan(p: &SabrParams, strike: f64) -> Result<f64> {
    if !(strike > 0.0 && strike.is_finite()) {
        return Err(domain(format!(
            "strike must be positive and finite, got {strike}"
        )));
    }
    let (alpha, beta, rho, nu) = (p.alpha(), p.beta(), p.rho(), p.nu());
    let omb = 1.0 - beta;
    let sk = p.forward() * strike;
    let sk_half = sk.powf(0.5 * omb);
    let backbone = omb * omb / 24.0 * alpha * alpha / (sk_half * sk_half);
    let skew = 0.25 * rho * nu * alpha * beta / sk_half;
    let curvature = (2.0 - 3.0 * rho * rho) / 24.0 * nu * nu;
    Ok(backbone + skew + curvature)
}

/// Composite implied vol `i0 * (1 + i1_hagan * tau)`.
pub fn implied_vol(kind: FormulaKind, p: &SabrParams, strike: f64, tau: f64) -> Result<SmilePoint> {
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(domain(format!(
            "tau must be non-negative and finite, got {tau}"
        )));
    }
    let x = log_moneyness(p.forward(), strike)?;
    let i0 = i0(kind, p, strike)?;
    let i1 = i1_hagan(p, strike)?;
    let vol = i0 * (1.0 + i1 * tau);
    if !(vol > 0.0) {
        return Err(SabrError::DegenerateVol { strike, vol });
    }
    Ok(SmilePoint {
        strike,
        x,
        i0,
        i1,
        vol,
    })
}

/// Smile over caller-supplied strikes, in strike order.
pub fn smile(
    kind: FormulaKind,
    p: &SabrParams,
    tau: f64,
    strikes: &[f64],
) -> Vec<Result<SmilePoint>> {
    strikes
        .par_iter()
        .map(|&k| implied_vol(kind, p, k, tau))
        .collect()
}

/// How an at-the-money quote is turned into `α`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum AtmBackout {
    /// Solve `α s^{β-1} (1 + I¹(s) τ) = ATM`.
    #[default]
    FirstOrder,
    /// `α = ATM · s^{1-β}`.
    ZeroOrder,
}

/// Solves for the `α` whose at-the-money composite vol equals `atm_vol`.
pub fn alpha_from_atm(
    beta: f64,
    rho: f64,
    nu: f64,
    forward: f64,
    atm_vol: f64,
    tau: f64,
    mode: AtmBackout,
) -> Result<f64> {
    if !(atm_vol > 0.0 && atm_vol.is_finite()) {
        return Err(domain(format!("ATM vol must be positive, got {atm_vol}")));
    }
    let zero_order = atm_vol * forward.powf(1.0 - beta);
    // validates the remaining parameters
    let probe = SabrParams::new(zero_order, beta, rho, nu, forward)?;
    if mode == AtmBackout::ZeroOrder || tau == 0.0 {
        return Ok(zero_order);
    }
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(domain(format!(
            "tau must be non-negative and finite, got {tau}"
        )));
    }

    let residual = |alpha: f64| -> f64 {
        let p = probe.with_alpha(alpha).expect("alpha stays positive");
        let i1 = i1_hagan(&p, forward).expect("forward is a valid strike");
        i0_atm(&p) * (1.0 + i1 * tau) - atm_vol
    };

    let mut lo = 1e-6;
    let mut hi = 10.0;
    if residual(lo) > 0.0 {
        return Err(domain(format!(
            "ATM vol {atm_vol} is below the smallest attainable level at alpha={lo}"
        )));
    }
    // The bracket scales with s^{1-β}; widen it when the forward is large.
    let mut widenings = 0;
    while residual(hi) < 0.0 {
        hi *= 2.0;
        widenings += 1;
        if widenings > 60 {
            return Err(SabrError::Convergence {
                what: "ATM alpha bracket",
                iterations: widenings,
            });
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if residual(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 4.0 * f64::EPSILON * hi {
            return Ok(0.5 * (lo + hi));
        }
    }
    Err(SabrError::Convergence {
        what: "ATM alpha bisection",
        iterations: 200,
    })
}

/// Spacing of a strike grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Linear,
    Geometric,
}

/// `count` strikes from `min` to `max` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrikeGrid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl StrikeGrid {
    pub fn new(min: f64, max: f64, count: usize, spacing: Spacing) -> Result<Self> {
        if count < 2 {
            return Err(domain(format!("grid needs at least 2 points, got {count}")));
        }
        if !(min > 0.0 && min < max && max.is_finite()) {
            return Err(domain(format!(
                "grid needs 0 < min < max, got {min}..{max}"
            )));
        }
        Ok(Self {
            min,
            max,
            count,
            spacing,
        })
    }

    /// 200 geometric points on `[s/10, 3s]`.
    pub fn default_for(forward: f64) -> Self {
        Self {
            min: forward / 10.0,
            max: 3.0 * forward,
            count: 200,
            spacing: Spacing::Geometric,
        }
    }

    pub fn points(&self) -> Vec<f64> {
        let last = (self.count - 1) as f64;
        let mut pts: Vec<f64> = (0..self.count)
            .map(|i| {
                let t = i as f64 / last;
                match self.spacing {
                    Spacing::Linear => self.min + t * (self.max - self.min),
                    Spacing::Geometric => self.min * (self.max / self.min).powf(t),
                }
            })
            .collect();
        pts[self.count - 1] = self.max;
        pts
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    fn params(alpha: f64, beta: f64, rho: f64, nu: f64, s: f64) -> SabrParams {
        SabrParams::new(alpha, beta, rho, nu, s).unwrap()
    }

    #[test]
    fn atm_examples() {
        assert_eq!(i0_atm(&params(0.2, 1.0, 0.0, 0.3, 2.0)), 0.2);
        assert!(rel(i0_atm(&params(0.3, 0.5, 0.0, 0.3, 0.25)), 0.6) < 1e-15);
        // 30-digit reference value
        let v = i0_atm(&params(0.00934, 0.4, -0.33, 0.25, 0.0801));
        assert!(rel(v, 0.04247832335818338) < 1e-14, "{v}");
    }

    #[test]
    fn localvol_examples() {
        let p = params(0.3, 0.5, 0.0, 0.0, 1.0);
        let v = i0_localvol(&p, 0.64).unwrap();
        assert!(rel(v, 0.334_715_326_971_314_6) < 1e-14, "{v}");
        assert!(rel(i0_localvol(&p, 1.0).unwrap(), i0_atm(&p)) < 1e-15);
        let lognormal = params(0.3, 1.0, 0.0, 0.0, 1.0);
        for k in [0.1, 0.9, 4.0] {
            assert_eq!(i0_localvol(&lognormal, k).unwrap(), 0.3);
        }
    }

    #[test]
    fn berestycki_examples() {
        let p = params(0.3, 0.5, -0.4, 0.6, 0.25);
        assert!(rel(i0_berestycki(&p, 0.25).unwrap(), i0_atm(&p)) < 1e-15);

        let flat = params(0.3, 0.5, 0.2, 0.0, 1.0);
        let v = i0_berestycki(&flat, 0.64).unwrap();
        assert!(rel(v, 0.334_715_326_971_314_6) < 1e-14);

        let p = params(0.25, 1.0, 0.0, 0.25, 1.0);
        let v = i0_berestycki(&p, (-1.0f64).exp()).unwrap();
        assert!(rel(v, 0.28364816427662775) < 1e-14, "{v}");
    }

    #[test]
    fn hagan_examples() {
        let p = params(0.3, 0.5, -0.4, 0.6, 0.25);
        assert!(rel(i0_hagan(&p, 0.25).unwrap(), i0_atm(&p)) < 1e-15);

        let flat = params(0.3, 0.5, 0.2, 0.0, 1.0);
        for k in [0.2, 0.64, 1.7] {
            assert_eq!(i0_hagan(&flat, k).unwrap(), i0_localvol(&flat, k).unwrap());
        }

        let alpha = alpha_from_atm(
            0.4,
            -0.33,
            0.25,
            0.0801,
            0.0425,
            15.0,
            AtmBackout::FirstOrder,
        )
        .unwrap();
        let fig1 = params(alpha, 0.4, -0.33, 0.25, 0.0801);
        let h = i0_hagan(&fig1, 0.02).unwrap();
        let b = i0_berestycki(&fig1, 0.02).unwrap();
        assert!(rel(h, b) > 1e-3, "hagan {h} berestycki {b}");
    }

    #[test]
    fn i1_examples() {
        let p = params(0.3, 1.0, 0.0, 0.2, 1.0);
        assert!(rel(i1_hagan(&p, 0.7).unwrap(), 0.04 / 12.0) < 1e-15);
        let p = params(0.3, 1.0, 0.5, 0.0, 1.0);
        assert_eq!(i1_hagan(&p, 0.7).unwrap(), 0.0);
        let p = params(0.3, 0.5, -0.5, 0.4, 1.0);
        let v = i1_hagan(&p, 1.0).unwrap();
        assert!(rel(v, 0.0017708333333333332) < 1e-14, "{v}");
    }

    #[test]
    fn implied_vol_composite() {
        let p = params(0.3, 0.5, -0.5, 0.4, 1.0);
        for kind in FormulaKind::ALL {
            let pt = implied_vol(kind, &p, 0.8, 0.0).unwrap();
            assert_eq!(pt.vol, pt.i0);
            let pt = implied_vol(kind, &p, 0.8, 2.0).unwrap();
            assert_eq!(pt.vol, pt.i0 * (1.0 + pt.i1 * 2.0));
            assert_eq!(pt.x, (1.0f64 / 0.8).ln());
        }
        let lognormal = params(0.3, 1.0, -0.5, 0.4, 1.0);
        for k in [0.3, 0.8, 2.5] {
            let h = implied_vol(FormulaKind::HaganA65, &lognormal, k, 1.5).unwrap();
            let b = implied_vol(FormulaKind::Berestycki, &lognormal, k, 1.5).unwrap();
            assert_eq!(h, b);
        }
        assert!(implied_vol(FormulaKind::Berestycki, &p, 0.8, -1.0).is_err());
    }

    #[test]
    fn negative_composite_vol_is_an_error() {
        // strongly negative skew term drives 1 + i1 tau below zero
        let p = params(2.0, 0.9, -0.99, 2.0, 1.0);
        let i1 = i1_hagan(&p, 1.0).unwrap();
        assert!(i1 < 0.0);
        let tau = -2.0 / i1;
        match implied_vol(FormulaKind::Berestycki, &p, 1.0, tau) {
            Err(SabrError::DegenerateVol { vol, .. }) => assert!(vol <= 0.0),
            other => panic!("expected degenerate vol, got {other:?}"),
        }
    }

    #[test]
    fn atm_backout_round_trips() {
        for mode in [AtmBackout::FirstOrder, AtmBackout::ZeroOrder] {
            let alpha = alpha_from_atm(0.6, -0.37, 0.245, 8.01, 0.0425, 20.0, mode).unwrap();
            let p = params(alpha, 0.6, -0.37, 0.245, 8.01);
            let atm = implied_vol(FormulaKind::HaganA65, &p, 8.01, 20.0).unwrap();
            match mode {
                AtmBackout::FirstOrder => assert!(rel(atm.vol, 0.0425) < 1e-12),
                AtmBackout::ZeroOrder => assert!(rel(atm.i0, 0.0425) < 1e-15),
            }
        }
        // bracket widening for large forwards
        let alpha =
            alpha_from_atm(0.2, 0.0, 0.3, 5000.0, 0.3, 1.0, AtmBackout::FirstOrder).unwrap();
        assert!(alpha > 10.0);
        assert!(alpha_from_atm(0.5, 0.0, 0.3, 1.0, -0.1, 1.0, AtmBackout::FirstOrder).is_err());
    }

    #[test]
    fn grid_points() {
        let g = StrikeGrid::new(1.0, 4.0, 3, Spacing::Geometric).unwrap();
        let pts = g.points();
        assert_eq!(pts.len(), 3);
        assert!(rel(pts[1], 2.0) < 1e-15);
        assert_eq!(pts[2], 4.0);
        let g = StrikeGrid::new(1.0, 4.0, 4, Spacing::Linear).unwrap();
        assert_eq!(g.points(), vec![1.0, 2.0, 3.0, 4.0]);
        assert!(StrikeGrid::new(1.0, 4.0, 1, Spacing::Linear).is_err());
        assert!(StrikeGrid::new(4.0, 1.0, 5, Spacing::Linear).is_err());
        let d = StrikeGrid::default_for(8.01);
        assert_eq!(d.count, 200);
        assert!(rel(d.min, 0.801) < 1e-15);
    }
}
