//! The triangle put spread `T(K)` and finite-difference density scans.
//!
//! `T(K)` is long one put at `K + 2` (percentage points) and short
//! `(K + 2)/K` puts at `K`. Its payoff is a triangle, zero at `0` and at
//! `K + 2`, peaking at `2` on `K`, so any arbitrage-free smile must give it a
//! non-negative price.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::black_scholes::{bs_call, bs_put};
use crate::error::{domain, Result, SabrError};
use crate::params::{FormulaKind, SabrParams};
use crate::smile::implied_vol;

/// Density values below `-TOL_DENSITY` count as violations.
pub const TOL_DENSITY: f64 = 1e-8;

/// Default finite-difference step relative to the forward.
pub const DEFAULT_H_FRACTION: f64 = 1e-4;

/// Unit convention for forward and strikes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Units {
    /// 8.01 means 8.01%.
    #[default]
    Percent,
    /// 0.0801 means 8.01%.
    Decimal,
}

impl Units {
    /// The 2% gap between the peak and the wing of `T(K)`.
    pub fn triangle_width(&self) -> f64 {
        match self {
            Units::Percent => 2.0,
            Units::Decimal => 0.02,
        }
    }

    /// Converts a quoted percentage (e.g. an ATM vol of 4.25) into a plain
    /// number in these units' convention for vols, which are always decimal.
    pub fn vol_from_quote(&self, quote: f64) -> f64 {
        match self {
            Units::Percent => quote / 100.0,
            Units::Decimal => quote,
        }
    }
}

impl fmt::Display for Units {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Units::Percent => "percent",
            Units::Decimal => "decimal",
        })
    }
}

impl FromStr for Units {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "percent" | "pct" => Ok(Units::Percent),
            "decimal" | "dec" => Ok(Units::Decimal),
            other => Err(format!("unknown units '{other}'")),
        }
    }
}

/// The `T(K)` structure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TriangleSpec {
    pub peak_strike: f64,
    pub wing_strike: f64,
    pub short_notional: f64,
}

impl TriangleSpec {
    /// Triangle peaking at `peak` with wing at `peak + width`.
    pub fn new(peak: f64, width: f64) -> Result<Self> {
        if !(peak > 0.0 && peak.is_finite()) {
            return Err(domain(format!(
                "triangle peak must be positive, got {peak}"
            )));
        }
        if !(width > 0.0 && width.is_finite()) {
            return Err(domain(format!(
                "triangle width must be positive, got {width}"
            )));
        }
        let wing = peak + width;
        Ok(Self {
            peak_strike: peak,
            wing_strike: wing,
            short_notional: wing / peak,
        })
    }

    pub fn with_units(peak: f64, units: Units) -> Result<Self> {
        Self::new(peak, units.triangle_width())
    }

    /// Payoff at terminal level `s_t`.
    pub fn payoff(&self, s_t: f64) -> f64 {
        (self.wing_strike - s_t).max(0.0) - self.short_notional * (self.peak_strike - s_t).max(0.0)
    }
}

/// Price of `T(K)` under the smile `kind`.
pub fn price_triangle(
    kind: FormulaKind,
    p: &SabrParams,
    tau: f64,
    spec: &TriangleSpec,
) -> Result<f64> {
    let s = p.forward();
    let wing_vol = implied_vol(kind, p, spec.wing_strike, tau)?.vol;
    let peak_vol = implied_vol(kind, p, spec.peak_strike, tau)?.vol;
    Ok(bs_put(s, spec.wing_strike, wing_vol, tau)
        - spec.short_notional * bs_put(s, spec.peak_strike, peak_vol, tau))
}

/// `price_triangle` over a list of peaks, sorted by peak.
pub fn triangle_curve(
    kind: FormulaKind,
    p: &SabrParams,
    tau: f64,
    peaks: &[f64],
    width: f64,
) -> Vec<(f64, Result<f64>)> {
    let mut sorted = peaks.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted
        .par_iter()
        .map(|&peak| {
            let price =
                TriangleSpec::new(peak, width).and_then(|spec| price_triangle(kind, p, tau, &spec));
            (peak, price)
        })
        .collect()
}

/// A maximal run of consecutive grid points with density below `-tol`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrikeInterval {
    pub lo: f64,
    pub hi: f64,
    /// Most negative density in the run.
    pub min_density: f64,
}

/// Result of [`density_scan`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub strikes: Vec<f64>,
    /// `None` where the smile could not be evaluated.
    pub density: Vec<Option<f64>>,
    /// Sorted, disjoint.
    pub violations: Vec<StrikeInterval>,
    pub h: f64,
    pub tol: f64,
}

impl DensityReport {
    pub fn has_violation(&self) -> bool {
        !self.violations.is_empty()
    }

    /// Whether every violation interval of `self` lies inside one of `other`'s.
    pub fn violations_within(&self, other: &DensityReport) -> bool {
        self.violations.iter().all(|v| {
            other
                .violations
                .iter()
                .any(|o| o.lo <= v.lo && v.hi <= o.hi)
        })
    }
}

/// Smile-consistent undiscounted call price.
pub fn smile_call(kind: FormulaKind, p: &SabrParams, strike: f64, tau: f64) -> Result<f64> {
    let vol = implied_vol(kind, p, strike, tau)?.vol;
    Ok(bs_call(p.forward(), strike, vol, tau))
}

/// Breeden-Litzenberger density `[C(K-h) - 2C(K) + C(K+h)]/h²` on `grid`.
pub fn density_scan(
    kind: FormulaKind,
    p: &SabrParams,
    tau: f64,
    grid: &[f64],
    h: f64,
) -> Result<DensityReport> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(domain(format!("density step must be positive, got {h}")));
    }
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(domain("density grid must be strictly increasing"));
    }
    let density: Vec<Option<f64>> = grid
        .par_iter()
        .map(|&k| {
            if !(k - h > 0.0) {
                return None;
            }
            let c = |strike| smile_call(kind, p, strike, tau);
            match (c(k - h), c(k), c(k + h)) {
                (Ok(lo), Ok(mid), Ok(hi)) => Some((lo - 2.0 * mid + hi) / (h * h)),
                _ => None,
            }
        })
        .collect();

    let mut violations = Vec::new();
    let mut run: Option<StrikeInterval> = None;
    for (&k, d) in grid.iter().zip(&density) {
        match d {
            Some(v) if *v < -TOL_DENSITY => {
                let r = run.get_or_insert(StrikeInterval {
                    lo: k,
                    hi: k,
                    min_density: *v,
                });
                r.hi = k;
                r.min_density = r.min_density.min(*v);
            }
            _ => {
                if let Some(r) = run.take() {
                    violations.push(r);
                }
            }
        }
    }
    violations.extend(run);

    Ok(DensityReport {
        strikes: grid.to_vec(),
        density,
        violations,
        h,
        tol: TOL_DENSITY,
    })
}

/// Peaks at which the curve is negative, ignoring points that failed.
pub fn negative_peaks(curve: &[(f64, Result<f64>)]) -> Vec<f64> {
    curve
        .iter()
        .filter_map(|(k, v)| match v {
            Ok(price) if *price < 0.0 => Some(*k),
            _ => None,
        })
        .collect()
}

/// Count of failed points in a curve.
pub fn failed_points(curve: &[(f64, Result<f64>)]) -> Vec<(f64, SabrError)> {
    curve
        .iter()
        .filter_map(|(k, v)| v.as_ref().err().map(|e| (*k, e.clone())))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_payoff_shape() {
        let t = TriangleSpec::with_units(1.0, Units::Percent).unwrap();
        assert_eq!(t.wing_strike, 3.0);
        assert_eq!(t.short_notional, 3.0);
        assert_eq!(t.payoff(0.0), 0.0);
        assert_eq!(t.payoff(1.0), 2.0);
        assert_eq!(t.payoff(3.0), 0.0);
        assert_eq!(t.payoff(10.0), 0.0);
        assert_eq!(t.payoff(0.5), 1.0);
        for i in 0..=4000 {
            let s = i as f64 * 1e-3;
            assert!(t.payoff(s) >= -1e-15, "payoff({s}) = {}", t.payoff(s));
        }
        let d = TriangleSpec::with_units(0.01, Units::Decimal).unwrap();
        assert!((d.payoff(0.01) - 0.02).abs() < 1e-17);
        assert!(TriangleSpec::new(0.0, 2.0).is_err());
    }

    #[test]
    fn flat_smile_triangle_is_positive() {
        let p = SabrParams::new(0.2, 1.0, 0.0, 0.0, 8.01).unwrap();
        let peaks: Vec<f64> = (1..=24).map(|i| 0.25 * i as f64).collect();
        for (peak, price) in triangle_curve(FormulaKind::HaganA65, &p, 15.0, &peaks, 2.0) {
            assert!(price.unwrap() >= 0.0, "peak {peak}");
        }
    }

    #[test]
    fn single_peak_curve_is_price() {
        let p = SabrParams::new(0.14, 0.4, -0.33, 0.25, 8.01).unwrap();
        let spec = TriangleSpec::new(1.0, 2.0).unwrap();
        let direct = price_triangle(FormulaKind::Berestycki, &p, 15.0, &spec).unwrap();
        let curve = triangle_curve(FormulaKind::Berestycki, &p, 15.0, &[1.0], 2.0);
        assert_eq!(curve.len(), 1);
        assert_eq!(*curve[0].1.as_ref().unwrap(), direct);
    }

    #[test]
    fn curve_is_sorted() {
        let p = SabrParams::new(0.14, 0.4, -0.33, 0.25, 8.01).unwrap();
        let curve = triangle_curve(FormulaKind::HaganA65, &p, 15.0, &[3.0, 1.0, 2.0], 2.0);
        let peaks: Vec<f64> = curve.iter().map(|(k, _)| *k).collect();
        assert_eq!(peaks, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn flat_smile_scan_is_clean() {
        let p = SabrParams::new(0.2, 1.0, 0.0, 0.0, 1.0).unwrap();
        let r = density_scan(FormulaKind::Berestycki, &p, 1.0, &[0.5, 1.0, 1.5], 1e-4).unwrap();
        assert!(r.violations.is_empty());
        assert_eq!(r.density.len(), r.strikes.len());
        assert!(density_scan(FormulaKind::Berestycki, &p, 1.0, &[1.0, 1.0], 1e-4).is_err());
        assert!(density_scan(FormulaKind::Berestycki, &p, 1.0, &[1.0, 2.0], 0.0).is_err());
    }

    #[test]
    fn grid_points_below_step_are_marked() {
        let p = SabrParams::new(0.2, 1.0, 0.0, 0.0, 1.0).unwrap();
        let r = density_scan(FormulaKind::Berestycki, &p, 1.0, &[1e-5, 1.0], 1e-4).unwrap();
        assert_eq!(r.density[0], None);
        assert!(r.density[1].is_some());
    }

    #[test]
    fn units_parse() {
        assert_eq!("percent".parse::<Units>().unwrap(), Units::Percent);
        assert_eq!("decimal".parse::<Units>().unwrap(), Units::Decimal);
        assert!("bp".parse::<Units>().is_err());
        assert_eq!(Units::Percent.vol_from_quote(4.25), 0.0425);
    }
}
