//! Browser demo bindings. Every curve is returned as one flat array
//! `[xs..., hagan..., berestycki...]` with `NaN` where a point failed, so
//! the page can slice it without any serialization layer.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use sabr_smile::structures::{smile_call, DEFAULT_H_FRACTION};
use sabr_smile::{
    alpha_from_atm, density_scan, implied_vol, triangle_curve, AtmBackout, FormulaKind, SabrParams,
    Spacing, StrikeGrid, Units,
};
use wasm_bindgen::prelude::*;

/// Parameters in percent units with alpha backed out from the ATM quote.
fn params(
    beta: f64,
    rho: f64,
    nu: f64,
    forward: f64,
    atm_pct: f64,
    tau: f64,
) -> Result<SabrParams, String> {
    let atm = Units::Percent.vol_from_quote(atm_pct);
    let alpha = alpha_from_atm(beta, rho, nu, forward, atm, tau, AtmBackout::FirstOrder)
        .map_err(|e| e.to_string())?;
    SabrParams::new(alpha, beta, rho, nu, forward).map_err(|e| e.to_string())
}

fn grid(min: f64, max: f64, count: usize, spacing: Spacing) -> Result<Vec<f64>, String> {
    StrikeGrid::new(min, max, count, spacing)
        .map(|g| g.points())
        .map_err(|e| e.to_string())
}

fn stack(xs: Vec<f64>, mut f: impl FnMut(FormulaKind, &[f64]) -> Vec<f64>) -> Vec<f64> {
    let mut out = xs.clone();
    for kind in FormulaKind::ALL {
        out.extend(f(kind, &xs));
    }
    out
}

/// Alpha implied by the ATM quote (in percent) at maturity `tau`.
#[wasm_bindgen]
pub fn backed_out_alpha(
    beta: f64,
    rho: f64,
    nu: f64,
    forward: f64,
    atm_pct: f64,
    tau: f64,
) -> Result<f64, String> {
    params(beta, rho, nu, forward, atm_pct, tau).map(|p| p.alpha())
}

/// Composite implied vols on `count` geometric strikes.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn smile_curves(
    beta: f64,
    rho: f64,
    nu: f64,
    forward: f64,
    atm_pct: f64,
    tau: f64,
    k_min: f64,
    k_max: f64,
    count: usize,
) -> Result<Vec<f64>, String> {
    let p = params(beta, rho, nu, forward, atm_pct, tau)?;
    let ks = grid(k_min, k_max, count, Spacing::Geometric)?;
    Ok(stack(ks, |kind, ks| {
        ks.iter()
            .map(|&k| implied_vol(kind, &p, k, tau).map_or(f64::NAN, |pt| pt.vol))
            .collect()
    }))
}

/// `T(K)` prices on `count` linear peaks with the 2% wing.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn triangle_curves(
    beta: f64,
    rho: f64,
    nu: f64,
    forward: f64,
    atm_pct: f64,
    tau: f64,
    peak_min: f64,
    peak_max: f64,
    count: usize,
) -> Result<Vec<f64>, String> {
    let p = params(beta, rho, nu, forward, atm_pct, tau)?;
    let peaks = grid(peak_min, peak_max, count, Spacing::Linear)?;
    let width = Units::Percent.triangle_width();
    Ok(stack(peaks, |kind, ks| {
        triangle_curve(kind, &p, tau, ks, width)
            .into_iter()
            .map(|(_, v)| v.unwrap_or(f64::NAN))
            .collect()
    }))
}

/// Finite-difference density of the smile-implied call prices.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn density_curves(
    beta: f64,
    rho: f64,
    nu: f64,
    forward: f64,
    atm_pct: f64,
    tau: f64,
    k_min: f64,
    k_max: f64,
    count: usize,
) -> Result<Vec<f64>, String> {
    let p = params(beta, rho, nu, forward, atm_pct, tau)?;
    let ks = grid(k_min, k_max, count, Spacing::Geometric)?;
    let h = DEFAULT_H_FRACTION * forward;
    let mut failure = None;
    let out = stack(ks, |kind, ks| match density_scan(kind, &p, tau, ks, h) {
        Ok(r) => r
            .density
            .into_iter()
            .map(|d| d.unwrap_or(f64::NAN))
            .collect(),
        Err(e) => {
            failure = Some(e.to_string());
            vec![f64::NAN; ks.len()]
        }
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

/// Undiscounted call price implied by one formula's smile.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn call_price(
    berestycki: bool,
    beta: f64,
    rho: f64,
    nu: f64,
    forward: f64,
    atm_pct: f64,
    tau: f64,
    strike: f64,
) -> Result<f64, String> {
    let kind = if berestycki {
        FormulaKind::Berestycki
    } else {
        FormulaKind::HaganA65
    };
    let p = params(beta, rho, nu, forward, atm_pct, tau)?;
    smile_call(kind, &p, strike, tau).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG1: (f64, f64, f64, f64, f64, f64) = (0.4, -0.33, 0.25, 8.01, 4.25, 15.0);

    #[test]
    fn alpha_matches_low_beta_case() {
        let (b, r, n, s, a, t) = FIG1;
        let alpha = backed_out_alpha(b, r, n, s, a, t).unwrap();
        assert!((alpha - 0.13962034199712517).abs() < 1e-12);
    }

    #[test]
    fn curve_layout() {
        let (b, r, n, s, a, t) = FIG1;
        let v = smile_curves(b, r, n, s, a, t, 1.0, 20.0, 50).unwrap();
        assert_eq!(v.len(), 150);
        assert_eq!(v[0], 1.0);
        assert_eq!(v[49], 20.0);
        assert!(v[50..].iter().all(|x| x.is_finite() && *x > 0.0));

        let tri = triangle_curves(b, r, n, s, a, t, 0.25, 6.0, 24).unwrap();
        assert_eq!(tri.len(), 72);
        // peak 1%: Hagan negative, corrected positive
        assert!(tri[24 + 3] < 0.0 && tri[48 + 3] > 0.0);

        let d = density_curves(b, r, n, s, a, t, 0.01, 8.0, 40).unwrap();
        assert_eq!(d.len(), 120);
        assert!(d[40] < 0.0);
    }

    #[test]
    fn invalid_input_is_an_error() {
        assert!(smile_curves(0.4, 1.5, 0.25, 8.01, 4.25, 15.0, 1.0, 20.0, 50).is_err());
        assert!(smile_curves(0.4, -0.3, 0.25, 8.01, 4.25, 15.0, 5.0, 1.0, 50).is_err());
        assert!(triangle_curves(0.4, -0.3, 0.25, 8.01, -1.0, 15.0, 0.25, 6.0, 24).is_err());
    }

    #[test]
    fn call_price_is_consistent() {
        let (b, r, n, s, a, t) = FIG1;
        let c = call_price(true, b, r, n, s, a, t, s).unwrap();
        let expected = sabr_smile::bs_call(s, s, 0.0425, t);
        assert!((c - expected).abs() < 1e-12);
    }
}
