//! Undiscounted Black-Scholes pricing on the forward (`r = 0`) and
//! implied-volatility inversion.
//!
//! Prices are always evaluated on the out-of-the-money side and the other
//! side is obtained by parity, so deep in-the-money quotes keep the time
//! value to full relative precision and `call - put = s - K` holds to
//! rounding.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result, SabrError};

/// Iteration cap for [`implied_vol_from_price`].
pub const MAX_IV_ITERATIONS: usize = 200;

/// A strike with its Black-Scholes call/put pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptionQuote {
    pub strike: f64,
    pub tau: f64,
    pub vol: f64,
    pub call_price: f64,
    pub put_price: f64,
}

impl OptionQuote {
    pub fn new(forward: f64, strike: f64, vol: f64, tau: f64) -> Self {
        Self {
            strike,
            tau,
            vol,
            call_price: bs_call(forward, strike, vol, tau),
            put_price: bs_put(forward, strike, vol, tau),
        }
    }
}

/// Standard normal CDF via `erfc`, accurate to a few ulps in both tails.
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

pub fn norm_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Price of the out-of-the-money option: the call when `K >= s`, the put
/// otherwise.
fn otm_price(s: f64, k: f64, vol: f64, tau: f64) -> f64 {
    let sd = vol * tau.sqrt();
    if !(sd > 0.0) || k <= 0.0 {
        return 0.0;
    }
    let d1 = (s / k).ln() / sd + 0.5 * sd;
    let d2 = d1 - sd;
    let v = if k >= s {
        s * norm_cdf(d1) - k * norm_cdf(d2)
    } else {
        k * norm_cdf(-d2) - s * norm_cdf(-d1)
    };
    v.max(0.0)
}

/// Forward vega `s φ(d₁) √τ`.
pub fn bs_vega(s: f64, k: f64, vol: f64, tau: f64) -> f64 {
    let sd = vol * tau.sqrt();
    if !(sd > 0.0) || k <= 0.0 {
        return 0.0;
    }
    let d1 = (s / k).ln() / sd + 0.5 * sd;
    s * norm_pdf(d1) * tau.sqrt()
}

/// `s N(d₁) - K N(d₂)`; intrinsic value when `vol √τ = 0`.
pub fn bs_call(s: f64, k: f64, vol: f64, tau: f64) -> f64 {
    if k <= 0.0 {
        return s;
    }
    let otm = otm_price(s, k, vol, tau);
    if k >= s {
        otm
    } else {
        (s - k) + otm
    }
}

/// Put by parity, `call - s + K`.
pub fn bs_put(s: f64, k: f64, vol: f64, tau: f64) -> f64 {
    if k <= 0.0 {
        return 0.0;
    }
    let otm = otm_price(s, k, vol, tau);
    if k >= s {
        otm + (k - s)
    } else {
        otm
    }
}

/// No-arbitrage band `(lower, upper)` of a call or put.
pub fn price_band(s: f64, k: f64, is_call: bool) -> (f64, f64) {
    if is_call {
        ((s - k).max(0.0), s)
    } else {
        ((k - s).max(0.0), k)
    }
}

/// Volatility at which the call (or put) is worth `price`.
///
/// The quote is converted to its out-of-the-money equivalent and inverted by
/// Newton on `ln price`, safeguarded by a bisection bracket that is first
/// grown until it contains the root.
pub fn implied_vol_from_price(s: f64, k: f64, tau: f64, price: f64, is_call: bool) -> Result<f64> {
    if !(s > 0.0 && k > 0.0) {
        return Err(domain(format!(
            "implied vol needs positive s and K, got s={s}, K={k}"
        )));
    }
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(domain(format!("implied vol needs tau > 0, got {tau}")));
    }
    let (lower, upper) = price_band(s, k, is_call);
    if !(price > lower && price < upper) {
        return Err(SabrError::OutOfBand {
            price,
            lower,
            upper,
        });
    }
    let target = match (is_call, k >= s) {
        (true, true) | (false, false) => price,
        (true, false) => price - (s - k),
        (false, true) => price - (k - s),
    };
    if !(target > 0.0) {
        return Err(SabrError::OutOfBand {
            price,
            lower,
            upper,
        });
    }
    let ln_target = target.ln();

    let mut lo = 0.0_f64;
    let mut hi = 1.0_f64;
    let mut grow = 0;
    while otm_price(s, k, hi, tau) < target {
        lo = hi;
        hi *= 2.0;
        grow += 1;
        if grow > 60 {
            return Err(SabrError::Convergence {
                what: "implied vol bracket",
                iterations: grow,
            });
        }
    }

    // Brenner-Subrahmanyam start, kept inside the bracket
    let mut vol = (2.0 * PI / tau).sqrt() * target / s;
    if !(vol > lo && vol < hi) {
        vol = 0.5 * (lo + hi);
    }
    for _ in 0..MAX_IV_ITERATIONS {
        let p = otm_price(s, k, vol, tau);
        if p < target {
            lo = vol;
        } else {
            hi = vol;
        }
        let vega = bs_vega(s, k, vol, tau);
        let mut next = if p > 0.0 && vega > 0.0 {
            vol - (p.ln() - ln_target) * p / vega
        } else {
            f64::NAN
        };
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - vol).abs() <= 2.0 * f64::EPSILON * next || hi - lo <= 2.0 * f64::EPSILON * hi {
            return Ok(next);
        }
        vol = next;
    }
    Err(SabrError::Convergence {
        what: "implied vol",
        iterations: MAX_IV_ITERATIONS,
    })
}
