use proptest::prelude::*;
use sabr_smile::black_scholes::{bs_vega, price_band};
use sabr_smile::{bs_call, bs_put, implied_vol_from_price};

proptest! {
    #[test]
    fn parity(s in 0.1..10.0f64, m in 0.2..5.0f64, vol in 0.01..2.0f64, tau in 0.01..30.0f64) {
        let k = s * m;
        let lhs = bs_call(s, k, vol, tau) - bs_put(s, k, vol, tau);
        let rhs = s - k;
        prop_assert!((lhs - rhs).abs() <= 1e-14 * s.max(k), "{} vs {}", lhs, rhs);
    }

    #[test]
    fn call_within_band(s in 0.1..10.0f64, m in 0.2..5.0f64, vol in 0.0..2.0f64, tau in 0.0..30.0f64) {
        let k = s * m;
        let c = bs_call(s, k, vol, tau);
        let p = bs_put(s, k, vol, tau);
        prop_assert!(c >= (s - k).max(0.0) && c <= s);
        prop_assert!(p >= (k - s).max(0.0) && p <= k);
    }

    #[test]
    fn call_increases_with_vol(m in 0.5..2.0f64, vol in 0.05..1.0f64, bump in 0.01..0.5f64, tau in 0.1..5.0f64) {
        let lo = bs_call(1.0, m, vol, tau);
        let hi = bs_call(1.0, m, vol + bump, tau);
        prop_assert!(hi > lo);
    }

    #[test]
    fn call_decreases_with_strike(m in 0.5..2.0f64, gap in 0.01..0.5f64, vol in 0.05..1.0f64, tau in 0.1..5.0f64) {
        prop_assert!(bs_call(1.0, m + gap, vol, tau) < bs_call(1.0, m, vol, tau));
    }

    #[test]
    fn convex_in_strike(m in 0.2..4.0f64, dk in 1e-3..0.5f64, vol in 0.01..2.0f64, tau in 0.01..30.0f64) {
        let c = |k| bs_call(1.0, k, vol, tau);
        let fly = c(m) - 2.0 * c(m + dk) + c(m + 2.0 * dk);
        prop_assert!(fly >= -1e-12, "butterfly {}", fly);
    }

    #[test]
    fn inversion_round_trips(m in 0.2..5.0f64, vol in 0.01..2.0f64, tau in 0.01..30.0f64, call in any::<bool>()) {
        let (s, k) = (1.0, m);
        let price = if call { bs_call(s, k, vol, tau) } else { bs_put(s, k, vol, tau) };
        let (lower, _) = price_band(s, k, call);
        let time_value = price - lower;
        // Skip quotes whose time value has underflowed or is lost below the
        // intrinsic value's rounding; those carry no vol information.
        let vega = bs_vega(s, k, vol, tau);
        prop_assume!(time_value > 1e-250 && vega * 1e-8 > 64.0 * f64::EPSILON * price);
        let back = implied_vol_from_price(s, k, tau, price, call).unwrap();
        prop_assert!((back - vol).abs() < 1e-8, "vol {} -> {}", vol, back);
        let again = if call { bs_call(s, k, back, tau) } else { bs_put(s, k, back, tau) };
        prop_assert!((again - price).abs() < 1e-12);
    }
}

#[test]
fn lower_band_edge_is_rejected() {
    assert!(implied_vol_from_price(1.0, 0.5, 1.0, 0.5, true).is_err());
    assert!(implied_vol_from_price(1.0, 1.5, 1.0, 0.5 + 1e-3, false).is_ok());
    assert!(implied_vol_from_price(1.0, 1.5, 1.0, 0.5, false).is_err());
    assert!(implied_vol_from_price(1.0, 1.5, 1.0, 1.5, false).is_err());
}
