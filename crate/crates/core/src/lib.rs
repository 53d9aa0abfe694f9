//! Short-maturity implied volatility asymptotics for the SABR model.
//!
//! The crate evaluates the zero-order smile term in its original form
//! ([`FormulaKind::HaganA65`]) and in the corrected form
//! ([`FormulaKind::Berestycki`]), both combined with the same first-order
//! correction, and provides the tooling to compare them: undiscounted
//! Black-Scholes pricing, the triangle put spread `T(K)`, a
//! finite-difference density scan and a Monte Carlo simulator of the model.
//!
//! ```
//! use sabr_smile::{implied_vol, FormulaKind, SabrParams};
//!
//! let p = SabrParams::new(0.14, 0.4, -0.33, 0.25, 8.01).unwrap();
//! let h = implied_vol(FormulaKind::HaganA65, &p, 1.0, 15.0).unwrap();
//! let b = implied_vol(FormulaKind::Berestycki, &p, 1.0, 15.0).unwrap();
//! assert!(h.vol > b.vol);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod black_scholes;
pub mod error;
pub mod mc;
pub mod params;
pub mod smile;
pub mod structures;
pub mod table1;

pub use black_scholes::{bs_call, bs_put, implied_vol_from_price, norm_cdf, OptionQuote};
pub use error::{Result, SabrError};
pub use mc::{
    mc_call_price, mc_implied_vol, mc_put_price, mc_triangle_price, simulate_terminal, McConfig,
    McEstimate, TerminalSample,
};
pub use params::{
    d_function, log_moneyness, z_transform, zeta_transform, FormulaKind, SabrParams, BETA_EPS,
    Z_EPS,
};
pub use smile::{
    alpha_from_atm, i0, i0_atm, i0_berestycki, i0_hagan, i0_localvol, i1_hagan, implied_vol, smile,
    AtmBackout, SmilePoint, Spacing, StrikeGrid,
};
pub use structures::{
    density_scan, price_triangle, triangle_curve, DensityReport, StrikeInterval, TriangleSpec,
    Units, TOL_DENSITY,
};
