//! Randomized comparison of the two zero-order terms in the four regimes
//! where they are known to agree (ATM, `ν = 0`, `β = 1`) or to differ
//! (`β < 1`).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::params::SabrParams;
use crate::smile::{i0_berestycki, i0_hagan};

/// Threshold above which two zero-order values are counted as different.
pub const DIFFERENCE_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    AtTheMoney,
    NoVolOfVol,
    Lognormal,
    Generic,
}

impl Regime {
    pub const ALL: [Regime; 4] = [
        Regime::AtTheMoney,
        Regime::NoVolOfVol,
        Regime::Lognormal,
        Regime::Generic,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            Regime::AtTheMoney => "atm",
            Regime::NoVolOfVol => "nu_zero",
            Regime::Lognormal => "beta_one",
            Regime::Generic => "beta_below_one",
        }
    }

    /// Whether the two formulas are expected to coincide.
    pub fn expects_equality(&self) -> bool {
        !matches!(self, Regime::Generic)
    }
}

/// Summary of one regime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Table1Row {
    pub regime: Regime,
    pub draws: usize,
    pub max_rel_diff: f64,
    /// Fraction of draws with relative difference above [`DIFFERENCE_THRESHOLD`].
    pub frac_different: f64,
}

/// A random parameter set and strike for `regime`.
pub fn sample_point<R: Rng>(rng: &mut R, regime: Regime) -> (SabrParams, f64) {
    let forward = rng.random_range(0.5..2.0);
    let alpha = rng.random_range(0.05..0.6);
    let rho = rng.random_range(-0.9..0.9);
    let mut beta = rng.random_range(0.05..0.95);
    let mut nu = rng.random_range(0.05..1.0);
    let mut log_k: f64 = rng.random_range(-1.0..1.0);
    match regime {
        Regime::AtTheMoney => log_k = 0.0,
        Regime::NoVolOfVol => nu = 0.0,
        Regime::Lognormal => beta = 1.0,
        Regime::Generic => {
            if log_k.abs() < 0.05 {
                log_k = 0.05_f64.copysign(log_k);
            }
        }
    }
    let strike = if log_k == 0.0 {
        forward
    } else {
        forward * log_k.exp()
    };
    let p = SabrParams::new(alpha, beta, rho, nu, forward).expect("sampled parameters are valid");
    (p, strike)
}

/// Relative difference `|h - b| / |b|` of the two zero-order terms.
pub fn zero_order_gap(p: &SabrParams, strike: f64) -> Result<f64> {
    let h = i0_hagan(p, strike)?;
    let b = i0_berestycki(p, strike)?;
    Ok((h - b).abs() / b.abs())
}

/// Runs `draws` random points per regime.
pub fn table1_sweep(seed: u64, draws: usize) -> Result<Vec<Table1Row>> {
    Regime::ALL
        .iter()
        .enumerate()
        .map(|(i, &regime)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let mut max_rel_diff: f64 = 0.0;
            let mut different = 0usize;
            for _ in 0..draws {
                let (p, k) = sample_point(&mut rng, regime);
                let gap = zero_order_gap(&p, k)?;
                max_rel_diff = max_rel_diff.max(gap);
                if gap > DIFFERENCE_THRESHOLD {
                    different += 1;
                }
            }
            Ok(Table1Row {
                regime,
                draws,
                max_rel_diff,
                frac_different: different as f64 / draws.max(1) as f64,
            })
        })
        .collect()
}
