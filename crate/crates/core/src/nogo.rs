//! Closed forms of `N_S` for gates that scale the two branch amplitudes by
//! fixed factors before a π-phase combination, and a randomized check that
//! the averaged measured case never differs from the unmeasured one.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quantum::sin_cos_deg;

/// Linear weights on the `Bx1` (`f_i`) and `Bx2` (`f_m`) amplitudes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SymmetricModifiers {
    pub f_i: f64,
    pub f_m: f64,
}

impl SymmetricModifiers {
    /// The plain π phase-shift combiner.
    pub const PI: Self = Self { f_i: 1.0, f_m: 1.0 };

    pub fn new(f_i: f64, f_m: f64) -> Result<Self> {
        if !f_i.is_finite() || !f_m.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "modifiers must be finite, got ({f_i}, {f_m})"
            )));
        }
        if f_i == 0.0 && f_m == 0.0 {
            return Err(Error::InvalidParameter(
                "at least one modifier must be nonzero".into(),
            ));
        }
        Ok(Self { f_i, f_m })
    }

    pub fn negated(self) -> Self {
        Self {
            f_i: -self.f_i,
            f_m: -self.f_m,
        }
    }
}

impl Default for SymmetricModifiers {
    fn default() -> Self {
        Self::PI
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum NogoCase {
    I,
    IIa,
    IIb,
}

pub fn symmetric_ns(mods: SymmetricModifiers, case: NogoCase, alpha_deg: f64) -> f64 {
    let SymmetricModifiers { f_i, f_m } = mods;
    let (s, c) = sin_cos_deg(alpha_deg);
    match case {
        NogoCase::I => 0.25 * (f_m * f_m + f_i * f_i),
        NogoCase::IIa => 0.5 * (f_m * c - f_i * s).powi(2),
        NogoCase::IIb => 0.5 * (-f_m * s - f_i * c).powi(2),
    }
}

/// `|N_S(I) − ½(N_S(IIa) + N_S(IIb))|`
pub fn gap(mods: SymmetricModifiers, alpha_deg: f64) -> f64 {
    let mixed = 0.5
        * (symmetric_ns(mods, NogoCase::IIa, alpha_deg) + symmetric_ns(mods, NogoCase::IIb, alpha_deg));
    (symmetric_ns(mods, NogoCase::I, alpha_deg) - mixed).abs()
}

#[derive(Debug, Clone, Serialize)]
pub struct NogoReport {
    pub samples: usize,
    pub alphas: usize,
    pub max_abs_gap: f64,
}

/// Draws `n_samples` modifier pairs uniformly from `[−2, 2]²` and returns the
/// largest gap over all pairs and grid angles.
pub fn verify_nogo(n_samples: usize, alpha_grid: &[f64], seed: u64) -> Result<NogoReport> {
    if n_samples == 0 {
        return Err(Error::InvalidParameter("n_samples must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_abs_gap = 0.0_f64;
    for _ in 0..n_samples {
        let mods = SymmetricModifiers {
            f_i: rng.gen_range(-2.0..=2.0),
            f_m: rng.gen_range(-2.0..=2.0),
        };
        max_abs_gap = alpha_grid
            .iter()
            .map(|&a| gap(mods, a))
            .fold(max_abs_gap, f64::max);
    }
    Ok(NogoReport {
        samples: n_samples,
        alphas: alpha_grid.len(),
        max_abs_gap,
    })
}
