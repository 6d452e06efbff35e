//! Interference-space gate: single-port photons go forward untouched,
//! superposed photons interfere into forward and back outcomes.
//!
//! The map is piecewise and therefore not linear. A photon on one port goes
//! forward with certainty; the same photon seen as a superposition with a
//! vanishing second component would go forward with probability ½. The
//! switch between the two rules is [`DEFAULT_THRESHOLD`].

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use serde::Serialize;

use crate::hom::HomCase;
use crate::quantum::{Amplitude, PortAmplitudes, Subcase};

/// Port magnitude below which the port counts as empty.
pub const DEFAULT_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IsOutcome {
    pub forward_amp: Amplitude,
    pub back_amp: Amplitude,
}

impl IsOutcome {
    pub fn forward_prob(&self) -> f64 {
        self.forward_amp.norm_sqr()
    }

    pub fn back_prob(&self) -> f64 {
        self.back_amp.norm_sqr()
    }
}

pub fn is_transform(spatial: PortAmplitudes) -> IsOutcome {
    is_transform_with_threshold(spatial, DEFAULT_THRESHOLD)
}

pub fn is_transform_with_threshold(spatial: PortAmplitudes, threshold: f64) -> IsOutcome {
    let PortAmplitudes { bx1, bx2 } = spatial;
    let zero = Amplitude::default();
    match (bx1.norm() < threshold, bx2.norm() < threshold) {
        (false, true) => IsOutcome {
            forward_amp: bx1,
            back_amp: zero,
        },
        (true, false) => IsOutcome {
            forward_amp: bx2,
            back_amp: zero,
        },
        _ => IsOutcome {
            forward_amp: (bx1 + bx2) / SQRT_2,
            back_amp: (bx1 - bx2) / SQRT_2,
        },
    }
}

/// The gate-input states for the two measurement angles, with the delay-arm
/// sign that precedes the gate.
fn case_inputs(case: HomCase) -> [PortAmplitudes; 2] {
    let h = FRAC_1_SQRT_2;
    match case {
        HomCase::Deg90 => [PortAmplitudes::real(1.0, 0.0), PortAmplitudes::real(0.0, 1.0)],
        HomCase::Deg45 => [PortAmplitudes::real(h, -h), PortAmplitudes::real(h, h)],
    }
}

/// Mean forward probability over the two equally likely subcases; with the
/// control taps reading one photon per pair this is `N_S`.
pub fn run_is_case(case: HomCase) -> f64 {
    let inputs = case_inputs(case);
    inputs.iter().map(|&p| is_transform(p).forward_prob()).sum::<f64>() / inputs.len() as f64
}

/// Gate input after a measurement at `alpha_deg`, including the π phase on
/// the `Bx2` arm, and the resulting forward probability.
pub fn forward_probability(alpha_deg: f64, subcase: Subcase, threshold: f64) -> f64 {
    let p = PortAmplitudes::after_measurement(alpha_deg, subcase);
    let p = PortAmplitudes {
        bx1: p.bx1,
        bx2: -p.bx2,
    };
    is_transform_with_threshold(p, threshold).forward_prob()
}

/// `N_S` for an arbitrary measurement angle.
pub fn is_ns(alpha_deg: f64, threshold: f64) -> f64 {
    Subcase::BOTH
        .iter()
        .map(|&s| forward_probability(alpha_deg, s, threshold))
        .sum::<f64>()
        / 2.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IsRecord {
    pub case: HomCase,
    pub n_s: f64,
}
