//! Two-photon interference gate: a pulsed source emitting one photon every
//! `Δt`, a delay of `Δt` with a π phase on the `Bx2` arm, and a balanced
//! splitter feeding two number-resolving detectors on `Bx3` / `Bx4`.
//!
//! Times are in units of `Δt`.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quantum::{Amplitude, PortAmplitudes, Subcase};

/// Port magnitude below which a photon counts as having no component there.
pub const PORT_EPS: f64 = 1e-12;
/// Default coincidence window as a fraction of `Δt`.
pub const DEFAULT_EPSILON: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum HomCase {
    #[serde(rename = "deg90")]
    Deg90,
    #[serde(rename = "deg45")]
    Deg45,
}

impl HomCase {
    pub fn alpha_deg(self) -> f64 {
        match self {
            Self::Deg90 => 90.0,
            Self::Deg45 => 45.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Deg90 => "deg90",
            Self::Deg45 => "deg45",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimedPhoton {
    pub emit_time: f64,
    pub spatial: PortAmplitudes,
}

impl TimedPhoton {
    /// Photon of the given subcase after the delay line, which flips the
    /// sign of the `Bx2` component.
    pub fn delayed(case: HomCase, subcase: Subcase, emit_time: f64) -> Self {
        Self::delayed_at(case.alpha_deg(), subcase, emit_time)
    }

    /// As [`TimedPhoton::delayed`] for an arbitrary measurement angle.
    pub fn delayed_at(alpha_deg: f64, subcase: Subcase, emit_time: f64) -> Self {
        let p = PortAmplitudes::after_measurement(alpha_deg, subcase);
        Self {
            emit_time,
            spatial: PortAmplitudes {
                bx1: p.bx1,
                bx2: -p.bx2,
            },
        }
    }

    /// Earliest arrival and spread of the arrival time at the splitter. A
    /// definite `Bx2` photon arrives one `Δt` late; a superposed photon may
    /// arrive anywhere in `[emit, emit + Δt]`.
    pub fn arrival_window(&self, delta_t: f64) -> (f64, f64) {
        let on1 = self.spatial.bx1.norm() >= PORT_EPS;
        let on2 = self.spatial.bx2.norm() >= PORT_EPS;
        match (on1, on2) {
            (true, false) => (self.emit_time, 0.0),
            (false, true) => (self.emit_time + delta_t, 0.0),
            _ => (self.emit_time, delta_t),
        }
    }
}

/// Output amplitudes over unordered occupation patterns.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoPhotonOut {
    pub bx3_bx3: Amplitude,
    pub bx4_bx4: Amplitude,
    pub bx3_bx4: Amplitude,
}

impl TwoPhotonOut {
    pub fn norm_sqr(&self) -> f64 {
        self.bx3_bx3.norm_sqr() + self.bx4_bx4.norm_sqr() + self.bx3_bx4.norm_sqr()
    }

    /// Probability that both photons leave through the same port.
    pub fn identical_probability(&self) -> f64 {
        (self.bx3_bx3.norm_sqr() + self.bx4_bx4.norm_sqr()) / self.norm_sqr()
    }
}

/// Single-photon action of the splitter, matching the π-combiner sign on
/// `Bx3`: `Bx1 → (−Bx3 + Bx4)/√2`, `Bx2 → (Bx3 + Bx4)/√2`.
fn split(p: PortAmplitudes) -> (Amplitude, Amplitude) {
    (
        (p.bx2 - p.bx1) * FRAC_1_SQRT_2,
        (p.bx1 + p.bx2) * FRAC_1_SQRT_2,
    )
}

/// Two simultaneous, otherwise indistinguishable photons through the
/// splitter. The product state is symmetrized and renormalized, so inputs
/// sharing a spatial mode are handled correctly.
pub fn hom_transform(p1: PortAmplitudes, p2: PortAmplitudes) -> TwoPhotonOut {
    let (v3, v4) = split(p1);
    let (w3, w4) = split(p2);
    let overlap = p1.bx1.conj() * p2.bx1 + p1.bx2.conj() * p2.bx2;
    let norm = (p1.norm_sqr() * p2.norm_sqr() + overlap.norm_sqr()).sqrt();
    TwoPhotonOut {
        bx3_bx3: v3 * w3 * SQRT_2 / norm,
        bx4_bx4: v4 * w4 * SQRT_2 / norm,
        bx3_bx4: (v3 * w4 + v4 * w3) / norm,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CoincidenceKind {
    None,
    IdenticalOutput,
    NonIdenticalOutput,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoincidenceRecord {
    pub kind: CoincidenceKind,
    pub dt: f64,
    /// Same-port probability of the pair when it coincides.
    pub identical_probability: Option<f64>,
}

/// Pulse pair emitted at `0` and `Δt`. `fractions` place each superposed
/// photon's arrival inside its uncertainty window (`(1, 0)` is the boundary
/// where the first photon is as late and the second as early as possible);
/// they are ignored for photons on a single port. A coincidence needs
/// `|dt| ≤ ε·Δt`; its kind is the more likely output pattern.
pub fn classify_pulse_pair(
    case: HomCase,
    subcases: (Subcase, Subcase),
    delta_t: f64,
    epsilon: f64,
    fractions: (f64, f64),
) -> CoincidenceRecord {
    classify_at(case.alpha_deg(), subcases, delta_t, epsilon, fractions)
}

/// [`classify_pulse_pair`] for an arbitrary measurement angle.
pub fn classify_at(
    alpha_deg: f64,
    subcases: (Subcase, Subcase),
    delta_t: f64,
    epsilon: f64,
    fractions: (f64, f64),
) -> CoincidenceRecord {
    let first = TimedPhoton::delayed_at(alpha_deg, subcases.0, 0.0);
    let second = TimedPhoton::delayed_at(alpha_deg, subcases.1, delta_t);
    let arrive = |p: &TimedPhoton, u: f64| {
        let (start, width) = p.arrival_window(delta_t);
        start + u * width
    };
    let dt = arrive(&second, fractions.1) - arrive(&first, fractions.0);
    if dt.abs() > epsilon * delta_t {
        return CoincidenceRecord {
            kind: CoincidenceKind::None,
            dt,
            identical_probability: None,
        };
    }
    let p = hom_transform(first.spatial, second.spatial).identical_probability();
    CoincidenceRecord {
        kind: if p >= 0.5 {
            CoincidenceKind::IdenticalOutput
        } else {
            CoincidenceKind::NonIdenticalOutput
        },
        dt,
        identical_probability: Some(p),
    }
}

/// CDF of the difference of two independent `U(0, 1)` variables.
fn triangular_cdf(z: f64) -> f64 {
    if z <= -1.0 {
        0.0
    } else if z < 0.0 {
        0.5 * (1.0 + z).powi(2)
    } else if z < 1.0 {
        1.0 - 0.5 * (1.0 - z).powi(2)
    } else {
        1.0
    }
}

/// Exact probability that a pulse pair with the given subcases coincides.
pub fn coincidence_probability(alpha_deg: f64, subcases: (Subcase, Subcase), epsilon: f64) -> f64 {
    let first = TimedPhoton::delayed_at(alpha_deg, subcases.0, 0.0);
    let second = TimedPhoton::delayed_at(alpha_deg, subcases.1, 1.0);
    let (s1, w1) = first.arrival_window(1.0);
    let (s2, w2) = second.arrival_window(1.0);
    let c = s2 - s1;
    let overlap = |lo: f64, hi: f64, w: f64| ((hi.min(w) - lo.max(0.0)).max(0.0)) / w;
    match (w1 > 0.0, w2 > 0.0) {
        (false, false) => f64::from(u8::from(c.abs() <= epsilon)),
        // |c + U·w2| ≤ ε
        (false, true) => overlap(-epsilon - c, epsilon - c, w2),
        // |c − U·w1| ≤ ε
        (true, false) => overlap(c - epsilon, c + epsilon, w1),
        (true, true) => triangular_cdf(epsilon - c) - triangular_cdf(-epsilon - c),
    }
}

/// Coincidence rate averaged over the four equally likely subcase pairs.
pub fn analytic_rate(alpha_deg: f64, epsilon: f64) -> f64 {
    let mut total = 0.0;
    for a in Subcase::BOTH {
        for b in Subcase::BOTH {
            total += coincidence_probability(alpha_deg, (a, b), epsilon);
        }
    }
    total / 4.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HomStats {
    pub case: HomCase,
    pub n: u64,
    pub coincidence_rate: f64,
    pub identical_fraction: Option<f64>,
    pub non_identical_fraction: Option<f64>,
    pub epsilon: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Tally {
    coincidences: u64,
    identical: u64,
}

/// Draws one pulse pair: subcases, arrival fractions, and for a coincidence
/// the output pattern. Returns `(coincident, identical)`.
pub fn draw_pulse_pair<R: Rng + ?Sized>(alpha_deg: f64, epsilon: f64, rng: &mut R) -> (bool, bool) {
    let mut sub = || {
        if rng.gen_bool(0.5) {
            Subcase::Transmitted
        } else {
            Subcase::Absorbed
        }
    };
    let subs = (sub(), sub());
    let fractions = (rng.gen::<f64>(), rng.gen::<f64>());
    let rec = classify_at(alpha_deg, subs, 1.0, epsilon, fractions);
    match rec.identical_probability {
        None => (false, false),
        Some(p) => (true, rng.gen::<f64>() < p),
    }
}

const SHARD: u64 = 1 << 16;

/// Monte-Carlo over `n_pulse_pairs`, split into fixed-size shards with their
/// own ChaCha streams so results do not depend on how work is scheduled.
pub fn simulate_hom(case: HomCase, n_pulse_pairs: u64, seed: u64, epsilon: f64) -> Result<HomStats> {
    if n_pulse_pairs == 0 {
        return Err(Error::InvalidParameter("need at least one pulse pair".into()));
    }
    if !(epsilon.is_finite() && epsilon >= 0.0) {
        return Err(Error::InvalidParameter(format!("epsilon must be ≥ 0, got {epsilon}")));
    }
    let shards = n_pulse_pairs.div_ceil(SHARD);
    let total = (0..shards)
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k);
            let len = SHARD.min(n_pulse_pairs - k * SHARD);
            let mut t = Tally::default();
            for _ in 0..len {
                let (hit, same) = draw_pulse_pair(case.alpha_deg(), epsilon, &mut rng);
                t.coincidences += hit as u64;
                t.identical += same as u64;
            }
            t
        })
        .fold(Tally::default(), |a, b| Tally {
            coincidences: a.coincidences + b.coincidences,
            identical: a.identical + b.identical,
        });
    let frac = |k: u64| (total.coincidences > 0).then(|| k as f64 / total.coincidences as f64);
    Ok(HomStats {
        case,
        n: n_pulse_pairs,
        coincidence_rate: total.coincidences as f64 / n_pulse_pairs as f64,
        identical_fraction: frac(total.identical),
        non_identical_fraction: frac(total.coincidences - total.identical),
        epsilon,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use Subcase::{Absorbed as B, Transmitted as A};

    const H: f64 = FRAC_1_SQRT_2;

    #[test]
    fn opposite_ports_bunch() {
        let out = hom_transform(PortAmplitudes::real(1.0, 0.0), PortAmplitudes::real(0.0, 1.0));
        assert_abs_diff_eq!(out.bx3_bx3.re, -H, epsilon = 1e-15);
        assert_abs_diff_eq!(out.bx4_bx4.re, H, epsilon = 1e-15);
        assert_eq!(out.bx3_bx4.norm(), 0.0);
    }

    #[test]
    fn diagonal_pair_antibunches() {
        let b = TimedPhoton::delayed(HomCase::Deg45, B, 0.0).spatial;
        let a = TimedPhoton::delayed(HomCase::Deg45, A, 1.0).spatial;
        assert_abs_diff_eq!(b.bx1.re, H, epsilon = 1e-15);
        assert_abs_diff_eq!(b.bx2.re, H, epsilon = 1e-15);
        assert_abs_diff_eq!(a.bx2.re, -H, epsilon = 1e-15);
        let out = hom_transform(b, a);
        assert_abs_diff_eq!(out.bx3_bx4.re, -1.0, epsilon = 1e-15);
        assert!(out.bx3_bx3.norm() < 1e-15 && out.bx4_bx4.norm() < 1e-15);
    }

    #[test]
    fn same_mode_pair_is_normalized() {
        let p = PortAmplitudes::real(H, H);
        let out = hom_transform(p, p);
        assert_abs_diff_eq!(out.norm_sqr(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(out.bx4_bx4.norm(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn timing_table_at_90() {
        let dt = |s| classify_pulse_pair(HomCase::Deg90, s, 1.0, DEFAULT_EPSILON, (0.5, 0.5));
        assert_eq!(dt((A, A)).dt, 1.0);
        assert_eq!(dt((B, B)).dt, 1.0);
        assert_eq!(dt((A, B)).dt, 2.0);
        let d = dt((B, A));
        assert_eq!(d.dt, 0.0);
        assert_eq!(d.kind, CoincidenceKind::IdenticalOutput);
        assert_eq!(d.identical_probability, Some(1.0));
        assert_eq!(dt((A, A)).kind, CoincidenceKind::None);
    }

    #[test]
    fn boundary_instant_at_45() {
        let r = classify_pulse_pair(HomCase::Deg45, (B, A), 1.0, DEFAULT_EPSILON, (1.0, 0.0));
        assert_eq!(r.dt, 0.0);
        assert_eq!(r.kind, CoincidenceKind::NonIdenticalOutput);
        let r = classify_pulse_pair(HomCase::Deg45, (B, A), 1.0, DEFAULT_EPSILON, (0.5, 0.5));
        assert_eq!(r.kind, CoincidenceKind::None);
    }

    #[test]
    fn analytic_rates() {
        assert_eq!(analytic_rate(90.0, DEFAULT_EPSILON), 0.25);
        assert_eq!(analytic_rate(0.0, DEFAULT_EPSILON), 0.25);
        assert_abs_diff_eq!(analytic_rate(45.0, 0.01), 0.5e-4, epsilon = 1e-15);
        assert_abs_diff_eq!(analytic_rate(30.0, 0.2), 0.02, epsilon = 1e-15);
    }

    #[test]
    fn no_pairs_is_an_error() {
        assert!(simulate_hom(HomCase::Deg90, 0, 1, DEFAULT_EPSILON).is_err());
        assert!(simulate_hom(HomCase::Deg90, 10, 1, -1.0).is_err());
    }

    #[test]
    fn simulation_is_reproducible() {
        let a = simulate_hom(HomCase::Deg45, 70_000, 9, 0.05).unwrap();
        let b = simulate_hom(HomCase::Deg45, 70_000, 9, 0.05).unwrap();
        assert_eq!(a, b);
    }
}
