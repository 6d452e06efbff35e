//! Windowed signalling: the sender picks a branch-A action per bit, the
//! receiver counts clicks on branch B in fixed windows, estimates `N_S` per
//! window and decodes bits by majority over the windows of each bit.
//!
//! Shot model: every photon pair gives at most one control click and at most
//! one signal click, drawn independently from the gate's probabilities for
//! the pair's subcase. All gates use a control probability of ½.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::diffraction::{detector_intensity, Preset, SlitGeometry};
use crate::error::{Error, Result};
use crate::hom;
use crate::is_gate;
use crate::nogo::SymmetricModifiers;
use crate::pipeline::{self, sample_clicks, ClickCounts, SenderAction};
use crate::quantum::{PortAmplitudes, Subcase};

/// Receiver windows start this far (in window lengths) after the sender's.
pub const DEFAULT_OFFSET: f64 = 0.5;
/// Largest detector intensity of three unit-amplitude slits fed by a
/// normalized photon; dividing by it turns intensity into a click probability.
const SLIT_INTENSITY_BOUND: f64 = 18.0;
const CONTROL_PROB: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThreeSlitGate {
    pub geometry: SlitGeometry,
    pub x_um: f64,
    pub delta_lambda_um: f64,
}

impl Default for ThreeSlitGate {
    fn default() -> Self {
        Self {
            geometry: SlitGeometry::preset(Preset::A6),
            x_um: 0.0,
            delta_lambda_um: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Gate {
    Combiner(SymmetricModifiers),
    ThreeSlit(ThreeSlitGate),
    Hom { epsilon: f64 },
    InterferenceSpace { threshold: f64 },
}

impl Gate {
    pub fn pi_combiner() -> Self {
        Self::Combiner(SymmetricModifiers::PI)
    }

    pub fn three_slit() -> Self {
        Self::ThreeSlit(ThreeSlitGate::default())
    }

    pub fn hom() -> Self {
        Self::Hom {
            epsilon: hom::DEFAULT_EPSILON,
        }
    }

    pub fn interference_space() -> Self {
        Self::InterferenceSpace {
            threshold: is_gate::DEFAULT_THRESHOLD,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Combiner(_) => "pibs",
            Self::ThreeSlit(_) => "slits",
            Self::Hom { .. } => "hom",
            Self::InterferenceSpace { .. } => "is",
        }
    }

    fn unsupported(&self, action: SenderAction) -> Error {
        Error::Unsupported {
            gate: self.name(),
            what: format!("{action:?}"),
        }
    }

    /// Per-pair sampling model for one sender action.
    fn model(&self, action: SenderAction) -> Result<PairModel> {
        let subcases = |alpha: f64, px: &dyn Fn(f64, Subcase) -> f64| {
            PairModel::Branches(
                Subcase::BOTH
                    .iter()
                    .map(|&s| (CONTROL_PROB, px(alpha, s)))
                    .collect(),
            )
        };
        match (*self, action) {
            (Self::Combiner(m), a) => Ok(PairModel::Branches(
                pipeline::branch_probabilities(a, m)
                    .iter()
                    .map(|r| (r.d_c, r.d_x))
                    .collect(),
            )),
            (Self::ThreeSlit(g), a) => {
                // Without a measurement photon B is an even mix of the two
                // outcomes in any basis.
                let alpha = match a {
                    SenderAction::NoMeasure => 0.0,
                    SenderAction::Measure(alpha) => alpha,
                };
                Ok(subcases(alpha, &|alpha, s| {
                    let amps = PortAmplitudes::after_measurement(alpha, s);
                    detector_intensity(&g.geometry, amps, g.x_um, g.delta_lambda_um)
                        / SLIT_INTENSITY_BOUND
                }))
            }
            (Self::InterferenceSpace { threshold }, SenderAction::Measure(alpha)) => {
                Ok(subcases(alpha, &|alpha, s| {
                    CONTROL_PROB * is_gate::forward_probability(alpha, s, threshold)
                }))
            }
            (Self::Hom { epsilon }, SenderAction::Measure(alpha)) => Ok(PairModel::Hom { alpha, epsilon }),
            (_, a @ SenderAction::NoMeasure) => Err(self.unsupported(a)),
        }
    }

    /// Expected `N_S` for an action.
    pub fn analytic_ns(&self, action: SenderAction) -> Result<f64> {
        match self.model(action)? {
            PairModel::Branches(b) => {
                let n = b.len() as f64;
                let p_c = b.iter().map(|p| p.0).sum::<f64>() / n;
                let p_x = b.iter().map(|p| p.1).sum::<f64>() / n;
                Ok(p_x / p_c)
            }
            PairModel::Hom { alpha, epsilon } => Ok(hom::analytic_rate(alpha, epsilon) / CONTROL_PROB),
        }
    }
}

#[derive(Debug, Clone)]
enum PairModel {
    /// Equally likely subcases, each with `(p_c, p_x)`.
    Branches(Vec<(f64, f64)>),
    /// The signal click is a realized coincidence of the pulse pair.
    Hom { alpha: f64, epsilon: f64 },
}

impl PairModel {
    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, f64) {
        match self {
            Self::Branches(b) if b.len() == 1 => b[0],
            Self::Branches(b) => b[rng.gen_range(0..b.len())],
            Self::Hom { alpha, epsilon } => {
                let (hit, _) = hom::draw_pulse_pair(*alpha, *epsilon, rng);
                (CONTROL_PROB, if hit { 1.0 } else { 0.0 })
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Symbol {
    Zero,
    One,
    Ambiguous,
}

/// Bit alphabet of the sender.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ActionMap {
    pub zero: SenderAction,
    pub one: SenderAction,
}

impl Default for ActionMap {
    fn default() -> Self {
        Self {
            zero: SenderAction::Measure(90.0),
            one: SenderAction::Measure(45.0),
        }
    }
}

impl ActionMap {
    pub fn action(&self, bit: u8) -> SenderAction {
        if bit == 0 {
            self.zero
        } else {
            self.one
        }
    }
}

/// Threshold decoder on the window estimate of `N_S`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Decoder {
    pub value_zero: f64,
    pub value_one: f64,
    pub threshold: f64,
}

impl Decoder {
    /// Threshold defaults to the midpoint of the two expected values.
    pub fn new(gate: &Gate, map: &ActionMap, threshold: Option<f64>) -> Result<Self> {
        let value_zero = gate.analytic_ns(map.zero)?;
        let value_one = gate.analytic_ns(map.one)?;
        Ok(Self {
            value_zero,
            value_one,
            threshold: threshold.unwrap_or(0.5 * (value_zero + value_one)),
        })
    }

    pub fn decide(&self, n_s: f64) -> u8 {
        let above = n_s > self.threshold;
        u8::from(above == (self.value_one >= self.value_zero))
    }

    pub fn symbol(&self, counts: &ClickCounts) -> Symbol {
        match counts.n_s() {
            None => Symbol::Ambiguous,
            Some(v) if self.decide(v) == 1 => Symbol::One,
            Some(_) => Symbol::Zero,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowReport {
    pub window_index: usize,
    pub start: f64,
    pub first_bit: usize,
    pub last_bit: usize,
    pub boundary: bool,
    pub d_c_clicks: u64,
    pub d_x_clicks: u64,
    pub estimated_n_s: Option<f64>,
    pub decoded_symbol: Symbol,
}

fn window_rng(seed: u64, window: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(window as u64);
    rng
}

/// One window with a single sender action throughout.
pub fn sample_window(
    action: SenderAction,
    gate: &Gate,
    photons_per_window: u64,
    seed: u64,
    decoder: &Decoder,
) -> Result<WindowReport> {
    if photons_per_window == 0 {
        return Err(Error::InvalidParameter("photons_per_window must be ≥ 1".into()));
    }
    let model = gate.model(action)?;
    let mut rng = window_rng(seed, 0);
    let counts = sample_clicks(photons_per_window, &mut rng, |r| model.draw(r));
    Ok(WindowReport {
        window_index: 0,
        start: 0.0,
        first_bit: 0,
        last_bit: 0,
        boundary: false,
        d_c_clicks: counts.d_c_clicks,
        d_x_clicks: counts.d_x_clicks,
        estimated_n_s: counts.n_s(),
        decoded_symbol: decoder.symbol(&counts),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransmissionPlan {
    pub bits: Vec<u8>,
    pub action_map: ActionMap,
    pub windows_per_bit: usize,
    pub photons_per_window: u64,
}

impl TransmissionPlan {
    pub fn validate(&self) -> Result<()> {
        if self.windows_per_bit == 0 {
            return Err(Error::InvalidParameter("windows_per_bit must be ≥ 1".into()));
        }
        if self.photons_per_window == 0 {
            return Err(Error::InvalidParameter("photons_per_window must be ≥ 1".into()));
        }
        if let Some(b) = self.bits.iter().find(|&&b| b > 1) {
            return Err(Error::InvalidParameter(format!("bit values must be 0 or 1, got {b}")));
        }
        Ok(())
    }
}

pub fn random_bits(n: usize, seed: u64) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| u8::from(rng.gen_bool(0.5))).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransmitReport {
    pub plan: TransmissionPlan,
    pub gate: Gate,
    pub decoder: Decoder,
    pub receiver_offset: f64,
    pub window_reports: Vec<WindowReport>,
    pub decoded_bits: Vec<u8>,
    pub ber: Option<f64>,
}

pub fn transmit(plan: &TransmissionPlan, gate: &Gate, threshold: Option<f64>, seed: u64) -> Result<TransmitReport> {
    transmit_with_offset(plan, gate, threshold, seed, DEFAULT_OFFSET)
}

/// Receiver window `j` covers `[j + offset, j + 1 + offset)` in units of a
/// window; sender bit `i` covers `[i·W, (i+1)·W)`. Each photon pair is
/// emitted while the bit under its arrival time is being sent; after the
/// last bit the sender keeps its final action.
pub fn transmit_with_offset(
    plan: &TransmissionPlan,
    gate: &Gate,
    threshold: Option<f64>,
    seed: u64,
    offset: f64,
) -> Result<TransmitReport> {
    plan.validate()?;
    if !(0.0..1.0).contains(&offset) {
        return Err(Error::InvalidParameter(format!("offset must lie in [0, 1), got {offset}")));
    }
    let decoder = Decoder::new(gate, &plan.action_map, threshold)?;
    let models = [
        gate.model(plan.action_map.zero)?,
        gate.model(plan.action_map.one)?,
    ];
    let n_bits = plan.bits.len();
    let w = plan.windows_per_bit;
    let n = plan.photons_per_window;
    let bit_at = |t: f64| ((t / w as f64).floor() as usize).min(n_bits.saturating_sub(1));

    let window_reports: Vec<WindowReport> = (0..n_bits * w)
        .map(|j| {
            let start = j as f64 + offset;
            let mut rng = window_rng(seed, j);
            let mut k = 0u64;
            let counts = sample_clicks(n, &mut rng, |r| {
                let t = start + (k as f64 + 0.5) / n as f64;
                k += 1;
                models[usize::from(plan.bits[bit_at(t)])].draw(r)
            });
            let first_bit = bit_at(start);
            let last_bit = bit_at(start + 1.0 - 0.5 / n as f64);
            WindowReport {
                window_index: j,
                start,
                first_bit,
                last_bit,
                boundary: plan.bits[first_bit] != plan.bits[last_bit],
                d_c_clicks: counts.d_c_clicks,
                d_x_clicks: counts.d_x_clicks,
                estimated_n_s: counts.n_s(),
                decoded_symbol: decoder.symbol(&counts),
            }
        })
        .collect();

    let decoded_bits: Vec<u8> = window_reports
        .chunks(w)
        .map(|group| majority(group, &decoder))
        .collect();
    let errors = decoded_bits
        .iter()
        .zip(&plan.bits)
        .filter(|(a, b)| a != b)
        .count();
    Ok(TransmitReport {
        plan: plan.clone(),
        gate: *gate,
        decoder,
        receiver_offset: offset,
        window_reports,
        decoded_bits,
        ber: (n_bits > 0).then(|| errors as f64 / n_bits as f64),
    })
}

/// Majority of the unambiguous window symbols; a tie is settled by the
/// pooled estimate of the whole group, and a group without control clicks
/// decodes as 0.
fn majority(group: &[WindowReport], decoder: &Decoder) -> u8 {
    let ones = group.iter().filter(|r| r.decoded_symbol == Symbol::One).count();
    let zeros = group.iter().filter(|r| r.decoded_symbol == Symbol::Zero).count();
    match ones.cmp(&zeros) {
        std::cmp::Ordering::Greater => 1,
        std::cmp::Ordering::Less => 0,
        std::cmp::Ordering::Equal => {
            let pooled = group.iter().fold(ClickCounts::default(), |acc, r| {
                acc.merge(ClickCounts {
                    pairs: 0,
                    d_c_clicks: r.d_c_clicks,
                    d_x_clicks: r.d_x_clicks,
                })
            });
            pooled.n_s().map_or(0, |v| decoder.decide(v))
        }
    }
}

/// Where branch-B photons come from in the source-discrimination scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum SourceKind {
    /// Entangled pairs shared with branch A, written in a rotated basis.
    Entangled { basis_rotation_deg: f64 },
    /// Unpaired photons polarized along one axis, sent to branch B only.
    SingleAlpha { alpha_deg: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MetaDecision {
    /// Branch A can hold the information (entangled source): bit 1.
    Shared,
    /// Only branch B receives it (single photons): bit 0.
    Private,
    Unclassifiable,
}

impl MetaDecision {
    pub fn bit(self) -> Option<u8> {
        match self {
            Self::Shared => Some(1),
            Self::Private => Some(0),
            Self::Unclassifiable => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetaReport {
    pub source: SourceKind,
    pub hypothesis_alpha_deg: f64,
    pub entangled_n_s: f64,
    pub single_n_s: f64,
    pub threshold: Option<f64>,
    pub estimated_n_s: Option<f64>,
    pub decision: MetaDecision,
    pub bit: Option<u8>,
}

/// Classifies a batch of `n_pairs` photons as coming from the entangled
/// source or from single photons at `hypothesis_alpha_deg`.
pub fn meta_info_scenario(
    source: SourceKind,
    hypothesis_alpha_deg: f64,
    gate: SymmetricModifiers,
    n_pairs: u64,
    seed: u64,
) -> Result<MetaReport> {
    if n_pairs == 0 {
        return Err(Error::InvalidParameter("need at least one photon".into()));
    }
    let entangled_n_s = pipeline::run_case_i(gate).n_s;
    let single_n_s = pipeline::run_single_photon(hypothesis_alpha_deg, gate).n_s;
    let actual = match source {
        SourceKind::Entangled { basis_rotation_deg } => pipeline::run_case_i_rotated(gate, basis_rotation_deg),
        SourceKind::SingleAlpha { alpha_deg } => pipeline::run_single_photon(alpha_deg, gate),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let counts = sample_clicks(n_pairs, &mut rng, |_| (actual.d_c, actual.d_x));
    let estimated_n_s = counts.n_s();
    let (threshold, decision) = if (entangled_n_s - single_n_s).abs() < 1e-9 {
        (None, MetaDecision::Unclassifiable)
    } else {
        let thr = 0.5 * (entangled_n_s + single_n_s);
        let decision = match estimated_n_s {
            None => MetaDecision::Unclassifiable,
            Some(v) if (v > thr) == (entangled_n_s > single_n_s) => MetaDecision::Shared,
            Some(_) => MetaDecision::Private,
        };
        (Some(thr), decision)
    };
    Ok(MetaReport {
        source,
        hypothesis_alpha_deg,
        entangled_n_s,
        single_n_s,
        threshold,
        estimated_n_s,
        decision,
        bit: decision.bit(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Calibration {
    pub best_setting: f64,
    pub separation: f64,
    /// Every grid setting within 1e-12 of the best separation.
    pub maximizers: Vec<f64>,
    pub sweep: Vec<(f64, f64)>,
}

fn best_of(sweep: Vec<(f64, f64)>) -> Result<Calibration> {
    let (best_setting, separation) = sweep
        .iter()
        .copied()
        .fold(None, |acc: Option<(f64, f64)>, (s, v)| match acc {
            Some((_, bv)) if bv >= v => acc,
            _ => Some((s, v)),
        })
        .ok_or_else(|| Error::InvalidParameter("calibration grid is empty".into()))?;
    let maximizers = sweep
        .iter()
        .filter(|(_, v)| (separation - v).abs() <= 1e-12)
        .map(|(s, _)| *s)
        .collect();
    Ok(Calibration {
        best_setting,
        separation,
        maximizers,
        sweep,
    })
}

/// Measurement angle maximizing `|N_S(Measure(α)) − N_S(reference)|`.
pub fn calibration_sweep(gate: &Gate, reference: SenderAction, alpha_grid: &[f64]) -> Result<Calibration> {
    let base = gate.analytic_ns(reference)?;
    let sweep = alpha_grid
        .iter()
        .map(|&a| Ok((a, (gate.analytic_ns(SenderAction::Measure(a))? - base).abs())))
        .collect::<Result<Vec<_>>>()?;
    best_of(sweep)
}

/// Phase-shifter setting maximizing `|effect(Δλ, 0) − 1|`.
pub fn phase_shifter_sweep(geometry: &SlitGeometry, x_um: f64, dl_grid: &[f64]) -> Result<Calibration> {
    let sweep = dl_grid
        .iter()
        .map(|&dl| {
            let e = crate::diffraction::phase_shifter_effect(geometry, x_um, dl, 0.0)?;
            Ok((dl, (e - 1.0).abs()))
        })
        .collect::<Result<Vec<_>>>()?;
    best_of(sweep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn plan(bits: Vec<u8>, w: usize, n: u64) -> TransmissionPlan {
        TransmissionPlan {
            bits,
            action_map: ActionMap::default(),
            windows_per_bit: w,
            photons_per_window: n,
        }
    }

    #[test]
    fn analytic_values_per_gate() {
        let m45 = SenderAction::Measure(45.0);
        let m90 = SenderAction::Measure(90.0);
        let pi = Gate::pi_combiner();
        assert_abs_diff_eq!(pi.analytic_ns(SenderAction::NoMeasure).unwrap(), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(pi.analytic_ns(m45).unwrap(), 0.5, epsilon = 1e-12);
        let is = Gate::interference_space();
        assert_eq!(is.analytic_ns(m90).unwrap(), 1.0);
        assert_abs_diff_eq!(is.analytic_ns(m45).unwrap(), 0.5, epsilon = 1e-12);
        let h = Gate::hom();
        assert_eq!(h.analytic_ns(m90).unwrap(), 0.5);
        assert_abs_diff_eq!(h.analytic_ns(m45).unwrap(), 1e-4, epsilon = 1e-15);
    }

    #[test]
    fn unmeasured_is_and_hom_are_rejected() {
        assert!(matches!(
            Gate::interference_space().analytic_ns(SenderAction::NoMeasure),
            Err(Error::Unsupported { gate: "is", .. })
        ));
        assert!(Gate::hom().analytic_ns(SenderAction::NoMeasure).is_err());
        assert!(Gate::three_slit().analytic_ns(SenderAction::NoMeasure).is_ok());
    }

    #[test]
    fn window_estimates() {
        let gate = Gate::pi_combiner();
        let map = ActionMap {
            zero: SenderAction::NoMeasure,
            one: SenderAction::Measure(45.0),
        };
        let dec = Decoder::new(&gate, &map, None).unwrap();
        for action in [SenderAction::NoMeasure, SenderAction::Measure(45.0)] {
            let r = sample_window(action, &gate, 10_000, 11, &dec).unwrap();
            assert_abs_diff_eq!(r.estimated_n_s.unwrap(), 0.5, epsilon = 0.02);
        }
        let is = Gate::interference_space();
        let dec = Decoder::new(&is, &ActionMap::default(), None).unwrap();
        let a = sample_window(SenderAction::Measure(45.0), &is, 100, 1, &dec).unwrap();
        let b = sample_window(SenderAction::Measure(90.0), &is, 100, 1, &dec).unwrap();
        assert!(a.estimated_n_s.unwrap() < b.estimated_n_s.unwrap());
    }

    #[test]
    fn empty_plan_gives_empty_report() {
        let r = transmit(&plan(vec![], 3, 10), &Gate::interference_space(), None, 1).unwrap();
        assert!(r.decoded_bits.is_empty() && r.window_reports.is_empty());
        assert_eq!(r.ber, None);
    }

    #[test]
    fn invalid_plans() {
        let g = Gate::interference_space();
        assert!(transmit(&plan(vec![1], 0, 10), &g, None, 1).is_err());
        assert!(transmit(&plan(vec![1], 1, 0), &g, None, 1).is_err());
        assert!(transmit(&plan(vec![2], 1, 1), &g, None, 1).is_err());
    }

    #[test]
    fn boundary_windows_are_flagged() {
        let r = transmit(&plan(vec![0, 1, 1, 0], 3, 50), &Gate::interference_space(), None, 5).unwrap();
        let flagged: Vec<usize> = r
            .window_reports
            .iter()
            .filter(|w| w.boundary)
            .map(|w| w.window_index)
            .collect();
        assert_eq!(flagged, vec![2, 8]);
    }

    #[test]
    fn is_gate_decodes_cleanly() {
        let bits = random_bits(16, 4);
        let r = transmit(&plan(bits.clone(), 3, 500), &Gate::interference_space(), None, 2).unwrap();
        assert_eq!(r.decoded_bits, bits);
        assert_eq!(r.ber, Some(0.0));
    }

    #[test]
    fn meta_scenario_cases() {
        let pi = SymmetricModifiers::PI;
        let r = meta_info_scenario(SourceKind::SingleAlpha { alpha_deg: 45.0 }, 45.0, pi, 2000, 3).unwrap();
        assert_eq!(r.decision, MetaDecision::Private);
        assert!(r.estimated_n_s.unwrap() < 0.05);
        let r = meta_info_scenario(SourceKind::Entangled { basis_rotation_deg: 33.0 }, 45.0, pi, 2000, 3).unwrap();
        assert_eq!(r.decision, MetaDecision::Shared);
        assert_eq!(r.bit, Some(1));
        let r = meta_info_scenario(SourceKind::SingleAlpha { alpha_deg: 0.0 }, 0.0, pi, 100, 3).unwrap();
        assert_eq!(r.decision, MetaDecision::Unclassifiable);
    }

    #[test]
    fn calibration_cases() {
        let grid: Vec<f64> = (0..180).map(f64::from).collect();
        let c = calibration_sweep(&Gate::pi_combiner(), SenderAction::NoMeasure, &grid).unwrap();
        assert!(c.separation < 1e-12);
        let c = calibration_sweep(&Gate::interference_space(), SenderAction::Measure(90.0), &grid).unwrap();
        assert_abs_diff_eq!(c.separation, 0.5, epsilon = 1e-12);
        assert!(c.maximizers.contains(&45.0));
        assert!(calibration_sweep(&Gate::pi_combiner(), SenderAction::NoMeasure, &[]).is_err());
    }

    #[test]
    fn phase_shifter_calibration() {
        let g = SlitGeometry::preset(Preset::A7);
        let grid: Vec<f64> = (0..=70).map(|i| i as f64 * 0.01).collect();
        let c = phase_shifter_sweep(&g, crate::diffraction::A7_DETECTOR_X_UM, &grid).unwrap();
        assert!(c.separation > 1.4);
        assert_eq!(c.sweep[0].1, 0.0);
    }
}
