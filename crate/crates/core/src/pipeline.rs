//! The full apparatus: source, polarizing splitter, optional measurement on
//! branch A, 45° polarizers, 50/50 taps to the control detector and a
//! combining gate in front of the signal detector.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::nogo::SymmetricModifiers;
use crate::quantum::{
    apply_5050_splitter, apply_bshv, apply_polarizer, apply_weighted_combiner, bell_pair,
    express_in_basis, measure_branch_a, rotate_polarization_basis, Amplitude, Ket, Normalization,
    Particle, Path, PolComponent, PolLabel, StateVector, Subcase,
};

/// Detector probabilities for one scenario: `D_C` (sum of both control
/// taps), `D_X` (combiner output) and their ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CaseResult {
    pub d_c: f64,
    pub d_x: f64,
    pub n_s: f64,
}

impl CaseResult {
    pub fn new(d_c: f64, d_x: f64) -> Self {
        Self {
            d_c,
            d_x,
            // adding zero folds a -0.0 ratio into 0.0
            n_s: d_x / d_c + 0.0,
        }
    }
}

/// What the sender does on branch A during a window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum SenderAction {
    NoMeasure,
    Measure(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SubcasePolicy {
    AnalyticMix,
    Sample,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScenarioSpec {
    pub sender_action: SenderAction,
    pub gate: SymmetricModifiers,
    pub subcase_policy: SubcasePolicy,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CaseIIResult {
    pub a: CaseResult,
    pub b: CaseResult,
    pub mixed_n_s: f64,
}

/// Runs the branch-B optics after the source state has been prepared and
/// reads both detectors.
fn readout(s: &StateVector, gate: SymmetricModifiers) -> CaseResult {
    let (s, _) = apply_polarizer(s, &[Path::B1, Path::B2], 45.0)
        .expect("each branch passes half of its photons at 45°");
    let s = apply_5050_splitter(&s, Path::B1, Path::Bc1, Path::Bx1);
    let s = apply_5050_splitter(&s, Path::B2, Path::Bc2, Path::Bx2);
    let s = apply_weighted_combiner(
        &s,
        Path::Bx1,
        Path::Bx2,
        Path::Bx,
        Amplitude::new(gate.f_i, 0.0),
        Amplitude::new(gate.f_m, 0.0),
    )
    .expect("both branches leave the polarizers at 45°");
    CaseResult::new(s.probability_on(&[Path::Bc1, Path::Bc2]), s.probability_on(&[Path::Bx]))
}

fn split_source(theta_deg: f64) -> StateVector {
    let s = rotate_polarization_basis(&bell_pair(), Particle::A, theta_deg);
    let s = rotate_polarization_basis(&s, Particle::B, theta_deg);
    let s = express_in_basis(&s, Particle::B, 0.0);
    apply_bshv(&s).expect("branch B is in the 0° basis")
}

/// No measurement on branch A.
pub fn run_case_i(gate: SymmetricModifiers) -> CaseResult {
    run_case_i_rotated(gate, 0.0)
}

/// Case I with the source written in a basis rotated by `theta_deg` before
/// it enters the apparatus.
pub fn run_case_i_rotated(gate: SymmetricModifiers, theta_deg: f64) -> CaseResult {
    readout(&split_source(theta_deg), gate)
}

/// Case II for one measurement outcome on branch A.
pub fn run_subcase(alpha_deg: f64, subcase: Subcase, gate: SymmetricModifiers) -> CaseResult {
    let outcomes = measure_branch_a(&split_source(0.0), alpha_deg).expect("particle A present");
    let o = outcomes
        .iter()
        .find(|o| o.label == subcase)
        .expect("both outcomes reported");
    readout(&o.post_state, gate)
}

/// Unpaired photons sent to branch B with polarization along `alpha_deg`.
pub fn run_single_photon(alpha_deg: f64, gate: SymmetricModifiers) -> CaseResult {
    let pol = PolLabel::new(alpha_deg, PolComponent::Parallel);
    let s = StateVector::from_real_terms(
        [(Ket::single_b(Path::SrcB, pol), 1.0)],
        Normalization::Normalized,
    );
    let s = apply_bshv(&express_in_basis(&s, Particle::B, 0.0)).expect("0° basis");
    readout(&s, gate)
}

/// Measurement at `alpha_deg` on branch A; both outcomes and their 50/50 mix.
pub fn run_case_ii(alpha_deg: f64, gate: SymmetricModifiers) -> CaseIIResult {
    let a = run_subcase(alpha_deg, Subcase::Transmitted, gate);
    let b = run_subcase(alpha_deg, Subcase::Absorbed, gate);
    CaseIIResult {
        a,
        b,
        mixed_n_s: 0.5 * (a.n_s + b.n_s),
    }
}

/// Detector probabilities for each equally likely subcase of an action.
pub fn branch_probabilities(action: SenderAction, gate: SymmetricModifiers) -> Vec<CaseResult> {
    match action {
        SenderAction::NoMeasure => vec![run_case_i(gate)],
        SenderAction::Measure(alpha) => {
            let r = run_case_ii(alpha, gate);
            vec![r.a, r.b]
        }
    }
}

/// Averaged `N_S` for an action.
pub fn analytic_ns(action: SenderAction, gate: SymmetricModifiers) -> f64 {
    let branches = branch_probabilities(action, gate);
    branches.iter().map(|r| r.n_s).sum::<f64>() / branches.len() as f64
}

/// Compares the two orders of measuring branch A and splitting branch B.
/// Measuring first leaves photon B polarized along the measurement axis; it
/// is then re-expressed in the 0° basis and split.
pub fn order_independence_check(alpha_deg: f64) -> bool {
    order_independence_gap(alpha_deg).is_ok_and(|g| g <= 1e-12)
}

/// Largest amplitude difference (after phase alignment) between the two orders.
pub fn order_independence_gap(alpha_deg: f64) -> Result<f64> {
    let split_first = measure_branch_a(&apply_bshv(&bell_pair())?, alpha_deg)?;
    let measured_first = measure_branch_a(&bell_pair(), alpha_deg)?;
    let mut worst = 0.0_f64;
    for (x, y) in split_first.iter().zip(measured_first.iter()) {
        let collapsed = express_in_basis(&y.post_state, Particle::B, alpha_deg);
        if collapsed.len() != 1 {
            return Err(Error::InvalidParameter(format!(
                "photon B is not in a definite polarization after the {:?} outcome",
                y.label
            )));
        }
        let later = apply_bshv(&express_in_basis(&collapsed, Particle::B, 0.0))?;
        let ip = x.post_state.inner(&later);
        let aligned = if ip.norm() > 0.0 {
            later.scaled(ip.conj() / ip.norm())
        } else {
            later
        };
        worst = worst.max(x.post_state.max_abs_diff(&aligned));
        worst = worst.max((x.prob - y.prob).abs());
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Figure2Row {
    pub alpha_deg: f64,
    pub ns_case_i: f64,
    pub ns_case_iia: f64,
    pub ns_case_iib: f64,
    pub ns_mixed: f64,
}

/// `steps` evenly spaced angles from 0° to 180° inclusive.
pub fn alpha_grid(steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![0.0],
        n => (0..n).map(|i| 180.0 * i as f64 / (n - 1) as f64).collect(),
    }
}

pub fn figure2_data(alpha_grid: &[f64]) -> Result<Vec<Figure2Row>> {
    if alpha_grid.is_empty() {
        return Err(Error::InvalidParameter("alpha grid is empty".into()));
    }
    let gate = SymmetricModifiers::PI;
    let case_i = run_case_i(gate).n_s;
    Ok(alpha_grid
        .iter()
        .map(|&alpha_deg| {
            let ii = run_case_ii(alpha_deg, gate);
            Figure2Row {
                alpha_deg,
                ns_case_i: case_i,
                ns_case_iia: ii.a.n_s,
                ns_case_iib: ii.b.n_s,
                ns_mixed: ii.mixed_n_s,
            }
        })
        .collect())
}

/// Click tallies for a batch of photon pairs.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ClickCounts {
    pub pairs: u64,
    pub d_c_clicks: u64,
    pub d_x_clicks: u64,
}

impl ClickCounts {
    pub fn n_s(&self) -> Option<f64> {
        (self.d_c_clicks > 0).then(|| self.d_x_clicks as f64 / self.d_c_clicks as f64)
    }

    pub fn merge(self, other: Self) -> Self {
        Self {
            pairs: self.pairs + other.pairs,
            d_c_clicks: self.d_c_clicks + other.d_c_clicks,
            d_x_clicks: self.d_x_clicks + other.d_x_clicks,
        }
    }
}

/// Per photon pair, `draw` picks the detector probabilities (after any
/// random subcase); the control and signal detectors then click
/// independently with those probabilities.
pub fn sample_clicks<R, F>(n_pairs: u64, rng: &mut R, mut draw: F) -> ClickCounts
where
    R: Rng + ?Sized,
    F: FnMut(&mut R) -> (f64, f64),
{
    let mut counts = ClickCounts {
        pairs: n_pairs,
        ..ClickCounts::default()
    };
    for _ in 0..n_pairs {
        let (p_c, p_x) = draw(rng);
        if rng.gen_bool(p_c.clamp(0.0, 1.0)) {
            counts.d_c_clicks += 1;
        }
        if rng.gen_bool(p_x.clamp(0.0, 1.0)) {
            counts.d_x_clicks += 1;
        }
    }
    counts
}

/// Monte-Carlo run of a scenario. With [`SubcasePolicy::Sample`] every pair
/// draws its own subcase; with [`SubcasePolicy::AnalyticMix`] the subcase
/// probabilities are averaged first.
pub fn sample_scenario<R: Rng + ?Sized>(spec: &ScenarioSpec, n_pairs: u64, rng: &mut R) -> ClickCounts {
    let branches = branch_probabilities(spec.sender_action, spec.gate);
    let mean = |f: fn(&CaseResult) -> f64| branches.iter().map(f).sum::<f64>() / branches.len() as f64;
    let mixed = (mean(|r| r.d_c), mean(|r| r.d_x));
    match spec.subcase_policy {
        SubcasePolicy::AnalyticMix => sample_clicks(n_pairs, rng, |_| mixed),
        SubcasePolicy::Sample => sample_clicks(n_pairs, rng, |rng| {
            let r = &branches[rng.gen_range(0..branches.len())];
            (r.d_c, r.d_x)
        }),
    }
}
