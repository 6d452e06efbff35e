//! The acceptance suite: each criterion recomputes its quantity from the
//! library and compares it to an independent closed form or a fixed bound.
//! Also produces the data files that `verify-all` writes.

use std::time::{Duration, Instant};

use serde::Serialize;

use crate::diffraction::{
    linf_distance, phase_shifter_effect, plate_pattern, slit_scans, PlatePhase, Preset,
    SlitGeometry, A6_QUOTED_SLIT_DISTANCE_UM, A7_DETECTOR_X_UM,
};
use crate::error::Result;
use crate::hom::{self, HomCase, HomStats};
use crate::is_gate::{run_is_case, IsRecord};
use crate::nogo::verify_nogo;
use crate::output::{curve_csv, figure2_csv, json_line, windows_csv};
use crate::pipeline::{alpha_grid, figure2_data, order_independence_gap};
use crate::protocol::{random_bits, transmit, ActionMap, Gate, TransmissionPlan, TransmitReport};
use crate::quantum::{
    apply_bshv, apply_polarizer, bell_pair, express_in_basis, is_entangled, PortAmplitudes, Particle,
    Path, Subcase,
};

pub const DEFAULT_SEED: u64 = 1729;
pub const PHASE_EFFECT_TARGET: f64 = 2.466990518;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerifyConfig {
    pub seed: u64,
    pub steps: usize,
    pub nogo_samples: usize,
    pub hom_pairs: u64,
    pub bits: usize,
    pub photons_per_window: u64,
    pub windows_per_bit: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            steps: 181,
            nogo_samples: 100,
            hom_pairs: 100_000,
            bits: 64,
            photons_per_window: 1000,
            windows_per_bit: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    #[serde(skip)]
    pub detail: String,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "[{}] {:>2}. {}: {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail
        )
    }
}

fn result(id: u8, name: &'static str, passed: bool, detail: String) -> CriterionResult {
    CriterionResult {
        id,
        name,
        passed,
        detail,
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let v = f();
    (v, t.elapsed())
}

fn oracle_iia(alpha_deg: f64) -> f64 {
    0.5 * (1.0 - (2.0 * alpha_deg.to_radians()).sin())
}

fn oracle_iib(alpha_deg: f64) -> f64 {
    0.5 * (1.0 + (2.0 * alpha_deg.to_radians()).sin())
}

pub fn case_one_constant(cfg: &VerifyConfig) -> Result<CriterionResult> {
    let grid = alpha_grid(cfg.steps);
    let (rows, elapsed) = timed(|| figure2_data(&grid));
    let rows = rows?;
    let err = rows.iter().map(|r| (r.ns_case_i - 0.5).abs()).fold(0.0, f64::max);
    let ok = rows.len() == 181 && err < 1e-12 && elapsed < Duration::from_secs(1);
    Ok(result(
        1,
        "case I constant",
        ok,
        format!("{} rows, max |n_s_I - 0.5| = {err:.3e}, {elapsed:.2?}", rows.len()),
    ))
}

pub fn case_two_curves(cfg: &VerifyConfig) -> Result<CriterionResult> {
    let rows = figure2_data(&alpha_grid(cfg.steps))?;
    let (mut ea, mut eb, mut em) = (0.0_f64, 0.0_f64, 0.0_f64);
    for r in &rows {
        ea = ea.max((r.ns_case_iia - oracle_iia(r.alpha_deg)).abs());
        eb = eb.max((r.ns_case_iib - oracle_iib(r.alpha_deg)).abs());
        em = em.max((r.ns_mixed - 0.5).abs());
    }
    Ok(result(
        2,
        "case II curves",
        ea < 1e-12 && eb < 1e-12 && em < 1e-12,
        format!("max err IIa {ea:.3e}, IIb {eb:.3e}, mean {em:.3e}"),
    ))
}

pub fn nogo_identity(cfg: &VerifyConfig) -> Result<CriterionResult> {
    let r = verify_nogo(cfg.nogo_samples, &alpha_grid(cfg.steps), cfg.seed)?;
    Ok(result(
        3,
        "no-go identity",
        r.samples == 100 && r.alphas == 181 && r.max_abs_gap < 1e-12,
        format!("{} pairs x {} angles, max gap {:.3e}", r.samples, r.alphas, r.max_abs_gap),
    ))
}

pub fn phase_effect() -> Result<CriterionResult> {
    let g = SlitGeometry::preset(Preset::A7);
    let e = phase_shifter_effect(&g, A7_DETECTOR_X_UM, 0.3, 0.0)?;
    let gap = (e - PHASE_EFFECT_TARGET).abs();
    Ok(result(
        4,
        "phase-shifter effect",
        gap < 1e-6,
        format!("effect {e:.9} vs {PHASE_EFFECT_TARGET}, |diff| {gap:.2e}"),
    ))
}

pub fn order_independence() -> Result<CriterionResult> {
    let worst = (0..=180)
        .map(|a| order_independence_gap(a as f64))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok(result(
        5,
        "order independence",
        worst <= 1e-12,
        format!("181 angles, max amplitude gap {worst:.3e}"),
    ))
}

pub fn three_slit_separation() -> Result<CriterionResult> {
    let g = SlitGeometry::preset(Preset::A6);
    let xs = g.default_detector_grid(2001);
    let scans = slit_scans(&g, &xs, 0.0);
    let d = linf_distance(&scans.avg_45.normalized(), &scans.avg_90.normalized())?;
    let plate = g.default_plate_grid(2001);
    let i0 = plate_pattern(&g, &plate, PlatePhase::Zero);
    let ipi = plate_pattern(&g, &plate, PlatePhase::Pi);
    let comp = i0
        .intensity
        .iter()
        .zip(&ipi.intensity)
        .map(|(a, b)| (a + b - 4.0).abs())
        .fold(0.0, f64::max);
    Ok(result(
        6,
        "three-slit separation",
        d > 0.1 && comp < 1e-9,
        format!("L-inf(avg45, avg90) = {d:.3e} (needs > 0.1); |I0 + Ipi - 4| max {comp:.3e}"),
    ))
}

pub fn hom_statistics(cfg: &VerifyConfig) -> Result<CriterionResult> {
    let s = hom::simulate_hom(HomCase::Deg90, cfg.hom_pairs, cfg.seed, hom::DEFAULT_EPSILON)?;
    let sigma = (0.25 * 0.75 / cfg.hom_pairs as f64).sqrt();
    let rate_ok = (s.coincidence_rate - 0.25).abs() <= 4.0 * sigma;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let a9 = hom::hom_transform(PortAmplitudes::real(1.0, 0.0), PortAmplitudes::real(0.0, 1.0));
    let a9_err = [(a9.bx3_bx3.re, -h), (a9.bx4_bx4.re, h), (a9.bx3_bx4.re, 0.0)]
        .iter()
        .map(|(v, t)| (v - t).abs())
        .chain([a9.bx3_bx3.im.abs(), a9.bx4_bx4.im.abs(), a9.bx3_bx4.im.abs()])
        .fold(0.0, f64::max);
    let first = hom::TimedPhoton::delayed(HomCase::Deg45, Subcase::Absorbed, 0.0);
    let second = hom::TimedPhoton::delayed(HomCase::Deg45, Subcase::Transmitted, 1.0);
    let d = hom::hom_transform(first.spatial, second.spatial);
    let d_err = [
        (d.bx3_bx4.re + 1.0).abs(),
        d.bx3_bx4.im.abs(),
        d.bx3_bx3.norm(),
        d.bx4_bx4.norm(),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    Ok(result(
        7,
        "HOM statistics",
        rate_ok && s.identical_fraction == Some(1.0) && a9_err < 1e-12 && d_err < 1e-12,
        format!(
            "rate {:.5} (4σ = {:.5}), identical {:?}, a9 err {a9_err:.2e}, case d err {d_err:.2e}",
            s.coincidence_rate,
            4.0 * sigma,
            s.identical_fraction
        ),
    ))
}

pub fn is_gate_values() -> CriterionResult {
    let n90 = run_is_case(HomCase::Deg90);
    let n45 = run_is_case(HomCase::Deg45);
    result(
        8,
        "IS gate",
        n90 == 1.0 && n45 == 0.5,
        format!("n_s(90) = {n90}, n_s(45) = {n45}"),
    )
}

pub fn plan(cfg: &VerifyConfig) -> TransmissionPlan {
    TransmissionPlan {
        bits: random_bits(cfg.bits, cfg.seed),
        action_map: ActionMap::default(),
        windows_per_bit: cfg.windows_per_bit,
        photons_per_window: cfg.photons_per_window,
    }
}

pub fn protocol_runs(cfg: &VerifyConfig) -> Result<Vec<TransmitReport>> {
    let p = plan(cfg);
    [Gate::pi_combiner(), Gate::interference_space(), Gate::three_slit()]
        .iter()
        .map(|g| transmit(&p, g, None, cfg.seed))
        .collect()
}

pub fn protocol_ber(cfg: &VerifyConfig) -> Result<CriterionResult> {
    let (runs, elapsed) = timed(|| protocol_runs(cfg));
    let runs = runs?;
    let ber = |i: usize| runs[i].ber.unwrap_or(f64::NAN);
    let (pi, is, slits) = (ber(0), ber(1), ber(2));
    let ok = (0.35..=0.65).contains(&pi) && is == 0.0 && slits < 0.01 && elapsed < Duration::from_secs(30);
    Ok(result(
        9,
        "protocol no-go vs go",
        ok,
        format!("BER pibs {pi:.4} (needs 0.35..0.65), is {is:.4} (needs 0), slits {slits:.4} (needs < 0.01), {elapsed:.2?}"),
    ))
}

pub fn determinism(cfg: &VerifyConfig) -> Result<CriterionResult> {
    let a = data_files(cfg)?;
    let b = data_files(cfg)?;
    let same = a == b;
    let bytes: usize = a.iter().map(|(_, c)| c.len()).sum();
    Ok(result(
        10,
        "determinism",
        same,
        format!("{} files, {bytes} bytes, identical across two runs: {same}", a.len()),
    ))
}

pub fn run_all(cfg: &VerifyConfig) -> Result<Vec<CriterionResult>> {
    Ok(vec![
        case_one_constant(cfg)?,
        case_two_curves(cfg)?,
        nogo_identity(cfg)?,
        phase_effect()?,
        order_independence()?,
        three_slit_separation()?,
        hom_statistics(cfg)?,
        is_gate_values(),
        protocol_ber(cfg)?,
        determinism(cfg)?,
    ])
}

/// Consistency observations that are reported but not gated.
pub fn report_notes() -> Result<Vec<String>> {
    let (s, _) = apply_polarizer(&apply_bshv(&bell_pair())?, &[Path::B1, Path::B2], 45.0)?;
    let e = is_entangled(&express_in_basis(&s, Particle::A, 45.0))?;
    let a6 = SlitGeometry::preset(Preset::A6);
    Ok(vec![
        format!(
            "after the 45° polarizers: |ru - st| = {:.6} (entangled: {}); the written coefficients were claimed to give ru = st",
            e.det.norm(),
            e.entangled
        ),
        format!(
            "A6 slit offset from the closed form: {:.5} µm; quoted slit distance: {A6_QUOTED_SLIT_DISTANCE_UM} µm",
            a6.b_um
        ),
        "three-slit detector curves use the linear phasor model; the phase-shifter figure uses the sum-of-sines snapshot".to_string(),
    ])
}

/// Every data file `verify-all` writes, as `(file name, contents)`.
pub fn data_files(cfg: &VerifyConfig) -> Result<Vec<(String, String)>> {
    let mut files = Vec::new();
    files.push(("figure2.csv".to_string(), figure2_csv(&figure2_data(&alpha_grid(cfg.steps))?)));
    files.push((
        "nogo.json".to_string(),
        json_line(&verify_nogo(cfg.nogo_samples, &alpha_grid(cfg.steps), cfg.seed)?),
    ));

    let a7 = SlitGeometry::preset(Preset::A7);
    files.push((
        "phase_effect.json".to_string(),
        json_line(&crate::diffraction::PhaseEffectRecord {
            dl1: 0.3,
            dl2: 0.0,
            ratio: phase_shifter_effect(&a7, A7_DETECTOR_X_UM, 0.3, 0.0)?,
        }),
    ));

    let a6 = SlitGeometry::preset(Preset::A6);
    let scans = slit_scans(&a6, &a6.default_detector_grid(2001), 0.0);
    for (case, curve) in &scans.cases {
        files.push((format!("slits_{}.csv", case.name()), curve_csv(curve)));
    }
    files.push(("slits_avg_45.csv".to_string(), curve_csv(&scans.avg_45)));
    files.push(("slits_avg_90.csv".to_string(), curve_csv(&scans.avg_90)));
    let plate = a6.default_plate_grid(2001);
    files.push(("plate_phase0.csv".to_string(), curve_csv(&plate_pattern(&a6, &plate, PlatePhase::Zero))));
    files.push(("plate_phasepi.csv".to_string(), curve_csv(&plate_pattern(&a6, &plate, PlatePhase::Pi))));

    for case in [HomCase::Deg90, HomCase::Deg45] {
        let s: HomStats = hom::simulate_hom(case, cfg.hom_pairs, cfg.seed, hom::DEFAULT_EPSILON)?;
        files.push((format!("hom_{}.json", case.name()), json_line(&s)));
    }
    let is_records: String = [HomCase::Deg90, HomCase::Deg45]
        .iter()
        .map(|&case| json_line(&IsRecord { case, n_s: run_is_case(case) }))
        .collect();
    files.push(("is_gate.jsonl".to_string(), is_records));

    for r in protocol_runs(cfg)? {
        files.push((format!("transmit_{}.json", r.gate.name()), json_line(&r)));
        files.push((format!("transmit_{}_windows.csv", r.gate.name()), windows_csv(&r.window_reports)));
    }
    Ok(files)
}
