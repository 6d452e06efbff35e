//! Scalar interference for the three-slit gate.
//!
//! The two branch outputs sit at `y = +a/2` (`Bx1`) and `y = −a/2` (`Bx2`), a
//! distance `d1` in front of a plate with point slits at `−b`, `0` and `+b`.
//! Detectors lie on a line a further `d2` behind the plate. Slits re-emit
//! without obliquity or `1/r` factors. All lengths are in micrometres.
//!
//! Two amplitude models live here. [`snapshot_amplitude`] is a sum of sines
//! over the three optical paths, evaluated literally. [`detector_scan`] is a
//! coherent complex-phasor model used for intensity curves.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quantum::{PortAmplitudes, Subcase};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlitGeometry {
    pub lambda_um: f64,
    pub a_um: f64,
    pub d1_um: f64,
    pub d2_um: f64,
    pub m: u32,
    pub b_um: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Preset {
    A6,
    A7,
}

impl SlitGeometry {
    pub fn new(lambda_um: f64, a_um: f64, d1_um: f64, d2_um: f64, m: u32) -> Result<Self> {
        for (name, v) in [("lambda", lambda_um), ("a", a_um), ("d1", d1_um), ("d2", d2_um)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Geometry(format!("{name} must be positive, got {v}")));
            }
        }
        let b_um = slit_offset(lambda_um, a_um, d1_um, m)?;
        Ok(Self {
            lambda_um,
            a_um,
            d1_um,
            d2_um,
            m,
            b_um,
        })
    }

    pub fn preset(p: Preset) -> Self {
        match p {
            Preset::A6 => Self::new(0.5, 2000.0, 1.0e6, 1.0e5, 0),
            Preset::A7 => Self::new(0.7, 777.0, 3_333_333.0, 777_777.0, 0),
        }
        .expect("built-in geometries are valid")
    }

    /// `M = m + ½`
    pub fn big_m(&self) -> f64 {
        self.m as f64 + 0.5
    }

    /// Slit positions on the plate, bottom to top.
    pub fn slits(&self) -> [f64; 3] {
        [-self.b_um, 0.0, self.b_um]
    }

    /// Symmetric grid of `n` detector positions with half-width `5·b·d2/d1`.
    pub fn default_detector_grid(&self, n: usize) -> Vec<f64> {
        let half = 5.0 * self.b_um * self.d2_um / self.d1_um;
        linspace(-half, half, n)
    }

    /// Symmetric plate grid covering `±2b`.
    pub fn default_plate_grid(&self, n: usize) -> Vec<f64> {
        linspace(-2.0 * self.b_um, 2.0 * self.b_um, n)
    }
}

/// Detector position and wavelength shift used by the worked example.
pub const A7_DETECTOR_X_UM: f64 = 333_333.0;
/// Slit separation quoted alongside the A6 geometry. The closed form gives a
/// different value; both are reported.
pub const A6_QUOTED_SLIT_DISTANCE_UM: f64 = 70.0;

pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.5 * (lo + hi)],
        n => (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// Side-slit offset placing the slits on the first-order minima; exact
/// (non-paraxial) solution of `L3 = L6 + Mλ`.
pub fn slit_offset(lambda_um: f64, a_um: f64, d1_um: f64, m: u32) -> Result<f64> {
    let big_m = m as f64 + 0.5;
    let ml = big_m * lambda_um;
    let den = 4.0 * a_um * a_um - 4.0 * ml * ml;
    if den <= 0.0 {
        return Err(Error::Geometry(format!(
            "Mλ = {ml} µm must be smaller than a = {a_um} µm"
        )));
    }
    let num = 4.0 * ml * ml * d1_um * d1_um - ml.powi(4) + ml * ml * a_um * a_um;
    let b = (num / den).sqrt();
    if !(b.is_finite() && b > 0.0) {
        return Err(Error::Geometry(format!("slit offset is not positive ({b})")));
    }
    Ok(b)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PathSet {
    pub l1: f64,
    pub l2: f64,
    pub l3: f64,
    pub l4: f64,
    pub l5: f64,
    pub l6: f64,
    pub l7: f64,
    pub l8: f64,
    pub l9: f64,
}

pub fn path_lengths(g: &SlitGeometry, x_um: f64) -> PathSet {
    let (a, b, d1, d2) = (g.a_um, g.b_um, g.d1_um, g.d2_um);
    let inner = d1.hypot(b - a / 2.0);
    let middle = d1.hypot(a / 2.0);
    let outer = d1.hypot(b + a / 2.0);
    PathSet {
        l1: inner,
        l2: middle,
        l3: outer,
        l4: outer,
        l5: middle,
        l6: inner,
        l7: d2.hypot(x_um + b),
        l8: d2.hypot(x_um),
        l9: d2.hypot(x_um - b),
    }
}

/// Phase in degrees of a ray travelling `first + second` less `shift`.
/// Whole wavelengths are removed from each leg before adding, which keeps
/// the result accurate when the legs are millions of wavelengths long.
fn leg_phase_deg(first: f64, second: f64, shift: f64, lambda: f64) -> f64 {
    360.0 * ((first / lambda).fract() + (second / lambda).fract() - shift / lambda)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Case90 {
    A,
    B,
}

/// Sum of sines of the three ray phases; `Δλ` shortens the central ray only.
pub fn snapshot_amplitude(g: &SlitGeometry, x_um: f64, delta_lambda_um: f64, case: Case90) -> f64 {
    let p = path_lengths(g, x_um);
    let lam = g.lambda_um;
    let legs = match case {
        Case90::A => [(p.l1, p.l7, 0.0), (p.l2, p.l8, delta_lambda_um), (p.l3, p.l9, 0.0)],
        Case90::B => [(p.l4, p.l7, 0.0), (p.l5, p.l8, delta_lambda_um), (p.l6, p.l9, 0.0)],
    };
    legs.iter()
        .map(|&(l1, l2, dl)| leg_phase_deg(l1, l2, dl, lam).to_radians().sin())
        .sum()
}

/// `½(A_a² + A_b²)`
pub fn snapshot_mean_square(g: &SlitGeometry, x_um: f64, delta_lambda_um: f64) -> f64 {
    let a = snapshot_amplitude(g, x_um, delta_lambda_um, Case90::A);
    let b = snapshot_amplitude(g, x_um, delta_lambda_um, Case90::B);
    0.5 * (a * a + b * b)
}

/// Ratio of the averaged snapshot intensities at two phase-shifter settings.
pub fn phase_shifter_effect(g: &SlitGeometry, x_um: f64, dl1_um: f64, dl2_um: f64) -> Result<f64> {
    let den = snapshot_mean_square(g, x_um, dl2_um);
    if den < 1e-15 {
        return Err(Error::DegenerateRatio(den));
    }
    Ok(snapshot_mean_square(g, x_um, dl1_um) / den)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseEffectRecord {
    pub dl1: f64,
    pub dl2: f64,
    pub ratio: f64,
}

/// `e^{2πi L/λ}` with whole wavelengths removed first.
fn phasor(length: f64, lambda: f64) -> Complex64 {
    Complex64::from_polar(1.0, TAU * (length / lambda).fract())
}

/// Distances from `Bx1` and `Bx2` to the plate point `y`, returned as the
/// `Bx1` distance and the difference `L(Bx2) − L(Bx1)`. The difference is
/// formed without cancellation.
fn source_distances(g: &SlitGeometry, y: f64) -> (f64, f64) {
    let half = g.a_um / 2.0;
    let l1 = g.d1_um.hypot(y - half);
    let l2 = g.d1_um.hypot(y + half);
    (l1, 2.0 * g.a_um * y / (l1 + l2))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PlatePhase {
    Zero,
    Pi,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Curve {
    pub x_um: Vec<f64>,
    pub intensity: Vec<f64>,
}

impl Curve {
    pub fn len(&self) -> usize {
        self.x_um.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x_um.is_empty()
    }

    pub fn max(&self) -> f64 {
        self.intensity.iter().copied().fold(0.0, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.intensity.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Scaled so the peak is 1. An all-zero curve is returned unchanged.
    pub fn normalized(&self) -> Curve {
        let peak = self.max();
        let scale = if peak > 0.0 { 1.0 / peak } else { 1.0 };
        Curve {
            x_um: self.x_um.clone(),
            intensity: self.intensity.iter().map(|v| v * scale).collect(),
        }
    }

    fn same_grid(&self, other: &Curve) -> bool {
        self.x_um.len() == other.x_um.len()
            && self.x_um.iter().zip(&other.x_um).all(|(a, b)| a == b)
    }
}

/// Intensity on the plate from the two branch outputs, in phase or in
/// antiphase, with unit amplitudes.
pub fn plate_pattern(g: &SlitGeometry, x_grid: &[f64], phase: PlatePhase) -> Curve {
    let sign = match phase {
        PlatePhase::Zero => 1.0,
        PlatePhase::Pi => -1.0,
    };
    let intensity = x_grid
        .iter()
        .map(|&y| {
            let (_, diff) = source_distances(g, y);
            (Complex64::new(1.0, 0.0) + sign * phasor(diff, g.lambda_um)).norm_sqr()
        })
        .collect();
    Curve {
        x_um: x_grid.to_vec(),
        intensity,
    }
}

/// Branch-output amplitudes for the four plotted subcases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FieldCase {
    IIa45,
    IIb45,
    IIa90,
    IIb90,
}

impl FieldCase {
    pub const ALL: [FieldCase; 4] = [Self::IIa45, Self::IIb45, Self::IIa90, Self::IIb90];

    pub fn alpha_deg(self) -> f64 {
        match self {
            Self::IIa45 | Self::IIb45 => 45.0,
            Self::IIa90 | Self::IIb90 => 90.0,
        }
    }

    pub fn subcase(self) -> Subcase {
        match self {
            Self::IIa45 | Self::IIa90 => Subcase::Transmitted,
            Self::IIb45 | Self::IIb90 => Subcase::Absorbed,
        }
    }

    pub fn amplitudes(self) -> PortAmplitudes {
        PortAmplitudes::after_measurement(self.alpha_deg(), self.subcase())
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::IIa45 => "IIa_45",
            Self::IIb45 => "IIb_45",
            Self::IIa90 => "IIa_90",
            Self::IIb90 => "IIb_90",
        }
    }
}

/// Complex field at each slit (bottom, centre, top), up to a common phase
/// per slit that the detector sum restores.
pub fn slit_fields(g: &SlitGeometry, amps: PortAmplitudes) -> [(f64, Complex64); 3] {
    g.slits().map(|y| {
        let (l1, diff) = source_distances(g, y);
        (l1, amps.bx1 + amps.bx2 * phasor(diff, g.lambda_um))
    })
}

fn detector_field(
    g: &SlitGeometry,
    fields: &[(f64, Complex64); 3],
    x_um: f64,
    delta_lambda_um: f64,
) -> Complex64 {
    g.slits()
        .iter()
        .zip(fields)
        .map(|(&y, &(l_in, f))| {
            let shift = if y == 0.0 { delta_lambda_um } else { 0.0 };
            let l_out = g.d2_um.hypot(x_um - y);
            f * phasor(l_in, g.lambda_um) * phasor(l_out, g.lambda_um) * phasor(-shift, g.lambda_um)
        })
        .sum()
}

/// Detector-plane intensity for arbitrary branch amplitudes.
pub fn detector_intensity(g: &SlitGeometry, amps: PortAmplitudes, x_um: f64, delta_lambda_um: f64) -> f64 {
    detector_field(g, &slit_fields(g, amps), x_um, delta_lambda_um).norm_sqr()
}

pub fn detector_scan_amplitudes(
    g: &SlitGeometry,
    amps: PortAmplitudes,
    x_grid: &[f64],
    delta_lambda_um: f64,
) -> Curve {
    let fields = slit_fields(g, amps);
    Curve {
        x_um: x_grid.to_vec(),
        intensity: x_grid
            .iter()
            .map(|&x| detector_field(g, &fields, x, delta_lambda_um).norm_sqr())
            .collect(),
    }
}

pub fn detector_scan(g: &SlitGeometry, case: FieldCase, x_grid: &[f64], delta_lambda_um: f64) -> Curve {
    detector_scan_amplitudes(g, case.amplitudes(), x_grid, delta_lambda_um)
}

/// Pointwise mean of two curves on the same grid.
pub fn averaged_scan(a: &Curve, b: &Curve) -> Result<Curve> {
    if !a.same_grid(b) {
        return Err(Error::GridMismatch);
    }
    Ok(Curve {
        x_um: a.x_um.clone(),
        intensity: a
            .intensity
            .iter()
            .zip(&b.intensity)
            .map(|(p, q)| 0.5 * (p + q))
            .collect(),
    })
}

pub fn linf_distance(a: &Curve, b: &Curve) -> Result<f64> {
    if !a.same_grid(b) {
        return Err(Error::GridMismatch);
    }
    Ok(a.intensity
        .iter()
        .zip(&b.intensity)
        .map(|(p, q)| (p - q).abs())
        .fold(0.0, f64::max))
}

/// Averaged detector curves for the 45° and 90° measurements plus the
/// individual subcase curves.
#[derive(Debug, Clone, Serialize)]
pub struct SlitScans {
    pub cases: Vec<(FieldCase, Curve)>,
    pub avg_45: Curve,
    pub avg_90: Curve,
}

pub fn slit_scans(g: &SlitGeometry, x_grid: &[f64], delta_lambda_um: f64) -> SlitScans {
    let cases: Vec<(FieldCase, Curve)> = FieldCase::ALL
        .iter()
        .map(|&c| (c, detector_scan(g, c, x_grid, delta_lambda_um)))
        .collect();
    let avg = |i: usize, j: usize| averaged_scan(&cases[i].1, &cases[j].1).expect("shared grid");
    SlitScans {
        avg_45: avg(0, 1),
        avg_90: avg(2, 3),
        cases,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn a6_offset_matches_paraxial_estimate() {
        let g = SlitGeometry::preset(Preset::A6);
        let paraxial = g.big_m() * g.lambda_um * g.d1_um / g.a_um;
        assert_relative_eq!(g.b_um, paraxial, max_relative = 1e-3);
        assert_abs_diff_eq!(g.b_um, 125.0, epsilon = 1e-3);
    }

    #[test]
    fn offset_condition_holds() {
        for p in [Preset::A6, Preset::A7] {
            let g = SlitGeometry::preset(p);
            let l = path_lengths(&g, 0.0);
            assert_abs_diff_eq!(l.l3 - l.l6, g.big_m() * g.lambda_um, epsilon = 1e-9);
        }
    }

    #[test]
    fn offset_rejects_long_wavelength() {
        assert!(slit_offset(5.0, 2.0, 100.0, 0).is_err());
        assert!(SlitGeometry::new(-1.0, 2.0, 3.0, 4.0, 0).is_err());
    }

    #[test]
    fn offset_shrinks_with_wavelength() {
        let b1 = slit_offset(1e-3, 2000.0, 1e6, 0).unwrap();
        let b2 = slit_offset(1e-6, 2000.0, 1e6, 0).unwrap();
        assert!(b2 < b1 && b2 < 1e-3);
    }

    #[test]
    fn on_axis_lengths() {
        let g = SlitGeometry::preset(Preset::A7);
        let p = path_lengths(&g, 0.0);
        assert_eq!(p.l7, p.l9);
        assert_eq!(p.l8, g.d2_um);
        assert_eq!(p.l1, p.l6);
        assert_eq!(p.l3, p.l4);
    }

    #[test]
    fn a7_effect() {
        let g = SlitGeometry::preset(Preset::A7);
        let r = phase_shifter_effect(&g, A7_DETECTOR_X_UM, 0.3, 0.0).unwrap();
        assert_abs_diff_eq!(r, 2.466990518, epsilon = 1e-6);
        let inv = phase_shifter_effect(&g, A7_DETECTOR_X_UM, 0.0, 0.3).unwrap();
        assert_abs_diff_eq!(inv, 1.0 / 2.466990518, epsilon = 1e-6);
        assert_eq!(phase_shifter_effect(&g, A7_DETECTOR_X_UM, 0.2, 0.2).unwrap(), 1.0);
    }

    #[test]
    fn full_wave_shift_is_invisible() {
        let g = SlitGeometry::preset(Preset::A7);
        for case in [Case90::A, Case90::B] {
            let a0 = snapshot_amplitude(&g, A7_DETECTOR_X_UM, 0.0, case);
            let a1 = snapshot_amplitude(&g, A7_DETECTOR_X_UM, g.lambda_um, case);
            assert_abs_diff_eq!(a0, a1, epsilon = 1e-9);
        }
    }

    #[test]
    fn plate_pattern_extremes() {
        let g = SlitGeometry::preset(Preset::A6);
        let pts = [0.0, g.b_um, -g.b_um];
        let zero = plate_pattern(&g, &pts, PlatePhase::Zero);
        let pi = plate_pattern(&g, &pts, PlatePhase::Pi);
        assert_abs_diff_eq!(zero.intensity[0], 4.0, epsilon = 1e-12);
        assert_abs_diff_eq!(pi.intensity[0], 0.0, epsilon = 1e-12);
        assert!(zero.intensity[1] < 1e-12 && zero.intensity[2] < 1e-12);
        assert_abs_diff_eq!(pi.intensity[1], 4.0, epsilon = 1e-12);
    }

    #[test]
    fn selected_slits_only() {
        let g = SlitGeometry::preset(Preset::A6);
        let a = slit_fields(&g, FieldCase::IIa45.amplitudes());
        let peak = a[1].1.norm();
        assert!(a[0].1.norm() < 1e-9 * peak && a[2].1.norm() < 1e-9 * peak);
        let b = slit_fields(&g, FieldCase::IIb45.amplitudes());
        assert!(b[1].1.norm() < 1e-9 * b[0].1.norm());
    }

    #[test]
    fn central_slit_curve_is_flat() {
        let g = SlitGeometry::preset(Preset::A6);
        let xs = g.default_detector_grid(201);
        let c = detector_scan(&g, FieldCase::IIa45, &xs, 0.0);
        assert!((c.max() - c.min()) / c.max() < 0.05);
    }

    #[test]
    fn averaging_checks_grid() {
        let a = Curve {
            x_um: vec![0.0, 1.0],
            intensity: vec![1.0, 3.0],
        };
        let b = Curve {
            x_um: vec![0.0, 2.0],
            intensity: vec![1.0, 3.0],
        };
        assert_eq!(averaged_scan(&a, &b), Err(Error::GridMismatch));
        assert_eq!(averaged_scan(&a, &a).unwrap().intensity, vec![1.0, 3.0]);
    }

    #[test]
    fn linspace_endpoints() {
        let v = linspace(-1.0, 1.0, 5);
        assert_eq!(v, vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
    }
}
