//! Sparse two-photon state vectors over polarization ⊗ path modes, and the
//! linear and projective optical elements that act on them.
//!
//! A polarization basis is identified by the angle of its "parallel" axis
//! measured from the local vertical. The parallel/perpendicular unit vectors
//! of the basis at angle θ are `(cos θ, sin θ)` and `(−sin θ, cos θ)`, so
//! expressing a mode of the basis θ₀ in the basis θ₁ (with `δ = θ₁ − θ₀`) gives
//!
//! ```text
//! ∥(θ₀) = cos δ · ∥(θ₁) − sin δ · ⊥(θ₁)
//! ⊥(θ₀) = sin δ · ∥(θ₁) + cos δ · ⊥(θ₁)
//! ```
//!
//! Angles are stored reduced to `[0, 180)`. Because `∥(θ + 180°) = −∥(θ)`,
//! the reduction carries a sign that is folded into the amplitude.

use std::cmp::Ordering;
use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

pub type Amplitude = Complex64;

/// Terms with `|amp|` below this are dropped during canonicalization.
pub const PRUNE_EPS: f64 = 1e-12;
/// Two polarization angles closer than this (degrees) denote the same axis.
pub const ANGLE_EPS_DEG: f64 = 1e-9;
/// Tolerance on `Σ|amp|² = 1` for states flagged normalized.
pub const NORM_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Particle {
    A,
    B,
}

/// Spatial branches of the apparatus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Path {
    SrcA,
    SrcB,
    B1,
    B2,
    Bc1,
    Bc2,
    Bx1,
    Bx2,
    Bx,
    Bx3,
    Bx4,
    Forward,
    Back,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum PolComponent {
    Parallel,
    Perpendicular,
}

/// A polarization state: one axis of the basis at `angle_deg`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PolLabel {
    angle_deg: f64,
    comp: PolComponent,
}

impl PolLabel {
    /// Reduces `angle_deg` into `[0, 180)` and returns the sign picked up by
    /// the reduction.
    pub fn with_sign(angle_deg: f64, comp: PolComponent) -> (Self, f64) {
        let mut angle = angle_deg.rem_euclid(360.0);
        let mut sign = 1.0;
        if angle >= 180.0 {
            angle -= 180.0;
            sign = -sign;
        }
        if 180.0 - angle < ANGLE_EPS_DEG {
            angle = 0.0;
            sign = -sign;
        }
        (Self { angle_deg: angle, comp }, sign)
    }

    /// Label with the angle reduced modulo 180°. The sign of the reduction is
    /// discarded; use [`PolLabel::with_sign`] when the input may lie outside
    /// `[0, 180)`.
    pub fn new(angle_deg: f64, comp: PolComponent) -> Self {
        Self::with_sign(angle_deg, comp).0
    }

    /// |↑⟩
    pub fn vertical() -> Self {
        Self::new(0.0, PolComponent::Parallel)
    }

    /// |→⟩
    pub fn horizontal() -> Self {
        Self::new(0.0, PolComponent::Perpendicular)
    }

    /// |↗⟩
    pub fn diagonal() -> Self {
        Self::new(45.0, PolComponent::Parallel)
    }

    /// |↖⟩
    pub fn antidiagonal() -> Self {
        Self::new(45.0, PolComponent::Perpendicular)
    }

    pub fn angle_deg(&self) -> f64 {
        self.angle_deg
    }

    pub fn comp(&self) -> PolComponent {
        self.comp
    }

    pub fn same_basis(&self, other: &Self) -> bool {
        (self.angle_deg - other.angle_deg).abs() < ANGLE_EPS_DEG
    }

    /// This label written in the basis at `basis_deg`, as two (label, coefficient) pairs.
    pub fn express_in(&self, basis_deg: f64) -> [(PolLabel, f64); 2] {
        let (s, c) = sin_cos_deg(basis_deg - self.angle_deg);
        let (par, sp) = PolLabel::with_sign(basis_deg, PolComponent::Parallel);
        let (perp, sq) = PolLabel::with_sign(basis_deg, PolComponent::Perpendicular);
        match self.comp {
            PolComponent::Parallel => [(par, c * sp), (perp, -s * sq)],
            PolComponent::Perpendicular => [(par, s * sp), (perp, c * sq)],
        }
    }

    fn order(&self, other: &Self) -> Ordering {
        if self.same_basis(other) {
            self.comp.cmp(&other.comp)
        } else {
            self.angle_deg.total_cmp(&other.angle_deg)
        }
    }
}

impl PartialEq for PolLabel {
    fn eq(&self, other: &Self) -> bool {
        self.comp == other.comp && self.same_basis(other)
    }
}

/// One photon's mode: which particle, which branch, which polarization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeLabel {
    pub particle: Particle,
    pub path: Path,
    pub pol: PolLabel,
}

impl ModeLabel {
    pub fn new(particle: Particle, path: Path, pol: PolLabel) -> Result<Self> {
        let ok = match particle {
            Particle::A => path == Path::SrcA,
            Particle::B => path != Path::SrcA,
        };
        if ok {
            Ok(Self { particle, path, pol })
        } else {
            Err(Error::InvalidMode { particle, path })
        }
    }

    pub fn a(pol: PolLabel) -> Self {
        Self {
            particle: Particle::A,
            path: Path::SrcA,
            pol,
        }
    }

    /// Particle B on `path`.
    ///
    /// # Panics
    /// Panics if `path` is [`Path::SrcA`].
    pub fn b(path: Path, pol: PolLabel) -> Self {
        Self::new(Particle::B, path, pol).expect("particle B never uses SrcA")
    }

    fn with_pol(self, pol: PolLabel) -> Self {
        Self { pol, ..self }
    }

    fn order(&self, other: &Self) -> Ordering {
        self.particle
            .cmp(&other.particle)
            .then(self.path.cmp(&other.path))
            .then_with(|| self.pol.order(&other.pol))
    }
}

/// Tensor-product basis ket with at most one mode per particle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Ket {
    a: Option<ModeLabel>,
    b: Option<ModeLabel>,
}

impl Ket {
    pub fn new(a: Option<ModeLabel>, b: Option<ModeLabel>) -> Result<Self> {
        if a.is_none() && b.is_none() {
            return Err(Error::EmptyKet);
        }
        for (m, want) in [(a, Particle::A), (b, Particle::B)] {
            if let Some(m) = m {
                if m.particle != want {
                    return Err(Error::InvalidMode {
                        particle: m.particle,
                        path: m.path,
                    });
                }
            }
        }
        Ok(Self { a, b })
    }

    pub fn pair(a_pol: PolLabel, b_path: Path, b_pol: PolLabel) -> Self {
        Self {
            a: Some(ModeLabel::a(a_pol)),
            b: Some(ModeLabel::b(b_path, b_pol)),
        }
    }

    pub fn single_b(path: Path, pol: PolLabel) -> Self {
        Self {
            a: None,
            b: Some(ModeLabel::b(path, pol)),
        }
    }

    pub fn mode(&self, particle: Particle) -> Option<&ModeLabel> {
        match particle {
            Particle::A => self.a.as_ref(),
            Particle::B => self.b.as_ref(),
        }
    }

    /// Modes in order, particle A first.
    pub fn modes(&self) -> impl Iterator<Item = &ModeLabel> {
        self.a.iter().chain(self.b.iter())
    }

    fn replace(&self, particle: Particle, mode: Option<ModeLabel>) -> Self {
        match particle {
            Particle::A => Self { a: mode, b: self.b },
            Particle::B => Self { a: self.a, b: mode },
        }
    }

    fn order(&self, other: &Self) -> Ordering {
        fn cmp_opt(x: &Option<ModeLabel>, y: &Option<ModeLabel>) -> Ordering {
            match (x, y) {
                (None, None) => Ordering::Equal,
                (None, Some(_)) => Ordering::Less,
                (Some(_), None) => Ordering::Greater,
                (Some(x), Some(y)) => x.order(y),
            }
        }
        cmp_opt(&self.a, &other.a).then_with(|| cmp_opt(&self.b, &other.b))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Normalization {
    Normalized,
    Unnormalized,
}

/// Sparse superposition of [`Ket`]s. Always kept canonical: no duplicate
/// kets, no amplitudes below [`PRUNE_EPS`], terms in a fixed order.
#[derive(Debug, Clone, Serialize)]
pub struct StateVector {
    terms: Vec<(Ket, Amplitude)>,
    normalization: Normalization,
}

impl StateVector {
    pub fn from_terms<I>(terms: I, normalization: Normalization) -> Self
    where
        I: IntoIterator<Item = (Ket, Amplitude)>,
    {
        let mut s = Self {
            terms: terms.into_iter().collect(),
            normalization,
        };
        s.canonicalize();
        s
    }

    pub fn from_real_terms<I>(terms: I, normalization: Normalization) -> Self
    where
        I: IntoIterator<Item = (Ket, f64)>,
    {
        Self::from_terms(
            terms.into_iter().map(|(k, a)| (k, Amplitude::new(a, 0.0))),
            normalization,
        )
    }

    pub fn empty() -> Self {
        Self {
            terms: Vec::new(),
            normalization: Normalization::Unnormalized,
        }
    }

    /// Merges duplicate kets, drops negligible terms and sorts.
    pub fn canonicalize(&mut self) {
        let mut merged: Vec<(Ket, Amplitude)> = Vec::with_capacity(self.terms.len());
        for (ket, amp) in self.terms.drain(..) {
            match merged.iter_mut().find(|(k, _)| *k == ket) {
                Some((_, acc)) => *acc += amp,
                None => merged.push((ket, amp)),
            }
        }
        merged.retain(|(_, a)| a.norm() >= PRUNE_EPS);
        merged.sort_by(|x, y| x.0.order(&y.0));
        self.terms = merged;
    }

    pub fn terms(&self) -> &[(Ket, Amplitude)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    pub fn norm_sqr(&self) -> f64 {
        self.terms.iter().map(|(_, a)| a.norm_sqr()).sum()
    }

    pub fn amplitude(&self, ket: &Ket) -> Amplitude {
        self.terms
            .iter()
            .find(|(k, _)| k == ket)
            .map(|(_, a)| *a)
            .unwrap_or_default()
    }

    /// Total probability of the terms whose ket satisfies `pred`.
    pub fn probability_where<F: Fn(&Ket) -> bool>(&self, pred: F) -> f64 {
        self.terms
            .iter()
            .filter(|(k, _)| pred(k))
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// Probability of finding particle B on any of `paths`.
    pub fn probability_on(&self, paths: &[Path]) -> f64 {
        self.probability_where(|k| {
            k.mode(Particle::B)
                .map(|m| paths.contains(&m.path))
                .unwrap_or(false)
        })
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm_sqr();
        if n < 1e-30 {
            return Err(Error::ZeroNorm);
        }
        let scale = 1.0 / n.sqrt();
        Ok(Self::from_terms(
            self.terms.iter().map(|(k, a)| (*k, a * scale)),
            Normalization::Normalized,
        ))
    }

    pub fn scaled(&self, factor: Amplitude) -> Self {
        Self::from_terms(
            self.terms.iter().map(|(k, a)| (*k, a * factor)),
            self.normalization,
        )
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &Self) -> Amplitude {
        self.terms
            .iter()
            .map(|(k, a)| a.conj() * other.amplitude(k))
            .sum()
    }

    /// Largest amplitude difference over the union of kets.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let lhs = self
            .terms
            .iter()
            .map(|(k, a)| (a - other.amplitude(k)).norm());
        let rhs = other
            .terms
            .iter()
            .map(|(k, a)| (a - self.amplitude(k)).norm());
        lhs.chain(rhs).fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }

    /// Equal after removing the global phase suggested by `⟨self|other⟩`,
    /// compared amplitude by amplitude.
    pub fn approx_eq_up_to_phase(&self, other: &Self, tol: f64) -> bool {
        let ip = self.inner(other);
        if ip.norm() < 1e-300 {
            return self.is_empty() && other.is_empty();
        }
        let phase = ip / ip.norm();
        self.scaled(phase).max_abs_diff(other) <= tol
    }

    /// Applies a linear map to every mode of `particle`. Kets without that
    /// particle pass through unchanged.
    fn map_particle<F>(&self, particle: Particle, f: F) -> Result<Self>
    where
        F: Fn(&ModeLabel) -> Result<Vec<(ModeLabel, Amplitude)>>,
    {
        let mut out = Vec::with_capacity(self.terms.len() * 2);
        for (ket, amp) in &self.terms {
            match ket.mode(particle) {
                Some(mode) => {
                    for (m, c) in f(mode)? {
                        out.push((ket.replace(particle, Some(m)), amp * c));
                    }
                }
                None => out.push((*ket, *amp)),
            }
        }
        Ok(Self::from_terms(out, self.normalization))
    }

    fn require_particle(&self, particle: Particle) -> Result<()> {
        if self.terms.iter().all(|(k, _)| k.mode(particle).is_some()) && !self.is_empty() {
            Ok(())
        } else {
            Err(Error::ParticleAbsent(particle))
        }
    }
}

/// `(1/√2)(|↑⟩_A|↑⟩_B + |→⟩_A|→⟩_B)` on the source paths.
pub fn bell_pair() -> StateVector {
    StateVector::from_real_terms(
        [
            (
                Ket::pair(PolLabel::vertical(), Path::SrcB, PolLabel::vertical()),
                FRAC_1_SQRT_2,
            ),
            (
                Ket::pair(PolLabel::horizontal(), Path::SrcB, PolLabel::horizontal()),
                FRAC_1_SQRT_2,
            ),
        ],
        Normalization::Normalized,
    )
}

fn express_mode(mode: &ModeLabel, basis_deg: f64) -> Vec<(ModeLabel, Amplitude)> {
    mode.pol
        .express_in(basis_deg)
        .into_iter()
        .map(|(pol, c)| (mode.with_pol(pol), Amplitude::new(c, 0.0)))
        .collect()
}

/// Re-expresses every mode of `particle` in a basis rotated by `theta_deg`
/// relative to the basis it is currently written in.
pub fn rotate_polarization_basis(s: &StateVector, particle: Particle, theta_deg: f64) -> StateVector {
    s.map_particle(particle, |m| Ok(express_mode(m, m.pol.angle_deg + theta_deg)))
        .expect("rotation is infallible")
}

/// Re-expresses every mode of `particle` in the basis at absolute angle `basis_deg`.
pub fn express_in_basis(s: &StateVector, particle: Particle, basis_deg: f64) -> StateVector {
    s.map_particle(particle, |m| Ok(express_mode(m, basis_deg)))
        .expect("basis change is infallible")
}

/// Polarizing beam splitter on branch B: vertical goes to `B2`, horizontal to
/// `B1`. Only modes on `SrcB` are touched and they must be written in the
/// 0° basis.
pub fn apply_bshv(s: &StateVector) -> Result<StateVector> {
    s.map_particle(Particle::B, |m| {
        if m.path != Path::SrcB {
            return Ok(vec![(*m, Amplitude::new(1.0, 0.0))]);
        }
        if m.pol.angle_deg().abs() >= ANGLE_EPS_DEG {
            return Err(Error::NotInComputationalBasis {
                path: m.path,
                angle_deg: m.pol.angle_deg(),
            });
        }
        let path = match m.pol.comp() {
            PolComponent::Parallel => Path::B2,
            PolComponent::Perpendicular => Path::B1,
        };
        Ok(vec![(
            ModeLabel { path, ..*m },
            Amplitude::new(1.0, 0.0),
        )])
    })
}

/// Linear polarizer on `target_paths`: the parallel component at
/// `pass_angle_deg` survives, the perpendicular one is absorbed. Returns the
/// renormalized state and the pass probability.
pub fn apply_polarizer(
    s: &StateVector,
    target_paths: &[Path],
    pass_angle_deg: f64,
) -> Result<(StateVector, f64)> {
    let before = s.norm_sqr();
    if before < 1e-30 {
        return Err(Error::ZeroNorm);
    }
    let mut kept = Vec::with_capacity(s.len() * 2);
    for (ket, amp) in s.terms() {
        let mut pieces = vec![(*ket, *amp)];
        for particle in [Particle::A, Particle::B] {
            pieces = pieces
                .into_iter()
                .flat_map(|(k, a)| match k.mode(particle) {
                    Some(m) if target_paths.contains(&m.path) => express_mode(m, pass_angle_deg)
                        .into_iter()
                        .filter(|(m, _)| m.pol.comp() == PolComponent::Parallel)
                        .map(|(m, c)| (k.replace(particle, Some(m)), a * c))
                        .collect::<Vec<_>>(),
                    _ => vec![(k, a)],
                })
                .collect();
        }
        kept.extend(pieces);
    }
    let survived = StateVector::from_terms(kept, Normalization::Unnormalized);
    let after = survived.norm_sqr();
    if after < 1e-15 {
        return Err(Error::FullyBlocked(after));
    }
    Ok((survived.normalized()?, after / before))
}

/// Outcome of the polarizer measurement on branch A.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Subcase {
    /// Photon A passes the polarizer (curve II.a).
    Transmitted,
    /// Photon A is absorbed (curve II.b).
    Absorbed,
}

impl Subcase {
    pub const BOTH: [Subcase; 2] = [Subcase::Transmitted, Subcase::Absorbed];
}

#[derive(Debug, Clone)]
pub struct MeasurementOutcome {
    pub label: Subcase,
    pub prob: f64,
    pub post_state: StateVector,
}

/// Polarizer at `alpha_deg` on branch A. The transmitted outcome keeps the
/// photon as `|∥⟩_α` on A; the absorbed outcome removes particle A.
pub fn measure_branch_a(s: &StateVector, alpha_deg: f64) -> Result<[MeasurementOutcome; 2]> {
    s.require_particle(Particle::A)?;
    let total = s.norm_sqr();
    let rotated = express_in_basis(s, Particle::A, alpha_deg);
    let mut transmitted = Vec::new();
    let mut absorbed = Vec::new();
    for (ket, amp) in rotated.terms() {
        let a = ket.mode(Particle::A).expect("checked above");
        match a.pol.comp() {
            PolComponent::Parallel => transmitted.push((*ket, *amp)),
            PolComponent::Perpendicular => {
                if ket.mode(Particle::B).is_none() {
                    return Err(Error::ParticleAbsent(Particle::B));
                }
                absorbed.push((ket.replace(Particle::A, None), *amp));
            }
        }
    }
    let finish = |label, terms: Vec<(Ket, Amplitude)>| -> Result<MeasurementOutcome> {
        let raw = StateVector::from_terms(terms, Normalization::Unnormalized);
        let prob = raw.norm_sqr() / total;
        let post_state = if prob < 1e-15 { raw } else { raw.normalized()? };
        Ok(MeasurementOutcome {
            label,
            prob,
            post_state,
        })
    };
    Ok([
        finish(Subcase::Transmitted, transmitted)?,
        finish(Subcase::Absorbed, absorbed)?,
    ])
}

/// Balanced beam splitter: each term on `in_path` becomes
/// `(1/√2)(|out_a⟩ + |out_b⟩)`.
pub fn apply_5050_splitter(s: &StateVector, in_path: Path, out_a: Path, out_b: Path) -> StateVector {
    let h = Amplitude::new(FRAC_1_SQRT_2, 0.0);
    let mut out = Vec::with_capacity(s.len() * 2);
    for (ket, amp) in s.terms() {
        let mut hit = false;
        for particle in [Particle::A, Particle::B] {
            if let Some(m) = ket.mode(particle) {
                if m.path == in_path {
                    hit = true;
                    for path in [out_a, out_b] {
                        let mode = ModeLabel { path, ..*m };
                        out.push((ket.replace(particle, Some(mode)), amp * h));
                    }
                }
            }
        }
        if !hit {
            out.push((*ket, *amp));
        }
    }
    StateVector::from_terms(out, s.normalization())
}

/// Single output port of a combiner that scales the `in_a` / `in_b`
/// amplitudes by `w_a` / `w_b` and joins them with a relative π phase:
/// `out = (w_b·amp_b − w_a·amp_a)/√2`. The complementary port is not
/// modeled, so the result is flagged unnormalized.
pub fn apply_weighted_combiner(
    s: &StateVector,
    in_a: Path,
    in_b: Path,
    out: Path,
    w_a: Amplitude,
    w_b: Amplitude,
) -> Result<StateVector> {
    let mut basis: Option<PolLabel> = None;
    for (ket, _) in s.terms() {
        if let Some(m) = ket.mode(Particle::B) {
            if m.path == in_a || m.path == in_b {
                match basis {
                    None => basis = Some(m.pol),
                    Some(b) if !b.same_basis(&m.pol) => {
                        return Err(Error::BasisMismatch(b.angle_deg(), m.pol.angle_deg()))
                    }
                    Some(_) => {}
                }
            }
        }
    }
    let h = FRAC_1_SQRT_2;
    let mut terms = Vec::with_capacity(s.len());
    for (ket, amp) in s.terms() {
        match ket.mode(Particle::B) {
            Some(m) if m.path == in_a || m.path == in_b => {
                let w = if m.path == in_b { w_b * h } else { -w_a * h };
                let mode = ModeLabel { path: out, ..*m };
                terms.push((ket.replace(Particle::B, Some(mode)), amp * w));
            }
            _ => terms.push((*ket, *amp)),
        }
    }
    Ok(StateVector::from_terms(terms, Normalization::Unnormalized))
}

/// π phase-shift beam splitter read at one output:
/// `out = (amp_in_b − amp_in_a)/√2`.
pub fn apply_pi_combiner(s: &StateVector, in_a: Path, in_b: Path, out: Path) -> Result<StateVector> {
    let one = Amplitude::new(1.0, 0.0);
    apply_weighted_combiner(s, in_a, in_b, out, one, one)
}

/// Coefficients of the particle-A ⊗ particle-B bipartition and the
/// determinant `ru − st`.
#[derive(Debug, Clone, Serialize)]
pub struct EntanglementReport {
    pub r: Amplitude,
    pub s: Amplitude,
    pub t: Amplitude,
    pub u: Amplitude,
    pub det: Amplitude,
    pub entangled: bool,
}

/// 2×2 product-basis criterion: the state is entangled iff `|ru − st| > 1e-9`,
/// with rows indexed by particle-A modes and columns by particle-B modes.
pub fn is_entangled(s: &StateVector) -> Result<EntanglementReport> {
    s.require_particle(Particle::A)?;
    s.require_particle(Particle::B)?;
    let mut rows: Vec<ModeLabel> = Vec::new();
    let mut cols: Vec<ModeLabel> = Vec::new();
    for (ket, _) in s.terms() {
        let a = *ket.mode(Particle::A).expect("checked");
        let b = *ket.mode(Particle::B).expect("checked");
        if !rows.contains(&a) {
            rows.push(a);
        }
        if !cols.contains(&b) {
            cols.push(b);
        }
    }
    for (particle, n) in [(Particle::A, rows.len()), (Particle::B, cols.len())] {
        if n > 2 {
            return Err(Error::TooManyModes { particle, count: n });
        }
    }
    rows.sort_by(|x, y| x.order(y));
    cols.sort_by(|x, y| x.order(y));
    let coeff = |i: usize, j: usize| -> Amplitude {
        match (rows.get(i), cols.get(j)) {
            (Some(a), Some(b)) => s.amplitude(&Ket {
                a: Some(*a),
                b: Some(*b),
            }),
            _ => Amplitude::default(),
        }
    };
    let (r, s_, t, u) = (coeff(0, 0), coeff(0, 1), coeff(1, 0), coeff(1, 1));
    let det = r * u - s_ * t;
    Ok(EntanglementReport {
        r,
        s: s_,
        t,
        u,
        det,
        entangled: det.norm() > 1e-9,
    })
}

/// Single-photon spatial state on the two gate inputs, in the simplified
/// notation where polarization is aligned and particle A is dropped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PortAmplitudes {
    pub bx1: Amplitude,
    pub bx2: Amplitude,
}

impl PortAmplitudes {
    pub fn real(bx1: f64, bx2: f64) -> Self {
        Self {
            bx1: Amplitude::new(bx1, 0.0),
            bx2: Amplitude::new(bx2, 0.0),
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.bx1.norm_sqr() + self.bx2.norm_sqr()
    }

    /// Branch-B photon entering the gate after a polarizer measurement at
    /// `alpha_deg` on A: `(sin α, cos α)` when transmitted, `(cos α, −sin α)`
    /// when absorbed.
    pub fn after_measurement(alpha_deg: f64, subcase: Subcase) -> Self {
        let (s, c) = sin_cos_deg(alpha_deg);
        match subcase {
            Subcase::Transmitted => Self::real(s, c),
            Subcase::Absorbed => Self::real(c, -s),
        }
    }

    /// Reads the amplitudes of a single-photon state on `Bx1`/`Bx2`.
    pub fn from_state(s: &StateVector) -> Self {
        let mut out = Self::real(0.0, 0.0);
        for (ket, amp) in s.terms() {
            if let Some(m) = ket.mode(Particle::B) {
                match m.path {
                    Path::Bx1 => out.bx1 += amp,
                    Path::Bx2 => out.bx2 += amp,
                    _ => {}
                }
            }
        }
        out
    }
}

/// `sin`/`cos` of an angle in degrees, exact at multiples of 90°.
pub fn sin_cos_deg(deg: f64) -> (f64, f64) {
    let r = deg.rem_euclid(360.0);
    if r == 0.0 {
        (0.0, 1.0)
    } else if r == 90.0 {
        (1.0, 0.0)
    } else if r == 180.0 {
        (0.0, -1.0)
    } else if r == 270.0 {
        (-1.0, 0.0)
    } else {
        deg.to_radians().sin_cos()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_1_SQRT_2 as H;

    fn b2(pol: PolLabel) -> ModeLabel {
        ModeLabel::b(Path::B2, pol)
    }

    fn eq1() -> StateVector {
        apply_bshv(&bell_pair()).unwrap()
    }

    #[test]
    fn bell_pair_has_two_equal_terms() {
        let s = bell_pair();
        assert_eq!(s.len(), 2);
        for (_, a) in s.terms() {
            assert_abs_diff_eq!(a.re, H, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(s.norm_sqr(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn zero_rotation_is_identity() {
        let s = bell_pair();
        let r = rotate_polarization_basis(&s, Particle::A, 0.0);
        assert!(r.approx_eq(&s, 0.0));
    }

    #[test]
    fn rotated_bell_pair_has_no_cross_terms() {
        let s = rotate_polarization_basis(&bell_pair(), Particle::A, 37.0);
        let s = rotate_polarization_basis(&s, Particle::B, 37.0);
        let par = PolLabel::new(37.0, PolComponent::Parallel);
        let perp = PolLabel::new(37.0, PolComponent::Perpendicular);
        assert!(s.amplitude(&Ket::pair(par, Path::SrcB, perp)).norm() < 1e-12);
        assert!(s.amplitude(&Ket::pair(perp, Path::SrcB, par)).norm() < 1e-12);
        assert_abs_diff_eq!(s.amplitude(&Ket::pair(par, Path::SrcB, par)).re, H, epsilon = 1e-12);
        assert_abs_diff_eq!(s.amplitude(&Ket::pair(perp, Path::SrcB, perp)).re, H, epsilon = 1e-12);
    }

    #[test]
    fn vertical_in_diagonal_basis() {
        let s = StateVector::from_real_terms(
            [(Ket::single_b(Path::SrcB, PolLabel::vertical()), 1.0)],
            Normalization::Normalized,
        );
        let r = rotate_polarization_basis(&s, Particle::B, 45.0);
        let d = r.amplitude(&Ket::single_b(Path::SrcB, PolLabel::diagonal()));
        let ad = r.amplitude(&Ket::single_b(Path::SrcB, PolLabel::antidiagonal()));
        assert_abs_diff_eq!(d.re, H, epsilon = 1e-15);
        assert_abs_diff_eq!(ad.re, -H, epsilon = 1e-15);
    }

    #[test]
    fn rotation_past_180_folds_sign() {
        let (label, sign) = PolLabel::with_sign(200.0, PolComponent::Parallel);
        assert_abs_diff_eq!(label.angle_deg(), 20.0, epsilon = 1e-12);
        assert_eq!(sign, -1.0);
        let (label, sign) = PolLabel::with_sign(180.0 - 1e-12, PolComponent::Parallel);
        assert_eq!(label.angle_deg(), 0.0);
        assert_eq!(sign, -1.0);
        // the 180° basis is the 0° basis with both axes negated, so the
        // vector itself comes back unchanged
        let s = StateVector::from_real_terms(
            [(Ket::single_b(Path::SrcB, PolLabel::vertical()), 1.0)],
            Normalization::Normalized,
        );
        let r = rotate_polarization_basis(&s, Particle::B, 180.0);
        assert_abs_diff_eq!(
            r.amplitude(&Ket::single_b(Path::SrcB, PolLabel::vertical())).re,
            1.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn polarization_labels_compare_with_tolerance() {
        let a = PolLabel::new(30.0, PolComponent::Parallel);
        let b = PolLabel::new(30.0 + 5e-10, PolComponent::Parallel);
        let c = PolLabel::new(30.0 + 5e-9, PolComponent::Parallel);
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(a, PolLabel::new(30.0, PolComponent::Perpendicular));
    }

    #[test]
    fn invalid_modes_are_rejected() {
        assert!(ModeLabel::new(Particle::A, Path::B1, PolLabel::vertical()).is_err());
        assert!(ModeLabel::new(Particle::B, Path::SrcA, PolLabel::vertical()).is_err());
        assert_eq!(Ket::new(None, None), Err(Error::EmptyKet));
        let b = ModeLabel::b(Path::B1, PolLabel::vertical());
        assert!(Ket::new(Some(b), None).is_err());
    }

    #[test]
    fn bshv_maps_bell_pair_to_split_branches() {
        let s = eq1();
        assert_eq!(s.len(), 2);
        let v = s.amplitude(&Ket::pair(PolLabel::vertical(), Path::B2, PolLabel::vertical()));
        let h = s.amplitude(&Ket::pair(PolLabel::horizontal(), Path::B1, PolLabel::horizontal()));
        assert_abs_diff_eq!(v.re, H, epsilon = 1e-15);
        assert_abs_diff_eq!(h.re, H, epsilon = 1e-15);
    }

    #[test]
    fn bshv_sends_vertical_photon_to_b2() {
        let s = StateVector::from_real_terms(
            [(Ket::single_b(Path::SrcB, PolLabel::vertical()), 1.0)],
            Normalization::Normalized,
        );
        let out = apply_bshv(&s).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out.amplitude(&Ket::single_b(Path::B2, PolLabel::vertical())).re, 1.0);
    }

    #[test]
    fn bshv_rejects_rotated_input() {
        let s = rotate_polarization_basis(&bell_pair(), Particle::B, 10.0);
        assert!(matches!(
            apply_bshv(&s),
            Err(Error::NotInComputationalBasis { path: Path::SrcB, .. })
        ));
    }

    #[test]
    fn diagonal_polarizers_on_eq1() {
        let (s, p) = apply_polarizer(&eq1(), &[Path::B1, Path::B2], 45.0).unwrap();
        assert_abs_diff_eq!(p, 0.5, epsilon = 1e-12);
        // written with A in the 45° basis the state has four ±1/2 terms
        let s = express_in_basis(&s, Particle::A, 45.0);
        assert_eq!(s.len(), 4);
        for (_, a) in s.terms() {
            assert_abs_diff_eq!(a.norm(), 0.5, epsilon = 1e-12);
        }
        let d = PolLabel::diagonal();
        let ad = PolLabel::antidiagonal();
        assert_abs_diff_eq!(s.amplitude(&Ket::pair(d, Path::B1, d)).re, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(s.amplitude(&Ket::pair(d, Path::B2, d)).re, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(s.amplitude(&Ket::pair(ad, Path::B1, d)).re, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(s.amplitude(&Ket::pair(ad, Path::B2, d)).re, -0.5, epsilon = 1e-12);
    }

    #[test]
    fn polarizer_passes_aligned_photon() {
        let s = StateVector::from_real_terms(
            [(Ket::single_b(Path::B1, PolLabel::diagonal()), 1.0)],
            Normalization::Normalized,
        );
        let (out, p) = apply_polarizer(&s, &[Path::B1], 45.0).unwrap();
        assert_abs_diff_eq!(p, 1.0, epsilon = 1e-15);
        assert!(out.approx_eq(&s, 1e-15));
    }

    #[test]
    fn polarizer_blocking_everything_is_an_error() {
        let s = StateVector::from_real_terms(
            [(Ket::single_b(Path::B1, PolLabel::horizontal()), 1.0)],
            Normalization::Normalized,
        );
        assert!(matches!(
            apply_polarizer(&s, &[Path::B1], 0.0),
            Err(Error::FullyBlocked(_))
        ));
    }

    #[test]
    fn measurement_outcomes_match_closed_forms() {
        let alpha = 30.0_f64;
        let (sa, ca) = alpha.to_radians().sin_cos();
        let [t, a] = measure_branch_a(&eq1(), alpha).unwrap();
        assert_abs_diff_eq!(t.prob, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(a.prob, 0.5, epsilon = 1e-12);
        let pa = PolLabel::new(alpha, PolComponent::Parallel);
        let expected_t = StateVector::from_real_terms(
            [
                (Ket::pair(pa, Path::B2, PolLabel::vertical()), ca),
                (Ket::pair(pa, Path::B1, PolLabel::horizontal()), sa),
            ],
            Normalization::Normalized,
        );
        let expected_a = StateVector::from_real_terms(
            [
                (Ket::single_b(Path::B2, PolLabel::vertical()), -sa),
                (Ket::single_b(Path::B1, PolLabel::horizontal()), ca),
            ],
            Normalization::Normalized,
        );
        assert!(t.post_state.approx_eq(&expected_t, 1e-12));
        assert!(a.post_state.approx_eq(&expected_a, 1e-12));
    }

    #[test]
    fn measurement_at_right_angles() {
        let [t, a] = measure_branch_a(&eq1(), 90.0).unwrap();
        let pa = PolLabel::new(90.0, PolComponent::Parallel);
        assert_eq!(t.post_state.len(), 1);
        assert_abs_diff_eq!(
            t.post_state
                .amplitude(&Ket::pair(pa, Path::B1, PolLabel::horizontal()))
                .re,
            1.0,
            epsilon = 1e-12
        );
        assert_eq!(a.post_state.len(), 1);
        assert_abs_diff_eq!(
            a.post_state
                .amplitude(&Ket::single_b(Path::B2, PolLabel::vertical()))
                .re,
            -1.0,
            epsilon = 1e-12
        );
        let [t0, _] = measure_branch_a(&eq1(), 0.0).unwrap();
        let p0 = PolLabel::vertical();
        assert_eq!(
            t0.post_state.amplitude(&Ket::pair(p0, Path::B2, p0)).re,
            1.0
        );
        assert_eq!(t0.post_state.len(), 1);
    }

    #[test]
    fn measurement_needs_particle_a() {
        let s = StateVector::from_real_terms(
            [(Ket::single_b(Path::B1, PolLabel::vertical()), 1.0)],
            Normalization::Normalized,
        );
        assert_eq!(
            measure_branch_a(&s, 10.0).unwrap_err(),
            Error::ParticleAbsent(Particle::A)
        );
    }

    #[test]
    fn splitter_on_empty_path_is_identity() {
        let s = eq1();
        let out = apply_5050_splitter(&s, Path::Bc1, Path::Bx3, Path::Bx4);
        assert!(out.approx_eq(&s, 0.0));
    }

    #[test]
    fn splitter_halves_amplitudes() {
        let (s, _) = apply_polarizer(&eq1(), &[Path::B1, Path::B2], 45.0).unwrap();
        let s = express_in_basis(&s, Particle::A, 45.0);
        let s = apply_5050_splitter(&s, Path::B1, Path::Bc1, Path::Bx1);
        let s = apply_5050_splitter(&s, Path::B2, Path::Bc2, Path::Bx2);
        assert_eq!(s.len(), 8);
        for (_, a) in s.terms() {
            assert_abs_diff_eq!(a.norm(), 1.0 / (2.0 * 2f64.sqrt()), epsilon = 1e-12);
        }
        assert_abs_diff_eq!(s.norm_sqr(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn combiner_cancels_equal_inputs() {
        let d = PolLabel::diagonal();
        let s = StateVector::from_real_terms(
            [
                (Ket::single_b(Path::Bx1, d), H),
                (Ket::single_b(Path::Bx2, d), H),
            ],
            Normalization::Normalized,
        );
        let out = apply_pi_combiner(&s, Path::Bx1, Path::Bx2, Path::Bx).unwrap();
        assert!(out.is_empty());
        assert_eq!(out.normalization(), Normalization::Unnormalized);
    }

    #[test]
    fn combiner_rejects_mixed_bases() {
        let s = StateVector::from_real_terms(
            [
                (Ket::single_b(Path::Bx1, PolLabel::diagonal()), H),
                (Ket::single_b(Path::Bx2, PolLabel::vertical()), H),
            ],
            Normalization::Normalized,
        );
        assert!(matches!(
            apply_pi_combiner(&s, Path::Bx1, Path::Bx2, Path::Bx),
            Err(Error::BasisMismatch(..))
        ));
    }

    #[test]
    fn entanglement_of_bell_and_product_states() {
        let bell = is_entangled(&bell_pair()).unwrap();
        assert!(bell.entangled);
        assert_abs_diff_eq!(bell.det.re, 0.5, epsilon = 1e-15);
        let product = StateVector::from_real_terms(
            [(Ket::pair(PolLabel::vertical(), Path::SrcB, PolLabel::vertical()), 1.0)],
            Normalization::Normalized,
        );
        let r = is_entangled(&product).unwrap();
        assert!(!r.entangled);
        assert_eq!(r.det.norm(), 0.0);
    }

    #[test]
    fn entanglement_after_diagonal_polarizers() {
        // The four ±1/2 coefficients do not satisfy ru = st.
        let (s, _) = apply_polarizer(&eq1(), &[Path::B1, Path::B2], 45.0).unwrap();
        let s = express_in_basis(&s, Particle::A, 45.0);
        let r = is_entangled(&s).unwrap();
        assert_abs_diff_eq!(r.det.norm(), 0.5, epsilon = 1e-12);
        assert!(r.entangled);
    }

    #[test]
    fn entanglement_rejects_wide_supports() {
        let s = StateVector::from_real_terms(
            [
                (Ket::pair(PolLabel::vertical(), Path::B1, PolLabel::vertical()), 0.5),
                (Ket::pair(PolLabel::vertical(), Path::B2, PolLabel::vertical()), 0.5),
                (Ket::pair(PolLabel::vertical(), Path::Bc1, PolLabel::vertical()), 0.5),
                (Ket::pair(PolLabel::horizontal(), Path::B1, PolLabel::vertical()), 0.5),
            ],
            Normalization::Normalized,
        );
        assert!(matches!(
            is_entangled(&s),
            Err(Error::TooManyModes { particle: Particle::B, count: 3 })
        ));
    }

    #[test]
    fn canonicalization_merges_and_prunes() {
        let k = Ket::single_b(Path::B1, PolLabel::vertical());
        let k2 = Ket::single_b(Path::B2, PolLabel::vertical());
        let s = StateVector::from_real_terms(
            [(k, 0.25), (k2, 1e-14), (k, 0.25)],
            Normalization::Unnormalized,
        );
        assert_eq!(s.len(), 1);
        assert_eq!(s.amplitude(&k).re, 0.5);
        let mut again = s.clone();
        again.canonicalize();
        assert!(again.approx_eq(&s, 0.0));
        let _ = b2(PolLabel::vertical());
    }

    #[test]
    fn global_phase_is_ignored() {
        let s = eq1();
        let rotated = s.scaled(Amplitude::from_polar(1.0, 1.234));
        assert!(!rotated.approx_eq(&s, 1e-6));
        assert!(rotated.approx_eq_up_to_phase(&s, 1e-12));
    }

    #[test]
    fn port_amplitudes_after_measurement() {
        let p = PortAmplitudes::after_measurement(90.0, Subcase::Transmitted);
        assert_eq!((p.bx1.re, p.bx2.re), (1.0, 0.0));
        let p = PortAmplitudes::after_measurement(90.0, Subcase::Absorbed);
        assert_eq!((p.bx1.re, p.bx2.re), (0.0, -1.0));
    }
}
