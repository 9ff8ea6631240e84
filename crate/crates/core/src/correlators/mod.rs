//! Leading-order density-matrix elements `P_j`, `C_jk`, `X_jk` per `λ̃²`.
//!
//! The fast path evaluates single-integral forms: a thermal Fermi term plus
//! image sums of [`singular_oscillatory`] integrals. [`oracle`] evaluates the
//! same elements from the regulated Wightman function by direct double
//! integration and is used to validate the fast path.

pub mod oracle;

use std::f64::consts::PI;
use std::fmt;

use log::warn;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{alpha_pair, alpha_single, BtzBackground, ImageBranch, PairGeometry, StaticDetector};
use crate::quadrature::{
    fermi_gaussian, image_sum, singular_oscillatory_with_branch, ImageRange, ImageSumControls,
    QuadratureControls, SingularIntegralSpec, SingularKind, BRANCH_SIGN,
};

/// Negative transition probabilities down to this size are rounding noise and
/// are clipped to zero.
pub const P_CLIP: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DetectorLabel {
    A,
    B,
    C,
}

impl DetectorLabel {
    pub const ALL: [DetectorLabel; 3] = [DetectorLabel::A, DetectorLabel::B, DetectorLabel::C];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }
}

impl fmt::Display for DetectorLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DetectorLabel::A => "A",
            DetectorLabel::B => "B",
            DetectorLabel::C => "C",
        };
        f.write_str(s)
    }
}

/// Unordered detector pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PairLabel {
    AB,
    AC,
    BC,
}

impl PairLabel {
    pub const ALL: [PairLabel; 3] = [PairLabel::AB, PairLabel::AC, PairLabel::BC];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn detectors(self) -> (DetectorLabel, DetectorLabel) {
        match self {
            PairLabel::AB => (DetectorLabel::A, DetectorLabel::B),
            PairLabel::AC => (DetectorLabel::A, DetectorLabel::C),
            PairLabel::BC => (DetectorLabel::B, DetectorLabel::C),
        }
    }

    /// Pair of two distinct detectors, in either order.
    pub fn of(j: DetectorLabel, k: DetectorLabel) -> Option<Self> {
        use DetectorLabel::*;
        match (j.min(k), j.max(k)) {
            (A, B) => Some(PairLabel::AB),
            (A, C) => Some(PairLabel::AC),
            (B, C) => Some(PairLabel::BC),
            _ => None,
        }
    }

    /// The detector not in this pair.
    pub fn complement(self) -> DetectorLabel {
        match self {
            PairLabel::AB => DetectorLabel::C,
            PairLabel::AC => DetectorLabel::B,
            PairLabel::BC => DetectorLabel::A,
        }
    }
}

impl fmt::Display for PairLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (j, k) = self.detectors();
        write!(f, "{j}{k}")
    }
}

/// Tolerances shared by every correlator integral.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Numerics {
    pub quadrature: QuadratureControls,
    pub images: ImageSumControls,
}

impl Numerics {
    pub fn validate(&self) -> Result<()> {
        self.quadrature.validate()?;
        self.images.validate()
    }
}

/// Two or three static detectors with a common gap around one black hole.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectorConfiguration {
    background: BtzBackground,
    detectors: Vec<StaticDetector>,
}

impl DetectorConfiguration {
    pub fn new(background: BtzBackground, detectors: Vec<StaticDetector>) -> Result<Self> {
        if !(2..=3).contains(&detectors.len()) {
            return Err(Error::invalid(format!(
                "need two or three detectors, got {}",
                detectors.len()
            )));
        }
        let gap = detectors[0].gap();
        if detectors.iter().any(|d| d.gap() != gap) {
            return Err(Error::invalid("all detectors must share one energy gap"));
        }
        Ok(Self { background, detectors })
    }

    pub fn background(&self) -> &BtzBackground {
        &self.background
    }

    pub fn detectors(&self) -> &[StaticDetector] {
        &self.detectors
    }

    pub fn len(&self) -> usize {
        self.detectors.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn gap(&self) -> f64 {
        self.detectors[0].gap()
    }

    pub fn labels(&self) -> &'static [DetectorLabel] {
        &DetectorLabel::ALL[..self.len()]
    }

    pub fn pairs(&self) -> &'static [PairLabel] {
        if self.len() == 3 {
            &PairLabel::ALL
        } else {
            &PairLabel::ALL[..1]
        }
    }

    pub fn detector(&self, label: DetectorLabel) -> Result<&StaticDetector> {
        self.detectors
            .get(label.index())
            .ok_or_else(|| Error::invalid(format!("configuration has no detector {label}")))
    }

    pub fn pair_geometry(&self, pair: PairLabel) -> Result<PairGeometry> {
        let (j, k) = pair.detectors();
        PairGeometry::new(&self.background, self.detector(j)?, self.detector(k)?)
    }
}

/// Work done for one element.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ElementDiagnostics {
    /// Image terms summed (each term is one or two integrals).
    pub image_terms: usize,
    /// Sum of the quadrature error estimates.
    pub quadrature_error: f64,
    pub evaluations: usize,
}

impl ElementDiagnostics {
    fn absorb(&mut self, other: &ElementDiagnostics) {
        self.image_terms += other.image_terms;
        self.quadrature_error += other.quadrature_error;
        self.evaluations += other.evaluations;
    }
}

/// The three pieces of `P_j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResponseTerms {
    /// Fermi–Dirac term of the `n = 0` direct image.
    pub thermal: f64,
    /// `n = 0` boundary-reflected image.
    pub boundary: f64,
    /// `n ≥ 1` images.
    pub images: f64,
    pub diagnostics: ElementDiagnostics,
}

impl ResponseTerms {
    pub fn total(&self) -> f64 {
        self.thermal + self.boundary + self.images
    }
}

/// Leading-order elements of one configuration, per `λ̃²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelatorSet {
    p: Vec<f64>,
    c: Vec<f64>,
    x: Vec<Complex64>,
    pub diagnostics: SetDiagnostics,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SetDiagnostics {
    pub p: Vec<ElementDiagnostics>,
    pub c: Vec<ElementDiagnostics>,
    pub x: Vec<ElementDiagnostics>,
    /// Detectors whose `P` was a tiny negative number clipped to zero.
    pub clipped: Vec<DetectorLabel>,
}

impl CorrelatorSet {
    /// Elements supplied directly: `p` per detector, `c` and `x` per pair in
    /// [`PairLabel::ALL`] order. Two detectors take one pair (AB).
    pub fn from_elements(p: Vec<f64>, c: Vec<f64>, x: Vec<Complex64>) -> Result<Self> {
        let pairs = match p.len() {
            2 => 1,
            3 => 3,
            n => return Err(Error::invalid(format!("need two or three P values, got {n}"))),
        };
        if c.len() != pairs || x.len() != pairs {
            return Err(Error::invalid(format!(
                "{} detectors need {pairs} C and X values",
                p.len()
            )));
        }
        if p.iter().chain(&c).any(|v| !v.is_finite()) || x.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("correlator elements must be finite"));
        }
        if let Some(bad) = p.iter().find(|&&v| v < 0.0) {
            return Err(Error::invalid(format!("transition probability {bad} is negative")));
        }
        Ok(Self {
            p,
            c,
            x,
            diagnostics: SetDiagnostics::default(),
        })
    }

    /// Three detectors with pairwise equal elements.
    pub fn equilateral(p: f64, c: f64, x: Complex64) -> Result<Self> {
        Self::from_elements(vec![p; 3], vec![c; 3], vec![x; 3])
    }

    /// Fast-path evaluation of every element.
    pub fn compute(cfg: &DetectorConfiguration, numerics: &Numerics) -> Result<Self> {
        Self::compute_with_branch(cfg, numerics, BRANCH_SIGN)
    }

    /// As [`compute`](Self::compute) with an explicit branch sign for the
    /// `x > α` continuation; used to calibrate that sign.
    pub fn compute_with_branch(
        cfg: &DetectorConfiguration,
        numerics: &Numerics,
        sign: f64,
    ) -> Result<Self> {
        numerics.validate()?;
        let mut set = CorrelatorSet {
            p: Vec::new(),
            c: Vec::new(),
            x: Vec::new(),
            diagnostics: SetDiagnostics::default(),
        };
        for &label in cfg.labels() {
            let terms = response_terms(cfg, label, numerics, sign)
                .map_err(|e| e.within(&format!("P_{label}")))?;
            let (value, clipped) = clip_probability(terms.total(), label)?;
            if clipped {
                set.diagnostics.clipped.push(label);
            }
            set.p.push(value);
            set.diagnostics.p.push(terms.diagnostics);
        }
        for &pair in cfg.pairs() {
            let (c, dc) = correlation_c(cfg, pair, numerics, sign)
                .map_err(|e| e.within(&format!("C_{pair}")))?;
            let (x, dx) = correlation_x(cfg, pair, numerics, sign)
                .map_err(|e| e.within(&format!("X_{pair}")))?;
            set.c.push(c);
            set.x.push(x);
            set.diagnostics.c.push(dc);
            set.diagnostics.x.push(dx);
        }
        Ok(set)
    }

    pub fn detector_count(&self) -> usize {
        self.p.len()
    }

    pub fn labels(&self) -> &'static [DetectorLabel] {
        &DetectorLabel::ALL[..self.p.len()]
    }

    pub fn pairs(&self) -> &'static [PairLabel] {
        &PairLabel::ALL[..self.c.len()]
    }

    /// `P_j`. Panics if `j` is not part of the set.
    pub fn p(&self, j: DetectorLabel) -> f64 {
        self.p[j.index()]
    }

    /// `C_jk`. Panics if the pair is not part of the set.
    pub fn c(&self, pair: PairLabel) -> f64 {
        self.c[pair.index()]
    }

    /// `X_jk`. Panics if the pair is not part of the set.
    pub fn x(&self, pair: PairLabel) -> Complex64 {
        self.x[pair.index()]
    }

    /// Restriction to the detectors of `pair`, relabelled as A and B.
    pub fn restrict(&self, pair: PairLabel) -> Result<CorrelatorSet> {
        let (j, k) = pair.detectors();
        if k.index() >= self.p.len() {
            return Err(Error::invalid(format!("set has no pair {pair}")));
        }
        CorrelatorSet::from_elements(
            vec![self.p(j), self.p(k)],
            vec![self.c(pair)],
            vec![self.x(pair)],
        )
    }

    /// Largest quadrature error estimate over all elements.
    pub fn max_quadrature_error(&self) -> f64 {
        let d = &self.diagnostics;
        d.p.iter()
            .chain(&d.c)
            .chain(&d.x)
            .map(|e| e.quadrature_error)
            .fold(0.0, f64::max)
    }
}

fn clip_probability(value: f64, label: DetectorLabel) -> Result<(f64, bool)> {
    if value >= 0.0 {
        Ok((value, false))
    } else if value >= -P_CLIP {
        warn!("P_{label} = {value:e} clipped to zero");
        Ok((0.0, true))
    } else {
        Err(Error::Convergence {
            context: format!("P_{label}"),
            detail: format!("transition probability came out negative ({value:e})"),
        })
    }
}

fn integral(
    alpha: f64,
    a: f64,
    beta: f64,
    kind: SingularKind,
    ctrl: &QuadratureControls,
    sign: f64,
    diag: &mut ElementDiagnostics,
) -> Result<Complex64> {
    let out = singular_oscillatory_with_branch(&SingularIntegralSpec::new(alpha, a, beta, kind), ctrl, sign)?;
    diag.quadrature_error += out.error;
    diag.evaluations += out.evaluations;
    Ok(out.value)
}

/// `P_j` split into its thermal, boundary and image parts.
pub fn response_terms(
    cfg: &DetectorConfiguration,
    which: DetectorLabel,
    numerics: &Numerics,
    sign: f64,
) -> Result<ResponseTerms> {
    let bg = cfg.background();
    let det = cfg.detector(which)?;
    let zeta = bg.zeta();
    let (a, beta) = (det.damping(bg), det.frequency(bg));
    let q = &numerics.quadrature;
    let kind = SingularKind::ExponentialRealPart;
    let norm = 1.0 / (2.0 * PI).sqrt();
    let mut diag = ElementDiagnostics::default();

    let thermal = 0.5 * fermi_gaussian(det.temperature(), det.gap(), 1.0, q)?;
    let boundary = if zeta != 0.0 {
        let alpha = alpha_single(det, bg, 0, ImageBranch::Plus)?;
        -zeta * 0.5 * norm * integral(alpha, a, beta, kind, q, sign, &mut diag)?.re
    } else {
        0.0
    };
    let mut term_diag = ElementDiagnostics::default();
    let images = image_sum(ImageRange::OneSided, &numerics.images, thermal + boundary, |n| {
        let minus = alpha_single(det, bg, n, ImageBranch::Minus)?;
        let mut t = integral(minus, a, beta, kind, q, sign, &mut term_diag)?.re;
        if zeta != 0.0 {
            let plus = alpha_single(det, bg, n, ImageBranch::Plus)?;
            t -= zeta * integral(plus, a, beta, kind, q, sign, &mut term_diag)?.re;
        }
        Ok(norm * t)
    })
    .map_err(|e| e.within("images"))?;
    diag.absorb(&term_diag);
    diag.image_terms = images.terms;
    Ok(ResponseTerms {
        thermal,
        boundary,
        images: images.sum,
        diagnostics: diag,
    })
}

/// Fast-path `P_j` per `λ̃²`.
pub fn transition_probability(
    cfg: &DetectorConfiguration,
    which: DetectorLabel,
    numerics: &Numerics,
) -> Result<f64> {
    let terms = response_terms(cfg, which, numerics, BRANCH_SIGN)?;
    Ok(clip_probability(terms.total(), which)?.0)
}

/// `Σ_{n∈ℤ} [I(α⁻_n) − ζ I(α⁺_n)]` for one pair.
fn pair_image_sum(
    cfg: &DetectorConfiguration,
    pg: &PairGeometry,
    beta: f64,
    kind: SingularKind,
    numerics: &Numerics,
    sign: f64,
) -> Result<(Complex64, ElementDiagnostics)> {
    let bg = cfg.background();
    let zeta = bg.zeta();
    let q = &numerics.quadrature;
    let mut diag = ElementDiagnostics::default();
    let out = image_sum(ImageRange::TwoSided, &numerics.images, 0.0, |n| {
        let minus = alpha_pair(pg, bg, n, ImageBranch::Minus)?;
        if minus == 0.0 {
            return Err(Error::domain("coincident detectors have no finite pair correlator"));
        }
        let mut t = integral(minus, pg.a_jk, beta, kind, q, sign, &mut diag)?;
        if zeta != 0.0 {
            let plus = alpha_pair(pg, bg, n, ImageBranch::Plus)?;
            t -= zeta * integral(plus, pg.a_jk, beta, kind, q, sign, &mut diag)?;
        }
        Ok(t)
    })?;
    diag.image_terms = out.terms;
    Ok((out.sum, diag))
}

fn correlation_c(
    cfg: &DetectorConfiguration,
    pair: PairLabel,
    numerics: &Numerics,
    sign: f64,
) -> Result<(f64, ElementDiagnostics)> {
    let pg = cfg.pair_geometry(pair)?;
    let (sum, diag) = pair_image_sum(
        cfg,
        &pg,
        pg.beta_plus,
        SingularKind::ExponentialRealPart,
        numerics,
        sign,
    )?;
    Ok((pg.k_minus * sum.re, diag))
}

fn correlation_x(
    cfg: &DetectorConfiguration,
    pair: PairLabel,
    numerics: &Numerics,
    sign: f64,
) -> Result<(Complex64, ElementDiagnostics)> {
    let pg = cfg.pair_geometry(pair)?;
    let (sum, diag) = pair_image_sum(cfg, &pg, pg.beta_minus, SingularKind::Cosine, numerics, sign)?;
    Ok((-pg.k_plus * sum, diag))
}

/// Fast-path `C_jk` per `λ̃²`.
pub fn pair_correlator_c(cfg: &DetectorConfiguration, pair: PairLabel, numerics: &Numerics) -> Result<f64> {
    Ok(correlation_c(cfg, pair, numerics, BRANCH_SIGN)?.0)
}

/// Fast-path `X_jk` per `λ̃²`.
pub fn pair_correlator_x(
    cfg: &DetectorConfiguration,
    pair: PairLabel,
    numerics: &Numerics,
) -> Result<Complex64> {
    Ok(correlation_x(cfg, pair, numerics, BRANCH_SIGN)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::rel_close;
    use std::f64::consts::TAU;

    fn triangle(mass: f64, d: f64, gap: f64) -> DetectorConfiguration {
        let bg = BtzBackground::dirichlet(10.0, mass).unwrap();
        let dets = (0..3)
            .map(|i| StaticDetector::at_horizon_distance(&bg, d, TAU * i as f64 / 3.0, gap).unwrap())
            .collect();
        DetectorConfiguration::new(bg, dets).unwrap()
    }

    fn two(bg: BtzBackground, d: (f64, f64), phi: (f64, f64)) -> DetectorConfiguration {
        let a = StaticDetector::at_horizon_distance(&bg, d.0, phi.0, 1.0).unwrap();
        let b = StaticDetector::at_horizon_distance(&bg, d.1, phi.1, 1.0).unwrap();
        DetectorConfiguration::new(bg, vec![a, b]).unwrap()
    }

    #[test]
    fn configuration_checks() {
        let bg = BtzBackground::dirichlet(10.0, 0.1).unwrap();
        let a = StaticDetector::at_horizon_distance(&bg, 1.0, 0.0, 1.0).unwrap();
        let b = StaticDetector::at_horizon_distance(&bg, 2.0, 0.0, 1.5).unwrap();
        assert!(DetectorConfiguration::new(bg, vec![a]).is_err());
        assert!(DetectorConfiguration::new(bg, vec![a, b]).is_err());
        assert!(DetectorConfiguration::new(bg, vec![a; 4]).is_err());
        let cfg = DetectorConfiguration::new(bg, vec![a, a]).unwrap();
        assert_eq!(cfg.pairs(), &[PairLabel::AB]);
        assert!(cfg.detector(DetectorLabel::C).is_err());
    }

    #[test]
    fn pair_labels_round_trip() {
        for pair in PairLabel::ALL {
            let (j, k) = pair.detectors();
            assert_eq!(PairLabel::of(k, j), Some(pair));
            assert_ne!(pair.complement(), j);
            assert_ne!(pair.complement(), k);
        }
        assert_eq!(PairLabel::of(DetectorLabel::B, DetectorLabel::B), None);
        assert_eq!(PairLabel::BC.to_string(), "BC");
    }

    #[test]
    fn equilateral_symmetry() {
        let cfg = triangle(0.01, 2.0, 1.0);
        let set = CorrelatorSet::compute(&cfg, &Numerics::default()).unwrap();
        let p = set.p(DetectorLabel::A);
        let (c, x) = (set.c(PairLabel::AB), set.x(PairLabel::AB));
        for label in DetectorLabel::ALL {
            assert!(rel_close(set.p(label), p, 1e-12, 0.0));
        }
        for pair in PairLabel::ALL {
            assert!(rel_close(set.c(pair), c, 1e-9, 0.0), "{pair}");
            assert!((set.x(pair) - x).norm() <= 1e-9 * x.norm(), "{pair}");
        }
        assert!(p > 0.0 && c.abs() > 0.0 && x.norm() > 0.0);
        assert!(set.diagnostics.clipped.is_empty());
    }

    #[test]
    fn pair_elements_are_symmetric_and_angle_shift_invariant() {
        let bg = BtzBackground::dirichlet(10.0, 0.1).unwrap();
        let numerics = Numerics::default();
        let fwd = two(bg, (1.0, 2.5), (0.3, 1.1));
        let rev = two(bg, (2.5, 1.0), (1.1, 0.3));
        let shifted = two(bg, (1.0, 2.5), (2.3, 3.1));
        let c = pair_correlator_c(&fwd, PairLabel::AB, &numerics).unwrap();
        let x = pair_correlator_x(&fwd, PairLabel::AB, &numerics).unwrap();
        for other in [&rev, &shifted] {
            let c2 = pair_correlator_c(other, PairLabel::AB, &numerics).unwrap();
            let x2 = pair_correlator_x(other, PairLabel::AB, &numerics).unwrap();
            assert!(rel_close(c, c2, 1e-9, 1e-15), "{c} {c2}");
            assert!((x - x2).norm() <= 1e-9 * x.norm());
        }
    }

    #[test]
    fn large_mass_suppresses_images() {
        let bg = BtzBackground::dirichlet(10.0, 100.0).unwrap();
        let cfg = two(bg, (1.0, 2.0), (0.0, 0.0));
        let terms = response_terms(&cfg, DetectorLabel::A, &Numerics::default(), BRANCH_SIGN).unwrap();
        assert!(terms.images.abs() < 1e-12, "{}", terms.images);
        assert!(terms.thermal > 0.0);
    }

    #[test]
    fn far_detector_sees_cold_vacuum_thermal_term() {
        // At d = 60 the local temperature is ~1e-4, so the thermal term is its
        // zero-temperature limit (√π/4) erfc(1).
        let bg = BtzBackground::dirichlet(10.0, 1.0).unwrap();
        let cfg = two(bg, (60.0, 61.0), (0.0, 0.0));
        let terms = response_terms(&cfg, DetectorLabel::A, &Numerics::default(), BRANCH_SIGN).unwrap();
        let expect = 0.25 * PI.sqrt() * libm::erfc(1.0);
        assert!(rel_close(terms.thermal, expect, 1e-6, 0.0), "{} {expect}", terms.thermal);
        assert!((expect - 0.06970).abs() < 1e-5);
    }

    // Reference values below come from the regulated double-integral oracle
    // (ε = 0.04, 0.02, 0.01, Richardson-extrapolated), error estimate < 1e-9.
    #[test]
    fn antipodal_pair_matches_oracle() {
        let bg = BtzBackground::dirichlet(10.0, 1.0).unwrap();
        let cfg = two(bg, (1.0, 1.0), (0.0, PI));
        let numerics = Numerics::default();
        let c = pair_correlator_c(&cfg, PairLabel::AB, &numerics).unwrap();
        let x = pair_correlator_x(&cfg, PairLabel::AB, &numerics).unwrap();
        assert!(rel_close(c, 6.5138147838e-4, 1e-6, 0.0), "{c}");
        assert!(rel_close(x.re, -6.5465253560e-4, 1e-6, 0.0), "{x}");
        let near = two(bg, (1.0, 1.0), (0.0, 0.3));
        assert!(c < 0.1 * pair_correlator_c(&near, PairLabel::AB, &numerics).unwrap());
    }

    #[test]
    fn distant_pair_matches_oracle() {
        let bg = BtzBackground::dirichlet(10.0, 1.0).unwrap();
        let cfg = two(bg, (1.0, 31.0), (0.0, 0.0));
        let numerics = Numerics::default();
        let x = pair_correlator_x(&cfg, PairLabel::AB, &numerics).unwrap();
        let c = pair_correlator_c(&cfg, PairLabel::AB, &numerics).unwrap();
        assert!((x - Complex64::new(-3.9303879111e-4, -3.4671708778e-5)).norm() < 1e-5 * x.norm(), "{x}");
        assert!(rel_close(c, 3.8060488465e-4, 1e-6, 0.0), "{c}");
        let closer = two(bg, (1.0, 11.0), (0.0, 0.0));
        assert!(x.norm() < pair_correlator_x(&closer, PairLabel::AB, &numerics).unwrap().norm());
    }

    #[test]
    fn probability_grows_towards_horizon() {
        let bg = BtzBackground::dirichlet(10.0, 0.01).unwrap();
        let numerics = Numerics::default();
        let p: Vec<f64> = [0.2, 0.5, 1.0, 2.0, 4.0]
            .iter()
            .map(|&d| {
                let cfg = two(bg, (d, d + 1.0), (0.0, 0.0));
                transition_probability(&cfg, DetectorLabel::A, &numerics).unwrap()
            })
            .collect();
        assert!(p.windows(2).all(|w| w[0] > w[1]), "{p:?}");
    }

    #[test]
    fn probability_ignores_angle() {
        let bg = BtzBackground::dirichlet(10.0, 0.05).unwrap();
        let numerics = Numerics::default();
        let p0 = transition_probability(&two(bg, (1.5, 2.0), (0.0, 0.0)), DetectorLabel::A, &numerics);
        let p1 = transition_probability(&two(bg, (1.5, 2.0), (2.0, 0.0)), DetectorLabel::A, &numerics);
        assert_eq!(p0.unwrap(), p1.unwrap());
    }

    #[test]
    fn coincident_pair_is_rejected() {
        let bg = BtzBackground::dirichlet(10.0, 1.0).unwrap();
        let cfg = two(bg, (1.0, 1.0), (0.5, 0.5));
        let err = pair_correlator_c(&cfg, PairLabel::AB, &Numerics::default()).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }

    #[test]
    fn clipping_rules() {
        assert_eq!(clip_probability(-1e-14, DetectorLabel::A).unwrap(), (0.0, true));
        assert_eq!(clip_probability(0.25, DetectorLabel::A).unwrap(), (0.25, false));
        assert!(clip_probability(-1e-9, DetectorLabel::A).unwrap_err().is_convergence());
    }

    #[test]
    fn restriction_relabels_pair() {
        let set = CorrelatorSet::from_elements(
            vec![0.1, 0.2, 0.3],
            vec![0.01, 0.02, 0.03],
            vec![Complex64::new(0.4, 0.0), Complex64::new(0.5, 0.1), Complex64::new(0.6, 0.0)],
        )
        .unwrap();
        let r = set.restrict(PairLabel::AC).unwrap();
        assert_eq!(r.p(DetectorLabel::A), 0.1);
        assert_eq!(r.p(DetectorLabel::B), 0.3);
        assert_eq!(r.c(PairLabel::AB), 0.02);
        assert_eq!(r.x(PairLabel::AB), Complex64::new(0.5, 0.1));
        assert!(CorrelatorSet::from_elements(vec![-0.1, 0.0], vec![0.0], vec![Complex64::default()]).is_err());
    }
}
