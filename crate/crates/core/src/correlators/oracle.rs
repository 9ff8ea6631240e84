//! Brute-force elements from the regulated Wightman function.
//!
//! Each element is a double integral over the two proper times. With
//! `Δt = τ_j/γ_j − τ_k/γ_k` as outer variable the Wightman factor depends on
//! `Δt` alone, and the inner integral over `τ_j` only involves the switching
//! Gaussians and phases. The outer integral is adaptive Gauss–Kronrod with
//! breakpoints at the near-singular light-cone crossings, the inner one a fixed
//! Gauss–Legendre rule. Values at a geometric sequence of `ε` are extrapolated
//! to `ε → 0` by Richardson's scheme: the regulated integral is analytic in `ε`
//! (the contour can be pushed off the real `Δt` axis), so the error expands in
//! integer powers of `ε`.
//!
//! Nothing here shares code with the fast path beyond the detector kinematics.

use std::collections::BinaryHeap;
use std::f64::consts::{PI, TAU};
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{CorrelatorSet, DetectorConfiguration, DetectorLabel, PairLabel};
use crate::error::{Error, Result};
use crate::geometry::{BtzBackground, StaticDetector};

/// Element to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OracleTarget {
    P(DetectorLabel),
    C(PairLabel),
    X(PairLabel),
}

impl std::fmt::Display for OracleTarget {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OracleTarget::P(j) => write!(f, "P_{j}"),
            OracleTarget::C(p) => write!(f, "C_{p}"),
            OracleTarget::X(p) => write!(f, "X_{p}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleSettings {
    /// Geometric, decreasing.
    pub epsilons: Vec<f64>,
    pub tol_rel: f64,
    pub tol_abs: f64,
    pub max_intervals: usize,
    /// Gauss–Legendre order of the inner integral.
    pub inner_nodes: usize,
    /// Relative tolerance of the Wightman image sum.
    pub image_tol: f64,
    pub image_cap: u64,
}

impl Default for OracleSettings {
    fn default() -> Self {
        Self {
            epsilons: vec![0.04, 0.02, 0.01],
            tol_rel: 1e-9,
            tol_abs: 1e-13,
            max_intervals: 20_000,
            inner_nodes: 64,
            image_tol: 1e-14,
            image_cap: 100_000,
        }
    }
}

impl OracleSettings {
    /// Checks the settings and returns the ratio between successive epsilons.
    pub fn validate(&self) -> Result<f64> {
        if self.epsilons.len() < 2 {
            return Err(Error::invalid("oracle needs at least two epsilons"));
        }
        if self.epsilons.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
            return Err(Error::invalid("oracle epsilons must be positive"));
        }
        let ratio = self.epsilons[0] / self.epsilons[1];
        if !(ratio > 1.0) {
            return Err(Error::invalid("oracle epsilons must decrease"));
        }
        for w in self.epsilons.windows(2) {
            if ((w[0] / w[1]) / ratio - 1.0).abs() > 1e-9 {
                return Err(Error::invalid("oracle epsilons must form a geometric sequence"));
            }
        }
        if self.inner_nodes < 8 {
            return Err(Error::invalid("inner rule needs at least 8 nodes"));
        }
        Ok(ratio)
    }
}

/// Extrapolated value with the data it came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleEstimate {
    pub target: OracleTarget,
    pub value: Complex64,
    /// Estimated error: the change between the last two Richardson levels.
    pub error: f64,
    pub epsilons: Vec<f64>,
    pub raw: Vec<Complex64>,
    /// Richardson table, one row per level (row 0 is `raw`).
    pub table: Vec<Vec<Complex64>>,
}

/// `W_BTZ(x, x')` between two static points at finite `ε`.
#[derive(Debug, Clone, Copy)]
pub struct WightmanEvaluator {
    bg: BtzBackground,
    epsilon: f64,
    image_tol: f64,
    image_cap: u64,
}

impl WightmanEvaluator {
    pub fn new(bg: BtzBackground, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::invalid(format!("regulator must be positive, got {epsilon}")));
        }
        Ok(Self {
            bg,
            epsilon,
            image_tol: 1e-14,
            image_cap: 100_000,
        })
    }

    pub fn with_images(mut self, tol: f64, cap: u64) -> Self {
        self.image_tol = tol;
        self.image_cap = cap;
        self
    }

    /// Points at radii `r`, `r2` separated by `Δt` and `Δφ`.
    pub fn evaluate(&self, r: f64, r2: f64, delta_t: f64, delta_phi: f64) -> Result<Complex64> {
        let r_h = self.bg.horizon_radius();
        let ell = self.bg.ell();
        let zeta = self.bg.zeta();
        let radial = r * r2 / (r_h * r_h);
        let temporal = ((r * r - r_h * r_h) * (r2 * r2 - r_h * r_h)).sqrt() / (r_h * r_h);
        let u = Complex64::new(r_h * delta_t / (ell * ell), -self.epsilon);
        let time_part = temporal * u.cosh();
        let term = |n: i64| -> Complex64 {
            let angle = (r_h / ell) * (delta_phi - TAU * n as f64);
            let sigma = radial * angle.cosh() - 1.0 - time_part;
            let mut t = sigma.sqrt().inv();
            if zeta != 0.0 {
                t -= zeta * (sigma + 2.0).sqrt().inv();
            }
            t
        };
        let mut sum = term(0);
        let mut small = 0;
        for n in 1..=self.image_cap as i64 {
            let shell = term(n) + term(-n);
            sum += shell;
            if shell.norm() <= self.image_tol * sum.norm() {
                small += 1;
                if small == 2 {
                    return Ok(sum / (4.0 * PI * 2f64.sqrt() * ell));
                }
            } else {
                small = 0;
            }
        }
        Err(Error::Convergence {
            context: "oracle Wightman image sum".into(),
            detail: format!("no convergence within |n| <= {}", self.image_cap),
        })
    }
}

/// Gauss–Legendre nodes and weights on `[−1, 1]`.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let step = p1 / dp;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_64() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(64))
}

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const GAUSS7_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn kronrod15<F>(f: &F, a: f64, b: f64) -> Result<(Complex64, f64)>
where
    F: Fn(f64) -> Result<Complex64>,
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let centre = f(c)?;
    let mut kronrod = centre * GK_WEIGHTS[7];
    let mut gauss = centre * GAUSS7_WEIGHTS[3];
    for i in 0..7 {
        let pair = f(c - h * GK_NODES[i])? + f(c + h * GK_NODES[i])?;
        kronrod += pair * GK_WEIGHTS[i];
        if i % 2 == 1 {
            gauss += pair * GAUSS7_WEIGHTS[i / 2];
        }
    }
    Ok((kronrod * h, ((kronrod - gauss) * h).norm()))
}

struct Interval {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Interval {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Interval {}
impl PartialOrd for Interval {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Interval {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive G7–K15 over consecutive `edges`.
fn adaptive_kronrod<F>(f: &F, edges: &[f64], tol_rel: f64, tol_abs: f64, cap: usize) -> Result<Complex64>
where
    F: Fn(f64) -> Result<Complex64>,
{
    let mut heap = BinaryHeap::new();
    let mut total = Complex64::default();
    let mut error = 0.0;
    for w in edges.windows(2) {
        let (value, err) = kronrod15(f, w[0], w[1])?;
        total += value;
        error += err;
        heap.push(Interval { a: w[0], b: w[1], value, error: err });
    }
    while error > tol_abs.max(tol_rel * total.norm()) {
        if heap.len() >= cap {
            return Err(Error::Convergence {
                context: "oracle outer integral".into(),
                detail: format!("{cap} intervals, error estimate {error:e}"),
            });
        }
        let worst = heap.pop().expect("heap is non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            return Err(Error::Convergence {
                context: "oracle outer integral".into(),
                detail: format!("interval around {mid} cannot be split further"),
            });
        }
        let (v1, e1) = kronrod15(f, worst.a, mid)?;
        let (v2, e2) = kronrod15(f, mid, worst.b)?;
        total += v1 + v2 - worst.value;
        error += e1 + e2 - worst.error;
        heap.push(Interval { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Interval { a: mid, b: worst.b, value: v2, error: e2 });
    }
    // Re-add from scratch to shed accumulated rounding of the running total.
    Ok(heap.iter().map(|i| i.value).sum())
}

/// The two detectors and phase weights of one double integral
/// `∫∫ dτ_j dτ_k χ(τ_j) χ(τ_k) e^{i(w_j τ_j + w_k τ_k)} W(…)`.
struct Integrand {
    j: StaticDetector,
    k: StaticDetector,
    delta_phi: f64,
    w_j: f64,
    w_k: f64,
    time_ordered: bool,
    sign: f64,
}

fn integrand_for(cfg: &DetectorConfiguration, target: OracleTarget) -> Result<Integrand> {
    let omega = cfg.gap();
    let (j, k, w_j, w_k, time_ordered, sign) = match target {
        OracleTarget::P(j) => (j, j, -omega, omega, false, 1.0),
        OracleTarget::C(p) => (p.detectors().0, p.detectors().1, -omega, omega, false, 1.0),
        OracleTarget::X(p) => (p.detectors().0, p.detectors().1, omega, omega, true, -1.0),
    };
    let (dj, dk) = (*cfg.detector(j)?, *cfg.detector(k)?);
    Ok(Integrand {
        j: dj,
        k: dk,
        delta_phi: dj.phi() - dk.phi(),
        w_j,
        w_k,
        time_ordered,
        sign,
    })
}

/// Value of one element at a single `ε`.
pub fn oracle_at_epsilon(
    cfg: &DetectorConfiguration,
    target: OracleTarget,
    epsilon: f64,
    settings: &OracleSettings,
) -> Result<Complex64> {
    let bg = *cfg.background();
    let spec = integrand_for(cfg, target)?;
    let wightman = WightmanEvaluator::new(bg, epsilon)?.with_images(settings.image_tol, settings.image_cap);
    let (gj, gk) = (spec.j.gamma(), spec.k.gamma());
    let (rj, rk) = (spec.j.radius(), spec.k.radius());

    // Inner Gaussian in τ_j: exp(−A(τ − μ)²/2 − …), A = 1 + γ_k²/γ_j².
    let a_inner = 1.0 + (gk / gj).powi(2);
    let half_width = 10.0 / a_inner.sqrt();
    let rule = if settings.inner_nodes == 64 {
        legendre_64().clone()
    } else {
        gauss_legendre(settings.inner_nodes)
    };
    let envelope = |dt: f64| -> Complex64 {
        let mu = gk * gk * dt / (gj * a_inner);
        let mut acc = Complex64::default();
        for (x, w) in rule.0.iter().zip(&rule.1) {
            let tj = mu + half_width * x;
            let tk = gk * (tj / gj - dt);
            let gauss = (-0.5 * (tj * tj + tk * tk)).exp();
            let phase = spec.w_j * tj + spec.w_k * tk;
            acc += Complex64::from_polar(gauss, phase) * *w;
        }
        acc * (half_width * gk)
    };
    let f = |dt: f64| -> Result<Complex64> {
        let w = if spec.time_ordered && dt < 0.0 {
            wightman.evaluate(rk, rj, -dt, -spec.delta_phi)?
        } else {
            wightman.evaluate(rj, rk, dt, spec.delta_phi)?
        };
        Ok(w * envelope(dt))
    };

    // Outer window: the Δt-marginal of the Gaussians has variance
    // (γ_j² + γ_k²)/(γ_j² γ_k²); 9 standard deviations leave e^{-40}.
    let reach = 9.0 * ((gj * gj + gk * gk) / (gj * gj * gk * gk)).sqrt();
    let mut edges = vec![-reach, 0.0, reach];
    edges.extend(light_cone_crossings(&bg, &spec, reach));
    edges.sort_by(f64::total_cmp);
    edges.dedup();
    let value = adaptive_kronrod(&f, &edges, settings.tol_rel, settings.tol_abs, settings.max_intervals)
        .map_err(|e| e.within(&format!("{target} at epsilon {epsilon}")))?;
    Ok(value * spec.sign)
}

/// `Δt` where `σ` or `σ + 2` of some image vanishes at `ε = 0`.
fn light_cone_crossings(bg: &BtzBackground, spec: &Integrand, reach: f64) -> Vec<f64> {
    let r_h = bg.horizon_radius();
    let ell = bg.ell();
    let (rj, rk) = (spec.j.radius(), spec.k.radius());
    let radial = rj * rk / (r_h * r_h);
    let temporal = ((rj * rj - r_h * r_h) * (rk * rk - r_h * r_h)).sqrt() / (r_h * r_h);
    let u_max = r_h * reach / (ell * ell);
    let mut out = Vec::new();
    for direction in [1i64, -1] {
        for m in 0..=100_000i64 {
            if m == 0 && direction < 0 {
                continue;
            }
            let n = direction * m;
            let angle = (r_h / ell) * (spec.delta_phi - TAU * n as f64);
            let base = radial * angle.cosh();
            for shift in [-1.0, 1.0] {
                let c = (base + shift) / temporal;
                if c >= 1.0 && c.acosh() < u_max {
                    let dt = c.acosh() * ell * ell / r_h;
                    out.push(dt);
                    out.push(-dt);
                }
            }
            // |angle| grows monotonically once m >= 2.
            if m >= 2 && ((base - 1.0) / temporal).acosh() > u_max {
                break;
            }
        }
    }
    out.retain(|t| t.abs() < reach);
    out
}

/// Richardson extrapolation of `ε`-ordered values for ratio `ratio`.
fn richardson(raw: &[Complex64], ratio: f64) -> Vec<Vec<Complex64>> {
    let mut table = vec![raw.to_vec()];
    let mut factor = ratio;
    while table.last().map_or(0, Vec::len) > 1 {
        let prev = table.last().expect("non-empty");
        let next: Vec<Complex64> = prev
            .windows(2)
            .map(|w| (w[1] * factor - w[0]) / (factor - 1.0))
            .collect();
        table.push(next);
        factor *= ratio;
    }
    table
}

/// Extrapolated `ε → 0` value of one element.
pub fn oracle_element(
    cfg: &DetectorConfiguration,
    target: OracleTarget,
    settings: &OracleSettings,
) -> Result<OracleEstimate> {
    let ratio = settings.validate()?;
    let raw = settings
        .epsilons
        .iter()
        .map(|&eps| oracle_at_epsilon(cfg, target, eps, settings))
        .collect::<Result<Vec<_>>>()?;
    // Successive differences must shrink, otherwise the sequence is not yet in
    // its asymptotic regime.
    let diffs: Vec<f64> = raw.windows(2).map(|w| (w[1] - w[0]).norm()).collect();
    let floor = 1e3 * settings.tol_rel * raw.last().map_or(0.0, |v| v.norm()) + settings.tol_abs;
    for w in diffs.windows(2) {
        if w[1] > w[0] && w[1] > floor {
            return Err(Error::OracleNonMonotone(format!(
                "{target}: successive changes {:e} then {:e}",
                w[0], w[1]
            )));
        }
    }
    let table = richardson(&raw, ratio);
    let value = table.last().expect("non-empty")[0];
    let error = if table.len() >= 2 {
        let prev = &table[table.len() - 2];
        (value - prev[prev.len() - 1]).norm()
    } else {
        f64::INFINITY
    };
    Ok(OracleEstimate {
        target,
        value,
        error,
        epsilons: settings.epsilons.clone(),
        raw,
        table,
    })
}

/// Relative agreement required between fast path and oracle.
pub const AGREEMENT_REL: f64 = 1e-3;
/// Absolute agreement floor.
pub const AGREEMENT_ABS: f64 = 1e-6;

/// One element compared between the fast path and the oracle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleComparison {
    pub target: OracleTarget,
    pub fast: Complex64,
    pub oracle: OracleEstimate,
    pub abs_diff: f64,
    pub rel_diff: f64,
}

impl OracleComparison {
    pub fn within_tolerance(&self) -> bool {
        self.abs_diff <= (AGREEMENT_REL * self.oracle.value.norm()).max(AGREEMENT_ABS)
    }
}

/// Every element of `cfg`, for `P` and then per pair `C` and `X`.
pub fn all_targets(cfg: &DetectorConfiguration) -> Vec<OracleTarget> {
    let mut out: Vec<OracleTarget> = cfg.labels().iter().map(|&j| OracleTarget::P(j)).collect();
    for &pair in cfg.pairs() {
        out.push(OracleTarget::C(pair));
        out.push(OracleTarget::X(pair));
    }
    out
}

/// Compare a fast-path set against the oracle for every element of `cfg`.
pub fn compare_with_fast_path(
    cfg: &DetectorConfiguration,
    fast: &CorrelatorSet,
    settings: &OracleSettings,
) -> Result<Vec<OracleComparison>> {
    all_targets(cfg)
        .into_iter()
        .map(|target| {
            let fast_value = match target {
                OracleTarget::P(j) => Complex64::new(fast.p(j), 0.0),
                OracleTarget::C(pair) => Complex64::new(fast.c(pair), 0.0),
                OracleTarget::X(pair) => fast.x(pair),
            };
            let oracle = oracle_element(cfg, target, settings)?;
            let abs_diff = (fast_value - oracle.value).norm();
            let rel_diff = abs_diff / oracle.value.norm().max(f64::MIN_POSITIVE);
            Ok(OracleComparison {
                target,
                fast: fast_value,
                oracle,
                abs_diff,
                rel_diff,
            })
        })
        .collect()
}
