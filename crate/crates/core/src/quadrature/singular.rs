//! `∫₀^∞ dx e^{−a x²} w(x) / √(cosh α − cosh x)` under the `−iε` branch rule.
//!
//! On `[0, α)` the square root is real and positive. For `x > α` the regulated
//! argument `cosh α − cosh(x − iε)` approaches the negative real axis from
//! above, so the principal root continues to `i √(cosh x − cosh α)` and
//! `1/√(cosh α − cosh x) → s · i / √(cosh x − cosh α)` with `s = −1`. The sign is
//! pinned by comparison against the regulated double-integral oracle (see
//! `correlators::oracle` and the oracle tests of the correlator crate).
//!
//! Both segments are integrated after `|x − α| = u²`, which turns the
//! inverse-square-root endpoint into a bounded factor.

use num_complex::Complex64;

use super::tanh_sinh::integrate_panels;
use super::QuadratureControls;
use crate::error::{Error, Result};
use crate::special::{ln_sinh, sinhc};

/// Branch sign `s` for `x > α`.
pub const BRANCH_SIGN: f64 = -1.0;

/// Widest panel, in `x`, used before adaptive refinement.
const MAX_PANEL_WIDTH: f64 = 0.5;

/// Which oscillating weight `w(x)` multiplies the kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SingularKind {
    /// `w = e^{−iβx}`; the real part of the integral is returned.
    ExponentialRealPart,
    /// `w = cos(βx)`; the full complex value is returned, its imaginary part
    /// coming from `x > α`.
    Cosine,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularIntegralSpec {
    /// Singular point `α ≥ 0`.
    pub alpha: f64,
    /// Gaussian damping `a > 0`.
    pub a: f64,
    /// Oscillation frequency `β`.
    pub beta: f64,
    pub kind: SingularKind,
}

impl SingularIntegralSpec {
    pub fn new(alpha: f64, a: f64, beta: f64, kind: SingularKind) -> Self {
        Self { alpha, a, beta, kind }
    }

    fn validate(&self) -> Result<()> {
        if !(self.a.is_finite() && self.a > 0.0) {
            return Err(Error::invalid(format!("damping must be positive, got {}", self.a)));
        }
        if !(self.alpha.is_finite() && self.alpha >= 0.0) {
            return Err(Error::invalid(format!(
                "singular point must be non-negative, got {}",
                self.alpha
            )));
        }
        if !self.beta.is_finite() {
            return Err(Error::invalid("oscillation frequency must be finite"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularOutcome {
    pub value: Complex64,
    pub error: f64,
    pub evaluations: usize,
}

/// Point beyond which the Gaussian `e^{−a x²}` (or, for `x > α`, the kernel's
/// `e^{−x/2}` decay) leaves less than `tol_abs` behind.
pub fn truncation_point(a: f64, alpha: f64, tol_abs: f64) -> f64 {
    let budget = (1.0 / tol_abs).ln() + 3.0;
    let gaussian = 1.1 * (budget / a).sqrt();
    gaussian.min(alpha + 2.0 * (budget + 2.0))
}

/// `2 / √(sinhc(u²/2) · sinh((α + x)/2))`, the bounded kernel left after the
/// `u²` substitution on either side of the singular point.
fn substituted_kernel(alpha: f64, x: f64, u: f64) -> f64 {
    let t = 0.5 * u * u;
    let m = 0.5 * (alpha + x);
    if m > 300.0 || t > 300.0 {
        let ln_sinhc = if t > 1e-4 { ln_sinh(t) - t.ln() } else { 0.0 };
        2.0 * (-0.5 * (ln_sinhc + ln_sinh(m))).exp()
    } else {
        2.0 / (sinhc(t) * m.sinh()).sqrt()
    }
}

/// Panel edges in `u` for the segment `x ∈ [lo, hi]` measured from `alpha`,
/// with `x`-width at most `width`.
fn u_edges(alpha: f64, lo: f64, hi: f64, width: f64, left: bool) -> Vec<f64> {
    let count = ((hi - lo) / width).ceil().max(1.0) as usize;
    let step = (hi - lo) / count as f64;
    let mut edges: Vec<f64> = (0..=count)
        .map(|i| {
            let x = if i == count { hi } else { lo + step * i as f64 };
            let dist = if left { alpha - x } else { x - alpha };
            dist.max(0.0).sqrt()
        })
        .collect();
    if left {
        edges.reverse();
    }
    edges
}

pub fn singular_oscillatory(
    spec: &SingularIntegralSpec,
    ctrl: &QuadratureControls,
) -> Result<SingularOutcome> {
    singular_oscillatory_with_branch(spec, ctrl, BRANCH_SIGN)
}

/// As [`singular_oscillatory`] with an explicit branch sign, for calibration.
pub fn singular_oscillatory_with_branch(
    spec: &SingularIntegralSpec,
    ctrl: &QuadratureControls,
    branch_sign: f64,
) -> Result<SingularOutcome> {
    spec.validate()?;
    ctrl.validate()?;
    let SingularIntegralSpec { alpha, a, beta, kind } = *spec;
    let width = if beta == 0.0 {
        MAX_PANEL_WIDTH
    } else {
        (std::f64::consts::PI / beta.abs()).min(MAX_PANEL_WIDTH)
    };
    let x_end = truncation_point(a, alpha, ctrl.tol_abs);
    let mut budget = ctrl.max_subdivisions;

    // x ∈ [0, min(α, x_end)], x = α − u²
    let left_hi = alpha.min(x_end);
    let left = if left_hi > 0.0 {
        let f = |u: f64| {
            let x = (alpha - u * u).max(0.0);
            (-a * x * x).exp() * (beta * x).cos() * substituted_kernel(alpha, x, u)
        };
        let edges = u_edges(alpha, 0.0, left_hi, width, true);
        integrate_panels(&f, &edges, ctrl.tol_rel, ctrl.tol_abs, &mut budget)
            .map_err(|e| e.within("singular integral, x < alpha"))?
    } else {
        Default::default()
    };

    // x ∈ [α, x_end], x = α + u²
    let right = if x_end > alpha {
        let weight: fn(f64) -> f64 = match kind {
            SingularKind::ExponentialRealPart => f64::sin,
            SingularKind::Cosine => f64::cos,
        };
        let f = |u: f64| {
            let x = alpha + u * u;
            (-a * x * x).exp() * weight(beta * x) * substituted_kernel(alpha, x, u)
        };
        let edges = u_edges(alpha, alpha, x_end, width, false);
        integrate_panels(&f, &edges, ctrl.tol_rel, ctrl.tol_abs, &mut budget)
            .map_err(|e| e.within("singular integral, x > alpha"))?
    } else {
        Default::default()
    };

    let value = match kind {
        SingularKind::ExponentialRealPart => {
            Complex64::new(left.value + branch_sign * right.value, 0.0)
        }
        SingularKind::Cosine => Complex64::new(left.value, branch_sign * right.value),
    };
    Ok(SingularOutcome {
        value,
        error: left.error + right.error,
        evaluations: left.evaluations + right.evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::rel_close;

    fn ctrl() -> QuadratureControls {
        QuadratureControls::default()
    }

    /// Midpoint rule on x = α sin²θ, which makes the integrand smooth at x = α.
    fn brute_force_left(alpha: f64, a: f64, beta: f64) -> f64 {
        let n = 20000;
        let mut sum = 0.0;
        let h = std::f64::consts::FRAC_PI_2 / n as f64;
        for i in 0..n {
            let theta = (i as f64 + 0.5) * h;
            let x = alpha * theta.sin().powi(2);
            let jac = 2.0 * alpha * theta.sin() * theta.cos();
            let val = (-a * x * x).exp() * (beta * x).cos() / (alpha.cosh() - x.cosh()).sqrt();
            sum += val * jac * h;
        }
        sum
    }

    #[test]
    fn left_segment_matches_independent_midpoint_rule() {
        for &(alpha, a, beta) in &[(1.0, 0.3, 0.7), (2.5, 0.05, 3.0), (0.2, 4.0, 0.0)] {
            let spec = SingularIntegralSpec::new(alpha, a, beta, SingularKind::Cosine);
            let got = singular_oscillatory(&spec, &ctrl()).unwrap();
            let expect = brute_force_left(alpha, a, beta);
            assert!(rel_close(got.value.re, expect, 1e-7, 0.0), "{alpha}: {} vs {expect}", got.value.re);
        }
    }

    #[test]
    fn right_segment_matches_independent_midpoint_rule() {
        // x > α part at β = 0 against a midpoint rule on x = α + (v/(1−v))².
        let alpha = 0.8;
        let a = 1e-3;
        let spec = SingularIntegralSpec::new(alpha, a, 0.0, SingularKind::Cosine);
        let got = singular_oscillatory(&spec, &ctrl()).unwrap();
        let n = 400000;
        let mut sum = 0.0;
        let vmax = 1.0;
        let h = vmax / n as f64;
        for i in 0..n {
            let v = (i as f64 + 0.5) * h;
            let s = v / (1.0 - v);
            let x = alpha + s * s;
            let ds = 1.0 / ((1.0 - v) * (1.0 - v));
            let val = (-a * x * x).exp() * 2.0 * s / (x.cosh() - alpha.cosh()).sqrt();
            if val.is_finite() {
                sum += val * ds * h;
            }
        }
        assert!(rel_close(-got.value.im, sum, 1e-5, 0.0), "{} vs {sum}", got.value.im);
    }

    #[test]
    fn linear_in_prefactor_and_branch_sign() {
        let spec = SingularIntegralSpec::new(1.3, 0.2, 1.1, SingularKind::ExponentialRealPart);
        let plus = singular_oscillatory_with_branch(&spec, &ctrl(), 1.0).unwrap();
        let minus = singular_oscillatory_with_branch(&spec, &ctrl(), -1.0).unwrap();
        let left_only = 0.5 * (plus.value.re + minus.value.re);
        let right_only = 0.5 * (plus.value.re - minus.value.re);
        assert!(right_only.abs() > 1e-6 && left_only.abs() > 1e-6);
        let cos_spec = SingularIntegralSpec { kind: SingularKind::Cosine, ..spec };
        let c = singular_oscillatory(&cos_spec, &ctrl()).unwrap();
        assert!(rel_close(c.value.re, left_only, 1e-12, 1e-15));
    }

    #[test]
    fn concentrated_gaussian_scales_as_inverse_root_damping() {
        // a → ∞: the integral concentrates at x = 0 where the kernel is
        // 1/√(cosh α − 1), so value · 2√a/√π → 1/√(cosh α − 1).
        let spec = SingularIntegralSpec::new(1.0, 1e6, 1.0, SingularKind::ExponentialRealPart);
        let got = singular_oscillatory(&spec, &ctrl()).unwrap().value.re;
        let limit = 1.0 / (1f64.cosh() - 1.0).sqrt();
        let scaled = got * 2.0 * 1e3 / std::f64::consts::PI.sqrt();
        assert!(rel_close(scaled, limit, 1e-5, 0.0), "{scaled} vs {limit}");
        assert!(got.abs() < 2e-3);
    }

    #[test]
    fn tolerance_halving_is_self_consistent() {
        let spec = SingularIntegralSpec::new(2.0, 0.1, 2.5, SingularKind::ExponentialRealPart);
        let base = singular_oscillatory(&spec, &ctrl()).unwrap().value.re;
        let tight = QuadratureControls {
            tol_rel: 5e-11,
            ..ctrl()
        };
        let finer = singular_oscillatory(&spec, &tight).unwrap().value.re;
        assert!(rel_close(base, finer, 1e-10, 1e-15));
    }

    #[test]
    fn huge_singular_point_is_finite_and_tiny() {
        let spec = SingularIntegralSpec::new(900.0, 1e-6, 0.01, SingularKind::Cosine);
        let got = singular_oscillatory(&spec, &ctrl()).unwrap();
        assert!(got.value.norm() < 1e-150);
    }

    #[test]
    fn rejects_invalid_specs() {
        let bad = SingularIntegralSpec::new(1.0, 0.0, 1.0, SingularKind::Cosine);
        assert!(singular_oscillatory(&bad, &ctrl()).is_err());
        let bad = SingularIntegralSpec::new(-1.0, 1.0, 1.0, SingularKind::Cosine);
        assert!(singular_oscillatory(&bad, &ctrl()).is_err());
    }
}
