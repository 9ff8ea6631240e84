//! Gaussian against a Fermi–Dirac factor.

use super::tanh_sinh::integrate_panels;
use super::QuadratureControls;
use crate::error::{Error, Result};

/// Half-width of the Gaussian window in units of `1/σ`; the tail beyond it is
/// below `e^{-81}`.
const WINDOW: f64 = 9.0;
/// Beyond `|x| > STEP_WIDTH · T` the Fermi factor is a step to `e^{-30}`.
const STEP_WIDTH: f64 = 30.0;

/// `1 / (e^{x/T} + 1)` without overflow.
pub fn fermi_factor(x: f64, temperature: f64) -> f64 {
    let z = x / temperature;
    if z > 0.0 {
        let e = (-z).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + z.exp())
    }
}

/// `∫_ℝ dx e^{−σ²(x−Ω)²} / (e^{x/T} + 1)`.
pub fn fermi_gaussian(
    temperature: f64,
    gap: f64,
    sigma: f64,
    ctrl: &QuadratureControls,
) -> Result<f64> {
    if !(temperature.is_finite() && temperature > 0.0) {
        return Err(Error::invalid(format!("temperature must be positive, got {temperature}")));
    }
    if !(sigma > 0.0 && gap.is_finite()) {
        return Err(Error::invalid("fermi_gaussian needs finite gap and positive width"));
    }
    let lo = gap - WINDOW / sigma;
    let hi = gap + WINDOW / sigma;
    let mut cuts = vec![lo, hi];
    for c in [0.0, -STEP_WIDTH * temperature, STEP_WIDTH * temperature] {
        if c > lo && c < hi {
            cuts.push(c);
        }
    }
    cuts.sort_by(f64::total_cmp);
    let width = 0.5 / sigma;
    let mut edges = vec![lo];
    for w in cuts.windows(2) {
        let count = ((w[1] - w[0]) / width).ceil().max(1.0) as usize;
        for i in 1..=count {
            edges.push(if i == count {
                w[1]
            } else {
                w[0] + (w[1] - w[0]) * i as f64 / count as f64
            });
        }
    }
    let f = |x: f64| {
        let d = sigma * (x - gap);
        (-d * d).exp() * fermi_factor(x, temperature)
    };
    let mut budget = ctrl.max_subdivisions;
    let out = integrate_panels(&f, &edges, ctrl.tol_rel, ctrl.tol_abs, &mut budget)
        .map_err(|e| e.within("thermal term"))?;
    Ok(out.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::rel_close;
    use std::f64::consts::PI;

    fn ctrl() -> QuadratureControls {
        QuadratureControls::default()
    }

    #[test]
    fn zero_temperature_limit_is_erfc() {
        let got = fermi_gaussian(1e-6, 1.0, 1.0, &ctrl()).unwrap();
        let expect = 0.5 * PI.sqrt() * libm::erfc(1.0);
        assert!(rel_close(got, expect, 1e-8, 0.0), "{got} vs {expect}");
        assert!((got - 0.13940).abs() < 1e-4);
    }

    #[test]
    fn infinite_temperature_limit_is_half_gaussian() {
        let got = fermi_gaussian(1e9, 0.7, 1.0, &ctrl()).unwrap();
        assert!(rel_close(got, 0.5 * PI.sqrt(), 1e-8, 0.0));
        let wide = fermi_gaussian(1e9, 0.7, 0.5, &ctrl()).unwrap();
        assert!(rel_close(wide, 0.5 * PI.sqrt() / 0.5, 1e-8, 0.0));
    }

    #[test]
    fn large_negative_gap_sees_full_gaussian() {
        let got = fermi_gaussian(0.3, -60.0, 1.0, &ctrl()).unwrap();
        assert!(rel_close(got, PI.sqrt(), 1e-12, 0.0));
    }

    #[test]
    fn fermi_factor_is_overflow_safe() {
        assert_eq!(fermi_factor(1e5, 1e-3), 0.0);
        assert_eq!(fermi_factor(-1e5, 1e-3), 1.0);
        assert!((fermi_factor(0.0, 1.0) - 0.5).abs() < 1e-16);
    }

    #[test]
    fn rejects_non_positive_temperature() {
        assert!(fermi_gaussian(0.0, 1.0, 1.0, &ctrl()).is_err());
    }
}
