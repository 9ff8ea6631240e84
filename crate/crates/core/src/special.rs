//! Overflow-safe hyperbolic helpers.
//!
//! Image sums at small black-hole mass reach hyperbolic angles where `cosh`
//! overflows, and detectors near the horizon produce arccosh arguments that sit
//! a hair above one. The functions here work with `y - 1` or `ln y` directly so
//! neither regime loses digits.

use std::f64::consts::LN_2;

/// Above this argument the asymptotic forms of `ln cosh` / `ln sinh` are exact
/// to double precision (`e^{-2x} < 1e-17`).
const ASYMPTOTIC_ARG: f64 = 20.0;

/// `ln cosh(x)`, finite for every finite `x`.
pub fn ln_cosh(x: f64) -> f64 {
    let x = x.abs();
    if x < ASYMPTOTIC_ARG {
        x.cosh().ln()
    } else {
        x - LN_2 + (-2.0 * x).exp().ln_1p()
    }
}

/// `ln sinh(x)` for `x > 0`.
pub fn ln_sinh(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x < ASYMPTOTIC_ARG {
        x.sinh().ln()
    } else {
        x - LN_2 + (-(-2.0 * x).exp()).ln_1p()
    }
}

/// `arccosh(1 + delta)` for `delta >= 0`, accurate when `delta` is tiny.
pub fn acosh_1p(delta: f64) -> f64 {
    debug_assert!(delta >= 0.0);
    if delta > 1e8 {
        // arccosh(y) = ln y + ln(1 + sqrt(1 - y^-2)), y = 1 + delta
        let ln_y = delta.ln() + (1.0 / delta).ln_1p();
        acosh_from_ln(ln_y)
    } else {
        (delta + (delta * (delta + 2.0)).sqrt()).ln_1p()
    }
}

/// `arccosh(y)` given `ln y`, for `y >= 1`. Never forms `y` when it would
/// overflow.
pub fn acosh_from_ln(ln_y: f64) -> f64 {
    debug_assert!(ln_y >= 0.0);
    if ln_y > 350.0 {
        ln_y + LN_2
    } else if ln_y > ASYMPTOTIC_ARG {
        let inv_sq = (-2.0 * ln_y).exp();
        ln_y + LN_2 + (-0.25 * inv_sq - 0.0625 * inv_sq * inv_sq).ln_1p()
    } else {
        ln_y.exp().acosh()
    }
}

/// `sinh(t) / t`, equal to one at `t = 0`.
pub fn sinhc(t: f64) -> f64 {
    if t.abs() < 1e-4 {
        1.0 + t * t / 6.0
    } else {
        t.sinh() / t
    }
}

/// `cosh(alpha) - cosh(x)` written as `2 sinh((alpha+x)/2) sinh((alpha-x)/2)`,
/// which keeps full relative accuracy when `x` approaches `alpha`.
pub fn cosh_gap(alpha: f64, x: f64) -> f64 {
    2.0 * (0.5 * (alpha + x)).sinh() * (0.5 * (alpha - x)).sinh()
}

/// `ln |cosh(alpha) - cosh(x)|` for `alpha, x >= 0`, `alpha != x`, without
/// overflow for large arguments.
pub fn ln_abs_cosh_gap(alpha: f64, x: f64) -> f64 {
    let sum = 0.5 * (alpha + x);
    let diff = (0.5 * (alpha - x)).abs();
    LN_2 + ln_sinh(sum) + ln_sinh(diff)
}

/// Relative closeness check used by tests and invariants.
pub fn rel_close(a: f64, b: f64, rel: f64, abs: f64) -> bool {
    (a - b).abs() <= abs.max(rel * a.abs().max(b.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_cosh_matches_direct_and_survives_overflow() {
        for &x in &[0.0, 0.3, 5.0, 19.9, 20.1, 100.0, -40.0] {
            assert!(rel_close(ln_cosh(x), f64::cosh(x).ln(), 1e-14, 1e-15), "{x}");
        }
        assert!(rel_close(ln_cosh(1000.0), 1000.0 - LN_2, 1e-15, 0.0));
    }

    #[test]
    fn acosh_1p_small_and_large() {
        // arccosh(1 + d) ~ sqrt(2d) for tiny d
        let d = 1e-20;
        assert!(rel_close(acosh_1p(d), (2.0 * d).sqrt(), 1e-12, 0.0));
        assert!(rel_close(acosh_1p(2.0 / 3.0), (5.0f64 / 3.0).acosh(), 1e-14, 0.0));
        let big = 1e12;
        assert!(rel_close(acosh_1p(big), (1.0 + big).acosh(), 1e-14, 0.0));
        assert!(rel_close(acosh_from_ln(800.0), 800.0 + LN_2, 1e-15, 0.0));
        assert!(rel_close(acosh_from_ln(30.0), 30.0f64.exp().acosh(), 1e-15, 0.0));
    }

    #[test]
    fn product_form_agrees_with_difference_of_cosh() {
        let alpha = 1.7;
        for i in 0..200 {
            let x = 0.02 * i as f64;
            if (x - alpha).abs() > 1e-3 {
                let direct = alpha.cosh() - x.cosh();
                assert!(rel_close(cosh_gap(alpha, x), direct, 1e-12, 0.0), "{x}");
                assert!(rel_close(
                    ln_abs_cosh_gap(alpha, x),
                    direct.abs().ln(),
                    1e-12,
                    1e-13
                ));
            }
        }
    }
}
