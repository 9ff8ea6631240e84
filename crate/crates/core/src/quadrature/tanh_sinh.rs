//! Tanh-sinh (double-exponential) quadrature on finite panels.
//!
//! The substitution `x = tanh(π/2 · sinh t)` maps `[−1, 1]` onto the real line
//! and makes the trapezoidal rule converge double-exponentially for integrands
//! analytic in the open interval, regardless of their endpoint behaviour.
//! Nodes are stored as distances from the nearest endpoint so that points
//! within `1e−18` of an endpoint keep their precision.

use std::f64::consts::FRAC_PI_2;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Finest level: step `h = 2^-MAX_LEVEL`.
pub const MAX_LEVEL: usize = 7;
/// Levels below this are never accepted as converged.
const MIN_LEVEL: usize = 2;
/// Nodes are dropped once the weight falls below this.
const WEIGHT_FLOOR: f64 = 1e-30;

struct Table {
    /// `1 − x_k` for `t_k = k · 2^-MAX_LEVEL`, `k ≥ 0`.
    complement: Vec<f64>,
    weight: Vec<f64>,
}

fn table() -> &'static Table {
    static TABLE: OnceLock<Table> = OnceLock::new();
    TABLE.get_or_init(|| {
        let h = 0.5f64.powi(MAX_LEVEL as i32);
        let mut complement = Vec::new();
        let mut weight = Vec::new();
        for k in 0.. {
            let t = k as f64 * h;
            let s = FRAC_PI_2 * t.sinh();
            let c = 2.0 / (1.0 + (2.0 * s).exp());
            let cosh_s = s.cosh();
            let w = FRAC_PI_2 * t.cosh() / (cosh_s * cosh_s);
            if w < WEIGHT_FLOOR || c == 0.0 {
                break;
            }
            complement.push(c);
            weight.push(w);
        }
        Table { complement, weight }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PanelResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

impl PanelResult {
    fn add(&mut self, other: PanelResult) {
        self.value += other.value;
        self.error += other.error;
        self.evaluations += other.evaluations;
    }
}

/// One tanh-sinh pass over `[a, b]`, refining level by level. The flag is
/// false when the finest level is reached without meeting the tolerance.
fn single_panel<F>(f: &F, a: f64, b: f64, tol_rel: f64, tol_abs: f64) -> (PanelResult, bool)
where
    F: Fn(f64) -> f64,
{
    let tab = table();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let n = tab.complement.len();
    let evaluated = std::cell::Cell::new(0usize);
    let node_pair = |k: usize| -> f64 {
        let off = half * tab.complement[k];
        let w = tab.weight[k];
        // Nodes that round onto an endpoint are skipped; their weight is
        // negligible and the integrand may be singular there.
        let (xa, xb) = (a + off, b - off);
        let mut pair = 0.0;
        if xa > a && xa < b {
            pair += f(xa);
            evaluated.set(evaluated.get() + 1);
        }
        if xb < b && xb > a {
            pair += f(xb);
            evaluated.set(evaluated.get() + 1);
        }
        w * pair
    };

    let mut total = tab.weight[0] * f(mid);
    let mut previous = f64::NAN;
    let mut estimate = 0.0;
    let mut err = f64::INFINITY;
    for level in 0..=MAX_LEVEL {
        // Level 0 visits every multiple of its stride; later levels only add
        // the odd multiples, the even ones being inherited.
        let stride = 1usize << (MAX_LEVEL - level);
        let (mut k, step) = if level == 0 { (stride, stride) } else { (stride, 2 * stride) };
        while k < n {
            total += node_pair(k);
            k += step;
        }
        let h = 0.5f64.powi(level as i32);
        let evaluations = 1 + evaluated.get();
        estimate = half * h * total;
        if level > 0 {
            err = (estimate - previous).abs();
        }
        if level >= MIN_LEVEL {
            if err <= tol_abs.max(tol_rel * estimate.abs()) {
                return (
                    PanelResult {
                        value: estimate,
                        error: err,
                        evaluations,
                    },
                    true,
                );
            }
        }
        previous = estimate;
    }
    (
        PanelResult {
            value: estimate,
            error: err,
            evaluations: 1 + evaluated.get(),
        },
        false,
    )
}

/// Integrate `f` over `[a, b]`; panels that fail to converge are bisected.
/// `budget` counts remaining bisections and is shared across calls.
pub fn integrate<F>(
    f: &F,
    a: f64,
    b: f64,
    tol_rel: f64,
    tol_abs: f64,
    budget: &mut usize,
) -> Result<PanelResult>
where
    F: Fn(f64) -> f64,
{
    if b <= a {
        return Ok(PanelResult {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }
    let (result, converged) = single_panel(f, a, b, tol_rel, tol_abs);
    if !result.value.is_finite() {
        return Err(Error::Convergence {
            context: "tanh-sinh panel".into(),
            detail: format!("non-finite integrand on [{a}, {b}]"),
        });
    }
    if converged {
        return Ok(result);
    }
    if *budget == 0 {
        return Err(Error::Convergence {
            context: "tanh-sinh panel".into(),
            detail: format!(
                "subdivision cap reached on [{a}, {b}] (estimate {}, error {})",
                result.value, result.error
            ),
        });
    }
    *budget -= 1;
    let mid = 0.5 * (a + b);
    let mut total = integrate(f, a, mid, tol_rel, tol_abs * 0.5, budget)?;
    total.add(integrate(f, mid, b, tol_rel, tol_abs * 0.5, budget)?);
    total.evaluations += result.evaluations;
    Ok(total)
}

/// Integrate over consecutive panels `[edges[i], edges[i+1]]`.
pub fn integrate_panels<F>(
    f: &F,
    edges: &[f64],
    tol_rel: f64,
    tol_abs: f64,
    budget: &mut usize,
) -> Result<PanelResult>
where
    F: Fn(f64) -> f64,
{
    let mut total = PanelResult {
        value: 0.0,
        error: 0.0,
        evaluations: 0,
    };
    for w in edges.windows(2) {
        total.add(integrate(f, w[0], w[1], tol_rel, tol_abs, budget)?);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> PanelResult {
        let mut budget = 100;
        integrate(&f, a, b, 1e-12, 1e-15, &mut budget).unwrap()
    }

    #[test]
    fn polynomial_and_exponential() {
        let r = run(|x| x * x, 0.0, 3.0);
        assert!((r.value - 9.0).abs() < 1e-12);
        let r = run(f64::exp, -1.0, 2.0);
        assert!((r.value - (2f64.exp() - (-1f64).exp())).abs() < 1e-12);
    }

    #[test]
    fn endpoint_singularities() {
        // ∫₀¹ x^{-1/2} = 2 and ∫₀¹ ln x = −1
        let r = run(|x| 1.0 / x.sqrt(), 0.0, 1.0);
        assert!((r.value - 2.0).abs() < 1e-9, "{}", r.value);
        let r = run(f64::ln, 0.0, 1.0);
        assert!((r.value + 1.0).abs() < 1e-10);
        // ∫₀² 1/sqrt(x(2-x)) = π; the right endpoint is only resolved to
        // ulp(2), so the tail below √ulp is lost.
        let f = |x: f64| 1.0 / (x * (2.0 - x)).sqrt();
        let mut budget = 0;
        let r = integrate(&f, 0.0, 2.0, 1e-6, 1e-7, &mut budget).unwrap();
        assert!((r.value - std::f64::consts::PI).abs() < 1e-6, "{}", r.value);
    }

    #[test]
    fn oscillatory_requires_bisection_or_converges() {
        let r = run(|x| (40.0 * x).cos(), 0.0, 2.0);
        assert!((r.value - (80f64).sin() / 40.0).abs() < 1e-11);
    }

    #[test]
    fn levels_visit_each_node_once() {
        // The trapezoid sum over all levels must equal the direct fine sum.
        let tab = table();
        let counter = std::cell::Cell::new(0usize);
        let f = |_x: f64| {
            counter.set(counter.get() + 1);
            1.0
        };
        let (res, _) = single_panel(&f, 0.0, 1.0, 0.0, 0.0);
        // Every left node is distinct from 0; right nodes stop at ulp(1).
        assert!(res.evaluations > tab.complement.len());
        assert!(res.evaluations < 2 * tab.complement.len());
        assert_eq!(counter.get(), res.evaluations);
        assert!((res.value - 1.0).abs() < 1e-13);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let mut budget = 0;
        let f = |x: f64| (1e4 * x).sin();
        let err = integrate(&f, 0.0, 10.0, 1e-14, 1e-18, &mut budget).unwrap_err();
        assert!(err.is_convergence());
    }
}
