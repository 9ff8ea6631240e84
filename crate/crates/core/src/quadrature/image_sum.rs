//! Truncation of the sum over BTZ images `Γⁿ`.

use std::ops::Add;

use num_complex::Complex64;

use super::ImageSumControls;
use crate::error::{Error, Result};

/// Size of a term, for the stopping rule.
pub trait Magnitude {
    fn magnitude(&self) -> f64;
}

impl Magnitude for f64 {
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Magnitude for Complex64 {
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImageRange {
    /// `n = 1, 2, 3, …`
    OneSided,
    /// `n = 0, 1, −1, 2, −2, …`
    TwoSided,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImageSumOutcome<T> {
    pub sum: T,
    pub terms: usize,
    /// Largest `|n|` evaluated.
    pub max_index: u64,
}

/// Accumulate `term(n)` outward until `consecutive_small` successive terms
/// satisfy `|term| ≤ tol_rel·|partial + baseline| + tol_abs`.
///
/// `baseline` is a known contribution the series is added to; it only enters
/// the stopping rule. A two-sided sum stops only after completing a symmetric
/// window `−k..=k`.
pub fn image_sum<T, F>(
    range: ImageRange,
    ctrl: &ImageSumControls,
    baseline: f64,
    mut term: F,
) -> Result<ImageSumOutcome<T>>
where
    T: Copy + Add<Output = T> + Magnitude + Default,
    F: FnMut(i64) -> Result<T>,
{
    ctrl.validate()?;
    let mut sum = T::default();
    let mut terms = 0usize;
    let mut small_run = 0usize;
    let mut push = |n: i64, sum: &mut T, terms: &mut usize, small_run: &mut usize| -> Result<()> {
        let t = term(n)?;
        *sum = *sum + t;
        *terms += 1;
        let scale = (sum.magnitude() + baseline.abs()) * ctrl.tol_rel + ctrl.tol_abs;
        if t.magnitude() <= scale {
            *small_run += 1;
        } else {
            *small_run = 0;
        }
        Ok(())
    };

    match range {
        ImageRange::OneSided => {
            for n in 1..=ctrl.n_cap {
                push(n as i64, &mut sum, &mut terms, &mut small_run)?;
                if small_run >= ctrl.consecutive_small {
                    return Ok(ImageSumOutcome { sum, terms, max_index: n });
                }
            }
        }
        ImageRange::TwoSided => {
            push(0, &mut sum, &mut terms, &mut small_run)?;
            for k in 1..=ctrl.n_cap {
                push(k as i64, &mut sum, &mut terms, &mut small_run)?;
                push(-(k as i64), &mut sum, &mut terms, &mut small_run)?;
                if small_run >= ctrl.consecutive_small {
                    return Ok(ImageSumOutcome { sum, terms, max_index: k });
                }
            }
        }
    }
    Err(Error::Convergence {
        context: "image sum".into(),
        detail: format!("no convergence within |n| <= {} ({} terms)", ctrl.n_cap, terms),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn geometric(ratio: f64, tol: f64) -> ImageSumOutcome<f64> {
        let q = (-PI * ratio).exp();
        let ctrl = ImageSumControls {
            tol_rel: tol,
            tol_abs: 0.0,
            consecutive_small: 1,
            ..Default::default()
        };
        image_sum(ImageRange::OneSided, &ctrl, 0.0, |n| Ok(q.powi(n as i32))).unwrap()
    }

    #[test]
    fn geometric_tail_bounds() {
        // q = e^{-π}: q^n < 1e-14 · q/(1-q) first at n = 12.
        let fast = geometric(1.0, 1e-14);
        assert!(fast.terms <= 12, "{}", fast.terms);
        let q = (-PI).exp();
        assert!(((fast.sum - q / (1.0 - q)) / fast.sum).abs() < 1e-14);

        let slow = geometric(0.1, 1e-14);
        assert!((90..=110).contains(&slow.terms), "{}", slow.terms);
    }

    #[test]
    fn zero_series_uses_minimal_window() {
        let ctrl = ImageSumControls::default();
        let one = image_sum(ImageRange::OneSided, &ctrl, 0.0, |_| Ok(0.0f64)).unwrap();
        assert_eq!((one.sum, one.terms), (0.0, 2));
        let two = image_sum(ImageRange::TwoSided, &ctrl, 0.0, |_| Ok(0.0f64)).unwrap();
        assert_eq!((two.sum, two.terms), (0.0, 3));
    }

    #[test]
    fn even_two_sided_equals_centre_plus_twice_one_sided() {
        let ctrl = ImageSumControls {
            tol_rel: 1e-16,
            tol_abs: 0.0,
            ..Default::default()
        };
        let term = |n: i64| Ok((-0.7 * (n as f64).powi(2)).exp() + 0.0f64);
        let two = image_sum(ImageRange::TwoSided, &ctrl, 0.0, term).unwrap().sum;
        let one = image_sum(ImageRange::OneSided, &ctrl, 0.0, term).unwrap().sum;
        assert!(((two - (1.0 + 2.0 * one)) / two).abs() < 1e-13);
    }

    #[test]
    fn cap_is_reported() {
        let ctrl = ImageSumControls {
            n_cap: 50,
            ..Default::default()
        };
        let err = image_sum(ImageRange::OneSided, &ctrl, 0.0, |_| Ok(1.0f64)).unwrap_err();
        assert!(err.is_convergence());
    }

    #[test]
    fn term_errors_propagate() {
        let ctrl = ImageSumControls::default();
        let err = image_sum::<f64, _>(ImageRange::OneSided, &ctrl, 0.0, |n| {
            if n == 3 {
                Err(Error::Domain("boom".into()))
            } else {
                Ok(1.0 / (n * n * n * n * n * n) as f64)
            }
        })
        .unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }
}
