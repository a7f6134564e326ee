//! Ordinary least squares over `(x, y)` points.

use num_traits::Float;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum FitError {
    #[error("least squares needs at least two distinct x values, got {distinct}")]
    Degenerate { distinct: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearFit<T> {
    pub slope: T,
    pub intercept: T,
    /// `y - (slope x + intercept)` per input point, in input order.
    pub residuals: Vec<T>,
}

pub type LinearFit64 = LinearFit<f64>;

impl<T: Float> LinearFit<T> {
    pub fn predict(&self, x: T) -> T {
        self.slope * x + self.intercept
    }

    pub fn max_abs_residual(&self) -> T {
        self.residuals.iter().fold(T::zero(), |m, r| m.max(r.abs()))
    }
}

/// Fit `y = slope x + intercept`. Centered sums keep the normal equations
/// well conditioned for byte-sized y.
pub fn least_squares_fit<T: Float>(points: &[(T, T)]) -> Result<LinearFit<T>, FitError> {
    let mut xs: Vec<T> = points.iter().map(|p| p.0).collect();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    xs.dedup();
    if xs.len() < 2 {
        return Err(FitError::Degenerate { distinct: xs.len() });
    }

    let n = T::from(points.len()).expect("point count fits the float type");
    let mean_x = points.iter().fold(T::zero(), |s, p| s + p.0) / n;
    let mean_y = points.iter().fold(T::zero(), |s, p| s + p.1) / n;
    let (sxy, sxx) = points.iter().fold((T::zero(), T::zero()), |(sxy, sxx), &(x, y)| {
        let dx = x - mean_x;
        (sxy + dx * (y - mean_y), sxx + dx * dx)
    });
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let residuals = points.iter().map(|&(x, y)| y - (slope * x + intercept)).collect();
    Ok(LinearFit { slope, intercept, residuals })
}
