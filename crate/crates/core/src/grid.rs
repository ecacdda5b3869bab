use crate::error::{Result, WalkError};

/// Default spacing of uniform grids.
pub const DEFAULT_STEP: f64 = 0.01;

/// Ascending, nonnegative sample times shared by every series of an
/// experiment, so differences between series are exact pointwise.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid(Vec<f64>);

impl TimeGrid {
    /// `0, step, 2·step, ..., ≤ t_max` (points computed as `i · step`).
    pub fn uniform(t_max: f64, step: f64) -> Result<Self> {
        if !(t_max.is_finite() && t_max > 0.0) {
            return Err(WalkError::InvalidGrid(format!("t_max must be positive, got {t_max}")));
        }
        if !(step.is_finite() && step > 0.0) {
            return Err(WalkError::InvalidGrid(format!("step must be positive, got {step}")));
        }
        let count = (t_max / step + 1e-9).floor() as usize;
        Ok(Self((0..=count).map(|i| i as f64 * step).collect()))
    }

    pub fn from_points(points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(WalkError::InvalidGrid("grid is empty".into()));
        }
        if points.iter().any(|t| !t.is_finite() || *t < 0.0) {
            return Err(WalkError::InvalidGrid("times must be finite and nonnegative".into()));
        }
        if points.windows(2).any(|w| w[1] <= w[0]) {
            return Err(WalkError::InvalidGrid("times must be strictly ascending".into()));
        }
        Ok(Self(points))
    }

    pub fn points(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}
