use crate::error::{Error, Result};

/// Strictly increasing time points `0 = t_0 < t_1 < … < t_q`.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeGrid {
    points: Vec<f64>,
}

impl TimeGrid {
    pub fn from_points(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidGrid("a grid needs at least two points".into()));
        }
        if points[0] != 0.0 {
            return Err(Error::InvalidGrid(format!(
                "grid must start at 0, starts at {}",
                points[0]
            )));
        }
        if let Some(w) = points.windows(2).find(|w| !w[1].is_finite() || w[1] <= w[0]) {
            return Err(Error::InvalidGrid(format!(
                "grid must be strictly increasing and finite ({} followed by {})",
                w[0], w[1]
            )));
        }
        Ok(TimeGrid { points })
    }

    /// `t_i = i·T/q`.
    pub fn equidistant(horizon: f64, q: usize) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidGrid("q must be at least 1".into()));
        }
        if !horizon.is_finite() || horizon <= 0.0 {
            return Err(Error::InvalidGrid(format!("horizon must be positive, got {horizon}")));
        }
        let qf = q as f64;
        Self::from_points((0..=q).map(|i| i as f64 * horizon / qf).collect())
    }

    /// `t_i = i·τ` for `i = 0..=q`.
    pub fn uniform_step(step: f64, q: usize) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidGrid("q must be at least 1".into()));
        }
        if !step.is_finite() || step <= 0.0 {
            return Err(Error::InvalidGrid(format!("step must be positive, got {step}")));
        }
        Self::from_points((0..=q).map(|i| i as f64 * step).collect())
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// Number of steps `q`.
    pub fn steps(&self) -> usize {
        self.points.len() - 1
    }

    pub fn step_size(&self, i: usize) -> f64 {
        self.points[i + 1] - self.points[i]
    }

    pub fn horizon(&self) -> f64 {
        self.points[self.points.len() - 1]
    }

    /// Index of the node within `tol` of `t`, if any.
    pub fn find_node(&self, t: f64, tol: f64) -> Option<usize> {
        let idx = self.points.partition_point(|&p| p < t);
        [idx.checked_sub(1), Some(idx)]
            .into_iter()
            .flatten()
            .filter(|&i| i < self.points.len())
            .find(|&i| (self.points[i] - t).abs() <= tol)
    }
}
