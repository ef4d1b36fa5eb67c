//! Complex fields sampled on a grid.

use num_complex::Complex64;

use crate::discretization::Grid;
use crate::error::{PdmError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub grid: Grid,
    pub values: Vec<Complex64>,
}

impl ScalarField {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(PdmError::LengthMismatch { expected: grid.len(), found: values.len() });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(PdmError::InvalidParameter("field values must be finite".into()));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> Complex64) -> Self {
        let values = grid.nodes().into_iter().map(f).collect();
        Self { grid, values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Largest modulus over all nodes.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Trapezoidal L² norm over the grid.
    pub fn l2_norm(&self) -> f64 {
        trapezoid(&self.values.iter().map(|z| z.norm_sqr()).collect::<Vec<_>>(), self.grid.spacing()).sqrt()
    }
}

/// Two-component spinor (φ₁, φ₂) on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorField {
    pub grid: Grid,
    pub phi1: Vec<Complex64>,
    pub phi2: Vec<Complex64>,
}

impl SpinorField {
    pub fn new(grid: Grid, phi1: Vec<Complex64>, phi2: Vec<Complex64>) -> Result<Self> {
        for v in [&phi1, &phi2] {
            if v.len() != grid.len() {
                return Err(PdmError::LengthMismatch { expected: grid.len(), found: v.len() });
            }
        }
        if phi1.iter().chain(&phi2).any(|v| !v.is_finite()) {
            return Err(PdmError::InvalidParameter("spinor values must be finite".into()));
        }
        Ok(Self { grid, phi1, phi2 })
    }

    /// Splits an interleaved vector `[φ₁(x₀), φ₂(x₀), φ₁(x₁), ...]`.
    pub fn from_interleaved(grid: Grid, v: &[Complex64]) -> Result<Self> {
        if v.len() != 2 * grid.len() {
            return Err(PdmError::LengthMismatch { expected: 2 * grid.len(), found: v.len() });
        }
        let phi1 = v.iter().step_by(2).copied().collect();
        let phi2 = v.iter().skip(1).step_by(2).copied().collect();
        Self::new(grid, phi1, phi2)
    }

    pub fn component1(&self) -> ScalarField {
        ScalarField { grid: self.grid, values: self.phi1.clone() }
    }

    pub fn component2(&self) -> ScalarField {
        ScalarField { grid: self.grid, values: self.phi2.clone() }
    }
}

/// Composite trapezoidal rule for uniformly spaced samples.
pub fn trapezoid(samples: &[f64], h: f64) -> f64 {
    match samples.len() {
        0 => 0.0,
        1 => 0.0,
        n => h * (samples[1..n - 1].iter().sum::<f64>() + 0.5 * (samples[0] + samples[n - 1])),
    }
}
