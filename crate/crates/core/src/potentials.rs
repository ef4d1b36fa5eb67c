//! Complex potentials and the effective potential of the decoupled equation.

use num_complex::Complex64;
use serde::Serialize;

use crate::discretization::Grid;
use crate::error::{PdmError, Result};
use crate::output::csv_table;
use crate::profiles::MassProfile;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Nodes whose mass falls below this fraction of the largest sampled mass
/// are treated as singular.
pub const SINGULAR_MASS_FRACTION: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivativeSource {
    ClosedForm,
    FiniteDifference,
}

/// A complex potential sampled on a grid, together with its derivative.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexPotentialSamples {
    grid: Grid,
    values: Vec<Complex64>,
    derivative: Vec<Complex64>,
    derivative_source: DerivativeSource,
}

impl ComplexPotentialSamples {
    /// Samples with an exact derivative supplied alongside.
    pub fn with_derivative(grid: Grid, values: Vec<Complex64>, derivative: Vec<Complex64>) -> Result<Self> {
        check_len(&grid, values.len())?;
        check_len(&grid, derivative.len())?;
        if values.iter().chain(&derivative).any(|v| !v.is_finite()) {
            return Err(PdmError::InvalidParameter("potential samples must be finite".into()));
        }
        Ok(Self { grid, values, derivative, derivative_source: DerivativeSource::ClosedForm })
    }

    /// Samples only; the derivative is formed by second-order differences
    /// (central inside, one-sided three-point at the two ends).
    pub fn from_values(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        check_len(&grid, values.len())?;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(PdmError::InvalidParameter("potential samples must be finite".into()));
        }
        let n = values.len();
        let h = grid.spacing();
        let mut derivative = vec![Complex64::new(0.0, 0.0); n];
        for i in 1..n - 1 {
            derivative[i] = (values[i + 1] - values[i - 1]) / (2.0 * h);
        }
        derivative[0] = (values[0] * -3.0 + values[1] * 4.0 - values[2]) / (2.0 * h);
        derivative[n - 1] = (values[n - 1] * 3.0 - values[n - 2] * 4.0 + values[n - 3]) / (2.0 * h);
        Ok(Self { grid, values, derivative, derivative_source: DerivativeSource::FiniteDifference })
    }

    /// Evaluates a closed-form potential and derivative at the grid nodes.
    pub fn from_fn(grid: Grid, v: impl Fn(f64) -> Complex64, dv: impl Fn(f64) -> Complex64) -> Result<Self> {
        let xs = grid.nodes();
        Self::with_derivative(grid, xs.iter().map(|&x| v(x)).collect(), xs.iter().map(|&x| dv(x)).collect())
    }

    pub fn zero(grid: Grid) -> Self {
        let zeros = vec![Complex64::new(0.0, 0.0); grid.len()];
        Self { grid, values: zeros.clone(), derivative: zeros, derivative_source: DerivativeSource::ClosedForm }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn derivative(&self) -> &[Complex64] {
        &self.derivative
    }

    pub fn derivative_source(&self) -> DerivativeSource {
        self.derivative_source
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Pointwise sum with another potential on the same grid.
    pub fn plus(&self, other: &Self) -> Result<Self> {
        if self.grid != other.grid {
            return Err(PdmError::InvalidParameter("potentials live on different grids".into()));
        }
        let source = if self.derivative_source == DerivativeSource::ClosedForm
            && other.derivative_source == DerivativeSource::ClosedForm
        {
            DerivativeSource::ClosedForm
        } else {
            DerivativeSource::FiniteDifference
        };
        Ok(Self {
            grid: self.grid,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
            derivative: self.derivative.iter().zip(&other.derivative).map(|(a, b)| a + b).collect(),
            derivative_source: source,
        })
    }
}

/// A potential that can be evaluated anywhere, as needed by the integrators.
pub trait ComplexPotential: Send + Sync {
    fn value(&self, x: f64) -> Complex64;
    fn derivative(&self, x: f64) -> Complex64;

    fn sample(&self, grid: &Grid) -> Result<ComplexPotentialSamples> {
        ComplexPotentialSamples::from_fn(*grid, |x| self.value(x), |x| self.derivative(x))
    }
}

/// V = i m'/(2m) for a given profile.
#[derive(Debug, Clone)]
pub struct Schrodingerizing(pub MassProfile);

impl ComplexPotential for Schrodingerizing {
    fn value(&self, x: f64) -> Complex64 {
        I * (0.5 * self.0.log_derivative(x))
    }

    fn derivative(&self, x: f64) -> Complex64 {
        let l = self.0.log_derivative(x);
        I * (0.5 * (self.0.d2m(x) / self.0.m(x) - l * l))
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroPotential;

impl ComplexPotential for ZeroPotential {
    fn value(&self, _: f64) -> Complex64 {
        Complex64::new(0.0, 0.0)
    }

    fn derivative(&self, _: f64) -> Complex64 {
        Complex64::new(0.0, 0.0)
    }
}

/// Closed-form potential from a value and a derivative closure.
pub struct FnPotential<F, G> {
    pub value: F,
    pub derivative: G,
}

impl<F, G> ComplexPotential for FnPotential<F, G>
where
    F: Fn(f64) -> Complex64 + Send + Sync,
    G: Fn(f64) -> Complex64 + Send + Sync,
{
    fn value(&self, x: f64) -> Complex64 {
        (self.value)(x)
    }

    fn derivative(&self, x: f64) -> Complex64 {
        (self.derivative)(x)
    }
}

fn check_len(grid: &Grid, found: usize) -> Result<()> {
    if found != grid.len() {
        return Err(PdmError::LengthMismatch { expected: grid.len(), found });
    }
    Ok(())
}

/// Mass, m'/m and m'' at each node, after domain and singularity checks.
#[derive(Debug, Clone)]
pub(crate) struct MassSamples {
    pub m: Vec<f64>,
    pub d2m: Vec<f64>,
    pub log_d: Vec<f64>,
}

pub(crate) fn check_domain(p: &MassProfile, grid: &Grid) -> Result<()> {
    let (lo, hi) = p.domain();
    for x in [grid.node(0), grid.node(grid.len() - 1)] {
        if !p.contains(x) {
            return Err(PdmError::Domain { x, lo, hi });
        }
    }
    Ok(())
}

/// Nodes where the mass vanishes or drops below the singularity guard.
pub fn singular_nodes(p: &MassProfile, grid: &Grid) -> Result<Vec<(usize, f64)>> {
    check_domain(p, grid)?;
    let masses: Vec<f64> = grid.nodes().iter().map(|&x| p.m(x)).collect();
    let floor = SINGULAR_MASS_FRACTION * masses.iter().fold(0.0f64, |a, m| a.max(m.abs()));
    Ok(masses
        .iter()
        .enumerate()
        .filter(|(_, m)| m.abs() <= floor)
        .map(|(i, _)| (i, grid.node(i)))
        .collect())
}

pub(crate) fn mass_samples(p: &MassProfile, grid: &Grid) -> Result<MassSamples> {
    let bad = singular_nodes(p, grid)?;
    if !bad.is_empty() {
        return Err(PdmError::Singular { nodes: bad });
    }
    let xs = grid.nodes();
    Ok(MassSamples {
        m: xs.iter().map(|&x| p.m(x)).collect(),
        d2m: xs.iter().map(|&x| p.d2m(x)).collect(),
        log_d: xs.iter().map(|&x| p.log_derivative(x)).collect(),
    })
}

/// V = i m'/(2m), with V' = i (m'' m - m'^2) / (2 m^2) in closed form.
pub fn schrodingerizing_potential(p: &MassProfile, grid: &Grid) -> Result<ComplexPotentialSamples> {
    let s = mass_samples(p, grid)?;
    let values = s.log_d.iter().map(|l| I * (0.5 * l)).collect();
    let derivative = (0..grid.len())
        .map(|i| {
            let ratio = s.d2m[i] / s.m[i];
            I * (0.5 * (ratio - s.log_d[i] * s.log_d[i]))
        })
        .collect();
    ComplexPotentialSamples::with_derivative(*grid, values, derivative)
}

/// Coefficient multiplying φ₁ in the decoupled equation once the E² term is
/// moved to the right-hand side:
///
/// m² + ¾(m'/m)² − ½m''/m + (2V − i m'/m)E − V² − iV' + i(m'/m)V.
pub fn effective_potential_general(
    p: &MassProfile,
    v: &ComplexPotentialSamples,
    energy: f64,
) -> Result<Vec<Complex64>> {
    let grid = v.grid();
    let s = mass_samples(p, grid)?;
    Ok((0..grid.len())
        .map(|i| {
            let l = s.log_d[i];
            let vi = v.values[i];
            let base = s.m[i] * s.m[i] + 0.75 * l * l - 0.5 * s.d2m[i] / s.m[i];
            (vi * 2.0 - I * l) * energy - vi * vi - I * v.derivative[i] + I * l * vi + base
        })
        .collect())
}

/// m² at every node: the effective potential left by the Schrödingerizing choice.
pub fn effective_potential_reduced(p: &MassProfile, grid: &Grid) -> Result<Vec<f64>> {
    check_domain(p, grid)?;
    Ok(grid.nodes().iter().map(|&x| p.m(x).powi(2)).collect())
}

/// CSV with columns x, Re V, Im V, Re Veff, Im Veff.
pub fn potential_csv(v: &ComplexPotentialSamples, veff: &[Complex64]) -> Result<String> {
    check_len(v.grid(), veff.len())?;
    let rows = v
        .grid()
        .nodes()
        .into_iter()
        .zip(v.values.iter().zip(veff))
        .map(|(x, (a, b))| vec![x, a.re, a.im, b.re, b.im]);
    Ok(csv_table(&["x[length]", "re_V[energy]", "im_V[energy]", "re_Veff[energy^2]", "im_Veff[energy^2]"], rows))
}
