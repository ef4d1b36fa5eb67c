//! Linear mass m(x) = μx: Hermite series, quantized energies and eigenfunctions.

use num_complex::Complex64;
use serde::Serialize;

use crate::discretization::{eigen_solve, second_derivative_operator, BandedComplexOperator, Boundary, Grid, Selection, Spectrum};
use crate::error::{PdmError, Result};
use crate::fields::{trapezoid, ScalarField};

/// Sample count of the normalization quadrature.
const NORM_SAMPLES: usize = 40_001;

/// a_{j+2} = (2j + 1 − K) / ((j + 1)(j + 2)) · a_j
pub fn recursion_step(k: f64, j: usize, a_j: f64) -> f64 {
    let jf = j as f64;
    (2.0 * jf + 1.0 - k) / ((jf + 1.0) * (jf + 2.0)) * a_j
}

/// Power-series coefficients of h(ξ) for spectral parameter K = E²/μ.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HermiteSeries {
    pub k: f64,
    pub coefficients: Vec<f64>,
    /// True when every coefficient past the last nonzero one is exactly zero.
    pub terminated: bool,
}

impl HermiteSeries {
    /// Coefficients a_0..=a_max from seeds (a_0, a_1).
    pub fn generate(k: f64, a0: f64, a1: f64, max_order: usize) -> Self {
        let mut a = vec![0.0; max_order.max(1) + 1];
        a[0] = a0;
        a[1] = a1;
        for j in 0..=max_order.saturating_sub(2) {
            a[j + 2] = recursion_step(k, j, a[j]);
        }
        let terminated = [0usize, 1].iter().all(|&parity| {
            let chain: Vec<f64> = a.iter().skip(parity).step_by(2).copied().collect();
            match chain.iter().position(|&c| c == 0.0) {
                None => false,
                Some(first_zero) => chain[first_zero..].iter().all(|&c| c == 0.0) && first_zero + 1 < chain.len(),
            }
        });
        HermiteSeries { k, coefficients: a, terminated }
    }

    /// Odd-parity branch seeded by a_0 = 0, a_1 = 1.
    pub fn odd(k: f64, max_order: usize) -> Self {
        Self::generate(k, 0.0, 1.0, max_order)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coefficients.iter().rposition(|&c| c != 0.0)
    }

    pub fn eval(&self, xi: f64) -> f64 {
        self.coefficients.iter().rev().fold(0.0, |acc, c| acc * xi + c)
    }
}

/// Physicists' Hermite polynomial by the three-term recurrence.
pub fn hermite(n: usize, xi: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, 2.0 * xi);
    if n == 0 {
        return prev;
    }
    for k in 1..n {
        let next = 2.0 * xi * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

fn check_odd(n: usize) -> Result<()> {
    if n == 0 || n.is_multiple_of(2) {
        return Err(PdmError::InvalidParameter(format!(
            "quantum number {n} is not allowed: the wave function must vanish at x = 0, so n is odd"
        )));
    }
    Ok(())
}

fn check_mu(mu: f64) -> Result<()> {
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(PdmError::InvalidParameter(format!("mu must be positive, got {mu}")));
    }
    Ok(())
}

/// E_n = √((2n + 1)μ) for odd n, ascending.
pub fn analytic_energies(mu: f64, ns: &[usize]) -> Result<Vec<f64>> {
    check_mu(mu)?;
    ns.iter().try_for_each(|&n| check_odd(n))?;
    let mut e: Vec<f64> = ns.iter().map(|&n| ((2 * n + 1) as f64 * mu).sqrt()).collect();
    e.sort_by(f64::total_cmp);
    Ok(e)
}

/// Unnormalized e^{−μx²/2} H_n(√μ x) with its first two derivatives.
fn raw_mode(mu: f64, n: usize, x: f64) -> [f64; 3] {
    let s = mu.sqrt();
    let xi = s * x;
    let g = (-0.5 * mu * x * x).exp();
    let h = hermite(n, xi);
    let dh = if n >= 1 { 2.0 * n as f64 * hermite(n - 1, xi) } else { 0.0 };
    let d2h = if n >= 2 { 4.0 * (n * (n - 1)) as f64 * hermite(n - 2, xi) } else { 0.0 };
    [
        g * h,
        g * (-mu * x * h + s * dh),
        g * (mu * mu * x * x * h - mu * h - 2.0 * mu * s * x * dh + mu * d2h),
    ]
}

/// Normalization constant on [0, x_hi] by fine trapezoidal quadrature; the
/// squared mode is even and decays, so the rule converges spectrally.
fn normalization(mu: f64, n: usize, x_hi: f64) -> f64 {
    let g = Grid::new(0.0, x_hi, NORM_SAMPLES).expect("fixed quadrature grid");
    let sq: Vec<f64> = g.nodes().iter().map(|&x| raw_mode(mu, n, x)[0].powi(2)).collect();
    1.0 / trapezoid(&sq, g.spacing()).sqrt()
}

/// Mode value with first and second derivatives, normalized on [0, x_hi].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSample {
    pub value: f64,
    pub first: f64,
    pub second: f64,
}

pub(crate) fn mode_samples_any_parity(mu: f64, n: usize, x_hi: f64, xs: &[f64]) -> Vec<ModeSample> {
    let a = normalization(mu, n, x_hi);
    xs.iter()
        .map(|&x| {
            let [v, d1, d2] = raw_mode(mu, n, x);
            ModeSample { value: a * v, first: a * d1, second: a * d2 }
        })
        .collect()
}

/// Odd-n eigenfunction A_n e^{−μx²/2} H_n(√μ x) with its derivatives, normalized on [0, x_hi].
pub fn analytic_mode(mu: f64, n: usize, x_hi: f64, xs: &[f64]) -> Result<Vec<ModeSample>> {
    check_mu(mu)?;
    check_odd(n)?;
    if let Some(&x) = xs.iter().find(|&&x| x < 0.0 || x > x_hi) {
        return Err(PdmError::Domain { x, lo: 0.0, hi: x_hi });
    }
    Ok(mode_samples_any_parity(mu, n, x_hi, xs))
}

/// The eigenfunction sampled on `grid`, normalized on [0, grid.x_hi()].
pub fn analytic_eigenfunction(mu: f64, n: usize, grid: &Grid) -> Result<ScalarField> {
    if grid.x_lo() < 0.0 {
        return Err(PdmError::Domain { x: grid.x_lo(), lo: 0.0, hi: grid.x_hi() });
    }
    let samples = analytic_mode(mu, n, grid.x_hi(), &grid.nodes())?;
    ScalarField::new(*grid, samples.iter().map(|s| Complex64::new(s.value, 0.0)).collect())
}

/// Residual of `−φ'' + μ²x²φ − E²φ` for samples with exact derivatives.
pub fn reduced_residual(mu: f64, energy: f64, xs: &[f64], samples: &[ModeSample]) -> Vec<f64> {
    xs.iter()
        .zip(samples)
        .map(|(&x, s)| -s.second + (mu * mu * x * x - energy * energy) * s.value)
        .collect()
}

/// Energies from the finite-difference reduced equation on the half-line.
#[derive(Debug, Clone)]
pub struct LinearSpectrum {
    /// E = +√λ, ascending.
    pub energies: Vec<f64>,
    /// The underlying eigenproblem in λ = E².
    pub squared: Spectrum,
    pub grid: Grid,
}

/// Interior Dirichlet grid on [0, x_hi] with `n` unknowns and the operator −d² + μ²x².
pub fn reduced_operator(mu: f64, x_hi: f64, n: usize) -> Result<BandedComplexOperator> {
    let grid = Grid::interior(0.0, x_hi, n)?;
    let pot: Vec<f64> = grid.nodes().iter().map(|x| (mu * x).powi(2)).collect();
    second_derivative_operator(grid, Boundary::Dirichlet)
        .add(&BandedComplexOperator::real_diagonal(grid, Boundary::Dirichlet, &pot)?)
}

/// The `k` lowest energies of the reduced linear-mass problem.
pub fn numeric_energies(mu: f64, x_hi: f64, n: usize, k: usize) -> Result<LinearSpectrum> {
    check_mu(mu)?;
    if x_hi * mu.sqrt() < 10.0 {
        return Err(PdmError::Precondition(format!(
            "x_hi = {x_hi} is below 10/sqrt(mu) = {}",
            10.0 / mu.sqrt()
        )));
    }
    let op = reduced_operator(mu, x_hi, n)?;
    let squared = eigen_solve(&op, k, Selection::SmallestRe)?;
    let energies = squared.eigenvalues.iter().map(|l| l.re.max(0.0).sqrt()).collect();
    Ok(LinearSpectrum { energies, squared, grid: *op.grid() })
}
