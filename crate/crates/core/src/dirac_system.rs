//! The coupled PDM Dirac operator, its exact decoupling, and PT checks.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::discretization::{
    classify, conjugation_closure_error, eigenvalues, first_derivative_operator, integrate_ivp,
    second_derivative_operator, BandedComplexOperator, Boundary, EigenClass, Grid, IvpOptions, Trajectory,
};
use crate::error::{PdmError, Result};
use crate::fields::ScalarField;
use crate::potentials::{check_domain, mass_samples, ComplexPotential, ComplexPotentialSamples};
use crate::profiles::MassProfile;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

pub type Mat2 = [[Complex64; 2]; 2];

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn mat2_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[c(0.0); 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

fn mat2_add(a: &Mat2, b: &Mat2, sb: f64) -> Mat2 {
    let mut out = *a;
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] += b[i][j] * sb;
        }
    }
    out
}

fn mat2_max_abs(a: &Mat2) -> f64 {
    a.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
}

/// The fixed 1+1D representation: γ⁰ = σx, γ¹ = −iσy, α = γ⁰γ¹, β = γ⁰.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiracRepresentation {
    pub gamma0: Mat2,
    pub gamma1: Mat2,
    pub alpha: Mat2,
    pub beta: Mat2,
}

impl DiracRepresentation {
    pub fn standard() -> Self {
        let gamma0 = [[c(0.0), c(1.0)], [c(1.0), c(0.0)]];
        let gamma1 = [[c(0.0), c(-1.0)], [c(1.0), c(0.0)]];
        DiracRepresentation { gamma0, gamma1, alpha: mat2_mul(&gamma0, &gamma1), beta: gamma0 }
    }

    /// Max-entry defects of (γ⁰)² = I, (γ¹)² = −I and {α, β} = 0.
    pub fn identity_defects(&self) -> [f64; 3] {
        let id = [[c(1.0), c(0.0)], [c(0.0), c(1.0)]];
        let g0 = mat2_add(&mat2_mul(&self.gamma0, &self.gamma0), &id, -1.0);
        let g1 = mat2_add(&mat2_mul(&self.gamma1, &self.gamma1), &id, 1.0);
        let anti = mat2_add(&mat2_mul(&self.alpha, &self.beta), &mat2_mul(&self.beta, &self.alpha), 1.0);
        [mat2_max_abs(&g0), mat2_max_abs(&g1), mat2_max_abs(&anti)]
    }
}

/// Assembles `[[−i∂ + V, m], [m, i∂ + V]]` from nodal mass and potential values.
pub fn build_coupled_operator_from_samples(
    grid: Grid,
    mass: &[f64],
    potential: &[Complex64],
    boundary: Boundary,
) -> Result<BandedComplexOperator> {
    for len in [mass.len(), potential.len()] {
        if len != grid.len() {
            return Err(PdmError::LengthMismatch { expected: grid.len(), found: len });
        }
    }
    let d = first_derivative_operator(grid, boundary);
    let v = BandedComplexOperator::diagonal(grid, 1, boundary, potential.to_vec())?;
    let m = BandedComplexOperator::real_diagonal(grid, boundary, mass)?;
    let upper = d.scale(-I).add(&v)?;
    let lower = d.scale(I).add(&v)?;
    BandedComplexOperator::from_blocks([[Some(&upper), Some(&m)], [Some(&m), Some(&lower)]])
}

/// The coupled Dirac operator for profile `p` with sampled potential `v`.
pub fn build_coupled_operator(
    p: &MassProfile,
    v: &ComplexPotentialSamples,
    grid: &Grid,
    boundary: Boundary,
) -> Result<BandedComplexOperator> {
    if v.grid() != grid {
        return Err(PdmError::InvalidParameter("potential was sampled on a different grid".into()));
    }
    check_domain(p, grid)?;
    let mass: Vec<f64> = grid.nodes().iter().map(|&x| p.m(x)).collect();
    build_coupled_operator_from_samples(*grid, &mass, v.values(), boundary)
}

/// Coupled operator for the linear mass, extended to `[−x_hi, x_hi]` with the
/// odd continuation m(x) = μx and V = i/(2x). `n` must be even so that x = 0
/// is not a node.
pub fn linear_odd_extension(mu: f64, x_hi: f64, n: usize, boundary: Boundary) -> Result<BandedComplexOperator> {
    if !n.is_multiple_of(2) {
        return Err(PdmError::InvalidParameter("odd extension needs an even node count".into()));
    }
    if !(mu > 0.0) {
        return Err(PdmError::InvalidParameter(format!("mu must be positive, got {mu}")));
    }
    let grid = Grid::new(-x_hi, x_hi, n)?;
    let xs = grid.nodes();
    let mass: Vec<f64> = xs.iter().map(|x| mu * x).collect();
    let pot: Vec<Complex64> = xs.iter().map(|x| I * (0.5 / x)).collect();
    build_coupled_operator_from_samples(grid, &mass, &pot, boundary)
}

/// The φ₁ equation under the Schrödingerizing potential, as an eigenproblem
/// in E²: `−φ'' + (m'/m)φ' + [m''/(2m) − ¾(m'/m)² + m²]φ = E²φ`. All
/// coefficients are real.
pub fn decoupled_operator(p: &MassProfile, grid: &Grid, boundary: Boundary) -> Result<BandedComplexOperator> {
    let s = mass_samples(p, grid)?;
    let potential: Vec<f64> = (0..grid.len())
        .map(|i| 0.5 * s.d2m[i] / s.m[i] - 0.75 * s.log_d[i] * s.log_d[i] + s.m[i] * s.m[i])
        .collect();
    let drift = BandedComplexOperator::real_diagonal(*grid, boundary, &s.log_d)?
        .matmul(&first_derivative_operator(*grid, boundary))?;
    second_derivative_operator(*grid, boundary)
        .add(&drift)?
        .add(&BandedComplexOperator::real_diagonal(*grid, boundary, &potential)?)
}

/// How the derivatives of φ₁ enter the decoupled residual.
#[derive(Debug, Clone, Copy)]
pub enum Phi1Derivatives<'a> {
    /// Pointwise φ₁' and φ₁'' (closed form or from an integrator).
    Supplied { first: &'a [Complex64], second: &'a [Complex64] },
    /// Grid-consistent form built from the central-difference operator D:
    /// `m·[mφ₁ + iDφ₂ + (V − E)φ₂]` with `φ₂ = ((E − V)φ₁ + iDφ₁)/m`. This is
    /// algebraically the decoupled residual and vanishes for eigenvectors of
    /// the discrete coupled operator assembled with the same boundary.
    Discrete(Boundary),
}

/// Residual of `−φ₁'' + (m'/m)φ₁' + [2EV − V² − iV' − i(m'/m)(E − V)]φ₁ − (E² − m²)φ₁`.
pub fn decoupled_phi1_residual(
    p: &MassProfile,
    v: &ComplexPotentialSamples,
    energy: impl Into<Complex64>,
    phi1: &ScalarField,
    derivs: Phi1Derivatives<'_>,
) -> Result<Vec<Complex64>> {
    let e = energy.into();
    let grid = &phi1.grid;
    if v.grid() != grid {
        return Err(PdmError::InvalidParameter("potential and field grids differ".into()));
    }
    let s = mass_samples(p, grid)?;
    let n = grid.len();
    let vv = v.values();
    match derivs {
        Phi1Derivatives::Supplied { first, second } => {
            for len in [first.len(), second.len()] {
                if len != n {
                    return Err(PdmError::LengthMismatch { expected: n, found: len });
                }
            }
            Ok((0..n)
                .map(|i| {
                    let l = s.log_d[i];
                    let coeff = e * vv[i] * 2.0 - vv[i] * vv[i] - I * v.derivative()[i] - I * l * (e - vv[i]);
                    -second[i] + first[i] * l + (coeff - e * e + s.m[i] * s.m[i]) * phi1.values[i]
                })
                .collect())
        }
        Phi1Derivatives::Discrete(boundary) => {
            let d = first_derivative_operator(*grid, boundary);
            let dphi1 = d.apply(&phi1.values)?;
            let phi2: Vec<Complex64> =
                (0..n).map(|i| ((e - vv[i]) * phi1.values[i] + I * dphi1[i]) / s.m[i]).collect();
            let dphi2 = d.apply(&phi2)?;
            Ok((0..n)
                .map(|i| s.m[i] * (phi1.values[i] * s.m[i] + I * dphi2[i] + (vv[i] - e) * phi2[i]))
                .collect())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransformDirection {
    /// φ = m^(−1/2) φ₁
    Forward,
    /// φ₁ = m^(1/2) φ
    Inverse,
}

pub fn similarity_transform(p: &MassProfile, field: &ScalarField, direction: TransformDirection) -> Result<ScalarField> {
    let s = mass_samples(p, &field.grid)?;
    let values = field
        .values
        .iter()
        .zip(&s.m)
        .map(|(z, m)| match direction {
            TransformDirection::Forward => z / m.sqrt(),
            TransformDirection::Inverse => z * m.sqrt(),
        })
        .collect();
    ScalarField::new(field.grid, values)
}

/// Pointwise effective potential of the a = 1/2 equation for any potential.
pub fn effective_potential_at(p: &MassProfile, pot: &dyn ComplexPotential, energy: f64, x: f64) -> Complex64 {
    let m = p.m(x);
    let l = p.log_derivative(x);
    let v = pot.value(x);
    let base = m * m + 0.75 * l * l - 0.5 * p.d2m(x) / m;
    (v * 2.0 - I * l) * energy - v * v - I * pot.derivative(x) + I * l * v + base
}

/// Residual of the transformed equation `−φ'' + V_eff φ − E²φ` with φ'' supplied.
pub fn reduced_equation_residual(
    p: &MassProfile,
    pot: &dyn ComplexPotential,
    energy: f64,
    phi: &ScalarField,
    second: &[Complex64],
) -> Result<Vec<Complex64>> {
    if second.len() != phi.len() {
        return Err(PdmError::LengthMismatch { expected: phi.len(), found: second.len() });
    }
    mass_samples(p, &phi.grid)?;
    Ok(phi
        .grid
        .nodes()
        .iter()
        .enumerate()
        .map(|(i, &x)| -second[i] + (effective_potential_at(p, pot, energy, x) - energy * energy) * phi.values[i])
        .collect())
}

/// φ₂ = ((E − V)φ₁ + iφ₁')/m from the first row of the coupled system.
pub fn reconstruct_phi2(
    p: &MassProfile,
    v: &ComplexPotentialSamples,
    energy: impl Into<Complex64>,
    phi1: &ScalarField,
    dphi1: &[Complex64],
) -> Result<ScalarField> {
    let e = energy.into();
    if dphi1.len() != phi1.len() {
        return Err(PdmError::LengthMismatch { expected: phi1.len(), found: dphi1.len() });
    }
    if v.grid() != &phi1.grid {
        return Err(PdmError::InvalidParameter("potential and field grids differ".into()));
    }
    let s = mass_samples(p, &phi1.grid)?;
    let values = (0..phi1.len())
        .map(|i| ((e - v.values()[i]) * phi1.values[i] + I * dphi1[i]) / s.m[i])
        .collect();
    ScalarField::new(phi1.grid, values)
}

/// Residual of the second row: `iφ₂' + mφ₁ − (E − V)φ₂`.
pub fn second_row_residual(
    p: &MassProfile,
    v: &ComplexPotentialSamples,
    energy: impl Into<Complex64>,
    phi1: &ScalarField,
    phi2: &ScalarField,
    dphi2: &[Complex64],
) -> Result<Vec<Complex64>> {
    let e = energy.into();
    if phi2.grid != phi1.grid || v.grid() != &phi1.grid {
        return Err(PdmError::InvalidParameter("fields live on different grids".into()));
    }
    if dphi2.len() != phi1.len() {
        return Err(PdmError::LengthMismatch { expected: phi1.len(), found: dphi2.len() });
    }
    check_domain(p, &phi1.grid)?;
    Ok(phi1
        .grid
        .nodes()
        .iter()
        .enumerate()
        .map(|(i, &x)| I * dphi2[i] + p.m(x) * phi1.values[i] - (e - v.values()[i]) * phi2.values[i])
        .collect())
}

fn check_span(p: &MassProfile, span: (f64, f64)) -> Result<()> {
    let (lo, hi) = p.domain();
    for x in [span.0, span.1] {
        if !p.contains(x) {
            return Err(PdmError::Domain { x, lo, hi });
        }
    }
    Ok(())
}

/// Integrates the first-order coupled system for state `[φ₁, φ₂]`.
pub fn integrate_coupled(
    p: &MassProfile,
    pot: &dyn ComplexPotential,
    energy: f64,
    y0: [Complex64; 2],
    span: (f64, f64),
    outputs: &[f64],
    tol: f64,
) -> Result<Trajectory> {
    check_span(p, span)?;
    integrate_ivp(
        |x, y, d| {
            let m = p.m(x);
            let ev = energy - pot.value(x);
            d[0] = I * (ev * y[0] - m * y[1]);
            d[1] = I * (m * y[0] - ev * y[1]);
        },
        &y0,
        span,
        outputs,
        IvpOptions::with_tol(tol),
    )
}

/// Integrates the decoupled φ₁ equation for state `[φ₁, φ₁']`.
pub fn integrate_decoupled(
    p: &MassProfile,
    pot: &dyn ComplexPotential,
    energy: f64,
    y0: [Complex64; 2],
    span: (f64, f64),
    outputs: &[f64],
    tol: f64,
) -> Result<Trajectory> {
    check_span(p, span)?;
    integrate_ivp(
        |x, y, d| {
            let m = p.m(x);
            let l = p.log_derivative(x);
            let v = pot.value(x);
            let coeff = v * (2.0 * energy) - v * v - I * pot.derivative(x) - I * l * (energy - v);
            d[0] = y[1];
            d[1] = y[1] * l + (coeff - energy * energy + m * m) * y[0];
        },
        &y0,
        span,
        outputs,
        IvpOptions::with_tol(tol),
    )
}

/// Integrates the transformed equation `φ'' = (V_eff − E²)φ` for state `[φ, φ']`.
pub fn integrate_reduced(
    p: &MassProfile,
    pot: &dyn ComplexPotential,
    energy: f64,
    y0: [Complex64; 2],
    span: (f64, f64),
    outputs: &[f64],
    tol: f64,
) -> Result<Trajectory> {
    check_span(p, span)?;
    integrate_ivp(
        |x, y, d| {
            d[0] = y[1];
            d[1] = (effective_potential_at(p, pot, energy, x) - energy * energy) * y[0];
        },
        &y0,
        span,
        outputs,
        IvpOptions::with_tol(tol),
    )
}

/// Spinor involution applied together with parity and conjugation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PtInvolution {
    Identity,
    Sigma3,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PtReport {
    pub involution: PtInvolution,
    pub dim: usize,
    /// ‖Π Γ H̄ Γ Π − H‖_max
    pub delta: f64,
    pub n_real: usize,
    pub n_conjugate_pairs: usize,
    pub n_complex: usize,
    pub max_im_eig: f64,
    pub closure_error: f64,
}

impl PtReport {
    pub fn real_fraction(&self) -> f64 {
        self.n_real as f64 / self.dim as f64
    }
}

/// Δ = ‖Π Γ H̄ Γ Π − H‖_max for the chosen involution Γ.
pub fn pt_delta(h: &BandedComplexOperator, gamma: PtInvolution) -> Result<f64> {
    if !h.grid().is_symmetric() {
        return Err(PdmError::Precondition("PT check needs a grid symmetric about x = 0".into()));
    }
    let mut t = h.conj();
    if gamma == PtInvolution::Sigma3 {
        t = t.sigma3_conjugated()?;
    }
    Ok(t.parity_reversed().sub(h)?.max_abs())
}

/// Δ plus reality and conjugation-closure statistics of the full spectrum.
pub fn pt_symmetry_check(h: &BandedComplexOperator, gamma: PtInvolution) -> Result<PtReport> {
    let delta = pt_delta(h, gamma)?;
    let values = eigenvalues(h)?;
    let classes = classify(&values, 1e-8);
    let count = |k: EigenClass| classes.iter().filter(|&&c| c == k).count();
    Ok(PtReport {
        involution: gamma,
        dim: values.len(),
        delta,
        n_real: count(EigenClass::Real),
        n_conjugate_pairs: count(EigenClass::ConjugatePair) / 2,
        n_complex: count(EigenClass::Complex),
        max_im_eig: values.iter().map(|z| z.im.abs()).fold(0.0, f64::max),
        closure_error: conjugation_closure_error(&values),
    })
}
