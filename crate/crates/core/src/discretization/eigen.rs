//! Eigenpairs of banded complex operators.
//!
//! General (non-Hermitian) operators go through a dense complex
//! eigendecomposition. Hermitian tridiagonal operators, which is what every
//! scalar Schrödinger-type problem on a uniform grid produces, take a
//! Sturm-bisection plus inverse-iteration path that scales to much larger
//! grids.

use faer::Mat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::operator::BandedComplexOperator;
use crate::error::{PdmError, Result};

pub const MAX_SCALAR_DIM: usize = 4096;
pub const MAX_SPINOR_DIM: usize = 8192;
/// Residual bound every returned eigenpair must meet, for operators whose
/// largest entry is at most 1. Larger operators scale it by that entry.
pub const RESIDUAL_TOL: f64 = 1e-8;

/// Residual bound for a specific operator: `RESIDUAL_TOL * max(1, max |H_ij|)`.
pub fn residual_bound(op: &BandedComplexOperator) -> f64 {
    RESIDUAL_TOL * op.max_abs().max(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Selection {
    SmallestRe,
    SmallestAbsRe,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EigenClass {
    Real,
    ConjugatePair,
    Complex,
}

/// Tolerance below which `|Im λ|` counts as real.
pub fn real_tolerance(lambda: Complex64, rel: f64) -> f64 {
    rel * lambda.norm().max(1.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    /// Sorted by real part.
    pub eigenvalues: Vec<Complex64>,
    /// Unit-norm eigenvectors, aligned with `eigenvalues`.
    pub eigenvectors: Vec<Vec<Complex64>>,
    /// `‖Hv - λv‖ / ‖v‖` per pair.
    pub residuals: Vec<f64>,
    pub classes: Vec<EigenClass>,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }

    pub fn count(&self, class: EigenClass) -> usize {
        self.classes.iter().filter(|&&c| c == class).count()
    }
}

/// Classifies each eigenvalue as real, member of a conjugate pair, or complex.
pub fn classify(values: &[Complex64], rel_tol: f64) -> Vec<EigenClass> {
    values
        .iter()
        .map(|&l| {
            let tol = real_tolerance(l, rel_tol);
            if l.im.abs() < tol {
                EigenClass::Real
            } else if values.iter().any(|&m| (m - l.conj()).norm() < tol.max(1e-10 * l.norm())) {
                EigenClass::ConjugatePair
            } else {
                EigenClass::Complex
            }
        })
        .collect()
}

/// Largest distance from a conjugated eigenvalue to the spectrum, relative to `max(1, |λ|)`.
pub fn conjugation_closure_error(values: &[Complex64]) -> f64 {
    values
        .iter()
        .map(|&l| {
            let d = values.iter().map(|&m| (m - l.conj()).norm()).fold(f64::INFINITY, f64::min);
            d / l.norm().max(1.0)
        })
        .fold(0.0, f64::max)
}

fn check_dim(op: &BandedComplexOperator) -> Result<()> {
    let cap = if op.block_size() == 1 { MAX_SCALAR_DIM } else { MAX_SPINOR_DIM };
    if op.dim() > cap {
        return Err(PdmError::Precondition(format!(
            "operator dimension {} exceeds the dense cap {cap}",
            op.dim()
        )));
    }
    Ok(())
}

fn to_faer(op: &BandedComplexOperator) -> Mat<Complex64> {
    let mut m = Mat::<Complex64>::zeros(op.dim(), op.dim());
    op.for_each_entry(|r, c, v| m[(r, c)] += v);
    m
}

/// All eigenvalues (no vectors), unsorted.
pub fn eigenvalues(op: &BandedComplexOperator) -> Result<Vec<Complex64>> {
    check_dim(op)?;
    if let Some(t) = HermitianTridiagonal::from_operator(op) {
        return Ok((0..t.len()).map(|j| Complex64::new(t.kth_eigenvalue(j), 0.0)).collect());
    }
    to_faer(op)
        .eigenvalues()
        .map_err(|e| PdmError::Eigen(format!("dense eigenvalue iteration did not converge ({e:?}), dim {}", op.dim())))
}

/// The `k` eigenpairs selected by `select`, sorted by real part.
pub fn eigen_solve(op: &BandedComplexOperator, k: usize, select: Selection) -> Result<Spectrum> {
    check_dim(op)?;
    let k = k.min(op.dim());
    let mut pairs = match HermitianTridiagonal::from_operator(op) {
        Some(t) => t.solve(k, select),
        None => dense_pairs(op, k, select)?,
    };
    pairs.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
    let mut spectrum = Spectrum {
        eigenvalues: Vec::with_capacity(k),
        eigenvectors: Vec::with_capacity(k),
        residuals: Vec::with_capacity(k),
        classes: Vec::new(),
    };
    for (lambda, mut v) in pairs {
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in v.iter_mut() {
            *z /= norm;
        }
        let hv = op.apply(&v)?;
        let res = hv.iter().zip(&v).map(|(a, b)| (a - b * lambda).norm_sqr()).sum::<f64>().sqrt();
        spectrum.eigenvalues.push(lambda);
        spectrum.eigenvectors.push(v);
        spectrum.residuals.push(res);
    }
    spectrum.classes = classify(&spectrum.eigenvalues, 1e-8);
    let bound = residual_bound(op);
    if let Some((i, r)) = spectrum.residuals.iter().enumerate().find(|(_, &r)| !(r < bound)) {
        return Err(PdmError::Eigen(format!(
            "eigenpair {i} (λ = {}) has residual {r:e} above {bound:e}",
            spectrum.eigenvalues[i]
        )));
    }
    Ok(spectrum)
}

fn select_indices(values: &[Complex64], k: usize, select: Selection) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    match select {
        Selection::SmallestRe => idx.sort_by(|&a, &b| values[a].re.total_cmp(&values[b].re)),
        Selection::SmallestAbsRe => idx.sort_by(|&a, &b| values[a].re.abs().total_cmp(&values[b].re.abs())),
    }
    idx.truncate(k);
    idx
}

fn dense_pairs(op: &BandedComplexOperator, k: usize, select: Selection) -> Result<Vec<(Complex64, Vec<Complex64>)>> {
    let evd = to_faer(op)
        .eigen()
        .map_err(|e| PdmError::Eigen(format!("dense eigendecomposition did not converge ({e:?}), dim {}", op.dim())))?;
    let s = evd.S().column_vector();
    let u = evd.U();
    let values: Vec<Complex64> = (0..op.dim()).map(|i| s[i]).collect();
    Ok(select_indices(&values, k, select)
        .into_iter()
        .map(|j| (values[j], (0..op.dim()).map(|i| u[(i, j)]).collect()))
        .collect())
}

/// Hermitian tridiagonal matrix: real diagonal, complex off-diagonal.
struct HermitianTridiagonal {
    diag: Vec<f64>,
    off: Vec<Complex64>,
}

impl HermitianTridiagonal {
    fn from_operator(op: &BandedComplexOperator) -> Option<Self> {
        if op.offsets().any(|k| k.abs() > 1) {
            return None;
        }
        let n = op.dim();
        let scale = op.max_abs().max(f64::MIN_POSITIVE);
        let tol = 1e-14 * scale;
        let mut diag = Vec::with_capacity(n);
        let mut off = Vec::with_capacity(n.saturating_sub(1));
        for i in 0..n {
            let d = op.get(i, i);
            if d.im.abs() > tol {
                return None;
            }
            diag.push(d.re);
            if i + 1 < n {
                let upper = op.get(i, i + 1);
                let lower = op.get(i + 1, i);
                if (upper - lower.conj()).norm() > tol {
                    return None;
                }
                off.push(upper);
            }
        }
        Some(HermitianTridiagonal { diag, off })
    }

    fn len(&self) -> usize {
        self.diag.len()
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.off[i - 1].norm() } else { 0.0 } + if i + 1 < n { self.off[i].norm() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// Number of eigenvalues strictly below `x` (Sturm sequence).
    fn count_below(&self, x: f64) -> usize {
        let pivmin = f64::MIN_POSITIVE.sqrt();
        let mut count = 0;
        let mut q = self.diag[0] - x;
        for i in 0..self.len() {
            if i > 0 {
                q = self.diag[i] - x - self.off[i - 1].norm_sqr() / q;
            }
            if q.abs() < pivmin {
                q = -pivmin;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// The `j`-th smallest eigenvalue (0-based) by bisection.
    fn kth_eigenvalue(&self, j: usize) -> f64 {
        let (mut lo, mut hi) = self.gershgorin();
        let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if hi - lo <= 4.0 * f64::EPSILON * scale || mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > j {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Eigenvector for `lambda` by inverse iteration on the real symmetric
    /// form, then rotated back by the off-diagonal phases.
    fn eigenvector(&self, lambda: f64) -> Vec<Complex64> {
        let n = self.len();
        let b: Vec<f64> = self.off.iter().map(|z| z.norm()).collect();
        let (glo, ghi) = self.gershgorin();
        let floor = f64::EPSILON * glo.abs().max(ghi.abs()).max(1.0);
        // Deterministic, non-degenerate start vector.
        let mut u: Vec<f64> = (0..n).map(|i| 1.0 + 0.5 * ((i as f64) * 0.618_033_988_749_895).fract()).collect();
        for _ in 0..3 {
            u = solve_shifted_tridiagonal(&self.diag, &b, lambda, &u, floor);
            let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
            for x in u.iter_mut() {
                *x /= norm;
            }
        }
        let mut phase = Complex64::new(1.0, 0.0);
        let mut v = Vec::with_capacity(n);
        for i in 0..n {
            v.push(phase * u[i]);
            if i + 1 < n && b[i] > 0.0 {
                phase = self.off[i].conj() * phase / b[i];
            }
        }
        v
    }

    fn solve(&self, k: usize, select: Selection) -> Vec<(Complex64, Vec<Complex64>)> {
        let n = self.len();
        let indices: Vec<usize> = match select {
            Selection::SmallestRe => (0..k).collect(),
            Selection::SmallestAbsRe => {
                let neg = self.count_below(0.0);
                let lo = neg.saturating_sub(k);
                let hi = (neg + k).min(n);
                let mut cand: Vec<(usize, f64)> = (lo..hi).map(|j| (j, self.kth_eigenvalue(j))).collect();
                cand.sort_by(|a, b| a.1.abs().total_cmp(&b.1.abs()));
                cand.truncate(k);
                cand.into_iter().map(|c| c.0).collect()
            }
        };
        indices
            .into_iter()
            .map(|j| {
                let lambda = self.kth_eigenvalue(j);
                (Complex64::new(lambda, 0.0), self.eigenvector(lambda))
            })
            .collect()
    }
}

/// Solves `(T - shift) x = rhs` for symmetric tridiagonal `T` with partial pivoting.
fn solve_shifted_tridiagonal(diag: &[f64], off: &[f64], shift: f64, rhs: &[f64], floor: f64) -> Vec<f64> {
    let n = diag.len();
    // Rows stored as (l, d, u, u2) bands after pivoting.
    let mut d: Vec<f64> = diag.iter().map(|x| x - shift).collect();
    let mut du: Vec<f64> = off.to_vec();
    du.push(0.0);
    let mut dl: Vec<f64> = off.to_vec();
    let mut du2 = vec![0.0; n];
    let mut x = rhs.to_vec();
    for i in 0..n.saturating_sub(1) {
        if d[i].abs() >= dl[i].abs() {
            if d[i].abs() < floor {
                d[i] = floor;
            }
            let f = dl[i] / d[i];
            d[i + 1] -= f * du[i];
            x[i + 1] -= f * x[i];
            dl[i] = 0.0;
        } else {
            let f = d[i] / dl[i];
            d[i] = dl[i];
            let tmp = d[i + 1];
            d[i + 1] = du[i] - f * tmp;
            du2[i] = du[i + 1];
            du[i + 1] *= -f;
            du[i] = tmp;
            x.swap(i, i + 1);
            x[i + 1] -= f * x[i];
        }
    }
    if d[n - 1].abs() < floor {
        d[n - 1] = floor;
    }
    x[n - 1] /= d[n - 1];
    if n > 1 {
        x[n - 2] = (x[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2];
    }
    for i in (0..n.saturating_sub(2)).rev() {
        x[i] = (x[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i];
    }
    x
}
