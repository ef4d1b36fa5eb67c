//! Banded complex operators in diagonal storage.
//!
//! Spinor operators interleave the two components node by node
//! (`index = 2 * node + component`), which keeps the coupled Dirac operator
//! banded. Periodic wrap-around couplings simply live on the far
//! diagonals `±(dim - block)`.

use std::collections::BTreeMap;
use std::io::Write;
use std::ops::Range;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::grid::Grid;
use crate::error::{PdmError, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Dirichlet,
    Periodic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BandedComplexOperator {
    grid: Grid,
    block_size: usize,
    boundary: Boundary,
    /// Diagonal offset (column - row) to entries, indexed from the first valid row.
    diags: BTreeMap<isize, Vec<Complex64>>,
}

#[inline]
fn first_row(k: isize) -> usize {
    if k < 0 {
        (-k) as usize
    } else {
        0
    }
}

#[inline]
fn diag_len(dim: usize, k: isize) -> usize {
    dim.saturating_sub(k.unsigned_abs())
}

impl BandedComplexOperator {
    pub fn zeros(grid: Grid, block_size: usize, boundary: Boundary) -> Result<Self> {
        if block_size != 1 && block_size != 2 {
            return Err(PdmError::InvalidParameter(format!("block size must be 1 or 2, got {block_size}")));
        }
        Ok(BandedComplexOperator { grid, block_size, boundary, diags: BTreeMap::new() })
    }

    /// Diagonal operator with the given entries.
    pub fn diagonal(grid: Grid, block_size: usize, boundary: Boundary, values: Vec<Complex64>) -> Result<Self> {
        let mut op = Self::zeros(grid, block_size, boundary)?;
        if values.len() != op.dim() {
            return Err(PdmError::LengthMismatch { expected: op.dim(), found: values.len() });
        }
        op.diags.insert(0, values);
        Ok(op)
    }

    /// Scalar diagonal operator built from real node values.
    pub fn real_diagonal(grid: Grid, boundary: Boundary, values: &[f64]) -> Result<Self> {
        Self::diagonal(grid, 1, boundary, values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn identity(grid: Grid, block_size: usize, boundary: Boundary) -> Result<Self> {
        let dim = grid.len() * block_size;
        Self::diagonal(grid, block_size, boundary, vec![Complex64::new(1.0, 0.0); dim])
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn block_size(&self) -> usize {
        self.block_size
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn dim(&self) -> usize {
        self.grid.len() * self.block_size
    }

    /// Offsets of the stored diagonals.
    pub fn offsets(&self) -> impl Iterator<Item = isize> + '_ {
        self.diags.keys().copied()
    }

    pub fn bandwidth(&self) -> usize {
        self.diags.keys().map(|k| k.unsigned_abs()).max().unwrap_or(0)
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        let k = col as isize - row as isize;
        self.diags.get(&k).map_or(ZERO, |d| d[row - first_row(k)])
    }

    pub fn add_entry(&mut self, row: usize, col: usize, value: Complex64) {
        let dim = self.dim();
        assert!(row < dim && col < dim, "entry ({row}, {col}) outside {dim}x{dim} operator");
        let k = col as isize - row as isize;
        let d = self.diags.entry(k).or_insert_with(|| vec![ZERO; diag_len(dim, k)]);
        d[row - first_row(k)] += value;
    }

    /// Visits every stored entry as `(row, col, value)`.
    pub fn for_each_entry(&self, mut f: impl FnMut(usize, usize, Complex64)) {
        for (&k, d) in &self.diags {
            let r0 = first_row(k);
            for (t, &v) in d.iter().enumerate() {
                let r = r0 + t;
                f(r, (r as isize + k) as usize, v);
            }
        }
    }

    pub fn triplets(&self) -> Vec<(usize, usize, Complex64)> {
        let mut out = Vec::new();
        self.for_each_entry(|r, c, v| {
            if v != ZERO {
                out.push((r, c, v));
            }
        });
        out.sort_by_key(|t| (t.0, t.1));
        out
    }

    /// Plain-text triplet dump: one `row col re im` line per nonzero.
    pub fn write_triplets<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "# dim {} block {}", self.dim(), self.block_size)?;
        for (r, c, v) in self.triplets() {
            writeln!(w, "{r} {c} {:.17e} {:.17e}", v.re, v.im)?;
        }
        Ok(())
    }

    pub fn to_dense(&self) -> Vec<Vec<Complex64>> {
        let dim = self.dim();
        let mut m = vec![vec![ZERO; dim]; dim];
        self.for_each_entry(|r, c, v| m[r][c] += v);
        m
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len == self.dim() {
            Ok(())
        } else {
            Err(PdmError::LengthMismatch { expected: self.dim(), found: len })
        }
    }

    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_len(v.len())?;
        let mut out = vec![ZERO; v.len()];
        for (&k, d) in &self.diags {
            let r0 = first_row(k);
            for (t, &a) in d.iter().enumerate() {
                let r = r0 + t;
                out[r] += a * v[(r as isize + k) as usize];
            }
        }
        Ok(out)
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid || self.block_size != other.block_size {
            return Err(PdmError::Precondition("operators live on different grids or block sizes".into()));
        }
        Ok(())
    }

    fn combine(&self, other: &Self, sign: f64) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (&k, d) in &other.diags {
            let dim = out.dim();
            let target = out.diags.entry(k).or_insert_with(|| vec![ZERO; diag_len(dim, k)]);
            for (t, &v) in target.iter_mut().zip(d) {
                *t += v * sign;
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(other, 1.0)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(other, -1.0)
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        let mut out = self.clone();
        for d in out.diags.values_mut() {
            for v in d.iter_mut() {
                *v *= factor;
            }
        }
        out
    }

    /// Matrix product `self * other`.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let dim = self.dim() as isize;
        let mut out = Self::zeros(self.grid, self.block_size, self.boundary)?;
        for (&ka, da) in &self.diags {
            for (&kb, db) in &other.diags {
                let k = ka + kb;
                if k.abs() >= dim {
                    continue;
                }
                // Rows r with r + ka in range and r + ka + kb in range.
                let lo = 0.max(-ka).max(-k);
                let hi = dim.min(dim - ka).min(dim - k);
                if lo >= hi {
                    continue;
                }
                let target = out.diags.entry(k).or_insert_with(|| vec![ZERO; diag_len(dim as usize, k)]);
                let ra = first_row(ka) as isize;
                let rb = first_row(kb) as isize;
                let rk = first_row(k) as isize;
                for r in lo..hi {
                    let a = da[(r - ra) as usize];
                    let b = db[(r + ka - rb) as usize];
                    target[(r - rk) as usize] += a * b;
                }
            }
        }
        Ok(out)
    }

    /// Commutator `self * other - other * self`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.matmul(other)?.sub(&other.matmul(self)?)
    }

    /// Elementwise complex conjugate.
    pub fn conj(&self) -> Self {
        let mut out = self.clone();
        for d in out.diags.values_mut() {
            for v in d.iter_mut() {
                *v = v.conj();
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut out = BandedComplexOperator { diags: BTreeMap::new(), ..self.clone() };
        self.for_each_entry(|r, c, v| out.add_entry(c, r, v));
        out
    }

    pub fn adjoint(&self) -> Self {
        self.transpose().conj()
    }

    fn map_indices(&self, map: impl Fn(usize) -> usize, weight: impl Fn(usize, usize) -> f64) -> Self {
        let mut out = BandedComplexOperator { diags: BTreeMap::new(), ..self.clone() };
        self.for_each_entry(|r, c, v| out.add_entry(map(r), map(c), v * weight(r, c)));
        out
    }

    /// `P A P` with `P` the node reversal x -> -x (spinor components kept).
    pub fn parity_reversed(&self) -> Self {
        let n = self.grid.len();
        let b = self.block_size;
        self.map_indices(|i| (n - 1 - i / b) * b + i % b, |_, _| 1.0)
    }

    /// `G A G` with `G = diag(1, -1)` acting on the spinor components.
    pub fn sigma3_conjugated(&self) -> Result<Self> {
        if self.block_size != 2 {
            return Err(PdmError::Precondition("sigma3 conjugation needs a spinor operator".into()));
        }
        let s = |i: usize| if i.is_multiple_of(2) { 1.0 } else { -1.0 };
        Ok(self.map_indices(|i| i, |r, c| s(r) * s(c)))
    }

    /// Assembles a spinor operator from 2x2 scalar blocks (missing blocks are zero).
    pub fn from_blocks(blocks: [[Option<&Self>; 2]; 2]) -> Result<Self> {
        let first = blocks
            .iter()
            .flatten()
            .flatten()
            .next()
            .ok_or_else(|| PdmError::InvalidParameter("no blocks supplied".into()))?;
        let mut out = Self::zeros(first.grid, 2, first.boundary)?;
        for (p, row) in blocks.iter().enumerate() {
            for (q, block) in row.iter().enumerate() {
                if let Some(op) = block {
                    if op.block_size != 1 || op.grid != first.grid {
                        return Err(PdmError::Precondition("blocks must be scalar operators on one grid".into()));
                    }
                    op.for_each_entry(|r, c, v| out.add_entry(2 * r + p, 2 * c + q, v));
                }
            }
        }
        Ok(out)
    }

    /// `M ⊗ A`: a constant 2x2 spinor matrix times a scalar operator.
    pub fn kron_spinor(spinor: [[Complex64; 2]; 2], op: &Self) -> Result<Self> {
        if op.block_size != 1 {
            return Err(PdmError::Precondition("kron_spinor expects a scalar operator".into()));
        }
        let mut out = Self::zeros(op.grid, 2, op.boundary)?;
        for (p, row) in spinor.iter().enumerate() {
            for (q, &s) in row.iter().enumerate() {
                if s != ZERO {
                    op.for_each_entry(|r, c, v| out.add_entry(2 * r + p, 2 * c + q, s * v));
                }
            }
        }
        Ok(out)
    }

    /// Scalar block `(p, q)` of a spinor operator.
    pub fn block(&self, p: usize, q: usize) -> Result<Self> {
        if self.block_size != 2 || p > 1 || q > 1 {
            return Err(PdmError::Precondition("block extraction needs a spinor operator".into()));
        }
        let mut out = Self::zeros(self.grid, 1, self.boundary)?;
        self.for_each_entry(|r, c, v| {
            if r % 2 == p && c % 2 == q {
                out.add_entry(r / 2, c / 2, v);
            }
        });
        Ok(out)
    }

    pub fn max_abs(&self) -> f64 {
        self.diags.values().flatten().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest entry whose row and column nodes both fall in `nodes`.
    pub fn max_abs_in_window(&self, nodes: Range<usize>) -> f64 {
        let b = self.block_size;
        let mut best = 0.0f64;
        self.for_each_entry(|r, c, v| {
            if nodes.contains(&(r / b)) && nodes.contains(&(c / b)) {
                best = best.max(v.norm());
            }
        });
        best
    }

    /// Entries restricted to a node window, as a new operator (others dropped).
    pub fn restricted_to_window(&self, nodes: Range<usize>) -> Self {
        let b = self.block_size;
        let mut out = BandedComplexOperator { diags: BTreeMap::new(), ..self.clone() };
        self.for_each_entry(|r, c, v| {
            if nodes.contains(&(r / b)) && nodes.contains(&(c / b)) {
                out.add_entry(r, c, v);
            }
        });
        out
    }

    /// Max |A - A^H| over all entries.
    pub fn hermiticity_defect(&self) -> f64 {
        self.sub(&self.adjoint()).map(|d| d.max_abs()).unwrap_or(f64::INFINITY)
    }

    /// Drops diagonals that are identically zero.
    pub fn pruned(mut self) -> Self {
        self.diags.retain(|_, d| d.iter().any(|v| *v != ZERO));
        self
    }
}

/// Central stencil `(-1, 2, -1) / h^2` for `-d²/dx²`.
pub fn second_derivative_operator(grid: Grid, boundary: Boundary) -> BandedComplexOperator {
    let n = grid.len();
    let inv_h2 = 1.0 / (grid.spacing() * grid.spacing());
    let mut op = BandedComplexOperator::zeros(grid, 1, boundary).expect("scalar block size");
    for i in 0..n {
        op.add_entry(i, i, Complex64::new(2.0 * inv_h2, 0.0));
        if i + 1 < n {
            op.add_entry(i, i + 1, Complex64::new(-inv_h2, 0.0));
            op.add_entry(i + 1, i, Complex64::new(-inv_h2, 0.0));
        }
    }
    if boundary == Boundary::Periodic {
        op.add_entry(0, n - 1, Complex64::new(-inv_h2, 0.0));
        op.add_entry(n - 1, 0, Complex64::new(-inv_h2, 0.0));
    }
    op
}

/// Central stencil `(-1, 0, 1) / (2h)` for `d/dx`.
pub fn first_derivative_operator(grid: Grid, boundary: Boundary) -> BandedComplexOperator {
    let n = grid.len();
    let c = 0.5 / grid.spacing();
    let mut op = BandedComplexOperator::zeros(grid, 1, boundary).expect("scalar block size");
    for i in 0..n - 1 {
        op.add_entry(i, i + 1, Complex64::new(c, 0.0));
        op.add_entry(i + 1, i, Complex64::new(-c, 0.0));
    }
    if boundary == Boundary::Periodic {
        op.add_entry(0, n - 1, Complex64::new(-c, 0.0));
        op.add_entry(n - 1, 0, Complex64::new(c, 0.0));
    }
    op
}

/// Momentum `p = -i d/dx`.
pub fn momentum_operator(grid: Grid, boundary: Boundary) -> BandedComplexOperator {
    first_derivative_operator(grid, boundary).scale(Complex64::new(0.0, -1.0))
}
