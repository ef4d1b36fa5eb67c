use serde::{Deserialize, Serialize};

use crate::error::{PdmError, Result};

/// Uniform grid of `n` nodes from `x_lo` to `x_hi` inclusive.
///
/// Nodes are generated symmetrically about the midpoint, so a grid with
/// `x_lo == -x_hi` satisfies `node(i) == -node(n - 1 - i)` exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    x_lo: f64,
    x_hi: f64,
    n: usize,
    h: f64,
    mid: f64,
}

impl Grid {
    pub fn new(x_lo: f64, x_hi: f64, n: usize) -> Result<Self> {
        if n < 3 {
            return Err(PdmError::InvalidParameter(format!("grid needs at least 3 nodes, got {n}")));
        }
        if !(x_lo.is_finite() && x_hi.is_finite() && x_lo < x_hi) {
            return Err(PdmError::InvalidParameter(format!("invalid grid interval [{x_lo}, {x_hi}]")));
        }
        let h = (x_hi - x_lo) / (n - 1) as f64;
        Ok(Grid { x_lo, x_hi, n, h, mid: 0.5 * (x_lo + x_hi) })
    }

    /// `n` interior nodes of `[lo, hi]`, spacing `(hi - lo) / (n + 1)`.
    ///
    /// This is the natural grid for Dirichlet problems: the wave function
    /// vanishes at `lo` and `hi`, which are one spacing beyond the end nodes.
    pub fn interior(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if n < 3 {
            return Err(PdmError::InvalidParameter(format!("grid needs at least 3 nodes, got {n}")));
        }
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(PdmError::InvalidParameter(format!("invalid grid interval [{lo}, {hi}]")));
        }
        let h = (hi - lo) / (n + 1) as f64;
        Ok(Grid { x_lo: lo + h, x_hi: hi - h, n, h, mid: 0.5 * (lo + hi) })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    pub fn x_lo(&self) -> f64 {
        self.x_lo
    }

    pub fn x_hi(&self) -> f64 {
        self.x_hi
    }

    #[inline]
    pub fn node(&self, i: usize) -> f64 {
        let offset = (2.0 * i as f64 - (self.n - 1) as f64) * (0.5 * self.h);
        self.mid + offset
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.node(i)).collect()
    }

    /// True when the node set is mirror-symmetric about x = 0.
    pub fn is_symmetric(&self) -> bool {
        self.mid == 0.0
    }

    /// Index range of nodes inside `[lo, hi]`.
    pub fn window(&self, lo: f64, hi: f64) -> std::ops::Range<usize> {
        let first = (0..self.n).find(|&i| self.node(i) >= lo).unwrap_or(self.n);
        let end = (0..self.n).rev().find(|&i| self.node(i) <= hi).map_or(0, |i| i + 1);
        first..end.max(first)
    }
}
