//! von Roos kinetic orderings, the Foldy–Wouthuysen generator and matrix-level
//! checks of the non-relativistic reduction.
//!
//! Operator products are formed left to right in the order the factors are
//! written, with no stencil fusion.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::discretization::{
    first_derivative_operator, momentum_operator, second_derivative_operator, BandedComplexOperator, Boundary,
    Grid,
};
use crate::error::{PdmError, Result};
use crate::potentials::mass_samples;
use crate::profiles::MassProfile;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Mass-scale multipliers used by [`commutator_checks`].
pub const MASS_SCALE_SWEEP: [f64; 4] = [1.0, 2.0, 4.0, 8.0];

/// Tolerance on α + β + γ = −1.
pub const ORDERING_CONSTRAINT_TOL: f64 = 1e-12;

/// Hermiticity parameters of the von Roos kinetic operator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderingParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl OrderingParams {
    pub const BEN_DANIEL_DUKE: OrderingParams = OrderingParams { alpha: 0.0, beta: -1.0, gamma: 0.0 };
    pub const GORA_WILLIAMS: OrderingParams = OrderingParams { alpha: -1.0, beta: 0.0, gamma: 0.0 };
    pub const ZHU_KROEMER: OrderingParams = OrderingParams { alpha: -0.5, beta: 0.0, gamma: -0.5 };
    pub const LI_KUHN: OrderingParams = OrderingParams { alpha: 0.0, beta: -0.5, gamma: -0.5 };

    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        let o = OrderingParams { alpha, beta, gamma };
        o.validate()?;
        Ok(o)
    }

    pub fn validate(&self) -> Result<()> {
        let sum = self.alpha + self.beta + self.gamma;
        if !sum.is_finite() || (sum + 1.0).abs() > ORDERING_CONSTRAINT_TOL {
            return Err(PdmError::InvalidParameter(format!(
                "ordering parameters must satisfy alpha + beta + gamma = -1, got {sum}"
            )));
        }
        Ok(())
    }

    /// α and γ exchanged; the symmetrized operator is unchanged.
    pub fn mirrored(&self) -> Self {
        OrderingParams { alpha: self.gamma, beta: self.beta, gamma: self.alpha }
    }
}

/// The four literature orderings with their usual names.
pub const NAMED_ORDERINGS: [(&str, OrderingParams); 4] = [
    ("BenDaniel-Duke", OrderingParams::BEN_DANIEL_DUKE),
    ("Gora-Williams", OrderingParams::GORA_WILLIAMS),
    ("Zhu-Kroemer", OrderingParams::ZHU_KROEMER),
    ("Li-Kuhn", OrderingParams::LI_KUHN),
];

fn mass_power(m: &[f64], e: f64, grid: Grid, boundary: Boundary) -> Result<BandedComplexOperator> {
    let v: Vec<f64> = m.iter().map(|x| x.powf(e)).collect();
    BandedComplexOperator::real_diagonal(grid, boundary, &v)
}

fn product(factors: &[&BandedComplexOperator]) -> Result<BandedComplexOperator> {
    let (first, rest) = factors.split_first().expect("at least one factor");
    rest.iter().try_fold((*first).clone(), |acc, f| acc.matmul(f))
}

/// `¼[m^α p m^β p m^γ + m^γ p m^β p m^α]` on the grid.
pub fn von_roos_keo(
    p: &MassProfile,
    ord: OrderingParams,
    grid: &Grid,
    boundary: Boundary,
) -> Result<BandedComplexOperator> {
    ord.validate()?;
    let s = mass_samples(p, grid)?;
    let mom = momentum_operator(*grid, boundary);
    let ma = mass_power(&s.m, ord.alpha, *grid, boundary)?;
    let mb = mass_power(&s.m, ord.beta, *grid, boundary)?;
    let mg = mass_power(&s.m, ord.gamma, *grid, boundary)?;
    let left = product(&[&ma, &mom, &mb, &mom, &mg])?;
    let right = product(&[&mg, &mom, &mb, &mom, &ma])?;
    Ok(left.add(&right)?.scale(c(0.25)))
}

/// Li–Kuhn Hamiltonian `¼(m^{-½} p m^{-½} p + p m^{-½} p m^{-½}) + V`, built
/// directly from its two products rather than through [`von_roos_keo`].
pub fn nonrelativistic_hamiltonian(
    p: &MassProfile,
    v_real: &[f64],
    grid: &Grid,
    boundary: Boundary,
) -> Result<BandedComplexOperator> {
    if v_real.len() != grid.len() {
        return Err(PdmError::LengthMismatch { expected: grid.len(), found: v_real.len() });
    }
    if let Some(bad) = v_real.iter().find(|v| !v.is_finite()) {
        return Err(PdmError::InvalidParameter(format!("potential value {bad} is not finite")));
    }
    let s = mass_samples(p, grid)?;
    let mom = momentum_operator(*grid, boundary);
    let inv_sqrt: Vec<f64> = s.m.iter().map(|m| 1.0 / m.sqrt()).collect();
    let r = BandedComplexOperator::real_diagonal(*grid, boundary, &inv_sqrt)?;
    let first = product(&[&r, &mom, &r, &mom])?;
    let second = product(&[&mom, &r, &mom, &r])?;
    let v = BandedComplexOperator::real_diagonal(*grid, boundary, v_real)?;
    first.add(&second)?.scale(c(0.25)).add(&v)
}

/// `S = −(i/2) m^{-½} βα p m^{-½}` as a spinor operator. In the fixed
/// representation βα = [[0, −1], [1, 0]], so S = ½[[0, K], [−K, 0]].
pub fn s_operator(p: &MassProfile, grid: &Grid, boundary: Boundary) -> Result<BandedComplexOperator> {
    let s = mass_samples(p, grid)?;
    let inv_sqrt: Vec<f64> = s.m.iter().map(|x| 1.0 / x.sqrt()).collect();
    let r = BandedComplexOperator::real_diagonal(*grid, boundary, &inv_sqrt)?;
    let mom = momentum_operator(*grid, boundary);
    let beta_alpha = [[c(0.0), c(-1.0)], [c(1.0), c(0.0)]];
    let inner = BandedComplexOperator::kron_spinor(beta_alpha, &mom)?;
    let r2 = BandedComplexOperator::kron_spinor([[c(1.0), c(0.0)], [c(0.0), c(1.0)]], &r)?;
    Ok(product(&[&r2, &inner, &r2])?.scale(-0.5 * I))
}

/// `βm` for the fixed representation.
pub fn beta_mass(p: &MassProfile, grid: &Grid, boundary: Boundary) -> Result<BandedComplexOperator> {
    let s = mass_samples(p, grid)?;
    let m = BandedComplexOperator::real_diagonal(*grid, boundary, &s.m)?;
    BandedComplexOperator::from_blocks([[None, Some(&m)], [Some(&m), None]])
}

/// `αp` for the fixed representation.
pub fn alpha_momentum(grid: &Grid, boundary: Boundary) -> Result<BandedComplexOperator> {
    let mom = momentum_operator(*grid, boundary);
    BandedComplexOperator::kron_spinor([[c(1.0), c(0.0)], [c(0.0), c(-1.0)]], &mom)
}

/// `A ⊗ β` for a scalar operator `A`.
pub fn times_beta(op: &BandedComplexOperator) -> Result<BandedComplexOperator> {
    BandedComplexOperator::kron_spinor([[c(0.0), c(1.0)], [c(1.0), c(0.0)]], op)
}

/// The generator and the two commutator terms of the expansion about βm.
#[derive(Debug, Clone)]
pub struct FwOperators {
    pub s: BandedComplexOperator,
    pub beta_m: BandedComplexOperator,
    /// `[S, βm]`
    pub c1: BandedComplexOperator,
    /// `−½[S, [S, βm]]`
    pub c2: BandedComplexOperator,
}

pub fn fw_operators(p: &MassProfile, grid: &Grid, boundary: Boundary) -> Result<FwOperators> {
    let s = s_operator(p, grid, boundary)?;
    let beta_m = beta_mass(p, grid, boundary)?;
    let c1 = s.commutator(&beta_m)?;
    let c2 = s.commutator(&c1)?.scale(c(-0.5));
    Ok(FwOperators { s, beta_m, c1, c2 })
}

/// The expanded second-order term `(1/2m)d² − (m'/2m²)d − m''/(8m²)` with the
/// `m'²/(4m³)` contribution dropped, as a scalar operator.
pub fn truncated_kinetic_expansion(
    p: &MassProfile,
    grid: &Grid,
    boundary: Boundary,
) -> Result<BandedComplexOperator> {
    let s = mass_samples(p, grid)?;
    let xs = grid.nodes();
    let c2: Vec<f64> = s.m.iter().map(|m| -0.5 / m).collect();
    let c1: Vec<f64> = xs.iter().zip(&s.m).map(|(&x, m)| -p.dm(x) / (2.0 * m * m)).collect();
    let c0: Vec<f64> = s.d2m.iter().zip(&s.m).map(|(d2, m)| -d2 / (8.0 * m * m)).collect();
    let d2 = BandedComplexOperator::real_diagonal(*grid, boundary, &c2)?.matmul(&second_derivative_operator(*grid, boundary))?;
    let d1 = BandedComplexOperator::real_diagonal(*grid, boundary, &c1)?.matmul(&first_derivative_operator(*grid, boundary))?;
    d2.add(&d1)?.add(&BandedComplexOperator::real_diagonal(*grid, boundary, &c0)?)
}

/// Smooth spinor test functions localized inside the window.
fn probes(grid: &Grid, lo: f64, hi: f64) -> Vec<Vec<Complex64>> {
    let width = 0.1 * (hi - lo);
    let centers = [lo + 0.3 * (hi - lo), 0.5 * (lo + hi), lo + 0.7 * (hi - lo)];
    let mut out = Vec::new();
    for &x0 in &centers {
        for &k in &[0.0, 1.0] {
            let f: Vec<Complex64> = grid
                .nodes()
                .iter()
                .map(|&x| {
                    let u = (x - x0) / width;
                    Complex64::from_polar((-0.5 * u * u).exp(), k * x)
                })
                .collect();
            for comp in 0..2 {
                let mut v = vec![c(0.0); 2 * f.len()];
                for (i, z) in f.iter().enumerate() {
                    v[2 * i + comp] = *z;
                }
                out.push(v);
            }
        }
    }
    out
}

fn window_max(v: &[Complex64], nodes: &std::ops::Range<usize>) -> f64 {
    v.iter()
        .enumerate()
        .filter(|(i, _)| nodes.contains(&(i / 2)))
        .map(|(_, z)| z.norm())
        .fold(0.0, f64::max)
}

/// Largest window-restricted action of `defect` on the probes, absolute and
/// relative to the action of `scale`.
fn action_deviation(
    defect: &BandedComplexOperator,
    scale: &BandedComplexOperator,
    probes: &[Vec<Complex64>],
    nodes: &std::ops::Range<usize>,
) -> Result<(f64, f64)> {
    let mut abs = 0.0f64;
    let mut rel = 0.0f64;
    for f in probes {
        let d = window_max(&defect.apply(f)?, nodes);
        let s = window_max(&scale.apply(f)?, nodes);
        abs = abs.max(d);
        rel = rel.max(d / s);
    }
    Ok((abs, rel))
}

/// Deviations measured on one profile. Relative values divide the action of
/// the defect on smooth probes by the action of βm on the same probes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CommutatorDeviations {
    pub mass_max: f64,
    /// `i[S, βm] + αp`
    pub c1_deviation: f64,
    pub c1_absolute: f64,
    /// `−½[S,[S,βm]] + K_LiKuhn ⊗ β`
    pub c2_deviation: f64,
    pub c2_absolute: f64,
    /// `−½[S,[S,βm]]` against the truncated expansion times β
    pub c2_truncation: f64,
    /// `i[S, αp + βm] + αp`, i.e. with the full free Hamiltonian
    pub full_h_residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub mass_scale: f64,
    #[serde(flatten)]
    pub deviations: CommutatorDeviations,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommutatorReport {
    pub window: [f64; 2],
    pub window_nodes: usize,
    pub c1_deviation: f64,
    pub c2_deviation: f64,
    pub c2_truncation: f64,
    pub full_h_residual: f64,
    pub mass_scale_sweep: Vec<SweepPoint>,
}

fn window_nodes(grid: &Grid, window: (f64, f64)) -> Result<std::ops::Range<usize>> {
    let (lo, hi) = window;
    if !(lo < hi) || lo < grid.x_lo() || hi > grid.x_hi() {
        return Err(PdmError::InvalidParameter(format!(
            "window [{lo}, {hi}] must be a proper sub-interval of [{}, {}]",
            grid.x_lo(),
            grid.x_hi()
        )));
    }
    let nodes = grid.window(lo, hi);
    // The double commutator reaches two nodes to each side.
    if nodes.len() < 8 || nodes.start < 2 || nodes.end + 2 > grid.len() {
        return Err(PdmError::Precondition(format!(
            "window [{lo}, {hi}] is too thin or too close to the grid edge ({} nodes)",
            nodes.len()
        )));
    }
    Ok(nodes)
}

/// Deviations for a single profile on `window`.
pub fn commutator_deviations(p: &MassProfile, grid: &Grid, window: (f64, f64)) -> Result<CommutatorDeviations> {
    let boundary = Boundary::Dirichlet;
    let nodes = window_nodes(grid, window)?;
    let ops = fw_operators(p, grid, boundary)?;
    let ap = alpha_momentum(grid, boundary)?;
    let probes = probes(grid, window.0, window.1);

    let d1 = ops.c1.scale(I).add(&ap)?;
    let (c1_absolute, c1_deviation) = action_deviation(&d1, &ops.beta_m, &probes, &nodes)?;

    let keo = von_roos_keo(p, OrderingParams::LI_KUHN, grid, boundary)?;
    let d2 = ops.c2.add(&times_beta(&keo)?)?;
    let (c2_absolute, c2_deviation) = action_deviation(&d2, &ops.beta_m, &probes, &nodes)?;

    let expanded = times_beta(&truncated_kinetic_expansion(p, grid, boundary)?)?;
    let (_, c2_truncation) = action_deviation(&ops.c2.sub(&expanded)?, &ops.beta_m, &probes, &nodes)?;

    let h = ap.add(&ops.beta_m)?;
    let full = ops.s.commutator(&h)?.scale(I).add(&ap)?;
    let (_, full_h_residual) = action_deviation(&full, &ops.beta_m, &probes, &nodes)?;

    let mass_max = grid.nodes()[nodes.clone()].iter().map(|&x| p.m(x)).fold(0.0, f64::max);
    Ok(CommutatorDeviations {
        mass_max,
        c1_deviation,
        c1_absolute,
        c2_deviation,
        c2_absolute,
        c2_truncation,
        full_h_residual,
    })
}

/// Deviations for `p` and for `p` scaled by each entry of
/// [`MASS_SCALE_SWEEP`], evaluated in parallel.
pub fn commutator_checks(p: &MassProfile, grid: &Grid, window: (f64, f64)) -> Result<CommutatorReport> {
    let nodes = window_nodes(grid, window)?;
    let scaled: Vec<MassProfile> =
        MASS_SCALE_SWEEP.iter().map(|&f| p.scaled(f)).collect::<Result<_>>()?;
    let results: Vec<Result<CommutatorDeviations>> = std::thread::scope(|scope| {
        let handles: Vec<_> = scaled
            .iter()
            .map(|q| scope.spawn(move || commutator_deviations(q, grid, window)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("sweep worker panicked")).collect()
    });
    let mut sweep = Vec::with_capacity(results.len());
    for (&mass_scale, r) in MASS_SCALE_SWEEP.iter().zip(results) {
        sweep.push(SweepPoint { mass_scale, deviations: r? });
    }
    let base = sweep[0].deviations;
    Ok(CommutatorReport {
        window: [window.0, window.1],
        window_nodes: nodes.len(),
        c1_deviation: base.c1_deviation,
        c2_deviation: base.c2_deviation,
        c2_truncation: base.c2_truncation,
        full_h_residual: base.full_h_residual,
        mass_scale_sweep: sweep,
    })
}
