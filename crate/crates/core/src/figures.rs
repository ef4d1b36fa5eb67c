//! Data for the figure set: mass profiles, potentials, linear-mass
//! eigenfunctions and a free state of the hyperbolic barrier.

use crate::cli::FiguresCmd;
use crate::discretization::Grid;
use crate::error::{PdmError, Result};
use crate::harmonic::analytic_eigenfunction;
use crate::heun::free_state;
use crate::potentials::{effective_potential_general, schrodingerizing_potential};
use crate::profiles::MassProfile;
use crate::svg::{Figure, Series};

/// Right end of the linear-mass plots.
const LINEAR_X_MAX: f64 = 5.0;
/// V² diverges at x = 0, so its plot starts here.
const LINEAR_V2_X_MIN: f64 = 0.25;
/// Half-width of the hyperbolic plots.
const HYPERBOLIC_HALF_WIDTH: f64 = 10.0;

fn figure(title: &str, y_label: &str, y_unit: &str, series: Vec<Series>) -> Figure {
    Figure {
        title: title.into(),
        x_label: "x".into(),
        x_unit: "length".into(),
        y_label: y_label.into(),
        y_unit: y_unit.into(),
        series,
    }
}

fn check_values(name: &str, values: &[f64]) -> Result<()> {
    if values.is_empty() || values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(PdmError::InvalidParameter(format!("{name} must be a non-empty list of positive numbers")));
    }
    Ok(())
}

/// Analytic eigenfunctions φ₁ of the linear mass for the given odd levels.
pub fn linear_modes(mu: f64, levels: &[usize], samples: usize) -> Result<Figure> {
    let top = levels.iter().copied().max().unwrap_or(1) as f64;
    let x_max = 1.5 * (2.0 * top + 1.0).sqrt() / mu.sqrt();
    let grid = Grid::new(0.0, x_max, samples)?;
    let xs = grid.nodes();
    let series = levels
        .iter()
        .map(|&n| {
            let f = analytic_eigenfunction(mu, n, &grid)?;
            Ok(Series::new(format!("n = {n}"), xs.clone(), f.values.iter().map(|z| z.re).collect()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(figure(&format!("Linear-mass eigenfunctions, mu = {mu}"), "phi1", "length^-1/2", series))
}

fn hyperbolic_series(
    values: &[f64],
    label: &str,
    make: impl Fn(f64) -> Result<MassProfile>,
    quantity: impl Fn(&MassProfile, &Grid) -> Result<Vec<f64>>,
    samples: usize,
) -> Result<Vec<Series>> {
    let grid = Grid::new(-HYPERBOLIC_HALF_WIDTH, HYPERBOLIC_HALF_WIDTH, samples)?;
    values
        .iter()
        .map(|&v| {
            let p = make(v)?;
            Ok(Series::new(format!("{label} = {v}"), grid.nodes(), quantity(&p, &grid)?))
        })
        .collect()
}

fn mass(p: &MassProfile, grid: &Grid) -> Result<Vec<f64>> {
    grid.nodes().iter().map(|&x| p.mass_at(x)).collect()
}

fn veff(p: &MassProfile, grid: &Grid) -> Result<Vec<f64>> {
    let v = schrodingerizing_potential(p, grid)?;
    Ok(effective_potential_general(p, &v, 0.0)?.iter().map(|z| z.re).collect())
}

fn v_squared(p: &MassProfile, grid: &Grid) -> Result<Vec<f64>> {
    let v = schrodingerizing_potential(p, grid)?;
    Ok(v.values().iter().map(|z| (z * z).re).collect())
}

/// Every figure as (file stem, figure), in a fixed order.
pub fn build_figures(c: &FiguresCmd) -> Result<Vec<(String, Figure)>> {
    check_values("mu_values", &c.mu_values)?;
    check_values("m0_values", &c.m0_values)?;
    check_values("a_values", &c.a_values)?;
    if c.samples < 3 {
        return Err(PdmError::InvalidParameter("samples must be at least 3".into()));
    }
    let n = c.samples;
    let mut out = Vec::new();

    let line = Grid::new(0.0, LINEAR_X_MAX, n)?;
    let inner = Grid::interior(0.0, LINEAR_X_MAX, n)?;
    let tail = Grid::new(LINEAR_V2_X_MIN, LINEAR_X_MAX, n)?;
    let mut masses = Vec::new();
    let mut v2 = Vec::new();
    let mut eff = Vec::new();
    for &mu in &c.mu_values {
        let p = MassProfile::linear(mu, LINEAR_X_MAX)?;
        let label = format!("mu = {mu}");
        masses.push(Series::new(label.clone(), line.nodes(), mass(&p, &line)?));
        v2.push(Series::new(label.clone(), tail.nodes(), v_squared(&p, &tail)?));
        eff.push(Series::new(label, inner.nodes(), veff(&p, &inner)?));
    }
    out.push(("fig1_linear_mass".to_string(), figure("Linear mass", "m", "mass", masses)));
    out.push(("fig2a_linear_v_squared".to_string(), figure("Linear mass: V^2", "V^2", "energy^2", v2)));
    out.push(("fig2b_linear_veff".to_string(), figure("Linear mass: effective potential", "Veff", "energy^2", eff)));
    out.push(("fig3_linear_modes".to_string(), linear_modes(c.mu, &[1, 3, 5, 7], n)?));

    let (m0, a) = (c.m0, c.a);
    let by_m0 = |v: f64| MassProfile::hyperbolic(v, a);
    let by_a = |v: f64| MassProfile::hyperbolic(m0, v);
    out.push((
        "fig4a_hyperbolic_mass_m0".to_string(),
        figure(&format!("Hyperbolic mass, a = {a}"), "m", "mass", hyperbolic_series(&c.m0_values, "m0", by_m0, mass, n)?),
    ));
    out.push((
        "fig4b_hyperbolic_mass_a".to_string(),
        figure(&format!("Hyperbolic mass, m0 = {m0}"), "m", "mass", hyperbolic_series(&c.a_values, "a", by_a, mass, n)?),
    ));
    out.push((
        "fig5a_hyperbolic_veff_m0".to_string(),
        figure(
            &format!("Hyperbolic effective potential, a = {a}"),
            "Veff",
            "energy^2",
            hyperbolic_series(&c.m0_values, "m0", by_m0, veff, n)?,
        ),
    ));
    out.push((
        "fig5b_hyperbolic_veff_a".to_string(),
        figure(
            &format!("Hyperbolic effective potential, m0 = {m0}"),
            "Veff",
            "energy^2",
            hyperbolic_series(&c.a_values, "a", by_a, veff, n)?,
        ),
    ));
    out.push((
        "fig6_hyperbolic_v_squared".to_string(),
        figure(
            &format!("Hyperbolic mass: V^2, m0 = {m0}"),
            "V^2",
            "energy^2",
            hyperbolic_series(&c.a_values, "a", by_a, v_squared, n)?,
        ),
    ));

    let grid = Grid::new(-HYPERBOLIC_HALF_WIDTH, HYPERBOLIC_HALF_WIDTH, n)?;
    let phi = free_state(m0, a, c.energy, &grid)?;
    let xs = grid.nodes();
    out.push((
        "fig7_free_state".to_string(),
        figure(
            &format!("Free state, E = {}, m0 = {m0}, a = {a}", c.energy),
            "phi1",
            "1",
            vec![
                Series::new("Re phi1", xs.clone(), phi.values.iter().map(|z| z.re).collect()),
                Series::new("Im phi1", xs.clone(), phi.values.iter().map(|z| z.im).collect()),
                Series::new("|phi1|", xs, phi.values.iter().map(|z| z.norm()).collect()),
            ],
        ),
    ));
    Ok(out)
}
