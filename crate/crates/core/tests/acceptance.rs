//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::time::Instant;

use num_complex::Complex64;
use pdm_dirac::cli;
use pdm_dirac::dirac_system::{
    build_coupled_operator, decoupled_operator, integrate_coupled, integrate_decoupled, pt_symmetry_check,
    PtInvolution,
};
use pdm_dirac::discretization::{momentum_operator, BandedComplexOperator, Boundary, Grid};
use pdm_dirac::fields::trapezoid;
use pdm_dirac::foldy_wouthuysen::{
    alpha_momentum, commutator_checks, fw_operators, nonrelativistic_hamiltonian, times_beta, von_roos_keo,
    OrderingParams, NAMED_ORDERINGS,
};
use pdm_dirac::harmonic::{analytic_eigenfunction, analytic_mode, numeric_energies, reduced_residual, HermiteSeries};
use pdm_dirac::heun::{frobenius_at_one, integrate_heun, map_to_heun, series_residual, transmission};
use pdm_dirac::potentials::{
    effective_potential_general, schrodingerizing_potential, ComplexPotential, Schrodingerizing,
};
use pdm_dirac::{MassProfile, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

type Check = fn() -> Result<Outcome>;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome { pass, detail: detail.into() })
}

fn linear_spectrum() -> Result<Outcome> {
    let exact = [3f64.sqrt(), 7f64.sqrt(), 11f64.sqrt(), 15f64.sqrt()];
    let start = Instant::now();
    let s = numeric_energies(1.0, 20.0, 4000, 4)?;
    let elapsed = start.elapsed().as_secs_f64();
    let err: Vec<f64> = s.energies.iter().zip(&exact).map(|(a, b)| (a - b).abs()).collect();
    let worst = err.iter().copied().fold(0.0, f64::max);

    // Interior grids with n + 1 = 2000 and 4000 intervals differ by exactly h/2.
    let coarse = numeric_energies(1.0, 20.0, 1999, 4)?;
    let fine = numeric_energies(1.0, 20.0, 3999, 4)?;
    let ratios: Vec<f64> = (0..4)
        .map(|k| (coarse.energies[k] - exact[k]).abs() / (fine.energies[k] - exact[k]).abs())
        .collect();
    let converges = ratios.iter().all(|r| (*r - 4.0).abs() < 0.2);
    outcome(
        worst < 1e-4 && elapsed < 30.0 && converges,
        format!("max |E - E_exact| = {worst:.3e}, runtime {elapsed:.2} s, refinement ratios {ratios:.3?}"),
    )
}

fn effective_potential_collapse() -> Result<Outcome> {
    let cases = [
        (MassProfile::linear(1.3, 10.0)?, Grid::interior(0.0, 10.0, 999)?),
        (MassProfile::hyperbolic(1.7, 0.8)?, Grid::new(-10.0, 10.0, 1001)?),
    ];
    let mut worst = 0.0f64;
    for (p, grid) in &cases {
        let v = schrodingerizing_potential(p, grid)?;
        for e in [0.0, 1.0, 5.0] {
            let veff = effective_potential_general(p, &v, e)?;
            for (x, z) in grid.nodes().iter().zip(&veff).skip(1).take(grid.len() - 2) {
                worst = worst.max((z - p.mass_at(*x)?.powi(2)).norm());
            }
        }
    }
    outcome(worst < 1e-10, format!("max interior |Veff - m^2| = {worst:.3e}"))
}

fn coupled_decoupled() -> Result<Outcome> {
    let p = MassProfile::hyperbolic(1.0, 1.0)?;
    let pot = Schrodingerizing(p.clone());
    let e = 1.3;
    let xs: Vec<f64> = (0..=160).map(|i| -8.0 + 0.1 * i as f64).collect();
    let (f1, f2) = (c(1.0), Complex64::new(0.2, -0.5));
    let x0 = -8.0;
    let d0 = I * ((e - pot.value(x0)) * f1 - p.mass_at(x0)? * f2);
    let cpl = integrate_coupled(&p, &pot, e, [f1, f2], (-8.0, 8.0), &xs, 1e-12)?.component(0);
    let dec = integrate_decoupled(&p, &pot, e, [f1, d0], (-8.0, 8.0), &xs, 1e-12)?.component(0);
    let scale = dec.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let rel = cpl.iter().zip(&dec).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) / scale;
    outcome(rel < 1e-6, format!("relative L-inf difference of phi1 = {rel:.3e}"))
}

fn pt_symmetry() -> Result<Outcome> {
    let p = MassProfile::hyperbolic_on(1.0, 1.0, -20.0, 20.0)?;
    let grid = Grid::new(-20.0, 20.0, 800)?;
    let v = schrodingerizing_potential(&p, &grid)?;
    let coupled = pt_symmetry_check(&build_coupled_operator(&p, &v, &grid, Boundary::Dirichlet)?, PtInvolution::Identity)?;
    let dec = pt_symmetry_check(&decoupled_operator(&p, &grid, Boundary::Dirichlet)?, PtInvolution::Identity)?;
    outcome(
        coupled.delta == 0.0 && dec.delta == 0.0 && dec.real_fraction() >= 0.99 && dec.closure_error <= 1e-10,
        format!(
            "delta coupled = {}, delta decoupled = {}; decoupled real fraction {:.4}, closure {:.3e}; \
             coupled (info) real fraction {:.4}, closure {:.3e}",
            coupled.delta,
            dec.delta,
            dec.real_fraction(),
            dec.closure_error,
            coupled.real_fraction(),
            coupled.closure_error
        ),
    )
}

fn heun_local_solutions() -> Result<Outcome> {
    let params = map_to_heun(1.0, 1.0, 1.0)?;
    let fuchs = params.fuchsian_residual();
    let branches = [frobenius_at_one(&params, 0.0, 120)?, frobenius_at_one(&params, 0.5, 120)?];
    let mut worst_match = 0.0f64;
    let mut worst_series = 0.0f64;
    let mut min_wronskian = f64::INFINITY;
    // The ODE is singular at ξ = 1, so each side is integrated inward from its edge.
    for (start, end) in [(1.5, 1.01), (0.5, 0.99)] {
        let outs: Vec<f64> = (0..=49).map(|k| start + (end - start) * k as f64 / 49.0).collect();
        for s in &branches {
            let v0 = s.eval(start)?;
            let states = integrate_heun(&params, start, [v0.value, v0.first], &outs, end, 1e-13)?;
            for (&xi, st) in outs.iter().zip(&states) {
                let v = s.eval(xi)?;
                worst_match = worst_match.max((st[0] - v.value).norm() / v.value.norm().max(1.0));
                worst_series = worst_series.max(series_residual(&params, s, xi)?.norm());
            }
        }
        for &xi in &outs {
            min_wronskian = min_wronskian.min(branches[0].wronskian_with(&branches[1], xi)?.norm());
        }
    }
    outcome(
        worst_match < 1e-8 && fuchs < 1e-12 && min_wronskian > 0.1,
        format!(
            "series vs integrator {worst_match:.3e}, series residual {worst_series:.3e}, \
             Fuchsian residual {fuchs:.3e}, min |W| {min_wronskian:.4}"
        ),
    )
}

fn scattering() -> Result<Outcome> {
    let steps = 25;
    let mut flux = 0.0f64;
    let mut monotone = true;
    let mut prev = f64::NEG_INFINITY;
    for k in 0..=steps {
        let e = 0.2 + (5.0 - 0.2) * k as f64 / steps as f64;
        let s = transmission(1.0, 1.0, e)?;
        flux = flux.max((s.transmission + s.reflection - 1.0).abs());
        monotone &= s.transmission > prev;
        prev = s.transmission;
    }
    let t10 = transmission(1.0, 1.0, 10f64.sqrt())?.transmission;
    outcome(
        flux < 1e-6 && monotone && t10 > 0.99,
        format!("max |T + R - 1| = {flux:.3e}, monotone = {monotone}, T(E^2 = 10) = {t10:.6}"),
    )
}

fn fw_commutators() -> Result<Outcome> {
    let grid = Grid::new(0.0, 10.0, 128)?;
    let mut worst_c1 = 0.0f64;
    let mut worst_c2 = 0.0f64;
    let mut plus_sign = 0.0f64;
    for m0 in [3.0, 4.0, 5.0] {
        let p = MassProfile::constant(m0, 0.0, 10.0)?;
        let ops = fw_operators(&p, &grid, Boundary::Periodic)?;
        let ap = alpha_momentum(&grid, Boundary::Periodic)?;
        worst_c1 = worst_c1.max(ops.c1.scale(I).add(&ap)?.max_abs() / ap.max_abs());
        let mom = momentum_operator(grid, Boundary::Periodic);
        let kin = times_beta(&mom.matmul(&mom)?.scale(c(0.5 / m0)))?;
        worst_c2 = worst_c2.max(ops.c2.add(&kin)?.max_abs() / kin.max_abs());
        plus_sign = plus_sign.max(ops.c2.sub(&kin)?.max_abs() / kin.max_abs());
    }
    let exact = worst_c1 <= 1e-14 && worst_c2 <= 1e-14;

    let wide = Grid::new(-8.0, 8.0, 1601)?;
    let r = commutator_checks(&MassProfile::hyperbolic(5.0, 1.0)?, &wide, (-2.0, 2.0))?;
    let small = r.c1_deviation < 1e-2 && r.c2_deviation < 1e-2 && r.c2_truncation < 1e-2;
    let mut min_ratio = [f64::INFINITY; 3];
    for w in r.mass_scale_sweep.windows(2) {
        let (a, b) = (w[0].deviations, w[1].deviations);
        min_ratio[0] = min_ratio[0].min(a.c1_deviation / b.c1_deviation);
        min_ratio[1] = min_ratio[1].min(a.c2_deviation / b.c2_deviation);
        min_ratio[2] = min_ratio[2].min(a.c2_truncation / b.c2_truncation);
    }
    // The first-order defect scales as exactly 1/m, so a doubling gives 2 up to rounding.
    let shrinks = min_ratio[0] >= 2.0 * (1.0 - 1e-6) && min_ratio[1] >= 2.0 && min_ratio[2] >= 2.0;
    outcome(
        exact && small && shrinks,
        format!(
            "constant mass: |i[S,bm] + ap| = {worst_c1:.1e}, |C2 + (p^2/2m)b| = {worst_c2:.1e} \
             (with + sign: {plus_sign:.3}); m0 = 5: c1 {:.3e}, c2 {:.3e}, truncation {:.3e}; \
             min doubling ratios {min_ratio:.3?}",
            r.c1_deviation, r.c2_deviation, r.c2_truncation
        ),
    )
}

fn ordering_family() -> Result<Outcome> {
    let grid = Grid::new(-5.0, 5.0, 101)?;
    let flat = MassProfile::constant(4.0, -5.0, 5.0)?;
    let reference = von_roos_keo(&flat, OrderingParams::BEN_DANIEL_DUKE, &grid, Boundary::Periodic)?;
    let mut spread = 0.0f64;
    for (_, o) in NAMED_ORDERINGS {
        spread = spread.max(von_roos_keo(&flat, o, &grid, Boundary::Periodic)?.sub(&reference)?.max_abs());
    }

    let grid = Grid::new(-6.0, 6.0, 121)?;
    let p = MassProfile::hyperbolic(3.0, 1.0)?;
    let vr: Vec<f64> = grid.nodes().iter().map(|x| 0.1 * x * x).collect();
    let direct = nonrelativistic_hamiltonian(&p, &vr, &grid, Boundary::Dirichlet)?;
    let keo = von_roos_keo(&p, OrderingParams::LI_KUHN, &grid, Boundary::Dirichlet)?;
    let v = BandedComplexOperator::real_diagonal(grid, Boundary::Dirichlet, &vr)?;
    let lk = direct.sub(&keo.add(&v)?)?.max_abs() / direct.max_abs();
    outcome(
        spread == 0.0 && lk <= 1e-14,
        format!("constant-mass max difference = {spread}, Li-Kuhn vs direct relative {lk:.3e}"),
    )
}

fn hermite_machinery() -> Result<Outcome> {
    let mut terminates = true;
    for n in [1usize, 3, 5, 7, 9, 11] {
        let s = HermiteSeries::odd((2 * n + 1) as f64, n + 10);
        terminates &= s.terminated && s.coefficients[n + 2] == 0.0 && s.degree() == Some(n);
    }
    for k in [2.0, 5.0, 8.5] {
        terminates &= !HermiteSeries::odd(k, 40).terminated;
    }
    let (mu, x_hi) = (1.0, 11.0);
    let g = Grid::new(0.0, x_hi, 3001)?;
    let xs = g.nodes();
    let mut residual = 0.0f64;
    let mut fields = Vec::new();
    for n in [1usize, 3, 5, 7] {
        let samples = analytic_mode(mu, n, x_hi, &xs)?;
        let e = ((2 * n + 1) as f64 * mu).sqrt();
        residual = reduced_residual(mu, e, &xs, &samples).iter().fold(residual, |a, r| a.max(r.abs()));
        fields.push(analytic_eigenfunction(mu, n, &g)?);
    }
    let mut overlap = 0.0f64;
    for i in 0..fields.len() {
        for j in 0..i {
            let prod: Vec<f64> = fields[i].values.iter().zip(&fields[j].values).map(|(a, b)| a.re * b.re).collect();
            overlap = overlap.max(trapezoid(&prod, g.spacing()).abs());
        }
    }
    outcome(
        terminates && residual < 1e-10 && overlap < 1e-8,
        format!("termination exact = {terminates}, max residual {residual:.3e}, max overlap {overlap:.3e}"),
    )
}

fn cli_determinism() -> Result<Outcome> {
    let dirs = [tempfile::tempdir()?, tempfile::tempdir()?];
    let mut manifests = Vec::new();
    for d in &dirs {
        let mut so = Vec::new();
        let mut se = Vec::new();
        let code = cli::run(["pdmdirac", "figures"], Some(d.path()), &mut so, &mut se);
        if code != cli::EXIT_OK {
            return outcome(false, format!("figures exited with {code}: {}", String::from_utf8_lossy(&se)));
        }
        manifests.push(serde_json::from_slice::<serde_json::Value>(&so)?);
    }
    let files: Vec<String> = manifests[0]["files"]
        .as_array()
        .map(|a| a.iter().filter_map(|f| f.as_str().map(String::from)).collect())
        .unwrap_or_default();
    let mut identical = !files.is_empty();
    for f in &files {
        identical &= std::fs::read(dirs[0].path().join(f))? == std::fs::read(dirs[1].path().join(f))?;
    }
    outcome(identical, format!("{} files compared, byte-identical = {identical}", files.len()))
}

fn main() {
    let criteria: [(&str, Check); 10] = [
        ("linear-mass spectrum", linear_spectrum),
        ("effective-potential collapse", effective_potential_collapse),
        ("coupled/decoupled equivalence", coupled_decoupled),
        ("PT symmetry", pt_symmetry),
        ("Heun local solutions", heun_local_solutions),
        ("scattering", scattering),
        ("FW commutators", fw_commutators),
        ("ordering family", ordering_family),
        ("Hermite machinery", hermite_machinery),
        ("CLI determinism", cli_determinism),
    ];
    let mut failures = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let (pass, detail) = match check() {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        failures += usize::from(!pass);
        println!("{} criterion {} ({name}): {detail}", if pass { "PASS" } else { "FAIL" }, k + 1);
    }
    if failures > 0 {
        println!("{failures} criterion(s) failed");
        std::process::exit(1);
    }
}
