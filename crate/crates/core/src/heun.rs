//! Hyperbolic mass m0·sech(ax)^(1/2): Heun-class equation, local series at
//! ξ = 1, and scattering of free states.
//!
//! With ξ = cosh(ax), ℰ = E/a and μ₀ = m0/a, the reduced equation becomes
//! `ξ(ξ² − 1)φ'' + ξ²φ' + (ℰ²ξ − μ₀²)φ = 0`, a general Heun equation with
//! singular points 0, 1, −1 and ∞.

use num_complex::Complex64;
use serde::Serialize;

use crate::discretization::{integrate_ivp, Grid, IvpOptions};
use crate::error::{PdmError, Result};
use crate::fields::ScalarField;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Largest series order accepted by `frobenius_at_one`.
pub const MAX_SERIES_ORDER: usize = 200;

/// Relative size of the barrier, m0²·sech(ax)/m0², at the matching points.
pub const WINDOW_THRESHOLD: f64 = 1e-12;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Parameters of `y(y−1)(y−d)φ'' + [γ(y−1)(y−d) + δy(y−d) + εy(y−1)]φ' + (αβy − q)φ = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HeunParameters {
    #[serde(serialize_with = "ser_c")]
    pub gamma: Complex64,
    #[serde(serialize_with = "ser_c")]
    pub delta: Complex64,
    #[serde(serialize_with = "ser_c")]
    pub epsilon: Complex64,
    #[serde(serialize_with = "ser_c")]
    pub d: Complex64,
    #[serde(serialize_with = "ser_c")]
    pub q: Complex64,
    #[serde(serialize_with = "ser_c")]
    pub alpha: Complex64,
    #[serde(serialize_with = "ser_c")]
    pub beta: Complex64,
}

pub(crate) fn ser_c<S: serde::Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeTuple;
    let mut t = s.serialize_tuple(2)?;
    t.serialize_element(&z.re)?;
    t.serialize_element(&z.im)?;
    t.end()
}

impl HeunParameters {
    /// |α + β + 1 − (γ + δ + ε)|
    pub fn fuchsian_residual(&self) -> f64 {
        (self.alpha + self.beta + 1.0 - (self.gamma + self.delta + self.epsilon)).norm()
    }

    /// Coefficients (P₂, P₁, P₀) of the polynomial form at the point y.
    pub fn coefficients_at(&self, y: Complex64) -> [Complex64; 3] {
        let d = self.d;
        [
            y * (y - 1.0) * (y - d),
            self.gamma * (y - 1.0) * (y - d) + self.delta * y * (y - d) + self.epsilon * y * (y - 1.0),
            self.alpha * self.beta * y - self.q,
        ]
    }

    /// The same coefficients as polynomials in t = y − 1, lowest degree first.
    fn polynomials_about_one(&self) -> [Vec<Complex64>; 3] {
        // y = 1 + t, y − 1 = t, y − d = (1 − d) + t.
        let one = c(1.0);
        let e = one - self.d;
        let p2 = poly_mul(&poly_mul(&[one, one], &[c(0.0), one]), &[e, one]);
        let p1 = poly_add(
            &poly_add(
                &poly_scale(&poly_mul(&[c(0.0), one], &[e, one]), self.gamma),
                &poly_scale(&poly_mul(&[one, one], &[e, one]), self.delta),
            ),
            &poly_scale(&poly_mul(&[one, one], &[c(0.0), one]), self.epsilon),
        );
        let ab = self.alpha * self.beta;
        let p0 = vec![ab - self.q, ab];
        [p2, p1, p0]
    }
}

fn poly_mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![c(0.0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_add(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![c(0.0); a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] += y;
    }
    out
}

fn poly_scale(a: &[Complex64], s: Complex64) -> Vec<Complex64> {
    a.iter().map(|x| x * s).collect()
}

fn check_scales(a: f64) -> Result<()> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(PdmError::InvalidParameter(format!("inverse width a must be positive, got {a}")));
    }
    Ok(())
}

/// Heun parameters reproducing the hyperbolic-mass equation term by term:
/// γ = 0, δ = ε = 1/2, d = −1, α = iℰ, β = −iℰ (so αβ = ℰ²), q = μ₀².
pub fn map_to_heun(m0: f64, a: f64, energy: f64) -> Result<HeunParameters> {
    check_scales(a)?;
    let cal_e = energy / a;
    let mu0 = m0 / a;
    Ok(HeunParameters {
        gamma: c(0.0),
        delta: c(0.5),
        epsilon: c(0.5),
        d: c(-1.0),
        q: c(mu0 * mu0),
        alpha: I * cal_e,
        beta: -I * cal_e,
    })
}

/// Coefficients of the equation in ξ written directly from its derivation:
/// `ξ(ξ² − 1)`, `ξ²`, `ℰ²ξ − μ₀²`.
pub fn hyperbolic_equation_coefficients(m0: f64, a: f64, energy: f64, xi: f64) -> [f64; 3] {
    let cal_e = energy / a;
    let mu0 = m0 / a;
    [xi * (xi * xi - 1.0), xi * xi, cal_e * cal_e * xi - mu0 * mu0]
}

pub fn cosh_coordinate_map(x: f64, a: f64) -> f64 {
    (a * x).cosh()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Branch {
    #[default]
    NonNegative,
    NonPositive,
}

pub fn inverse_map(xi: f64, a: f64, branch: Branch) -> Result<f64> {
    check_scales(a)?;
    if !(xi >= 1.0) {
        return Err(PdmError::Domain { x: xi, lo: 1.0, hi: f64::INFINITY });
    }
    let x = xi.acosh() / a;
    Ok(match branch {
        Branch::NonNegative => x,
        Branch::NonPositive => -x,
    })
}

/// Local solution `|t|^s Σ c_k t^k` about ξ = 1 (t = ξ − 1).
///
/// For t < 0 the factor |t|^s replaces t^s; the two differ by a constant
/// phase, so both solve the equation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrobeniusSeries {
    pub expansion_point: f64,
    pub exponent: f64,
    #[serde(serialize_with = "ser_cvec")]
    pub coefficients: Vec<Complex64>,
    pub order: usize,
    /// Distance from ξ = 1 to the nearest other finite singular point.
    pub radius: f64,
}

pub(crate) fn ser_cvec<S: serde::Serializer>(v: &[Complex64], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for z in v {
        seq.serialize_element(&[z.re, z.im])?;
    }
    seq.end()
}

/// Value and first two derivatives with respect to ξ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: Complex64,
    pub first: Complex64,
    pub second: Complex64,
}

impl FrobeniusSeries {
    /// Evaluates the series; rejects points outside 0 < |ξ − 1| < radius
    /// (ξ = 1 itself is allowed for the s = 0 branch).
    pub fn eval(&self, xi: f64) -> Result<SeriesValue> {
        let t = xi - self.expansion_point;
        if !(t.abs() < self.radius) {
            return Err(PdmError::Precondition(format!(
                "ξ = {xi} lies outside the convergence disk |ξ − 1| < {}",
                self.radius
            )));
        }
        let s = self.exponent;
        if t == 0.0 {
            if s != 0.0 {
                return Err(PdmError::Precondition("the s = 1/2 branch is not differentiable at ξ = 1".into()));
            }
            let c1 = self.coefficients.get(1).copied().unwrap_or(c(0.0));
            let c2 = self.coefficients.get(2).copied().unwrap_or(c(0.0));
            return Ok(SeriesValue { value: self.coefficients[0], first: c1, second: c2 * 2.0 });
        }
        // Power series part and its derivatives in t.
        let (mut f, mut df, mut d2f) = (c(0.0), c(0.0), c(0.0));
        for (k, ck) in self.coefficients.iter().enumerate().rev() {
            let kf = k as f64;
            d2f = d2f * t + ck * (kf * (kf - 1.0));
            df = df * t + ck * kf;
            f = f * t + ck;
        }
        // Horner above accumulated Σ k c_k t^k and Σ k(k−1) c_k t^k.
        let df = df / t;
        let d2f = d2f / (t * t);
        let sign = t.signum();
        let at = t.abs();
        let g = at.powf(s);
        let dg = sign * s * at.powf(s - 1.0);
        let d2g = s * (s - 1.0) * at.powf(s - 2.0);
        Ok(SeriesValue { value: g * f, first: f * dg + df * g, second: f * d2g + df * (2.0 * dg) + d2f * g })
    }

    pub fn wronskian_with(&self, other: &FrobeniusSeries, xi: f64) -> Result<Complex64> {
        let a = self.eval(xi)?;
        let b = other.eval(xi)?;
        Ok(a.value * b.first - a.first * b.value)
    }
}

/// Frobenius series of the Heun equation about ξ = 1 with exponent `s` and
/// coefficients c_0 = 1, ..., c_order, from the order-by-order recurrence.
pub fn frobenius_at_one(params: &HeunParameters, s: f64, order: usize) -> Result<FrobeniusSeries> {
    if order > MAX_SERIES_ORDER {
        return Err(PdmError::InvalidParameter(format!("series order {order} exceeds {MAX_SERIES_ORDER}")));
    }
    let [p2, p1, p0] = params.polynomials_about_one();
    if p2[0].norm() != 0.0 {
        return Err(PdmError::Precondition("ξ = 1 is not a singular point of these parameters".into()));
    }
    let indicial = |r: Complex64| p2[1] * r * (r - 1.0) + p1[0] * r;
    if indicial(c(s)).norm() > 1e-12 {
        return Err(PdmError::InvalidParameter(format!("{s} is not a characteristic exponent at ξ = 1")));
    }
    let get = |p: &Vec<Complex64>, j: isize| if j < 0 { c(0.0) } else { p.get(j as usize).copied().unwrap_or(c(0.0)) };
    let mut coeffs = vec![c(1.0)];
    for k in 1..=order {
        let r = c(s + k as f64);
        let lead = indicial(r);
        if lead.norm() < 1e-12 {
            return Err(PdmError::IndicialClash { order: k });
        }
        let mut acc = c(0.0);
        let reach = p2.len().max(p1.len()).max(p0.len() + 1);
        for i in 1..=k.min(reach) {
            let rho = r - i as f64;
            let ii = i as isize;
            let factor = get(&p2, ii + 1) * rho * (rho - 1.0) + get(&p1, ii) * rho + get(&p0, ii - 1);
            acc += coeffs[k - i] * factor;
        }
        coeffs.push(-acc / lead);
    }
    let radius = [c(0.0), params.d]
        .iter()
        .map(|z| (z - 1.0).norm())
        .fold(f64::INFINITY, f64::min);
    Ok(FrobeniusSeries { expansion_point: 1.0, exponent: s, coefficients: coeffs, order, radius })
}

/// Residual `P₂φ'' + P₁φ' + P₀φ` of a series at ξ.
pub fn series_residual(params: &HeunParameters, series: &FrobeniusSeries, xi: f64) -> Result<Complex64> {
    let v = series.eval(xi)?;
    let [p2, p1, p0] = params.coefficients_at(c(xi));
    Ok(p2 * v.second + p1 * v.first + p0 * v.value)
}

/// Integrates the Heun equation in ξ from `xi0` with state (φ, φ'), returning
/// (φ, φ') at each of `outputs`.
pub fn integrate_heun(
    params: &HeunParameters,
    xi0: f64,
    y0: [Complex64; 2],
    outputs: &[f64],
    xi_end: f64,
    tol: f64,
) -> Result<Vec<[Complex64; 2]>> {
    let p = *params;
    let t = integrate_ivp(
        move |xi, y, d| {
            let [p2, p1, p0] = p.coefficients_at(c(xi));
            d[0] = y[1];
            d[1] = -(p1 * y[1] + p0 * y[0]) / p2;
        },
        &y0,
        (xi0, xi_end),
        outputs,
        IvpOptions::with_tol(tol),
    )?;
    Ok(t.states.iter().map(|s| [s[0], s[1]]).collect())
}

/// Half-width beyond which m0²·sech(ax) < WINDOW_THRESHOLD·m0².
pub fn matching_half_width(a: f64) -> f64 {
    (1.0 / WINDOW_THRESHOLD).acosh() / a
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Scattering {
    pub energy: f64,
    pub transmission: f64,
    pub reflection: f64,
    /// Incoming amplitude A on the left, for a unit transmitted wave.
    #[serde(serialize_with = "ser_c")]
    pub incoming: Complex64,
    #[serde(serialize_with = "ser_c")]
    pub reflected: Complex64,
}

const SCATTER_TOL: f64 = 1e-13;

fn check_free(m0: f64, a: f64, energy: f64) -> Result<()> {
    check_scales(a)?;
    if !(energy > 0.0 && energy.is_finite()) {
        return Err(PdmError::InvalidParameter(format!("free states need E > 0, got {energy}")));
    }
    if !(m0 >= 0.0 && m0.is_finite()) {
        return Err(PdmError::InvalidParameter(format!("m0 must be nonnegative, got {m0}")));
    }
    Ok(())
}

fn barrier_rhs(m0: f64, a: f64, energy: f64) -> impl Fn(f64, &[Complex64], &mut [Complex64]) {
    move |x, y, d| {
        d[0] = y[1];
        d[1] = y[0] * (m0 * m0 / (a * x).cosh() - energy * energy);
    }
}

/// T and R by integrating `−φ'' + m0² sech(ax) φ = E² φ` from x = +L (pure
/// transmitted wave e^{iEx}) to x = −L and splitting into e^{±iEx} there.
pub fn transmission_windowed(m0: f64, a: f64, energy: f64, half_width: f64) -> Result<Scattering> {
    check_free(m0, a, energy)?;
    if !((a * half_width).cosh() > 1.0 / WINDOW_THRESHOLD) {
        return Err(PdmError::Precondition(format!(
            "matching window ±{half_width} is too small: need at least ±{}",
            matching_half_width(a)
        )));
    }
    let l = half_width;
    let start = [Complex64::from_polar(1.0, energy * l), I * energy * Complex64::from_polar(1.0, energy * l)];
    let t = integrate_ivp(barrier_rhs(m0, a, energy), &start, (l, -l), &[], IvpOptions::with_tol(SCATTER_TOL))?;
    let (phi, dphi) = (t.final_state[0], t.final_state[1]);
    let x = -l;
    let incoming = (phi + dphi / (I * energy)) * Complex64::from_polar(0.5, -energy * x);
    let reflected = (phi - dphi / (I * energy)) * Complex64::from_polar(0.5, energy * x);
    let a2 = incoming.norm_sqr();
    Ok(Scattering {
        energy,
        transmission: 1.0 / a2,
        reflection: reflected.norm_sqr() / a2,
        incoming,
        reflected,
    })
}

pub fn transmission(m0: f64, a: f64, energy: f64) -> Result<Scattering> {
    check_scales(a)?;
    transmission_windowed(m0, a, energy, matching_half_width(a) * 1.001)
}

/// The scattering state with unit incoming amplitude from the left, sampled on `grid`.
pub fn free_state(m0: f64, a: f64, energy: f64, grid: &Grid) -> Result<ScalarField> {
    let sc = transmission(m0, a, energy)?;
    let l = matching_half_width(a) * 1.001;
    let right = l.max(grid.x_hi());
    let left = (-l).min(grid.x_lo());
    let start = [Complex64::from_polar(1.0, energy * right), I * energy * Complex64::from_polar(1.0, energy * right)];
    let outs: Vec<f64> = grid.nodes().into_iter().rev().collect();
    let t = integrate_ivp(barrier_rhs(m0, a, energy), &start, (right, left), &outs, IvpOptions::with_tol(SCATTER_TOL))?;
    let values: Vec<Complex64> = t.states.iter().rev().map(|s| s[0] / sc.incoming).collect();
    ScalarField::new(*grid, values)
}
