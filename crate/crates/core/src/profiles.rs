//! Mass distributions m(x) and their closed-form derivatives.
//!
//! Every physical quantity downstream (potentials, operators, spectra) is a
//! function of the profile alone, so profiles are immutable values that can
//! be shared freely across threads.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{PdmError, Result};

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Default half-width of the hyperbolic profile's domain.
pub const DEFAULT_HYPERBOLIC_HALF_WIDTH: f64 = 20.0;

/// Relative tolerance for supplied derivatives against central differences.
pub const DERIVATIVE_CHECK_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileKind {
    Linear,
    Hyperbolic,
    Custom,
}

/// A user-supplied profile: mass plus its first two derivatives.
#[derive(Clone)]
pub struct CustomProfile {
    label: String,
    mass: ScalarFn,
    dmass: ScalarFn,
    d2mass: ScalarFn,
    x_lo: f64,
    x_hi: f64,
}

#[derive(Clone)]
pub enum MassProfile {
    /// m(x) = mu x on [0, x_hi]; m(0) = 0 is a boundary singularity.
    Linear { mu: f64, x_hi: f64 },
    /// m(x) = m0 sech(a x)^(1/2).
    HyperbolicSechRoot { m0: f64, a: f64, x_lo: f64, x_hi: f64 },
    Custom(CustomProfile),
}

impl fmt::Debug for MassProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MassProfile::Linear { mu, x_hi } => f
                .debug_struct("Linear")
                .field("mu", mu)
                .field("x_hi", x_hi)
                .finish(),
            MassProfile::HyperbolicSechRoot { m0, a, x_lo, x_hi } => f
                .debug_struct("HyperbolicSechRoot")
                .field("m0", m0)
                .field("a", a)
                .field("x_lo", x_lo)
                .field("x_hi", x_hi)
                .finish(),
            MassProfile::Custom(c) => f
                .debug_struct("Custom")
                .field("label", &c.label)
                .field("x_lo", &c.x_lo)
                .field("x_hi", &c.x_hi)
                .finish(),
        }
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(PdmError::InvalidParameter(format!("{name} must be positive and finite, got {v}")))
    }
}

fn interval(lo: f64, hi: f64) -> Result<()> {
    if lo.is_finite() && hi.is_finite() && lo < hi {
        Ok(())
    } else {
        Err(PdmError::InvalidParameter(format!("invalid domain [{lo}, {hi}]")))
    }
}

/// tanh evaluated so that tanh(-x) == -tanh(x) bit for bit.
#[inline]
pub(crate) fn odd_tanh(x: f64) -> f64 {
    x.signum() * x.abs().tanh()
}

impl MassProfile {
    pub fn linear(mu: f64, x_hi: f64) -> Result<Self> {
        positive("mu", mu)?;
        positive("x_hi", x_hi)?;
        Ok(MassProfile::Linear { mu, x_hi })
    }

    pub fn hyperbolic(m0: f64, a: f64) -> Result<Self> {
        let w = DEFAULT_HYPERBOLIC_HALF_WIDTH;
        Self::hyperbolic_on(m0, a, -w, w)
    }

    pub fn hyperbolic_on(m0: f64, a: f64, x_lo: f64, x_hi: f64) -> Result<Self> {
        positive("m0", m0)?;
        positive("a", a)?;
        interval(x_lo, x_hi)?;
        Ok(MassProfile::HyperbolicSechRoot { m0, a, x_lo, x_hi })
    }

    /// Constant mass, expressed as a custom profile with zero derivatives.
    pub fn constant(m0: f64, x_lo: f64, x_hi: f64) -> Result<Self> {
        positive("m0", m0)?;
        interval(x_lo, x_hi)?;
        Ok(MassProfile::Custom(CustomProfile {
            label: format!("constant({m0})"),
            mass: Arc::new(move |_| m0),
            dmass: Arc::new(|_| 0.0),
            d2mass: Arc::new(|_| 0.0),
            x_lo,
            x_hi,
        }))
    }

    /// Custom profile. The supplied derivatives are checked against central
    /// differences of `mass` at interior probe points.
    pub fn custom<M, D1, D2>(
        label: impl Into<String>,
        mass: M,
        dmass: D1,
        d2mass: D2,
        x_lo: f64,
        x_hi: f64,
    ) -> Result<Self>
    where
        M: Fn(f64) -> f64 + Send + Sync + 'static,
        D1: Fn(f64) -> f64 + Send + Sync + 'static,
        D2: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        interval(x_lo, x_hi)?;
        let profile = MassProfile::Custom(CustomProfile {
            label: label.into(),
            mass: Arc::new(mass),
            dmass: Arc::new(dmass),
            d2mass: Arc::new(d2mass),
            x_lo,
            x_hi,
        });
        let check = profile.check_derivatives(9);
        if check.first > DERIVATIVE_CHECK_TOL || check.second > DERIVATIVE_CHECK_TOL {
            return Err(PdmError::InvalidParameter(format!(
                "supplied derivatives disagree with finite differences (m': {:e}, m'': {:e})",
                check.first, check.second
            )));
        }
        Ok(profile)
    }

    pub fn kind(&self) -> ProfileKind {
        match self {
            MassProfile::Linear { .. } => ProfileKind::Linear,
            MassProfile::HyperbolicSechRoot { .. } => ProfileKind::Hyperbolic,
            MassProfile::Custom(_) => ProfileKind::Custom,
        }
    }

    pub fn domain(&self) -> (f64, f64) {
        match self {
            MassProfile::Linear { x_hi, .. } => (0.0, *x_hi),
            MassProfile::HyperbolicSechRoot { x_lo, x_hi, .. } => (*x_lo, *x_hi),
            MassProfile::Custom(c) => (c.x_lo, c.x_hi),
        }
    }

    /// Same profile with a different domain.
    pub fn with_domain(&self, x_lo: f64, x_hi: f64) -> Result<Self> {
        interval(x_lo, x_hi)?;
        Ok(match self {
            MassProfile::Linear { mu, .. } => {
                if x_lo != 0.0 {
                    return Err(PdmError::InvalidParameter(
                        "the linear profile is defined on [0, x_hi]".into(),
                    ));
                }
                MassProfile::Linear { mu: *mu, x_hi }
            }
            MassProfile::HyperbolicSechRoot { m0, a, .. } => {
                MassProfile::HyperbolicSechRoot { m0: *m0, a: *a, x_lo, x_hi }
            }
            MassProfile::Custom(c) => MassProfile::Custom(CustomProfile { x_lo, x_hi, ..c.clone() }),
        })
    }

    /// The same shape with every mass value multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        positive("mass scale factor", factor)?;
        Ok(match self {
            MassProfile::Linear { mu, x_hi } => MassProfile::Linear { mu: mu * factor, x_hi: *x_hi },
            MassProfile::HyperbolicSechRoot { m0, a, x_lo, x_hi } => {
                MassProfile::HyperbolicSechRoot { m0: m0 * factor, a: *a, x_lo: *x_lo, x_hi: *x_hi }
            }
            MassProfile::Custom(c) => {
                let (m, d1, d2) = (c.mass.clone(), c.dmass.clone(), c.d2mass.clone());
                MassProfile::Custom(CustomProfile {
                    label: format!("{}*{factor}", c.label),
                    mass: Arc::new(move |x| factor * m(x)),
                    dmass: Arc::new(move |x| factor * d1(x)),
                    d2mass: Arc::new(move |x| factor * d2(x)),
                    x_lo: c.x_lo,
                    x_hi: c.x_hi,
                })
            }
        })
    }

    pub fn contains(&self, x: f64) -> bool {
        let (lo, hi) = self.domain();
        x >= lo && x <= hi
    }

    fn ensure(&self, x: f64) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            let (lo, hi) = self.domain();
            Err(PdmError::Domain { x, lo, hi })
        }
    }

    pub fn mass_at(&self, x: f64) -> Result<f64> {
        self.ensure(x)?;
        Ok(self.m(x))
    }

    pub fn dmass_at(&self, x: f64) -> Result<f64> {
        self.ensure(x)?;
        Ok(self.dm(x))
    }

    pub fn d2mass_at(&self, x: f64) -> Result<f64> {
        self.ensure(x)?;
        Ok(self.d2m(x))
    }

    // Unchecked evaluations for hot loops whose nodes were validated upstream.

    pub(crate) fn m(&self, x: f64) -> f64 {
        match self {
            MassProfile::Linear { mu, .. } => mu * x,
            MassProfile::HyperbolicSechRoot { m0, a, .. } => m0 / (a * x).abs().cosh().sqrt(),
            MassProfile::Custom(c) => (c.mass)(x),
        }
    }

    pub(crate) fn dm(&self, x: f64) -> f64 {
        match self {
            MassProfile::Linear { mu, .. } => *mu,
            MassProfile::HyperbolicSechRoot { a, .. } => -0.5 * a * self.m(x) * odd_tanh(a * x),
            MassProfile::Custom(c) => (c.dmass)(x),
        }
    }

    pub(crate) fn d2m(&self, x: f64) -> f64 {
        match self {
            MassProfile::Linear { .. } => 0.0,
            MassProfile::HyperbolicSechRoot { a, .. } => {
                let t = (a * x).abs().tanh();
                let sech2 = 1.0 - t * t;
                self.m(x) * a * a * (0.25 * t * t - 0.5 * sech2)
            }
            MassProfile::Custom(c) => (c.d2mass)(x),
        }
    }

    /// m'/m, evaluated in closed form where the profile allows it.
    pub(crate) fn log_derivative(&self, x: f64) -> f64 {
        match self {
            MassProfile::Linear { .. } => 1.0 / x,
            MassProfile::HyperbolicSechRoot { a, .. } => -0.5 * a * odd_tanh(a * x),
            MassProfile::Custom(_) => self.dm(x) / self.m(x),
        }
    }

    /// Largest relative disagreement between the supplied derivatives and
    /// central differences at `probes` interior points.
    pub fn check_derivatives(&self, probes: usize) -> DerivativeCheck {
        let (lo, hi) = self.domain();
        let width = hi - lo;
        let step = 1e-4 * width.min(1.0);
        let mut first = Vec::with_capacity(probes);
        let mut second = Vec::with_capacity(probes);
        for k in 0..probes {
            let x = lo + width * (k as f64 + 1.0) / (probes as f64 + 1.0);
            let fd1 = (self.m(x + step) - self.m(x - step)) / (2.0 * step);
            let fd2 = (self.dm(x + step) - self.dm(x - step)) / (2.0 * step);
            first.push((fd1, self.dm(x)));
            second.push((fd2, self.d2m(x)));
        }
        DerivativeCheck { first: relative_spread(&first), second: relative_spread(&second) }
    }
}

fn relative_spread(pairs: &[(f64, f64)]) -> f64 {
    let scale = pairs.iter().map(|p| p.1.abs()).fold(0.0, f64::max);
    let worst = pairs.iter().map(|p| (p.0 - p.1).abs()).fold(0.0, f64::max);
    if scale > 0.0 {
        worst / scale
    } else {
        worst
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeCheck {
    pub first: f64,
    pub second: f64,
}

/// JSON form of a built-in profile, e.g. `{"kind":"linear","mu":1.0,"xhi":20.0}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ProfileSpec {
    Linear {
        mu: f64,
        xhi: f64,
    },
    Hyperbolic {
        m0: f64,
        a: f64,
        #[serde(default = "default_xlo")]
        xlo: f64,
        #[serde(default = "default_xhi")]
        xhi: f64,
    },
}

fn default_xlo() -> f64 {
    -DEFAULT_HYPERBOLIC_HALF_WIDTH
}

fn default_xhi() -> f64 {
    DEFAULT_HYPERBOLIC_HALF_WIDTH
}

impl ProfileSpec {
    pub fn build(&self) -> Result<MassProfile> {
        match *self {
            ProfileSpec::Linear { mu, xhi } => MassProfile::linear(mu, xhi),
            ProfileSpec::Hyperbolic { m0, a, xlo, xhi } => MassProfile::hyperbolic_on(m0, a, xlo, xhi),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_values() {
        let p = MassProfile::linear(2.0, 10.0).unwrap();
        assert_eq!(p.mass_at(1.5).unwrap(), 3.0);
        assert_eq!(p.dmass_at(4.0).unwrap(), 2.0);
        assert_eq!(p.d2mass_at(4.0).unwrap(), 0.0);
        assert_eq!(p.mass_at(0.0).unwrap(), 0.0);
    }

    #[test]
    fn hyperbolic_values() {
        let p = MassProfile::hyperbolic(1.0, 1.0).unwrap();
        assert_eq!(p.mass_at(0.0).unwrap(), 1.0);
        assert_eq!(p.dmass_at(0.0).unwrap(), 0.0);
        // sqrt(sech 1) and -(1/2) m(1) tanh(1), from a 30-digit evaluation.
        assert!((p.mass_at(1.0).unwrap() - 0.805_018_182_194_592).abs() < 1e-12);
        assert!((p.dmass_at(1.0).unwrap() - (-0.306_548_571_498_767)).abs() < 1e-12);
        assert!((p.d2mass_at(0.0).unwrap() + 0.5).abs() < 1e-15);
    }

    #[test]
    fn out_of_domain_is_rejected() {
        let p = MassProfile::linear(1.0, 5.0).unwrap();
        assert!(matches!(p.mass_at(-0.1), Err(PdmError::Domain { .. })));
        assert!(matches!(p.dmass_at(5.1), Err(PdmError::Domain { .. })));
        let h = MassProfile::hyperbolic(1.0, 1.0).unwrap();
        assert!(h.d2mass_at(25.0).is_err());
    }

    #[test]
    fn bad_parameters_rejected() {
        assert!(MassProfile::linear(0.0, 1.0).is_err());
        assert!(MassProfile::hyperbolic(1.0, -1.0).is_err());
        assert!(MassProfile::hyperbolic_on(1.0, 1.0, 2.0, 1.0).is_err());
    }

    #[test]
    fn custom_profile_checks_derivatives() {
        let good = MassProfile::custom("exp", |x: f64| x.exp(), |x: f64| x.exp(), |x: f64| x.exp(), -1.0, 1.0);
        assert!(good.is_ok());
        let bad = MassProfile::custom("exp", |x: f64| x.exp(), |x: f64| 2.0 * x.exp(), |x: f64| x.exp(), -1.0, 1.0);
        assert!(matches!(bad, Err(PdmError::InvalidParameter(_))));
    }

    #[test]
    fn builtin_derivatives_match_differences() {
        for p in [
            MassProfile::linear(1.7, 8.0).unwrap(),
            MassProfile::hyperbolic(1.3, 0.8).unwrap(),
            MassProfile::hyperbolic(2.0, 2.5).unwrap(),
        ] {
            let c = p.check_derivatives(13);
            assert!(c.first < 1e-6 && c.second < 1e-6, "{p:?}: {c:?}");
        }
    }

    #[test]
    fn central_difference_converges_at_second_order() {
        let p = MassProfile::hyperbolic(1.0, 1.0).unwrap();
        let x = 0.7;
        let err = |h: f64| ((p.m(x + h) - p.m(x - h)) / (2.0 * h) - p.dm(x)).abs();
        let ratio = err(1e-2) / err(5e-3);
        assert!((ratio - 4.0).abs() < 0.05, "ratio {ratio}");
    }

    #[test]
    fn spec_json_round_trip() {
        let s: ProfileSpec = serde_json::from_str(r#"{"kind":"linear","mu":1.0,"xhi":20.0}"#).unwrap();
        assert_eq!(s, ProfileSpec::Linear { mu: 1.0, xhi: 20.0 });
        let h: ProfileSpec =
            serde_json::from_str(r#"{"kind":"hyperbolic","m0":1.0,"a":1.0,"xlo":-20.0,"xhi":20.0}"#).unwrap();
        assert_eq!(h.build().unwrap().domain(), (-20.0, 20.0));
        assert!(serde_json::from_str::<ProfileSpec>(r#"{"kind":"linear","mu":1.0,"xhi":2.0,"extra":1}"#).is_err());
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn hyperbolic_is_even(m0 in 0.1f64..5.0, a in 0.1f64..3.0, x in 0.0f64..15.0) {
                let p = MassProfile::hyperbolic(m0, a).unwrap();
                prop_assert_eq!(p.m(x), p.m(-x));
                prop_assert_eq!(p.dm(x), -p.dm(-x));
                prop_assert_eq!(p.d2m(x), p.d2m(-x));
            }

            #[test]
            fn linear_scales_with_mu(mu in 0.1f64..5.0, c in 0.1f64..5.0, x in 0.0f64..10.0) {
                let p = MassProfile::linear(mu, 10.0).unwrap();
                let q = MassProfile::linear(c * mu, 10.0).unwrap();
                let lhs = q.mass_at(x).unwrap();
                let rhs = c * p.mass_at(x).unwrap();
                prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0));
            }

            #[test]
            fn hyperbolic_mass_positive(m0 in 0.1f64..5.0, a in 0.1f64..3.0, x in -20.0f64..20.0) {
                let p = MassProfile::hyperbolic(m0, a).unwrap();
                prop_assert!(p.mass_at(x).unwrap() > 0.0);
            }
        }
    }
}
