//! Resolution of unity ∫|z⟩⟨z| dν(z) = 1 for radial measures.
//!
//! With dν = w(|z|) d(Re z) d(Im z), the angular integral kills every
//! off-diagonal element and leaves the diagonal conditions
//! D_n = 2π ∫_0^R S(r²)^{-1} r^{2n+1} w(r) dr / (2b²_{n-1})! = 1.

use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::{FRAC_1_PI, PI, SQRT_2};
use std::fmt;
use std::sync::Arc;

use serde_json::json;

use crate::coherent::{normalization_sum, DomainOfDefinition};
use crate::error::{OscError, Result};
use crate::quadrature::integrate_adaptive;
use crate::recurrence::{gen_factorial, CoefficientSequence, FamilyLabel};
use crate::report::VerificationReport;
use crate::specfun::{bessel_i, bessel_k_scaled, legendre_p, SeriesControl};

type WeightFn = Arc<dyn Fn(f64) -> Result<f64> + Send + Sync>;

/// Radial density of a coherent-state measure on the disk |z| < radius.
#[derive(Clone)]
pub struct RadialMeasure {
    weight: WeightFn,
    pub radius: f64,
    pub family: FamilyLabel,
    pub name: &'static str,
    /// Upper integration limit when the integrand cannot be evaluated up to the radius.
    pub cutoff: Option<f64>,
}

impl fmt::Debug for RadialMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialMeasure")
            .field("name", &self.name)
            .field("family", &self.family)
            .field("radius", &self.radius)
            .field("cutoff", &self.cutoff)
            .finish_non_exhaustive()
    }
}

impl RadialMeasure {
    pub fn weight(&self, r: f64) -> Result<f64> {
        if !(r >= 0.0 && r < self.radius) {
            return Err(OscError::OutOfDomain {
                value: r,
                radius: self.radius,
            });
        }
        (self.weight)(r)
    }
}

/// w(r) = (√2/π) K_α(√2 r) I_α(√2 r) on the whole plane.
pub fn laguerre_measure(alpha: f64) -> Result<RadialMeasure> {
    if !(alpha > -1.0) {
        return Err(OscError::InvalidParameter(format!("laguerre requires alpha > -1, got {alpha}")));
    }
    let ctl = SeriesControl::default();
    Ok(RadialMeasure {
        weight: Arc::new(move |r| {
            let x = SQRT_2 * r;
            // e^x K and e^{-x} I stay in range far beyond where K or I alone would not
            Ok(SQRT_2 * FRAC_1_PI * bessel_k_scaled(alpha, x, ctl)? * bessel_i(alpha, x, ctl)? * (-x).exp())
        }),
        radius: f64::INFINITY,
        family: FamilyLabel::Laguerre,
        name: "laguerre",
        cutoff: None,
    })
}

/// Relative distance from the boundary 2r² = 1 at which the Legendre
/// integral is truncated; S(r²) diverges there and its series slows down.
pub const LEGENDRE_EDGE_GAP: f64 = 1e-3;

/// w(r) = [(4r²-5)P_{1/2}(r²-1) - 3P_{3/2}(r²-1)] / (2(r²-2)) on |z| < 1/√2.
pub fn legendre_measure() -> RadialMeasure {
    RadialMeasure {
        weight: Arc::new(|r| {
            let t = r * r;
            let x = t - 1.0;
            if x <= -1.0 {
                // P_ν has a logarithmic singularity at -1; callers weight it by r^{2n+1}
                return Ok(0.0);
            }
            Ok(((4.0 * t - 5.0) * legendre_p(0.5, x)? - 3.0 * legendre_p(1.5, x)?) / (2.0 * (t - 2.0)))
        }),
        radius: std::f64::consts::FRAC_1_SQRT_2,
        family: FamilyLabel::Legendre,
        name: "legendre",
        cutoff: Some((0.5 * (1.0 - LEGENDRE_EDGE_GAP)).sqrt()),
    }
}

/// The classical Glauber measure w = 1/π, for which D_n = 1 exactly.
pub fn hermite_calibration_measure() -> RadialMeasure {
    RadialMeasure {
        weight: Arc::new(|_| Ok(FRAC_1_PI)),
        radius: f64::INFINITY,
        family: FamilyLabel::Hermite,
        name: "hermite_calibration",
        cutoff: None,
    }
}

/// Quadrature controls for `check_unity`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitySettings {
    pub rel_tol: f64,
    pub max_panels: usize,
}

impl Default for UnitySettings {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            max_panels: 4000,
        }
    }
}

struct Integrand<'a> {
    coeffs: &'a CoefficientSequence,
    measure: &'a RadialMeasure,
    inv_s: RefCell<HashMap<u64, f64>>,
    failure: RefCell<Option<OscError>>,
}

impl Integrand<'_> {
    /// S(r²)^{-1} w(r); an overflowing S counts as 0 since w is finite.
    fn kernel(&self, r: f64) -> f64 {
        let eval = || -> Result<f64> {
            let inv_s = match self.inv_s.borrow().get(&r.to_bits()) {
                Some(&v) => v,
                None => match normalization_sum(self.coeffs, r * r, 1e-15) {
                    Ok(s) => 1.0 / s,
                    Err(OscError::Overflow(_)) => 0.0,
                    Err(e) => return Err(e),
                },
            };
            self.inv_s.borrow_mut().insert(r.to_bits(), inv_s);
            if inv_s == 0.0 {
                return Ok(0.0);
            }
            Ok(inv_s * self.measure.weight(r)?)
        };
        eval().unwrap_or_else(|e| {
            self.failure.borrow_mut().get_or_insert(e);
            f64::NAN
        })
    }

    fn moment(&self, n: usize, r: f64) -> f64 {
        let k = self.kernel(r);
        if k == 0.0 {
            0.0
        } else {
            k * r.powi(2 * n as i32 + 1)
        }
    }

    fn take_failure(&self) -> Option<OscError> {
        self.failure.borrow_mut().take()
    }
}

/// Integration limit for an unbounded disk: doubles r until the n_max
/// integrand has fallen 40 orders of magnitude below its largest sampled value.
fn semi_infinite_cutoff(integrand: &Integrand<'_>, n_max: usize) -> Result<f64> {
    let mut peak = 0.0f64;
    let mut r = 1.0;
    while r < 1e6 {
        let v = integrand.moment(n_max, r).abs();
        if let Some(e) = integrand.take_failure() {
            return Err(e);
        }
        if v > peak {
            peak = v;
        } else if v <= 1e-40 * peak {
            return Ok(r);
        }
        r *= 2.0;
    }
    Err(OscError::NonConvergence {
        what: "radial integrand decay",
        iterations: 20,
    })
}

/// Radial moments D_0..D_{n_max}; returns (D, quadrature error estimates, upper limit).
pub fn unity_moments(
    coeffs: &CoefficientSequence,
    measure: &RadialMeasure,
    n_max: usize,
    settings: UnitySettings,
) -> Result<(Vec<f64>, Vec<f64>, f64)> {
    if coeffs.label() != measure.family {
        return Err(OscError::InvalidParameter(format!(
            "measure {} does not belong to family {}",
            measure.name,
            coeffs.label()
        )));
    }
    let domain = DomainOfDefinition::of(coeffs);
    if measure.radius > domain.radius {
        return Err(OscError::InvalidParameter("measure extends past the coherent-state domain".into()));
    }
    let integrand = Integrand {
        coeffs,
        measure,
        inv_s: RefCell::new(HashMap::new()),
        failure: RefCell::new(None),
    };
    let upper = match measure.cutoff {
        Some(c) => c,
        None if measure.radius.is_finite() => measure.radius,
        None => semi_infinite_cutoff(&integrand, n_max)?,
    };
    let mut breaks = Vec::new();
    let mut b = 1.0;
    while b < upper {
        breaks.push(b);
        b *= 2.0;
    }
    let mut values = Vec::with_capacity(n_max + 1);
    let mut errors = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let result = integrate_adaptive(
            |r| integrand.moment(n, r),
            0.0,
            upper,
            &breaks,
            0.0,
            settings.rel_tol,
            settings.max_panels,
        );
        if let Some(e) = integrand.take_failure() {
            return Err(e);
        }
        let integral = result?;
        let scale = 2.0 * PI / gen_factorial(coeffs, n, 2.0);
        values.push(scale * integral.value);
        errors.push(scale * integral.error);
    }
    Ok((values, errors, upper))
}

/// Checks that D_n is independent of n. The absolute level D_0 is reported,
/// not asserted. Legendre reports are informational.
pub fn check_unity(
    coeffs: &CoefficientSequence,
    measure: &RadialMeasure,
    n_max: usize,
    tol: f64,
) -> Result<VerificationReport> {
    let (d, errors, upper) = unity_moments(coeffs, measure, n_max, UnitySettings::default())?;
    let spread = d.iter().map(|dn| (dn / d[0] - 1.0).abs()).fold(0.0, f64::max);
    let mut report = VerificationReport::new("unity", coeffs.label().name())
        .with_param("n_max", n_max as f64)
        .with_details(json!({
            "measure": measure.name,
            "d": d,
            "d0": d[0],
            "spread": spread,
            "quadrature_error": errors,
            "upper_limit": upper,
        }));
    if let Some(alpha) = coeffs.alpha() {
        report = report.with_param("alpha", alpha);
    }
    Ok(if coeffs.label() == FamilyLabel::Legendre {
        report.informational(spread)
    } else {
        report.judged(spread, tol)
    })
}
