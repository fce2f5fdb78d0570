//! Special-function kernel: gamma, Pochhammer, modified Bessel functions,
//! the Gauss hypergeometric series and the Legendre function of real degree.
//!
//! Everything here is evaluated in `f64` (or `Complex64` where the argument
//! can be complex) by convergent series or exponentially convergent
//! quadrature; accuracy targets are roughly 1e-13 relative inside the
//! ranges used by the rest of the crate.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{OscError, Result};

/// Stopping rule shared by the series evaluators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesControl {
    pub rel_tol: f64,
    pub max_terms: usize,
}

impl SeriesControl {
    pub fn new(rel_tol: f64, max_terms: usize) -> Result<Self> {
        if !(rel_tol > 0.0) {
            return Err(OscError::InvalidParameter(format!(
                "rel_tol must be positive, got {rel_tol}"
            )));
        }
        if max_terms == 0 {
            return Err(OscError::InvalidParameter("max_terms must be at least 1".into()));
        }
        Ok(Self { rel_tol, max_terms })
    }
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self {
            rel_tol: 1e-16,
            max_terms: 100_000,
        }
    }
}

const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.round()
}

fn lanczos_sum(x: f64) -> f64 {
    // x is the shifted argument (original minus one)
    let mut acc = LANCZOS_COEFFS[0];
    for (i, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    acc
}

/// Γ(x) for real x that is not a nonpositive integer.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if is_nonpositive_integer(x) {
        return Err(OscError::Pole("gamma"));
    }
    if x < 0.5 {
        // reflection
        let s = (PI * x).sin();
        return Ok(PI / (s * gamma_fn(1.0 - x)?));
    }
    // small positive integers exactly
    if x == x.round() && x <= 23.0 {
        let mut f = 1.0;
        for k in 2..(x as u64) {
            f *= k as f64;
        }
        return Ok(f);
    }
    let xm = x - 1.0;
    let t = xm + LANCZOS_G + 0.5;
    let value = (2.0 * PI).sqrt() * t.powf(xm + 0.5) * (-t).exp() * lanczos_sum(xm);
    if value.is_finite() {
        Ok(value)
    } else {
        Err(OscError::Overflow("gamma"))
    }
}

/// ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(OscError::InvalidParameter(format!(
            "ln_gamma requires a positive argument, got {x}"
        )));
    }
    if x < 0.5 {
        let s = (PI * x).sin();
        return Ok((PI / s).ln() - ln_gamma(1.0 - x)?);
    }
    let xm = x - 1.0;
    let t = xm + LANCZOS_G + 0.5;
    Ok(0.5 * (2.0 * PI).ln() + (xm + 0.5) * t.ln() - t + lanczos_sum(xm).ln())
}

/// Rising factorial (a)_n = a(a+1)…(a+n-1), evaluated as a product.
pub fn pochhammer(a: f64, n: usize) -> f64 {
    (0..n).fold(1.0, |acc, k| acc * (a + k as f64))
}

/// Digamma ψ(x) for real x that is not a nonpositive integer.
pub fn digamma(x: f64) -> Result<f64> {
    if is_nonpositive_integer(x) {
        return Err(OscError::Pole("digamma"));
    }
    if x < 0.5 {
        return Ok(digamma(1.0 - x)? - PI / (PI * x).tan());
    }
    let mut shift = 0.0;
    let mut y = x;
    while y < 10.0 {
        shift -= 1.0 / y;
        y += 1.0;
    }
    let inv2 = 1.0 / (y * y);
    // Bernoulli-number asymptotic tail
    let tail = inv2
        * (1.0 / 12.0
            - inv2
                * (1.0 / 120.0
                    - inv2 * (1.0 / 252.0 - inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0)))));
    Ok(shift + y.ln() - 0.5 / y - tail)
}

/// Modified Bessel function of the first kind, I_α(x), by its power series.
pub fn bessel_i(alpha: f64, x: f64, ctl: SeriesControl) -> Result<f64> {
    if alpha <= -1.0 {
        return Err(OscError::InvalidParameter(format!(
            "bessel_i requires alpha > -1, got {alpha}"
        )));
    }
    if x < 0.0 {
        return Err(OscError::InvalidParameter(format!(
            "bessel_i requires x >= 0, got {x}"
        )));
    }
    if x == 0.0 {
        return match alpha {
            0.0 => Ok(1.0),
            a if a > 0.0 => Ok(0.0),
            _ => Err(OscError::Pole("bessel_i")),
        };
    }
    let reduced = bessel_i_entire(alpha, Complex64::new(x * x / 4.0, 0.0), ctl)?;
    let value = (0.5 * x).powf(alpha) * reduced.re;
    if value.is_finite() {
        Ok(value)
    } else {
        Err(OscError::Overflow("bessel_i"))
    }
}

/// The entire function Σ w^k / (k! Γ(α+k+1)) = w^{-α/2} I_α(2√w).
///
/// Removing the branch factor makes this single-valued in w, which is what the
/// Laguerre closed forms need for complex arguments and for x = 0 with α < 0.
pub fn bessel_i_entire(alpha: f64, w: Complex64, ctl: SeriesControl) -> Result<Complex64> {
    let mut term = Complex64::new(1.0 / gamma_fn(alpha + 1.0)?, 0.0);
    let mut sum = term;
    let peak = w.norm();
    for k in 1..ctl.max_terms {
        let kf = k as f64;
        term *= w / (kf * (kf + alpha));
        sum += term;
        if kf > peak && term.norm() <= ctl.rel_tol * sum.norm() {
            return Ok(sum);
        }
        if term.norm() == 0.0 {
            return Ok(sum);
        }
    }
    Err(OscError::NonConvergence {
        what: "bessel_i series",
        iterations: ctl.max_terms,
    })
}

/// e^x K_α(x) for x > 0.
///
/// Trapezoidal rule on K_α(x) = ∫_0^∞ exp(-x cosh t) cosh(α t) dt. The integrand
/// is analytic in a strip around the real axis and decays doubly
/// exponentially, so the rule converges geometrically in the step size and
/// works for every real order, integer or not.
pub fn bessel_k_scaled(alpha: f64, x: f64, ctl: SeriesControl) -> Result<f64> {
    if !(x > 0.0) {
        return Err(OscError::InvalidParameter(format!(
            "bessel_k requires x > 0, got {x}"
        )));
    }
    const STEP: f64 = 0.05;
    let cutoff = -(ctl.rel_tol.max(1e-300)).ln() + 5.0;
    let nu = alpha.abs();
    let integrand = |t: f64| {
        let sh = (0.5 * t).sinh();
        (-x * 2.0 * sh * sh).exp() * (nu * t).cosh()
    };
    let mut sum = 0.5 * integrand(0.0);
    for j in 1..ctl.max_terms {
        let t = j as f64 * STEP;
        sum += integrand(t);
        let sh = (0.5 * t).sinh();
        if x * 2.0 * sh * sh - nu * t > cutoff {
            return Ok(STEP * sum);
        }
    }
    Err(OscError::NonConvergence {
        what: "bessel_k quadrature",
        iterations: ctl.max_terms,
    })
}

/// Modified Bessel function of the second kind, K_α(x), x > 0.
pub fn bessel_k(alpha: f64, x: f64, ctl: SeriesControl) -> Result<f64> {
    Ok(bessel_k_scaled(alpha, x, ctl)? * (-x).exp())
}

/// Gauss hypergeometric series ₂F₁(a, b; c; w) for |w| < 1.
pub fn gauss_2f1(a: f64, b: f64, c: f64, w: Complex64, ctl: SeriesControl) -> Result<Complex64> {
    if is_nonpositive_integer(c) {
        return Err(OscError::Pole("gauss_2f1"));
    }
    if w.norm() >= 1.0 {
        return Err(OscError::OutOfDomain {
            value: w.norm(),
            radius: 1.0,
        });
    }
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for n in 0..ctl.max_terms {
        let nf = n as f64;
        let ratio = (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0));
        term *= w * ratio;
        if term.norm() == 0.0 {
            return Ok(sum);
        }
        sum += term;
        // geometric bound on the remaining tail once the term ratio is below one
        let q = (ratio * w.norm()).abs();
        if q < 1.0 && term.norm() * q / (1.0 - q) <= ctl.rel_tol * sum.norm() {
            return Ok(sum);
        }
    }
    Err(OscError::NonConvergence {
        what: "gauss_2f1 series",
        iterations: ctl.max_terms,
    })
}

/// ₂F₁(a, b; a+b; w) for real w in (0, 1) via the logarithmic connection formula
/// in powers of (1 - w). Requires a, b not nonpositive integers.
fn gauss_2f1_log_case(a: f64, b: f64, w: f64, ctl: SeriesControl) -> Result<f64> {
    let one_minus = 1.0 - w;
    let log_term = one_minus.ln();
    let prefactor = gamma_fn(a + b)? / (gamma_fn(a)? * gamma_fn(b)?);
    let mut psi_1 = digamma(1.0)?;
    let mut psi_a = digamma(a)?;
    let mut psi_b = digamma(b)?;
    let mut coeff = 1.0;
    let mut power = 1.0;
    let mut sum = 0.0;
    for n in 0..ctl.max_terms {
        let nf = n as f64;
        let term = coeff * power * (2.0 * psi_1 - psi_a - psi_b - log_term);
        sum += term;
        if n > 2 && term.abs() <= ctl.rel_tol * sum.abs() {
            return Ok(prefactor * sum);
        }
        coeff *= (a + nf) * (b + nf) / ((nf + 1.0) * (nf + 1.0));
        power *= one_minus;
        psi_1 += 1.0 / (nf + 1.0);
        psi_a += 1.0 / (a + nf);
        psi_b += 1.0 / (b + nf);
    }
    Err(OscError::NonConvergence {
        what: "gauss_2f1 logarithmic series",
        iterations: ctl.max_terms,
    })
}

/// Legendre function of the first kind P_ν(x) on the cut, -1 < x < 1.
///
/// Uses ₂F₁(-ν, ν+1; 1; (1-x)/2). Past the midpoint of the interval the series
/// is re-expanded about x = -1, where it has a logarithmic singularity.
pub fn legendre_p(nu: f64, x: f64) -> Result<f64> {
    if !(x > -1.0 && x < 1.0) {
        return Err(OscError::OutOfDomain {
            value: x,
            radius: 1.0,
        });
    }
    let w = 0.5 * (1.0 - x);
    let a = -nu;
    let b = nu + 1.0;
    let ctl = SeriesControl::default();
    if w <= 0.5 || is_nonpositive_integer(a) || is_nonpositive_integer(b) {
        let value = gauss_2f1(a, b, 1.0, Complex64::new(w, 0.0), ctl)?;
        Ok(value.re)
    } else {
        gauss_2f1_log_case(a, b, w, ctl)
    }
}
