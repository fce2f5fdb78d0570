//! Glauber–Barut–Girardello coherent states of a generalized oscillator.
//!
//! |z⟩ = S^{-1/2} Σ z^n / ∏_{k<n} (√2|b_k|) s_nΨ_n with S(|z|²) = Σ |z|^{2n}/(2b²_{n-1})!,
//! where s_n = ∏_{k<n} sign(b_k). The phase s_n only matters for families with
//! negative b_n (Laguerre); it makes the lowering operator a nonnegative shift.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use num_complex::Complex64;

use crate::error::{OscError, Result};
use crate::oscillator::lowering_shift;
use crate::recurrence::{eval_poly_all, CoefficientSequence, FamilyLabel};
use crate::specfun::{bessel_i, bessel_i_entire, gamma_fn, gauss_2f1, SeriesControl};

/// Default truncation cap, overridable through `OSC_MAX_DIM`.
pub const DEFAULT_MAX_DIM: usize = 512;
/// Target for the geometric tail bound when choosing a truncation.
pub const TAIL_TOL: f64 = 1e-12;
/// Tail target for pointwise wavefunction sums. The bound controls Σ|c_n|², so
/// amplitudes need its square root to be small compared with |Ψ_n(x)|.
pub const WAVE_TAIL_TOL: f64 = 1e-30;

const SERIES_CAP: usize = 5_000_000;
const BRANCH_EPS: f64 = 1e-8;

pub fn max_dim() -> usize {
    std::env::var("OSC_MAX_DIM")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&d| d >= 2)
        .unwrap_or(DEFAULT_MAX_DIM)
}

/// Disk |z| < radius on which the coherent-state series converges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainOfDefinition {
    pub radius: f64,
    /// radius², stored exactly so the boundary t = 1/2 is excluded without rounding.
    pub radius_squared: f64,
}

impl DomainOfDefinition {
    /// The radius is √(lim 2b_n²). For custom families the limit is estimated
    /// from the coefficient window [256, 1024).
    pub fn of(coeffs: &CoefficientSequence) -> Self {
        let radius_squared = match coeffs.label() {
            FamilyLabel::Hermite | FamilyLabel::Laguerre => f64::INFINITY,
            FamilyLabel::Legendre | FamilyLabel::ChebyshevFirst => 0.5,
            FamilyLabel::Custom => {
                let (early, late) = (coeffs.b_squared(256), coeffs.b_squared(1024));
                if late > 1.5 * early {
                    f64::INFINITY
                } else {
                    2.0 * coeffs.b_squared_tail_inf(256)
                }
            }
        };
        Self::from_radius_squared(radius_squared)
    }

    pub fn from_radius_squared(radius_squared: f64) -> Self {
        Self {
            radius: radius_squared.sqrt(),
            radius_squared,
        }
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.norm_sqr() < self.radius_squared
    }

    fn check(&self, z: Complex64) -> Result<()> {
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(OscError::InvalidParameter(format!("z = {z} is not finite")));
        }
        if self.contains(z) {
            Ok(())
        } else {
            Err(OscError::OutOfDomain {
                value: z.norm(),
                radius: self.radius,
            })
        }
    }
}

/// Σ w^n/(2b²_{n-1})! for complex w. Terminates once the geometric majorant of
/// the remainder drops below `rel_tol` times Σ|terms|.
fn generalized_exp(coeffs: &CoefficientSequence, w: Complex64, rel_tol: f64) -> Result<Complex64> {
    let domain = DomainOfDefinition::of(coeffs);
    if w.norm() >= domain.radius_squared {
        return Err(OscError::OutOfDomain {
            value: w.norm().sqrt(),
            radius: domain.radius,
        });
    }
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut abs_sum = 1.0;
    let mut ratio = 0.0;
    for n in 0..SERIES_CAP {
        ratio = w.norm() / (2.0 * coeffs.b_squared(n));
        term *= w / (2.0 * coeffs.b_squared(n));
        sum += term;
        abs_sum += term.norm();
        if !abs_sum.is_finite() {
            return Err(OscError::Overflow("generalized exponential"));
        }
        if term.norm() == 0.0 {
            return Ok(sum);
        }
        let q = w.norm() / (2.0 * coeffs.b_squared_tail_inf(n + 1));
        if q < 1.0 && term.norm() * q / (1.0 - q) <= rel_tol * abs_sum {
            return Ok(sum);
        }
    }
    if ratio >= 1.0 {
        // terms stopped decaying: the estimated radius was too generous
        return Err(OscError::OutOfDomain {
            value: w.norm().sqrt(),
            radius: domain.radius,
        });
    }
    Err(OscError::NonConvergence {
        what: "normalization series",
        iterations: SERIES_CAP,
    })
}

/// S(t) = Σ tⁿ/(2b²_{n-1})!, the generalized exponential exp_{[2b²]}(t).
pub fn normalization_sum(coeffs: &CoefficientSequence, t: f64, rel_tol: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(OscError::InvalidParameter(format!("t = {t} must be nonnegative")));
    }
    Ok(generalized_exp(coeffs, Complex64::new(t, 0.0), rel_tol)?.re)
}

/// Truncated coefficient vector of |z⟩ in the basis s_nΨ_n.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherentStateVector {
    pub z: Complex64,
    pub dim: usize,
    pub coeffs: Vec<Complex64>,
    /// S(|z|²) before normalization.
    pub s: f64,
    /// Geometric majorant of Σ_{n ≥ dim} |c_n|².
    pub tail_bound: f64,
}

fn tail_majorant(coeffs: &CoefficientSequence, z: Complex64, n: usize, c_n_sq: f64) -> f64 {
    let q = z.norm_sqr() / (2.0 * coeffs.b_squared_tail_inf(n));
    if q < 1.0 {
        c_n_sq / (1.0 - q)
    } else {
        f64::INFINITY
    }
}

pub fn coherent_state(coeffs: &CoefficientSequence, z: Complex64, dim: usize) -> Result<CoherentStateVector> {
    DomainOfDefinition::of(coeffs).check(z)?;
    if dim == 0 {
        return Err(OscError::DimensionTooSmall {
            dim,
            reason: "need at least 1".into(),
        });
    }
    let s = normalization_sum(coeffs, z.norm_sqr(), 1e-16)?;
    let mut c = Complex64::new(s.sqrt().recip(), 0.0);
    let mut out = Vec::with_capacity(dim);
    for n in 0..dim {
        out.push(c);
        c *= z / (SQRT_2 * coeffs.b(n).abs());
    }
    let tail_bound = tail_majorant(coeffs, z, dim, c.norm_sqr());
    Ok(CoherentStateVector {
        z,
        dim,
        coeffs: out,
        s,
        tail_bound,
    })
}

/// Smallest dim ≥ 2 whose tail bound is below `tol`, up to `max_dim()`.
pub fn auto_dim(coeffs: &CoefficientSequence, z: Complex64, tol: f64) -> Result<usize> {
    DomainOfDefinition::of(coeffs).check(z)?;
    let cap = max_dim();
    let s = normalization_sum(coeffs, z.norm_sqr(), 1e-16)?;
    let mut c_sq = 1.0 / s;
    for n in 0..=cap {
        if n >= 2 && tail_majorant(coeffs, z, n, c_sq) < tol {
            return Ok(n);
        }
        c_sq *= z.norm_sqr() / (2.0 * coeffs.b_squared(n));
    }
    Err(OscError::DimensionTooSmall {
        dim: cap,
        reason: format!("tail bound not below {tol:e} at |z| = {}", z.norm()),
    })
}

/// Coherent state truncated at `auto_dim(.., TAIL_TOL)`.
pub fn coherent_state_auto(coeffs: &CoefficientSequence, z: Complex64) -> Result<CoherentStateVector> {
    coherent_state_with_tail(coeffs, z, TAIL_TOL)
}

pub fn coherent_state_with_tail(coeffs: &CoefficientSequence, z: Complex64, tol: f64) -> Result<CoherentStateVector> {
    coherent_state(coeffs, z, auto_dim(coeffs, z, tol)?)
}

impl CoherentStateVector {
    pub fn norm_squared(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// ‖(a - z)c‖ over rows 0..dim-1, the rows unaffected by truncation.
    pub fn eigen_residual(&self, coeffs: &CoefficientSequence) -> Result<f64> {
        let a = lowering_shift(coeffs, self.dim)?;
        let ac = a.apply(&self.coeffs);
        Ok(ac
            .iter()
            .zip(&self.coeffs)
            .take(self.dim - 1)
            .map(|(lhs, c)| (lhs - self.z * c).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }

    /// Σ c_n s_n Ψ_n(x).
    pub fn wavefunction(&self, coeffs: &CoefficientSequence, x: f64) -> Result<Complex64> {
        let psi = eval_poly_all(coeffs, self.dim - 1, x)?;
        let mut phase = 1.0;
        let mut sum = Complex64::new(0.0, 0.0);
        for (n, (c, p)) in self.coeffs.iter().zip(&psi).enumerate() {
            sum += c * (phase * p);
            phase *= coeffs.b(n).signum();
        }
        Ok(sum)
    }
}

/// ⟨z₁|z₂⟩ = S(z̄₁z₂)/√(S(|z₁|²)S(|z₂|²)), S continued to complex argument.
pub fn overlap(coeffs: &CoefficientSequence, z1: Complex64, z2: Complex64, rel_tol: f64) -> Result<Complex64> {
    let domain = DomainOfDefinition::of(coeffs);
    domain.check(z1)?;
    domain.check(z2)?;
    let cross = generalized_exp(coeffs, z1.conj() * z2, rel_tol)?;
    let s1 = normalization_sum(coeffs, z1.norm_sqr(), rel_tol)?;
    let s2 = normalization_sum(coeffs, z2.norm_sqr(), rel_tol)?;
    Ok(cross / (s1 * s2).sqrt())
}

/// Hermite wavefunction exp(√2xz - z²/2 - |z|²/2), from the generating
/// function of the Hermite polynomials.
pub fn hermite_closed_form(z: Complex64, x: f64) -> Complex64 {
    (z * (SQRT_2 * x) - z * z / 2.0 - z.norm_sqr() / 2.0).exp()
}

fn ctl() -> SeriesControl {
    SeriesControl::default()
}

/// I_α(y) for complex y on the principal branch, as (y/2)^α Σ (y²/4)^k/(k!Γ(α+k+1)).
fn bessel_i_complex(alpha: f64, y: Complex64) -> Result<Complex64> {
    let entire = bessel_i_entire(alpha, y * y / 4.0, ctl())?;
    if alpha == 0.0 {
        return Ok(entire);
    }
    Ok((y / 2.0).powf(alpha) * entire)
}

fn laguerre_check(alpha: f64, z: Complex64) -> Result<()> {
    if !(alpha > -1.0) {
        return Err(OscError::InvalidParameter(format!("laguerre requires alpha > -1, got {alpha}")));
    }
    DomainOfDefinition::from_radius_squared(f64::INFINITY).check(z)
}

/// Laguerre norm S = Γ(α+1)(√2/|z|)^α I_α(√2|z|) and wavefunction
/// Σ c_n s_nΨ_n(x) = S^{-1/2} Γ(α+1) e^{-z/√2} Σ_k (xz/√2)^k/(k!Γ(α+k+1)).
///
/// The wavefunction is entire in x z, so x = 0 needs no limit even for α < 0.
pub fn laguerre_closed_forms(alpha: f64, z: Complex64, x: f64) -> Result<(f64, Complex64)> {
    laguerre_check(alpha, z)?;
    if !(x >= 0.0) {
        return Err(OscError::InvalidParameter(format!("laguerre wavefunction needs x >= 0, got {x}")));
    }
    let gamma = gamma_fn(alpha + 1.0)?;
    let r = z.norm();
    let norm = if r == 0.0 {
        1.0
    } else {
        gamma * (SQRT_2 / r).powf(alpha) * bessel_i(alpha, SQRT_2 * r, ctl())?
    };
    let wave = (-z * FRAC_1_SQRT_2).exp() * bessel_i_entire(alpha, z * (x * FRAC_1_SQRT_2), ctl())? * gamma
        / norm.sqrt();
    Ok((norm, wave))
}

/// The Laguerre wavefunction exactly as printed:
/// e^{z/√2} I_α(2^{3/4}√(xz)) / ((√2x)^α I_α(√2 z)).
pub fn laguerre_printed_wavefunction(alpha: f64, z: Complex64, x: f64) -> Result<Complex64> {
    laguerre_check(alpha, z)?;
    if !(x > 0.0) || z.norm() == 0.0 {
        return Err(OscError::Pole("printed laguerre wavefunction at x = 0 or z = 0"));
    }
    let num = bessel_i_complex(alpha, 2f64.powf(0.75) * (z * x).sqrt())?;
    let den = (SQRT_2 * x).powf(alpha) * bessel_i_complex(alpha, z * SQRT_2)?;
    Ok((z * FRAC_1_SQRT_2).exp() * num / den)
}

/// Laguerre overlap in Bessel-ratio form,
/// I_α(k√(z̄₁z₂)) / √(I_α(√2|z₁|) I_α(√2|z₂|)), with argument scale k.
/// k = √2 reproduces the series when z̄₁z₂ is real and positive; the printed
/// scale is k = 2.
pub fn laguerre_overlap_bessel_ratio(alpha: f64, z1: Complex64, z2: Complex64, arg_scale: f64) -> Result<Complex64> {
    laguerre_check(alpha, z1)?;
    laguerre_check(alpha, z2)?;
    let num = bessel_i_complex(alpha, (z1.conj() * z2).sqrt() * arg_scale)?;
    let d1 = bessel_i(alpha, SQRT_2 * z1.norm(), ctl())?;
    let d2 = bessel_i(alpha, SQRT_2 * z2.norm(), ctl())?;
    Ok(num / (d1 * d2).sqrt())
}

fn legendre_check(z: Complex64) -> Result<()> {
    DomainOfDefinition::from_radius_squared(0.5).check(z)
}

/// ₂F₁ on the principal branch, applying the Pfaff transformation
/// ₂F₁(a,b;c;w) = (1-w)^{-a} ₂F₁(a,c-b;c;w/(w-1)) when it shrinks the argument.
fn hyp2f1_principal(a: f64, b: f64, c: f64, w: Complex64) -> Result<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    let mapped = w / (w - one);
    if w.norm() > 0.5 && mapped.norm() < w.norm() {
        Ok((one - w).powf(-a) * gauss_2f1(a, c - b, c, mapped, ctl())?)
    } else {
        gauss_2f1(a, b, c, w, ctl())
    }
}

fn legendre_wave_with(u: Complex64, x: f64) -> Result<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    let base = one - u * x;
    if base.norm() < BRANCH_EPS {
        return Err(OscError::Pole("legendre wavefunction branch point 1 - xu = 0"));
    }
    let arg = u * u * (x * x - 1.0) / (base * base);
    Ok(base.powf(-1.5) * hyp2f1_principal(0.75, 1.25, 1.0, arg)?)
}

/// Legendre norm S = ₂F₁(½, 3/2; 1; 2|z|²) and wavefunction
/// (1 - xu)^{-3/2} ₂F₁(3/4, 5/4; 1; u²(x²-1)/(1-xu)²)/√S with u = √2 z.
pub fn legendre_closed_forms(z: Complex64, x: f64) -> Result<(f64, Complex64)> {
    legendre_check(z)?;
    if !(-1.0..=1.0).contains(&x) {
        return Err(OscError::InvalidParameter(format!("legendre wavefunction needs x in [-1, 1], got {x}")));
    }
    let norm = gauss_2f1(0.5, 1.5, 1.0, Complex64::new(2.0 * z.norm_sqr(), 0.0), ctl())?.re;
    Ok((norm, legendre_wave_with(z * SQRT_2, x)? / norm.sqrt()))
}

/// The Legendre wavefunction as printed, with u = 2z in place of √2 z.
pub fn legendre_printed_wavefunction(z: Complex64, x: f64) -> Result<Complex64> {
    let (norm, _) = legendre_closed_forms(z, x)?;
    Ok(legendre_wave_with(z * 2.0, x)? / norm.sqrt())
}

/// ₂F₁(½,3/2;1;2z̄₁z₂)/√(₂F₁(½,3/2;1;2|z₁|²)₂F₁(½,3/2;1;2|z₂|²)).
pub fn legendre_overlap_closed(z1: Complex64, z2: Complex64) -> Result<Complex64> {
    legendre_check(z1)?;
    legendre_check(z2)?;
    let f = |w: Complex64| gauss_2f1(0.5, 1.5, 1.0, w * 2.0, ctl());
    let n1 = f(Complex64::new(z1.norm_sqr(), 0.0))?.re;
    let n2 = f(Complex64::new(z2.norm_sqr(), 0.0))?.re;
    Ok(f(z1.conj() * z2)? / (n1 * n2).sqrt())
}

/// Chebyshev coherent-state wavefunction evaluated three ways.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChebyshevClosedForm {
    /// Σ c_nΨ_n(x) from the coherent-state series.
    pub series: Complex64,
    /// √((1-2|z|²)/(1-|z|²)) (1 - √2zx)/(1 - 2√2zx + 2z²).
    pub derived: Complex64,
    /// √2/(1-2|z|²) · (1 - √2zx)/(1 - 2√2zx + 2z²).
    pub printed: Complex64,
    /// printed / derived = √(2(1-|z|²)/(1-2|z|²)³).
    pub printed_ratio: Complex64,
}

pub fn chebyshev_closed_form(z: Complex64, x: f64) -> Result<ChebyshevClosedForm> {
    legendre_check(z)?;
    if !(x > -1.0 && x < 1.0) {
        return Err(OscError::InvalidParameter(format!("chebyshev wavefunction needs x in (-1, 1), got {x}")));
    }
    let coeffs = CoefficientSequence::chebyshev_first();
    let series = coherent_state_with_tail(&coeffs, z, WAVE_TAIL_TOL)?.wavefunction(&coeffs, x)?;
    let t = z.norm_sqr();
    let one = Complex64::new(1.0, 0.0);
    let shape = (one - z * (SQRT_2 * x)) / (one - z * (2.0 * SQRT_2 * x) + z * z * 2.0);
    let derived = shape * ((1.0 - 2.0 * t) / (1.0 - t)).sqrt();
    let printed = shape * (SQRT_2 / (1.0 - 2.0 * t));
    Ok(ChebyshevClosedForm {
        series,
        derived,
        printed,
        printed_ratio: printed / derived,
    })
}
