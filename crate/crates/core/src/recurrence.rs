//! Recurrence-coefficient families, orthonormal polynomial evaluation and
//! generalized factorials.
//!
//! A family is the data {a_n, b_n} of the three-term recurrence
//!
//! ```text
//! x Ψ_n(x) = b_n Ψ_{n+1}(x) + a_n Ψ_n(x) + b_{n-1} Ψ_{n-1}(x),   Ψ_0 = 1, b_{-1} = 0
//! ```
//!
//! with a_n ≡ 0 for symmetric measures.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{OscError, Result};
use crate::specfun::gamma_fn;

/// Number of leading coefficients screened when validating a custom family.
const CUSTOM_SCREEN_LEN: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyLabel {
    Hermite,
    Laguerre,
    Legendre,
    ChebyshevFirst,
    Custom,
}

impl FamilyLabel {
    pub const BUILTINS: [FamilyLabel; 4] = [
        FamilyLabel::Hermite,
        FamilyLabel::Laguerre,
        FamilyLabel::Legendre,
        FamilyLabel::ChebyshevFirst,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FamilyLabel::Hermite => "hermite",
            FamilyLabel::Laguerre => "laguerre",
            FamilyLabel::Legendre => "legendre",
            FamilyLabel::ChebyshevFirst => "chebyshev",
            FamilyLabel::Custom => "custom",
        }
    }
}

impl fmt::Display for FamilyLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyLabel {
    type Err = OscError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hermite" => Ok(FamilyLabel::Hermite),
            "laguerre" => Ok(FamilyLabel::Laguerre),
            "legendre" => Ok(FamilyLabel::Legendre),
            "chebyshev" | "chebyshev_first" | "chebyshev-first" => Ok(FamilyLabel::ChebyshevFirst),
            "custom" => Ok(FamilyLabel::Custom),
            _ => Err(OscError::UnknownFamily(s.to_string())),
        }
    }
}

/// A real interval, possibly unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }
}

/// Which quadrature family matches a measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightKind {
    /// e^{-x²}/√π on ℝ
    Gaussian,
    /// x^α e^{-x}/Γ(α+1) on [0, ∞)
    Laguerre { alpha: f64 },
    /// ½ on [-1, 1]
    Uniform,
    /// 1/(π√(1-x²)) on (-1, 1)
    ChebyshevFirst,
    Custom,
}

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type IndexFn = Arc<dyn Fn(usize) -> f64 + Send + Sync>;

/// Orthogonality measure: support plus a probability density.
#[derive(Clone)]
pub struct MeasureSpec {
    support: Interval,
    density: RealFn,
    total_mass: f64,
    kind: WeightKind,
}

impl MeasureSpec {
    /// A user-supplied measure. The density must integrate to one over the
    /// (finite) support; this is checked with a 200-node Gauss–Legendre rule.
    pub fn custom(support: Interval, density: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Result<Self> {
        let spec = Self {
            support,
            density: Arc::new(density),
            total_mass: 1.0,
            kind: WeightKind::Custom,
        };
        let mass = crate::quadrature::gauss_rule(&spec, 200)?.integrate(|_| 1.0);
        if (mass - 1.0).abs() > 1e-9 {
            return Err(OscError::InvalidParameter(format!(
                "custom density integrates to {mass}, expected 1"
            )));
        }
        Ok(spec)
    }

    fn builtin(support: Interval, kind: WeightKind, density: RealFn) -> Self {
        Self {
            support,
            density,
            total_mass: 1.0,
            kind,
        }
    }

    pub fn support(&self) -> Interval {
        self.support
    }

    pub fn density(&self, x: f64) -> f64 {
        if self.support.contains(x) {
            (self.density)(x)
        } else {
            0.0
        }
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    pub fn weight_kind(&self) -> WeightKind {
        self.kind
    }
}

impl fmt::Debug for MeasureSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MeasureSpec")
            .field("support", &self.support)
            .field("kind", &self.kind)
            .finish_non_exhaustive()
    }
}

#[derive(Clone)]
enum Family {
    Hermite,
    Laguerre { alpha: f64 },
    Legendre,
    ChebyshevFirst,
    Custom {
        a: IndexFn,
        b: IndexFn,
        measure: Option<MeasureSpec>,
    },
}

/// Recurrence data {a_n, b_n} of an orthonormal polynomial family.
#[derive(Clone)]
pub struct CoefficientSequence {
    family: Family,
    symmetric: bool,
    support: Interval,
}

impl fmt::Debug for CoefficientSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CoefficientSequence")
            .field("label", &self.label())
            .field("params", &self.params())
            .field("symmetric", &self.symmetric)
            .field("support", &self.support)
            .finish()
    }
}

/// Look up a builtin family. Laguerre reads α from `params[0]` (default 0).
pub fn builtin_family(label: FamilyLabel, params: &[f64]) -> Result<CoefficientSequence> {
    match label {
        FamilyLabel::Hermite => Ok(CoefficientSequence::hermite()),
        FamilyLabel::Laguerre => CoefficientSequence::laguerre(params.first().copied().unwrap_or(0.0)),
        FamilyLabel::Legendre => Ok(CoefficientSequence::legendre()),
        FamilyLabel::ChebyshevFirst => Ok(CoefficientSequence::chebyshev_first()),
        FamilyLabel::Custom => Err(OscError::UnknownFamily("custom is not a builtin family".into())),
    }
}

impl CoefficientSequence {
    pub fn hermite() -> Self {
        Self {
            family: Family::Hermite,
            symmetric: true,
            support: Interval::new(f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    pub fn laguerre(alpha: f64) -> Result<Self> {
        if !(alpha > -1.0) || !alpha.is_finite() {
            return Err(OscError::InvalidParameter(format!(
                "laguerre requires alpha > -1, got {alpha}"
            )));
        }
        Ok(Self {
            family: Family::Laguerre { alpha },
            symmetric: false,
            support: Interval::new(0.0, f64::INFINITY),
        })
    }

    pub fn legendre() -> Self {
        Self {
            family: Family::Legendre,
            symmetric: true,
            support: Interval::new(-1.0, 1.0),
        }
    }

    pub fn chebyshev_first() -> Self {
        Self {
            family: Family::ChebyshevFirst,
            symmetric: true,
            support: Interval::new(-1.0, 1.0),
        }
    }

    /// A user-defined family. The leading coefficients are screened for the
    /// irreducibility (b_n ≠ 0) and symmetry (a_n = 0) invariants.
    pub fn custom(
        a: impl Fn(usize) -> f64 + Send + Sync + 'static,
        b: impl Fn(usize) -> f64 + Send + Sync + 'static,
        symmetric: bool,
        support: Interval,
        measure: Option<MeasureSpec>,
    ) -> Result<Self> {
        for n in 0..CUSTOM_SCREEN_LEN {
            let (an, bn) = (a(n), b(n));
            if bn == 0.0 || !bn.is_finite() {
                return Err(OscError::InvalidParameter(format!("b({n}) = {bn} must be finite and nonzero")));
            }
            if !an.is_finite() || (symmetric && an != 0.0) {
                return Err(OscError::InvalidParameter(format!(
                    "a({n}) = {an} incompatible with symmetric = {symmetric}"
                )));
            }
        }
        Ok(Self {
            family: Family::Custom {
                a: Arc::new(a),
                b: Arc::new(b),
                measure,
            },
            symmetric,
            support,
        })
    }

    pub fn label(&self) -> FamilyLabel {
        match self.family {
            Family::Hermite => FamilyLabel::Hermite,
            Family::Laguerre { .. } => FamilyLabel::Laguerre,
            Family::Legendre => FamilyLabel::Legendre,
            Family::ChebyshevFirst => FamilyLabel::ChebyshevFirst,
            Family::Custom { .. } => FamilyLabel::Custom,
        }
    }

    pub fn params(&self) -> Vec<f64> {
        match self.family {
            Family::Laguerre { alpha } => vec![alpha],
            _ => Vec::new(),
        }
    }

    /// Laguerre α, if this is a Laguerre family.
    pub fn alpha(&self) -> Option<f64> {
        match self.family {
            Family::Laguerre { alpha } => Some(alpha),
            _ => None,
        }
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn support(&self) -> Interval {
        self.support
    }

    /// Diagonal coefficient a_n.
    pub fn a(&self, n: usize) -> f64 {
        let nf = n as f64;
        match &self.family {
            Family::Laguerre { alpha } => 2.0 * nf + alpha + 1.0,
            Family::Custom { a, .. } => a(n),
            _ => 0.0,
        }
    }

    /// Off-diagonal coefficient b_n, n ≥ 0. Laguerre keeps its negative sign.
    pub fn b(&self, n: usize) -> f64 {
        self.b_squared(n).sqrt() * self.b_sign(n)
    }

    /// b_n², computed without taking square roots where the family allows.
    pub fn b_squared(&self, n: usize) -> f64 {
        let nf = n as f64;
        match &self.family {
            Family::Hermite => 0.5 * (nf + 1.0),
            Family::Laguerre { alpha } => (nf + 1.0) * (nf + alpha + 1.0),
            Family::Legendre => (nf + 1.0) * (nf + 1.0) / ((2.0 * nf + 1.0) * (2.0 * nf + 3.0)),
            Family::ChebyshevFirst => {
                if n == 0 {
                    0.5
                } else {
                    0.25
                }
            }
            Family::Custom { b, .. } => {
                let v = b(n);
                v * v
            }
        }
    }

    /// b_{n-1} with the b_{-1} = 0 convention.
    pub fn b_prev(&self, n: usize) -> f64 {
        n.checked_sub(1).map_or(0.0, |m| self.b(m))
    }

    /// b²_{n-1} with the b_{-1} = 0 convention.
    pub fn b_prev_squared(&self, n: usize) -> f64 {
        n.checked_sub(1).map_or(0.0, |m| self.b_squared(m))
    }

    /// inf_{m ≥ n} b_m². Exact for builtins; custom families take the minimum
    /// over a finite window, which is only an estimate for decreasing sequences.
    pub fn b_squared_tail_inf(&self, n: usize) -> f64 {
        match &self.family {
            Family::Hermite | Family::Laguerre { .. } => self.b_squared(n),
            // both decrease (or are constant) towards 1/4
            Family::Legendre | Family::ChebyshevFirst => 0.25,
            Family::Custom { .. } => (n..n + CUSTOM_SCREEN_LEN)
                .map(|m| self.b_squared(m))
                .fold(f64::INFINITY, f64::min),
        }
    }

    fn b_sign(&self, n: usize) -> f64 {
        match &self.family {
            Family::Laguerre { .. } => -1.0,
            Family::Custom { b, .. } => b(n).signum(),
            _ => 1.0,
        }
    }

    /// Phase s_n = ∏_{k<n} sign(b_k) relating Ψ_n to the basis in which the
    /// lowering operator has nonnegative entries.
    pub fn phase(&self, n: usize) -> f64 {
        (0..n).fold(1.0, |acc, k| acc * self.b_sign(k))
    }

    /// Orthogonality measure of a builtin family, or the measure attached to a custom one.
    pub fn measure(&self) -> Result<MeasureSpec> {
        measure_of(self)
    }
}

/// Ψ_n(x) by the forward three-term recurrence.
pub fn eval_poly(coeffs: &CoefficientSequence, n: usize, x: f64) -> Result<f64> {
    let (mut prev, mut cur) = (0.0, 1.0);
    for k in 0..n {
        let next = ((x - coeffs.a(k)) * cur - coeffs.b_prev(k) * prev) / coeffs.b(k);
        prev = cur;
        cur = next;
    }
    if cur.is_finite() {
        Ok(cur)
    } else {
        Err(OscError::Overflow("eval_poly"))
    }
}

/// Ψ_0(x), …, Ψ_{n_max}(x) in one sweep of the recurrence.
pub fn eval_poly_all(coeffs: &CoefficientSequence, n_max: usize, x: f64) -> Result<Vec<f64>> {
    let mut values = Vec::with_capacity(n_max + 1);
    values.push(1.0);
    let mut prev = 0.0;
    for k in 0..n_max {
        let cur = values[k];
        let next = ((x - coeffs.a(k)) * cur - coeffs.b_prev(k) * prev) / coeffs.b(k);
        if !next.is_finite() {
            return Err(OscError::Overflow("eval_poly"));
        }
        prev = cur;
        values.push(next);
    }
    Ok(values)
}

/// (scale·b²_{n-1})! = ∏_{k=0}^{n-1} scale·b_k²; the empty product is 1.
pub fn gen_factorial(coeffs: &CoefficientSequence, n: usize, scale: f64) -> f64 {
    (0..n).fold(1.0, |acc, k| acc * scale * coeffs.b_squared(k))
}

/// Orthogonality measure of a family, normalized to unit mass.
pub fn measure_of(coeffs: &CoefficientSequence) -> Result<MeasureSpec> {
    let support = coeffs.support();
    let spec = match &coeffs.family {
        Family::Hermite => {
            let norm = 1.0 / PI.sqrt();
            MeasureSpec::builtin(support, WeightKind::Gaussian, Arc::new(move |x| norm * (-x * x).exp()))
        }
        Family::Laguerre { alpha } => {
            let alpha = *alpha;
            let norm = 1.0 / gamma_fn(alpha + 1.0)?;
            MeasureSpec::builtin(
                support,
                WeightKind::Laguerre { alpha },
                Arc::new(move |x| norm * x.powf(alpha) * (-x).exp()),
            )
        }
        Family::Legendre => MeasureSpec::builtin(support, WeightKind::Uniform, Arc::new(|_| 0.5)),
        Family::ChebyshevFirst => MeasureSpec::builtin(
            support,
            WeightKind::ChebyshevFirst,
            Arc::new(|x| 1.0 / (PI * (1.0 - x * x).sqrt())),
        ),
        Family::Custom { measure, .. } => measure.clone().ok_or(OscError::MissingMeasure)?,
    };
    Ok(spec)
}
