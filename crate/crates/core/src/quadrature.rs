//! Gauss rules for the classical weights and a globally adaptive
//! Gauss–Kronrod integrator for finite intervals.
//!
//! The classical rules are generated by Newton iteration on the textbook
//! (non-normalized) recurrences, not from the crate's own coefficient
//! sequences, so that orthonormality checks built on them are independent of
//! the recurrence data under test.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{OscError, Result};
use crate::recurrence::{MeasureSpec, WeightKind};
use crate::specfun::{gamma_fn, ln_gamma};

const NEWTON_MAX_ITER: usize = 100;

/// Nodes and weights of a quadrature rule.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Weighted sum of `f` over the nodes. Terms are accumulated in
    /// outside-in pairs so that odd integrands cancel exactly on symmetric rules.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        let n = self.len();
        let mut eval = |i: usize| {
            let w = self.weights[i];
            if w == 0.0 {
                0.0
            } else {
                w * f(self.nodes[i])
            }
        };
        let mut sum = 0.0;
        for i in 0..n / 2 {
            sum += eval(i) + eval(n - 1 - i);
        }
        if n % 2 == 1 {
            sum += eval(n / 2);
        }
        sum
    }

    fn scale_weights(mut self, factor: f64) -> Self {
        self.weights.iter_mut().for_each(|w| *w *= factor);
        self
    }
}

fn newton_failed(what: &'static str) -> OscError {
    OscError::NonConvergence {
        what,
        iterations: NEWTON_MAX_ITER,
    }
}

/// Gauss–Legendre rule on [-1, 1] (weights sum to 2).
pub fn gauss_legendre(n: usize) -> Result<QuadratureRule> {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut converged = false;
        let mut deriv = 0.0;
        for _ in 0..NEWTON_MAX_ITER {
            let (mut p1, mut p2) = (1.0, 0.0);
            for j in 1..=n {
                let jf = j as f64;
                let p3 = p2;
                p2 = p1;
                p1 = ((2.0 * jf - 1.0) * z * p2 - (jf - 1.0) * p3) / jf;
            }
            deriv = nf * (z * p1 - p2) / (z * z - 1.0);
            let step = p1 / deriv;
            z -= step;
            if step.abs() <= 1e-15 {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(newton_failed("gauss_legendre nodes"));
        }
        let w = 2.0 / ((1.0 - z * z) * deriv * deriv);
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    Ok(QuadratureRule { nodes, weights })
}

/// Gauss–Hermite rule for the weight e^{-x²} on ℝ (weights sum to √π).
///
/// Newton from asymptotic starting values is unreliable past n ≈ 150, so the
/// roots are seeded with the eigenvalues of the tridiagonal matrix of the
/// textbook recurrence and then polished by Newton on that recurrence.
pub fn gauss_hermite(n: usize) -> Result<QuadratureRule> {
    let nf = n as f64;
    let pim4 = PI.powf(-0.25);
    let mut jacobi = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let off = (0.5 * k as f64).sqrt();
        jacobi[(k, k - 1)] = off;
        jacobi[(k - 1, k)] = off;
    }
    let mut seeds: Vec<f64> = SymmetricEigen::new(jacobi).eigenvalues.iter().copied().collect();
    seeds.sort_by(f64::total_cmp);

    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for mut z in seeds {
        let mut converged = false;
        let mut deriv = 0.0;
        for _ in 0..NEWTON_MAX_ITER {
            let (mut p1, mut p2) = (pim4, 0.0);
            for j in 1..=n {
                let jf = j as f64;
                let p3 = p2;
                p2 = p1;
                p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
            }
            deriv = (2.0 * nf).sqrt() * p2;
            let step = p1 / deriv;
            z -= step;
            if step.abs() <= 1e-14 * z.abs().max(1.0) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(newton_failed("gauss_hermite nodes"));
        }
        nodes.push(z);
        weights.push(2.0 / (deriv * deriv));
    }
    if nodes.windows(2).any(|p| p[1] <= p[0]) {
        return Err(newton_failed("gauss_hermite nodes"));
    }
    // enforce exact reflection symmetry so odd moments cancel
    for i in 0..n / 2 {
        let j = n - 1 - i;
        let x = 0.5 * (nodes[j] - nodes[i]);
        let w = 0.5 * (weights[i] + weights[j]);
        nodes[i] = -x;
        nodes[j] = x;
        weights[i] = w;
        weights[j] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Ok(QuadratureRule { nodes, weights })
}

/// Generalized Gauss–Laguerre rule for x^α e^{-x} on [0, ∞) (weights sum to Γ(α+1)).
pub fn gauss_laguerre(n: usize, alpha: f64) -> Result<QuadratureRule> {
    if alpha <= -1.0 {
        return Err(OscError::InvalidParameter(format!(
            "gauss_laguerre requires alpha > -1, got {alpha}"
        )));
    }
    let mut nodes: Vec<f64> = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    let nf = n as f64;
    let log_norm = ln_gamma(alpha + nf)? - ln_gamma(nf)?;
    let mut z: f64 = 0.0;
    for i in 0..n {
        z = match i {
            0 => (1.0 + alpha) * (3.0 + 0.92 * alpha) / (1.0 + 2.4 * nf + 1.8 * alpha),
            1 => z + (15.0 + 6.25 * alpha) / (1.0 + 0.9 * alpha + 2.5 * nf),
            _ => {
                let ai = (i - 1) as f64;
                z + ((1.0 + 2.55 * ai) / (1.9 * ai) + 1.26 * ai * alpha / (1.0 + 3.5 * ai))
                    * (z - nodes[i - 2])
                    / (1.0 + 0.3 * alpha)
            }
        };
        let mut converged = false;
        let (mut deriv, mut prev) = (0.0, 0.0);
        for _ in 0..NEWTON_MAX_ITER {
            let (mut p1, mut p2) = (1.0, 0.0);
            for j in 1..=n {
                let jf = j as f64;
                let p3 = p2;
                p2 = p1;
                p1 = ((2.0 * jf - 1.0 + alpha - z) * p2 - (jf - 1.0 + alpha) * p3) / jf;
            }
            deriv = (nf * p1 - (nf + alpha) * p2) / z;
            prev = p2;
            let step = p1 / deriv;
            z -= step;
            if step.abs() <= 1e-14 * z.abs().max(1.0) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(newton_failed("gauss_laguerre nodes"));
        }
        nodes.push(z);
        // weight = -Γ(α+n)/Γ(n) / (n L'_n(z) L_{n-1}(z)), assembled in log space
        let denom = deriv * nf * prev;
        let w = -denom.signum() * (log_norm - denom.abs().ln()).exp();
        weights.push(w);
    }
    if nodes.windows(2).any(|p| p[1] <= p[0]) {
        return Err(newton_failed("gauss_laguerre nodes"));
    }
    Ok(QuadratureRule { nodes, weights })
}

/// Gauss–Chebyshev rule for the probability weight 1/(π√(1-x²)).
pub fn gauss_chebyshev_first(n: usize) -> QuadratureRule {
    let nf = n as f64;
    let nodes = (1..=n)
        .map(|k| -(PI * (2.0 * k as f64 - 1.0) / (2.0 * nf)).cos())
        .collect();
    QuadratureRule {
        nodes,
        weights: vec![1.0 / nf; n],
    }
}

/// Gauss rule with `n` nodes whose weights integrate against the normalized measure.
pub fn gauss_rule(measure: &MeasureSpec, n: usize) -> Result<QuadratureRule> {
    match measure.weight_kind() {
        WeightKind::Gaussian => Ok(gauss_hermite(n)?.scale_weights(1.0 / PI.sqrt())),
        WeightKind::Laguerre { alpha } => {
            Ok(gauss_laguerre(n, alpha)?.scale_weights(1.0 / gamma_fn(alpha + 1.0)?))
        }
        WeightKind::Uniform => Ok(gauss_legendre(n)?.scale_weights(0.5)),
        WeightKind::ChebyshevFirst => Ok(gauss_chebyshev_first(n)),
        WeightKind::Custom => {
            let support = measure.support();
            if !(support.lo.is_finite() && support.hi.is_finite()) {
                return Err(OscError::InvalidParameter(
                    "custom measures need a finite support for quadrature".into(),
                ));
            }
            let base = gauss_legendre(n)?;
            let half = 0.5 * (support.hi - support.lo);
            let mid = 0.5 * (support.hi + support.lo);
            let nodes: Vec<f64> = base.nodes.iter().map(|t| mid + half * t).collect();
            let weights = nodes
                .iter()
                .zip(&base.weights)
                .map(|(&x, &w)| w * half * measure.density(x))
                .collect();
            Ok(QuadratureRule { nodes, weights })
        }
    }
}

// 7-point Gauss / 15-point Kronrod abscissae and weights (half rule, centre last).
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod_panel<F: FnMut(f64) -> f64>(f: &mut F, lo: f64, hi: f64) -> Panel {
    let centre = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(centre);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(centre - dx) + f(centre + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Panel {
        lo,
        hi,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub panels: usize,
}

/// Globally adaptive G7/K15 integration of `f` over [lo, hi].
///
/// The panel with the largest error estimate is bisected until the summed
/// estimate drops below max(abs_tol, rel_tol·|value|). `breakpoints` seed the
/// initial partition.
pub fn integrate_adaptive<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    breakpoints: &[f64],
    abs_tol: f64,
    rel_tol: f64,
    max_panels: usize,
) -> Result<Integral> {
    let mut cuts: Vec<f64> = std::iter::once(lo)
        .chain(breakpoints.iter().copied().filter(|&b| b > lo && b < hi))
        .chain(std::iter::once(hi))
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut heap: BinaryHeap<Panel> = cuts
        .windows(2)
        .map(|w| kronrod_panel(&mut f, w[0], w[1]))
        .collect();
    loop {
        let value: f64 = heap.iter().map(|p| p.value).sum();
        let error: f64 = heap.iter().map(|p| p.error).sum();
        if !value.is_finite() {
            return Err(OscError::Overflow("adaptive quadrature"));
        }
        if error <= abs_tol.max(rel_tol * value.abs()) {
            return Ok(Integral {
                value,
                error,
                panels: heap.len(),
            });
        }
        if heap.len() >= max_panels {
            return Err(OscError::NonConvergence {
                what: "adaptive quadrature",
                iterations: max_panels,
            });
        }
        let worst = heap.pop().expect("at least one panel");
        let mid = 0.5 * (worst.lo + worst.hi);
        heap.push(kronrod_panel(&mut f, worst.lo, mid));
        heap.push(kronrod_panel(&mut f, mid, worst.hi));
    }
}
