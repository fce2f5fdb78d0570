//! Finite Fock-basis truncations of the generalized oscillator operators.
//!
//! In the basis {Ψ_n} the ladder operators act as shifts,
//! a|n⟩ = √2 b_{n-1}|n-1⟩ and a†|n⟩ = √2 b_n|n+1⟩, so X = (a + a†)/√2 is the
//! Jacobi matrix and P = (a† - a)/(i√2). Truncation breaks the shift relations
//! in the last row and column only; identities are therefore checked on the
//! interior block.

use std::f64::consts::SQRT_2;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde_json::json;

use crate::error::{OscError, Result};
use crate::recurrence::CoefficientSequence;
use crate::report::VerificationReport;

pub type CMatrix = DMatrix<Complex64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorLabel {
    X,
    P,
    H,
    N,
    BOfN,
    A,
    ADagger,
}

/// A dim×dim complex matrix representing one operator in the truncated Fock basis.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorTruncation {
    pub dim: usize,
    pub entries: CMatrix,
    pub label: OperatorLabel,
}

impl OperatorTruncation {
    fn new(label: OperatorLabel, entries: CMatrix) -> Self {
        Self {
            dim: entries.nrows(),
            entries,
            label,
        }
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[(row, col)]
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let dv = nalgebra::DVector::from_column_slice(v);
        (&self.entries * dv).iter().copied().collect()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        max_abs(&(&self.entries - self.entries.adjoint())).0 <= tol
    }
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn require_dim(dim: usize, min: usize) -> Result<()> {
    if dim < min {
        return Err(OscError::DimensionTooSmall {
            dim,
            reason: format!("need at least {min}"),
        });
    }
    Ok(())
}

/// Largest entry modulus and its position.
fn max_abs(m: &CMatrix) -> (f64, (usize, usize)) {
    let mut best = (0.0, (0, 0));
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let v = m[(i, j)].norm();
            if v > best.0 || v.is_nan() {
                best = (v, (i, j));
            }
        }
    }
    best
}

fn lowering_with(dim: usize, weight: impl Fn(usize) -> f64) -> CMatrix {
    let mut m = CMatrix::zeros(dim, dim);
    for n in 1..dim {
        m[(n - 1, n)] = real(SQRT_2 * weight(n - 1));
    }
    m
}

/// Position operator X: the truncated Jacobi matrix.
pub fn position_op(coeffs: &CoefficientSequence, dim: usize) -> OperatorTruncation {
    let mut m = CMatrix::zeros(dim, dim);
    for n in 0..dim {
        m[(n, n)] = real(coeffs.a(n));
        if n + 1 < dim {
            m[(n, n + 1)] = real(coeffs.b(n));
            m[(n + 1, n)] = real(coeffs.b(n));
        }
    }
    OperatorTruncation::new(OperatorLabel::X, m)
}

/// Number operator N|n⟩ = n|n⟩.
pub fn number_op(dim: usize) -> OperatorTruncation {
    let m = CMatrix::from_diagonal(&nalgebra::DVector::from_fn(dim, |n, _| real(n as f64)));
    OperatorTruncation::new(OperatorLabel::N, m)
}

/// B(N + shift): diagonal with entries b²_{n+shift-1}, b_{-1} = 0.
pub fn b_of_n(coeffs: &CoefficientSequence, dim: usize, shift: usize) -> OperatorTruncation {
    let m = CMatrix::from_diagonal(&nalgebra::DVector::from_fn(dim, |n, _| {
        real(coeffs.b_prev_squared(n + shift))
    }));
    OperatorTruncation::new(OperatorLabel::BOfN, m)
}

/// Annihilation and creation operators a, a†.
///
/// For symmetric families a is the pure lowering shift. When the recurrence
/// has a diagonal, a = (X - iP)/√2 carries a_n/√2 on its diagonal.
pub fn ladder_ops(coeffs: &CoefficientSequence, dim: usize) -> Result<(OperatorTruncation, OperatorTruncation)> {
    require_dim(dim, 2)?;
    let mut a = lowering_with(dim, |k| coeffs.b(k));
    if !coeffs.is_symmetric() {
        for n in 0..dim {
            a[(n, n)] = real(coeffs.a(n) / SQRT_2);
        }
    }
    let a_dag = a.adjoint();
    Ok((
        OperatorTruncation::new(OperatorLabel::A, a),
        OperatorTruncation::new(OperatorLabel::ADagger, a_dag),
    ))
}

/// Lowering shift with entries √2|b_{n-1}|: the annihilation operator in the
/// phase-fixed basis s_n Ψ_n, whose eigenvectors are the coherent states.
/// Coincides with `ladder_ops(..).0` for symmetric families with b_n > 0.
pub fn lowering_shift(coeffs: &CoefficientSequence, dim: usize) -> Result<OperatorTruncation> {
    require_dim(dim, 2)?;
    Ok(OperatorTruncation::new(
        OperatorLabel::A,
        lowering_with(dim, |k| coeffs.b(k).abs()),
    ))
}

/// P = (a† - a)/(i√2) built from the shift part, and H = X² + P².
pub fn momentum_and_hamiltonian(
    coeffs: &CoefficientSequence,
    dim: usize,
) -> Result<(OperatorTruncation, OperatorTruncation)> {
    require_dim(dim, 2)?;
    let lower = lowering_with(dim, |k| coeffs.b(k));
    let raise = lower.adjoint();
    let scale = Complex64::new(0.0, SQRT_2).inv();
    let p = (raise - lower) * scale;
    let x = position_op(coeffs, dim).entries;
    let h = &x * &x + &p * &p;
    Ok((
        OperatorTruncation::new(OperatorLabel::P, p),
        OperatorTruncation::new(OperatorLabel::H, h),
    ))
}

/// The deformed commutation relation a a† - A a† a = 2 C(N).
pub struct DeformedRelation<'a> {
    pub a_coeff: f64,
    pub c_fn: &'a dyn Fn(usize) -> f64,
}

fn interior(m: &CMatrix, keep: usize) -> CMatrix {
    m.view((0, 0), (keep, keep)).into_owned()
}

fn commutator(x: &CMatrix, y: &CMatrix) -> CMatrix {
    x * y - y * x
}

/// Verifies the commutation relations of the generalized oscillator algebra
/// on the interior block (indices < dim - 1):
///
/// * [a, a†] = 2(B(N+1) - B(N))
/// * [N, a†] = a†, [N, a] = -a
/// * optionally a a† - A a† a = 2C(N), after checking b_n² - A b²_{n-1} = C(n).
pub fn check_theorem2(
    coeffs: &CoefficientSequence,
    dim: usize,
    tol: f64,
    relation: Option<&DeformedRelation<'_>>,
) -> Result<VerificationReport> {
    require_dim(dim, 4)?;
    if !coeffs.is_symmetric() {
        return Err(OscError::InvalidParameter(
            "commutator checks apply to symmetric families only".into(),
        ));
    }
    let (a, a_dag) = ladder_ops(coeffs, dim)?;
    let (a, a_dag) = (a.entries, a_dag.entries);
    let n_op = number_op(dim).entries;
    let keep = dim - 1;

    let mut checks = Vec::new();
    let mut record = |name: &str, residual: CMatrix| {
        let (err, (i, j)) = max_abs(&interior(&residual, keep));
        checks.push(json!({ "relation": name, "max_error": err, "worst_entry": [i, j] }));
        err
    };

    let b_diff = (b_of_n(coeffs, dim, 1).entries - b_of_n(coeffs, dim, 0).entries) * real(2.0);
    let mut worst = record("[a,a+] = 2(B(N+1)-B(N))", commutator(&a, &a_dag) - b_diff);
    worst = worst.max(record("[N,a+] = a+", commutator(&n_op, &a_dag) - &a_dag));
    worst = worst.max(record("[N,a] = -a", commutator(&n_op, &a) + &a));

    let mut report = VerificationReport::new("theorem2", coeffs.label().name()).with_param("dim", dim as f64);
    if let Some(rel) = relation {
        let c_diag = CMatrix::from_diagonal(&nalgebra::DVector::from_fn(dim, |n, _| real(2.0 * (rel.c_fn)(n))));
        let deformed = &a * &a_dag - (&a_dag * &a) * real(rel.a_coeff) - c_diag;
        worst = worst.max(record("a a+ - A a+ a = 2C(N)", deformed));
        let premise = (0..dim)
            .map(|n| (coeffs.b_squared(n) - rel.a_coeff * coeffs.b_prev_squared(n) - (rel.c_fn)(n)).abs())
            .fold(0.0, f64::max);
        worst = worst.max(premise);
        checks.push(json!({ "relation": "b_n^2 - A b_{n-1}^2 = C(n)", "max_error": premise }));
        report = report.with_param("A", rel.a_coeff);
    }
    Ok(report.judged(worst, tol).with_details(json!({ "interior_dim": keep, "checks": checks })))
}
