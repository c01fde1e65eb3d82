//! Closed-form determinant and inverse of the squared distance matrix.
//!
//! The determinant splits on the number of degree-2 vertices:
//!
//! * none: `(-1)^{(n-1)s} 2^{(2n-5)s} ∏τ_i^s ∏det(W_i²) det(β)`
//! * exactly one, `v`, between edges `e_i` and `e_j`:
//!   `(-1)^{(n-1)s} 2^{(2n-5)s} det(W_i+W_j)² ∏det(W_k²) ∏_{k≠v}τ_k^s`
//! * two or more: zero.
//!
//! Powers and signs are carried as [`LogDet`] so that large trees do not
//! overflow before the final product.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{kron, lu_log_det, DenseMatrix, LogDet, Lu, PIVOT_TOL};
use crate::matrices::{laplacian, tau_hat_kron, weighted_degree, weighted_degrees};
use crate::tree::WeightedTree;

/// Which determinant formula applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "branch")]
pub enum DetBranch {
    NoDeg2,
    /// 0-based degree-2 vertex and its two incident edges in edge order.
    OneDeg2 { vertex: usize, edges: (usize, usize) },
    TwoPlusDeg2 { count: usize },
}

impl DetBranch {
    pub fn of(t: &WeightedTree) -> Self {
        let profile = t.degree_profile();
        match profile.deg2_vertices.as_slice() {
            [] => DetBranch::NoDeg2,
            [v] => {
                let inc = t.neighbours(*v);
                let (a, b) = (inc[0].1, inc[1].1);
                DetBranch::OneDeg2 {
                    vertex: *v,
                    edges: (a.min(b), a.max(b)),
                }
            }
            many => DetBranch::TwoPlusDeg2 { count: many.len() },
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            DetBranch::NoDeg2 => "NoDeg2",
            DetBranch::OneDeg2 { .. } => "OneDeg2",
            DetBranch::TwoPlusDeg2 { .. } => "TwoPlusDeg2",
        }
    }
}

/// One named multiplicand of the determinant.
#[derive(Debug, Clone, PartialEq)]
pub struct Factor {
    pub name: &'static str,
    /// Symbolic rendering when the factor is a power, e.g. `2^6`.
    pub symbol: Option<String>,
    pub value: LogDet,
}

impl Factor {
    fn plain(name: &'static str, value: LogDet) -> Self {
        Self { name, symbol: None, value }
    }
}

#[derive(Debug, Clone)]
pub struct DetResult {
    pub branch: DetBranch,
    pub factors: Vec<Factor>,
    pub log_det: LogDet,
    pub value: f64,
    /// Set when `value` over- or underflowed binary64.
    pub saturated: bool,
}

impl DetResult {
    fn from_factors(branch: DetBranch, factors: Vec<Factor>) -> Self {
        let log_det = factors.iter().fold(LogDet::ONE, |acc, f| acc.mul(f.value));
        let (value, saturated) = log_det.value();
        Self {
            branch,
            factors,
            log_det,
            value,
            saturated,
        }
    }
}

fn sign_factor(n: usize, s: usize) -> Factor {
    let exp = (n - 1) * s;
    Factor {
        name: "sign",
        symbol: Some(format!("(-1)^{exp}")),
        value: LogDet {
            sign: if exp.is_multiple_of(2) { 1.0 } else { -1.0 },
            ln_abs: 0.0,
        },
    }
}

fn power_of_two_factor(n: usize, s: usize) -> Factor {
    let exp = (2 * n as i64 - 5) * s as i64;
    Factor {
        name: "power_of_two",
        symbol: Some(format!("2^{exp}")),
        value: LogDet {
            sign: 1.0,
            ln_abs: exp as f64 * std::f64::consts::LN_2,
        },
    }
}

fn weight_squares_factor(t: &WeightedTree) -> Result<Factor> {
    let mut acc = LogDet::ONE;
    for w in t.weights() {
        acc = acc.mul(lu_log_det(w)?.powi(2));
    }
    Ok(Factor::plain("weight_squares", acc))
}

fn tau_product(t: &WeightedTree, skip: Option<usize>) -> Factor {
    let s = t.s() as i64;
    let acc = t
        .degree_profile()
        .tau
        .iter()
        .enumerate()
        .filter(|&(v, _)| Some(v) != skip)
        .fold(LogDet::ONE, |acc, (_, &tau)| {
            acc.mul(LogDet::from_value(tau as f64).powi(s))
        });
    Factor::plain("tau_product", acc)
}

/// Closed-form determinant of the squared distance matrix.
pub fn det_formula(t: &WeightedTree) -> Result<DetResult> {
    let (n, s) = (t.n(), t.s());
    let branch = DetBranch::of(t);
    let factors = match branch {
        DetBranch::NoDeg2 => {
            let b = beta(t)?;
            vec![
                sign_factor(n, s),
                power_of_two_factor(n, s),
                tau_product(t, None),
                weight_squares_factor(t)?,
                Factor::plain("det_beta", lu_log_det(&b)?),
            ]
        }
        DetBranch::OneDeg2 { vertex, edges: (i, j) } => {
            let pair = t.weight(i) + t.weight(j);
            vec![
                sign_factor(n, s),
                power_of_two_factor(n, s),
                Factor::plain("path_pair", lu_log_det(&pair)?.powi(2)),
                weight_squares_factor(t)?,
                tau_product(t, Some(vertex)),
            ]
        }
        DetBranch::TwoPlusDeg2 { .. } => vec![Factor::plain("degree_two_pair", LogDet::ZERO)],
    };
    Ok(DetResult::from_factors(branch, factors))
}

fn require_no_deg2(t: &WeightedTree) -> Result<()> {
    match t.degree_profile().deg2_vertices.first() {
        Some(&v) => Err(Error::Degree2Present { vertex: v + 1 }),
        None => Ok(()),
    }
}

/// `β = Σ_i δ̂_i² / τ_i`, accumulated in vertex order.
pub fn beta(t: &WeightedTree) -> Result<DenseMatrix> {
    Ok(beta_with_scale(t)?.0)
}

/// `β` together with the summed magnitude of its terms, the reference scale
/// for deciding that `β` is singular.
fn beta_with_scale(t: &WeightedTree) -> Result<(DenseMatrix, f64)> {
    require_no_deg2(t)?;
    let tau = t.degree_profile().tau;
    let mut acc = DenseMatrix::zeros(t.s(), t.s());
    let mut scale = 0.0;
    for (v, &tv) in tau.iter().enumerate() {
        let dv = weighted_degree(t, v);
        let term = (&dv * &dv).scale(1.0 / tv as f64);
        scale += term.max_abs();
        acc = &acc + &term;
    }
    Ok((acc, scale))
}

/// `η = 2(τ ⊗ I_s) − L(τ̂ ⊗ I_s)δ̂`, an `ns x s` matrix.
pub fn eta(t: &WeightedTree) -> Result<DenseMatrix> {
    let tau_hat = tau_hat_kron(t)?;
    let tau: Vec<f64> = t.degree_profile().tau.iter().map(|&x| x as f64).collect();
    let tau_kron = kron(&DenseMatrix::column(&tau), &DenseMatrix::identity(t.s()));
    let l = laplacian(t);
    let correction = &(&l * &tau_hat) * &weighted_degrees(t);
    Ok(&tau_kron.scale(2.0) - &correction)
}

/// Closed-form inverse with its ingredients.
#[derive(Debug, Clone)]
pub struct InverseResult {
    pub beta: DenseMatrix,
    pub eta: DenseMatrix,
    /// `L(τ̂ ⊗ I_s)L`.
    pub l_tau_hat_l: DenseMatrix,
    /// `η β⁻¹ ηᵀ`.
    pub eta_beta_inv_eta: DenseMatrix,
    /// `-¼ L(τ̂ ⊗ I_s)L + ¼ η β⁻¹ ηᵀ`.
    pub delta_inv: DenseMatrix,
}

pub fn inverse_formula(t: &WeightedTree) -> Result<InverseResult> {
    let tau_hat = tau_hat_kron(t)?;
    let (beta, scale) = beta_with_scale(t)?;
    let lu = Lu::factor(&beta)?;
    let smallest = lu.pivots().iter().fold(f64::INFINITY, |m, p| m.min(p.abs()));
    // written so that a NaN pivot also counts as singular
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(smallest > PIVOT_TOL * scale) {
        return Err(Error::BetaSingular { det: lu.det() });
    }
    let beta_inv = lu.solve(&DenseMatrix::identity(t.s()))?;
    let eta = eta(t)?;
    let l = laplacian(t);
    let l_tau_hat_l = &(&l * &tau_hat) * &l;
    let eta_beta_inv_eta = &(&eta * &beta_inv) * &eta.transpose();
    let delta_inv = &l_tau_hat_l.scale(-0.25) + &eta_beta_inv_eta.scale(0.25);
    Ok(InverseResult {
        beta,
        eta,
        l_tau_hat_l,
        eta_beta_inv_eta,
        delta_inv,
    })
}
