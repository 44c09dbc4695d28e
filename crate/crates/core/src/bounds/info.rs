use nalgebra::DMatrix;

use super::linalg::lambda_max;
use super::packing::{PackingKind, PackingSet};
use crate::domain::THEOREM_EPSILON_MAX;
use crate::error::{invalid, Error, Result};

fn check_unit(name: &str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::OutOfRange(format!("{name} = {v} outside [0,1]")))
    }
}

fn check_theorem_range(epsilon: f64) -> Result<()> {
    if (0.0..=THEOREM_EPSILON_MAX).contains(&epsilon) {
        Ok(())
    } else {
        Err(Error::OutOfRange(format!(
            "epsilon {epsilon} outside [0, {}] where the information bound holds",
            THEOREM_EPSILON_MAX
        )))
    }
}

/// Le Cam two-point bound Φ(δ)·(1/2 − ‖M₁ⁿ − M₂ⁿ‖_TV/2), floored at 0.
pub fn lecam_bound(delta_sq: f64, tv: f64) -> Result<f64> {
    check_unit("tv", tv)?;
    Ok((delta_sq * (0.5 - 0.5 * tv)).max(0.0))
}

/// Fano bound Φ(δ)·(1 − (I + log 2)/log|V|), floored at 0.
pub fn fano_bound(delta_metric_value: f64, info: f64, log_card: f64) -> Result<f64> {
    if log_card.is_nan() || log_card <= std::f64::consts::LN_2 {
        return Err(invalid(format!("log cardinality {log_card} must exceed log 2")));
    }
    Ok((delta_metric_value * (1.0 - (info + std::f64::consts::LN_2) / log_card)).max(0.0))
}

/// Symmetrized KL bound 4(e^ε − 1)²·Σ_i ‖P_{ν,i} − P_{ν′,i}‖²_TV.
pub fn kl_pair_bound(epsilon: f64, tv_list: &[f64]) -> Result<f64> {
    for &tv in tv_list {
        check_unit("tv", tv)?;
    }
    let factor = 4.0 * epsilon.exp_m1().powi(2);
    Ok(factor * tv_list.iter().map(|t| t * t).sum::<f64>())
}

/// C_ε = 4/(e^{−ε} − 2(e^ε − 1)), the constant of the variational mutual
/// information bound.
pub fn c_epsilon(epsilon: f64) -> Result<f64> {
    check_theorem_range(epsilon)?;
    Ok(4.0 / ((-epsilon).exp() - 2.0 * epsilon.exp_m1()))
}

/// C_ε·n·(δ²/s²)·λ_max(cov V)·d·(e^ε − e^{−ε})²/4 for a binary packing.
pub fn info_bound_multinomial(n: usize, epsilon: f64, delta: f64, s: usize, packing: &PackingSet) -> Result<f64> {
    let PackingKind::BinaryWeighted { d, s: ps } = packing.kind else {
        return Err(invalid("multinomial information bound needs a binary packing"));
    };
    if ps != s {
        return Err(invalid(format!("packing has weight {ps}, bound asked for s={s}")));
    }
    let c = c_epsilon(epsilon)?;
    let gap = 2.0 * epsilon.sinh();
    Ok(c * n as f64 * (delta * delta / (s * s) as f64) * packing.certified.cov_lambda_max * d as f64 * gap * gap / 4.0)
}

/// M = average over ν of [1, −1]^T[1, −1] ⊗ νν^T, a 2k×2k matrix.
pub fn density_information_matrix(packing: &PackingSet) -> DMatrix<f64> {
    let k = packing.dim();
    let count = packing.vectors.len() as f64;
    let mut m = DMatrix::zeros(2 * k, 2 * k);
    for v in &packing.vectors {
        for bi in 0..2 {
            for bj in 0..2 {
                let sign = if bi == bj { 1.0 } else { -1.0 };
                for i in 0..k {
                    for j in 0..k {
                        m[(bi * k + i, bj * k + j)] += sign * (v[i] * v[j]) as f64;
                    }
                }
            }
        }
    }
    m / count
}

/// C_ε·n·(c_half²/k^{2β+2})·κ²·2k·λ_max(M), κ = (e^ε − e^{−ε})/2.
pub fn info_bound_density(
    n: usize,
    epsilon: f64,
    k: usize,
    beta: u32,
    sign_packing: &PackingSet,
    c_half: f64,
) -> Result<f64> {
    let PackingKind::Sign { k: pk } = sign_packing.kind else {
        return Err(invalid("density information bound needs a sign packing"));
    };
    if pk != k {
        return Err(invalid(format!("packing has dimension {pk}, bound asked for k={k}")));
    }
    let c = c_epsilon(epsilon)?;
    let kappa = epsilon.sinh();
    let lam = lambda_max(&density_information_matrix(sign_packing));
    let kf = k as f64;
    Ok(c * n as f64 * c_half * c_half / kf.powi(2 * beta as i32 + 2) * kappa * kappa * 2.0 * kf * lam)
}
