use super::config::{ChannelConfig, Mechanism, PrivatizedRecord};
use crate::domain::{trig_basis_prefix, RngStream};
use crate::error::{invalid, Error, Result};

/// One Laplace(α) draw (density (α/2)e^{−α|w|}) by inverse CDF.
pub fn sample_laplace(alpha: f64, rng: &mut RngStream) -> f64 {
    let u = rng.open01() - 0.5;
    let tail = (1.0 - 2.0 * u.abs()).ln();
    -u.signum() * tail / alpha
}

/// Noise rate of the naive series channel: ε/(2B₀k), the reciprocal of the
/// ℓ₁ sensitivity 2B₀k of the truncated basis vector times ε.
pub fn naive_series_rate(epsilon: f64, basis_bound: f64, k: usize) -> f64 {
    epsilon / (2.0 * basis_bound * k as f64)
}

/// Bin index j ∈ {1..k} with x ∈ [(j−1)/k, j/k); x = 1 maps to k.
pub fn histogram_bin(x: f64, k: usize) -> Result<usize> {
    if k == 0 {
        return Err(invalid("histogram needs k >= 1"));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::OutOfRange(format!("sample {x} outside [0,1]")));
    }
    Ok(((x * k as f64).floor() as usize + 1).min(k))
}

fn record(cfg: &ChannelConfig, payload: Vec<f64>) -> PrivatizedRecord {
    PrivatizedRecord {
        mechanism: cfg.mechanism,
        epsilon: cfg.eps(),
        payload,
        amplitude: None,
    }
}

/// x + W with W_j i.i.d. Laplace(ε/2), for a simplex point or a one-hot bin
/// indicator (ℓ₁ sensitivity 2).
pub fn laplace_perturb(x: &[f64], cfg: &ChannelConfig, rng: &mut RngStream) -> Result<PrivatizedRecord> {
    if !matches!(cfg.mechanism, Mechanism::LaplaceMultinomial | Mechanism::LaplaceHistogram) {
        return Err(invalid(format!("laplace_perturb cannot serve {}", cfg.mechanism)));
    }
    cfg.validate()?;
    if x.len() != cfg.dims {
        return Err(invalid(format!("input has {} coordinates, config says {}", x.len(), cfg.dims)));
    }
    let l1: f64 = x.iter().sum();
    if x.iter().any(|v| v.is_nan() || *v < 0.0) || l1 > 1.0 + 1e-12 {
        return Err(Error::OutOfRange("input must be non-negative with l1 norm <= 1".into()));
    }
    let alpha = cfg.eps() / 2.0;
    let payload = x.iter().map(|v| v + sample_laplace(alpha, rng)).collect();
    Ok(record(cfg, payload))
}

/// Bins x into k = cfg.dims cells and perturbs the one-hot indicator.
pub fn laplace_histogram_channel(x: f64, cfg: &ChannelConfig, rng: &mut RngStream) -> Result<PrivatizedRecord> {
    cfg.expect(Mechanism::LaplaceHistogram)?;
    let j = histogram_bin(x, cfg.dims)?;
    let mut onehot = vec![0.0; cfg.dims];
    onehot[j - 1] = 1.0;
    laplace_perturb(&onehot, cfg, rng)
}

/// [φ_j(x)]_{j=1..k} + W, W_j i.i.d. Laplace(ε/(2B₀k)).
pub fn naive_laplace_series_channel(x: f64, cfg: &ChannelConfig, rng: &mut RngStream) -> Result<PrivatizedRecord> {
    cfg.expect(Mechanism::NaiveLaplaceSeries)?;
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::OutOfRange(format!("sample {x} outside [0,1]")));
    }
    let alpha = naive_series_rate(cfg.eps(), cfg.b0(), cfg.dims);
    let mut payload = vec![0.0; cfg.dims];
    trig_basis_prefix(x, &mut payload);
    payload.iter_mut().for_each(|p| *p += sample_laplace(alpha, rng));
    Ok(record(cfg, payload))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::TRIG_BASIS_BOUND;

    fn moments(xs: impl Iterator<Item = f64>) -> (f64, f64, usize) {
        let v: Vec<f64> = xs.collect();
        let n = v.len();
        let m = v.iter().sum::<f64>() / n as f64;
        let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1) as f64;
        (m, var, n)
    }

    #[test]
    fn histogram_bin_examples() {
        assert_eq!(histogram_bin(0.0, 4).unwrap(), 1);
        assert_eq!(histogram_bin(1.0, 4).unwrap(), 4);
        assert_eq!(histogram_bin(0.25, 4).unwrap(), 2);
        assert_eq!(histogram_bin(0.2499999, 4).unwrap(), 1);
        assert!(histogram_bin(-0.1, 4).is_err());
        assert!(histogram_bin(1.1, 4).is_err());
        assert!(histogram_bin(f64::NAN, 4).is_err());
    }

    #[test]
    fn laplace_variance_is_eight_over_eps_squared() {
        let mut rng = RngStream::new(11, 0);
        let eps = 0.8;
        let (m, var, n) = moments((0..1_000_000).map(|_| sample_laplace(eps / 2.0, &mut rng)));
        let v = 8.0 / (eps * eps);
        // Laplace kurtosis 6 ⇒ var(s²) ≈ 5v²
        assert!(m.abs() < 3.0 * (v / n as f64).sqrt());
        assert!((var - v).abs() < 3.0 * (5.0 * v * v / n as f64).sqrt(), "{var} vs {v}");
    }

    #[test]
    fn perturb_is_unbiased() {
        let cfg = ChannelConfig::new(Mechanism::LaplaceMultinomial, 1.0, 3).unwrap();
        let x = [0.5, 0.3, 0.2];
        let mut rng = RngStream::new(12, 0);
        let n = 200_000;
        let mut sum = [0.0; 3];
        for _ in 0..n {
            let r = laplace_perturb(&x, &cfg, &mut rng).unwrap();
            sum.iter_mut().zip(&r.payload).for_each(|(s, z)| *s += z);
        }
        let sd = (8.0 / n as f64).sqrt();
        for j in 0..3 {
            assert!((sum[j] / n as f64 - x[j]).abs() < 4.0 * sd);
        }
    }

    #[test]
    fn perturb_validates_input() {
        let cfg = ChannelConfig::new(Mechanism::LaplaceMultinomial, 1.0, 2).unwrap();
        let mut rng = RngStream::new(13, 0);
        assert!(laplace_perturb(&[0.5, 0.6], &cfg, &mut rng).is_err());
        assert!(laplace_perturb(&[-0.1, 0.5], &cfg, &mut rng).is_err());
        assert!(laplace_perturb(&[0.5], &cfg, &mut rng).is_err());
        let rr = ChannelConfig::new(Mechanism::RandomizedResponse, 1.0, 2).unwrap();
        assert!(laplace_perturb(&[0.5, 0.5], &rr, &mut rng).is_err());
    }

    #[test]
    fn histogram_channel_centers_on_the_bin() {
        let cfg = ChannelConfig::new(Mechanism::LaplaceHistogram, 2.0, 4).unwrap();
        let mut rng = RngStream::new(14, 0);
        let n = 100_000;
        let mut sum = [0.0; 4];
        for _ in 0..n {
            let r = laplace_histogram_channel(0.6, &cfg, &mut rng).unwrap();
            sum.iter_mut().zip(&r.payload).for_each(|(s, z)| *s += z);
        }
        let sd = (2.0 / n as f64).sqrt();
        for (j, s) in sum.iter().enumerate() {
            let expect = if j == 2 { 1.0 } else { 0.0 };
            assert!((s / n as f64 - expect).abs() < 4.0 * sd);
        }
    }

    #[test]
    fn naive_series_moments() {
        let k = 3;
        let eps = 1.0;
        let cfg = ChannelConfig::new(Mechanism::NaiveLaplaceSeries, eps, k).unwrap();
        let mut rng = RngStream::new(15, 0);
        let recs: Vec<_> = (0..400_000)
            .map(|_| naive_laplace_series_channel(0.3, &cfg, &mut rng).unwrap())
            .collect();
        let v = 8.0 * TRIG_BASIS_BOUND.powi(2) * (k * k) as f64 / (eps * eps);
        for j in 0..k {
            let (m, var, n) = moments(recs.iter().map(|r| r.payload[j]));
            let truth = crate::domain::trig_basis_eval(j, 0.3);
            assert!((m - truth).abs() < 4.0 * (v / n as f64).sqrt(), "mean {j}");
            assert!((var - v).abs() < 4.0 * (5.0 * v * v / n as f64).sqrt(), "var {j}");
        }
    }

    #[test]
    fn naive_series_sensitivity_within_budget() {
        // α·max‖φ(x) − φ(x′)‖₁ ≤ ε over a grid, k ≤ 16
        let eps = 1.0;
        let grid: Vec<f64> = (0..=400).map(|i| i as f64 / 400.0).collect();
        for k in 1..=16 {
            let vecs: Vec<Vec<f64>> = grid
                .iter()
                .map(|&x| {
                    let mut v = vec![0.0; k];
                    trig_basis_prefix(x, &mut v);
                    v
                })
                .collect();
            let alpha = naive_series_rate(eps, TRIG_BASIS_BOUND, k);
            let worst = vecs
                .iter()
                .flat_map(|a| vecs.iter().map(move |b| a.iter().zip(b).map(|(p, q)| (p - q).abs()).sum::<f64>()))
                .fold(0.0, f64::max);
            assert!(worst <= 2.0 * TRIG_BASIS_BOUND * k as f64 + 1e-12);
            assert!(alpha * worst <= eps + 1e-12, "k={k}");
        }
    }
}
