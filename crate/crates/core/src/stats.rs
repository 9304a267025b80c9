//! Small statistical helpers for click-record analysis and validation:
//! Kolmogorov-Smirnov goodness of fit, bootstrap standard errors, sample
//! moments. Everything here works in f64; callers convert their scalars.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation (n - 1 normalization).
pub fn std_dev(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return f64::NAN;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

pub fn std_err(xs: &[f64]) -> f64 {
    std_dev(xs) / (xs.len() as f64).sqrt()
}

/// One-sample Kolmogorov-Smirnov statistic against a CDF.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite samples"));
    let n = sorted.len() as f64;
    let mut d = 0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        let lo = i as f64 / n;
        let hi = (i + 1) as f64 / n;
        d = d.max((f - lo).abs()).max((hi - f).abs());
    }
    d
}

/// Asymptotic Kolmogorov survival function Q(lambda) = 2 sum_k (-1)^{k-1}
/// exp(-2 k^2 lambda^2).
pub fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    let mut sum = 0f64;
    let mut sign = 1f64;
    for k in 1..=100 {
        let term = (-2.0 * (k as f64) * (k as f64) * lambda * lambda).exp();
        sum += sign * term;
        sign = -sign;
        if term < 1e-12 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// KS test of `samples` against the exponential law with the given rate;
/// returns (D, approximate p-value) using the Stephens small-sample
/// correction.
pub fn ks_test_exponential(samples: &[f64], rate: f64) -> (f64, f64) {
    assert!(!samples.is_empty() && rate > 0.0);
    let d = ks_statistic(samples, |x| {
        if x <= 0.0 {
            0.0
        } else {
            1.0 - (-rate * x).exp()
        }
    });
    let n = samples.len() as f64;
    let lambda = (n.sqrt() + 0.12 + 0.11 / n.sqrt()) * d;
    (d, kolmogorov_q(lambda))
}

/// Bootstrap standard error of a statistic computed from `n_groups`
/// resampled-with-replacement group indices.
pub fn bootstrap_std_err(
    n_groups: usize,
    iterations: usize,
    seed: u64,
    statistic: impl Fn(&[usize]) -> f64,
) -> f64 {
    assert!(n_groups > 0 && iterations > 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = Vec::with_capacity(iterations);
    let mut indices = vec![0usize; n_groups];
    for _ in 0..iterations {
        for slot in indices.iter_mut() {
            *slot = rng.gen_range(0..n_groups);
        }
        let v = statistic(&indices);
        if v.is_finite() {
            values.push(v);
        }
    }
    std_dev(&values)
}

/// Synthetic homogeneous Poisson process on [0, t_final), for calibration
/// tests.
pub fn poisson_process(rate: f64, t_final: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = 0f64;
    let mut out = Vec::new();
    loop {
        let u: f64 = rng.gen();
        t += -(1.0 - u).ln() / rate;
        if t >= t_final {
            return out;
        }
        out.push(t);
    }
}
