//! Exact Poisson variates.
//!
//! Means below [`INVERSION_LIMIT`] use sequential inversion of the CDF.
//! Larger means use Hörmann's transformed rejection with squeeze (PTRS,
//! 1993), which is exact: every accepted `k` passes either the squeeze or
//! the full log-density test.

use rand::Rng;

pub const INVERSION_LIMIT: f64 = 30.0;

pub fn sample_poisson_count<R: Rng + ?Sized>(rng: &mut R, mean: f64) -> u64 {
    if mean.is_nan() || mean <= 0.0 {
        return 0;
    }
    if mean < INVERSION_LIMIT {
        inversion(rng, mean)
    } else {
        ptrs(rng, mean)
    }
}

fn inversion<R: Rng + ?Sized>(rng: &mut R, mean: f64) -> u64 {
    let u: f64 = rng.random();
    let mut k = 0u64;
    let mut p = (-mean).exp();
    let mut cdf = p;
    while u > cdf {
        k += 1;
        p *= mean / k as f64;
        if p == 0.0 {
            // the remaining mass is below f64 resolution
            break;
        }
        cdf += p;
    }
    k
}

fn ptrs<R: Rng + ?Sized>(rng: &mut R, mean: f64) -> u64 {
    let slam = mean.sqrt();
    let loglam = mean.ln();
    let b = 0.931 + 2.53 * slam;
    let a = -0.059 + 0.02483 * b;
    let inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    let vr = 0.9277 - 3.6224 / (b - 2.0);
    loop {
        let u = rng.random::<f64>() - 0.5;
        let v: f64 = rng.random();
        let us = 0.5 - u.abs();
        let k = ((2.0 * a / us + b) * u + mean + 0.43).floor();
        if us >= 0.07 && v <= vr {
            return k as u64;
        }
        if k < 0.0 || (us < 0.013 && v > us) {
            continue;
        }
        let lhs = v.ln() + inv_alpha.ln() - (a / (us * us) + b).ln();
        let rhs = -mean + k * loglam - libm::lgamma(k + 1.0);
        if lhs <= rhs {
            return k as u64;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn moments(mean: f64, reps: usize, seed: u64) -> (f64, f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let xs: Vec<f64> = (0..reps).map(|_| sample_poisson_count(&mut rng, mean) as f64).collect();
        let m = xs.iter().sum::<f64>() / reps as f64;
        let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (reps - 1) as f64;
        (m, v)
    }

    #[test]
    fn zero_mean_gives_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(sample_poisson_count(&mut rng, 0.0), 0);
    }

    #[test]
    fn both_branches_have_poisson_moments() {
        let reps = 20_000;
        for (i, mean) in [0.3, 4.0, 29.9, 30.0, 75.0, 1e4].into_iter().enumerate() {
            let (m, v) = moments(mean, reps, 100 + i as u64);
            // mean: 4 standard errors; variance: relative band from the 4th cumulant
            let se_mean = (mean / reps as f64).sqrt();
            assert!((m - mean).abs() < 4.0 * se_mean, "mean {mean}: {m}");
            let se_var = ((2.0 * mean * mean + mean) / reps as f64).sqrt();
            assert!((v - mean).abs() < 4.0 * se_var, "var {mean}: {v}");
        }
    }

    #[test]
    fn small_mean_frequencies_match_pmf() {
        let mean = 2.5;
        let reps = 50_000;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut counts = [0usize; 8];
        for _ in 0..reps {
            let k = sample_poisson_count(&mut rng, mean) as usize;
            if k < 8 {
                counts[k] += 1;
            }
        }
        let mut pmf = (-mean).exp();
        for (k, &c) in counts.iter().enumerate() {
            if k > 0 {
                pmf *= mean / k as f64;
            }
            let expect = pmf * reps as f64;
            assert!((c as f64 - expect).abs() < 5.0 * expect.sqrt() + 1.0, "k={k}");
        }
    }
}
