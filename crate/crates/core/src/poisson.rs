//! Poisson probabilities, the modified Bessel function of the first kind and
//! the Skellam distribution of a difference of two Poisson counts.
//!
//! Everything here is a pure function of its arguments. Probabilities are
//! clamped to `[0, 1]` before they are returned.

use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Largest `n` for which `n!` is tabulated exactly enough in `f64`.
const FACTORIAL_TABLE: usize = 171;
const BESSEL_REL_TOL: f64 = 1e-16;
const BESSEL_MAX_TERMS: usize = 10_000;
const TAIL_MAX_TERMS: usize = 100_000;

/// Expected number of goals over a horizon, `λ·(T − t)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct PoissonMean(f64);

impl PoissonMean {
    pub const ZERO: PoissonMean = PoissonMean(0.0);

    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::domain(format!(
                "Poisson mean must be finite and nonnegative, got {value}"
            )));
        }
        Ok(PoissonMean(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for PoissonMean {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        PoissonMean::new(value)
    }
}

fn clamp_probability(p: f64) -> f64 {
    p.clamp(0.0, 1.0)
}

fn factorial_table() -> &'static [f64; FACTORIAL_TABLE] {
    static TABLE: OnceLock<[f64; FACTORIAL_TABLE]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [1.0; FACTORIAL_TABLE];
        for n in 1..FACTORIAL_TABLE {
            t[n] = t[n - 1] * n as f64;
        }
        t
    })
}

/// `ln(n!)`, exact to a few ulps for every `n`.
pub fn ln_factorial(n: u64) -> f64 {
    if (n as usize) < FACTORIAL_TABLE {
        return factorial_table()[n as usize].ln();
    }
    // Stirling series; the first omitted term is below 1e-17 for n > 170.
    let x = n as f64;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    x * x.ln() - x
        + 0.5 * (2.0 * std::f64::consts::PI * x).ln()
        + inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 / 1260.0))
}

/// `P(N = n)` for `N ~ Poisson(mean)`; zero for negative `n`.
///
/// Small arguments use the direct product `e^{-Λ} Π Λ/k`, larger ones go
/// through log space so that neither `Λ^n` nor `n!` can overflow.
pub fn poisson_pmf(n: i64, mean: PoissonMean) -> f64 {
    if n < 0 {
        return 0.0;
    }
    let lam = mean.0;
    if lam == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    if n <= 40 && lam <= 40.0 {
        poisson_pmf_direct(n as u64, mean)
    } else {
        poisson_pmf_log(n as u64, mean)
    }
}

/// Direct evaluation by the product recurrence. Only usable where neither
/// `e^{-Λ}` underflows nor the partial products overflow.
pub fn poisson_pmf_direct(n: u64, mean: PoissonMean) -> f64 {
    let lam = mean.0;
    let mut p = (-lam).exp();
    for k in 1..=n {
        p *= lam / k as f64;
    }
    clamp_probability(p)
}

/// Log-space evaluation `exp(n ln Λ − Λ − ln n!)`.
pub fn poisson_pmf_log(n: u64, mean: PoissonMean) -> f64 {
    let lam = mean.0;
    if lam == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let ln_p = n as f64 * lam.ln() - lam - ln_factorial(n);
    clamp_probability(ln_p.exp())
}

/// `P(N > n)`. Equals one for `n < 0`.
///
/// Above the mean the tail is summed directly so that small tails keep their
/// relative accuracy; below the mean it is `1 − P(N ≤ n)` with the cdf summed
/// downward from `n`.
pub fn poisson_tail(n: i64, mean: PoissonMean) -> f64 {
    if n < 0 {
        return 1.0;
    }
    let lam = mean.0;
    if lam == 0.0 {
        return 0.0;
    }
    if n as f64 >= lam {
        let mut k = n + 1;
        let mut term = poisson_pmf(k, mean);
        let mut sum = 0.0;
        for _ in 0..TAIL_MAX_TERMS {
            if term == 0.0 {
                break;
            }
            sum += term;
            if term < 1e-17 * sum {
                break;
            }
            k += 1;
            term *= lam / k as f64;
        }
        clamp_probability(sum)
    } else {
        let mut k = n;
        let mut term = poisson_pmf(k, mean);
        let mut cdf = 0.0;
        while k >= 0 {
            cdf += term;
            if term < 1e-17 * cdf || term == 0.0 {
                break;
            }
            term *= k as f64 / lam;
            k -= 1;
        }
        clamp_probability(1.0 - cdf)
    }
}

/// `P(N ≤ n)`, computed as the complement of [`poisson_tail`].
pub fn poisson_cdf(n: i64, mean: PoissonMean) -> f64 {
    if n < 0 {
        return 0.0;
    }
    if (n as f64) < mean.0 {
        return clamp_probability(1.0 - poisson_tail(n, mean));
    }
    // Near or above the mean the cdf is the larger quantity; sum it directly.
    let mut sum = 0.0;
    for k in (0..=n).rev() {
        let p = poisson_pmf(k, mean);
        sum += p;
        if (k as f64) < mean.0 && p < 1e-17 * sum {
            break;
        }
    }
    clamp_probability(sum)
}

/// Modified Bessel function of the first kind `I_order(z)` for integer order,
/// by its ascending series `Σ (z/2)^{2m+ν} / (m! (m+ν)!)`.
pub fn bessel_i(order: u32, z: f64) -> Result<f64> {
    if !z.is_finite() || z < 0.0 {
        return Err(Error::domain(format!(
            "Bessel argument must be finite and nonnegative, got {z}"
        )));
    }
    if z == 0.0 {
        return Ok(if order == 0 { 1.0 } else { 0.0 });
    }
    let half = 0.5 * z;
    let nu = order as f64;
    let mut term = (nu * half.ln() - ln_factorial(order as u64)).exp();
    let quarter_sq = half * half;
    let mut sum = term;
    for m in 1..BESSEL_MAX_TERMS {
        let m = m as f64;
        term *= quarter_sq / (m * (m + nu));
        sum += term;
        if term < BESSEL_REL_TOL * sum {
            break;
        }
    }
    Ok(sum)
}

/// `P(N₁ − N₂ = k)` for independent `N₁ ~ Poisson(mean1)`, `N₂ ~ Poisson(mean2)`.
///
/// Evaluates `e^{-(Λ₁+Λ₂)} (Λ₁/Λ₂)^{k/2} I_|k|(2√(Λ₁Λ₂))` with the Bessel series
/// summed term by term in log space, so large means cannot overflow. When one
/// mean is zero the distribution degenerates to a (reflected) Poisson pmf.
pub fn skellam_pmf(k: i64, mean1: PoissonMean, mean2: PoissonMean) -> f64 {
    let (l1, l2) = (mean1.0, mean2.0);
    if l2 == 0.0 {
        return poisson_pmf(k, mean1);
    }
    if l1 == 0.0 {
        return poisson_pmf(-k, mean2);
    }
    let nu = k.unsigned_abs();
    let ln_prefactor = -(l1 + l2) + 0.5 * k as f64 * (l1.ln() - l2.ln());
    // (z/2)^2 = Λ₁Λ₂.
    let ln_half_z = 0.5 * (l1.ln() + l2.ln());
    let ln_ratio_base = 2.0 * ln_half_z;
    let mut ln_term = nu as f64 * ln_half_z - ln_factorial(nu);
    let mut sum = 0.0;
    for m in 0..BESSEL_MAX_TERMS as u64 {
        if m > 0 {
            ln_term += ln_ratio_base - ((m as f64).ln() + ((m + nu) as f64).ln());
        }
        let term = (ln_prefactor + ln_term).exp();
        sum += term;
        let past_peak = (m + 1) as f64 * (m + 1 + nu) as f64 > l1 * l2;
        if past_peak && (term < BESSEL_REL_TOL * sum || term == 0.0) {
            break;
        }
    }
    clamp_probability(sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mean(x: f64) -> PoissonMean {
        PoissonMean::new(x).unwrap()
    }

    fn convolution(k: i64, l1: f64, l2: f64) -> f64 {
        // Independent oracle: Σ_j P(j + k; Λ₁) P(j; Λ₂), capped at 200 goals.
        (0..=200i64)
            .map(|j| {
                poisson_pmf_log((j + k).max(0) as u64, mean(l1))
                    * f64::from(j + k >= 0)
                    * poisson_pmf_log(j as u64, mean(l2))
            })
            .sum()
    }

    #[test]
    fn pmf_examples() {
        assert_eq!(poisson_pmf(0, mean(0.0)), 1.0);
        assert_eq!(poisson_pmf(-1, mean(2.3)), 0.0);
        assert!((poisson_pmf(2, mean(1.0)) - 0.183_939_720_585_721_16).abs() < 1e-16);
    }

    #[test]
    fn mean_rejects_bad_values() {
        assert!(PoissonMean::new(-0.1).is_err());
        assert!(PoissonMean::new(f64::NAN).is_err());
        assert!(PoissonMean::new(f64::INFINITY).is_err());
    }

    #[test]
    fn tail_examples() {
        assert_eq!(poisson_tail(-1, mean(3.7)), 1.0);
        assert_eq!(poisson_tail(0, mean(0.0)), 0.0);
        assert!((poisson_tail(2, mean(1.0)) - 0.080_301_397_071_394_2).abs() < 1e-15);
    }

    #[test]
    fn pmf_plus_tail_is_total_mass() {
        for &lam in &[0.01, 0.5, 1.0, 3.3, 7.0, 12.5, 20.0] {
            let m = mean(lam);
            for cap in [0i64, 3, 10, 40, 200] {
                let head: f64 = (0..=cap).map(|n| poisson_pmf(n, m)).sum();
                assert!(
                    (head + poisson_tail(cap, m) - 1.0).abs() < 1e-12,
                    "lam={lam} cap={cap}"
                );
            }
        }
    }

    #[test]
    fn cdf_complements_tail() {
        for &lam in &[0.2, 2.0, 9.0] {
            for n in 0..30 {
                let m = mean(lam);
                assert!((poisson_cdf(n, m) + poisson_tail(n, m) - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn log_and_direct_paths_agree() {
        for &lam in &[0.05, 0.7, 1.0, 4.2, 10.0, 25.0] {
            for n in 0..=40u64 {
                let a = poisson_pmf_direct(n, mean(lam));
                let b = poisson_pmf_log(n, mean(lam));
                if a > 1e-300 {
                    assert!(((a - b) / a).abs() < 1e-12, "lam={lam} n={n} {a} {b}");
                }
            }
        }
    }

    #[test]
    fn large_arguments_stay_finite() {
        let p = poisson_pmf(10_000, mean(10_000.0));
        assert!(p > 0.0 && p < 0.01);
        assert!(poisson_tail(10_500, mean(10_000.0)) < 1e-5);
    }

    #[test]
    fn pmf_mode_is_floor_mean() {
        for &lam in &[0.3, 1.5, 2.7, 6.2, 11.9] {
            let m = mean(lam);
            let mode = lam.floor() as i64;
            for n in 0..60 {
                if n < mode {
                    assert!(poisson_pmf(n, m) <= poisson_pmf(n + 1, m));
                } else {
                    assert!(poisson_pmf(n, m) >= poisson_pmf(n + 1, m));
                }
            }
        }
    }

    #[test]
    fn bessel_examples() {
        assert_eq!(bessel_i(0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_i(1, 0.0).unwrap(), 0.0);
        assert!((bessel_i(0, 2.0).unwrap() - 2.279_585_302_336_067_3).abs() < 1e-15);
        assert!(bessel_i(0, -1.0).is_err());
    }

    #[test]
    fn bessel_recurrence() {
        // I_{ν-1}(z) − I_{ν+1}(z) = (2ν/z) I_ν(z)
        for &z in &[0.3, 2.0, 7.5, 30.0] {
            for nu in 1..8u32 {
                let lhs = bessel_i(nu - 1, z).unwrap() - bessel_i(nu + 1, z).unwrap();
                let rhs = 2.0 * nu as f64 / z * bessel_i(nu, z).unwrap();
                assert!(((lhs - rhs) / rhs).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn skellam_examples() {
        let p = skellam_pmf(0, mean(1.0), mean(1.0));
        assert!((p - 0.308_508_322_553_671_04).abs() < 1e-15);
        assert!((p - convolution(0, 1.0, 1.0)).abs() < 1e-15);
        assert_eq!(
            skellam_pmf(3, mean(1.0), mean(1.0)),
            skellam_pmf(-3, mean(1.0), mean(1.0))
        );
        let q = skellam_pmf(1, mean(2.0), mean(0.5));
        assert!((q - convolution(1, 2.0, 0.5)).abs() < 1e-15);
        assert!((q - 0.261_134_848_048_055_73).abs() < 1e-15);
    }

    #[test]
    fn skellam_matches_convolution_grid() {
        let grid = [0.1, 0.5, 1.0, 2.0, 5.0];
        for &l1 in &grid {
            for &l2 in &grid {
                for k in -15..=15 {
                    let a = skellam_pmf(k, mean(l1), mean(l2));
                    let b = convolution(k, l1, l2);
                    assert!((a - b).abs() < 1e-10, "k={k} l1={l1} l2={l2}");
                }
            }
        }
    }

    #[test]
    fn skellam_degenerate_means() {
        let m = mean(1.7);
        for k in -3..6 {
            assert_eq!(skellam_pmf(k, m, PoissonMean::ZERO), poisson_pmf(k, m));
            assert_eq!(skellam_pmf(-k, PoissonMean::ZERO, m), poisson_pmf(k, m));
        }
        assert_eq!(skellam_pmf(0, PoissonMean::ZERO, PoissonMean::ZERO), 1.0);
        assert_eq!(skellam_pmf(1, PoissonMean::ZERO, PoissonMean::ZERO), 0.0);
    }

    #[test]
    fn skellam_large_means_do_not_overflow() {
        let total: f64 = (-400..=400)
            .map(|k| skellam_pmf(k, mean(800.0), mean(700.0)))
            .sum();
        assert!((total - 1.0).abs() < 1e-9);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn skellam_sums_to_one(l1 in 0.0f64..8.0, l2 in 0.0f64..8.0) {
                let total: f64 = (-80..=80).map(|k| skellam_pmf(k, mean(l1), mean(l2))).sum();
                prop_assert!((total - 1.0).abs() < 1e-12);
            }

            #[test]
            fn tail_is_monotone(lam in 0.0f64..30.0, n in 0i64..80) {
                let m = mean(lam);
                prop_assert!(poisson_tail(n + 1, m) <= poisson_tail(n, m));
                let t = poisson_tail(n, m);
                prop_assert!((0.0..=1.0).contains(&t));
            }
        }
    }
}
