use serde::{Deserialize, Serialize};

use super::StatsError;
use crate::math;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sided {
    TwoTailed,
    /// Alternative: success probability above p0 (or, for the sign test,
    /// the first system better).
    Greater,
    Less,
}

pub fn binomial_pmf(k: u64, n: u64, p: f64) -> f64 {
    if p == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    if p == 1.0 {
        return if k == n { 1.0 } else { 0.0 };
    }
    math::exp(math::ln_choose(n, k) + k as f64 * math::ln(p) + (n - k) as f64 * math::ln(1.0 - p))
}

/// Exact binomial test of k successes in n trials. The two-tailed p-value
/// sums every outcome no more likely than the observed one.
pub fn binomial_test(k: u64, n: u64, p0: f64, sided: Sided) -> Result<f64, StatsError> {
    if k > n {
        return Err(StatsError::KOutOfRange { k, n });
    }
    if !(p0 > 0.0 && p0 < 1.0) {
        return Err(StatsError::InvalidProbability);
    }
    let p = match sided {
        Sided::Greater => (k..=n).map(|i| binomial_pmf(i, n, p0)).sum(),
        Sided::Less => (0..=k).map(|i| binomial_pmf(i, n, p0)).sum(),
        Sided::TwoTailed => {
            let observed = binomial_pmf(k, n, p0);
            // Relative slack so outcomes tied with the observed one in exact
            // arithmetic are not lost to rounding.
            let limit = observed * (1.0 + 1e-7);
            let (mut inside, mut outside) = (0.0, 0.0);
            for d in (0..=n).map(|i| binomial_pmf(i, n, p0)) {
                if d <= limit {
                    inside += d;
                } else {
                    outside += d;
                }
            }
            // Take whichever side is the smaller sum to keep precision at
            // both ends.
            if inside <= outside { inside } else { 1.0 - outside }
        }
    };
    Ok(f64::min(p, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignTest {
    pub p_value: f64,
    /// Pairs where only the first system is correct.
    pub wins: u64,
    /// Pairs where only the second system is correct.
    pub losses: u64,
    /// Set when no pair was discordant; `p_value` is then 1.
    pub no_discordant: bool,
}

/// Paired sign test over correctness indicators; ties are discarded.
/// `Sided::Greater` tests whether `a` is more often right than `b`.
pub fn sign_test(a: &[bool], b: &[bool], sided: Sided) -> Result<SignTest, StatsError> {
    if a.len() != b.len() {
        return Err(StatsError::LengthMismatch(a.len(), b.len()));
    }
    let wins = a.iter().zip(b).filter(|(x, y)| **x && !**y).count() as u64;
    let losses = a.iter().zip(b).filter(|(x, y)| !**x && **y).count() as u64;
    let n = wins + losses;
    if n == 0 {
        return Ok(SignTest { p_value: 1.0, wins, losses, no_discordant: true });
    }
    let p_value = binomial_test(wins, n, 0.5, sided)?;
    Ok(SignTest { p_value, wins, losses, no_discordant: false })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TTest {
    pub t: f64,
    pub df: f64,
    pub p_value: f64,
}

fn mean_var(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

/// Two-tailed Welch t-test for independent samples with unequal variances.
pub fn welch_t_test(a: &[f64], b: &[f64]) -> Result<TTest, StatsError> {
    for s in [a, b] {
        if s.len() < 2 {
            return Err(StatsError::TooFewSamples { needed: 2, got: s.len() });
        }
    }
    let (ma, va) = mean_var(a);
    let (mb, vb) = mean_var(b);
    let (sa, sb) = (va / a.len() as f64, vb / b.len() as f64);
    let se2 = sa + sb;
    if se2 == 0.0 {
        return Ok(if ma == mb {
            TTest { t: 0.0, df: f64::INFINITY, p_value: 1.0 }
        } else {
            let t = if ma > mb { f64::INFINITY } else { f64::NEG_INFINITY };
            TTest { t, df: f64::INFINITY, p_value: 0.0 }
        });
    }
    let t = (ma - mb) / math::sqrt(se2);
    let df = se2 * se2 / (sa * sa / (a.len() as f64 - 1.0) + sb * sb / (b.len() as f64 - 1.0));
    Ok(TTest { t, df, p_value: math::student_t_two_tailed(t, df) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    #[test]
    fn judge_binomials() {
        let p = |k| binomial_test(k, 160, 0.5, Sided::TwoTailed).unwrap();
        assert!((p(99) - 0.003).abs() <= 0.001, "{}", p(99));
        assert!((p(91) - 0.10).abs() <= 0.02, "{}", p(91));
        assert!((p(85) - 0.48).abs() <= 0.02, "{}", p(85));
        assert_eq!(p(80), 1.0);
        assert!((p(60) - p(100)).abs() < 1e-12);
        assert!(binomial_test(161, 160, 0.5, Sided::TwoTailed).is_err());
    }

    #[test]
    fn sign_test_closed_form() {
        let a = [true; 8];
        let b = [false; 8];
        let s = sign_test(&a, &b, Sided::Greater).unwrap();
        assert!((s.p_value - 0.5f64.powi(8)).abs() < 1e-15);
        let same = sign_test(&a, &a, Sided::Greater).unwrap();
        assert!(same.no_discordant && same.p_value == 1.0);
    }

    #[test]
    fn welch_extremes() {
        let a = [1.0, 2.0, 3.0];
        let r = welch_t_test(&a, &a).unwrap();
        assert_eq!((r.t, r.p_value), (0.0, 1.0));
        let b: Vec<f64> = a.iter().map(|v| v + 100.0).collect();
        assert!(welch_t_test(&a, &b).unwrap().p_value < 1e-4);
        assert_eq!(welch_t_test(&[2.0, 2.0], &[2.0, 2.0]).unwrap().p_value, 1.0);
        assert!(welch_t_test(&[1.0], &a).is_err());
    }
}
