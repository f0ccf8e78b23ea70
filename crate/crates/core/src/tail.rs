//! Binomial tail probabilities for the edge count inside an m-node set.
//!
//! The number of node pairs is `N = m(m-1)/2`; the edge count is treated
//! as Binomial(N, p).

use crate::error::{Error, Result};

fn check(m: usize, p_bar: f64) -> Result<u64> {
    if m < 2 {
        return Err(Error::Domain(format!("need at least 2 nodes, got {m}")));
    }
    if !(0.0..=1.0).contains(&p_bar) {
        return Err(Error::Domain(format!("p_bar {p_bar} outside [0, 1]")));
    }
    Ok((m as u64) * (m as u64 - 1) / 2)
}

/// ln P(X = i) for i = lo..=hi, by the ratio recurrence from ln P(X = lo).
fn ln_pmf_range(pairs: u64, p: f64, lo: u64, hi: u64) -> Vec<f64> {
    let ln_p = p.ln();
    let ln_q = (-p).ln_1p();
    let mut first = lo as f64 * ln_p + (pairs - lo) as f64 * ln_q;
    let k = lo.min(pairs - lo);
    for t in 1..=k {
        first += ((pairs - k + t) as f64 / t as f64).ln();
    }
    let log_odds = ln_p - ln_q;
    let mut out = Vec::with_capacity((hi - lo + 1) as usize);
    let mut cur = first;
    out.push(cur);
    for i in lo..hi {
        cur += ((pairs - i) as f64 / (i + 1) as f64).ln() + log_odds;
        out.push(cur);
    }
    out
}

fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + terms.iter().map(|&t| (t - max).exp()).sum::<f64>().ln()
}

/// P(X <= e) for X ~ Binomial(m(m-1)/2, p_bar).
///
/// Exactly 1 when `e` reaches the pair count. Terms are formed in log space
/// and summed from the small end of whichever tail is shorter.
pub fn binom_tail(m: usize, e: u64, p_bar: f64) -> Result<f64> {
    let pairs = check(m, p_bar)?;
    if e >= pairs {
        return Ok(1.0);
    }
    if p_bar == 0.0 {
        return Ok(1.0);
    }
    if p_bar == 1.0 {
        return Ok(0.0);
    }
    // Sum whichever side of the mean is shorter so that values near 1 are
    // formed as 1 - (small upper tail) rather than as a long rounded sum.
    if (e as f64) < pairs as f64 * p_bar {
        let sum: f64 = ln_pmf_range(pairs, p_bar, 0, e)
            .into_iter()
            .map(f64::exp)
            .sum();
        Ok(sum.min(1.0))
    } else {
        let upper: f64 = ln_pmf_range(pairs, p_bar, e + 1, pairs)
            .into_iter()
            .rev()
            .map(f64::exp)
            .sum();
        Ok((1.0 - upper).max(0.0))
    }
}

/// ln P(X >= e) for X ~ Binomial(m(m-1)/2, p_bar), computed in log space.
///
/// Small values mean the set is denser than chance; this is the statistic
/// the permutation filter ranks communities by.
pub fn ln_binom_upper_tail(m: usize, e: u64, p_bar: f64) -> Result<f64> {
    let pairs = check(m, p_bar)?;
    if e == 0 {
        return Ok(0.0);
    }
    if e > pairs {
        return Ok(f64::NEG_INFINITY);
    }
    if p_bar == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    if p_bar == 1.0 {
        return Ok(0.0);
    }
    Ok(log_sum_exp(&ln_pmf_range(pairs, p_bar, e, pairs)).min(0.0))
}
