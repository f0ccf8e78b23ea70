//! Agreement between detected and true partitions.

use std::collections::HashMap;
use std::hash::Hash;

use crate::error::{Error, Result};
use crate::extractor::DetectionResult;

/// Which NMI formula to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NmiVariant {
    /// Mutual information over the geometric mean of the two entropies.
    Standard,
    /// `-(sum M_ij ln M_ij)^-1 * sum M_ij ln(M_ij / (M_i+ M_+j))` on raw counts.
    Paper,
}

/// Counts `M[i][j]` of nodes with first label `i` and second label `j`.
///
/// Nodes unlabeled on either side are skipped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    pub counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn from_labels<A, B>(c: &[Option<A>], e: &[Option<B>]) -> Result<Self>
    where
        A: Hash + Eq + Clone,
        B: Hash + Eq + Clone,
    {
        if c.len() != e.len() {
            return Err(Error::Dimension {
                expected: c.len(),
                got: e.len(),
            });
        }
        let mut rows: HashMap<A, usize> = HashMap::new();
        let mut cols: HashMap<B, usize> = HashMap::new();
        let mut cells: Vec<(usize, usize)> = Vec::new();
        for (a, b) in c.iter().zip(e) {
            if let (Some(a), Some(b)) = (a, b) {
                let r = rows.len();
                let r = *rows.entry(a.clone()).or_insert(r);
                let k = cols.len();
                let k = *cols.entry(b.clone()).or_insert(k);
                cells.push((r, k));
            }
        }
        let mut counts = vec![vec![0u64; cols.len()]; rows.len()];
        for (r, k) in cells {
            counts[r][k] += 1;
        }
        Ok(ConfusionMatrix { counts })
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn row_sums(&self) -> Vec<u64> {
        self.counts.iter().map(|r| r.iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<u64> {
        let k = self.counts.first().map_or(0, Vec::len);
        (0..k)
            .map(|j| self.counts.iter().map(|r| r[j]).sum())
            .collect()
    }
}

fn entropy(sums: &[u64], total: f64) -> f64 {
    sums.iter()
        .filter(|&&s| s > 0)
        .map(|&s| {
            let p = s as f64 / total;
            -p * p.ln()
        })
        .sum()
}

/// Normalized mutual information between two labelings, natural log.
pub fn nmi<A, B>(c: &[Option<A>], e: &[Option<B>], variant: NmiVariant) -> Result<f64>
where
    A: Hash + Eq + Clone,
    B: Hash + Eq + Clone,
{
    let m = ConfusionMatrix::from_labels(c, e)?;
    let total = m.total();
    if total == 0 {
        return Err(Error::UndefinedMetric(
            "no node is labeled in both partitions".into(),
        ));
    }
    let rows = m.row_sums();
    let cols = m.col_sums();
    let cells = m
        .counts
        .iter()
        .enumerate()
        .flat_map(|(i, r)| r.iter().enumerate().map(move |(j, &x)| (i, j, x)))
        .filter(|&(_, _, x)| x > 0);

    match variant {
        NmiVariant::Standard => {
            let n = total as f64;
            let mi: f64 = cells
                .map(|(i, j, x)| {
                    let x = x as f64;
                    (x / n) * (x * n / (rows[i] as f64 * cols[j] as f64)).ln()
                })
                .sum();
            let (hc, he) = (entropy(&rows, n), entropy(&cols, n));
            if hc == 0.0 && he == 0.0 {
                return Ok(1.0);
            }
            if hc == 0.0 || he == 0.0 {
                return Ok(0.0);
            }
            Ok((mi / (hc * he).sqrt()).clamp(0.0, 1.0))
        }
        NmiVariant::Paper => {
            let (mut num, mut den) = (0.0, 0.0);
            for (i, j, x) in cells {
                let x = x as f64;
                num += x * (x / (rows[i] as f64 * cols[j] as f64)).ln();
                den += x * x.ln();
            }
            if den == 0.0 {
                return Err(Error::UndefinedMetric(
                    "every confusion cell is at most 1, normalizer vanishes".into(),
                ));
            }
            Ok(-num / den)
        }
    }
}

/// Convenience wrapper for fully labeled partitions.
pub fn nmi_full<A, B>(c: &[A], e: &[B], variant: NmiVariant) -> Result<f64>
where
    A: Hash + Eq + Clone,
    B: Hash + Eq + Clone,
{
    let c: Vec<Option<A>> = c.iter().cloned().map(Some).collect();
    let e: Vec<Option<B>> = e.iter().cloned().map(Some).collect();
    nmi(&c, &e, variant)
}

fn jaccard(a: &[usize], b: &[usize]) -> f64 {
    let (mut i, mut j, mut inter) = (0, 0, 0usize);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                inter += 1;
                i += 1;
                j += 1;
            }
        }
    }
    let union = a.len() + b.len() - inter;
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

/// Jaccard overlap `|D_i & T_j| / |D_i | T_j|` for every detected/true pair.
pub fn overlap_matrix(detected: &[Vec<usize>], truth: &[Vec<usize>]) -> Vec<Vec<f64>> {
    let sorted = |sets: &[Vec<usize>]| -> Vec<Vec<usize>> {
        sets.iter()
            .map(|s| {
                let mut s = s.clone();
                s.sort_unstable();
                s.dedup();
                s
            })
            .collect()
    };
    let (d, t) = (sorted(detected), sorted(truth));
    d.iter()
        .map(|a| t.iter().map(|b| jaccard(a, b)).collect())
        .collect()
}

/// Symmetric-difference error `|S ^ G| / |S | G|` between two node sets.
pub fn jaccard_error(found: &[usize], truth: &[usize]) -> f64 {
    let mut f = found.to_vec();
    f.sort_unstable();
    f.dedup();
    let mut t = truth.to_vec();
    t.sort_unstable();
    t.dedup();
    if f.is_empty() && t.is_empty() {
        return 0.0;
    }
    1.0 - jaccard(&f, &t)
}

/// Aggregate over replicate runs.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkSummary {
    pub mean_nmi: f64,
    /// Sample standard deviation (zero for a single run).
    pub sd_nmi: f64,
    pub mean_cn: f64,
    pub replicates: usize,
}

/// Standard NMI of a detection against true labels, over kept nodes only.
/// A run that keeps no node scores 0.
pub fn run_nmi(result: &DetectionResult, truth: &[usize]) -> f64 {
    let detected = result.labels();
    let truth: Vec<Option<usize>> = truth.iter().copied().map(Some).collect();
    nmi(&detected, &truth, NmiVariant::Standard).unwrap_or(0.0)
}

/// Mean and spread of NMI and mean kept-community count over runs.
///
/// `truth` labels should give outliers their own block.
pub fn benchmark_summary(runs: &[(DetectionResult, Vec<usize>)]) -> Result<BenchmarkSummary> {
    if runs.is_empty() {
        return Err(Error::InvalidParameter("need at least one run".into()));
    }
    let scores: Vec<f64> = runs.iter().map(|(r, t)| run_nmi(r, t)).collect();
    let counts: Vec<f64> = runs.iter().map(|(r, _)| r.kept_count() as f64).collect();
    summarize_runs(&scores, &counts)
}

/// Summary from per-run NMI scores and kept-community counts.
pub fn summarize_runs(scores: &[f64], counts: &[f64]) -> Result<BenchmarkSummary> {
    if scores.is_empty() || scores.len() != counts.len() {
        return Err(Error::InvalidParameter(
            "need one count per score and at least one run".into(),
        ));
    }
    Ok(summarize(scores, counts))
}

fn summarize(scores: &[f64], counts: &[f64]) -> BenchmarkSummary {
    let k = scores.len() as f64;
    let mean = scores.iter().sum::<f64>() / k;
    let sd = if scores.len() > 1 {
        (scores.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0)).sqrt()
    } else {
        0.0
    };
    BenchmarkSummary {
        mean_nmi: mean,
        sd_nmi: sd,
        mean_cn: counts.iter().sum::<f64>() / k,
        replicates: scores.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_partitions() {
        let c = [1, 1, 2, 2];
        assert_eq!(nmi_full(&c, &c, NmiVariant::Standard).unwrap(), 1.0);
        assert!((nmi_full(&c, &c, NmiVariant::Paper).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn constant_versus_split() {
        assert_eq!(
            nmi_full(&[1, 1, 2, 2], &[7, 7, 7, 7], NmiVariant::Standard).unwrap(),
            0.0
        );
    }

    #[test]
    fn worked_value() {
        let v = nmi_full(&[1, 1, 2, 2], &[1, 1, 1, 2], NmiVariant::Standard).unwrap();
        assert!((v - 0.3456).abs() < 1e-3, "{v}");
    }

    #[test]
    fn unlabeled_nodes_skipped() {
        let c = [Some(1), Some(1), Some(2), Some(2), None];
        let e = [Some("a"), Some("a"), Some("b"), Some("b"), Some("c")];
        assert_eq!(nmi(&c, &e, NmiVariant::Standard).unwrap(), 1.0);
        let none: [Option<u8>; 2] = [None, None];
        assert!(nmi(&none, &[Some(1), Some(2)], NmiVariant::Standard).is_err());
    }

    #[test]
    fn raw_count_variant_singletons_undefined() {
        assert!(nmi_full(&[1, 2, 3], &[1, 2, 3], NmiVariant::Paper).is_err());
    }

    #[test]
    fn confusion_counts() {
        let m = ConfusionMatrix::from_labels(
            &[Some(1), Some(1), Some(2), Some(2)],
            &[Some(1), Some(1), Some(1), Some(2)],
        )
        .unwrap();
        assert_eq!(m.counts, vec![vec![2, 0], vec![1, 1]]);
        assert_eq!(m.total(), 4);
        assert_eq!(m.row_sums(), vec![2, 2]);
        assert_eq!(m.col_sums(), vec![3, 1]);
    }

    #[test]
    fn overlap_examples() {
        let a: Vec<usize> = (1..=10).collect();
        let b: Vec<usize> = (6..=15).collect();
        let o = overlap_matrix(&[a.clone(), vec![100]], &[a.clone(), b]);
        assert_eq!(o[0][0], 1.0);
        assert_eq!(o[0][1], 1.0 / 3.0);
        assert_eq!(o[1][0], 0.0);
    }

    #[test]
    fn jaccard_error_values() {
        assert_eq!(jaccard_error(&[1, 2, 3], &[3, 2, 1]), 0.0);
        assert_eq!(jaccard_error(&[1, 2], &[3, 4]), 1.0);
        assert!((jaccard_error(&[1, 2, 3], &[2, 3, 4]) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn summary_means() {
        let s = summarize(&[1.0, 0.0], &[3.0, 5.0]);
        assert_eq!(s.mean_nmi, 0.5);
        assert_eq!(s.mean_cn, 4.0);
        assert!((s.sd_nmi - 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(summarize(&[0.7], &[2.0]).sd_nmi, 0.0);
    }
}
