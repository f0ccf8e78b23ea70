//! Random graph generators: (degree-corrected) stochastic block models with
//! an optional outlier block, and the fixed-edge-count Erdos-Renyi model.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Law of the per-node degree variable theta.
#[derive(Debug, Clone, PartialEq)]
pub enum ThetaDist {
    /// Point mass; `Constant(1.0)` gives a plain SBM.
    Constant(f64),
    Uniform {
        lo: f64,
        hi: f64,
    },
    /// Finite support `values` drawn with the given (unnormalized) weights.
    Discrete {
        values: Vec<f64>,
        weights: Vec<f64>,
    },
}

impl ThetaDist {
    pub fn sbm() -> Self {
        ThetaDist::Constant(1.0)
    }

    /// theta ~ U[0.5, 1].
    pub fn dcsbm_uniform() -> Self {
        ThetaDist::Uniform { lo: 0.5, hi: 1.0 }
    }

    pub fn mean(&self) -> f64 {
        match self {
            ThetaDist::Constant(c) => *c,
            ThetaDist::Uniform { lo, hi } => 0.5 * (lo + hi),
            ThetaDist::Discrete { values, weights } => {
                let total: f64 = weights.iter().sum();
                values.iter().zip(weights).map(|(v, w)| v * w).sum::<f64>() / total
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        match self {
            ThetaDist::Constant(c) if !(*c > 0.0 && c.is_finite()) => {
                bad(format!("theta constant {c} must be positive"))
            }
            ThetaDist::Uniform { lo, hi } if !(*lo > 0.0 && hi >= lo && hi.is_finite()) => bad(
                format!("theta range [{lo}, {hi}] must be positive and ordered"),
            ),
            ThetaDist::Discrete { values, weights } => {
                if values.is_empty() || values.len() != weights.len() {
                    return bad(
                        "theta support and weights must be nonempty and equal length".into(),
                    );
                }
                if values.iter().any(|&v| !(v > 0.0)) || weights.iter().any(|&w| !(w >= 0.0)) {
                    return bad("theta support must be positive, weights nonnegative".into());
                }
                if !(weights.iter().sum::<f64>() > 0.0) {
                    return bad("theta weights sum to zero".into());
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            ThetaDist::Constant(c) => *c,
            ThetaDist::Uniform { lo, hi } => {
                if lo == hi {
                    *lo
                } else {
                    rng.gen_range(*lo..*hi)
                }
            }
            ThetaDist::Discrete { values, weights } => {
                let total: f64 = weights.iter().sum();
                let mut x = rng.gen::<f64>() * total;
                for (v, w) in values.iter().zip(weights) {
                    if x < *w {
                        return *v;
                    }
                    x -= w;
                }
                *values.last().unwrap()
            }
        }
    }
}

/// Parameters of a degree-corrected block model.
///
/// When `outlier_frac > 0` the last block is the outlier block and its
/// proportion must equal `outlier_frac`.
#[derive(Debug, Clone, PartialEq)]
pub struct DcsbmParams {
    pub n: usize,
    pub pi: Vec<f64>,
    pub p: Vec<Vec<f64>>,
    pub theta: ThetaDist,
    pub outlier_frac: f64,
}

impl DcsbmParams {
    pub fn new(
        n: usize,
        pi: Vec<f64>,
        p: Vec<Vec<f64>>,
        theta: ThetaDist,
        outlier_frac: f64,
    ) -> Result<Self> {
        let params = DcsbmParams {
            n,
            pi,
            p,
            theta,
            outlier_frac,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn k(&self) -> usize {
        self.pi.len()
    }

    pub fn has_outlier_block(&self) -> bool {
        self.outlier_frac > 0.0
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.pi.len();
        if k == 0 {
            return Err(Error::InvalidParameter("need at least one block".into()));
        }
        if self.pi.iter().any(|&x| !(x > 0.0)) {
            return Err(Error::InvalidParameter(
                "block proportions must be positive".into(),
            ));
        }
        let total: f64 = self.pi.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "block proportions sum to {total}, not 1"
            )));
        }
        if !(0.0..1.0).contains(&self.outlier_frac) {
            return Err(Error::InvalidParameter(
                "outlier_frac must lie in [0, 1)".into(),
            ));
        }
        if self.has_outlier_block() && (self.pi[k - 1] - self.outlier_frac).abs() > 1e-12 {
            return Err(Error::InvalidParameter(
                "last block proportion must equal outlier_frac".into(),
            ));
        }
        self.theta.validate()?;
        check_connection_matrix(&self.p, k, self.has_outlier_block())
    }
}

/// Checks shape, symmetry, range, and block separation of `p`.
///
/// Without an outlier block every diagonal entry must exceed every
/// off-diagonal entry. With one, the real blocks' diagonals must exceed
/// every off-diagonal entry, which in turn must be at least the outlier
/// diagonal.
pub fn check_connection_matrix(p: &[Vec<f64>], k: usize, outlier_block: bool) -> Result<()> {
    let bad = |m: String| Err(Error::InvalidParameter(m));
    if p.len() != k || p.iter().any(|row| row.len() != k) {
        return bad(format!("connection matrix must be {k}x{k}"));
    }
    for a in 0..k {
        for b in 0..k {
            if !(0.0..=1.0).contains(&p[a][b]) {
                return bad(format!("P[{a}][{b}] = {} outside [0, 1]", p[a][b]));
            }
            if p[a][b] != p[b][a] {
                return bad(format!("P is not symmetric at ({a}, {b})"));
            }
        }
    }
    let real = if outlier_block { k - 1 } else { k };
    let p_min = (0..real).map(|a| p[a][a]).fold(f64::INFINITY, f64::min);
    let q_max = (0..k)
        .flat_map(|a| (0..k).filter(move |&b| b != a).map(move |b| (a, b)))
        .map(|(a, b)| p[a][b])
        .fold(f64::NEG_INFINITY, f64::max);
    if real > 0 && q_max.is_finite() && !(p_min > q_max) {
        return bad(format!(
            "smallest within-block probability {p_min} must exceed largest between-block probability {q_max}"
        ));
    }
    if outlier_block {
        let p_out = p[k - 1][k - 1];
        if q_max.is_finite() && !(q_max >= p_out) {
            return bad(format!(
                "outlier block probability {p_out} exceeds between-block probability {q_max}"
            ));
        }
    }
    Ok(())
}

/// Out-in-ratio connection matrix rescaled to a target mean degree.
///
/// The base matrix has `1/beta` on the diagonal of real blocks and 1
/// elsewhere (an outlier block, if any, is 1 everywhere); it is scaled by
/// `lambda / ((n - 1) * pi' P0 pi * e_theta^2)`.
pub fn build_connection_matrix(
    pi: &[f64],
    beta: f64,
    lambda: f64,
    n: usize,
    e_theta: f64,
    outlier_block: bool,
) -> Result<Vec<Vec<f64>>> {
    if !(beta > 0.0) || !(lambda > 0.0) || n < 2 || !(e_theta > 0.0) || pi.is_empty() {
        return Err(Error::InvalidParameter(format!(
            "need beta > 0, lambda > 0, n >= 2, E(theta) > 0 and at least one block \
             (beta={beta}, lambda={lambda}, n={n}, E(theta)={e_theta})"
        )));
    }
    let k = pi.len();
    let real = if outlier_block { k - 1 } else { k };
    let base = |a: usize, b: usize| if a == b && a < real { 1.0 / beta } else { 1.0 };
    let quad: f64 = (0..k)
        .flat_map(|a| (0..k).map(move |b| (a, b)))
        .map(|(a, b)| pi[a] * base(a, b) * pi[b])
        .sum();
    let scale = lambda / ((n - 1) as f64 * quad * e_theta * e_theta);
    let p: Vec<Vec<f64>> = (0..k)
        .map(|a| (0..k).map(|b| scale * base(a, b)).collect())
        .collect();
    let max = p.iter().flatten().copied().fold(0.0, f64::max);
    if max > 1.0 {
        return Err(Error::Infeasible(format!(
            "lambda={lambda} with beta={beta} needs connection probability {max:.4} > 1 at n={n}"
        )));
    }
    Ok(p)
}

/// A sampled network with its ground truth.
#[derive(Debug, Clone)]
pub struct GeneratedNetwork {
    pub graph: Graph,
    /// True block per node, 1-based; the outlier block (if any) is the last.
    pub labels: Vec<usize>,
    pub thetas: Vec<f64>,
    /// Pairs whose probability theta_i theta_j P exceeded 1 and was clipped.
    pub clipped_pairs: usize,
}

impl GeneratedNetwork {
    /// Ground-truth communities as 0-based node lists, one per block.
    pub fn blocks(&self, k: usize) -> Vec<Vec<usize>> {
        let mut blocks = vec![Vec::new(); k];
        for (i, &c) in self.labels.iter().enumerate() {
            blocks[c - 1].push(i);
        }
        blocks
    }
}

fn sample_edges(
    labels: &[usize],
    thetas: &[f64],
    p: &[Vec<f64>],
    rng: &mut ChaCha8Rng,
) -> Result<GeneratedNetwork> {
    let n = labels.len();
    let mut edges = Vec::new();
    let mut clipped = 0;
    for i in 0..n {
        let row = &p[labels[i] - 1];
        for j in (i + 1)..n {
            let mut prob = thetas[i] * thetas[j] * row[labels[j] - 1];
            if prob > 1.0 {
                prob = 1.0;
                clipped += 1;
            }
            if rng.gen::<f64>() < prob {
                edges.push((i, j));
            }
        }
    }
    Ok(GeneratedNetwork {
        graph: Graph::from_edges(n, &edges)?,
        labels: labels.to_vec(),
        thetas: thetas.to_vec(),
        clipped_pairs: clipped,
    })
}

/// Samples labels i.i.d. from `pi`, degree variables i.i.d. from the theta
/// law, and each pair independently with probability
/// `min(1, theta_i theta_j P[c_i][c_j])`.
pub fn sample(params: &DcsbmParams, seed: u64) -> Result<GeneratedNetwork> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let labels: Vec<usize> = (0..params.n)
        .map(|_| {
            let mut x = rng.gen::<f64>();
            for (k, &w) in params.pi.iter().enumerate() {
                if x < w {
                    return k + 1;
                }
                x -= w;
            }
            params.pi.len()
        })
        .collect();
    let thetas: Vec<f64> = (0..params.n)
        .map(|_| params.theta.sample(&mut rng))
        .collect();
    sample_edges(&labels, &thetas, &params.p, &mut rng)
}

/// Like [`sample`] but with block sizes fixed: the first `sizes[0]` nodes
/// form block 1, the next `sizes[1]` block 2, and so on.
pub fn fixed_size_sample(
    sizes: &[usize],
    p: &[Vec<f64>],
    theta: &ThetaDist,
    outlier_block: bool,
    seed: u64,
) -> Result<GeneratedNetwork> {
    if sizes.is_empty() || sizes.contains(&0) {
        return Err(Error::InvalidParameter(
            "block sizes must be positive".into(),
        ));
    }
    check_connection_matrix(p, sizes.len(), outlier_block)?;
    theta.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let labels: Vec<usize> = sizes
        .iter()
        .enumerate()
        .flat_map(|(k, &s)| std::iter::repeat_n(k + 1, s))
        .collect();
    let thetas: Vec<f64> = labels.iter().map(|_| theta.sample(&mut rng)).collect();
    sample_edges(&labels, &thetas, p, &mut rng)
}

/// Uniform simple graph on `n` nodes with exactly `m` edges.
pub fn gnm<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Result<Graph> {
    let total = n * n.saturating_sub(1) / 2;
    if m > total {
        return Err(Error::InvalidParameter(format!(
            "{m} edges do not fit in a simple graph on {n} nodes"
        )));
    }
    // row i holds pairs (i, i+1..n); row_start[i] is its first flat index
    let row_start: Vec<usize> = (0..n).map(|i| i * (2 * n - i - 1) / 2).collect();
    let edges: Vec<(usize, usize)> = index::sample(rng, total, m)
        .into_iter()
        .map(|flat| {
            let i = row_start.partition_point(|&s| s <= flat) - 1;
            (i, i + 1 + flat - row_start[i])
        })
        .collect();
    Graph::from_edges(n, &edges)
}

/// Erdos-Renyi G(n, p) with independent pairs.
pub fn gnp(n: usize, p: f64, seed: u64) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!(
            "edge probability {p} outside [0, 1]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.gen::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    Graph::from_edges(n, &edges)
}
