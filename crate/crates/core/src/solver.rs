//! Single-community extraction by alternating hard-thresholded power steps.
//!
//! Each half-step multiplies by `Q + 2*lambda*I`, adds a pull of strength
//! `2*lambda1` toward the degree-weighted reprojection of the previous
//! support, and applies [`hard_threshold`] with penalty `eta / 2`.

use std::cmp::Ordering;

use crate::criteria::{reproject_support, MembershipVector};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::laplacian::NormalizedAdjacency;
use crate::scalar::{norm2, Scalar};

/// Parameters of one alternating solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig<T> {
    /// Coupling weight between the two iterates.
    pub lambda: T,
    /// Pull toward the degree-weighted reprojection of the support.
    pub lambda1: T,
    /// L0 penalty per node.
    pub eta: T,
    pub eps: T,
    pub max_iter: usize,
}

impl<T: Scalar> SolverConfig<T> {
    pub const DEFAULT_EPS: f64 = 1e-4;
    pub const DEFAULT_MAX_ITER: usize = 500;

    /// Defaults for a graph with `n` nodes: lambda = 1/sqrt(n), lambda1 = 0,
    /// eps = 1e-4, 500 iterations.
    pub fn for_nodes(n: usize, eta: T) -> Self {
        SolverConfig {
            lambda: T::one() / T::of_usize(n.max(1)).sqrt(),
            lambda1: T::zero(),
            eta,
            eps: T::of(Self::DEFAULT_EPS),
            max_iter: Self::DEFAULT_MAX_ITER,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidParameter(what.to_string()));
        if !(self.lambda > T::zero()) {
            return bad("lambda must be positive");
        }
        if !(self.lambda1 >= T::zero()) {
            return bad("lambda1 must be nonnegative");
        }
        if !(self.eta >= T::zero()) {
            return bad("eta must be nonnegative");
        }
        if !(self.eps > T::zero()) {
            return bad("eps must be positive");
        }
        if self.max_iter == 0 {
            return bad("max_iter must be at least 1");
        }
        Ok(())
    }
}

/// Result of one solve. An empty `support` means no candidate was found.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverOutcome<T> {
    pub support: Vec<usize>,
    pub u: MembershipVector<T>,
    pub v: MembershipVector<T>,
    pub iterations: usize,
    pub converged: bool,
}

impl<T: Scalar> SolverOutcome<T> {
    fn empty(n: usize, iterations: usize) -> Self {
        SolverOutcome {
            support: Vec::new(),
            u: MembershipVector::zeros(n),
            v: MembershipVector::zeros(n),
            iterations,
            converged: false,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }
}

/// Reusable buffers for [`hard_threshold`].
#[derive(Debug, Default)]
struct ThresholdScratch {
    order: Vec<usize>,
}

impl ThresholdScratch {
    /// Writes L(z, rho) into `out`. Returns false when nothing survives.
    fn apply<T: Scalar>(&mut self, z: &[T], rho: T, out: &mut [T]) -> bool {
        let n = z.len();
        out.iter_mut().for_each(|o| *o = T::zero());
        if rho.is_zero() {
            let norm = norm2(z);
            if norm.is_zero() {
                return false;
            }
            for (o, &x) in out.iter_mut().zip(z) {
                *o = x / norm;
            }
            return true;
        }

        self.order.clear();
        self.order.extend(0..n);
        // descending |z|, ascending index on ties
        self.order.sort_by(|&a, &b| {
            z[b].abs()
                .partial_cmp(&z[a].abs())
                .unwrap_or(Ordering::Equal)
                .then(a.cmp(&b))
        });
        let mag = |k: usize| {
            if k < n {
                z[self.order[k]].abs()
            } else {
                T::zero()
            }
        };

        // `kept` counts sorted entries strictly above the (r+1)-th magnitude
        let two = T::one() + T::one();
        let mut kept = 0usize;
        let mut sum_sq = T::zero();
        for r in 1..=n {
            let next = mag(r);
            while kept < n && mag(kept) > next {
                let m = mag(kept);
                sum_sq = sum_sq + m * m;
                kept += 1;
            }
            if next <= (rho * rho + two * rho * sum_sq.sqrt()).sqrt() {
                break;
            }
        }
        if kept == 0 || sum_sq.is_zero() {
            return false;
        }
        let norm = sum_sq.sqrt();
        for &i in &self.order[..kept] {
            out[i] = z[i] / norm;
        }
        true
    }
}

/// Closed-form maximizer of `u'z - rho * ||u||_0` over unit vectors.
///
/// With `|z|_r` the r-th largest magnitude (`|z|_{n+1} = 0`), keeps the
/// entries strictly larger than `|z|_{r+1}` for the smallest `r` with
/// `|z|_{r+1} <= sqrt(rho^2 + 2 rho ||kept||)`, then normalizes.
/// Returns [`Error::Degenerate`] when no entry survives.
pub fn hard_threshold<T: Scalar>(z: &[T], rho: T) -> Result<MembershipVector<T>> {
    if !(rho >= T::zero()) {
        return Err(Error::InvalidParameter("rho must be nonnegative".into()));
    }
    let mut out = vec![T::zero(); z.len()];
    if ThresholdScratch::default().apply(z, rho, &mut out) {
        Ok(MembershipVector::normalized(out))
    } else {
        Err(Error::Degenerate)
    }
}

/// Runs the alternating thresholded iteration from `v0`.
///
/// Stops when `||u - v||_2 < eps` or after `max_iter` rounds. The support
/// is the set of positive-degree nodes where both final iterates are
/// nonzero. A thresholding step that kills every entry yields an empty
/// outcome with `converged = false`.
pub fn l0lap_iterate<T: Scalar>(
    g: &Graph,
    cfg: &SolverConfig<T>,
    v0: &MembershipVector<T>,
) -> Result<SolverOutcome<T>> {
    cfg.validate()?;
    let n = g.n();
    if v0.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: v0.len(),
        });
    }
    if g.edge_count() == 0 {
        return Err(Error::NoEdges);
    }
    let q = NormalizedAdjacency::<T>::new(g);
    let two = T::one() + T::one();
    let shift = two * cfg.lambda;
    let pull = two * cfg.lambda1;
    let rho = cfg.eta / two;
    let use_pull = !cfg.lambda1.is_zero();

    let mut scratch = ThresholdScratch::default();
    let mut v_prev = v0.values().to_vec();
    let mut u_prev_d = vec![T::zero(); n];
    let mut v_prev_d = vec![T::zero(); n];
    if use_pull {
        reproject_support(g, &v_prev, &mut u_prev_d);
        v_prev_d.copy_from_slice(&u_prev_d);
    }
    let mut z = vec![T::zero(); n];
    let mut u = vec![T::zero(); n];
    let mut v = vec![T::zero(); n];

    let mut converged = false;
    let mut iterations = 0;
    for k in 1..=cfg.max_iter {
        iterations = k;
        q.apply_into(&v_prev, &mut z);
        for i in 0..n {
            z[i] = z[i] + shift * v_prev[i];
            if use_pull {
                z[i] = z[i] + pull * u_prev_d[i];
            }
        }
        if !scratch.apply(&z, rho, &mut u) {
            return Ok(SolverOutcome::empty(n, iterations));
        }

        q.apply_into(&u, &mut z);
        for i in 0..n {
            z[i] = z[i] + shift * u[i];
            if use_pull {
                z[i] = z[i] + pull * v_prev_d[i];
            }
        }
        if !scratch.apply(&z, rho, &mut v) {
            return Ok(SolverOutcome::empty(n, iterations));
        }

        let gap: T = u
            .iter()
            .zip(&v)
            .map(|(&a, &b)| (a - b) * (a - b))
            .sum::<T>()
            .sqrt();
        if gap < cfg.eps {
            converged = true;
            break;
        }
        if use_pull {
            reproject_support(g, &u, &mut u_prev_d);
            reproject_support(g, &v, &mut v_prev_d);
        }
        std::mem::swap(&mut v_prev, &mut v);
    }
    if !converged {
        // the last v iterate was swapped into v_prev
        std::mem::swap(&mut v_prev, &mut v);
    }

    let support: Vec<usize> = (0..n)
        .filter(|&i| !u[i].is_zero() && !v[i].is_zero() && g.degree(i) > 0)
        .collect();
    Ok(SolverOutcome {
        support,
        u: MembershipVector::normalized(u),
        v: MembershipVector::normalized(v),
        iterations,
        converged,
    })
}

/// Two-phase solve at penalty `eta` with default settings for `g`.
pub fn two_phase_solve<T: Scalar>(g: &Graph, eta: T) -> Result<SolverOutcome<T>> {
    two_phase_solve_with(g, &SolverConfig::for_nodes(g.n(), eta))
}

/// Phase 1 runs from the uniform vector with `lambda1 = 0`; its final `v`
/// (converged or not) warm-starts phase 2 with `lambda1 = 1`. `base.lambda1`
/// is ignored.
pub fn two_phase_solve_with<T: Scalar>(
    g: &Graph,
    base: &SolverConfig<T>,
) -> Result<SolverOutcome<T>> {
    let phase1_cfg = SolverConfig {
        lambda1: T::zero(),
        ..*base
    };
    let phase1 = l0lap_iterate(g, &phase1_cfg, &MembershipVector::uniform(g.n()))?;
    if phase1.v.is_zero() {
        return Ok(phase1);
    }
    let phase2_cfg = SolverConfig {
        lambda1: T::one(),
        ..*base
    };
    let warm = MembershipVector::normalized(phase1.v.into_values());
    l0lap_iterate(g, &phase2_cfg, &warm)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> Graph {
        Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    fn two_triangles() -> Graph {
        Graph::from_edges(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap()
    }

    #[test]
    fn threshold_single_spike() {
        let u = hard_threshold(&[3.0, 0.0, 0.0], 0.1).unwrap();
        assert_eq!(u.values(), &[1.0, 0.0, 0.0]);
    }

    #[test]
    fn threshold_tied_pair_needs_r2() {
        // r = 1 keeps nothing (ties excluded): 1 > sqrt(0.01); r = 2 keeps both.
        let u = hard_threshold(&[1.0, 1.0], 0.1).unwrap();
        let h = 1.0 / 2f64.sqrt();
        assert!((u.values()[0] - h).abs() < 1e-15);
        assert!((u.values()[1] - h).abs() < 1e-15);
    }

    #[test]
    fn threshold_zero_rho_normalizes() {
        let z = [0.5, -2.0, 0.0, 1.0];
        let u = hard_threshold(&z, 0.0).unwrap();
        let norm = (0.25f64 + 4.0 + 1.0).sqrt();
        for (a, b) in u.values().iter().zip(z) {
            assert!((a - b / norm).abs() < 1e-15);
        }
    }

    #[test]
    fn threshold_degenerate() {
        assert_eq!(hard_threshold(&[0.0f64; 3], 0.0), Err(Error::Degenerate));
        // all entries tied at or below rho
        assert_eq!(hard_threshold(&[1.0, 1.0], 5.0), Err(Error::Degenerate));
        assert!(hard_threshold(&[1.0], -0.1).is_err());
    }

    #[test]
    fn threshold_keeps_sign() {
        let u = hard_threshold(&[-4.0, 0.1, 3.0], 0.5).unwrap();
        assert_eq!(u.support(), vec![0, 2]);
        assert!(u.values()[0] < 0.0);
    }

    #[test]
    fn triangle_converges_in_one_step() {
        let g = triangle();
        let cfg = SolverConfig::for_nodes(3, 0.0);
        let out = l0lap_iterate(&g, &cfg, &MembershipVector::uniform(3)).unwrap();
        assert_eq!(out.support, vec![0, 1, 2]);
        assert_eq!(out.iterations, 1);
        assert!(out.converged);
    }

    #[test]
    fn disjoint_blocks_do_not_mix() {
        let g = two_triangles();
        let cfg = SolverConfig {
            lambda1: 1.0,
            ..SolverConfig::for_nodes(6, 0.2 / 6.0)
        };
        let v0 = MembershipVector::uniform_on(6, &[0, 1, 2]);
        let out = l0lap_iterate(&g, &cfg, &v0).unwrap();
        assert_eq!(out.support, vec![0, 1, 2]);
        assert!(out.converged);
    }

    #[test]
    fn heavy_penalty_empties() {
        let g = Graph::from_edges(2, &[(0, 1)]).unwrap();
        let cfg = SolverConfig::for_nodes(2, 10.0);
        let out = l0lap_iterate(&g, &cfg, &MembershipVector::uniform(2)).unwrap();
        assert!(out.support.is_empty());
        assert!(!out.converged);
    }

    #[test]
    fn no_edges_is_an_error() {
        let g = Graph::from_edges(3, &[]).unwrap();
        assert_eq!(two_phase_solve(&g, 0.0), Err(Error::NoEdges));
    }

    #[test]
    fn triangle_two_phase() {
        let out = two_phase_solve(&triangle(), 0.0).unwrap();
        assert_eq!(out.support, vec![0, 1, 2]);
    }

    #[test]
    fn f32_two_phase_matches_f64_support() {
        let g = two_triangles();
        let a = two_phase_solve::<f32>(&g, 0.05).unwrap();
        let b = two_phase_solve::<f64>(&g, 0.05).unwrap();
        assert_eq!(a.support, b.support);
    }

    #[test]
    fn invalid_config_rejected() {
        let g = triangle();
        let mut cfg = SolverConfig::for_nodes(3, 0.0);
        cfg.max_iter = 0;
        assert!(l0lap_iterate(&g, &cfg, &MembershipVector::uniform(3)).is_err());
    }
}
