//! Set criteria and the degree-weighted membership embedding.
//!
//! `psi` is the size-penalized internal-degree fraction W(S)/V(S) - eta|S|.
//! It equals `u' Q u - eta * |support(u)|` for the membership vector `u` of
//! S, where Q = D^{-1/2} A D^{-1/2} (see [`crate::laplacian`]).

use crate::error::{Error, Result};
use crate::graph::{set_stats, Graph, NodeSet};
use crate::scalar::{norm2, Scalar};

/// Tightness criterion W(S)/V(S) - eta * |S|.
pub fn psi(g: &Graph, s: &[usize], eta: f64) -> Result<f64> {
    let stats = set_stats(g, s)?;
    psi_of(&stats, eta)
}

pub fn psi_of(stats: &NodeSet, eta: f64) -> Result<f64> {
    if stats.v == 0 {
        return Err(Error::UndefinedCriterion);
    }
    Ok(stats.w as f64 / stats.v as f64 - eta * stats.len() as f64)
}

/// Within-density share p_W / (p_W + p_B) used to rank candidates.
///
/// Returns `f64::NEG_INFINITY` for sets of fewer than two nodes and when
/// both densities vanish. An empty complement contributes p_B = 0.
pub fn phi(g: &Graph, s: &[usize]) -> Result<f64> {
    let stats = set_stats(g, s)?;
    Ok(phi_of(&stats, g.n()))
}

pub fn phi_of(stats: &NodeSet, n: usize) -> f64 {
    let size = stats.len();
    if size < 2 {
        return f64::NEG_INFINITY;
    }
    let s = size as f64;
    let p_within = stats.w as f64 / (s * (s - 1.0));
    let outside = n - size;
    let p_between = if outside == 0 {
        0.0
    } else {
        stats.b as f64 / (s * outside as f64)
    };
    let total = p_within + p_between;
    if total == 0.0 {
        f64::NEG_INFINITY
    } else {
        p_within / total
    }
}

/// Dense unit-norm vector over nodes whose support is a candidate community.
///
/// The all-zero vector is allowed as the "no candidate" sentinel.
#[derive(Debug, Clone, PartialEq)]
pub struct MembershipVector<T> {
    values: Vec<T>,
}

impl<T: Scalar> MembershipVector<T> {
    /// Wraps `values`, rescaling to unit norm. All-zero input stays all-zero.
    pub fn normalized(mut values: Vec<T>) -> Self {
        let norm = norm2(&values);
        if norm > T::zero() {
            values.iter_mut().for_each(|x| *x = *x / norm);
        }
        MembershipVector { values }
    }

    pub fn zeros(n: usize) -> Self {
        MembershipVector {
            values: vec![T::zero(); n],
        }
    }

    /// The constant vector 1/sqrt(n).
    pub fn uniform(n: usize) -> Self {
        let x = T::one() / T::of_usize(n).sqrt();
        MembershipVector { values: vec![x; n] }
    }

    /// Indicator of `s` scaled to unit norm.
    pub fn uniform_on(n: usize, s: &[usize]) -> Self {
        let mut values = vec![T::zero(); n];
        for &i in s {
            values[i] = T::one();
        }
        Self::normalized(values)
    }

    #[inline]
    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// True for the zero-length vector (not for the all-zero one).
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|x| x.is_zero())
    }

    pub fn norm(&self) -> T {
        norm2(&self.values)
    }

    /// Indices of nonzero entries, ascending.
    pub fn support(&self) -> Vec<usize> {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(|(i, _)| i)
            .collect()
    }

    pub fn support_size(&self) -> usize {
        self.values.iter().filter(|x| !x.is_zero()).count()
    }
}

/// Degree-weighted membership vector: sqrt(d_i / V(S)) on S, zero elsewhere.
pub fn membership_vector<T: Scalar>(g: &Graph, s: &[usize]) -> Result<MembershipVector<T>> {
    let stats = set_stats(g, s)?;
    if stats.v == 0 {
        return Err(Error::UndefinedCriterion);
    }
    if let Some(&i) = stats.members.iter().find(|&&i| g.degree(i) == 0) {
        return Err(Error::ZeroDegree(i));
    }
    let total = T::of_usize(stats.v as usize);
    let mut values = vec![T::zero(); g.n()];
    for &i in &stats.members {
        values[i] = (T::of_usize(g.degree(i)) / total).sqrt();
    }
    Ok(MembershipVector { values })
}

/// Re-weights the support of `x` by node degree, writing into `out`.
///
/// Zero-degree nodes in the support get weight zero. Returns false (and
/// leaves `out` all-zero) when the support has no incident edges.
pub(crate) fn reproject_support<T: Scalar>(g: &Graph, x: &[T], out: &mut [T]) -> bool {
    let mut total = 0usize;
    for (i, xi) in x.iter().enumerate() {
        if !xi.is_zero() {
            total += g.degree(i);
        }
    }
    out.iter_mut().for_each(|o| *o = T::zero());
    if total == 0 {
        return false;
    }
    let total = T::of_usize(total);
    for (i, xi) in x.iter().enumerate() {
        if !xi.is_zero() {
            out[i] = (T::of_usize(g.degree(i)) / total).sqrt();
        }
    }
    true
}
