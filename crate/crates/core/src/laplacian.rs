//! Matrix-free products with the normalized adjacency Q = D^{-1/2} A D^{-1/2}.

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scalar::Scalar;

/// Q bound to a graph, with 1/sqrt(d_i) cached. Rows and columns of
/// zero-degree nodes are zero.
#[derive(Debug, Clone)]
pub struct NormalizedAdjacency<'g, T> {
    graph: &'g Graph,
    inv_sqrt_deg: Vec<T>,
}

impl<'g, T: Scalar> NormalizedAdjacency<'g, T> {
    pub fn new(graph: &'g Graph) -> Self {
        let inv_sqrt_deg = (0..graph.n())
            .map(|i| match graph.degree(i) {
                0 => T::zero(),
                d => T::one() / T::of_usize(d).sqrt(),
            })
            .collect();
        NormalizedAdjacency {
            graph,
            inv_sqrt_deg,
        }
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    pub fn dim(&self) -> usize {
        self.inv_sqrt_deg.len()
    }

    /// `out = Q x`. Lengths are not checked.
    pub fn apply_into(&self, x: &[T], out: &mut [T]) {
        let s = &self.inv_sqrt_deg;
        for (i, o) in out.iter_mut().enumerate() {
            let acc: T = self.graph.neighbors(i).iter().map(|&j| x[j] * s[j]).sum();
            *o = acc * s[i];
        }
    }

    pub fn apply(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                got: x.len(),
            });
        }
        let mut out = vec![T::zero(); x.len()];
        self.apply_into(x, &mut out);
        Ok(out)
    }
}

/// y = Q x for the graph's normalized adjacency.
pub fn laplacian_apply<T: Scalar>(g: &Graph, x: &[T]) -> Result<Vec<T>> {
    NormalizedAdjacency::new(g).apply(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_fixed_point() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let x = vec![1.0 / 3f64.sqrt(); 3];
        let y = laplacian_apply(&g, &x).unwrap();
        for (a, b) in x.iter().zip(&y) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_in_zero_out() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(laplacian_apply(&g, &[0.0f32; 4]).unwrap(), vec![0.0; 4]);
    }

    #[test]
    fn isolated_rows_vanish() {
        let g = Graph::from_edges(3, &[(0, 1)]).unwrap();
        let y = laplacian_apply(&g, &[1.0, 2.0, 5.0]).unwrap();
        assert_eq!(y, vec![2.0, 1.0, 0.0]);
    }

    #[test]
    fn length_mismatch() {
        let g = Graph::from_edges(3, &[(0, 1)]).unwrap();
        assert_eq!(
            laplacian_apply(&g, &[1.0, 2.0]),
            Err(Error::Dimension {
                expected: 3,
                got: 2
            })
        );
    }
}
