//! Local virtual element spaces: degrees of freedom, projections and the
//! element matrices of the mixed method.

mod element;

pub use element::{cell_quadrature, LocalElement, LocalMatrices};

use std::ops::Range;

use crate::error::Result;
use crate::geometry::GaussLegendre;
use crate::poly::{poly_dim, poly_dim_below, Decomposition, PolyDecomposer};

/// Polynomial degree and quadrature settings shared by all elements.
#[derive(Debug, Clone)]
pub struct Discretization {
    k: usize,
    edge_rule: GaussLegendre,
    bulk_rule: GaussLegendre,
    decomposer: PolyDecomposer,
    /// Decomposition of each unit vector monomial at unit scale.
    unit_decompositions: Vec<Decomposition>,
}

impl Discretization {
    /// Degree `k` with `k + 4` Gauss points on edges and per fan direction.
    pub fn new(k: usize) -> Result<Self> {
        Self::with_quadrature(k, k + 4, k + 4)
    }

    pub fn with_quadrature(k: usize, edge_nodes: usize, bulk_order: usize) -> Result<Self> {
        if edge_nodes == 0 || bulk_order == 0 {
            return Err(crate::Error::InvalidInput("quadrature rules need at least one node".into()));
        }
        let decomposer = PolyDecomposer::new(k)?;
        let n = 2 * poly_dim(k);
        let unit_decompositions = (0..n)
            .map(|s| {
                let mut v = vec![0.0; n];
                v[s] = 1.0;
                decomposer.decompose_coeffs(&v, 1.0)
            })
            .collect();
        Ok(Self {
            k,
            edge_rule: GaussLegendre::new(edge_nodes),
            bulk_rule: GaussLegendre::new(bulk_order),
            decomposer,
            unit_decompositions,
        })
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn edge_rule(&self) -> &GaussLegendre {
        &self.edge_rule
    }

    pub fn bulk_rule(&self) -> &GaussLegendre {
        &self.bulk_rule
    }

    pub fn decomposer(&self) -> &PolyDecomposer {
        &self.decomposer
    }

    pub(crate) fn unit_decomposition(&self, s: usize) -> &Decomposition {
        &self.unit_decompositions[s]
    }

    /// Scalar polynomial space dimension `pi_k`.
    pub fn scalar_dim(&self) -> usize {
        poly_dim(self.k)
    }
}

/// Ordering of the local degrees of freedom: `k + 1` edge moments per edge
/// in loop order, then `pi_k - 1` divergence moments, then `pi_{k-1}`
/// interior moments against `m_perp`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DofLayout {
    pub k: usize,
    pub n_edges: usize,
}

impl DofLayout {
    pub fn new(k: usize, n_edges: usize) -> Self {
        Self { k, n_edges }
    }

    pub fn per_edge(&self) -> usize {
        self.k + 1
    }

    pub fn edge(&self, e: usize) -> Range<usize> {
        e * (self.k + 1)..(e + 1) * (self.k + 1)
    }

    pub fn divergence(&self) -> Range<usize> {
        let start = self.n_edges * (self.k + 1);
        start..start + poly_dim(self.k) - 1
    }

    pub fn interior(&self) -> Range<usize> {
        let start = self.divergence().end;
        start..start + poly_dim_below(self.k)
    }

    pub fn len(&self) -> usize {
        self.interior().end
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_sizes() {
        for k in 0..5 {
            for n in 3..8 {
                let l = DofLayout::new(k, n);
                assert_eq!(l.len(), n * (k + 1) + poly_dim(k) - 1 + poly_dim_below(k));
            }
        }
        let l = DofLayout::new(1, 4);
        assert_eq!(l.edge(2), 4..6);
        assert_eq!(l.divergence(), 8..10);
        assert_eq!(l.interior(), 10..11);
    }
}
