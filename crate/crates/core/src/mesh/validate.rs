//! Mesh quality report.

use super::Mesh;
use crate::error::Result;
use crate::geometry::{element_measures, is_star_point, GaussLegendre};

/// Size and shape indicators of a mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshQualityReport {
    /// Mean cell diameter.
    pub h: f64,
    /// Smallest ratio of edge length to the diameter of an incident cell.
    pub min_edge_ratio: f64,
    /// Whether each cell is star-shaped with respect to its centroid.
    pub star_ok: Vec<bool>,
    pub cell_count: usize,
    pub edge_count: usize,
    pub curved_edge_count: usize,
    /// Sum of the cell areas.
    pub total_area: f64,
}

/// Checks the topology and computes the quality report. Never modifies the mesh.
pub fn validate(mesh: &Mesh) -> Result<MeshQualityReport> {
    mesh.check_topology()?;
    let rule = GaussLegendre::new(10);
    let lengths: Vec<f64> = mesh
        .edges()
        .iter()
        .map(|e| e.geom.length(&rule))
        .collect::<Result<_>>()?;
    let mut h_sum = 0.0;
    let mut total_area = 0.0;
    let mut min_edge_ratio = f64::INFINITY;
    let mut star_ok = Vec::with_capacity(mesh.num_cells());
    for c in 0..mesh.num_cells() {
        let boundary = mesh.cell_boundary(c);
        let m = element_measures(&boundary, &rule)?;
        h_sum += m.diameter;
        total_area += m.area;
        for u in &mesh.cells()[c].edges {
            min_edge_ratio = min_edge_ratio.min(lengths[u.edge] / m.diameter);
        }
        star_ok.push(is_star_point(&boundary, m.centroid, &rule)?);
    }
    Ok(MeshQualityReport {
        h: h_sum / mesh.num_cells().max(1) as f64,
        min_edge_ratio,
        star_ok,
        cell_count: mesh.num_cells(),
        edge_count: mesh.num_edges(),
        curved_edge_count: mesh.edges().iter().filter(|e| e.geom.is_curved()).count(),
        total_area,
    })
}
