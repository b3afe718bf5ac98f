use std::collections::{BTreeMap, BTreeSet};

use super::{TriMesh, DIRICHLET};
use crate::error::{Error, Result};

/// Nodal view of the boundary: which nodes carry the homogeneous condition
/// and which carry transmission data, plus an outward unit normal at every
/// transmission node.
#[derive(Clone, Debug, Default)]
pub struct BoundaryPartition {
    dirichlet_nodes: Vec<usize>,
    transmission_nodes: BTreeMap<u8, Vec<usize>>,
    node_normals: BTreeMap<usize, [f64; 2]>,
}

impl BoundaryPartition {
    pub fn dirichlet_nodes(&self) -> &[usize] {
        &self.dirichlet_nodes
    }

    pub fn transmission_nodes(&self) -> &BTreeMap<u8, Vec<usize>> {
        &self.transmission_nodes
    }

    /// All transmission nodes with their normals, in node order.
    pub fn transmission(&self) -> impl Iterator<Item = (usize, [f64; 2])> + '_ {
        self.node_normals.iter().map(|(&n, &v)| (n, v))
    }

    pub fn normal(&self, node: usize) -> Option<[f64; 2]> {
        self.node_normals.get(&node).copied()
    }

    pub fn has_transmission(&self) -> bool {
        !self.node_normals.is_empty()
    }
}

/// Splits boundary nodes into Dirichlet and transmission sets and computes a
/// nodal normal for each transmission node as the length-weighted average of
/// the outward normals of its adjacent transmission edges.
///
/// A node touching any Dirichlet edge is Dirichlet. A node shared by two
/// transmission segments is filed under the lower label.
pub fn compute_boundary_normals(mesh: &TriMesh) -> Result<BoundaryPartition> {
    let verts = mesh.vertices();
    let mut dirichlet = BTreeSet::new();
    let mut labels: BTreeMap<usize, u8> = BTreeMap::new();
    let mut sums: BTreeMap<usize, [f64; 2]> = BTreeMap::new();
    let mut lengths: BTreeMap<usize, f64> = BTreeMap::new();

    for (i, e) in mesh.boundary_edges().iter().enumerate() {
        if e.label == DIRICHLET {
            dirichlet.insert(e.a);
            dirichlet.insert(e.b);
            continue;
        }
        let (t, k) = mesh.boundary_edge_owner(i);
        let opposite = verts[mesh.triangles()[t][k]];
        let (pa, pb) = (verts[e.a], verts[e.b]);
        let tangent = [pb[0] - pa[0], pb[1] - pa[1]];
        // Unnormalised normal: its length equals the edge length.
        let mut n = [tangent[1], -tangent[0]];
        if (opposite[0] - pa[0]) * n[0] + (opposite[1] - pa[1]) * n[1] > 0.0 {
            n = [-n[0], -n[1]];
        }
        let len = tangent[0].hypot(tangent[1]);
        for v in [e.a, e.b] {
            let s = sums.entry(v).or_insert([0.0; 2]);
            s[0] += n[0];
            s[1] += n[1];
            *lengths.entry(v).or_insert(0.0) += len;
            labels
                .entry(v)
                .and_modify(|l| *l = (*l).min(e.label))
                .or_insert(e.label);
        }
    }

    let mut partition = BoundaryPartition {
        dirichlet_nodes: dirichlet.iter().copied().collect(),
        ..Default::default()
    };
    for (v, s) in sums {
        if dirichlet.contains(&v) {
            continue;
        }
        let norm = s[0].hypot(s[1]);
        if !(norm > 1e-12 * lengths[&v]) {
            return Err(Error::Geometry(format!(
                "adjacent transmission edges at node {v} have cancelling normals"
            )));
        }
        partition.node_normals.insert(v, [s[0] / norm, s[1] / norm]);
        partition
            .transmission_nodes
            .entry(labels[&v])
            .or_default()
            .push(v);
    }
    Ok(partition)
}
