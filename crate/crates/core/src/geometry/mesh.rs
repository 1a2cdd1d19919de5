use std::collections::HashMap;

use serde::Serialize;

/// A quad mesh; faces are counterclockwise seen from outside.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct QuadMesh {
    pub positions: Vec<[f64; 3]>,
    pub faces: Vec<[usize; 4]>,
    /// Originating sheet of each face, or empty.
    pub face_groups: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MeshReport {
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub euler_characteristic: i64,
    /// `1 - chi / 2`, present when the mesh is closed and oriented.
    pub genus: Option<i64>,
    /// Every edge borders exactly two faces.
    pub closed: bool,
    /// No directed edge is used twice.
    pub oriented: bool,
}

pub fn mesh_report(m: &QuadMesh) -> MeshReport {
    let mut undirected: HashMap<(usize, usize), usize> = HashMap::new();
    let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
    for f in &m.faces {
        for k in 0..4 {
            let (a, b) = (f[k], f[(k + 1) % 4]);
            *undirected.entry((a.min(b), a.max(b))).or_default() += 1;
            *directed.entry((a, b)).or_default() += 1;
        }
    }
    let closed = undirected.values().all(|&c| c == 2);
    let oriented = directed.values().all(|&c| c == 1);
    let chi = m.positions.len() as i64 - undirected.len() as i64 + m.faces.len() as i64;
    MeshReport {
        vertices: m.positions.len(),
        edges: undirected.len(),
        faces: m.faces.len(),
        euler_characteristic: chi,
        genus: (closed && oriented).then_some(1 - chi / 2),
        closed,
        oriented,
    }
}
