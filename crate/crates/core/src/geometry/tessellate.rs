use std::collections::HashMap;
use std::fmt;

use super::QuadMesh;
use crate::analyzer::PiecewiseField;
use crate::cover::{BranchedCover, Corner, CoverCell, CoverEdge, CoverVertex, Direction, Step};
use crate::{Error, Result};

/// Combinatorial identity of a tessellation sample. Samples with equal keys
/// are welded into one mesh vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SampleKey {
    Vertex(CoverVertex),
    /// Sample `index` (1..k) along a cover edge, in increasing base coordinate.
    Edge(CoverEdge, usize),
    Interior(CoverCell, usize, usize),
}

impl fmt::Display for SampleKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SampleKey::Vertex(v) => write!(f, "vertex {:?} label {}", v.vertex, v.label),
            SampleKey::Edge(e, i) => write!(f, "edge {:?}{} sheet {} sample {i}", e.cell, e.direction, e.sheet),
            SampleKey::Interior(c, a, b) => write!(f, "cell {:?} sheet {} sample ({a}, {b})", c.cell, c.sheet),
        }
    }
}

/// Displaces one corner sample before welding; used to exercise the weld check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeldFault {
    pub cell: CoverCell,
    pub delta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TessellateOptions {
    /// Samples per cell edge.
    pub density: usize,
    /// Largest tolerated disagreement between welded samples.
    pub weld_tolerance: f64,
    pub fault: Option<WeldFault>,
}

impl TessellateOptions {
    pub fn new(density: usize) -> Self {
        Self {
            density,
            weld_tolerance: 1e-9,
            fault: None,
        }
    }
}

/// Samples `field` on a `(k+1) x (k+1)` grid in every cover cell and welds the
/// samples by cover vertex, cover edge and cell identity.
pub fn tessellate<F: PiecewiseField<3>>(cover: &BranchedCover, field: &F, density: usize) -> Result<QuadMesh> {
    tessellate_with(cover, field, &TessellateOptions::new(density))
}

pub fn tessellate_with<F: PiecewiseField<3>>(
    cover: &BranchedCover,
    field: &F,
    opts: &TessellateOptions,
) -> Result<QuadMesh> {
    let k = opts.density;
    if k == 0 {
        return Err(Error::Argument("tessellation density must be at least 1".into()));
    }
    let mut ids: HashMap<SampleKey, usize> = HashMap::new();
    let mut mesh = QuadMesh::default();
    let mut local = vec![0usize; (k + 1) * (k + 1)];
    for cell in cover.cover_cells() {
        for b in 0..=k {
            for a in 0..=k {
                let key = sample_key(cover, cell, a, b, k);
                let mut p = field.eval(cell, [a as f64 / k as f64, b as f64 / k as f64]);
                if let Some(fault) = opts.fault {
                    if fault.cell == cell && a == 0 && b == 0 {
                        p[0] += fault.delta;
                    }
                }
                let id = match ids.get(&key) {
                    Some(&id) => {
                        let q = mesh.positions[id];
                        let gap = (0..3).map(|i| (p[i] - q[i]).abs()).fold(0.0, f64::max);
                        if gap.is_nan() || gap > opts.weld_tolerance {
                            return Err(Error::Weld {
                                key: key.to_string(),
                                discrepancy: gap,
                            });
                        }
                        id
                    }
                    None => {
                        mesh.positions.push(p);
                        ids.insert(key, mesh.positions.len() - 1);
                        mesh.positions.len() - 1
                    }
                };
                local[b * (k + 1) + a] = id;
            }
        }
        for b in 0..k {
            for a in 0..k {
                let at = |a: usize, b: usize| local[b * (k + 1) + a];
                mesh.faces
                    .push([at(a, b), at(a + 1, b), at(a + 1, b + 1), at(a, b + 1)]);
                mesh.face_groups.push(cell.sheet);
            }
        }
    }
    Ok(mesh)
}

fn sample_key(cover: &BranchedCover, cell: CoverCell, a: usize, b: usize, k: usize) -> SampleKey {
    let edge = |c: CoverCell, direction| CoverEdge {
        cell: c.cell,
        sheet: c.sheet,
        direction,
    };
    match (a == 0 || a == k, b == 0 || b == k) {
        (true, true) => {
            let corner = match (a == 0, b == 0) {
                (true, true) => Corner::LowerLeft,
                (false, true) => Corner::LowerRight,
                (false, false) => Corner::UpperRight,
                (true, false) => Corner::UpperLeft,
            };
            SampleKey::Vertex(cover.corner_vertex(cell, corner))
        }
        (true, false) => {
            let owner = if a == k {
                cell
            } else {
                cover.step_cell(cell, Step::MinusX)
            };
            SampleKey::Edge(edge(owner, Direction::PlusX), b)
        }
        (false, true) => {
            let owner = if b == k {
                cell
            } else {
                cover.step_cell(cell, Step::MinusY)
            };
            SampleKey::Edge(edge(owner, Direction::PlusY), a)
        }
        (false, false) => SampleKey::Interior(cell, a, b),
    }
}
