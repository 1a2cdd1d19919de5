//! Fraeijs de Veubeke–Sander C1 quadrilateral.
//!
//! A strictly convex quad is split by its diagonals into four triangles, each
//! carrying a cubic in Bernstein–Bézier form (40 coefficients). The element
//! is C1 across the four interior half-diagonals and is determined by 16
//! degrees of freedom: value and gradient at each corner and the outward
//! normal derivative at each edge midpoint.
//!
//! On the branched grid every cover cell is a unit square in base-chart
//! coordinates, so one factorization of the element system serves all cells.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};

use crate::analyzer::PiecewiseField;
use crate::cover::{BranchedCover, Corner, CoverCell, CoverEdge, CoverVertex, Direction, Step};
use crate::geometry::{mean, torus_embed, torus_embed_gradient, EmbeddingConfig};
use crate::{Error, Result};

/// Cubic Bernstein multi-indices `(i, j, k)`, `i` descending then `j` descending.
const CUBIC: [(usize, usize, usize); 10] = [
    (3, 0, 0),
    (2, 1, 0),
    (2, 0, 1),
    (1, 2, 0),
    (1, 1, 1),
    (1, 0, 2),
    (0, 3, 0),
    (0, 2, 1),
    (0, 1, 2),
    (0, 0, 3),
];

/// Position of `(i, j, degree - i - j)` in a degree-`degree` net ordered like [`CUBIC`].
fn bb_index(degree: usize, i: usize, j: usize) -> usize {
    (degree - i) * (degree - i + 1) / 2 + (degree - i - j)
}

/// Degrees of freedom of one scalar field on one quad. Corners are
/// counterclockwise; edge `i` runs from corner `i` to corner `i + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FvsDofs {
    pub values: [f64; 4],
    pub gradients: [[f64; 2]; 4],
    /// Outward normal derivative at each edge midpoint.
    pub normal_derivatives: [f64; 4],
}

impl FvsDofs {
    fn to_vector(self) -> DVector<f64> {
        let mut v = Vec::with_capacity(16);
        for i in 0..4 {
            v.extend([self.values[i], self.gradients[i][0], self.gradients[i][1]]);
        }
        v.extend(self.normal_derivatives);
        DVector::from_vec(v)
    }

    /// Samples a smooth function given as value and gradient.
    pub fn sample(corners: &[[f64; 2]; 4], f: impl Fn([f64; 2]) -> (f64, [f64; 2])) -> Self {
        let mut dofs = Self::default();
        for i in 0..4 {
            let (v, g) = f(corners[i]);
            dofs.values[i] = v;
            dofs.gradients[i] = g;
            let (m, n) = edge_midpoint_normal(corners, i);
            let (_, g) = f(m);
            dofs.normal_derivatives[i] = g[0] * n[0] + g[1] * n[1];
        }
        dofs
    }
}

fn edge_midpoint_normal(corners: &[[f64; 2]; 4], i: usize) -> ([f64; 2], [f64; 2]) {
    let (a, b) = (corners[i], corners[(i + 1) % 4]);
    let e = [b[0] - a[0], b[1] - a[1]];
    let len = e[0].hypot(e[1]);
    ([(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0], [e[1] / len, -e[0] / len])
}

/// One sub-triangle `(P_i, P_{i+1}, C)` with its barycentric map.
#[derive(Debug, Clone, Copy, PartialEq)]
struct SubTriangle {
    origin: [f64; 2],
    /// Gradients of the three barycentric coordinates.
    grads: [[f64; 2]; 3],
}

impl SubTriangle {
    fn new(v0: [f64; 2], v1: [f64; 2], v2: [f64; 2]) -> Self {
        let (a, b) = ([v1[0] - v0[0], v1[1] - v0[1]], [v2[0] - v0[0], v2[1] - v0[1]]);
        let det = a[0] * b[1] - a[1] * b[0];
        let g1 = [b[1] / det, -b[0] / det];
        let g2 = [-a[1] / det, a[0] / det];
        Self {
            origin: v0,
            grads: [[-g1[0] - g2[0], -g1[1] - g2[1]], g1, g2],
        }
    }

    fn barycentric(&self, p: [f64; 2]) -> [f64; 3] {
        let d = [p[0] - self.origin[0], p[1] - self.origin[1]];
        let l1 = self.grads[1][0] * d[0] + self.grads[1][1] * d[1];
        let l2 = self.grads[2][0] * d[0] + self.grads[2][1] * d[1];
        [1.0 - l1 - l2, l1, l2]
    }

    /// Value and gradient of each cubic Bernstein polynomial at `p`.
    fn bernstein_rows(&self, p: [f64; 2]) -> ([f64; 10], [[f64; 10]; 2]) {
        let l = self.barycentric(p);
        let fact = [1.0, 1.0, 2.0, 6.0];
        let mut val = [0.0; 10];
        let mut grad = [[0.0; 10]; 2];
        for (idx, &(i, j, k)) in CUBIC.iter().enumerate() {
            let c = 6.0 / (fact[i] * fact[j] * fact[k]);
            let e = [i, j, k];
            val[idx] = c * l[0].powi(i as i32) * l[1].powi(j as i32) * l[2].powi(k as i32);
            for m in 0..3 {
                if e[m] == 0 {
                    continue;
                }
                let mut term = c * e[m] as f64;
                for q in 0..3 {
                    let pw = if q == m { e[q] - 1 } else { e[q] };
                    term *= l[q].powi(pw as i32);
                }
                grad[0][idx] += term * self.grads[m][0];
                grad[1][idx] += term * self.grads[m][1];
            }
        }
        (val, grad)
    }

    /// De Casteljau evaluation: value and gradient.
    fn eval(&self, coefs: &[f64; 10], p: [f64; 2]) -> (f64, [f64; 2]) {
        let l = self.barycentric(p);
        let mut net = coefs.to_vec();
        for degree in (1..=3).rev() {
            if degree == 1 {
                let grad = std::array::from_fn(|axis| 3.0 * (0..3).map(|m| net[m] * self.grads[m][axis]).sum::<f64>());
                let value = l[0] * net[0] + l[1] * net[1] + l[2] * net[2];
                return (value, grad);
            }
            let mut next = vec![0.0; degree * (degree + 1) / 2];
            for i in 0..degree {
                for j in 0..degree - i {
                    next[bb_index(degree - 1, i, j)] = l[0] * net[bb_index(degree, i + 1, j)]
                        + l[1] * net[bb_index(degree, i, j + 1)]
                        + l[2] * net[bb_index(degree, i, j)];
                }
            }
            net = next;
        }
        unreachable!("cubic reduces to a linear net")
    }
}

/// Geometry of a quad split by its diagonals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FvsQuad {
    pub corners: [[f64; 2]; 4],
    pub center: [f64; 2],
    triangles: [SubTriangle; 4],
}

impl FvsQuad {
    /// Requires counterclockwise corners of a strictly convex quad.
    pub fn new(corners: [[f64; 2]; 4]) -> Result<Self> {
        let sub = |a: [f64; 2], b: [f64; 2]| [a[0] - b[0], a[1] - b[1]];
        let cross = |a: [f64; 2], b: [f64; 2]| a[0] * b[1] - a[1] * b[0];
        let scale = corners
            .iter()
            .flat_map(|c| c.iter())
            .fold(0.0f64, |m, v| m.max(v.abs()))
            .max(1.0);
        for i in 0..4 {
            let e0 = sub(corners[(i + 1) % 4], corners[i]);
            let e1 = sub(corners[(i + 2) % 4], corners[(i + 1) % 4]);
            if cross(e0, e1) <= 1e-12 * scale * scale {
                return Err(Error::Geometry(format!(
                    "quad {corners:?} is not strictly convex and counterclockwise at corner {}",
                    (i + 1) % 4
                )));
            }
        }
        // P0 + s (P2 - P0) = P1 + t (P3 - P1)
        let d0 = sub(corners[2], corners[0]);
        let d1 = sub(corners[3], corners[1]);
        let w = sub(corners[1], corners[0]);
        let det = cross(d0, d1);
        let s = cross(w, d1) / det;
        let t = cross(w, d0) / det;
        if !(s > 0.0 && s < 1.0 && t > 0.0 && t < 1.0) {
            return Err(Error::Geometry("diagonals do not cross inside the quad".into()));
        }
        let center = [corners[0][0] + s * d0[0], corners[0][1] + s * d0[1]];
        let triangles = std::array::from_fn(|i| SubTriangle::new(corners[i], corners[(i + 1) % 4], center));
        Ok(Self {
            corners,
            center,
            triangles,
        })
    }

    pub fn unit_square() -> Self {
        Self::new([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).expect("unit square is convex")
    }

    /// Sub-triangle containing `p` (largest minimum barycentric coordinate)
    /// and that coordinate.
    fn locate(&self, p: [f64; 2]) -> (usize, f64) {
        (0..4)
            .map(|i| {
                let l = self.triangles[i].barycentric(p);
                (i, l[0].min(l[1]).min(l[2]))
            })
            .fold(
                (0, f64::NEG_INFINITY),
                |best, cur| if cur.1 > best.1 { cur } else { best },
            )
    }
}

/// A solved element: four cubic patches in Bernstein–Bézier form.
#[derive(Debug, Clone, PartialEq)]
pub struct FvsElement {
    pub quad: FvsQuad,
    /// Patch `i` lives on the triangle `(P_i, P_{i+1}, C)` with barycentric
    /// coordinates in that vertex order.
    pub patches: [[f64; 10]; 4],
    /// Max residual of the element conditions.
    pub residual: f64,
}

/// Least-squares solution operator of the element system for a fixed quad.
#[derive(Debug, Clone)]
pub struct FvsSolver {
    quad: FvsQuad,
    system: DMatrix<f64>,
    /// Maps the 16 DOFs to the 40 coefficients.
    dof_map: DMatrix<f64>,
}

const DOF_ROWS: usize = 16;
const JUNCTION_SAMPLES: [f64; 4] = [0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0];

impl FvsSolver {
    pub fn new(quad: FvsQuad) -> Result<Self> {
        let rows = DOF_ROWS + 4 * JUNCTION_SAMPLES.len() * 3;
        let mut a = DMatrix::<f64>::zeros(rows, 40);
        let put = |a: &mut DMatrix<f64>, row: usize, patch: usize, vals: &[f64; 10], sign: f64| {
            for (k, v) in vals.iter().enumerate() {
                a[(row, patch * 10 + k)] += sign * v;
            }
        };
        for i in 0..4 {
            let (val, grad) = quad.triangles[i].bernstein_rows(quad.corners[i]);
            put(&mut a, 3 * i, i, &val, 1.0);
            put(&mut a, 3 * i + 1, i, &grad[0], 1.0);
            put(&mut a, 3 * i + 2, i, &grad[1], 1.0);
            let (m, n) = edge_midpoint_normal(&quad.corners, i);
            let (_, grad) = quad.triangles[i].bernstein_rows(m);
            let dn: [f64; 10] = std::array::from_fn(|k| n[0] * grad[0][k] + n[1] * grad[1][k]);
            put(&mut a, 12 + i, i, &dn, 1.0);
        }
        // C1 across the half-diagonal from C to P_{i+1}, shared by patches i and i+1
        let mut row = DOF_ROWS;
        for i in 0..4 {
            let j = (i + 1) % 4;
            let tip = quad.corners[j];
            for &t in &JUNCTION_SAMPLES {
                let q = [
                    quad.center[0] + t * (tip[0] - quad.center[0]),
                    quad.center[1] + t * (tip[1] - quad.center[1]),
                ];
                let (vi, gi) = quad.triangles[i].bernstein_rows(q);
                let (vj, gj) = quad.triangles[j].bernstein_rows(q);
                for (lhs, rhs) in [(&vi, &vj), (&gi[0], &gj[0]), (&gi[1], &gj[1])] {
                    put(&mut a, row, i, lhs, 1.0);
                    put(&mut a, row, j, rhs, -1.0);
                    row += 1;
                }
            }
        }
        let svd = a.clone().svd(true, true);
        let (smax, smin) = svd
            .singular_values
            .iter()
            .fold((0.0f64, f64::INFINITY), |(hi, lo), &s| (hi.max(s), lo.min(s)));
        let ratio = smin / smax;
        if ratio.is_nan() || ratio <= 1e-10 {
            return Err(Error::Unisolvence(ratio));
        }
        let pinv = svd
            .pseudo_inverse(smax * 1e-12)
            .map_err(|e| Error::Geometry(e.to_string()))?;
        let dof_map = pinv.columns(0, DOF_ROWS).into_owned();
        Ok(Self {
            quad,
            system: a,
            dof_map,
        })
    }

    pub fn quad(&self) -> &FvsQuad {
        &self.quad
    }

    pub fn solve(&self, dofs: &FvsDofs) -> FvsElement {
        let d = dofs.to_vector();
        let x = &self.dof_map * &d;
        let mut rhs = DVector::<f64>::zeros(self.system.nrows());
        rhs.rows_mut(0, DOF_ROWS).copy_from(&d);
        let residual = (&self.system * &x - rhs).amax();
        let patches = std::array::from_fn(|p| std::array::from_fn(|k| x[p * 10 + k]));
        FvsElement {
            quad: self.quad,
            patches,
            residual,
        }
    }
}

/// Solves the element for one quad and one set of DOFs.
pub fn fvs_solve_element(corners: [[f64; 2]; 4], dofs: &FvsDofs) -> Result<FvsElement> {
    Ok(FvsSolver::new(FvsQuad::new(corners)?)?.solve(dofs))
}

impl FvsElement {
    /// Value and gradient at a point of the quad.
    pub fn eval(&self, p: [f64; 2]) -> Result<(f64, [f64; 2])> {
        let (patch, inside) = self.quad.locate(p);
        if inside < -1e-12 {
            return Err(Error::Domain(format!("{p:?} lies outside the quad")));
        }
        Ok(self.eval_patch(patch, p))
    }

    /// Evaluates patch `i` at any point, continuing the cubic outside its triangle.
    pub fn eval_patch(&self, i: usize, p: [f64; 2]) -> (f64, [f64; 2]) {
        self.quad.triangles[i].eval(&self.patches[i], p)
    }

    /// Patch whose triangle contains `p`.
    pub fn patch_at(&self, p: [f64; 2]) -> usize {
        self.quad.locate(p).0
    }

    /// Reads the 16 DOFs back off the patches.
    pub fn extract_dofs(&self) -> FvsDofs {
        let mut dofs = FvsDofs::default();
        for i in 0..4 {
            let (v, g) = self.eval_patch(i, self.quad.corners[i]);
            dofs.values[i] = v;
            dofs.gradients[i] = g;
            let (m, n) = edge_midpoint_normal(&self.quad.corners, i);
            let (_, g) = self.eval_patch(i, m);
            dofs.normal_derivatives[i] = g[0] * n[0] + g[1] * n[1];
        }
        dofs
    }

    /// Largest value and gradient jump across the four half-diagonals at
    /// `samples` interior points each.
    pub fn junction_discrepancy(&self, samples: usize) -> (f64, f64) {
        let (mut dv, mut dg) = (0.0f64, 0.0f64);
        for i in 0..4 {
            let j = (i + 1) % 4;
            let tip = self.quad.corners[j];
            let c = self.quad.center;
            for s in 0..samples {
                let t = (s as f64 + 0.5) / samples as f64;
                let q = [c[0] + t * (tip[0] - c[0]), c[1] + t * (tip[1] - c[1])];
                let (vi, gi) = self.eval_patch(i, q);
                let (vj, gj) = self.eval_patch(j, q);
                dv = dv.max((vi - vj).abs());
                dg = dg.max((gi[0] - gj[0]).abs()).max((gi[1] - gj[1]).abs());
            }
        }
        (dv, dg)
    }
}

/// Value and base-chart gradient, per coordinate.
type Jet = ([f64; 3], [[f64; 3]; 2]);

/// A C1 surface on the cover: one FVS element per cover cell and coordinate.
#[derive(Debug, Clone)]
pub struct FvsSurface {
    cover: BranchedCover,
    elements: Vec<[FvsElement; 3]>,
}

/// Fills the global DOF table from the per-sheet tori and solves one element
/// per cover cell and coordinate.
///
/// Vertex DOFs use the sheet of the vertex's upper-right cell; at a
/// ramification vertex the values and gradients of all identified sheets are
/// averaged. Edge DOFs store the derivative along `+x` (vertical edges) or
/// `+y` (horizontal edges) at the midpoint. Sheet offsets are translations,
/// so derivatives need no sheet.
pub fn build_fvs_surface(cover: &BranchedCover, cfg: &EmbeddingConfig) -> Result<FvsSurface> {
    cfg.validate(cover)?;
    let grid = *cover.grid();
    let mut vertex_dofs: HashMap<CoverVertex, Jet> = HashMap::new();
    for v in grid.cells() {
        let p = [v.0 as f64, v.1 as f64];
        let grad = torus_embed_gradient(&grid, cfg, p);
        for cycle in cover.vertex_monodromy(v).cycles() {
            let value = mean(cycle.iter().map(|&s| torus_embed(&grid, cfg, s, p)));
            let key = CoverVertex {
                vertex: v,
                label: cycle[0],
                index: cycle.len(),
            };
            vertex_dofs.insert(key, (value, grad));
        }
    }
    let edge_dof = |e: CoverEdge| -> [f64; 3] {
        let (i, j) = (e.cell.0 as f64, e.cell.1 as f64);
        let (mid, axis) = match e.direction {
            Direction::PlusX => ([i + 1.0, j + 0.5], 0),
            Direction::PlusY => ([i + 0.5, j + 1.0], 1),
        };
        torus_embed_gradient(&grid, cfg, mid)[axis]
    };

    let solver = FvsSolver::new(FvsQuad::unit_square())?;
    let mut elements = Vec::with_capacity(cover.sheets() * grid.face_count());
    for cell in cover.cover_cells() {
        let jets: [Jet; 4] = std::array::from_fn(|k| vertex_dofs[&cover.corner_vertex(cell, Corner::ALL[k])]);
        let owner = |step| cover.step_cell(cell, step);
        let edge = |c: CoverCell, direction| CoverEdge {
            cell: c.cell,
            sheet: c.sheet,
            direction,
        };
        // outward derivative per edge: bottom, right, top, left
        let bottom = edge_dof(edge(owner(Step::MinusY), Direction::PlusY));
        let right = edge_dof(edge(cell, Direction::PlusX));
        let top = edge_dof(edge(cell, Direction::PlusY));
        let left = edge_dof(edge(owner(Step::MinusX), Direction::PlusX));
        let elems = std::array::from_fn(|coord| {
            let dofs = FvsDofs {
                values: std::array::from_fn(|k| jets[k].0[coord]),
                gradients: std::array::from_fn(|k| [jets[k].1[0][coord], jets[k].1[1][coord]]),
                normal_derivatives: [-bottom[coord], right[coord], top[coord], -left[coord]],
            };
            solver.solve(&dofs)
        });
        elements.push(elems);
    }
    Ok(FvsSurface {
        cover: cover.clone(),
        elements,
    })
}

impl FvsSurface {
    pub fn cover(&self) -> &BranchedCover {
        &self.cover
    }

    pub fn elements(&self, cell: CoverCell) -> &[FvsElement; 3] {
        let grid = self.cover.grid();
        &self.elements[cell.sheet * grid.face_count() + grid.index(cell.cell)]
    }

    /// Largest residual over all element solves.
    pub fn max_residual(&self) -> f64 {
        self.elements.iter().flatten().map(|e| e.residual).fold(0.0, f64::max)
    }

    /// Value and gradient jumps across all interior half-diagonals.
    pub fn junction_discrepancy(&self, samples: usize) -> (f64, f64) {
        self.elements
            .iter()
            .flatten()
            .map(|e| e.junction_discrepancy(samples))
            .fold((0.0, 0.0), |(a, b), (c, d)| (f64::max(a, c), f64::max(b, d)))
    }
}

impl PiecewiseField<3> for FvsSurface {
    fn eval_piece(&self, cell: CoverCell, anchor: [f64; 2], at: [f64; 2]) -> [f64; 3] {
        let elems = self.elements(cell);
        let patch = elems[0].patch_at(anchor);
        std::array::from_fn(|k| elems[k].eval_patch(patch, at).0)
    }
}
