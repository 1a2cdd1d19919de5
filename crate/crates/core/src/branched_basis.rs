//! B-splines lifted through a branched cover.
//!
//! Over the support of each biperiodic B-spline the cover restricts to
//! `n (d+1)^2` cover cells. Gluing them along the interior support edges
//! splits them into connected components; each component is one basis
//! function of the branched spline space. A support free of ramification
//! lifts to `n` copies. A support whose interior contains a ramification
//! point of index `e` produces a component that wraps `e` sheets and carries a
//! single coefficient.

use std::io::Write;

use serde::Serialize;

use crate::analyzer::PiecewiseField;
use crate::base_splines::{bspline_piece, BaseBasis};
use crate::cover::{BranchedCover, CoverCell, CoverPoint, Step};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case", tag = "class", content = "index")]
pub enum ComponentClass {
    Regular,
    Ramified(usize),
    /// Lifts not covered by the one-point or related-points rule.
    Irregular,
}

#[derive(Debug, Clone)]
pub struct LiftComponent {
    pub base: BaseBasis,
    /// Sorted cover cells of the component.
    pub nodes: Vec<CoverCell>,
    pub multiplicity: usize,
    pub class: ComponentClass,
    /// Sheets of the component in the support cell containing the Greville
    /// point (offset `((d+1)/2, (d+1)/2)` from the anchor).
    pub home_sheets: Vec<usize>,
}

/// Per-support statistics.
#[derive(Debug, Clone, Serialize)]
pub struct SupportCensus {
    pub anchor: (usize, usize),
    pub components: usize,
    pub regular: usize,
    pub ramified: usize,
    pub irregular: usize,
    /// A ramification point lies on the boundary of the support.
    pub boundary_ramification: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CensusSummary {
    pub degree: usize,
    pub components: usize,
    pub regular: usize,
    pub ramified: usize,
    pub irregular: usize,
    pub boundary_ramification_supports: usize,
}

/// All lifted components of one degree over a cover.
#[derive(Debug, Clone)]
pub struct BranchedBasis {
    cover: BranchedCover,
    degree: usize,
    components: Vec<LiftComponent>,
    census: Vec<SupportCensus>,
    lookup: Vec<usize>,
}

/// Sheet-matched graph components over one support: returns, for every
/// `(offset, sheet)` node, a component id in `0..count`.
fn support_components(cover: &BranchedCover, base: &BaseBasis) -> (Vec<usize>, usize) {
    let n = cover.sheets();
    let side = base.degree + 1;
    let grid = cover.grid();
    let node = |di: usize, dj: usize, s: usize| (dj * side + di) * n + s;
    let mut parent: Vec<usize> = (0..side * side * n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for dj in 0..side {
        for di in 0..side {
            let cell = grid.offset(base.anchor, di as isize, dj as isize);
            for s in 0..n {
                if di + 1 < side {
                    let (_, t) = cover.step(cell, s, Step::PlusX);
                    let (a, b) = (
                        find(&mut parent, node(di, dj, s)),
                        find(&mut parent, node(di + 1, dj, t)),
                    );
                    parent[a] = b;
                }
                if dj + 1 < side {
                    let (_, t) = cover.step(cell, s, Step::PlusY);
                    let (a, b) = (
                        find(&mut parent, node(di, dj, s)),
                        find(&mut parent, node(di, dj + 1, t)),
                    );
                    parent[a] = b;
                }
            }
        }
    }
    let mut label = vec![usize::MAX; parent.len()];
    let mut ids = vec![0; parent.len()];
    let mut count = 0;
    for x in 0..parent.len() {
        let root = find(&mut parent, x);
        if label[root] == usize::MAX {
            label[root] = count;
            count += 1;
        }
        ids[x] = label[root];
    }
    (ids, count)
}

/// Multiplicity and class of a component given its nodes.
///
/// The class is `ramified(e)` when the component covers every support cell
/// `e > 1` times and the interior ramification points it meets all have index
/// `e`; a component covering each cell once is regular; anything else is
/// irregular.
pub fn classify_component(cover: &BranchedCover, base: &BaseBasis, nodes: &[CoverCell]) -> (usize, ComponentClass) {
    let grid = cover.grid();
    let side = base.degree + 1;
    let mut per_cell = vec![0usize; side * side];
    for c in nodes {
        let (di, dj) = base.support_offset(grid, c.cell).expect("node inside support");
        per_cell[dj * side + di] += 1;
    }
    let m = per_cell[0];
    if per_cell.iter().any(|&k| k != m) {
        return (nodes.len() / (side * side), ComponentClass::Irregular);
    }
    if m == 1 {
        return (1, ComponentClass::Regular);
    }
    // cycles met by the component at interior support vertices
    let mut indices = Vec::new();
    for b in 1..side {
        for a in 1..side {
            let v = grid.offset(base.anchor, a as isize, b as isize);
            let monodromy = cover.vertex_monodromy(v);
            // v is the lower-left corner of its upper-right cell, which lies in the support
            for cycle in monodromy.cycles().into_iter().filter(|c| c.len() > 1) {
                if nodes.iter().any(|n| n.cell == v && cycle.contains(&n.sheet)) {
                    indices.push(cycle.len());
                }
            }
        }
    }
    let class = if !indices.is_empty() && indices.iter().all(|&e| e == m) {
        ComponentClass::Ramified(m)
    } else {
        ComponentClass::Irregular
    };
    (m, class)
}

/// Lifts every degree-`degree` biperiodic B-spline through the cover.
pub fn enumerate_components(cover: &BranchedCover, degree: usize) -> Result<BranchedBasis> {
    let grid = *cover.grid();
    if grid.width() <= degree + 1 || grid.height() <= degree + 1 {
        return Err(Error::Argument(format!(
            "degree {degree} supports wrap on a {}x{} grid",
            grid.width(),
            grid.height()
        )));
    }
    let n = cover.sheets();
    let side = degree + 1;
    let home = side / 2;
    let mut components = Vec::new();
    let mut census = Vec::with_capacity(grid.face_count());
    let mut lookup = vec![usize::MAX; grid.face_count() * side * side * n];

    for anchor in grid.cells() {
        let base = BaseBasis::new(degree, anchor);
        let (ids, count) = support_components(cover, &base);
        let first = components.len();
        let mut nodes: Vec<Vec<CoverCell>> = vec![Vec::new(); count];
        let mut home_sheets: Vec<Vec<usize>> = vec![Vec::new(); count];
        for dj in 0..side {
            for di in 0..side {
                let cell = grid.offset(anchor, di as isize, dj as isize);
                for s in 0..n {
                    let local = (dj * side + di) * n + s;
                    let id = ids[local];
                    nodes[id].push(CoverCell { cell, sheet: s });
                    if (di, dj) == (home, home) {
                        home_sheets[id].push(s);
                    }
                    lookup[grid.index(anchor) * side * side * n + local] = first + id;
                }
            }
        }
        let mut entry = SupportCensus {
            anchor,
            components: count,
            regular: 0,
            ramified: 0,
            irregular: 0,
            boundary_ramification: false,
        };
        for (mut cells, sheets) in nodes.into_iter().zip(home_sheets) {
            cells.sort();
            let (multiplicity, class) = classify_component(cover, &base, &cells);
            match class {
                ComponentClass::Regular => entry.regular += 1,
                ComponentClass::Ramified(_) => entry.ramified += 1,
                ComponentClass::Irregular => entry.irregular += 1,
            }
            components.push(LiftComponent {
                base,
                nodes: cells,
                multiplicity,
                class,
                home_sheets: sheets,
            });
        }
        entry.boundary_ramification = (0..=side).any(|b| {
            (0..=side).any(|a| {
                let on_boundary = a == 0 || b == 0 || a == side || b == side;
                on_boundary
                    && !cover
                        .vertex_monodromy(grid.offset(anchor, a as isize, b as isize))
                        .is_identity()
            })
        });
        census.push(entry);
    }
    Ok(BranchedBasis {
        cover: cover.clone(),
        degree,
        components,
        census,
        lookup,
    })
}

impl BranchedBasis {
    pub fn cover(&self) -> &BranchedCover {
        &self.cover
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn components(&self) -> &[LiftComponent] {
        &self.components
    }

    pub fn census(&self) -> &[SupportCensus] {
        &self.census
    }

    /// Component of `base` that contains the cover cell `(cell, sheet)`.
    pub fn lookup(&self, base: &BaseBasis, cell: (usize, usize), sheet: usize) -> Option<usize> {
        let grid = self.cover.grid();
        let side = self.degree + 1;
        let (di, dj) = base.support_offset(grid, cell)?;
        let n = self.cover.sheets();
        if base.degree != self.degree || sheet >= n {
            return None;
        }
        Some(self.lookup[(grid.index(base.anchor) * side * side + dj * side + di) * n + sheet])
    }

    pub fn summary(&self) -> CensusSummary {
        let count = |f: fn(&ComponentClass) -> bool| self.components.iter().filter(|c| f(&c.class)).count();
        CensusSummary {
            degree: self.degree,
            components: self.components.len(),
            regular: count(|c| matches!(c, ComponentClass::Regular)),
            ramified: count(|c| matches!(c, ComponentClass::Ramified(_))),
            irregular: count(|c| matches!(c, ComponentClass::Irregular)),
            boundary_ramification_supports: self.census.iter().filter(|c| c.boundary_ramification).count(),
        }
    }

    pub fn write_census_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(
            out,
            "anchor_i,anchor_j,components,regular,ramified,irregular,boundary_ramification"
        )?;
        for c in &self.census {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                c.anchor.0, c.anchor.1, c.components, c.regular, c.ramified, c.irregular, c.boundary_ramification
            )?;
        }
        Ok(())
    }

    /// Weighted component indices of the basis functions active on a cover
    /// cell, at local coordinates `at` (continued outside the cell if needed).
    fn active(&self, cell: CoverCell, at: [f64; 2]) -> impl Iterator<Item = (usize, f64)> + '_ {
        let grid = self.cover.grid();
        let d = self.degree;
        BaseBasis::active_at(grid, d, cell.cell)
            .into_iter()
            .map(move |(base, (di, dj))| {
                let id = self
                    .lookup(&base, cell.cell, cell.sheet)
                    .expect("active basis covers cell");
                (id, bspline_piece(d, di, at[0]) * bspline_piece(d, dj, at[1]))
            })
    }
}

/// One coefficient (scalar or point) per component.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientVector<const D: usize> {
    pub values: Vec<[f64; D]>,
}

impl<const D: usize> CoefficientVector<D> {
    pub fn constant(basis: &BranchedBasis, value: [f64; D]) -> Self {
        Self {
            values: vec![value; basis.len()],
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Evaluates `sum_c coefs[c] B_c(p)` at a cover point.
pub fn eval_branched_spline<const D: usize>(
    basis: &BranchedBasis,
    coefs: &CoefficientVector<D>,
    p: &CoverPoint,
) -> Result<[f64; D]> {
    if coefs.len() != basis.len() {
        return Err(Error::Config(format!(
            "{} coefficients for {} basis functions",
            coefs.len(),
            basis.len()
        )));
    }
    if p.sheet >= basis.cover.sheets() || !basis.cover.grid().contains(p.base.cell) {
        return Err(Error::Argument(format!("cover point {p:?} outside the cover")));
    }
    let cell = CoverCell {
        cell: p.base.cell,
        sheet: p.sheet,
    };
    Ok(BranchedSpline { basis, coefs }.eval(cell, p.base.local))
}

/// A branched spline: basis plus a fully populated coefficient vector.
#[derive(Debug, Clone, Copy)]
pub struct BranchedSpline<'a, const D: usize> {
    pub basis: &'a BranchedBasis,
    pub coefs: &'a CoefficientVector<D>,
}

impl<'a, const D: usize> BranchedSpline<'a, D> {
    pub fn new(basis: &'a BranchedBasis, coefs: &'a CoefficientVector<D>) -> Result<Self> {
        if coefs.len() != basis.len() {
            return Err(Error::Config(format!(
                "{} coefficients for {} basis functions",
                coefs.len(),
                basis.len()
            )));
        }
        Ok(Self { basis, coefs })
    }
}

impl<const D: usize> PiecewiseField<D> for BranchedSpline<'_, D> {
    fn eval_piece(&self, cell: CoverCell, _anchor: [f64; 2], at: [f64; 2]) -> [f64; D] {
        let mut out = [0.0; D];
        for (id, w) in self.basis.active(cell, at) {
            for (o, v) in out.iter_mut().zip(&self.coefs.values[id]) {
                *o += w * v;
            }
        }
        out
    }
}
