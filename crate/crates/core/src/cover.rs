//! Combinatorial branched covers of the gridded torus.
//!
//! A cover with `n` sheets is described by a cut system: a set of grid edges,
//! each carrying a permutation of the sheets. Sheet labels are local to a
//! cell; stepping across a labelled edge in the positive direction relabels
//! the sheet by the permutation, in the negative direction by its inverse.
//! The loop around a vertex picks up the vertex monodromy, whose cycles are
//! the cover vertices above it and whose cycle lengths are the ramification
//! indices.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::base_splines::{BasePoint, TorusGrid};
use crate::{Error, Result};

/// A bijection of `{0, .., n-1}` stored as its image list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    /// Wraps an image list without checking it is a bijection.
    pub fn from_images(images: Vec<usize>) -> Self {
        Self(images)
    }

    pub fn new(images: Vec<usize>) -> Result<Self> {
        let p = Self(images);
        if !p.is_bijection() {
            return Err(Error::Argument(format!("{:?} is not a permutation", p.0)));
        }
        Ok(p)
    }

    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    /// `s -> s + shift mod n`.
    pub fn cyclic_shift(n: usize, shift: usize) -> Self {
        Self((0..n).map(|s| (s + shift) % n).collect())
    }

    /// Swaps `a` and `b`.
    pub fn transposition(n: usize, a: usize, b: usize) -> Self {
        let mut v: Vec<usize> = (0..n).collect();
        v.swap(a, b);
        Self(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn apply(&self, s: usize) -> usize {
        self.0[s]
    }

    pub fn is_bijection(&self) -> bool {
        let mut seen = vec![false; self.0.len()];
        for &s in &self.0 {
            if s >= seen.len() || seen[s] {
                return false;
            }
            seen[s] = true;
        }
        true
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &s)| i == s)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.0.len()];
        for (i, &s) in self.0.iter().enumerate() {
            inv[s] = i;
        }
        Self(inv)
    }

    /// `self` first, then `next`.
    pub fn then(&self, next: &Permutation) -> Self {
        Self(self.0.iter().map(|&s| next.apply(s)).collect())
    }

    /// Disjoint cycles, each starting at its smallest element, ordered by it.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.0.len()];
        let mut out = Vec::new();
        for start in 0..self.0.len() {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut s = start;
            while !seen[s] {
                seen[s] = true;
                cycle.push(s);
                s = self.0[s];
            }
            out.push(cycle);
        }
        out
    }

    /// Cycle lengths in decreasing order.
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut t: Vec<usize> = self.cycles().iter().map(Vec::len).collect();
        t.sort_unstable_by(|a, b| b.cmp(a));
        t
    }
}

/// Axis of a dual crossing: the edge between a cell and its `+x` or `+y`
/// neighbor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "+x")]
    PlusX,
    #[serde(rename = "+y")]
    PlusY,
}

impl Direction {
    fn slot(self) -> usize {
        match self {
            Direction::PlusX => 0,
            Direction::PlusY => 1,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::PlusX => "+x",
            Direction::PlusY => "+y",
        })
    }
}

/// A single move between neighboring cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Step {
    PlusX,
    MinusX,
    PlusY,
    MinusY,
}

impl Step {
    pub fn delta(self) -> (isize, isize) {
        match self {
            Step::PlusX => (1, 0),
            Step::MinusX => (-1, 0),
            Step::PlusY => (0, 1),
            Step::MinusY => (0, -1),
        }
    }
}

/// Sheet permutation attached to the edge between `cell` and its neighbor in
/// `direction`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutCrossing {
    pub cell: (usize, usize),
    pub direction: Direction,
    pub permutation: Permutation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchedCoverSpec {
    pub grid: TorusGrid,
    pub sheets: usize,
    pub crossings: Vec<CutCrossing>,
}

impl BranchedCoverSpec {
    pub fn trivial(grid: TorusGrid) -> Self {
        Self {
            grid,
            sheets: 1,
            crossings: Vec::new(),
        }
    }

    /// A vertical slit along `x = column` from `y = rows.start` to
    /// `y = rows.end`, crossed with `permutation` in the `+x` direction.
    pub fn vertical_slit(
        grid: TorusGrid,
        sheets: usize,
        column: usize,
        rows: std::ops::Range<usize>,
        permutation: Permutation,
    ) -> Self {
        let crossings = rows
            .map(|j| CutCrossing {
                cell: grid.offset((column, j), -1, 0),
                direction: Direction::PlusX,
                permutation: permutation.clone(),
            })
            .collect();
        Self {
            grid,
            sheets,
            crossings,
        }
    }

    /// 20x20 torus, three sheets, slit from `(10, 8)` to `(10, 12)` with the
    /// cyclic shift `s -> s + 1`. The two slit ends are index-3 ramification
    /// points and the cover has genus 3.
    pub fn triple_example() -> Self {
        let grid = TorusGrid::new(20, 20).expect("valid grid");
        Self::vertical_slit(grid, 3, 10, 8..12, Permutation::cyclic_shift(3, 1))
    }

    /// The same slit with two sheets swapped across it: genus 2.
    pub fn double_example() -> Self {
        let grid = TorusGrid::new(20, 20).expect("valid grid");
        Self::vertical_slit(grid, 2, 10, 8..12, Permutation::transposition(2, 0, 1))
    }
}

/// A way in which a cover specification fails to describe a connected cover.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NoSheets,
    CellOutOfRange { crossing: usize, cell: (usize, usize) },
    PermutationSize { crossing: usize, len: usize, sheets: usize },
    NotBijection { crossing: usize },
    DuplicateEdge { first: usize, second: usize },
    Disconnected { components: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoSheets => write!(f, "cover must have at least one sheet"),
            Violation::CellOutOfRange { crossing, cell } => {
                write!(f, "crossing {crossing}: cell {cell:?} outside the grid")
            }
            Violation::PermutationSize { crossing, len, sheets } => {
                write!(f, "crossing {crossing}: permutation of length {len}, expected {sheets}")
            }
            Violation::NotBijection { crossing } => {
                write!(f, "crossing {crossing}: permutation is not a bijection")
            }
            Violation::DuplicateEdge { first, second } => {
                write!(f, "crossings {first} and {second} label the same edge")
            }
            Violation::Disconnected { components } => {
                write!(f, "cover is disconnected ({components} components)")
            }
        }
    }
}

/// Checks permutation sizes, one crossing per edge and connectivity of the
/// cover. An empty list means the specification is valid.
pub fn validate_cover(spec: &BranchedCoverSpec) -> Vec<Violation> {
    let mut out = Vec::new();
    if spec.sheets == 0 {
        out.push(Violation::NoSheets);
        return out;
    }
    let grid = &spec.grid;
    let mut owner: Vec<Option<usize>> = vec![None; grid.face_count() * 2];
    for (k, c) in spec.crossings.iter().enumerate() {
        if !grid.contains(c.cell) {
            out.push(Violation::CellOutOfRange {
                crossing: k,
                cell: c.cell,
            });
            continue;
        }
        if c.permutation.len() != spec.sheets {
            out.push(Violation::PermutationSize {
                crossing: k,
                len: c.permutation.len(),
                sheets: spec.sheets,
            });
        } else if !c.permutation.is_bijection() {
            out.push(Violation::NotBijection { crossing: k });
        }
        let slot = grid.index(c.cell) * 2 + c.direction.slot();
        match owner[slot] {
            Some(first) => out.push(Violation::DuplicateEdge { first, second: k }),
            None => owner[slot] = Some(k),
        }
    }
    if out.is_empty() {
        let cover = BranchedCover::new_unchecked(spec.clone());
        let components = cover.cell_components();
        if components != 1 {
            out.push(Violation::Disconnected { components });
        }
    }
    out
}

/// One sheet of one grid cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CoverCell {
    pub cell: (usize, usize),
    pub sheet: usize,
}

/// The cover edge on the `direction` side of a cover cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CoverEdge {
    pub cell: (usize, usize),
    pub sheet: usize,
    pub direction: Direction,
}

/// A vertex of the branched triangulation: a cycle of the monodromy at a base
/// vertex, labelled by its smallest sheet in the upper-right cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CoverVertex {
    pub vertex: (usize, usize),
    pub label: usize,
    /// Ramification index (cycle length).
    pub index: usize,
}

/// A point of the cover: a base point together with a cell-local sheet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverPoint {
    pub base: BasePoint,
    pub sheet: usize,
}

/// The corner of a cell, counterclockwise from the lower-left.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Corner {
    LowerLeft,
    LowerRight,
    UpperRight,
    UpperLeft,
}

impl Corner {
    pub const ALL: [Corner; 4] = [
        Corner::LowerLeft,
        Corner::LowerRight,
        Corner::UpperRight,
        Corner::UpperLeft,
    ];

    pub fn offset(self) -> (isize, isize) {
        match self {
            Corner::LowerLeft => (0, 0),
            Corner::LowerRight => (1, 0),
            Corner::UpperRight => (1, 1),
            Corner::UpperLeft => (0, 1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RamificationPoint {
    pub vertex: (usize, usize),
    /// All cycle lengths of the vertex monodromy, decreasing.
    pub cycle_type: Vec<usize>,
    /// Cycle lengths greater than one.
    pub indices: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverTopology {
    pub sheets: usize,
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub euler_characteristic: i64,
    pub genus: i64,
    pub ramification: Vec<RamificationPoint>,
}

impl CoverTopology {
    /// Total ramification `sum (e_p - 1)` over all cover vertices.
    pub fn total_ramification(&self) -> usize {
        self.ramification
            .iter()
            .flat_map(|r| r.indices.iter())
            .map(|e| e - 1)
            .sum()
    }

    /// `2g - 2 == n (2 g_base - 2) + sum (e_p - 1)` with a torus base.
    pub fn riemann_hurwitz_holds(&self) -> bool {
        2 * self.genus - 2 == self.total_ramification() as i64
    }
}

/// A validated cover with per-edge permutation lookup.
#[derive(Debug, Clone)]
pub struct BranchedCover {
    spec: BranchedCoverSpec,
    forward: Vec<Option<Permutation>>,
    backward: Vec<Option<Permutation>>,
}

impl BranchedCover {
    pub fn new(spec: BranchedCoverSpec) -> Result<Self> {
        let violations = validate_cover(&spec);
        if !violations.is_empty() {
            return Err(Error::InvalidCover(violations));
        }
        Ok(Self::new_unchecked(spec))
    }

    fn new_unchecked(spec: BranchedCoverSpec) -> Self {
        let slots = spec.grid.face_count() * 2;
        let mut forward = vec![None; slots];
        let mut backward = vec![None; slots];
        for c in &spec.crossings {
            let slot = spec.grid.index(c.cell) * 2 + c.direction.slot();
            backward[slot] = Some(c.permutation.inverse());
            forward[slot] = Some(c.permutation.clone());
        }
        Self {
            spec,
            forward,
            backward,
        }
    }

    pub fn spec(&self) -> &BranchedCoverSpec {
        &self.spec
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.spec.grid
    }

    pub fn sheets(&self) -> usize {
        self.spec.sheets
    }

    /// Permutation on the edge between `cell` and its `direction` neighbor.
    pub fn crossing(&self, cell: (usize, usize), direction: Direction) -> Option<&Permutation> {
        self.forward[self.grid().index(cell) * 2 + direction.slot()].as_ref()
    }

    /// Moves one cell in `step` and relabels the sheet.
    pub fn step(&self, cell: (usize, usize), sheet: usize, step: Step) -> ((usize, usize), usize) {
        let grid = self.grid();
        let (di, dj) = step.delta();
        let next = grid.offset(cell, di, dj);
        let new_sheet = match step {
            Step::PlusX => self.forward[grid.index(cell) * 2].as_ref(),
            Step::PlusY => self.forward[grid.index(cell) * 2 + 1].as_ref(),
            Step::MinusX => self.backward[grid.index(next) * 2].as_ref(),
            Step::MinusY => self.backward[grid.index(next) * 2 + 1].as_ref(),
        }
        .map_or(sheet, |p| p.apply(sheet));
        (next, new_sheet)
    }

    pub fn step_cell(&self, c: CoverCell, step: Step) -> CoverCell {
        let (cell, sheet) = self.step(c.cell, c.sheet, step);
        CoverCell { cell, sheet }
    }

    /// The step taking `from` to the adjacent cell `to`, if they are adjacent.
    pub fn step_between(&self, from: (usize, usize), to: (usize, usize)) -> Option<Step> {
        [Step::PlusX, Step::MinusX, Step::PlusY, Step::MinusY]
            .into_iter()
            .find(|&s| {
                let (di, dj) = s.delta();
                self.grid().offset(from, di, dj) == to
            })
    }

    /// Sheet reached by following a path of adjacent cells from `start`.
    pub fn transport_sheet(&self, path: &[(usize, usize)], start: usize) -> Result<usize> {
        let mut sheet = start;
        for w in path.windows(2) {
            let step = self
                .step_between(w[0], w[1])
                .ok_or_else(|| Error::Argument(format!("cells {:?} and {:?} are not adjacent", w[0], w[1])))?;
            sheet = self.step(w[0], sheet, step).1;
        }
        Ok(sheet)
    }

    /// Monodromy of the counterclockwise loop around vertex `v`, starting in
    /// the cell to its upper right: upper-right, upper-left, lower-left,
    /// lower-right and back. Sheets are labelled in the upper-right cell.
    pub fn vertex_monodromy(&self, v: (usize, usize)) -> Permutation {
        let images = (0..self.sheets())
            .map(|s| {
                let mut cell = v;
                let mut sheet = s;
                for step in [Step::MinusX, Step::MinusY, Step::PlusX, Step::PlusY] {
                    (cell, sheet) = self.step(cell, sheet, step);
                }
                sheet
            })
            .collect();
        Permutation(images)
    }

    /// The cover vertex at `corner` of the cover cell `c`.
    pub fn corner_vertex(&self, c: CoverCell, corner: Corner) -> CoverVertex {
        let (di, dj) = corner.offset();
        let v = self.grid().offset(c.cell, di, dj);
        // transport to the upper-right cell of v along the tail of the loop
        let tail: &[Step] = match corner {
            Corner::LowerLeft => &[],
            Corner::UpperLeft => &[Step::PlusY],
            Corner::UpperRight => &[Step::PlusX, Step::PlusY],
            Corner::LowerRight => &[Step::MinusY, Step::PlusX, Step::PlusY],
        };
        let (mut cell, mut sheet) = (c.cell, c.sheet);
        for &s in tail {
            (cell, sheet) = self.step(cell, sheet, s);
        }
        debug_assert_eq!(cell, v);
        let cycle = self
            .vertex_monodromy(v)
            .cycles()
            .into_iter()
            .find(|cyc| cyc.contains(&sheet))
            .expect("sheet lies on a cycle");
        CoverVertex {
            vertex: v,
            label: cycle[0],
            index: cycle.len(),
        }
    }

    /// The two endpoints of a cover edge, in increasing base coordinate.
    pub fn edge_endpoints(&self, e: CoverEdge) -> [CoverVertex; 2] {
        let c = CoverCell {
            cell: e.cell,
            sheet: e.sheet,
        };
        match e.direction {
            Direction::PlusX => [
                self.corner_vertex(c, Corner::LowerRight),
                self.corner_vertex(c, Corner::UpperRight),
            ],
            Direction::PlusY => [
                self.corner_vertex(c, Corner::UpperLeft),
                self.corner_vertex(c, Corner::UpperRight),
            ],
        }
    }

    /// The cover cell on the far side of an edge.
    pub fn across(&self, e: CoverEdge) -> CoverCell {
        let step = match e.direction {
            Direction::PlusX => Step::PlusX,
            Direction::PlusY => Step::PlusY,
        };
        self.step_cell(
            CoverCell {
                cell: e.cell,
                sheet: e.sheet,
            },
            step,
        )
    }

    /// All `n W H` cover cells, sheet-major then row-major.
    pub fn cover_cells(&self) -> impl Iterator<Item = CoverCell> + '_ {
        (0..self.sheets()).flat_map(move |sheet| self.grid().cells().map(move |cell| CoverCell { cell, sheet }))
    }

    /// All `2 n W H` cover edges.
    pub fn cover_edges(&self) -> impl Iterator<Item = CoverEdge> + '_ {
        self.cover_cells().flat_map(|c| {
            [Direction::PlusX, Direction::PlusY]
                .into_iter()
                .map(move |direction| CoverEdge {
                    cell: c.cell,
                    sheet: c.sheet,
                    direction,
                })
        })
    }

    /// Ramification points of the cover, grouped by base vertex.
    pub fn ramification(&self) -> Vec<RamificationPoint> {
        self.grid()
            .cells()
            .filter_map(|v| {
                let m = self.vertex_monodromy(v);
                if m.is_identity() {
                    return None;
                }
                let cycle_type = m.cycle_type();
                let indices = cycle_type.iter().copied().filter(|&e| e > 1).collect();
                Some(RamificationPoint {
                    vertex: v,
                    cycle_type,
                    indices,
                })
            })
            .collect()
    }

    /// Vertex, edge and face counts of the pulled-back grid, and the genus.
    pub fn topology(&self) -> CoverTopology {
        let n = self.sheets();
        let grid = self.grid();
        let vertices: usize = grid.cells().map(|v| self.vertex_monodromy(v).cycles().len()).sum();
        let edges = n * grid.edge_count();
        let faces = n * grid.face_count();
        let chi = vertices as i64 - edges as i64 + faces as i64;
        CoverTopology {
            sheets: n,
            vertices,
            edges,
            faces,
            euler_characteristic: chi,
            genus: 1 - chi / 2,
            ramification: self.ramification(),
        }
    }

    /// Number of connected components of the cell adjacency graph of the
    /// cover.
    fn cell_components(&self) -> usize {
        let grid = self.grid();
        let n = self.sheets();
        let idx = |c: (usize, usize), s: usize| grid.index(c) * n + s;
        let mut seen = vec![false; grid.face_count() * n];
        let mut components = 0;
        for start in self.cover_cells() {
            if seen[idx(start.cell, start.sheet)] {
                continue;
            }
            components += 1;
            seen[idx(start.cell, start.sheet)] = true;
            let mut queue = VecDeque::from([start]);
            while let Some(c) = queue.pop_front() {
                for step in [Step::PlusX, Step::MinusX, Step::PlusY, Step::MinusY] {
                    let next = self.step_cell(c, step);
                    let k = idx(next.cell, next.sheet);
                    if !seen[k] {
                        seen[k] = true;
                        queue.push_back(next);
                    }
                }
            }
        }
        components
    }
}
