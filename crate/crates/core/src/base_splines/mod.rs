//! Uniform biperiodic tensor-product B-splines on a gridded torus.
//!
//! The torus is `[0, W) x [0, H)` with unit cells. Cell `(i, j)` covers
//! `[i, i+1] x [j, j+1]` and vertex `(i, j)` is the point `(i, j)`.

mod poly;

pub use poly::{Monomial, Poly2};

use crate::{Error, Result};

/// A `W x H` grid of unit cells with periodic identification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct TorusGrid {
    width: usize,
    height: usize,
}

impl TorusGrid {
    pub const MIN_SIDE: usize = 4;

    pub fn new(width: usize, height: usize) -> Result<Self> {
        if width < Self::MIN_SIDE || height < Self::MIN_SIDE {
            return Err(Error::Argument(format!(
                "torus grid must be at least {m}x{m}, got {width}x{height}",
                m = Self::MIN_SIDE
            )));
        }
        Ok(Self { width, height })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn vertex_count(&self) -> usize {
        self.width * self.height
    }

    pub fn edge_count(&self) -> usize {
        2 * self.width * self.height
    }

    pub fn face_count(&self) -> usize {
        self.width * self.height
    }

    /// Reduces signed integer coordinates into the fundamental domain.
    pub fn wrap(&self, i: isize, j: isize) -> (usize, usize) {
        (
            i.rem_euclid(self.width as isize) as usize,
            j.rem_euclid(self.height as isize) as usize,
        )
    }

    pub fn offset(&self, (i, j): (usize, usize), di: isize, dj: isize) -> (usize, usize) {
        self.wrap(i as isize + di, j as isize + dj)
    }

    /// Row-major linear index of a cell (or vertex).
    pub fn index(&self, (i, j): (usize, usize)) -> usize {
        j * self.width + i
    }

    pub fn contains(&self, (i, j): (usize, usize)) -> bool {
        i < self.width && j < self.height
    }

    /// All cells in row-major order.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.height).flat_map(move |j| (0..self.width).map(move |i| (i, j)))
    }

    /// Shortest displacement between two points, per axis, on the flat torus.
    pub fn periodic_delta(&self, a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
        let wrap = |d: f64, period: f64| d - period * (d / period).round();
        [
            wrap(b[0] - a[0], self.width as f64),
            wrap(b[1] - a[1], self.height as f64),
        ]
    }

    pub fn periodic_distance(&self, a: [f64; 2], b: [f64; 2]) -> f64 {
        let [dx, dy] = self.periodic_delta(a, b);
        dx.hypot(dy)
    }
}

/// A point of the torus given by its cell and local coordinates in `[0, 1)^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasePoint {
    pub cell: (usize, usize),
    pub local: [f64; 2],
}

impl BasePoint {
    pub fn new(cell: (usize, usize), local: [f64; 2]) -> Self {
        Self { cell, local }
    }

    /// Builds the point from global coordinates, wrapping into the grid.
    pub fn from_global(grid: &TorusGrid, x: f64, y: f64) -> Self {
        let x = x.rem_euclid(grid.width as f64);
        let y = y.rem_euclid(grid.height as f64);
        let (fi, fj) = (x.floor(), y.floor());
        let cell = grid.wrap(fi as isize, fj as isize);
        Self {
            cell,
            local: [x - fi, y - fj],
        }
    }

    pub fn global(&self, grid: &TorusGrid) -> [f64; 2] {
        let x = (self.cell.0 as f64 + self.local[0]).rem_euclid(grid.width as f64);
        let y = (self.cell.1 as f64 + self.local[1]).rem_euclid(grid.height as f64);
        [x, y]
    }
}

/// A biperiodic tensor-product B-spline of degree `degree` whose support is
/// the `(d+1) x (d+1)` block of cells with lower-left cell `anchor`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BaseBasis {
    pub degree: usize,
    pub anchor: (usize, usize),
}

impl BaseBasis {
    pub fn new(degree: usize, anchor: (usize, usize)) -> Self {
        Self { degree, anchor }
    }

    /// Support cells, row-major from the anchor, wrapped.
    pub fn support_cells(&self, grid: &TorusGrid) -> Vec<(usize, usize)> {
        let n = self.degree + 1;
        let mut out = Vec::with_capacity(n * n);
        for dj in 0..n {
            for di in 0..n {
                out.push(grid.offset(self.anchor, di as isize, dj as isize));
            }
        }
        out
    }

    /// Position of `cell` inside the support as `(column, row)`, if it is there.
    pub fn support_offset(&self, grid: &TorusGrid, cell: (usize, usize)) -> Option<(usize, usize)> {
        let di = (cell.0 + grid.width - self.anchor.0) % grid.width;
        let dj = (cell.1 + grid.height - self.anchor.1) % grid.height;
        (di <= self.degree && dj <= self.degree).then_some((di, dj))
    }

    pub fn greville(&self, grid: &TorusGrid) -> [f64; 2] {
        let half = (self.degree + 1) as f64 / 2.0;
        [
            (self.anchor.0 as f64 + half).rem_euclid(grid.width as f64),
            (self.anchor.1 as f64 + half).rem_euclid(grid.height as f64),
        ]
    }

    /// Bases of this degree whose support contains `cell`, ordered by
    /// increasing support offset.
    pub fn active_at(grid: &TorusGrid, degree: usize, cell: (usize, usize)) -> Vec<(BaseBasis, (usize, usize))> {
        let mut out = Vec::with_capacity((degree + 1) * (degree + 1));
        for dj in 0..=degree {
            for di in 0..=degree {
                let anchor = grid.offset(cell, -(di as isize), -(dj as isize));
                out.push((BaseBasis::new(degree, anchor), (di, dj)));
            }
        }
        out
    }
}

/// Cardinal uniform B-spline of degree `d` on the knots `0, 1, ..., d+1`,
/// evaluated by the Cox–de Boor recursion.
pub fn bspline_eval_1d(d: usize, u: f64) -> Result<f64> {
    let end = (d + 1) as f64;
    if !(0.0..=end).contains(&u) {
        return Err(Error::Domain(format!(
            "u = {u} outside the support [0, {end}] of the degree-{d} B-spline"
        )));
    }
    let mut n: Vec<f64> = (0..=d)
        .map(|i| {
            if (i as f64) <= u && u < (i + 1) as f64 {
                1.0
            } else {
                0.0
            }
        })
        .collect();
    for p in 1..=d {
        for i in 0..=(d - p) {
            let left = (u - i as f64) / p as f64 * n[i];
            let right = ((i + p + 1) as f64 - u) / p as f64 * n[i + 1];
            n[i] = left + right;
        }
    }
    Ok(n[0])
}

/// The polynomial piece of the cardinal B-spline of degree `d` on the knot
/// interval `[segment, segment+1]`, evaluated at `segment + t` for any real
/// `t`. Outside `[0, 1]` this is the analytic continuation of the piece.
pub fn bspline_piece(d: usize, segment: usize, t: f64) -> f64 {
    debug_assert!(segment <= d);
    let u = segment as f64 + t;
    // truncated power form: N(u) = 1/d! * sum_{i<=segment} (-1)^i C(d+1, i) (u - i)^d
    let mut binom = 1.0;
    let mut sum = 0.0;
    for i in 0..=segment {
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * binom * (u - i as f64).powi(d as i32);
        binom = binom * (d + 1 - i) as f64 / (i + 1) as f64;
    }
    let factorial: f64 = (1..=d).map(|k| k as f64).product();
    sum / factorial
}

/// Value of the tensor-product basis `b` at `p`, zero outside its support.
pub fn base_basis_eval(grid: &TorusGrid, b: &BaseBasis, p: &BasePoint) -> f64 {
    match b.support_offset(grid, p.cell) {
        Some((di, dj)) => bspline_piece(b.degree, di, p.local[0]) * bspline_piece(b.degree, dj, p.local[1]),
        None => 0.0,
    }
}
