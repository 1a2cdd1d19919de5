//! Reference counts computed straight from a cut list, without the
//! library's cover machinery.
#![allow(dead_code)]

use std::collections::HashMap;

use branched_splines::cover::{BranchedCoverSpec, Direction};

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        Self((0..n).collect())
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        self.0[a] = b;
    }

    fn classes(&mut self) -> usize {
        (0..self.0.len()).filter(|&x| self.find(x) == x).count()
    }
}

/// Sheet bookkeeping from a raw cut list: crossing from a cell to its `+x` or
/// `+y` neighbor maps sheet `s` to `perm[s]`.
pub struct RawCover {
    pub w: usize,
    pub h: usize,
    pub n: usize,
    cuts: HashMap<((usize, usize), bool), Vec<usize>>,
}

impl RawCover {
    pub fn new(spec: &BranchedCoverSpec) -> Self {
        let cuts = spec
            .crossings
            .iter()
            .map(|c| {
                (
                    (c.cell, c.direction == Direction::PlusX),
                    c.permutation.images().to_vec(),
                )
            })
            .collect();
        Self {
            w: spec.grid.width(),
            h: spec.grid.height(),
            n: spec.sheets,
            cuts,
        }
    }

    /// Cell and sheet reached by one positive step along x (`horizontal`) or y.
    fn forward(&self, (i, j): (usize, usize), s: usize, horizontal: bool) -> ((usize, usize), usize) {
        let next = if horizontal {
            ((i + 1) % self.w, j)
        } else {
            (i, (j + 1) % self.h)
        };
        let s = self.cuts.get(&((i, j), horizontal)).map_or(s, |p| p[s]);
        (next, s)
    }

    fn cell_id(&self, (i, j): (usize, usize), s: usize) -> usize {
        (s * self.h + j) * self.w + i
    }

    /// Number of cover vertices: cell corners glued across every cover edge.
    pub fn vertex_count(&self) -> usize {
        // corners 0..4 = lower-left, lower-right, upper-right, upper-left
        let mut uf = UnionFind::new(4 * self.n * self.w * self.h);
        for s in 0..self.n {
            for j in 0..self.h {
                for i in 0..self.w {
                    let here = 4 * self.cell_id((i, j), s);
                    let (c, t) = self.forward((i, j), s, true);
                    let right = 4 * self.cell_id(c, t);
                    uf.union(here + 1, right);
                    uf.union(here + 2, right + 3);
                    let (c, t) = self.forward((i, j), s, false);
                    let up = 4 * self.cell_id(c, t);
                    uf.union(here + 3, up);
                    uf.union(here + 2, up + 1);
                }
            }
        }
        uf.classes()
    }

    pub fn euler_characteristic(&self) -> i64 {
        let cells = (self.n * self.w * self.h) as i64;
        self.vertex_count() as i64 - 2 * cells + cells
    }

    /// Connected lifts of each `(d+1) x (d+1)` support, summed over supports.
    pub fn lifted_basis_count(&self, degree: usize) -> usize {
        let m = degree + 1;
        let mut total = 0;
        for aj in 0..self.h {
            for ai in 0..self.w {
                let node = |a: usize, b: usize, s: usize| (s * m + b) * m + a;
                let mut uf = UnionFind::new(m * m * self.n);
                for b in 0..m {
                    for a in 0..m {
                        let cell = ((ai + a) % self.w, (aj + b) % self.h);
                        for s in 0..self.n {
                            if a + 1 < m {
                                let (_, t) = self.forward(cell, s, true);
                                uf.union(node(a, b, s), node(a + 1, b, t));
                            }
                            if b + 1 < m {
                                let (_, t) = self.forward(cell, s, false);
                                uf.union(node(a, b, s), node(a, b + 1, t));
                            }
                        }
                    }
                }
                total += uf.classes();
            }
        }
        total
    }
}
