//! Embedding branched splines in 3-space.
//!
//! Control points are sampled from one torus of revolution per sheet; the
//! tori are coaxial and stacked along `z`. Components wrapping several sheets
//! at a ramification point get the mean of the sheet points, and components
//! near a ramification point are blended toward the mean of all sheets.

mod mesh;
mod obj;
mod tessellate;

pub use mesh::{mesh_report, MeshReport, QuadMesh};
pub use obj::{export_obj, read_obj};
pub use tessellate::{tessellate, tessellate_with, SampleKey, TessellateOptions, WeldFault};

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::base_splines::TorusGrid;
use crate::branched_basis::{BranchedBasis, CoefficientVector, ComponentClass};
use crate::cover::BranchedCover;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingConfig {
    pub major_radius: f64,
    pub minor_radius: f64,
    /// Translation of each sheet's torus.
    pub offsets: Vec<[f64; 3]>,
    /// Blend radius in grid units; 0 disables blending.
    pub blend_radius: f64,
    /// Samples per cell edge when tessellating.
    pub density: usize,
}

impl EmbeddingConfig {
    /// `R = 4`, `r = 1`, sheets stacked `2.5 r` apart, blend radius 2,
    /// density 2.
    pub fn stacked(sheets: usize) -> Self {
        let minor_radius = 1.0;
        Self {
            major_radius: 4.0,
            minor_radius,
            offsets: (0..sheets).map(|s| [0.0, 0.0, s as f64 * 2.5 * minor_radius]).collect(),
            blend_radius: 2.0,
            density: 2,
        }
    }

    /// Checks the configuration against a cover.
    pub fn validate(&self, cover: &BranchedCover) -> Result<()> {
        let n = cover.sheets();
        if self.offsets.len() != n {
            return Err(Error::Config(format!(
                "{} sheet offsets for {n} sheets",
                self.offsets.len()
            )));
        }
        for i in 0..n {
            for j in i + 1..n {
                if self.offsets[i] == self.offsets[j] {
                    return Err(Error::Config(format!("sheets {i} and {j} share an offset")));
                }
            }
        }
        if self.density == 0 {
            return Err(Error::Config("tessellation density must be at least 1".into()));
        }
        if self.blend_radius.is_nan() || self.blend_radius < 0.0 {
            return Err(Error::Config("blend radius must be nonnegative".into()));
        }
        let points = branch_points(cover);
        for (k, a) in points.iter().enumerate() {
            for b in &points[k + 1..] {
                if cover.grid().periodic_distance(*a, *b) <= self.blend_radius {
                    return Err(Error::Config(format!(
                        "blend radius {} reaches between ramification points {a:?} and {b:?}",
                        self.blend_radius
                    )));
                }
            }
        }
        Ok(())
    }
}

fn branch_points(cover: &BranchedCover) -> Vec<[f64; 2]> {
    cover
        .ramification()
        .iter()
        .map(|r| [r.vertex.0 as f64, r.vertex.1 as f64])
        .collect()
}

/// Point of the torus of revolution for `sheet` at base coordinates
/// `(u, v)`, with angles `2 pi u / W` around the axis and `2 pi v / H` around
/// the tube.
pub fn torus_embed(grid: &TorusGrid, cfg: &EmbeddingConfig, sheet: usize, [u, v]: [f64; 2]) -> [f64; 3] {
    let theta = TAU * u / grid.width() as f64;
    let phi = TAU * v / grid.height() as f64;
    let ring = cfg.major_radius + cfg.minor_radius * phi.cos();
    let o = cfg.offsets[sheet];
    [
        ring * theta.cos() + o[0],
        ring * theta.sin() + o[1],
        cfg.minor_radius * phi.sin() + o[2],
    ]
}

/// Partial derivatives of [`torus_embed`] with respect to `u` and `v`.
pub fn torus_embed_gradient(grid: &TorusGrid, cfg: &EmbeddingConfig, [u, v]: [f64; 2]) -> [[f64; 3]; 2] {
    let (tw, th) = (TAU / grid.width() as f64, TAU / grid.height() as f64);
    let theta = tw * u;
    let phi = th * v;
    let ring = cfg.major_radius + cfg.minor_radius * phi.cos();
    let r = cfg.minor_radius;
    [
        [-ring * theta.sin() * tw, ring * theta.cos() * tw, 0.0],
        [
            -r * phi.sin() * theta.cos() * th,
            -r * phi.sin() * theta.sin() * th,
            r * phi.cos() * th,
        ],
    ]
}

pub(crate) fn mean(points: impl IntoIterator<Item = [f64; 3]>) -> [f64; 3] {
    let mut sum = [0.0; 3];
    let mut count = 0usize;
    for p in points {
        for k in 0..3 {
            sum[k] += p[k];
        }
        count += 1;
    }
    sum.map(|s| s / count as f64)
}

/// A sampled control net.
#[derive(Debug, Clone)]
pub struct ControlNet {
    pub points: CoefficientVector<3>,
    /// Components of the irregular class; they receive the mean over their sheets.
    pub irregular: Vec<usize>,
    /// Number of components moved by the ramification blend.
    pub blended: usize,
}

/// Samples one control point per component at its Greville point.
pub fn sample_control_net(basis: &BranchedBasis, cfg: &EmbeddingConfig) -> Result<ControlNet> {
    let cover = basis.cover();
    cfg.validate(cover)?;
    let grid = cover.grid();
    let branch = branch_points(cover);
    let n = cover.sheets();
    let mut values = Vec::with_capacity(basis.len());
    let mut irregular = Vec::new();
    let mut blended = 0;
    for (id, comp) in basis.components().iter().enumerate() {
        let g = comp.base.greville(grid);
        let own = match comp.class {
            ComponentClass::Regular => torus_embed(grid, cfg, comp.home_sheets[0], g),
            ComponentClass::Ramified(_) => mean(comp.home_sheets.iter().map(|&s| torus_embed(grid, cfg, s, g))),
            ComponentClass::Irregular => {
                irregular.push(id);
                mean(comp.home_sheets.iter().map(|&s| torus_embed(grid, cfg, s, g)))
            }
        };
        let dist = branch
            .iter()
            .map(|b| grid.periodic_distance(g, *b))
            .fold(f64::INFINITY, f64::min);
        let point = if cfg.blend_radius > 0.0 && dist < cfg.blend_radius {
            blended += 1;
            let w = 1.0 - dist / cfg.blend_radius;
            let all = mean((0..n).map(|s| torus_embed(grid, cfg, s, g)));
            std::array::from_fn(|k| (1.0 - w) * own[k] + w * all[k])
        } else {
            own
        };
        values.push(point);
    }
    Ok(ControlNet {
        points: CoefficientVector { values },
        irregular,
        blended,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::branched_basis::enumerate_components;
    use crate::cover::BranchedCoverSpec;

    fn close(a: [f64; 3], b: [f64; 3], tol: f64) -> bool {
        a.iter().zip(&b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn embedding_basics() {
        let grid = TorusGrid::new(20, 20).unwrap();
        let cfg = EmbeddingConfig::stacked(3);
        assert!(close(torus_embed(&grid, &cfg, 0, [0.0, 0.0]), [5.0, 0.0, 0.0], 1e-15));
        let a = torus_embed(&grid, &cfg, 0, [3.3, 7.1]);
        let b = torus_embed(&grid, &cfg, 2, [3.3, 7.1]);
        assert!(close([b[0] - a[0], b[1] - a[1], b[2] - a[2]], [0.0, 0.0, 5.0], 1e-12));
        assert!(close(
            torus_embed(&grid, &cfg, 1, [23.3, 7.1]),
            torus_embed(&grid, &cfg, 1, [3.3, 7.1]),
            1e-12
        ));
    }

    #[test]
    fn gradient_matches_differences() {
        let grid = TorusGrid::new(20, 20).unwrap();
        let cfg = EmbeddingConfig::stacked(1);
        let p = [3.7, 11.2];
        let g = torus_embed_gradient(&grid, &cfg, p);
        let h = 1e-6;
        for axis in 0..2 {
            let mut a = p;
            let mut b = p;
            a[axis] += h;
            b[axis] -= h;
            let (fa, fb) = (torus_embed(&grid, &cfg, 0, a), torus_embed(&grid, &cfg, 0, b));
            for k in 0..3 {
                assert!(((fa[k] - fb[k]) / (2.0 * h) - g[axis][k]).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn config_validation() {
        let cover = BranchedCover::new(BranchedCoverSpec::triple_example()).unwrap();
        assert!(EmbeddingConfig::stacked(3).validate(&cover).is_ok());
        assert!(EmbeddingConfig::stacked(2).validate(&cover).is_err());
        let mut cfg = EmbeddingConfig::stacked(3);
        cfg.blend_radius = 4.5;
        assert!(cfg.validate(&cover).is_err());
        let mut cfg = EmbeddingConfig::stacked(3);
        cfg.offsets[2] = cfg.offsets[0];
        assert!(cfg.validate(&cover).is_err());
    }

    #[test]
    fn control_net_rules() {
        let cover = BranchedCover::new(BranchedCoverSpec::triple_example()).unwrap();
        let grid = *cover.grid();
        let basis = enumerate_components(&cover, 1).unwrap();
        let cfg = EmbeddingConfig::stacked(3);
        let net = sample_control_net(&basis, &cfg).unwrap();
        assert!(net.irregular.is_empty());
        for (id, comp) in basis.components().iter().enumerate() {
            let g = comp.base.greville(&grid);
            let p = net.points.values[id];
            match comp.class {
                ComponentClass::Ramified(3) => {
                    let avg = mean((0..3).map(|s| torus_embed(&grid, &cfg, s, g)));
                    assert!(close(p, avg, 1e-12));
                    assert!(g == [10.0, 8.0] || g == [10.0, 12.0]);
                }
                ComponentClass::Regular if g == [3.0, 3.0] => {
                    assert!(close(p, torus_embed(&grid, &cfg, comp.home_sheets[0], g), 0.0));
                }
                // (10, 9) is at distance 1 = rho / 2 from (10, 8)
                ComponentClass::Regular if g == [10.0, 9.0] => {
                    let own = torus_embed(&grid, &cfg, comp.home_sheets[0], g);
                    let all = mean((0..3).map(|s| torus_embed(&grid, &cfg, s, g)));
                    let half: [f64; 3] = std::array::from_fn(|k| 0.5 * (own[k] + all[k]));
                    assert!(close(p, half, 1e-12));
                }
                _ => {}
            }
        }
    }

    #[test]
    fn zero_blend_keeps_average() {
        let cover = BranchedCover::new(BranchedCoverSpec::triple_example()).unwrap();
        let basis = enumerate_components(&cover, 2).unwrap();
        let mut cfg = EmbeddingConfig::stacked(3);
        cfg.blend_radius = 0.0;
        let net = sample_control_net(&basis, &cfg).unwrap();
        assert_eq!(net.blended, 0);
        let grid = *cover.grid();
        for (id, comp) in basis.components().iter().enumerate() {
            let g = comp.base.greville(&grid);
            let expected = match comp.class {
                ComponentClass::Ramified(_) => mean((0..3).map(|s| torus_embed(&grid, &cfg, s, g))),
                _ => torus_embed(&grid, &cfg, comp.home_sheets[0], g),
            };
            assert!(close(net.points.values[id], expected, 1e-12));
        }
    }
}
