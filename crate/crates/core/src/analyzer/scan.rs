//! Numeric smoothness scan across the edges of a branched triangulation.
//!
//! Each sampled edge point is evaluated from the polynomial pieces on both
//! sides (sheet-matched across cut edges) and the values and, for `r >= 1`,
//! central-difference gradients in base-chart coordinates are compared.

use serde::Serialize;

use crate::cover::{BranchedCover, CoverCell, CoverEdge, Direction};
use crate::{Error, Result};

/// Central-difference step in grid units.
pub const GRADIENT_STEP: f64 = 1e-5;

/// A field defined piecewise on the cells of a cover.
pub trait PiecewiseField<const D: usize> {
    /// Evaluates the polynomial piece of `cell` that contains the local point
    /// `anchor` (which may lie on the cell boundary), continued analytically
    /// to the local point `at`.
    fn eval_piece(&self, cell: CoverCell, anchor: [f64; 2], at: [f64; 2]) -> [f64; D];

    fn eval(&self, cell: CoverCell, at: [f64; 2]) -> [f64; D] {
        self.eval_piece(cell, at, at)
    }

    /// Central-difference gradient of the piece containing `anchor`:
    /// `[d/dx, d/dy]`, each of dimension `D`.
    fn gradient_piece(&self, cell: CoverCell, anchor: [f64; 2]) -> [[f64; D]; 2] {
        let h = GRADIENT_STEP;
        let [x, y] = anchor;
        let dx = diff(
            self.eval_piece(cell, anchor, [x + h, y]),
            self.eval_piece(cell, anchor, [x - h, y]),
            h,
        );
        let dy = diff(
            self.eval_piece(cell, anchor, [x, y + h]),
            self.eval_piece(cell, anchor, [x, y - h]),
            h,
        );
        [dx, dy]
    }
}

fn diff<const D: usize>(plus: [f64; D], minus: [f64; D], h: f64) -> [f64; D] {
    std::array::from_fn(|k| (plus[k] - minus[k]) / (2.0 * h))
}

fn max_abs_diff<const D: usize>(a: &[f64; D], b: &[f64; D]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Edges to scan and the edge parameters, in `(0, 1)`, to sample on each.
#[derive(Debug, Clone)]
pub struct EdgeSamplePlan {
    edges: Vec<CoverEdge>,
    params: Vec<f64>,
}

impl EdgeSamplePlan {
    pub fn new(edges: Vec<CoverEdge>, params: Vec<f64>) -> Result<Self> {
        if let Some(t) = params.iter().find(|t| !(**t > 0.0 && **t < 1.0)) {
            return Err(Error::Argument(format!(
                "edge parameter {t} is not interior to the edge"
            )));
        }
        Ok(Self { edges, params })
    }

    /// `samples` evenly spaced midpoints `(k + 1/2) / samples` on every cover edge.
    pub fn all_edges(cover: &BranchedCover, samples: usize) -> Self {
        let params = (0..samples).map(|k| (k as f64 + 0.5) / samples as f64).collect();
        Self {
            edges: cover.cover_edges().collect(),
            params,
        }
    }

    pub fn edges(&self) -> &[CoverEdge] {
        &self.edges
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EdgeReport {
    pub cell: (usize, usize),
    pub sheet: usize,
    pub direction: String,
    /// An endpoint is a ramification point of the cover.
    pub ramification_incident: bool,
    pub value_discrepancy: f64,
    pub gradient_discrepancy: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanReport {
    pub order: u32,
    pub tolerance: f64,
    pub edges_scanned: usize,
    pub max_value_discrepancy: f64,
    /// Over edges not incident to a ramification point.
    pub max_gradient_discrepancy: Option<f64>,
    /// Over ramification-incident edges; reported only.
    pub max_gradient_discrepancy_ramified: Option<f64>,
    pub ramification_incident_edges: usize,
    pub pass: bool,
    #[serde(skip)]
    pub edges: Vec<EdgeReport>,
}

/// Compares one-sided values (and gradients when `order >= 1`) across every
/// planned edge. Values must agree on all edges; gradients are required to
/// agree only on edges away from ramification points.
pub fn numeric_smoothness_scan<const D: usize, F: PiecewiseField<D>>(
    cover: &BranchedCover,
    field: &F,
    plan: &EdgeSamplePlan,
    order: u32,
    tol: f64,
) -> ScanReport {
    let mut edges = Vec::with_capacity(plan.edges.len());
    for &edge in &plan.edges {
        let near = CoverCell {
            cell: edge.cell,
            sheet: edge.sheet,
        };
        let far = cover.across(edge);
        let ramified = cover.edge_endpoints(edge).iter().any(|v| v.index > 1);
        let mut value = 0.0f64;
        let mut gradient = 0.0f64;
        for &t in &plan.params {
            let (a, b) = match edge.direction {
                Direction::PlusX => ([1.0, t], [0.0, t]),
                Direction::PlusY => ([t, 1.0], [t, 0.0]),
            };
            value = value.max(max_abs_diff(
                &field.eval_piece(near, a, a),
                &field.eval_piece(far, b, b),
            ));
            if order >= 1 {
                let ga = field.gradient_piece(near, a);
                let gb = field.gradient_piece(far, b);
                gradient = gradient
                    .max(max_abs_diff(&ga[0], &gb[0]))
                    .max(max_abs_diff(&ga[1], &gb[1]));
            }
        }
        edges.push(EdgeReport {
            cell: edge.cell,
            sheet: edge.sheet,
            direction: edge.direction.to_string(),
            ramification_incident: ramified,
            value_discrepancy: value,
            gradient_discrepancy: (order >= 1).then_some(gradient),
        });
    }

    let max_value = edges.iter().map(|e| e.value_discrepancy).fold(0.0, f64::max);
    let grad_max = |ramified: bool| {
        (order >= 1).then(|| {
            edges
                .iter()
                .filter(|e| e.ramification_incident == ramified)
                .filter_map(|e| e.gradient_discrepancy)
                .fold(0.0, f64::max)
        })
    };
    let max_gradient = grad_max(false);
    let pass = max_value <= tol && max_gradient.is_none_or(|g| g <= tol);
    ScanReport {
        order,
        tolerance: tol,
        edges_scanned: edges.len(),
        max_value_discrepancy: max_value,
        max_gradient_discrepancy: max_gradient,
        max_gradient_discrepancy_ramified: grad_max(true),
        ramification_incident_edges: edges.iter().filter(|e| e.ramification_incident).count(),
        pass,
        edges,
    }
}
