//! Configuration-driven runs: analyze, build, check and dimension sweeps.
//!
//! A run is described by a JSON [`RunConfig`]. Each runner returns a
//! serializable report; the command-line front end only prints reports and
//! maps errors to exit codes.

use std::fs;
use std::io::Write;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analyzer::{
    conformality_sweep, numeric_smoothness_scan, write_sweep_csv, EdgeSamplePlan, PiecewiseField, ScanReport, SweepRow,
};
use crate::base_splines::{BasePoint, TorusGrid};
use crate::branched_basis::{
    enumerate_components, eval_branched_spline, BranchedBasis, BranchedSpline, CensusSummary, CoefficientVector,
};
use crate::cover::{
    validate_cover, BranchedCover, BranchedCoverSpec, CoverCell, CoverPoint, CoverTopology, CutCrossing,
};
use crate::fvs::{build_fvs_surface, FvsSurface};
use crate::geometry::{
    export_obj, mesh_report, sample_control_net, tessellate_with, EmbeddingConfig, MeshReport, QuadMesh,
    TessellateOptions, WeldFault,
};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridConfig {
    pub width: usize,
    pub height: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverConfig {
    pub sheets: usize,
    #[serde(default)]
    pub crossings: Vec<CutCrossing>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SplineConfig {
    Bspline { degree: usize },
    Fvs,
}

impl Default for SplineConfig {
    fn default() -> Self {
        SplineConfig::Bspline { degree: 2 }
    }
}

/// Embedding overrides; missing fields take the stacked-tori defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmbeddingSection {
    pub major_radius: Option<f64>,
    pub minor_radius: Option<f64>,
    pub offsets: Option<Vec<[f64; 3]>>,
    pub blend_radius: Option<f64>,
    pub density: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub grid: GridConfig,
    pub cover: CoverConfig,
    #[serde(default)]
    pub spline: SplineConfig,
    #[serde(default)]
    pub embedding: EmbeddingSection,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    /// The cover spec, unvalidated.
    pub fn cover_spec(&self) -> Result<BranchedCoverSpec> {
        let grid =
            TorusGrid::new(self.grid.width, self.grid.height).map_err(|e| Error::Config(format!("grid: {e}")))?;
        Ok(BranchedCoverSpec {
            grid,
            sheets: self.cover.sheets,
            crossings: self.cover.crossings.clone(),
        })
    }

    /// Validated cover; violations become [`Error::InvalidCover`].
    pub fn branched_cover(&self) -> Result<BranchedCover> {
        let spec = self.cover_spec()?;
        let violations = validate_cover(&spec);
        if !violations.is_empty() {
            return Err(Error::InvalidCover(violations));
        }
        BranchedCover::new(spec)
    }

    pub fn embedding(&self) -> EmbeddingConfig {
        let base = EmbeddingConfig::stacked(self.cover.sheets);
        let e = &self.embedding;
        let minor_radius = e.minor_radius.unwrap_or(base.minor_radius);
        let default_offsets = (0..self.cover.sheets)
            .map(|s| [0.0, 0.0, s as f64 * 2.5 * minor_radius])
            .collect();
        EmbeddingConfig {
            major_radius: e.major_radius.unwrap_or(base.major_radius),
            minor_radius,
            offsets: e.offsets.clone().unwrap_or(default_offsets),
            blend_radius: e.blend_radius.unwrap_or(base.blend_radius),
            density: e.density.unwrap_or(base.density),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalyzeReport {
    pub topology: CoverTopology,
    pub riemann_hurwitz: bool,
    /// Basis census for degrees 1 and 2.
    pub census: Vec<CensusSummary>,
}

pub fn run_analyze(cfg: &RunConfig) -> Result<AnalyzeReport> {
    let cover = cfg.branched_cover()?;
    let topology = cover.topology();
    let census = [1, 2]
        .into_iter()
        .map(|d| enumerate_components(&cover, d).map(|b| b.summary()))
        .collect::<Result<_>>()?;
    Ok(AnalyzeReport {
        riemann_hurwitz: topology.riemann_hurwitz_holds(),
        topology,
        census,
    })
}

/// Command-line overrides and test hooks shared by build and check.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunOptions {
    pub degree: Option<usize>,
    pub density: Option<usize>,
    /// C0 tolerance for check; defaults to 1e-10.
    pub tolerance: Option<f64>,
    /// Adds `delta` to the x coordinate of one control point.
    pub perturb: Option<(usize, f64)>,
    /// Displaces one corner sample of the first cover cell before welding.
    pub weld_fault: Option<f64>,
}

impl RunOptions {
    fn spline(&self, cfg: &RunConfig) -> SplineConfig {
        match (self.degree, cfg.spline) {
            (Some(degree), SplineConfig::Bspline { .. }) => SplineConfig::Bspline { degree },
            (_, spline) => spline,
        }
    }

    fn tessellation(&self, emb: &EmbeddingConfig) -> TessellateOptions {
        let mut opts = TessellateOptions::new(self.density.unwrap_or(emb.density));
        opts.fault = self.weld_fault.map(|delta| WeldFault {
            cell: CoverCell { cell: (0, 0), sheet: 0 },
            delta,
        });
        opts
    }
}

/// A realized surface: either a branched B-spline or an FVS field.
#[derive(Debug, Clone)]
pub enum Surface {
    Bspline {
        basis: BranchedBasis,
        net: CoefficientVector<3>,
    },
    Fvs(FvsSurface),
}

impl PiecewiseField<3> for Surface {
    fn eval_piece(&self, cell: CoverCell, anchor: [f64; 2], at: [f64; 2]) -> [f64; 3] {
        match self {
            Surface::Bspline { basis, net } => BranchedSpline { basis, coefs: net }.eval_piece(cell, anchor, at),
            Surface::Fvs(s) => s.eval_piece(cell, anchor, at),
        }
    }
}

impl Surface {
    pub fn build(
        cover: &BranchedCover,
        spline: SplineConfig,
        emb: &EmbeddingConfig,
        opts: &RunOptions,
    ) -> Result<Self> {
        match spline {
            SplineConfig::Bspline { degree } => {
                let basis = enumerate_components(cover, degree)?;
                let mut net = sample_control_net(&basis, emb)?.points;
                if let Some((index, delta)) = opts.perturb {
                    let len = net.len();
                    let point = net
                        .values
                        .get_mut(index)
                        .ok_or_else(|| Error::Argument(format!("control point {index} out of range (0..{len})")))?;
                    point[0] += delta;
                }
                Ok(Surface::Bspline { basis, net })
            }
            SplineConfig::Fvs => {
                if opts.perturb.is_some() {
                    return Err(Error::Argument(
                        "control point perturbation applies to B-splines only".into(),
                    ));
                }
                Ok(Surface::Fvs(build_fvs_surface(cover, emb)?))
            }
        }
    }

    /// Whether first derivatives are expected to match across edges.
    pub fn is_c1(&self) -> bool {
        match self {
            Surface::Bspline { basis, .. } => basis.degree() >= 2,
            Surface::Fvs(_) => true,
        }
    }
}

/// Samples per edge used by the continuity scans.
const SCAN_SAMPLES: usize = 3;
const C1_TOLERANCE: f64 = 1e-8;
const C0_TOLERANCE: f64 = 1e-10;
const PARTITION_TOLERANCE: f64 = 1e-12;
const PARTITION_SAMPLES: usize = 10_000;
const PARTITION_SEED: u64 = 0x5eed;

fn continuity_scans(cover: &BranchedCover, surface: &Surface, c0_tol: f64) -> (ScanReport, Option<ScanReport>) {
    let plan = EdgeSamplePlan::all_edges(cover, SCAN_SAMPLES);
    let c0 = numeric_smoothness_scan(cover, surface, &plan, 0, c0_tol);
    let c1 = surface
        .is_c1()
        .then(|| numeric_smoothness_scan(cover, surface, &plan, 1, C1_TOLERANCE));
    (c0, c1)
}

#[derive(Debug, Clone, Serialize)]
pub struct BuildReport {
    pub spline: SplineConfig,
    pub density: usize,
    pub cover_genus: i64,
    pub mesh: MeshReport,
    pub c0_scan: ScanReport,
    pub c1_scan: Option<ScanReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

/// Enumerate, sample, tessellate and scan. Returns the mesh for export.
pub fn run_build(cfg: &RunConfig, opts: &RunOptions) -> Result<(QuadMesh, BuildReport)> {
    let cover = cfg.branched_cover()?;
    let emb = cfg.embedding();
    let spline = opts.spline(cfg);
    let surface = Surface::build(&cover, spline, &emb, opts)?;
    let tess = opts.tessellation(&emb);
    let mesh = tessellate_with(&cover, &surface, &tess)?;
    let (c0_scan, c1_scan) = continuity_scans(&cover, &surface, opts.tolerance.unwrap_or(C0_TOLERANCE));
    let report = BuildReport {
        spline,
        density: tess.density,
        cover_genus: cover.topology().genus,
        mesh: mesh_report(&mesh),
        c0_scan,
        c1_scan,
        output: None,
    };
    Ok((mesh, report))
}

/// [`run_build`] followed by OBJ export to `out` (or the configured output).
pub fn run_build_to_file(cfg: &RunConfig, opts: &RunOptions, out: Option<&Path>) -> Result<BuildReport> {
    let path = out
        .map(Path::to_path_buf)
        .or_else(|| cfg.output.clone())
        .ok_or_else(|| Error::Argument("no output path given".into()))?;
    let (mesh, mut report) = run_build(cfg, opts)?;
    let mut file = std::io::BufWriter::new(fs::File::create(&path)?);
    export_obj(&mesh, &mut file, true)?;
    file.flush()?;
    report.output = Some(path);
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckItem {
    pub name: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    pub detail: String,
}

impl CheckItem {
    fn measured(name: &str, value: f64, tolerance: f64, detail: String) -> Self {
        Self {
            name: name.into(),
            pass: value <= tolerance,
            value: Some(value),
            tolerance: Some(tolerance),
            detail,
        }
    }

    fn flag(name: &str, pass: bool, detail: String) -> Self {
        Self {
            name: name.into(),
            pass,
            value: None,
            tolerance: None,
            detail,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub pass: bool,
    pub items: Vec<CheckItem>,
}

/// Uniform random cover points from a seeded generator.
pub fn random_cover_points(cover: &BranchedCover, count: usize, seed: u64) -> Vec<CoverPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = cover.grid();
    (0..count)
        .map(|_| {
            let cell = (rng.gen_range(0..grid.width()), rng.gen_range(0..grid.height()));
            let local = [rng.gen::<f64>(), rng.gen::<f64>()];
            CoverPoint {
                base: BasePoint::new(cell, local),
                sheet: rng.gen_range(0..cover.sheets()),
            }
        })
        .collect()
}

/// Largest `|sum_c B_c(p) - 1|` over the points.
pub fn partition_of_unity_error(basis: &BranchedBasis, points: &[CoverPoint]) -> Result<f64> {
    let ones = CoefficientVector::constant(basis, [1.0]);
    points.iter().try_fold(0.0f64, |worst, p| {
        let [s] = eval_branched_spline(basis, &ones, p)?;
        Ok(worst.max((s - 1.0).abs()))
    })
}

/// Runs every verification and itemizes the results. Only configuration and
/// I/O problems are errors; failed checks are reported.
pub fn run_check(cfg: &RunConfig, opts: &RunOptions) -> Result<CheckReport> {
    let cover = cfg.branched_cover()?;
    let emb = cfg.embedding();
    let spline = opts.spline(cfg);
    let topology = cover.topology();
    let mut items = Vec::new();

    items.push(CheckItem::flag(
        "riemann_hurwitz",
        topology.riemann_hurwitz_holds(),
        format!(
            "2g - 2 = {}, total ramification {}",
            2 * topology.genus - 2,
            topology.total_ramification()
        ),
    ));

    let surface = Surface::build(&cover, spline, &emb, opts)?;
    match &surface {
        Surface::Bspline { basis, .. } => {
            let points = random_cover_points(&cover, PARTITION_SAMPLES, PARTITION_SEED);
            let err = partition_of_unity_error(basis, &points)?;
            items.push(CheckItem::measured(
                "partition_of_unity",
                err,
                PARTITION_TOLERANCE,
                format!("{} random points, degree {}", points.len(), basis.degree()),
            ));
        }
        Surface::Fvs(s) => {
            items.push(CheckItem::measured(
                "fvs_element_residual",
                s.max_residual(),
                1e-10,
                "all element solves".into(),
            ));
            let (dv, dg) = s.junction_discrepancy(SCAN_SAMPLES);
            items.push(CheckItem::measured(
                "fvs_junction_c1",
                dv.max(dg),
                C1_TOLERANCE,
                format!("value {dv:e}, gradient {dg:e} across half-diagonals"),
            ));
        }
    }

    let (c0, c1) = continuity_scans(&cover, &surface, opts.tolerance.unwrap_or(C0_TOLERANCE));
    items.push(CheckItem::measured(
        "c0_scan",
        c0.max_value_discrepancy,
        c0.tolerance,
        format!("{} edges", c0.edges_scanned),
    ));
    if let Some(c1) = c1 {
        items.push(CheckItem::measured(
            "c1_scan",
            c1.max_gradient_discrepancy.unwrap_or(0.0),
            c1.tolerance,
            format!(
                "{} edges, {} ramification-incident (max {:e}, not asserted)",
                c1.edges_scanned,
                c1.ramification_incident_edges,
                c1.max_gradient_discrepancy_ramified.unwrap_or(0.0)
            ),
        ));
    }

    match tessellate_with(&cover, &surface, &opts.tessellation(&emb)) {
        Ok(mesh) => {
            items.push(CheckItem::flag(
                "weld",
                true,
                format!("{} vertices", mesh.positions.len()),
            ));
            let r = mesh_report(&mesh);
            items.push(CheckItem::flag(
                "mesh_manifold",
                r.closed && r.oriented,
                format!("closed {}, oriented {}", r.closed, r.oriented),
            ));
            items.push(CheckItem::flag(
                "genus_cross_check",
                r.genus == Some(topology.genus) && r.euler_characteristic == topology.euler_characteristic,
                format!(
                    "mesh chi {} genus {:?}; cover chi {} genus {}",
                    r.euler_characteristic, r.genus, topology.euler_characteristic, topology.genus
                ),
            ));
        }
        Err(e @ Error::Weld { .. }) => items.push(CheckItem::flag("weld", false, e.to_string())),
        Err(e) => return Err(e),
    }

    Ok(CheckReport {
        pass: items.iter().all(|i| i.pass),
        items,
    })
}

/// Parses an inclusive range `a..b`, `a..=b` or a single integer.
pub fn parse_range(text: &str) -> Result<RangeInclusive<u32>> {
    let bad = || Error::Argument(format!("invalid range {text:?}; expected a..b or a single integer"));
    let num = |s: &str| s.trim().parse::<u32>().map_err(|_| bad());
    let range = match text.split_once("..") {
        Some((a, b)) => num(a)?..=num(b.strip_prefix('=').unwrap_or(b))?,
        None => {
            let n = num(text)?;
            n..=n
        }
    };
    if range.is_empty() {
        return Err(bad());
    }
    Ok(range)
}

/// Dimension sweep as CSV.
pub fn run_confdim<W: Write>(
    n_forms: RangeInclusive<u32>,
    degrees: RangeInclusive<u32>,
    smoothness: RangeInclusive<u32>,
    out: W,
) -> Result<Vec<SweepRow>> {
    let rows = conformality_sweep(n_forms, degrees, smoothness)?;
    write_sweep_csv(&rows, out)?;
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TRIPLE: &str = include_str!("../configs/example3.json");
    const DOUBLE: &str = include_str!("../configs/example2.json");

    #[test]
    fn bundled_configs_match_builtin_examples() {
        let triple = RunConfig::from_json(TRIPLE).unwrap();
        assert_eq!(triple.cover_spec().unwrap(), BranchedCoverSpec::triple_example());
        let double = RunConfig::from_json(DOUBLE).unwrap();
        assert_eq!(double.cover_spec().unwrap(), BranchedCoverSpec::double_example());
        assert_eq!(double.spline, SplineConfig::Fvs);
        assert_eq!(triple.embedding(), EmbeddingConfig::stacked(3));
    }

    #[test]
    fn analyze_triple() {
        let r = run_analyze(&RunConfig::from_json(TRIPLE).unwrap()).unwrap();
        assert_eq!((r.topology.vertices, r.topology.genus), (1196, 3));
        assert_eq!(r.census[0].components, 1196);
        assert_eq!(r.census[1].components, 1184);
        assert!(r.riemann_hurwitz);
    }

    #[test]
    fn invalid_permutation_is_a_validation_error() {
        let text = TRIPLE.replace("[1, 2, 0]", "[1, 1, 0]");
        assert_ne!(text, TRIPLE);
        let cfg = RunConfig::from_json(&text).unwrap();
        assert!(matches!(run_analyze(&cfg), Err(Error::InvalidCover(_))));
    }

    #[test]
    fn malformed_config() {
        assert!(matches!(RunConfig::from_json("{\"grid\": 3}"), Err(Error::Json(_))));
        let tiny = TRIPLE.replace("\"width\": 20", "\"width\": 2");
        assert!(matches!(
            RunConfig::from_json(&tiny).unwrap().branched_cover(),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("2..4").unwrap(), 2..=4);
        assert_eq!(parse_range("0..=5").unwrap(), 0..=5);
        assert_eq!(parse_range("3").unwrap(), 3..=3);
        assert!(parse_range("4..2").is_err());
        assert!(parse_range("a..2").is_err());
    }

    #[test]
    fn sweep_row_count() {
        let mut csv = Vec::new();
        let rows = run_confdim(2..=4, 0..=5, 0..=3, &mut csv).unwrap();
        assert_eq!(rows.len(), 72);
        assert_eq!(String::from_utf8(csv).unwrap().lines().count(), 73);
    }

    #[test]
    fn check_flags_weld_fault_and_ignores_perturbation() {
        let cfg = RunConfig::from_json(TRIPLE).unwrap();
        let opts = RunOptions {
            degree: Some(1),
            density: Some(1),
            ..Default::default()
        };
        assert!(run_check(&cfg, &opts).unwrap().pass);
        let moved = RunOptions {
            perturb: Some((100, 10.0)),
            ..opts.clone()
        };
        assert!(run_check(&cfg, &moved).unwrap().pass);
        let broken = RunOptions {
            weld_fault: Some(1e-3),
            ..opts
        };
        let report = run_check(&cfg, &broken).unwrap();
        assert!(!report.pass);
        assert!(report.items.iter().any(|i| i.name == "weld" && !i.pass));
    }
}
