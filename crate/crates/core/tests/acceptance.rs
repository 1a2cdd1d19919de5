//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::{Duration, Instant};

use branched_splines::analyzer::{numeric_smoothness_scan, EdgeSamplePlan, SweepRow};
use branched_splines::base_splines::TorusGrid;
use branched_splines::branched_basis::{enumerate_components, BranchedSpline};
use branched_splines::cover::{validate_cover, BranchedCover, BranchedCoverSpec, CutCrossing, Direction, Permutation};
use branched_splines::fvs::{build_fvs_surface, FvsDofs, FvsQuad, FvsSolver};
use branched_splines::geometry::{
    export_obj, mesh_report, read_obj, sample_control_net, tessellate, EmbeddingConfig, QuadMesh,
};
use branched_splines::pipeline::{partition_of_unity_error, random_cover_points, run_analyze, run_confdim, RunConfig};
use common::RawCover;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn config(name: &str) -> RunConfig {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name);
    RunConfig::load(&path).expect("bundled config loads")
}

fn within(start: Instant, limit: Duration, what: &str) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < limit, format!("{what} took {t:.2?}, limit {limit:.0?}"))
}

fn topology_triple() -> Outcome {
    let start = Instant::now();
    let cfg = config("example3.json");
    let r = run_analyze(&cfg).map_err(|e| e.to_string())?;
    within(start, Duration::from_secs(1), "analysis")?;
    let t = &r.topology;
    ensure(
        (t.vertices, t.edges, t.faces, t.euler_characteristic, t.genus) == (1196, 2400, 1200, -4, 3),
        format!("{t:?}"),
    )?;
    let indices: Vec<_> = t.ramification.iter().map(|p| p.indices.clone()).collect();
    ensure(indices == vec![vec![3], vec![3]], format!("ramification {indices:?}"))?;
    let oracle = RawCover::new(&cfg.cover_spec().unwrap()).vertex_count();
    ensure(oracle == t.vertices, format!("reference vertex count {oracle}"))?;
    Ok(format!(
        "V'=1196 E'=2400 F'=1200 chi=-4 g=3, two index-3 points, {:.2?}",
        start.elapsed()
    ))
}

fn topology_double() -> Outcome {
    let start = Instant::now();
    let cfg = config("example2.json");
    let t = run_analyze(&cfg).map_err(|e| e.to_string())?.topology;
    within(start, Duration::from_secs(1), "analysis")?;
    ensure((t.euler_characteristic, t.genus) == (-2, 2), format!("{t:?}"))?;
    let oracle = RawCover::new(&cfg.cover_spec().unwrap()).euler_characteristic();
    ensure(oracle == -2, format!("reference chi {oracle}"))?;
    Ok(format!("chi=-2 g=2, {:.2?}", start.elapsed()))
}

fn basis_census() -> Outcome {
    let spec = BranchedCoverSpec::triple_example();
    let cover = BranchedCover::new(spec.clone()).map_err(|e| e.to_string())?;
    let raw = RawCover::new(&spec);
    let mut counts = Vec::new();
    for (degree, expected) in [(1, 1196), (2, 1184)] {
        let n = enumerate_components(&cover, degree).map_err(|e| e.to_string())?.len();
        let oracle = raw.lifted_basis_count(degree);
        ensure(
            n == expected && oracle == expected,
            format!("degree {degree}: library {n}, reference {oracle}, expected {expected}"),
        )?;
        counts.push(n);
    }
    ensure(counts[0] == cover.topology().vertices, "degree-1 count differs from V'")?;
    Ok(format!(
        "degree 1: {}, degree 2: {} (reference enumeration agrees)",
        counts[0], counts[1]
    ))
}

fn examples() -> [(&'static str, BranchedCover); 2] {
    [
        (
            "triple",
            BranchedCover::new(BranchedCoverSpec::triple_example()).unwrap(),
        ),
        (
            "double",
            BranchedCover::new(BranchedCoverSpec::double_example()).unwrap(),
        ),
    ]
}

fn partition_of_unity() -> Outcome {
    let mut worst = 0.0f64;
    for (name, cover) in examples() {
        let points = random_cover_points(&cover, 10_000, 7);
        for degree in [1, 2] {
            let basis = enumerate_components(&cover, degree).map_err(|e| e.to_string())?;
            let err = partition_of_unity_error(&basis, &points).map_err(|e| e.to_string())?;
            ensure(err <= 1e-12, format!("{name} degree {degree}: {err:e}"))?;
            worst = worst.max(err);
        }
    }
    Ok(format!(
        "max |sum B - 1| = {worst:e} over 10^4 points x 2 degrees x 2 covers"
    ))
}

fn smoothness_scans() -> Outcome {
    let mut lines = Vec::new();
    for (name, cover) in examples() {
        let plan = EdgeSamplePlan::all_edges(&cover, 5);
        let emb = EmbeddingConfig::stacked(cover.sheets());
        for degree in [1, 2] {
            let basis = enumerate_components(&cover, degree).map_err(|e| e.to_string())?;
            let net = sample_control_net(&basis, &emb).map_err(|e| e.to_string())?;
            let spline = BranchedSpline::new(&basis, &net.points).map_err(|e| e.to_string())?;
            let c0 = numeric_smoothness_scan(&cover, &spline, &plan, 0, 1e-10);
            ensure(
                c0.pass,
                format!("{name} degree {degree} C0 {:e}", c0.max_value_discrepancy),
            )?;
            let mut line = format!("{name} d{degree}: C0 {:.1e}", c0.max_value_discrepancy);
            if degree == 2 {
                let c1 = numeric_smoothness_scan(&cover, &spline, &plan, 1, 1e-8);
                ensure(c1.pass, format!("{name} degree 2 C1 {:?}", c1.max_gradient_discrepancy))?;
                line += &format!(
                    " C1 {:.1e} (ramification-incident {:.1e} over {} edges)",
                    c1.max_gradient_discrepancy.unwrap_or(0.0),
                    c1.max_gradient_discrepancy_ramified.unwrap_or(0.0),
                    c1.ramification_incident_edges
                );
            }
            lines.push(line);
        }
    }
    let double = BranchedCover::new(BranchedCoverSpec::double_example()).unwrap();
    let fvs = build_fvs_surface(&double, &EmbeddingConfig::stacked(2)).map_err(|e| e.to_string())?;
    let plan = EdgeSamplePlan::all_edges(&double, 5);
    let c0 = numeric_smoothness_scan(&double, &fvs, &plan, 0, 1e-10);
    let c1 = numeric_smoothness_scan(&double, &fvs, &plan, 1, 1e-8);
    let (jv, jg) = fvs.junction_discrepancy(5);
    ensure(
        c0.pass && c1.pass,
        format!(
            "fvs C0 {:e} C1 {:?}",
            c0.max_value_discrepancy, c1.max_gradient_discrepancy
        ),
    )?;
    ensure(
        jv <= 1e-10 && jg <= 1e-8,
        format!("fvs half-diagonal jumps {jv:e} {jg:e}"),
    )?;
    lines.push(format!(
        "fvs: C0 {:.1e} C1 {:.1e} (ramification-incident {:.1e}), half-diagonals {:.1e}",
        c0.max_value_discrepancy,
        c1.max_gradient_discrepancy.unwrap_or(0.0),
        c1.max_gradient_discrepancy_ramified.unwrap_or(0.0),
        jg
    ));
    Ok(lines.join("; "))
}

fn reread(mesh: &QuadMesh) -> Result<QuadMesh, String> {
    let mut bytes = Vec::new();
    export_obj(mesh, &mut bytes, true).map_err(|e| e.to_string())?;
    read_obj(bytes.as_slice()).map_err(|e| e.to_string())
}

fn mesh_validity() -> Outcome {
    let mut times = Vec::new();
    let triple = BranchedCover::new(BranchedCoverSpec::triple_example()).unwrap();
    let double = BranchedCover::new(BranchedCoverSpec::double_example()).unwrap();
    let basis3 = enumerate_components(&triple, 2).map_err(|e| e.to_string())?;
    let net3 = sample_control_net(&basis3, &EmbeddingConfig::stacked(3)).map_err(|e| e.to_string())?;
    let spline3 = BranchedSpline::new(&basis3, &net3.points).map_err(|e| e.to_string())?;
    for k in [1, 2, 4] {
        let start = Instant::now();
        let mesh = reread(&tessellate(&triple, &spline3, k).map_err(|e| e.to_string())?)?;
        let r = mesh_report(&mesh);
        ensure(
            r.closed && r.oriented && r.genus == Some(3),
            format!("triple k={k}: {r:?}"),
        )?;
        within(start, Duration::from_secs(30), &format!("triple k={k}"))?;
        times.push(format!("g3 k={k} {:.2?}", start.elapsed()));
    }
    for k in [1, 2, 4] {
        let start = Instant::now();
        let fvs = build_fvs_surface(&double, &EmbeddingConfig::stacked(2)).map_err(|e| e.to_string())?;
        let mesh = reread(&tessellate(&double, &fvs, k).map_err(|e| e.to_string())?)?;
        let r = mesh_report(&mesh);
        ensure(
            r.closed && r.oriented && r.genus == Some(2),
            format!("double k={k}: {r:?}"),
        )?;
        within(start, Duration::from_secs(30), &format!("double k={k}"))?;
        times.push(format!("g2 k={k} {:.2?}", start.elapsed()));
    }
    Ok(format!(
        "closed, oriented, genus 3 / 2 at k = 1, 2, 4 ({})",
        times.join(", ")
    ))
}

fn conformality_sweep() -> Outcome {
    let dir = std::env::temp_dir().join(format!("branched-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let path = dir.join("confdim.csv");
    let file = std::fs::File::create(&path).map_err(|e| e.to_string())?;
    let rows = run_confdim(2..=4, 0..=6, 0..=5, file).map_err(|e| e.to_string())?;
    let rows: Vec<&SweepRow> = rows.iter().filter(|r| r.smoothness < r.degree).collect();
    let csv = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
    std::fs::remove_dir_all(&dir).ok();
    ensure(csv.starts_with("N,n,r,oracle_dim,formula_A,formula_B"), "csv header")?;
    let find = |n_forms, degree, smoothness| {
        rows.iter()
            .find(|r| (r.n_forms, r.degree, r.smoothness) == (n_forms, degree, smoothness))
            .map(|r| r.oracle_dim)
    };
    ensure(find(2, 1, 0) == Some(0), format!("(2,1,0) -> {:?}", find(2, 1, 0)))?;
    ensure(find(3, 3, 1) == Some(2), format!("(3,3,1) -> {:?}", find(3, 3, 1)))?;
    let a = rows.iter().filter(|r| r.agree_a()).count();
    let b = rows.iter().filter(|r| r.agree_b()).count();
    Ok(format!(
        "{} cases with 0 <= r < n <= 6, anchors exact; formula A agrees {a}/{n}, formula B {b}/{n}",
        rows.len(),
        n = rows.len()
    ))
}

fn random_convex_quad(rng: &mut ChaCha8Rng) -> FvsQuad {
    loop {
        let center = [rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)];
        let scale = rng.gen_range(0.2..3.0);
        let corners = std::array::from_fn(|k| {
            let angle = k as f64 * std::f64::consts::FRAC_PI_2 + rng.gen_range(-0.6..0.6);
            let radius = scale * rng.gen_range(0.4..1.6);
            [center[0] + radius * angle.cos(), center[1] + radius * angle.sin()]
        });
        if let Ok(q) = FvsQuad::new(corners) {
            return q;
        }
    }
}

fn fvs_patch_test() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let exps: Vec<(i32, i32)> = (0..=3).flat_map(|a| (0..=3 - a).map(move |b| (a, b))).collect();
    let (mut worst_value, mut worst_round_trip) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let quad = random_convex_quad(&mut rng);
        let coefs: Vec<f64> = exps.iter().map(|_| rng.gen_range(-1.0..1.0)).collect();
        let cubic = |p: [f64; 2]| {
            let (mut v, mut g) = (0.0, [0.0, 0.0]);
            for (&(a, b), c) in exps.iter().zip(&coefs) {
                v += c * p[0].powi(a) * p[1].powi(b);
                if a > 0 {
                    g[0] += c * a as f64 * p[0].powi(a - 1) * p[1].powi(b);
                }
                if b > 0 {
                    g[1] += c * b as f64 * p[0].powi(a) * p[1].powi(b - 1);
                }
            }
            (v, g)
        };
        let solver = FvsSolver::new(quad).map_err(|e| e.to_string())?;
        let elem = solver.solve(&FvsDofs::sample(&quad.corners, cubic));
        let c = quad.corners;
        for _ in 0..50 {
            let (s, t): (f64, f64) = (rng.gen_range(0.01..0.99), rng.gen_range(0.01..0.99));
            let p = std::array::from_fn(|k| {
                (1.0 - t) * ((1.0 - s) * c[0][k] + s * c[1][k]) + t * ((1.0 - s) * c[3][k] + s * c[2][k])
            });
            let (v, _) = elem.eval(p).map_err(|e| e.to_string())?;
            worst_value = worst_value.max((v - cubic(p).0).abs());
        }
        let dofs = FvsDofs {
            values: std::array::from_fn(|_| rng.gen_range(-1.0..1.0)),
            gradients: std::array::from_fn(|_| [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]),
            normal_derivatives: std::array::from_fn(|_| rng.gen_range(-1.0..1.0)),
        };
        let back = solver.solve(&dofs).extract_dofs();
        for i in 0..4 {
            worst_round_trip = worst_round_trip
                .max((back.values[i] - dofs.values[i]).abs())
                .max((back.gradients[i][0] - dofs.gradients[i][0]).abs())
                .max((back.gradients[i][1] - dofs.gradients[i][1]).abs())
                .max((back.normal_derivatives[i] - dofs.normal_derivatives[i]).abs());
        }
    }
    ensure(
        worst_value <= 1e-10,
        format!("cubic reproduction error {worst_value:e}"),
    )?;
    ensure(
        worst_round_trip <= 1e-10,
        format!("DOF round trip error {worst_round_trip:e}"),
    )?;
    Ok(format!(
        "cubic error {worst_value:.1e} at 5000 points, DOF round trip {worst_round_trip:.1e}, 100 quads"
    ))
}

/// A random cut system made of straight slits, each carrying one permutation.
fn random_cut_system(rng: &mut ChaCha8Rng) -> Option<BranchedCoverSpec> {
    let grid = TorusGrid::new(rng.gen_range(4..=12), rng.gen_range(4..=12)).unwrap();
    let sheets = rng.gen_range(1..=4);
    let mut crossings: Vec<CutCrossing> = Vec::new();
    for _ in 0..rng.gen_range(1..=3) {
        let mut images: Vec<usize> = (0..sheets).collect();
        images.shuffle(rng);
        let permutation = Permutation::new(images).unwrap();
        let vertical = rng.gen_bool(0.5);
        let (along, across) = if vertical {
            (grid.height(), grid.width())
        } else {
            (grid.width(), grid.height())
        };
        let line = rng.gen_range(0..across);
        let first = rng.gen_range(0..along);
        for step in 0..rng.gen_range(1..along) {
            let t = (first + step) % along;
            let (cell, direction) = if vertical {
                (grid.offset((line, t), -1, 0), Direction::PlusX)
            } else {
                (grid.offset((t, line), 0, -1), Direction::PlusY)
            };
            if crossings.iter().any(|c| c.cell == cell && c.direction == direction) {
                return None;
            }
            crossings.push(CutCrossing {
                cell,
                direction,
                permutation: permutation.clone(),
            });
        }
    }
    let spec = BranchedCoverSpec {
        grid,
        sheets,
        crossings,
    };
    validate_cover(&spec).is_empty().then_some(spec)
}

fn riemann_hurwitz() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut tested, mut attempts, mut ramified, mut max_genus) = (0, 0, 0, 0);
    while tested < 200 {
        attempts += 1;
        ensure(attempts < 100_000, "could not generate enough valid cut systems")?;
        let Some(spec) = random_cut_system(&mut rng) else {
            continue;
        };
        let cover = BranchedCover::new(spec.clone()).map_err(|e| e.to_string())?;
        let t = cover.topology();
        let total = t.total_ramification() as i64;
        ensure(
            2 * t.genus - 2 == total,
            format!("2g-2 = {} but ramification {total} for {spec:?}", 2 * t.genus - 2),
        )?;
        let chi = RawCover::new(&spec).euler_characteristic();
        ensure(
            chi == t.euler_characteristic,
            format!("chi {} vs reference {chi} for {spec:?}", t.euler_characteristic),
        )?;
        ramified += usize::from(total > 0);
        max_genus = max_genus.max(t.genus);
        tested += 1;
    }
    Ok(format!(
        "200 cut systems ({ramified} ramified, genus up to {max_genus}), reference chi agrees"
    ))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("topology of the triple cover", topology_triple),
        ("topology of the double cover", topology_double),
        ("basis census", basis_census),
        ("partition of unity", partition_of_unity),
        ("smoothness scans", smoothness_scans),
        ("mesh validity", mesh_validity),
        ("conformality dimension sweep", conformality_sweep),
        ("FVS patch test and unisolvence", fvs_patch_test),
        ("Riemann-Hurwitz property", riemann_hurwitz),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let t = start.elapsed();
        match outcome {
            Ok(detail) => println!("PASS {}. {name}: {detail} [{t:.2?}]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {}. {name}: {detail} [{t:.2?}]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
