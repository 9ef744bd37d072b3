//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Regression constants are locked below.

mod common;

use std::f64::consts::PI;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use schottky_lab::beltrami::{
    beltrami_of_map, default_step, prop_invariant_check, pullback, wirtinger_fd, CoefficientField, ConstantField,
    FnField,
};
use schottky_lab::modulus::{
    circular_dilatation, dilatation_bounds, grotzsch_mu, superadditivity_margin, teichmuller_bound,
    teichmuller_witness, CircularAnnulus, Dilatation, Nesting,
};
use schottky_lab::quasihyperbolic::{
    geodesic_tail_check, layers_from_tree, monte_carlo_k_squared, qh_condition_functional, qh_distance, shadows,
    QhMetric, QhOptions,
};
use schottky_lab::schottky::{
    check_nesting, complement_disks, max_complement_disk_area, reference_two_disk, ReflectionExtension,
};
use schottky_lab::transboundary::{ray_angles, transboundary_estimate, EstimateGeometry};
use schottky_lab::whitney::{check_properties, decompose};
use schottky_lab::{CircleDomainConfig, Complex, Disk, Mobius};

/// Largest shadow-sum ratio Σs²/functional allowed on the suite.
const SHADOW_CONSTANT: f64 = 2.0;
/// Largest tail length times √j₀ on the reference config.
const TAIL_CONSTANT: f64 = 2.5;
/// Largest lhs/rhs over all radial and circular estimates.
const RADIAL_MAX_RATIO: f64 = 0.9;
const CIRCULAR_MAX_RATIO: f64 = 0.35;

const SUITE_LEVEL: u32 = 8;

type Check = (&'static str, fn() -> Verdict);

struct Verdict {
    pass: bool,
    detail: String,
}

impl Verdict {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self { pass, detail: detail.into() }
    }
}

fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Seeded unit-ball config with `n` disks of radius in `[0.05, 0.2]` and
/// gaps of at least 0.02.
fn random_config(seed: u64, n: usize) -> CircleDomainConfig {
    let mut rng = rng(seed);
    let mut disks: Vec<Disk> = Vec::new();
    while disks.len() < n {
        let r = rng.gen_range(0.05..0.2);
        let center = Complex::from_polar(rng.gen_range(0.0..1.0f64).sqrt() * (0.98 - r), rng.gen_range(0.0..PI * 2.0));
        if center.norm() - r < 0.1 {
            continue;
        }
        if disks.iter().all(|d| (d.center - center).norm() - d.radius - r >= 0.02) {
            disks.push(Disk { center, radius: r });
        }
    }
    CircleDomainConfig::new(1.0, disks, c(0.0, 0.0)).expect("valid config")
}

fn suite() -> Vec<CircleDomainConfig> {
    (0..10).map(|k| random_config(1000 + k, 1 + k as usize % 6)).collect()
}

fn random_mobius(rng: &mut ChaCha8Rng) -> Mobius {
    loop {
        let a = c(rng.gen_range(0.5..2.0), rng.gen_range(-1.0..1.0));
        let b = c(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
        let cc = c(rng.gen_range(-0.25..0.25), rng.gen_range(-0.25..0.25));
        let Ok(m) = Mobius::new(a, b, cc, c(1.0, 0.0)) else { continue };
        if m.pole().is_none_or(|p| p.norm() >= 2.0) {
            return m;
        }
    }
}

fn point_in(config: &CircleDomainConfig, rng: &mut ChaCha8Rng) -> Complex {
    let r = config.outer_radius;
    loop {
        let z = c(rng.gen_range(-r..r), rng.gen_range(-r..r));
        if config.contains(z) {
            return z;
        }
    }
}

fn image_config(config: &CircleDomainConfig, map: &Mobius) -> CircleDomainConfig {
    let disks = config
        .disks
        .iter()
        .map(|d| match schottky_lab::geometry::image_disk(map, d) {
            schottky_lab::ImageRegion::Disk(e) => e,
            other => panic!("disk maps to {other:?}"),
        })
        .collect();
    CircleDomainConfig { outer_radius: 10.0, disks, basepoint: map.apply(config.basepoint).unwrap() }
}

fn scaled(config: &CircleDomainConfig, s: f64) -> CircleDomainConfig {
    CircleDomainConfig {
        outer_radius: config.outer_radius * s,
        disks: config.disks.iter().map(|d| Disk { center: d.center * s, radius: d.radius * s }).collect(),
        basepoint: config.basepoint * s,
    }
}

fn whitney_suite() -> Verdict {
    let mut worst_time = Duration::ZERO;
    let mut violations = 0;
    let mut worst_area: f64 = 0.0;
    for k in 0..20u64 {
        let config = random_config(k, 1 + k as usize % 8);
        let start = Instant::now();
        let dec = decompose(&config, 9).unwrap();
        let report = check_properties(&dec);
        worst_time = worst_time.max(start.elapsed());
        violations += report.total_violations();
        worst_area = worst_area.max(report.area_residual / config.outer_radius.powi(2));
    }
    Verdict::new(
        violations == 0 && worst_area <= 1e-8 && worst_time <= Duration::from_secs(5),
        format!("20 configs at level 9: {violations} violations, area residual {worst_area:.1e}·R², slowest {worst_time:.2?}"),
    )
}

fn qh_oracle() -> Verdict {
    let unit = CircleDomainConfig::unit_ball();
    let unit_dec = decompose(&unit, 9).unwrap();
    let (mut worst, mut graph_only) = (0.0f64, Vec::new());
    for x in [0.3, 0.5, 0.7, 0.9f64] {
        let exact = -(1.0 - x).ln();
        let (d, _) = qh_distance(&unit, c(0.0, 0.0), c(x, 0.0), 9).unwrap();
        worst = worst.max((d / exact - 1.0).abs());
        let options = QhOptions { local_point_edges: false };
        let bare_metric = QhMetric::build_with(&unit_dec, &[c(0.0, 0.0), c(x, 0.0)], options).unwrap();
        let bare = bare_metric.distance(bare_metric.point_node(0), bare_metric.point_node(1)).unwrap();
        graph_only.push(format!("{:.1}%", 100.0 * (bare / exact - 1.0)));
    }
    let config = random_config(7, 4);
    let dec = decompose(&config, 8).unwrap();
    let mut r = rng(2);
    let points: Vec<Complex> = (0..60).map(|_| point_in(&config, &mut r)).collect();
    let metric = QhMetric::build(&dec, &points).unwrap();
    let dist: Vec<Vec<f64>> = (0..points.len())
        .map(|i| {
            let tree = metric.shortest_paths(metric.point_node(i));
            (0..points.len()).map(|j| tree.dist[metric.point_node(j)]).collect()
        })
        .collect();
    let (mut tri, mut sym) = (0usize, 0usize);
    for _ in 0..1000 {
        let (a, b, m) = (r.gen_range(0..60), r.gen_range(0..60), r.gen_range(0..60));
        tri += usize::from(dist[a][b] > dist[a][m] + dist[m][b] + 1e-9);
        sym += usize::from((dist[a][b] - dist[b][a]).abs() > 1e-9);
    }
    Verdict::new(
        worst <= 0.02 && tri == 0 && sym == 0,
        format!(
            "max relative error {worst:.2e} (cube graph alone: {}); 10³ triples: {tri} triangle, {sym} symmetry failures",
            graph_only.join(", ")
        ),
    )
}

fn functional_of(config: &CircleDomainConfig) -> (f64, f64) {
    let dec = decompose(config, SUITE_LEVEL).unwrap();
    let metric = QhMetric::build(&dec, &[config.basepoint]).unwrap();
    let tree = metric.shortest_paths(metric.point_node(0));
    let layers = layers_from_tree(&metric, &tree).unwrap();
    let f = qh_condition_functional(&dec, &layers);
    let mc = monte_carlo_k_squared(&metric, &tree, 4096, 1).unwrap();
    (f.value, mc)
}

fn condition_functional() -> Verdict {
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for config in suite() {
        let (f, mc) = functional_of(&config);
        lo = lo.min(mc / f);
        hi = hi.max(mc / f);
    }
    let config = random_config(1003, 3);
    let (base, _) = functional_of(&config);
    let mut scale_err: f64 = 0.0;
    for s in [0.3, 2.5, 7.0] {
        let (v, _) = functional_of(&scaled(&config, s));
        scale_err = scale_err.max((v / (s * s * base) - 1.0).abs());
    }
    Verdict::new(
        lo >= 1.0 / 8.0 && hi <= 8.0 && scale_err <= 1e-6,
        format!("MC/functional in [{lo:.3}, {hi:.3}] on 10 configs; scaling error {scale_err:.1e}"),
    )
}

fn shadow_sum() -> Verdict {
    let mut worst: f64 = 0.0;
    for config in suite() {
        let dec = decompose(&config, SUITE_LEVEL).unwrap();
        let metric = QhMetric::build(&dec, &[config.basepoint]).unwrap();
        let source = metric.point_node(0);
        let tree = metric.shortest_paths(source);
        let layers = layers_from_tree(&metric, &tree).unwrap();
        let f = qh_condition_functional(&dec, &layers);
        let report = shadows(&metric, source, 256).unwrap();
        worst = worst.max(report.sum_s_squared / f.value);
    }
    Verdict::new(worst <= SHADOW_CONSTANT, format!("max Σs²/functional {worst:.4} vs locked C = {SHADOW_CONSTANT}"))
}

fn tail_decay() -> Verdict {
    let config = reference_two_disk();
    let dec = decompose(&config, SUITE_LEVEL).unwrap();
    let metric = QhMetric::build(&dec, &[config.basepoint]).unwrap();
    let source = metric.point_node(0);
    let tree = metric.shortest_paths(source);
    let layers = layers_from_tree(&metric, &tree).unwrap();
    let report = shadows(&metric, source, 256).unwrap();
    let mut parts = Vec::new();
    let mut worst: f64 = 0.0;
    for j0 in [4u32, 9, 16, 25] {
        let longest =
            report.geodesics.iter().map(|g| geodesic_tail_check(g, &layers, j0).tail_length).fold(0.0, f64::max);
        let scaled = longest * (j0 as f64).sqrt();
        worst = worst.max(scaled);
        parts.push(format!("j0={j0}: {scaled:.4}"));
    }
    Verdict::new(
        worst <= TAIL_CONSTANT,
        format!("{} (max layer {}), locked {TAIL_CONSTANT}", parts.join(", "), layers.max_layer()),
    )
}

fn transboundary_estimates() -> Verdict {
    let mut configs = vec![reference_two_disk()];
    configs.extend((0..4).map(|k| random_config(500 + k, 2 + k as usize)));
    let mut r = rng(6);
    let (mut total, mut holds) = (0usize, 0usize);
    let (mut radial, mut circular) = (0.0f64, 0.0f64);
    for config in &configs {
        let dec = decompose(config, SUITE_LEVEL).unwrap();
        let map = random_mobius(&mut r);
        let x0 = config.basepoint;
        let reach = config.outer_radius - x0.norm();
        for theta in ray_angles(32) {
            let g = EstimateGeometry::Radial { center: x0, theta, start_radius: 0.0, end_radius: 2.0 * config.outer_radius };
            let e = transboundary_estimate(&dec, &map, g).unwrap();
            total += 1;
            holds += usize::from(e.lhs <= e.rhs);
            radial = radial.max(e.ratio);
        }
        for k in 1..=32 {
            let g = EstimateGeometry::Circular { center: x0, radius: reach * k as f64 / 33.0, depth: 1 };
            let e = transboundary_estimate(&dec, &map, g).unwrap();
            total += 1;
            holds += usize::from(e.lhs <= e.rhs);
            circular = circular.max(e.ratio);
        }
    }
    Verdict::new(
        holds == total && radial <= RADIAL_MAX_RATIO && circular <= CIRCULAR_MAX_RATIO,
        format!(
            "{holds}/{total} hold; max ratio radial {radial:.4} (locked {RADIAL_MAX_RATIO}), circular {circular:.4} (locked {CIRCULAR_MAX_RATIO})"
        ),
    )
}

fn schottky_suite() -> Verdict {
    let start = Instant::now();
    let mut count_failures = 0;
    let mut overlap = 0;
    for n in 1..=4usize {
        let config = random_config(300 + n as u64, n);
        for k in 0..=5usize {
            let expected = if k == 0 { n } else { n * (n - 1).pow(k as u32) };
            count_failures += usize::from(complement_disks(&config, k).unwrap().len() != expected);
            let nesting = check_nesting(&config, k).unwrap();
            overlap += nesting.overlapping_pairs + nesting.containment_failures;
        }
    }
    let config = reference_two_disk();
    let a0 = max_complement_disk_area(&config, 0).unwrap();
    let areas: Vec<f64> = (0..=12).map(|k| max_complement_disk_area(&config, k).unwrap()).collect();
    let decreasing = areas.windows(2).all(|w| w[1] < w[0]);
    let depth = areas.iter().position(|&a| a < 1e-6 * a0);
    let mut r = rng(8);
    let mut conj: f64 = 0.0;
    for seed in 0..3 {
        let config = random_config(40 + seed, 3);
        let map = random_mobius(&mut r);
        let ext = ReflectionExtension::new(&config, &image_config(&config, &map), map).unwrap();
        conj = conj.max(ext.conjugation_residual(4, 50, seed).unwrap().residual);
    }
    let elapsed = start.elapsed();
    Verdict::new(
        count_failures == 0
            && overlap == 0
            && decreasing
            && depth.is_some()
            && conj <= 1e-9
            && elapsed <= Duration::from_secs(30),
        format!(
            "count mismatches {count_failures}, overlaps {overlap}, area < 1e-6·initial at depth {depth:?}, conjugation {conj:.1e}, {elapsed:.2?}"
        ),
    )
}

fn modulus_suite() -> Verdict {
    let mut mu_err: f64 = 0.0;
    for i in 1..=50 {
        let x = i as f64 / 51.0;
        let xp = ((1.0 - x) * (1.0 + x)).sqrt();
        mu_err = mu_err.max((grotzsch_mu(x).unwrap() * grotzsch_mu(xp).unwrap() - PI * PI / 4.0).abs());
    }
    let mut r = rng(9);
    let a = CircularAnnulus::new(c(0.2, -0.1), 0.05, 3.0).unwrap();
    let mut min_margin = f64::INFINITY;
    for _ in 0..200 {
        let mut radii: Vec<f64> = (0..6).map(|_| 0.05 * 60f64.powf(r.gen_range(0.0..1.0))).collect();
        radii.sort_by(f64::total_cmp);
        let nested: Vec<CircularAnnulus> = radii
            .chunks_exact(2)
            .filter(|w| w[0] < w[1])
            .map(|w| CircularAnnulus::new(a.center, w[0], w[1]).unwrap())
            .collect();
        min_margin = min_margin.min(superadditivity_margin(&a, &nested, Nesting::Validate).unwrap());
    }
    let cuts = [0.05, 0.1, 0.4, 1.1, 3.0];
    let exact: Vec<CircularAnnulus> =
        cuts.windows(2).map(|w| CircularAnnulus::new(a.center, w[0], w[1]).unwrap()).collect();
    let exact_margin = superadditivity_margin(&a, &exact, Nesting::Validate).unwrap();
    let mut teich_failures = 0;
    for i in 0..10 {
        for j in 0..10 {
            let z1 = Complex::from_polar(0.05 + 0.1 * i as f64, 0.7 * i as f64);
            let z2 = Complex::from_polar(1.1 + 0.5 * j as f64, -1.3 * j as f64);
            let bound = teichmuller_bound(z1, z2).unwrap();
            teich_failures += usize::from(teichmuller_witness(z1, z2).unwrap().modulus() > bound);
        }
    }
    Verdict::new(
        mu_err <= 1e-9 && min_margin >= -1e-12 && exact_margin == 0.0 && teich_failures == 0,
        format!(
            "μ identity error {mu_err:.1e}; min margin {min_margin:.1e}; exact partition {exact_margin:e}; Teichmüller failures {teich_failures}/100"
        ),
    )
}

fn dilatation_suite() -> Verdict {
    let mut r = rng(10);
    let (mut raw, mut limit) = (0.0f64, 0.0f64);
    for _ in 0..10 {
        let m = random_mobius(&mut r);
        let z0 = point_in(&CircleDomainConfig::unit_ball(), &mut r) * 0.5;
        let report = circular_dilatation(|z| m.apply(z), z0, 1e-4 * 1024.0, 11, 64).unwrap();
        raw = raw.max(report.finest_ratio);
        limit = limit.max(report.limit_estimate);
    }
    let affine = circular_dilatation(|z| Ok(z + 0.2 * z.conj()), c(0.3, -0.1), 1e-4, 1, 64).unwrap();
    let affine_err = (affine.finest_ratio - 1.5).abs();
    let mut trip: f64 = 0.0;
    for i in 0..=300 {
        let k = 1.0 + i as f64 / 100.0;
        let Dilatation::Mu(m) = dilatation_bounds(Dilatation::K(k)).unwrap() else { unreachable!() };
        let Dilatation::K(back) = dilatation_bounds(Dilatation::Mu(m)).unwrap() else { unreachable!() };
        trip = trip.max((back - k).abs() / k);
    }
    Verdict::new(
        limit <= 1.0 + 1e-6 && affine_err <= 1e-9 && trip <= 1e-15,
        format!(
            "Möbius H at ρ=1e-4: limit estimate {:.1e} above 1 (raw ratio {:.1e} above 1); affine error {affine_err:.1e}; round trip {trip:.1e}",
            limit - 1.0,
            raw - 1.0
        ),
    )
}

fn beltrami_suite() -> Verdict {
    let mut r = rng(11);
    let wavy: Arc<dyn CoefficientField> = Arc::new(
        FnField::new(|z: Complex| Complex::from_polar(0.4, z.re * 3.0 - z.im) * (0.5 + 0.4 * z.norm().sin().abs()), 0.4)
            .unwrap(),
    );
    let constant: Arc<dyn CoefficientField> = Arc::new(ConstantField::new(c(0.0, 0.3)).unwrap());
    let (mut composition, mut zero) = (0.0f64, 0.0f64);
    for _ in 0..50 {
        let conformal = random_mobius(&mut r);
        let m = if r.gen_bool(0.5) { conformal.compose(&Mobius::conjugation()) } else { conformal };
        let g = Disk { center: c(r.gen_range(-0.5..0.5), r.gen_range(-0.5..0.5)), radius: r.gen_range(0.05..0.5) };
        let z = c(r.gen_range(-0.9..0.9), r.gen_range(-0.9..0.9));
        if (z - g.center).norm() < 1e-3 {
            continue;
        }
        for mu in [&wavy, &constant] {
            let lhs = pullback(&m.compose(&g.reflection()), mu.clone()).eval(z).unwrap();
            let rhs = pullback(&g.reflection(), Arc::new(pullback(&m, mu.clone()))).eval(z).unwrap();
            composition = composition.max((lhs - rhs).norm());
        }
        zero = zero.max(beltrami_of_map(|w| conformal.apply(w), z, default_step(z)).unwrap().norm());
    }
    let f = |z: Complex| z + 0.1 * z.conj().powi(3) * z * z + 0.05 * z.conj() * z.powi(3);
    let dzbar = |z: Complex| 0.3 * z.conj().powi(2) * z * z + 0.05 * z.powi(3);
    let z = c(0.6, -0.4);
    let err = |h: f64| (wirtinger_fd(|w| Ok(f(w)), z, h).unwrap().dzbar - dzbar(z)).norm();
    let order = (err(0.1) / err(0.05)).log2().min((err(0.05) / err(0.025)).log2());
    let mut prop: f64 = 0.0;
    for k in 0..10u64 {
        let config = random_config(100 + k, 1 + k as usize % 5);
        let map = random_mobius(&mut r);
        let samples: Vec<Complex> = (0..100).map(|_| point_in(&config, &mut r)).collect();
        let report = prop_invariant_check(&config, &map, 2, &samples).unwrap();
        prop = prop.max(report.max_conjugation_residual).max(report.invariance_residual).max(report.beltrami_max);
    }
    Verdict::new(
        composition <= 1e-10 && zero <= 1e-10 && order >= 2.0 && prop <= 1e-10,
        format!(
            "composition {composition:.1e}; Möbius μ {zero:.1e}; FD order {order:.2}; prop_invariant residual {prop:.1e}"
        ),
    )
}

fn cli_goldens(suite_start: Instant) -> Verdict {
    let tmp = tempfile::tempdir().unwrap();
    let cases = common::cases();
    let mut mismatched = Vec::new();
    for (name, code, args) in &cases {
        let first = common::run(args, tmp.path(), &format!("{name}_a"));
        let second = common::run(args, tmp.path(), &format!("{name}_b"));
        let golden = |ext: &str| std::fs::read_to_string(common::golden_dir().join(format!("{name}.{ext}"))).ok();
        let ok = first.code == *code
            && first.document.is_some()
            && first.document == second.document
            && first.scene == second.scene
            && first.document == golden("json")
            && first.scene.as_ref().is_none_or(|s| golden("svg").as_ref() == Some(s));
        if !ok {
            mismatched.push(*name);
        }
    }
    let elapsed = suite_start.elapsed();
    Verdict::new(
        mismatched.is_empty() && elapsed <= Duration::from_secs(300),
        format!("{} commands, mismatched {mismatched:?}; acceptance runtime {elapsed:.1?}", cases.len()),
    )
}

fn main() -> ExitCode {
    let start = Instant::now();
    let checks: [Check; 10] = [
        ("whitney", whitney_suite),
        ("quasihyperbolic oracle", qh_oracle),
        ("condition functional", condition_functional),
        ("shadow sum", shadow_sum),
        ("tail decay", tail_decay),
        ("transboundary", transboundary_estimates),
        ("schottky", schottky_suite),
        ("modulus", modulus_suite),
        ("dilatation", dilatation_suite),
        ("beltrami", beltrami_suite),
    ];
    let mut failed = 0;
    let mut report = |n: usize, name: &str, v: Verdict| {
        failed += usize::from(!v.pass);
        println!("criterion {n}: {} - {name}: {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
    };
    for (i, (name, check)) in checks.into_iter().enumerate() {
        report(i + 1, name, check());
    }
    report(11, "cli", cli_goldens(start));
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
