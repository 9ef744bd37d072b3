//! Command implementations.

use std::collections::BTreeMap;
use std::sync::Arc;

use schottky_lab::beltrami::{
    invariance_residual, prop_invariant_check, pullback, CoefficientField, ConstantField, Symmetrized, ZeroField,
};
use schottky_lab::geometry::image_disk;
use schottky_lab::modulus::{
    circular_dilatation, dilatation_bounds, fatness_check, grotzsch_mu, koebe_distortion_check, superadditivity_margin,
    teichmuller_bound, teichmuller_witness, CircularAnnulus, Dilatation, Nesting, Shape,
};
use schottky_lab::quasihyperbolic::{
    geodesic_tail_check, layers_from_tree, monte_carlo_k_squared, qh_condition_functional, shadows, QhMetric,
};
use schottky_lab::schottky::{
    check_nesting, complement_disks, omega_samples, word_count, ReflectionExtension, DEFAULT_BUDGET,
};
use schottky_lab::transboundary::{
    chain_decompose, chain_diameter_bound_mobius, ray_angles, transboundary_estimate, EstimateGeometry,
};
use schottky_lab::whitney::{adjacency_check, check_properties, decompose};
use schottky_lab::{CircleDomainConfig, Complex, Disk, ImageRegion, Mobius};
use serde_json::{json, Value};

use crate::generate::{random_packing, sierpinski_type, PackingParams, SierpinskiParams};
use crate::report::{complex, num, ResultDocument};
use crate::scene::{Primitive, Scene};
use crate::spec::DomainSpec;
use crate::{ChainArgs, CliError, Command, Common, GenerateArgs, Outcome, QhArgs, EXIT_INVALID, EXIT_OK};

pub const DEFAULT_MAX_LEVEL: u32 = 7;
pub const TAIL_LAYERS: [u32; 4] = [4, 9, 16, 25];

pub fn execute(command: &Command) -> Result<Outcome, CliError> {
    match command {
        Command::Validate(c) => validate(c),
        Command::Whitney(c) => whitney(c),
        Command::Qh(a) => qh(a),
        Command::Shadows(c) => shadow_command(c),
        Command::Chains(a) => chains(a),
        Command::Schottky(c) => schottky(c),
        Command::Modulus(c) => modulus(c),
        Command::Beltrami(c) => beltrami(c),
        Command::Generate(a) => generate(a),
    }
}

/// `x0`, `a+bi`, `a-bi`, `bi`, `a` or `a,b`.
pub fn parse_point(text: &str, basepoint: Complex) -> Result<Complex, CliError> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || CliError::Usage(format!("cannot parse point {text:?}"));
    if t == "x0" {
        return Ok(basepoint);
    }
    if let Some((a, b)) = t.split_once(',') {
        return Ok(Complex::new(a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?));
    }
    let Some(body) = t.strip_suffix('i') else {
        return Ok(Complex::new(t.parse().map_err(|_| bad())?, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => "1",
        "-" => "-1",
        s => s,
    };
    Ok(Complex::new(re.parse().map_err(|_| bad())?, im.parse().map_err(|_| bad())?))
}

fn load(common: &Common) -> Result<(DomainSpec, CircleDomainConfig), CliError> {
    let path = common.spec.as_ref().ok_or_else(|| CliError::Usage("--spec PATH is required".into()))?;
    let spec = DomainSpec::read(path)?;
    let config = spec.to_config()?;
    Ok((spec, config))
}

fn document(command: &str, spec: &DomainSpec) -> ResultDocument {
    let mut doc = ResultDocument::new(command);
    doc.input("spec", spec.to_value());
    doc
}

fn domain_scene(config: &CircleDomainConfig) -> Scene {
    let mut scene = Scene::new(config.outer_radius);
    let layer = scene.layer("domain", "black", "none");
    layer.items.push(Primitive::Circle { center: Complex::new(0.0, 0.0), radius: config.outer_radius });
    for d in &config.disks {
        layer.items.push(Primitive::Circle { center: d.center, radius: d.radius });
    }
    scene
}

fn finish_scene(mut scene: Scene, config: &CircleDomainConfig, common: &Common) -> Result<Option<String>, CliError> {
    if common.scene.is_none() {
        return Ok(None);
    }
    let labels = scene.layer("annotations", "none", "black");
    labels.items.push(Primitive::Points(vec![config.basepoint]));
    labels.items.push(Primitive::Label { at: config.basepoint, text: "x0".into() });
    scene.to_svg().map(Some)
}

fn ok(doc: ResultDocument, scene: Option<String>) -> Outcome {
    Outcome { document: doc.to_json(), scene, exit_code: EXIT_OK }
}

/// Fixed Möbius test map with its pole at `−4R`, outside the closed ball.
pub fn test_map(config: &CircleDomainConfig) -> Mobius {
    let r = config.outer_radius;
    Mobius::new(
        Complex::new(1.0, 0.0),
        Complex::new(0.2 * r, 0.0),
        Complex::new(0.25 / r, 0.0),
        Complex::new(1.0, 0.0),
    )
    .expect("nondegenerate")
}

/// Images of the disks of `config` under a map whose pole avoids the
/// closed disks.
pub fn image_config(config: &CircleDomainConfig, map: &Mobius) -> Result<CircleDomainConfig, CliError> {
    let mut disks = Vec::with_capacity(config.disks.len());
    for (j, d) in config.disks.iter().enumerate() {
        match image_disk(map, d) {
            ImageRegion::Disk(img) => disks.push(img),
            other => return Err(CliError::Failure(format!("disk {j} maps to {other:?}"))),
        }
    }
    let basepoint = map.apply(config.basepoint)?;
    let reach = disks.iter().map(|d| d.center.norm() + d.radius).fold(basepoint.norm(), f64::max);
    Ok(CircleDomainConfig { outer_radius: 2.0 * reach.max(config.outer_radius), disks, basepoint })
}

fn validate(common: &Common) -> Result<Outcome, CliError> {
    let path = common.spec.as_ref().ok_or_else(|| CliError::Usage("--spec PATH is required".into()))?;
    let spec = DomainSpec::read(path)?;
    let config = spec.to_config_unchecked();
    let violations: Vec<String> = config.validate().iter().map(|v| v.to_string()).collect();
    let mut doc = document("validate", &spec);
    doc.measure("valid", violations.is_empty())
        .measure("violations", violations.clone())
        .measure("disk_count", config.disks.len());
    if violations.is_empty() {
        let mut min_gap = f64::INFINITY;
        for (i, a) in config.disks.iter().enumerate() {
            min_gap = min_gap.min(config.outer_radius - a.center.norm() - a.radius);
            for b in &config.disks[i + 1..] {
                min_gap = min_gap.min(a.gap(b));
            }
        }
        doc.measure("area", num(config.area()))
            .measure("min_gap", num(min_gap))
            .measure("basepoint_boundary_distance", num(config.boundary_distance(config.basepoint)?));
    }
    let scene = finish_scene(domain_scene(&config), &config, common)?;
    Ok(Outcome {
        document: doc.to_json(),
        scene,
        exit_code: if violations.is_empty() { EXIT_OK } else { EXIT_INVALID },
    })
}

fn whitney(common: &Common) -> Result<Outcome, CliError> {
    let (spec, config) = load(common)?;
    let max_level = common.max_level.unwrap_or(8);
    let dec = decompose(&config, max_level)?;
    let props = check_properties(&dec);
    let adj = adjacency_check(&dec);
    let mut per_level: BTreeMap<String, usize> = BTreeMap::new();
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for c in dec.cubes() {
        *per_level.entry(format!("{:02}", c.id.level)).or_default() += 1;
        lo = lo.min(c.distance_ratio());
        hi = hi.max(c.distance_ratio());
    }
    let mut doc = document("whitney", &spec);
    doc.param("max_level", max_level)
        .measure("cube_count", dec.len())
        .measure("cubes_per_level", json!(per_level))
        .measure("property_violations", props.total_violations())
        .measure("overlap_violations", props.overlap_violations)
        .measure("distance_violations", props.distance_violations)
        .measure("containment_violations", props.containment_violations)
        .measure("ratio_violations", props.ratio_violations)
        .measure("covered_area", num(dec.covered_area()))
        .measure("domain_area", num(config.area()))
        .residual("uncovered_area", num(dec.uncovered_area()))
        .residual("frontier_area", num(dec.frontier_area()))
        .residual("area_residual", num(props.area_residual))
        .constant("max_adjacent_side_ratio", num(adj.max_side_ratio))
        .constant("min_neighbors", adj.min_neighbors)
        .constant("max_neighbors", adj.max_neighbors)
        .constant("min_distance_over_side", num(lo))
        .constant("max_distance_over_side", num(hi));
    let mut scene = domain_scene(&config);
    let layer = scene.layer("cubes", "steelblue", "none");
    for c in dec.cubes() {
        layer.items.push(Primitive::Square { lo: c.square.lo, side: c.side });
    }
    let scene = finish_scene(scene, &config, common)?;
    Ok(ok(doc, scene))
}

fn qh(args: &QhArgs) -> Result<Outcome, CliError> {
    let (spec, config) = load(&args.common)?;
    let from = parse_point(&args.from, config.basepoint)?;
    let to = parse_point(&args.to, config.basepoint)?;
    for p in [from, to] {
        config.boundary_distance(p)?;
    }
    let max_level = args.common.max_level.unwrap_or(8);
    let dec = decompose(&config, max_level)?;
    let metric = QhMetric::build(&dec, &[from, to])?;
    let g = metric.geodesic(metric.point_node(0), metric.point_node(1))?;
    let mut doc = document("qh", &spec);
    doc.input("from", complex(from))
        .input("to", complex(to))
        .param("max_level", max_level)
        .measure("distance", num(g.qh_length))
        .measure("euclidean_length", num(g.euclidean_length))
        .measure("geodesic_vertices", g.vertices.len())
        .measure("cubes_visited", g.cubes().len())
        .residual("finest_side", num(dec.finest_side()))
        .residual("uncovered_area", num(dec.uncovered_area()));
    let mut scene = domain_scene(&config);
    scene.layer("geodesic", "crimson", "none").items.push(Primitive::Polyline(g.vertices.clone()));
    let scene = finish_scene(scene, &config, &args.common)?;
    Ok(ok(doc, scene))
}

fn shadow_command(common: &Common) -> Result<Outcome, CliError> {
    let (spec, config) = load(common)?;
    let max_level = common.max_level.unwrap_or(DEFAULT_MAX_LEVEL);
    let n = common.samples.unwrap_or(256);
    let seed = common.seed.unwrap_or(0);
    let dec = decompose(&config, max_level)?;
    let metric = QhMetric::build(&dec, &[config.basepoint])?;
    let source = metric.point_node(0);
    let tree = metric.shortest_paths(source);
    let layers = layers_from_tree(&metric, &tree)?;
    let functional = qh_condition_functional(&dec, &layers);
    let mc_samples = 16 * n;
    let mc = monte_carlo_k_squared(&metric, &tree, mc_samples, seed)?;
    let report = shadows(&metric, source, n)?;
    let mut tails = serde_json::Map::new();
    let mut tail_constant: f64 = 0.0;
    for j0 in TAIL_LAYERS {
        let longest = report
            .geodesics
            .iter()
            .map(|g| geodesic_tail_check(g, &layers, j0).tail_length)
            .fold(0.0, f64::max);
        let scaled = longest * (j0 as f64).sqrt();
        tail_constant = tail_constant.max(scaled);
        tails.insert(format!("{j0:02}"), json!({ "max_tail_length": num(longest), "scaled": num(scaled) }));
    }
    let layer_counts: BTreeMap<String, usize> =
        (1..=layers.max_layer()).map(|j| (format!("{j:03}"), layers.j.iter().filter(|&&v| v == j).count())).collect();
    let mut doc = document("shadows", &spec);
    doc.param("max_level", max_level)
        .param("boundary_samples", n)
        .param("monte_carlo_samples", mc_samples)
        .param("seed", seed)
        .measure("functional", num(functional.value))
        .measure("monte_carlo_integral", num(mc))
        .measure("max_layer", functional.max_layer)
        .measure("cubes_per_layer", json!(layer_counts))
        .measure("sum_s_squared", num(report.sum_s_squared))
        .measure("shadow_count", report.entries.len())
        .measure("tails", Value::Object(tails))
        .residual("functional_residual_estimate", num(functional.residual_estimate))
        .residual("uncovered_area", num(dec.uncovered_area()))
        .residual("resolution", num(report.resolution))
        .constant("shadow_constant", num(report.sum_s_squared / functional.value))
        .constant("monte_carlo_over_functional", num(mc / functional.value))
        .constant("tail_constant", num(tail_constant));
    let mut scene = domain_scene(&config);
    let layer = scene.layer("geodesics", "crimson", "none");
    for g in report.geodesics.iter().step_by(8) {
        layer.items.push(Primitive::Polyline(g.vertices.clone()));
    }
    scene.layer("boundary_samples", "none", "navy").items.push(Primitive::Points(report.samples.clone()));
    let scene = finish_scene(scene, &config, common)?;
    Ok(ok(doc, scene))
}

fn chains(args: &ChainArgs) -> Result<Outcome, CliError> {
    let (spec, config) = load(&args.common)?;
    let common = &args.common;
    let max_level = common.max_level.unwrap_or(DEFAULT_MAX_LEVEL);
    let rays = common.samples.unwrap_or(32);
    let depth = common.depth.unwrap_or(1);
    let tol = common.tol.unwrap_or(1e-9 * config.outer_radius);
    let dec = decompose(&config, max_level)?;
    let map = test_map(&config);
    let x0 = config.basepoint;
    let radial_geometries: Vec<EstimateGeometry> = ray_angles(rays)
        .into_iter()
        .map(|theta| EstimateGeometry::Radial {
            center: x0,
            theta,
            start_radius: 0.0,
            end_radius: 2.0 * config.outer_radius,
        })
        .collect();
    let reach = config.outer_radius - x0.norm();
    let circular_geometries: Vec<EstimateGeometry> = (1..=rays)
        .map(|k| EstimateGeometry::Circular { center: x0, radius: reach * k as f64 / (rays + 1) as f64, depth })
        .collect();
    let summarize = |gs: &[EstimateGeometry]| -> Result<Value, CliError> {
        let reports = schottky_lab::par::map(gs, |g| transboundary_estimate(&dec, &map, *g));
        let (mut holds, mut max_ratio, mut components) = (0usize, 0.0f64, 0usize);
        for r in reports {
            let r = r?;
            holds += usize::from(r.lhs <= r.rhs);
            max_ratio = max_ratio.max(r.ratio);
            components += r.components;
        }
        Ok(json!({ "count": gs.len(), "holds": holds, "max_ratio": num(max_ratio), "components_crossed": components }))
    };
    let radial = summarize(&radial_geometries)?;
    let circular = summarize(&circular_geometries)?;
    let mut doc = document("chains", &spec);
    doc.param("max_level", max_level)
        .param("rays", rays)
        .param("circles", rays)
        .param("depth", depth)
        .param("tol", num(tol))
        .input("map", json!({ "a": complex(map.a), "b": complex(map.b), "c": complex(map.c), "d": complex(map.d) }))
        .constant("radial_max_ratio", radial["max_ratio"].clone())
        .constant("circular_max_ratio", circular["max_ratio"].clone())
        .measure("radial", radial)
        .measure("circular", circular)
        .residual("uncovered_area", num(dec.uncovered_area()));
    let mut scene = domain_scene(&config);
    let layer = scene.layer("rays", "crimson", "none");
    for theta in ray_angles(rays) {
        layer.items.push(Primitive::Polyline(vec![x0, x0 + Complex::from_polar(reach, theta)]));
    }
    if let (Some(a), Some(b)) = (&args.from, &args.to) {
        let a = parse_point(a, x0)?;
        let b = parse_point(b, x0)?;
        let chain = chain_decompose(&config, &[a, b], tol)?;
        chain.verify(&config, tol)?;
        let bound = chain_diameter_bound_mobius(&chain, &config, &map)?;
        let comps: Vec<String> = chain.components.iter().map(|c| format!("{c:?}")).collect();
        doc.input("segment", json!([complex(a), complex(b)]))
            .measure(
                "chain",
                json!({
                    "m": chain.m(),
                    "components": comps,
                    "touches": chain.touches.len(),
                    "diameter_lhs": num(bound.lhs),
                    "diameter_rhs": num(bound.rhs),
                }),
            );
        let layer = scene.layer("chain", "darkgreen", "none");
        for p in &chain.paths {
            layer.items.push(Primitive::Polyline(p.clone()));
        }
    }
    let scene = finish_scene(scene, &config, common)?;
    Ok(ok(doc, scene))
}

/// Largest `k` with at most `budget` disks at level `k`.
fn affordable_depth(n: usize, budget: usize, cap: usize) -> usize {
    (0..=cap).take_while(|&k| word_count(n, k).saturating_mul(n as u128) <= budget as u128).last().unwrap_or(0)
}

fn schottky(common: &Common) -> Result<Outcome, CliError> {
    let (spec, config) = load(common)?;
    let depth = common.depth.unwrap_or(3);
    let samples = common.samples.unwrap_or(100);
    let seed = common.seed.unwrap_or(0);
    let n = config.disks.len();
    let mut counts = Vec::new();
    let mut expected = Vec::new();
    let mut areas = Vec::new();
    let mut deepest = Vec::new();
    for k in 0..=depth {
        let level = complement_disks(&config, k)?;
        counts.push(level.len());
        expected.push(if n == 0 { 0 } else { (n as u128 * (n as u128 - 1).pow(k as u32)) as usize });
        areas.push(num(level.iter().map(|d| d.disk.area()).fold(0.0, f64::max)));
        if k == depth {
            deepest = level;
        }
    }
    let nesting = check_nesting(&config, depth)?;
    let mut doc = document("schottky", &spec);
    doc.param("depth", depth)
        .param("samples", samples)
        .param("seed", seed)
        .param("budget", DEFAULT_BUDGET)
        .measure("complement_disk_counts", counts)
        .measure("expected_counts", expected)
        .measure("max_area_per_level", areas)
        .measure("overlapping_pairs", nesting.overlapping_pairs)
        .measure("containment_failures", nesting.containment_failures)
        .measure("min_gap", num(nesting.min_gap))
        .measure(
            "children_per_parent_ok",
            nesting.children_per_parent.iter().all(|&c| c + 1 == n),
        )
        .constant("area_decay_bound", num(schottky_lab::schottky::area_decay_bound(&config)));
    if n > 0 {
        let initial = config.disks.iter().map(Disk::area).fold(0.0, f64::max);
        let cap = affordable_depth(n, DEFAULT_BUDGET, 12);
        let mut reached = Value::Null;
        for k in 1..=cap {
            let a = schottky_lab::schottky::max_complement_disk_area(&config, k)?;
            if a < 1e-6 * initial {
                reached = json!(k);
                break;
            }
        }
        doc.measure("area_ratio_1e-6_depth", reached).param("area_search_depth", cap);
        let map = test_map(&config);
        let target = image_config(&config, &map)?;
        let ext = ReflectionExtension::new(&config, &target, map)?;
        let words = depth.clamp(1, 4).min(affordable_depth(n, 2_000, 4).max(1));
        let conj = ext.conjugation_residual(words, samples, seed)?;
        doc.param("conjugation_word_length", words)
            .residual("conjugation_residual", num(conj.residual))
            .measure("conjugation_words_tested", conj.words_tested);
    }
    let mut scene = domain_scene(&config);
    let layer = scene.layer("omega_k", "darkorange", "none");
    for d in &deepest {
        layer.items.push(Primitive::Circle { center: d.disk.center, radius: d.disk.radius });
    }
    scene.layer("limit_points", "none", "purple").items.push(Primitive::Points(deepest.iter().map(|d| d.disk.center).collect()));
    let scene = finish_scene(scene, &config, common)?;
    Ok(ok(doc, scene))
}

fn modulus(common: &Common) -> Result<Outcome, CliError> {
    let (spec, config) = load(common)?;
    let grid = common.samples.unwrap_or(50).max(2);
    let seed = common.seed.unwrap_or(0);
    let x0 = config.basepoint;
    let mut mu_error: f64 = 0.0;
    for k in 1..=grid {
        let x = k as f64 / (grid + 1) as f64;
        let xp = ((1.0 - x) * (1.0 + x)).sqrt();
        let v = grotzsch_mu(x)? * grotzsch_mu(xp)?;
        mu_error = mu_error.max((v - std::f64::consts::PI.powi(2) / 4.0).abs());
    }
    let mut teich_worst: f64 = 0.0;
    let mut teich_cases = 0;
    for a in 1..=10 {
        for b in 1..=10 {
            let z1 = Complex::from_polar(a as f64 / 10.0, 0.3 * a as f64);
            let z2 = Complex::from_polar(1.0 + b as f64 / 2.0, 0.7 * b as f64);
            let w = teichmuller_witness(z1, z2)?;
            teich_worst = teich_worst.max(w.modulus() / teichmuller_bound(z1, z2)?);
            teich_cases += 1;
        }
    }
    let delta = config.boundary_distance(x0)?;
    let big = CircularAnnulus::new(x0, delta / 8.0, delta)?;
    let parts = [
        CircularAnnulus::new(x0, delta / 8.0, delta / 4.0)?,
        CircularAnnulus::new(x0, delta / 4.0, delta / 2.0)?,
        CircularAnnulus::new(x0, delta / 2.0, delta)?,
    ];
    let margin = superadditivity_margin(&big, &parts, Nesting::Validate)?;
    let map = test_map(&config);
    let dil = circular_dilatation(|z| map.apply(z), x0, 0.5 * delta, 12, 64)?;
    let affine = circular_dilatation(|z| Ok(z + 0.2 * z.conj()), x0, 0.5 * delta, 4, 64)?;
    let koebe = koebe_distortion_check(|z| map.apply(z), |z| map.derivative(z), x0, delta, 0.5, 500, seed)?;
    let mut fatness: f64 = f64::INFINITY;
    for d in &config.disks {
        fatness = fatness.min(fatness_check(&Shape::Disk(*d), seed)?.constant);
    }
    let mut doc = document("modulus", &spec);
    doc.param("grid", grid)
        .param("seed", seed)
        .param("dilatation_levels", 12)
        .param("dilatation_samples", 64)
        .measure("mu_identity_max_error", num(mu_error))
        .measure("teichmuller_cases", teich_cases)
        .measure("teichmuller_max_witness_over_bound", num(teich_worst))
        .measure("superadditivity_margin", num(margin))
        .measure("mobius_dilatation_finest", num(dil.finest_ratio))
        .measure("mobius_dilatation_limit", num(dil.limit_estimate))
        .measure("mobius_dilatation_finest_radius", num(dil.finest_radius))
        .measure("affine_dilatation", num(affine.grid_max))
        .constant("koebe_distortion", num(koebe.constant()))
        .constant("min_disk_fatness", if fatness.is_finite() { num(fatness) } else { Value::Null });
    let mut scene = domain_scene(&config);
    let layer = scene.layer("annuli", "seagreen", "none");
    for r in [delta / 8.0, delta / 4.0, delta / 2.0, delta] {
        layer.items.push(Primitive::Circle { center: x0, radius: r });
    }
    let scene = finish_scene(scene, &config, common)?;
    Ok(ok(doc, scene))
}

fn beltrami(common: &Common) -> Result<Outcome, CliError> {
    let (spec, config) = load(common)?;
    let words = common.depth.unwrap_or(2);
    let samples = common.samples.unwrap_or(100);
    let seed = common.seed.unwrap_or(0);
    let interior: Vec<Complex> = omega_samples(&config, 2 * samples, seed)
        .into_iter()
        .filter(|z| config.disks.iter().all(|d| (z - d.center).norm() > d.radius * (1.0 + 1e-6)))
        .take(samples)
        .collect();
    let zero = invariance_residual(&config, &ZeroField, words, &interior)?;
    let constant = ConstantField::new(Complex::new(0.3, 0.0))?;
    let constant_report = invariance_residual(&config, &constant, words, &interior)?;
    let base: Arc<dyn CoefficientField> = Arc::new(ConstantField::new(Complex::new(0.0, 0.3))?);
    let sym = Symmetrized::new(&config, base.clone(), words + 2);
    let sym_report = invariance_residual(&config, &sym, words, &interior)?;
    let map = test_map(&config);
    let mut doc = document("beltrami", &spec);
    doc.param("word_length", words).param("samples", interior.len()).param("seed", seed);
    if !config.disks.is_empty() {
        let prop = prop_invariant_check(&config, &map, words, &interior)?;
        doc.residual("prop_invariant_conjugation", num(prop.max_conjugation_residual))
            .measure("mobius_beltrami_max", num(prop.beltrami_max));
    }
    let reflection = config.disks.first().map(|d| d.reflection()).unwrap_or_else(Mobius::conjugation);
    let composite = map.compose(&reflection);
    let mut composition: f64 = 0.0;
    for &z in &interior {
        let lhs = pullback(&composite, base.clone()).eval(z)?;
        let rhs = pullback(&reflection, Arc::new(pullback(&map, base.clone()))).eval(z)?;
        composition = composition.max((lhs - rhs).norm());
    }
    let mut round_trip: f64 = 0.0;
    for k in 0..20 {
        let big_k = 1.0 + 0.25 * k as f64;
        let Dilatation::Mu(m) = dilatation_bounds(Dilatation::K(big_k))? else { unreachable!() };
        let Dilatation::K(back) = dilatation_bounds(Dilatation::Mu(m))? else { unreachable!() };
        round_trip = round_trip.max((back - big_k).abs());
    }
    doc.residual("zero_field_invariance", num(zero.residual))
        .residual("symmetrized_invariance", num(sym_report.residual))
        .residual("composition_law", num(composition))
        .residual("dilatation_round_trip", num(round_trip))
        .measure("constant_field_invariance", num(constant_report.residual))
        .measure(
            "constant_field_witness",
            constant_report.witness.map(|(w, z)| json!({ "word": w.indices(), "point": complex(z) })).unwrap_or(Value::Null),
        )
        .measure("symmetrized_pairs_skipped", sym_report.skipped);
    let mut scene = domain_scene(&config);
    scene.layer("samples", "none", "teal").items.push(Primitive::Points(interior));
    let scene = finish_scene(scene, &config, common)?;
    Ok(ok(doc, scene))
}

fn generate(args: &GenerateArgs) -> Result<Outcome, CliError> {
    let seed = args.common.seed.unwrap_or(0);
    let spec = match args.kind.as_str() {
        "random_packing" => {
            let d = PackingParams::default();
            random_packing(
                PackingParams {
                    count: args.count.unwrap_or(d.count),
                    outer_radius: args.outer_radius.unwrap_or(d.outer_radius),
                    min_radius: args.min_radius.unwrap_or(d.min_radius),
                    max_radius: args.max_radius.unwrap_or(d.max_radius),
                    min_gap: args.min_gap.unwrap_or(d.min_gap),
                },
                seed,
            )?
        }
        "sierpinski_type" => {
            let d = SierpinskiParams::default();
            sierpinski_type(
                SierpinskiParams {
                    depth: args.common.depth.unwrap_or(d.depth),
                    ring: args.ring.unwrap_or(d.ring),
                    outer_radius: args.outer_radius.unwrap_or(d.outer_radius),
                    central_radius: args.central_radius.unwrap_or(d.central_radius),
                },
                seed,
            )?
        }
        other => return Err(CliError::Usage(format!("unknown generator kind {other:?}"))),
    };
    let config = spec.to_config()?;
    let scene = finish_scene(domain_scene(&config), &config, &args.common)?;
    Ok(Outcome { document: spec.to_json(), scene, exit_code: EXIT_OK })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_parse() {
        let x0 = Complex::new(0.1, 0.2);
        assert_eq!(parse_point("x0", x0).unwrap(), x0);
        assert_eq!(parse_point("0.5+0i", x0).unwrap(), Complex::new(0.5, 0.0));
        assert_eq!(parse_point("-0.5-0.25i", x0).unwrap(), Complex::new(-0.5, -0.25));
        assert_eq!(parse_point("1e-3+2e-1i", x0).unwrap(), Complex::new(1e-3, 0.2));
        assert_eq!(parse_point("0.3i", x0).unwrap(), Complex::new(0.0, 0.3));
        assert_eq!(parse_point("-i", x0).unwrap(), Complex::new(0.0, -1.0));
        assert_eq!(parse_point("0.5,-0.5", x0).unwrap(), Complex::new(0.5, -0.5));
        assert!(parse_point("abc", x0).is_err());
    }
}
