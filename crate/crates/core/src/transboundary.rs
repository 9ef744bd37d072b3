//! Transboundary chains of polygonal paths and the chain estimates.
//!
//! A path is cut at its crossings with the complementary components; each
//! component is entered once (from the first entry straight to the last
//! exit), so the components of a chain are distinct.

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::geometry::{image_disk, CircleDomainConfig, Complex, Disk, ImageRegion, Mobius};
use crate::quadrature::{adaptive_simpson, GAUSS2_UNIT};
use crate::schottky::complement_disks;
use crate::whitney::WhitneyDecomposition;

/// Default tangency tolerance relative to the outer radius.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

const SAMPLES_PER_SEGMENT: usize = 32;

/// A complementary component of `D`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Component {
    /// The closed disk with this index.
    Disk(usize),
    /// The complement of the open outer ball.
    Outer,
}

/// A grazing contact that did not enter the component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Touch {
    pub component: Component,
    pub point: Complex,
}

/// `(γ₁, B₁, …, B_{m−1}, γ_m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransboundaryChain {
    pub paths: Vec<Vec<Complex>>,
    pub components: Vec<Component>,
    pub touches: Vec<Touch>,
}

impl TransboundaryChain {
    pub fn m(&self) -> usize {
        self.paths.len()
    }

    /// `(a_i, b_i)` of path `i`.
    pub fn endpoints(&self, i: usize) -> (Complex, Complex) {
        let p = &self.paths[i];
        (p[0], *p.last().expect("paths are nonempty"))
    }

    /// Checks the chain invariants against `config`.
    pub fn verify(&self, config: &CircleDomainConfig, tol: f64) -> Result<()> {
        if self.paths.len() != self.components.len() + 1 {
            return Err(Error::Chain("paths and components do not alternate".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for c in &self.components {
            if !seen.insert(*c) {
                return Err(Error::Chain(format!("component {c:?} repeats")));
            }
        }
        let edge_tol = 1e-9 * config.outer_radius;
        for (i, c) in self.components.iter().enumerate() {
            let (_, b) = self.endpoints(i);
            let (a, _) = self.endpoints(i + 1);
            for p in [b, a] {
                if component_boundary_distance(config, *c, p) > edge_tol {
                    return Err(Error::Chain(format!("{p} is not on the boundary of {c:?}")));
                }
            }
        }
        for (i, path) in self.paths.iter().enumerate() {
            let (a, b) = self.endpoints(i);
            if a == b {
                return Err(Error::Chain(format!("path {i} is degenerate")));
            }
            for w in path.windows(2) {
                for k in 0..=SAMPLES_PER_SEGMENT {
                    let p = w[0] + (w[1] - w[0]) * (k as f64 / SAMPLES_PER_SEGMENT as f64);
                    if config.signed_delta(p) < -tol {
                        return Err(Error::Chain(format!("path {i} leaves the closure of D at {p}")));
                    }
                }
            }
        }
        Ok(())
    }

    /// Total Euclidean length of the paths.
    pub fn path_length(&self) -> f64 {
        self.paths.iter().map(|p| polyline_length(p)).sum()
    }
}

fn polyline_length(p: &[Complex]) -> f64 {
    p.windows(2).map(|w| (w[1] - w[0]).norm()).sum()
}

fn component_boundary_distance(config: &CircleDomainConfig, c: Component, p: Complex) -> f64 {
    match c {
        Component::Disk(j) => {
            let d = config.disks[j];
            ((p - d.center).norm() - d.radius).abs()
        }
        Component::Outer => (p.norm() - config.outer_radius).abs(),
    }
}

/// Signed distance to a component: negative inside it.
fn component_signed_distance(config: &CircleDomainConfig, c: Component, p: Complex) -> f64 {
    match c {
        Component::Disk(j) => {
            let d = config.disks[j];
            (p - d.center).norm() - d.radius
        }
        Component::Outer => config.outer_radius - p.norm(),
    }
}

fn point_at(path: &[Complex], s: f64) -> Complex {
    let k = (s.floor() as usize).min(path.len() - 2);
    path[k] + (path[k + 1] - path[k]) * (s - k as f64)
}

fn subpath(path: &[Complex], s0: f64, s1: f64) -> Vec<Complex> {
    let mut out = vec![point_at(path, s0)];
    let first = s0.floor() as usize + 1;
    for (k, &p) in path.iter().enumerate().skip(first) {
        if (k as f64) >= s1 {
            break;
        }
        out.push(p);
    }
    out.push(point_at(path, s1));
    out
}

/// Parameter interval where segment `a + t(b−a)` lies in the closed disk.
fn segment_in_disk(a: Complex, b: Complex, center: Complex, radius: f64) -> Option<(f64, f64)> {
    let d = b - a;
    let w = a - center;
    let qa = d.norm_sqr();
    if qa == 0.0 {
        return (w.norm() <= radius).then_some((0.0, 1.0));
    }
    let qb = 2.0 * (w * d.conj()).re;
    let qc = w.norm_sqr() - radius * radius;
    let disc = qb * qb - 4.0 * qa * qc;
    if disc < 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    let (t1, t2) = ((-qb - sq) / (2.0 * qa), (-qb + sq) / (2.0 * qa));
    let (t1, t2) = (t1.max(0.0), t2.min(1.0));
    (t1 <= t2).then_some((t1, t2))
}

/// Intervals of the global parameter where the path is in the closed component.
fn component_intervals(config: &CircleDomainConfig, path: &[Complex], c: Component) -> Vec<(f64, f64)> {
    let mut raw = Vec::new();
    for (k, w) in path.windows(2).enumerate() {
        let k = k as f64;
        match c {
            Component::Disk(j) => {
                let d = config.disks[j];
                if let Some((t1, t2)) = segment_in_disk(w[0], w[1], d.center, d.radius) {
                    raw.push((k + t1, k + t2));
                }
            }
            Component::Outer => match segment_in_disk(w[0], w[1], Complex::new(0.0, 0.0), config.outer_radius) {
                Some((t1, t2)) => {
                    if w[0].norm() >= config.outer_radius || t1 > 0.0 {
                        raw.push((k, k + t1));
                    }
                    if w[1].norm() >= config.outer_radius || t2 < 1.0 {
                        raw.push((k + t2, k + 1.0));
                    }
                }
                None => raw.push((k, k + 1.0)),
            },
        }
    }
    let mut merged: Vec<(f64, f64)> = Vec::new();
    for (s0, s1) in raw {
        match merged.last_mut() {
            Some(last) if s0 <= last.1 => last.1 = last.1.max(s1),
            _ => merged.push((s0, s1)),
        }
    }
    merged
}

fn interval_length(path: &[Complex], s0: f64, s1: f64) -> f64 {
    polyline_length(&subpath(path, s0, s1))
}

/// Splits a polygonal path into a transboundary chain.
///
/// `tol` separates grazing contacts (chord at most `tol`) from crossings.
pub fn chain_decompose(config: &CircleDomainConfig, path: &[Complex], tol: f64) -> Result<TransboundaryChain> {
    if path.len() < 2 {
        return Err(Error::Chain("path needs at least two vertices".into()));
    }
    let end_s = (path.len() - 1) as f64;
    let (start, end) = (path[0], path[path.len() - 1]);
    let mut components: Vec<Component> = (0..config.disks.len()).map(Component::Disk).collect();
    components.push(Component::Outer);

    let mut crossings: Vec<(Component, Vec<(f64, f64)>)> = Vec::new();
    let mut touches = Vec::new();
    for &c in &components {
        let mut kept = Vec::new();
        for (s0, s1) in component_intervals(config, path, c) {
            if s0 <= 0.0 && s1 >= end_s && interval_length(path, s0, s1) > tol {
                return Err(Error::Chain(format!("path lies entirely inside {c:?}")));
            }
            if interval_length(path, s0, s1) <= tol {
                let at_end = s1 <= 0.0 || s0 >= end_s;
                if !at_end {
                    touches.push(Touch { component: c, point: point_at(path, 0.5 * (s0 + s1)) });
                }
            } else {
                kept.push((s0, s1));
            }
        }
        for (label, p) in [("start", start), ("end", end)] {
            let d = component_signed_distance(config, c, p);
            if d < -tol {
                return Err(Error::Chain(format!("{label} point {p} lies inside {c:?}")));
            }
            if d <= tol && !kept.is_empty() {
                return Err(Error::Chain(format!("path re-enters {c:?}, which contains its {label} point")));
            }
        }
        if !kept.is_empty() {
            crossings.push((c, kept));
        }
    }

    let mut paths = Vec::new();
    let mut chain_components = Vec::new();
    let mut cursor = 0.0;
    loop {
        let next = crossings
            .iter()
            .flat_map(|(c, iv)| iv.iter().map(move |&(s0, _)| (s0, *c)))
            .filter(|&(s0, _)| s0 >= cursor)
            .min_by(|a, b| a.0.total_cmp(&b.0));
        let Some((s0, c)) = next else { break };
        let last_exit = crossings
            .iter()
            .find(|(cc, _)| *cc == c)
            .map(|(_, iv)| iv.iter().map(|v| v.1).fold(f64::NEG_INFINITY, f64::max))
            .expect("component present");
        paths.push(subpath(path, cursor, s0));
        chain_components.push(c);
        cursor = last_exit;
    }
    paths.push(subpath(path, cursor, end_s));
    touches.sort_by(|a, b| a.point.re.total_cmp(&b.point.re));
    Ok(TransboundaryChain { paths, components: chain_components, touches })
}

/// Both sides of `diam(∪ f(γ_i) ∪ ∪ B_i*) ≤ Σ diam f(γ_i) + Σ diam B_i*`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiameterBound {
    pub lhs: f64,
    pub rhs: f64,
    pub path_diameters: Vec<f64>,
    pub component_diameters: Vec<f64>,
}

impl DiameterBound {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs + 1e-9 * self.rhs || self.rhs.is_infinite()
    }
}

fn sample_polyline(path: &[Complex]) -> Vec<Complex> {
    let mut out = vec![path[0]];
    for w in path.windows(2) {
        for k in 1..=SAMPLES_PER_SEGMENT {
            out.push(w[0] + (w[1] - w[0]) * (k as f64 / SAMPLES_PER_SEGMENT as f64));
        }
    }
    out
}

fn point_set_diameter(points: &[Complex]) -> f64 {
    let mut d: f64 = 0.0;
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            d = d.max((p - q).norm());
        }
    }
    d
}

/// Diameter bound for a chain under `map`, with `images[i]` the image of
/// the chain's `i`-th component.
pub fn chain_diameter_bound<F>(chain: &TransboundaryChain, map: F, images: &[ImageRegion]) -> Result<DiameterBound>
where
    F: Fn(Complex) -> Result<Complex>,
{
    if images.len() != chain.components.len() {
        return Err(Error::Chain(format!(
            "missing correspondence: {} components but {} image regions",
            chain.components.len(),
            images.len()
        )));
    }
    let mut all_points = Vec::new();
    let mut path_diameters = Vec::new();
    for p in &chain.paths {
        let imgs = sample_polyline(p).into_iter().map(&map).collect::<Result<Vec<_>>>()?;
        path_diameters.push(point_set_diameter(&imgs));
        all_points.extend(imgs);
    }
    let component_diameters: Vec<f64> = images.iter().map(ImageRegion::diameter).collect();
    let rhs = path_diameters.iter().sum::<f64>() + component_diameters.iter().sum::<f64>();
    let disks: Vec<Disk> = images.iter().filter_map(|r| match r {
        ImageRegion::Disk(d) => Some(*d),
        _ => None,
    }).collect();
    let lhs = if disks.len() < images.len() {
        f64::INFINITY
    } else {
        let mut d = point_set_diameter(&all_points);
        for (i, a) in disks.iter().enumerate() {
            d = d.max(a.diameter());
            for p in &all_points {
                d = d.max((p - a.center).norm() + a.radius);
            }
            for b in &disks[i + 1..] {
                d = d.max((a.center - b.center).norm() + a.radius + b.radius);
            }
        }
        d
    };
    Ok(DiameterBound { lhs, rhs, path_diameters, component_diameters })
}

/// Image of a component under a Möbius or anti-Möbius map.
pub fn component_image(config: &CircleDomainConfig, map: &Mobius, c: Component) -> ImageRegion {
    match c {
        Component::Disk(j) => image_disk(map, &config.disks[j]),
        Component::Outer => {
            image_disk(map, &Disk { center: Complex::new(0.0, 0.0), radius: config.outer_radius }).complement()
        }
    }
}

/// [`chain_diameter_bound`] for a Möbius map, with images from [`image_disk`].
pub fn chain_diameter_bound_mobius(
    chain: &TransboundaryChain,
    config: &CircleDomainConfig,
    map: &Mobius,
) -> Result<DiameterBound> {
    let images: Vec<ImageRegion> = chain.components.iter().map(|&c| component_image(config, map, c)).collect();
    chain_diameter_bound(chain, |z| map.apply(z), &images)
}

/// Where the estimate is evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EstimateGeometry {
    /// Ray `center + t·e^{iθ}`, `start_radius ≤ t ≤ end_radius`, cut at the
    /// outer circle.
    Radial { center: Complex, theta: f64, start_radius: f64, end_radius: f64 },
    /// Circle `|z − center| = radius` against the complement of `Ω_depth`.
    Circular { center: Complex, radius: f64, depth: usize },
}

/// Both sides of a chain estimate and the parts of the right side.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateReport {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    /// Radial: `Σ ℓ(Q)·avg_Q|f′|` over cubes met by the paths.
    /// Circular: `∫ |f′| ds` over the arcs outside the complement disks.
    pub path_term: f64,
    /// Radial: `Σ d_r(B*)`. Circular: `Σ diam f(B)`.
    pub boundary_term: f64,
    /// `∫ |f′| ds` over path pieces not covered by any cube.
    pub residual_term: f64,
    pub cubes_counted: usize,
    pub components: usize,
}

fn mean_abs_derivative(map: &Mobius, sq: &crate::whitney::Square) -> Result<f64> {
    let mut acc = 0.0;
    for gx in GAUSS2_UNIT {
        for gy in GAUSS2_UNIT {
            let z = sq.lo + Complex::new(gx, gy) * sq.side;
            acc += map.derivative(z)?.norm();
        }
    }
    Ok(acc / 4.0)
}

fn derivative_integral(map: &Mobius, a: Complex, b: Complex) -> Result<f64> {
    let len = (b - a).norm();
    if len == 0.0 {
        return Ok(0.0);
    }
    map.derivative(a)?;
    map.derivative(b)?;
    let f = |t: f64| map.derivative(a + (b - a) * t).map(|d| d.norm()).unwrap_or(f64::INFINITY);
    let scale = f(0.0).max(f(1.0));
    Ok(len * adaptive_simpson(&f, 0.0, 1.0, 1e-12 * scale, 30))
}

/// Evaluates the radial or circular chain estimate for a Möbius map whose
/// pole lies outside `D̄`.
pub fn transboundary_estimate(dec: &WhitneyDecomposition, map: &Mobius, geometry: EstimateGeometry) -> Result<EstimateReport> {
    let config = dec.config();
    if let Some(q) = map.pole() {
        if config.signed_delta(q) >= 0.0 {
            return Err(Error::InvalidArgument(format!("map has its pole {q} in the closure of D")));
        }
    }
    match geometry {
        EstimateGeometry::Radial { center, theta, start_radius, end_radius } => {
            radial_estimate(dec, map, center, theta, start_radius, end_radius)
        }
        EstimateGeometry::Circular { center, radius, depth } => circular_estimate(config, map, center, radius, depth),
    }
}

fn radial_estimate(
    dec: &WhitneyDecomposition,
    map: &Mobius,
    center: Complex,
    theta: f64,
    start_radius: f64,
    end_radius: f64,
) -> Result<EstimateReport> {
    let config = dec.config();
    let tol = DEFAULT_TOLERANCE * config.outer_radius;
    let dir = Complex::from_polar(1.0, theta);
    let start = center + dir * start_radius;
    if config.signed_delta(start) < -tol {
        return Err(Error::InvalidArgument(format!("ray starts at {start}, outside the closure of D")));
    }
    let ball = Disk { center: Complex::new(0.0, 0.0), radius: config.outer_radius };
    let t_ball = segment_in_disk(start, start + dir * (2.0 * config.outer_radius + end_radius), ball.center, ball.radius)
        .map(|(_, t2)| t2 * (2.0 * config.outer_radius + end_radius))
        .unwrap_or(0.0);
    let length = (end_radius - start_radius).min(t_ball);
    if !(length > 0.0) {
        return Err(Error::InvalidArgument("ray has no length inside the outer ball".into()));
    }
    let end = start + dir * length;
    let (path_end, terminal) = match config.disks.iter().position(|d| d.contains(end)) {
        Some(j) => {
            let d = config.disks[j];
            let (t1, _) = segment_in_disk(start, end, d.center, d.radius).expect("end is inside");
            (start + (end - start) * t1, Some(j))
        }
        None => (end, None),
    };
    let chain = chain_decompose(config, &[start, path_end], tol)?;
    let w0 = map.apply(start)?;
    let lhs = (map.apply(end)? - w0).norm();

    let mut path_term = 0.0;
    let mut residual_term = 0.0;
    let mut cubes_counted = 0;
    for p in &chain.paths {
        let mut cubes = Vec::new();
        for w in p.windows(2) {
            cubes.extend(dec.cubes_meeting_segment(w[0], w[1]));
            for piece in dec.walk_segment(w[0], w[1]) {
                if piece.cube.is_none() {
                    let a = w[0] + (w[1] - w[0]) * piece.t0;
                    let b = w[0] + (w[1] - w[0]) * piece.t1;
                    residual_term += derivative_integral(map, a, b)?;
                }
            }
        }
        cubes.sort_unstable();
        cubes.dedup();
        cubes_counted += cubes.len();
        for q in cubes {
            let cube = dec.cube(q);
            path_term += cube.side * mean_abs_derivative(map, &cube.square)?;
        }
    }
    let mut boundary_term = 0.0;
    let mut comps = chain.components.clone();
    if let Some(j) = terminal {
        comps.push(Component::Disk(j));
    }
    for &c in &comps {
        boundary_term += component_image(config, map, c).radial_diameter(w0, lhs);
    }
    let rhs = path_term + boundary_term + residual_term;
    Ok(EstimateReport {
        lhs,
        rhs,
        ratio: lhs / rhs,
        path_term,
        boundary_term,
        residual_term,
        cubes_counted,
        components: comps.len(),
    })
}

/// Angular intervals of `|z − c0| = rho` inside the closed disk, or `None`.
fn arc_in_disk(c0: Complex, rho: f64, disk: &Disk) -> Result<Option<(f64, f64)>> {
    let v = disk.center - c0;
    let d = v.norm();
    if d + rho <= disk.radius {
        return Err(Error::InvalidArgument("circle lies inside a complementary disk".into()));
    }
    if d >= rho + disk.radius || d + disk.radius <= rho {
        return Ok(None);
    }
    let cos_a = ((rho * rho + d * d - disk.radius * disk.radius) / (2.0 * rho * d)).clamp(-1.0, 1.0);
    let alpha = cos_a.acos();
    let phi = v.arg();
    Ok(Some((phi - alpha, phi + alpha)))
}

/// Arcs of `[0, 2π)` not covered by the given intervals.
fn complement_arcs(mut blocked: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    if blocked.is_empty() {
        return vec![(0.0, TAU)];
    }
    for b in &mut blocked {
        let shift = (b.0 / TAU).floor() * TAU;
        b.0 -= shift;
        b.1 -= shift;
    }
    blocked.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, f64)> = Vec::new();
    for (a, b) in blocked {
        match merged.last_mut() {
            Some(last) if a <= last.1 => last.1 = last.1.max(b),
            _ => merged.push((a, b)),
        }
    }
    let mut arcs = Vec::new();
    for w in merged.windows(2) {
        if w[1].0 > w[0].1 {
            arcs.push((w[0].1, w[1].0));
        }
    }
    let (first, last) = (merged[0], merged[merged.len() - 1]);
    if first.0 + TAU > last.1 {
        arcs.push((last.1, first.0 + TAU));
    }
    arcs
}

fn circular_estimate(config: &CircleDomainConfig, map: &Mobius, c0: Complex, rho: f64, depth: usize) -> Result<EstimateReport> {
    if !(rho > 0.0) || c0.norm() + rho >= config.outer_radius {
        return Err(Error::InvalidArgument("circle must lie inside the outer ball".into()));
    }
    let disks: Vec<Disk> = complement_disks(config, depth)?.into_iter().map(|rd| rd.disk).collect();
    let mut blocked = Vec::new();
    let mut meeting = Vec::new();
    for d in &disks {
        if let Some(iv) = arc_in_disk(c0, rho, d)? {
            blocked.push(iv);
            meeting.push(*d);
        }
    }
    let arcs = complement_arcs(blocked);
    let at = |t: f64| c0 + Complex::from_polar(rho, t);
    let mut path_term = 0.0;
    let mut points = Vec::new();
    for &(a, b) in &arcs {
        let f = |t: f64| map.derivative(at(t)).map(|d| d.norm()).unwrap_or(f64::INFINITY);
        let scale = f(a).max(f(b)).max(f(0.5 * (a + b)));
        path_term += rho * adaptive_simpson(&f, a, b, 1e-12 * scale, 30);
        let n = ((256.0 * (b - a) / TAU).ceil() as usize).max(8);
        for k in 0..=n {
            points.push(map.apply(at(a + (b - a) * k as f64 / n as f64))?);
        }
    }
    if !path_term.is_finite() {
        return Err(Error::EvaluationFailed(c0));
    }
    let lhs = point_set_diameter(&points);
    let boundary_term: f64 = meeting.iter().map(|d| image_disk(map, d).diameter()).sum();
    let rhs = path_term + boundary_term;
    Ok(EstimateReport {
        lhs,
        rhs,
        ratio: lhs / rhs,
        path_term,
        boundary_term,
        residual_term: 0.0,
        cubes_counted: 0,
        components: meeting.len(),
    })
}

/// Evenly spaced ray directions avoiding the axes.
pub fn ray_angles(count: usize) -> Vec<f64> {
    (0..count).map(|k| (k as f64 + 0.37) * 2.0 * PI / count as f64).collect()
}
