//! Quasihyperbolic distance `k_D` on a graph over Whitney cube centers.
//!
//! Edge weights are line integrals of `1/δ_D` along straight segments that
//! stay in `D`, so every reported distance is the length of an actual path
//! and hence an upper approximation of `k_D`. Adding cubes only adds edges,
//! so distances never increase under refinement.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap, HashSet};
use std::f64::consts::{PI, SQRT_2};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{CircleDomainConfig, Complex};
use crate::par;
use crate::quadrature::adaptive_simpson;
use crate::whitney::{CubeId, WhitneyDecomposition};

/// Index of a graph node: cubes first, then extra points.
pub type NodeId = usize;

const QUERY_RADIUS_FACTORS: [f64; 6] = [2.0, 4.0, 8.0, 16.0, 32.0, 64.0];

/// `∫_{[a,b]} ds / δ_D(s)`; the segment must lie in `D`.
pub fn segment_qh_length(config: &CircleDomainConfig, a: Complex, b: Complex) -> f64 {
    let len = (b - a).norm();
    if len == 0.0 {
        return 0.0;
    }
    let d = b - a;
    let f = |t: f64| 1.0 / config.signed_delta(a + d * t);
    let scale = f(0.0).max(f(1.0));
    len * adaptive_simpson(&f, 0.0, 1.0, 1e-11 * scale, 40)
}

/// Undirected edge as seen from one endpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub to: NodeId,
    pub weight: f64,
    /// Weight from this node to where the segment enters the square of `to`.
    pub enter_to: f64,
    /// Weight from `to` to where the segment enters the square of this node.
    pub enter_from: f64,
}

/// Single-source shortest-path tree.
#[derive(Debug, Clone)]
pub struct ShortestPaths {
    pub source: NodeId,
    pub dist: Vec<f64>,
    pub pred: Vec<Option<NodeId>>,
}

#[derive(PartialEq)]
struct HeapItem(f64, NodeId);

impl Eq for HeapItem {}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Piece of a geodesic inside one cube (or outside all cubes).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeodesicPiece {
    pub start: Complex,
    pub end: Complex,
    pub cube: Option<usize>,
}

impl GeodesicPiece {
    pub fn length(&self) -> f64 {
        (self.end - self.start).norm()
    }
}

/// A shortest path in the metric graph.
#[derive(Debug, Clone)]
pub struct Geodesic {
    pub nodes: Vec<NodeId>,
    pub vertices: Vec<Complex>,
    pub edge_weights: Vec<f64>,
    pub qh_length: f64,
    pub euclidean_length: f64,
    pub pieces: Vec<GeodesicPiece>,
}

impl Geodesic {
    /// Distinct cubes in traversal order.
    pub fn cubes(&self) -> Vec<usize> {
        let mut seen = HashSet::new();
        self.pieces
            .iter()
            .filter_map(|p| p.cube)
            .filter(|k| seen.insert(*k))
            .collect()
    }
}

/// Graph construction switches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QhOptions {
    /// Join two extra points directly when the segment between them lies in
    /// `D` and is no longer than the larger of their boundary distances.
    /// Points sharing a cube are always joined.
    pub local_point_edges: bool,
}

impl Default for QhOptions {
    fn default() -> Self {
        Self { local_point_edges: true }
    }
}

/// Weighted graph on cube centers and extra points.
#[derive(Debug, Clone)]
pub struct QhMetric<'a> {
    dec: &'a WhitneyDecomposition,
    positions: Vec<Complex>,
    adjacency: Vec<Vec<Edge>>,
    options: QhOptions,
}

impl<'a> QhMetric<'a> {
    /// Builds the graph with default options; each of `points` becomes a
    /// permanent node.
    pub fn build(dec: &'a WhitneyDecomposition, points: &[Complex]) -> Result<Self> {
        Self::build_with(dec, points, QhOptions::default())
    }

    pub fn build_with(dec: &'a WhitneyDecomposition, points: &[Complex], options: QhOptions) -> Result<Self> {
        let config = dec.config();
        for &p in points {
            config.boundary_distance(p)?;
        }
        let n = dec.len();
        let mut positions: Vec<Complex> = dec.cubes().iter().map(|c| c.center()).collect();
        positions.extend_from_slice(points);
        let mut adjacency: Vec<Vec<Edge>> = vec![Vec::new(); positions.len()];

        let cube_edges = par::map_range(n, |k| {
            let ck = dec.cube(k);
            dec.neighbors(k)
                .iter()
                .filter(|&&m| m > k)
                .map(|&m| {
                    let cm = dec.cube(m);
                    let (a, b) = (ck.center(), cm.center());
                    let t = ck.side / (ck.side + cm.side);
                    let e = a + (b - a) * t;
                    let w1 = segment_qh_length(config, a, e);
                    let w2 = segment_qh_length(config, e, b);
                    (m, w1, w2)
                })
                .collect::<Vec<_>>()
        });
        for (k, list) in cube_edges.into_iter().enumerate() {
            for (m, w1, w2) in list {
                adjacency[k].push(Edge { to: m, weight: w1 + w2, enter_to: w1, enter_from: w2 });
                adjacency[m].push(Edge { to: k, weight: w1 + w2, enter_to: w2, enter_from: w1 });
            }
        }

        let point_edges = par::map(points, |&x| query_edges(dec, x));
        for (idx, list) in point_edges.into_iter().enumerate() {
            let node = n + idx;
            for (k, weight, enter) in list {
                adjacency[node].push(Edge { to: k, weight, enter_to: enter, enter_from: 0.0 });
                adjacency[k].push(Edge { to: node, weight, enter_to: 0.0, enter_from: enter });
            }
        }
        for a in 0..points.len() {
            for b in a + 1..points.len() {
                let (x, y) = (points[a], points[b]);
                if options.local_point_edges && local_pair(config, x, y) || share_cube(dec, x, y) {
                    let w = segment_qh_length(config, x, y);
                    adjacency[n + a].push(Edge { to: n + b, weight: w, enter_to: 0.0, enter_from: 0.0 });
                    adjacency[n + b].push(Edge { to: n + a, weight: w, enter_to: 0.0, enter_from: 0.0 });
                }
            }
        }
        Ok(Self { dec, positions, adjacency, options })
    }

    pub fn decomposition(&self) -> &'a WhitneyDecomposition {
        self.dec
    }

    pub fn config(&self) -> &'a CircleDomainConfig {
        self.dec.config()
    }

    pub fn node_count(&self) -> usize {
        self.positions.len()
    }

    /// Node of the `k`-th extra point passed to [`QhMetric::build`].
    pub fn point_node(&self, k: usize) -> NodeId {
        self.dec.len() + k
    }

    pub fn position(&self, node: NodeId) -> Complex {
        self.positions[node]
    }

    pub fn edges(&self, node: NodeId) -> &[Edge] {
        &self.adjacency[node]
    }

    pub fn shortest_paths(&self, source: NodeId) -> ShortestPaths {
        let mut dist = vec![f64::INFINITY; self.positions.len()];
        let mut pred = vec![None; self.positions.len()];
        let mut heap = BinaryHeap::new();
        dist[source] = 0.0;
        heap.push(HeapItem(0.0, source));
        while let Some(HeapItem(d, u)) = heap.pop() {
            if d > dist[u] {
                continue;
            }
            for e in &self.adjacency[u] {
                let nd = d + e.weight;
                if nd < dist[e.to] {
                    dist[e.to] = nd;
                    pred[e.to] = Some(u);
                    heap.push(HeapItem(nd, e.to));
                }
            }
        }
        ShortestPaths { source, dist, pred }
    }

    pub fn distance(&self, a: NodeId, b: NodeId) -> Result<f64> {
        let d = self.shortest_paths(a).dist[b];
        if d.is_finite() {
            Ok(d)
        } else {
            Err(unreachable(self.positions[a], self.positions[b]))
        }
    }

    pub fn geodesic(&self, a: NodeId, b: NodeId) -> Result<Geodesic> {
        self.geodesic_in_tree(&self.shortest_paths(a), b)
    }

    /// Path from the tree's source to `target`.
    pub fn geodesic_in_tree(&self, tree: &ShortestPaths, target: NodeId) -> Result<Geodesic> {
        if !tree.dist[target].is_finite() {
            return Err(unreachable(self.positions[tree.source], self.positions[target]));
        }
        let mut nodes = vec![target];
        let mut cur = target;
        while let Some(p) = tree.pred[cur] {
            nodes.push(p);
            cur = p;
        }
        nodes.reverse();
        let vertices: Vec<Complex> = nodes.iter().map(|&v| self.positions[v]).collect();
        let mut edge_weights = Vec::with_capacity(nodes.len().saturating_sub(1));
        let mut pieces = Vec::new();
        for w in nodes.windows(2) {
            let e = self.adjacency[w[0]].iter().find(|e| e.to == w[1]).expect("tree edge exists");
            edge_weights.push(e.weight);
            let (p, q) = (self.positions[w[0]], self.positions[w[1]]);
            for piece in self.dec.walk_segment(p, q) {
                pieces.push(GeodesicPiece {
                    start: p + (q - p) * piece.t0,
                    end: p + (q - p) * piece.t1,
                    cube: piece.cube,
                });
            }
        }
        if pieces.is_empty() {
            let p = vertices[0];
            pieces.push(GeodesicPiece { start: p, end: p, cube: self.dec.locate(p) });
        }
        let euclidean_length = vertices.windows(2).map(|w| (w[1] - w[0]).norm()).sum();
        Ok(Geodesic {
            nodes,
            vertices,
            qh_length: edge_weights.iter().sum(),
            edge_weights,
            euclidean_length,
            pieces,
        })
    }

    /// `k(source, x)` for a point `x` that is not a node, through a single
    /// final edge into the tree.
    pub fn sink_distance(&self, tree: &ShortestPaths, x: Complex) -> Result<f64> {
        let config = self.config();
        config.boundary_distance(x)?;
        let mut best = f64::INFINITY;
        let src = self.positions[tree.source];
        if tree.source >= self.dec.len()
            && (self.options.local_point_edges && local_pair(config, src, x) || share_cube(self.dec, src, x))
        {
            best = segment_qh_length(config, src, x);
        }
        for (k, w, _) in query_edges(self.dec, x) {
            best = best.min(tree.dist[k] + w);
        }
        if best.is_finite() {
            Ok(best)
        } else {
            Err(unreachable(src, x))
        }
    }
}

/// Segment inside `D` no longer than the larger boundary distance.
fn local_pair(config: &CircleDomainConfig, x: Complex, y: Complex) -> bool {
    (x - y).norm() <= config.signed_delta(x).max(config.signed_delta(y)) && config.segment_inside(x, y)
}

/// Equal points, or points lying in a common closed cube.
fn share_cube(dec: &WhitneyDecomposition, x: Complex, y: Complex) -> bool {
    x == y || dec.cubes_containing(x).iter().any(|&k| dec.cube(k).contains(y))
}

fn unreachable(a: Complex, b: Complex) -> Error {
    Error::ResolutionInsufficient(format!("no path from {a} to {b} in the truncated graph"))
}

/// Edges `(cube, weight, entry weight)` from a free point to nearby cubes.
fn query_edges(dec: &WhitneyDecomposition, x: Complex) -> Vec<(usize, f64, f64)> {
    let config = dec.config();
    for factor in QUERY_RADIUS_FACTORS {
        let mut out = Vec::new();
        for level in 0..=dec.max_level() {
            let side = config.outer_radius * 0.5f64.powi(level as i32);
            let reach = factor * SQRT_2 * side + side;
            let (i0, i1) = (((x.re - reach) / side).floor() as i64, ((x.re + reach) / side).floor() as i64);
            let (j0, j1) = (((x.im - reach) / side).floor() as i64, ((x.im + reach) / side).floor() as i64);
            for i in i0..=i1 {
                for j in j0..=j1 {
                    let Some(k) = dec.index_of(&CubeId::new(level, i, j)) else { continue };
                    let cube = dec.cube(k);
                    let c = cube.center();
                    if (x - c).norm() > factor * cube.diameter() || !config.segment_inside(x, c) {
                        continue;
                    }
                    let t_in = cube.square.clip_segment(x, c, 0.0).map_or(0.0, |(t0, _)| t0);
                    let p_in = x + (c - x) * t_in;
                    let enter = segment_qh_length(config, x, p_in);
                    out.push((k, enter + segment_qh_length(config, p_in, c), enter));
                }
            }
        }
        if !out.is_empty() {
            return out;
        }
    }
    Vec::new()
}

/// `k_D(x1, x2)` and a realizing path on the graph at `max_level`.
pub fn qh_distance(config: &CircleDomainConfig, x1: Complex, x2: Complex, max_level: u32) -> Result<(f64, Geodesic)> {
    config.boundary_distance(x1)?;
    config.boundary_distance(x2)?;
    let dec = crate::whitney::decompose(config, max_level)?;
    let metric = QhMetric::build(&dec, &[x1, x2])?;
    let g = metric.geodesic(metric.point_node(0), metric.point_node(1))?;
    Ok((g.qh_length, g))
}

/// `k(x0, Q)` and `j(Q)` for every cube.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerAssignment {
    pub basepoint: Complex,
    pub k: Vec<f64>,
    pub j: Vec<u32>,
}

impl LayerAssignment {
    pub fn max_layer(&self) -> u32 {
        self.j.iter().copied().max().unwrap_or(0)
    }

    /// Number of cubes in `D_j = { Q : k(x0,Q) ≤ j }`.
    pub fn count_within(&self, j: u32) -> usize {
        self.j.iter().filter(|&&v| v <= j).count()
    }
}

/// Layer indices relative to the graph node `source`.
pub fn layer_indices(metric: &QhMetric<'_>, source: NodeId) -> Result<LayerAssignment> {
    let tree = metric.shortest_paths(source);
    layers_from_tree(metric, &tree)
}

pub fn layers_from_tree(metric: &QhMetric<'_>, tree: &ShortestPaths) -> Result<LayerAssignment> {
    let dec = metric.decomposition();
    let x0 = metric.position(tree.source);
    let k: Vec<f64> = par::map_range(dec.len(), |q| {
        if dec.cube(q).contains(x0) {
            return 0.0;
        }
        metric
            .edges(q)
            .iter()
            .map(|e| tree.dist[e.to] + e.enter_from)
            .fold(tree.dist[q], f64::min)
    });
    let missing = k.iter().filter(|v| !v.is_finite()).count();
    if missing > 0 {
        return Err(Error::ResolutionInsufficient(format!("{missing} cubes unreachable from the basepoint")));
    }
    let j = k.iter().map(|&v| (v.ceil() as u32).max(1)).collect();
    Ok(LayerAssignment { basepoint: x0, k, j })
}

/// Truncated `Σ ℓ(Q)² j(Q)²` with an estimate for the uncovered part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionFunctional {
    pub value: f64,
    /// `uncovered_area · (max_layer + 1)²`.
    pub residual_estimate: f64,
    pub max_layer: u32,
}

pub fn qh_condition_functional(dec: &WhitneyDecomposition, layers: &LayerAssignment) -> ConditionFunctional {
    let value = dec
        .cubes()
        .iter()
        .zip(&layers.j)
        .map(|(c, &j)| c.area() * (j as f64) * (j as f64))
        .sum();
    let max_layer = layers.max_layer();
    let next = max_layer as f64 + 1.0;
    ConditionFunctional { value, residual_estimate: dec.uncovered_area().max(0.0) * next * next, max_layer }
}

/// Monte-Carlo estimate of `∫_D k(x, x0)² dx` with uniform samples.
pub fn monte_carlo_k_squared(metric: &QhMetric<'_>, tree: &ShortestPaths, samples: usize, seed: u64) -> Result<f64> {
    let config = metric.config();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let big_r = config.outer_radius;
    let mut points = Vec::with_capacity(samples);
    while points.len() < samples {
        let p = Complex::new(rng.gen_range(-big_r..big_r), rng.gen_range(-big_r..big_r));
        if config.contains(p) {
            points.push(p);
        }
    }
    let values = par::map(&points, |&p| metric.sink_distance(tree, p));
    let mut acc = 0.0;
    for v in values {
        let v = v?;
        acc += v * v;
    }
    Ok(config.area() * acc / samples as f64)
}

/// Boundary samples spread over all circles proportionally to length.
pub fn boundary_samples(config: &CircleDomainConfig, total: usize) -> Vec<Complex> {
    let mut circles = vec![(Complex::new(0.0, 0.0), config.outer_radius)];
    circles.extend(config.disks.iter().map(|d| (d.center, d.radius)));
    let length: f64 = circles.iter().map(|c| c.1).sum();
    let mut counts: Vec<usize> = circles
        .iter()
        .map(|c| ((total as f64 * c.1 / length).floor() as usize).max(1))
        .collect();
    let used: usize = counts.iter().sum();
    if used < total {
        counts[0] += total - used;
    }
    let mut out = Vec::new();
    for ((c, r), n) in circles.into_iter().zip(counts) {
        for k in 0..n {
            let theta = 2.0 * PI * (k as f64 + 0.5) / n as f64;
            out.push(c + Complex::from_polar(r, theta));
        }
    }
    out
}

/// `SH(Q)` and `s(Q)` for one cube.
#[derive(Debug, Clone, PartialEq)]
pub struct ShadowEntry {
    pub cube: usize,
    /// Indices into [`ShadowReport::samples`].
    pub members: Vec<usize>,
    pub diameter: f64,
}

#[derive(Debug, Clone)]
pub struct ShadowReport {
    pub samples: Vec<Complex>,
    pub entries: Vec<ShadowEntry>,
    pub sum_s_squared: f64,
    /// Finest cube side; shadow membership depends on it.
    pub resolution: f64,
    /// One geodesic per boundary sample.
    pub geodesics: Vec<Geodesic>,
}

/// Shadows of all cubes along graph geodesics from `source` toward
/// `boundary_samples` points of `∂D`.
pub fn shadows(metric: &QhMetric<'_>, source: NodeId, boundary_samples_count: usize) -> Result<ShadowReport> {
    if boundary_samples_count < 64 {
        return Err(Error::InvalidArgument("at least 64 boundary samples are required".into()));
    }
    let dec = metric.decomposition();
    if dec.is_empty() {
        return Err(Error::ResolutionInsufficient("decomposition has no cubes".into()));
    }
    let samples = boundary_samples(metric.config(), boundary_samples_count);
    let tree = metric.shortest_paths(source);
    let x0 = metric.position(source);
    let home = dec.cubes_containing(x0);
    let traced = par::map(&samples, |&z| -> Result<(Geodesic, Vec<usize>)> {
        let target = (0..dec.len())
            .min_by(|&a, &b| (dec.cube(a).center() - z).norm().total_cmp(&(dec.cube(b).center() - z).norm()))
            .expect("nonempty");
        let g = metric.geodesic_in_tree(&tree, target)?;
        let mut cubes = g.cubes();
        cubes.extend(home.iter().copied());
        cubes.sort_unstable();
        cubes.dedup();
        Ok((g, cubes))
    });
    let mut members: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut geodesics = Vec::with_capacity(samples.len());
    for (idx, t) in traced.into_iter().enumerate() {
        let (g, cubes) = t?;
        for q in cubes {
            members.entry(q).or_default().push(idx);
        }
        geodesics.push(g);
    }
    let entries: Vec<ShadowEntry> = members
        .into_iter()
        .map(|(cube, members)| {
            let mut diameter: f64 = 0.0;
            for (a, &i) in members.iter().enumerate() {
                for &k in &members[a + 1..] {
                    diameter = diameter.max((samples[i] - samples[k]).norm());
                }
            }
            ShadowEntry { cube, members, diameter }
        })
        .collect();
    let sum_s_squared = entries.iter().map(|e| e.diameter * e.diameter).sum();
    Ok(ShadowReport { samples, entries, sum_s_squared, resolution: dec.finest_side(), geodesics })
}

/// Terminal-subpath length and cube counts per layer.
#[derive(Debug, Clone, PartialEq)]
pub struct TailReport {
    pub j0: u32,
    pub tail_length: f64,
    /// Layer `j` → number of distinct cubes of that layer met by the path.
    pub histogram: BTreeMap<u32, usize>,
}

/// Length of the maximal terminal subpath that meets only cubes with
/// `j(Q) ≥ j0`, plus the per-layer cube histogram.
pub fn geodesic_tail_check(geodesic: &Geodesic, layers: &LayerAssignment, j0: u32) -> TailReport {
    let mut tail_length = 0.0;
    for piece in geodesic.pieces.iter().rev() {
        if let Some(q) = piece.cube {
            if layers.j[q] < j0 {
                break;
            }
        }
        tail_length += piece.length();
    }
    let mut histogram = BTreeMap::new();
    for q in geodesic.cubes() {
        *histogram.entry(layers.j[q]).or_insert(0) += 1;
    }
    TailReport { j0, tail_length, histogram }
}

/// Largest drop `j(Q_a) − j(Q_b)` for cubes met in order `a` before `b`.
pub fn layer_monotonicity_defect(geodesic: &Geodesic, layers: &LayerAssignment) -> u32 {
    let mut running_max: u32 = 0;
    let mut defect = 0;
    for q in geodesic.cubes() {
        let j = layers.j[q];
        defect = defect.max(running_max.saturating_sub(j));
        running_max = running_max.max(j);
    }
    defect
}
