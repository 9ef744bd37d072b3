//! Dyadic Whitney decomposition of `D = B(0,R) ∩ Ω`.
//!
//! Level `L` cubes have side `R·2^{-L}` on a grid anchored at the origin;
//! the four level-0 cubes tile `[-R,R]²`. A cube is accepted when it lies in
//! `D` with `dist(Q, ∂D) > √2·ℓ(Q)`, otherwise it is split. Because the
//! parent was rejected, every accepted cube also has
//! `dist(Q, ∂D) ≤ 4√2·ℓ(Q)`, and adjacent cubes differ by at most a factor
//! of 4 in side length. Refinement stops at `max_level`; the area left over
//! is reported as `uncovered_area`.

use std::collections::{HashMap, HashSet};
use std::f64::consts::SQRT_2;

use crate::error::{Error, Result};
use crate::geometry::{CircleDomainConfig, Complex};
use crate::par;

/// Smallest accepted `max_level`.
pub const MIN_MAX_LEVEL: u32 = 4;

/// Identity of a dyadic cube: `[iℓ,(i+1)ℓ] × [jℓ,(j+1)ℓ]` with `ℓ = R·2^{-level}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CubeId {
    pub level: u32,
    pub i: i64,
    pub j: i64,
}

impl CubeId {
    pub fn new(level: u32, i: i64, j: i64) -> Self {
        Self { level, i, j }
    }

    pub fn side(&self, outer_radius: f64) -> f64 {
        side_at(outer_radius, self.level)
    }

    pub fn parent(&self) -> Option<CubeId> {
        (self.level > 0).then(|| CubeId::new(self.level - 1, self.i.div_euclid(2), self.j.div_euclid(2)))
    }

    pub fn children(&self) -> [CubeId; 4] {
        let (l, i, j) = (self.level + 1, 2 * self.i, 2 * self.j);
        [CubeId::new(l, i, j), CubeId::new(l, i + 1, j), CubeId::new(l, i, j + 1), CubeId::new(l, i + 1, j + 1)]
    }

    /// The level-`level` cell whose half-open square contains `p`.
    pub fn containing(p: Complex, level: u32, outer_radius: f64) -> CubeId {
        let side = side_at(outer_radius, level);
        CubeId::new(level, (p.re / side).floor() as i64, (p.im / side).floor() as i64)
    }

    pub fn square(&self, outer_radius: f64) -> Square {
        let side = self.side(outer_radius);
        Square { lo: Complex::new(self.i as f64 * side, self.j as f64 * side), side }
    }
}

fn side_at(outer_radius: f64, level: u32) -> f64 {
    outer_radius * 0.5f64.powi(level as i32)
}

/// Closed axis-aligned square `[lo.re, lo.re+side] × [lo.im, lo.im+side]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Square {
    pub lo: Complex,
    pub side: f64,
}

impl Square {
    pub fn hi(&self) -> Complex {
        self.lo + Complex::new(self.side, self.side)
    }

    pub fn center(&self) -> Complex {
        self.lo + Complex::new(0.5 * self.side, 0.5 * self.side)
    }

    pub fn corners(&self) -> [Complex; 4] {
        let s = self.side;
        [self.lo, self.lo + Complex::new(s, 0.0), self.lo + Complex::new(s, s), self.lo + Complex::new(0.0, s)]
    }

    pub fn contains(&self, p: Complex) -> bool {
        let hi = self.hi();
        p.re >= self.lo.re && p.re <= hi.re && p.im >= self.lo.im && p.im <= hi.im
    }

    /// Distance from `p` to the closed square (0 inside).
    pub fn distance_to(&self, p: Complex) -> f64 {
        let hi = self.hi();
        let dx = (self.lo.re - p.re).max(0.0).max(p.re - hi.re);
        let dy = (self.lo.im - p.im).max(0.0).max(p.im - hi.im);
        dx.hypot(dy)
    }

    /// Largest distance from `p` to a point of the square.
    pub fn max_distance_to(&self, p: Complex) -> f64 {
        let hi = self.hi();
        let dx = (p.re - self.lo.re).abs().max((p.re - hi.re).abs());
        let dy = (p.im - self.lo.im).abs().max((p.im - hi.im).abs());
        dx.hypot(dy)
    }

    /// Parameter interval of `a + t(b-a)`, `t ∈ [0,1]`, inside the square
    /// grown by `eps`.
    pub fn clip_segment(&self, a: Complex, b: Complex, eps: f64) -> Option<(f64, f64)> {
        let lo = self.lo - Complex::new(eps, eps);
        let hi = self.hi() + Complex::new(eps, eps);
        let d = b - a;
        let mut t0: f64 = 0.0;
        let mut t1: f64 = 1.0;
        for (p, q, l, h) in [(a.re, d.re, lo.re, hi.re), (a.im, d.im, lo.im, hi.im)] {
            if q == 0.0 {
                if p < l || p > h {
                    return None;
                }
            } else {
                let (mut u, mut v) = ((l - p) / q, (h - p) / q);
                if u > v {
                    std::mem::swap(&mut u, &mut v);
                }
                t0 = t0.max(u);
                t1 = t1.min(v);
                if t0 > t1 {
                    return None;
                }
            }
        }
        Some((t0, t1))
    }
}

/// Where a dyadic square sits relative to `D`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CellStatus {
    /// Square contained in `D`, with its exact distance to `∂D`.
    Inside(f64),
    /// Square disjoint from `D`.
    Outside,
    /// Square meets both `D` and its complement.
    Straddles,
}

/// Exact classification of a closed square against `D`.
pub fn classify(config: &CircleDomainConfig, sq: &Square) -> CellStatus {
    let origin = Complex::new(0.0, 0.0);
    let big_r = config.outer_radius;
    if sq.distance_to(origin) >= big_r {
        return CellStatus::Outside;
    }
    let far = sq.max_distance_to(origin);
    let mut inside = far < big_r;
    let mut dist = big_r - far;
    for disk in &config.disks {
        if sq.max_distance_to(disk.center) <= disk.radius {
            return CellStatus::Outside;
        }
        let gap = sq.distance_to(disk.center) - disk.radius;
        if gap <= 0.0 {
            inside = false;
        }
        dist = dist.min(gap);
    }
    if inside {
        CellStatus::Inside(dist)
    } else {
        CellStatus::Straddles
    }
}

/// One accepted Whitney cube.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WhitneyCube {
    pub id: CubeId,
    pub side: f64,
    /// Exact `dist(Q, ∂D)`.
    pub boundary_distance: f64,
    pub square: Square,
}

impl WhitneyCube {
    fn from_id(id: CubeId, outer_radius: f64, boundary_distance: f64) -> Self {
        let square = id.square(outer_radius);
        Self { id, side: square.side, boundary_distance, square }
    }

    pub fn center(&self) -> Complex {
        self.square.center()
    }

    pub fn diameter(&self) -> f64 {
        SQRT_2 * self.side
    }

    pub fn area(&self) -> f64 {
        self.side * self.side
    }

    pub fn contains(&self, p: Complex) -> bool {
        self.square.contains(p)
    }

    /// `dist(Q, ∂D) / ℓ(Q)`, which lies in `(√2, 4√2]`.
    pub fn distance_ratio(&self) -> f64 {
        self.boundary_distance / self.side
    }
}

/// Part of a segment inside one cube, or outside all cubes when `cube` is `None`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentPiece {
    pub t0: f64,
    pub t1: f64,
    pub cube: Option<usize>,
}

/// Truncated Whitney decomposition with adjacency.
#[derive(Debug, Clone)]
pub struct WhitneyDecomposition {
    config: CircleDomainConfig,
    max_level: u32,
    cubes: Vec<WhitneyCube>,
    neighbors: Vec<Vec<usize>>,
    index: HashMap<CubeId, usize>,
    frontier_area: f64,
    uncovered_area: f64,
}

#[derive(Default)]
struct Harvest {
    cubes: Vec<WhitneyCube>,
    frontier_area: f64,
}

fn refine(config: &CircleDomainConfig, id: CubeId, max_level: u32, out: &mut Harvest) {
    let sq = id.square(config.outer_radius);
    let status = classify(config, &sq);
    if let CellStatus::Inside(d) = status {
        if d > SQRT_2 * sq.side {
            out.cubes.push(WhitneyCube { id, side: sq.side, boundary_distance: d, square: sq });
            return;
        }
    }
    if status == CellStatus::Outside {
        return;
    }
    if id.level >= max_level {
        out.frontier_area += sq.side * sq.side;
        return;
    }
    for child in id.children() {
        refine(config, child, max_level, out);
    }
}

/// Builds the decomposition of a valid configuration down to `max_level`.
pub fn decompose(config: &CircleDomainConfig, max_level: u32) -> Result<WhitneyDecomposition> {
    config.ensure_valid()?;
    if max_level < MIN_MAX_LEVEL {
        return Err(Error::InvalidArgument(format!("max_level must be at least {MIN_MAX_LEVEL}")));
    }
    let roots: Vec<CubeId> = [(-1, -1), (0, -1), (-1, 0), (0, 0)]
        .iter()
        .flat_map(|&(i, j)| CubeId::new(0, i, j).children())
        .collect();
    let harvests = par::map(&roots, |&id| {
        let mut h = Harvest::default();
        refine(config, id, max_level, &mut h);
        h
    });
    let mut cubes = Vec::new();
    let mut frontier_area = 0.0;
    for h in harvests {
        cubes.extend(h.cubes);
        frontier_area += h.frontier_area;
    }
    cubes.sort_by_key(|c| c.id);
    let mut dec = WhitneyDecomposition::assemble(config.clone(), max_level, cubes);
    dec.frontier_area = frontier_area;
    Ok(dec)
}

impl WhitneyDecomposition {
    fn assemble(config: CircleDomainConfig, max_level: u32, cubes: Vec<WhitneyCube>) -> Self {
        let index: HashMap<CubeId, usize> = cubes.iter().enumerate().map(|(k, c)| (c.id, k)).collect();
        let covered: f64 = cubes.iter().map(WhitneyCube::area).sum();
        let uncovered_area = config.area() - covered;
        let mut dec = Self {
            config,
            max_level,
            cubes,
            neighbors: Vec::new(),
            index,
            frontier_area: 0.0,
            uncovered_area,
        };
        dec.neighbors = dec.build_neighbors();
        dec
    }

    /// A decomposition made of the given cubes, e.g. for adjacency tests.
    /// Distances are computed exactly; no Whitney property is enforced.
    pub fn from_cubes(config: &CircleDomainConfig, ids: &[CubeId]) -> Self {
        let mut ids = ids.to_vec();
        ids.sort();
        ids.dedup();
        let max_level = ids.iter().map(|id| id.level).max().unwrap_or(0);
        let cubes = ids
            .iter()
            .map(|&id| {
                let d = match classify(config, &id.square(config.outer_radius)) {
                    CellStatus::Inside(d) => d,
                    _ => 0.0,
                };
                WhitneyCube::from_id(id, config.outer_radius, d)
            })
            .collect();
        Self::assemble(config.clone(), max_level, cubes)
    }

    fn build_neighbors(&self) -> Vec<Vec<usize>> {
        let found = par::map_range(self.cubes.len(), |k| self.coarser_neighbors(k));
        let mut nb: Vec<Vec<usize>> = vec![Vec::new(); self.cubes.len()];
        for (k, list) in found.into_iter().enumerate() {
            for m in list {
                nb[k].push(m);
                nb[m].push(k);
            }
        }
        for list in &mut nb {
            list.sort_unstable();
            list.dedup();
        }
        nb
    }

    /// Neighbors across each side with side length at least that of cube `k`.
    fn coarser_neighbors(&self, k: usize) -> Vec<usize> {
        let cube = &self.cubes[k];
        let c = cube.center();
        let step = 0.5 * cube.side * (1.0 + 1e-6);
        let mut out = Vec::new();
        for dir in [Complex::new(1.0, 0.0), Complex::new(-1.0, 0.0), Complex::new(0.0, 1.0), Complex::new(0.0, -1.0)] {
            let probe = c + dir * step;
            for level in (0..=cube.id.level).rev() {
                let id = CubeId::containing(probe, level, self.config.outer_radius);
                if let Some(&m) = self.index.get(&id) {
                    out.push(m);
                    break;
                }
            }
        }
        out
    }

    pub fn config(&self) -> &CircleDomainConfig {
        &self.config
    }

    pub fn max_level(&self) -> u32 {
        self.max_level
    }

    pub fn cubes(&self) -> &[WhitneyCube] {
        &self.cubes
    }

    pub fn cube(&self, k: usize) -> &WhitneyCube {
        &self.cubes[k]
    }

    pub fn len(&self) -> usize {
        self.cubes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cubes.is_empty()
    }

    /// Adjacent cubes of cube `k`, excluding `k` itself.
    pub fn neighbors(&self, k: usize) -> &[usize] {
        &self.neighbors[k]
    }

    pub fn index_of(&self, id: &CubeId) -> Option<usize> {
        self.index.get(id).copied()
    }

    /// Area of `D` not covered by emitted cubes.
    pub fn uncovered_area(&self) -> f64 {
        self.uncovered_area
    }

    /// Total area of the cells left unresolved at `max_level`; an upper
    /// bound for `uncovered_area`.
    pub fn frontier_area(&self) -> f64 {
        self.frontier_area
    }

    pub fn covered_area(&self) -> f64 {
        self.cubes.iter().map(WhitneyCube::area).sum()
    }

    /// Side length at `max_level`.
    pub fn finest_side(&self) -> f64 {
        side_at(self.config.outer_radius, self.max_level)
    }

    /// Index of a cube containing `p` (half-open cells), if any.
    pub fn locate(&self, p: Complex) -> Option<usize> {
        (0..=self.max_level).find_map(|level| {
            self.index.get(&CubeId::containing(p, level, self.config.outer_radius)).copied()
        })
    }

    /// All cubes whose closed square contains `p`.
    pub fn cubes_containing(&self, p: Complex) -> Vec<usize> {
        let mut out = Vec::new();
        for level in 0..=self.max_level {
            let side = side_at(self.config.outer_radius, level);
            let (fi, fj) = ((p.re / side).floor() as i64, (p.im / side).floor() as i64);
            for i in fi - 1..=fi + 1 {
                for j in fj - 1..=fj + 1 {
                    if let Some(&k) = self.index.get(&CubeId::new(level, i, j)) {
                        if self.cubes[k].contains(p) {
                            out.push(k);
                        }
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Splits the segment `[a, b]` into pieces lying in single cubes and
    /// uncovered pieces.
    pub fn walk_segment(&self, a: Complex, b: Complex) -> Vec<SegmentPiece> {
        let len = (b - a).norm();
        if len == 0.0 {
            return vec![SegmentPiece { t0: 0.0, t1: 1.0, cube: self.locate(a) }];
        }
        let tiny = 1e-12 * self.finest_side() / len;
        let uncovered_step = (self.finest_side() / 8.0) / len;
        let mut pieces: Vec<SegmentPiece> = Vec::new();
        let mut t = 0.0;
        while t < 1.0 {
            let probe = a + (b - a) * (t + tiny).min(1.0);
            let (t1, cube) = match self.locate(probe) {
                Some(k) => {
                    let exit = self.cubes[k].square.clip_segment(a, b, 0.0).map_or(t, |(_, t1)| t1);
                    (exit.max(t + tiny).min(1.0), Some(k))
                }
                None => ((t + uncovered_step).min(1.0), None),
            };
            match pieces.last_mut() {
                Some(last) if last.cube == cube => last.t1 = t1,
                _ => pieces.push(SegmentPiece { t0: t, t1, cube }),
            }
            t = t1;
        }
        pieces
    }

    /// Every cube whose closed square meets the closed segment `[a, b]`.
    pub fn cubes_meeting_segment(&self, a: Complex, b: Complex) -> Vec<usize> {
        let mut seed: HashSet<usize> = self.walk_segment(a, b).iter().filter_map(|p| p.cube).collect();
        seed.extend(self.cubes_containing(a));
        seed.extend(self.cubes_containing(b));
        let mut candidates = seed.clone();
        let mut frontier: Vec<usize> = seed.into_iter().collect();
        for _ in 0..2 {
            let mut next = Vec::new();
            for &k in &frontier {
                for &m in &self.neighbors[k] {
                    if candidates.insert(m) {
                        next.push(m);
                    }
                }
            }
            frontier = next;
        }
        let mut out: Vec<usize> = candidates
            .into_iter()
            .filter(|&k| {
                let sq = &self.cubes[k].square;
                sq.clip_segment(a, b, 1e-12 * sq.side).is_some()
            })
            .collect();
        out.sort_unstable();
        out
    }
}

/// Adjacency summary.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjacencyReport {
    /// Adjacent pairs `(k, m)` with `k ≤ m`; every cube is paired with itself.
    pub pairs: Vec<(usize, usize)>,
    pub max_side_ratio: f64,
    pub ratio_violations: usize,
    pub min_neighbors: usize,
    pub max_neighbors: usize,
}

pub fn adjacency_check(dec: &WhitneyDecomposition) -> AdjacencyReport {
    let mut pairs = Vec::new();
    let mut max_ratio: f64 = 1.0;
    let mut violations = 0;
    for k in 0..dec.len() {
        pairs.push((k, k));
        for &m in dec.neighbors(k) {
            if m > k {
                pairs.push((k, m));
                let (a, b) = (dec.cube(k).side, dec.cube(m).side);
                let ratio = a.max(b) / a.min(b);
                max_ratio = max_ratio.max(ratio);
                if ratio > 4.0 {
                    violations += 1;
                }
            }
        }
    }
    let counts = (0..dec.len()).map(|k| dec.neighbors(k).len());
    AdjacencyReport {
        pairs,
        max_side_ratio: max_ratio,
        ratio_violations: violations,
        min_neighbors: counts.clone().min().unwrap_or(0),
        max_neighbors: counts.max().unwrap_or(0),
    }
}

/// Violation counts for the three Whitney properties plus area bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct PropertyReport {
    pub cube_count: usize,
    pub overlap_violations: usize,
    pub distance_violations: usize,
    pub containment_violations: usize,
    pub ratio_violations: usize,
    /// `|covered + uncovered − Area(D)|`.
    pub area_residual: f64,
    pub uncovered_area: f64,
    pub frontier_area: f64,
}

impl PropertyReport {
    pub fn total_violations(&self) -> usize {
        self.overlap_violations + self.distance_violations + self.containment_violations + self.ratio_violations
    }
}

/// Re-verifies every emitted cube with exact geometry.
pub fn check_properties(dec: &WhitneyDecomposition) -> PropertyReport {
    let config = dec.config();
    let ids: HashSet<CubeId> = dec.cubes().iter().map(|c| c.id).collect();
    let per_cube = par::map(dec.cubes(), |cube| {
        let mut overlap = 0;
        let mut ancestor = cube.id.parent();
        while let Some(a) = ancestor {
            if ids.contains(&a) {
                overlap += 1;
            }
            ancestor = a.parent();
        }
        let (contain, dist) = match classify(config, &cube.square) {
            CellStatus::Inside(d) => {
                let r = d / cube.side;
                (0, usize::from(!(r > SQRT_2 && r <= 4.0 * SQRT_2)))
            }
            _ => (1, 0),
        };
        (overlap, contain, dist)
    });
    let adjacency = adjacency_check(dec);
    let covered = dec.covered_area();
    PropertyReport {
        cube_count: dec.len(),
        overlap_violations: per_cube.iter().map(|t| t.0).sum(),
        containment_violations: per_cube.iter().map(|t| t.1).sum(),
        distance_violations: per_cube.iter().map(|t| t.2).sum(),
        ratio_violations: adjacency.ratio_violations,
        area_residual: (covered + dec.uncovered_area() - config.area()).abs(),
        uncovered_area: dec.uncovered_area(),
        frontier_area: dec.frontier_area(),
    }
}
