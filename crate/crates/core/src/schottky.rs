//! Reflection groups generated by the boundary circles of `Ω`.
//!
//! Generators are the reflections `R_j` across the circles `∂B_j`; the outer
//! circle of the bounding ball is not a generator. Indices are 0-based.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{image_disk, CircleDomainConfig, Complex, Disk, ImageRegion, Mobius};
use crate::par;

/// Default cap on the number of enumerated words or disks.
pub const DEFAULT_BUDGET: usize = 100_000;

/// Index sequence with no two consecutive entries equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ReducedWord(Vec<usize>);

impl ReducedWord {
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        if let Some(pos) = indices.windows(2).position(|w| w[0] == w[1]) {
            return Err(Error::NotReduced(pos + 1));
        }
        Ok(Self(indices))
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Option<usize> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<usize> {
        self.0.last().copied()
    }

    /// Group product `self · other`, cancelling `R_j R_j = id` at the seam.
    pub fn concat(&self, other: &ReducedWord) -> ReducedWord {
        let mut out = self.0.clone();
        for &i in &other.0 {
            if out.last() == Some(&i) {
                out.pop();
            } else {
                out.push(i);
            }
        }
        ReducedWord(out)
    }

    /// Inverse element (reflections are involutions).
    pub fn inverse(&self) -> ReducedWord {
        ReducedWord(self.0.iter().rev().copied().collect())
    }

    /// Word with every index replaced through `sigma`.
    pub fn relabel(&self, sigma: &[usize]) -> ReducedWord {
        ReducedWord(self.0.iter().map(|&i| sigma[i]).collect())
    }
}

/// Number of reduced words of length `k` over `n` letters.
pub fn word_count(n: usize, k: usize) -> u128 {
    match (n, k) {
        (_, 0) => 1,
        (0, _) => 0,
        (1, 1) => 1,
        (1, _) => 0,
        _ => {
            let mut c = n as u128;
            for _ in 1..k {
                c = c.saturating_mul(n as u128 - 1);
            }
            c
        }
    }
}

/// All reduced words of length `k` over `n` letters in lexicographic order.
pub fn enumerate_words(n: usize, k: usize) -> Result<Vec<ReducedWord>> {
    enumerate_words_with_budget(n, k, DEFAULT_BUDGET)
}

pub fn enumerate_words_with_budget(n: usize, k: usize, budget: usize) -> Result<Vec<ReducedWord>> {
    let count = word_count(n, k);
    if count > budget as u128 {
        return Err(Error::BudgetExceeded { count, budget });
    }
    let mut out = Vec::with_capacity(count as usize);
    let mut cur = Vec::with_capacity(k);
    fn rec(n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<ReducedWord>) {
        if cur.len() == k {
            out.push(ReducedWord(cur.clone()));
            return;
        }
        for i in 0..n {
            if cur.last() != Some(&i) {
                cur.push(i);
                rec(n, k, cur, out);
                cur.pop();
            }
        }
    }
    rec(n, k, &mut cur, &mut out);
    Ok(out)
}

/// `R_{i1} ∘ … ∘ R_{ik}`.
pub fn word_to_map(config: &CircleDomainConfig, word: &ReducedWord) -> Result<Mobius> {
    let n = config.disks.len();
    let mut map = Mobius::identity();
    for &i in word.indices() {
        let disk = config.disks.get(i).ok_or(Error::IndexOutOfRange { index: i, len: n })?;
        map = map.compose(&disk.reflection());
    }
    Ok(map)
}

/// `R_{w1} ∘ … ∘ R_{wk}(B_terminal)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReflectedDisk {
    pub word: ReducedWord,
    pub terminal: usize,
    pub disk: Disk,
}

impl ReflectedDisk {
    pub fn level(&self) -> usize {
        self.word.len()
    }

    /// The full index sequence `(w1, …, wk, terminal)`.
    pub fn sequence(&self) -> Vec<usize> {
        let mut s = self.word.indices().to_vec();
        s.push(self.terminal);
        s
    }

    /// The level-`(k-1)` disk this one is nested in.
    pub fn parent_key(&self) -> Option<(ReducedWord, usize)> {
        let w = self.word.indices();
        let (&last, rest) = w.split_last()?;
        Some((ReducedWord(rest.to_vec()), last))
    }
}

/// The disks making up the complement of `Ω̄_k`; `n(n−1)^k` of them.
pub fn complement_disks(config: &CircleDomainConfig, k: usize) -> Result<Vec<ReflectedDisk>> {
    complement_disks_with_budget(config, k, DEFAULT_BUDGET)
}

pub fn complement_disks_with_budget(config: &CircleDomainConfig, k: usize, budget: usize) -> Result<Vec<ReflectedDisk>> {
    let n = config.disks.len();
    let count = word_count(n, k + 1);
    if count > budget as u128 {
        return Err(Error::BudgetExceeded { count, budget });
    }
    let mut level: Vec<ReflectedDisk> = config
        .disks
        .iter()
        .enumerate()
        .map(|(t, &disk)| ReflectedDisk { word: ReducedWord::empty(), terminal: t, disk })
        .collect();
    for _ in 0..k {
        let expanded = par::map(&level, |rd| -> Result<Vec<ReflectedDisk>> {
            let head = rd.word.first().unwrap_or(rd.terminal);
            (0..n)
                .filter(|&i| i != head)
                .map(|i| {
                    let mut word = vec![i];
                    word.extend_from_slice(rd.word.indices());
                    Ok(ReflectedDisk {
                        word: ReducedWord(word),
                        terminal: rd.terminal,
                        disk: config.disks[i].reflect_disk(&rd.disk)?,
                    })
                })
                .collect()
        });
        let mut next = Vec::with_capacity(level.len() * n.saturating_sub(1));
        for e in expanded {
            next.extend(e?);
        }
        level = next;
    }
    level.sort_by_key(|a| a.sequence());
    Ok(level)
}

/// Nesting and disjointness diagnostics for one level of reflected disks.
#[derive(Debug, Clone, PartialEq)]
pub struct NestingReport {
    pub count: usize,
    /// Smallest closure gap between two disks of the level.
    pub min_gap: f64,
    pub overlapping_pairs: usize,
    /// Disks not compactly inside their parent.
    pub containment_failures: usize,
    /// Parent → number of children; every value should be `n − 1`.
    pub children_per_parent: Vec<usize>,
}

/// Checks level `k` against level `k − 1` (containment only when `k ≥ 1`).
pub fn check_nesting(config: &CircleDomainConfig, k: usize) -> Result<NestingReport> {
    let level = complement_disks(config, k)?;
    let mut min_gap = f64::INFINITY;
    let mut overlapping = 0;
    for a in 0..level.len() {
        for b in a + 1..level.len() {
            let gap = level[a].disk.gap(&level[b].disk);
            min_gap = min_gap.min(gap);
            if gap <= 0.0 {
                overlapping += 1;
            }
        }
    }
    let mut containment_failures = 0;
    let mut children: HashMap<(ReducedWord, usize), usize> = HashMap::new();
    if k >= 1 {
        let parents = complement_disks(config, k - 1)?;
        let index: HashMap<(ReducedWord, usize), Disk> =
            parents.iter().map(|p| ((p.word.clone(), p.terminal), p.disk)).collect();
        for p in &parents {
            children.insert((p.word.clone(), p.terminal), 0);
        }
        for rd in &level {
            let key = rd.parent_key().expect("level ≥ 1");
            match index.get(&key) {
                Some(parent) => {
                    let inside = (rd.disk.center - parent.center).norm() + rd.disk.radius < parent.radius;
                    if !inside {
                        containment_failures += 1;
                    }
                    *children.entry(key).or_insert(0) += 1;
                }
                None => containment_failures += 1,
            }
        }
    }
    let mut children_per_parent: Vec<(Vec<usize>, usize)> = children
        .into_iter()
        .map(|((w, t), c)| {
            let mut s = w.0;
            s.push(t);
            (s, c)
        })
        .collect();
    children_per_parent.sort();
    Ok(NestingReport {
        count: level.len(),
        min_gap,
        overlapping_pairs: overlapping,
        containment_failures,
        children_per_parent: children_per_parent.into_iter().map(|(_, c)| c).collect(),
    })
}

/// Largest `π r²` among the level-`k` reflected disks.
pub fn max_complement_disk_area(config: &CircleDomainConfig, k: usize) -> Result<f64> {
    Ok(complement_disks(config, k)?
        .iter()
        .map(|rd| rd.disk.area())
        .fold(0.0, f64::max))
}

/// Per-level area contraction bound `max_j (r_j / d_j)⁴`, where `d_j` is
/// the distance from `a_j` to the nearest other disk.
pub fn area_decay_bound(config: &CircleDomainConfig) -> f64 {
    let disks = &config.disks;
    let mut q: f64 = 0.0;
    for (j, dj) in disks.iter().enumerate() {
        let d = disks
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != j)
            .map(|(_, di)| (di.center - dj.center).norm() - di.radius)
            .fold(f64::INFINITY, f64::min);
        if d.is_finite() {
            q = q.max((dj.radius / d).powi(4));
        }
    }
    q
}

/// Estimate of the limit point with a given address.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitEstimate {
    /// Center of the deepest nested disk.
    pub point: Complex,
    /// Diameter of the nested disk at depths `1..=depth`.
    pub diameters: Vec<f64>,
    /// Centers of the nested disks at depths `1..=depth`.
    pub centers: Vec<Complex>,
}

impl LimitEstimate {
    pub fn diameter_bound(&self) -> f64 {
        self.diameters.last().copied().unwrap_or(f64::INFINITY)
    }
}

/// Nested disks `R_{i1}∘…∘R_{id}(B_{i_{d+1}})` for `d = 1..=depth`.
pub fn limit_point(config: &CircleDomainConfig, address: &[usize], depth: usize) -> Result<LimitEstimate> {
    ReducedWord::new(address.to_vec())?;
    if depth == 0 || address.len() < depth + 1 {
        return Err(Error::InvalidArgument(format!(
            "depth {depth} needs an address of length at least {}",
            depth + 1
        )));
    }
    let n = config.disks.len();
    if let Some(&bad) = address.iter().find(|&&i| i >= n) {
        return Err(Error::IndexOutOfRange { index: bad, len: n });
    }
    let mut diameters = Vec::with_capacity(depth);
    let mut centers = Vec::with_capacity(depth);
    for d in 1..=depth {
        let mut disk = config.disks[address[d]];
        for &i in address[..d].iter().rev() {
            disk = config.disks[i].reflect_disk(&disk)?;
        }
        diameters.push(disk.diameter());
        centers.push(disk.center);
    }
    Ok(LimitEstimate { point: *centers.last().expect("depth ≥ 1"), diameters, centers })
}

/// Writes `z = T(p)` with `p ∈ Ω̄` by descending through the disks.
/// Returns `T` and `p`.
pub fn locate_copy(config: &CircleDomainConfig, z: Complex, max_depth: usize) -> Result<(ReducedWord, Complex)> {
    let mut word = Vec::new();
    let mut p = z;
    loop {
        let hit = config
            .disks
            .iter()
            .enumerate()
            .find(|&(j, d)| word.last() != Some(&j) && d.contains(p));
        let Some((j, disk)) = hit else { break };
        if word.len() == max_depth {
            return Err(Error::ResolutionInsufficient(format!("{z} lies deeper than {max_depth} reflections")));
        }
        p = disk.reflect(p)?;
        word.push(j);
    }
    Ok((ReducedWord(word), p))
}

/// Extension of a circle-respecting Möbius map `f: Ω → Ω*` to the copies
/// `T(Ω̄)` by `f̃ = T* ∘ f ∘ T⁻¹`.
#[derive(Debug, Clone)]
pub struct ReflectionExtension {
    domain: CircleDomainConfig,
    target: CircleDomainConfig,
    map: Mobius,
    correspondence: Vec<usize>,
}

/// Outcome of [`ReflectionExtension::conjugation_residual`].
#[derive(Debug, Clone, PartialEq)]
pub struct ConjugationReport {
    pub residual: f64,
    pub worst_word: ReducedWord,
    pub worst_point: Complex,
    pub words_tested: usize,
    pub samples: usize,
    /// Residual above the tolerance.
    pub flagged: bool,
}

impl ReflectionExtension {
    /// Matches every circle of `domain` to its image circle in `target`.
    pub fn new(domain: &CircleDomainConfig, target: &CircleDomainConfig, map: Mobius) -> Result<Self> {
        let n = domain.disks.len();
        if target.disks.len() != n {
            return Err(Error::NotCircleRespecting(format!(
                "{n} domain circles but {} target circles",
                target.disks.len()
            )));
        }
        let scale = target.outer_radius.max(1.0);
        let tol = 1e-9 * scale;
        let mut used = vec![false; n];
        let mut correspondence = Vec::with_capacity(n);
        for (j, disk) in domain.disks.iter().enumerate() {
            let image = match image_disk(&map, disk) {
                ImageRegion::Disk(d) => d,
                other => {
                    return Err(Error::NotCircleRespecting(format!("disk {j} maps to {other:?}")));
                }
            };
            let best = (0..n)
                .filter(|&i| !used[i])
                .map(|i| {
                    let t = target.disks[i];
                    (i, (t.center - image.center).norm() + (t.radius - image.radius).abs())
                })
                .min_by(|a, b| a.1.total_cmp(&b.1));
            match best {
                Some((i, err)) if err <= tol => {
                    used[i] = true;
                    correspondence.push(i);
                }
                Some((_, err)) => {
                    return Err(Error::NotCircleRespecting(format!(
                        "image of circle {j} misses every target circle (closest by {err:e})"
                    )));
                }
                None => unreachable!("counts match"),
            }
        }
        Ok(Self { domain: domain.clone(), target: target.clone(), map, correspondence })
    }

    /// Uses the given correspondence without checking it.
    pub fn with_correspondence(
        domain: &CircleDomainConfig,
        target: &CircleDomainConfig,
        map: Mobius,
        correspondence: Vec<usize>,
    ) -> Result<Self> {
        let n = target.disks.len();
        if correspondence.len() != domain.disks.len() {
            return Err(Error::InvalidArgument("correspondence length differs from circle count".into()));
        }
        if let Some(&bad) = correspondence.iter().find(|&&i| i >= n) {
            return Err(Error::IndexOutOfRange { index: bad, len: n });
        }
        Ok(Self { domain: domain.clone(), target: target.clone(), map, correspondence })
    }

    pub fn correspondence(&self) -> &[usize] {
        &self.correspondence
    }

    pub fn map(&self) -> &Mobius {
        &self.map
    }

    /// `T*` for the word `T`.
    pub fn target_word(&self, word: &ReducedWord) -> ReducedWord {
        word.relabel(&self.correspondence)
    }

    /// `f̃(z)` for `z ∈ T(Ω̄)`, where `T` is `word`.
    pub fn evaluate(&self, word: &ReducedWord, z: Complex) -> Result<Complex> {
        let t = word_to_map(&self.domain, word)?;
        let p = t.inverse().apply(z)?;
        let tol = 1e-9 * self.domain.outer_radius;
        if self.domain.disks.iter().any(|d| (p - d.center).norm() < d.radius - tol) {
            return Err(Error::OutsideDomain(z));
        }
        let t_star = word_to_map(&self.target, &self.target_word(word))?;
        t_star.apply(self.map.apply(p)?)
    }

    /// `f̃(z)` with the copy found by descending through the disks.
    pub fn evaluate_anywhere(&self, z: Complex, max_depth: usize) -> Result<Complex> {
        let (word, p) = locate_copy(&self.domain, z, max_depth)?;
        let t_star = word_to_map(&self.target, &self.target_word(&word))?;
        t_star.apply(self.map.apply(p)?)
    }

    /// `max |f̃(T z) − T*(f̃(z))|` over reduced words `T` of length
    /// `1..=max_word_length` and sample points `z ∈ Ω̄` (interior points and
    /// points on the circles).
    pub fn conjugation_residual(&self, max_word_length: usize, samples: usize, seed: u64) -> Result<ConjugationReport> {
        let points = omega_samples(&self.domain, samples, seed);
        let n = self.domain.disks.len();
        let mut words = Vec::new();
        for k in 1..=max_word_length {
            words.extend(enumerate_words(n, k)?);
        }
        let per_word = par::map(&words, |w| -> Result<(f64, Complex)> {
            let t = word_to_map(&self.domain, w)?;
            let t_star = word_to_map(&self.target, &self.target_word(w))?;
            let mut worst = (0.0, Complex::new(0.0, 0.0));
            for &z in &points {
                let lhs = self.evaluate_anywhere(t.apply(z)?, max_word_length + 2)?;
                let rhs = t_star.apply(self.map.apply(z)?)?;
                let err = (lhs - rhs).norm();
                if err > worst.0 {
                    worst = (err, z);
                }
            }
            Ok(worst)
        });
        let mut report = ConjugationReport {
            residual: 0.0,
            worst_word: ReducedWord::empty(),
            worst_point: Complex::new(0.0, 0.0),
            words_tested: words.len(),
            samples: points.len(),
            flagged: false,
        };
        for (w, r) in words.iter().zip(per_word) {
            let (err, z) = r?;
            if err > report.residual {
                report.residual = err;
                report.worst_word = w.clone();
                report.worst_point = z;
            }
        }
        report.flagged = report.residual > 1e-9;
        Ok(report)
    }
}

/// Seeded sample points of `Ω̄` near the disks: half interior points, half
/// points on the circles.
pub fn omega_samples(config: &CircleDomainConfig, count: usize, seed: u64) -> Vec<Complex> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = config.disks.len();
    let mut out = Vec::with_capacity(count);
    if n == 0 {
        return out;
    }
    let on_circles = count / 2;
    for k in 0..on_circles {
        let d = config.disks[k % n];
        out.push(d.boundary_point(rng.gen_range(0.0..std::f64::consts::TAU)));
    }
    let reach = config
        .disks
        .iter()
        .map(|d| d.center.norm() + 2.0 * d.radius)
        .fold(0.0, f64::max);
    while out.len() < count {
        let p = Complex::new(rng.gen_range(-reach..reach), rng.gen_range(-reach..reach));
        if config.disks.iter().all(|d| !d.contains_closed(p)) {
            out.push(p);
        }
    }
    out
}

/// Reference configuration: two disks of radius 0.3 with centers 1 apart.
pub fn reference_two_disk() -> CircleDomainConfig {
    CircleDomainConfig {
        outer_radius: 1.0,
        disks: vec![
            Disk { center: Complex::new(-0.5, 0.0), radius: 0.3 },
            Disk { center: Complex::new(0.5, 0.0), radius: 0.3 },
        ],
        basepoint: Complex::new(0.0, 0.0),
    }
}
