//! Domain generators.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use schottky_lab::{CircleDomainConfig, Complex, Disk};
use serde_json::json;

use crate::spec::{DomainSpec, GeneratorBlock};
use crate::CliError;

/// Random disks in `B(0, R)` with radii in `[min_radius, max_radius]` and
/// closure gaps of at least `min_gap`, between each other and to the
/// outer circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PackingParams {
    pub count: usize,
    pub outer_radius: f64,
    pub min_radius: f64,
    pub max_radius: f64,
    pub min_gap: f64,
}

impl Default for PackingParams {
    fn default() -> Self {
        Self { count: 4, outer_radius: 1.0, min_radius: 0.05, max_radius: 0.2, min_gap: 0.02 }
    }
}

const ATTEMPTS_PER_DISK: usize = 10_000;

pub fn random_packing(p: PackingParams, seed: u64) -> Result<DomainSpec, CliError> {
    let r = p.outer_radius;
    if !(r > 0.0 && p.min_radius > 0.0 && p.max_radius >= p.min_radius && p.min_gap >= 0.0) || p.count > 256 {
        return Err(CliError::Invalid(format!("packing parameters out of range: {p:?}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut disks: Vec<Disk> = Vec::with_capacity(p.count);
    let mut attempts = 0;
    while disks.len() < p.count {
        attempts += 1;
        if attempts > ATTEMPTS_PER_DISK * (p.count + 1) {
            return Err(CliError::Invalid(format!(
                "infeasible packing: placed {} of {} disks after {} attempts",
                disks.len(),
                p.count,
                attempts - 1
            )));
        }
        let rho = if p.max_radius > p.min_radius { rng.gen_range(p.min_radius..=p.max_radius) } else { p.min_radius };
        let reach = r - rho - p.min_gap;
        if reach <= 0.0 {
            continue;
        }
        let c = Complex::from_polar(reach * rng.gen_range(0.0f64..1.0).sqrt(), rng.gen_range(0.0..TAU));
        if disks.iter().all(|d| (d.center - c).norm() - d.radius - rho >= p.min_gap) {
            disks.push(Disk { center: c, radius: rho });
        }
    }
    let basepoint = find_basepoint(r, &disks, &mut rng)?;
    let config = CircleDomainConfig { outer_radius: r, disks, basepoint };
    let params = BTreeMap::from([
        ("count".to_string(), json!(p.count)),
        ("outer_radius".to_string(), json!(p.outer_radius)),
        ("min_radius".to_string(), json!(p.min_radius)),
        ("max_radius".to_string(), json!(p.max_radius)),
        ("min_gap".to_string(), json!(p.min_gap)),
    ]);
    finish(config, "random_packing", params, Some(seed))
}

/// Rings of `ring` circles placed around every circle of depth below
/// `depth`, starting from a central disk of radius `central_radius·R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SierpinskiParams {
    pub depth: usize,
    pub ring: usize,
    pub outer_radius: f64,
    pub central_radius: f64,
}

impl Default for SierpinskiParams {
    fn default() -> Self {
        Self { depth: 1, ring: 6, outer_radius: 1.0, central_radius: 0.25 }
    }
}

/// Gap between a circle and its ring, relative to the circle's radius.
const RING_GAP: f64 = 0.1;

pub fn sierpinski_type(p: SierpinskiParams, seed: u64) -> Result<DomainSpec, CliError> {
    let r = p.outer_radius;
    if !(r > 0.0 && p.central_radius > 0.0 && p.central_radius < 0.5) || !(3..=24).contains(&p.ring) || p.depth > 4 {
        return Err(CliError::Invalid(format!("sierpinski parameters out of range: {p:?}")));
    }
    let s = (PI / p.ring as f64).sin();
    // Ring disks of radius q·ρ at distance (1 + gap)ρ + qρ; neighbors are
    // then a ring radius apart.
    let q = (1.0 + RING_GAP) * s / (1.5 - s);
    let min_gap = 1e-3 * r;
    let mut disks = vec![Disk { center: Complex::new(0.0, 0.0), radius: p.central_radius * r }];
    let mut frontier = vec![0usize];
    for _ in 0..p.depth {
        let mut next = Vec::new();
        for &parent in &frontier {
            let Disk { center, radius } = disks[parent];
            let dist = (1.0 + RING_GAP) * radius + q * radius;
            let phase = center.im.atan2(center.re);
            for k in 0..p.ring {
                let c = center + Complex::from_polar(dist, phase + TAU * k as f64 / p.ring as f64);
                let d = Disk { center: c, radius: q * radius };
                let fits = c.norm() + d.radius <= r - min_gap
                    && disks.iter().all(|o| (o.center - c).norm() - o.radius - d.radius >= min_gap);
                if fits {
                    disks.push(d);
                    next.push(disks.len() - 1);
                }
            }
        }
        frontier = next;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let basepoint = find_basepoint(r, &disks, &mut rng)?;
    let config = CircleDomainConfig { outer_radius: r, disks, basepoint };
    let params = BTreeMap::from([
        ("depth".to_string(), json!(p.depth)),
        ("ring".to_string(), json!(p.ring)),
        ("outer_radius".to_string(), json!(p.outer_radius)),
        ("central_radius".to_string(), json!(p.central_radius)),
    ]);
    finish(config, "sierpinski_type", params, Some(seed))
}

/// The origin when it is well inside `D`, otherwise the best of seeded
/// candidates by boundary distance.
fn find_basepoint(r: f64, disks: &[Disk], rng: &mut ChaCha8Rng) -> Result<Complex, CliError> {
    let delta = |z: Complex| {
        disks
            .iter()
            .map(|d| (z - d.center).norm() - d.radius)
            .fold(r - z.norm(), f64::min)
    };
    let origin = Complex::new(0.0, 0.0);
    if delta(origin) >= 0.05 * r {
        return Ok(origin);
    }
    let mut best = (delta(origin), origin);
    for _ in 0..4096 {
        let z = Complex::from_polar(r * rng.gen_range(0.0f64..1.0).sqrt(), rng.gen_range(0.0..TAU));
        let d = delta(z);
        if d > best.0 {
            best = (d, z);
        }
    }
    if best.0 <= 0.0 {
        return Err(CliError::Invalid("no basepoint found inside the domain".into()));
    }
    Ok(best.1)
}

fn finish(
    config: CircleDomainConfig,
    kind: &str,
    params: BTreeMap<String, serde_json::Value>,
    seed: Option<u64>,
) -> Result<DomainSpec, CliError> {
    config.ensure_valid().map_err(CliError::from)?;
    Ok(DomainSpec::from_config(&config, Some(GeneratorBlock { kind: kind.to_string(), params, seed })))
}
