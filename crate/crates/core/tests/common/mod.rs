#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use schottky_lab::{CircleDomainConfig, Complex, Disk, Mobius};

pub fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Seeded config in the unit ball with `n` disks of radius in
/// `[0.05, 0.2]`, gaps at least 0.02 and the basepoint at the origin.
pub fn random_config(seed: u64, n: usize) -> CircleDomainConfig {
    let mut rng = rng(seed);
    let mut disks: Vec<Disk> = Vec::new();
    while disks.len() < n {
        let r = rng.gen_range(0.05..0.2);
        let center = Complex::from_polar(rng.gen_range(0.0..1.0f64).sqrt() * (0.98 - r), rng.gen_range(0.0..std::f64::consts::TAU));
        if center.norm() - r < 0.1 {
            continue;
        }
        if disks.iter().all(|d| (d.center - center).norm() - d.radius - r >= 0.02) {
            disks.push(Disk { center, radius: r });
        }
    }
    CircleDomainConfig::new(1.0, disks, c(0.0, 0.0)).expect("valid config")
}

pub fn three_disk() -> CircleDomainConfig {
    CircleDomainConfig::new(
        1.0,
        vec![
            Disk::new(c(0.5, 0.1), 0.15).unwrap(),
            Disk::new(c(-0.4, 0.4), 0.2).unwrap(),
            Disk::new(c(-0.1, -0.6), 0.12).unwrap(),
        ],
        c(0.0, 0.0),
    )
    .unwrap()
}

/// Uniform point of `D`.
pub fn point_in_domain(config: &CircleDomainConfig, rng: &mut ChaCha8Rng) -> Complex {
    let r = config.outer_radius;
    loop {
        let z = c(rng.gen_range(-r..r), rng.gen_range(-r..r));
        if config.contains(z) {
            return z;
        }
    }
}

/// Orientation-preserving Möbius map with its pole at distance at least
/// `2R` from the origin.
pub fn random_mobius(rng: &mut ChaCha8Rng, outer_radius: f64) -> Mobius {
    loop {
        let a = c(rng.gen_range(0.5..2.0), rng.gen_range(-1.0..1.0));
        let b = c(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)) * outer_radius;
        let cc = c(rng.gen_range(-0.25..0.25), rng.gen_range(-0.25..0.25)) / outer_radius;
        let d = c(1.0, 0.0);
        let Ok(m) = Mobius::new(a, b, cc, d) else { continue };
        if m.pole().is_none_or(|p| p.norm() >= 2.0 * outer_radius) {
            return m;
        }
    }
}
