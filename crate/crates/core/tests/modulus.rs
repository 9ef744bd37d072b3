mod common;

use std::f64::consts::{PI, TAU};

use common::{c, random_mobius, rng};
use proptest::prelude::*;
use schottky_lab::modulus::{
    annulus_modulus, circular_dilatation, fatness_check, grotzsch_mu, koebe_distortion_check, modulus_chain_bound,
    superadditivity_margin, teichmuller_bound, teichmuller_witness, CircularAnnulus, Nesting, Shape,
};
use schottky_lab::{Complex, Disk, Error, Mobius};

proptest! {
    #[test]
    fn modulus_is_additive_and_similarity_invariant(
        inner in 0.01..1.0f64, t in 0.01..0.99f64, grow in 1.01..20.0f64,
        shift in (-5.0..5.0f64, -5.0..5.0f64), scale in 0.01..100.0f64, angle in 0.0..TAU,
    ) {
        let outer = inner * grow;
        let mid = inner * grow.powf(t);
        let a = CircularAnnulus::new(c(0.0, 0.0), inner, outer).unwrap();
        let parts = [CircularAnnulus::new(c(0.0, 0.0), inner, mid).unwrap(), CircularAnnulus::new(c(0.0, 0.0), mid, outer).unwrap()];
        prop_assert!((a.modulus() - parts.iter().map(annulus_modulus).sum::<f64>()).abs() <= 1e-12);
        let center = Complex::from_polar(1.0, angle) * c(shift.0, shift.1);
        let moved = CircularAnnulus::new(center, inner * scale, outer * scale).unwrap();
        prop_assert!((moved.modulus() - a.modulus()).abs() <= 1e-12);
    }

    #[test]
    fn grotzsch_identity(x in 1e-6..(1.0 - 1e-6f64)) {
        let xp = ((1.0 - x) * (1.0 + x)).sqrt();
        prop_assume!(xp > 0.0 && xp < 1.0);
        let v = grotzsch_mu(x).unwrap() * grotzsch_mu(xp).unwrap();
        prop_assert!((v - PI * PI / 4.0).abs() <= 1e-9);
    }

    #[test]
    fn random_concentric_subannuli_never_exceed(cuts in proptest::collection::vec(0.0..1.0f64, 2..10)) {
        let a = CircularAnnulus::new(c(0.3, -0.2), 0.1, 2.0).unwrap();
        let mut radii: Vec<f64> = cuts.iter().map(|t| 0.1 * 20f64.powf(*t)).collect();
        radii.sort_by(f64::total_cmp);
        radii.dedup();
        let nested: Vec<CircularAnnulus> = radii
            .chunks_exact(2)
            .filter(|w| w[0] < w[1])
            .map(|w| CircularAnnulus::new(a.center, w[0], w[1]).unwrap())
            .collect();
        let margin = superadditivity_margin(&a, &nested, Nesting::Validate).unwrap();
        prop_assert!(margin >= -1e-12);
    }
}

#[test]
fn exact_partition_and_gap() {
    let a = CircularAnnulus::new(c(0.0, 0.0), 1.0, 4.0).unwrap();
    let exact = [CircularAnnulus::new(c(0.0, 0.0), 1.0, 2.0).unwrap(), CircularAnnulus::new(c(0.0, 0.0), 2.0, 4.0).unwrap()];
    assert_eq!(superadditivity_margin(&a, &exact, Nesting::Validate).unwrap(), 0.0);
    let gapped = [CircularAnnulus::new(c(0.0, 0.0), 1.0, 2.0).unwrap(), CircularAnnulus::new(c(0.0, 0.0), 3.0, 4.0).unwrap()];
    let gap = CircularAnnulus::new(c(0.0, 0.0), 2.0, 3.0).unwrap().modulus();
    assert!((superadditivity_margin(&a, &gapped, Nesting::Validate).unwrap() - gap).abs() < 1e-15);
    let overlapping = [CircularAnnulus::new(c(0.0, 0.0), 1.0, 3.0).unwrap(), CircularAnnulus::new(c(0.0, 0.0), 2.0, 4.0).unwrap()];
    assert!(matches!(superadditivity_margin(&a, &overlapping, Nesting::Validate), Err(Error::InvalidNesting(_))));
}

#[test]
fn grotzsch_small_argument_and_monotonicity() {
    for x in [1e-3, 1e-4] {
        assert!((grotzsch_mu(x).unwrap() - (4.0 / x).ln()).abs() <= 1e-5);
    }
    let values: Vec<f64> = (1..100).map(|k| grotzsch_mu(k as f64 / 100.0).unwrap()).collect();
    assert!(values.windows(2).all(|w| w[1] < w[0]));
    assert!((grotzsch_mu(std::f64::consts::FRAC_1_SQRT_2).unwrap() - PI / 2.0).abs() < 1e-12);
}

#[test]
fn teichmuller_witnesses_and_monotonicity() {
    assert!((teichmuller_bound(c(1.0, 0.0), c(0.0, 1.0)).unwrap() - PI).abs() < 1e-12);
    for a in 1..=10 {
        for b in 1..=10 {
            let z1 = Complex::from_polar(a as f64 / 10.0, a as f64);
            let z2 = Complex::from_polar(1.0 + b as f64, -(b as f64));
            assert!(teichmuller_witness(z1, z2).unwrap().modulus() <= teichmuller_bound(z1, z2).unwrap());
        }
    }
    let bounds: Vec<f64> = (1..50).map(|k| teichmuller_bound(c(k as f64 / 50.0, 0.0), c(1.0, 0.0)).unwrap()).collect();
    assert!(bounds.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn dilatation_of_mobius_and_affine_maps() {
    let mut r = rng(5);
    for _ in 0..10 {
        let m = random_mobius(&mut r, 1.0);
        let report = circular_dilatation(|z| m.apply(z), c(0.1, 0.2), 0.1, 11, 64).unwrap();
        assert!((report.finest_radius - 0.1 / 1024.0).abs() < 1e-18);
        assert!(report.ratios.windows(2).all(|w| w[1] <= w[0] + 1e-12));
        assert!(report.finest_ratio - 1.0 < 1e-2);
        assert!((report.limit_estimate - 1.0).abs() <= 1e-6, "{report:?}");
    }
    let affine = circular_dilatation(|z| Ok(z + 0.2 * z.conj()), c(0.3, -0.1), 0.5, 8, 64).unwrap();
    assert!(affine.ratios.iter().all(|h| (h - 1.5).abs() <= 1e-9));
}

#[test]
fn dilatation_ignores_conformal_pre_and_post_composition() {
    let f = |z: Complex| z + 0.2 * z.conj() + 0.05 * z * z;
    let base = circular_dilatation(|z| Ok(f(z)), c(0.0, 0.0), 1e-4, 1, 256).unwrap().finest_ratio;
    let rotation = Complex::from_polar(1.0, 0.7);
    let pre = circular_dilatation(|z| Ok(f(z * rotation)), c(0.0, 0.0), 1e-4, 1, 256).unwrap().finest_ratio;
    let m = Mobius::new(c(1.0, 0.5), c(0.1, 0.0), c(0.2, 0.0), c(1.0, 0.0)).unwrap();
    let post = circular_dilatation(|z| m.apply(f(z)), c(0.0, 0.0), 1e-4, 1, 256).unwrap().finest_ratio;
    assert!((pre - base).abs() <= 1e-3, "{pre} vs {base}");
    assert!((post - base).abs() <= 1e-3, "{post} vs {base}");
}

#[test]
fn chain_bound_arithmetic() {
    let c1 = 2f64.ln() / TAU;
    let b = modulus_chain_bound(c1, c1, 2.0 * c1).unwrap();
    assert!((b.value - c1).abs() < 1e-15);
    let doubled = modulus_chain_bound(c1, 2.0 * c1, 2.0 * c1).unwrap();
    assert!((doubled.value - 2.0 * b.value).abs() < 1e-15);
    for m in [3.0, 5.0, 11.0] {
        let v = modulus_chain_bound(c1, 0.3, m * c1).unwrap();
        assert!((v.value / (m * c1) - v.m2).abs() < 1e-15);
    }
    assert!(matches!(modulus_chain_bound(c1, c1, c1), Err(Error::NoInformation { .. })));
}

#[test]
fn koebe_distortion_is_uniform_over_mobius_maps() {
    let identity = koebe_distortion_check(Ok, |_| Ok(c(1.0, 0.0)), c(0.0, 0.0), 1.0, 0.5, 200, 1).unwrap();
    assert!((identity.constant() - 1.0).abs() < 1e-12);
    let mut r = rng(17);
    let mut worst: f64 = 1.0;
    for k in 0..20 {
        let m = random_mobius(&mut r, 1.0);
        let radius = m.pole().map_or(1.0, |p| p.norm()).min(2.0);
        let report = koebe_distortion_check(|z| m.apply(z), |z| m.derivative(z), c(0.0, 0.0), radius, 0.5, 500, k).unwrap();
        worst = worst.max(report.constant());
    }
    assert!(worst < 27.0, "{worst}");
}

#[test]
fn koebe_distortion_of_the_square_degrades_toward_the_edge() {
    let sq = |z: Complex| Ok(z * z);
    let d = |z: Complex| Ok(2.0 * z);
    let half = koebe_distortion_check(sq, d, c(2.0, 0.0), 1.0, 0.5, 2000, 3).unwrap().constant();
    let most = koebe_distortion_check(sq, d, c(2.0, 0.0), 1.0, 0.95, 2000, 3).unwrap().constant();
    assert!(half < 3.0 && most > half, "{half} {most}");
}

#[test]
fn fatness_of_disks_points_and_unions() {
    let unit = fatness_check(&Shape::Disk(Disk::unit()), 0).unwrap();
    assert!(unit.constant >= 0.3 && unit.constant <= 1.0);
    let small = fatness_check(&Shape::Disk(Disk::new(c(3.0, -1.0), 0.01).unwrap()), 0).unwrap();
    assert!((small.constant - unit.constant).abs() <= 1e-9);
    assert!(fatness_check(&Shape::Point(c(0.5, 0.5)), 0).unwrap().constant.is_infinite());
    let outer = Disk::new(c(0.0, 0.0), 0.3).unwrap();
    let reflected = outer.reflect_disk(&Disk::new(c(0.8, 0.0), 0.2).unwrap()).unwrap();
    let union = fatness_check(&Shape::Union(vec![Disk::new(c(0.8, 0.0), 0.2).unwrap(), reflected]), 4).unwrap();
    assert!(union.constant > 0.0 && union.constant.is_finite());
    assert!(matches!(fatness_check(&Shape::Union(vec![]), 0), Err(Error::DegenerateShape(_))));
}
