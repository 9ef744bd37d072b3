//! Moduli of circular annuli, the Grötzsch and Teichmüller functions,
//! circular dilatation, distortion and fatness measurements.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{CircleDomainConfig, Complex, Disk, Mobius};
use crate::par;
use crate::whitney::WhitneyDecomposition;

/// `A(z₀; r_in, r_out) = {r_in < |z − z₀| < r_out}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircularAnnulus {
    pub center: Complex,
    pub inner: f64,
    pub outer: f64,
}

impl CircularAnnulus {
    pub fn new(center: Complex, inner: f64, outer: f64) -> Result<Self> {
        if !(inner > 0.0 && outer > inner && outer.is_finite()) {
            return Err(Error::InvalidArgument(format!("annulus radii must satisfy 0 < {inner} < {outer}")));
        }
        Ok(Self { center, inner, outer })
    }

    pub fn modulus(&self) -> f64 {
        annulus_modulus(self)
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { center: self.center * s, inner: self.inner * s, outer: self.outer * s }
    }

    pub fn contains(&self, z: Complex) -> bool {
        let d = (z - self.center).norm();
        self.inner < d && d < self.outer
    }
}

/// `log(r_out / r_in) / 2π`.
pub fn annulus_modulus(a: &CircularAnnulus) -> f64 {
    (a.outer / a.inner).ln() / TAU
}

/// How the separating property of sub-annuli is established.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Nesting {
    /// Checked from the circles.
    Validate,
    /// Asserted by the caller.
    Declared,
}

fn disk_inside(inner_c: Complex, inner_r: f64, outer_c: Complex, outer_r: f64) -> bool {
    (inner_c - outer_c).norm() + inner_r <= outer_r * (1.0 + 1e-12)
}

/// `Mod(A) − Σ Mod(A_j)` for disjoint annuli `A_j ⊂ A` separating the
/// boundary components of `A`.
pub fn superadditivity_margin(a: &CircularAnnulus, nested: &[CircularAnnulus], nesting: Nesting) -> Result<f64> {
    if nesting == Nesting::Validate {
        for (j, s) in nested.iter().enumerate() {
            if !disk_inside(s.center, s.outer, a.center, a.outer) || !disk_inside(a.center, a.inner, s.center, s.inner) {
                return Err(Error::InvalidNesting(format!("annulus {j} does not separate the boundary of A inside A")));
            }
        }
        let mut order: Vec<usize> = (0..nested.len()).collect();
        order.sort_by(|&i, &j| nested[i].outer.total_cmp(&nested[j].outer));
        for w in order.windows(2) {
            let (s, t) = (nested[w[0]], nested[w[1]]);
            if !disk_inside(s.center, s.outer, t.center, t.inner) {
                return Err(Error::InvalidNesting(format!("annuli {} and {} overlap", w[0], w[1])));
            }
        }
    }
    Ok(a.modulus() - nested.iter().map(annulus_modulus).sum::<f64>())
}

/// Arithmetic–geometric mean.
pub fn agm(mut a: f64, mut b: f64) -> f64 {
    for _ in 0..64 {
        if (a - b).abs() <= 1e-16 * a.abs() {
            break;
        }
        (a, b) = (0.5 * (a + b), (a * b).sqrt());
    }
    0.5 * (a + b)
}

/// Complete elliptic integral of the first kind `K(k)`.
pub fn elliptic_k(k: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&k) {
        return Err(Error::InvalidArgument(format!("modulus {k} outside [0, 1)")));
    }
    Ok(PI / (2.0 * agm(1.0, ((1.0 - k) * (1.0 + k)).sqrt())))
}

/// Modulus of the Grötzsch ring, `μ(x) = (π/2) K(√(1−x²)) / K(x)`.
pub fn grotzsch_mu(x: f64) -> Result<f64> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::InvalidArgument(format!("grotzsch_mu needs 0 < x < 1, got {x}")));
    }
    let xp = ((1.0 - x) * (1.0 + x)).sqrt();
    Ok(FRAC_PI_2 * agm(1.0, xp) / agm(1.0, x))
}

/// `2 μ(√(|z₁| / (|z₁| + |z₂|)))`.
pub fn teichmuller_bound(z1: Complex, z2: Complex) -> Result<f64> {
    let (a, b) = (z1.norm(), z2.norm());
    if a == 0.0 || b == 0.0 {
        return Err(Error::InvalidArgument("teichmuller_bound needs nonzero points".into()));
    }
    Ok(2.0 * grotzsch_mu((a / (a + b)).sqrt())?)
}

/// The concentric annulus `A(0; |z₁|, |z₂|)`, which separates `{0, z₁}`
/// from `{z₂, ∞}` up to its boundary.
pub fn teichmuller_witness(z1: Complex, z2: Complex) -> Result<CircularAnnulus> {
    CircularAnnulus::new(Complex::new(0.0, 0.0), z1.norm(), z2.norm())
}

/// Ratios `max|f(z) − f(z₀)| / min|f(z) − f(z₀)|` over circles `|z − z₀| = ρ`.
#[derive(Debug, Clone, PartialEq)]
pub struct DilatationReport {
    pub radii: Vec<f64>,
    pub ratios: Vec<f64>,
    pub grid_max: f64,
    pub finest_radius: f64,
    pub finest_ratio: f64,
    /// Richardson extrapolation of the two finest ratios to `ρ → 0`.
    pub limit_estimate: f64,
}

/// Circular dilatation of `map` at `z0` on the radii `ρ₀·2^{−i}`, `i < levels`.
pub fn circular_dilatation<F>(map: F, z0: Complex, rho0: f64, levels: usize, samples: usize) -> Result<DilatationReport>
where
    F: Fn(Complex) -> Result<Complex> + Sync,
{
    if levels == 0 || samples < 4 || !(rho0 > 0.0) {
        return Err(Error::InvalidArgument("need levels ≥ 1, samples ≥ 4 and ρ₀ > 0".into()));
    }
    let w0 = map(z0)?;
    let radii: Vec<f64> = (0..levels).map(|i| rho0 * 0.5f64.powi(i as i32)).collect();
    let ratios = par::map(&radii, |&rho| -> Result<f64> {
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for k in 0..samples {
            let z = z0 + Complex::from_polar(rho, TAU * k as f64 / samples as f64);
            let d = (map(z)? - w0).norm();
            lo = lo.min(d);
            hi = hi.max(d);
        }
        if lo == 0.0 {
            return Err(Error::EvaluationFailed(z0));
        }
        Ok(hi / lo)
    })
    .into_iter()
    .collect::<Result<Vec<f64>>>()?;
    let grid_max = ratios.iter().copied().fold(0.0, f64::max);
    let finest_ratio = *ratios.last().expect("levels ≥ 1");
    let limit_estimate = if levels >= 2 { 2.0 * finest_ratio - ratios[levels - 2] } else { finest_ratio };
    Ok(DilatationReport {
        finest_radius: *radii.last().expect("levels ≥ 1"),
        radii,
        ratios,
        grid_max,
        finest_ratio,
        limit_estimate,
    })
}

/// Lower bound `M₂·Mod(A)` for `Mod(f(A))` when every annulus of modulus
/// `C₁` has an image of modulus at least `C₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainBound {
    pub value: f64,
    /// `M₂ = ½ · 2πC₂ / log L` with `L = e^{2πC₁}`.
    pub m2: f64,
    pub layers: u64,
}

pub fn modulus_chain_bound(c1: f64, c2: f64, mod_a: f64) -> Result<ChainBound> {
    if !(c1 > 0.0 && c2 > 0.0) {
        return Err(Error::InvalidArgument("C1 and C2 must be positive".into()));
    }
    if mod_a <= c1 {
        return Err(Error::NoInformation { mod_a, threshold: c1 });
    }
    let log_l = TAU * c1;
    let m2 = 0.5 * TAU * c2 / log_l;
    let layers = (mod_a / c1).ceil() as u64 - 1;
    Ok(ChainBound { value: m2 * mod_a, m2, layers })
}

/// Extremes of a sampled distortion ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistortionReport {
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub samples: usize,
}

impl DistortionReport {
    fn new() -> Self {
        Self { min_ratio: f64::INFINITY, max_ratio: 0.0, samples: 0 }
    }

    fn push(&mut self, r: f64) {
        self.min_ratio = self.min_ratio.min(r);
        self.max_ratio = self.max_ratio.max(r);
        self.samples += 1;
    }

    /// Smallest `C` with all ratios in `[1/C, C]`.
    pub fn constant(&self) -> f64 {
        self.max_ratio.max(1.0 / self.min_ratio)
    }
}

/// `|f′(x)|·|y − z| / |f(y) − f(z)|` for seeded triples in `B(z₀, c·r)`.
pub fn koebe_distortion_check<F, G>(
    map: F,
    derivative: G,
    z0: Complex,
    r: f64,
    c: f64,
    samples: usize,
    seed: u64,
) -> Result<DistortionReport>
where
    F: Fn(Complex) -> Result<Complex>,
    G: Fn(Complex) -> Result<Complex>,
{
    if !(c > 0.0 && c < 1.0 && r > 0.0) {
        return Err(Error::InvalidArgument("need 0 < c < 1 and r > 0".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rho = c * r;
    let mut draw = || {
        let (t, s): (f64, f64) = (rng.gen_range(0.0..TAU), rng.gen_range(0.0f64..1.0));
        z0 + Complex::from_polar(rho * s.sqrt(), t)
    };
    let mut report = DistortionReport::new();
    for _ in 0..samples {
        let (x, y, z) = (draw(), draw(), draw());
        let den = (map(y)? - map(z)?).norm();
        if y == z || den == 0.0 {
            return Err(Error::InvalidArgument(format!("sampled points coincide at {y}")));
        }
        report.push(derivative(x)?.norm() * (y - z).norm() / den);
    }
    Ok(report)
}

/// `diam f(Q) / dist(f(Q), ∂D*)` over the cubes of a decomposition, with
/// `D*` given by `target`.
pub fn whitney_image_distortion(dec: &WhitneyDecomposition, map: &Mobius, target: &CircleDomainConfig) -> Result<DistortionReport> {
    const PER_SIDE: usize = 8;
    let ratios = par::map(dec.cubes(), |cube| -> Result<f64> {
        let corners = cube.square.corners();
        let mut pts = Vec::with_capacity(4 * PER_SIDE);
        for k in 0..4 {
            let (a, b) = (corners[k], corners[(k + 1) % 4]);
            for i in 0..PER_SIDE {
                pts.push(map.apply(a + (b - a) * (i as f64 / PER_SIDE as f64))?);
            }
        }
        let mut diam: f64 = 0.0;
        let mut dist = f64::INFINITY;
        for (i, p) in pts.iter().enumerate() {
            dist = dist.min(target.boundary_distance(*p)?);
            for q in &pts[i + 1..] {
                diam = diam.max((p - q).norm());
            }
        }
        Ok(diam / dist)
    });
    let mut report = DistortionReport::new();
    for r in ratios {
        report.push(r?);
    }
    Ok(report)
}

/// A set whose fatness is measured.
#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Disk(Disk),
    Point(Complex),
    Union(Vec<Disk>),
}

impl Shape {
    pub fn diameter(&self) -> f64 {
        match self {
            Shape::Disk(d) => d.diameter(),
            Shape::Point(_) => 0.0,
            Shape::Union(ds) => union_diameter(ds),
        }
    }
}

fn union_diameter(ds: &[Disk]) -> f64 {
    let mut d: f64 = 0.0;
    for (i, a) in ds.iter().enumerate() {
        d = d.max(a.diameter());
        for b in &ds[i + 1..] {
            d = d.max((a.center - b.center).norm() + a.radius + b.radius);
        }
    }
    d
}

/// Area of the intersection of two closed disks.
pub fn lens_area(c1: Complex, r1: f64, c2: Complex, r2: f64) -> f64 {
    let d = (c1 - c2).norm();
    if d >= r1 + r2 {
        return 0.0;
    }
    let small = r1.min(r2);
    if d <= (r1 - r2).abs() {
        return PI * small * small;
    }
    let a1 = ((d * d + r1 * r1 - r2 * r2) / (2.0 * d * r1)).clamp(-1.0, 1.0).acos();
    let a2 = ((d * d + r2 * r2 - r1 * r1) / (2.0 * d * r2)).clamp(-1.0, 1.0).acos();
    let k = (-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2);
    r1 * r1 * a1 + r2 * r2 * a2 - 0.5 * k.max(0.0).sqrt()
}

/// Measured fatness data of a shape.
#[derive(Debug, Clone, PartialEq)]
pub struct FatnessReport {
    /// `inf Area(B ∩ B(z, r)) / r²` over the sampled `z ∈ B`, `r ≤ diam B`;
    /// `+∞` for a point.
    pub constant: f64,
    pub witness: Option<(Complex, f64)>,
    /// `inf Area(B ∩ A) / (R − r)²` over sampled annuli `A` whose circles
    /// both meet `B`.
    pub annulus_ratio: f64,
    /// `d_r(B)` for sampled centers `z` with `B ⊂ B(z, r)`.
    pub radial_diameters: Vec<f64>,
    /// `min d_r(B) / diam(B)` over those centers.
    pub radial_ratio: f64,
    pub diameter: f64,
}

const MONTE_CARLO_POINTS: usize = 100_000;
const RADIUS_STEPS: usize = 16;

/// Intervals `[|z − c| − ρ, |z − c| + ρ] ∩ [0, ∞)` of radii hit by each disk.
fn radial_intervals(ds: &[Disk], z: Complex) -> Vec<(f64, f64)> {
    let mut iv: Vec<(f64, f64)> = ds
        .iter()
        .map(|d| {
            let dc = (d.center - z).norm();
            ((dc - d.radius).max(0.0), dc + d.radius)
        })
        .collect();
    iv.sort_by(|a, b| a.0.total_cmp(&b.0));
    iv
}

fn interval_union_measure(iv: &[(f64, f64)], lo: f64, hi: f64) -> f64 {
    let mut total = 0.0;
    let mut cur: Option<(f64, f64)> = None;
    for &(a, b) in iv {
        let (a, b) = (a.max(lo), b.min(hi));
        if a >= b {
            continue;
        }
        cur = match cur {
            Some((s, e)) if a <= e => Some((s, e.max(b))),
            Some((s, e)) => {
                total += e - s;
                Some((a, b))
            }
            None => Some((a, b)),
        };
    }
    if let Some((s, e)) = cur {
        total += e - s;
    }
    total
}

fn hits_circle(iv: &[(f64, f64)], s: f64) -> bool {
    iv.iter().any(|&(a, b)| a <= s && s <= b)
}

/// Measures fatness of a disk (exact lens areas), a point, or a union of
/// disks (seeded Monte Carlo with 10⁵ points).
pub fn fatness_check(shape: &Shape, seed: u64) -> Result<FatnessReport> {
    let disks: Vec<Disk> = match shape {
        Shape::Point(_) => {
            return Ok(FatnessReport {
                constant: f64::INFINITY,
                witness: None,
                annulus_ratio: f64::INFINITY,
                radial_diameters: Vec::new(),
                radial_ratio: f64::INFINITY,
                diameter: 0.0,
            })
        }
        Shape::Disk(d) => vec![*d],
        Shape::Union(ds) => ds.clone(),
    };
    if disks.is_empty() || disks.iter().any(|d| !(d.radius > 0.0)) {
        return Err(Error::DegenerateShape("shape has zero area".into()));
    }
    let diam = union_diameter(&disks);

    let area_in: Box<dyn Fn(Complex, f64) -> f64 + Sync> = match shape {
        Shape::Disk(d) => {
            let d = *d;
            Box::new(move |z, r| lens_area(d.center, d.radius, z, r))
        }
        _ => {
            let (lo, hi) = bounding_box(&disks);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let pts: Vec<Complex> = (0..MONTE_CARLO_POINTS)
                .map(|_| Complex::new(rng.gen_range(lo.re..hi.re), rng.gen_range(lo.im..hi.im)))
                .filter(|p| disks.iter().any(|d| d.contains_closed(*p)))
                .collect();
            let cell = (hi.re - lo.re) * (hi.im - lo.im) / MONTE_CARLO_POINTS as f64;
            Box::new(move |z, r| pts.iter().filter(|p| (*p - z).norm() <= r).count() as f64 * cell)
        }
    };

    let centers = sample_centers(shape, &disks);
    let radii: Vec<f64> = (1..=RADIUS_STEPS).map(|k| diam * k as f64 / RADIUS_STEPS as f64).collect();
    let per_center = par::map(&centers, |&z| {
        let mut best = (f64::INFINITY, z, 0.0);
        for &r in &radii {
            let v = area_in(z, r) / (r * r);
            if v < best.0 {
                best = (v, z, r);
            }
        }
        best
    });
    let (constant, wz, wr) = per_center
        .into_iter()
        .fold((f64::INFINITY, Complex::new(0.0, 0.0), 0.0), |a, b| if b.0 < a.0 { b } else { a });

    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let (lo, hi) = bounding_box(&disks);
    let mut annulus_ratio = f64::INFINITY;
    let mut radial_diameters = Vec::new();
    let mut radial_ratio = f64::INFINITY;
    for _ in 0..64 {
        let z = Complex::new(
            rng.gen_range(lo.re - diam..hi.re + diam),
            rng.gen_range(lo.im - diam..hi.im + diam),
        );
        let iv = radial_intervals(&disks, z);
        let reach = iv.iter().map(|v| v.1).fold(0.0, f64::max);
        let dr = interval_union_measure(&iv, 0.0, reach);
        radial_diameters.push(dr);
        radial_ratio = radial_ratio.min(dr / diam);
        let (a, b): (f64, f64) = (rng.gen_range(0.0..reach), rng.gen_range(0.0..reach));
        let (r_in, r_out) = (a.min(b), a.max(b));
        if r_out - r_in > 1e-3 * diam && hits_circle(&iv, r_in) && hits_circle(&iv, r_out) {
            let area = area_in(z, r_out) - area_in(z, r_in);
            annulus_ratio = annulus_ratio.min(area / (r_out - r_in).powi(2));
        }
    }
    Ok(FatnessReport {
        constant,
        witness: Some((wz, wr)),
        annulus_ratio,
        radial_diameters,
        radial_ratio,
        diameter: diam,
    })
}

fn bounding_box(ds: &[Disk]) -> (Complex, Complex) {
    let mut lo = Complex::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Complex::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for d in ds {
        lo.re = lo.re.min(d.center.re - d.radius);
        lo.im = lo.im.min(d.center.im - d.radius);
        hi.re = hi.re.max(d.center.re + d.radius);
        hi.im = hi.im.max(d.center.im + d.radius);
    }
    (lo, hi)
}

fn sample_centers(shape: &Shape, ds: &[Disk]) -> Vec<Complex> {
    match shape {
        Shape::Disk(d) => (0..=10).map(|k| d.center + d.radius * k as f64 / 10.0).collect(),
        _ => {
            let per = (64 / ds.len()).clamp(1, 8);
            let mut out = Vec::new();
            for d in ds {
                out.push(d.center);
                for k in 0..per {
                    out.push(d.boundary_point(TAU * k as f64 / per as f64));
                }
            }
            out
        }
    }
}

/// `K ≥ 1` or `‖μ‖∞ < 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Dilatation {
    K(f64),
    Mu(f64),
}

/// `‖μ‖∞ = (K − 1)/(K + 1)` in either direction.
pub fn dilatation_bounds(value: Dilatation) -> Result<Dilatation> {
    match value {
        Dilatation::K(k) if k >= 1.0 && k.is_finite() => Ok(Dilatation::Mu((k - 1.0) / (k + 1.0))),
        Dilatation::Mu(m) if (0.0..1.0).contains(&m) => Ok(Dilatation::K((1.0 + m) / (1.0 - m))),
        other => Err(Error::InvalidArgument(format!("{other:?} is out of range"))),
    }
}
