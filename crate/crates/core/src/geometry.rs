//! Exact primitives: disks, circle-domain configurations, Möbius and
//! anti-Möbius maps, circle reflections and boundary distance.

use std::fmt;

use crate::error::{Error, Result};

pub type Complex = num_complex::Complex64;

/// Minimum closure gap between two complementary disks, relative to the
/// outer radius.
pub const DISJOINTNESS_TOLERANCE: f64 = 1e-9;

/// Closed or open disk `{ |z - center| < radius }`; which one is meant is up
/// to the caller, the data is the same.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Disk {
    pub center: Complex,
    pub radius: f64,
}

impl Disk {
    pub fn new(center: Complex, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) || !center.re.is_finite() || !center.im.is_finite() {
            return Err(Error::InvalidDisk(radius));
        }
        Ok(Self { center, radius })
    }

    pub fn unit() -> Self {
        Self { center: Complex::new(0.0, 0.0), radius: 1.0 }
    }

    pub fn area(&self) -> f64 {
        std::f64::consts::PI * self.radius * self.radius
    }

    pub fn diameter(&self) -> f64 {
        2.0 * self.radius
    }

    /// Strict containment in the open disk.
    pub fn contains(&self, z: Complex) -> bool {
        (z - self.center).norm() < self.radius
    }

    pub fn contains_closed(&self, z: Complex) -> bool {
        (z - self.center).norm() <= self.radius
    }

    /// Point on the circle at angle `theta`.
    pub fn boundary_point(&self, theta: f64) -> Complex {
        self.center + Complex::from_polar(self.radius, theta)
    }

    /// Reflection across the boundary circle, `a + r² / (z̄ - ā)`.
    pub fn reflect(&self, z: Complex) -> Result<Complex> {
        let w = (z - self.center).conj();
        if w.norm() == 0.0 {
            return Err(Error::Pole(z));
        }
        Ok(self.center + self.radius * self.radius / w)
    }

    /// The reflection as an anti-Möbius map.
    pub fn reflection(&self) -> Mobius {
        let a = self.center;
        let r2 = Complex::new(self.radius * self.radius, 0.0);
        Mobius {
            a,
            b: r2 - a * a.conj(),
            c: Complex::new(1.0, 0.0),
            d: -a.conj(),
            conjugate_first: true,
        }
    }

    /// Absolute value of the Jacobian of the reflection, `r⁴ / |z - a|⁴`.
    pub fn reflection_jacobian(&self, z: Complex) -> Result<f64> {
        let d = (z - self.center).norm();
        if d == 0.0 {
            return Err(Error::Pole(z));
        }
        Ok((self.radius / d).powi(4))
    }

    /// Image of `other` under the reflection across this circle, in closed
    /// form. Fails if the closed `other` contains this disk's center.
    pub fn reflect_disk(&self, other: &Disk) -> Result<Disk> {
        let v = other.center - self.center;
        let d2 = v.norm_sqr();
        let rho = other.radius;
        let denom = d2 - rho * rho;
        if denom <= 0.0 {
            return Err(Error::Pole(self.center));
        }
        let r2 = self.radius * self.radius;
        Ok(Disk { center: self.center + v * (r2 / denom), radius: r2 * rho / denom })
    }

    pub fn scaled(&self, s: f64) -> Disk {
        Disk { center: self.center * s, radius: self.radius * s }
    }

    /// Distance between closures; negative when they overlap.
    pub fn gap(&self, other: &Disk) -> f64 {
        (self.center - other.center).norm() - self.radius - other.radius
    }
}

/// Reflection of `z` across the boundary circle of `disk`.
pub fn reflect_point(disk: &Disk, z: Complex) -> Result<Complex> {
    disk.reflect(z)
}

/// `|Jacobian|` of the reflection across `disk` at `z`.
pub fn reflection_jacobian(disk: &Disk, z: Complex) -> Result<f64> {
    disk.reflection_jacobian(z)
}

/// One reason a [`CircleDomainConfig`] is invalid.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NonPositiveOuterRadius(f64),
    InvalidRadius { index: usize, radius: f64 },
    OverlappingClosures { first: usize, second: usize, gap: f64 },
    DiskOutsideBall { index: usize },
    BasepointInsideDisk { index: usize },
    BasepointOutsideBall,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonPositiveOuterRadius(r) => write!(f, "outer radius {r} is not positive"),
            Violation::InvalidRadius { index, radius } => {
                write!(f, "disk {index} has invalid radius {radius}")
            }
            Violation::OverlappingClosures { first, second, gap } => {
                write!(f, "overlapping closures: disks {first} and {second} (gap {gap:e})")
            }
            Violation::DiskOutsideBall { index } => {
                write!(f, "disk {index} is not contained in the open outer ball")
            }
            Violation::BasepointInsideDisk { index } => {
                write!(f, "basepoint inside complementary disk {index}")
            }
            Violation::BasepointOutsideBall => write!(f, "basepoint outside the outer ball"),
        }
    }
}

/// `D = B(0, R) ∩ Ω` where `Ω` is the complement of finitely many closed
/// disks, together with a basepoint `x0 ∈ D`.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleDomainConfig {
    pub outer_radius: f64,
    pub disks: Vec<Disk>,
    pub basepoint: Complex,
}

impl CircleDomainConfig {
    /// Builds a configuration, rejecting it if any invariant fails.
    pub fn new(outer_radius: f64, disks: Vec<Disk>, basepoint: Complex) -> Result<Self> {
        let config = Self { outer_radius, disks, basepoint };
        let report = config.validate();
        if report.is_empty() {
            Ok(config)
        } else {
            Err(Error::InvalidConfig(report))
        }
    }

    /// Unit ball with no holes and basepoint 0.
    pub fn unit_ball() -> Self {
        Self { outer_radius: 1.0, disks: Vec::new(), basepoint: Complex::new(0.0, 0.0) }
    }

    pub fn validate(&self) -> Vec<Violation> {
        validate_config(self)
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let report = self.validate();
        if report.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(report))
        }
    }

    /// Signed distance to `∂D`: positive inside `D`.
    pub fn signed_delta(&self, z: Complex) -> f64 {
        let mut d = self.outer_radius - z.norm();
        for disk in &self.disks {
            let dj = (z - disk.center).norm() - disk.radius;
            if dj < d {
                d = dj;
            }
        }
        d
    }

    pub fn contains(&self, z: Complex) -> bool {
        self.signed_delta(z) > 0.0
    }

    /// `δ_D(z) = dist(z, ∂D)` for `z ∈ D`.
    pub fn boundary_distance(&self, z: Complex) -> Result<f64> {
        boundary_distance(self, z)
    }

    /// Exact area of `D`.
    pub fn area(&self) -> f64 {
        std::f64::consts::PI * self.outer_radius * self.outer_radius
            - self.disks.iter().map(Disk::area).sum::<f64>()
    }

    /// `true` when the closed segment `[a, b]` lies in `D`.
    pub fn segment_inside(&self, a: Complex, b: Complex) -> bool {
        if a.norm() >= self.outer_radius || b.norm() >= self.outer_radius {
            return false;
        }
        self.disks
            .iter()
            .all(|disk| point_segment_distance(disk.center, a, b) > disk.radius)
    }

    /// The configuration scaled about the origin by `s > 0`.
    pub fn scaled(&self, s: f64) -> Self {
        Self {
            outer_radius: self.outer_radius * s,
            disks: self.disks.iter().map(|d| d.scaled(s)).collect(),
            basepoint: self.basepoint * s,
        }
    }

    /// The configuration rotated about the origin by multiplication with
    /// the unit complex number `rotation`.
    pub fn rotated(&self, rotation: Complex) -> Self {
        Self {
            outer_radius: self.outer_radius,
            disks: self
                .disks
                .iter()
                .map(|d| Disk { center: d.center * rotation, radius: d.radius })
                .collect(),
            basepoint: self.basepoint * rotation,
        }
    }

    /// Index of the closed complementary disk containing `z`, if any.
    pub fn disk_containing(&self, z: Complex) -> Option<usize> {
        self.disks.iter().position(|d| d.contains_closed(z))
    }
}

/// Checks every [`CircleDomainConfig`] invariant; an empty report means valid.
pub fn validate_config(config: &CircleDomainConfig) -> Vec<Violation> {
    let mut out = Vec::new();
    let big_r = config.outer_radius;
    if !(big_r > 0.0 && big_r.is_finite()) {
        out.push(Violation::NonPositiveOuterRadius(big_r));
        return out;
    }
    for (index, disk) in config.disks.iter().enumerate() {
        if !(disk.radius > 0.0 && disk.radius.is_finite()) {
            out.push(Violation::InvalidRadius { index, radius: disk.radius });
            continue;
        }
        if disk.center.norm() + disk.radius >= big_r {
            out.push(Violation::DiskOutsideBall { index });
        }
    }
    let tol = DISJOINTNESS_TOLERANCE * big_r;
    for i in 0..config.disks.len() {
        for j in i + 1..config.disks.len() {
            let gap = config.disks[i].gap(&config.disks[j]);
            if gap < tol {
                out.push(Violation::OverlappingClosures { first: i, second: j, gap });
            }
        }
    }
    let x0 = config.basepoint;
    if x0.norm() >= big_r {
        out.push(Violation::BasepointOutsideBall);
    }
    for (index, disk) in config.disks.iter().enumerate() {
        if disk.contains_closed(x0) {
            out.push(Violation::BasepointInsideDisk { index });
        }
    }
    out
}

/// `δ_D(z)`; errors when `z ∉ D`.
pub fn boundary_distance(config: &CircleDomainConfig, z: Complex) -> Result<f64> {
    let d = config.signed_delta(z);
    if d > 0.0 {
        Ok(d)
    } else {
        Err(Error::OutsideDomain(z))
    }
}

/// Euclidean distance from `p` to the closed segment `[a, b]`.
pub fn point_segment_distance(p: Complex, a: Complex, b: Complex) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a) * ab.conj()).re / len2;
    let t = t.clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

/// A point of the Riemann sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpherePoint {
    Finite(Complex),
    Infinity,
}

/// `z ↦ (a w + b) / (c w + d)` with `w = z̄` when `conjugate_first`, else
/// `w = z`. Orientation-reversing exactly when `conjugate_first` is set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mobius {
    pub a: Complex,
    pub b: Complex,
    pub c: Complex,
    pub d: Complex,
    pub conjugate_first: bool,
}

impl Mobius {
    pub fn new(a: Complex, b: Complex, c: Complex, d: Complex) -> Result<Self> {
        Self::with_parity(a, b, c, d, false)
    }

    /// `z ↦ (a z̄ + b) / (c z̄ + d)`.
    pub fn anti(a: Complex, b: Complex, c: Complex, d: Complex) -> Result<Self> {
        Self::with_parity(a, b, c, d, true)
    }

    fn with_parity(a: Complex, b: Complex, c: Complex, d: Complex, conjugate_first: bool) -> Result<Self> {
        let m = Self { a, b, c, d, conjugate_first };
        let scale = (a.norm() * d.norm()).max(b.norm() * c.norm());
        let det = m.determinant();
        if det.norm() == 0.0 || det.norm() <= 1e-14 * scale {
            return Err(Error::DegenerateMap);
        }
        Ok(m)
    }

    pub fn identity() -> Self {
        let one = Complex::new(1.0, 0.0);
        let zero = Complex::new(0.0, 0.0);
        Self { a: one, b: zero, c: zero, d: one, conjugate_first: false }
    }

    /// `z ↦ a z + b`.
    pub fn affine(a: Complex, b: Complex) -> Result<Self> {
        Self::new(a, b, Complex::new(0.0, 0.0), Complex::new(1.0, 0.0))
    }

    /// Complex conjugation `z ↦ z̄`.
    pub fn conjugation() -> Self {
        Self { conjugate_first: true, ..Self::identity() }
    }

    pub fn determinant(&self) -> Complex {
        self.a * self.d - self.b * self.c
    }

    pub fn is_orientation_reversing(&self) -> bool {
        self.conjugate_first
    }

    /// Scales the matrix so that `|det| = 1`; the map is unchanged.
    pub fn normalized(&self) -> Self {
        let k = 1.0 / self.determinant().norm().sqrt();
        Self { a: self.a * k, b: self.b * k, c: self.c * k, d: self.d * k, ..*self }
    }

    fn pre(&self, z: Complex) -> Complex {
        if self.conjugate_first {
            z.conj()
        } else {
            z
        }
    }

    fn denominator(&self, w: Complex) -> Complex {
        self.c * w + self.d
    }

    fn is_pole_denominator(&self, w: Complex, den: Complex) -> bool {
        den.norm() <= 1e-15 * ((self.c * w).norm() + self.d.norm())
    }

    pub fn apply(&self, z: Complex) -> Result<Complex> {
        let w = self.pre(z);
        let den = self.denominator(w);
        if self.is_pole_denominator(w, den) {
            return Err(Error::Pole(z));
        }
        Ok((self.a * w + self.b) / den)
    }

    /// Action on the Riemann sphere.
    pub fn apply_sphere(&self, p: SpherePoint) -> SpherePoint {
        match p {
            SpherePoint::Infinity => {
                if self.c.norm() == 0.0 {
                    SpherePoint::Infinity
                } else {
                    SpherePoint::Finite(self.a / self.c)
                }
            }
            SpherePoint::Finite(z) => match self.apply(z) {
                Ok(w) => SpherePoint::Finite(w),
                Err(_) => SpherePoint::Infinity,
            },
        }
    }

    /// The point sent to infinity, or `None` for affine maps.
    pub fn pole(&self) -> Option<Complex> {
        if self.c.norm() == 0.0 {
            return None;
        }
        let w = -self.d / self.c;
        Some(if self.conjugate_first { w.conj() } else { w })
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Mobius) -> Mobius {
        let (a2, b2, c2, d2) = if self.conjugate_first {
            (inner.a.conj(), inner.b.conj(), inner.c.conj(), inner.d.conj())
        } else {
            (inner.a, inner.b, inner.c, inner.d)
        };
        Mobius {
            a: self.a * a2 + self.b * c2,
            b: self.a * b2 + self.b * d2,
            c: self.c * a2 + self.d * c2,
            d: self.c * b2 + self.d * d2,
            conjugate_first: self.conjugate_first ^ inner.conjugate_first,
        }
        .normalized()
    }

    pub fn inverse(&self) -> Mobius {
        let (a, b, c, d) = (self.d, -self.b, -self.c, self.a);
        if self.conjugate_first {
            Mobius { a: a.conj(), b: b.conj(), c: c.conj(), d: d.conj(), conjugate_first: true }
        } else {
            Mobius { a, b, c, d, conjugate_first: false }
        }
    }

    /// Wirtinger derivatives `(∂z f, ∂z̄ f)` at `z`.
    pub fn wirtinger(&self, z: Complex) -> Result<(Complex, Complex)> {
        let w = self.pre(z);
        let den = self.denominator(w);
        if self.is_pole_denominator(w, den) {
            return Err(Error::Pole(z));
        }
        let g = self.determinant() / (den * den);
        let zero = Complex::new(0.0, 0.0);
        Ok(if self.conjugate_first { (zero, g) } else { (g, zero) })
    }

    /// Complex derivative of an orientation-preserving map; for an
    /// anti-Möbius map the `∂z̄` derivative is returned instead.
    pub fn derivative(&self, z: Complex) -> Result<Complex> {
        let (dz, dzb) = self.wirtinger(z)?;
        Ok(if self.conjugate_first { dzb } else { dz })
    }

    /// `|Jacobian|` at `z`, `|det|² / |c w + d|⁴`.
    pub fn jacobian(&self, z: Complex) -> Result<f64> {
        Ok(self.derivative(z)?.norm_sqr())
    }
}

/// Image of an open disk under a Möbius or anti-Möbius map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ImageRegion {
    /// The open disk itself.
    Disk(Disk),
    /// Complement of the closed disk (the pole was inside).
    Exterior(Disk),
    /// `{ z : Re((z - point) · n̄) > 0 }` (the pole was on the circle).
    HalfPlane { point: Complex, normal: Complex },
}

impl ImageRegion {
    /// Boundary circle, when it is a circle.
    pub fn circle(&self) -> Option<Disk> {
        match *self {
            ImageRegion::Disk(d) | ImageRegion::Exterior(d) => Some(d),
            ImageRegion::HalfPlane { .. } => None,
        }
    }

    pub fn contains(&self, z: Complex) -> bool {
        match *self {
            ImageRegion::Disk(d) => d.contains(z),
            ImageRegion::Exterior(d) => !d.contains_closed(z),
            ImageRegion::HalfPlane { point, normal } => ((z - point) * normal.conj()).re > 0.0,
        }
    }

    pub fn diameter(&self) -> f64 {
        match *self {
            ImageRegion::Disk(d) => d.diameter(),
            _ => f64::INFINITY,
        }
    }

    /// Complement up to the boundary circle or line.
    pub fn complement(&self) -> ImageRegion {
        match *self {
            ImageRegion::Disk(d) => ImageRegion::Exterior(d),
            ImageRegion::Exterior(d) => ImageRegion::Disk(d),
            ImageRegion::HalfPlane { point, normal } => ImageRegion::HalfPlane { point, normal: -normal },
        }
    }

    /// Radial diameter about `w0` up to radius `r`: the length of
    /// `{ s ∈ [0, r] : the circle |w − w0| = s meets the region }`.
    pub fn radial_diameter(&self, w0: Complex, r: f64) -> f64 {
        let (lo, hi) = match *self {
            ImageRegion::Disk(d) => {
                let dc = (d.center - w0).norm();
                ((dc - d.radius).max(0.0), dc + d.radius)
            }
            ImageRegion::Exterior(d) => {
                let dc = (d.center - w0).norm();
                ((d.radius - dc).max(0.0), f64::INFINITY)
            }
            ImageRegion::HalfPlane { point, normal } => {
                let signed = ((w0 - point) * normal.conj()).re / normal.norm();
                ((-signed).max(0.0), f64::INFINITY)
            }
        };
        (hi.min(r) - lo).max(0.0)
    }
}

/// Image of `disk` under `map`.
///
/// Circles go to circles; the pole decides the side. A pole on the circle
/// gives a half-plane.
pub fn image_disk(map: &Mobius, disk: &Disk) -> ImageRegion {
    let src = if map.conjugate_first {
        Disk { center: disk.center.conj(), radius: disk.radius }
    } else {
        *disk
    };
    let holo = Mobius { conjugate_first: false, ..*map };
    let eval = |z: Complex| (holo.a * z + holo.b) / (holo.c * z + holo.d);
    let scale = holo.a.norm().max(holo.b.norm()).max(holo.d.norm());
    if holo.c.norm() <= 1e-300 || holo.c.norm() <= 1e-16 * scale {
        let center = eval(src.center);
        let radius = src.radius * (holo.a / holo.d).norm();
        return ImageRegion::Disk(Disk { center, radius });
    }
    let q = -holo.d / holo.c;
    let dq = (q - src.center).norm();
    let s = dq - src.radius;
    if s.abs() <= 1e-12 * src.radius.max(dq) {
        // pole on the circle: image is a line
        let u = (q - src.center) / dq;
        let perp = u * Complex::new(0.0, 1.0);
        let p1 = eval(src.center + perp * src.radius);
        let p2 = eval(src.center - perp * src.radius);
        let dir = p2 - p1;
        let mut normal = dir * Complex::new(0.0, 1.0);
        let inside = eval(src.center);
        if ((inside - p1) * normal.conj()).re < 0.0 {
            normal = -normal;
        }
        return ImageRegion::HalfPlane { point: p1, normal: normal / normal.norm() };
    }
    let center = if dq == 0.0 {
        holo.a / holo.c
    } else {
        let qs = src.center + src.radius * src.radius / (q - src.center).conj();
        eval(qs)
    };
    let v = if dq == 0.0 { Complex::new(1.0, 0.0) } else { (src.center - q) / dq };
    let radius = (eval(src.center + v * src.radius) - center).norm();
    let image = Disk { center, radius };
    if s > 0.0 {
        ImageRegion::Disk(image)
    } else {
        ImageRegion::Exterior(image)
    }
}
