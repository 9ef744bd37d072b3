//! Beltrami coefficients: finite-difference estimates, pullbacks under
//! Möbius and anti-Möbius maps, and invariance under the reflection group.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{image_disk, CircleDomainConfig, Complex, ImageRegion, Mobius};
use crate::schottky::{enumerate_words, locate_copy, word_to_map, ReducedWord};

/// A pointwise-evaluable coefficient `μ` with `‖μ‖∞ ≤ bound < 1`.
pub trait CoefficientField: Send + Sync {
    fn eval(&self, z: Complex) -> Result<Complex>;
    fn norm_bound(&self) -> f64;
}

/// `μ ≡ 0`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroField;

impl CoefficientField for ZeroField {
    fn eval(&self, _: Complex) -> Result<Complex> {
        Ok(Complex::new(0.0, 0.0))
    }

    fn norm_bound(&self) -> f64 {
        0.0
    }
}

/// `μ ≡ value`.
#[derive(Debug, Clone, Copy)]
pub struct ConstantField(Complex);

impl ConstantField {
    pub fn new(value: Complex) -> Result<Self> {
        if value.norm() >= 1.0 {
            return Err(Error::InvalidArgument(format!("|μ| = {} is not below 1", value.norm())));
        }
        Ok(Self(value))
    }
}

impl CoefficientField for ConstantField {
    fn eval(&self, _: Complex) -> Result<Complex> {
        Ok(self.0)
    }

    fn norm_bound(&self) -> f64 {
        self.0.norm()
    }
}

/// A field given by a closure and a declared bound.
pub struct FnField<F> {
    f: F,
    bound: f64,
}

impl<F> FnField<F>
where
    F: Fn(Complex) -> Complex + Send + Sync,
{
    pub fn new(f: F, bound: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&bound) {
            return Err(Error::InvalidArgument(format!("declared bound {bound} is not in [0, 1)")));
        }
        Ok(Self { f, bound })
    }
}

impl<F> CoefficientField for FnField<F>
where
    F: Fn(Complex) -> Complex + Send + Sync,
{
    fn eval(&self, z: Complex) -> Result<Complex> {
        let v = (self.f)(z);
        if v.norm() > self.bound + 1e-12 {
            return Err(Error::EvaluationFailed(z));
        }
        Ok(v)
    }

    fn norm_bound(&self) -> f64 {
        self.bound
    }
}

/// `f*μ` from the Wirtinger derivatives of `f` at `z` and `m = μ(f(z))`.
pub fn pullback_value(dz: Complex, dzbar: Complex, m: Complex, reversing: bool) -> Complex {
    if reversing {
        (dz.conj() + m.conj() * dzbar) / (dzbar.conj() + m.conj() * dz)
    } else {
        (dzbar + m * dz.conj()) / (dz + m * dzbar.conj())
    }
}

/// `f*μ` for a Möbius or anti-Möbius `f`.
#[derive(Clone)]
pub struct Pullback {
    map: Mobius,
    inner: Arc<dyn CoefficientField>,
}

impl Pullback {
    pub fn new(map: Mobius, inner: Arc<dyn CoefficientField>) -> Self {
        Self { map, inner }
    }
}

/// `f*μ` as a field.
pub fn pullback(map: &Mobius, mu: Arc<dyn CoefficientField>) -> Pullback {
    Pullback::new(*map, mu)
}

impl CoefficientField for Pullback {
    fn eval(&self, z: Complex) -> Result<Complex> {
        let (dz, dzbar) = self.map.wirtinger(z)?;
        let m = self.inner.eval(self.map.apply(z)?)?;
        Ok(pullback_value(dz, dzbar, m, self.map.is_orientation_reversing()))
    }

    fn norm_bound(&self) -> f64 {
        self.inner.norm_bound()
    }
}

/// Extension of a field on `Ω̄` to the copies `T(Ω̄)` by
/// `μ(z) = (T⁻¹)*μ_base(z)`, which makes it invariant under the group
/// wherever the orbit stays within `max_depth` reflections.
pub struct Symmetrized {
    config: CircleDomainConfig,
    base: Arc<dyn CoefficientField>,
    max_depth: usize,
}

impl Symmetrized {
    pub fn new(config: &CircleDomainConfig, base: Arc<dyn CoefficientField>, max_depth: usize) -> Self {
        Self { config: config.clone(), base, max_depth }
    }
}

impl CoefficientField for Symmetrized {
    fn eval(&self, z: Complex) -> Result<Complex> {
        let (word, _) = locate_copy(&self.config, z, self.max_depth)?;
        if word.is_empty() {
            return self.base.eval(z);
        }
        let back = word_to_map(&self.config, &word.inverse())?;
        Pullback::new(back, self.base.clone()).eval(z)
    }

    fn norm_bound(&self) -> f64 {
        self.base.norm_bound()
    }
}

/// Central-difference Wirtinger derivatives, fourth-order stencil.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WirtingerSample {
    pub dz: Complex,
    pub dzbar: Complex,
    pub h: f64,
}

/// Default step `10⁻⁵ (1 + |z|)`.
pub fn default_step(z: Complex) -> f64 {
    1e-5 * (1.0 + z.norm())
}

pub fn wirtinger_fd<F>(map: F, z: Complex, h: f64) -> Result<WirtingerSample>
where
    F: Fn(Complex) -> Result<Complex>,
{
    if !(h > 0.0) {
        return Err(Error::InvalidArgument(format!("step {h} must be positive")));
    }
    let diff = |step: Complex| -> Result<Complex> {
        let near = map(z + step)? - map(z - step)?;
        let far = map(z + step * 2.0)? - map(z - step * 2.0)?;
        Ok((near * 8.0 - far) / (12.0 * h))
    };
    let fx = diff(Complex::new(h, 0.0))?;
    let fy = diff(Complex::new(0.0, h))?;
    let i = Complex::new(0.0, 1.0);
    Ok(WirtingerSample { dz: (fx - i * fy) * 0.5, dzbar: (fx + i * fy) * 0.5, h })
}

/// `μ_f(z) = ∂z̄ f / ∂z f` by central differences.
pub fn beltrami_of_map<F>(map: F, z: Complex, h: f64) -> Result<Complex>
where
    F: Fn(Complex) -> Result<Complex>,
{
    let w = wirtinger_fd(map, z, h)?;
    if w.dz.norm() <= 1e-9 * w.dzbar.norm().max(1.0) {
        return Err(Error::DilatationSingular(w.dz.norm()));
    }
    Ok(w.dzbar / w.dz)
}

/// Worst `|T*μ − μ|` over the sampled points.
#[derive(Debug, Clone, PartialEq)]
pub struct InvarianceReport {
    pub residual: f64,
    pub witness: Option<(ReducedWord, Complex)>,
    pub evaluated: usize,
    /// Pairs skipped because an orbit point lies deeper than a field
    /// can resolve.
    pub skipped: usize,
}

/// `max |T*μ(z) − μ(z)|` over reduced words of length `1..=max_word_length`.
pub fn invariance_residual(
    config: &CircleDomainConfig,
    mu: &dyn CoefficientField,
    max_word_length: usize,
    samples: &[Complex],
) -> Result<InvarianceReport> {
    let mut report = InvarianceReport { residual: 0.0, witness: None, evaluated: 0, skipped: 0 };
    for k in 1..=max_word_length {
        for word in enumerate_words(config.disks.len(), k)? {
            let t = word_to_map(config, &word)?;
            let (dz, dzbar) = t.wirtinger_checked(samples)?;
            for (i, &z) in samples.iter().enumerate() {
                let image = t.apply(z)?;
                let (m_image, m_here) = match (mu.eval(image), mu.eval(z)) {
                    (Ok(a), Ok(b)) => (a, b),
                    (Err(Error::ResolutionInsufficient(_)), _) | (_, Err(Error::ResolutionInsufficient(_))) => {
                        report.skipped += 1;
                        continue;
                    }
                    (Err(e), _) | (_, Err(e)) => return Err(e),
                };
                let pulled = pullback_value(dz[i], dzbar[i], m_image, t.is_orientation_reversing());
                let r = (pulled - m_here).norm();
                report.evaluated += 1;
                if r > report.residual || report.witness.is_none() {
                    report.residual = report.residual.max(r);
                    report.witness = Some((word.clone(), z));
                }
            }
        }
    }
    Ok(report)
}

trait WirtingerBatch {
    fn wirtinger_checked(&self, zs: &[Complex]) -> Result<(Vec<Complex>, Vec<Complex>)>;
}

impl WirtingerBatch for Mobius {
    fn wirtinger_checked(&self, zs: &[Complex]) -> Result<(Vec<Complex>, Vec<Complex>)> {
        let mut a = Vec::with_capacity(zs.len());
        let mut b = Vec::with_capacity(zs.len());
        for &z in zs {
            let (dz, dzbar) = self.wirtinger(z)?;
            a.push(dz);
            b.push(dzbar);
        }
        Ok((a, b))
    }
}

/// Reflection across the boundary circle or line of an image region.
pub fn reflection_across(region: &ImageRegion) -> Result<Mobius> {
    match region {
        ImageRegion::Disk(d) | ImageRegion::Exterior(d) => Ok(d.reflection()),
        ImageRegion::HalfPlane { point, normal } => {
            let n = normal / normal.norm();
            let n2 = n * n;
            // z ↦ p − n² (z̄ − p̄)
            Mobius::anti(-n2, *point + n2 * point.conj(), Complex::new(0.0, 0.0), Complex::new(1.0, 0.0))
        }
    }
}

/// Both directions of the invariance criterion for a Möbius map.
#[derive(Debug, Clone, PartialEq)]
pub struct PropInvariantReport {
    /// `max |μ_f|` by finite differences at the samples.
    pub beltrami_max: f64,
    /// Invariance residual of `μ_f ≡ 0`.
    pub invariance_residual: f64,
    /// `max` relative distance between `f ∘ R_j ∘ f⁻¹` and the reflection
    /// across `f(γ_j)`, per generator.
    pub conjugation_residuals: Vec<f64>,
    pub max_conjugation_residual: f64,
}

/// Checks that `μ_f` is invariant and that `f ∘ R_j ∘ f⁻¹` is the
/// reflection across the image circle of each generator.
pub fn prop_invariant_check(
    config: &CircleDomainConfig,
    f: &Mobius,
    max_word_length: usize,
    samples: &[Complex],
) -> Result<PropInvariantReport> {
    if f.is_orientation_reversing() {
        return Err(Error::NotCircleRespecting("map reverses orientation".into()));
    }
    if let Some(q) = f.pole() {
        if let Some(j) = config.disks.iter().position(|d| ((q - d.center).norm() - d.radius).abs() <= 1e-12 * d.radius) {
            return Err(Error::NotCircleRespecting(format!("pole {q} lies on circle {j}, whose image is a line")));
        }
    }
    let mut beltrami_max: f64 = 0.0;
    for &z in samples {
        let m = beltrami_of_map(|w| f.apply(w), z, default_step(z))?;
        beltrami_max = beltrami_max.max(m.norm());
    }
    let invariance = invariance_residual(config, &ZeroField, max_word_length, samples)?.residual;
    let finv = f.inverse();
    let mut conjugation_residuals = Vec::with_capacity(config.disks.len());
    for disk in &config.disks {
        let reflect = reflection_across(&image_disk(f, disk))?;
        let conj = f.compose(&disk.reflection()).compose(&finv);
        let mut worst: f64 = 0.0;
        for &z in samples {
            let w = f.apply(z)?;
            let (a, b) = (conj.apply(w)?, reflect.apply(w)?);
            worst = worst.max((a - b).norm() / b.norm().max(1.0));
        }
        conjugation_residuals.push(worst);
    }
    let max_conjugation_residual = conjugation_residuals.iter().copied().fold(0.0, f64::max);
    Ok(PropInvariantReport { beltrami_max, invariance_residual: invariance, conjugation_residuals, max_conjugation_residual })
}
