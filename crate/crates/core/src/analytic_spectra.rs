//! Exact spectra of the domains with closed forms: segments, boxes, products
//! with a segment, disjoint unions, disks, equilateral triangles, sectors, and
//! rectangle lattice counting for Weyl asymptotics.
//!
//! A [`Spectrum`] may be a prefix of an infinite sequence. It then carries a
//! `tail_bound`: every eigenvalue not listed is ≥ that bound. Merging
//! operations only emit values they can certify against the tail bounds of
//! their inputs.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use serde::Serialize;

use crate::constants::bessel_order;
use crate::specfun::{bessel_j_prime_zero, bessel_j_zero};
use crate::{Error, Result};

const PI2: f64 = PI * PI;

/// Largest prefix `box_spectrum` will return.
pub const MAX_BOX_COUNT: usize = 1_000_000;
/// Lattice points `box_spectrum` may enumerate while searching.
pub const BOX_ENUMERATION_BUDGET: usize = 40_000_000;
/// Largest index accepted by [`rectangle_mu_k`].
pub const MAX_RECTANGLE_INDEX: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectrumSource {
    Analytic,
    Fem,
    Extrapolated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryCondition {
    Neumann,
    Dirichlet,
    /// Dirichlet at one end, Neumann at the other.
    Mixed,
}

/// Ascending eigenvalues with multiplicity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    values: Vec<f64>,
    source: SpectrumSource,
    label: String,
    tail_bound: f64,
}

impl Spectrum {
    /// `tail_bound` is a lower bound on every eigenvalue not in `values`
    /// (`f64::INFINITY` when the list is complete).
    pub fn new(
        values: Vec<f64>,
        source: SpectrumSource,
        label: impl Into<String>,
        tail_bound: f64,
    ) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Domain("eigenvalues must be finite and >= 0".into()));
        }
        if values.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Domain("eigenvalues must be ascending".into()));
        }
        if tail_bound.is_nan() || values.last().is_some_and(|&v| tail_bound < v) {
            return Err(Error::Domain(format!("tail bound {tail_bound} below listed values")));
        }
        Ok(Self { values, source, label: label.into(), tail_bound })
    }

    /// A prefix whose next unlisted eigenvalue is at least the last listed one.
    pub fn prefix(values: Vec<f64>, source: SpectrumSource, label: impl Into<String>) -> Result<Self> {
        let tail = values.last().copied().unwrap_or(0.0);
        Self::new(values, source, label, tail)
    }

    /// A complete (finite) list.
    pub fn complete(values: Vec<f64>, source: SpectrumSource, label: impl Into<String>) -> Result<Self> {
        Self::new(values, source, label, f64::INFINITY)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn count(&self) -> usize {
        self.values.len()
    }

    pub fn source(&self) -> SpectrumSource {
        self.source
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    /// Spectrum of the domain dilated by `c`: every value times c⁻².
    pub fn dilated(&self, c: f64) -> Result<Self> {
        check_positive("dilation", c)?;
        let f = 1.0 / (c * c);
        Self::new(
            self.values.iter().map(|v| v * f).collect(),
            self.source,
            format!("{} x{c}", self.label),
            self.tail_bound * f,
        )
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v.is_finite() && v > 0.0) {
        return Err(Error::Domain(format!("{name} must be finite and positive, got {v}")));
    }
    Ok(())
}

fn check_count(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain("requested count must be >= 1".into()));
    }
    Ok(())
}

/// First `n` eigenvalues of the interval [0, D].
pub fn segment_spectrum(length: f64, bc: BoundaryCondition, n: usize) -> Result<Spectrum> {
    check_positive("length", length)?;
    check_count(n)?;
    let d2 = length * length;
    let value = |i: usize| -> f64 {
        let i = i as f64;
        match bc {
            BoundaryCondition::Neumann => PI2 * i * i / d2,
            BoundaryCondition::Dirichlet => PI2 * (i + 1.0) * (i + 1.0) / d2,
            BoundaryCondition::Mixed => {
                let o = 2.0 * i + 1.0;
                PI2 * o * o / (4.0 * d2)
            }
        }
    };
    let values = (0..n).map(value).collect();
    Spectrum::new(values, SpectrumSource::Analytic, format!("segment({length}, {bc:?})"), value(n))
}

struct Lattice {
    weights: Vec<f64>,
    start: u64,
}

impl Lattice {
    fn min_value(&self) -> f64 {
        let s = self.start as f64;
        self.weights.iter().map(|w| w * s * s).sum()
    }

    /// Visits every multi-index value ≤ t; stops early once `cap` is reached.
    /// Returns the number visited.
    fn walk(&self, t: f64, cap: usize, sink: &mut dyn FnMut(f64)) -> usize {
        let mut count = 0;
        self.walk_dim(0, 0.0, t, cap, &mut count, sink);
        count
    }

    fn walk_dim(&self, dim: usize, acc: f64, t: f64, cap: usize, count: &mut usize, sink: &mut dyn FnMut(f64)) {
        let rest_min: f64 = self.weights[dim + 1..]
            .iter()
            .map(|w| w * (self.start * self.start) as f64)
            .sum();
        let mut k = self.start;
        loop {
            let kf = k as f64;
            let v = acc + self.weights[dim] * kf * kf;
            if v + rest_min > t || *count >= cap {
                return;
            }
            if dim + 1 == self.weights.len() {
                *count += 1;
                sink(v);
            } else {
                self.walk_dim(dim + 1, v, t, cap, count, sink);
            }
            k += 1;
        }
    }
}

/// The `n` smallest eigenvalues of the box ∏[0, ℓᵢ] (1 to 6 factors).
pub fn box_spectrum(sides: &[f64], bc: BoundaryCondition, n: usize) -> Result<Spectrum> {
    if !(1..=6).contains(&sides.len()) {
        return Err(Error::Domain(format!("box dimension {} outside 1..=6", sides.len())));
    }
    for &s in sides {
        check_positive("side", s)?;
    }
    check_count(n)?;
    if n > MAX_BOX_COUNT {
        return Err(Error::Overflow(format!("n = {n} > {MAX_BOX_COUNT}")));
    }
    let start = match bc {
        BoundaryCondition::Neumann => 0,
        BoundaryCondition::Dirichlet => 1,
        BoundaryCondition::Mixed => {
            return Err(Error::Unsupported("box spectra are Neumann or Dirichlet".into()))
        }
    };
    let lattice = Lattice { weights: sides.iter().map(|s| PI2 / (s * s)).collect(), start };
    let base = lattice.min_value();
    let mut excess = lattice.weights.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut t;
    loop {
        t = base + excess;
        let c = lattice.walk(t, BOX_ENUMERATION_BUDGET + 1, &mut |_| {});
        if c > BOX_ENUMERATION_BUDGET {
            return Err(Error::Overflow(format!(
                "more than {BOX_ENUMERATION_BUDGET} lattice points below {t}"
            )));
        }
        if c >= n {
            break;
        }
        excess *= 2.0;
    }
    let mut values = Vec::new();
    lattice.walk(t, usize::MAX, &mut |v| values.push(v));
    values.sort_by(f64::total_cmp);
    let tail = values.get(n).copied().unwrap_or(t);
    values.truncate(n);
    let label = format!("box({sides:?}, {bc:?})");
    Spectrum::new(values, SpectrumSource::Analytic, label, tail)
}

#[derive(PartialEq)]
struct HeapKey(f64, usize, usize);

impl Eq for HeapKey {}

impl PartialOrd for HeapKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .total_cmp(&other.0)
            .then(self.1.cmp(&other.1))
            .then(self.2.cmp(&other.2))
    }
}

/// First `n` eigenvalues of Ω × [0, ℓ] (Neumann on the new factor):
/// {base[m] + π²j²/ℓ²}. Errors if `base` is too short to certify them.
pub fn product_spectrum(base: &Spectrum, ell: f64, n: usize) -> Result<Spectrum> {
    check_positive("ell", ell)?;
    check_count(n)?;
    if base.count() == 0 {
        return Err(Error::Certification("empty base spectrum".into()));
    }
    let w = PI2 / (ell * ell);
    let mut heap: BinaryHeap<Reverse<HeapKey>> = base
        .values()
        .iter()
        .enumerate()
        .map(|(m, &v)| Reverse(HeapKey(v, m, 0)))
        .collect();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let Reverse(HeapKey(v, m, j)) = heap.pop().expect("heap never empties");
        if v > base.tail_bound() {
            return Err(Error::Certification(format!(
                "value {} of product needs base eigenvalues beyond the {} listed",
                out.len(),
                base.count()
            )));
        }
        out.push(v);
        let next = (j + 1) as f64;
        heap.push(Reverse(HeapKey(base.values()[m] + w * next * next, m, j + 1)));
    }
    let next = heap.peek().map_or(f64::INFINITY, |Reverse(k)| k.0);
    let tail = next.min(base.tail_bound());
    let label = format!("{} x [0,{ell}]", base.label());
    Spectrum::new(out, SpectrumSource::Analytic, label, tail)
}

/// Merged spectrum of a disjoint union.
pub fn disjoint_union_spectrum(parts: &[Spectrum], n: usize) -> Result<Spectrum> {
    check_count(n)?;
    if parts.is_empty() {
        return Err(Error::Domain("no parts".into()));
    }
    let mut all: Vec<f64> = parts.iter().flat_map(|p| p.values().iter().copied()).collect();
    all.sort_by(f64::total_cmp);
    let tail_min = parts.iter().map(Spectrum::tail_bound).fold(f64::INFINITY, f64::min);
    if all.len() < n || all[n - 1] > tail_min {
        return Err(Error::Certification(format!(
            "cannot certify {n} values of the union (listed {}, tail bound {tail_min})",
            all.len()
        )));
    }
    let tail = all.get(n).copied().unwrap_or(f64::INFINITY).min(tail_min);
    all.truncate(n);
    let source = if parts.iter().all(|p| p.source() == parts[0].source()) {
        parts[0].source()
    } else {
        SpectrumSource::Extrapolated
    };
    let label = format!("union of {} parts", parts.len());
    Spectrum::new(all, source, label, tail)
}

/// μ₁ of the disk of radius R: (j′_{1,1}/R)².
pub fn disk_mu1(radius: f64) -> Result<f64> {
    check_positive("radius", radius)?;
    let j = bessel_j_prime_zero(1.0, 1)?;
    Ok(j * j / (radius * radius))
}

/// Neumann prefix [0, μ₁] of the disk; μ₁ is double, so nothing unlisted is
/// below it.
pub fn disk_neumann_prefix(radius: f64) -> Result<Spectrum> {
    let mu1 = disk_mu1(radius)?;
    Spectrum::new(vec![0.0, mu1], SpectrumSource::Analytic, format!("disk({radius})"), mu1)
}

/// μ₁ of the equilateral triangle: 16π²/(9 s²).
pub fn equilateral_triangle_mu1(side: f64) -> Result<f64> {
    check_positive("side", side)?;
    Ok(16.0 * PI2 / (9.0 * side * side))
}

/// First mixed eigenvalue of a cone of slant radius R in dimension d
/// (Dirichlet on the spherical cap, Neumann on the lateral surface):
/// j²_{d/2−1,1}/R², whatever the opening.
pub fn cone_tau1(radius: f64, d: usize) -> Result<f64> {
    check_positive("radius", radius)?;
    if d < 2 {
        return Err(Error::Range(format!("dimension {d} < 2")));
    }
    let j = bessel_j_zero(bessel_order(d), 1)?;
    Ok(j * j / (radius * radius))
}

fn rect_value(a: f64, b: f64, m: u64, n: u64) -> f64 {
    let (x, y) = (m as f64 / a, n as f64 / b);
    PI2 * (x * x + y * y)
}

/// N(t) = #{(m, n) ≥ 0 : π²(m²/a² + n²/b²) ≤ t}, counted with the same
/// floating-point expression used for the values themselves.
pub fn rectangle_count(a: f64, b: f64, t: f64) -> u64 {
    if t < 0.0 {
        return 0;
    }
    let mut total = 0u64;
    let mut m = 0u64;
    while rect_value(a, b, m, 0) <= t {
        let x = m as f64 / a;
        let rest = (t / PI2 - x * x).max(0.0);
        let mut n = (b * rest.sqrt()).floor() as u64;
        while rect_value(a, b, m, n + 1) <= t {
            n += 1;
        }
        loop {
            if rect_value(a, b, m, n) <= t {
                total += n + 1;
                break;
            }
            if n == 0 {
                break;
            }
            n -= 1;
        }
        m += 1;
    }
    total
}

/// μ_k of the a × b rectangle, zero-based (μ₀ = 0), with multiplicity.
pub fn rectangle_mu_k(a: f64, b: f64, k: u64) -> Result<f64> {
    check_positive("a", a)?;
    check_positive("b", b)?;
    if k > MAX_RECTANGLE_INDEX {
        return Err(Error::Overflow(format!("k = {k} > {MAX_RECTANGLE_INDEX}")));
    }
    if k == 0 {
        return Ok(0.0);
    }
    let need = k + 1;
    // Upper bracket from the Weyl term with room for the boundary correction.
    let mut hi = 4.0 * PI * (k as f64 + 1.0) / (a * b) + PI2 * (1.0 / (a * a) + 1.0 / (b * b));
    while rectangle_count(a, b, hi) < need {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if rectangle_count(a, b, mid) >= need {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    // hi is within an ulp of the answer; return the lattice value itself.
    let mut best = 0.0f64;
    let mut m = 0u64;
    while rect_value(a, b, m, 0) <= hi {
        let x = m as f64 / a;
        let rest = (hi / PI2 - x * x).max(0.0);
        let mut n = (b * rest.sqrt()).floor() as u64 + 1;
        loop {
            let v = rect_value(a, b, m, n);
            if v <= hi {
                best = best.max(v);
                break;
            }
            if n == 0 {
                break;
            }
            n -= 1;
        }
        m += 1;
    }
    Ok(best)
}

/// (|Ω₂|/|Ω₁|)^{2/d}, the limit of μ_k(Ω₁)/μ_k(Ω₂) as k → ∞.
pub fn weyl_ratio(vol1: f64, vol2: f64, d: usize) -> Result<f64> {
    check_positive("vol1", vol1)?;
    check_positive("vol2", vol2)?;
    if d < 1 {
        return Err(Error::Range("dimension must be >= 1".into()));
    }
    Ok((vol2 / vol1).powf(2.0 / d as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn segment_examples() {
        let s = segment_spectrum(1.0, BoundaryCondition::Neumann, 2).unwrap();
        assert_eq!(s.values(), &[0.0, PI2]);
        let s = segment_spectrum(2.0, BoundaryCondition::Neumann, 2).unwrap();
        assert_relative_eq!(s.values()[1], 2.4674011002723395, max_relative = 1e-15);
        let m = 0.3;
        let s = segment_spectrum(m, BoundaryCondition::Mixed, 1).unwrap();
        assert_relative_eq!(s.values()[0], PI2 / (4.0 * m * m), max_relative = 1e-15);
        assert!(segment_spectrum(0.0, BoundaryCondition::Neumann, 1).is_err());
    }

    #[test]
    fn box_examples() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let s = box_spectrum(&[h, h], BoundaryCondition::Neumann, 2).unwrap();
        assert_eq!(s.values()[0], 0.0);
        assert_relative_eq!(s.values()[1], 2.0 * PI2, max_relative = 1e-15);
        let r = 2f64.sqrt();
        let s = box_spectrum(&[r, r], BoundaryCondition::Neumann, 2).unwrap();
        assert_relative_eq!(s.values()[1], PI2 / 2.0, max_relative = 1e-15);
        let s = box_spectrum(&[1.0], BoundaryCondition::Dirichlet, 3).unwrap();
        assert_relative_eq!(s.values()[2], 9.0 * PI2, max_relative = 1e-15);
        assert_eq!(s.values()[0], PI2);
    }

    #[test]
    fn box_multiplicity_and_tail() {
        let s = box_spectrum(&[1.0, 1.0], BoundaryCondition::Neumann, 4).unwrap();
        // 0, π², π², 2π² then 4π² twice.
        assert_eq!(s.values(), &[0.0, PI2, PI2, 2.0 * PI2]);
        assert!(s.tail_bound() >= 2.0 * PI2 && s.tail_bound() <= 4.0 * PI2);
    }

    #[test]
    fn box_overflow() {
        let r = box_spectrum(&[1.0; 6], BoundaryCondition::Neumann, MAX_BOX_COUNT + 1);
        assert!(matches!(r, Err(Error::Overflow(_))));
        let s = box_spectrum(&[1.0; 6], BoundaryCondition::Neumann, MAX_BOX_COUNT).unwrap();
        assert_eq!(s.count(), MAX_BOX_COUNT);
        assert!(box_spectrum(&[], BoundaryCondition::Neumann, 1).is_err());
    }

    #[test]
    fn product_examples() {
        let base = Spectrum::prefix(vec![0.0, 5.0], SpectrumSource::Analytic, "b").unwrap();
        let s = product_spectrum(&base, 1.0, 2).unwrap();
        assert_eq!(s.values(), &[0.0, 5.0]);
        let point = Spectrum::complete(vec![0.0], SpectrumSource::Analytic, "pt").unwrap();
        let s = product_spectrum(&point, 1.0, 3).unwrap();
        assert_eq!(s.values(), &[0.0, PI2, 4.0 * PI2]);
        // Too short a base: [0, 5] cannot certify the 3rd value when π²/ℓ² > 5.
        assert!(matches!(product_spectrum(&base, 1.0, 3), Err(Error::Certification(_))));
    }

    #[test]
    fn union_examples() {
        let a = Spectrum::complete(vec![0.0, 1.0, 2.0], SpectrumSource::Analytic, "a").unwrap();
        let b = Spectrum::complete(vec![0.0, 1.5], SpectrumSource::Analytic, "b").unwrap();
        let u = disjoint_union_spectrum(&[a.clone(), b], 5).unwrap();
        assert_eq!(u.values(), &[0.0, 0.0, 1.0, 1.5, 2.0]);
        let one = disjoint_union_spectrum(std::slice::from_ref(&a), 3).unwrap();
        assert_eq!(one.values(), a.values());
        let disks: Vec<_> = (0..4).map(|_| disk_neumann_prefix(0.5).unwrap()).collect();
        let u = disjoint_union_spectrum(&disks, 4).unwrap();
        assert_eq!(u.values(), &[0.0; 4]);
        assert!(disjoint_union_spectrum(&disks, 9).is_err());
    }

    #[test]
    fn closed_forms() {
        assert!((disk_mu1(1.0).unwrap() - 3.39).abs() < 0.005);
        assert_relative_eq!(disk_mu1(2.0).unwrap(), 0.847491, max_relative = 1e-5);
        assert_relative_eq!(disk_mu1(1.0).unwrap(), 1.841183781340659f64.powi(2), max_relative = 1e-12);
        assert_relative_eq!(equilateral_triangle_mu1(2.0).unwrap(), 4.0 * PI2 / 9.0, max_relative = 1e-15);
        assert_relative_eq!(equilateral_triangle_mu1(1.0).unwrap(), 16.0 * PI2 / 9.0, max_relative = 1e-15);
        assert!((cone_tau1(1.0, 2).unwrap() - 5.783).abs() < 1e-3);
        assert_relative_eq!(cone_tau1(1.0, 3).unwrap(), PI2, max_relative = 1e-12);
        assert_relative_eq!(cone_tau1(2.0, 2).unwrap() * 4.0, cone_tau1(1.0, 2).unwrap(), max_relative = 1e-15);
    }

    #[test]
    fn rectangle_examples() {
        assert_eq!(rectangle_mu_k(1.0, 1.0, 0).unwrap(), 0.0);
        assert_eq!(rectangle_mu_k(1.0, 1.0, 1).unwrap(), PI2);
        assert_eq!(rectangle_mu_k(1.0, 1.0, 2).unwrap(), PI2);
        assert_eq!(rectangle_mu_k(1.0, 1.0, 3).unwrap(), 2.0 * PI2);
        let r = 2f64.sqrt();
        assert_relative_eq!(rectangle_mu_k(r, r, 1).unwrap(), PI2 / 2.0, max_relative = 1e-15);
    }

    #[test]
    fn weyl_examples() {
        assert_relative_eq!(weyl_ratio(1.0, 2.6, 2).unwrap(), 2.6, max_relative = 1e-15);
        assert_eq!(weyl_ratio(PI, PI, 2).unwrap(), 1.0);
        assert_relative_eq!(weyl_ratio(1.0, 8.0, 3).unwrap(), 4.0, max_relative = 1e-15);
        assert!(weyl_ratio(0.0, 1.0, 2).is_err());
    }
}
