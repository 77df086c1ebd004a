//! Explicit conformal maps and numerical checks of their distortion bounds.
//!
//! The Stolz angle `S_A(zeta0) = {z in D : |z - zeta0| / (1 - |z|) < A}` is
//! mapped onto the unit disk by
//!
//! ```text
//! phi_A(z) = ((u - v) / (u + v))^2,   u = (1 + sqrt z)^alpha,  v = (1 - sqrt z)^alpha,
//! ```
//!
//! with `alpha = pi / (2 arccos(1/A))`, normalized by `phi_A(0) = 0` and
//! `phi_A(1) = 1`. Everything here is written for the vertex `1`; other
//! vertices are handled by rotating with `conj(zeta0)`.

use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::{dist_to_positive_ray, ppow, UNIT_MODULUS_TOL};

const I: Complex64 = Complex64::new(0.0, 1.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Relative tolerance used when evaluating two-sided inequalities.
pub const SANDWICH_REL_TOL: f64 = 1e-12;

/// Half-angle `omega = arccos(1/A)` and exponent `alpha = pi / (2 omega)`.
pub fn stolz_params(aperture: f64) -> Result<(f64, f64)> {
    if !(aperture > 1.0) || !aperture.is_finite() {
        return Err(Error::InvalidAperture(aperture));
    }
    let omega = (1.0 / aperture).acos();
    Ok((omega, PI / (2.0 * omega)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StolzAngle {
    vertex: Complex64,
    aperture: f64,
    half_angle: f64,
    exponent: f64,
}

impl StolzAngle {
    pub fn new(vertex: Complex64, aperture: f64) -> Result<Self> {
        if (vertex.norm() - 1.0).abs() > UNIT_MODULUS_TOL {
            return Err(Error::NotUnitModulus(vertex));
        }
        let (half_angle, exponent) = stolz_params(aperture)?;
        Ok(Self {
            vertex,
            aperture,
            half_angle,
            exponent,
        })
    }

    /// Stolz angle with vertex `1`.
    pub fn at_one(aperture: f64) -> Result<Self> {
        Self::new(ONE, aperture)
    }

    pub fn vertex(&self) -> Complex64 {
        self.vertex
    }

    pub fn aperture(&self) -> f64 {
        self.aperture
    }

    pub fn half_angle(&self) -> f64 {
        self.half_angle
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    /// Rotates `z` so that the vertex sits at `1`.
    #[inline]
    pub fn to_standard(&self, z: Complex64) -> Complex64 {
        z * self.vertex.conj()
    }

    #[inline]
    pub fn from_standard(&self, z: Complex64) -> Complex64 {
        z * self.vertex
    }

    /// `|z - zeta0| / (1 - |z|)`; infinite on and outside the circle.
    pub fn ratio(&self, z: Complex64) -> f64 {
        let gap = 1.0 - z.norm();
        if gap <= 0.0 {
            f64::INFINITY
        } else {
            (z - self.vertex).norm() / gap
        }
    }

    /// Radius of the boundary curve in direction `theta`, measured from the
    /// origin in the standard (vertex `1`) position. The angle is star-shaped
    /// with respect to `0`.
    pub fn boundary_radius(&self, theta: f64) -> f64 {
        let a2 = self.aperture * self.aperture;
        let c = theta.cos();
        let half = (theta / 2.0).sin();
        // roots of (A^2-1) R^2 - 2 (A^2 - cos t) R + (A^2-1) multiply to 1
        let disc = (2.0 * half * half * (2.0 * a2 - 1.0 - c)).sqrt();
        (a2 - 1.0) / ((a2 - c) + disc)
    }

    /// Deterministic interior samples `rho R(theta) e^{i theta}` from a
    /// golden-ratio lattice, rotated to the actual vertex.
    pub fn interior_samples(&self, count: usize) -> Vec<Complex64> {
        lattice(count)
            .map(|(u1, u2)| {
                let theta = PI * (2.0 * u2 - 1.0);
                let rho = u1.sqrt() * 0.999;
                self.from_standard(Complex64::from_polar(rho * self.boundary_radius(theta), theta))
            })
            .collect()
    }

    /// Deterministic samples of `S_A` within distance `radius` of the vertex.
    pub fn vertex_samples(&self, count: usize, radius: f64) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(count);
        let mut k = 0usize;
        while out.len() < count {
            k += 1;
            let (u1, u2) = lattice_point(k);
            let t = radius * u1.sqrt();
            let psi = self.half_angle * (2.0 * u2 - 1.0);
            let z = ONE - Complex64::from_polar(t, psi);
            if t > 0.0 && z.norm() < 1.0 && self.ratio(z) < self.aperture && (z - ONE).norm() < radius {
                out.push(self.from_standard(z));
            }
        }
        out
    }
}

fn lattice_point(k: usize) -> (f64, f64) {
    const G1: f64 = 0.754_877_666_246_692_7;
    const G2: f64 = 0.569_840_290_998_053_3;
    ((0.5 + G1 * k as f64).fract(), (0.5 + G2 * k as f64).fract())
}

fn lattice(count: usize) -> impl Iterator<Item = (f64, f64)> {
    (1..=count).map(lattice_point)
}

/// Strict membership `|z - zeta0| / (1 - |z|) < A`.
pub fn stolz_contains(z: Complex64, angle: &StolzAngle) -> Result<bool> {
    if z.norm() >= 1.0 {
        return Err(Error::OutsideDomain(z));
    }
    Ok(angle.ratio(z) < angle.aperture)
}

/// Assignment of the signs in `(1 +- sqrt z)^alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SignPattern {
    PlusMinus,
    MinusPlus,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchCalibration {
    pub chosen: SignPattern,
    /// Largest `|phi_{+-} - phi_{-+}|` over the reference samples.
    pub max_disagreement: f64,
    pub max_modulus: f64,
    pub value_at_zero: f64,
}

fn phi_with_pattern(z: Complex64, alpha: f64, pattern: SignPattern) -> Complex64 {
    let s = z.sqrt();
    let (a, b) = match pattern {
        SignPattern::PlusMinus => (ppow(ONE + s, alpha), ppow(ONE - s, alpha)),
        SignPattern::MinusPlus => (ppow(ONE - s, alpha), ppow(ONE + s, alpha)),
    };
    let q = (a - b) / (a + b);
    q * q
}

/// Tries both sign assignments on interior samples of `S_A` and keeps the
/// first one that maps them into the disk with `phi(0) = 0`.
pub fn calibrate_branch(aperture: f64) -> Result<BranchCalibration> {
    let angle = StolzAngle::at_one(aperture)?;
    let alpha = angle.exponent;
    let samples = angle.interior_samples(256);
    let mut disagreement = 0.0_f64;
    for &z in &samples {
        let a = phi_with_pattern(z, alpha, SignPattern::PlusMinus);
        let b = phi_with_pattern(z, alpha, SignPattern::MinusPlus);
        disagreement = disagreement.max((a - b).norm());
    }
    for pattern in [SignPattern::PlusMinus, SignPattern::MinusPlus] {
        let max_modulus = samples
            .iter()
            .map(|&z| phi_with_pattern(z, alpha, pattern).norm())
            .fold(0.0, f64::max);
        let value_at_zero = phi_with_pattern(Complex64::new(0.0, 0.0), alpha, pattern).norm();
        if max_modulus < 1.0 && value_at_zero < 1e-12 {
            return Ok(BranchCalibration {
                chosen: pattern,
                max_disagreement: disagreement,
                max_modulus,
                value_at_zero,
            });
        }
    }
    Err(Error::param(format!(
        "no sign pattern maps S_A into the disk for A = {aperture}"
    )))
}

/// `(u - v) / sqrt z` by its even power series, for small `|z|`.
fn odd_ratio_series(z: Complex64, alpha: f64) -> Complex64 {
    // (u - v) / s = 2 sum_j binom(alpha, 2j+1) z^j
    let mut binom = alpha; // binom(alpha, 1)
    let mut k = 1.0;
    let mut zp = ONE;
    let mut acc = Complex64::new(0.0, 0.0);
    for _ in 0..10 {
        acc += zp * binom;
        // binom(alpha, k+2) from binom(alpha, k)
        binom *= (alpha - k) * (alpha - k - 1.0) / ((k + 1.0) * (k + 2.0));
        k += 2.0;
        zp *= z;
    }
    acc * 2.0
}

/// `(phi_A(z), phi_A'(z))` in the standard position, valid on the open disk.
pub(crate) fn phi_and_derivative(z: Complex64, alpha: f64) -> (Complex64, Complex64) {
    let s = z.sqrt();
    let u = ppow(ONE + s, alpha);
    let v = ppow(ONE - s, alpha);
    let sum = u + v;
    let diff_over_s = if z.norm() < 1e-4 {
        odd_ratio_series(z, alpha)
    } else {
        (u - v) / s
    };
    let q = diff_over_s * s / sum;
    let one_minus = ONE - z;
    let deriv = if one_minus.norm() == 0.0 {
        Complex64::new(0.0, 0.0)
    } else {
        ppow(one_minus, alpha - 1.0) * diff_over_s * (4.0 * alpha) / (sum * sum * sum)
    };
    (q * q, deriv)
}

/// `phi_A(z)` for the vertex `1`; errors outside `S_A`.
pub fn phi_a(z: Complex64, aperture: f64) -> Result<Complex64> {
    let angle = StolzAngle::at_one(aperture)?;
    if !stolz_contains(z, &angle)? {
        return Err(Error::OutsideDomain(z));
    }
    Ok(phi_and_derivative(z, angle.exponent).0)
}

/// `phi_A(z)` without the membership check, for `|z| < 1`. Outside `S_A`
/// the value is a diagnostic only.
pub fn phi_a_unchecked(z: Complex64, aperture: f64) -> Result<(Complex64, bool)> {
    let angle = StolzAngle::at_one(aperture)?;
    let inside = stolz_contains(z, &angle)?;
    Ok((phi_and_derivative(z, angle.exponent).0, inside))
}

/// `|phi_A'(z)| = 4 alpha |1-z|^(alpha-1) / sqrt|z| * |u - v| / |u + v|^3`.
pub fn phi_a_prime_abs(z: Complex64, aperture: f64) -> Result<f64> {
    let angle = StolzAngle::at_one(aperture)?;
    if z.norm() == 0.0 {
        return Err(Error::param("the modulus formula for phi_A' is singular at z = 0"));
    }
    if !stolz_contains(z, &angle)? {
        return Err(Error::OutsideDomain(z));
    }
    let alpha = angle.exponent;
    let s = z.sqrt();
    let u = ppow(ONE + s, alpha);
    let v = ppow(ONE - s, alpha);
    Ok(4.0 * alpha * (ONE - z).norm().powf(alpha - 1.0) / z.norm().sqrt() * (u - v).norm() / (u + v).norm().powi(3))
}

/// Closed-form inverse of `phi_A` in the standard position.
fn psi_seed(w: Complex64, alpha: f64) -> Complex64 {
    let t = w.sqrt();
    let m = ppow((ONE + t) / (ONE - t), 1.0 / alpha);
    let s = (m - ONE) / (m + ONE);
    s * s
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapSample {
    pub input: Complex64,
    pub output: Complex64,
    pub derivative_abs: f64,
}

/// Stolz-angle map with a cached sampling of the boundary curve.
///
/// The cache is built once and then only read, so a `StolzMap` can be shared
/// between threads.
#[derive(Debug, Clone)]
pub struct StolzMap {
    angle: StolzAngle,
    thetas: Vec<f64>,
    boundary: Vec<Complex64>,
}

const BOUNDARY_SAMPLES: usize = 4096;
const MAX_NEWTON: usize = 50;

impl StolzMap {
    pub fn new(angle: StolzAngle) -> Self {
        let mut thetas: Vec<f64> = (0..=BOUNDARY_SAMPLES)
            .map(|k| -PI + TAU * k as f64 / BOUNDARY_SAMPLES as f64)
            .collect();
        // geometric refinement towards the corner at the vertex
        for j in 4..=240 {
            let t = PI * 2f64.powf(-(j as f64) / 4.0);
            thetas.push(t);
            thetas.push(-t);
        }
        thetas.push(0.0);
        thetas.sort_by(f64::total_cmp);
        thetas.dedup();
        let boundary = thetas
            .iter()
            .map(|&t| Complex64::from_polar(angle.boundary_radius(t), t))
            .collect();
        Self {
            angle,
            thetas,
            boundary,
        }
    }

    pub fn with_aperture(aperture: f64) -> Result<Self> {
        Ok(Self::new(StolzAngle::at_one(aperture)?))
    }

    pub fn angle(&self) -> &StolzAngle {
        &self.angle
    }

    pub fn phi(&self, z: Complex64) -> Result<Complex64> {
        if !stolz_contains(z, &self.angle)? {
            return Err(Error::OutsideDomain(z));
        }
        Ok(phi_and_derivative(self.angle.to_standard(z), self.angle.exponent).0)
    }

    /// `(phi(z), phi'(z))` including the phase of the derivative.
    pub fn phi_with_derivative(&self, z: Complex64) -> Result<(Complex64, Complex64)> {
        if !stolz_contains(z, &self.angle)? {
            return Err(Error::OutsideDomain(z));
        }
        let (f, d) = phi_and_derivative(self.angle.to_standard(z), self.angle.exponent);
        Ok((f, d * self.angle.vertex.conj()))
    }

    pub fn sample(&self, z: Complex64) -> Result<MapSample> {
        let (output, d) = self.phi_with_derivative(z)?;
        Ok(MapSample {
            input: z,
            output,
            derivative_abs: d.norm(),
        })
    }

    /// Inverse map `D -> S_A` with `psi(0) = 0`: algebraic inverse as the
    /// seed, then Newton on `phi(z) = w` until `|phi(z) - w| < tol`.
    pub fn psi(&self, w: Complex64, tol: f64) -> Result<Complex64> {
        if w.norm() >= 1.0 {
            return Err(Error::OutsideDomain(w));
        }
        let alpha = self.angle.exponent;
        let mut z = psi_seed(w, alpha);
        let mut best = (f64::INFINITY, z);
        for _ in 0..=MAX_NEWTON {
            let (f, d) = phi_and_derivative(z, alpha);
            let residual = (f - w).norm();
            if residual < best.0 {
                best = (residual, z);
            }
            if residual < tol {
                break;
            }
            if d.norm() == 0.0 {
                break;
            }
            let mut step = (f - w) / d;
            // keep iterates inside the disk
            while (z - step).norm() >= 1.0 && step.norm() > 1e-300 {
                step *= 0.5;
            }
            z -= step;
        }
        if best.0 >= tol {
            return Err(Error::NoConvergence {
                iterations: MAX_NEWTON,
                residual: best.0,
            });
        }
        Ok(self.angle.from_standard(best.1))
    }

    /// Distance from `z` to the boundary curve: dense sampling followed by
    /// golden-section refinement around the best samples.
    pub fn boundary_distance(&self, z: Complex64) -> Result<f64> {
        if !stolz_contains(z, &self.angle)? {
            return Err(Error::OutsideDomain(z));
        }
        let zs = self.angle.to_standard(z);
        let d2: Vec<f64> = self.boundary.iter().map(|b| (zs - b).norm_sqr()).collect();
        let mut order: Vec<usize> = (0..d2.len()).collect();
        order.sort_by(|&a, &b| d2[a].total_cmp(&d2[b]));
        let mut best = d2[order[0]];
        let n = self.thetas.len();
        let g = |t: f64| (zs - Complex64::from_polar(self.angle.boundary_radius(t), t)).norm_sqr();
        for &i in order.iter().take(4) {
            if i > 0 {
                best = best.min(golden_min(&g, self.thetas[i - 1], self.thetas[i]));
            }
            if i + 1 < n {
                best = best.min(golden_min(&g, self.thetas[i], self.thetas[i + 1]));
            }
        }
        Ok(best.sqrt())
    }
}

fn golden_min(g: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut best = g(a).min(g(b));
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut gc, mut gd) = (g(c), g(d));
    for _ in 0..200 {
        if (b - a).abs() <= 1e-16 * (1.0 + a.abs()) {
            break;
        }
        if gc < gd {
            b = d;
            d = c;
            gd = gc;
            c = b - INV_PHI * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + INV_PHI * (b - a);
            gd = g(d);
        }
        best = best.min(gc).min(gd);
    }
    best
}

/// `psi_A(w)` for the vertex `1`.
pub fn psi_a(w: Complex64, aperture: f64, tol: f64) -> Result<Complex64> {
    StolzMap::with_aperture(aperture)?.psi(w, tol)
}

/// Distance from `z` to the boundary of the Stolz angle `angle`.
pub fn stolz_boundary_distance(z: Complex64, angle: &StolzAngle) -> Result<f64> {
    StolzMap::new(*angle).boundary_distance(z)
}

/// `w(z) = i (1 + z) / (1 - z)`, disk to upper half-plane.
pub fn cayley_to_halfplane(z: Complex64) -> Result<Complex64> {
    if z == ONE {
        return Err(Error::Pole(z));
    }
    Ok(I * (ONE + z) / (ONE - z))
}

/// `z(w) = (w - i) / (w + i)`, upper half-plane to disk.
pub fn cayley_to_disk(w: Complex64) -> Result<Complex64> {
    if w == -I {
        return Err(Error::Pole(w));
    }
    Ok((w - I) / (w + I))
}

/// `lower <= value <= upper`, checked with a relative tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sandwich {
    pub lower: f64,
    pub value: f64,
    pub upper: f64,
}

impl Sandwich {
    pub fn new(lower: f64, value: f64, upper: f64) -> Self {
        Self { lower, value, upper }
    }

    pub fn holds(&self) -> bool {
        let tol = SANDWICH_REL_TOL * self.value.abs().max(self.upper.abs());
        self.lower <= self.value + tol && self.value <= self.upper + tol
    }

    /// Smallest relative gap to either side; negative on violation.
    pub fn slack(&self) -> f64 {
        let scale = self.value.abs().max(f64::MIN_POSITIVE);
        ((self.value - self.lower) / scale).min((self.upper - self.value) / scale)
    }
}

/// Disk/half-plane comparison quantities for one `w` and one real point `x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfPlaneComparison {
    pub w: Complex64,
    pub z: Complex64,
    /// `2/(1+|w|) <= |1-z| <= 2 sqrt2/(1+|w|)`
    pub one_minus_z: Sandwich,
    /// `2 Im w/(1+|w|)^2 <= 1-|z| <= 8 Im w/(1+|w|)^2`
    pub gap: Sandwich,
    /// `2|w-x|/((1+|w|)|x+i|) <= |z-zeta| <= 2 sqrt2 |w-x|/((1+|w|)|x+i|)`
    pub point: Sandwich,
    /// `|w-x| = 2|z-zeta| / (|1-z||1-zeta|)` as a degenerate sandwich.
    pub identity: Sandwich,
}

impl HalfPlaneComparison {
    pub fn all_hold(&self) -> bool {
        self.one_minus_z.holds() && self.gap.holds() && self.point.holds() && self.identity.holds()
    }

    pub fn sandwiches(&self) -> [Sandwich; 4] {
        [self.one_minus_z, self.gap, self.point, self.identity]
    }
}

pub fn halfplane_comparisons(w: Complex64, x: f64) -> Result<HalfPlaneComparison> {
    if !(w.im > 0.0) || !w.re.is_finite() || !w.im.is_finite() {
        return Err(Error::OutsideDomain(w));
    }
    let z = cayley_to_disk(w)?;
    let zeta = cayley_to_disk(Complex64::new(x, 0.0))?;
    let aw = 1.0 + w.norm();
    let sqrt8 = 2.0 / FRAC_1_SQRT_2;
    let one_minus_z = Sandwich::new(2.0 / aw, (ONE - z).norm(), sqrt8 / aw);
    let gap = Sandwich::new(2.0 * w.im / (aw * aw), 1.0 - z.norm(), 8.0 * w.im / (aw * aw));
    let wx = (w - x).norm();
    let scale = aw * Complex64::new(x, 1.0).norm();
    let point = Sandwich::new(2.0 * wx / scale, (z - zeta).norm(), sqrt8 * wx / scale);
    let predicted = 2.0 * (z - zeta).norm() / ((ONE - z).norm() * (ONE - zeta).norm());
    let identity = Sandwich::new(predicted, wx, predicted);
    Ok(HalfPlaneComparison {
        w,
        z,
        one_minus_z,
        gap,
        point,
        identity,
    })
}

/// Square-root branch `C \ [0, inf) -> C_+` with `Im sqrt(lambda) > 0`.
pub fn cut_to_halfplane(lambda: Complex64) -> Result<Complex64> {
    if lambda.im == 0.0 && lambda.re >= 0.0 {
        return Err(Error::OnCut(lambda));
    }
    Ok(I * (-lambda).sqrt())
}

/// `|w| Im w <= dist(w^2, R_+) <= 2 |w| Im w`.
pub fn cut_dist_inequality(w: Complex64) -> Result<Sandwich> {
    if !(w.im > 0.0) {
        return Err(Error::OutsideDomain(w));
    }
    let base = w.norm() * w.im;
    Ok(Sandwich::new(base, dist_to_positive_ray(w * w), 2.0 * base))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PommerenkeSlack {
    pub input: Complex64,
    /// `(1/2) d |phi'| / (1 - |phi|)`, at most 1 when the lower bound holds.
    pub lower_factor: f64,
    /// `4 d |phi'| / (1 - |phi|)`, at least 1 when the upper bound holds.
    pub upper_factor: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PommerenkeReport {
    pub samples: Vec<PommerenkeSlack>,
    pub pass: bool,
}

/// Checks `d |phi'| / 2 <= 1 - |phi| <= 4 d |phi'|` with `d` the distance to
/// the boundary of the source domain.
pub fn check_pommerenke<F>(samples: &[MapSample], boundary_dist: F) -> PommerenkeReport
where
    F: Fn(Complex64) -> f64,
{
    let tol = 1e-12;
    let mut pass = true;
    let samples = samples
        .iter()
        .map(|s| {
            let d = boundary_dist(s.input);
            let gap = 1.0 - s.output.norm();
            let scaled = d * s.derivative_abs;
            let slack = PommerenkeSlack {
                input: s.input,
                lower_factor: 0.5 * scaled / gap,
                upper_factor: 4.0 * scaled / gap,
            };
            if !(slack.lower_factor <= 1.0 + tol && slack.upper_factor >= 1.0 - tol) {
                pass = false;
            }
            slack
        })
        .collect();
    PommerenkeReport { samples, pass }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn params_examples() {
        let (w, a) = stolz_params(2.0).unwrap();
        assert_abs_diff_eq!(w, PI / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(a, 1.5, epsilon = 1e-15);
        let (w, a) = stolz_params(2f64.sqrt()).unwrap();
        assert_abs_diff_eq!(w, PI / 4.0, epsilon = 1e-15);
        assert_abs_diff_eq!(a, 2.0, epsilon = 1e-14);
        let (w, a) = stolz_params(1e12).unwrap();
        assert_abs_diff_eq!(w, PI / 2.0, epsilon = 1e-11);
        assert_abs_diff_eq!(a, 1.0, epsilon = 1e-11);
        assert!(matches!(stolz_params(1.0), Err(Error::InvalidAperture(_))));
    }

    #[test]
    fn angle_invariants() {
        for a in [1.01, 1.5, 2.0, 3.0, 10.0, 1e3] {
            let s = StolzAngle::at_one(a).unwrap();
            assert!(s.half_angle() > 0.0 && s.half_angle() < PI / 2.0);
            assert!(s.exponent() > 1.0);
            if a >= 2.0 {
                assert!(s.exponent() <= 1.5 + 1e-15);
            }
        }
    }

    #[test]
    fn membership_examples() {
        let s = StolzAngle::at_one(2.0).unwrap();
        assert!(stolz_contains(c(0.0, 0.0), &s).unwrap());
        assert!(stolz_contains(c(0.9, 0.0), &s).unwrap());
        assert!(!stolz_contains(c(0.0, 0.5), &s).unwrap());
        assert!(stolz_contains(c(1.0, 0.0), &s).is_err());
        // rotated vertex
        let r = StolzAngle::new(c(0.0, 1.0), 2.0).unwrap();
        assert!(stolz_contains(c(0.0, 0.9), &r).unwrap());
        assert!(!stolz_contains(c(0.9, 0.0), &r).unwrap());
    }

    #[test]
    fn boundary_radius_is_on_curve() {
        let s = StolzAngle::at_one(3.0).unwrap();
        for k in 0..50 {
            let t = -PI + TAU * k as f64 / 49.0;
            let z = Complex64::from_polar(s.boundary_radius(t), t);
            let lhs = (z - ONE).norm();
            let rhs = 3.0 * (1.0 - z.norm());
            assert!((lhs - rhs).abs() < 1e-12, "{t}");
        }
        assert_abs_diff_eq!(s.boundary_radius(PI), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn phi_normalization() {
        assert!(phi_a(c(0.0, 0.0), 2.0).unwrap().norm() < 1e-12);
        let mut prev = f64::INFINITY;
        for k in 4..=20 {
            let x = 1.0 - 2f64.powi(-k);
            let err = (phi_a(c(x, 0.0), 2.0).unwrap() - ONE).norm();
            assert!(err < prev, "k = {k}");
            prev = err;
        }
        assert!(prev < 1e-5);
        assert!(phi_a(c(0.95, 0.01), 2.0).unwrap().norm() < 1.0);
        assert!(matches!(phi_a(c(0.0, 0.9), 2.0), Err(Error::OutsideDomain(_))));
    }

    #[test]
    fn phi_maps_boundary_to_circle() {
        let s = StolzAngle::at_one(2.0).unwrap();
        for k in 1..40 {
            let t = -PI + TAU * k as f64 / 40.0;
            let z = Complex64::from_polar(s.boundary_radius(t) * (1.0 - 1e-13), t);
            let (v, _) = phi_a_unchecked(z, 2.0).unwrap();
            assert!((v.norm() - 1.0).abs() < 1e-9, "{t}: {}", v.norm());
        }
    }

    #[test]
    fn derivative_matches_finite_differences() {
        for a in [2.0, 4.0] {
            let s = StolzAngle::at_one(a).unwrap();
            let map = StolzMap::new(s);
            for z in s.interior_samples(100) {
                if z.norm() < 1e-3 {
                    continue;
                }
                let h = 1e-6;
                let fd =
                    (phi_a_unchecked(z + h, a).unwrap().0 - phi_a_unchecked(z - h, a).unwrap().0).norm() / (2.0 * h);
                let exact = phi_a_prime_abs(z, a).unwrap();
                assert!((fd - exact).abs() / exact < 1e-4, "{z}");
                let (_, d) = map.phi_with_derivative(z).unwrap();
                assert!((d.norm() - exact).abs() <= 1e-10 * exact);
            }
        }
        assert!(phi_a_prime_abs(c(0.0, 0.0), 2.0).is_err());
    }

    #[test]
    fn derivative_series_near_origin() {
        let alpha = 1.5;
        let (_, d0) = phi_and_derivative(c(0.0, 0.0), alpha);
        assert_abs_diff_eq!(d0.re, alpha * alpha, epsilon = 1e-15);
        // both branches of the small-|z| switch agree
        let z = c(1.2e-4, 3e-5);
        let s = z.sqrt();
        let direct = (ppow(ONE + s, alpha) - ppow(ONE - s, alpha)) / s;
        let series = odd_ratio_series(z, alpha);
        assert!((direct - series).norm() < 1e-11);
    }

    #[test]
    fn derivative_vanishes_at_vertex() {
        let mut prev = f64::INFINITY;
        for k in 2..12 {
            let d = phi_a_prime_abs(c(1.0 - 10f64.powi(-k), 0.0), 2.0).unwrap();
            assert!(d < prev);
            prev = d;
        }
    }

    #[test]
    fn distortion_window() {
        for a in [2.0, 4.0, 8.0] {
            let s = StolzAngle::at_one(a).unwrap();
            for z in s.vertex_samples(200, 1.0 / 16.0) {
                let ratio = phi_a_prime_abs(z, a).unwrap() / (z - ONE).norm().powf(s.exponent() - 1.0);
                assert!(ratio > 1.0 / 16.0 && ratio < 48.0, "{a} {z} {ratio}");
            }
        }
    }

    #[test]
    fn maps_samples_into_disk() {
        for a in [2.0, 4.0, 8.0] {
            let map = StolzMap::with_aperture(a).unwrap();
            for z in map.angle().interior_samples(200) {
                assert!(map.phi(z).unwrap().norm() < 1.0);
            }
        }
    }

    #[test]
    fn branch_calibration() {
        let cal = calibrate_branch(2.0).unwrap();
        assert_eq!(cal.chosen, SignPattern::PlusMinus);
        assert!(cal.max_disagreement < 1e-15);
        assert!(cal.max_modulus < 1.0);
    }

    #[test]
    fn psi_roundtrip_and_schwarz() {
        let map = StolzMap::with_aperture(2.0).unwrap();
        assert_eq!(map.psi(c(0.0, 0.0), 1e-14).unwrap(), c(0.0, 0.0));
        for z in map.angle().interior_samples(100) {
            let w = map.phi(z).unwrap();
            let back = map.psi(w, 1e-13).unwrap();
            assert!((back - z).norm() < 1e-9, "{z} -> {w} -> {back}");
            assert!(back.norm() <= w.norm() + 1e-15);
        }
        assert!(map.psi(c(1.0, 0.0), 1e-12).is_err());
        assert_abs_diff_eq!(
            psi_a(c(0.3, 0.2), 4.0, 1e-13)
                .map(|z| phi_a(z, 4.0).unwrap())
                .unwrap()
                .re,
            0.3,
            epsilon = 1e-12
        );
    }

    #[test]
    fn rotated_vertex_map() {
        let v = Complex64::from_polar(1.0, 0.7);
        let map = StolzMap::new(StolzAngle::new(v, 3.0).unwrap());
        let z = v * 0.9;
        let w = map.phi(z).unwrap();
        assert_abs_diff_eq!(w.im, 0.0, epsilon = 1e-12);
        let back = map.psi(w, 1e-13).unwrap();
        assert!((back - z).norm() < 1e-10);
    }

    #[test]
    fn boundary_distance_examples() {
        let b = StolzAngle::at_one(2.0).unwrap();
        let d0 = stolz_boundary_distance(c(0.0, 0.0), &b).unwrap();
        assert!(d0 < 1.0);
        // closest boundary point from the origin is at theta = pi, radius (A-1)/(A+1)
        assert!(d0 <= 1.0 / 3.0 + 1e-12);
        let z = c(0.3, 0.1);
        let d: Vec<f64> = [2.0, 4.0, 8.0]
            .iter()
            .map(|&a| stolz_boundary_distance(z, &StolzAngle::at_one(a).unwrap()).unwrap())
            .collect();
        assert!(d[0] <= d[1] && d[1] <= d[2]);
        assert!(stolz_boundary_distance(c(0.0, 0.9), &b).is_err());
    }

    #[test]
    fn boundary_distance_against_dense_scan() {
        let s = StolzAngle::at_one(1.5).unwrap();
        let map = StolzMap::new(s);
        for z in s.interior_samples(40) {
            let fast = map.boundary_distance(z).unwrap();
            let dense = (0..200_000)
                .map(|k| {
                    let t = -PI + TAU * k as f64 / 200_000.0;
                    (z - Complex64::from_polar(s.boundary_radius(t), t)).norm()
                })
                .fold(f64::INFINITY, f64::min);
            assert!(fast <= dense + 1e-12 && dense - fast < 1e-6, "{z}: {fast} vs {dense}");
        }
    }

    #[test]
    fn cayley_examples() {
        assert_eq!(cayley_to_halfplane(c(0.0, 0.0)).unwrap(), I);
        assert_eq!(cayley_to_disk(I).unwrap(), c(0.0, 0.0));
        assert!(matches!(cayley_to_halfplane(ONE), Err(Error::Pole(_))));
        assert!(matches!(cayley_to_disk(-I), Err(Error::Pole(_))));
    }

    #[test]
    fn halfplane_comparison_examples() {
        let r = halfplane_comparisons(I, 0.0).unwrap();
        assert_abs_diff_eq!(r.z.norm(), 0.0);
        assert_abs_diff_eq!(r.one_minus_z.value, 1.0);
        assert_abs_diff_eq!(r.one_minus_z.lower, 1.0);
        assert_abs_diff_eq!(r.one_minus_z.upper, 2f64.sqrt(), epsilon = 1e-15);
        assert!(r.all_hold());

        let r = halfplane_comparisons(c(0.0, 2.0), 0.5).unwrap();
        assert_abs_diff_eq!(r.z.re, 1.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.one_minus_z.value, 2.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.one_minus_z.lower, 2.0 / 3.0, epsilon = 1e-15);
        assert!(r.all_hold());
        assert!(r.one_minus_z.slack().abs() < 1e-12);

        assert!(halfplane_comparisons(c(1.0, 0.0), 0.0).is_err());
    }

    #[test]
    fn cut_examples() {
        let w = cut_to_halfplane(c(-1.0, 0.0)).unwrap();
        assert_abs_diff_eq!((w - I).norm(), 0.0, epsilon = 1e-15);
        let s = cut_dist_inequality(I).unwrap();
        assert_eq!((s.lower, s.value, s.upper), (1.0, 1.0, 2.0));
        assert!(s.holds());
        let s = cut_dist_inequality(c(1.0, 1.0)).unwrap();
        assert_abs_diff_eq!(s.lower, 2f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(s.value, 2.0, epsilon = 1e-15);
        assert!(s.holds());
        assert!(matches!(cut_to_halfplane(c(2.0, 0.0)), Err(Error::OnCut(_))));
        assert!(matches!(cut_to_halfplane(c(0.0, 0.0)), Err(Error::OnCut(_))));
        for lambda in [c(-3.0, -0.0), c(5.0, -1e-9), c(0.2, 4.0)] {
            let w = cut_to_halfplane(lambda).unwrap();
            assert!(w.im > 0.0);
            assert!((w * w - lambda).norm() < 1e-12 * lambda.norm().max(1.0));
        }
    }

    #[test]
    fn pommerenke_identity() {
        let samples: Vec<MapSample> = (0..50)
            .map(|k| {
                let z = Complex64::from_polar(0.9 * (k as f64 / 50.0), 0.37 * k as f64);
                MapSample {
                    input: z,
                    output: z,
                    derivative_abs: 1.0,
                }
            })
            .collect();
        let rep = check_pommerenke(&samples, |z| 1.0 - z.norm());
        assert!(rep.pass);
        assert_abs_diff_eq!(rep.samples[3].lower_factor, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(rep.samples[3].upper_factor, 4.0, epsilon = 1e-15);
    }

    #[test]
    fn pommerenke_cayley_disk() {
        // the disk automorphism z -> (z - a)/(1 - conj(a) z) restricted to |z| < 0.9
        let a = c(0.3, -0.2);
        let samples: Vec<MapSample> = (0..100)
            .map(|k| {
                let z = Complex64::from_polar(0.9 * ((k as f64 + 0.5) / 100.0).sqrt(), 2.4 * k as f64);
                MapSample {
                    input: z,
                    output: (z - a) / (ONE - a.conj() * z),
                    derivative_abs: (1.0 - a.norm_sqr()) / (ONE - a.conj() * z).norm_sqr(),
                }
            })
            .collect();
        assert!(check_pommerenke(&samples, |z| 1.0 - z.norm()).pass);
    }

    #[test]
    fn pommerenke_on_stolz_angle() {
        let map = StolzMap::with_aperture(2.0).unwrap();
        let samples: Vec<MapSample> = map
            .angle()
            .interior_samples(200)
            .into_iter()
            .map(|z| map.sample(z).unwrap())
            .collect();
        let rep = check_pommerenke(&samples, |z| map.boundary_distance(z).unwrap());
        assert!(rep.pass);
    }
}
