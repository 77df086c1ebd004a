//! Exponent calculus, distances to boundary sets, circle-set geometry and
//! branch-safe complex powers.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on `|z| = 1` for boundary points.
pub const UNIT_MODULUS_TOL: f64 = 1e-12;

/// `max(a, 0)`.
#[inline]
pub fn plus_part(a: f64) -> f64 {
    a.max(0.0)
}

/// A real exponent split into positive and negative parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignedExponent(pub f64);

impl SignedExponent {
    pub fn pos_part(self) -> f64 {
        plus_part(self.0)
    }

    pub fn neg_part(self) -> f64 {
        plus_part(-self.0)
    }
}

/// `{u}_{c,eps} = (u_- - 1 + eps)_+ - min(c, u_+)`.
pub fn brace_shorthand(u: f64, c: f64, eps: f64) -> f64 {
    let u = SignedExponent(u);
    plus_part(u.neg_part() - 1.0 + eps) - c.min(u.pos_part())
}

/// Finite set of distinct points on the unit circle, optionally carrying one
/// nonnegative exponent per point.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPointSet")]
pub struct BoundaryPointSet {
    points: Vec<Complex64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    exponents: Option<Vec<f64>>,
}

#[derive(Deserialize)]
struct RawPointSet {
    #[serde(default)]
    points: Vec<Complex64>,
    #[serde(default)]
    exponents: Option<Vec<f64>>,
}

impl TryFrom<RawPointSet> for BoundaryPointSet {
    type Error = Error;

    fn try_from(raw: RawPointSet) -> Result<Self> {
        Self::build(raw.points, raw.exponents)
    }
}

impl BoundaryPointSet {
    pub fn new(points: Vec<Complex64>) -> Result<Self> {
        Self::build(points, None)
    }

    pub fn with_exponents(points: Vec<Complex64>, exponents: Vec<f64>) -> Result<Self> {
        Self::build(points, Some(exponents))
    }

    /// Points `exp(i angle)` for each angle.
    pub fn from_angles(angles: &[f64]) -> Result<Self> {
        Self::new(angles.iter().map(|&t| Complex64::from_polar(1.0, t)).collect())
    }

    pub fn empty() -> Self {
        Self::default()
    }

    fn build(points: Vec<Complex64>, exponents: Option<Vec<f64>>) -> Result<Self> {
        for (i, p) in points.iter().enumerate() {
            if !p.re.is_finite() || !p.im.is_finite() || (p.norm() - 1.0).abs() > UNIT_MODULUS_TOL {
                return Err(Error::NotUnitModulus(*p));
            }
            if points[..i].iter().any(|q| (q - p).norm() <= UNIT_MODULUS_TOL) {
                return Err(Error::DuplicatePoint(*p));
            }
        }
        if let Some(exps) = &exponents {
            if exps.len() != points.len() {
                return Err(Error::ExponentCount {
                    points: points.len(),
                    exponents: exps.len(),
                });
            }
            if let Some(&bad) = exps.iter().find(|e| !e.is_finite() || **e < 0.0) {
                return Err(Error::InvalidExponent(bad));
            }
        }
        Ok(Self { points, exponents })
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn exponents(&self) -> Option<&[f64]> {
        self.exponents.as_deref()
    }

    /// Exponent of point `i`, zero when no exponents were given.
    pub fn exponent(&self, i: usize) -> f64 {
        self.exponents.as_ref().map_or(0.0, |e| e[i])
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// First point shared with `other`, if any.
    pub fn common_point(&self, other: &BoundaryPointSet) -> Option<Complex64> {
        self.points
            .iter()
            .copied()
            .find(|p| other.points.iter().any(|q| (q - p).norm() <= UNIT_MODULUS_TOL))
    }

    /// `prod_j |z - beta_j|`.
    pub fn distance_product(&self, z: Complex64) -> f64 {
        self.points.iter().map(|b| (z - b).norm()).product()
    }
}

/// `min_k |z - xi_k|`.
pub fn dist_to_finite_set(z: Complex64, set: &BoundaryPointSet) -> Result<f64> {
    set.points
        .iter()
        .map(|b| (z - b).norm())
        .min_by(f64::total_cmp)
        .ok_or(Error::EmptyBoundarySet)
}

/// Empirical comparability constants `c(B) <= dist(z,B) / prod|z - beta_j| <= C(B)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Comparability {
    pub lower: f64,
    pub upper: f64,
}

/// Inf and sup of `dist(z, B) / prod |z - beta_j|` over the closed-disk grid
/// with radii `k/128` and angles `2 pi j / 512`. Grid points on `B` are skipped.
pub fn comparability_constants(set: &BoundaryPointSet) -> Result<Comparability> {
    if set.is_empty() {
        return Err(Error::EmptyBoundarySet);
    }
    let mut lower = f64::INFINITY;
    let mut upper = 0.0_f64;
    for k in 0..=128 {
        let r = k as f64 / 128.0;
        let n_angles = if k == 0 { 1 } else { 512 };
        for j in 0..n_angles {
            let z = Complex64::from_polar(r, TAU * j as f64 / 512.0);
            let d = dist_to_finite_set(z, set)?;
            if d < 1e-12 {
                continue;
            }
            let ratio = d / set.distance_product(z);
            lower = lower.min(ratio);
            upper = upper.max(ratio);
        }
    }
    Ok(Comparability { lower, upper })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistProductComparison {
    pub dist: f64,
    pub product: f64,
    pub constants: Comparability,
    pub lower_holds: bool,
    pub upper_holds: bool,
}

/// Compares `dist(z, B)` with `prod |z - beta_j|` against the empirical
/// constants of [`comparability_constants`].
pub fn dist_product_comparison(z: Complex64, set: &BoundaryPointSet) -> Result<DistProductComparison> {
    let constants = comparability_constants(set)?;
    Ok(compare_with(z, set, constants))
}

/// Same as [`dist_product_comparison`] with precomputed constants.
pub fn compare_with(z: Complex64, set: &BoundaryPointSet, constants: Comparability) -> DistProductComparison {
    let dist = set.points.iter().map(|b| (z - b).norm()).fold(f64::INFINITY, f64::min);
    let product = set.distance_product(z);
    let slack = 1e-12 * dist.max(product);
    DistProductComparison {
        dist,
        product,
        constants,
        lower_holds: constants.lower * product <= dist + slack,
        upper_holds: dist <= constants.upper * product + slack,
    }
}

/// Euclidean distance from `lambda` to the ray `[0, +inf)`.
pub fn dist_to_positive_ray(lambda: Complex64) -> f64 {
    if lambda.re >= 0.0 {
        lambda.im.abs()
    } else {
        lambda.norm()
    }
}

/// Closed subset of the unit circle made of isolated points and closed arcs.
///
/// Arcs are stored counterclockwise as `(start, end)` with `start` in
/// `[0, 2 pi)` and `end - start` in `[0, 2 pi]`; overlapping arcs are merged.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawClosedSet")]
pub struct CircleClosedSet {
    isolated_points: Vec<Complex64>,
    arcs: Vec<(f64, f64)>,
}

#[derive(Deserialize)]
struct RawClosedSet {
    #[serde(default)]
    isolated_points: Vec<Complex64>,
    #[serde(default)]
    arcs: Vec<(f64, f64)>,
}

impl TryFrom<RawClosedSet> for CircleClosedSet {
    type Error = Error;

    fn try_from(raw: RawClosedSet) -> Result<Self> {
        Self::new(raw.isolated_points, raw.arcs)
    }
}

impl CircleClosedSet {
    pub fn new(isolated_points: Vec<Complex64>, arcs: Vec<(f64, f64)>) -> Result<Self> {
        for p in &isolated_points {
            if (p.norm() - 1.0).abs() > UNIT_MODULUS_TOL {
                return Err(Error::NotUnitModulus(*p));
            }
        }
        let mut raw = Vec::with_capacity(arcs.len());
        for (a, b) in arcs {
            if !a.is_finite() || !b.is_finite() || b < a {
                return Err(Error::param(format!("arc ({a}, {b}) must have end >= start")));
            }
            raw.push((a, (b - a).min(TAU)));
        }
        let arcs = merge_circular(raw.into_iter().map(|(a, len)| (a, a + len)));
        Ok(Self { isolated_points, arcs })
    }

    pub fn points(points: Vec<Complex64>) -> Result<Self> {
        Self::new(points, Vec::new())
    }

    pub fn isolated_points(&self) -> &[Complex64] {
        &self.isolated_points
    }

    pub fn arcs(&self) -> &[(f64, f64)] {
        &self.arcs
    }

    pub fn is_empty(&self) -> bool {
        self.isolated_points.is_empty() && self.arcs.is_empty()
    }

    pub fn arc_measure(&self) -> f64 {
        self.arcs.iter().map(|(a, b)| b - a).sum()
    }

    /// Chordal distance from `z` (any point of the closed disk) to the set.
    pub fn dist(&self, z: Complex64) -> Result<f64> {
        if self.is_empty() {
            return Err(Error::EmptyBoundarySet);
        }
        let mut best = self
            .isolated_points
            .iter()
            .map(|p| (z - p).norm())
            .fold(f64::INFINITY, f64::min);
        let rho = z.norm();
        let phi = normalize_angle(z.arg());
        for &(a, b) in &self.arcs {
            // the nearest point of an arc is the foot of the ray through z when
            // that ray crosses the arc, otherwise one of its endpoints
            let inside = angle_in_arc(phi, a, b);
            let d = if inside && rho > 0.0 {
                1.0 - rho
            } else {
                let da = (z - Complex64::from_polar(1.0, a)).norm();
                let db = (z - Complex64::from_polar(1.0, b)).norm();
                if rho == 0.0 {
                    1.0
                } else {
                    da.min(db)
                }
            };
            best = best.min(d);
        }
        Ok(best)
    }
}

fn normalize_angle(t: f64) -> f64 {
    let r = t.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

fn angle_in_arc(phi: f64, start: f64, end: f64) -> bool {
    if end - start >= TAU {
        return true;
    }
    let rel = (phi - start).rem_euclid(TAU);
    rel <= end - start
}

/// Merges angular intervals given as `(start, end)` with arbitrary `start`
/// into disjoint intervals with starts in `[0, 2 pi)`. A full circle is
/// returned as `[(0, 2 pi)]`.
fn merge_circular(intervals: impl IntoIterator<Item = (f64, f64)>) -> Vec<(f64, f64)> {
    let mut pieces: Vec<(f64, f64)> = Vec::new();
    for (a, b) in intervals {
        let len = b - a;
        if len >= TAU {
            return vec![(0.0, TAU)];
        }
        let s = normalize_angle(a);
        let e = s + len;
        if e > TAU {
            pieces.push((s, TAU));
            pieces.push((0.0, e - TAU));
        } else {
            pieces.push((s, e));
        }
    }
    pieces.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut merged: Vec<(f64, f64)> = Vec::with_capacity(pieces.len());
    for (s, e) in pieces {
        match merged.last_mut() {
            Some(last) if s <= last.1 => last.1 = last.1.max(e),
            _ => merged.push((s, e)),
        }
    }
    // rejoin an interval split at angle 0
    if merged.len() > 1 {
        let first = merged[0];
        let last = *merged.last().unwrap();
        if first.0 <= 0.0 && last.1 >= TAU {
            merged.pop();
            merged[0] = (last.0, TAU + first.1);
            merged.rotate_left(1);
        }
    }
    if merged.len() == 1 && merged[0].1 - merged[0].0 >= TAU {
        return vec![(0.0, TAU)];
    }
    merged
}

/// Arc-length measure of `{t in T : dist(t, F) < x}` for the chordal distance.
pub fn circle_neighborhood_measure(set: &CircleClosedSet, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::param(format!("neighborhood radius must be positive, got {x}")));
    }
    if x >= 2.0 && !set.is_empty() {
        // the open chordal 2-neighborhood misses at most antipodal points
        return Ok(TAU);
    }
    // |e^{it} - e^{is}| < x  <=>  |t - s| < 2 arcsin(x / 2)
    let half = 2.0 * (x / 2.0).asin();
    let intervals = set
        .isolated_points
        .iter()
        .map(|p| {
            let t = p.arg();
            (t - half, t + half)
        })
        .chain(set.arcs.iter().map(|&(a, b)| (a - half, b + half)));
    let merged = merge_circular(intervals);
    Ok(merged.iter().map(|(a, b)| b - a).sum::<f64>().min(TAU))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TypeMethod {
    /// Closed form: 1 for finite sets, 0 when an arc carries positive measure.
    Exact,
    /// Least-squares slope of log-measure against log-radius.
    LogLogFit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AhernClarkType {
    pub alpha: f64,
    pub method: TypeMethod,
}

/// Ahern-Clark type of a finite union of points and arcs.
pub fn ahern_clark_type(set: &CircleClosedSet) -> Result<AhernClarkType> {
    if set.is_empty() {
        return Err(Error::EmptyBoundarySet);
    }
    let alpha = if set.arc_measure() > 0.0 { 0.0 } else { 1.0 };
    Ok(AhernClarkType {
        alpha,
        method: TypeMethod::Exact,
    })
}

/// Fits the slope of `log |{dist(t,F) < x}|` against `log x` on `x = 2^-k`.
pub fn ahern_clark_estimate(set: &CircleClosedSet, ks: std::ops::RangeInclusive<i32>) -> Result<AhernClarkType> {
    if set.is_empty() {
        return Err(Error::EmptyBoundarySet);
    }
    let mut pts = Vec::new();
    for k in ks {
        let x = 2f64.powi(-k);
        pts.push((x.ln(), circle_neighborhood_measure(set, x)?.ln()));
    }
    if pts.len() < 2 {
        return Err(Error::param("need at least two radii for the slope fit"));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok(AhernClarkType {
        alpha: sxy / sxx,
        method: TypeMethod::LogLogFit,
    })
}

/// Principal argument in `(-pi, pi]`; a negative real with signed zero
/// imaginary part maps to `pi`.
#[inline]
pub fn principal_arg(z: Complex64) -> f64 {
    if z.im == 0.0 && z.re < 0.0 {
        PI
    } else {
        z.im.atan2(z.re)
    }
}

/// `exp(alpha (ln|z| + i Arg z))` with `Arg` in `(-pi, pi]`.
pub fn principal_power(z: Complex64, alpha: f64) -> Result<Complex64> {
    if z.re == 0.0 && z.im == 0.0 {
        return if alpha > 0.0 {
            Ok(Complex64::new(0.0, 0.0))
        } else {
            Err(Error::SingularPower(alpha))
        };
    }
    Ok(ppow(z, alpha))
}

/// Unchecked principal power for nonzero `z`.
#[inline]
pub(crate) fn ppow(z: Complex64, alpha: f64) -> Complex64 {
    if z.im == 0.0 && z.re > 0.0 {
        return Complex64::new(z.re.powf(alpha), 0.0);
    }
    Complex64::from_polar(z.norm().powf(alpha), alpha * principal_arg(z))
}
