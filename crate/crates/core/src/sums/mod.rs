//! Weighted zero sums, growth-constant estimates and verification reports.

mod disk;
mod dyadic;
mod growth;
mod plane;
mod verify;

pub use disk::{
    closed_set_sum, corollary_sum, disk_sum, hk_sum, stolz_split_sum, two_region_beta, two_region_sum, StolzSplit,
};
pub use dyadic::{beta_k, dyadic_profile, k0, DyadicLevel, DyadicProfile};
pub use growth::{estimate_k, KEstimate, KGrid};
pub use plane::{cut_params_s, cut_sum, halfplane_params_l1, halfplane_sum};
pub use verify::{
    evaluate_condition, verify_theorem, Condition, EpsilonSpread, Instance, JensenBaseline, SharpnessProbe, TraceRow,
    VerifyOptions, VerifyReport,
};

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::math::{BoundaryPointSet, CircleClosedSet, UNIT_MODULUS_TOL};
use crate::parallel::{self, Execution};
use crate::zerofind::{DomainTag, ZeroSet};

/// Finite set of distinct real points with one nonnegative exponent each.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RealPoints {
    pub points: Vec<f64>,
    pub exponents: Vec<f64>,
}

impl RealPoints {
    pub fn new(points: Vec<f64>, exponents: Vec<f64>) -> Result<Self> {
        let s = Self { points, exponents };
        s.validate()?;
        Ok(s)
    }

    pub fn empty() -> Self {
        Self::default()
    }

    fn validate(&self) -> Result<()> {
        if self.points.len() != self.exponents.len() {
            return Err(Error::ExponentCount {
                points: self.points.len(),
                exponents: self.exponents.len(),
            });
        }
        for (i, &x) in self.points.iter().enumerate() {
            if !x.is_finite() {
                return Err(Error::param(format!("point {x} is not finite")));
            }
            if self.points[..i].contains(&x) {
                return Err(Error::DuplicatePoint(Complex64::new(x, 0.0)));
            }
        }
        if let Some(&bad) = self.exponents.iter().find(|e| !e.is_finite() || **e < 0.0) {
            return Err(Error::InvalidExponent(bad));
        }
        Ok(())
    }

    fn common_point(&self, other: &RealPoints) -> Option<f64> {
        self.points.iter().copied().find(|x| other.points.contains(x))
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.points.iter().copied().zip(self.exponents.iter().copied())
    }
}

/// Growth envelope `log|f| <= K * shape(z)` in one of the supported forms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum EnvelopeSpec {
    /// `dist^r(z,E) / ((1-|z|)^p dist^q(z,F))` on the disk.
    Distance {
        p: f64,
        q: f64,
        r: f64,
        e: BoundaryPointSet,
        #[serde(default)]
        f: BoundaryPointSet,
    },
    /// `|z|^gamma prod|z-zeta_j|^{r_j} / ((1-|z|)^p prod|z-xi_k|^{q_k})` on the disk.
    Product {
        p: f64,
        #[serde(default)]
        gamma: f64,
        e: BoundaryPointSet,
        #[serde(default)]
        f: BoundaryPointSet,
    },
    /// As `Distance` with an arbitrary closed set `F` (points and arcs).
    ClosedSet {
        p: f64,
        q: f64,
        r: f64,
        e: BoundaryPointSet,
        #[serde(default)]
        f: CircleClosedSet,
    },
    /// `(1+|w|)^{2b} prod|w-x_j|^{c_j} / ((Im w)^a prod|w-x'_k|^{d_k})` on the upper half-plane.
    HalfPlane {
        a: f64,
        b: f64,
        #[serde(default)]
        c: RealPoints,
        #[serde(default)]
        d: RealPoints,
    },
    /// `(1+|l|)^b prod|l-t_j|^{c_j} / (|l|^r dist^a(l,R+) prod|l-t'_k|^{d_k})` on `C \ [0, inf)`.
    Cut {
        a: f64,
        b: f64,
        r: f64,
        #[serde(default)]
        c: RealPoints,
        #[serde(default)]
        d: RealPoints,
    },
}

fn nonneg(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x >= 0.0 {
        Ok(())
    } else {
        Err(Error::param(format!("{name} must be finite and nonnegative, got {x}")))
    }
}

impl EnvelopeSpec {
    pub fn domain(&self) -> DomainTag {
        match self {
            EnvelopeSpec::HalfPlane { .. } => DomainTag::HalfPlane,
            EnvelopeSpec::Cut { .. } => DomainTag::Cut,
            _ => DomainTag::Disk,
        }
    }

    pub fn form_name(&self) -> &'static str {
        match self {
            EnvelopeSpec::Distance { .. } => "distance",
            EnvelopeSpec::Product { .. } => "product",
            EnvelopeSpec::ClosedSet { .. } => "closed_set",
            EnvelopeSpec::HalfPlane { .. } => "half_plane",
            EnvelopeSpec::Cut { .. } => "cut",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            EnvelopeSpec::Distance { p, q, r, e, f } => {
                nonneg("p", *p)?;
                nonneg("q", *q)?;
                nonneg("r", *r)?;
                if let Some(z) = e.common_point(f) {
                    return Err(Error::SetsIntersect(z));
                }
            }
            EnvelopeSpec::Product { p, gamma, e, f } => {
                nonneg("p", *p)?;
                nonneg("gamma", *gamma)?;
                if let Some(z) = e.common_point(f) {
                    return Err(Error::SetsIntersect(z));
                }
            }
            EnvelopeSpec::ClosedSet { p, q, r, e, f } => {
                nonneg("p", *p)?;
                nonneg("q", *q)?;
                nonneg("r", *r)?;
                if !f.is_empty() {
                    for &z in e.points() {
                        if f.dist(z)? <= UNIT_MODULUS_TOL {
                            return Err(Error::SetsIntersect(z));
                        }
                    }
                }
            }
            EnvelopeSpec::HalfPlane { a, b, c, d } => {
                nonneg("a", *a)?;
                nonneg("b", *b)?;
                c.validate()?;
                d.validate()?;
                if let Some(x) = c.common_point(d) {
                    return Err(Error::SetsIntersect(Complex64::new(x, 0.0)));
                }
            }
            EnvelopeSpec::Cut { a, b, r, c, d } => {
                nonneg("a", *a)?;
                nonneg("b", *b)?;
                if !r.is_finite() {
                    return Err(Error::param("r must be finite"));
                }
                c.validate()?;
                d.validate()?;
                if let Some(&t) = c.points.iter().chain(d.points.iter()).find(|t| !(**t > 0.0)) {
                    return Err(Error::param(format!("cut-plane points must be positive, got {t}")));
                }
                if let Some(x) = c.common_point(d) {
                    return Err(Error::SetsIntersect(Complex64::new(x, 0.0)));
                }
            }
        }
        Ok(())
    }

    /// Boundary points where the envelope degenerates.
    pub fn singular_points(&self) -> Vec<Complex64> {
        match self {
            EnvelopeSpec::Distance { e, f, .. } | EnvelopeSpec::Product { e, f, .. } => {
                e.points().iter().chain(f.points()).copied().collect()
            }
            EnvelopeSpec::ClosedSet { e, f, .. } => e.points().iter().chain(f.isolated_points()).copied().collect(),
            EnvelopeSpec::HalfPlane { c, d, .. } => c
                .points
                .iter()
                .chain(d.points.iter())
                .map(|&x| Complex64::new(x, 0.0))
                .collect(),
            EnvelopeSpec::Cut { c, d, .. } => std::iter::once(0.0)
                .chain(c.points.iter().copied())
                .chain(d.points.iter().copied())
                .map(|x| Complex64::new(x, 0.0))
                .collect(),
        }
    }

    /// Distance from `z` to the singular boundary set of the envelope,
    /// including arcs of a closed set.
    pub(crate) fn singular_distance(&self, z: Complex64) -> f64 {
        let pts = self
            .singular_points()
            .into_iter()
            .map(|s| (z - s).norm())
            .fold(f64::INFINITY, f64::min);
        match self {
            EnvelopeSpec::ClosedSet { f, .. } if !f.is_empty() => pts.min(f.dist(z).unwrap_or(f64::INFINITY)),
            _ => pts,
        }
    }

    /// The envelope shape `Phi(z)` with `log|f(z)| <= K Phi(z)`.
    pub fn shape(&self, z: Complex64) -> f64 {
        let prod = |set: &BoundaryPointSet| -> f64 {
            set.points()
                .iter()
                .enumerate()
                .map(|(i, b)| (z - b).norm().powf(set.exponent(i)))
                .product()
        };
        let dist = |set: &BoundaryPointSet, power: f64| -> f64 {
            if set.is_empty() {
                1.0
            } else {
                set.points()
                    .iter()
                    .map(|b| (z - b).norm())
                    .fold(f64::INFINITY, f64::min)
                    .powf(power)
            }
        };
        let real = |set: &RealPoints| -> f64 { set.iter().map(|(x, c)| (z - x).norm().powf(c)).product() };
        match self {
            EnvelopeSpec::Distance { p, q, r, e, f } => dist(e, *r) / ((1.0 - z.norm()).powf(*p) * dist(f, *q)),
            EnvelopeSpec::Product { p, gamma, e, f } => {
                z.norm().powf(*gamma) * prod(e) / ((1.0 - z.norm()).powf(*p) * prod(f))
            }
            EnvelopeSpec::ClosedSet { p, q, r, e, f } => {
                let df = if f.is_empty() {
                    1.0
                } else {
                    f.dist(z).unwrap_or(1.0).powf(*q)
                };
                dist(e, *r) / ((1.0 - z.norm()).powf(*p) * df)
            }
            EnvelopeSpec::HalfPlane { a, b, c, d } => {
                (1.0 + z.norm()).powf(2.0 * b) * real(c) / (z.im.powf(*a) * real(d))
            }
            EnvelopeSpec::Cut { a, b, r, c, d } => {
                (1.0 + z.norm()).powf(*b) * real(c)
                    / (z.norm().powf(*r) * crate::math::dist_to_positive_ray(z).powf(*a) * real(d))
            }
        }
    }
}

/// Which side of a split a zero was assigned to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    /// `(1-|z|)/|1-z| > |1-z|^beta`
    Tangential,
    /// `(1-|z|)/|1-z| <= |1-z|^beta`
    Normal,
    InsideStolz,
    OutsideStolz,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroTerm {
    pub zero: Complex64,
    pub multiplicity: u32,
    /// Weight times multiplicity.
    pub term: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub region: Option<Region>,
}

fn ser_extended<S: Serializer>(x: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        None => s.serialize_none(),
        Some(v) if v.is_finite() => s.serialize_f64(*v),
        Some(v) if v.is_nan() => s.serialize_str("nan"),
        Some(v) if *v > 0.0 => s.serialize_str("inf"),
        Some(_) => s.serialize_str("-inf"),
    }
}

fn de_extended<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Option<f64>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Num {
        F(f64),
        S(String),
    }
    Ok(match Option::<Num>::deserialize(d)? {
        None => None,
        Some(Num::F(v)) => Some(v),
        Some(Num::S(s)) => Some(match s.as_str() {
            "inf" => f64::INFINITY,
            "-inf" => f64::NEG_INFINITY,
            _ => f64::NAN,
        }),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SumReport {
    pub total: f64,
    pub per_zero: Vec<ZeroTerm>,
    pub k_hat: Option<f64>,
    /// `total / k_hat`; `"inf"` in JSON when `k_hat = 0 < total`.
    #[serde(serialize_with = "ser_extended", deserialize_with = "de_extended")]
    pub ratio: Option<f64>,
    pub epsilon: f64,
    pub params: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub partial_sums: BTreeMap<String, f64>,
}

impl SumReport {
    fn from_terms(per_zero: Vec<ZeroTerm>, epsilon: f64, params: BTreeMap<String, f64>, regions: &[Region]) -> Self {
        let terms: Vec<f64> = per_zero.iter().map(|t| t.term).collect();
        let partial_sums = regions
            .iter()
            .map(|&region| {
                let part: Vec<f64> = per_zero
                    .iter()
                    .filter(|t| t.region == Some(region))
                    .map(|t| t.term)
                    .collect();
                (region_key(region).to_string(), parallel::pairwise_sum(&part))
            })
            .collect();
        Self {
            total: parallel::pairwise_sum(&terms),
            per_zero,
            k_hat: None,
            ratio: None,
            epsilon,
            params,
            partial_sums,
        }
    }

    /// Attaches a growth-constant estimate and the ratio `total / k_hat`.
    pub fn with_k_hat(mut self, k_hat: f64) -> Self {
        self.k_hat = Some(k_hat);
        self.ratio = Some(if k_hat > 0.0 {
            self.total / k_hat
        } else if self.total > 0.0 {
            f64::INFINITY
        } else {
            0.0
        });
        self
    }
}

fn region_key(r: Region) -> &'static str {
    match r {
        Region::Tangential => "tangential",
        Region::Normal => "normal",
        Region::InsideStolz => "inside_stolz",
        Region::OutsideStolz => "outside_stolz",
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SumOptions {
    pub exec: Execution,
    /// With `p = 0`, use `(1-|z|)` instead of `(1-|z|)^{1+eps}`.
    pub p0_sharp: bool,
    /// Accept `eps = 0`; used by sharpness probes, where sums may diverge in `N`.
    pub allow_zero_epsilon: bool,
}

/// Evaluates `weight` at every zero (in `ZeroSet` order) and reduces with a
/// fixed-order pairwise sum.
pub(crate) fn collect_terms<W>(zeros: &ZeroSet, exec: Execution, weight: W) -> Result<Vec<ZeroTerm>>
where
    W: Fn(Complex64) -> Result<(f64, Option<Region>)> + Sync + Send,
{
    let out = parallel::map(exec, zeros.entries(), |e| {
        weight(e.location).map(|(w, region)| ZeroTerm {
            zero: e.location,
            multiplicity: e.multiplicity,
            term: w * e.multiplicity as f64,
            region,
        })
    });
    out.into_iter().collect()
}

pub(crate) fn check_eps(eps: f64, allow_zero: bool) -> Result<()> {
    if eps.is_finite() && (eps > 0.0 || (allow_zero && eps == 0.0)) {
        Ok(())
    } else {
        Err(Error::param(format!("epsilon must be positive, got {eps}")))
    }
}

pub(crate) fn require_disk(z: Complex64) -> Result<()> {
    if z.norm() < 1.0 {
        Ok(())
    } else {
        Err(Error::OutsideDomain(z))
    }
}

pub(crate) fn params<const N: usize>(pairs: [(&str, f64); N]) -> BTreeMap<String, f64> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_conventions() {
        let r = SumReport::from_terms(Vec::new(), 0.1, BTreeMap::new(), &[]).with_k_hat(0.0);
        assert_eq!(r.ratio, Some(0.0));
        let t = ZeroTerm {
            zero: Complex64::new(0.5, 0.0),
            multiplicity: 1,
            term: 0.25,
            region: None,
        };
        let r = SumReport::from_terms(vec![t], 0.1, BTreeMap::new(), &[]).with_k_hat(0.0);
        assert_eq!(r.ratio, Some(f64::INFINITY));
    }

    #[test]
    fn shape_of_cut_envelope() {
        let env = EnvelopeSpec::Cut {
            a: 1.0,
            b: 0.0,
            r: 0.0,
            c: RealPoints::empty(),
            d: RealPoints::empty(),
        };
        env.validate().unwrap();
        assert_eq!(env.shape(Complex64::new(-1.0, 0.0)), 1.0);
        let bad = EnvelopeSpec::Cut {
            a: 1.0,
            b: 0.0,
            r: 0.0,
            c: RealPoints::new(vec![-1.0], vec![1.0]).unwrap(),
            d: RealPoints::empty(),
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn intersecting_sets_rejected() {
        let one = BoundaryPointSet::new(vec![Complex64::new(1.0, 0.0)]).unwrap();
        let env = EnvelopeSpec::Distance {
            p: 1.0,
            q: 1.0,
            r: 1.0,
            e: one.clone(),
            f: one,
        };
        assert!(matches!(env.validate(), Err(Error::SetsIntersect(_))));
    }
}
