//! Test-function construction and certified zero localization.

mod contour;
mod function;
mod locate;

pub use contour::{winding_number, winding_number_detailed, Contour, Rect, Winding};
pub use function::{blaschke_product, envelope_exponential, product, AnalyticFn, EnvelopeKind};
pub use locate::{jensen_residual, locate_zeros, locate_zeros_with, LocateOptions};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DomainTag {
    Disk,
    HalfPlane,
    Cut,
}

impl DomainTag {
    /// Point at which the normalization `|f| = 1` is imposed.
    pub fn anchor(self) -> Complex64 {
        match self {
            DomainTag::Disk => Complex64::new(0.0, 0.0),
            DomainTag::HalfPlane => Complex64::new(0.0, 1.0),
            DomainTag::Cut => Complex64::new(-1.0, 0.0),
        }
    }

    pub fn contains(self, z: Complex64) -> bool {
        match self {
            DomainTag::Disk => z.norm() < 1.0,
            DomainTag::HalfPlane => z.im > 0.0,
            DomainTag::Cut => !(z.im == 0.0 && z.re >= 0.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroRecord {
    pub location: Complex64,
    pub multiplicity: u32,
    /// Every zero counted in `multiplicity` lies within this distance.
    pub radius: f64,
}

/// Zeros sorted lexicographically by `(re, im)`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ZeroSet {
    entries: Vec<ZeroRecord>,
}

fn lex(a: &Complex64, b: &Complex64) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

impl ZeroSet {
    pub fn new(mut entries: Vec<ZeroRecord>) -> Self {
        entries.sort_by(|a, b| lex(&a.location, &b.location));
        Self { entries }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// Exact multiset: repeated points are merged into one entry with radius 0.
    pub fn from_points(points: &[Complex64]) -> Self {
        let mut sorted = points.to_vec();
        sorted.sort_by(lex);
        let mut entries: Vec<ZeroRecord> = Vec::new();
        for z in sorted {
            match entries.last_mut() {
                Some(last) if last.location == z => last.multiplicity += 1,
                _ => entries.push(ZeroRecord {
                    location: z,
                    multiplicity: 1,
                    radius: 0.0,
                }),
            }
        }
        Self { entries }
    }

    pub fn entries(&self) -> &[ZeroRecord] {
        &self.entries
    }

    pub fn iter(&self) -> std::slice::Iter<'_, ZeroRecord> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total_multiplicity(&self) -> u64 {
        self.entries.iter().map(|e| e.multiplicity as u64).sum()
    }

    /// Points repeated according to multiplicity.
    pub fn expanded(&self) -> Vec<Complex64> {
        self.entries
            .iter()
            .flat_map(|e| std::iter::repeat_n(e.location, e.multiplicity as usize))
            .collect()
    }

    pub fn merged(&self, other: &ZeroSet) -> ZeroSet {
        let mut all = self.expanded();
        all.extend(other.expanded());
        let mut out = ZeroSet::from_points(&all);
        // keep certified radii where a location came from a located set
        for e in out.entries.iter_mut() {
            e.radius = self
                .entries
                .iter()
                .chain(other.entries.iter())
                .filter(|r| r.location == e.location)
                .map(|r| r.radius)
                .fold(0.0, f64::max);
        }
        out
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> ZeroSet {
        ZeroSet::new(
            self.entries
                .iter()
                .map(|e| ZeroRecord {
                    location: f(e.location),
                    ..*e
                })
                .collect(),
        )
    }

    pub fn filter(&self, keep: impl Fn(&ZeroRecord) -> bool) -> ZeroSet {
        ZeroSet {
            entries: self.entries.iter().copied().filter(|e| keep(e)).collect(),
        }
    }
}

impl<'a> IntoIterator for &'a ZeroSet {
    type Item = &'a ZeroRecord;
    type IntoIter = std::slice::Iter<'a, ZeroRecord>;

    fn into_iter(self) -> Self::IntoIter {
        self.entries.iter()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnresolvedCell {
    pub cell: Rect,
    pub winding: Option<i64>,
    pub reason: String,
}

/// Partial result of a localization that left cells unresolved.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Unresolved {
    pub partial: ZeroSet,
    pub cells: Vec<UnresolvedCell>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiset_merging() {
        let z = ZeroSet::from_points(&[
            Complex64::new(0.5, 0.0),
            Complex64::new(-0.1, 0.2),
            Complex64::new(0.5, 0.0),
        ]);
        assert_eq!(z.len(), 2);
        assert_eq!(z.total_multiplicity(), 3);
        assert_eq!(z.entries()[0].location.re, -0.1);
        assert_eq!(z.entries()[1].multiplicity, 2);
        let w = z.merged(&ZeroSet::from_points(&[Complex64::new(0.5, 0.0)]));
        assert_eq!(w.entries()[1].multiplicity, 3);
    }

    #[test]
    fn anchors_lie_in_domains() {
        for d in [DomainTag::Disk, DomainTag::HalfPlane, DomainTag::Cut] {
            assert!(d.contains(d.anchor()));
        }
        assert!(!DomainTag::Cut.contains(Complex64::new(0.0, 0.0)));
    }
}
