use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{DomainTag, ZeroSet};
use crate::conformal::{cayley_to_disk, cayley_to_halfplane, cut_to_halfplane};
use crate::error::{Error, Result};
use crate::math::{ppow, UNIT_MODULUS_TOL};

type Map = Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>;
type LogMap = Arc<dyn Fn(Complex64) -> f64 + Send + Sync>;

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// An analytic function on one of the three model domains.
///
/// Cloning is cheap; the closures are reference counted and immutable.
#[derive(Clone)]
pub struct AnalyticFn {
    eval: Map,
    deriv: Option<Map>,
    log_abs: Option<LogMap>,
    known_zeros: Option<ZeroSet>,
    domain: DomainTag,
    singular: Vec<Complex64>,
    /// Disk functions: analytic for `|z| <` this radius (at least 1).
    extension: f64,
}

impl fmt::Debug for AnalyticFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AnalyticFn")
            .field("domain", &self.domain)
            .field("has_derivative", &self.deriv.is_some())
            .field("known_zeros", &self.known_zeros)
            .field("singular", &self.singular)
            .field("extension", &self.extension)
            .finish()
    }
}

impl AnalyticFn {
    pub fn new<F>(domain: DomainTag, eval: F) -> Self
    where
        F: Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    {
        Self {
            eval: Arc::new(eval),
            deriv: None,
            log_abs: None,
            known_zeros: None,
            domain,
            singular: Vec::new(),
            extension: 1.0,
        }
    }

    pub fn constant(value: Complex64, domain: DomainTag) -> Self {
        let mut f = Self::new(domain, move |_| value)
            .with_derivative(|_| Complex64::new(0.0, 0.0))
            .with_log_abs(move |_| value.norm().ln());
        if value != Complex64::new(0.0, 0.0) {
            f.known_zeros = Some(ZeroSet::empty());
        }
        f.extension = f64::INFINITY;
        f
    }

    pub fn with_derivative<F>(mut self, d: F) -> Self
    where
        F: Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    {
        self.deriv = Some(Arc::new(d));
        self
    }

    /// Closed-form `log|f|`, used instead of `ln(|f|)` to avoid overflow.
    pub fn with_log_abs<F>(mut self, g: F) -> Self
    where
        F: Fn(Complex64) -> f64 + Send + Sync + 'static,
    {
        self.log_abs = Some(Arc::new(g));
        self
    }

    pub fn with_known_zeros(mut self, zeros: ZeroSet) -> Self {
        self.known_zeros = Some(zeros);
        self
    }

    /// Drops the known zero set, so that zeros must be located from values.
    pub fn without_known_zeros(mut self) -> Self {
        self.known_zeros = None;
        self
    }

    pub fn with_singular_points(mut self, points: Vec<Complex64>) -> Self {
        self.singular = points;
        self
    }

    /// Declares a disk function analytic on `|z| < radius`, which lets zero
    /// searches use rectangles that poke out of the unit disk.
    pub fn with_extension_radius(mut self, radius: f64) -> Self {
        self.extension = radius.max(1.0);
        self
    }

    pub fn extension_radius(&self) -> f64 {
        self.extension
    }

    pub fn domain(&self) -> DomainTag {
        self.domain
    }

    pub fn known_zeros(&self) -> Option<&ZeroSet> {
        self.known_zeros.as_ref()
    }

    pub fn singular_points(&self) -> &[Complex64] {
        &self.singular
    }

    pub fn has_derivative(&self) -> bool {
        self.deriv.is_some()
    }

    fn check_point(&self, z: Complex64) -> Result<()> {
        if self.singular.iter().any(|&s| (s - z).norm() <= UNIT_MODULUS_TOL) {
            return Err(Error::SingularPoint(z));
        }
        Ok(())
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        self.check_point(z)?;
        let v = (self.eval)(z);
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::NonFinite(z));
        }
        Ok(v)
    }

    /// Raw evaluation without singular-point or finiteness checks.
    #[inline]
    pub fn eval_unchecked(&self, z: Complex64) -> Complex64 {
        (self.eval)(z)
    }

    #[inline]
    pub fn derivative_unchecked(&self, z: Complex64) -> Option<Complex64> {
        self.deriv.as_ref().map(|d| d(z))
    }

    pub fn derivative(&self, z: Complex64) -> Result<Option<Complex64>> {
        self.check_point(z)?;
        Ok(self.derivative_unchecked(z))
    }

    /// `log|f(z)|`; `-inf` at zeros.
    pub fn log_abs(&self, z: Complex64) -> Result<f64> {
        self.check_point(z)?;
        let v = match &self.log_abs {
            Some(g) => g(z),
            None => (self.eval)(z).norm().ln(),
        };
        if v.is_nan() || v == f64::INFINITY {
            return Err(Error::NonFinite(z));
        }
        Ok(v)
    }

    /// Divides by `|f(anchor)|`, so that `|f| = 1` at `0`, `i` or `-1`.
    pub fn normalized(self) -> Result<Self> {
        let anchor = self.domain.anchor();
        let log0 = self.log_abs(anchor)?;
        if log0 == f64::NEG_INFINITY {
            return Err(Error::NormalizeFirst);
        }
        let scale = (-log0).exp();
        let eval = self.eval.clone();
        let mut out = Self {
            eval: Arc::new(move |z| eval(z) * scale),
            deriv: self.deriv.clone().map(|d| -> Map { Arc::new(move |z| d(z) * scale) }),
            log_abs: None,
            known_zeros: self.known_zeros.clone(),
            domain: self.domain,
            singular: self.singular.clone(),
            extension: self.extension,
        };
        if let Some(g) = self.log_abs.clone() {
            out.log_abs = Some(Arc::new(move |z| g(z) - log0));
        }
        Ok(out)
    }

    /// `g(w) = f(z(w))` on the upper half-plane, `z(w) = (w - i)/(w + i)`.
    pub fn to_halfplane(&self) -> Result<Self> {
        if self.domain != DomainTag::Disk {
            return Err(Error::DomainMismatch {
                left: self.domain,
                right: DomainTag::Disk,
            });
        }
        let to_z = |w: Complex64| (w - I) / (w + I);
        let f = self.eval.clone();
        let mut g = Self::new(DomainTag::HalfPlane, move |w| f(to_z(w)));
        if let Some(d) = self.deriv.clone() {
            g.deriv = Some(Arc::new(move |w| d(to_z(w)) * 2.0 * I / ((w + I) * (w + I))));
        }
        if let Some(l) = self.log_abs.clone() {
            g.log_abs = Some(Arc::new(move |w| l(to_z(w))));
        }
        g.known_zeros = self
            .known_zeros
            .as_ref()
            .map(|z| z.map(|a| cayley_to_halfplane(a).unwrap_or(a)));
        g.singular = self
            .singular
            .iter()
            .filter(|&&s| s != ONE)
            .filter_map(|&s| cayley_to_halfplane(s).ok())
            .collect();
        Ok(g)
    }

    /// `h(lambda) = g(i sqrt(-lambda))` on the slit plane, `g` on the half-plane.
    pub fn to_cut(&self) -> Result<Self> {
        if self.domain != DomainTag::HalfPlane {
            return Err(Error::DomainMismatch {
                left: self.domain,
                right: DomainTag::HalfPlane,
            });
        }
        let to_w = |l: Complex64| I * (-l).sqrt();
        let g = self.eval.clone();
        let mut h = Self::new(DomainTag::Cut, move |l| g(to_w(l)));
        if let Some(d) = self.deriv.clone() {
            // dw/dlambda = 1/(2w)
            h.deriv = Some(Arc::new(move |l| {
                let w = to_w(l);
                d(w) / (2.0 * w)
            }));
        }
        if let Some(lg) = self.log_abs.clone() {
            h.log_abs = Some(Arc::new(move |l| lg(to_w(l))));
        }
        h.known_zeros = self.known_zeros.as_ref().map(|z| z.map(|w| w * w));
        h.singular = self.singular.iter().map(|&w| w * w).collect();
        Ok(h)
    }

    /// `g(w) = h(w^2)` on the upper half-plane, `h` on the slit plane.
    pub fn square_pullback(&self) -> Result<Self> {
        if self.domain != DomainTag::Cut {
            return Err(Error::DomainMismatch {
                left: self.domain,
                right: DomainTag::Cut,
            });
        }
        let h = self.eval.clone();
        let mut g = Self::new(DomainTag::HalfPlane, move |w| h(w * w));
        if let Some(d) = self.deriv.clone() {
            g.deriv = Some(Arc::new(move |w| d(w * w) * 2.0 * w));
        }
        if let Some(l) = self.log_abs.clone() {
            g.log_abs = Some(Arc::new(move |w| l(w * w)));
        }
        g.known_zeros = self
            .known_zeros
            .as_ref()
            .map(|z| z.map(|l| cut_to_halfplane(l).unwrap_or(l)));
        g.singular = self.singular.iter().filter_map(|&l| cut_to_halfplane(l).ok()).collect();
        Ok(g)
    }

    /// Back from the half-plane to the disk, `f(z) = g(w(z))`.
    pub fn to_disk(&self) -> Result<Self> {
        if self.domain != DomainTag::HalfPlane {
            return Err(Error::DomainMismatch {
                left: self.domain,
                right: DomainTag::HalfPlane,
            });
        }
        let to_w = |z: Complex64| I * (ONE + z) / (ONE - z);
        let g = self.eval.clone();
        let mut f = Self::new(DomainTag::Disk, move |z| g(to_w(z)));
        if let Some(d) = self.deriv.clone() {
            f.deriv = Some(Arc::new(move |z| d(to_w(z)) * 2.0 * I / ((ONE - z) * (ONE - z))));
        }
        if let Some(l) = self.log_abs.clone() {
            f.log_abs = Some(Arc::new(move |z| l(to_w(z))));
        }
        f.known_zeros = self
            .known_zeros
            .as_ref()
            .map(|z| z.map(|w| cayley_to_disk(w).unwrap_or(w)));
        f.singular = self.singular.iter().filter_map(|&w| cayley_to_disk(w).ok()).collect();
        f.singular.push(ONE);
        Ok(f)
    }
}

/// `prod_k (|a|/a) (a - z)/(1 - conj(a) z)`, with the factor `z` for `a = 0`.
pub fn blaschke_product(zeros: &[Complex64]) -> Result<AnalyticFn> {
    for &a in zeros {
        if !(a.norm() < 1.0) {
            return Err(Error::OutsideDomain(a));
        }
    }
    let known = ZeroSet::from_points(zeros);
    let poles_at = 1.0 / zeros.iter().map(|a| a.norm()).fold(0.0, f64::max);
    let a: Arc<[Complex64]> = zeros.into();

    fn factor(a: Complex64, z: Complex64) -> Complex64 {
        if a == Complex64::new(0.0, 0.0) {
            z
        } else {
            (a.norm() / a) * (a - z) / (ONE - a.conj() * z)
        }
    }
    fn factor_deriv(a: Complex64, z: Complex64) -> Complex64 {
        if a == Complex64::new(0.0, 0.0) {
            ONE
        } else {
            let den = ONE - a.conj() * z;
            -(a.norm() / a) * (1.0 - a.norm_sqr()) / (den * den)
        }
    }

    let ae = a.clone();
    let ad = a.clone();
    let al = a;
    Ok(AnalyticFn::new(DomainTag::Disk, move |z| {
        ae.iter().fold(ONE, |acc, &a| acc * factor(a, z))
    })
    .with_derivative(move |z| {
        // prefix/suffix products avoid dividing by a vanishing factor
        let n = ad.len();
        let vals: Vec<Complex64> = ad.iter().map(|&a| factor(a, z)).collect();
        let mut suffix = vec![ONE; n + 1];
        for k in (0..n).rev() {
            suffix[k] = suffix[k + 1] * vals[k];
        }
        let mut prefix = ONE;
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..n {
            acc += prefix * factor_deriv(ad[k], z) * suffix[k + 1];
            prefix *= vals[k];
        }
        acc
    })
    .with_log_abs(move |z| al.iter().map(|&a| factor(a, z).norm().ln()).sum())
    .with_known_zeros(known)
    .with_extension_radius(poles_at))
}

/// Zero-free test functions `exp(g)` with explicit boundary singularities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EnvelopeKind {
    /// `exp(c (1 + z)/(1 - z))`
    Cayley { c: f64 },
    /// `exp(c / (1 - z)^m)`, `m > 0`
    Pole { c: f64, m: f64 },
    /// `exp(c (z - zeta0)^r / (z - xi0)^q)`
    PowerRatio {
        c: f64,
        zeta0: Complex64,
        xi0: Complex64,
        r: f64,
        q: f64,
    },
}

/// Builds `exp(g)` together with `g'` and `log|f| = Re g`.
pub fn envelope_exponential(kind: EnvelopeKind) -> Result<AnalyticFn> {
    let check = |x: f64, name: &str| {
        if x.is_finite() {
            Ok(())
        } else {
            Err(Error::param(format!("{name} must be finite")))
        }
    };
    let (g, dg, singular): (Map, Map, Vec<Complex64>) = match kind {
        EnvelopeKind::Cayley { c } => {
            check(c, "c")?;
            (
                Arc::new(move |z| (ONE + z) / (ONE - z) * c),
                Arc::new(move |z| 2.0 * c / ((ONE - z) * (ONE - z))),
                vec![ONE],
            )
        }
        EnvelopeKind::Pole { c, m } => {
            check(c, "c")?;
            if !(m > 0.0) || !m.is_finite() {
                return Err(Error::param("pole order m must be positive"));
            }
            (
                Arc::new(move |z| ppow(ONE - z, -m) * c),
                Arc::new(move |z| ppow(ONE - z, -m - 1.0) * (c * m)),
                vec![ONE],
            )
        }
        EnvelopeKind::PowerRatio { c, zeta0, xi0, r, q } => {
            check(c, "c")?;
            check(r, "r")?;
            check(q, "q")?;
            for p in [zeta0, xi0] {
                if (p.norm() - 1.0).abs() > UNIT_MODULUS_TOL {
                    return Err(Error::NotUnitModulus(p));
                }
            }
            if zeta0 == xi0 {
                return Err(Error::SetsIntersect(zeta0));
            }
            // (z - p)^s = (-p)^s (1 - conj(p) z)^s is analytic on the disk
            let lead = ppow(-zeta0, r) / ppow(-xi0, q) * c;
            let (cz, cx) = (zeta0.conj(), xi0.conj());
            let g: Map = Arc::new(move |z| lead * ppow(ONE - cz * z, r) * ppow(ONE - cx * z, -q));
            let g2 = g.clone();
            let dg: Map = Arc::new(move |z| g2(z) * (-r * cz / (ONE - cz * z) + q * cx / (ONE - cx * z)));
            let mut singular = vec![xi0];
            if r < 0.0 {
                singular.push(zeta0);
            }
            (g, dg, singular)
        }
    };
    let (ge, gd, gl) = (g.clone(), g.clone(), g);
    Ok(AnalyticFn::new(DomainTag::Disk, move |z| ge(z).exp())
        .with_derivative(move |z| gd(z).exp() * dg(z))
        .with_log_abs(move |z| gl(z).re)
        .with_known_zeros(ZeroSet::empty())
        .with_singular_points(singular))
}

/// Pointwise product; known zeros are merged when both factors carry them.
pub fn product(f: &AnalyticFn, g: &AnalyticFn) -> Result<AnalyticFn> {
    if f.domain != g.domain {
        return Err(Error::DomainMismatch {
            left: f.domain,
            right: g.domain,
        });
    }
    let (fe, ge) = (f.eval.clone(), g.eval.clone());
    let mut out = AnalyticFn::new(f.domain, move |z| fe(z) * ge(z));
    if let (Some(fd), Some(gd)) = (f.deriv.clone(), g.deriv.clone()) {
        let (fe, ge) = (f.eval.clone(), g.eval.clone());
        out.deriv = Some(Arc::new(move |z| fd(z) * ge(z) + fe(z) * gd(z)));
    }
    let fl = f.log_abs.clone();
    let gl = g.log_abs.clone();
    if fl.is_some() || gl.is_some() {
        let (fe, ge) = (f.eval.clone(), g.eval.clone());
        out.log_abs = Some(Arc::new(move |z| {
            let a = fl.as_ref().map_or_else(|| fe(z).norm().ln(), |l| l(z));
            let b = gl.as_ref().map_or_else(|| ge(z).norm().ln(), |l| l(z));
            a + b
        }));
    }
    out.known_zeros = match (&f.known_zeros, &g.known_zeros) {
        (Some(a), Some(b)) => Some(a.merged(b)),
        _ => None,
    };
    out.extension = f.extension.min(g.extension);
    out.singular = f.singular.clone();
    for &s in &g.singular {
        if !out.singular.contains(&s) {
            out.singular.push(s);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn blaschke_examples() {
        let f = blaschke_product(&[c(0.5, 0.0)]).unwrap();
        assert_eq!(f.eval(c(0.5, 0.0)).unwrap().norm(), 0.0);
        assert_abs_diff_eq!(f.eval(c(0.0, 0.0)).unwrap().norm(), 0.5, epsilon = 1e-15);
        let one = blaschke_product(&[]).unwrap();
        assert_eq!(one.eval(c(0.3, 0.1)).unwrap(), ONE);
        assert!(blaschke_product(&[c(1.0, 0.0)]).is_err());
        let origin = blaschke_product(&[c(0.0, 0.0)]).unwrap();
        assert_eq!(origin.eval(c(0.25, 0.0)).unwrap(), c(0.25, 0.0));
    }

    #[test]
    fn blaschke_bounded_by_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let zeros: Vec<Complex64> = (0..6)
            .map(|_| Complex64::from_polar(rng.random::<f64>() * 0.95, rng.random::<f64>() * 6.3))
            .collect();
        let f = blaschke_product(&zeros).unwrap();
        for _ in 0..5000 {
            let z = Complex64::from_polar(rng.random::<f64>().sqrt(), rng.random::<f64>() * 6.3);
            if z.norm() < 1.0 {
                assert!(f.eval(z).unwrap().norm() <= 1.0 + 1e-12);
            }
        }
        let near = f.eval(Complex64::from_polar(1.0 - 1e-9, 0.4)).unwrap().norm();
        assert!((near - 1.0).abs() < 1e-6);
    }

    #[test]
    fn blaschke_derivative_and_log() {
        let zeros = [c(0.3, 0.0), c(-0.2, 0.4), c(0.3, 0.0), c(0.0, 0.0)];
        let f = blaschke_product(&zeros).unwrap();
        for z in [c(0.1, 0.1), c(-0.5, 0.2), c(0.3, 0.0)] {
            let h = 1e-6;
            let fd = (f.eval(z + h).unwrap() - f.eval(z - h).unwrap()) / (2.0 * h);
            let d = f.derivative(z).unwrap().unwrap();
            assert!((fd - d).norm() < 1e-8);
        }
        let z = c(0.6, -0.3);
        assert_abs_diff_eq!(f.log_abs(z).unwrap(), f.eval(z).unwrap().norm().ln(), epsilon = 1e-13);
        assert_eq!(f.known_zeros().unwrap().total_multiplicity(), 4);
    }

    #[test]
    fn envelope_examples() {
        let f = envelope_exponential(EnvelopeKind::Cayley { c: 1.0 }).unwrap();
        assert_abs_diff_eq!(f.log_abs(c(0.0, 0.0)).unwrap(), 1.0, epsilon = 1e-15);
        for z in [c(0.3, 0.4), c(-0.7, 0.1), c(0.99, 0.0)] {
            let exact = (1.0 - z.norm_sqr()) / (ONE - z).norm_sqr();
            assert_abs_diff_eq!(f.log_abs(z).unwrap(), exact, epsilon = 1e-12 * exact.max(1.0));
        }
        let g = envelope_exponential(EnvelopeKind::Pole { c: 1.0, m: 1.0 }).unwrap();
        assert_abs_diff_eq!(g.log_abs(c(0.9, 0.0)).unwrap(), 10.0, epsilon = 1e-12);
        assert!(matches!(g.eval(ONE), Err(Error::SingularPoint(_))));
        assert!(g.known_zeros().unwrap().is_empty());
    }

    #[test]
    fn power_ratio_branch() {
        let zeta0 = Complex64::from_polar(1.0, 2.0);
        let xi0 = c(1.0, 0.0);
        let f = envelope_exponential(EnvelopeKind::PowerRatio {
            c: 0.5,
            zeta0,
            xi0,
            r: 1.0,
            q: 2.0,
        })
        .unwrap();
        // integer exponents: no branch ambiguity
        let z = c(0.2, 0.3);
        let expect = 0.5 * ((z - zeta0) / ((z - xi0) * (z - xi0))).re;
        assert_abs_diff_eq!(f.log_abs(z).unwrap(), expect, epsilon = 1e-12);
        let h = 1e-6;
        let fd = (f.eval(z + h).unwrap() - f.eval(z - h).unwrap()) / (2.0 * h);
        assert!((fd - f.derivative(z).unwrap().unwrap()).norm() < 1e-7);
        assert!(f.eval(xi0).is_err());
    }

    #[test]
    fn product_merges() {
        let a = blaschke_product(&[c(0.5, 0.0)]).unwrap();
        let b = blaschke_product(&[c(-0.5, 0.0)]).unwrap();
        let one = AnalyticFn::constant(ONE, DomainTag::Disk);
        let p = product(&a, &one).unwrap();
        assert_eq!(p.known_zeros().unwrap().expanded(), vec![c(0.5, 0.0)]);
        let q = product(&a, &b).unwrap();
        assert_eq!(q.known_zeros().unwrap().len(), 2);
        let env = envelope_exponential(EnvelopeKind::Pole { c: 1.0, m: 1.0 }).unwrap();
        let r = product(&q, &env).unwrap();
        assert_eq!(r.known_zeros().unwrap().len(), 2);
        assert_eq!(r.singular_points(), &[ONE]);
        let z = c(0.1, 0.2);
        assert_abs_diff_eq!(r.log_abs(z).unwrap(), r.eval(z).unwrap().norm().ln(), epsilon = 1e-12);
        let h = a.to_halfplane().unwrap();
        assert!(matches!(product(&a, &h), Err(Error::DomainMismatch { .. })));
    }

    #[test]
    fn normalization() {
        let f = blaschke_product(&[c(0.5, 0.0), c(0.0, -0.3)])
            .unwrap()
            .normalized()
            .unwrap();
        assert!((f.eval(c(0.0, 0.0)).unwrap().norm() - 1.0).abs() < 1e-12);
        assert!(f.log_abs(c(0.0, 0.0)).unwrap().abs() < 1e-12);
        let g = blaschke_product(&[c(0.0, 0.0)]).unwrap();
        assert!(matches!(g.normalized(), Err(Error::NormalizeFirst)));
    }

    #[test]
    fn domain_transfers() {
        let f = blaschke_product(&[c(0.5, 0.0), c(0.0, 0.4)]).unwrap();
        let g = f.to_halfplane().unwrap();
        for &w in &g.known_zeros().unwrap().expanded() {
            assert!(w.im > 0.0);
            assert!(g.eval(w).unwrap().norm() < 1e-14);
        }
        let w = c(0.3, 1.7);
        let h = 1e-6;
        let fd = (g.eval(w + h).unwrap() - g.eval(w - h).unwrap()) / (2.0 * h);
        assert!((fd - g.derivative(w).unwrap().unwrap()).norm() < 1e-8);
        let cut = g.to_cut().unwrap();
        for &l in &cut.known_zeros().unwrap().expanded() {
            assert!(cut.eval(l).unwrap().norm() < 1e-13);
        }
        let back = cut.square_pullback().unwrap();
        assert!((back.eval(w).unwrap() - g.eval(w).unwrap()).norm() < 1e-13);
        let disk = g.to_disk().unwrap();
        let z = c(0.2, -0.1);
        assert!((disk.eval(z).unwrap() - f.eval(z).unwrap()).norm() < 1e-13);
    }
}
