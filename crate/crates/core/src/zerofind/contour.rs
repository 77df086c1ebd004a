use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::AnalyticFn;
use crate::error::{Error, Result};

/// Axis-parallel rectangle `[min.re, max.re] x [min.im, max.im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub min: Complex64,
    pub max: Complex64,
}

impl Rect {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Self {
            min: Complex64::new(x0.min(x1), y0.min(y1)),
            max: Complex64::new(x0.max(x1), y0.max(y1)),
        }
    }

    pub fn square(center: Complex64, half: f64) -> Self {
        Self::new(center.re - half, center.re + half, center.im - half, center.im + half)
    }

    pub fn width(&self) -> f64 {
        self.max.re - self.min.re
    }

    pub fn height(&self) -> f64 {
        self.max.im - self.min.im
    }

    pub fn diameter(&self) -> f64 {
        self.width().hypot(self.height())
    }

    pub fn center(&self) -> Complex64 {
        (self.min + self.max) * 0.5
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re >= self.min.re && z.re <= self.max.re && z.im >= self.min.im && z.im <= self.max.im
    }

    pub fn contains_disk(&self, c: Complex64, r: f64) -> bool {
        c.re - r > self.min.re && c.re + r < self.max.re && c.im - r > self.min.im && c.im + r < self.max.im
    }

    pub fn expanded(&self, d: f64) -> Self {
        Self {
            min: self.min - Complex64::new(d, d),
            max: self.max + Complex64::new(d, d),
        }
    }

    /// Four children sharing the corner `at`, ordered SW, SE, NW, NE.
    pub fn split(&self, at: Complex64) -> [Rect; 4] {
        [
            Rect::new(self.min.re, at.re, self.min.im, at.im),
            Rect::new(at.re, self.max.re, self.min.im, at.im),
            Rect::new(self.min.re, at.re, at.im, self.max.im),
            Rect::new(at.re, self.max.re, at.im, self.max.im),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Contour {
    Circle { center: Complex64, radius: f64 },
    Rectangle(Rect),
}

impl Contour {
    pub fn circle(center: Complex64, radius: f64) -> Self {
        Contour::Circle { center, radius }
    }

    /// Quadrature nodes `z_k` and weights `dz_k`, in order along the
    /// positively oriented contour.
    fn nodes(&self, n: usize) -> Vec<(Complex64, Complex64)> {
        match *self {
            Contour::Circle { center, radius } => (0..n)
                .map(|k| {
                    let e = Complex64::from_polar(1.0, TAU * k as f64 / n as f64);
                    (
                        center + e * radius,
                        Complex64::new(0.0, 1.0) * e * radius * (TAU / n as f64),
                    )
                })
                .collect(),
            Contour::Rectangle(r) => {
                let corners = [
                    r.min,
                    Complex64::new(r.max.re, r.min.im),
                    r.max,
                    Complex64::new(r.min.re, r.max.im),
                ];
                let panels = (n / 32).max(1);
                let mut out = Vec::with_capacity(4 * panels * GL_NODES.len());
                for e in 0..4 {
                    let (a, b) = (corners[e], corners[(e + 1) % 4]);
                    let h = (b - a) / panels as f64;
                    for p in 0..panels {
                        let mid = a + h * (p as f64 + 0.5);
                        for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS.iter()) {
                            out.push((mid + h * (0.5 * x), h * (0.5 * w)));
                        }
                    }
                }
                out
            }
        }
    }

    fn min_points(&self) -> usize {
        match self {
            Contour::Circle { .. } => 16,
            Contour::Rectangle(_) => 32,
        }
    }
}

const GL_NODES: [f64; 8] = [
    -0.960_289_856_497_536_2,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_2,
];
const GL_WEIGHTS: [f64; 8] = [
    0.101_228_536_290_376_3,
    0.222_381_034_453_374_5,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362,
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// Relative level below which `|f|` on the contour counts as a zero hit.
pub(crate) const NEAR_ZERO_REL: f64 = 1e-13;
pub(crate) const MAX_POINTS: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Winding {
    pub count: i64,
    /// Raw quadrature value of `(1/2 pi i) \oint f'/f`.
    pub value: Complex64,
    /// Distance of `value` from `count`.
    pub residual: f64,
    pub n_points: usize,
}

fn quadrature(f: &AnalyticFn, contour: &Contour, n: usize) -> Result<(Complex64, f64)> {
    let nodes = contour.nodes(n);
    let mut values = Vec::with_capacity(nodes.len());
    let (mut lo, mut hi) = (f64::INFINITY, 0.0_f64);
    for &(z, _) in &nodes {
        let v = f.eval(z)?;
        let a = v.norm();
        lo = lo.min(a);
        hi = hi.max(a);
        values.push(v);
    }
    if lo == 0.0 || lo < NEAR_ZERO_REL * hi {
        return Err(Error::ZeroNearContour { min_abs: lo });
    }
    if f.has_derivative() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (&(z, dz), &v) in nodes.iter().zip(values.iter()) {
            let d = f.derivative_unchecked(z).unwrap_or_default();
            acc += d / v * dz;
        }
        let value = acc / Complex64::new(0.0, TAU);
        Ok((value, (value - value.re.round()).norm()))
    } else {
        // phase increments along the ordered samples
        let mut total = 0.0;
        let mut worst = 0.0_f64;
        for k in 0..values.len() {
            let step = (values[(k + 1) % values.len()] / values[k]).arg();
            worst = worst.max(step.abs());
            total += step;
        }
        let value = Complex64::new(total / TAU, 0.0);
        let residual = if worst > PI / 3.0 {
            0.5
        } else {
            (value.re - value.re.round()).abs()
        };
        Ok((value, residual))
    }
}

/// Argument-principle count with adaptive doubling of `n_points`.
pub fn winding_number_detailed(f: &AnalyticFn, contour: &Contour, n_points: usize) -> Result<Winding> {
    if let Contour::Circle { radius, .. } = contour {
        if !(*radius > 0.0) {
            return Err(Error::param("circle radius must be positive"));
        }
    }
    let mut n = n_points.max(contour.min_points()).next_power_of_two();
    let mut prev: Option<i64> = None;
    loop {
        let (value, residual) = quadrature(f, contour, n)?;
        let count = value.re.round() as i64;
        let stable = prev == Some(count);
        if residual < 1e-6 || (residual < 1e-3 && stable) || (n >= MAX_POINTS && residual <= 0.25) {
            return Ok(Winding {
                count,
                value,
                residual,
                n_points: n,
            });
        }
        if n >= MAX_POINTS {
            return Err(Error::QuadratureUnresolved { residual, n_points: n });
        }
        prev = (residual < 1e-3).then_some(count);
        n *= 2;
    }
}

pub fn winding_number(f: &AnalyticFn, contour: &Contour, n_points: usize) -> Result<i64> {
    winding_number_detailed(f, contour, n_points).map(|w| w.count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zerofind::{blaschke_product, envelope_exponential, DomainTag, EnvelopeKind};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn monomial_square() {
        let f = AnalyticFn::new(DomainTag::Disk, |z| z * z).with_derivative(|z| z * 2.0);
        assert_eq!(winding_number(&f, &Contour::circle(c(0.0, 0.0), 1.0), 256).unwrap(), 2);
        let g = AnalyticFn::new(DomainTag::Disk, |z| z * z);
        assert_eq!(winding_number(&g, &Contour::circle(c(0.0, 0.0), 1.0), 256).unwrap(), 2);
    }

    #[test]
    fn blaschke_counts() {
        let f = blaschke_product(&[c(0.3, 0.0), c(-0.2, 0.0), c(0.0, 0.5)]).unwrap();
        assert_eq!(winding_number(&f, &Contour::circle(c(0.0, 0.0), 0.9), 64).unwrap(), 3);
        let g = blaschke_product(&[c(0.5, 0.0)]).unwrap();
        assert_eq!(winding_number(&g, &Contour::circle(c(0.0, 0.0), 0.3), 64).unwrap(), 0);
        let h = blaschke_product(&[c(0.5, 0.0), c(0.5, 0.0)]).unwrap();
        assert_eq!(winding_number(&h, &Contour::circle(c(0.5, 0.0), 0.1), 64).unwrap(), 2);
    }

    #[test]
    fn rectangles_agree_with_circles() {
        let f = blaschke_product(&[c(0.3, 0.1), c(-0.4, -0.2), c(0.1, 0.6)]).unwrap();
        let r = Rect::new(-0.5, 0.5, -0.5, 0.5);
        assert_eq!(winding_number(&f, &Contour::Rectangle(r), 64).unwrap(), 2);
        let split: i64 = r
            .split(c(0.05, 0.03))
            .iter()
            .map(|q| winding_number(&f, &Contour::Rectangle(*q), 64).unwrap())
            .sum();
        assert_eq!(split, 2);
    }

    #[test]
    fn zero_on_contour_is_reported() {
        let f = blaschke_product(&[c(0.5, 0.0)]).unwrap();
        let err = winding_number(&f, &Contour::circle(c(0.0, 0.0), 0.5), 64).unwrap_err();
        assert!(matches!(err, Error::ZeroNearContour { .. }));
    }

    #[test]
    fn exponentials_have_no_zeros() {
        let f = envelope_exponential(EnvelopeKind::Pole { c: 1.0, m: 1.0 }).unwrap();
        assert_eq!(winding_number(&f, &Contour::circle(c(0.0, 0.0), 0.8), 64).unwrap(), 0);
    }
}
