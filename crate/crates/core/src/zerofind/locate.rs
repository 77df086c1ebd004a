use std::f64::consts::{SQRT_2, TAU};

use num_complex::Complex64;

use super::contour::{winding_number_detailed, Contour, Rect};
use super::{AnalyticFn, DomainTag, Unresolved, UnresolvedCell, ZeroRecord, ZeroSet};
use crate::error::{Error, Result};
use crate::parallel::{self, Execution};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocateOptions {
    pub tol: f64,
    pub max_depth: usize,
    /// Initial quadrature size per contour; doubled on demand.
    pub n_points: usize,
    /// Cells with a larger winding are never certified.
    pub max_multiplicity: i64,
    pub exec: Execution,
}

impl LocateOptions {
    pub fn new(tol: f64, max_depth: usize) -> Self {
        Self {
            tol,
            max_depth,
            n_points: 64,
            max_multiplicity: 8,
            exec: Execution::default(),
        }
    }

    pub fn with_execution(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }
}

const MAX_NEWTON: usize = 60;

// split-point offsets in units of cell size / 16
const PERTURB: [(f64, f64); 8] = [
    (0.0, 0.0),
    (1.0, 0.5),
    (-1.0, -0.5),
    (0.5, -1.0),
    (-0.5, 1.0),
    (1.5, 1.5),
    (-1.5, 1.0),
    (1.0, -1.5),
];

#[derive(Default)]
struct Outcome {
    zeros: Vec<ZeroRecord>,
    unresolved: Vec<UnresolvedCell>,
}

impl Outcome {
    fn zero(r: ZeroRecord) -> Self {
        Self {
            zeros: vec![r],
            unresolved: Vec::new(),
        }
    }

    fn unresolved(cell: Rect, winding: Option<i64>, reason: &str) -> Self {
        Self {
            zeros: Vec::new(),
            unresolved: vec![UnresolvedCell {
                cell,
                winding,
                reason: reason.to_string(),
            }],
        }
    }

    fn absorb(&mut self, other: Outcome) {
        self.zeros.extend(other.zeros);
        self.unresolved.extend(other.unresolved);
    }
}

fn rect_in_domain(domain: DomainTag, extension: f64, r: &Rect) -> std::result::Result<(), Complex64> {
    let corners = [
        r.min,
        r.max,
        Complex64::new(r.min.re, r.max.im),
        Complex64::new(r.max.re, r.min.im),
    ];
    match domain {
        DomainTag::Disk => match corners.iter().find(|c| c.norm() >= extension) {
            Some(&c) => Err(c),
            None => Ok(()),
        },
        DomainTag::HalfPlane => {
            if r.min.im > 0.0 {
                Ok(())
            } else {
                Err(r.min)
            }
        }
        DomainTag::Cut => {
            if r.min.im <= 0.0 && r.max.im >= 0.0 && r.max.re >= 0.0 {
                Err(Complex64::new(r.max.re.max(0.0), 0.0))
            } else {
                Ok(())
            }
        }
    }
}

fn cell_winding(f: &AnalyticFn, cell: &Rect, opts: &LocateOptions) -> Result<i64> {
    winding_number_detailed(f, &Contour::Rectangle(*cell), opts.n_points).map(|w| w.count)
}

/// Newton (modified by the multiplicity) from the cell centre, certified by
/// the winding number of a circle of radius `tol / 2` inside the cell.
fn try_newton(f: &AnalyticFn, cell: &Rect, w: i64, opts: &LocateOptions) -> Option<ZeroRecord> {
    if !f.has_derivative() {
        return None;
    }
    let m = w as f64;
    let mut z = cell.center();
    let mut converged = false;
    for _ in 0..MAX_NEWTON {
        let v = f.eval_unchecked(z);
        if v.norm() == 0.0 {
            converged = true;
            break;
        }
        let d = f.derivative_unchecked(z)?;
        let step = v / d * m;
        if !(step.re.is_finite() && step.im.is_finite()) {
            return None;
        }
        z -= step;
        if !cell.contains(z) {
            return None;
        }
        if step.norm() <= 1e-3 * opts.tol {
            converged = true;
            break;
        }
    }
    let radius = 0.5 * opts.tol;
    if !converged || !cell.contains_disk(z, radius) {
        return None;
    }
    match winding_number_detailed(f, &Contour::circle(z, radius), opts.n_points) {
        Ok(c) if c.count == w => Some(ZeroRecord {
            location: z,
            multiplicity: w as u32,
            radius,
        }),
        _ => None,
    }
}

fn split_cell(f: &AnalyticFn, cell: &Rect, w: i64, opts: &LocateOptions) -> Option<[(Rect, i64); 4]> {
    let base = cell.center();
    'shift: for (sx, sy) in PERTURB {
        let at = base + Complex64::new(sx * cell.width() / 16.0, sy * cell.height() / 16.0);
        let children = cell.split(at);
        let mut out = [(children[0], 0); 4];
        let mut total = 0;
        for (slot, child) in out.iter_mut().zip(children) {
            match cell_winding(f, &child, opts) {
                Ok(c) if c >= 0 => {
                    *slot = (child, c);
                    total += c;
                }
                _ => continue 'shift,
            }
        }
        if total == w {
            return Some(out);
        }
    }
    None
}

fn resolve(f: &AnalyticFn, cell: Rect, w: i64, depth: usize, opts: &LocateOptions) -> Outcome {
    if w == 0 {
        return Outcome::default();
    }
    let capped = w > opts.max_multiplicity;
    if !capped {
        if let Some(rec) = try_newton(f, &cell, w, opts) {
            return Outcome::zero(rec);
        }
    }
    if cell.diameter() < opts.tol {
        if capped {
            return Outcome::unresolved(cell, Some(w), "winding exceeds multiplicity cap");
        }
        return Outcome::zero(ZeroRecord {
            location: cell.center(),
            multiplicity: w as u32,
            radius: 0.5 * cell.diameter(),
        });
    }
    if depth >= opts.max_depth {
        return Outcome::unresolved(cell, Some(w), "maximum depth reached");
    }
    let Some(children) = split_cell(f, &cell, w, opts) else {
        return Outcome::unresolved(cell, Some(w), "no admissible split");
    };
    let go = |k: usize| resolve(f, children[k].0, children[k].1, depth + 1, opts);
    let ((a, b), (c, d)) = parallel::join(
        opts.exec,
        || parallel::join(opts.exec, || go(0), || go(1)),
        || parallel::join(opts.exec, || go(2), || go(3)),
    );
    let mut out = a;
    out.absorb(b);
    out.absorb(c);
    out.absorb(d);
    out
}

/// Certified zeros of `f` in `region` by quadrisection with argument-principle
/// counts. Output is sorted by `(re, im)`, independent of scheduling.
pub fn locate_zeros(f: &AnalyticFn, region: Rect, tol: f64, max_depth: usize) -> Result<ZeroSet> {
    locate_zeros_with(f, region, &LocateOptions::new(tol, max_depth))
}

pub fn locate_zeros_with(f: &AnalyticFn, region: Rect, opts: &LocateOptions) -> Result<ZeroSet> {
    if !(opts.tol > 0.0) || !opts.tol.is_finite() {
        return Err(Error::param("tol must be positive"));
    }
    if !(region.width() > 0.0 && region.height() > 0.0) {
        return Err(Error::param("region must have positive area"));
    }
    rect_in_domain(f.domain(), f.extension_radius(), &region).map_err(Error::OutsideDomain)?;

    let mut top = None;
    let mut last_err = None;
    for k in 0..PERTURB.len() {
        let cell = region.expanded(opts.tol / 16.0 * k as f64);
        if rect_in_domain(f.domain(), f.extension_radius(), &cell).is_err() {
            break;
        }
        match cell_winding(f, &cell, opts) {
            Ok(w) => {
                top = Some((cell, w));
                break;
            }
            Err(e @ Error::ZeroNearContour { .. }) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    let Some((cell, w)) = top else {
        return Err(last_err.unwrap_or(Error::ZeroNearContour { min_abs: 0.0 }));
    };
    if w < 0 {
        return Err(Error::param("negative winding: f has poles in the region"));
    }
    let out = resolve(f, cell, w, 0, opts);
    let zeros = ZeroSet::new(out.zeros);
    if out.unresolved.is_empty() {
        Ok(zeros)
    } else {
        Err(Error::Unresolved(Box::new(Unresolved {
            partial: zeros,
            cells: out.unresolved,
        })))
    }
}

/// Zeros in `|z| < radius` from squares that stay inside the unit disk,
/// checked against the winding number of the circle itself.
fn zeros_in_disk(f: &AnalyticFn, radius: f64, opts: &LocateOptions) -> Result<ZeroSet> {
    let expected = winding_number_detailed(f, &Contour::circle(Complex64::new(0.0, 0.0), radius), 256)?.count;
    let side = (1.0 - radius) / 2.0;
    let offset = 0.123_456_7 * side;
    let n = ((radius + offset) / side).ceil() as i64 + 1;
    let cells: Vec<Rect> = (-n..=n)
        .flat_map(|i| (-n..=n).map(move |j| (i, j)))
        .map(|(i, j)| {
            let x0 = i as f64 * side + offset;
            let y0 = j as f64 * side + offset;
            Rect::new(x0, x0 + side, y0, y0 + side)
        })
        .filter(|r| {
            let dx = 0.0f64.clamp(r.min.re, r.max.re);
            let dy = 0.0f64.clamp(r.min.im, r.max.im);
            dx.hypot(dy) < radius
        })
        .collect();
    let mut all = Vec::new();
    for r in cells {
        rect_in_domain(DomainTag::Disk, 1.0, &r.expanded(side * SQRT_2 / 64.0)).map_err(Error::OutsideDomain)?;
        let z = locate_zeros_with(f, r, opts)?;
        all.extend(z.entries().iter().copied().filter(|e| e.location.norm() < radius));
    }
    let found = ZeroSet::new(all);
    if found.total_multiplicity() as i64 != expected {
        return Err(Error::param(format!(
            "located {} zeros in |z| < {radius}, winding number says {expected}",
            found.total_multiplicity()
        )));
    }
    Ok(found)
}

/// `(1/2 pi) \int log|f(r e^{it})| dt - log|f(0)| - sum_{|a| < r} log(r/|a|)`.
pub fn jensen_residual(f: &AnalyticFn, r: f64, n_theta: usize) -> Result<f64> {
    if f.domain() != DomainTag::Disk {
        return Err(Error::DomainMismatch {
            left: f.domain(),
            right: DomainTag::Disk,
        });
    }
    if !(r > 0.0 && r < 1.0) || n_theta == 0 {
        return Err(Error::param("need 0 < r < 1 and n_theta > 0"));
    }
    let log0 = f.log_abs(Complex64::new(0.0, 0.0))?;
    if log0 == f64::NEG_INFINITY {
        return Err(Error::NormalizeFirst);
    }
    let zeros = match f.known_zeros() {
        Some(z) => z.clone(),
        None => zeros_in_disk(f, r, &LocateOptions::new(1e-10, 60))?,
    };
    let mut zero_sum = 0.0;
    for e in &zeros {
        let a = e.location.norm();
        if (a - r).abs() <= e.radius.max(1e-12) {
            return Err(Error::ZeroOnCircle(r));
        }
        if a < r {
            zero_sum += e.multiplicity as f64 * (r / a).ln();
        }
    }
    let logs = parallel::map_indexed(Execution::default(), n_theta, |k| {
        f.log_abs(Complex64::from_polar(r, TAU * k as f64 / n_theta as f64))
    });
    let mut vals = Vec::with_capacity(n_theta);
    for v in logs {
        let v = v?;
        if v == f64::NEG_INFINITY {
            return Err(Error::ZeroOnCircle(r));
        }
        vals.push(v);
    }
    let mean = parallel::pairwise_sum(&vals) / n_theta as f64;
    Ok(mean - log0 - zero_sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zerofind::{blaschke_product, envelope_exponential, product, EnvelopeKind};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn square() -> Rect {
        Rect::new(-0.9, 0.9, -0.9, 0.9)
    }

    #[test]
    fn two_simple_zeros() {
        let f = blaschke_product(&[c(0.5, 0.0), c(0.0, 0.5)])
            .unwrap()
            .without_known_zeros();
        let z = locate_zeros(&f, square(), 1e-8, 40).unwrap();
        assert_eq!(z.len(), 2);
        assert!((z.entries()[0].location - c(0.0, 0.5)).norm() < 1e-8);
        assert!((z.entries()[1].location - c(0.5, 0.0)).norm() < 1e-8);
        assert!(z.iter().all(|e| e.multiplicity == 1));
    }

    #[test]
    fn double_zero() {
        let f = blaschke_product(&[c(0.5, 0.0), c(0.5, 0.0)]).unwrap();
        let z = locate_zeros(&f, Rect::new(-0.7, 0.7, -0.7, 0.7), 1e-8, 40).unwrap();
        assert_eq!(z.len(), 1);
        assert_eq!(z.entries()[0].multiplicity, 2);
        assert!((z.entries()[0].location - c(0.5, 0.0)).norm() < 1e-8);
    }

    #[test]
    fn exponential_has_none() {
        let f = envelope_exponential(EnvelopeKind::Cayley { c: 1.0 }).unwrap();
        assert!(locate_zeros(&f, Rect::new(-0.6, 0.6, -0.6, 0.6), 1e-8, 40)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn without_derivative_bisects() {
        let f = AnalyticFn::new(DomainTag::Disk, |z| (z - c(0.1, 0.2)) * (z + c(0.3, 0.0)));
        let z = locate_zeros(&f, Rect::new(-0.5, 0.5, -0.5, 0.5), 1e-6, 40).unwrap();
        assert_eq!(z.len(), 2);
        for e in &z {
            assert!(e.radius < 1e-6);
        }
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let f = blaschke_product(&[c(0.3, 0.2), c(-0.1, -0.4), c(0.6, -0.1), c(-0.5, 0.5)]).unwrap();
        let a = locate_zeros_with(
            &f,
            square().expanded(-0.2),
            &LocateOptions::new(1e-9, 40).with_execution(Execution::Sequential),
        )
        .unwrap();
        let b = locate_zeros_with(
            &f,
            square().expanded(-0.2),
            &LocateOptions::new(1e-9, 40).with_execution(Execution::Parallel),
        )
        .unwrap();
        assert_eq!(a, b);
        assert_eq!(a.total_multiplicity(), 4);
    }

    #[test]
    fn multiplicity_cap_reports_unresolved() {
        let f = blaschke_product(&[c(0.25, 0.125); 9]).unwrap();
        match locate_zeros(&f, Rect::new(-0.5, 0.5, -0.5, 0.5), 1e-6, 40) {
            Err(Error::Unresolved(u)) => {
                assert!(u.partial.is_empty());
                assert_eq!(u.cells[0].winding, Some(9));
            }
            other => panic!("expected unresolved, got {other:?}"),
        }
    }

    #[test]
    fn region_outside_domain() {
        // poles of this product sit at |z| = 2, corners of the square at 2 sqrt 2
        let f = blaschke_product(&[c(0.5, 0.0)]).unwrap();
        assert!(matches!(
            locate_zeros(&f, Rect::new(-2.0, 2.0, -2.0, 2.0), 1e-8, 40),
            Err(Error::OutsideDomain(_))
        ));
        let pole = envelope_exponential(EnvelopeKind::Pole { c: 1.0, m: 1.0 }).unwrap();
        let g = product(&f, &pole).unwrap();
        assert!(matches!(
            locate_zeros(&g, square(), 1e-8, 40),
            Err(Error::OutsideDomain(_))
        ));
    }

    #[test]
    fn jensen_examples() {
        let f = blaschke_product(&[c(0.5, 0.0)]).unwrap();
        assert!(jensen_residual(&f, 0.9, 4096).unwrap().abs() < 1e-6);
        let one = AnalyticFn::constant(c(1.0, 0.0), DomainTag::Disk);
        assert_eq!(jensen_residual(&one, 0.5, 64).unwrap(), 0.0);
        let e = envelope_exponential(EnvelopeKind::Cayley { c: 1.0 }).unwrap();
        assert!(jensen_residual(&e, 0.5, 4096).unwrap().abs() < 1e-6);
        let z = blaschke_product(&[c(0.0, 0.0)]).unwrap();
        assert!(matches!(jensen_residual(&z, 0.5, 64), Err(Error::NormalizeFirst)));
        assert!(matches!(jensen_residual(&f, 0.5, 64), Err(Error::ZeroOnCircle(_))));
    }

    #[test]
    fn jensen_converges_with_resolution() {
        let f = blaschke_product(&[c(0.5, 0.3), c(-0.7, 0.1)]).unwrap();
        let mut prev = f64::INFINITY;
        for n in [8, 16, 32, 64] {
            let r = jensen_residual(&f, 0.9, n).unwrap().abs();
            assert!(r <= prev);
            prev = r;
        }
    }

    #[test]
    fn jensen_with_located_zeros() {
        let f = blaschke_product(&[c(0.5, 0.3), c(-0.2, -0.6)]).unwrap();
        let g = AnalyticFn::new(DomainTag::Disk, {
            let f = f.clone();
            move |z| f.eval_unchecked(z)
        })
        .with_derivative({
            let f = f.clone();
            move |z| f.derivative_unchecked(z).unwrap()
        });
        assert!(jensen_residual(&g, 0.9, 4096).unwrap().abs() < 1e-6);
        let env = envelope_exponential(EnvelopeKind::Pole { c: 0.5, m: 1.0 }).unwrap();
        let p = product(&f, &env).unwrap();
        assert!(jensen_residual(&p, 0.8, 4096).unwrap().abs() < 1e-6);
    }
}
