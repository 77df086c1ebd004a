//! Invariant suites shared by `selftest` and the acceptance tests.
//!
//! Each suite is deterministic given its seed and returns a one-line verdict.

use std::time::{Duration, Instant};

use blaschke_core::conformal::{
    cayley_to_halfplane, check_pommerenke, cut_dist_inequality, halfplane_comparisons, phi_a_prime_abs,
    stolz_boundary_distance, MapSample, StolzAngle, StolzMap,
};
use blaschke_core::math::BoundaryPointSet;
use blaschke_core::sums::{
    beta_k, corollary_sum, cut_params_s, halfplane_params_l1, two_region_sum, verify_theorem, Condition, EnvelopeSpec,
    Instance, SumOptions, TraceRow, VerifyOptions,
};
use blaschke_core::zerofind::{
    blaschke_product, envelope_exponential, jensen_residual, locate_zeros_with, product, winding_number, Contour,
    EnvelopeKind, LocateOptions, Rect, ZeroSet,
};
use blaschke_core::{Complex64, Execution};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Seed used by `selftest` when none is given.
pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Debug, Clone, Serialize)]
pub struct SuiteResult {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl SuiteResult {
    pub fn line(&self) -> String {
        format!(
            "{:<22} {}  {}",
            self.name,
            if self.pass { "PASS" } else { "FAIL" },
            self.detail
        )
    }
}

fn timed(name: &'static str, body: impl FnOnce() -> (bool, String)) -> SuiteResult {
    let t = Instant::now();
    let (pass, detail) = body();
    SuiteResult {
        name,
        pass,
        detail,
        elapsed: t.elapsed(),
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn disk_point(rng: &mut ChaCha8Rng, radius: f64) -> Complex64 {
    Complex64::from_polar(
        radius * rng.random::<f64>().sqrt(),
        std::f64::consts::TAU * rng.random::<f64>(),
    )
}

/// `lower < |phi_A'(z)| / |z-1|^{alpha-1} < upper` on `samples` points of
/// `S_A` within `1/16` of the vertex, for each aperture.
pub fn distortion(apertures: &[f64], samples: usize, lower: f64, upper: f64) -> SuiteResult {
    timed("distortion_window", || {
        let (mut lo, mut hi) = (f64::INFINITY, 0.0_f64);
        let mut bad = 0usize;
        for &a in apertures {
            let angle = match StolzAngle::at_one(a) {
                Ok(x) => x,
                Err(e) => return (false, format!("A = {a}: {e}")),
            };
            let alpha = angle.exponent();
            for z in angle.vertex_samples(samples, 1.0 / 16.0) {
                let d = match phi_a_prime_abs(z, a) {
                    Ok(d) => d,
                    Err(e) => return (false, format!("A = {a}, z = {z}: {e}")),
                };
                let ratio = d / (z - c(1.0, 0.0)).norm().powf(alpha - 1.0);
                lo = lo.min(ratio);
                hi = hi.max(ratio);
                if !(ratio > lower && ratio < upper) {
                    bad += 1;
                }
            }
        }
        (
            bad == 0,
            format!("window ({lower}, {upper}), observed [{lo:.4}, {hi:.4}], {bad} violations"),
        )
    })
}

/// Identity map on the disk and `phi_A` on `S_A` against `d|phi'|/2 <= 1-|phi| <= 4 d|phi'|`.
pub fn pommerenke(aperture: f64, samples: usize) -> SuiteResult {
    timed("pommerenke_sandwich", || {
        let ident: Vec<MapSample> = (0..samples)
            .map(|k| {
                let z = Complex64::from_polar(0.95 * ((k as f64 + 0.5) / samples as f64).sqrt(), 2.399_963 * k as f64);
                MapSample {
                    input: z,
                    output: z,
                    derivative_abs: 1.0,
                }
            })
            .collect();
        let id = check_pommerenke(&ident, |z| 1.0 - z.norm());
        let map = match StolzMap::with_aperture(aperture) {
            Ok(m) => m,
            Err(e) => return (false, e.to_string()),
        };
        let pts = map.angle().interior_samples(samples);
        let mut mapped = Vec::with_capacity(pts.len());
        for z in pts {
            match map.sample(z) {
                Ok(s) => mapped.push(s),
                Err(e) => return (false, format!("z = {z}: {e}")),
            }
        }
        let mut dists = Vec::with_capacity(mapped.len());
        for s in &mapped {
            match map.boundary_distance(s.input) {
                Ok(d) => dists.push(d),
                Err(e) => return (false, format!("z = {}: {e}", s.input)),
            }
        }
        let lookup = |z: Complex64| mapped.iter().position(|s| s.input == z).map_or(f64::NAN, |i| dists[i]);
        let rep = check_pommerenke(&mapped, lookup);
        let worst_lower = rep.samples.iter().map(|s| s.lower_factor).fold(0.0, f64::max);
        let worst_upper = rep.samples.iter().map(|s| s.upper_factor).fold(f64::INFINITY, f64::min);
        (
            id.pass && rep.pass,
            format!(
                "identity {}, phi_A (A = {aperture}, {samples} samples) max lower factor {worst_lower:.4}, min upper factor {worst_upper:.4}",
                if id.pass { "exact" } else { "violated" }
            ),
        )
    })
}

/// `factor (1-|z|) <= dist(z, boundary of S_B) < 1-|z|` for seeded `z` in `S_A`.
pub fn nesting(a: f64, b: f64, factor: f64, samples: usize, seed: u64) -> SuiteResult {
    timed("stolz_nesting", || {
        let (sa, sb) = match (StolzAngle::at_one(a), StolzAngle::at_one(b)) {
            (Ok(x), Ok(y)) => (x, y),
            _ => return (false, "invalid apertures".into()),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut bad = 0;
        let mut worst = f64::INFINITY;
        for _ in 0..samples {
            let theta = std::f64::consts::PI * (2.0 * rng.random::<f64>() - 1.0);
            let rho: f64 = rng.random_range(0.001..0.999);
            let z = Complex64::from_polar(rho * sa.boundary_radius(theta), theta);
            let gap = 1.0 - z.norm();
            let d = match stolz_boundary_distance(z, &sb) {
                Ok(d) => d,
                Err(e) => return (false, format!("z = {z}: {e}")),
            };
            worst = worst.min(d / gap);
            if !(factor * gap <= d && d < gap) {
                bad += 1;
            }
        }
        (
            bad == 0,
            format!("A = {a}, B = {b}: min dist/(1-|z|) = {worst:.4} (bound {factor}), {bad} violations"),
        )
    })
}

/// `2/pi <= 2^k beta_k <= 3/2` for `k = 1..=kmax` and `beta_1 = 1/2`.
pub fn beta_bounds(kmax: u32) -> SuiteResult {
    timed("beta_k_bounds", || {
        let b1 = (beta_k(1) - 0.5).abs();
        let mut bad = 0;
        for k in 1..=kmax {
            let s = 2f64.powi(k as i32) * beta_k(k);
            if !(2.0 / std::f64::consts::PI..=1.5).contains(&s) {
                bad += 1;
            }
        }
        (
            bad == 0 && b1 <= 1e-15,
            format!("k = 1..{kmax}: {bad} violations, |beta_1 - 1/2| = {b1:e}"),
        )
    })
}

/// Distinct seeded points in `[-0.6, 0.6]^2` with multiplicities in `1..=3`,
/// at most `max_total` zeros counted with multiplicity.
fn oracle_family(rng: &mut ChaCha8Rng, max_total: u32) -> Vec<(Complex64, u32)> {
    let target = rng.random_range(1..=max_total);
    let mut out: Vec<(Complex64, u32)> = Vec::new();
    let mut total = 0;
    while total < target {
        let z = c(rng.random_range(-0.6..0.6), rng.random_range(-0.6..0.6));
        if out.iter().any(|(w, _)| (z - w).norm() < 1e-2) {
            continue;
        }
        let m = rng.random_range(1..=3u32).min(target - total);
        out.push((z, m));
        total += m;
    }
    out
}

fn expand(zs: &[(Complex64, u32)]) -> Vec<Complex64> {
    zs.iter()
        .flat_map(|&(z, m)| std::iter::repeat_n(z, m as usize))
        .collect()
}

/// Blind localization of seeded Blaschke products: every zero within `tol_hit`,
/// exact multiplicities, and the region winding number equal to the count.
pub fn zero_oracle(count: usize, tol_hit: f64, seed: u64) -> SuiteResult {
    timed("zero_oracle", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let region = Rect::new(-0.7, 0.7, -0.7, 0.7);
        let opts = LocateOptions::new(1e-10, 60);
        let mut worst = 0.0_f64;
        for trial in 0..count {
            let fam = oracle_family(&mut rng, 12);
            let f = match blaschke_product(&expand(&fam)) {
                Ok(f) => f.without_known_zeros(),
                Err(e) => return (false, format!("trial {trial}: {e}")),
            };
            let found = match locate_zeros_with(&f, region, &opts) {
                Ok(z) => z,
                Err(e) => return (false, format!("trial {trial}: {e}")),
            };
            if found.len() != fam.len() {
                return (
                    false,
                    format!("trial {trial}: found {} zeros, expected {}", found.len(), fam.len()),
                );
            }
            for &(z, m) in &fam {
                let Some(hit) = found
                    .iter()
                    .min_by(|a, b| (a.location - z).norm().total_cmp(&(b.location - z).norm()))
                else {
                    return (false, format!("trial {trial}: nothing found"));
                };
                let err = (hit.location - z).norm();
                worst = worst.max(err);
                if err >= tol_hit || hit.multiplicity != m {
                    return (
                        false,
                        format!(
                            "trial {trial}: zero {z} recovered at distance {err:e} with multiplicity {}/{m}",
                            hit.multiplicity
                        ),
                    );
                }
            }
            let total: u32 = fam.iter().map(|p| p.1).sum();
            match winding_number(&f, &Contour::Rectangle(region), 64) {
                Ok(w) if w == total as i64 && found.total_multiplicity() == total as u64 => {}
                Ok(w) => return (false, format!("trial {trial}: winding {w}, expected {total}")),
                Err(e) => return (false, format!("trial {trial}: {e}")),
            }
        }
        (true, format!("{count} products, max location error {worst:.2e}"))
    })
}

/// Jensen residual at radius `r` for seeded Blaschke products, zero-free
/// envelope exponentials and their products.
pub fn jensen(r: f64, n_theta: usize, bound: f64, seed: u64) -> SuiteResult {
    timed("jensen_residual", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut fns = Vec::new();
        for _ in 0..4 {
            let zs: Vec<Complex64> = (0..6).map(|_| disk_point(&mut rng, 0.85)).collect();
            fns.push(("blaschke", blaschke_product(&zs)));
        }
        let kinds = [
            EnvelopeKind::Cayley { c: 0.5 },
            EnvelopeKind::Pole { c: 1.0, m: 1.0 },
            EnvelopeKind::Pole { c: 0.2, m: 2.5 },
            EnvelopeKind::PowerRatio {
                c: 1.0,
                zeta0: c(1.0, 0.0),
                xi0: c(-1.0, 0.0),
                r: 1.0,
                q: 2.0,
            },
        ];
        for k in kinds {
            fns.push(("envelope", envelope_exponential(k)));
        }
        let zs: Vec<Complex64> = (0..5).map(|_| disk_point(&mut rng, 0.85)).collect();
        let prod = blaschke_product(&zs)
            .and_then(|b| product(&b, &envelope_exponential(EnvelopeKind::Pole { c: 1.0, m: 1.0 })?));
        fns.push(("product", prod));
        let mut worst = 0.0_f64;
        for (name, f) in fns {
            let res = f.and_then(|f| jensen_residual(&f, r, n_theta));
            match res {
                Ok(x) => worst = worst.max(x.abs()),
                Err(e) => return (false, format!("{name}: {e}")),
            }
        }
        (
            worst < bound,
            format!("r = {r}, n_theta = {n_theta}: max |residual| = {worst:.2e} (bound {bound:e})"),
        )
    })
}

/// The hand-evaluated exponent tuples `(l, l1) = (2, 3.2)` and `(s, s1, s2) = (3, -1, 1.65)`.
pub fn exponents(tol: f64) -> SuiteResult {
    timed("exponent_calculators", || {
        let (l, l1) = halfplane_params_l1(1.0, 0.0, &[], &[], 0.1);
        let (s, s1, s2) = cut_params_s(1.0, 0.0, 0.0, &[], &[], 0.1);
        let errs = [
            (l - 2.0).abs(),
            (l1 - 3.2).abs(),
            (s - 3.0).abs(),
            (s1 + 1.0).abs(),
            (s2 - 1.65).abs(),
        ];
        let worst = errs.iter().copied().fold(0.0, f64::max);
        (
            worst <= tol,
            format!("(l, l1) = ({l}, {l1}), (s, s1, s2) = ({s}, {s1}, {s2}), max error {worst:e}"),
        )
    })
}

/// Disk/half-plane comparisons and `|w| Im w <= dist(w^2, R+) <= 2|w| Im w` at seeded points.
pub fn sandwiches(count: usize, seed: u64) -> SuiteResult {
    timed("transfer_sandwiches", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (mut bad_hp, mut bad_cut) = (0, 0);
        for _ in 0..count {
            let z = disk_point(&mut rng, 1.0);
            let Ok(w) = cayley_to_halfplane(z) else { continue };
            if !(w.im > 0.0) || !w.norm().is_finite() {
                continue;
            }
            let x: f64 = rng.random_range(-20.0..20.0);
            match halfplane_comparisons(w, x) {
                Ok(cmp) if cmp.all_hold() => {}
                _ => bad_hp += 1,
            }
            let v = c(rng.random_range(-10.0..10.0), rng.random_range(1e-6..10.0));
            match cut_dist_inequality(v) {
                Ok(s) if s.holds() => {}
                _ => bad_cut += 1,
            }
        }
        (
            bad_hp == 0 && bad_cut == 0,
            format!("{count} points: {bad_hp} half-plane and {bad_cut} cut violations"),
        )
    })
}

/// The radial family `a_k = 1 - 2^{-k}` times `exp(1/(1-z))` with `p = 1`,
/// `E = {1}`, `r = 1`, `eps = 0.1`: ratio `sum / K_hat` over `N` in `ns`.
pub fn bounded_ratios(ns: std::ops::RangeInclusive<usize>, max_spread: f64) -> (SuiteResult, Vec<TraceRow>) {
    let mut trace = Vec::new();
    let res = timed("bounded_ratios", || {
        let pole = match envelope_exponential(EnvelopeKind::Pole { c: 1.0, m: 1.0 }) {
            Ok(f) => f,
            Err(e) => return (false, e.to_string()),
        };
        let mut insts = Vec::new();
        for n in ns.clone() {
            let zs: Vec<Complex64> = (1..=n).map(|k| c(1.0 - 2f64.powi(-(k as i32)), 0.0)).collect();
            match blaschke_product(&zs).and_then(|b| product(&b, &pole)) {
                Ok(f) => insts.push(Instance { n, f }),
                Err(e) => return (false, e.to_string()),
            }
        }
        let env = EnvelopeSpec::Distance {
            p: 1.0,
            q: 0.0,
            r: 1.0,
            e: BoundaryPointSet::new(vec![c(1.0, 0.0)]).expect("unit point"),
            f: BoundaryPointSet::empty(),
        };
        let opts = VerifyOptions {
            max_spread,
            ..VerifyOptions::default()
        };
        match verify_theorem(&insts, &env, &[0.1], Condition::Distance, &opts) {
            Ok(rep) => {
                trace = rep.rows.clone();
                let s = rep.spreads[0];
                (
                    rep.pass && !rep.vacuous,
                    format!(
                        "N = {}..{}: ratio in [{:.6}, {:.6}], max/min = {:.4}",
                        ns.start(),
                        ns.end(),
                        s.min,
                        s.max,
                        s.max / s.min
                    ),
                )
            }
            Err(e) => (false, e.to_string()),
        }
    });
    (res, trace)
}

/// Seeded zero sets: corollary sum against the two-region total (`p = 1`, `r = 1`, `tau = 0.5`).
///
/// With `local` the zeros are drawn from `|1 - z| <= 1`; otherwise uniformly from the disk.
pub fn dominance(count: usize, local: bool, seed: u64) -> SuiteResult {
    let name = if local { "dominance_local" } else { "dominance_global" };
    timed(name, || {
        let (p, r, tau) = (1.0, 1.0, 0.5);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let opts = SumOptions {
            exec: Execution::Sequential,
            ..SumOptions::default()
        };
        let mut bad = 0;
        let mut worst = 0.0_f64;
        for _ in 0..count {
            let size = rng.random_range(1..=20usize);
            let mut zs = Vec::with_capacity(size);
            while zs.len() < size {
                let z = disk_point(&mut rng, 1.0);
                if z.norm() < 1.0 && (!local || (c(1.0, 0.0) - z).norm() <= 1.0) {
                    zs.push(z);
                }
            }
            let zeros = ZeroSet::from_points(&zs);
            let (cs, ts) = match (
                corollary_sum(&zeros, p, r, tau, &opts),
                two_region_sum(&zeros, p, r, tau, &opts),
            ) {
                (Ok(a), Ok(b)) => (a.total, b.total),
                (Err(e), _) | (_, Err(e)) => return (false, e.to_string()),
            };
            worst = worst.max(cs / ts);
            if cs > ts * (1.0 + 1e-12) {
                bad += 1;
            }
        }
        (
            bad == 0,
            format!("{count} sets: {bad} with corollary > two-region, worst ratio {worst:.4}"),
        )
    })
}

/// The suites run by `selftest`.
pub fn selftest(seed: u64) -> Vec<SuiteResult> {
    vec![
        distortion(&[2.0, 4.0, 8.0], 500, 1.0 / 16.0, 48.0),
        pommerenke(2.0, 200),
        nesting(1.5, 3.0, 0.375, 200, 7),
        beta_bounds(30),
        zero_oracle(50, 1e-8, seed),
        jensen(0.9, 4096, 1e-6, 11),
        exponents(1e-12),
        sandwiches(10_000, 13),
        bounded_ratios(5..=20, 10.0).0,
        dominance(500, true, 17),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mutated_distortion_constants_fail() {
        assert!(distortion(&[2.0], 100, 1.0 / 16.0, 48.0).pass);
        // observed ratios lie in roughly [0.75, 0.99], so only windows cutting into that range trip
        assert!(distortion(&[2.0], 100, 1.0 / 16.0, 4.0).pass);
        assert!(!distortion(&[2.0], 100, 1.0 / 16.0, 0.5).pass);
        assert!(!distortion(&[2.0], 100, 1.0, 48.0).pass);
    }

    #[test]
    fn cheap_suites_pass() {
        assert!(beta_bounds(30).pass);
        assert!(exponents(1e-12).pass);
        assert!(sandwiches(500, 1).pass);
        assert!(dominance(50, true, 2).pass);
    }

    #[test]
    fn oracle_is_seed_deterministic() {
        let a = zero_oracle(3, 1e-8, 5);
        let b = zero_oracle(3, 1e-8, 5);
        assert!(a.pass, "{}", a.detail);
        assert_eq!(a.detail, b.detail);
    }
}
