use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{
    closed_set_sum, corollary_sum, cut_sum, disk_sum, estimate_k, halfplane_sum, hk_sum, stolz_split_sum,
    two_region_sum, EnvelopeSpec, KGrid, StolzSplit, SumOptions, SumReport,
};
use crate::conformal::{cayley_to_disk, cut_to_halfplane};
use crate::error::{Error, Result};
use crate::math::plus_part;
use crate::parallel;
use crate::zerofind::{locate_zeros_with, AnalyticFn, DomainTag, LocateOptions, Rect, ZeroSet};

/// Which weighted sum a verification run evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Condition {
    /// Single-distance disk weight (distance envelope).
    Distance,
    /// Point-product disk weight (product envelope).
    Product,
    /// Product weight with the extra `|z|^{-(gamma-eps)_+}` factor.
    HansmannKatriel,
    ClosedSet,
    /// Two-region split with `tau = eps`; `p`, `r` from a distance envelope.
    TwoRegion,
    Corollary,
    /// Stolz split at the first point of `E` with `tau = eps + tau_prime`.
    StolzSplit {
        tau_prime: f64,
    },
    HalfPlane,
    Cut,
}

impl Condition {
    pub fn domain(&self) -> DomainTag {
        match self {
            Condition::HalfPlane => DomainTag::HalfPlane,
            Condition::Cut => DomainTag::Cut,
            _ => DomainTag::Disk,
        }
    }
}

fn form_error(cond: Condition, env: &EnvelopeSpec) -> Error {
    Error::param(format!(
        "condition {cond:?} does not accept a {} envelope",
        env.form_name()
    ))
}

/// Evaluates the sum selected by `cond` for the given zeros.
pub fn evaluate_condition(
    cond: Condition,
    zeros: &ZeroSet,
    env: &EnvelopeSpec,
    eps: f64,
    opts: &SumOptions,
) -> Result<SumReport> {
    match (cond, env) {
        (Condition::Distance, EnvelopeSpec::Distance { .. }) | (Condition::Product, EnvelopeSpec::Product { .. }) => {
            disk_sum(zeros, env, eps, opts)
        }
        (Condition::HansmannKatriel, EnvelopeSpec::Product { gamma, .. }) => hk_sum(zeros, env, eps, *gamma, opts),
        (Condition::ClosedSet, EnvelopeSpec::ClosedSet { .. }) => closed_set_sum(zeros, env, eps, opts),
        (Condition::TwoRegion, EnvelopeSpec::Distance { p, r, .. }) => two_region_sum(zeros, *p, *r, eps, opts),
        (Condition::Corollary, EnvelopeSpec::Distance { p, r, .. }) => corollary_sum(zeros, *p, *r, eps, opts),
        (Condition::StolzSplit { tau_prime }, EnvelopeSpec::Distance { p, q, r, e, f }) => {
            let zeta0 = *e
                .points()
                .first()
                .ok_or_else(|| Error::param("the Stolz split needs a point in E"))?;
            let xi0 = f.points().first().copied().unwrap_or(-zeta0);
            let split = StolzSplit {
                zeta0,
                xi0,
                p: *p,
                q: *q,
                r: *r,
                tau: eps + tau_prime,
                tau_prime,
            };
            stolz_split_sum(zeros, &split, opts)
        }
        (Condition::HalfPlane, EnvelopeSpec::HalfPlane { .. }) => halfplane_sum(zeros, env, eps, opts),
        (Condition::Cut, EnvelopeSpec::Cut { .. }) => cut_sum(zeros, env, eps, opts),
        _ => Err(form_error(cond, env)),
    }
}

/// One member `f_N` of a function family.
#[derive(Clone)]
pub struct Instance {
    pub n: usize,
    pub f: AnalyticFn,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    /// Evaluate the sums at `eps = 0` and fit their growth in `N`.
    pub probe: bool,
    /// Search region for functions without known zeros.
    pub locate_region: Option<Rect>,
    pub locate: LocateOptions,
    pub sum: SumOptions,
    pub grid: KGrid,
    /// Ratios count as bounded when `max/min` stays below this.
    pub max_spread: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            probe: false,
            locate_region: None,
            locate: LocateOptions::new(1e-10, 60),
            sum: SumOptions::default(),
            grid: KGrid::default(),
            max_spread: 10.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub n: usize,
    pub epsilon: f64,
    pub total: f64,
    pub k_hat: f64,
    #[serde(with = "extended")]
    pub ratio: f64,
}

/// Spread of the positive ratios across `N` at one `eps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsilonSpread {
    pub epsilon: f64,
    #[serde(with = "extended")]
    pub min: f64,
    #[serde(with = "extended")]
    pub max: f64,
    pub bounded: bool,
}

/// Blaschke sum against the Jensen right side `sup_r mean log+|f(r e^{it})| - log|f(0)|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JensenBaseline {
    pub n: usize,
    pub blaschke_sum: f64,
    pub baseline: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharpnessProbe {
    pub ns: Vec<usize>,
    pub totals: Vec<f64>,
    /// Least-squares slope of `log total` against `log N`.
    pub growth_exponent: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub condition: Condition,
    pub rows: Vec<TraceRow>,
    pub spreads: Vec<EpsilonSpread>,
    pub vacuous: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub jensen: Vec<JensenBaseline>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sharpness: Option<SharpnessProbe>,
    /// One report per row, same order.
    pub reports: Vec<SumReport>,
    pub pass: bool,
}

pub const VACUOUS_NOTE: &str = "K̂ = 0, vacuous bound — use Jensen baseline instead";

mod extended {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else if x.is_nan() {
            s.serialize_str("nan")
        } else if *x > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Num {
            F(f64),
            S(String),
        }
        Ok(match Num::deserialize(d)? {
            Num::F(v) => v,
            Num::S(s) => match s.as_str() {
                "inf" => f64::INFINITY,
                "-inf" => f64::NEG_INFINITY,
                _ => f64::NAN,
            },
        })
    }
}

fn zeros_of(inst: &Instance, opts: &VerifyOptions) -> Result<ZeroSet> {
    if let Some(z) = inst.f.known_zeros() {
        return Ok(z.clone());
    }
    let region = opts
        .locate_region
        .ok_or_else(|| Error::param("function has no known zeros and no search region was given"))?;
    locate_zeros_with(&inst.f, region, &opts.locate)
}

fn to_disk_point(domain: DomainTag, z: Complex64) -> Result<Complex64> {
    match domain {
        DomainTag::Disk => Ok(z),
        DomainTag::HalfPlane => cayley_to_disk(z),
        DomainTag::Cut => cayley_to_disk(cut_to_halfplane(z)?),
    }
}

fn jensen_baseline(inst: &Instance, zeros: &ZeroSet, grid: &KGrid) -> Result<JensenBaseline> {
    let f = match inst.f.domain() {
        DomainTag::Disk => inst.f.clone(),
        DomainTag::HalfPlane => inst.f.to_disk()?,
        DomainTag::Cut => inst.f.square_pullback()?.to_disk()?,
    };
    let mut terms = Vec::with_capacity(zeros.len());
    for rec in zeros.iter() {
        let z = to_disk_point(inst.f.domain(), rec.location)?;
        terms.push((1.0 - z.norm()) * rec.multiplicity as f64);
    }
    let blaschke_sum = parallel::pairwise_sum(&terms);
    let log0 = f.log_abs(Complex64::new(0.0, 0.0))?;
    if log0 == f64::NEG_INFINITY {
        return Err(Error::NormalizeFirst);
    }
    const N_THETA: usize = 1024;
    let mut best = 0.0_f64;
    for r in grid.radii() {
        let mut vals = Vec::with_capacity(N_THETA);
        for k in 0..N_THETA {
            let z = Complex64::from_polar(r, std::f64::consts::TAU * (k as f64 + 0.5) / N_THETA as f64);
            vals.push(plus_part(f.log_abs(z)?));
        }
        best = best.max(parallel::pairwise_sum(&vals) / N_THETA as f64);
    }
    let baseline = best - log0;
    Ok(JensenBaseline {
        n: inst.n,
        blaschke_sum,
        baseline,
        holds: blaschke_sum <= baseline * (1.0 + 1e-12) + 1e-300,
    })
}

fn log_log_slope(ns: &[usize], totals: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = ns
        .iter()
        .zip(totals)
        .filter(|(n, t)| **n > 0 && **t > 0.0 && t.is_finite())
        .map(|(n, t)| ((*n as f64).ln(), t.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / sxx)
}

/// Evaluates `cond` for each instance and each `eps` in the ladder, with `K_hat`
/// estimated per instance, and checks that the ratios stay bounded in `N`.
pub fn verify_theorem(
    instances: &[Instance],
    env: &EnvelopeSpec,
    ladder: &[f64],
    cond: Condition,
    opts: &VerifyOptions,
) -> Result<VerifyReport> {
    env.validate()?;
    if cond.domain() != env.domain() {
        return Err(Error::DomainMismatch {
            left: cond.domain(),
            right: env.domain(),
        });
    }
    if ladder.is_empty() {
        return Err(Error::param("epsilon ladder is empty"));
    }
    for &eps in ladder {
        if eps == 0.0 && !opts.probe {
            return Err(Error::param("epsilon = 0 in the ladder requires the sharpness probe"));
        }
        if !(eps >= 0.0) || !eps.is_finite() {
            return Err(Error::param(format!("invalid epsilon {eps}")));
        }
    }
    let positive: Vec<f64> = ladder.iter().copied().filter(|e| *e > 0.0).collect();

    let mut zero_sets = Vec::with_capacity(instances.len());
    let mut k_hats = Vec::with_capacity(instances.len());
    for inst in instances {
        zero_sets.push(zeros_of(inst, opts)?);
        k_hats.push(estimate_k(&inst.f, env, &opts.grid, opts.sum.exec)?.k_hat);
    }

    let mut rows = Vec::new();
    let mut reports = Vec::new();
    let mut spreads = Vec::new();
    for &eps in &positive {
        let (mut lo, mut hi) = (f64::INFINITY, 0.0_f64);
        let mut finite = true;
        for ((inst, zeros), &k) in instances.iter().zip(&zero_sets).zip(&k_hats) {
            let rep = evaluate_condition(cond, zeros, env, eps, &opts.sum)?.with_k_hat(k);
            let ratio = rep.ratio.unwrap_or(f64::NAN);
            if !ratio.is_finite() {
                finite = false;
            } else if ratio > 0.0 {
                lo = lo.min(ratio);
                hi = hi.max(ratio);
            }
            rows.push(TraceRow {
                n: inst.n,
                epsilon: eps,
                total: rep.total,
                k_hat: k,
                ratio,
            });
            reports.push(rep);
        }
        let bounded = finite && (hi == 0.0 || hi / lo < opts.max_spread);
        spreads.push(EpsilonSpread {
            epsilon: eps,
            min: if hi == 0.0 { 0.0 } else { lo },
            max: hi,
            bounded,
        });
    }

    let vacuous = !instances.is_empty() && k_hats.iter().all(|k| *k == 0.0);
    let mut jensen = Vec::new();
    if vacuous {
        for (inst, zeros) in instances.iter().zip(&zero_sets) {
            jensen.push(jensen_baseline(inst, zeros, &opts.grid)?);
        }
    }

    let sharpness = if opts.probe {
        let sopts = SumOptions {
            allow_zero_epsilon: true,
            ..opts.sum
        };
        let mut totals = Vec::with_capacity(instances.len());
        for zeros in &zero_sets {
            totals.push(evaluate_condition(cond, zeros, env, 0.0, &sopts)?.total);
        }
        let ns: Vec<usize> = instances.iter().map(|i| i.n).collect();
        let growth_exponent = log_log_slope(&ns, &totals);
        Some(SharpnessProbe {
            ns,
            totals,
            growth_exponent,
        })
    } else {
        None
    };

    let pass = if vacuous {
        jensen.iter().all(|j| j.holds)
    } else {
        spreads.iter().all(|s| s.bounded)
    };
    Ok(VerifyReport {
        condition: cond,
        rows,
        spreads,
        vacuous,
        note: vacuous.then(|| VACUOUS_NOTE.to_string()),
        jensen,
        sharpness,
        reports,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::BoundaryPointSet;
    use crate::zerofind::{blaschke_product, envelope_exponential, product, EnvelopeKind};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn radial(n: usize) -> Vec<Complex64> {
        (1..=n).map(|k| c(1.0 - 2f64.powi(-(k as i32)), 0.0)).collect()
    }

    fn env_p1() -> EnvelopeSpec {
        EnvelopeSpec::Distance {
            p: 1.0,
            q: 0.0,
            r: 1.0,
            e: BoundaryPointSet::new(vec![c(1.0, 0.0)]).unwrap(),
            f: BoundaryPointSet::empty(),
        }
    }

    #[test]
    fn blaschke_family_is_vacuous() {
        let insts: Vec<Instance> = (3..=6)
            .map(|n| Instance {
                n,
                f: blaschke_product(&radial(n)).unwrap(),
            })
            .collect();
        let rep = verify_theorem(
            &insts,
            &env_p1(),
            &[0.1],
            Condition::Distance,
            &VerifyOptions::default(),
        )
        .unwrap();
        assert!(rep.vacuous);
        assert_eq!(rep.note.as_deref(), Some(VACUOUS_NOTE));
        assert_eq!(rep.jensen.len(), 4);
        for j in &rep.jensen {
            assert!(j.holds && j.blaschke_sum > 0.0);
        }
        assert!(rep.pass);
        assert!(rep.rows.iter().all(|r| r.ratio == f64::INFINITY));
    }

    #[test]
    fn zero_free_envelope_passes() {
        let f = envelope_exponential(EnvelopeKind::Cayley { c: 1.0 }).unwrap();
        let rep = verify_theorem(
            &[Instance { n: 0, f }],
            &env_p1(),
            &[0.1, 0.5],
            Condition::Distance,
            &VerifyOptions::default(),
        )
        .unwrap();
        assert!(!rep.vacuous);
        assert!(rep.pass);
        assert!(rep.rows.iter().all(|r| r.total == 0.0 && r.ratio == 0.0));
    }

    #[test]
    fn product_family_ratios_are_bounded() {
        let pole = envelope_exponential(EnvelopeKind::Pole { c: 1.0, m: 1.0 }).unwrap();
        let insts: Vec<Instance> = (5..=20)
            .map(|n| Instance {
                n,
                f: product(&blaschke_product(&radial(n)).unwrap(), &pole).unwrap(),
            })
            .collect();
        let opts = VerifyOptions {
            probe: true,
            ..VerifyOptions::default()
        };
        let rep = verify_theorem(&insts, &env_p1(), &[0.1], Condition::Distance, &opts).unwrap();
        assert!(rep.pass, "{:?}", rep.spreads);
        assert_eq!(rep.rows.len(), 16);
        let probe = rep.sharpness.unwrap();
        assert_eq!(probe.totals.len(), 16);
        // at eps = 0 the weight 2^{-k} sums to 1 - 2^{-N}: bounded, slope near zero
        assert!(probe.growth_exponent.unwrap().abs() < 0.2);
    }

    #[test]
    fn zero_epsilon_needs_probe() {
        let f = envelope_exponential(EnvelopeKind::Cayley { c: 1.0 }).unwrap();
        let err = verify_theorem(
            &[Instance { n: 1, f }],
            &env_p1(),
            &[0.0, 0.1],
            Condition::Distance,
            &VerifyOptions::default(),
        );
        assert!(err.is_err());
    }

    #[test]
    fn mismatched_condition_and_envelope() {
        let z = ZeroSet::from_points(&[c(0.5, 0.0)]);
        assert!(evaluate_condition(Condition::HalfPlane, &z, &env_p1(), 0.1, &SumOptions::default()).is_err());
        assert!(evaluate_condition(Condition::Product, &z, &env_p1(), 0.1, &SumOptions::default()).is_err());
        let split = evaluate_condition(
            Condition::StolzSplit { tau_prime: 0.05 },
            &z,
            &env_p1(),
            0.1,
            &SumOptions::default(),
        )
        .unwrap();
        assert_eq!(split.partial_sums.len(), 2);
    }

    #[test]
    fn slope_fit() {
        let ns = [1, 2, 4, 8];
        let t: Vec<f64> = ns.iter().map(|&n| 3.0 * (n as f64).powf(1.5)).collect();
        assert!((log_log_slope(&ns, &t).unwrap() - 1.5).abs() < 1e-12);
    }
}
