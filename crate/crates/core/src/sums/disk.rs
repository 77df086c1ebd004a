use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{check_eps, collect_terms, params, require_disk, EnvelopeSpec, Region, SumOptions, SumReport};
use crate::conformal::{stolz_contains, StolzAngle};
use crate::error::{Error, Result};
use crate::math::{ahern_clark_type, plus_part, BoundaryPointSet};
use crate::zerofind::ZeroSet;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// `|z - b|^(-power)`, an error when `z = b` and the power is positive.
fn inverse_power(z: Complex64, d: f64, power: f64) -> Result<f64> {
    if power == 0.0 {
        return Ok(1.0);
    }
    if d == 0.0 {
        return Err(Error::SingularWeight(z));
    }
    Ok(d.powf(-power))
}

fn min_dist(z: Complex64, set: &BoundaryPointSet) -> Option<f64> {
    set.points().iter().map(|b| (z - b).norm()).min_by(f64::total_cmp)
}

/// Radial factor `(1-|z|)^{p+1+eps}`, or `(1-|z|)` for the sharp `p = 0` case.
fn radial(z: Complex64, p: f64, eps: f64, sharp: bool) -> f64 {
    let gap = 1.0 - z.norm();
    if sharp && p == 0.0 {
        gap
    } else {
        gap.powf(p + 1.0 + eps)
    }
}

fn disk_weight(z: Complex64, env: &EnvelopeSpec, eps: f64, sharp: bool) -> Result<f64> {
    require_disk(z)?;
    match env {
        EnvelopeSpec::Distance { p, q, r, e, f } => {
            let num = min_dist(z, f).map_or(1.0, |d| d.powf(plus_part(q - 1.0 + eps)));
            let den = match min_dist(z, e) {
                Some(d) => inverse_power(z, d, p.min(*r))?,
                None => 1.0,
            };
            Ok(radial(z, *p, eps, sharp) * num * den)
        }
        EnvelopeSpec::Product { p, e, f, .. } => {
            let mut w = radial(z, *p, eps, sharp);
            for (k, xi) in f.points().iter().enumerate() {
                w *= (z - xi).norm().powf(plus_part(f.exponent(k) - 1.0 + eps));
            }
            for (j, zeta) in e.points().iter().enumerate() {
                w *= inverse_power(z, (z - zeta).norm(), p.min(e.exponent(j)))?;
            }
            Ok(w)
        }
        _ => Err(Error::param(format!(
            "disk sum needs a distance or product envelope, got {}",
            env.form_name()
        ))),
    }
}

/// `sum (1-|z|)^{p+1+eps} prod|z-xi_k|^{(q_k-1+eps)_+} / prod|z-zeta_j|^{min(p,r_j)}`,
/// or the single-distance variant for the distance form.
pub fn disk_sum(zeros: &ZeroSet, env: &EnvelopeSpec, eps: f64, opts: &SumOptions) -> Result<SumReport> {
    check_eps(eps, opts.allow_zero_epsilon)?;
    env.validate()?;
    let sharp = opts.p0_sharp;
    let terms = collect_terms(zeros, opts.exec, |z| Ok((disk_weight(z, env, eps, sharp)?, None)))?;
    let p = match env {
        EnvelopeSpec::Distance { p, .. } | EnvelopeSpec::Product { p, .. } => *p,
        _ => unreachable!("checked by disk_weight"),
    };
    let radial_exp = if sharp && p == 0.0 { 1.0 } else { p + 1.0 + eps };
    Ok(SumReport::from_terms(
        terms,
        eps,
        params([("radial_exponent", radial_exp)]),
        &[],
    ))
}

/// The disk sum with the extra factor `|z|^{-(gamma-eps)_+}`.
pub fn hk_sum(zeros: &ZeroSet, env: &EnvelopeSpec, eps: f64, gamma: f64, opts: &SumOptions) -> Result<SumReport> {
    check_eps(eps, opts.allow_zero_epsilon)?;
    env.validate()?;
    if !(gamma >= 0.0) || !gamma.is_finite() {
        return Err(Error::param("gamma must be nonnegative"));
    }
    let power = plus_part(gamma - eps);
    let terms = collect_terms(zeros, opts.exec, |z| {
        let w = disk_weight(z, env, eps, opts.p0_sharp)?;
        Ok((w * inverse_power(z, z.norm(), power)?, None))
    })?;
    Ok(SumReport::from_terms(
        terms,
        eps,
        params([("gamma", gamma), ("origin_exponent", power)]),
        &[],
    ))
}

/// `sum (1-|z|)^{p+1+eps} dist^{(q-alpha(F)+eps)_+}(z,F) / dist^{min(p,r)}(z,E)`.
pub fn closed_set_sum(zeros: &ZeroSet, env: &EnvelopeSpec, eps: f64, opts: &SumOptions) -> Result<SumReport> {
    check_eps(eps, opts.allow_zero_epsilon)?;
    env.validate()?;
    let EnvelopeSpec::ClosedSet { p, q, r, e, f } = env else {
        return Err(Error::param(format!(
            "closed-set sum needs a closed-set envelope, got {}",
            env.form_name()
        )));
    };
    let alpha = if f.is_empty() { 1.0 } else { ahern_clark_type(f)?.alpha };
    let f_power = plus_part(q - alpha + eps);
    let terms = collect_terms(zeros, opts.exec, |z| {
        require_disk(z)?;
        let num = if f.is_empty() { 1.0 } else { f.dist(z)?.powf(f_power) };
        let den = match min_dist(z, e) {
            Some(d) => inverse_power(z, d, p.min(*r))?,
            None => 1.0,
        };
        Ok(((1.0 - z.norm()).powf(p + 1.0 + eps) * num * den, None))
    })?;
    Ok(SumReport::from_terms(
        terms,
        eps,
        params([("alpha_f", alpha), ("f_exponent", f_power)]),
        &[],
    ))
}

fn check_two_region(p: f64, r: f64, tau: f64, allow_zero: bool) -> Result<()> {
    if !(r >= 0.0) || !(p > 0.0 && p < r + 1.0) {
        return Err(Error::param(format!(
            "need 0 < p < r + 1 with r >= 0, got p = {p}, r = {r}"
        )));
    }
    check_eps(tau, allow_zero)
}

/// `beta = 1/(p+tau)` for `p <= r`, `(r+1-p)/(p+tau)` for `r < p < r+1`.
pub fn two_region_beta(p: f64, r: f64, tau: f64) -> Result<f64> {
    check_two_region(p, r, tau, false)?;
    Ok(if p <= r {
        1.0 / (p + tau)
    } else {
        (r + 1.0 - p) / (p + tau)
    })
}

/// Zeros with `(1-|z|)/|1-z| > |1-z|^beta` weighted by `(1-|z|)`, the rest by
/// `(1-|z|)^{p+1+tau} / |1-z|^{min(p,r)+1+tau}`.
pub fn two_region_sum(zeros: &ZeroSet, p: f64, r: f64, tau: f64, opts: &SumOptions) -> Result<SumReport> {
    check_two_region(p, r, tau, opts.allow_zero_epsilon)?;
    let beta = if p <= r {
        1.0 / (p + tau)
    } else {
        (r + 1.0 - p) / (p + tau)
    };
    let s = p.min(r) + 1.0 + tau;
    let terms = collect_terms(zeros, opts.exec, |z| {
        require_disk(z)?;
        let gap = 1.0 - z.norm();
        let d = (ONE - z).norm();
        if gap / d > d.powf(beta) {
            Ok((gap, Some(Region::Tangential)))
        } else {
            Ok((gap.powf(p + 1.0 + tau) / d.powf(s), Some(Region::Normal)))
        }
    })?;
    Ok(SumReport::from_terms(
        terms,
        tau,
        params([("beta", beta), ("p", p), ("r", r)]),
        &[Region::Tangential, Region::Normal],
    ))
}

/// `sum (1-|z|)^{p+1+tau} / |1-z|^{min(p,r)+tau}`.
pub fn corollary_sum(zeros: &ZeroSet, p: f64, r: f64, tau: f64, opts: &SumOptions) -> Result<SumReport> {
    check_two_region(p, r, tau, opts.allow_zero_epsilon)?;
    let s = p.min(r) + tau;
    let terms = collect_terms(zeros, opts.exec, |z| {
        require_disk(z)?;
        Ok(((1.0 - z.norm()).powf(p + 1.0 + tau) / (ONE - z).norm().powf(s), None))
    })?;
    Ok(SumReport::from_terms(terms, tau, params([("p", p), ("r", r)]), &[]))
}

/// Parameters of the Stolz-angle split around `zeta0` with aperture `1/(tau - tau')`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StolzSplit {
    pub zeta0: Complex64,
    pub xi0: Complex64,
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub tau: f64,
    pub tau_prime: f64,
}

pub fn stolz_split_sum(zeros: &ZeroSet, split: &StolzSplit, opts: &SumOptions) -> Result<SumReport> {
    let StolzSplit {
        zeta0,
        xi0,
        p,
        q,
        r,
        tau,
        tau_prime,
    } = *split;
    if !(tau_prime >= 0.0 && tau_prime < tau) {
        return Err(Error::param(format!(
            "need 0 <= tau' < tau, got tau = {tau}, tau' = {tau_prime}"
        )));
    }
    for x in [p, q, r] {
        if !(x >= 0.0) {
            return Err(Error::param("p, q, r must be nonnegative"));
        }
    }
    if (zeta0 - xi0).norm() <= crate::math::UNIT_MODULUS_TOL {
        return Err(Error::SetsIntersect(zeta0));
    }
    let eps = tau - tau_prime;
    let angle = StolzAngle::new(zeta0, 1.0 / eps)?;
    if (xi0.norm() - 1.0).abs() > crate::math::UNIT_MODULUS_TOL {
        return Err(Error::NotUnitModulus(xi0));
    }
    let terms = collect_terms(zeros, opts.exec, |z| {
        require_disk(z)?;
        let gap = 1.0 - z.norm();
        let dx = (z - xi0).norm();
        if stolz_contains(z, &angle)? {
            Ok((
                gap.powf(p + 1.0 + eps) * dx.powf(plus_part(q - 1.0 + eps)),
                Some(Region::InsideStolz),
            ))
        } else {
            let w = gap.powf(p + tau + 1.0) * dx.powf(plus_part(q - 1.0 + tau));
            Ok((
                w * inverse_power(z, (z - zeta0).norm(), p.min(r) + tau_prime)?,
                Some(Region::OutsideStolz),
            ))
        }
    })?;
    Ok(SumReport::from_terms(
        terms,
        eps,
        params([("aperture", 1.0 / eps), ("tau", tau), ("tau_prime", tau_prime)]),
        &[Region::InsideStolz, Region::OutsideStolz],
    ))
}
