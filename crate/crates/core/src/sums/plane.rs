use num_complex::Complex64;

use super::{check_eps, collect_terms, params, EnvelopeSpec, RealPoints, SumOptions, SumReport};
use crate::error::{Error, Result};
use crate::math::{brace_shorthand, dist_to_positive_ray, plus_part};
use crate::zerofind::ZeroSet;

fn sum_min(a: f64, c: &[f64]) -> f64 {
    c.iter().map(|&cj| a.min(cj)).sum()
}

fn sum_plus(d: &[f64], eps: f64) -> f64 {
    d.iter().map(|&dk| plus_part(dk - 1.0 + eps)).sum()
}

/// `l = 2a - 2b - sum c_j + sum d_k` and
/// `l_1 = 2(a+1+eps) + {l}_{a,eps} - sum min(a,c_j) + sum (d_k-1+eps)_+`.
pub fn halfplane_params_l1(a: f64, b: f64, c: &[f64], d: &[f64], eps: f64) -> (f64, f64) {
    let l = 2.0 * a - 2.0 * b - c.iter().sum::<f64>() + d.iter().sum::<f64>();
    let l1 = 2.0 * (a + 1.0 + eps) + brace_shorthand(l, a, eps) - sum_min(a, c) + sum_plus(d, eps);
    (l, l1)
}

/// `s = 3a - 2b + 2r - 2 sum c_j + 2 sum d_k`,
/// `s_1 = ({-2r-a}_{a,eps} - a - 1 - eps)/2`,
/// `s_2 = a+1+eps + ({-2r-a}_{a,eps} + {s}_{a,eps})/2 - sum min(a,c_j) + sum (d_k-1+eps)_+`.
pub fn cut_params_s(a: f64, b: f64, r: f64, c: &[f64], d: &[f64], eps: f64) -> (f64, f64, f64) {
    let s = 3.0 * a - 2.0 * b + 2.0 * r - 2.0 * c.iter().sum::<f64>() + 2.0 * d.iter().sum::<f64>();
    let br = brace_shorthand(-2.0 * r - a, a, eps);
    let s1 = (br - a - 1.0 - eps) / 2.0;
    let s2 = a + 1.0 + eps + (br + brace_shorthand(s, a, eps)) / 2.0 - sum_min(a, c) + sum_plus(d, eps);
    (s, s1, s2)
}

/// `prod |z - x'_k|^{(d_k-1+eps)_+} / prod |z - x_j|^{min(a,c_j)}`.
fn point_factor(z: Complex64, a: f64, c: &RealPoints, d: &RealPoints, eps: f64) -> Result<f64> {
    let mut w = 1.0;
    for (x, dk) in d.iter() {
        w *= (z - x).norm().powf(plus_part(dk - 1.0 + eps));
    }
    for (x, cj) in c.iter() {
        let power = a.min(cj);
        if power > 0.0 {
            let dist = (z - x).norm();
            if dist == 0.0 {
                return Err(Error::SingularWeight(z));
            }
            w /= dist.powf(power);
        }
    }
    Ok(w)
}

/// `sum (Im z)^{a+1+eps} / (1+|z|)^{l_1} * prod|z-x'_k|^{(d_k-1+eps)_+} / prod|z-x_j|^{min(a,c_j)}`.
pub fn halfplane_sum(zeros: &ZeroSet, env: &EnvelopeSpec, eps: f64, opts: &SumOptions) -> Result<SumReport> {
    check_eps(eps, opts.allow_zero_epsilon)?;
    env.validate()?;
    let EnvelopeSpec::HalfPlane { a, b, c, d } = env else {
        return Err(Error::param(format!(
            "half-plane sum needs a half-plane envelope, got {}",
            env.form_name()
        )));
    };
    let (l, l1) = halfplane_params_l1(*a, *b, &c.exponents, &d.exponents, eps);
    let terms = collect_terms(zeros, opts.exec, |z| {
        if !(z.im > 0.0) {
            return Err(Error::OutsideDomain(z));
        }
        let w = z.im.powf(a + 1.0 + eps) / (1.0 + z.norm()).powf(l1) * point_factor(z, *a, c, d, eps)?;
        Ok((w, None))
    })?;
    Ok(SumReport::from_terms(terms, eps, params([("l", l), ("l1", l1)]), &[]))
}

/// `sum dist^{a+1+eps}(z,R+) |z|^{s_1} / (1+|z|)^{s_2} * prod|z-t'_k|^{(d_k-1+eps)_+} / prod|z-t_j|^{min(a,c_j)}`.
pub fn cut_sum(zeros: &ZeroSet, env: &EnvelopeSpec, eps: f64, opts: &SumOptions) -> Result<SumReport> {
    check_eps(eps, opts.allow_zero_epsilon)?;
    env.validate()?;
    let EnvelopeSpec::Cut { a, b, r, c, d } = env else {
        return Err(Error::param(format!(
            "cut-plane sum needs a cut envelope, got {}",
            env.form_name()
        )));
    };
    let (s, s1, s2) = cut_params_s(*a, *b, *r, &c.exponents, &d.exponents, eps);
    let terms = collect_terms(zeros, opts.exec, |z| {
        if z.im == 0.0 && z.re >= 0.0 {
            if z.re == 0.0 && s1 < 0.0 {
                return Err(Error::SingularWeight(z));
            }
            return Err(Error::OnCut(z));
        }
        let w = dist_to_positive_ray(z).powf(a + 1.0 + eps) * z.norm().powf(s1) / (1.0 + z.norm()).powf(s2)
            * point_factor(z, *a, c, d, eps)?;
        Ok((w, None))
    })?;
    Ok(SumReport::from_terms(
        terms,
        eps,
        params([("s", s), ("s1", s1), ("s2", s2)]),
        &[],
    ))
}
