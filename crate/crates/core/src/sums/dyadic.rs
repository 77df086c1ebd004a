use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::require_disk;
use crate::conformal::StolzAngle;
use crate::error::{Error, Result};
use crate::zerofind::ZeroSet;

/// Radius of the neighbourhood `|z - zeta0| < 1/16` holding the profiled zeros.
pub const NEAR_RADIUS: f64 = 1.0 / 16.0;

/// `beta_k = arcsin(2^-k) / arccos(2^-k)`.
pub fn beta_k(k: u32) -> f64 {
    let x = 2f64.powi(-(k as i32));
    x.asin() / x.acos()
}

/// The integer `k0 >= 0` with `2^{-k0-1} <= eps < 2^{-k0}`, for `0 < eps < 1`.
pub fn k0(eps: f64) -> Result<u32> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::param(format!("k0 needs 0 < eps < 1, got {eps}")));
    }
    let mut k = ((-eps.log2()).ceil() - 1.0).max(0.0) as i32;
    // log2 rounding can be off by one at exact powers of two
    while eps >= 2f64.powi(-k) {
        k -= 1;
    }
    while eps < 2f64.powi(-k - 1) {
        k += 1;
    }
    Ok(k as u32)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DyadicLevel {
    pub k: u32,
    /// Zeros in `Z_k \ Z_{k-1}`, counted with multiplicity.
    pub count: u64,
    /// `sum (1-|z|) |z - zeta0|^{beta_{k+1}}` over the level.
    pub level_sum: f64,
    pub beta_next: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DyadicProfile {
    pub zeta0: Complex64,
    pub levels: Vec<DyadicLevel>,
    /// Zeros with `|z - zeta0| < 1/16`.
    pub plus_count: u64,
    pub minus_count: u64,
}

/// Splits the zeros near `zeta0` into the layers `S_{2^k}(zeta0) \ S_{2^{k-1}}(zeta0)`.
pub fn dyadic_profile(zeros: &ZeroSet, zeta0: Complex64) -> Result<DyadicProfile> {
    let angle = StolzAngle::new(zeta0, 2.0)?;
    let mut plus_count = 0;
    let mut minus_count = 0;
    let mut levels: Vec<DyadicLevel> = Vec::new();
    for rec in zeros.iter() {
        let z = rec.location;
        require_disk(z)?;
        let m = rec.multiplicity as u64;
        let d = (z - zeta0).norm();
        if d >= NEAR_RADIUS {
            minus_count += m;
            continue;
        }
        plus_count += m;
        let ratio = angle.ratio(z);
        // smallest k >= 1 with ratio < 2^k
        let mut k = ratio.log2().floor().max(0.0) as u32 + 1;
        while k > 1 && ratio < 2f64.powi(k as i32 - 1) {
            k -= 1;
        }
        while ratio >= 2f64.powi(k as i32) {
            k += 1;
        }
        while levels.len() < k as usize {
            let j = levels.len() as u32 + 1;
            levels.push(DyadicLevel {
                k: j,
                count: 0,
                level_sum: 0.0,
                beta_next: beta_k(j + 1),
            });
        }
        let level = &mut levels[k as usize - 1];
        level.count += m;
        level.level_sum += m as f64 * (1.0 - z.norm()) * d.powf(level.beta_next);
    }
    Ok(DyadicProfile {
        zeta0,
        levels,
        plus_count,
        minus_count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn beta_values() {
        assert_abs_diff_eq!(beta_k(1), 0.5, epsilon = 1e-15);
        for k in 1..=30 {
            let scaled = 2f64.powi(k) * beta_k(k as u32);
            assert!((2.0 / PI..=1.5).contains(&scaled), "k = {k}: {scaled}");
        }
        for k in 1..30 {
            assert!(beta_k(k + 1) < beta_k(k));
        }
    }

    #[test]
    fn k0_values() {
        assert_eq!(k0(0.1).unwrap(), 3);
        assert_eq!(k0(0.5).unwrap(), 0);
        assert_eq!(k0(0.25).unwrap(), 1);
        assert_eq!(k0(0.2499).unwrap(), 2);
        assert!(k0(0.0).is_err());
        assert!(k0(1.0).is_err());
        for k in 0..40 {
            let eps = 2f64.powi(-k - 1);
            assert_eq!(k0(eps).unwrap(), k as u32);
            assert_eq!(k0(eps * 1.5).unwrap(), k as u32);
        }
    }

    #[test]
    fn radial_zeros_sit_in_the_first_level() {
        let one = Complex64::new(1.0, 0.0);
        let zeros: Vec<Complex64> = (5..=12).map(|k| Complex64::new(1.0 - 2f64.powi(-k), 0.0)).collect();
        let far = Complex64::new(0.2, 0.0);
        let mut all = zeros.clone();
        all.push(far);
        let prof = dyadic_profile(&ZeroSet::from_points(&all), one).unwrap();
        assert_eq!(prof.plus_count, 8);
        assert_eq!(prof.minus_count, 1);
        assert_eq!(prof.levels.len(), 1);
        assert_eq!(prof.levels[0].count, 8);
        let oracle: f64 = (5..=12).map(|k| 2f64.powi(-k) * 2f64.powf(-k as f64 * beta_k(2))).sum();
        assert_abs_diff_eq!(prof.levels[0].level_sum, oracle, epsilon = 1e-15);
    }

    #[test]
    fn tangential_zeros_climb_levels() {
        // z = (1-h) e^{i t} with t >> h has ratio ~ t/h
        let one = Complex64::new(1.0, 0.0);
        let z = Complex64::from_polar(1.0 - 1e-4, 0.01);
        let prof = dyadic_profile(&ZeroSet::from_points(&[z]), one).unwrap();
        let ratio = StolzAngle::new(one, 2.0).unwrap().ratio(z);
        let k = prof.levels.len() as i32;
        assert!(2f64.powi(k - 1) <= ratio && ratio < 2f64.powi(k));
        assert_eq!(prof.levels.iter().map(|l| l.count).sum::<u64>(), 1);
    }
}
