use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::EnvelopeSpec;
use crate::conformal::cayley_to_halfplane;
use crate::error::{Error, Result};
use crate::math::plus_part;
use crate::parallel::{self, Execution};
use crate::zerofind::{AnalyticFn, DomainTag};

/// Polar sampling grid for growth-constant estimates.
///
/// Radii are `0` and `1 - 2^{-(i/per_level + offset)}` for `i = 0..=levels*per_level`;
/// angles are `2 pi m / angles`. Doubling `per_level` or `angles` gives a
/// superset of the previous grid. Half-plane and cut-plane grids are the
/// images under `z -> i(1+z)/(1-z)` and then `w -> w^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct KGrid {
    pub levels: u32,
    pub per_level: u32,
    pub offset: f64,
    pub angles: u32,
    /// Grid points closer than this to a singular point are skipped.
    pub puncture: f64,
}

impl Default for KGrid {
    fn default() -> Self {
        Self {
            levels: 12,
            per_level: 1,
            offset: 0.5,
            angles: 512,
            puncture: 1e-6,
        }
    }
}

impl KGrid {
    pub fn validate(&self) -> Result<()> {
        if self.per_level == 0 || self.angles == 0 {
            return Err(Error::param("grid needs at least one radius per level and one angle"));
        }
        if !(self.offset >= 0.0) || !self.offset.is_finite() {
            return Err(Error::param("grid offset must be finite and nonnegative"));
        }
        if !(self.puncture >= 0.0) {
            return Err(Error::param("puncture radius must be nonnegative"));
        }
        Ok(())
    }

    pub fn radii(&self) -> Vec<f64> {
        let n = self.levels * self.per_level;
        std::iter::once(0.0)
            .chain((0..=n).map(|i| 1.0 - 2f64.powf(-(i as f64 / self.per_level as f64 + self.offset))))
            .filter(|r| *r < 1.0)
            .collect()
    }

    /// Disk grid points, radius-major.
    pub fn disk_points(&self) -> Vec<Complex64> {
        let radii = self.radii();
        let mut out = Vec::with_capacity(1 + (radii.len() - 1) * self.angles as usize);
        out.push(Complex64::new(0.0, 0.0));
        for &r in &radii[1..] {
            for m in 0..self.angles {
                out.push(Complex64::from_polar(r, TAU * m as f64 / self.angles as f64));
            }
        }
        out
    }

    pub fn points(&self, domain: DomainTag) -> Vec<Complex64> {
        let disk = self.disk_points();
        match domain {
            DomainTag::Disk => disk,
            DomainTag::HalfPlane => disk.into_iter().filter_map(|z| cayley_to_halfplane(z).ok()).collect(),
            DomainTag::Cut => disk
                .into_iter()
                .filter_map(|z| cayley_to_halfplane(z).ok())
                .map(|w| w * w)
                .filter(|l| !(l.im == 0.0 && l.re >= 0.0))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KEstimate {
    pub k_hat: f64,
    /// First grid point attaining the supremum; `None` when `k_hat = 0`.
    pub argmax: Option<Complex64>,
    /// Grid points actually evaluated (after puncturing).
    pub points: usize,
}

/// `K_hat = sup plus_part(log|f|) / Phi` over the grid, with `Phi` the envelope shape.
pub fn estimate_k(f: &AnalyticFn, env: &EnvelopeSpec, grid: &KGrid, exec: Execution) -> Result<KEstimate> {
    env.validate()?;
    grid.validate()?;
    if f.domain() != env.domain() {
        return Err(Error::DomainMismatch {
            left: f.domain(),
            right: env.domain(),
        });
    }
    let pts = grid.points(env.domain());
    let fsing = f.singular_points().to_vec();
    let vals: Vec<Result<Option<f64>>> = parallel::map(exec, &pts, |&z| {
        let near_f = fsing.iter().any(|s| (z - s).norm() < grid.puncture.max(1e-12));
        if near_f || env.singular_distance(z) < grid.puncture {
            return Ok(None);
        }
        let phi = env.shape(z);
        if !(phi.is_finite() && phi > 0.0) {
            return Ok(None);
        }
        let la = f.log_abs(z)?;
        Ok(Some(plus_part(la) / phi))
    });
    let mut best = 0.0;
    let mut argmax = None;
    let mut count = 0;
    for (z, v) in pts.iter().zip(vals) {
        if let Some(x) = v? {
            count += 1;
            if x > best {
                best = x;
                argmax = Some(*z);
            }
        }
    }
    Ok(KEstimate {
        k_hat: best,
        argmax,
        points: count,
    })
}
