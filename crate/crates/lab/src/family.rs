//! Builds the function instances `f_N` described by a [`FamilySpec`].

use blaschke_core::sums::Instance;
use blaschke_core::zerofind::{blaschke_product, envelope_exponential, product, AnalyticFn, DomainTag};
use blaschke_core::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{DomainChoice, FamilySpec, ZeroFamily};
use crate::error::{LabError, LabResult};

/// Zeros of `f_N` with repetition for multiplicity, as disk points.
pub fn zeros_for(fam: &FamilySpec, n: usize, seed: Option<u64>) -> LabResult<Vec<Complex64>> {
    Ok(match fam.zeros {
        ZeroFamily::None => Vec::new(),
        ZeroFamily::Radial => (1..=n)
            .map(|k| Complex64::new(1.0 - 2f64.powi(-(k as i32)), 0.0))
            .collect(),
        ZeroFamily::Points => fam.points[..n].iter().map(|p| Complex64::new(p[0], p[1])).collect(),
        ZeroFamily::Random => {
            let seed = seed.ok_or_else(|| LabError::config("a random family needs run.seed"))?;
            random_points(seed, n, fam.radius, fam.max_multiplicity)
        }
    })
}

/// `n` distinct seeded points in `|z| < radius`, each repeated `1..=max_mult` times.
/// The first `n` points do not depend on later draws, so truncations nest.
pub fn random_points(seed: u64, n: usize, radius: f64, max_mult: u32) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for _ in 0..n {
        let r = radius * rng.random::<f64>().sqrt();
        let t = std::f64::consts::TAU * rng.random::<f64>();
        let m = rng.random_range(1..=max_mult.max(1));
        let z = Complex64::from_polar(r, t);
        out.extend(std::iter::repeat_n(z, m as usize));
    }
    out
}

/// `f_N` on the disk, before any domain transfer.
pub fn disk_function(fam: &FamilySpec, n: usize, seed: Option<u64>) -> LabResult<AnalyticFn> {
    let zeros = zeros_for(fam, n, seed)?;
    let base = if zeros.is_empty() {
        AnalyticFn::constant(Complex64::new(1.0, 0.0), DomainTag::Disk)
    } else {
        blaschke_product(&zeros)?
    };
    let f = match fam.factor {
        Some(kind) => product(&base, &envelope_exponential(kind)?)?,
        None => base,
    };
    Ok(if fam.known_zeros { f } else { f.without_known_zeros() })
}

pub fn function(fam: &FamilySpec, n: usize, seed: Option<u64>) -> LabResult<AnalyticFn> {
    let f = disk_function(fam, n, seed)?;
    Ok(match fam.domain {
        DomainChoice::Disk => f,
        DomainChoice::HalfPlane => f.to_halfplane()?,
        DomainChoice::Cut => f.to_halfplane()?.to_cut()?,
    })
}

pub fn instances(fam: &FamilySpec, seed: Option<u64>) -> LabResult<Vec<Instance>> {
    (fam.n_min..=fam.n_max)
        .map(|n| {
            Ok(Instance {
                n,
                f: function(fam, n, seed)?,
            })
        })
        .collect()
}
