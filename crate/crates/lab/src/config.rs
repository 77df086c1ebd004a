//! TOML experiment configuration.
//!
//! Every section is optional; each subcommand checks for the sections it
//! needs. Defaults are listed on the fields and in `configs/README.md`.

use std::path::Path;

use blaschke_core::sums::{Condition, EnvelopeSpec, KGrid};
use blaschke_core::zerofind::{DomainTag, EnvelopeKind, Rect};
use serde::{Deserialize, Serialize};

use crate::error::{LabError, LabResult};

/// Version of the JSON report layout, written into every report.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub run: RunSection,
    pub family: Option<FamilySpec>,
    pub envelope: Option<EnvelopeSpec>,
    pub verify: Option<VerifySection>,
    pub map: Option<MapSection>,
    pub zeros: Option<ZerosSection>,
    pub sweep: Option<SweepSection>,
    #[serde(default)]
    pub grid: KGrid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    /// Label used in the manifest. Default `"experiment"`.
    #[serde(default = "default_name")]
    pub name: String,
    /// Required by random families and Monte-Carlo sweeps.
    pub seed: Option<u64>,
    /// Zero-localization tolerance. Default `1e-10`.
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Maximum quadtree depth. Default 60.
    #[serde(default = "default_depth")]
    pub max_depth: usize,
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            name: default_name(),
            seed: None,
            tol: default_tol(),
            max_depth: default_depth(),
        }
    }
}

fn default_name() -> String {
    "experiment".to_string()
}
fn default_tol() -> f64 {
    1e-10
}
fn default_depth() -> usize {
    60
}
fn default_one() -> usize {
    1
}
fn default_max_mult() -> u32 {
    1
}
fn default_radius() -> f64 {
    0.9
}
fn default_true() -> bool {
    true
}
fn default_spread() -> f64 {
    10.0
}
fn default_aperture() -> f64 {
    2.0
}
fn default_map_n() -> usize {
    64
}
fn default_cut_extent() -> f64 {
    4.0
}
fn default_trials() -> usize {
    500
}
fn default_set_size() -> usize {
    20
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroFamily {
    /// No zeros; the instance is the factor alone (or the constant 1).
    #[default]
    None,
    /// `a_k = 1 - 2^{-k}`, `k = 1..N`.
    Radial,
    /// The first `N` entries of `points`; repeated entries raise the multiplicity.
    Points,
    /// `N` seeded uniform points in `|z| < radius`, nested in `N`.
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainChoice {
    #[default]
    Disk,
    HalfPlane,
    Cut,
}

impl DomainChoice {
    pub fn tag(self) -> DomainTag {
        match self {
            DomainChoice::Disk => DomainTag::Disk,
            DomainChoice::HalfPlane => DomainTag::HalfPlane,
            DomainChoice::Cut => DomainTag::Cut,
        }
    }
}

/// A family `f_N = B_N * factor` of test functions, `N` in `n_min..=n_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    #[serde(default)]
    pub zeros: ZeroFamily,
    /// Default 1.
    #[serde(default = "default_one")]
    pub n_min: usize,
    /// Default 1.
    #[serde(default = "default_one")]
    pub n_max: usize,
    #[serde(default)]
    pub points: Vec<[f64; 2]>,
    /// Random family: multiplicities drawn from `1..=max_multiplicity`. Default 1.
    #[serde(default = "default_max_mult")]
    pub max_multiplicity: u32,
    /// Random family: zeros in `|z| < radius`. Default 0.9.
    #[serde(default = "default_radius")]
    pub radius: f64,
    /// Optional zero-free factor.
    pub factor: Option<EnvelopeKind>,
    /// Domain the family is transplanted to. Default `disk`.
    #[serde(default)]
    pub domain: DomainChoice,
    /// Use the exact zeros instead of locating them. Default true.
    #[serde(default = "default_true")]
    pub known_zeros: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySection {
    pub condition: Condition,
    pub epsilons: Vec<f64>,
    /// Sharpness probe at `eps = 0`. Default false.
    #[serde(default)]
    pub probe: bool,
    /// `[x0, x1, y0, y1]`, used when zeros are located.
    pub locate_region: Option<[f64; 4]>,
    /// Default 10.
    #[serde(default = "default_spread")]
    pub max_spread: f64,
    /// Default false.
    #[serde(default)]
    pub p0_sharp: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapKind {
    Phi,
    Psi,
    Cayley,
    Cut,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSection {
    pub kind: MapKind,
    /// Stolz aperture for `phi` and `psi`. Default 2.
    #[serde(default = "default_aperture")]
    pub aperture: f64,
    /// Grid is `n x n`. Default 64.
    #[serde(default = "default_map_n")]
    pub n: usize,
    /// Radius of the polar grid for `cut`. Default 4.
    #[serde(default = "default_cut_extent")]
    pub extent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZerosSection {
    /// `[x0, x1, y0, y1]`.
    pub region: [f64; 4],
    /// Family member to search. Default `family.n_max`.
    pub n: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub condition: Condition,
    pub epsilons: Vec<f64>,
    /// Adds the seeded corollary/two-region comparison. Default false.
    #[serde(default)]
    pub monte_carlo: bool,
    /// Default 500.
    #[serde(default = "default_trials")]
    pub trials: usize,
    /// Maximum zeros per random set. Default 20.
    #[serde(default = "default_set_size")]
    pub set_size: usize,
}

pub fn rect(r: [f64; 4]) -> LabResult<Rect> {
    if r.iter().any(|x| !x.is_finite()) || r[0] >= r[1] || r[2] >= r[3] {
        return Err(LabError::config(format!(
            "region {r:?} must be [x0, x1, y0, y1] with x0 < x1, y0 < y1"
        )));
    }
    Ok(Rect::new(r[0], r[1], r[2], r[3]))
}

fn check_ladder(eps: &[f64], probe: bool, what: &str) -> LabResult<()> {
    if eps.is_empty() {
        return Err(LabError::config(format!("{what}: epsilon ladder is empty")));
    }
    for &e in eps {
        if !e.is_finite() || e < 0.0 {
            return Err(LabError::config(format!("{what}: invalid epsilon {e}")));
        }
        if e == 0.0 && !probe {
            return Err(LabError::config(format!(
                "{what}: epsilon 0 is only allowed with the sharpness probe enabled"
            )));
        }
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> LabResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| LabError::config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> LabResult<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| LabError::config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Schema checks that do not depend on the subcommand.
    pub fn validate(&self) -> LabResult<()> {
        if !(self.run.tol > 0.0) || !self.run.tol.is_finite() {
            return Err(LabError::config("run.tol must be positive"));
        }
        self.grid
            .validate()
            .map_err(|e| LabError::config(format!("grid: {e}")))?;
        if let Some(fam) = &self.family {
            if fam.n_min > fam.n_max {
                return Err(LabError::config(format!(
                    "family: N range {}..={} is empty",
                    fam.n_min, fam.n_max
                )));
            }
            match fam.zeros {
                ZeroFamily::Points if fam.n_max > fam.points.len() => {
                    return Err(LabError::config(format!(
                        "family: n_max = {} exceeds the {} listed points",
                        fam.n_max,
                        fam.points.len()
                    )));
                }
                ZeroFamily::Random => {
                    if self.run.seed.is_none() {
                        return Err(LabError::config("family: a random family needs run.seed"));
                    }
                    if fam.max_multiplicity == 0 || !(fam.radius > 0.0 && fam.radius < 1.0) {
                        return Err(LabError::config(
                            "family: need max_multiplicity >= 1 and 0 < radius < 1",
                        ));
                    }
                }
                _ => {}
            }
        }
        if let Some(env) = &self.envelope {
            env.validate().map_err(|e| LabError::config(format!("envelope: {e}")))?;
        }
        if let Some(v) = &self.verify {
            check_ladder(&v.epsilons, v.probe, "verify")?;
            if let Some(r) = v.locate_region {
                rect(r)?;
            }
            if !(v.max_spread > 1.0) {
                return Err(LabError::config("verify.max_spread must exceed 1"));
            }
        }
        if let Some(m) = &self.map {
            if m.n == 0 || !(m.aperture > 1.0) || !(m.extent > 0.0) {
                return Err(LabError::config("map: need n >= 1, aperture > 1 and extent > 0"));
            }
        }
        if let Some(z) = &self.zeros {
            rect(z.region)?;
        }
        if let Some(s) = &self.sweep {
            check_ladder(&s.epsilons, false, "sweep")?;
            if s.monte_carlo {
                if self.run.seed.is_none() {
                    return Err(LabError::config("sweep: the Monte-Carlo sweep needs run.seed"));
                }
                if s.trials == 0 || s.set_size == 0 {
                    return Err(LabError::config("sweep: trials and set_size must be positive"));
                }
                if !matches!(self.envelope, Some(EnvelopeSpec::Distance { .. })) {
                    return Err(LabError::config(
                        "sweep: the Monte-Carlo sweep needs a distance envelope",
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn family(&self) -> LabResult<&FamilySpec> {
        self.family
            .as_ref()
            .ok_or_else(|| LabError::config("missing [family] section"))
    }

    pub fn envelope(&self) -> LabResult<&EnvelopeSpec> {
        self.envelope
            .as_ref()
            .ok_or_else(|| LabError::config("missing [envelope] section"))
    }

    /// Checks that family, envelope and condition live on one domain.
    pub fn check_domains(&self, cond: Condition) -> LabResult<()> {
        let fam = self.family()?.domain.tag();
        let env = self.envelope()?.domain();
        if fam != env || cond.domain() != env {
            return Err(LabError::config(format!(
                "domain mismatch: family {fam:?}, envelope {env:?}, condition {:?}",
                cond.domain()
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const RADIAL: &str = r#"
[run]
name = "radial"

[family]
zeros = "radial"
n_min = 10
n_max = 10

[envelope]
form = "distance"
p = 1.0
q = 0.0
r = 1.0
e = { points = [[1.0, 0.0]] }
f = {}

[verify]
condition = { kind = "distance" }
epsilons = [0.1, 0.5]
"#;

    #[test]
    fn parses_with_defaults() {
        let cfg = ExperimentConfig::parse(RADIAL).unwrap();
        assert_eq!(cfg.run.tol, 1e-10);
        assert_eq!(cfg.grid, KGrid::default());
        assert!(cfg.family.as_ref().unwrap().known_zeros);
        cfg.check_domains(Condition::Distance).unwrap();
    }

    #[test]
    fn zero_epsilon_without_probe_is_rejected() {
        let text = RADIAL.replace("epsilons = [0.1, 0.5]", "epsilons = [0.0, 0.1]");
        assert!(matches!(ExperimentConfig::parse(&text), Err(LabError::Config(_))));
        let probe = text.replace("epsilons = [0.0, 0.1]", "epsilons = [0.0, 0.1]\nprobe = true");
        ExperimentConfig::parse(&probe).unwrap();
    }

    #[test]
    fn random_family_needs_seed() {
        let text = RADIAL.replace("zeros = \"radial\"", "zeros = \"random\"");
        assert!(ExperimentConfig::parse(&text).is_err());
        let seeded = text.replace("name = \"radial\"", "name = \"radial\"\nseed = 3");
        ExperimentConfig::parse(&seeded).unwrap();
    }

    #[test]
    fn empty_n_range_and_bad_points_rejected() {
        assert!(ExperimentConfig::parse(&RADIAL.replace("n_min = 10", "n_min = 11")).is_err());
        let off_circle = RADIAL.replace("[[1.0, 0.0]]", "[[0.5, 0.0]]");
        assert!(ExperimentConfig::parse(&off_circle).is_err());
        assert!(ExperimentConfig::parse(&RADIAL.replace("[verify]", "[verify]\nbogus = 1")).is_err());
    }

    #[test]
    fn monte_carlo_needs_seed() {
        let text = format!(
            "{RADIAL}\n[sweep]\ncondition = {{ kind = \"two_region\" }}\nepsilons = [0.5]\nmonte_carlo = true\n"
        );
        assert!(ExperimentConfig::parse(&text).is_err());
        let seeded = text.replace("name = \"radial\"", "name = \"radial\"\nseed = 1");
        ExperimentConfig::parse(&seeded).unwrap();
    }
}
