//! Subcommand implementations.
//!
//! Each runner writes its files below the output directory and returns one
//! [`ExperimentRecord`] per experiment. Configuration problems surface as
//! [`LabError::Config`] before anything is written; computational errors are
//! recorded in `errors.csv` and mark the experiment as failed.

use std::path::{Path, PathBuf};
use std::time::Instant;

use blaschke_core::conformal::{cayley_to_halfplane, cut_to_halfplane, StolzMap};
use blaschke_core::sums::{
    dyadic_profile, verify_theorem, EnvelopeSpec, SumOptions, SumReport, VerifyOptions, VerifyReport,
};
use blaschke_core::zerofind::{locate_zeros_with, LocateOptions, ZeroRecord, ZeroSet};
use blaschke_core::{parallel, Complex64, Error, Execution};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{rect, ExperimentConfig, MapKind};
use crate::error::{LabError, LabResult};
use crate::family;
use crate::output::{self, num, ExperimentRecord, Manifest, OutputDir, Status};
use crate::suites::{self, SuiteResult};

/// Resolved inputs shared by all subcommands.
#[derive(Debug, Clone)]
pub struct RunContext {
    pub config: Option<ExperimentConfig>,
    pub config_hash: Option<String>,
    pub out: Option<PathBuf>,
    pub exec: Execution,
}

impl RunContext {
    pub fn new(config: Option<ExperimentConfig>, out: Option<PathBuf>) -> LabResult<Self> {
        let config_hash = match &config {
            Some(c) => Some(output::sha256_hex(&serde_json::to_vec(c)?)),
            None => None,
        };
        Ok(Self {
            config,
            config_hash,
            out,
            exec: Execution::default(),
        })
    }

    fn config(&self) -> LabResult<&ExperimentConfig> {
        self.config
            .as_ref()
            .ok_or_else(|| LabError::config("this subcommand needs --config"))
    }

    fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("out"))
    }

    fn locate(&self) -> LabResult<LocateOptions> {
        let run = &self.config()?.run;
        Ok(LocateOptions::new(run.tol, run.max_depth).with_execution(self.exec))
    }
}

/// What a runner hands back to the binary.
#[derive(Debug)]
pub struct RunOutcome {
    pub manifest: Option<Manifest>,
    pub pass: bool,
    pub lines: Vec<String>,
}

impl RunOutcome {
    pub fn exit_code(&self) -> u8 {
        if self.pass {
            0
        } else {
            1
        }
    }
}

struct Collector {
    records: Vec<ExperimentRecord>,
    errors: Vec<(String, String)>,
}

impl Collector {
    fn new() -> Self {
        Self {
            records: Vec::new(),
            errors: Vec::new(),
        }
    }

    fn push(&mut self, name: &str, started: Instant, result: LabResult<bool>) -> LabResult<()> {
        let (status, detail) = match result {
            Ok(true) => (Status::Pass, None),
            Ok(false) => (Status::Fail, None),
            Err(e @ LabError::Config(_)) => return Err(e),
            Err(e) => {
                self.errors.push((name.to_string(), e.to_string()));
                (Status::Error, Some(e.to_string()))
            }
        };
        self.records.push(ExperimentRecord {
            index: self.records.len(),
            name: name.to_string(),
            status,
            wall_time_s: started.elapsed().as_secs_f64(),
            detail,
        });
        Ok(())
    }

    fn finish(self, dir: &mut OutputDir, command: &str, ctx: &RunContext, seed: Option<u64>) -> LabResult<RunOutcome> {
        if !self.errors.is_empty() {
            dir.write_csv(
                "errors.csv",
                output::ERRORS_CSV,
                self.errors.into_iter().map(|(a, b)| vec![a, b]),
            )?;
        }
        let manifest = output::finish(dir, command, ctx.config_hash.clone(), seed, self.records)?;
        Ok(RunOutcome {
            pass: manifest.passed(),
            manifest: Some(manifest),
            lines: Vec::new(),
        })
    }
}

fn region_name(r: &Option<blaschke_core::sums::Region>) -> String {
    r.and_then(|r| serde_json::to_value(r).ok())
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}

fn write_report(dir: &mut OutputDir, stem: &str, rep: &SumReport) -> LabResult<()> {
    dir.write_json(&format!("{stem}.json"), "sum_report", rep)?;
    dir.write_csv(
        &format!("{stem}.csv"),
        output::PER_ZERO_CSV,
        rep.per_zero.iter().map(|t| {
            vec![
                num(t.zero.re),
                num(t.zero.im),
                t.multiplicity.to_string(),
                num(t.term),
                region_name(&t.region),
            ]
        }),
    )
}

fn trace_rows(rep: &VerifyReport) -> impl Iterator<Item = Vec<String>> + '_ {
    rep.rows.iter().map(|r| {
        vec![
            r.n.to_string(),
            num(r.epsilon),
            num(r.total),
            num(r.k_hat),
            num(r.ratio),
        ]
    })
}

/// The report without the per-row sum reports, for `verify_report.json`.
fn summary(rep: &VerifyReport) -> VerifyReport {
    VerifyReport {
        reports: Vec::new(),
        ..rep.clone()
    }
}

fn verify_options(
    cfg: &ExperimentConfig,
    ctx: &RunContext,
    probe: bool,
    region: Option<[f64; 4]>,
    max_spread: f64,
    p0_sharp: bool,
) -> LabResult<VerifyOptions> {
    Ok(VerifyOptions {
        probe,
        locate_region: region.map(rect).transpose()?,
        locate: ctx.locate()?,
        sum: SumOptions {
            exec: ctx.exec,
            p0_sharp,
            ..SumOptions::default()
        },
        grid: cfg.grid,
        max_spread,
    })
}

/// Sum reports per (instance, epsilon), the ratio trace and a summary report.
pub fn run_verify(ctx: &RunContext) -> LabResult<RunOutcome> {
    let cfg = ctx.config()?;
    let v = cfg
        .verify
        .as_ref()
        .ok_or_else(|| LabError::config("missing [verify] section"))?;
    cfg.check_domains(v.condition)?;
    let opts = verify_options(cfg, ctx, v.probe, v.locate_region, v.max_spread, v.p0_sharp)?;
    let mut dir = OutputDir::create(&ctx.out_dir())?;
    let mut col = Collector::new();
    let t = Instant::now();
    let result = (|| -> LabResult<bool> {
        let insts = family::instances(cfg.family()?, cfg.run.seed)?;
        let rep = verify_theorem(&insts, cfg.envelope()?, &v.epsilons, v.condition, &opts)?;
        for (row, sum) in rep.rows.iter().zip(&rep.reports) {
            write_report(&mut dir, &format!("reports/n{}_eps{}", row.n, num(row.epsilon)), sum)?;
        }
        dir.write_csv("trace.csv", output::TRACE_CSV, trace_rows(&rep))?;
        dir.write_json("verify_report.json", "verify_report", &summary(&rep))?;
        Ok(rep.pass)
    })();
    col.push(&cfg.run.name, t, result)?;
    col.finish(&mut dir, "verify", ctx, cfg.run.seed)
}

fn map_rows(cfg: &ExperimentConfig) -> LabResult<(output::CsvSchema, Vec<Vec<String>>, bool)> {
    let m = cfg
        .map
        .as_ref()
        .ok_or_else(|| LabError::config("missing [map] section"))?;
    let n = m.n;
    let mid = |i: usize| (i as f64 + 0.5) / n as f64;
    let mut rows = Vec::with_capacity(n * n);
    let mut pass = true;
    let row = |z: Complex64, w: Complex64, d: f64| vec![num(z.re), num(z.im), num(w.re), num(w.im), num(d)];
    match m.kind {
        MapKind::Phi => {
            let map = StolzMap::with_aperture(m.aperture)?;
            for j in 0..n {
                let theta = std::f64::consts::PI * (2.0 * mid(j) - 1.0);
                let edge = map.angle().boundary_radius(theta);
                for i in 0..n {
                    let z = Complex64::from_polar(mid(i) * edge, theta);
                    let s = map.sample(z)?;
                    pass &= s.output.norm() < 1.0;
                    rows.push(row(s.input, s.output, s.derivative_abs));
                }
            }
            Ok((output::MAP_CSV, rows, pass))
        }
        MapKind::Psi => {
            let map = StolzMap::with_aperture(m.aperture)?;
            let tol = cfg.run.tol.min(1e-12);
            for i in 0..n {
                for j in 0..n {
                    let w = Complex64::from_polar(0.95 * mid(i), std::f64::consts::TAU * j as f64 / n as f64);
                    let z = map.psi(w, tol)?;
                    let (back, d) = map.phi_with_derivative(z)?;
                    let err = (back - w).norm();
                    pass &= err < 1e-9;
                    let mut r = row(w, z, 1.0 / d.norm());
                    r.push(num(err));
                    rows.push(r);
                }
            }
            Ok((output::MAP_PSI_CSV, rows, pass))
        }
        MapKind::Cayley => {
            for i in 0..n {
                for j in 0..n {
                    let z = Complex64::from_polar(0.99 * mid(i), std::f64::consts::TAU * j as f64 / n as f64);
                    let w = cayley_to_halfplane(z)?;
                    pass &= w.im > 0.0;
                    rows.push(row(z, w, 2.0 / (Complex64::new(1.0, 0.0) - z).norm_sqr()));
                }
            }
            Ok((output::MAP_CSV, rows, pass))
        }
        MapKind::Cut => {
            for i in 0..n {
                for j in 0..n {
                    let lam = Complex64::from_polar(m.extent * mid(i), std::f64::consts::TAU * mid(j));
                    let w = cut_to_halfplane(lam)?;
                    pass &= w.im > 0.0;
                    rows.push(row(lam, w, 1.0 / (2.0 * w.norm())));
                }
            }
            Ok((output::MAP_CSV, rows, pass))
        }
    }
}

/// Tabulates one conformal map on a deterministic `n x n` grid.
pub fn run_map(ctx: &RunContext) -> LabResult<RunOutcome> {
    let cfg = ctx.config()?;
    cfg.map
        .as_ref()
        .ok_or_else(|| LabError::config("missing [map] section"))?;
    let mut dir = OutputDir::create(&ctx.out_dir())?;
    let mut col = Collector::new();
    let t = Instant::now();
    let result = map_rows(cfg).and_then(|(schema, rows, pass)| {
        dir.write_csv("map.csv", schema, rows)?;
        Ok(pass)
    });
    col.push(&cfg.run.name, t, result)?;
    col.finish(&mut dir, "map", ctx, cfg.run.seed)
}

fn zero_row(z: &ZeroRecord) -> Vec<String> {
    vec![
        num(z.location.re),
        num(z.location.im),
        z.multiplicity.to_string(),
        num(z.radius),
        "0".into(),
    ]
}

/// Blind zero search for `f_N` in the configured rectangle.
pub fn run_zeros(ctx: &RunContext) -> LabResult<RunOutcome> {
    let cfg = ctx.config()?;
    let z = cfg
        .zeros
        .as_ref()
        .ok_or_else(|| LabError::config("missing [zeros] section"))?;
    let fam = cfg.family()?;
    let region = rect(z.region)?;
    let n = z.n.unwrap_or(fam.n_max);
    let opts = ctx.locate()?;
    let mut dir = OutputDir::create(&ctx.out_dir())?;
    let mut col = Collector::new();
    let t = Instant::now();
    let result = (|| -> LabResult<bool> {
        let f = family::function(fam, n, cfg.run.seed)?.without_known_zeros();
        let (rows, pass, err) = match locate_zeros_with(&f, region, &opts) {
            Ok(set) => (set.iter().map(zero_row).collect::<Vec<_>>(), true, None),
            Err(Error::Unresolved(u)) => {
                let mut rows: Vec<_> = u.partial.iter().map(zero_row).collect();
                for cell in &u.cells {
                    let c = cell.cell.center();
                    rows.push(vec![
                        num(c.re),
                        num(c.im),
                        cell.winding.map(|w| w.to_string()).unwrap_or_default(),
                        num(cell.cell.diameter() / 2.0),
                        "1".into(),
                    ]);
                }
                (rows, false, Some(Error::Unresolved(u)))
            }
            Err(e) => return Err(e.into()),
        };
        dir.write_csv("zeros.csv", output::ZEROS_CSV, rows)?;
        match err {
            Some(e) => Err(e.into()),
            None => Ok(pass),
        }
    })();
    col.push(&cfg.run.name, t, result)?;
    col.finish(&mut dir, "zeros", ctx, cfg.run.seed)
}

fn anchor_point(env: &EnvelopeSpec) -> Complex64 {
    let first = match env {
        EnvelopeSpec::Distance { e, .. } | EnvelopeSpec::Product { e, .. } | EnvelopeSpec::ClosedSet { e, .. } => {
            e.points().first().copied()
        }
        _ => None,
    };
    first.unwrap_or(Complex64::new(1.0, 0.0))
}

fn mc_rows(
    seed: u64,
    eps: &[f64],
    trials: usize,
    set_size: usize,
    env: &EnvelopeSpec,
    opts: &SumOptions,
) -> LabResult<(Vec<Vec<String>>, bool)> {
    let EnvelopeSpec::Distance { p, r, .. } = env else {
        return Err(LabError::config(
            "sweep: the Monte-Carlo sweep needs a distance envelope",
        ));
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    let mut pass = true;
    for &tau in eps {
        for trial in 0..trials {
            let size = rng.random_range(1..=set_size);
            let pts: Vec<Complex64> = (0..size)
                .map(|_| {
                    let rad = rng.random::<f64>().sqrt();
                    Complex64::from_polar(rad.min(1.0 - 1e-12), std::f64::consts::TAU * rng.random::<f64>())
                })
                .collect();
            let zeros = ZeroSet::from_points(&pts);
            let cs = blaschke_core::sums::corollary_sum(&zeros, *p, *r, tau, opts)?.total;
            let ts = blaschke_core::sums::two_region_sum(&zeros, *p, *r, tau, opts)?.total;
            let holds = cs <= ts * (1.0 + 1e-12);
            pass &= holds;
            rows.push(vec![
                trial.to_string(),
                num(tau),
                size.to_string(),
                num(cs),
                num(ts),
                num(cs / ts),
                u8::from(holds).to_string(),
            ]);
        }
    }
    Ok((rows, pass))
}

/// One verification per epsilon in a worker pool, plus dyadic level sums and
/// the optional Monte-Carlo dominance check.
pub fn run_sweep(ctx: &RunContext) -> LabResult<RunOutcome> {
    let cfg = ctx.config()?;
    let s = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| LabError::config("missing [sweep] section"))?;
    cfg.check_domains(s.condition)?;
    let env = cfg.envelope()?;
    let locate_region = cfg.verify.as_ref().and_then(|v| v.locate_region);
    let opts = verify_options(
        cfg,
        ctx,
        false,
        locate_region,
        cfg.verify.as_ref().map_or(10.0, |v| v.max_spread),
        false,
    )?;
    let mut dir = OutputDir::create(&ctx.out_dir())?;
    let mut col = Collector::new();

    let t = Instant::now();
    let insts = match family::instances(cfg.family()?, cfg.run.seed) {
        Ok(i) => i,
        Err(e) => {
            col.push("instances", t, Err(e))?;
            return col.finish(&mut dir, "sweep", ctx, cfg.run.seed);
        }
    };

    let results = parallel::map(ctx.exec, &s.epsilons, |&eps| {
        let t = Instant::now();
        (t, verify_theorem(&insts, env, &[eps], s.condition, &opts))
    });
    let mut trace = Vec::new();
    for (&eps, (t, res)) in s.epsilons.iter().zip(results) {
        let name = format!("eps{}", num(eps));
        let r = res.map_err(LabError::from).and_then(|rep| {
            trace.extend(trace_rows(&rep));
            dir.write_json(&format!("sweep/{name}.json"), "verify_report", &summary(&rep))?;
            Ok(rep.pass)
        });
        col.push(&name, t, r)?;
    }
    dir.write_csv("sweep.csv", output::TRACE_CSV, trace)?;

    if s.condition.domain() == blaschke_core::zerofind::DomainTag::Disk {
        let t = Instant::now();
        let zeta0 = anchor_point(env);
        let r = (|| -> LabResult<bool> {
            let mut rows = Vec::new();
            for inst in &insts {
                let zeros = match (inst.f.known_zeros(), opts.locate_region) {
                    (Some(z), _) => z.clone(),
                    (None, Some(region)) => locate_zeros_with(&inst.f, region, &opts.locate)?,
                    (None, None) => continue,
                };
                let prof = dyadic_profile(&zeros, zeta0)?;
                for l in &prof.levels {
                    rows.push(vec![
                        inst.n.to_string(),
                        l.k.to_string(),
                        l.count.to_string(),
                        num(l.level_sum),
                        num(l.beta_next),
                    ]);
                }
            }
            dir.write_csv("levels.csv", output::LEVELS_CSV, rows)?;
            Ok(true)
        })();
        col.push("levels", t, r)?;
    }

    if s.monte_carlo {
        let t = Instant::now();
        let seed = cfg
            .run
            .seed
            .ok_or_else(|| LabError::config("sweep: the Monte-Carlo sweep needs run.seed"))?;
        let r = mc_rows(seed, &s.epsilons, s.trials, s.set_size, env, &opts.sum).and_then(|(rows, pass)| {
            dir.write_csv("mc_dominance.csv", output::DOMINANCE_CSV, rows)?;
            Ok(pass)
        });
        col.push("mc_dominance", t, r)?;
    }
    col.finish(&mut dir, "sweep", ctx, cfg.run.seed)
}

/// Runs the invariant suites; files are written only when an output directory is given.
pub fn run_selftest(out: Option<&Path>, seed: Option<u64>) -> LabResult<RunOutcome> {
    let results: Vec<SuiteResult> = suites::selftest(seed.unwrap_or(suites::DEFAULT_SEED));
    let lines: Vec<String> = results.iter().map(SuiteResult::line).collect();
    let pass = results.iter().all(|r| r.pass);
    let manifest = match out {
        Some(path) => {
            let mut dir = OutputDir::create(path)?;
            dir.write_csv(
                "selftest.csv",
                output::SELFTEST_CSV,
                results
                    .iter()
                    .map(|r| vec![r.name.to_string(), u8::from(r.pass).to_string(), r.detail.clone()]),
            )?;
            let records = results
                .iter()
                .enumerate()
                .map(|(index, r)| ExperimentRecord {
                    index,
                    name: r.name.to_string(),
                    status: if r.pass { Status::Pass } else { Status::Fail },
                    wall_time_s: r.elapsed.as_secs_f64(),
                    detail: None,
                })
                .collect();
            Some(output::finish(&mut dir, "selftest", None, seed, records)?)
        }
        None => None,
    };
    Ok(RunOutcome { manifest, pass, lines })
}
