//! Output directory bookkeeping, CSV/JSON writers and the run manifest.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::SCHEMA_VERSION;
use crate::error::LabResult;

/// A frozen CSV layout; bump `version` whenever `columns` change.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CsvSchema {
    pub name: &'static str,
    pub version: u32,
    pub columns: &'static [&'static str],
}

pub const MAP_CSV: CsvSchema = CsvSchema {
    name: "map",
    version: 1,
    columns: &["re_in", "im_in", "re_out", "im_out", "deriv_abs"],
};
pub const MAP_PSI_CSV: CsvSchema = CsvSchema {
    name: "map_psi",
    version: 1,
    columns: &["re_in", "im_in", "re_out", "im_out", "deriv_abs", "roundtrip_err"],
};
pub const ZEROS_CSV: CsvSchema = CsvSchema {
    name: "zeros",
    version: 1,
    columns: &["re", "im", "multiplicity", "radius", "unresolved"],
};
pub const TRACE_CSV: CsvSchema = CsvSchema {
    name: "trace",
    version: 1,
    columns: &["n", "epsilon", "total", "k_hat", "ratio"],
};
pub const PER_ZERO_CSV: CsvSchema = CsvSchema {
    name: "per_zero",
    version: 1,
    columns: &["re", "im", "multiplicity", "term", "region"],
};
pub const LEVELS_CSV: CsvSchema = CsvSchema {
    name: "levels",
    version: 1,
    columns: &["n", "k", "count", "level_sum", "beta_next"],
};
pub const DOMINANCE_CSV: CsvSchema = CsvSchema {
    name: "mc_dominance",
    version: 1,
    columns: &["trial", "epsilon", "size", "corollary", "two_region", "ratio", "holds"],
};
pub const ERRORS_CSV: CsvSchema = CsvSchema {
    name: "errors",
    version: 1,
    columns: &["experiment", "error"],
};
pub const SELFTEST_CSV: CsvSchema = CsvSchema {
    name: "selftest",
    version: 1,
    columns: &["suite", "pass", "detail"],
};

/// Shortest round-trip form, exponent notation for very large or small
/// magnitudes; `inf`, `-inf` and `NaN` spelled out.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

/// Tracks every file written below `root`, in write order.
#[derive(Debug)]
pub struct OutputDir {
    root: PathBuf,
    files: Vec<String>,
    schemas: Vec<CsvSchema>,
}

impl OutputDir {
    pub fn create(root: &Path) -> LabResult<Self> {
        fs::create_dir_all(root)?;
        Ok(Self {
            root: root.to_path_buf(),
            files: Vec::new(),
            schemas: Vec::new(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn target(&mut self, rel: &str) -> LabResult<PathBuf> {
        let path = self.root.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        if !self.files.iter().any(|f| f == rel) {
            self.files.push(rel.to_string());
        }
        Ok(path)
    }

    /// Pretty JSON with a leading `schema_version` and `kind`.
    pub fn write_json<T: Serialize>(&mut self, rel: &str, kind: &str, body: &T) -> LabResult<()> {
        #[derive(Serialize)]
        struct Versioned<'a, T> {
            schema_version: u32,
            kind: &'a str,
            #[serde(flatten)]
            body: &'a T,
        }
        let mut text = serde_json::to_string_pretty(&Versioned {
            schema_version: SCHEMA_VERSION,
            kind,
            body,
        })?;
        text.push('\n');
        let path = self.target(rel)?;
        fs::write(path, text)?;
        Ok(())
    }

    pub fn write_csv<I>(&mut self, rel: &str, schema: CsvSchema, rows: I) -> LabResult<()>
    where
        I: IntoIterator<Item = Vec<String>>,
    {
        let path = self.target(rel)?;
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(schema.columns)?;
        for row in rows {
            debug_assert_eq!(row.len(), schema.columns.len());
            w.write_record(&row)?;
        }
        w.flush()?;
        if !self.schemas.contains(&schema) {
            self.schemas.push(schema);
        }
        Ok(())
    }

    pub fn digests(&self) -> LabResult<Vec<FileDigest>> {
        self.files
            .iter()
            .map(|rel| {
                let bytes = fs::read(self.root.join(rel))?;
                Ok(FileDigest {
                    path: rel.clone(),
                    sha256: sha256_hex(&bytes),
                    bytes: bytes.len() as u64,
                })
            })
            .collect()
    }

    pub fn schemas(&self) -> &[CsvSchema] {
        &self.schemas
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentRecord {
    pub index: usize,
    pub name: String,
    pub status: Status,
    pub wall_time_s: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config_hash: Option<String>,
    pub seed: Option<u64>,
    pub experiments: Vec<ExperimentRecord>,
    pub files: Vec<FileDigest>,
    pub csv_schemas: Vec<CsvSchema>,
}

impl Manifest {
    pub fn passed(&self) -> bool {
        self.experiments.iter().all(|e| e.status == Status::Pass)
    }
}

/// Writes `manifest.json` listing every file written so far.
pub fn finish(
    dir: &mut OutputDir,
    command: &str,
    config_hash: Option<String>,
    seed: Option<u64>,
    mut experiments: Vec<ExperimentRecord>,
) -> LabResult<Manifest> {
    experiments.sort_by_key(|e| e.index);
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command: command.to_string(),
        config_hash,
        seed,
        experiments,
        files: dir.digests()?,
        csv_schemas: dir.schemas().to_vec(),
    };
    dir.write_json("manifest.json", "manifest", &manifest)?;
    Ok(manifest)
}
