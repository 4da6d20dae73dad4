//! Pipeline stages, JSONL persistence and checkpoints.

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use intmod::chartable::{eigentable, self_transpose_search, EigenTable, SMatrixCandidate};
use intmod::criteria::{filter_type, local_verdict, Exclusion, LocalVerdict};
use intmod::fusion::FusionData;
use intmod::modular::{amv_modulus, modular_data_from_candidates, ModularDatum};
use intmod::solver::{solve_type, Budget, SolveError};
use intmod::types_enum::{fpdim, is_perfect, types_for_rank};
use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::report::{build_report, SummaryReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Types,
    Filter,
    Solve,
    Smatrix,
    Modular,
}

impl Stage {
    pub const ALL: [Stage; 5] = [
        Stage::Types,
        Stage::Filter,
        Stage::Solve,
        Stage::Smatrix,
        Stage::Modular,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Types => "types",
            Stage::Filter => "filter",
            Stage::Solve => "solve",
            Stage::Smatrix => "smatrix",
            Stage::Modular => "modular",
        }
    }

    pub fn file(self) -> &'static str {
        match self {
            Stage::Types => "types.jsonl",
            Stage::Filter => "filter.jsonl",
            Stage::Solve => "rings.jsonl",
            Stage::Smatrix => "smatrices.jsonl",
            Stage::Modular => "modular.jsonl",
        }
    }
}

/// Per-type solve status, written next to the ring file.
pub const SOLVE_STATUS_FILE: &str = "solve.jsonl";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub max_rank: usize,
    pub stages: Vec<Stage>,
    /// Per-call budget of the local criterion.
    pub filter_budget: Duration,
    /// Per-type budget of the ring solver; `None` means unlimited.
    pub solve_budget: Option<Duration>,
    pub out_dir: PathBuf,
    pub checkpoint_dir: Option<PathBuf>,
    /// Fault injection: the AMV modulus is divided by this.
    pub amv_modulus_divisor: u64,
}

impl PipelineConfig {
    pub fn new(max_rank: usize, out_dir: impl Into<PathBuf>) -> Self {
        PipelineConfig {
            max_rank,
            stages: Stage::ALL.to_vec(),
            filter_budget: Duration::from_secs(2),
            solve_budget: None,
            out_dir: out_dir.into(),
            checkpoint_dir: None,
            amv_modulus_divisor: 1,
        }
    }

    /// Everything that influences stage outputs; the worker count does not.
    fn fingerprint(&self) -> String {
        let key = serde_json::json!({
            "max_rank": self.max_rank,
            "filter_budget_ms": self.filter_budget.as_millis() as u64,
            "solve_budget_ms": self.solve_budget.map(|d| d.as_millis() as u64),
            "amv_modulus_divisor": self.amv_modulus_divisor,
        });
        hex::encode(Sha256::digest(key.to_string()))
    }

    fn validate(&self) -> Result<(), PipelineError> {
        if self.stages.is_empty() || self.stages[..] != Stage::ALL[..self.stages.len()] {
            return Err(PipelineError::InvalidConfig(
                "stages must be a prefix of types, filter, solve, smatrix, modular".into(),
            ));
        }
        if self.amv_modulus_divisor == 0 {
            return Err(PipelineError::InvalidConfig(
                "AMV modulus divisor must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("stage {stage} failed on {record}")]
    StageFailure { stage: &'static str, record: String },
    #[error("checkpoint of stage {stage} does not match {file}")]
    ChecksumMismatch { stage: &'static str, file: PathBuf },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TypeRecord {
    pub rank: usize,
    pub dims: Vec<u64>,
    pub perfect: bool,
    pub fpdim: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterRow {
    pub rank: usize,
    pub dims: Vec<u64>,
    pub perfect: bool,
    /// First criterion that fired.
    pub excluded_by: Option<Exclusion>,
    /// Local criterion verdict on its own, for every type.
    pub local_excluded: bool,
    pub local_timeouts: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveRow {
    pub rank: usize,
    pub dims: Vec<u64>,
    pub complete: bool,
    pub rings: usize,
    pub noncommutative: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingRecord {
    pub rank: usize,
    pub dims: Vec<u64>,
    pub hash: String,
    pub commutative: bool,
    pub ring: FusionData,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmatrixRecord {
    pub rank: usize,
    pub dims: Vec<u64>,
    pub hash: String,
    pub ring: FusionData,
    pub eigentable: Option<EigenTable>,
    pub error: Option<String>,
    pub candidates: Vec<SMatrixCandidate>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModularRecord {
    pub rank: usize,
    pub pointed: bool,
    pub datum: ModularDatum,
    pub report_digest: String,
}

pub fn stage_types(max_rank: usize) -> Vec<TypeRecord> {
    (1..=max_rank)
        .flat_map(|r| {
            types_for_rank(r).into_iter().map(move |dims| TypeRecord {
                rank: r,
                perfect: is_perfect(&dims),
                fpdim: fpdim(&dims),
                dims,
            })
        })
        .collect()
}

pub fn stage_filter(types: &[TypeRecord], budget: Duration) -> Vec<FilterRow> {
    types
        .par_iter()
        .map(|t| {
            let rec = filter_type(&t.dims, budget);
            let local_excluded = match &rec.excluded_by {
                Some(Exclusion::Local { .. }) => true,
                _ => matches!(
                    local_verdict(&t.dims, budget),
                    LocalVerdict::Excluded { .. }
                ),
            };
            FilterRow {
                rank: t.rank,
                dims: t.dims.clone(),
                perfect: t.perfect,
                excluded_by: rec.excluded_by,
                local_excluded,
                local_timeouts: rec.local_timeouts,
            }
        })
        .collect()
}

pub fn stage_solve(
    rows: &[FilterRow],
    budget: Option<Duration>,
) -> Result<(Vec<SolveRow>, Vec<RingRecord>), PipelineError> {
    let budget = Budget {
        time: budget,
        nodes: None,
    };
    let results: Vec<Result<(SolveRow, Vec<RingRecord>), PipelineError>> = rows
        .par_iter()
        .filter(|r| r.excluded_by.is_none())
        .map(|row| match solve_type(&row.dims, budget) {
            Ok(rings) => {
                let recs: Vec<RingRecord> = rings
                    .into_iter()
                    .map(|f| RingRecord {
                        rank: row.rank,
                        dims: row.dims.clone(),
                        hash: f.canonical_hash(),
                        commutative: f.is_commutative(),
                        ring: f,
                    })
                    .collect();
                let status = SolveRow {
                    rank: row.rank,
                    dims: row.dims.clone(),
                    complete: true,
                    rings: recs.len(),
                    noncommutative: recs.iter().filter(|r| !r.commutative).count(),
                };
                Ok((status, recs))
            }
            Err(SolveError::BudgetExhausted { .. }) => Ok((
                SolveRow {
                    rank: row.rank,
                    dims: row.dims.clone(),
                    complete: false,
                    rings: 0,
                    noncommutative: 0,
                },
                Vec::new(),
            )),
            Err(e) => Err(PipelineError::StageFailure {
                stage: "solve",
                record: format!("{:?}: {e}", row.dims),
            }),
        })
        .collect();
    let mut status = Vec::new();
    let mut rings = Vec::new();
    for r in results {
        let (s, mut rs) = r?;
        status.push(s);
        rings.append(&mut rs);
    }
    Ok((status, rings))
}

pub fn stage_smatrix(rings: &[RingRecord]) -> Vec<SmatrixRecord> {
    rings
        .par_iter()
        .filter(|r| r.commutative)
        .map(|r| {
            let (table, error, candidates) = match eigentable(&r.ring) {
                Ok(e) => {
                    let c = self_transpose_search(&e, &r.ring);
                    (Some(e), None, c)
                }
                Err(e) => (None, Some(e.to_string()), Vec::new()),
            };
            SmatrixRecord {
                rank: r.rank,
                dims: r.dims.clone(),
                hash: r.hash.clone(),
                ring: r.ring.clone(),
                eigentable: table,
                error,
                candidates,
            }
        })
        .collect()
}

pub fn stage_modular(records: &[SmatrixRecord], divisor: u64) -> Vec<ModularRecord> {
    records
        .par_iter()
        .filter(|r| !r.candidates.is_empty())
        .flat_map_iter(|r| {
            let m = amv_modulus(fpdim(&r.dims)) / divisor;
            let pointed = r.dims.iter().all(|&d| d == 1);
            modular_data_from_candidates(&r.ring, &r.candidates, Some(m.max(1)))
                .into_iter()
                .map(move |d| ModularRecord {
                    rank: r.rank,
                    pointed,
                    report_digest: d.report.digest(),
                    datum: d,
                })
        })
        .collect()
}

fn sort_key_spins(d: &ModularDatum) -> Vec<String> {
    d.spins.iter().map(|q| q.to_string()).collect()
}

pub fn write_jsonl<T: Serialize>(path: &Path, records: &[T]) -> Result<(), PipelineError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut out = std::io::BufWriter::new(fs::File::create(path)?);
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, PipelineError> {
    let f = BufReader::new(fs::File::open(path)?);
    let mut out = Vec::new();
    for line in f.lines() {
        let line = line?;
        if !line.trim().is_empty() {
            out.push(serde_json::from_str(&line)?);
        }
    }
    Ok(out)
}

pub fn sort_types(v: &mut [TypeRecord]) {
    v.sort();
}

pub fn sort_filter(v: &mut [FilterRow]) {
    v.sort_by(|a, b| (a.rank, &a.dims).cmp(&(b.rank, &b.dims)));
}

pub fn sort_solve(status: &mut [SolveRow], rings: &mut [RingRecord]) {
    status.sort_by(|a, b| (a.rank, &a.dims).cmp(&(b.rank, &b.dims)));
    rings.sort_by(|a, b| (a.rank, &a.dims, &a.hash).cmp(&(b.rank, &b.dims, &b.hash)));
}

pub fn sort_smatrix(v: &mut [SmatrixRecord]) {
    v.sort_by(|a, b| (a.rank, &a.dims, &a.hash).cmp(&(b.rank, &b.dims, &b.hash)));
}

pub fn sort_modular(v: &mut [ModularRecord]) {
    v.sort_by_cached_key(|r| {
        (
            r.rank,
            r.datum.ring_hash.clone(),
            sort_key_spins(&r.datum),
            r.report_digest.clone(),
        )
    });
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Checkpoint {
    stage: Stage,
    fingerprint: String,
    file: String,
    sha256: String,
}

fn file_sha(path: &Path) -> Result<String, PipelineError> {
    Ok(hex::encode(Sha256::digest(fs::read(path)?)))
}

/// Outputs of a pipeline run, as loaded or computed.
#[derive(Debug, Default, Clone)]
pub struct Outputs {
    pub types: Option<Vec<TypeRecord>>,
    pub filter: Option<Vec<FilterRow>>,
    pub solve: Option<Vec<SolveRow>>,
    pub rings: Option<Vec<RingRecord>>,
    pub smatrices: Option<Vec<SmatrixRecord>>,
    pub modular: Option<Vec<ModularRecord>>,
}

impl Outputs {
    /// Loads whatever stage files exist in `dir`.
    pub fn load(dir: &Path) -> Result<Self, PipelineError> {
        fn opt<T: DeserializeOwned>(p: PathBuf) -> Result<Option<Vec<T>>, PipelineError> {
            if p.exists() {
                read_jsonl(&p).map(Some)
            } else {
                Ok(None)
            }
        }
        Ok(Outputs {
            types: opt(dir.join(Stage::Types.file()))?,
            filter: opt(dir.join(Stage::Filter.file()))?,
            solve: opt(dir.join(SOLVE_STATUS_FILE))?,
            rings: opt(dir.join(Stage::Solve.file()))?,
            smatrices: opt(dir.join(Stage::Smatrix.file()))?,
            modular: opt(dir.join(Stage::Modular.file()))?,
        })
    }
}

/// Runs the configured stages, resuming from valid checkpoints, and compares
/// the outcome against the published tables.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<SummaryReport, PipelineError> {
    cfg.validate()?;
    fs::create_dir_all(&cfg.out_dir)?;
    let fingerprint = cfg.fingerprint();
    let mut out = Outputs::default();
    for &stage in &cfg.stages {
        let path = cfg.out_dir.join(stage.file());
        let ckpt_path = cfg
            .checkpoint_dir
            .as_ref()
            .map(|d| d.join(format!("{}.json", stage.name())));
        if let Some(cp) = ckpt_path.as_ref().filter(|p| p.exists()) {
            let ck: Checkpoint = serde_json::from_str(&fs::read_to_string(cp)?)?;
            if ck.fingerprint == fingerprint {
                let extra = (stage == Stage::Solve).then(|| cfg.out_dir.join(SOLVE_STATUS_FILE));
                let sha = stage_sha(&path, extra.as_deref()).map_err(|_| {
                    PipelineError::ChecksumMismatch {
                        stage: stage.name(),
                        file: path.clone(),
                    }
                })?;
                if sha != ck.sha256 {
                    return Err(PipelineError::ChecksumMismatch {
                        stage: stage.name(),
                        file: path,
                    });
                }
                load_stage(stage, &cfg.out_dir, &mut out)?;
                continue;
            }
        }
        run_stage(stage, cfg, &mut out)?;
        if let Some(cp) = ckpt_path {
            fs::create_dir_all(cp.parent().expect("checkpoint file has a parent"))?;
            let extra = (stage == Stage::Solve).then(|| cfg.out_dir.join(SOLVE_STATUS_FILE));
            let ck = Checkpoint {
                stage,
                fingerprint: fingerprint.clone(),
                file: stage.file().into(),
                sha256: stage_sha(&path, extra.as_deref())?,
            };
            fs::write(cp, serde_json::to_string_pretty(&ck)? + "\n")?;
        }
    }
    let report = build_report(cfg.max_rank, &out);
    fs::write(
        cfg.out_dir.join("report.json"),
        serde_json::to_string_pretty(&report)? + "\n",
    )?;
    Ok(report)
}

fn stage_sha(path: &Path, extra: Option<&Path>) -> Result<String, PipelineError> {
    let mut s = file_sha(path)?;
    if let Some(e) = extra {
        s.push_str(&file_sha(e)?);
    }
    Ok(s)
}

fn load_stage(stage: Stage, dir: &Path, out: &mut Outputs) -> Result<(), PipelineError> {
    let path = dir.join(stage.file());
    match stage {
        Stage::Types => out.types = Some(read_jsonl(&path)?),
        Stage::Filter => out.filter = Some(read_jsonl(&path)?),
        Stage::Solve => {
            out.rings = Some(read_jsonl(&path)?);
            out.solve = Some(read_jsonl(&dir.join(SOLVE_STATUS_FILE))?);
        }
        Stage::Smatrix => out.smatrices = Some(read_jsonl(&path)?),
        Stage::Modular => out.modular = Some(read_jsonl(&path)?),
    }
    Ok(())
}

fn missing(stage: &'static str) -> PipelineError {
    PipelineError::StageFailure {
        stage,
        record: "missing input of previous stage".into(),
    }
}

fn run_stage(stage: Stage, cfg: &PipelineConfig, out: &mut Outputs) -> Result<(), PipelineError> {
    let dir = &cfg.out_dir;
    let path = dir.join(stage.file());
    match stage {
        Stage::Types => {
            let mut v = stage_types(cfg.max_rank);
            sort_types(&mut v);
            write_jsonl(&path, &v)?;
            out.types = Some(v);
        }
        Stage::Filter => {
            let types = out.types.as_ref().ok_or_else(|| missing("filter"))?;
            let mut v = stage_filter(types, cfg.filter_budget);
            sort_filter(&mut v);
            write_jsonl(&path, &v)?;
            out.filter = Some(v);
        }
        Stage::Solve => {
            let rows = out.filter.as_ref().ok_or_else(|| missing("solve"))?;
            let (mut status, mut rings) = stage_solve(rows, cfg.solve_budget)?;
            sort_solve(&mut status, &mut rings);
            write_jsonl(&path, &rings)?;
            write_jsonl(&dir.join(SOLVE_STATUS_FILE), &status)?;
            out.solve = Some(status);
            out.rings = Some(rings);
        }
        Stage::Smatrix => {
            let rings = out.rings.as_ref().ok_or_else(|| missing("smatrix"))?;
            let mut v = stage_smatrix(rings);
            sort_smatrix(&mut v);
            write_jsonl(&path, &v)?;
            out.smatrices = Some(v);
        }
        Stage::Modular => {
            let sm = out.smatrices.as_ref().ok_or_else(|| missing("modular"))?;
            let mut v = stage_modular(sm, cfg.amv_modulus_divisor);
            sort_modular(&mut v);
            write_jsonl(&path, &v)?;
            out.modular = Some(v);
        }
    }
    Ok(())
}
