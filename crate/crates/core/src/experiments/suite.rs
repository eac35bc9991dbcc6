use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::instances::{jordan_block, random_diagonalizable, spectrum_distance, SpectrumSpec};
use super::rate::{polish_limit, rate_estimate, DEFAULT_RATE_SLACK};
use crate::error::{Error, Result};
use crate::linalg::spectrum;
use crate::matrix::{parse_complex, ComplexMatrix};
use crate::orbit::contraction_constant;
use crate::transform::{limit_with_trajectory, LimitOptions, Trajectory};

const POLISH_STEPS: usize = 2000;

/// Flat key-value suite description, read from TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub sizes: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub cond_bound: f64,
    /// `"annulus"` or `"explicit"`.
    pub spectrum: String,
    /// Eigenvalues for `spectrum = "explicit"`, written as `a+bi` strings.
    pub eigenvalues: Vec<String>,
    pub min_modulus: f64,
    pub max_modulus: f64,
    pub separation: f64,
    pub zero_count: usize,
    pub tol_conv: f64,
    pub tol_norm: f64,
    pub max_iter: usize,
    pub rate_slack: f64,
    /// Append one non-diagonalizable Jordan-block trial.
    pub jordan_trial: bool,
    pub jordan_size: usize,
    /// Output directory, relative to the caller's base directory.
    pub out: PathBuf,
    /// Write trajectories of trials that fail to converge or miss the rate bound.
    pub archive_failures: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        let limit = LimitOptions::default();
        Self {
            sizes: Vec::new(),
            trials: 10,
            seed: 0,
            cond_bound: 100.0,
            spectrum: "annulus".into(),
            eigenvalues: Vec::new(),
            min_modulus: 0.2,
            max_modulus: 2.0,
            separation: 0.05,
            zero_count: 0,
            tol_conv: limit.tol_conv,
            tol_norm: limit.tol_norm,
            max_iter: limit.max_iter,
            rate_slack: DEFAULT_RATE_SLACK,
            jordan_trial: false,
            jordan_size: 3,
            out: PathBuf::from("suite_out"),
            archive_failures: true,
        }
    }
}

impl SuiteConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml_str(&fs::read_to_string(path)?)
    }

    pub fn spectrum_spec(&self) -> Result<SpectrumSpec> {
        match self.spectrum.as_str() {
            "annulus" => Ok(SpectrumSpec::Annulus {
                min_modulus: self.min_modulus,
                max_modulus: self.max_modulus,
                separation: self.separation,
                zero_count: self.zero_count,
            }),
            "explicit" => {
                let eigenvalues = self.eigenvalues.iter().map(|s| parse_complex(s)).collect::<Result<Vec<Complex64>>>()?;
                Ok(SpectrumSpec::Explicit { eigenvalues })
            }
            other => Err(Error::Parse(format!("unknown spectrum kind {other:?} (expected \"annulus\" or \"explicit\")"))),
        }
    }

    pub fn limit_options(&self) -> LimitOptions {
        LimitOptions { tol_conv: self.tol_conv, tol_norm: self.tol_norm, max_iter: self.max_iter }
    }

    fn validate(&self) -> Result<SpectrumSpec> {
        if self.max_iter == 0 {
            return Err(Error::InvalidArgument("max_iter must be at least 1".into()));
        }
        if self.jordan_trial && self.jordan_size == 0 {
            return Err(Error::InvalidArgument("jordan_size must be at least 1".into()));
        }
        let spec = self.spectrum_spec()?;
        if let SpectrumSpec::Explicit { eigenvalues } = &spec {
            if let Some(&bad) = self.sizes.iter().find(|&&s| s != eigenvalues.len()) {
                return Err(Error::InvalidArgument(format!(
                    "size {bad} does not match the {} explicit eigenvalues",
                    eigenvalues.len()
                )));
            }
        }
        if !(self.cond_bound >= 1.0) {
            return Err(Error::InvalidArgument(format!("cond_bound must be ≥ 1, got {}", self.cond_bound)));
        }
        Ok(spec)
    }
}

/// Seed of trial `index`: first word of stream `index` of the master generator.
pub fn trial_seed(master: u64, index: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(index as u64);
    rng.next_u64()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrialKind {
    Diagonalizable,
    Jordan,
}

/// One row of the suite output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub index: usize,
    pub kind: TrialKind,
    pub size: usize,
    pub seed: u64,
    pub condition: f64,
    pub converged: bool,
    pub iterations: usize,
    pub final_normality: f64,
    pub spectrum_error: f64,
    pub asymptotic_rate: Option<f64>,
    pub k_d: f64,
    pub rate_ok: bool,
    pub transient_steps: Option<usize>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteSummary {
    pub total: usize,
    pub converged: usize,
    /// Diagonalizable trials, whose convergence is asserted.
    pub asserted: usize,
    pub asserted_converged: usize,
    pub rate_ok: usize,
}

impl SuiteSummary {
    pub fn all_asserted_converged(&self) -> bool {
        self.asserted == self.asserted_converged
    }

    fn from_records(records: &[TrialRecord]) -> Self {
        let asserted: Vec<&TrialRecord> = records.iter().filter(|r| r.kind == TrialKind::Diagonalizable).collect();
        Self {
            total: records.len(),
            converged: records.iter().filter(|r| r.converged).count(),
            asserted: asserted.len(),
            asserted_converged: asserted.iter().filter(|r| r.converged && r.error.is_none()).count(),
            rate_ok: records.iter().filter(|r| r.rate_ok).count(),
        }
    }
}

struct Outcome {
    record: TrialRecord,
    start: Option<ComplexMatrix>,
    trajectory: Option<Trajectory>,
}

struct Plan {
    index: usize,
    kind: TrialKind,
    size: usize,
    seed: u64,
}

fn plan(cfg: &SuiteConfig) -> Vec<Plan> {
    let mut out = Vec::new();
    for &size in &cfg.sizes {
        for _ in 0..cfg.trials {
            let index = out.len();
            out.push(Plan { index, kind: TrialKind::Diagonalizable, size, seed: trial_seed(cfg.seed, index) });
        }
    }
    if cfg.jordan_trial {
        let index = out.len();
        out.push(Plan { index, kind: TrialKind::Jordan, size: cfg.jordan_size, seed: trial_seed(cfg.seed, index) });
    }
    out
}

fn run_trial(cfg: &SuiteConfig, spec: &SpectrumSpec, p: &Plan) -> Outcome {
    let mut record = TrialRecord {
        index: p.index,
        kind: p.kind,
        size: p.size,
        seed: p.seed,
        condition: f64::NAN,
        converged: false,
        iterations: 0,
        final_normality: f64::NAN,
        spectrum_error: f64::NAN,
        asymptotic_rate: None,
        k_d: f64::NAN,
        rate_ok: false,
        transient_steps: None,
        error: None,
    };
    let (start, truth) = match p.kind {
        TrialKind::Diagonalizable => match random_diagonalizable(p.size, spec, cfg.cond_bound, p.seed) {
            Ok(inst) => {
                record.condition = inst.condition;
                (inst.matrix, inst.eigenvalues)
            }
            Err(e) => {
                record.error = Some(e.to_string());
                return Outcome { record, start: None, trajectory: None };
            }
        },
        TrialKind::Jordan => {
            let lambda = Complex64::new(1.0, 0.0);
            record.condition = f64::INFINITY;
            (jordan_block(p.size, lambda), vec![lambda; p.size])
        }
    };
    record.k_d = contraction_constant(&truth);
    let (report, trajectory) = match limit_with_trajectory(&start, &cfg.limit_options()) {
        Ok(x) => x,
        Err(e) => {
            record.error = Some(e.to_string());
            return Outcome { record, start: Some(start), trajectory: None };
        }
    };
    record.converged = report.converged;
    record.iterations = report.iterations_used;
    record.final_normality = report.final_normality;
    record.spectrum_error = match spectrum(&report.limit) {
        Ok(s) => spectrum_distance(s.eigenvalues(), &truth),
        Err(e) => {
            record.error = Some(e.to_string());
            f64::NAN
        }
    };
    if report.converged {
        let rate = polish_limit(&report.limit, POLISH_STEPS)
            .and_then(|l| rate_estimate(&trajectory, &l, record.k_d, cfg.rate_slack));
        match rate {
            Ok(rep) => {
                record.asymptotic_rate = Some(rep.asymptotic_rate);
                record.rate_ok = rep.satisfied;
                record.transient_steps = Some(rep.transient_steps);
            }
            Err(e) => record.error = Some(e.to_string()),
        }
    }
    Outcome { record, start: Some(start), trajectory: Some(trajectory) }
}

/// Runs every trial (in parallel) and returns the records ordered by trial index.
pub fn run_trials(cfg: &SuiteConfig) -> Result<Vec<TrialRecord>> {
    Ok(run_outcomes(cfg)?.into_iter().map(|o| o.record).collect())
}

fn run_outcomes(cfg: &SuiteConfig) -> Result<Vec<Outcome>> {
    let spec = cfg.validate()?;
    Ok(plan(cfg).par_iter().map(|p| run_trial(cfg, &spec, p)).collect())
}

/// Runs the suite and writes `records.csv`, `records.jsonl`, `summary.json` and, for failed
/// trials, `failures/trial_<index>/{start.json, trajectory.csv}` under `base.join(cfg.out)`.
pub fn run_suite(cfg: &SuiteConfig, base: impl AsRef<Path>) -> Result<(SuiteSummary, Vec<TrialRecord>)> {
    let outcomes = run_outcomes(cfg)?;
    let dir = base.as_ref().join(&cfg.out);
    fs::create_dir_all(&dir)?;
    let records: Vec<TrialRecord> = outcomes.iter().map(|o| o.record.clone()).collect();

    let mut csv_out = csv::Writer::from_path(dir.join("records.csv"))?;
    for r in &records {
        csv_out.serialize(r)?;
    }
    csv_out.flush()?;
    if records.is_empty() {
        fs::write(dir.join("records.csv"), "")?;
    }

    let mut jsonl = String::new();
    for r in &records {
        jsonl.push_str(&serde_json::to_string(r)?);
        jsonl.push('\n');
    }
    fs::write(dir.join("records.jsonl"), jsonl)?;

    let summary = SuiteSummary::from_records(&records);
    fs::write(dir.join("summary.json"), serde_json::to_string_pretty(&summary)? + "\n")?;

    if cfg.archive_failures {
        for o in outcomes.iter().filter(|o| !(o.record.converged && o.record.rate_ok)) {
            let trial_dir = dir.join("failures").join(format!("trial_{:04}", o.record.index));
            fs::create_dir_all(&trial_dir)?;
            if let Some(start) = &o.start {
                start.write_json(trial_dir.join("start.json"))?;
            }
            if let Some(t) = &o.trajectory {
                t.write_csv(trial_dir.join("trajectory.csv"))?;
            }
            log::info!("archived trial {} ({:?}) in {}", o.record.index, o.record.kind, trial_dir.display());
        }
    }
    Ok((summary, records))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SuiteConfig {
        SuiteConfig { sizes: vec![2, 3], trials: 4, seed: 7, ..SuiteConfig::default() }
    }

    #[test]
    fn parses_flat_toml() {
        let cfg = SuiteConfig::from_toml_str(
            "sizes = [2, 3]\ntrials = 10\nseed = 42\nspectrum = \"explicit\"\neigenvalues = [\"1\", \"2+0.5i\"]\n",
        )
        .unwrap();
        assert_eq!(cfg.sizes, vec![2, 3]);
        assert_eq!(cfg.rate_slack, 0.02);
        assert_eq!(
            cfg.spectrum_spec().unwrap(),
            SpectrumSpec::Explicit { eigenvalues: vec![Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.5)] }
        );
        assert!(cfg.validate().is_err());
        assert!(SuiteConfig::from_toml_str("sizes = [2]\nbogus = 1\n").is_err());
    }

    #[test]
    fn seeds_depend_on_index_only() {
        assert_eq!(trial_seed(1, 5), trial_seed(1, 5));
        assert_ne!(trial_seed(1, 5), trial_seed(1, 6));
        assert_ne!(trial_seed(1, 5), trial_seed(2, 5));
    }

    #[test]
    fn small_suite_converges_and_is_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = small();
        let (summary, records) = run_suite(&cfg, dir.path()).unwrap();
        assert_eq!(summary.total, 8);
        assert!(summary.all_asserted_converged());
        for r in &records {
            assert!(r.spectrum_error < 1e-7 && r.final_normality < cfg.tol_norm);
        }
        let first = fs::read(dir.path().join("suite_out/records.csv")).unwrap();
        let other = tempfile::tempdir().unwrap();
        run_suite(&cfg, other.path()).unwrap();
        assert_eq!(first, fs::read(other.path().join("suite_out/records.csv")).unwrap());
        assert_eq!(
            fs::read(dir.path().join("suite_out/records.jsonl")).unwrap(),
            fs::read(other.path().join("suite_out/records.jsonl")).unwrap()
        );
    }

    #[test]
    fn empty_sizes_give_empty_output() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = SuiteConfig { sizes: vec![], ..SuiteConfig::default() };
        let (summary, records) = run_suite(&cfg, dir.path()).unwrap();
        assert!(records.is_empty() && summary.all_asserted_converged());
        assert!(fs::read(dir.path().join("suite_out/records.csv")).unwrap().is_empty());
    }

    #[test]
    fn jordan_trial_is_recorded_honestly() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = SuiteConfig { sizes: vec![2], trials: 2, jordan_trial: true, max_iter: 300, ..SuiteConfig::default() };
        let (summary, records) = run_suite(&cfg, dir.path()).unwrap();
        let jordan = records.last().unwrap();
        assert_eq!(jordan.kind, TrialKind::Jordan);
        assert!(!jordan.converged);
        assert_eq!(jordan.iterations, 300);
        assert!(summary.all_asserted_converged());
        assert!(dir.path().join("suite_out/failures/trial_0002/trajectory.csv").exists());
    }
}
