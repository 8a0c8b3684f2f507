//! Randomised residual suites over the functional equations, with a
//! deterministic JSON-lines report.

mod sampling;
mod suites;

use std::str::FromStr;
use std::time::Instant;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::realspace::GrassmannianPoint;
use crate::tolerances::{FD_STEP, THETA_TOL};

pub use sampling::Sampler;
pub use suites::find_kernel_element;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Weil,
    Periodicity,
    Modularity,
    Heat,
    Roundtrip,
    Characteristics,
    Arrows,
    Contraction,
    Product,
    KernelInvariance,
}

impl Suite {
    pub const ALL: [Suite; 10] = [
        Suite::Weil,
        Suite::Periodicity,
        Suite::Modularity,
        Suite::Heat,
        Suite::Roundtrip,
        Suite::Characteristics,
        Suite::Arrows,
        Suite::Contraction,
        Suite::Product,
        Suite::KernelInvariance,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Weil => "weil",
            Suite::Periodicity => "periodicity",
            Suite::Modularity => "modularity",
            Suite::Heat => "heat",
            Suite::Roundtrip => "roundtrip",
            Suite::Characteristics => "characteristics",
            Suite::Arrows => "arrows",
            Suite::Contraction => "contraction",
            Suite::Product => "product",
            Suite::KernelInvariance => "kernel-invariance",
        }
    }

    /// Pass threshold when the config does not override it.
    pub fn default_threshold(self) -> f64 {
        match self {
            Suite::Weil => 1e-12,
            Suite::Periodicity => 1e-10,
            Suite::Modularity | Suite::Roundtrip | Suite::Characteristics | Suite::KernelInvariance => 1e-8,
            Suite::Heat => 1e-5,
            Suite::Arrows | Suite::Product => 1e-9,
            Suite::Contraction => 1e-8,
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::BadConfig(format!("unknown suite '{s}'")))
    }
}

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub lattice: Lattice,
    /// Defaults to the standard point of the lattice.
    pub point: Option<GrassmannianPoint>,
    pub suite: Suite,
    pub samples: usize,
    pub seed: u64,
    /// Overrides the suite's threshold for every residual check.
    pub tolerance: Option<f64>,
    pub theta_tolerance: f64,
    pub fd_step: f64,
    pub word_max: usize,
    /// Kernel element for the invariance suite; searched for when absent.
    pub isometry: Option<DMatrix<i64>>,
}

impl VerifyConfig {
    pub fn new(lattice: &Lattice, suite: Suite) -> Self {
        Self {
            lattice: lattice.clone(),
            point: None,
            suite,
            samples: 10,
            seed: 0,
            tolerance: None,
            theta_tolerance: THETA_TOL,
            fd_step: FD_STEP,
            word_max: 6,
            isometry: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::BadConfig("samples must be at least 1".into()));
        }
        if let Some(t) = self.tolerance {
            if !(t > 0.0) {
                return Err(Error::BadConfig("tolerance must be positive".into()));
            }
        }
        if !(self.theta_tolerance > 0.0) || !(self.fd_step > 0.0) {
            return Err(Error::BadConfig("theta tolerance and fd step must be positive".into()));
        }
        if self.word_max == 0 {
            return Err(Error::BadConfig("word length bound must be at least 1".into()));
        }
        if let Some(p) = &self.point {
            if p.lattice() != &self.lattice {
                return Err(Error::GrassmannianMismatch);
            }
        }
        Ok(())
    }

    pub fn threshold(&self) -> f64 {
        self.tolerance.unwrap_or_else(|| self.suite.default_threshold())
    }

    pub fn point(&self) -> GrassmannianPoint {
        self.point.clone().unwrap_or_else(|| GrassmannianPoint::standard(&self.lattice))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub params: Value,
    pub residual: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl CheckRecord {
    pub fn new(name: &str, params: Value, residual: f64, threshold: f64) -> Self {
        Self { name: name.to_string(), params, residual, threshold, pass: residual <= threshold }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub suite: String,
    pub records: Vec<CheckRecord>,
    pub pass: bool,
    /// Seconds; kept out of the JSON so reports are reproducible byte for byte.
    #[serde(skip)]
    pub wall_time: f64,
}

#[derive(Serialize)]
struct Summary<'a> {
    suite: &'a str,
    checks: usize,
    failed: usize,
    max_residual: f64,
    pass: bool,
}

impl Report {
    pub fn from_records(suite: &str, mut records: Vec<CheckRecord>, wall_time: f64) -> Self {
        records.sort_by(|a, b| a.name.cmp(&b.name).then_with(|| a.params.to_string().cmp(&b.params.to_string())));
        let pass = records.iter().all(|r| r.pass);
        Self { suite: suite.to_string(), records, pass, wall_time }
    }

    pub fn failed(&self) -> usize {
        self.records.iter().filter(|r| !r.pass).count()
    }

    pub fn max_residual(&self) -> f64 {
        self.records.iter().map(|r| r.residual).fold(0.0, f64::max)
    }

    /// One JSON object per record followed by a summary object.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).expect("records serialize"));
            out.push('\n');
        }
        let s = Summary {
            suite: &self.suite,
            checks: self.records.len(),
            failed: self.failed(),
            max_residual: self.max_residual(),
            pass: self.pass,
        };
        out.push_str(&serde_json::to_string(&s).expect("summary serializes"));
        out.push('\n');
        out
    }

    pub fn summary_line(&self) -> String {
        format!(
            "{}: {} checks, {} failed, max residual {:.3e}, {:.2}s -> {}",
            self.suite,
            self.records.len(),
            self.failed(),
            self.max_residual(),
            self.wall_time,
            if self.pass { "PASS" } else { "FAIL" }
        )
    }
}

pub fn run_verify(cfg: &VerifyConfig) -> Result<Report> {
    cfg.validate()?;
    let start = Instant::now();
    let mut s = Sampler::new(cfg.seed);
    let records = match cfg.suite {
        Suite::Weil => suites::weil(cfg, &mut s)?,
        Suite::Periodicity => suites::periodicity(cfg, &mut s)?,
        Suite::Modularity => suites::modularity(cfg, &mut s)?,
        Suite::Heat => suites::heat(cfg, &mut s)?,
        Suite::Roundtrip => suites::roundtrip(cfg, &mut s)?,
        Suite::Characteristics => suites::characteristics(cfg, &mut s)?,
        Suite::Arrows => suites::arrows(cfg, &mut s)?,
        Suite::Contraction => suites::contraction(cfg, &mut s)?,
        Suite::Product => suites::product(cfg, &mut s)?,
        Suite::KernelInvariance => suites::kernel_invariance(cfg, &mut s)?,
    };
    Ok(Report::from_records(cfg.suite.name(), records, start.elapsed().as_secs_f64()))
}
