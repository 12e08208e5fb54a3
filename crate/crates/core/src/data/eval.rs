use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::classifier::{consistency_check, CondensedSet, WnnClassifier};
use crate::condense::{greedy_wnn, hart_cnn, mss, rss};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::exact::{exact_nn_condense, exact_wnn_condense, SolveStatus, DEFAULT_NODE_BUDGET};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub seed: u64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec {
            train_fraction: 0.7,
            seed: 0,
        }
    }
}

/// Seeded shuffle, then the first `round(fraction * n)` points train.
pub fn split(ds: &Dataset, spec: SplitSpec) -> Result<(Dataset, Dataset)> {
    if !(spec.train_fraction > 0.0 && spec.train_fraction < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "train fraction must be in (0,1), got {}",
            spec.train_fraction
        )));
    }
    let n = ds.len();
    if n < 2 {
        return Err(Error::InvalidParameter("cannot split fewer than 2 points".into()));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(spec.seed));
    let cut = ((spec.train_fraction * n as f64).round() as usize).clamp(1, n - 1);
    Ok((ds.subset(&order[..cut])?, ds.subset(&order[cut..])?))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    GreedyWnn,
    HartCnn,
    Mss,
    Rss,
    ExactNn,
    ExactWnn,
    /// No condensing: plain 1-NN over the whole training set.
    None,
}

impl Method {
    pub const ALL: [Method; 7] = [
        Method::GreedyWnn,
        Method::HartCnn,
        Method::Mss,
        Method::Rss,
        Method::ExactNn,
        Method::ExactWnn,
        Method::None,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::GreedyWnn => "greedy-wnn",
            Method::HartCnn => "hart-cnn",
            Method::Mss => "mss",
            Method::Rss => "rss",
            Method::ExactNn => "exact-nn",
            Method::ExactWnn => "exact-wnn",
            Method::None => "none",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "greedy-wnn" | "greedy" | "wnn" => Ok(Method::GreedyWnn),
            "hart-cnn" | "hart" | "cnn" => Ok(Method::HartCnn),
            "mss" => Ok(Method::Mss),
            "rss" => Ok(Method::Rss),
            "exact-nn" | "ip" => Ok(Method::ExactNn),
            "exact-wnn" => Ok(Method::ExactWnn),
            "none" | "1-nn" | "1nn" => Ok(Method::None),
            other => Err(Error::InvalidParameter(format!("unknown method `{other}`"))),
        }
    }
}

/// Knobs shared by all methods.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MethodConfig {
    /// Seed for the scan order of Hart's rule.
    pub seed: u64,
    pub node_budget: u64,
}

impl Default for MethodConfig {
    fn default() -> Self {
        MethodConfig {
            seed: 0,
            node_budget: DEFAULT_NODE_BUDGET,
        }
    }
}

/// Output of one condensing method on one sample.
#[derive(Clone, Debug, PartialEq)]
pub struct Condensed {
    pub set: CondensedSet,
    pub status: SolveStatus,
}

pub fn run_method(ds: &Dataset, method: Method, cfg: MethodConfig) -> Result<Condensed> {
    let optimal = |set| Condensed {
        set,
        status: SolveStatus::Optimal,
    };
    Ok(match method {
        Method::GreedyWnn => optimal(greedy_wnn(ds)?.0),
        Method::HartCnn => optimal(hart_cnn(ds, cfg.seed)?),
        Method::Mss => optimal(mss(ds)?),
        Method::Rss => optimal(rss(ds)?),
        Method::None => optimal(CondensedSet::full(ds)),
        Method::ExactNn => {
            let s = exact_nn_condense(ds, cfg.node_budget)?;
            Condensed {
                set: s.set,
                status: s.status,
            }
        }
        Method::ExactWnn => {
            let s = exact_wnn_condense(ds, cfg.node_budget)?;
            Condensed {
                set: s.set,
                status: s.status,
            }
        }
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CondenseReport {
    pub method: Method,
    pub seed: u64,
    pub train_size: usize,
    pub test_size: usize,
    pub condensed_size: usize,
    /// `condensed_size / train_size`.
    pub compression_ratio: f64,
    pub consistent: bool,
    pub test_error: f64,
    pub status: SolveStatus,
    pub wall_time_ms: f64,
}

/// Condenses `train`, verifies consistency on it, and measures 0/1 error on `test`.
pub fn evaluate(train: &Dataset, test: &Dataset, method: Method, cfg: MethodConfig) -> Result<CondenseReport> {
    let start = Instant::now();
    let out = run_method(train, method, cfg)?;
    let elapsed = start.elapsed();
    let consistent = consistency_check(train, &out.set).consistent;
    let clf = WnnClassifier::from_condensed(train, &out.set);
    Ok(CondenseReport {
        method,
        seed: cfg.seed,
        train_size: train.len(),
        test_size: test.len(),
        condensed_size: out.set.len(),
        compression_ratio: out.set.len() as f64 / train.len() as f64,
        consistent,
        test_error: clf.error_rate(test),
        status: out.status,
        wall_time_ms: elapsed.as_secs_f64() * 1e3,
    })
}

/// Writes reports as CSV. Wall time is left out unless `with_timing`, so
/// identical runs produce identical bytes.
pub fn write_reports_csv<W: Write>(reports: &[CondenseReport], with_timing: bool, mut out: W) -> Result<()> {
    let mut header = String::from(
        "method,seed,train_size,test_size,condensed_size,compression_ratio,consistent,test_error,status",
    );
    if with_timing {
        header.push_str(",wall_time_ms");
    }
    writeln!(out, "{header}")?;
    for r in reports {
        let status = match r.status {
            SolveStatus::Optimal => "optimal",
            SolveStatus::BudgetExhausted => "budget_exhausted",
        };
        write!(
            out,
            "{},{},{},{},{},{:?},{},{:?},{}",
            r.method,
            r.seed,
            r.train_size,
            r.test_size,
            r.condensed_size,
            r.compression_ratio,
            r.consistent,
            r.test_error,
            status
        )?;
        if with_timing {
            write!(out, ",{:.3}", r.wall_time_ms)?;
        }
        writeln!(out)?;
    }
    Ok(())
}
