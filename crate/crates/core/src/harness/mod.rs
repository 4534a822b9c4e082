//! Verification suites and benchmarks. Instances are generated from
//! `(suite, n, index, seed)` alone, checked in parallel, and merged in instance
//! order, so a report depends only on its spec and not on the worker count.

pub mod bench;
pub mod enumerate;
pub mod suites;

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::collection::{CollectionFile, TournamentCollection};
use crate::error::{Error, Result};

pub use bench::{bench, BenchKind, BenchRow, BenchSpec};
pub use suites::{replay, run_suite, Mode, SuiteKind, SuiteSpec, Verdict};

/// Records kept per list; totals are always in the counters.
pub const MAX_RECORDS: usize = 1000;

/// One instance worth keeping: a failure, a counterexample to the theorem's
/// conclusion, or an instance whose search ran out of budget.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub n: usize,
    pub index: u64,
    /// Generator seed for random suites.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub detail: String,
    pub instance: CollectionFile,
}

impl InstanceRecord {
    pub fn collection(&self) -> Result<TournamentCollection> {
        TournamentCollection::from_file(&self.instance)
    }
}

/// Wall-clock fields, kept apart so reports compare byte for byte without them.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub wall_millis: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub bench_rows: Vec<BenchRow>,
    /// Least-squares slopes of log(time) against log(n), per bench kind.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub fits: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub instances: u64,
    /// Enumerated instances outside the suite's hypotheses.
    pub skipped: u64,
    pub failures: Vec<InstanceRecord>,
    pub counterexamples: Vec<InstanceRecord>,
    pub exhausted: Vec<InstanceRecord>,
    /// Per-size counters, keyed `n<size>.<name>`. Names starting with `max_`
    /// hold maxima, all others sums.
    pub stats: BTreeMap<String, u64>,
    /// Counterexample classes up to relabeling, when requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub canonical_classes: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
}

impl SuiteReport {
    pub fn new(suite: impl Into<String>) -> Self {
        SuiteReport {
            suite: suite.into(),
            ..SuiteReport::default()
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.stat_total("failures") == 0
    }

    /// Sum of counter `name` over all sizes.
    pub fn stat_total(&self, name: &str) -> u64 {
        self.stats
            .iter()
            .filter(|(k, _)| k.split_once('.').is_some_and(|(_, s)| s == name))
            .map(|(_, v)| *v)
            .sum()
    }

    pub fn stat(&self, n: usize, name: &str) -> u64 {
        self.stats.get(&format!("n{n}.{name}")).copied().unwrap_or(0)
    }

    pub(crate) fn bump(&mut self, n: usize, name: &str, v: u64) {
        let e = self.stats.entry(format!("n{n}.{name}")).or_insert(0);
        if name.starts_with("max_") {
            *e = (*e).max(v);
        } else {
            *e += v;
        }
    }

    /// One JSON line.
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    /// One JSON line with the timing fields removed.
    pub fn to_json_line_untimed(&self) -> String {
        let mut r = self.clone();
        r.timing = None;
        r.to_json_line()
    }

    /// Header and row for CSV summaries.
    pub fn csv_header() -> &'static str {
        "suite,instances,skipped,failures,counterexamples,exhausted,wall_millis"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.suite,
            self.instances,
            self.skipped,
            self.stat_total("failures"),
            self.stat_total("counterexamples"),
            self.stat_total("exhausted"),
            self.timing.as_ref().map_or(0, |t| t.wall_millis)
        )
    }
}

/// Maps `f` over `0..count` on `jobs` workers (`0` = all cores), keeping
/// results in index order.
pub fn par_map<T: Send>(jobs: usize, count: u64, f: impl Fn(u64) -> T + Sync + Send) -> Result<Vec<T>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::invalid(format!("thread pool: {e}")))?;
    Ok(pool.install(|| (0..count).into_par_iter().map(&f).collect()))
}

pub(crate) struct Stopwatch(Instant);

impl Stopwatch {
    pub(crate) fn start() -> Self {
        Stopwatch(Instant::now())
    }

    pub(crate) fn millis(&self) -> u64 {
        self.0.elapsed().as_millis() as u64
    }
}
