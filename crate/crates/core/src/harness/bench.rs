//! Timing runs. Instance generation is excluded from the measured time.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{par_map, Stopwatch, SuiteReport, Timing};
use crate::constructive::{h_partition, rainbow_ham_path_one_spare_counted};
use crate::error::Result;
use crate::generators::{derive_seed, random_collection, random_tournament};
use crate::oracle::{search, SearchBudget, SearchOptions, Shape, Status};
use crate::pipeline::{solve, PipelineParams, SolveMode};
use crate::Ratio;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BenchKind {
    /// Exact path search on `m = n` random collections; work is nodes expanded.
    Oracle,
    /// H-partition with `ell = 24` of a random tournament; work is the block count.
    HPartition,
    /// One-spare rainbow Hamilton path with `m = n`; work is arc inspections.
    OneSpare,
    /// Constructive transversal Hamilton path with `m = n - 1`.
    Pipeline,
}

impl BenchKind {
    pub const ALL: [BenchKind; 4] = [BenchKind::Oracle, BenchKind::HPartition, BenchKind::OneSpare, BenchKind::Pipeline];

    pub fn name(self) -> String {
        serde_json::to_value(self).expect("kind serializes").as_str().unwrap().to_owned()
    }

    pub fn from_name(s: &str) -> Option<BenchKind> {
        serde_json::from_value(serde_json::Value::String(s.to_owned())).ok()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchSpec {
    pub kind: BenchKind,
    pub sizes: Vec<usize>,
    pub seeds: u64,
    pub base_seed: u64,
    pub jobs: usize,
    pub budget: SearchBudget,
    pub params: PipelineParams,
}

impl BenchSpec {
    pub fn new(kind: BenchKind, sizes: Vec<usize>, seeds: u64) -> Self {
        BenchSpec {
            kind,
            sizes,
            seeds,
            base_seed: 0,
            jobs: 1,
            budget: SearchBudget::nodes(1_000_000),
            params: PipelineParams::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchRow {
    pub kind: String,
    pub n: usize,
    pub seed: u64,
    pub micros: u64,
    pub work: u64,
    pub ok: bool,
}

impl BenchRow {
    pub fn csv_header() -> &'static str {
        "kind,n,seed,micros,work,ok"
    }

    pub fn csv_row(&self) -> String {
        format!("{},{},{},{},{},{}", self.kind, self.n, self.seed, self.micros, self.work, self.ok)
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, u64) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed().as_micros() as u64)
}

fn run_one(spec: &BenchSpec, n: usize, seed: u64) -> Result<(u64, u64, bool)> {
    Ok(match spec.kind {
        BenchKind::Oracle => {
            let t = random_collection(n, n, seed, false)?;
            let (out, us) = timed(|| search(&t, &SearchOptions::new(Shape::Path).budget(spec.budget)));
            let out = out?;
            (us, out.nodes_expanded, out.status != Status::BudgetExhausted)
        }
        BenchKind::HPartition => {
            let t = random_tournament(n, seed);
            let ell = 24.min(n).max(3.min(n));
            let (p, us) = timed(|| h_partition(&t, ell, Ratio::new(1, 6)));
            let p = p?;
            (us, p.r() as u64, p.check(&t, None).is_ok())
        }
        BenchKind::OneSpare => {
            let t = random_collection(n, n, seed, false)?;
            let (res, us) = timed(|| rainbow_ham_path_one_spare_counted(&t));
            let (p, inspections) = res?;
            (us, inspections, p.is_hamilton(&t))
        }
        BenchKind::Pipeline => {
            let t = random_collection(n, n - 1, seed, false)?;
            let params = spec.params.clone().with_seed(seed);
            let (r, us) = timed(|| solve(&t, Shape::Path, SolveMode::Constructive, &params));
            (us, 0, r?.constructive_succeeded)
        }
    })
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

pub fn bench(spec: &BenchSpec) -> Result<SuiteReport> {
    let sw = Stopwatch::start();
    let name = spec.kind.name();
    let mut report = SuiteReport::new(format!("bench_{name}"));
    let mut rows = Vec::new();
    let mut time_pts = Vec::new();
    let mut work_pts = Vec::new();
    for &n in &spec.sizes {
        let seeds: Vec<u64> = (0..spec.seeds)
            .map(|i| derive_seed(derive_seed(spec.base_seed, n as u64), i))
            .collect();
        let results = par_map(spec.jobs, spec.seeds, |i| run_one(spec, n, seeds[i as usize]))?;
        let (mut us_sum, mut work_sum) = (0u64, 0u64);
        for (i, r) in results.into_iter().enumerate() {
            let (micros, work, ok) = r?;
            us_sum += micros;
            work_sum += work;
            report.instances += 1;
            report.bump(n, "instances", 1);
            report.bump(n, "ok", u64::from(ok));
            report.bump(n, "max_work", work);
            rows.push(BenchRow {
                kind: name.clone(),
                n,
                seed: seeds[i],
                micros,
                work,
                ok,
            });
        }
        let k = spec.seeds.max(1) as f64;
        time_pts.push((n as f64, us_sum as f64 / k));
        work_pts.push((n as f64, work_sum as f64 / k));
    }
    let mut fits = BTreeMap::new();
    if let Some(s) = log_log_slope(&time_pts) {
        fits.insert(format!("{name}.time_exponent"), s);
    }
    if let Some(s) = log_log_slope(&work_pts) {
        fits.insert(format!("{name}.work_exponent"), s);
    }
    report.timing = Some(Timing {
        wall_millis: sw.millis(),
        bench_rows: rows,
        fits,
    });
    Ok(report)
}
