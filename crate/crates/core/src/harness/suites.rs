//! Verification suites. Each suite generates instances (exhaustively or from
//! seeds), checks one instance at a time, and classifies it as a pass, a
//! failure (a broken contract), a counterexample to a theorem's conclusion, or
//! a search that ran out of budget.

use std::collections::HashSet;

use itertools::Itertools;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::enumerate::{
    canonical_form, collection_count, collection_from_index, tournament_count, tournament_from_code,
    MAX_CANONICAL_N,
};
use super::{par_map, InstanceRecord, Stopwatch, SuiteReport, Timing, MAX_RECORDS};
use crate::collection::TournamentCollection;
use crate::constructive::{
    absorb, build_absorber, forcing_set_on, forcing_set_preconditions, h_partition, is_exceptional, local_median_order,
    low_degree_count_bound_check, rainbow_connect, rainbow_ham_path_forcing_color, rainbow_ham_path_one_spare_counted,
    AbsorberRequest, AbsorberSchedule,
};
use crate::digraph::validate_transversal;
use crate::error::{Error, Result};
use crate::generators::{
    derive_seed, prop14_collection, random_collection, random_collection_mostly_strong, random_tournament, seeded_rng,
};
use crate::oracle::permutation::{permutation_oracle, MAX_PERMUTATION_N};
use crate::oracle::{search, OracleOutcome, SearchBudget, SearchOptions, Shape, Status};
use crate::pipeline::{cycle_precondition, solve, PipelineParams, Route, SolveMode};
use crate::tournament::Tournament;
use crate::{color_set, ColorId, Ratio, VertexId};

/// Instances per parallel batch.
const CHUNK: u64 = 1 << 16;

/// Largest exhaustive enumeration accepted.
const MAX_EXHAUSTIVE: u64 = 1 << 32;

/// Values of `d` passed to the library low-degree check per tournament.
const LOW_DEGREE_CALLS: usize = 32;

/// Top-ups checked one by one in the absorber suite before switching to probes.
const ABSORBER_EXHAUSTIVE_LIMIT: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SuiteKind {
    /// Oracle status of transversal Hamilton paths with `m = n - 1`.
    TheoremPath,
    /// Oracle status of transversal Hamilton cycles with `m = n` and at most
    /// one non-strong member.
    TheoremCycle,
    /// The two-transitive-triangle family has no transversal Hamilton cycle.
    Prop14,
    /// Backtracking and permutation oracles agree.
    Oracles,
    /// Auto-mode pipeline status equals the exact oracle's.
    AgreementPath,
    AgreementCycle,
    /// Constructive branch only; every returned witness validates.
    ScalePath,
    ScaleCycle,
    /// H-partitions satisfy their three conditions.
    HPartition,
    /// Few vertices of low in- or out-degree; local median orders.
    LowDegree,
    /// Accepted absorbers absorb every checked top-up.
    Absorber,
    /// Rainbow Hamilton path with one spare color.
    OneSpare,
    /// Rainbow Hamilton path through a given color.
    ForcingColor,
    /// Rainbow Hamilton path between given endpoints using a forced color set.
    ForcingSet,
    /// Rainbow connection with increasing colors in strongly connected collections.
    Connect,
}

impl SuiteKind {
    pub const ALL: [SuiteKind; 15] = [
        SuiteKind::TheoremPath,
        SuiteKind::TheoremCycle,
        SuiteKind::Prop14,
        SuiteKind::Oracles,
        SuiteKind::AgreementPath,
        SuiteKind::AgreementCycle,
        SuiteKind::ScalePath,
        SuiteKind::ScaleCycle,
        SuiteKind::HPartition,
        SuiteKind::LowDegree,
        SuiteKind::Absorber,
        SuiteKind::OneSpare,
        SuiteKind::ForcingColor,
        SuiteKind::ForcingSet,
        SuiteKind::Connect,
    ];

    pub fn name(self) -> String {
        serde_json::to_value(self).expect("kind serializes").as_str().unwrap().to_owned()
    }

    pub fn from_name(s: &str) -> Option<SuiteKind> {
        serde_json::from_value(serde_json::Value::String(s.to_owned())).ok()
    }

    /// Number of colors of the instances at size `n`.
    pub fn colors(self, n: usize) -> usize {
        match self {
            SuiteKind::TheoremPath
            | SuiteKind::AgreementPath
            | SuiteKind::ScalePath
            | SuiteKind::Connect
            | SuiteKind::Oracles => n.saturating_sub(1),
            SuiteKind::TheoremCycle | SuiteKind::AgreementCycle | SuiteKind::ScaleCycle | SuiteKind::OneSpare => n,
            SuiteKind::Prop14 => n,
            SuiteKind::HPartition | SuiteKind::LowDegree => 1,
            SuiteKind::ForcingColor => 2 * n,
            SuiteKind::ForcingSet => 4 * n,
            SuiteKind::Absorber => absorber_shape(n).0,
        }
    }

    fn shape(self) -> Shape {
        match self {
            SuiteKind::TheoremCycle | SuiteKind::AgreementCycle | SuiteKind::ScaleCycle | SuiteKind::Prop14 => {
                Shape::Cycle
            }
            _ => Shape::Path,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Every labeled instance of each size.
    Exhaustive,
    /// `seeds` seeded instances of each size.
    Random,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteSpec {
    pub kind: SuiteKind,
    pub n_min: usize,
    pub n_max: usize,
    pub mode: Mode,
    /// Instances per size in random mode.
    pub seeds: u64,
    pub base_seed: u64,
    /// Worker threads; `0` uses all cores. Does not affect the report.
    pub jobs: usize,
    pub budget: SearchBudget,
    /// Count counterexample classes up to relabeling.
    pub canonical: bool,
    pub params: PipelineParams,
}

impl SuiteSpec {
    pub fn new(kind: SuiteKind, n_min: usize, n_max: usize, mode: Mode, seeds: u64) -> Self {
        SuiteSpec {
            kind,
            n_min,
            n_max,
            mode,
            seeds,
            base_seed: 0,
            jobs: 0,
            budget: SearchBudget::unlimited(),
            canonical: false,
            params: PipelineParams::default(),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.base_seed = seed;
        self
    }

    pub fn with_jobs(mut self, jobs: usize) -> Self {
        self.jobs = jobs;
        self
    }

    pub fn with_budget(mut self, budget: SearchBudget) -> Self {
        self.budget = budget;
        self
    }

    pub fn with_params(mut self, params: PipelineParams) -> Self {
        self.params = params;
        self
    }

    pub fn with_canonical(mut self, canonical: bool) -> Self {
        self.canonical = canonical;
        self
    }

    fn instances(&self, n: usize) -> Result<u64> {
        if self.kind == SuiteKind::Prop14 {
            return Ok(1);
        }
        if self.mode == Mode::Random {
            return Ok(self.seeds);
        }
        let count = match self.kind {
            SuiteKind::HPartition | SuiteKind::LowDegree => tournament_count(n),
            SuiteKind::Absorber | SuiteKind::ForcingSet | SuiteKind::ScalePath | SuiteKind::ScaleCycle => {
                return Err(Error::invalid(format!("suite {} has no exhaustive mode", self.kind.name())));
            }
            kind => collection_count(n, kind.colors(n)),
        };
        count
            .filter(|&c| c <= MAX_EXHAUSTIVE)
            .ok_or_else(|| Error::invalid(format!("exhaustive enumeration at n = {n} is too large")))
    }

    /// The instance `index` of size `n` and its generator seed.
    pub fn instance(&self, n: usize, index: u64) -> Result<(TournamentCollection, Option<u64>)> {
        let kind = self.kind;
        if kind == SuiteKind::Prop14 {
            return Ok((prop14_collection(n)?, None));
        }
        if self.mode == Mode::Exhaustive {
            let t = match kind {
                SuiteKind::HPartition | SuiteKind::LowDegree => {
                    TournamentCollection::repeated(&tournament_from_code(n, index)?, 1)
                }
                _ => collection_from_index(n, kind.colors(n), index)?,
            };
            return Ok((t, None));
        }
        let seed = derive_seed(derive_seed(self.base_seed, n as u64), index);
        let m = kind.colors(n);
        let t = match kind {
            SuiteKind::TheoremCycle | SuiteKind::AgreementCycle | SuiteKind::ScaleCycle => {
                random_collection_mostly_strong(n, m, 1, seed)?
            }
            SuiteKind::Oracles => random_collection(n, m + (index % 2) as usize, seed, false)?,
            SuiteKind::HPartition | SuiteKind::LowDegree => TournamentCollection::repeated(&random_tournament(n, seed), 1),
            SuiteKind::Connect => random_collection(n, m, seed, true)?,
            SuiteKind::ForcingSet => plant_endpoints(&random_collection(n, m, seed, false)?, n / 25)?,
            _ => random_collection(n, m, seed, false)?,
        };
        Ok((t, Some(seed)))
    }

    fn sizes(&self) -> std::ops::RangeInclusive<usize> {
        self.n_min..=self.n_max
    }
}

/// Makes vertex 0 beat everyone and `n - 1` lose to everyone in the first
/// `k` tournaments, so the forced colors `0..k` satisfy the endpoint hypothesis.
fn plant_endpoints(t: &TournamentCollection, k: usize) -> Result<TournamentCollection> {
    let n = t.n();
    let ts = t
        .tournaments()
        .iter()
        .enumerate()
        .map(|(c, x)| {
            if c >= k {
                return x.clone();
            }
            Tournament::from_fn(n, |u, v| u == 0 || v == n - 1 || x.has_arc(u, v))
        })
        .collect();
    TournamentCollection::new(n, ts)
}

/// Classification of one instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    /// Outside the suite's hypotheses (exhaustive suites only).
    Skip,
    Fail(String),
    Counterexample(String),
    Exhausted(String),
}

struct Checked {
    verdict: Verdict,
    counters: Vec<(&'static str, u64)>,
}

impl Checked {
    fn pass() -> Self {
        Checked {
            verdict: Verdict::Pass,
            counters: Vec::new(),
        }
    }

    fn with(verdict: Verdict) -> Self {
        Checked {
            verdict,
            counters: Vec::new(),
        }
    }

    fn count(mut self, name: &'static str, v: u64) -> Self {
        self.counters.push((name, v));
        self
    }

    fn fail(msg: impl Into<String>) -> Self {
        Checked::with(Verdict::Fail(msg.into()))
    }
}

/// Re-runs the check behind `record` on its stored instance.
pub fn replay(spec: &SuiteSpec, record: &InstanceRecord) -> Result<Verdict> {
    let t = record.collection()?;
    Ok(check(spec, &t, record.seed.unwrap_or(record.index))?.verdict)
}

/// Runs a suite over all sizes `n_min..=n_max`.
pub fn run_suite(spec: &SuiteSpec) -> Result<SuiteReport> {
    if spec.n_min > spec.n_max {
        return Err(Error::invalid("n_min exceeds n_max"));
    }
    spec.params.validate()?;
    let sw = Stopwatch::start();
    let mut report = SuiteReport::new(spec.kind.name());
    let mut classes: HashSet<(usize, Vec<u64>)> = HashSet::new();
    for n in spec.sizes() {
        let total = spec.instances(n)?;
        let mut start = 0;
        while start < total {
            let len = CHUNK.min(total - start);
            let results = par_map(spec.jobs, len, |k| -> Result<_> {
                let index = start + k;
                let (t, seed) = spec.instance(n, index)?;
                let checked = check(spec, &t, seed.unwrap_or(index))?;
                let keep = !matches!(checked.verdict, Verdict::Pass | Verdict::Skip);
                let canon = match checked.verdict {
                    Verdict::Counterexample(_) if spec.canonical && n <= MAX_CANONICAL_N => Some(canonical_form(&t)?),
                    _ => None,
                };
                let file = keep.then(|| t.to_file());
                Ok((index, seed, checked, file, canon))
            })?;
            for r in results {
                let (index, seed, checked, file, canon) = r?;
                absorb_result(&mut report, n, index, seed, checked, file);
                if let Some(c) = canon {
                    classes.insert((n, c));
                }
            }
            start += len;
        }
    }
    if spec.canonical {
        report.canonical_classes = Some(classes.len() as u64);
    }
    report.timing = Some(Timing {
        wall_millis: sw.millis(),
        ..Timing::default()
    });
    Ok(report)
}

fn absorb_result(
    report: &mut SuiteReport,
    n: usize,
    index: u64,
    seed: Option<u64>,
    checked: Checked,
    file: Option<crate::collection::CollectionFile>,
) {
    for (name, v) in checked.counters {
        report.bump(n, name, v);
    }
    let (list, detail, counter) = match checked.verdict {
        Verdict::Skip => {
            report.skipped += 1;
            report.bump(n, "skipped", 1);
            return;
        }
        Verdict::Pass => {
            report.instances += 1;
            report.bump(n, "instances", 1);
            return;
        }
        Verdict::Fail(d) => (&mut report.failures, d, "failures"),
        Verdict::Counterexample(d) => (&mut report.counterexamples, d, "counterexamples"),
        Verdict::Exhausted(d) => (&mut report.exhausted, d, "exhausted"),
    };
    if list.len() < MAX_RECORDS {
        list.push(InstanceRecord {
            n,
            index,
            seed,
            detail,
            instance: file.expect("kept instances are serialized"),
        });
    }
    report.instances += 1;
    report.bump(n, "instances", 1);
    report.bump(n, counter, 1);
}

fn check(spec: &SuiteSpec, t: &TournamentCollection, seed: u64) -> Result<Checked> {
    Ok(match spec.kind {
        SuiteKind::TheoremPath | SuiteKind::TheoremCycle => check_theorem(spec, t)?,
        SuiteKind::Prop14 => check_prop14(spec, t)?,
        SuiteKind::Oracles => check_oracles(spec, t)?,
        SuiteKind::AgreementPath | SuiteKind::AgreementCycle => check_agreement(spec, t)?,
        SuiteKind::ScalePath | SuiteKind::ScaleCycle => check_scale(spec, t)?,
        SuiteKind::HPartition => check_hpartition(t),
        SuiteKind::LowDegree => check_low_degree(t),
        SuiteKind::Absorber => check_absorber(t, seed)?,
        SuiteKind::OneSpare => check_one_spare(t),
        SuiteKind::ForcingColor => check_forcing_color(t)?,
        SuiteKind::ForcingSet => check_forcing_set(t),
        SuiteKind::Connect => check_connect(t),
    })
}

fn witness_ok(t: &TournamentCollection, out: &OracleOutcome) -> bool {
    out.witness.as_ref().is_some_and(|w| w.is_hamilton(t))
}

fn shape_name(shape: Shape) -> &'static str {
    match shape {
        Shape::Path => "path",
        Shape::Cycle => "cycle",
    }
}

fn check_theorem(spec: &SuiteSpec, t: &TournamentCollection) -> Result<Checked> {
    let shape = spec.kind.shape();
    if shape == Shape::Cycle && !cycle_precondition(t) {
        return Ok(Checked::with(Verdict::Skip));
    }
    let out = search(t, &SearchOptions::new(shape).budget(spec.budget))?;
    let what = shape_name(shape);
    let checked = match out.status {
        Status::Found if witness_ok(t, &out) => Checked::pass().count("found", 1),
        Status::Found => Checked::fail(format!("oracle {what} witness does not validate")),
        Status::NotExists => Checked::with(Verdict::Counterexample(format!("no transversal Hamilton {what}"))),
        Status::BudgetExhausted => Checked::with(Verdict::Exhausted(format!("{what} search ran out of budget"))),
    };
    Ok(checked.count("oracle_nodes", out.nodes_expanded))
}

fn check_prop14(spec: &SuiteSpec, t: &TournamentCollection) -> Result<Checked> {
    let out = search(t, &SearchOptions::cycle().budget(spec.budget))?;
    let strong = t.tournaments().iter().filter(|x| x.is_strongly_connected()).count() as u64;
    let checked = match out.status {
        Status::NotExists => Checked::with(Verdict::Counterexample("no transversal Hamilton cycle".into())),
        Status::Found => Checked::fail("found a transversal Hamilton cycle"),
        Status::BudgetExhausted => Checked::with(Verdict::Exhausted("cycle search ran out of budget".into())),
    };
    Ok(checked
        .count("oracle_nodes", out.nodes_expanded)
        .count("precondition_unmet", u64::from(!cycle_precondition(t)))
        .count("strong_members", strong))
}

fn check_oracles(spec: &SuiteSpec, t: &TournamentCollection) -> Result<Checked> {
    if t.n() > MAX_PERMUTATION_N {
        return Err(Error::invalid(format!("permutation oracle is limited to n <= {MAX_PERMUTATION_N}")));
    }
    let mut checked = Checked::pass();
    for shape in [Shape::Path, Shape::Cycle] {
        let what = shape_name(shape);
        let bt = search(t, &SearchOptions::new(shape).budget(spec.budget))?;
        let perm = permutation_oracle(t, shape, None, None)?;
        if bt.status == Status::BudgetExhausted {
            return Ok(Checked::with(Verdict::Exhausted(format!("{what} search ran out of budget"))));
        }
        if bt.status != perm.status {
            return Ok(Checked::fail(format!(
                "{what}: backtracking says {:?}, permutation says {:?}",
                bt.status, perm.status
            )));
        }
        for (name, out) in [("backtracking", &bt), ("permutation", &perm)] {
            if out.status == Status::Found && !witness_ok(t, out) {
                return Ok(Checked::fail(format!("{what}: {name} witness does not validate")));
            }
        }
        if bt.status == Status::Found {
            checked = checked.count(if shape == Shape::Path { "found_path" } else { "found_cycle" }, 1);
        }
    }
    Ok(checked)
}

fn check_agreement(spec: &SuiteSpec, t: &TournamentCollection) -> Result<Checked> {
    let shape = spec.kind.shape();
    let what = shape_name(shape);
    let exact = search(t, &SearchOptions::new(shape).budget(spec.budget))?;
    let piped = solve(t, shape, SolveMode::Auto, &spec.params.clone().with_budget(spec.budget))?;
    let out = &piped.outcome;
    if exact.status == Status::BudgetExhausted || out.status == Status::BudgetExhausted {
        return Ok(Checked::with(Verdict::Exhausted(format!("{what} search ran out of budget"))));
    }
    if exact.status != out.status {
        return Ok(Checked::fail(format!(
            "{what}: oracle says {:?}, pipeline says {:?} via {:?}",
            exact.status, out.status, piped.route
        )));
    }
    if out.status == Status::Found && !witness_ok(t, out) {
        return Ok(Checked::fail(format!("{what}: pipeline witness does not validate")));
    }
    if piped.route == Route::Constructive && out.status == Status::NotExists {
        return Ok(Checked::fail("constructive branch reported non-existence"));
    }
    Ok(Checked::pass()
        .count("found", u64::from(out.status == Status::Found))
        .count("constructive_attempted", u64::from(piped.constructive_attempted))
        .count("constructive_ok", u64::from(piped.constructive_succeeded)))
}

fn check_scale(spec: &SuiteSpec, t: &TournamentCollection) -> Result<Checked> {
    let shape = spec.kind.shape();
    let r = solve(t, shape, SolveMode::Constructive, &spec.params)?;
    if !r.constructive_succeeded {
        return Ok(Checked::pass().count("constructive_failed", 1));
    }
    let Some(w) = r.outcome.witness.as_ref() else {
        return Ok(Checked::fail("success without a witness"));
    };
    let digraph = match w {
        crate::oracle::Witness::Path(p) => p.to_digraph(),
        crate::oracle::Witness::Cycle(c) => c.to_digraph(),
    };
    if !validate_transversal(t, &digraph) || !w.is_hamilton(t) {
        return Ok(Checked::fail(format!("constructive {} does not validate", shape_name(shape))));
    }
    Ok(Checked::pass().count("constructive_ok", 1))
}

fn hpartition_caps(n: usize) -> Vec<usize> {
    let mut caps: Vec<usize> = [3, 24, n.div_ceil(10), n].into_iter().filter(|&l| (3..=n).contains(&l)).collect();
    caps.sort_unstable();
    caps.dedup();
    caps
}

fn check_hpartition(t: &TournamentCollection) -> Checked {
    let tt = t.tournament(0);
    let n = tt.n();
    let mut checked = Checked::pass();
    for ell in hpartition_caps(n) {
        match h_partition(tt, ell, Ratio::new(1, 6)) {
            Ok(p) => {
                if let Err(e) = p.check(tt, None) {
                    return Checked::fail(format!("ell = {ell}: {e}"));
                }
                checked = checked.count("partitions", 1).count("max_blocks", p.r() as u64);
            }
            Err(e) => return Checked::fail(format!("ell = {ell}: {e}")),
        }
    }
    checked
}

fn check_low_degree(t: &TournamentCollection) -> Checked {
    let tt = t.tournament(0);
    let n = tt.n();
    // library check for small d, a sorted-score recount for every d
    if let Some(d) = (0..n.min(LOW_DEGREE_CALLS)).find(|&d| !low_degree_count_bound_check(tt, d)) {
        return Checked::fail(format!("more than {} vertices of degree at most {d}", 2 * d + 1));
    }
    let mut out_deg = tt.scores();
    let mut in_deg: Vec<usize> = out_deg.iter().map(|&s| n - 1 - s).collect();
    out_deg.sort_unstable();
    in_deg.sort_unstable();
    for d in 0..n {
        if 2 * d + 1 < n && (out_deg[2 * d + 1] <= d || in_deg[2 * d + 1] <= d) {
            return Checked::fail(format!("more than {} vertices of degree at most {d}", 2 * d + 1));
        }
    }
    if !local_median_order(tt).satisfies_degree_bounds(tt) {
        return Checked::fail("local median order violates the prefix degree bounds");
    }
    Checked::pass()
}

/// `(m, ell, |C|)` of the absorber family at size `n`: the dense desk family
/// up to 13 vertices (at most 12 target arcs), larger ones above.
fn absorber_shape(n: usize) -> (usize, usize, usize) {
    if n <= 13 {
        (40, 3.min(n.saturating_sub(1)), 12)
    } else {
        let ell = (n - 1) / 4;
        (4 * n, ell, 3 * ell)
    }
}

fn check_absorber(t: &TournamentCollection, seed: u64) -> Result<Checked> {
    let n = t.n();
    if n < 2 {
        return Err(Error::invalid("absorber suite needs n >= 2"));
    }
    let (_, ell, c_size) = absorber_shape(n);
    let tmaj = t.majority_subtournament(None, Ratio::new(1, 2))?;
    let all: Vec<VertexId> = (0..n).collect();
    let order = tmaj.hamilton_path(&all);
    let arcs: Vec<(VertexId, VertexId)> = order.windows(2).map(|w| (w[0], w[1])).collect();
    let avail: Vec<ColorId> = (0..t.m()).collect();
    let req = AbsorberRequest {
        target_arcs: &arcs,
        avail_colors: &avail,
        ell,
        c_size,
        alpha: None,
        retries: 8,
        seed,
        schedule: AbsorberSchedule::default(),
    };
    let Ok(absorber) = build_absorber(t, &req) else {
        return Ok(Checked::pass().count("not_built", 1));
    };
    let check_one = |cp: &[ColorId]| -> std::result::Result<(), String> {
        let d = absorb(&absorber, cp).map_err(|e| format!("top-up {cp:?}: {e}"))?;
        let mut want: Vec<ColorId> = absorber.a.iter().chain(cp).copied().collect();
        want.sort_unstable();
        let mut got: Vec<ColorId> = d.arcs.iter().map(|a| a.color).collect();
        got.sort_unstable();
        let mut got_arcs: Vec<(VertexId, VertexId)> = d.arcs.iter().map(|a| (a.tail, a.head)).collect();
        got_arcs.sort_unstable();
        let mut want_arcs = arcs.clone();
        want_arcs.sort_unstable();
        if got != want || got_arcs != want_arcs || !validate_transversal(t, &d) {
            return Err(format!("top-up {cp:?}: coloring is not a rainbow coloring of the target arcs by A ∪ C'"));
        }
        Ok(())
    };
    let subsets = binomial(absorber.c.len(), ell);
    let mut checks = 0u64;
    let exhaustive = subsets <= ABSORBER_EXHAUSTIVE_LIMIT;
    if exhaustive {
        for cp in absorber.c.iter().copied().combinations(ell) {
            checks += 1;
            if let Err(e) = check_one(&cp) {
                return Ok(Checked::fail(e));
            }
        }
    } else {
        let avail_of = |c: ColorId| arcs.iter().filter(|&&(u, v)| t.has_arc(c, u, v)).count();
        let mut by_degree = absorber.c.clone();
        by_degree.sort_by_key(|&c| (avail_of(c), c));
        let mut probes: Vec<Vec<ColorId>> = vec![by_degree[..ell].to_vec()];
        for &(u, v) in &arcs {
            let mut starve: Vec<ColorId> = by_degree.iter().copied().filter(|&c| !t.has_arc(c, u, v)).collect();
            starve.extend(by_degree.iter().copied().filter(|&c| t.has_arc(c, u, v)));
            probes.push(starve[..ell].to_vec());
        }
        let mut rng = seeded_rng(seed, 0x5ee);
        let mut pool = absorber.c.clone();
        for _ in 0..500 {
            let (cp, _) = pool.partial_shuffle(&mut rng, ell);
            probes.push(cp.to_vec());
        }
        for cp in probes {
            checks += 1;
            if let Err(e) = check_one(&cp) {
                return Ok(Checked::fail(e));
            }
        }
    }
    Ok(Checked::pass()
        .count("built", 1)
        .count("exhaustive", u64::from(exhaustive))
        .count("topups_checked", checks))
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut acc: u128 = 1;
    for i in 0..k.min(n - k) {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > usize::MAX as u128 {
            return usize::MAX;
        }
    }
    acc as usize
}

fn check_one_spare(t: &TournamentCollection) -> Checked {
    let n = t.n() as u64;
    match rainbow_ham_path_one_spare_counted(t) {
        Ok((p, inspections)) => {
            if !p.is_hamilton(t) {
                return Checked::fail("path is not a rainbow Hamilton path");
            }
            if inspections > n * n.saturating_sub(1) {
                return Checked::fail(format!("{inspections} arc inspections exceed n(n-1)"));
            }
            Checked::pass()
                .count("max_inspections", inspections)
                .count("max_inspections_per_n2_milli", inspections * 1000 / (n * n).max(1))
        }
        Err(e) => Checked::fail(e.to_string()),
    }
}

fn check_forcing_color(t: &TournamentCollection) -> Result<Checked> {
    let n = t.n();
    let all: Vec<VertexId> = (0..n).collect();
    let palette: Vec<ColorId> = (0..t.m()).collect();
    let mut checked = Checked::pass();
    for i in 0..t.m() {
        let exceptional = is_exceptional(t, &all, &palette, i);
        match rainbow_ham_path_forcing_color(t, i) {
            Ok(p) if p.is_hamilton(t) && p.colors.contains(&i) => {
                if exceptional {
                    return Ok(Checked::fail(format!("color {i}: path found in the exceptional configuration")));
                }
            }
            Ok(_) => return Ok(Checked::fail(format!("color {i}: path is not Hamilton or misses the color"))),
            Err(e) if exceptional => {
                let opts = SearchOptions::path().required(Some(color_set(t.m(), [i])));
                if search(t, &opts)?.status != Status::NotExists {
                    return Ok(Checked::fail(format!("color {i}: exceptional but a path exists ({e})")));
                }
                checked = checked.count("exceptional", 1);
            }
            Err(e) => return Ok(Checked::fail(format!("color {i}: {e}"))),
        }
    }
    Ok(checked)
}

fn check_forcing_set(t: &TournamentCollection) -> Checked {
    let n = t.n();
    let all: Vec<VertexId> = (0..n).collect();
    let palette: Vec<ColorId> = (0..t.m()).collect();
    let forced: Vec<ColorId> = (0..n / 25).collect();
    let (u, v) = (0, n.saturating_sub(1));
    if forcing_set_preconditions(t, &all, &palette, &forced, u, v).is_err() {
        return Checked::pass().count("precondition_unmet", 1);
    }
    match forcing_set_on(t, &all, &palette, &forced, u, v) {
        Ok(p) if p.is_hamilton(t) && p.first() == u && p.last() == v && forced.iter().all(|c| p.colors.contains(c)) => {
            Checked::pass().count("ok", 1)
        }
        Ok(_) => Checked::fail("path is not Hamilton between the endpoints or misses a forced color"),
        Err(e) => Checked::fail(e.to_string()),
    }
}

fn check_connect(t: &TournamentCollection) -> Checked {
    if !t.tournaments().iter().all(|x| x.is_strongly_connected()) {
        return Checked::with(Verdict::Skip);
    }
    let n = t.n();
    for x in 0..n {
        for y in (0..n).filter(|&y| y != x) {
            match rainbow_connect(t, x, y) {
                Ok(p) => {
                    if !p.valid(t) || p.first() != x || p.last() != y {
                        return Checked::fail(format!("{x} -> {y}: invalid rainbow path"));
                    }
                    if p.colors.windows(2).any(|w| w[0] >= w[1]) {
                        return Checked::fail(format!("{x} -> {y}: colors do not increase"));
                    }
                }
                Err(e) => return Checked::fail(format!("{x} -> {y}: {e}")),
            }
        }
    }
    Checked::pass().count("pairs", (n * (n - 1)) as u64)
}
