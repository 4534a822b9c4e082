//! End-to-end solvers: the four-step rainbow path lemma, the Hamilton path
//! assembly around it, and the cycle-closing case analysis, each with an
//! exact-oracle fallback.

pub mod cycle;
pub mod dhp;
pub mod exchange;
pub mod path;

use std::time::Instant;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::collection::TournamentCollection;
use crate::error::{Error, Result};
use crate::oracle::backtrack::{search, SearchOptions, Shape};
use crate::oracle::{OracleOutcome, SearchBudget, Status, Witness};
use crate::{ColorId, Ratio};

pub use cycle::{constructive_cycle, CycleSearchState};
pub use dhp::{rainbow_dhp, rainbow_dhp_on, DhpInstance};
pub use exchange::{exchange_step, splice_step};
pub use path::constructive_path;

/// Constants of the constructive branch plus retry and fallback policy.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineParams {
    pub mu: Ratio,
    pub gamma: Ratio,
    pub beta: Ratio,
    pub alpha: Ratio,
    pub seed: u64,
    /// Instances with at most this many vertices go straight to the oracle in
    /// auto mode.
    pub oracle_fallback_n: usize,
    pub absorber_retries: usize,
    /// Resamples of the reserved color set before giving up on a partition.
    pub reserve_retries: usize,
    /// Block caps tried are `max(3, mu * 2^k * n)` for `k = 0..=mu_escalations`.
    pub mu_escalations: usize,
    /// Randomized attempts per block cap.
    pub attempts_per_scale: usize,
    /// Budget for every oracle call.
    pub budget: SearchBudget,
}

impl Default for PipelineParams {
    fn default() -> Self {
        PipelineParams {
            mu: Ratio::new(1, 100),
            gamma: Ratio::new(1, 20),
            beta: Ratio::new(1, 10),
            alpha: Ratio::new(1, 4),
            seed: 0,
            oracle_fallback_n: 12,
            absorber_retries: 8,
            reserve_retries: 200,
            mu_escalations: 6,
            attempts_per_scale: 3,
            budget: SearchBudget::unlimited(),
        }
    }
}

impl PipelineParams {
    /// Defaults with the four constants replaced; enforces
    /// `0 < mu < gamma < beta < alpha <= 1/2` and `gamma <= 1/6`.
    pub fn new(mu: Ratio, gamma: Ratio, beta: Ratio, alpha: Ratio) -> Result<Self> {
        let p = PipelineParams {
            mu,
            gamma,
            beta,
            alpha,
            ..PipelineParams::default()
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let zero = Ratio::from_integer(0);
        if !(zero < self.mu && self.mu < self.gamma && self.gamma < self.beta && self.beta < self.alpha) {
            return Err(Error::invalid("need 0 < mu < gamma < beta < alpha"));
        }
        if self.alpha > Ratio::new(1, 2) {
            return Err(Error::invalid("alpha must be at most 1/2"));
        }
        if self.gamma > Ratio::new(1, 6) {
            return Err(Error::invalid("gamma must be at most 1/6 (partition parameter)"));
        }
        Ok(())
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_fallback_n(mut self, n: usize) -> Self {
        self.oracle_fallback_n = n;
        self
    }

    pub fn with_budget(mut self, budget: SearchBudget) -> Self {
        self.budget = budget;
        self
    }
}

/// Color bookkeeping of the four-step lemma. `d`, `a`, `c`, `b` partition the
/// palette once the absorber exists; the starred sets are what is left of
/// `b`, `c`, `d` after Step 3.
#[derive(Debug, Clone)]
pub struct ColorLedger {
    pub palette: FixedBitSet,
    pub d: FixedBitSet,
    pub a: FixedBitSet,
    pub c: FixedBitSet,
    pub b: FixedBitSet,
    pub used: FixedBitSet,
    pub b_star: FixedBitSet,
    pub c_star: FixedBitSet,
    pub d_star: FixedBitSet,
}

/// Sizes of the ledger sets plus the (small) starred sets in full.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerSnapshot {
    pub palette: usize,
    pub d: usize,
    pub a: usize,
    pub c: usize,
    pub b: usize,
    pub used: usize,
    pub b_star: Vec<ColorId>,
    pub c_star: usize,
    pub d_star: Vec<ColorId>,
}

impl ColorLedger {
    pub fn new(m: usize, palette: &[ColorId]) -> Self {
        let empty = FixedBitSet::with_capacity(m);
        ColorLedger {
            palette: crate::collection::color_set(m, palette.iter().copied()),
            d: empty.clone(),
            a: empty.clone(),
            c: empty.clone(),
            b: empty.clone(),
            used: empty.clone(),
            b_star: empty.clone(),
            c_star: empty.clone(),
            d_star: empty,
        }
    }

    /// Marks `c` spent; spending a color twice or outside the palette is an
    /// accounting error.
    pub fn spend(&mut self, c: ColorId) -> Result<()> {
        if !self.palette.contains(c) || self.used.put(c) {
            return Err(Error::stage("ledger", format!("color {c} spent twice or outside the palette")));
        }
        self.b_star.set(c, false);
        self.c_star.set(c, false);
        self.d_star.set(c, false);
        Ok(())
    }

    /// `d, a, c, b` are pairwise disjoint and cover the palette.
    pub fn is_partition(&self) -> bool {
        let sets = [&self.d, &self.a, &self.c, &self.b];
        let total: usize = sets.iter().map(|s| s.count_ones(..)).sum();
        let mut union = self.d.clone();
        for s in &sets[1..] {
            union.union_with(s);
        }
        total == self.palette.count_ones(..) && union == self.palette
    }

    /// No spent color is still listed as available.
    pub fn spent_disjoint_from_unspent(&self) -> bool {
        self.used.is_disjoint(&self.b_star) && self.used.is_disjoint(&self.c_star) && self.used.is_disjoint(&self.d_star)
    }

    pub fn all_spent(&self) -> bool {
        self.used == self.palette
    }

    pub fn snapshot(&self) -> LedgerSnapshot {
        LedgerSnapshot {
            palette: self.palette.count_ones(..),
            d: self.d.count_ones(..),
            a: self.a.count_ones(..),
            c: self.c.count_ones(..),
            b: self.b.count_ones(..),
            used: self.used.count_ones(..),
            b_star: self.b_star.ones().collect(),
            c_star: self.c_star.count_ones(..),
            d_star: self.d_star.ones().collect(),
        }
    }
}

/// One pipeline stage: its name, whether it succeeded, a short detail and the
/// ledger when one exists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageRecord {
    pub stage: String,
    pub ok: bool,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ledger: Option<LedgerSnapshot>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageTrace {
    pub records: Vec<StageRecord>,
}

impl StageTrace {
    pub fn ok(&mut self, stage: &str, detail: impl Into<String>) {
        self.push(stage, true, detail, None);
    }

    pub fn fail(&mut self, stage: &str, detail: impl Into<String>) {
        self.push(stage, false, detail, None);
    }

    pub fn push(&mut self, stage: &str, ok: bool, detail: impl Into<String>, ledger: Option<&ColorLedger>) {
        self.records.push(StageRecord {
            stage: stage.to_string(),
            ok,
            detail: detail.into(),
            ledger: ledger.map(ColorLedger::snapshot),
        });
    }

    /// One JSON object per line.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).expect("record serializes"));
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMode {
    /// Oracle up to `oracle_fallback_n`, otherwise constructive with oracle fallback.
    Auto,
    /// Constructive only; failure is reported as `budget_exhausted`.
    Constructive,
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    Constructive,
    Oracle,
}

/// Outcome of a solve call plus how it was reached.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveReport {
    pub outcome: OracleOutcome,
    pub route: Route,
    /// For cycles: `m = n` and at least `n - 1` strongly connected members.
    /// Always true for paths with `m >= n - 1`.
    pub precondition_met: bool,
    pub constructive_attempted: bool,
    pub constructive_succeeded: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub constructive_error: Option<String>,
    #[serde(skip)]
    pub trace: StageTrace,
}

/// Whether the cycle theorem's hypothesis holds: `m = n` and all but at most
/// one tournament strongly connected.
pub fn cycle_precondition(t: &TournamentCollection) -> bool {
    let weak = t.tournaments().iter().filter(|x| !x.is_strongly_connected()).count();
    t.m() == t.n() && weak <= 1
}

/// Transversal Hamilton path in auto mode.
pub fn transversal_ham_path(t: &TournamentCollection, params: &PipelineParams) -> Result<SolveReport> {
    solve(t, Shape::Path, SolveMode::Auto, params)
}

/// Transversal Hamilton cycle in auto mode.
pub fn transversal_ham_cycle(t: &TournamentCollection, params: &PipelineParams) -> Result<SolveReport> {
    solve(t, Shape::Cycle, SolveMode::Auto, params)
}

pub fn solve(t: &TournamentCollection, shape: Shape, mode: SolveMode, params: &PipelineParams) -> Result<SolveReport> {
    params.validate()?;
    let n = t.n();
    let precondition_met = match shape {
        Shape::Path => t.m() + 1 >= n,
        Shape::Cycle => cycle_precondition(t),
    };
    let mut report = SolveReport {
        outcome: OracleOutcome::exhausted(0, 0),
        route: Route::Oracle,
        precondition_met,
        constructive_attempted: false,
        constructive_succeeded: false,
        constructive_error: None,
        trace: StageTrace::default(),
    };
    let try_constructive = match mode {
        SolveMode::Exact => false,
        SolveMode::Constructive => true,
        SolveMode::Auto => n > params.oracle_fallback_n,
    };
    if try_constructive {
        report.constructive_attempted = true;
        report.route = Route::Constructive;
        let start = Instant::now();
        let attempt = if !precondition_met {
            Err(Error::stage("precondition", "hypotheses of the theorem do not hold"))
        } else {
            match shape {
                Shape::Path => constructive_path(t, params, &mut report.trace).map(Witness::Path),
                Shape::Cycle => constructive_cycle(t, params, &mut report.trace).map(Witness::Cycle),
            }
        };
        let millis = start.elapsed().as_millis() as u64;
        match attempt {
            Ok(w) if w.valid(t) && w.is_hamilton(t) => {
                report.constructive_succeeded = true;
                report.trace.ok("constructive", "witness validates");
                report.outcome = OracleOutcome::found(w, 0, millis);
                return Ok(report);
            }
            Ok(_) => {
                // never hand out an unverified witness
                report.trace.fail("constructive", "witness failed validation");
                report.constructive_error = Some("constructive witness failed validation".into());
            }
            Err(e) => {
                report.trace.fail("constructive", e.to_string());
                report.constructive_error = Some(e.to_string());
            }
        }
        if mode == SolveMode::Constructive {
            report.outcome = OracleOutcome::exhausted(0, millis);
            return Ok(report);
        }
    }
    report.route = Route::Oracle;
    if n > crate::oracle::MAX_EXACT_N {
        report.trace.fail("oracle", format!("n = {n} is beyond exact search"));
        report.outcome = OracleOutcome::exhausted(0, 0);
        return Ok(report);
    }
    let opts = SearchOptions::new(shape).budget(params.budget);
    report.outcome = search(t, &opts)?;
    let status = report.outcome.status;
    report.trace.ok("oracle", format!("{status:?}"));
    if status == Status::Found {
        debug_assert!(report.outcome.witness.as_ref().is_some_and(|w| w.valid(t)));
    }
    Ok(report)
}

/// `colors` as a sorted list.
pub(crate) fn ones(s: &FixedBitSet) -> Vec<ColorId> {
    s.ones().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{fig1_counterexamples, prop14_collection, random_collection};

    #[test]
    fn params_validate_ordering() {
        assert!(PipelineParams::default().validate().is_ok());
        let r = |a, b| Ratio::new(a, b);
        assert!(PipelineParams::new(r(1, 10), r(1, 20), r(1, 5), r(1, 4)).is_err());
        assert!(PipelineParams::new(r(1, 100), r(1, 20), r(1, 10), r(3, 4)).is_err());
        assert!(PipelineParams::new(r(1, 100), r(1, 5), r(1, 4), r(1, 2)).is_err());
        assert!(PipelineParams::new(r(1, 100), r(1, 20), r(1, 10), r(1, 2)).is_ok());
    }

    #[test]
    fn ledger_accounting() {
        let mut l = ColorLedger::new(6, &[0, 1, 2, 3, 4]);
        l.d.insert(0);
        l.a.insert(1);
        l.c.insert_range(2..4);
        assert!(!l.is_partition());
        l.b.insert(4);
        assert!(l.is_partition());
        l.c_star.insert(3);
        l.spend(3).unwrap();
        assert!(l.spent_disjoint_from_unspent());
        assert!(l.spend(3).is_err());
        assert!(l.spend(5).is_err());
        assert!(!l.all_spent());
    }

    #[test]
    fn small_instances_use_oracle() {
        let (p, c) = fig1_counterexamples();
        let params = PipelineParams::default();
        let r = transversal_ham_path(&p, &params).unwrap();
        assert_eq!((r.outcome.status, r.route), (Status::NotExists, Route::Oracle));
        let r = transversal_ham_cycle(&c, &params).unwrap();
        assert_eq!(r.outcome.status, Status::NotExists);
        let r = transversal_ham_cycle(&prop14_collection(6).unwrap(), &params).unwrap();
        assert_eq!(r.outcome.status, Status::NotExists);
        assert!(!r.precondition_met);
    }

    #[test]
    fn constructive_mode_reports_failure_without_oracle() {
        let t = random_collection(6, 5, 1, false).unwrap();
        let r = solve(&t, Shape::Path, SolveMode::Constructive, &PipelineParams::default()).unwrap();
        assert!(r.constructive_attempted);
        assert!(r.outcome.status != Status::NotExists);
    }

    #[test]
    fn trace_is_json_lines() {
        let mut tr = StageTrace::default();
        tr.ok("a", "x");
        tr.push("b", false, "y", Some(&ColorLedger::new(3, &[0, 1])));
        let text = tr.to_jsonl();
        assert_eq!(text.lines().count(), 2);
        for line in text.lines() {
            let v: serde_json::Value = serde_json::from_str(line).unwrap();
            assert!(v.get("stage").is_some());
        }
    }
}
