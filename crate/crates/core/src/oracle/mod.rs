//! Exact decision procedures.
//!
//! [`backtrack`] extends a path one arc at a time and keeps an incremental
//! arc-to-color matching, so an infeasible prefix is cut as soon as Hall's
//! condition fails. [`permutation`] enumerates vertex orders and runs one
//! Hopcroft-Karp test per order; it is slow and exists to certify the first.

pub mod backtrack;
pub mod permutation;

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::digraph::{RainbowCycle, RainbowPath};

pub use backtrack::{
    count_transversal_ham, exact_rainbow_path, exact_transversal_ham_cycle, exact_transversal_ham_path,
    is_strongly_rainbow_connected, search, Shape, SearchOptions,
};

/// Largest `n` the exact searches accept (vertex sets are `u64` masks).
pub const MAX_EXACT_N: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    pub max_nodes: Option<u64>,
    pub time_limit: Option<Duration>,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget::unlimited()
    }
}

impl SearchBudget {
    pub fn unlimited() -> Self {
        SearchBudget {
            max_nodes: None,
            time_limit: None,
        }
    }

    pub fn nodes(max_nodes: u64) -> Self {
        SearchBudget {
            max_nodes: Some(max_nodes),
            time_limit: None,
        }
    }

    pub fn with_time_limit(mut self, limit: Duration) -> Self {
        self.time_limit = Some(limit);
        self
    }
}

/// Node and clock accounting shared by the searches.
#[derive(Debug)]
pub(crate) struct Meter {
    pub nodes: u64,
    max_nodes: u64,
    deadline: Option<Instant>,
    pub exhausted: bool,
}

impl Meter {
    pub fn new(budget: &SearchBudget) -> Self {
        Meter {
            nodes: 0,
            max_nodes: budget.max_nodes.unwrap_or(u64::MAX),
            deadline: budget.time_limit.map(|d| Instant::now() + d),
            exhausted: false,
        }
    }

    /// Counts one node; returns `false` once the budget is spent.
    #[inline]
    pub fn tick(&mut self) -> bool {
        if self.exhausted {
            return false;
        }
        self.nodes += 1;
        if self.nodes > self.max_nodes {
            self.exhausted = true;
        } else if self.nodes & 1023 == 0 {
            if let Some(d) = self.deadline {
                self.exhausted = Instant::now() >= d;
            }
        }
        !self.exhausted
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Found,
    NotExists,
    BudgetExhausted,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness {
    Path(RainbowPath),
    Cycle(RainbowCycle),
}

impl Witness {
    pub fn valid(&self, t: &crate::TournamentCollection) -> bool {
        match self {
            Witness::Path(p) => p.valid(t),
            Witness::Cycle(c) => c.valid(t),
        }
    }

    pub fn is_hamilton(&self, t: &crate::TournamentCollection) -> bool {
        match self {
            Witness::Path(p) => p.is_hamilton(t),
            Witness::Cycle(c) => c.is_hamilton(t),
        }
    }

    pub fn path(&self) -> Option<&RainbowPath> {
        match self {
            Witness::Path(p) => Some(p),
            Witness::Cycle(_) => None,
        }
    }

    pub fn cycle(&self) -> Option<&RainbowCycle> {
        match self {
            Witness::Cycle(c) => Some(c),
            Witness::Path(_) => None,
        }
    }
}

/// Result of a decision procedure. `Found` carries a witness; `NotExists` is
/// only reported after an exhaustive search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleOutcome {
    pub status: Status,
    pub witness: Option<Witness>,
    pub nodes_expanded: u64,
    pub millis: u64,
}

impl OracleOutcome {
    pub fn found(witness: Witness, nodes_expanded: u64, millis: u64) -> Self {
        OracleOutcome {
            status: Status::Found,
            witness: Some(witness),
            nodes_expanded,
            millis,
        }
    }

    pub fn not_exists(nodes_expanded: u64, millis: u64) -> Self {
        OracleOutcome {
            status: Status::NotExists,
            witness: None,
            nodes_expanded,
            millis,
        }
    }

    pub fn exhausted(nodes_expanded: u64, millis: u64) -> Self {
        OracleOutcome {
            status: Status::BudgetExhausted,
            witness: None,
            nodes_expanded,
            millis,
        }
    }

    pub fn path(&self) -> Option<&RainbowPath> {
        self.witness.as_ref().and_then(Witness::path)
    }

    pub fn cycle(&self) -> Option<&RainbowCycle> {
        self.witness.as_ref().and_then(Witness::cycle)
    }
}
