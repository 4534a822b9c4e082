use std::time::Instant;

use fixedbitset::FixedBitSet;

use super::{Meter, OracleOutcome, SearchBudget, Witness, MAX_EXACT_N};
use crate::collection::TournamentCollection;
use crate::digraph::{RainbowCycle, RainbowPath};
use crate::error::{Error, Result};
use crate::matching::IncrementalMatcher;
use crate::{ColorId, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Shape {
    Path,
    Cycle,
}

/// Knobs for [`search`]. The two prunes never change the answer, only the
/// amount of work.
#[derive(Debug, Clone)]
pub struct SearchOptions {
    pub shape: Shape,
    /// Path must run from the first to the second vertex. Paths only.
    pub endpoints: Option<(VertexId, VertexId)>,
    /// Colors that must all appear on the witness.
    pub required: Option<FixedBitSet>,
    /// Restrict to these colors; `None` allows every color.
    pub palette: Option<FixedBitSet>,
    pub matching_prune: bool,
    pub reach_prune: bool,
    pub budget: SearchBudget,
}

impl SearchOptions {
    pub fn new(shape: Shape) -> Self {
        SearchOptions {
            shape,
            endpoints: None,
            required: None,
            palette: None,
            matching_prune: true,
            reach_prune: true,
            budget: SearchBudget::unlimited(),
        }
    }

    pub fn path() -> Self {
        SearchOptions::new(Shape::Path)
    }

    pub fn cycle() -> Self {
        SearchOptions::new(Shape::Cycle)
    }

    pub fn budget(mut self, budget: SearchBudget) -> Self {
        self.budget = budget;
        self
    }

    pub fn endpoints(mut self, endpoints: Option<(VertexId, VertexId)>) -> Self {
        self.endpoints = endpoints;
        self
    }

    pub fn required(mut self, required: Option<FixedBitSet>) -> Self {
        self.required = required;
        self
    }

    pub fn palette(mut self, palette: Option<FixedBitSet>) -> Self {
        self.palette = palette;
        self
    }

    pub fn prunes(mut self, matching: bool, reach: bool) -> Self {
        self.matching_prune = matching;
        self.reach_prune = reach;
        self
    }
}

enum Flow {
    Continue,
    Found,
    Abort,
}

struct Ctx<'a> {
    n: usize,
    m: usize,
    avail: Vec<FixedBitSet>,
    union_out: Vec<u64>,
    opts: &'a SearchOptions,
    meter: Meter,
    matcher: IncrementalMatcher,
    path: Vec<VertexId>,
    count_all: bool,
    count: u64,
    witness: Option<Witness>,
}

impl<'a> Ctx<'a> {
    fn new(t: &TournamentCollection, opts: &'a SearchOptions) -> Self {
        let n = t.n();
        let m = t.m();
        let mut avail = vec![FixedBitSet::with_capacity(m); n * n];
        let mut union_out = vec![0u64; n];
        for u in 0..n {
            for v in 0..n {
                if u == v {
                    continue;
                }
                let mut colors = t.arc_colors(u, v);
                if let Some(p) = &opts.palette {
                    colors.intersect_with(p);
                }
                if !colors.is_clear() {
                    union_out[u] |= 1 << v;
                }
                avail[u * n + v] = colors;
            }
        }
        Ctx {
            n,
            m,
            avail,
            union_out,
            opts,
            meter: Meter::new(&opts.budget),
            matcher: IncrementalMatcher::new(m),
            path: Vec::with_capacity(n),
            count_all: false,
            count: 0,
            witness: None,
        }
    }

    fn arc(&self, u: VertexId, v: VertexId) -> &FixedBitSet {
        &self.avail[u * self.n + v]
    }

    fn all_reachable(&self, from: VertexId, unvisited: u64) -> bool {
        let mut reached = self.union_out[from] & unvisited;
        let mut frontier = reached;
        while frontier != 0 {
            let b = frontier.trailing_zeros() as usize;
            frontier &= frontier - 1;
            let new = self.union_out[b] & unvisited & !reached;
            reached |= new;
            frontier |= new;
        }
        reached == unvisited
    }

    /// Checks the finished vertex sequence and records a witness on success.
    fn leaf(&mut self) -> bool {
        let n = self.path.len();
        let closing = self.opts.shape == Shape::Cycle;
        let mut scratch;
        let matcher = if self.opts.matching_prune {
            &mut self.matcher
        } else {
            scratch = IncrementalMatcher::new(self.m);
            for w in self.path.windows(2) {
                if !scratch.push(self.avail[w[0] * self.n + w[1]].clone()) {
                    return false;
                }
            }
            &mut scratch
        };
        if closing {
            let last = self.path[n - 1];
            if !matcher.push(self.avail[last * self.n + self.path[0]].clone()) {
                return false;
            }
        }
        let ok = match &self.opts.required {
            Some(req) => matcher.saturate_required(req),
            None => true,
        };
        if ok && !self.count_all {
            let colors = matcher.assignment().to_vec();
            let vertices = self.path.clone();
            self.witness = Some(if closing {
                Witness::Cycle(RainbowCycle::new(vertices, colors))
            } else {
                Witness::Path(RainbowPath::new(vertices, colors))
            });
        }
        if closing {
            matcher.pop();
        }
        ok
    }

    fn dfs(&mut self, unvisited: u64) -> Flow {
        if !self.meter.tick() {
            return Flow::Abort;
        }
        if unvisited == 0 {
            if self.leaf() {
                if self.count_all {
                    self.count += 1;
                } else {
                    return Flow::Found;
                }
            }
            return Flow::Continue;
        }
        let last = *self.path.last().expect("search starts from a vertex");
        let end = self.opts.endpoints.map(|(_, v)| v);
        let mut candidates = self.union_out[last] & unvisited;
        if let Some(v) = end {
            if unvisited != 1 << v {
                candidates &= !(1 << v);
            }
        }
        while candidates != 0 {
            let next = candidates.trailing_zeros() as usize;
            candidates &= candidates - 1;
            let rest = unvisited & !(1 << next);
            if self.opts.matching_prune && !self.matcher.push(self.arc(last, next).clone()) {
                continue;
            }
            let reach_ok = !self.opts.reach_prune || rest == 0 || self.all_reachable(next, rest);
            if reach_ok {
                self.path.push(next);
                let flow = self.dfs(rest);
                self.path.pop();
                if !matches!(flow, Flow::Continue) {
                    if self.opts.matching_prune {
                        self.matcher.pop();
                    }
                    return flow;
                }
            }
            if self.opts.matching_prune {
                self.matcher.pop();
            }
        }
        Flow::Continue
    }

    fn run(&mut self) -> Flow {
        let n = self.n;
        let full: u64 = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        let starts: Vec<VertexId> = match (self.opts.shape, self.opts.endpoints) {
            (Shape::Cycle, _) => vec![0],
            (Shape::Path, Some((u, _))) => vec![u],
            (Shape::Path, None) => (0..n).collect(),
        };
        for s in starts {
            self.path.clear();
            self.path.push(s);
            match self.dfs(full & !(1 << s)) {
                Flow::Continue => {}
                other => return other,
            }
        }
        Flow::Continue
    }
}

fn check_args(t: &TournamentCollection, opts: &SearchOptions) -> Result<()> {
    let n = t.n();
    if n == 0 || n > MAX_EXACT_N {
        return Err(Error::invalid(format!("exact search supports 1 <= n <= {MAX_EXACT_N}, got {n}")));
    }
    if let Some((u, v)) = opts.endpoints {
        if opts.shape == Shape::Cycle {
            return Err(Error::invalid("endpoints apply to paths only"));
        }
        if u >= n || v >= n || (u == v && n > 1) {
            return Err(Error::invalid(format!("bad endpoints ({u}, {v}) for n = {n}")));
        }
    }
    for set in [&opts.required, &opts.palette].into_iter().flatten() {
        if set.ones().any(|c| c >= t.m()) {
            return Err(Error::invalid("color set mentions a color outside the collection"));
        }
    }
    Ok(())
}

/// Exhaustive search for a transversal Hamilton path or cycle.
pub fn search(t: &TournamentCollection, opts: &SearchOptions) -> Result<OracleOutcome> {
    check_args(t, opts)?;
    let start = Instant::now();
    let n = t.n();
    if opts.shape == Shape::Cycle && n == 1 {
        return Ok(OracleOutcome::not_exists(0, 0));
    }
    let mut ctx = Ctx::new(t, opts);
    let flow = ctx.run();
    let millis = start.elapsed().as_millis() as u64;
    let nodes = ctx.meter.nodes;
    Ok(match flow {
        Flow::Found => OracleOutcome::found(ctx.witness.take().expect("witness recorded"), nodes, millis),
        Flow::Abort => OracleOutcome::exhausted(nodes, millis),
        Flow::Continue => OracleOutcome::not_exists(nodes, millis),
    })
}

/// Decides whether `t` has a transversal Hamilton path (from `u` to `v` if
/// endpoints are given).
pub fn exact_transversal_ham_path(
    t: &TournamentCollection,
    endpoints: Option<(VertexId, VertexId)>,
    budget: SearchBudget,
) -> Result<OracleOutcome> {
    search(t, &SearchOptions::path().endpoints(endpoints).budget(budget))
}

/// Decides whether `t` has a transversal Hamilton cycle. Cycles are anchored
/// at vertex 0.
pub fn exact_transversal_ham_cycle(t: &TournamentCollection, budget: SearchBudget) -> Result<OracleOutcome> {
    search(t, &SearchOptions::cycle().budget(budget))
}

/// Counts vertex sequences (cycles up to rotation) that admit a rainbow
/// coloring. Debug aid, limited to `n <= 7`. `None` if the budget ran out.
pub fn count_transversal_ham(t: &TournamentCollection, shape: Shape, budget: SearchBudget) -> Result<Option<u64>> {
    if t.n() > 7 {
        return Err(Error::invalid("counting is limited to n <= 7"));
    }
    let opts = SearchOptions::new(shape).budget(budget);
    check_args(t, &opts)?;
    if shape == Shape::Cycle && t.n() == 1 {
        return Ok(Some(0));
    }
    let mut ctx = Ctx::new(t, &opts);
    ctx.count_all = true;
    Ok(match ctx.run() {
        Flow::Abort => None,
        _ => Some(ctx.count),
    })
}

/// Decides whether some rainbow path (of any length) runs from `x` to `y`.
pub fn exact_rainbow_path(
    t: &TournamentCollection,
    x: VertexId,
    y: VertexId,
    budget: SearchBudget,
) -> Result<OracleOutcome> {
    let n = t.n();
    if x == y || x >= n || y >= n || n > MAX_EXACT_N {
        return Err(Error::invalid(format!("bad rainbow path query {x} -> {y} for n = {n}")));
    }
    let start = Instant::now();
    let opts = SearchOptions::path().budget(budget);
    let mut ctx = Ctx::new(t, &opts);
    ctx.path.push(x);
    let flow = rainbow_dfs(&mut ctx, y, !(1u64 << x));
    let millis = start.elapsed().as_millis() as u64;
    let nodes = ctx.meter.nodes;
    Ok(match flow {
        Flow::Found => OracleOutcome::found(ctx.witness.take().expect("witness recorded"), nodes, millis),
        Flow::Abort => OracleOutcome::exhausted(nodes, millis),
        Flow::Continue => OracleOutcome::not_exists(nodes, millis),
    })
}

fn rainbow_dfs(ctx: &mut Ctx<'_>, y: VertexId, unvisited: u64) -> Flow {
    if !ctx.meter.tick() {
        return Flow::Abort;
    }
    let last = *ctx.path.last().unwrap();
    if ctx.union_out[last] >> y & 1 == 1 && ctx.matcher.push(ctx.arc(last, y).clone()) {
        let mut vertices = ctx.path.clone();
        vertices.push(y);
        let colors: Vec<ColorId> = ctx.matcher.assignment().to_vec();
        ctx.matcher.pop();
        ctx.witness = Some(Witness::Path(RainbowPath::new(vertices, colors)));
        return Flow::Found;
    }
    let mut candidates = ctx.union_out[last] & unvisited & !(1u64 << y) & mask(ctx.n);
    while candidates != 0 {
        let next = candidates.trailing_zeros() as usize;
        candidates &= candidates - 1;
        if !ctx.matcher.push(ctx.arc(last, next).clone()) {
            continue;
        }
        ctx.path.push(next);
        let flow = rainbow_dfs(ctx, y, unvisited & !(1 << next));
        ctx.path.pop();
        ctx.matcher.pop();
        if !matches!(flow, Flow::Continue) {
            return flow;
        }
    }
    Flow::Continue
}

fn mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Whether every ordered pair is joined by a rainbow path. `None` if some
/// query exhausted `budget` (which applies per pair) before a negative answer
/// was found.
pub fn is_strongly_rainbow_connected(t: &TournamentCollection, budget: SearchBudget) -> Result<Option<bool>> {
    let n = t.n();
    let mut undecided = false;
    for x in 0..n {
        for y in 0..n {
            if x == y {
                continue;
            }
            match exact_rainbow_path(t, x, y, budget)?.status {
                super::Status::Found => {}
                super::Status::NotExists => return Ok(Some(false)),
                super::Status::BudgetExhausted => undecided = true,
            }
        }
    }
    Ok(if undecided { None } else { Some(true) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{directed_triangle, fig1_counterexamples, prop14_collection, transitive_tournament};
    use crate::oracle::Status;

    fn unlimited() -> SearchBudget {
        SearchBudget::unlimited()
    }

    #[test]
    fn fig1_path_instance_has_no_path() {
        let (p, _) = fig1_counterexamples();
        let out = exact_transversal_ham_path(&p, None, unlimited()).unwrap();
        assert_eq!(out.status, Status::NotExists);
    }

    #[test]
    fn fig1_cycle_instance_has_no_cycle() {
        let (_, c) = fig1_counterexamples();
        let out = exact_transversal_ham_cycle(&c, unlimited()).unwrap();
        assert_eq!(out.status, Status::NotExists);
    }

    #[test]
    fn identical_transitive_pair_has_path() {
        let t = TournamentCollection::repeated(&transitive_tournament(3), 2);
        let out = exact_transversal_ham_path(&t, None, unlimited()).unwrap();
        assert_eq!(out.status, Status::Found);
        let p = out.path().unwrap();
        assert_eq!(p.vertices, vec![0, 1, 2]);
        assert!(p.is_hamilton(&t));
    }

    #[test]
    fn identical_triangles_have_cycle() {
        let t = TournamentCollection::repeated(&directed_triangle(), 3);
        let out = exact_transversal_ham_cycle(&t, unlimited()).unwrap();
        let c = out.cycle().unwrap();
        assert_eq!(c.vertices, vec![0, 1, 2]);
        assert!(c.is_hamilton(&t));
    }

    #[test]
    fn prop14_small_has_no_cycle() {
        for n in 3..=8 {
            let t = prop14_collection(n).unwrap();
            let out = exact_transversal_ham_cycle(&t, unlimited()).unwrap();
            assert_eq!(out.status, Status::NotExists, "n = {n}");
        }
    }

    #[test]
    fn endpoints_are_respected() {
        let t = TournamentCollection::repeated(&transitive_tournament(4), 3);
        let out = exact_transversal_ham_path(&t, Some((0, 3)), unlimited()).unwrap();
        assert_eq!(out.path().unwrap().vertices, vec![0, 1, 2, 3]);
        let out = exact_transversal_ham_path(&t, Some((3, 0)), unlimited()).unwrap();
        assert_eq!(out.status, Status::NotExists);
        assert!(exact_transversal_ham_path(&t, Some((0, 0)), unlimited()).is_err());
    }

    #[test]
    fn budget_is_reported() {
        let t = prop14_collection(9).unwrap();
        let out = exact_transversal_ham_cycle(&t, SearchBudget::nodes(10)).unwrap();
        assert_eq!(out.status, Status::BudgetExhausted);
        assert!(out.witness.is_none());
    }

    #[test]
    fn rainbow_path_examples() {
        let (p, c) = fig1_counterexamples();
        let out = exact_rainbow_path(&p, 0, 2, unlimited()).unwrap();
        assert_eq!(out.status, Status::Found);
        assert!(out.path().unwrap().valid(&p));

        let single = TournamentCollection::repeated(&transitive_tournament(4), 1);
        let out = exact_rainbow_path(&single, 3, 0, unlimited()).unwrap();
        assert_eq!(out.status, Status::NotExists);
        assert_eq!(is_strongly_rainbow_connected(&single, unlimited()).unwrap(), Some(false));
        assert_eq!(is_strongly_rainbow_connected(&c, unlimited()).unwrap(), Some(true));
    }

    #[test]
    fn required_color_is_used() {
        let p14 = prop14_collection(4).unwrap();
        let mut req = FixedBitSet::with_capacity(4);
        req.insert(3);
        let out = search(&p14, &SearchOptions::path().required(Some(req))).unwrap();
        let p = out.path().unwrap();
        assert!(p.is_hamilton(&p14));
        assert!(p.colors.contains(&3));
    }

    #[test]
    fn counting_small() {
        // one transitive tournament per color: only 0 -> 1 -> 2
        let t = TournamentCollection::repeated(&transitive_tournament(3), 2);
        assert_eq!(count_transversal_ham(&t, Shape::Path, unlimited()).unwrap(), Some(1));
        let t = TournamentCollection::repeated(&directed_triangle(), 3);
        assert_eq!(count_transversal_ham(&t, Shape::Cycle, unlimited()).unwrap(), Some(1));
        assert_eq!(count_transversal_ham(&t, Shape::Path, unlimited()).unwrap(), Some(3));
    }
}
