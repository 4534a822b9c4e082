//! Transversal Hamilton cycle. After partitioning the majority tournament and
//! fixing Hamilton paths `x .. x'` and `y' .. y` of the two end blocks, a short
//! rainbow `y -> x` connection (one arc, or a rainbow path of length three)
//! lets the four-step lemma close the cycle through the middle. Otherwise a
//! longest-path machine grows a rainbow `y -> x` path by exchange moves and
//! closes it with the last unused color.

use fixedbitset::FixedBitSet;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::dhp::{rainbow_dhp_on, DhpInstance};
use super::exchange::{splice_saturate, unused_colors};
use super::path::{block_caps, greedy_colors};
use super::{PipelineParams, StageTrace};
use crate::collection::{ceil_mul, color_set, TournamentCollection};
use crate::constructive::connect::rainbow_connect_ordered;
use crate::constructive::hpartition::{h_partition, HPartition};
use crate::digraph::{RainbowCycle, RainbowPath};
use crate::error::{Error, Result};
use crate::generators::{derive_seed, seeded_rng};
use crate::matching::{hopcroft_karp, IncrementalMatcher};
use crate::tournament::Tournament;
use crate::{ColorId, Ratio, VertexId};

/// Node budget of each path-extension search in the longest-path machine.
const EXTENSION_NODES: u64 = 50_000;

/// Bookkeeping of the longest-path machine, named after the proof's anchors.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleSearchState {
    /// Current path.
    pub p: Vec<VertexId>,
    /// Colors not on the current path.
    pub d_unused: Vec<ColorId>,
    /// Outside vertices beating the path start in every unused color.
    pub s_plus: Vec<VertexId>,
    /// Outside vertices beaten by the path end in every unused color.
    pub s_minus: Vec<VertexId>,
    pub x: VertexId,
    pub y: VertexId,
    pub x_prime: VertexId,
    pub y_prime: VertexId,
    /// Separators `w_0..w_r`.
    pub w: Vec<VertexId>,
    /// Vertex counts of the saturated `y -> x` path, after extending the end,
    /// and after extending the start.
    pub k: usize,
    pub k1: usize,
    pub k2: usize,
}

impl CycleSearchState {
    fn record(&mut self, t: &TournamentCollection, p: &RainbowPath) {
        self.p = p.vertices.clone();
        self.d_unused = unused_colors(t, p);
    }
}

/// Constructive branch for the transversal Hamilton cycle. Needs `m = n`
/// with at least `n - 1` strongly connected members.
pub fn constructive_cycle(t: &TournamentCollection, params: &PipelineParams, trace: &mut StageTrace) -> Result<RainbowCycle> {
    let n = t.n();
    if n < 8 {
        return Err(Error::stage("precondition", format!("constructive branch needs n >= 8, got {n}")));
    }
    if !super::cycle_precondition(t) {
        return Err(Error::stage("precondition", "need m = n and at most one non-strong tournament"));
    }
    let palette: Vec<ColorId> = (0..n).collect();
    let tmaj = t.majority_subtournament(None, Ratio::new(1, 2))?;
    let mut last_err = Error::stage("partition", "no block cap gives at least four blocks");
    for (k, (mu_k, ell)) in block_caps(params, n).into_iter().enumerate() {
        let part = h_partition(&tmaj, ell, params.gamma)?;
        if part.r() < 4 {
            trace.fail("partition", format!("mu={mu_k} ell={ell}: only {} blocks", part.r()));
            continue;
        }
        trace.ok("partition", format!("mu={mu_k} ell={ell} blocks={}", part.r()));
        for attempt in 0..params.attempts_per_scale.max(1) {
            let seed = derive_seed(params.seed, ((k as u64) << 32) | attempt as u64);
            match attempt_cycle(t, &tmaj, &part, &palette, params, seed, trace) {
                Ok(c) => return Ok(c),
                Err(e) => last_err = e,
            }
        }
    }
    Err(last_err)
}

fn attempt_cycle(
    t: &TournamentCollection,
    tmaj: &Tournament,
    part: &HPartition,
    palette: &[ColorId],
    params: &PipelineParams,
    seed: u64,
    trace: &mut StageTrace,
) -> Result<RainbowCycle> {
    let n = t.n();
    let nb = part.blocks.len();
    let p0 = tmaj.hamilton_path(&part.blocks[0]);
    let p_last = tmaj.hamilton_path(&part.blocks[nb - 1]);
    let (x, y) = (p0[0], *p_last.last().unwrap());
    let mut rng = seeded_rng(seed, 0xc1);

    let direct: Vec<ColorId> = palette.iter().copied().filter(|&c| t.has_arc(c, y, x)).collect();
    if let Some(&c) = direct.choose(&mut rng) {
        trace.ok("closing", format!("case 1: color {c} has {y}->{x}"));
        let mid = RainbowPath::new(vec![y, x], vec![c]);
        return close_through_middle(t, tmaj, part, palette, &p0, &p_last, mid, params, seed, trace);
    }

    let mut excluded = FixedBitSet::with_capacity(n);
    excluded.extend(part.separators.iter().copied());
    excluded.extend(part.blocks[0].iter().copied());
    excluded.extend(part.blocks[nb - 1].iter().copied());
    let short = disjoint_short_paths(t, y, x);
    let threshold = ceil_mul(params.mu * 10, n);
    let usable = short
        .iter()
        .find(|p| !excluded.contains(p.vertices[1]) && !excluded.contains(p.vertices[2]));
    match usable {
        Some(mid) if short.len() > threshold => {
            trace.ok(
                "closing",
                format!("case 2: {} disjoint rainbow paths of length three (threshold {threshold})", short.len()),
            );
            close_through_middle(t, tmaj, part, palette, &p0, &p_last, mid.clone(), params, seed, trace)
        }
        _ => {
            trace.ok(
                "closing",
                format!("case 3: {} short paths (threshold {threshold}); longest-path machine", short.len()),
            );
            let mut state = CycleSearchState {
                x,
                y,
                x_prime: *p0.last().unwrap(),
                y_prime: p_last[0],
                w: part.separators.clone(),
                ..CycleSearchState::default()
            };
            let res = longest_path_machine(t, &mut state);
            trace.push(
                "machine",
                res.is_ok(),
                serde_json::to_string(&state).expect("state serializes"),
                None,
            );
            res
        }
    }
}

/// Greedy maximal family of internally disjoint rainbow paths `y -> u -> v -> x`.
pub fn disjoint_short_paths(t: &TournamentCollection, y: VertexId, x: VertexId) -> Vec<RainbowPath> {
    let n = t.n();
    let mut used = FixedBitSet::with_capacity(n);
    used.insert(x);
    used.insert(y);
    let mut out = Vec::new();
    for u in 0..n {
        if used.contains(u) {
            continue;
        }
        let a = t.arc_colors(y, u);
        if a.is_clear() {
            continue;
        }
        for v in 0..n {
            if v == u || used.contains(v) {
                continue;
            }
            let sets = [a.clone(), t.arc_colors(u, v), t.arc_colors(v, x)];
            let mut matcher = IncrementalMatcher::new(t.m());
            if sets.into_iter().all(|s| matcher.push(s)) {
                out.push(RainbowPath::new(vec![y, u, v, x], matcher.assignment().to_vec()));
                used.insert(u);
                used.insert(v);
                break;
            }
        }
    }
    out
}

/// Removes the interior of `mid` (a rainbow `y -> x` path) from the middle
/// blocks, colors the end blocks with their connecting arcs, and runs the
/// four-step lemma from `w_0` to `w_r` on what is left.
#[allow(clippy::too_many_arguments)]
fn close_through_middle(
    t: &TournamentCollection,
    tmaj: &Tournament,
    part: &HPartition,
    palette: &[ColorId],
    p0: &[VertexId],
    p_last: &[VertexId],
    mid: RainbowPath,
    params: &PipelineParams,
    seed: u64,
    trace: &mut StageTrace,
) -> Result<RainbowCycle> {
    let nb = part.blocks.len();
    let (w0, wr) = (part.separators[0], part.separators[nb - 2]);
    let interior = &mid.vertices[1..mid.vertices.len() - 1];
    let blocks: Vec<Vec<VertexId>> = part.blocks[1..nb - 1]
        .iter()
        .map(|b| b.iter().copied().filter(|v| !interior.contains(v)).collect())
        .collect();
    let min_size = blocks.iter().map(Vec::len).min().unwrap_or(0);
    if min_size == 0 {
        return Err(Error::stage("closing", "removing the short path empties a block"));
    }
    let gamma = part.gamma.min(Ratio::new(min_size as u64, part.ell as u64));
    let middle = HPartition {
        blocks,
        separators: part.separators[1..nb - 2].to_vec(),
        ell: part.ell,
        gamma,
    };

    let x_prime = *p0.last().unwrap();
    let y_prime = p_last[0];
    let mut arcs: Vec<(VertexId, VertexId)> = p0.windows(2).map(|w| (w[0], w[1])).collect();
    arcs.push((x_prime, w0));
    arcs.push((wr, y_prime));
    arcs.extend(p_last.windows(2).map(|w| (w[0], w[1])));
    let mut rest: Vec<ColorId> = palette.iter().copied().filter(|c| !mid.colors.contains(c)).collect();
    let mut rng = seeded_rng(seed, 0xc2);
    let colors = greedy_colors(t, &arcs, &mut rest, &mut rng)
        .ok_or_else(|| Error::stage("precolor", "greedy coloring of the end blocks ran out of colors"))?;
    rest.sort_unstable();
    let inst = DhpInstance {
        t,
        tmaj,
        partition: &middle,
        w0,
        wr,
        palette: &rest,
    };
    let (core, _) = rainbow_dhp_on(&inst, params, seed, trace)?;

    // w0 .. wr -> y' .. y -> (mid interior) -> x .. x' -> w0
    let k0 = p0.len() - 1;
    let mut path = core;
    path = path.join(colors[k0 + 1], RainbowPath::new(p_last.to_vec(), colors[k0 + 2..].to_vec()));
    // the short path runs y -> .. -> x, and x starts P_0
    path = path.join(mid.colors[0], RainbowPath::new(mid.vertices[1..].to_vec(), mid.colors[1..].to_vec()));
    if k0 > 0 {
        path = path.join(colors[0], RainbowPath::new(p0[1..].to_vec(), colors[1..k0].to_vec()));
    }
    Ok(RainbowCycle::close(path, colors[k0]))
}

/// Grows a rainbow `y -> x` path by exchange moves, extends its end into `S⁺`
/// and its start from `S⁻`, then closes the cycle with the remaining color.
pub fn longest_path_machine(t: &TournamentCollection, state: &mut CycleSearchState) -> Result<RainbowCycle> {
    let n = t.n();
    let (x, y) = (state.x, state.y);
    let mut order: Vec<ColorId> = (0..t.m()).filter(|&c| t.tournament(c).is_strongly_connected()).collect();
    order.extend((0..t.m()).filter(|&c| !t.tournament(c).is_strongly_connected()));
    let mut all = FixedBitSet::with_capacity(n);
    all.insert_range(..);
    let p = rainbow_connect_ordered(t, y, x, &order, &all)?;
    let p = splice_saturate(t, p);
    state.k = p.vertices.len();
    state.record(t, &p);
    if let Some(c) = try_close(t, &p) {
        return Ok(c);
    }

    let d = color_set(t.m(), state.d_unused.iter().copied());
    let off = outside(t, &p);
    state.s_plus = off.iter().copied().filter(|&z| d.ones().all(|c| t.has_arc(c, z, p.first()))).collect();
    state.s_minus = off.iter().copied().filter(|&z| d.ones().all(|c| t.has_arc(c, p.last(), z))).collect();
    if d.count_ones(..) >= 3 && off.iter().any(|z| !state.s_plus.contains(z) && !state.s_minus.contains(z)) {
        return Err(Error::stage("machine", "an outside vertex lies in neither S+ nor S-"));
    }

    // P1: extend the end, finishing in S+ (or not at all)
    let mut plus = FixedBitSet::with_capacity(n);
    plus.extend(state.s_plus.iter().copied());
    let mut p1 = p;
    loop {
        let before = p1.len();
        if let Some(q) = extend(t, &p1, &plus, true) {
            p1 = q;
        }
        p1 = splice_saturate(t, p1);
        if p1.len() == before {
            break;
        }
    }
    state.k1 = p1.vertices.len();
    state.record(t, &p1);
    if let Some(c) = try_close(t, &p1) {
        return Ok(c);
    }

    // P2: extend the start, beginning in S- minus P1 (or not at all)
    let mut minus = FixedBitSet::with_capacity(n);
    minus.extend(state.s_minus.iter().copied().filter(|z| !p1.vertices.contains(z)));
    let mut p2 = p1;
    loop {
        let before = p2.len();
        if let Some(q) = extend(t, &p2, &minus, false) {
            p2 = q;
        }
        p2 = splice_saturate(t, p2);
        if p2.len() == before {
            break;
        }
    }
    state.k2 = p2.vertices.len();
    state.record(t, &p2);
    try_close(t, &p2).ok_or_else(|| {
        Error::stage(
            "machine",
            format!("path on {} of {n} vertices with {} unused colors does not close", p2.vertices.len(), state.d_unused.len()),
        )
    })
}

fn outside(t: &TournamentCollection, p: &RainbowPath) -> Vec<VertexId> {
    (0..t.n()).filter(|v| !p.vertices.contains(v)).collect()
}

/// Closes a Hamilton path with its unused color, an almost-Hamilton path
/// through the missing vertex with two unused colors, or, failing both,
/// recolors the Hamilton vertex cycle by matching.
fn try_close(t: &TournamentCollection, p: &RainbowPath) -> Option<RainbowCycle> {
    let n = t.n();
    let unused = unused_colors(t, p);
    if p.vertices.len() == n {
        if let Some(&c) = unused.iter().find(|&&c| t.has_arc(c, p.last(), p.first())) {
            return Some(RainbowCycle::close(p.clone(), c));
        }
        return recolor_cycle(t, &p.vertices);
    }
    if p.vertices.len() + 1 == n && unused.len() >= 2 {
        let z = outside(t, p)[0];
        for &a in &unused {
            if !t.has_arc(a, p.last(), z) {
                continue;
            }
            if let Some(&b) = unused.iter().find(|&&b| b != a && t.has_arc(b, z, p.first())) {
                let mut q = p.clone();
                q.push(a, z);
                return Some(RainbowCycle::close(q, b));
            }
        }
        let mut cyc = p.vertices.clone();
        cyc.push(z);
        return recolor_cycle(t, &cyc);
    }
    None
}

/// A rainbow coloring of the cyclic vertex order, if one exists.
pub fn recolor_cycle(t: &TournamentCollection, vertices: &[VertexId]) -> Option<RainbowCycle> {
    let k = vertices.len();
    if k < 2 {
        return None;
    }
    let adj: Vec<Vec<usize>> = (0..k)
        .map(|i| t.arc_colors(vertices[i], vertices[(i + 1) % k]).ones().collect())
        .collect();
    let m = hopcroft_karp(&adj, t.m());
    if !m.is_left_perfect() {
        return None;
    }
    let colors = m.left.iter().map(|c| c.unwrap()).collect();
    Some(RainbowCycle::new(vertices.to_vec(), colors))
}

/// Longest extension of `p` by outside vertices (after its end when `forward`,
/// before its start otherwise) whose new endpoint lies in `accept`, with the
/// new arcs rainbow in colors unused by `p`. Depth-first with a node budget.
fn extend(t: &TournamentCollection, p: &RainbowPath, accept: &FixedBitSet, forward: bool) -> Option<RainbowPath> {
    let n = t.n();
    let free = color_set(t.m(), unused_colors(t, p));
    let mut on = FixedBitSet::with_capacity(n);
    on.extend(p.vertices.iter().copied());
    let anchor = if forward { p.last() } else { p.first() };
    let mut search = Extension {
        t,
        free,
        accept,
        forward,
        on,
        stack: Vec::new(),
        matcher: IncrementalMatcher::new(t.m()),
        best: None,
        nodes: 0,
    };
    search.dfs(anchor);
    let (verts, colors) = search.best?;
    Some(if forward {
        let mut q = p.clone();
        for (v, c) in verts.into_iter().zip(colors) {
            q.push(c, v);
        }
        q
    } else {
        // verts[i] precedes verts[i-1]; colors[i] is the arc into verts[i-1] (or p.first())
        let mut vs: Vec<VertexId> = verts.iter().rev().copied().collect();
        let mut cs: Vec<ColorId> = colors.iter().rev().copied().collect();
        vs.extend_from_slice(&p.vertices);
        cs.extend_from_slice(&p.colors);
        RainbowPath::new(vs, cs)
    })
}

struct Extension<'a> {
    t: &'a TournamentCollection,
    free: FixedBitSet,
    accept: &'a FixedBitSet,
    forward: bool,
    on: FixedBitSet,
    stack: Vec<VertexId>,
    matcher: IncrementalMatcher,
    best: Option<(Vec<VertexId>, Vec<ColorId>)>,
    nodes: u64,
}

impl Extension<'_> {
    fn dfs(&mut self, cur: VertexId) {
        self.nodes += 1;
        if self.nodes > EXTENSION_NODES {
            return;
        }
        for z in 0..self.t.n() {
            if self.on.contains(z) {
                continue;
            }
            let (a, b) = if self.forward { (cur, z) } else { (z, cur) };
            let mut s = self.t.arc_colors(a, b);
            s.intersect_with(&self.free);
            if s.is_clear() || !self.matcher.push(s) {
                continue;
            }
            self.on.insert(z);
            self.stack.push(z);
            if self.accept.contains(z) && self.best.as_ref().is_none_or(|(v, _)| v.len() < self.stack.len()) {
                self.best = Some((self.stack.clone(), self.matcher.assignment().to_vec()));
            }
            self.dfs(z);
            self.stack.pop();
            self.on.set(z, false);
            self.matcher.pop();
            if self.nodes > EXTENSION_NODES {
                return;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{random_collection, random_strong_tournament};

    #[test]
    fn short_paths_are_rainbow_and_disjoint() {
        let t = random_collection(20, 20, 4, false).unwrap();
        let ps = disjoint_short_paths(&t, 0, 1);
        assert!(!ps.is_empty());
        let mut seen = std::collections::HashSet::new();
        for p in &ps {
            assert!(p.valid(&t));
            assert_eq!((p.first(), p.last(), p.vertices.len()), (0, 1, 4));
            assert!(seen.insert(p.vertices[1]) && seen.insert(p.vertices[2]));
        }
    }

    /// Strongly connected tournaments with `x -> y` forced in every color, so
    /// the direct closing case never applies.
    fn no_direct_closing(n: usize, seed: u64, x: VertexId, y: VertexId) -> TournamentCollection {
        let mut ts = Vec::new();
        let mut s = seed;
        while ts.len() < n {
            let base = random_strong_tournament(n, s).unwrap();
            s += 1000;
            let fixed = Tournament::from_fn(n, |a, b| {
                if (a, b) == (x.min(y), x.max(y)) {
                    x < y
                } else {
                    base.has_arc(a, b)
                }
            });
            if fixed.is_strongly_connected() {
                ts.push(fixed);
            }
        }
        TournamentCollection::new(n, ts).unwrap()
    }

    #[test]
    fn machine_closes_random_instances() {
        let mut closed = 0;
        for seed in 0..20 {
            let t = no_direct_closing(14, seed, 0, 1);
            let mut state = CycleSearchState {
                x: 0,
                y: 1,
                ..CycleSearchState::default()
            };
            if let Ok(c) = longest_path_machine(&t, &mut state) {
                assert!(c.is_hamilton(&t));
                closed += 1;
            }
            assert!(state.k >= 3);
        }
        assert!(closed > 0);
    }

    #[test]
    fn recolor_matches_oracle_colors() {
        let t = random_collection(6, 6, 2, false).unwrap();
        let order: Vec<usize> = (0..6).collect();
        if let Some(c) = recolor_cycle(&t, &order) {
            assert!(c.valid(&t));
        }
    }

    #[test]
    fn constructive_cycle_random() {
        let t = random_collection(200, 200, 7, true).unwrap();
        let mut trace = StageTrace::default();
        let c = constructive_cycle(&t, &PipelineParams::default(), &mut trace)
            .unwrap_or_else(|e| panic!("{e}\n{}", trace.to_jsonl()));
        assert!(c.is_hamilton(&t));
    }
}
