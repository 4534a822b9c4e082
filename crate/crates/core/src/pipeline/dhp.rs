//! The four-step rainbow path lemma: reserve separator colors, set up an
//! absorber on a prefix of blocks, spend the bulk colors on the remaining
//! blocks, then force the leftovers into one block and let the absorber take
//! what remains.

use std::cmp::Reverse;
use std::collections::VecDeque;

use fixedbitset::FixedBitSet;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{ones, ColorLedger, PipelineParams, StageTrace};
use crate::collection::{ceil_mul, color_set, TournamentCollection};
use crate::constructive::absorber::{absorb, build_absorber, AbsorberRequest, AbsorberSchedule};
use crate::constructive::forcing::{forcing_set_on, forcing_set_preconditions};
use crate::constructive::hpartition::HPartition;
use crate::constructive::one_spare::one_spare_on;
use crate::digraph::RainbowPath;
use crate::error::{Error, Result};
use crate::generators::{derive_seed, seeded_rng};
use crate::matching::IncrementalMatcher;
use crate::oracle::backtrack::{search, SearchOptions};
use crate::oracle::Status;
use crate::tournament::Tournament;
use crate::{ColorId, VertexId};

/// Shuffled Hamilton paths tried when forcing colors by matching.
const EMBED_TRIES: usize = 64;

/// Input of the lemma. Vertices are global ids; the lemma's vertex set is the
/// partition plus the two endpoints and its colors are `palette`.
#[derive(Debug, Clone, Copy)]
pub struct DhpInstance<'a> {
    pub t: &'a TournamentCollection,
    /// A majority tournament containing every arc the construction uses.
    pub tmaj: &'a Tournament,
    /// `W_1..W_r` and `w_1..w_{r-1}`.
    pub partition: &'a HPartition,
    pub w0: VertexId,
    pub wr: VertexId,
    pub palette: &'a [ColorId],
}

/// Rainbow Hamilton path of `t` from `w0` to `wr` using every color once.
/// The partition must cover every vertex except the endpoints. Small
/// instances (at most `oracle_fallback_n` vertices) are solved exactly.
pub fn rainbow_dhp(
    t: &TournamentCollection,
    tmaj: &Tournament,
    partition: &HPartition,
    w0: VertexId,
    wr: VertexId,
    params: &PipelineParams,
) -> Result<RainbowPath> {
    if partition.vertex_count() + 2 != t.n() {
        return Err(Error::invalid("partition plus endpoints must cover the vertex set"));
    }
    if t.n() <= params.oracle_fallback_n {
        let out = search(t, &SearchOptions::path().endpoints(Some((w0, wr))).budget(params.budget))?;
        return match out.status {
            Status::Found => Ok(out.path().expect("witness").clone()),
            s => Err(Error::stage("oracle", format!("{s:?}"))),
        };
    }
    let palette: Vec<ColorId> = (0..t.m()).collect();
    let inst = DhpInstance {
        t,
        tmaj,
        partition,
        w0,
        wr,
        palette: &palette,
    };
    rainbow_dhp_on(&inst, params, params.seed, &mut StageTrace::default()).map(|(p, _)| p)
}

/// The constructive lemma on a sub-instance. On success the path covers the
/// lemma's vertex set and the returned ledger has spent every palette color
/// exactly once.
pub fn rainbow_dhp_on(
    inst: &DhpInstance<'_>,
    params: &PipelineParams,
    seed: u64,
    trace: &mut StageTrace,
) -> Result<(RainbowPath, ColorLedger)> {
    let res = run(inst, params, seed, trace);
    if let Err(e) = &res {
        trace.fail("rainbow_dhp", e.to_string());
    }
    res
}

struct Layout {
    r: usize,
    /// `sep[0] = w0`, `sep[i] = w_i`, `sep[r] = wr`; block `i` (0-based) sits
    /// between `sep[i]` and `sep[i + 1]`.
    sep: Vec<VertexId>,
    nv: usize,
}

fn check_pre(inst: &DhpInstance<'_>, params: &PipelineParams) -> Result<Layout> {
    let DhpInstance {
        t,
        tmaj,
        partition,
        w0,
        wr,
        palette,
    } = *inst;
    let r = partition.r();
    let pre = |msg: String| Error::stage("precondition", msg);
    if r < 2 {
        return Err(pre(format!("need at least 2 blocks, got {r}")));
    }
    let nv = partition.vertex_count() + 2;
    if palette.len() + 1 != nv {
        return Err(pre(format!("{} colors for {nv} vertices", palette.len())));
    }
    let pal = color_set(t.m(), palette.iter().copied());
    if pal.count_ones(..) != palette.len() || palette.iter().any(|&c| c >= t.m()) {
        return Err(pre("palette repeats a color or is out of range".into()));
    }
    let inner: Vec<VertexId> = partition.blocks.iter().flatten().chain(&partition.separators).copied().collect();
    if inner.contains(&w0) || inner.contains(&wr) || w0 == wr {
        return Err(pre("endpoints must lie outside the partition".into()));
    }
    partition.check(tmaj, Some(&inner)).map_err(pre)?;
    if !tmaj.dominates(&[w0], &partition.blocks[0]) || !tmaj.dominates(&partition.blocks[r - 1], &[wr]) {
        return Err(pre("endpoints do not dominate / are not dominated by the end blocks".into()));
    }
    let need = ceil_mul(params.alpha, palette.len());
    let mut verts = inner;
    verts.push(w0);
    verts.push(wr);
    for (k, &a) in verts.iter().enumerate() {
        for &b in &verts[k + 1..] {
            let (u, v) = if tmaj.has_arc(a, b) { (a, b) } else { (b, a) };
            if t.arc_color_count(u, v, Some(&pal)) < need {
                return Err(pre(format!("arc {u}->{v} is in fewer than alpha * |palette| colors")));
            }
        }
    }
    let mut sep = vec![w0];
    sep.extend_from_slice(&partition.separators);
    sep.push(wr);
    Ok(Layout { r, sep, nv })
}

fn run(inst: &DhpInstance<'_>, params: &PipelineParams, seed: u64, trace: &mut StageTrace) -> Result<(RainbowPath, ColorLedger)> {
    let Layout { r, sep, nv } = check_pre(inst, params)?;
    let DhpInstance { t, tmaj, partition, palette, .. } = *inst;
    let m = t.m();
    let blocks = &partition.blocks;
    let pal = color_set(m, palette.iter().copied());
    let mut ledger = ColorLedger::new(m, palette);

    // Step 2 index choice: t is the smallest prefix reaching beta * n path arcs;
    // tau is the largest later block.
    let lo = ceil_mul(params.beta, nv);
    let width = partition.ell.max(ceil_mul(params.mu, nv));
    let mut prefix = 0;
    let mut t_count = None;
    for (i, b) in blocks.iter().enumerate() {
        prefix += b.len() - 1;
        if prefix >= lo {
            t_count = Some(i + 1);
            break;
        }
    }
    let t_count = t_count.ok_or_else(|| Error::stage("step2", format!("blocks hold fewer than {lo} path arcs")))?;
    if prefix > lo + width || t_count >= r {
        return Err(Error::stage(
            "step2",
            format!("no prefix in the window [{lo}, {}] leaving a later block", lo + width),
        ));
    }
    let tau = (t_count..r)
        .max_by_key(|&i| (blocks[i].len(), Reverse(i)))
        .expect("t < r");

    // Step 1: reserve D for the separator arcs.
    let mut avail: Vec<FixedBitSet> = Vec::with_capacity(2 * (nv - r - 1));
    for (i, b) in blocks.iter().enumerate() {
        for &v in b {
            let mut s = t.arc_colors(sep[i], v);
            s.intersect_with(&pal);
            avail.push(s);
            let mut s = t.arc_colors(v, sep[i + 1]);
            s.intersect_with(&pal);
            avail.push(s);
        }
    }
    let a_min = avail.iter().map(|s| s.count_ones(..)).min().unwrap_or(0);
    let need = 2 * r + 1;
    if a_min < need {
        return Err(Error::stage("step1", format!("a separator arc has only {a_min} colors, need {need}")));
    }
    let rate = ((need as f64 + 3.0 * (need as f64).sqrt()) / a_min as f64).min(1.0);
    let mu = *params.mu.numer() as f64 / *params.mu.denom() as f64;
    let reference_rate = 20.0 * r as f64 * (nv as f64).ln() / (mu * mu * nv as f64);
    let cap = 2 * (r - 1) + blocks[tau].len();
    let mut rng = seeded_rng(seed, 0xd);
    let mut reserve = None;
    let mut tries = 0;
    for _ in 0..params.reserve_retries.max(1) {
        tries += 1;
        let mut d = FixedBitSet::with_capacity(m);
        for &c in palette {
            if rng.gen_bool(rate) {
                d.insert(c);
            }
        }
        // (P1') the leftovers of D must fit into block tau; (P2) as stated
        if d.count_ones(..) <= cap && avail.iter().all(|s| s.intersection_count(&d) > 2 * r) {
            reserve = Some(d);
            break;
        }
    }
    let d = reserve.ok_or_else(|| {
        Error::stage(
            "step1",
            format!("no reserve set after {tries} samples (rate {rate:.3}, |D| cap {cap}, r {r})"),
        )
    })?;
    ledger.d = d.clone();
    trace.push(
        "step1",
        true,
        format!(
            "r={r} |D|={} rate={rate:.4} reference_rate={reference_rate:.1} samples={tries} min|D∩A|={}",
            d.count_ones(..),
            avail.iter().map(|s| s.intersection_count(&d)).min().unwrap_or(0)
        ),
        Some(&ledger),
    );

    // Step 2: absorber for the uncolored paths of the first t blocks.
    let q1_orders: Vec<Vec<VertexId>> = blocks[..t_count].iter().map(|b| tmaj.hamilton_path(b)).collect();
    let target_arcs: Vec<(VertexId, VertexId)> = q1_orders
        .iter()
        .flat_map(|o| o.windows(2).map(|w| (w[0], w[1])))
        .collect();
    let e_q1 = target_arcs.len();
    let rest: Vec<ColorId> = palette.iter().copied().filter(|&c| !d.contains(c)).collect();
    let ell_abs = ceil_mul(params.gamma, rest.len()).min(e_q1);
    let a_size = e_q1 - ell_abs;
    let l2: Vec<usize> = (t_count..r).filter(|&i| i != tau).collect();
    let m2 = l2.iter().map(|&i| blocks[i].len() - 1).sum::<usize>() + usize::from(!l2.is_empty());
    let room = rest
        .len()
        .checked_sub(a_size)
        .ok_or_else(|| Error::stage("step2", "fewer colors than absorber arcs"))?;
    let c_lo = room.saturating_sub(m2).max(ell_abs);
    if c_lo > room {
        return Err(Error::stage("step2", "no room for the absorber's reservoir"));
    }
    let c_size = ceil_mul(params.beta * 10, rest.len()).clamp(c_lo, room);
    let req = AbsorberRequest {
        target_arcs: &target_arcs,
        avail_colors: &rest,
        ell: ell_abs,
        c_size,
        alpha: Some(params.alpha / 2),
        retries: params.absorber_retries,
        seed: derive_seed(seed, 2),
        schedule: AbsorberSchedule::default(),
    };
    let absorber = build_absorber(t, &req).map_err(|e| Error::stage("step2", e.to_string()))?;
    ledger.a = color_set(m, absorber.a.iter().copied());
    ledger.c = color_set(m, absorber.c.iter().copied());
    ledger.b = color_set(m, rest.iter().copied());
    ledger.b.difference_with(&ledger.a);
    ledger.b.difference_with(&ledger.c);
    if !ledger.is_partition() {
        return Err(Error::stage("ledger", "D, A, C, B do not partition the palette"));
    }
    trace.push(
        "step2",
        true,
        format!(
            "t={t_count} tau={} e(Q1)={e_q1} top_up={ell_abs} absorber_attempts={} probes={} exhaustive={}",
            tau + 1,
            absorber.attempts,
            absorber.probes,
            absorber.exhaustive
        ),
        Some(&ledger),
    );

    // Step 3: bulk colors on the L2 blocks, each block inheriting the color
    // its predecessor left over; then D on the separator arcs.
    let b_list = ones(&ledger.b);
    let c1_size = m2
        .checked_sub(b_list.len())
        .ok_or_else(|| Error::stage("step3", "B exceeds the L2 budget"))?;
    let coverage = |c: ColorId| target_arcs.iter().filter(|&&(u, v)| t.has_arc(c, u, v)).count();
    let mut c_sorted = absorber.c.clone();
    c_sorted.sort_by_key(|&c| (coverage(c), c));
    let c1: Vec<ColorId> = c_sorted[..c1_size].to_vec();
    ledger.c_star = ledger.c.clone();
    for &c in &c1 {
        ledger.c_star.set(c, false);
    }
    let mut pool: VecDeque<ColorId> = b_list.iter().chain(&c1).copied().collect();
    let mut segs: Vec<Option<RainbowPath>> = vec![None; r];
    let mut carry: Vec<ColorId> = Vec::new();
    for &i in &l2 {
        while carry.len() < blocks[i].len() {
            carry.push(pool.pop_front().ok_or_else(|| Error::stage("step3", "block budgets exhausted"))?);
        }
        let (p, _) = one_spare_on(t, &blocks[i], &carry)?;
        for &c in &p.colors {
            ledger.spend(c)?;
        }
        carry.retain(|c| !p.colors.contains(c));
        segs[i] = Some(p);
    }
    debug_assert!(pool.is_empty() && carry.len() <= 1);
    for c in carry {
        if ledger.b.contains(c) {
            ledger.b_star.insert(c);
        } else {
            ledger.c_star.insert(c);
        }
    }
    let ends = |i: usize| -> (VertexId, VertexId) {
        match &segs[i] {
            Some(p) => (p.first(), p.last()),
            None => {
                let o = &q1_orders[i];
                (o[0], *o.last().unwrap())
            }
        }
    };
    let d_order = ones(&d);
    let mut joins: Vec<(ColorId, ColorId)> = vec![(0, 0); r];
    let pick = |ledger: &mut ColorLedger, u: VertexId, v: VertexId| -> Result<ColorId> {
        let c = d_order
            .iter()
            .copied()
            .find(|&c| !ledger.used.contains(c) && t.has_arc(c, u, v))
            .ok_or_else(|| Error::stage("step3", format!("no reserved color left for {u}->{v}")))?;
        ledger.spend(c)?;
        Ok(c)
    };
    for i in (0..r).filter(|&i| i != tau) {
        let (u, v) = ends(i);
        let entry = pick(&mut ledger, sep[i], u)?;
        let exit = pick(&mut ledger, v, sep[i + 1])?;
        joins[i] = (entry, exit);
    }
    ledger.d_star = d.clone();
    ledger.d_star.difference_with(&ledger.used);
    trace.push("step3", true, format!("L2 blocks={}", l2.len()), Some(&ledger));

    // Step 4: force B* and D* into block tau, then absorb.
    let mut forced = ledger.b_star.clone();
    forced.union_with(&ledger.d_star);
    let mut s_star = forced.clone();
    s_star.union_with(&ledger.c_star);
    let s_list = ones(&s_star);
    let f_list = ones(&forced);
    let (from, to) = (sep[tau], sep[tau + 1]);
    let mut tau_vertices = blocks[tau].clone();
    tau_vertices.push(from);
    tau_vertices.push(to);
    let (seg, how) = if forcing_set_preconditions(t, &tau_vertices, &s_list, &f_list, from, to).is_ok() {
        (forcing_set_on(t, &tau_vertices, &s_list, &f_list, from, to)?, "forced-set lemma")
    } else {
        let mut rng = seeded_rng(seed, 0xe);
        (
            forced_embedding(t, tmaj, &blocks[tau], from, to, &s_star, &forced, &mut rng)?,
            "matching",
        )
    };
    for &c in &seg.colors {
        ledger.spend(c)?;
    }
    if !ledger.b_star.is_clear() || !ledger.d_star.is_clear() {
        return Err(Error::stage("step4", "forced colors left unused"));
    }
    let c_prime = ones(&ledger.c_star);
    trace.push(
        "step4",
        true,
        format!("forced={} via {how}, top-up |C'|={}", f_list.len(), c_prime.len()),
        Some(&ledger),
    );
    let coloring = absorb(&absorber, &c_prime).map_err(|e| Error::stage("step4", e.to_string()))?;
    for arc in &coloring.arcs {
        ledger.spend(arc.color)?;
    }
    ledger.c_star.clear();
    if !ledger.all_spent() || !ledger.spent_disjoint_from_unspent() {
        return Err(Error::stage("ledger", "palette not spent exactly once"));
    }

    // Assemble w0 -> W_1 -> w_1 -> ... -> W_r -> wr.
    let mut q1_colors = coloring.arcs.iter().map(|a| a.color);
    let mut out = RainbowPath::single(sep[0]);
    for i in 0..r {
        if i == tau {
            let rest = RainbowPath::new(seg.vertices[1..].to_vec(), seg.colors[1..].to_vec());
            out = out.join(seg.colors[0], rest);
            continue;
        }
        let block_path = match segs[i].take() {
            Some(p) => p,
            None => {
                let o = q1_orders[i].clone();
                let cs: Vec<ColorId> = q1_colors.by_ref().take(o.len() - 1).collect();
                RainbowPath::new(o, cs)
            }
        };
        let (entry, exit) = joins[i];
        out = out.join(entry, block_path);
        out.push(exit, sep[i + 1]);
    }
    if out.vertices.len() != nv || !out.valid(t) {
        let why: Vec<String> = out.to_digraph().violations(t).iter().take(3).map(|v| format!("{v:?}")).collect();
        return Err(Error::stage(
            "assemble",
            format!("assembled path on {} of {nv} vertices failed validation: {}", out.vertices.len(), why.join("; ")),
        ));
    }
    trace.push("assemble", true, format!("path on {nv} vertices"), Some(&ledger));
    Ok((out, ledger))
}

/// A path `from -> block -> to` along a Hamilton path of the majority
/// tournament on `block`, colored by a matching from `palette` that uses every
/// color of `forced`. Tries shuffled insertion orders.
#[allow(clippy::too_many_arguments)]
fn forced_embedding(
    t: &TournamentCollection,
    tmaj: &Tournament,
    block: &[VertexId],
    from: VertexId,
    to: VertexId,
    palette: &FixedBitSet,
    forced: &FixedBitSet,
    rng: &mut ChaCha8Rng,
) -> Result<RainbowPath> {
    let mut order_src = block.to_vec();
    for attempt in 0..EMBED_TRIES {
        if attempt > 0 {
            order_src.shuffle(rng);
        }
        let mut verts = vec![from];
        verts.extend(tmaj.hamilton_path(&order_src));
        verts.push(to);
        let mut matcher = IncrementalMatcher::new(t.m());
        let saturated = verts.windows(2).all(|w| {
            let mut s = t.arc_colors(w[0], w[1]);
            s.intersect_with(palette);
            matcher.push(s)
        });
        if saturated && matcher.saturate_required(forced) {
            return Ok(RainbowPath::new(verts, matcher.assignment().to_vec()));
        }
    }
    Err(Error::stage(
        "step4",
        format!("could not embed {} forced colors", forced.count_ones(..)),
    ))
}
