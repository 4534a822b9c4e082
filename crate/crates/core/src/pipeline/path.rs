//! Transversal Hamilton path: partition the majority tournament, pre-color the
//! two end blocks, and run the four-step lemma on the middle.

use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;

use super::dhp::{rainbow_dhp_on, DhpInstance};
use super::{PipelineParams, StageTrace};
use crate::collection::{color_set, TournamentCollection};
use crate::constructive::hpartition::{h_partition, HPartition};
use crate::digraph::RainbowPath;
use crate::error::{Error, Result};
use crate::generators::{derive_seed, seeded_rng};
use crate::tournament::Tournament;
use crate::{ColorId, Ratio, VertexId};

/// Block caps `max(3, mu * 2^k * n)` for `k = 0..=mu_escalations`, deduplicated
/// and capped below `n`.
pub(crate) fn block_caps(params: &PipelineParams, n: usize) -> Vec<(Ratio, usize)> {
    let mut out: Vec<(Ratio, usize)> = Vec::new();
    for k in 0..=params.mu_escalations {
        let mu_k = params.mu * Ratio::from_integer(1u64 << k);
        let ell = (mu_k * Ratio::from_integer(n as u64)).to_integer() as usize;
        let ell = ell.max(3);
        if ell >= n {
            break;
        }
        if out.last().is_none_or(|&(_, l)| l != ell) {
            out.push((mu_k, ell));
        }
    }
    out
}

/// Colors `arcs` greedily, picking uniformly among the unused palette colors
/// containing each arc. Returns the colors in arc order.
pub(crate) fn greedy_colors(
    t: &TournamentCollection,
    arcs: &[(VertexId, VertexId)],
    palette: &mut Vec<ColorId>,
    rng: &mut ChaCha8Rng,
) -> Option<Vec<ColorId>> {
    let mut out = Vec::with_capacity(arcs.len());
    for &(u, v) in arcs {
        let options: Vec<usize> = (0..palette.len()).filter(|&k| t.has_arc(palette[k], u, v)).collect();
        let &k = options.choose(rng)?;
        out.push(palette.swap_remove(k));
    }
    Some(out)
}

/// Constructive branch for the transversal Hamilton path (uses the first
/// `n - 1` colors). Tries increasing block caps and a few seeds per cap.
pub fn constructive_path(t: &TournamentCollection, params: &PipelineParams, trace: &mut StageTrace) -> Result<RainbowPath> {
    let n = t.n();
    if n < 8 {
        return Err(Error::stage("precondition", format!("constructive branch needs n >= 8, got {n}")));
    }
    if t.m() + 1 < n {
        return Err(Error::InsufficientColors {
            needed: n - 1,
            available: t.m(),
        });
    }
    let palette: Vec<ColorId> = (0..n - 1).collect();
    let tmaj = t.majority_subtournament(Some(&color_set(t.m(), palette.iter().copied())), Ratio::new(1, 2))?;
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
            match assemble(t, &tmaj, &part, &palette, params, seed, trace) {
                Ok(p) => return Ok(p),
                Err(e) => last_err = e,
            }
        }
    }
    Err(last_err)
}

fn assemble(
    t: &TournamentCollection,
    tmaj: &Tournament,
    part: &HPartition,
    palette: &[ColorId],
    params: &PipelineParams,
    seed: u64,
    trace: &mut StageTrace,
) -> Result<RainbowPath> {
    let nb = part.blocks.len();
    let p0 = tmaj.hamilton_path(&part.blocks[0]);
    let p_last = tmaj.hamilton_path(&part.blocks[nb - 1]);
    let w0 = part.separators[0];
    let wr = part.separators[nb - 2];
    let u = *p0.last().unwrap();
    let v = p_last[0];
    let mut arcs: Vec<(VertexId, VertexId)> = p0.windows(2).map(|w| (w[0], w[1])).collect();
    arcs.push((u, w0));
    arcs.push((wr, v));
    arcs.extend(p_last.windows(2).map(|w| (w[0], w[1])));
    let mut rest = palette.to_vec();
    let mut rng = seeded_rng(seed, 0xc);
    let colors = greedy_colors(t, &arcs, &mut rest, &mut rng)
        .ok_or_else(|| Error::stage("precolor", "greedy coloring of the end blocks ran out of colors"))?;
    rest.sort_unstable();
    trace.ok("precolor", format!("{} end arcs colored", arcs.len()));

    let middle = HPartition {
        blocks: part.blocks[1..nb - 1].to_vec(),
        separators: part.separators[1..nb - 2].to_vec(),
        ell: part.ell,
        gamma: part.gamma,
    };
    let inst = DhpInstance {
        t,
        tmaj,
        partition: &middle,
        w0,
        wr,
        palette: &rest,
    };
    let (mid, _) = rainbow_dhp_on(&inst, params, seed, trace)?;

    let k0 = p0.len() - 1;
    let mut out = RainbowPath::new(p0, colors[..k0].to_vec());
    out = out.join(colors[k0], mid);
    let tail = RainbowPath::new(p_last, colors[k0 + 2..].to_vec());
    out = out.join(colors[k0 + 1], tail);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::random_collection;

    #[test]
    fn caps_grow() {
        let caps = block_caps(&PipelineParams::default(), 400);
        assert_eq!(caps[0].1, 4);
        assert!(caps.windows(2).all(|w| w[0].1 < w[1].1));
        assert!(caps.iter().all(|&(_, l)| l < 400));
    }

    #[test]
    fn random_instance_n200() {
        let t = random_collection(200, 199, 3, false).unwrap();
        let mut trace = StageTrace::default();
        let res = constructive_path(&t, &PipelineParams::default(), &mut trace);
        let p = res.unwrap_or_else(|e| panic!("{e}\n{}", trace.to_jsonl()));
        assert!(p.is_hamilton(&t));
    }
}
