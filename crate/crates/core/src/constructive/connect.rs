use fixedbitset::FixedBitSet;

use crate::collection::TournamentCollection;
use crate::digraph::RainbowPath;
use crate::error::{Error, Result};
use crate::{ColorId, VertexId};

/// A rainbow path from `x` to `y` whose colors strictly increase along the
/// path. Processes colors `0, 1, ..` in order, growing the set of vertices
/// reachable from `x`.
pub fn rainbow_connect(t: &TournamentCollection, x: VertexId, y: VertexId) -> Result<RainbowPath> {
    let order: Vec<ColorId> = (0..t.m()).collect();
    let all: FixedBitSet = {
        let mut s = FixedBitSet::with_capacity(t.n());
        s.insert_range(..);
        s
    };
    rainbow_connect_ordered(t, x, y, &order, &all)
}

/// Layered rainbow reachability inside `allowed`, taking colors in `order`.
/// Layer `k` adds every allowed vertex that is an out-neighbour of the current
/// set in color `order[k]`, recording the arc that reached it first; colors on
/// the returned path appear in `order` order. If every tournament in `order`
/// whose layer is not yet the whole set is strongly connected, each layer grows
/// strictly, so `|allowed| - 1` colors always suffice.
pub fn rainbow_connect_ordered(
    t: &TournamentCollection,
    x: VertexId,
    y: VertexId,
    order: &[ColorId],
    allowed: &FixedBitSet,
) -> Result<RainbowPath> {
    let n = t.n();
    if x == y || x >= n || y >= n {
        return Err(Error::invalid(format!("bad connection query {x} -> {y} for n = {n}")));
    }
    if !allowed.contains(x) || !allowed.contains(y) {
        return Err(Error::invalid("endpoints must be allowed vertices"));
    }
    let mut reached = FixedBitSet::with_capacity(n);
    reached.insert(x);
    let mut members = vec![x];
    let mut pred: Vec<Option<(VertexId, ColorId)>> = vec![None; n];
    let mut first_stall: Option<ColorId> = None;
    let target_size = allowed.count_ones(..);
    for &c in order {
        let tc = t.tournament(c);
        let layer_size = members.len();
        let mut grown = Vec::new();
        for v in allowed.ones() {
            if reached.contains(v) {
                continue;
            }
            if let Some(&u) = members[..layer_size].iter().find(|&&u| tc.has_arc(u, v)) {
                pred[v] = Some((u, c));
                grown.push(v);
            }
        }
        if grown.is_empty() && first_stall.is_none() && members.len() < target_size {
            first_stall = Some(c);
        }
        for v in grown {
            reached.insert(v);
            members.push(v);
        }
        if reached.contains(y) {
            break;
        }
    }
    if !reached.contains(y) {
        return Err(Error::NoProgress {
            color: first_stall.or(order.last().copied()).unwrap_or(0),
            target: y,
        });
    }
    let mut vertices = vec![y];
    let mut colors = Vec::new();
    let mut v = y;
    while let Some((u, c)) = pred[v] {
        vertices.push(u);
        colors.push(c);
        v = u;
    }
    vertices.reverse();
    colors.reverse();
    Ok(RainbowPath::new(vertices, colors))
}

/// Whether every ordered pair is joined by a layered rainbow path. A `true`
/// answer certifies the collection is strongly rainbow-connected; `false` is
/// inconclusive (see the exact oracle for a decision).
pub fn certify_strongly_rainbow_connected(t: &TournamentCollection) -> bool {
    (0..t.n()).all(|x| (0..t.n()).all(|y| x == y || rainbow_connect(t, x, y).is_ok()))
}
