//! Path-lengthening moves with unused colors.

use fixedbitset::FixedBitSet;

use crate::collection::{color_set, TournamentCollection};
use crate::digraph::RainbowPath;
use crate::{ColorId, VertexId};

fn outside(t: &TournamentCollection, p: &RainbowPath) -> Vec<VertexId> {
    let mut on = FixedBitSet::with_capacity(t.n());
    on.extend(p.vertices.iter().copied());
    (0..t.n()).filter(|&v| !on.contains(v)).collect()
}

fn first_in(t: &TournamentCollection, set: &FixedBitSet, u: VertexId, v: VertexId) -> Option<ColorId> {
    set.ones().find(|&c| t.has_arc(c, u, v))
}

/// Two distinct colors `i, j` of `unused` with `a -> z` in `T_i` and
/// `z -> b` in `T_j`.
fn splice_colors(
    t: &TournamentCollection,
    unused: &FixedBitSet,
    a: VertexId,
    z: VertexId,
    b: VertexId,
) -> Option<(ColorId, ColorId)> {
    let ins: Vec<ColorId> = unused.ones().filter(|&c| t.has_arc(c, a, z)).collect();
    if ins.is_empty() {
        return None;
    }
    let outs: Vec<ColorId> = unused.ones().filter(|&c| t.has_arc(c, z, b)).collect();
    for &i in &ins {
        if let Some(&j) = outs.iter().find(|&&j| j != i) {
            return Some((i, j));
        }
    }
    None
}

/// Replaces arc `k -> k+1` of `p` by `k -> z -> k+1` colored `(i, j)`; the
/// color of the replaced arc becomes unused.
fn splice(p: &RainbowPath, k: usize, z: VertexId, i: ColorId, j: ColorId) -> RainbowPath {
    let mut vertices = p.vertices.clone();
    let mut colors = p.colors.clone();
    vertices.insert(k + 1, z);
    colors[k] = i;
    colors.insert(k + 1, j);
    RainbowPath::new(vertices, colors)
}

/// One exchange move: some outside vertex is prepended, spliced between two
/// consecutive path vertices with two distinct unused colors, or appended.
/// Returns `None` when no move applies.
pub fn exchange_step(p: &RainbowPath, unused: &[ColorId], t: &TournamentCollection) -> Option<RainbowPath> {
    let free = color_set(t.m(), unused.iter().copied());
    for z in outside(t, p) {
        if let Some(c) = first_in(t, &free, z, p.first()) {
            return Some(RainbowPath::single(z).join(c, p.clone()));
        }
        if let Some(q) = splice_at(t, p, &free, z) {
            return Some(q);
        }
        if let Some(c) = first_in(t, &free, p.last(), z) {
            let mut q = p.clone();
            q.push(c, z);
            return Some(q);
        }
    }
    None
}

fn splice_at(t: &TournamentCollection, p: &RainbowPath, free: &FixedBitSet, z: VertexId) -> Option<RainbowPath> {
    (0..p.len()).find_map(|k| {
        splice_colors(t, free, p.vertices[k], z, p.vertices[k + 1]).map(|(i, j)| splice(p, k, z, i, j))
    })
}

/// Like [`exchange_step`] but only splices, so both endpoints stay fixed.
pub fn splice_step(p: &RainbowPath, unused: &[ColorId], t: &TournamentCollection) -> Option<RainbowPath> {
    let free = color_set(t.m(), unused.iter().copied());
    outside(t, p).into_iter().find_map(|z| splice_at(t, p, &free, z))
}

/// Colors of `t` not on `p`.
pub fn unused_colors(t: &TournamentCollection, p: &RainbowPath) -> Vec<ColorId> {
    let used = color_set(t.m(), p.colors.iter().copied());
    (0..t.m()).filter(|&c| !used.contains(c)).collect()
}

/// Applies [`splice_step`] until none applies.
pub fn splice_saturate(t: &TournamentCollection, mut p: RainbowPath) -> RainbowPath {
    while let Some(q) = splice_step(&p, &unused_colors(t, &p), t) {
        p = q;
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{random_collection, transitive_tournament};

    #[test]
    fn prepend_when_possible() {
        let t = TournamentCollection::repeated(&transitive_tournament(3), 3);
        let p = RainbowPath::new(vec![1, 2], vec![0]);
        let q = exchange_step(&p, &[1, 2], &t).unwrap();
        assert_eq!(q.vertices, vec![0, 1, 2]);
        assert!(q.valid(&t));
    }

    #[test]
    fn splice_frees_old_color() {
        let t = TournamentCollection::repeated(&transitive_tournament(3), 3);
        let p = RainbowPath::new(vec![0, 2], vec![0]);
        let q = splice_step(&p, &[1, 2], &t).unwrap();
        assert_eq!(q.vertices, vec![0, 1, 2]);
        assert_eq!(q.colors, vec![1, 2]);
        assert!(q.valid(&t));
    }

    #[test]
    fn hamilton_path_is_saturated() {
        let t = TournamentCollection::repeated(&transitive_tournament(3), 3);
        let p = RainbowPath::new(vec![0, 1, 2], vec![0, 1]);
        assert!(exchange_step(&p, &[2], &t).is_none());
    }

    #[test]
    fn random_moves_grow_by_one() {
        for seed in 0..30 {
            let t = random_collection(12, 12, seed, false).unwrap();
            let mut p = RainbowPath::single(seed as usize % 12);
            while let Some(q) = exchange_step(&p, &unused_colors(&t, &p), &t) {
                assert_eq!(q.len(), p.len() + 1);
                assert!(q.valid(&t));
                p = q;
            }
        }
    }
}
