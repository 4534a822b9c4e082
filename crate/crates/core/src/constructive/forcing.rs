use fixedbitset::FixedBitSet;

use super::hpartition::h_partition_on;
use super::one_spare::one_spare_on;
use crate::collection::{color_set, TournamentCollection};
use crate::digraph::RainbowPath;
use crate::error::{Error, Result};
use crate::generators::directed_triangle;
use crate::oracle::{search, SearchOptions, Status};
use crate::{ColorId, Ratio, VertexId};

/// Largest vertex count solved by exact search inside the forced-color recursion.
pub const FORCING_BASE_N: usize = 7;

/// A rainbow Hamilton path using an arc of color `i`. Needs `m >= 2n`, `n >= 2`.
pub fn rainbow_ham_path_forcing_color(t: &TournamentCollection, i: ColorId) -> Result<RainbowPath> {
    let vertices: Vec<VertexId> = (0..t.n()).collect();
    let palette: Vec<ColorId> = (0..t.m()).collect();
    forcing_color_on(t, &vertices, &palette, i)
}

/// Whether `T_palette[vertices]` is three vertices where color `i` is a directed
/// triangle and every other color is the opposite triangle.
pub fn is_exceptional(t: &TournamentCollection, vertices: &[VertexId], palette: &[ColorId], i: ColorId) -> bool {
    if vertices.len() != 3 {
        return false;
    }
    let tri = directed_triangle();
    let rev = tri.reversed();
    let ti = t.tournament(i).induced(vertices);
    if ti != tri && ti != rev {
        return false;
    }
    let opposite = ti.reversed();
    palette
        .iter()
        .filter(|&&c| c != i)
        .all(|&c| t.tournament(c).induced(vertices) == opposite)
}

/// Forced-color rainbow Hamilton path of `T_palette[vertices]` using color `i`
/// on some arc. Needs `|palette| >= 2|vertices|` and `i ∈ palette`.
///
/// Up to [`FORCING_BASE_N`] vertices the answer comes from exact search.
/// Above, take the majority tournament `T`, a vertex `v` of largest
/// out-degree (at least 4), recurse on `N⁺(v)`, prepend `v`, build a path on
/// `N⁻(v)` with the remaining colors and join it to `v`.
pub fn forcing_color_on(
    t: &TournamentCollection,
    vertices: &[VertexId],
    palette: &[ColorId],
    i: ColorId,
) -> Result<RainbowPath> {
    let n = vertices.len();
    if n < 2 {
        return Err(Error::invalid("forced-color path needs at least 2 vertices"));
    }
    if !palette.contains(&i) {
        return Err(Error::invalid(format!("forced color {i} is not in the palette")));
    }
    if palette.len() < 2 * n {
        return Err(Error::InsufficientColors {
            needed: 2 * n,
            available: palette.len(),
        });
    }
    if is_exceptional(t, vertices, palette, i) {
        return Err(Error::Exceptional);
    }
    if n <= FORCING_BASE_N {
        return forcing_base(t, vertices, palette, i);
    }
    let palette_set = color_set(t.m(), palette.iter().copied());
    let (local, relabel) = t.induced(Some(vertices), None)?;
    let tmaj = local.majority_subtournament(Some(&palette_set), Ratio::new(1, 2))?;
    let scores = tmaj.scores();
    let v_local = (0..n).max_by_key(|&v| (scores[v], std::cmp::Reverse(v))).unwrap();
    let v = relabel.vertices[v_local];
    let out: Vec<VertexId> = tmaj.out_neighbors(v_local).into_iter().map(|x| relabel.vertices[x]).collect();
    let inn: Vec<VertexId> = tmaj.in_neighbors(v_local).into_iter().map(|x| relabel.vertices[x]).collect();
    debug_assert!(out.len() >= 4);

    let p = forcing_color_on(t, &out, palette, i)?;
    let mut used = color_set(t.m(), p.colors.iter().copied());
    let c = first_free(t, palette, &used, v, p.first())
        .ok_or_else(|| Error::stage("forcing_color", "no free color for the arc into the recursive path"))?;
    used.insert(c);
    let p_prime = RainbowPath::single(v).join(c, p);
    if inn.is_empty() {
        return Ok(p_prime);
    }
    let rest: Vec<ColorId> = palette.iter().copied().filter(|&c| !used.contains(c)).collect();
    let (q, _) = one_spare_on(t, &inn, &rest)?;
    used.extend(q.colors.iter().copied());
    let j = first_free(t, palette, &used, q.last(), v)
        .ok_or_else(|| Error::stage("forcing_color", "no free color for the joining arc"))?;
    Ok(q.join(j, p_prime))
}

fn first_free(t: &TournamentCollection, palette: &[ColorId], used: &FixedBitSet, u: VertexId, v: VertexId) -> Option<ColorId> {
    palette
        .iter()
        .copied()
        .find(|&c| !used.contains(c) && t.has_arc(c, u, v))
}

fn forcing_base(t: &TournamentCollection, vertices: &[VertexId], palette: &[ColorId], i: ColorId) -> Result<RainbowPath> {
    let (local, relabel) = t.induced(Some(vertices), Some(palette))?;
    let local_i = relabel.local_color(i).expect("forced color in palette");
    let required = color_set(local.m(), [local_i]);
    let out = search(&local, &SearchOptions::path().required(Some(required)))?;
    match out.status {
        Status::Found => Ok(out.path().expect("witness").relabel(&relabel.vertices, &relabel.colors)),
        _ => Err(Error::stage("forcing_color", "exact search found no path using the forced color")),
    }
}

/// Checks the hypotheses of [`rainbow_ham_path_forcing_set`]; `Err` names the
/// first one that fails.
pub fn forcing_set_preconditions(
    t: &TournamentCollection,
    vertices: &[VertexId],
    palette: &[ColorId],
    forced: &[ColorId],
    u: VertexId,
    v: VertexId,
) -> Result<()> {
    let n = vertices.len();
    if n < 25 {
        return Err(Error::invalid(format!("forced-set path needs n >= 25, got {n}")));
    }
    if palette.len() < 4 * n {
        return Err(Error::InsufficientColors {
            needed: 4 * n,
            available: palette.len(),
        });
    }
    if 25 * forced.len() > n {
        return Err(Error::invalid(format!("|B| = {} exceeds n/25", forced.len())));
    }
    if u == v || !vertices.contains(&u) || !vertices.contains(&v) {
        return Err(Error::invalid("endpoints must be distinct vertices of the set"));
    }
    if forced.iter().any(|c| !palette.contains(c)) {
        return Err(Error::invalid("forced colors must belong to the palette"));
    }
    // With nothing to force, require the same of the whole palette; a single
    // forced color only needs to cover both endpoint arcs itself.
    let witness: &[ColorId] = if forced.is_empty() { palette } else { forced };
    let need = witness.len().min(2);
    for &w in vertices {
        if w == u || w == v {
            continue;
        }
        let into = witness.iter().filter(|&&c| t.has_arc(c, u, w)).count();
        let out_of = witness.iter().filter(|&&c| t.has_arc(c, w, v)).count();
        if into < need || out_of < need {
            return Err(Error::invalid(format!("vertex {w} violates the endpoint degree hypothesis")));
        }
    }
    Ok(())
}

/// A rainbow Hamilton path from `u` to `v` that uses every color of `forced`.
pub fn rainbow_ham_path_forcing_set(
    t: &TournamentCollection,
    forced: &[ColorId],
    u: VertexId,
    v: VertexId,
) -> Result<RainbowPath> {
    let vertices: Vec<VertexId> = (0..t.n()).collect();
    let palette: Vec<ColorId> = (0..t.m()).collect();
    forcing_set_on(t, &vertices, &palette, forced, u, v)
}

/// [`rainbow_ham_path_forcing_set`] on `T_palette[vertices]`.
///
/// Partition the majority tournament on the inner vertices into blocks of size
/// 4..=24, give each block a private budget of `2|W_i|` non-forced colors,
/// color the two endpoint arcs with forced colors, push one forced color into
/// each middle block via the forced-color path, and color the separator arcs
/// greedily.
pub fn forcing_set_on(
    t: &TournamentCollection,
    vertices: &[VertexId],
    palette: &[ColorId],
    forced: &[ColorId],
    u: VertexId,
    v: VertexId,
) -> Result<RainbowPath> {
    forcing_set_preconditions(t, vertices, palette, forced, u, v)?;
    let inner: Vec<VertexId> = vertices.iter().copied().filter(|&w| w != u && w != v).collect();
    let palette_set = color_set(t.m(), palette.iter().copied());
    let (local, relabel) = t.induced(Some(&inner), None)?;
    let tmaj_local = local.majority_subtournament(Some(&palette_set), Ratio::new(1, 2))?;
    let all_local: Vec<VertexId> = (0..inner.len()).collect();
    let part = h_partition_on(&tmaj_local, &all_local, 24.min(inner.len()), Ratio::new(1, 6))?;
    let to_global = |xs: &[VertexId]| -> Vec<VertexId> { xs.iter().map(|&x| relabel.vertices[x]).collect() };
    let blocks: Vec<Vec<VertexId>> = part.blocks.iter().map(|b| to_global(b)).collect();
    let seps: Vec<VertexId> = to_global(&part.separators);
    let r = blocks.len();

    let forced_set = color_set(t.m(), forced.iter().copied());
    let mut free: std::collections::VecDeque<ColorId> =
        palette.iter().copied().filter(|c| !forced_set.contains(*c)).collect();
    let mut budgets: Vec<Vec<ColorId>> = Vec::with_capacity(r);
    for b in &blocks {
        let k = 2 * b.len();
        if free.len() < k {
            return Err(Error::stage("forcing_set", "color budgets exhausted"));
        }
        budgets.push(free.drain(..k).collect());
    }

    let mut used = FixedBitSet::with_capacity(t.m());
    let mut paths: Vec<Option<RainbowPath>> = vec![None; r];
    // end blocks first: plain paths, then the endpoint arcs take forced colors
    for &k in &[0, r - 1] {
        if paths[k].is_none() {
            let (p, _) = one_spare_on(t, &blocks[k], &budgets[k])?;
            used.extend(p.colors.iter().copied());
            paths[k] = Some(p);
        }
    }
    let mut remaining: Vec<ColorId> = forced.to_vec();
    let head = paths[0].as_ref().unwrap().first();
    let tail = paths[r - 1].as_ref().unwrap().last();
    let entry = pick_forced_or_free(t, &mut remaining, palette, &used, u, head)
        .ok_or_else(|| Error::stage("forcing_set", "no color for the arc out of the start vertex"))?;
    used.insert(entry);
    let exit = pick_forced_or_free(t, &mut remaining, palette, &used, tail, v)
        .ok_or_else(|| Error::stage("forcing_set", "no color for the arc into the end vertex"))?;
    used.insert(exit);

    let middle: Vec<usize> = (1..r.saturating_sub(1)).collect();
    if remaining.len() > middle.len() {
        return Err(Error::stage("forcing_set", "more forced colors than middle blocks"));
    }
    for (slot, &k) in middle.iter().enumerate() {
        let p = match remaining.get(slot) {
            Some(&b) => {
                let mut pal = budgets[k].clone();
                pal.push(b);
                forcing_color_on(t, &blocks[k], &pal, b)?
            }
            None => one_spare_on(t, &blocks[k], &budgets[k])?.0,
        };
        used.extend(p.colors.iter().copied());
        paths[k] = Some(p);
    }

    let mut out = RainbowPath::single(u);
    let mut prev = u;
    let mut join_color = Some(entry);
    for k in 0..r {
        let p = paths[k].take().unwrap();
        let c = match join_color.take() {
            Some(c) => c,
            None => {
                let c = first_free(t, palette, &used, prev, p.first())
                    .ok_or_else(|| Error::stage("forcing_set", "no free color for a separator arc"))?;
                used.insert(c);
                c
            }
        };
        prev = p.last();
        out = out.join(c, p);
        if k + 1 < r {
            let w = seps[k];
            let c = first_free(t, palette, &used, prev, w)
                .ok_or_else(|| Error::stage("forcing_set", "no free color for a separator arc"))?;
            used.insert(c);
            out.push(c, w);
            prev = w;
        }
    }
    out.push(exit, v);
    Ok(out)
}

// Prefers a forced color (consuming it); falls back to any unused palette
// color when the forced list is empty.
fn pick_forced_or_free(
    t: &TournamentCollection,
    remaining: &mut Vec<ColorId>,
    palette: &[ColorId],
    used: &FixedBitSet,
    a: VertexId,
    b: VertexId,
) -> Option<ColorId> {
    if let Some(k) = remaining.iter().position(|&c| !used.contains(c) && t.has_arc(c, a, b)) {
        return Some(remaining.remove(k));
    }
    if remaining.is_empty() {
        return first_free(t, palette, used, a, b);
    }
    None
}
