use crate::collection::TournamentCollection;
use crate::digraph::RainbowPath;
use crate::error::{Error, Result};
use crate::{ColorId, VertexId};

/// A rainbow Hamilton path of a collection with at least as many colors as
/// vertices.
pub fn rainbow_ham_path_one_spare(t: &TournamentCollection) -> Result<RainbowPath> {
    rainbow_ham_path_one_spare_counted(t).map(|(p, _)| p)
}

/// Like [`rainbow_ham_path_one_spare`], also returning the number of arc
/// membership tests performed (at most `n(n-1)`).
pub fn rainbow_ham_path_one_spare_counted(t: &TournamentCollection) -> Result<(RainbowPath, u64)> {
    let vertices: Vec<VertexId> = (0..t.n()).collect();
    let palette: Vec<ColorId> = (0..t.m()).collect();
    one_spare_on(t, &vertices, &palette)
}

/// Rainbow Hamilton path of `T_palette[vertices]`, inserting the vertices in
/// the given order. Needs `|palette| >= |vertices|`.
///
/// With path `u_1 .. u_r`, an outside vertex `v` and two unused colors `c1, c2`:
/// prepend `v` if `v -> u_1` in either color; otherwise splice `v` before the
/// first `u_t` with `v -> u_t` in some `c_j`, entering from `u_{t-1}` in the
/// other color (which holds because `t` is minimal); otherwise `u_r -> v` in
/// both colors and `v` is appended.
pub fn one_spare_on(
    t: &TournamentCollection,
    vertices: &[VertexId],
    palette: &[ColorId],
) -> Result<(RainbowPath, u64)> {
    if vertices.is_empty() {
        return Err(Error::invalid("empty vertex set"));
    }
    if palette.len() < vertices.len() {
        return Err(Error::InsufficientColors {
            needed: vertices.len(),
            available: palette.len(),
        });
    }
    let mut inspections = 0u64;
    let mut arc = |c: ColorId, u: VertexId, v: VertexId| {
        inspections += 1;
        t.has_arc(c, u, v)
    };
    let mut path: Vec<VertexId> = vec![vertices[0]];
    let mut colors: Vec<ColorId> = Vec::with_capacity(vertices.len());
    let mut unused: Vec<ColorId> = palette.to_vec();
    for &v in &vertices[1..] {
        let (c1, c2) = (unused[0], unused[1]);
        let pick = |used: ColorId, unused: &mut Vec<ColorId>| {
            let k = unused.iter().position(|&c| c == used).expect("color is unused");
            unused.remove(k);
        };
        if arc(c1, v, path[0]) || arc(c2, v, path[0]) {
            let c = if t.has_arc(c1, v, path[0]) { c1 } else { c2 };
            path.insert(0, v);
            colors.insert(0, c);
            pick(c, &mut unused);
            continue;
        }
        let mut spliced = false;
        for k in 1..path.len() {
            let u = path[k];
            let j = if arc(c1, v, u) {
                Some((c1, c2))
            } else if arc(c2, v, u) {
                Some((c2, c1))
            } else {
                None
            };
            if let Some((cj, other)) = j {
                // u_{k-1} -> v in both colors by minimality of k
                debug_assert!(t.has_arc(other, path[k - 1], v));
                // replace arc u_{k-1} -> u_k (color colors[k-1]) by two arcs
                let old = colors[k - 1];
                colors.insert(k - 1, other);
                colors[k] = cj;
                // the displaced arc's color becomes free again
                unused.push(old);
                path.insert(k, v);
                pick(cj, &mut unused);
                pick(other, &mut unused);
                spliced = true;
                break;
            }
        }
        if !spliced {
            debug_assert!(t.has_arc(c1, *path.last().unwrap(), v));
            path.push(v);
            colors.push(c1);
            pick(c1, &mut unused);
        }
    }
    Ok((RainbowPath::new(path, colors), inspections))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{random_collection, transitive_tournament};

    #[test]
    fn single_vertex() {
        let t = TournamentCollection::repeated(&transitive_tournament(1), 1);
        let p = rainbow_ham_path_one_spare(&t).unwrap();
        assert_eq!(p.vertices, vec![0]);
        assert!(p.colors.is_empty());
    }

    #[test]
    fn identical_transitive() {
        let t = TournamentCollection::repeated(&transitive_tournament(3), 3);
        let p = rainbow_ham_path_one_spare(&t).unwrap();
        assert!(p.is_hamilton(&t));
    }

    #[test]
    fn insufficient_colors() {
        let t = TournamentCollection::repeated(&transitive_tournament(4), 3);
        assert_eq!(
            rainbow_ham_path_one_spare(&t),
            Err(Error::InsufficientColors { needed: 4, available: 3 })
        );
    }

    #[test]
    fn random_collections_and_cost() {
        for seed in 0..200 {
            let n = 3 + (seed as usize % 30);
            let t = random_collection(n, n, seed, false).unwrap();
            let (p, cost) = rainbow_ham_path_one_spare_counted(&t).unwrap();
            assert!(p.is_hamilton(&t), "seed {seed}");
            assert!(cost <= (n * n) as u64, "seed {seed}: {cost}");
        }
    }
}
