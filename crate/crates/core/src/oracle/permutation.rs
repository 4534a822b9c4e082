//! Brute force over vertex orders. For each order the arcs are fixed and a
//! single Hopcroft-Karp run decides colorability. Only for small `n`.

use std::time::Instant;

use super::{OracleOutcome, Witness};
use crate::collection::TournamentCollection;
use crate::digraph::{RainbowCycle, RainbowPath};
use crate::error::{Error, Result};
use crate::matching::hopcroft_karp;
use crate::{ColorId, VertexId};

use super::backtrack::Shape;

/// Largest `n` accepted.
pub const MAX_PERMUTATION_N: usize = 10;

fn colors_of(t: &TournamentCollection, u: VertexId, v: VertexId) -> Vec<ColorId> {
    (0..t.m()).filter(|&c| t.tournament(c).has_arc(u, v)).collect()
}

/// In-place lexicographic successor; `false` when `xs` was the last permutation.
fn next_permutation(xs: &mut [usize]) -> bool {
    if xs.len() < 2 {
        return false;
    }
    let mut i = xs.len() - 1;
    while i > 0 && xs[i - 1] >= xs[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = xs.len() - 1;
    while xs[j] <= xs[i - 1] {
        j -= 1;
    }
    xs.swap(i - 1, j);
    xs[i..].reverse();
    true
}

/// Colors for `arcs`, one each, all distinct, with `required` (if any) used.
fn color_arcs(t: &TournamentCollection, arcs: &[(VertexId, VertexId)], required: Option<ColorId>) -> Option<Vec<ColorId>> {
    let adj: Vec<Vec<ColorId>> = arcs.iter().map(|&(u, v)| colors_of(t, u, v)).collect();
    match required {
        None => {
            let m = hopcroft_karp(&adj, t.m());
            m.is_left_perfect().then(|| m.left.iter().map(|c| c.unwrap()).collect())
        }
        Some(r) => {
            // pin r to each arc that allows it, match the rest without r
            for k in 0..arcs.len() {
                if !adj[k].contains(&r) {
                    continue;
                }
                let rest: Vec<Vec<ColorId>> = adj
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != k)
                    .map(|(_, cs)| cs.iter().copied().filter(|&c| c != r).collect())
                    .collect();
                let m = hopcroft_karp(&rest, t.m());
                if m.is_left_perfect() {
                    let mut colors: Vec<ColorId> = m.left.iter().map(|c| c.unwrap()).collect();
                    colors.insert(k, r);
                    return Some(colors);
                }
            }
            None
        }
    }
}

/// Decides existence of a transversal Hamilton path/cycle by enumerating all
/// vertex orders (cycles start at vertex 0). Optional `endpoints` for paths and
/// an optional color that must be used.
pub fn permutation_oracle(
    t: &TournamentCollection,
    shape: Shape,
    endpoints: Option<(VertexId, VertexId)>,
    required: Option<ColorId>,
) -> Result<OracleOutcome> {
    let n = t.n();
    if n == 0 || n > MAX_PERMUTATION_N {
        return Err(Error::invalid(format!(
            "permutation oracle supports 1 <= n <= {MAX_PERMUTATION_N}, got {n}"
        )));
    }
    let start = Instant::now();
    if shape == Shape::Cycle && n == 1 {
        return Ok(OracleOutcome::not_exists(0, 0));
    }
    let mut order: Vec<VertexId> = (0..n).collect();
    let mut visited = 0u64;
    loop {
        let admissible = match shape {
            Shape::Cycle => true,
            Shape::Path => endpoints.is_none_or(|(u, v)| order[0] == u && order[n - 1] == v),
        };
        if admissible {
            visited += 1;
            let mut arcs: Vec<(VertexId, VertexId)> = order.windows(2).map(|w| (w[0], w[1])).collect();
            if shape == Shape::Cycle {
                arcs.push((order[n - 1], order[0]));
            }
            if let Some(colors) = color_arcs(t, &arcs, required) {
                let millis = start.elapsed().as_millis() as u64;
                let witness = match shape {
                    Shape::Path => Witness::Path(RainbowPath::new(order, colors)),
                    Shape::Cycle => Witness::Cycle(RainbowCycle::new(order, colors)),
                };
                return Ok(OracleOutcome::found(witness, visited, millis));
            }
        }
        let more = match shape {
            Shape::Cycle => next_permutation(&mut order[1..]),
            Shape::Path => next_permutation(&mut order),
        };
        if !more {
            break;
        }
    }
    Ok(OracleOutcome::not_exists(visited, start.elapsed().as_millis() as u64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{fig1_counterexamples, prop14_collection};
    use crate::oracle::Status;

    #[test]
    fn permutations_are_enumerated_once() {
        let mut xs = vec![0, 1, 2, 3];
        let mut count = 1;
        while next_permutation(&mut xs) {
            count += 1;
        }
        assert_eq!(count, 24);
        assert_eq!(xs, vec![3, 2, 1, 0]);
    }

    #[test]
    fn fig1_statuses() {
        let (p, c) = fig1_counterexamples();
        assert_eq!(permutation_oracle(&p, Shape::Path, None, None).unwrap().status, Status::NotExists);
        assert_eq!(permutation_oracle(&c, Shape::Cycle, None, None).unwrap().status, Status::NotExists);
        let out = permutation_oracle(&c, Shape::Path, None, None).unwrap();
        assert!(out.path().unwrap().is_hamilton(&c));
    }

    #[test]
    fn prop14_cycle_free() {
        for n in 3..=7 {
            let t = prop14_collection(n).unwrap();
            assert_eq!(permutation_oracle(&t, Shape::Cycle, None, None).unwrap().status, Status::NotExists);
        }
    }

    #[test]
    fn required_color_witness() {
        let t = prop14_collection(5).unwrap();
        let out = permutation_oracle(&t, Shape::Path, None, Some(4)).unwrap();
        let p = out.path().unwrap();
        assert!(p.is_hamilton(&t) && p.colors.contains(&4));
    }
}
