use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::tournament::Tournament;
use crate::{Ratio, VertexId};

/// Blocks `W_1..W_r` and separators `w_1..w_{r-1}` with `W_i ⇒ {w_i} ⇒ W_{i+1}`
/// and `gamma * ell <= |W_i| <= ell`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HPartition {
    pub blocks: Vec<Vec<VertexId>>,
    pub separators: Vec<VertexId>,
    pub ell: usize,
    pub gamma: Ratio,
}

impl HPartition {
    pub fn r(&self) -> usize {
        self.blocks.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.blocks.iter().map(Vec::len).sum::<usize>() + self.separators.len()
    }

    /// Checks the three defining conditions against `t`, with condition (1)
    /// taken relative to `vertices` (all of `t` when `None`). Returns the
    /// first violated condition.
    pub fn check(&self, t: &Tournament, vertices: Option<&[VertexId]>) -> std::result::Result<(), String> {
        let n = t.n();
        let mut seen = FixedBitSet::with_capacity(n);
        for &v in self.blocks.iter().flatten().chain(&self.separators) {
            if v >= n || seen.put(v) {
                return Err(format!("(1) vertex {v} repeated or out of range"));
            }
        }
        let expected: FixedBitSet = match vertices {
            Some(vs) => vs.iter().copied().collect(),
            None => (0..n).collect(),
        };
        let mut expected = expected;
        expected.grow(n);
        if seen != expected {
            return Err("(1) blocks and separators do not cover the vertex set".into());
        }
        if self.blocks.is_empty() || self.separators.len() + 1 != self.blocks.len() {
            return Err("(1) need r >= 1 blocks and r - 1 separators".into());
        }
        let (num, den) = (*self.gamma.numer() as u128, *self.gamma.denom() as u128);
        for (i, b) in self.blocks.iter().enumerate() {
            let size = b.len();
            if size > self.ell || num * self.ell as u128 > den * size as u128 {
                return Err(format!("(2) block {i} has size {size}, outside [gamma*{}, {}]", self.ell, self.ell));
            }
        }
        for (i, &w) in self.separators.iter().enumerate() {
            if !t.dominates(&self.blocks[i], &[w]) || !t.dominates(&[w], &self.blocks[i + 1]) {
                return Err(format!("(3) separator {i} ({w}) does not sit between its blocks"));
            }
        }
        Ok(())
    }
}

/// Splits `w` around a vertex `v` maximizing `min(in, out)` inside `T[w]`
/// (ties to the smallest id): returns `(in-neighbours, v, out-neighbours)`.
/// Both sides have at least `ceil(|w|/6)` vertices.
pub fn split_block(t: &Tournament, w: &[VertexId]) -> Result<(Vec<VertexId>, VertexId, Vec<VertexId>)> {
    if w.len() < 3 {
        return Err(Error::invalid(format!("cannot split a block of size {}", w.len())));
    }
    let rows = t.out_rows();
    Ok(split_with_rows(&rows, w))
}

fn split_with_rows(rows: &[FixedBitSet], w: &[VertexId]) -> (Vec<VertexId>, VertexId, Vec<VertexId>) {
    let n = rows.len();
    let mut mask = FixedBitSet::with_capacity(n);
    mask.extend(w.iter().copied());
    let size = w.len();
    let mut best = (0usize, usize::MAX);
    for &v in w {
        let out = rows[v].intersection_count(&mask);
        let key = out.min(size - 1 - out);
        if key > best.0 || (key == best.0 && v < best.1) {
            best = (key, v);
        }
    }
    let v = best.1;
    let (mut minus, mut plus) = (Vec::new(), Vec::new());
    for &x in w {
        if x == v {
            continue;
        }
        if rows[v].contains(x) {
            plus.push(x);
        } else {
            minus.push(x);
        }
    }
    debug_assert!(6 * minus.len() >= size && 6 * plus.len() >= size);
    (minus, v, plus)
}

/// An H(ell, gamma)-partition of `t`.
pub fn h_partition(t: &Tournament, ell: usize, gamma: Ratio) -> Result<HPartition> {
    let all: Vec<VertexId> = (0..t.n()).collect();
    h_partition_on(t, &all, ell, gamma)
}

/// An H(ell, gamma)-partition of `T[vertices]`. Starts from one block and
/// repeatedly splits a largest block exceeding `ell`, placing the split vertex
/// as a new separator between the two halves.
pub fn h_partition_on(t: &Tournament, vertices: &[VertexId], ell: usize, gamma: Ratio) -> Result<HPartition> {
    let n = vertices.len();
    if ell < 3 || ell > n {
        return Err(Error::invalid(format!("need 3 <= ell <= n, got ell = {ell}, n = {n}")));
    }
    if gamma <= Ratio::from_integer(0) || gamma > Ratio::new(1, 6) {
        return Err(Error::invalid(format!("gamma {gamma} is outside (0, 1/6]")));
    }
    let rows = t.out_rows();
    let mut blocks: Vec<Vec<VertexId>> = vec![vertices.to_vec()];
    let mut separators: Vec<VertexId> = Vec::new();
    loop {
        let Some((i, _)) = blocks
            .iter()
            .enumerate()
            .filter(|(_, b)| b.len() > ell)
            .max_by_key(|&(i, b)| (b.len(), std::cmp::Reverse(i)))
        else {
            break;
        };
        let block = std::mem::take(&mut blocks[i]);
        let (minus, v, plus) = split_with_rows(&rows, &block);
        blocks[i] = minus;
        blocks.insert(i + 1, plus);
        separators.insert(i, v);
    }
    for b in &mut blocks {
        b.sort_unstable();
    }
    Ok(HPartition {
        blocks,
        separators,
        ell,
        gamma,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{directed_triangle, random_tournament, transitive_tournament};

    fn sixth() -> Ratio {
        Ratio::new(1, 6)
    }

    #[test]
    fn trivial_partition() {
        let t = random_tournament(12, 1);
        let p = h_partition(&t, 12, sixth()).unwrap();
        assert_eq!(p.blocks.len(), 1);
        assert!(p.separators.is_empty());
        let p = h_partition(&directed_triangle(), 3, sixth()).unwrap();
        assert_eq!(p.blocks, vec![vec![0, 1, 2]]);
    }

    #[test]
    fn split_examples() {
        let (minus, v, plus) = split_block(&directed_triangle(), &[0, 1, 2]).unwrap();
        assert_eq!((minus.len(), plus.len()), (1, 1));
        assert_eq!(v, 0);
        let t = transitive_tournament(7);
        let (minus, v, plus) = split_block(&t, &[0, 1, 2, 3, 4, 5, 6]).unwrap();
        assert_eq!((minus, v, plus), (vec![0, 1, 2], 3, vec![4, 5, 6]));
        assert!(split_block(&t, &[0, 1]).is_err());
        let t = random_tournament(100, 4);
        let all: Vec<_> = (0..100).collect();
        let (minus, v, plus) = split_block(&t, &all).unwrap();
        assert!(minus.len() >= 17 && plus.len() >= 17);
        assert!(t.dominates(&minus, &[v]) && t.dominates(&[v], &plus));
    }

    #[test]
    fn random_partition_conditions() {
        let t = random_tournament(500, 9);
        let p = h_partition(&t, 24, sixth()).unwrap();
        p.check(&t, None).unwrap();
        assert!(p.r() * 25 >= 500);
        // a partition for gamma is one for any smaller gamma
        let mut weaker = p.clone();
        weaker.gamma = Ratio::new(1, 10);
        weaker.check(&t, None).unwrap();
    }

    #[test]
    fn rejects_bad_parameters() {
        let t = random_tournament(10, 0);
        assert!(h_partition(&t, 2, sixth()).is_err());
        assert!(h_partition(&t, 11, sixth()).is_err());
        assert!(h_partition(&t, 5, Ratio::new(1, 5)).is_err());
    }

    #[test]
    fn check_detects_broken_domination() {
        let t = transitive_tournament(7);
        let p = HPartition {
            blocks: vec![vec![4, 5, 6], vec![0, 1, 2]],
            separators: vec![3],
            ell: 3,
            gamma: sixth(),
        };
        assert!(p.check(&t, None).unwrap_err().starts_with("(3)"));
    }
}
