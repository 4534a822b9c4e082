use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::VertexId;

/// Index of the unordered pair `{i, j}` (with `i < j`) in lexicographic order
/// `(0,1), (0,2), .., (0,n-1), (1,2), ..`.
#[inline]
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

/// Number of unordered pairs on `n` vertices.
#[inline]
pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// A tournament on vertices `0..n`, stored as one orientation bit per unordered
/// pair. For `i < j`, a set bit means the arc `i -> j`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Tournament {
    n: usize,
    bits: Vec<u64>,
}

impl std::fmt::Debug for Tournament {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Tournament")
            .field("n", &self.n)
            .field("orientation", &self.orientation_string())
            .finish()
    }
}

impl Tournament {
    /// Builds a tournament where `forward(i, j)` (called once per pair with `i < j`)
    /// decides whether the arc is `i -> j`.
    pub fn from_fn(n: usize, mut forward: impl FnMut(usize, usize) -> bool) -> Self {
        let mut bits = vec![0u64; pair_count(n).div_ceil(64)];
        let mut p = 0;
        for i in 0..n {
            for j in i + 1..n {
                if forward(i, j) {
                    bits[p >> 6] |= 1 << (p & 63);
                }
                p += 1;
            }
        }
        Tournament { n, bits }
    }

    /// Builds a tournament from raw orientation words (pair `p` is bit `p % 64` of word `p / 64`).
    /// Bits past the last pair are cleared.
    pub fn from_words(n: usize, mut bits: Vec<u64>) -> Result<Self> {
        let pairs = pair_count(n);
        let words = pairs.div_ceil(64);
        if bits.len() != words {
            return Err(Error::invalid(format!(
                "expected {words} orientation words for n={n}, got {}",
                bits.len()
            )));
        }
        if !pairs.is_multiple_of(64) {
            let last = words - 1;
            bits[last] &= (1u64 << (pairs % 64)) - 1;
        }
        Ok(Tournament { n, bits })
    }

    /// Parses the canonical `0`/`1` orientation string of length `n(n-1)/2`.
    pub fn from_orientation_string(n: usize, s: &str) -> Result<Self> {
        let bytes = s.as_bytes();
        if bytes.len() != pair_count(n) {
            return Err(Error::Format(format!(
                "orientation string has length {}, expected {} for n={n}",
                bytes.len(),
                pair_count(n)
            )));
        }
        let mut bits = vec![0u64; bytes.len().div_ceil(64)];
        for (p, &b) in bytes.iter().enumerate() {
            match b {
                b'1' => bits[p >> 6] |= 1 << (p & 63),
                b'0' => {}
                other => {
                    return Err(Error::Format(format!(
                        "orientation string contains {:?} at position {p}",
                        other as char
                    )))
                }
            }
        }
        Ok(Tournament { n, bits })
    }

    pub fn orientation_string(&self) -> String {
        (0..pair_count(self.n))
            .map(|p| if self.pair_bit(p) { '1' } else { '0' })
            .collect()
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.bits
    }

    #[inline]
    fn pair_bit(&self, p: usize) -> bool {
        self.bits[p >> 6] >> (p & 63) & 1 == 1
    }

    /// Whether the arc `u -> v` is present. `u == v` is never an arc.
    #[inline]
    pub fn has_arc(&self, u: VertexId, v: VertexId) -> bool {
        debug_assert!(u < self.n && v < self.n);
        match u.cmp(&v) {
            std::cmp::Ordering::Less => self.pair_bit(pair_index(self.n, u, v)),
            std::cmp::Ordering::Greater => !self.pair_bit(pair_index(self.n, v, u)),
            std::cmp::Ordering::Equal => false,
        }
    }

    pub fn out_degree(&self, v: VertexId) -> usize {
        (0..self.n).filter(|&w| self.has_arc(v, w)).count()
    }

    pub fn in_degree(&self, v: VertexId) -> usize {
        self.n - 1 - self.out_degree(v)
    }

    pub fn out_neighbors(&self, v: VertexId) -> Vec<VertexId> {
        (0..self.n).filter(|&w| self.has_arc(v, w)).collect()
    }

    pub fn in_neighbors(&self, v: VertexId) -> Vec<VertexId> {
        (0..self.n).filter(|&w| self.has_arc(w, v)).collect()
    }

    /// Out-degree of every vertex.
    pub fn scores(&self) -> Vec<usize> {
        let mut out = vec![0usize; self.n];
        let mut p = 0;
        for i in 0..self.n {
            for j in i + 1..self.n {
                if self.pair_bit(p) {
                    out[i] += 1;
                } else {
                    out[j] += 1;
                }
                p += 1;
            }
        }
        out
    }

    /// Dense out-neighbourhood rows, one bitset per vertex.
    pub fn out_rows(&self) -> Vec<FixedBitSet> {
        let mut rows = vec![FixedBitSet::with_capacity(self.n); self.n];
        let mut p = 0;
        for i in 0..self.n {
            for j in i + 1..self.n {
                if self.pair_bit(p) {
                    rows[i].insert(j);
                } else {
                    rows[j].insert(i);
                }
                p += 1;
            }
        }
        rows
    }

    /// Sub-tournament induced by `vertices`; local vertex `k` is `vertices[k]`.
    pub fn induced(&self, vertices: &[VertexId]) -> Tournament {
        Tournament::from_fn(vertices.len(), |a, b| self.has_arc(vertices[a], vertices[b]))
    }

    /// The same tournament with every arc reversed.
    pub fn reversed(&self) -> Tournament {
        Tournament::from_fn(self.n, |i, j| !self.has_arc(i, j))
    }

    /// Whether every vertex reaches every other vertex.
    pub fn is_strongly_connected(&self) -> bool {
        if self.n <= 1 {
            return true;
        }
        self.reach_all(true) && self.reach_all(false)
    }

    fn reach_all(&self, forward: bool) -> bool {
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for w in 0..self.n {
                if !seen[w] && (if forward { self.has_arc(u, w) } else { self.has_arc(w, u) }) {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == self.n
    }

    /// Whether every vertex of `from` dominates every vertex of `to`.
    pub fn dominates(&self, from: &[VertexId], to: &[VertexId]) -> bool {
        from.iter()
            .all(|&a| to.iter().all(|&b| self.has_arc(a, b)))
    }

    /// A Hamilton path of the sub-tournament on `vertices`, built by insertion in
    /// the given order. Every tournament has one.
    pub fn hamilton_path(&self, vertices: &[VertexId]) -> Vec<VertexId> {
        let mut path: Vec<VertexId> = Vec::with_capacity(vertices.len());
        for &v in vertices {
            if path.is_empty() || self.has_arc(v, path[0]) {
                path.insert(0, v);
                continue;
            }
            let last = *path.last().unwrap();
            if self.has_arc(last, v) {
                path.push(v);
                continue;
            }
            // path[lo] -> v and v -> path[hi]; bisect for an adjacent such pair.
            let (mut lo, mut hi) = (0, path.len() - 1);
            while hi - lo > 1 {
                let mid = (lo + hi) / 2;
                if self.has_arc(path[mid], v) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            path.insert(hi, v);
        }
        path
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> Tournament {
        // 0 -> 1 -> 2 -> 0
        Tournament::from_fn(3, |i, j| !(i == 0 && j == 2))
    }

    #[test]
    fn pair_index_is_lexicographic() {
        let n = 5;
        let mut p = 0;
        for i in 0..n {
            for j in i + 1..n {
                assert_eq!(pair_index(n, i, j), p);
                p += 1;
            }
        }
        assert_eq!(p, pair_count(n));
    }

    #[test]
    fn antisymmetry() {
        let t = Tournament::from_fn(7, |i, j| (i * 3 + j) % 2 == 0);
        for u in 0..7 {
            assert!(!t.has_arc(u, u));
            for v in 0..7 {
                if u != v {
                    assert!(t.has_arc(u, v) ^ t.has_arc(v, u));
                }
            }
        }
    }

    #[test]
    fn orientation_string_round_trip() {
        let t = triangle();
        assert_eq!(t.orientation_string(), "101");
        let back = Tournament::from_orientation_string(3, "101").unwrap();
        assert_eq!(back, t);
        assert!(Tournament::from_orientation_string(3, "10").is_err());
        assert!(Tournament::from_orientation_string(3, "1x1").is_err());
    }

    #[test]
    fn strong_connectivity() {
        assert!(triangle().is_strongly_connected());
        let transitive = Tournament::from_fn(4, |_, _| true);
        assert!(!transitive.is_strongly_connected());
        assert!(Tournament::from_fn(1, |_, _| true).is_strongly_connected());
    }

    #[test]
    fn hamilton_path_by_insertion() {
        let t = Tournament::from_fn(9, |i, j| (i + 2 * j) % 3 != 0);
        let order: Vec<_> = (0..9).collect();
        let path = t.hamilton_path(&order);
        assert_eq!(path.len(), 9);
        for w in path.windows(2) {
            assert!(t.has_arc(w[0], w[1]));
        }
    }

    #[test]
    fn scores_match_degrees() {
        let t = Tournament::from_fn(6, |i, j| (i ^ j) & 1 == 1);
        let s = t.scores();
        for v in 0..6 {
            assert_eq!(s[v], t.out_degree(v));
            assert_eq!(t.out_rows()[v].count_ones(..), s[v]);
        }
    }
}
