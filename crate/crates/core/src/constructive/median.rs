use crate::tournament::Tournament;
use crate::VertexId;

/// A vertex order that no single-vertex relocation can improve (more arcs
/// pointing forward). Such an order has, for every position `j` (0-based),
/// at least `j/2` in-neighbours among the first `j` vertices and at least
/// `(n-1-j)/2` out-neighbours among the rest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalMedianOrder {
    pub order: Vec<VertexId>,
    /// Number of relocations applied by the local search.
    pub improvements: usize,
}

impl LocalMedianOrder {
    pub fn forward_arcs(&self, t: &Tournament) -> usize {
        forward_arcs(t, &self.order)
    }

    /// Checks the prefix in-degree and suffix out-degree bounds directly.
    pub fn satisfies_degree_bounds(&self, t: &Tournament) -> bool {
        let n = self.order.len();
        (0..n).all(|j| {
            let v = self.order[j];
            let back = self.order[..j].iter().filter(|&&u| t.has_arc(u, v)).count();
            let fwd = self.order[j + 1..].iter().filter(|&&u| t.has_arc(v, u)).count();
            2 * back >= j && 2 * fwd >= n - 1 - j
        })
    }
}

pub fn forward_arcs(t: &Tournament, order: &[VertexId]) -> usize {
    let mut count = 0;
    for (a, &u) in order.iter().enumerate() {
        for &v in &order[a + 1..] {
            count += t.has_arc(u, v) as usize;
        }
    }
    count
}

/// Local search over single-vertex relocations, started from the score order.
/// Each accepted move strictly increases the forward-arc count, so at most
/// `n(n-1)/2` moves happen.
pub fn local_median_order(t: &Tournament) -> LocalMedianOrder {
    let n = t.n();
    let scores = t.scores();
    let mut order: Vec<VertexId> = (0..n).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(scores[v]), v));
    let rows = t.out_rows();
    let arc = |u: VertexId, v: VertexId| rows[u].contains(v);
    let mut improvements = 0;
    loop {
        let mut moved = false;
        let mut p = 0;
        while p < n {
            let v = order[p];
            // best relocation of v: gain of moving it to position q
            let (mut best_gain, mut best_q) = (0i64, p);
            let mut gain = 0i64;
            for q in (0..p).rev() {
                let x = order[q];
                gain += if arc(v, x) { 1 } else { -1 };
                if gain > best_gain {
                    best_gain = gain;
                    best_q = q;
                }
            }
            gain = 0;
            for (q, &x) in order.iter().enumerate().skip(p + 1) {
                gain += if arc(x, v) { 1 } else { -1 };
                if gain > best_gain {
                    best_gain = gain;
                    best_q = q;
                }
            }
            if best_gain > 0 {
                let v = order.remove(p);
                order.insert(best_q, v);
                improvements += 1;
                moved = true;
            }
            p += 1;
        }
        if !moved {
            break;
        }
    }
    LocalMedianOrder { order, improvements }
}

/// Whether at most `2d + 1` vertices have in-degree at most `d`, and likewise
/// for out-degree.
pub fn low_degree_count_bound_check(t: &Tournament, d: usize) -> bool {
    let scores = t.scores();
    let n = t.n();
    let low_out = scores.iter().filter(|&&s| s <= d).count();
    let low_in = scores.iter().filter(|&&s| n - 1 - s <= d).count();
    low_out <= 2 * d + 1 && low_in <= 2 * d + 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{directed_cycle_tournament, directed_triangle, random_tournament, transitive_tournament};

    fn all_orders(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for o in all_orders(n - 1) {
            for k in 0..=o.len() {
                let mut p = o.clone();
                p.insert(k, n - 1);
                out.push(p);
            }
        }
        out
    }

    #[test]
    fn triangle_orders() {
        let t = directed_triangle();
        for o in all_orders(3) {
            assert_eq!(forward_arcs(&t, &o), if o == [0, 1, 2] || o == [1, 2, 0] || o == [2, 0, 1] { 2 } else { 1 });
        }
        let lm = local_median_order(&t);
        assert_eq!(lm.forward_arcs(&t), 2);
        assert!(lm.satisfies_degree_bounds(&t));
    }

    #[test]
    fn transitive_is_sorted() {
        let t = transitive_tournament(8);
        let lm = local_median_order(&t);
        assert_eq!(lm.order, (0..8).collect::<Vec<_>>());
        assert_eq!(lm.forward_arcs(&t), 28);
    }

    #[test]
    fn random_orders_satisfy_bounds() {
        for seed in 0..50 {
            let t = random_tournament(20, seed);
            assert!(local_median_order(&t).satisfies_degree_bounds(&t), "seed {seed}");
        }
        let t = random_tournament(20, 7);
        assert!(local_median_order(&t).satisfies_degree_bounds(&t));
    }

    #[test]
    fn low_degree_examples() {
        let t = transitive_tournament(5);
        // in-degrees 0..4: two vertices with in-degree <= 1
        assert!(low_degree_count_bound_check(&t, 1));
        assert!(low_degree_count_bound_check(&t, 5));
        let r = directed_cycle_tournament(7);
        assert!(t.scores().iter().filter(|&&s| 4 - s <= 1).count() == 2);
        assert_eq!(r.scores().iter().filter(|&&s| 6 - s <= 2).count(), 0);
        assert!(low_degree_count_bound_check(&r, 2));
    }
}
