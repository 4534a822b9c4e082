//! Bipartite matching between arcs (left) and colors (right).
//!
//! [`hopcroft_karp`] is a standalone maximum matching. [`IncrementalMatcher`]
//! keeps a matching that saturates a stack of arcs and supports push/pop, which
//! is what backtracking search needs.

use std::collections::VecDeque;

use fixedbitset::FixedBitSet;

const NONE: usize = usize::MAX;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    pub size: usize,
    /// Partner of each left vertex.
    pub left: Vec<Option<usize>>,
    /// Partner of each right vertex.
    pub right: Vec<Option<usize>>,
}

impl Matching {
    pub fn is_left_perfect(&self) -> bool {
        self.size == self.left.len()
    }
}

/// Maximum matching of the bipartite graph where left vertex `u` is adjacent
/// to `adj[u]` (right vertices below `n_right`).
pub fn hopcroft_karp(adj: &[Vec<usize>], n_right: usize) -> Matching {
    let n_left = adj.len();
    let mut ml = vec![NONE; n_left];
    let mut mr = vec![NONE; n_right];
    let mut dist = vec![0usize; n_left];
    let mut size = 0;
    loop {
        // BFS layers from free left vertices.
        let mut queue = VecDeque::new();
        for u in 0..n_left {
            if ml[u] == NONE {
                dist[u] = 0;
                queue.push_back(u);
            } else {
                dist[u] = NONE;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                let w = mr[v];
                if w == NONE {
                    found = true;
                } else if dist[w] == NONE {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        if !found {
            break;
        }
        let mut it = vec![0usize; n_left];
        for u in 0..n_left {
            if ml[u] == NONE && hk_dfs(u, adj, &mut ml, &mut mr, &mut dist, &mut it) {
                size += 1;
            }
        }
    }
    Matching {
        size,
        left: ml.into_iter().map(|x| (x != NONE).then_some(x)).collect(),
        right: mr.into_iter().map(|x| (x != NONE).then_some(x)).collect(),
    }
}

fn hk_dfs(
    u: usize,
    adj: &[Vec<usize>],
    ml: &mut [usize],
    mr: &mut [usize],
    dist: &mut [usize],
    it: &mut [usize],
) -> bool {
    while it[u] < adj[u].len() {
        let v = adj[u][it[u]];
        it[u] += 1;
        let w = mr[v];
        if w == NONE || (dist[w] == dist[u] + 1 && hk_dfs(w, adj, ml, mr, dist, it)) {
            ml[u] = v;
            mr[v] = u;
            return true;
        }
    }
    dist[u] = NONE;
    false
}

/// A matching that saturates every pushed arc. Pushing an arc succeeds only if
/// the enlarged arc set still has a saturating matching (Hall's condition),
/// found by one augmenting-path search. Popping frees the arc's color, which
/// leaves the remaining arcs saturated.
#[derive(Debug, Clone)]
pub struct IncrementalMatcher {
    adj: Vec<FixedBitSet>,
    arc_color: Vec<usize>,
    color_arc: Vec<usize>,
    seen: FixedBitSet,
    /// augmenting-path searches started, for instrumentation
    pub augmentations: u64,
}

impl IncrementalMatcher {
    pub fn new(m: usize) -> Self {
        IncrementalMatcher {
            adj: Vec::new(),
            arc_color: Vec::new(),
            color_arc: vec![NONE; m],
            seen: FixedBitSet::with_capacity(m),
            augmentations: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    /// Adds an arc available in `colors`. Returns `false` (and leaves the state
    /// unchanged) if no saturating matching exists with it.
    pub fn push(&mut self, colors: FixedBitSet) -> bool {
        let a = self.adj.len();
        self.adj.push(colors);
        self.arc_color.push(NONE);
        self.seen.clear();
        self.augmentations += 1;
        if self.augment(a) {
            true
        } else {
            self.adj.pop();
            self.arc_color.pop();
            false
        }
    }

    pub fn pop(&mut self) {
        if let Some(c) = self.arc_color.pop() {
            self.color_arc[c] = NONE;
            self.adj.pop();
        }
    }

    fn augment(&mut self, a: usize) -> bool {
        // Try a free color first; it avoids most deep searches.
        let free = self.adj[a]
            .ones()
            .find(|&c| self.color_arc[c] == NONE && !self.seen.contains(c));
        if let Some(c) = free {
            self.assign(a, c);
            return true;
        }
        let candidates: Vec<usize> = self.adj[a].ones().collect();
        for c in candidates {
            if self.seen.put(c) {
                continue;
            }
            let holder = self.color_arc[c];
            if self.augment(holder) {
                self.assign(a, c);
                return true;
            }
        }
        false
    }

    fn assign(&mut self, a: usize, c: usize) {
        self.arc_color[a] = c;
        self.color_arc[c] = a;
    }

    /// Color currently matched to each pushed arc.
    pub fn assignment(&self) -> &[usize] {
        &self.arc_color
    }

    pub fn color_is_used(&self, c: usize) -> bool {
        self.color_arc[c] != NONE
    }

    /// Re-matches so that every color in `required` is used while all arcs stay
    /// saturated. Each unused required color is brought in along an
    /// alternating path that ends by freeing a non-required color. Returns
    /// `false` if impossible; the matching stays arc-saturating either way.
    pub fn saturate_required(&mut self, required: &FixedBitSet) -> bool {
        for r in required.ones() {
            if self.color_arc[r] != NONE {
                continue;
            }
            self.seen.clear();
            self.seen.insert(r);
            if !self.pull_color(r, required) {
                return false;
            }
        }
        true
    }

    // Finds an arc for color `r`, displacing its color along an alternating
    // path until a non-required color is released.
    fn pull_color(&mut self, r: usize, required: &FixedBitSet) -> bool {
        let arcs: Vec<usize> = (0..self.adj.len()).filter(|&a| self.adj[a].contains(r)).collect();
        for &a in &arcs {
            let c = self.arc_color[a];
            if !required.contains(c) {
                self.color_arc[c] = NONE;
                self.assign(a, r);
                return true;
            }
        }
        for a in arcs {
            let c = self.arc_color[a];
            if self.seen.put(c) {
                continue;
            }
            // c is required; it must move to some other arc
            self.color_arc[c] = NONE;
            self.assign(a, r);
            if self.pull_color(c, required) {
                return true;
            }
            self.assign(a, c);
            self.color_arc[r] = NONE;
        }
        false
    }
}
