use serde::{Deserialize, Serialize};

use crate::collection::TournamentCollection;
use crate::{ColorId, VertexId};

/// An arc together with its assigned color. Serializes as `[tail, head, color]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "[usize; 3]", into = "[usize; 3]")]
pub struct ColoredArc {
    pub tail: VertexId,
    pub head: VertexId,
    pub color: ColorId,
}

impl From<[usize; 3]> for ColoredArc {
    fn from([tail, head, color]: [usize; 3]) -> Self {
        ColoredArc { tail, head, color }
    }
}

impl From<ColoredArc> for [usize; 3] {
    fn from(a: ColoredArc) -> Self {
        [a.tail, a.head, a.color]
    }
}

/// Why a colored digraph fails to be a transversal of a collection.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    OutOfRange { arc: usize },
    SelfLoop { arc: usize },
    DuplicateArc { first: usize, second: usize },
    RepeatedColor { color: ColorId, first: usize, second: usize },
    ArcNotInColor { arc: usize },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ColoredDigraph {
    pub arcs: Vec<ColoredArc>,
}

impl ColoredDigraph {
    pub fn new(arcs: Vec<ColoredArc>) -> Self {
        ColoredDigraph { arcs }
    }

    pub fn is_rainbow(&self) -> bool {
        let mut colors: Vec<ColorId> = self.arcs.iter().map(|a| a.color).collect();
        colors.sort_unstable();
        colors.windows(2).all(|w| w[0] != w[1])
    }

    /// Every reason this digraph is not a transversal of `t`. Empty means valid.
    pub fn violations(&self, t: &TournamentCollection) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut by_pair = std::collections::HashMap::new();
        let mut by_color = std::collections::HashMap::new();
        for (k, a) in self.arcs.iter().enumerate() {
            if a.tail >= t.n() || a.head >= t.n() || a.color >= t.m() {
                out.push(Violation::OutOfRange { arc: k });
                continue;
            }
            if a.tail == a.head {
                out.push(Violation::SelfLoop { arc: k });
                continue;
            }
            if let Some(&first) = by_pair.get(&(a.tail, a.head)) {
                out.push(Violation::DuplicateArc { first, second: k });
            } else {
                by_pair.insert((a.tail, a.head), k);
            }
            if let Some(&first) = by_color.get(&a.color) {
                out.push(Violation::RepeatedColor {
                    color: a.color,
                    first,
                    second: k,
                });
            } else {
                by_color.insert(a.color, k);
            }
            if !t.has_arc(a.color, a.tail, a.head) {
                out.push(Violation::ArcNotInColor { arc: k });
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain data serializes")
    }
}

/// Whether `d` is a transversal of `t`: distinct colors, each arc in its color.
pub fn validate_transversal(t: &TournamentCollection, d: &ColoredDigraph) -> bool {
    d.violations(t).is_empty()
}

/// A path `vertices[0] -> vertices[1] -> ..` whose `k`-th arc has color `colors[k]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RainbowPath {
    pub vertices: Vec<VertexId>,
    pub colors: Vec<ColorId>,
}

impl RainbowPath {
    pub fn new(vertices: Vec<VertexId>, colors: Vec<ColorId>) -> Self {
        debug_assert_eq!(colors.len() + 1, vertices.len().max(1));
        RainbowPath { vertices, colors }
    }

    pub fn single(v: VertexId) -> Self {
        RainbowPath {
            vertices: vec![v],
            colors: Vec::new(),
        }
    }

    /// Number of arcs.
    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn first(&self) -> VertexId {
        self.vertices[0]
    }

    pub fn last(&self) -> VertexId {
        *self.vertices.last().expect("non-empty path")
    }

    pub fn arcs(&self) -> impl Iterator<Item = ColoredArc> + '_ {
        self.vertices
            .windows(2)
            .zip(&self.colors)
            .map(|(w, &color)| ColoredArc {
                tail: w[0],
                head: w[1],
                color,
            })
    }

    pub fn to_digraph(&self) -> ColoredDigraph {
        ColoredDigraph::new(self.arcs().collect())
    }

    /// Shape and transversal check: distinct vertices, one color per arc,
    /// distinct colors, each arc present in its color.
    pub fn valid(&self, t: &TournamentCollection) -> bool {
        self.colors.len() + 1 == self.vertices.len()
            && distinct(&self.vertices)
            && validate_transversal(t, &self.to_digraph())
    }

    /// Valid and visiting all `n` vertices.
    pub fn is_hamilton(&self, t: &TournamentCollection) -> bool {
        self.vertices.len() == t.n() && self.valid(t)
    }

    /// Appends `v` via an arc of color `c`.
    pub fn push(&mut self, c: ColorId, v: VertexId) {
        self.colors.push(c);
        self.vertices.push(v);
    }

    /// Concatenates `other` after this path, joined by an arc of color `c`.
    pub fn join(mut self, c: ColorId, other: RainbowPath) -> RainbowPath {
        self.colors.push(c);
        self.vertices.extend(other.vertices);
        self.colors.extend(other.colors);
        self
    }

    /// The path with vertex and color labels mapped through `vmap`/`cmap`.
    pub fn relabel(&self, vmap: &[VertexId], cmap: &[ColorId]) -> RainbowPath {
        RainbowPath {
            vertices: self.vertices.iter().map(|&v| vmap[v]).collect(),
            colors: self.colors.iter().map(|&c| cmap[c]).collect(),
        }
    }
}

/// A cycle `vertices[0] -> .. -> vertices[k-1] -> vertices[0]`; `colors[k-1]`
/// colors the closing arc.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RainbowCycle {
    pub vertices: Vec<VertexId>,
    pub colors: Vec<ColorId>,
}

impl RainbowCycle {
    pub fn new(vertices: Vec<VertexId>, colors: Vec<ColorId>) -> Self {
        debug_assert_eq!(colors.len(), vertices.len());
        RainbowCycle { vertices, colors }
    }

    /// Closes `path` with an arc from its last to its first vertex in color `c`.
    pub fn close(path: RainbowPath, c: ColorId) -> Self {
        let mut colors = path.colors;
        colors.push(c);
        RainbowCycle {
            vertices: path.vertices,
            colors,
        }
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn arcs(&self) -> impl Iterator<Item = ColoredArc> + '_ {
        let k = self.vertices.len();
        (0..k).map(move |i| ColoredArc {
            tail: self.vertices[i],
            head: self.vertices[(i + 1) % k],
            color: self.colors[i],
        })
    }

    pub fn to_digraph(&self) -> ColoredDigraph {
        ColoredDigraph::new(self.arcs().collect())
    }

    pub fn valid(&self, t: &TournamentCollection) -> bool {
        self.vertices.len() >= 2
            && self.colors.len() == self.vertices.len()
            && distinct(&self.vertices)
            && validate_transversal(t, &self.to_digraph())
    }

    pub fn is_hamilton(&self, t: &TournamentCollection) -> bool {
        self.vertices.len() == t.n() && self.valid(t)
    }

    /// The same cycle started at position `k`.
    pub fn rotated(&self, k: usize) -> RainbowCycle {
        let mut vertices = self.vertices.clone();
        let mut colors = self.colors.clone();
        vertices.rotate_left(k);
        colors.rotate_left(k);
        RainbowCycle { vertices, colors }
    }
}

fn distinct(xs: &[usize]) -> bool {
    let mut v = xs.to_vec();
    v.sort_unstable();
    v.windows(2).all(|w| w[0] != w[1])
}
