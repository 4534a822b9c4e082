use std::sync::OnceLock;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tournament::{pair_count, pair_index, Tournament};
use crate::{ColorId, Ratio, VertexId};

/// `ceil(r * k)` for a nonnegative rational `r`.
pub fn ceil_mul(r: Ratio, k: usize) -> usize {
    let num = *r.numer() as u128 * k as u128;
    let den = *r.denom() as u128;
    num.div_ceil(den) as usize
}

/// An ordered family of tournaments on a shared vertex set. The color of a
/// tournament is its index in the family.
pub struct TournamentCollection {
    n: usize,
    tournaments: Vec<Tournament>,
    // pair-major view: for pair (i<j), the colors whose tournament has i -> j
    pair_colors: OnceLock<Vec<FixedBitSet>>,
}

impl Clone for TournamentCollection {
    fn clone(&self) -> Self {
        TournamentCollection {
            n: self.n,
            tournaments: self.tournaments.clone(),
            pair_colors: OnceLock::new(),
        }
    }
}

impl PartialEq for TournamentCollection {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.tournaments == other.tournaments
    }
}

impl Eq for TournamentCollection {}

impl std::fmt::Debug for TournamentCollection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TournamentCollection")
            .field("n", &self.n)
            .field("m", &self.m())
            .field("tournaments", &self.tournaments)
            .finish()
    }
}

/// The on-disk JSON shape of a collection.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollectionFile {
    pub n: usize,
    pub m: usize,
    pub tournaments: Vec<String>,
}

/// Vertex and color relabelling produced by [`TournamentCollection::induced`].
/// Entry `k` holds the original label of local vertex (color) `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relabel {
    pub vertices: Vec<VertexId>,
    pub colors: Vec<ColorId>,
}

impl Relabel {
    pub fn local_vertex(&self, original: VertexId) -> Option<VertexId> {
        self.vertices.iter().position(|&v| v == original)
    }

    pub fn local_color(&self, original: ColorId) -> Option<ColorId> {
        self.colors.iter().position(|&c| c == original)
    }
}

/// The threshold digraph: arcs present in at least `ceil(gamma * |colors|)` of
/// the considered tournaments.
#[derive(Debug, Clone)]
pub struct MajorityDigraph {
    pub n: usize,
    pub gamma: Ratio,
    pub threshold: usize,
    rows: Vec<FixedBitSet>,
}

impl MajorityDigraph {
    #[inline]
    pub fn has_arc(&self, u: VertexId, v: VertexId) -> bool {
        self.rows[u].contains(v)
    }

    pub fn arcs(&self) -> Vec<(VertexId, VertexId)> {
        (0..self.n)
            .flat_map(|u| self.rows[u].ones().map(move |v| (u, v)))
            .collect()
    }

    pub fn arc_count(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones(..)).sum()
    }

    /// Whether every arc of `sub` is an arc of this digraph.
    pub fn contains_arcs_of(&self, other: &MajorityDigraph) -> bool {
        self.n == other.n && other.rows.iter().zip(&self.rows).all(|(o, s)| o.is_subset(s))
    }

    pub fn contains_tournament(&self, t: &Tournament) -> bool {
        t.n() == self.n
            && (0..self.n).all(|u| (0..self.n).all(|v| !t.has_arc(u, v) || self.has_arc(u, v)))
    }
}

impl TournamentCollection {
    pub fn new(n: usize, tournaments: Vec<Tournament>) -> Result<Self> {
        if let Some((c, t)) = tournaments.iter().enumerate().find(|(_, t)| t.n() != n) {
            return Err(Error::invalid(format!(
                "tournament {c} has {} vertices, collection has {n}",
                t.n()
            )));
        }
        Ok(TournamentCollection {
            n,
            tournaments,
            pair_colors: OnceLock::new(),
        })
    }

    /// `m` copies of one tournament.
    pub fn repeated(t: &Tournament, m: usize) -> Self {
        TournamentCollection::new(t.n(), vec![t.clone(); m]).expect("same n")
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.tournaments.len()
    }

    #[inline]
    pub fn tournament(&self, c: ColorId) -> &Tournament {
        &self.tournaments[c]
    }

    pub fn tournaments(&self) -> &[Tournament] {
        &self.tournaments
    }

    /// Whether the arc `u -> v` lies in tournament `c`.
    #[inline]
    pub fn has_arc(&self, c: ColorId, u: VertexId, v: VertexId) -> bool {
        self.tournaments[c].has_arc(u, v)
    }

    pub fn all_colors(&self) -> FixedBitSet {
        let mut s = FixedBitSet::with_capacity(self.m());
        s.insert_range(..);
        s
    }

    fn pair_colors(&self) -> &[FixedBitSet] {
        self.pair_colors.get_or_init(|| {
            let (n, m) = (self.n, self.m());
            let mut out = vec![FixedBitSet::with_capacity(m); pair_count(n)];
            for (c, t) in self.tournaments.iter().enumerate() {
                for (w, &word) in t.words().iter().enumerate() {
                    let mut bits = word;
                    while bits != 0 {
                        let b = bits.trailing_zeros() as usize;
                        out[w * 64 + b].insert(c);
                        bits &= bits - 1;
                    }
                }
            }
            out
        })
    }

    /// Colors whose tournament contains `u -> v`, without argument checks.
    pub fn arc_colors(&self, u: VertexId, v: VertexId) -> FixedBitSet {
        debug_assert!(u != v);
        if u < v {
            self.pair_colors()[pair_index(self.n, u, v)].clone()
        } else {
            let mut s = self.pair_colors()[pair_index(self.n, v, u)].clone();
            s.toggle_range(..);
            s
        }
    }

    /// `|C(u -> v) ∩ colors|`, or `|C(u -> v)|` when `colors` is `None`.
    pub fn arc_color_count(&self, u: VertexId, v: VertexId, colors: Option<&FixedBitSet>) -> usize {
        let (lo, hi) = if u < v { (u, v) } else { (v, u) };
        let fwd = &self.pair_colors()[pair_index(self.n, lo, hi)];
        let (forward_count, total) = match colors {
            None => (fwd.count_ones(..), self.m()),
            Some(cs) => (fwd.intersection_count(cs), cs.count_ones(..)),
        };
        if u < v {
            forward_count
        } else {
            total - forward_count
        }
    }

    /// Colors from `palette` (in palette order) whose tournament contains `u -> v`.
    pub fn arc_colors_in(&self, u: VertexId, v: VertexId, palette: &[ColorId]) -> Vec<ColorId> {
        palette
            .iter()
            .copied()
            .filter(|&c| self.tournaments[c].has_arc(u, v))
            .collect()
    }

    /// `C(u -> v)`: every color whose tournament contains the arc.
    pub fn color_set_of_arc(&self, u: VertexId, v: VertexId) -> Result<FixedBitSet> {
        if u == v || u >= self.n || v >= self.n {
            return Err(Error::invalid(format!(
                "arc {u} -> {v} is not a pair of distinct vertices below {}",
                self.n
            )));
        }
        Ok(self.arc_colors(u, v))
    }

    fn check_colors(&self, colors: Option<&FixedBitSet>) -> Result<usize> {
        let k = match colors {
            None => self.m(),
            Some(cs) => {
                if cs.ones().any(|c| c >= self.m()) {
                    return Err(Error::invalid("color set mentions a color outside the collection"));
                }
                cs.count_ones(..)
            }
        };
        if k == 0 {
            return Err(Error::invalid("threshold digraph over an empty color set"));
        }
        Ok(k)
    }

    /// Arcs contained in at least `ceil(gamma * |colors|)` tournaments of `colors`.
    pub fn threshold_digraph(&self, colors: Option<&FixedBitSet>, gamma: Ratio) -> Result<MajorityDigraph> {
        if gamma <= Ratio::from_integer(0) || gamma > Ratio::from_integer(1) {
            return Err(Error::invalid(format!("gamma {gamma} is outside (0, 1]")));
        }
        let k = self.check_colors(colors)?;
        let threshold = ceil_mul(gamma, k);
        let mut rows = vec![FixedBitSet::with_capacity(self.n); self.n];
        for u in 0..self.n {
            for v in u + 1..self.n {
                let fwd = self.arc_color_count(u, v, colors);
                if fwd >= threshold {
                    rows[u].insert(v);
                }
                if k - fwd >= threshold {
                    rows[v].insert(u);
                }
            }
        }
        Ok(MajorityDigraph {
            n: self.n,
            gamma,
            threshold,
            rows,
        })
    }

    /// A tournament inside the threshold digraph for `gamma <= 1/2`. Each pair
    /// takes the orientation with the larger count; ties go to the lower-to-higher arc.
    pub fn majority_subtournament(&self, colors: Option<&FixedBitSet>, gamma: Ratio) -> Result<Tournament> {
        if gamma > Ratio::new(1, 2) || gamma <= Ratio::from_integer(0) {
            return Err(Error::invalid(format!("gamma {gamma} is outside (0, 1/2]")));
        }
        let k = self.check_colors(colors)?;
        Ok(Tournament::from_fn(self.n, |u, v| {
            let fwd = self.arc_color_count(u, v, colors);
            fwd >= k - fwd
        }))
    }

    /// The vertex- and color-induced sub-collection. `None` keeps everything.
    /// Local labels follow the order of the given slices.
    pub fn induced(
        &self,
        vertices: Option<&[VertexId]>,
        colors: Option<&[ColorId]>,
    ) -> Result<(TournamentCollection, Relabel)> {
        let vertices: Vec<VertexId> = match vertices {
            Some(vs) => vs.to_vec(),
            None => (0..self.n).collect(),
        };
        let colors: Vec<ColorId> = match colors {
            Some(cs) => cs.to_vec(),
            None => (0..self.m()).collect(),
        };
        if vertices.is_empty() {
            return Err(Error::invalid("induced collection on an empty vertex set"));
        }
        check_distinct(&vertices, self.n, "vertex")?;
        check_distinct(&colors, self.m(), "color")?;
        let tournaments = colors
            .iter()
            .map(|&c| self.tournaments[c].induced(&vertices))
            .collect();
        let sub = TournamentCollection::new(vertices.len(), tournaments)?;
        Ok((sub, Relabel { vertices, colors }))
    }

    pub fn to_file(&self) -> CollectionFile {
        CollectionFile {
            n: self.n,
            m: self.m(),
            tournaments: self.tournaments.iter().map(|t| t.orientation_string()).collect(),
        }
    }

    pub fn from_file(file: &CollectionFile) -> Result<Self> {
        if file.n == 0 {
            return Err(Error::Format("n must be at least 1".into()));
        }
        if file.tournaments.len() != file.m {
            return Err(Error::Format(format!(
                "m = {} but {} tournaments listed",
                file.m,
                file.tournaments.len()
            )));
        }
        let tournaments = file
            .tournaments
            .iter()
            .map(|s| Tournament::from_orientation_string(file.n, s))
            .collect::<Result<Vec<_>>>()?;
        TournamentCollection::new(file.n, tournaments)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("plain data serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: CollectionFile =
            serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        TournamentCollection::from_file(&file)
    }
}

fn check_distinct(items: &[usize], bound: usize, what: &str) -> Result<()> {
    let mut seen = FixedBitSet::with_capacity(bound);
    for &x in items {
        if x >= bound {
            return Err(Error::invalid(format!("{what} {x} is out of range (< {bound})")));
        }
        if seen.put(x) {
            return Err(Error::invalid(format!("{what} {x} listed twice")));
        }
    }
    Ok(())
}

/// A color set over `m` colors holding `colors`.
pub fn color_set(m: usize, colors: impl IntoIterator<Item = ColorId>) -> FixedBitSet {
    let mut s = FixedBitSet::with_capacity(m);
    s.extend(colors);
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{fig1_counterexamples, prop14_collection, prop14_tprime, transitive_tournament};

    fn set(xs: &[usize], m: usize) -> FixedBitSet {
        color_set(m, xs.iter().copied())
    }

    #[test]
    fn color_sets_of_prop14_arcs() {
        let t = prop14_collection(3).unwrap();
        assert_eq!(t.color_set_of_arc(1, 0).unwrap(), set(&[2], 3));
        assert_eq!(t.color_set_of_arc(0, 1).unwrap(), set(&[0, 1], 3));
        assert!(t.color_set_of_arc(1, 1).is_err());
        assert!(t.color_set_of_arc(0, 3).is_err());
    }

    #[test]
    fn color_sets_partition_palette() {
        let (p, _) = fig1_counterexamples();
        for u in 0..3 {
            for v in 0..3 {
                if u != v {
                    let mut a = p.color_set_of_arc(u, v).unwrap();
                    let b = p.color_set_of_arc(v, u).unwrap();
                    assert!(a.is_disjoint(&b));
                    a.union_with(&b);
                    assert_eq!(a.count_ones(..), p.m());
                }
            }
        }
    }

    #[test]
    fn threshold_examples() {
        let (path_instance, _) = fig1_counterexamples();
        let half = Ratio::new(1, 2);
        let d = path_instance.threshold_digraph(None, half).unwrap();
        assert_eq!(d.threshold, 1);
        assert_eq!(d.arc_count(), 6);

        let t = transitive_tournament(4);
        let single = TournamentCollection::repeated(&t, 1);
        let d = single.threshold_digraph(None, Ratio::from_integer(1)).unwrap();
        assert!(d.contains_tournament(&t));
        assert_eq!(d.arc_count(), 6);

        let p14 = prop14_collection(3).unwrap();
        let d = p14.threshold_digraph(None, half).unwrap();
        let mut arcs = d.arcs();
        arcs.sort();
        assert_eq!(arcs, vec![(0, 1), (0, 2), (1, 2)]);

        assert!(p14.threshold_digraph(Some(&FixedBitSet::with_capacity(3)), half).is_err());
        assert!(p14.threshold_digraph(None, Ratio::new(3, 2)).is_err());
    }

    #[test]
    fn majority_subtournament_examples() {
        let half = Ratio::new(1, 2);
        let t = transitive_tournament(5);
        let single = TournamentCollection::repeated(&t, 1);
        assert_eq!(single.majority_subtournament(None, half).unwrap(), t);

        let (path_instance, _) = fig1_counterexamples();
        let maj = path_instance.majority_subtournament(None, half).unwrap();
        let d = path_instance.threshold_digraph(None, half).unwrap();
        assert!(d.contains_tournament(&maj));

        let p14 = prop14_collection(3).unwrap();
        assert_eq!(p14.majority_subtournament(None, half).unwrap(), transitive_tournament(3));
        assert!(p14.majority_subtournament(None, Ratio::new(2, 3)).is_err());
    }

    #[test]
    fn induced_examples() {
        let p14 = prop14_collection(4).unwrap();
        let (same, relabel) = p14.induced(None, None).unwrap();
        assert_eq!(same, p14);
        assert_eq!(relabel.vertices, vec![0, 1, 2, 3]);

        let (sub, _) = p14.induced(Some(&[0, 1, 2]), Some(&[2, 3])).unwrap();
        assert_eq!(sub.n(), 3);
        assert_eq!(sub.m(), 2);
        let expected = prop14_tprime(3).unwrap();
        for t in sub.tournaments() {
            assert_eq!(t, &expected);
            assert!(t.has_arc(0, 2) && t.has_arc(1, 0) && t.has_arc(2, 1));
        }

        assert!(p14.induced(Some(&[]), None).is_err());
        assert!(p14.induced(Some(&[0, 0]), None).is_err());
        assert!(p14.induced(None, Some(&[9])).is_err());
    }

    #[test]
    fn json_round_trip_and_format() {
        let (path_instance, _) = fig1_counterexamples();
        let text = path_instance.to_json();
        assert_eq!(text, r#"{"n":3,"m":2,"tournaments":["101","010"]}"#);
        assert_eq!(TournamentCollection::from_json(&text).unwrap(), path_instance);
        assert!(TournamentCollection::from_json(r#"{"n":3,"m":2,"tournaments":["101"]}"#).is_err());
        assert!(TournamentCollection::from_json(r#"{"n":3,"m":1,"tournaments":["1011"]}"#).is_err());
    }

    #[test]
    fn ceil_mul_rounds_up() {
        assert_eq!(ceil_mul(Ratio::new(1, 2), 3), 2);
        assert_eq!(ceil_mul(Ratio::new(1, 2), 4), 2);
        assert_eq!(ceil_mul(Ratio::new(1, 3), 0), 0);
        assert_eq!(ceil_mul(Ratio::new(2, 3), 7), 5);
    }
}
