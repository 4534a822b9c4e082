use fixedbitset::FixedBitSet;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::collection::TournamentCollection;
use crate::digraph::{ColoredArc, ColoredDigraph};
use crate::error::{Error, Result};
use crate::generators::seeded_rng;
use crate::matching::hopcroft_karp;
use crate::{ColorId, Ratio, VertexId};

/// How candidate absorbers are probed before acceptance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbsorberSchedule {
    /// Check every top-up when there are at most this many.
    pub exhaustive_limit: u64,
    /// Random top-ups otherwise (adversarial ones are added on top).
    pub random_probes: usize,
}

impl Default for AbsorberSchedule {
    fn default() -> Self {
        AbsorberSchedule {
            exhaustive_limit: 10_000,
            random_probes: 500,
        }
    }
}

#[derive(Debug, Clone)]
pub struct AbsorberRequest<'a> {
    pub target_arcs: &'a [(VertexId, VertexId)],
    pub avail_colors: &'a [ColorId],
    /// Size of every top-up `C'`.
    pub ell: usize,
    /// Size of `C`.
    pub c_size: usize,
    /// If set, every target arc must lie in at least `alpha * |avail_colors|`
    /// of the available colors.
    pub alpha: Option<Ratio>,
    pub retries: usize,
    pub seed: u64,
    pub schedule: AbsorberSchedule,
}

/// Disjoint color sets `A`, `C` such that `target_arcs` can be rainbow-colored
/// with exactly `A ∪ C'` for the verified top-ups `C' ⊆ C` of size `ell`.
#[derive(Debug, Clone)]
pub struct Absorber {
    pub a: Vec<ColorId>,
    pub c: Vec<ColorId>,
    pub target_arcs: Vec<(VertexId, VertexId)>,
    pub ell: usize,
    /// For each target arc, the colors (of the whole collection) containing it.
    pub availability: Vec<FixedBitSet>,
    pub attempts: usize,
    pub exhaustive: bool,
    pub probes: usize,
}

fn binomial_capped(n: usize, k: usize, cap: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > cap as u128 {
            return cap + 1;
        }
    }
    acc as u64
}

/// Calls `f` on every `k`-subset of `items` (lexicographic by position) until
/// it returns `false`.
fn for_each_subset(items: &[ColorId], k: usize, mut f: impl FnMut(&[ColorId]) -> bool) -> bool {
    let n = items.len();
    if k > n {
        return true;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    let mut buf: Vec<ColorId> = idx.iter().map(|&i| items[i]).collect();
    loop {
        if !f(&buf) {
            return false;
        }
        let mut i = k;
        while i > 0 && idx[i - 1] == i - 1 + n - k {
            i -= 1;
        }
        if i == 0 {
            return true;
        }
        i -= 1;
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
        for j in i..k {
            buf[j] = items[idx[j]];
        }
    }
}

fn perfect_coloring(
    availability: &[FixedBitSet],
    colors: &[ColorId],
) -> Option<Vec<ColorId>> {
    if colors.len() != availability.len() {
        return None;
    }
    let adj: Vec<Vec<usize>> = availability
        .iter()
        .map(|av| (0..colors.len()).filter(|&k| av.contains(colors[k])).collect())
        .collect();
    let m = hopcroft_karp(&adj, colors.len());
    m.is_left_perfect()
        .then(|| m.left.iter().map(|k| colors[k.unwrap()]).collect())
}

impl Absorber {
    /// Top-ups that must work before a candidate is accepted: every subset
    /// (when few), or random ones plus adversarial ones built from the colors
    /// of `C` that cover the fewest target arcs and from colors that avoid a
    /// given arc.
    fn verify(&mut self, schedule: &AbsorberSchedule, rng: &mut impl Rng) -> bool {
        let ell = self.ell;
        let total = binomial_capped(self.c.len(), ell, schedule.exhaustive_limit);
        let base: Vec<ColorId> = self.a.clone();
        let availability = &self.availability;
        let check = |cp: &[ColorId]| {
            let mut colors = base.clone();
            colors.extend_from_slice(cp);
            perfect_coloring(availability, &colors).is_some()
        };
        if total <= schedule.exhaustive_limit {
            let mut probes = 0;
            let ok = for_each_subset(&self.c, ell, |cp| {
                probes += 1;
                check(cp)
            });
            self.exhaustive = true;
            self.probes = probes;
            return ok;
        }
        let mut probes = 0;
        let degree = |c: ColorId| availability.iter().filter(|av| av.contains(c)).count();
        let mut by_degree = self.c.clone();
        by_degree.sort_by_key(|&c| (degree(c), c));
        probes += 1;
        if !check(&by_degree[..ell]) {
            return false;
        }
        for av in availability.iter() {
            let mut starve: Vec<ColorId> = by_degree.iter().copied().filter(|&c| !av.contains(c)).collect();
            starve.extend(by_degree.iter().copied().filter(|&c| av.contains(c)));
            probes += 1;
            if !check(&starve[..ell]) {
                return false;
            }
        }
        let mut pool = self.c.clone();
        for _ in 0..schedule.random_probes {
            let (cp, _) = pool.partial_shuffle(rng, ell);
            probes += 1;
            if !check(cp) {
                return false;
            }
        }
        self.exhaustive = false;
        self.probes = probes;
        true
    }
}

/// Randomized absorber construction with verification and retry.
pub fn build_absorber(t: &TournamentCollection, req: &AbsorberRequest<'_>) -> Result<Absorber> {
    let k = req.target_arcs.len();
    if req.ell > k {
        return Err(Error::invalid(format!("top-up size {} exceeds the {k} target arcs", req.ell)));
    }
    let a_size = k - req.ell;
    if a_size + req.c_size > req.avail_colors.len() {
        return Err(Error::InsufficientColors {
            needed: a_size + req.c_size,
            available: req.avail_colors.len(),
        });
    }
    if req.c_size < req.ell {
        return Err(Error::invalid("C must hold at least one top-up"));
    }
    let mut avail_set = FixedBitSet::with_capacity(t.m());
    for &c in req.avail_colors {
        if c >= t.m() || avail_set.put(c) {
            return Err(Error::invalid(format!("available color {c} repeated or out of range")));
        }
    }
    let availability: Vec<FixedBitSet> = req
        .target_arcs
        .iter()
        .map(|&(u, v)| t.color_set_of_arc(u, v))
        .collect::<Result<_>>()?;
    if let Some(alpha) = req.alpha {
        let need = crate::collection::ceil_mul(alpha, req.avail_colors.len());
        if let Some((i, _)) = availability
            .iter()
            .enumerate()
            .find(|(_, av)| av.intersection_count(&avail_set) < need)
        {
            return Err(Error::invalid(format!("target arc {i} is in fewer than alpha * |avail| colors")));
        }
    }
    let mut rng = seeded_rng(req.seed, 0xab5);
    for attempt in 1..=req.retries.max(1) {
        let mut pool = req.avail_colors.to_vec();
        pool.shuffle(&mut rng);
        let mut absorber = Absorber {
            a: pool[..a_size].to_vec(),
            c: pool[a_size..a_size + req.c_size].to_vec(),
            target_arcs: req.target_arcs.to_vec(),
            ell: req.ell,
            availability: availability.clone(),
            attempts: attempt,
            exhaustive: false,
            probes: 0,
        };
        absorber.a.sort_unstable();
        absorber.c.sort_unstable();
        if absorber.verify(&req.schedule, &mut rng) {
            return Ok(absorber);
        }
    }
    Err(Error::AbsorberConstructionFailed {
        attempts: req.retries.max(1),
    })
}

/// A rainbow coloring of the absorber's arcs using exactly `A ∪ C'`.
pub fn absorb(absorber: &Absorber, c_prime: &[ColorId]) -> Result<ColoredDigraph> {
    if c_prime.len() != absorber.ell {
        return Err(Error::AbsorptionFailed(format!(
            "top-up has {} colors, expected {}",
            c_prime.len(),
            absorber.ell
        )));
    }
    if let Some(c) = c_prime.iter().find(|c| !absorber.c.contains(c)) {
        return Err(Error::AbsorptionFailed(format!("color {c} is not in C")));
    }
    let mut colors = absorber.a.clone();
    colors.extend_from_slice(c_prime);
    let mut sorted = colors.clone();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::AbsorptionFailed("top-up repeats a color".into()));
    }
    if colors.len() != absorber.target_arcs.len() {
        return Err(Error::AbsorptionFailed(format!(
            "{} colors for {} arcs",
            colors.len(),
            absorber.target_arcs.len()
        )));
    }
    let assignment = perfect_coloring(&absorber.availability, &colors)
        .ok_or_else(|| Error::AbsorptionFailed("no perfect matching for this top-up".into()))?;
    Ok(ColoredDigraph::new(
        absorber
            .target_arcs
            .iter()
            .zip(assignment)
            .map(|(&(tail, head), color)| ColoredArc { tail, head, color })
            .collect(),
    ))
}
