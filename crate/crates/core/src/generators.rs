//! Named instances and seeded random families.
//!
//! Randomness comes from ChaCha8 seeded with the 64-bit seed; tournament `c`
//! of a collection draws from stream `c`, so every tournament is independent of
//! how many others are generated and output is identical on every platform.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::collection::TournamentCollection;
use crate::error::{Error, Result};
use crate::tournament::{pair_count, Tournament};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    Transitive,
    RandomUniform,
    RandomStronglyConnected,
    DirectedCycleTournament,
    Prop14Collection,
    Fig1PathCounterexample,
    Fig1CycleCounterexample,
}

impl GeneratorKind {
    pub const ALL: [GeneratorKind; 7] = [
        GeneratorKind::Transitive,
        GeneratorKind::RandomUniform,
        GeneratorKind::RandomStronglyConnected,
        GeneratorKind::DirectedCycleTournament,
        GeneratorKind::Prop14Collection,
        GeneratorKind::Fig1PathCounterexample,
        GeneratorKind::Fig1CycleCounterexample,
    ];
}

/// Everything needed to reproduce an instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub kind: GeneratorKind,
    pub n: usize,
    pub m: usize,
    pub seed: u64,
}

impl GeneratorSpec {
    /// Builds the collection. Kinds with a fixed shape ignore `n`/`m`
    /// (`prop14_collection` uses `m = n`, the two counterexamples are `n = 3`).
    pub fn generate(&self) -> Result<TournamentCollection> {
        let GeneratorSpec { kind, n, m, seed } = *self;
        if n == 0 && !matches!(kind, GeneratorKind::Fig1PathCounterexample | GeneratorKind::Fig1CycleCounterexample) {
            return Err(Error::invalid("n must be at least 1"));
        }
        match kind {
            GeneratorKind::Transitive => Ok(TournamentCollection::repeated(&transitive_tournament(n), m)),
            GeneratorKind::RandomUniform => random_collection(n, m, seed, false),
            GeneratorKind::RandomStronglyConnected => random_collection(n, m, seed, true),
            GeneratorKind::DirectedCycleTournament => {
                Ok(TournamentCollection::repeated(&directed_cycle_tournament(n), m))
            }
            GeneratorKind::Prop14Collection => prop14_collection(n),
            GeneratorKind::Fig1PathCounterexample => Ok(fig1_counterexamples().0),
            GeneratorKind::Fig1CycleCounterexample => Ok(fig1_counterexamples().1),
        }
    }
}

/// Arc `i -> j` iff `i < j`.
pub fn transitive_tournament(n: usize) -> Tournament {
    Tournament::from_fn(n, |_, _| true)
}

/// The strongly connected tournament with backward arcs `(i+1) -> i` and
/// forward arcs `i -> j` for `j >= i + 2`.
pub fn prop14_tprime(n: usize) -> Result<Tournament> {
    if n < 3 {
        return Err(Error::invalid(format!("prop14_tprime needs n >= 3, got {n}")));
    }
    Ok(Tournament::from_fn(n, |i, j| j >= i + 2))
}

/// Two transitive tournaments followed by `n - 2` copies of [`prop14_tprime`].
/// Has no transversal Hamilton cycle.
pub fn prop14_collection(n: usize) -> Result<TournamentCollection> {
    let tprime = prop14_tprime(n)?;
    let t = transitive_tournament(n);
    let mut ts = vec![t.clone(), t];
    ts.extend(std::iter::repeat_n(tprime, n - 2));
    TournamentCollection::new(n, ts)
}

/// The directed triangle `0 -> 1 -> 2 -> 0`.
pub fn directed_triangle() -> Tournament {
    Tournament::from_fn(3, |i, j| !(i == 0 && j == 2))
}

/// `(path_instance, cycle_instance)`: two opposite directed triangles, which
/// have no transversal Hamilton path, and two equal triangles plus one
/// opposite, which have no transversal Hamilton cycle.
pub fn fig1_counterexamples() -> (TournamentCollection, TournamentCollection) {
    let tri = directed_triangle();
    let rev = tri.reversed();
    let path = TournamentCollection::new(3, vec![tri.clone(), rev.clone()]).expect("n = 3");
    let cycle = TournamentCollection::new(3, vec![tri.clone(), tri, rev]).expect("n = 3");
    (path, cycle)
}

/// The rotational tournament: `i -> j` iff `(j - i) mod n` lies in
/// `1..=(n-1)/2`. For even `n` the antipodal pairs go from the lower half up.
/// Regular for odd `n`.
pub fn directed_cycle_tournament(n: usize) -> Tournament {
    Tournament::from_fn(n, |i, j| {
        let d = j - i;
        if 2 * d == n {
            true
        } else {
            2 * d < n
        }
    })
}

/// ChaCha8 seeded with `seed`, on stream `stream`.
pub fn seeded_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// SplitMix64 of `seed ^ salt`: independent-looking seeds for sub-tasks.
pub fn derive_seed(seed: u64, salt: u64) -> u64 {
    let mut z = (seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15)).wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn fill_random(n: usize, rng: &mut ChaCha8Rng) -> Tournament {
    let words = (0..pair_count(n).div_ceil(64)).map(|_| rng.next_u64()).collect();
    Tournament::from_words(n, words).expect("word count matches n")
}

/// Every pair oriented by an independent fair coin.
pub fn random_tournament(n: usize, seed: u64) -> Tournament {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    fill_random(n, &mut rng)
}

/// A random strongly connected tournament, by rejection sampling.
pub fn random_strong_tournament(n: usize, seed: u64) -> Result<Tournament> {
    if n < 3 {
        return Err(Error::invalid(format!("no strongly connected tournament on {n} vertices")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(strong_from(n, &mut rng))
}

fn strong_from(n: usize, rng: &mut ChaCha8Rng) -> Tournament {
    loop {
        let t = fill_random(n, rng);
        if t.is_strongly_connected() {
            return t;
        }
    }
}

/// `m` independent uniform tournaments (tournament `c` uses stream `c`).
pub fn random_collection(n: usize, m: usize, seed: u64, strongly_connected: bool) -> Result<TournamentCollection> {
    if strongly_connected && n < 3 {
        return Err(Error::invalid(format!("no strongly connected tournament on {n} vertices")));
    }
    let ts = (0..m)
        .map(|c| {
            let mut rng = seeded_rng(seed, c as u64);
            if strongly_connected {
                strong_from(n, &mut rng)
            } else {
                fill_random(n, &mut rng)
            }
        })
        .collect();
    TournamentCollection::new(n, ts)
}

/// Like [`random_collection`] with strong connectivity required for every
/// tournament except the last `free` ones.
pub fn random_collection_mostly_strong(n: usize, m: usize, free: usize, seed: u64) -> Result<TournamentCollection> {
    if n < 3 {
        return Err(Error::invalid(format!("no strongly connected tournament on {n} vertices")));
    }
    let ts = (0..m)
        .map(|c| {
            let mut rng = seeded_rng(seed, c as u64);
            if c + free >= m {
                fill_random(n, &mut rng)
            } else {
                strong_from(n, &mut rng)
            }
        })
        .collect();
    TournamentCollection::new(n, ts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Ratio;

    #[test]
    fn transitive_examples() {
        let t = transitive_tournament(2);
        assert!(t.has_arc(0, 1));
        let t = transitive_tournament(3);
        assert!(t.has_arc(0, 1) && t.has_arc(0, 2) && t.has_arc(1, 2));
        let t = transitive_tournament(5);
        assert_eq!((t.out_degree(0), t.in_degree(0)), (4, 0));
    }

    #[test]
    fn tprime_examples() {
        let t = prop14_tprime(3).unwrap();
        assert!(t.has_arc(0, 2) && t.has_arc(1, 0) && t.has_arc(2, 1));
        let t = prop14_tprime(4).unwrap();
        for (u, v) in [(1, 0), (2, 1), (3, 2), (0, 2), (0, 3), (1, 3)] {
            assert!(t.has_arc(u, v), "{u} -> {v}");
        }
        for n in 3..40 {
            assert!(prop14_tprime(n).unwrap().is_strongly_connected());
        }
        assert!(prop14_tprime(2).is_err());
    }

    #[test]
    fn prop14_collection_shape() {
        let c = prop14_collection(3).unwrap();
        assert_eq!(c.m(), 3);
        assert_eq!(c.tournament(0), &transitive_tournament(3));
        assert_eq!(c.tournament(1), &transitive_tournament(3));
        assert_eq!(c.tournament(2), &prop14_tprime(3).unwrap());
        for n in 3..12 {
            let c = prop14_collection(n).unwrap();
            assert_eq!(c.m(), n);
            for i in 0..n - 1 {
                let colors = c.color_set_of_arc(i + 1, i).unwrap();
                assert_eq!(colors.ones().collect::<Vec<_>>(), (2..n).collect::<Vec<_>>());
            }
        }
        assert!(prop14_collection(2).is_err());
    }

    #[test]
    fn fig1_instances() {
        let (p, c) = fig1_counterexamples();
        assert_eq!((p.n(), p.m(), c.n(), c.m()), (3, 2, 3, 3));
        for t in p.tournaments().iter().chain(c.tournaments()) {
            assert!(t.is_strongly_connected());
        }
        assert_eq!(p.tournament(1), &p.tournament(0).reversed());
        assert_eq!(c.tournament(0), c.tournament(1));
    }

    #[test]
    fn rotational_tournament() {
        for n in [3, 5, 7, 9] {
            let t = directed_cycle_tournament(n);
            assert!(t.scores().iter().all(|&s| s == (n - 1) / 2));
        }
        for n in 3..12 {
            assert!(directed_cycle_tournament(n).is_strongly_connected());
        }
    }

    #[test]
    fn random_is_deterministic() {
        let a = random_collection(9, 4, 42, false).unwrap();
        let b = random_collection(9, 4, 42, false).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        assert_ne!(a, random_collection(9, 4, 43, false).unwrap());
        // prefix stability: tournament c does not depend on m
        let c = random_collection(9, 6, 42, false).unwrap();
        assert_eq!(&c.tournaments()[..4], a.tournaments());
    }

    #[test]
    fn random_strong_triangles() {
        let tri = directed_triangle();
        for seed in 0..20 {
            let c = random_collection(3, 3, seed, true).unwrap();
            for t in c.tournaments() {
                assert!(t == &tri || t == &tri.reversed());
            }
        }
        assert!(random_collection(2, 2, 0, true).is_err());
    }

    #[test]
    fn majority_agrees_with_counts() {
        let c = random_collection(50, 50, 5, false).unwrap();
        let d = c.threshold_digraph(None, Ratio::new(1, 2)).unwrap();
        for u in 0..50 {
            for v in 0..50 {
                if u != v {
                    let count = (0..50).filter(|&i| c.has_arc(i, u, v)).count();
                    assert_eq!(d.has_arc(u, v), count >= 25);
                }
            }
        }
    }

    #[test]
    fn generator_spec_round_trip() {
        for kind in GeneratorKind::ALL {
            let spec = GeneratorSpec { kind, n: 6, m: 5, seed: 9 };
            let a = spec.generate().unwrap();
            assert_eq!(a.to_json(), spec.generate().unwrap().to_json());
        }
    }
}
