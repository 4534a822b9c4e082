//! Raw enumeration of labeled tournaments and collections, and a canonical
//! form under vertex relabeling and color permutation.

use itertools::Itertools;

use crate::collection::TournamentCollection;
use crate::error::{Error, Result};
use crate::tournament::{pair_count, Tournament};

/// Largest `n` for which a tournament code fits in one `u64`.
pub const MAX_CODE_N: usize = 11;

/// Largest `n` accepted by [`canonical_form`].
pub const MAX_CANONICAL_N: usize = 8;

/// Number of labeled tournaments on `n` vertices, if it fits in a `u64`.
pub fn tournament_count(n: usize) -> Option<u64> {
    1u64.checked_shl(pair_count(n) as u32).filter(|_| pair_count(n) < 64)
}

/// Number of collections of `m` labeled tournaments on `n` vertices.
pub fn collection_count(n: usize, m: usize) -> Option<u64> {
    let bits = pair_count(n).checked_mul(m)?;
    (bits < 64).then(|| 1u64 << bits)
}

/// The tournament whose orientation bits (in pair order) are `code`.
pub fn tournament_from_code(n: usize, code: u64) -> Result<Tournament> {
    if n > MAX_CODE_N {
        return Err(Error::invalid(format!("tournament codes need n <= {MAX_CODE_N}")));
    }
    if pair_count(n) == 0 {
        return Ok(Tournament::from_fn(n, |_, _| true));
    }
    Tournament::from_words(n, vec![code])
}

/// Orientation bits of `t` in pair order.
pub fn tournament_code(t: &Tournament) -> u64 {
    t.words().first().copied().unwrap_or(0)
}

/// Collection number `index` in base `2^(n choose 2)`: digit `c` is the code of
/// tournament `c`.
pub fn collection_from_index(n: usize, m: usize, index: u64) -> Result<TournamentCollection> {
    let p = pair_count(n);
    if collection_count(n, m).is_none_or(|total| index >= total) {
        return Err(Error::invalid(format!("collection index {index} out of range for n = {n}, m = {m}")));
    }
    let mask = if p == 0 { 0 } else { u64::MAX >> (64 - p) };
    let ts = (0..m)
        .map(|c| tournament_from_code(n, (index >> (c * p)) & mask))
        .collect::<Result<Vec<_>>>()?;
    TournamentCollection::new(n, ts)
}

/// Lexicographically least sorted code list over all vertex relabelings.
/// Two collections get the same form iff they agree up to renaming vertices
/// and reordering colors.
pub fn canonical_form(t: &TournamentCollection) -> Result<Vec<u64>> {
    let n = t.n();
    if n > MAX_CANONICAL_N {
        return Err(Error::invalid(format!("canonical forms need n <= {MAX_CANONICAL_N}")));
    }
    let mut best: Option<Vec<u64>> = None;
    for perm in (0..n).permutations(n) {
        let mut codes: Vec<u64> = t
            .tournaments()
            .iter()
            .map(|tt| tournament_code(&Tournament::from_fn(n, |a, b| tt.has_arc(perm[a], perm[b]))))
            .collect();
        codes.sort_unstable();
        if best.as_ref().is_none_or(|b| codes < *b) {
            best = Some(codes);
        }
    }
    Ok(best.unwrap_or_default())
}
