//! Exactly uniform sampling of elections at a fixed swap distance.
//!
//! Sampling runs in two steps. First the `r` swaps are distributed over the
//! votes, vote by vote, with probabilities given by ratios of the counting
//! tables. Then, for every vote, a permutation with the allotted number of
//! inversions is drawn uniformly (through its inversion table) and applied to
//! the vote. All categorical draws are done on exact big integers: a uniform
//! integer below the total weight is drawn and the cumulative weights walked.

use num_bigint::{BigUint, RandBigInt};
use rand::Rng;

use crate::election::{max_swaps, Election, Vote};
use crate::error::{Error, Result};
use crate::tables::{MahonianTable, SamplingTables};

/// Number of swaps assigned to each vote.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SwapAllocation {
    pub per_vote: Vec<u64>,
}

impl SwapAllocation {
    pub fn total(&self) -> u64 {
        self.per_vote.iter().sum()
    }
}

/// Lehmer-style code of a permutation of `0..m`.
///
/// `t[i]` is the number of elements larger than `i` placed before `i`, so
/// `0 <= t[i] <= m - 1 - i` and the permutation has `sum(t)` inversions.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct InversionTable {
    t: Vec<u64>,
}

impl InversionTable {
    pub fn new(t: Vec<u64>) -> Result<Self> {
        let m = t.len();
        for (i, &x) in t.iter().enumerate() {
            if x > (m - 1 - i) as u64 {
                return Err(Error::InvalidParameter(format!(
                    "inversion table entry t[{i}] = {x} exceeds {}",
                    m - 1 - i
                )));
            }
        }
        Ok(InversionTable { t })
    }

    pub fn zero(m: usize) -> Self {
        InversionTable { t: vec![0; m] }
    }

    /// The table of the reversal permutation.
    pub fn maximal(m: usize) -> Self {
        InversionTable {
            t: (0..m).map(|i| (m - 1 - i) as u64).collect(),
        }
    }

    pub fn entries(&self) -> &[u64] {
        &self.t
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn inversions(&self) -> u64 {
        self.t.iter().sum()
    }

    /// Decodes the permutation: inserting elements from largest to smallest,
    /// element `i` goes to index `t[i]` of the partial sequence.
    pub fn to_permutation(&self) -> Vec<usize> {
        let m = self.t.len();
        let mut perm = Vec::with_capacity(m);
        for i in (0..m).rev() {
            perm.insert(self.t[i] as usize, i);
        }
        perm
    }

    /// Inverse of [`to_permutation`](Self::to_permutation).
    pub fn from_permutation(perm: &[usize]) -> Result<Self> {
        Vote::new(perm.to_vec())?;
        let m = perm.len();
        let mut t = vec![0u64; m];
        for (j, &x) in perm.iter().enumerate() {
            t[x] = perm[..j].iter().filter(|&&y| y > x).count() as u64;
        }
        Ok(InversionTable { t })
    }
}

/// Picks an index with probability `weight(i) / total` by walking cumulative
/// weights against a uniform draw below `total`.
fn exact_categorical<R, I>(total: &BigUint, weights: I, rng: &mut R) -> usize
where
    R: Rng + ?Sized,
    I: IntoIterator<Item = (usize, BigUint)>,
{
    let mut u = rng.gen_biguint_below(total);
    for (i, w) in weights {
        if u < w {
            return i;
        }
        u -= w;
    }
    unreachable!("weights sum to less than the total");
}

/// Distributes `r` swaps over `n` votes of `m` candidates, each allocation
/// `a` drawn with probability `prod_i T_V[m][a_i] / T_E[n][r]`.
pub fn sample_allocation<R: Rng + ?Sized>(
    m: usize,
    n: usize,
    r: u64,
    tables: &SamplingTables,
    rng: &mut R,
) -> Result<SwapAllocation> {
    tables.covers(m, n)?;
    let u = max_swaps(m);
    let max = u * n as u64;
    if r > max {
        return Err(Error::RadiusOutOfRange { r, max });
    }
    let tv = &tables.mahonian;
    let te = &tables.elections;
    let mut left = r;
    let mut per_vote = Vec::with_capacity(n);
    for k in 0..n {
        let rest = n - k - 1;
        let lo = left.saturating_sub(u * rest as u64);
        let hi = left.min(u);
        let i = if lo == hi {
            lo
        } else {
            let weights = (lo..=hi).map(|i| (i as usize, tv.get(m, i) * te.get(rest, left - i)));
            exact_categorical(te.get(n - k, left), weights, rng) as u64
        };
        per_vote.push(i);
        left -= i;
    }
    debug_assert_eq!(left, 0);
    Ok(SwapAllocation { per_vote })
}

/// Draws a uniformly random inversion table of length `m` with `r`
/// inversions. Bin `i` (capacity `m - 1 - i`) receives `k` balls with
/// probability `T_V[m-1-i][rest-k] / T_V[m-i][rest]`.
pub fn sample_inversion_table<R: Rng + ?Sized>(
    m: usize,
    r: u64,
    mahonian: &MahonianTable,
    rng: &mut R,
) -> Result<InversionTable> {
    if m > mahonian.max_m() {
        return Err(Error::TableTooSmall {
            what: format!("m = {m}"),
        });
    }
    let max = max_swaps(m);
    if r > max {
        return Err(Error::RadiusOutOfRange { r, max });
    }
    let mut t = Vec::with_capacity(m);
    let mut left = r;
    for i in 0..m {
        let cap = (m - 1 - i) as u64;
        // Elements still to place after this bin: m - 1 - i.
        let after = m - 1 - i;
        let lo = left.saturating_sub(max_swaps(after));
        let hi = left.min(cap);
        let k = if lo == hi {
            lo
        } else {
            let weights = (lo..=hi).map(|k| (k as usize, mahonian.get(after, left - k).clone()));
            exact_categorical(mahonian.get(after + 1, left), weights, rng) as u64
        };
        t.push(k);
        left -= k;
    }
    debug_assert_eq!(left, 0);
    Ok(InversionTable { t })
}

/// Reorders `v` by the permutation encoded in `t`: position `j` of the result
/// holds the candidate that `v` ranks at position `perm[j]`.
///
/// The result is at swap distance exactly `t.inversions()` from `v`, and for
/// fixed `v` the map `t -> result` is a bijection onto those votes.
pub fn perturb_vote(v: &Vote, t: &InversionTable) -> Result<Vote> {
    if v.len() != t.len() {
        return Err(Error::ShapeMismatch(format!(
            "vote of length {} and inversion table of length {}",
            v.len(),
            t.len()
        )));
    }
    let ranking = v.ranking();
    let perm = t.to_permutation();
    Ok(Vote::from_ranking_unchecked(
        perm.iter().map(|&j| ranking[j]).collect(),
    ))
}

/// Draws an election uniformly from those at swap distance exactly `r`
/// from `e`.
pub fn sample_election_at_distance<R: Rng + ?Sized>(
    e: &Election,
    r: u64,
    tables: &SamplingTables,
    rng: &mut R,
) -> Result<Election> {
    let (m, n) = (e.m(), e.n());
    let alloc = sample_allocation(m, n, r, tables, rng)?;
    let votes = e
        .votes()
        .iter()
        .zip(&alloc.per_vote)
        .map(|(v, &k)| {
            let t = sample_inversion_table(m, k, &tables.mahonian, rng)?;
            perturb_vote(v, &t)
        })
        .collect::<Result<Vec<_>>>()?;
    e.with_votes(votes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::election::{election_swap_distance, swap_distance};
    use crate::rng::RandomSource;
    use proptest::prelude::*;
    use std::collections::HashMap;
    use rand::Rng;

    #[test]
    fn allocation_forced_cases() {
        let t = SamplingTables::new(2, 2);
        let mut rng = RandomSource::seeded(1);
        for _ in 0..20 {
            assert_eq!(sample_allocation(2, 2, 2, &t, &mut rng).unwrap().per_vote, vec![1, 1]);
            assert_eq!(sample_allocation(2, 2, 0, &t, &mut rng).unwrap().per_vote, vec![0, 0]);
        }
        assert!(matches!(
            sample_allocation(2, 2, 3, &t, &mut rng),
            Err(Error::RadiusOutOfRange { .. })
        ));
        assert!(sample_allocation(3, 2, 1, &t, &mut rng).is_err());
    }

    #[test]
    fn allocation_splits_evenly_for_symmetric_case() {
        let t = SamplingTables::new(3, 2);
        let mut rng = RandomSource::seeded(2);
        let draws = 10_000;
        let first = (0..draws)
            .filter(|_| sample_allocation(3, 2, 1, &t, &mut rng).unwrap().per_vote == vec![1, 0])
            .count();
        // sigma = 50 for p = 1/2.
        assert!((first as i64 - 5_000).abs() < 200, "{first}");
    }

    #[test]
    fn inversion_table_forced_cases() {
        let tv = MahonianTable::build(5);
        let mut rng = RandomSource::seeded(3);
        assert_eq!(sample_inversion_table(4, 0, &tv, &mut rng).unwrap(), InversionTable::zero(4));
        assert_eq!(sample_inversion_table(3, 3, &tv, &mut rng).unwrap(), InversionTable::maximal(3));
        assert!(sample_inversion_table(3, 4, &tv, &mut rng).is_err());
        assert!(sample_inversion_table(6, 1, &tv, &mut rng).is_err());
    }

    #[test]
    fn inversion_table_uniform_for_m3_r1() {
        let tv = MahonianTable::build(3);
        let mut rng = RandomSource::seeded(4);
        let mut counts: HashMap<Vec<u64>, usize> = HashMap::new();
        for _ in 0..10_000 {
            let t = sample_inversion_table(3, 1, &tv, &mut rng).unwrap();
            *counts.entry(t.entries().to_vec()).or_default() += 1;
        }
        assert_eq!(counts.len(), 2);
        for (_, c) in counts {
            // 3 sigma = 150.
            assert!((c as i64 - 5_000).abs() <= 150, "{c}");
        }
    }

    #[test]
    fn perturb_extremes_and_neighbors() {
        let v = Vote::new(vec![2, 0, 3, 1]).unwrap();
        assert_eq!(perturb_vote(&v, &InversionTable::zero(4)).unwrap(), v);
        assert_eq!(perturb_vote(&v, &InversionTable::maximal(4)).unwrap(), v.reversed());

        let v3 = Vote::new(vec![1, 2, 0]).unwrap();
        let mut got: Vec<Vote> = [vec![1, 0, 0], vec![0, 1, 0]]
            .into_iter()
            .map(|t| perturb_vote(&v3, &InversionTable::new(t).unwrap()).unwrap())
            .collect();
        got.sort();
        let mut want = vec![Vote::new(vec![2, 1, 0]).unwrap(), Vote::new(vec![1, 0, 2]).unwrap()];
        want.sort();
        assert_eq!(got, want);
    }

    #[test]
    fn rejects_bad_inversion_tables() {
        assert!(InversionTable::new(vec![3, 0, 0]).is_err());
        assert!(InversionTable::new(vec![0, 0, 1]).is_err());
        assert!(InversionTable::new(vec![2, 1, 0]).is_ok());
    }

    #[test]
    fn distance_zero_returns_input() {
        let e = Election::from_rankings(&[&[0, 1, 2], &[2, 1, 0]]);
        let t = SamplingTables::new(3, 2);
        let mut rng = RandomSource::seeded(5);
        assert_eq!(sample_election_at_distance(&e, 0, &t, &mut rng).unwrap(), e);
    }

    #[test]
    fn exact_distance_m4_n3() {
        let e = Election::from_rankings(&[&[0, 1, 2, 3], &[3, 1, 0, 2], &[1, 3, 2, 0]]);
        let t = SamplingTables::new(4, 3);
        let mut rng = RandomSource::seeded(6);
        for _ in 0..500 {
            let r = rng.gen_range(0..=18);
            let s = sample_election_at_distance(&e, r, &t, &mut rng).unwrap();
            assert_eq!(election_swap_distance(&e, &s).unwrap(), r);
        }
    }

    #[test]
    fn fixed_seed_reproduces_stream() {
        let e = Election::from_rankings(&[&[0, 1, 2, 3, 4], &[4, 3, 2, 1, 0]]);
        let t = SamplingTables::new(5, 2);
        let run = |seed| {
            let mut rng = RandomSource::seeded(seed);
            (0..50)
                .map(|i| sample_election_at_distance(&e, i % 21, &t, &mut rng).unwrap())
                .collect::<Vec<_>>()
        };
        assert_eq!(run(9), run(9));
        assert_ne!(run(9), run(10));
    }

    proptest! {
        #[test]
        fn table_permutation_bijection(perm in (1usize..=7).prop_flat_map(|m| Just((0..m).collect::<Vec<_>>()).prop_shuffle())) {
            let t = InversionTable::from_permutation(&perm).unwrap();
            prop_assert!(InversionTable::new(t.entries().to_vec()).is_ok());
            prop_assert_eq!(t.to_permutation(), perm.clone());
            let id = Vote::identity(perm.len());
            let moved = perturb_vote(&id, &t).unwrap();
            prop_assert_eq!(swap_distance(&id, &moved).unwrap(), t.inversions());
        }
    }
}
