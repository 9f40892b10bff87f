//! Plurality `#Swap-Bribery` with unit prices, exponential only in the number
//! of voters.
//!
//! Every election at distance `r` in which `p` wins splits the voters by
//! their new top choice. The counter enumerates these splits: a set partition
//! of the voters, one block of maximum size designated as `p`'s block, and
//! the remaining blocks matched to distinct other candidates. The matching is
//! counted by a dynamic program over the candidates in index order, where
//! each candidate either takes one not-yet-matched block or none; within a
//! block every voter must rank the block's candidate first, which is the
//! per-group contribution [`vgc_swap_profile`].

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::{convolve, Guards};
use crate::election::{max_swaps, CandidateId, Election, Vote};
use crate::error::{Error, Result};
use crate::tables::MahonianTable;

/// Ways to reach swap count `s` in one vote while putting `p` on top, for
/// `s = 0..=max_r`: `Y(m-1, s - depth)` where `depth` is `p`'s position.
fn vote_profile(v: &Vote, p: CandidateId, max_r: usize, mahonian: &MahonianTable) -> Vec<BigUint> {
    let m = v.len();
    let depth = v.position(p);
    (0..=max_r)
        .map(|s| {
            if s < depth {
                BigUint::zero()
            } else {
                mahonian.get(m - 1, (s - depth) as u64).clone()
            }
        })
        .collect()
}

/// `vgc(V, s, p)` for every `s` in `0..=max_r`: the number of ways to make
/// exactly `s` swaps inside `group` so that every vote ranks `p` first.
pub fn vgc_swap_profile(
    group: &[Vote],
    p: CandidateId,
    max_r: usize,
    mahonian: &MahonianTable,
) -> Vec<BigUint> {
    let mut acc = vec![BigUint::zero(); max_r + 1];
    acc[0] = BigUint::one();
    for v in group {
        acc = convolve(&acc, &vote_profile(v, p, max_r, mahonian), max_r);
    }
    acc
}

/// Number of ways to make exactly `r` swaps in `group` so that every vote
/// ranks `p` first.
pub fn vgc_swap_plurality(
    group: &[Vote],
    r: u64,
    p: CandidateId,
    mahonian: &MahonianTable,
) -> BigUint {
    let Some(m) = group.first().map(Vote::len) else {
        return if r == 0 { BigUint::one() } else { BigUint::zero() };
    };
    if r > max_swaps(m) * group.len() as u64 {
        return BigUint::zero();
    }
    let r = r as usize;
    vgc_swap_profile(group, p, r, mahonian).swap_remove(r)
}

/// Calls `f` with the blocks (as voter bitmasks) of every set partition of
/// `n` voters, in lexicographic order of restricted growth strings.
fn for_each_partition(n: usize, mut f: impl FnMut(&[u32])) {
    fn rec(i: usize, n: usize, blocks: &mut Vec<u32>, f: &mut impl FnMut(&[u32])) {
        if i == n {
            f(blocks);
            return;
        }
        for b in 0..blocks.len() {
            blocks[b] |= 1 << i;
            rec(i + 1, n, blocks, f);
            blocks[b] &= !(1 << i);
        }
        blocks.push(1 << i);
        rec(i + 1, n, blocks, f);
        blocks.pop();
    }
    let mut blocks = Vec::with_capacity(n);
    rec(0, n, &mut blocks, &mut f);
}

struct GroupProfiles<'a> {
    votes: &'a [Vote],
    mahonian: &'a MahonianTable,
    max_r: usize,
    cache: HashMap<(u32, usize), Vec<BigUint>>,
}

impl GroupProfiles<'_> {
    fn get(&mut self, mask: u32, c: usize) -> &[BigUint] {
        let (votes, mahonian, max_r) = (self.votes, self.mahonian, self.max_r);
        self.cache.entry((mask, c)).or_insert_with(|| {
            let group: Vec<Vote> = (0..votes.len())
                .filter(|&i| mask >> i & 1 == 1)
                .map(|i| votes[i].clone())
                .collect();
            vgc_swap_profile(&group, CandidateId(c), max_r, mahonian)
        })
    }
}

/// Counts the elections at swap distance exactly `r` from `e` in which `p` is
/// a Plurality winner.
pub fn count_plurality_swap_bribery(
    e: &Election,
    p: CandidateId,
    r: u64,
    guards: &Guards,
) -> Result<BigUint> {
    e.check_candidate(p)?;
    let (m, n) = (e.m(), e.n());
    if n > guards.max_voters || n > 31 {
        return Err(Error::GuardExceeded {
            guard: "max_voters",
            value: n as u128,
            limit: guards.max_voters.min(31) as u128,
            hint: Some("use the brute-force oracle or sampling".into()),
        });
    }
    if r > max_swaps(m) * n as u64 {
        return Ok(BigUint::zero());
    }
    let max_r = r as usize;
    let mahonian = MahonianTable::build(m);
    let mut profiles = GroupProfiles {
        votes: e.votes(),
        mahonian: &mahonian,
        max_r,
        cache: HashMap::new(),
    };
    let others: Vec<usize> = (0..m).filter(|&c| c != p.0).collect();

    let mut total = BigUint::zero();
    for_each_partition(n, |blocks| {
        let k = blocks.len();
        if k > m {
            return;
        }
        let biggest = blocks.iter().map(|b| b.count_ones()).max().unwrap_or(0);
        for (pi, &p_block) in blocks.iter().enumerate() {
            if p_block.count_ones() != biggest {
                continue;
            }
            let rest: Vec<u32> = blocks
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != pi)
                .map(|(_, &b)| b)
                .collect();
            let full = (1usize << rest.len()) - 1;
            // dp[mask][s]: blocks in `mask` matched to distinct candidates
            // processed so far, using s swaps in total.
            let mut dp = vec![vec![BigUint::zero(); max_r + 1]; full + 1];
            dp[0][0] = BigUint::one();
            for &c in &others {
                let mut next = dp.clone();
                for mask in 0..=full {
                    if dp[mask].iter().all(Zero::is_zero) {
                        continue;
                    }
                    for (j, &block) in rest.iter().enumerate() {
                        if mask >> j & 1 == 1 {
                            continue;
                        }
                        let contrib = convolve(&dp[mask], profiles.get(block, c), max_r);
                        for (dst, x) in next[mask | 1 << j].iter_mut().zip(contrib) {
                            *dst += x;
                        }
                    }
                }
                dp = next;
            }
            let p_prof = profiles.get(p_block, p.0).to_vec();
            for (t, x) in p_prof.iter().enumerate() {
                if !x.is_zero() {
                    total += x * &dp[full][max_r - t];
                }
            }
        }
    });
    Ok(total)
}
