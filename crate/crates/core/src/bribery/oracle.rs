//! Brute-force counters for tiny instances.
//!
//! These enumerate the solution space directly and share nothing with the
//! fast counters beyond the election type and scoring, so they serve as
//! reference answers in tests and in `selftest`.

use num_bigint::BigUint;
use num_traits::Zero;

use super::{CostFunction, Guards, ShiftMode};
use crate::election::{max_swaps, swap_distance, CandidateId, Election, Rule, Vote};
use crate::error::{Error, Result};

/// Largest candidate count for which all `m!` rankings are listed.
const MAX_ORACLE_CANDIDATES: usize = 8;

fn all_rankings(m: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for c in 0..used.len() {
            if !used[c] {
                used[c] = true;
                prefix.push(c);
                rec(prefix, used, out);
                prefix.pop();
                used[c] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(m), &mut vec![false; m], &mut out);
    out
}

fn guard(value: u128, limit: u128) -> Result<()> {
    if value > limit {
        return Err(Error::GuardExceeded {
            guard: "oracle_states",
            value,
            limit,
            hint: Some("the oracle is meant for tiny instances".into()),
        });
    }
    Ok(())
}

fn p_wins(votes: &[Vote], names: &[String], p: CandidateId, rule: Rule) -> bool {
    let e = Election::new(names.to_vec(), votes.to_vec()).expect("rankings are permutations");
    e.is_winner(rule, p)
}

/// Counts elections at swap distance exactly `r` from `e` where `p` wins
/// under `rule`, by listing every such election.
pub fn brute_force_count_swap(
    e: &Election,
    p: CandidateId,
    r: u64,
    rule: Rule,
    guards: &Guards,
) -> Result<BigUint> {
    e.check_candidate(p)?;
    let (m, n) = (e.m(), e.n());
    guard(m as u128, MAX_ORACLE_CANDIDATES as u128)?;
    if r > max_swaps(m) * n as u64 {
        return Ok(BigUint::zero());
    }
    // Upper bound on the leaves visited: (m!)^n, capped once over the limit.
    let fact: u128 = (1..=m as u128).product();
    let mut leaves: u128 = 1;
    for _ in 0..n {
        leaves = leaves.saturating_mul(fact);
    }
    guard(leaves, guards.oracle_states)?;

    let rankings = all_rankings(m);
    // by_distance[v][d]: rankings at distance d from vote v.
    let by_distance: Vec<Vec<Vec<Vote>>> = e
        .votes()
        .iter()
        .map(|v| {
            let mut buckets = vec![Vec::new(); max_swaps(m) as usize + 1];
            for ranking in &rankings {
                let u = Vote::new(ranking.clone()).expect("listed rankings are valid");
                let d = swap_distance(v, &u).expect("same length") as usize;
                buckets[d].push(u);
            }
            buckets
        })
        .collect();

    fn dfs(
        i: usize,
        left: u64,
        by_distance: &[Vec<Vec<Vote>>],
        current: &mut Vec<Vote>,
        names: &[String],
        p: CandidateId,
        rule: Rule,
        count: &mut u64,
    ) {
        if i == by_distance.len() {
            if left == 0 && p_wins(current, names, p, rule) {
                *count += 1;
            }
            return;
        }
        for (d, bucket) in by_distance[i].iter().enumerate() {
            if d as u64 > left {
                break;
            }
            for u in bucket {
                current.push(u.clone());
                dfs(i + 1, left - d as u64, by_distance, current, names, p, rule, count);
                current.pop();
            }
        }
    }

    let mut count = 0u64;
    dfs(0, r, &by_distance, &mut Vec::with_capacity(n), e.names(), p, rule, &mut count);
    Ok(BigUint::from(count))
}

/// Counts shift vectors of total cost exactly `r` achieving the goal of
/// `mode`, by listing every vector of shift amounts.
pub fn brute_force_count_shift(
    e: &Election,
    p: CandidateId,
    r: u64,
    costs: &CostFunction,
    mode: ShiftMode,
    rule: Rule,
    guards: &Guards,
) -> Result<BigUint> {
    e.check_candidate(p)?;
    costs.check_covers(e)?;
    let m = e.m();
    // Per voter: (new vote, cost) for every admissible shift amount.
    let choices: Vec<Vec<(Vote, u64)>> = e
        .votes()
        .iter()
        .enumerate()
        .map(|(v, vote)| {
            let pos = vote.position(p);
            let reach = match mode {
                ShiftMode::Constructive => pos,
                ShiftMode::Destructive => m - 1 - pos,
            };
            (0..=reach)
                .map(|l| {
                    let to = match mode {
                        ShiftMode::Constructive => pos - l,
                        ShiftMode::Destructive => pos + l,
                    };
                    let c = costs.cost(v, l).expect("costs checked against election");
                    (vote.moved(pos, to), c)
                })
                .collect()
        })
        .collect();
    let leaves = choices
        .iter()
        .fold(1u128, |acc, c| acc.saturating_mul(c.len() as u128));
    guard(leaves, guards.oracle_states)?;

    fn dfs(
        i: usize,
        spent: u64,
        r: u64,
        choices: &[Vec<(Vote, u64)>],
        current: &mut Vec<Vote>,
        goal: &dyn Fn(&[Vote]) -> bool,
        count: &mut u64,
    ) {
        if i == choices.len() {
            if spent == r && goal(current) {
                *count += 1;
            }
            return;
        }
        for (u, c) in &choices[i] {
            if spent + c > r {
                continue;
            }
            current.push(u.clone());
            dfs(i + 1, spent + c, r, choices, current, goal, count);
            current.pop();
        }
    }

    let names = e.names();
    let goal = |votes: &[Vote]| {
        let wins = p_wins(votes, names, p, rule);
        match mode {
            ShiftMode::Constructive => wins,
            ShiftMode::Destructive => !wins,
        }
    };
    let mut count = 0u64;
    dfs(0, 0, r, &choices, &mut Vec::with_capacity(e.n()), &goal, &mut count);
    Ok(BigUint::from(count))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rankings_are_all_permutations() {
        for m in 0..=5 {
            let all = all_rankings(m);
            let fact: usize = (1..=m).product();
            assert_eq!(all.len(), fact);
            let set: std::collections::HashSet<_> = all.iter().collect();
            assert_eq!(set.len(), fact);
        }
    }

    #[test]
    fn swap_oracle_small_cases() {
        let g = Guards::default();
        let e = Election::from_rankings(&[&[0, 1, 2], &[0, 1, 2]]);
        let a = CandidateId(0);
        assert_eq!(brute_force_count_swap(&e, a, 1, Rule::Plurality, &g).unwrap(), 4u32.into());
        // Summed over all radii, every election is counted once per winner
        // set that includes a; with no restriction the total is (3!)^2.
        let total: BigUint = (0..=6)
            .map(|r| {
                let mut s = BigUint::zero();
                for c in 0..3 {
                    s += brute_force_count_swap(&e, CandidateId(c), r, Rule::Borda, &g).unwrap();
                }
                s
            })
            .sum();
        assert!(total >= BigUint::from(36u32));
    }

    #[test]
    fn shift_oracle_small_cases() {
        let g = Guards::default();
        let e = Election::from_rankings(&[&[1, 0, 2]]);
        let p = CandidateId(0);
        let unit = CostFunction::Unit;
        let n = |mode, rule, r| brute_force_count_shift(&e, p, r, &unit, mode, rule, &g).unwrap();
        assert_eq!(n(ShiftMode::Constructive, Rule::Plurality, 0), 0u32.into());
        assert_eq!(n(ShiftMode::Constructive, Rule::Plurality, 1), 1u32.into());
        assert_eq!(n(ShiftMode::Constructive, Rule::Plurality, 2), 0u32.into());
        assert_eq!(n(ShiftMode::Destructive, Rule::Borda, 0), 1u32.into());
        assert_eq!(n(ShiftMode::Destructive, Rule::Borda, 1), 1u32.into());
    }

    #[test]
    fn guards_trip() {
        let g = Guards { oracle_states: 100, ..Guards::default() };
        let e = Election::from_rankings(&[&[0, 1, 2, 3], &[0, 1, 2, 3]]);
        assert!(matches!(
            brute_force_count_swap(&e, CandidateId(0), 1, Rule::Plurality, &g),
            Err(Error::GuardExceeded { guard: "oracle_states", .. })
        ));
    }
}
