//! Plurality `#Shift-Bribery` with unary-encoded costs, both directions.
//!
//! Shifting `p` only ever changes a voter's top choice between `p` and one
//! other candidate, so voters are grouped by that other candidate and a
//! dynamic program over groups is run once per guessed final score of `p`.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::CostFunction;
use crate::election::{CandidateId, Election, Rule};
use crate::error::{Error, Result};

/// `table[s][c]`: ways to spend total cost `c` in a group with `p` ending on
/// top in exactly `s` of its votes.
type GroupTable = Vec<Vec<BigUint>>;

/// One voter's possible spends: `(cost, p_on_top_afterwards)`, one entry per
/// shift amount.
type Spends = Vec<(u64, bool)>;

fn forward_spends(e: &Election, v: usize, p: CandidateId, costs: &CostFunction) -> Spends {
    let pos = e.votes()[v].position(p);
    costs
        .options(v, pos)
        .into_iter()
        .map(|(l, c)| (c, l == pos))
        .collect()
}

fn backward_spends(e: &Election, v: usize, p: CandidateId, costs: &CostFunction) -> Spends {
    let m = e.m();
    let pos = e.votes()[v].position(p);
    costs
        .options(v, m - 1 - pos)
        .into_iter()
        .map(|(l, c)| (c, pos == 0 && l == 0))
        .collect()
}

/// Runs the per-group table over `group`, each voter contributing its spends.
fn group_table(spends: &[Spends], max_r: u64) -> GroupTable {
    let max_r = max_r as usize;
    let mut table = vec![vec![BigUint::zero(); max_r + 1]];
    table[0][0] = BigUint::one();
    for voter in spends {
        let mut next = vec![vec![BigUint::zero(); max_r + 1]; table.len() + 1];
        for (s, row) in table.iter().enumerate() {
            for (c, x) in row.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                for &(cost, top) in voter {
                    let c2 = c + cost as usize;
                    if c2 <= max_r {
                        next[s + usize::from(top)][c2] += x;
                    }
                }
            }
        }
        table = next;
    }
    table
}

fn lookup(table: &GroupTable, s: u64, r: u64) -> BigUint {
    table
        .get(s as usize)
        .and_then(|row| row.get(r as usize))
        .cloned()
        .unwrap_or_default()
}

/// Ways to shift `p` forward within `group` (voter indices of `e`) at total
/// cost exactly `r` so that `p` ends on top in exactly `s` of those votes.
pub fn vgc_shift_plus(
    e: &Election,
    group: &[usize],
    r: u64,
    p: CandidateId,
    s: u64,
    costs: &CostFunction,
) -> Result<BigUint> {
    e.check_candidate(p)?;
    costs.check_covers(e)?;
    let spends: Vec<Spends> = group.iter().map(|&v| forward_spends(e, v, p, costs)).collect();
    Ok(lookup(&group_table(&spends, r), s, r))
}

/// The candidate a voter supports whenever it does not support `p`: its top
/// choice, or its second choice when `p` is on top.
fn non_p_choice(e: &Election, v: usize, p: CandidateId) -> Option<usize> {
    let ranking = e.votes()[v].ranking();
    if ranking[0] == p.0 {
        ranking.get(1).copied()
    } else {
        Some(ranking[0])
    }
}

/// Ways to shift `p` backward within `group` at total cost exactly `r` so
/// that `p` stays on top in exactly `s` of those votes.
///
/// Every voter of the group must either rank `p` first and some `d` second,
/// or rank that same `d` first.
pub fn vgc_shift_minus(
    e: &Election,
    group: &[usize],
    r: u64,
    p: CandidateId,
    s: u64,
    costs: &CostFunction,
) -> Result<BigUint> {
    e.check_candidate(p)?;
    costs.check_covers(e)?;
    let mut d = None;
    for &v in group {
        let choice = non_p_choice(e, v, p)
            .ok_or_else(|| Error::Precondition("a single-candidate vote has no non-p choice".into()))?;
        if *d.get_or_insert(choice) != choice {
            return Err(Error::Precondition(format!(
                "voters in the group disagree on the non-p choice ({} vs {choice})",
                d.unwrap()
            )));
        }
    }
    let spends: Vec<Spends> = group.iter().map(|&v| backward_spends(e, v, p, costs)).collect();
    Ok(lookup(&group_table(&spends, r), s, r))
}

/// Counts forward-shift vectors of total cost exactly `r` after which `p` is
/// a Plurality winner.
pub fn count_plurality_shift_constructive(
    e: &Election,
    p: CandidateId,
    r: u64,
    costs: &CostFunction,
) -> Result<BigUint> {
    e.check_candidate(p)?;
    costs.check_covers(e)?;
    let base = e.score(Rule::Plurality, p);

    // Voters already topping p can only spend 0; group the rest by top choice.
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (v, vote) in e.votes().iter().enumerate() {
        if vote.top() != p {
            groups.entry(vote.top().0).or_default().push(v);
        }
    }
    let tables: Vec<(u64, GroupTable)> = groups
        .values()
        .map(|g| {
            let spends: Vec<Spends> = g.iter().map(|&v| forward_spends(e, v, p, costs)).collect();
            (g.len() as u64, group_table(&spends, r))
        })
        .collect();
    let movable: u64 = tables.iter().map(|(size, _)| size).sum();
    let width = r as usize + 1;

    let mut total = BigUint::zero();
    for target in base..=base + movable {
        // t[gain][cost] over the groups seen so far; no group's candidate
        // may end above `target`.
        let mut t = vec![vec![BigUint::zero(); width]];
        t[0][0] = BigUint::one();
        for (size, g) in &tables {
            let min_gain = size.saturating_sub(target) as usize;
            let mut next = vec![vec![BigUint::zero(); width]; t.len() + *size as usize];
            for (gain, row) in t.iter().enumerate() {
                for (c, x) in row.iter().enumerate() {
                    if x.is_zero() {
                        continue;
                    }
                    for (gg, grow) in g.iter().enumerate().skip(min_gain) {
                        for (cc, y) in grow.iter().enumerate().take(width - c) {
                            if !y.is_zero() {
                                next[gain + gg][c + cc] += x * y;
                            }
                        }
                    }
                }
            }
            t = next;
        }
        total += t
            .get((target - base) as usize)
            .map(|row| row[r as usize].clone())
            .unwrap_or_default();
    }
    Ok(total)
}

/// Counts backward-shift vectors of total cost exactly `r` after which `p` is
/// not a Plurality winner.
pub fn count_plurality_shift_destructive(
    e: &Election,
    p: CandidateId,
    r: u64,
    costs: &CostFunction,
) -> Result<BigUint> {
    e.check_candidate(p)?;
    costs.check_covers(e)?;
    if e.m() == 1 {
        // p is the only candidate and always wins.
        return Ok(BigUint::zero());
    }
    let base = e.score(Rule::Plurality, p);
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for v in 0..e.n() {
        let d = non_p_choice(e, v, p).expect("m >= 2");
        groups.entry(d).or_default().push(v);
    }
    let tables: Vec<(u64, GroupTable)> = groups
        .values()
        .map(|g| {
            let spends: Vec<Spends> = g.iter().map(|&v| backward_spends(e, v, p, costs)).collect();
            (g.len() as u64, group_table(&spends, r))
        })
        .collect();
    let width = r as usize + 1;

    let mut total = BigUint::zero();
    for target in 0..=base {
        // t[beaten][kept][cost]: `beaten` records whether some non-p choice
        // already exceeds `target` points.
        let mut t = [
            vec![vec![BigUint::zero(); width]],
            vec![vec![BigUint::zero(); width]],
        ];
        t[0][0][0] = BigUint::one();
        for (size, g) in &tables {
            let len = t[0].len() + *size as usize;
            let mut next = [
                vec![vec![BigUint::zero(); width]; len],
                vec![vec![BigUint::zero(); width]; len],
            ];
            for beaten in 0..2 {
                for (kept, row) in t[beaten].iter().enumerate() {
                    for (c, x) in row.iter().enumerate() {
                        if x.is_zero() {
                            continue;
                        }
                        for (kk, grow) in g.iter().enumerate() {
                            let exceeds = size - kk as u64 > target;
                            let flag = usize::from(beaten == 1 || exceeds);
                            for (cc, y) in grow.iter().enumerate().take(width - c) {
                                if !y.is_zero() {
                                    next[flag][kept + kk][c + cc] += x * y;
                                }
                            }
                        }
                    }
                }
            }
            t = next;
        }
        total += t[1]
            .get(target as usize)
            .map(|row| row[r as usize].clone())
            .unwrap_or_default();
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: CandidateId = CandidateId(0);

    fn u(x: u32) -> BigUint {
        BigUint::from(x)
    }

    #[test]
    fn shift_plus_examples() {
        let e = Election::from_rankings(&[&[0, 1, 2], &[1, 2, 0], &[1, 0, 2]]);
        let unit = CostFunction::Unit;
        // r = 0: only the empty action, p on top once already.
        assert_eq!(vgc_shift_plus(&e, &[0, 1, 2], 0, P, 1, &unit).unwrap(), u(1));
        assert_eq!(vgc_shift_plus(&e, &[0, 1, 2], 0, P, 0, &unit).unwrap(), u(0));
        assert_eq!(vgc_shift_plus(&e, &[0, 1, 2], 0, P, 2, &unit).unwrap(), u(0));
        // Single vote with p third: spending 2 puts p on top.
        assert_eq!(vgc_shift_plus(&e, &[1], 2, P, 1, &unit).unwrap(), u(1));
        assert_eq!(vgc_shift_plus(&e, &[1], 1, P, 0, &unit).unwrap(), u(1));
        assert_eq!(vgc_shift_plus(&e, &[1], 3, P, 1, &unit).unwrap(), u(0));
    }

    #[test]
    fn shift_plus_equal_costs_are_distinct_ways() {
        let e = Election::from_rankings(&[&[1, 2, 0]]);
        let flat = CostFunction::from_table(vec![vec![0, 1, 1]]).unwrap();
        assert_eq!(vgc_shift_plus(&e, &[0], 1, P, 0, &flat).unwrap(), u(1));
        assert_eq!(vgc_shift_plus(&e, &[0], 1, P, 1, &flat).unwrap(), u(1));
    }

    #[test]
    fn shift_minus_examples() {
        let unit = CostFunction::Unit;
        let e = Election::from_rankings(&[&[0, 1, 2]]);
        assert_eq!(vgc_shift_minus(&e, &[0], 0, P, 1, &unit).unwrap(), u(1));
        assert_eq!(vgc_shift_minus(&e, &[0], 1, P, 0, &unit).unwrap(), u(1));
        let e = Election::from_rankings(&[&[1, 0, 2]]);
        assert_eq!(vgc_shift_minus(&e, &[0], 1, P, 0, &unit).unwrap(), u(1));
        assert_eq!(vgc_shift_minus(&e, &[0], 0, P, 0, &unit).unwrap(), u(1));
    }

    #[test]
    fn shift_minus_checks_group_shape() {
        let e = Election::from_rankings(&[&[0, 1, 2], &[2, 0, 1]]);
        assert!(matches!(
            vgc_shift_minus(&e, &[0, 1], 0, P, 1, &CostFunction::Unit),
            Err(Error::Precondition(_))
        ));
        let e = Election::from_rankings(&[&[0, 1, 2], &[1, 2, 0]]);
        assert!(vgc_shift_minus(&e, &[0, 1], 0, P, 1, &CostFunction::Unit).is_ok());
    }

    #[test]
    fn constructive_examples() {
        let unit = CostFunction::Unit;
        let e = Election::from_rankings(&[&[0, 1, 2], &[0, 2, 1], &[1, 0, 2]]);
        assert_eq!(count_plurality_shift_constructive(&e, P, 0, &unit).unwrap(), u(1));
        // p behind b twice and c tops twice: p needs both b-votes.
        let e = Election::from_rankings(&[&[1, 0, 2], &[1, 0, 2], &[2, 1, 0], &[2, 1, 0]]);
        assert_eq!(count_plurality_shift_constructive(&e, P, 0, &unit).unwrap(), u(0));
        assert_eq!(count_plurality_shift_constructive(&e, P, 2, &unit).unwrap(), u(1));
    }

    #[test]
    fn constructive_two_votes_need_both_tops() {
        let e = Election::from_rankings(&[&[1, 0, 2], &[1, 0, 2]]);
        let unit = CostFunction::Unit;
        assert_eq!(count_plurality_shift_constructive(&e, P, 2, &unit).unwrap(), u(1));
        // One shift gives a 1-1 tie, which counts as a win.
        assert_eq!(count_plurality_shift_constructive(&e, P, 1, &unit).unwrap(), u(2));
    }

    #[test]
    fn destructive_examples() {
        let unit = CostFunction::Unit;
        let e = Election::from_rankings(&[&[1, 0, 2], &[1, 2, 0]]);
        assert_eq!(count_plurality_shift_destructive(&e, P, 0, &unit).unwrap(), u(1));
        let e = Election::from_rankings(&[&[0, 1, 2], &[0, 2, 1], &[1, 0, 2]]);
        assert_eq!(count_plurality_shift_destructive(&e, P, 0, &unit).unwrap(), u(0));
        // Only demoting p in the first vote hands a the win; demoting p in
        // the second vote leaves a three-way tie.
        assert_eq!(count_plurality_shift_destructive(&e, P, 1, &unit).unwrap(), u(1));
        let single = Election::from_rankings(&[&[0]]);
        assert_eq!(count_plurality_shift_destructive(&single, P, 0, &unit).unwrap(), u(0));
    }
}
