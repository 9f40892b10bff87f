//! Borda constructive `#Shift-Bribery`, exponential only in the radius.
//!
//! Once `p`'s final score `s*` is fixed, only candidates scoring above `s*`
//! matter ("critical" candidates), and each must be passed by `p` at least
//! `score - s*` times. Since `p` gains one point per position, at most `s* -
//! score(p)` candidates can be critical in any solvable instance. The dynamic
//! program walks the voters, keeping a sparse map from (cost spent, remaining
//! demand per critical candidate) to the number of ways. Demands saturate at
//! zero: passing a candidate more often than needed is allowed.
//!
//! With unit costs `s* = score(p) + r`. Otherwise every final score is
//! guessed in turn and `p`'s gain is tracked as an extra state component.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::{CostFunction, Guards};
use crate::election::{CandidateId, Election, Rule};
use crate::error::{Error, Result};

/// Remaining demand per critical candidate.
type Demand = Vec<u32>;

/// Critical candidates for target score `target`, as `(index, demand)` with
/// a lookup from candidate to critical slot.
fn critical(scores: &[u64], p: CandidateId, target: u64) -> (Vec<Option<usize>>, Demand) {
    let mut slot = vec![None; scores.len()];
    let mut demand = Vec::new();
    for (c, &s) in scores.iter().enumerate() {
        if c != p.0 && s > target {
            slot[c] = Some(demand.len());
            demand.push((s - target) as u32);
        }
    }
    (slot, demand)
}

/// Demand vector after `p` passes the candidates in `passed`.
fn apply_gain(d: &Demand, slot: &[Option<usize>], passed: &[usize]) -> Demand {
    let mut next = d.clone();
    for &c in passed {
        if let Some(i) = slot[c] {
            next[i] = next[i].saturating_sub(1);
        }
    }
    next
}

fn check_guard(r: u64, guards: &Guards) -> Result<()> {
    if r > guards.max_radius {
        return Err(Error::GuardExceeded {
            guard: "max_radius",
            value: r as u128,
            limit: guards.max_radius as u128,
            hint: Some("use the brute-force oracle on small instances".into()),
        });
    }
    Ok(())
}

/// Counts forward-shift vectors of total cost exactly `r` after which `p` is
/// a Borda winner. Unit costs take the fixed-target path; anything else goes
/// through [`count_borda_shift_constructive_general`].
pub fn count_borda_shift_constructive(
    e: &Election,
    p: CandidateId,
    r: u64,
    costs: &CostFunction,
    guards: &Guards,
) -> Result<BigUint> {
    e.check_candidate(p)?;
    costs.check_covers(e)?;
    check_guard(r, guards)?;
    if !costs.is_unit() {
        return count_borda_shift_constructive_general(e, p, r, costs, guards);
    }

    let scores = e.scores(Rule::Borda);
    let target = scores[p.0] + r;
    let (slot, d0) = critical(&scores, p, target);
    if d0.len() as u64 > r {
        // Others lose r points in total; each critical one needs at least one.
        return Ok(BigUint::zero());
    }

    let mut states: HashMap<(u64, Demand), BigUint> = HashMap::new();
    states.insert((0, d0), BigUint::one());
    for vote in e.votes() {
        let ranking = vote.ranking();
        let pos = vote.position(p);
        let mut next: HashMap<(u64, Demand), BigUint> = HashMap::new();
        for ((spent, d), ways) in &states {
            let budget = r - spent;
            for l in 0..=pos.min(budget as usize) {
                let passed = &ranking[pos - l..pos];
                let key = (spent + l as u64, apply_gain(d, &slot, passed));
                *next.entry(key).or_default() += ways;
            }
        }
        states = next;
    }
    let done = states
        .into_iter()
        .filter(|((spent, d), _)| *spent == r && d.iter().all(|&x| x == 0))
        .map(|(_, ways)| ways)
        .sum();
    Ok(done)
}

/// Borda constructive shift-bribery for arbitrary unary costs: guesses `p`'s
/// final score and tracks `p`'s gain next to the demand vector.
pub fn count_borda_shift_constructive_general(
    e: &Election,
    p: CandidateId,
    r: u64,
    costs: &CostFunction,
    guards: &Guards,
) -> Result<BigUint> {
    e.check_candidate(p)?;
    costs.check_covers(e)?;
    check_guard(r, guards)?;
    let scores = e.scores(Rule::Borda);
    let base = scores[p.0];
    let max_gain: u64 = e.votes().iter().map(|v| v.position(p) as u64).sum();

    let options: Vec<Vec<(usize, u64)>> = e
        .votes()
        .iter()
        .enumerate()
        .map(|(v, vote)| {
            costs
                .options(v, vote.position(p))
                .into_iter()
                .filter(|&(_, c)| c <= r)
                .collect()
        })
        .collect();

    let mut total = BigUint::zero();
    for gain in 0..=max_gain {
        let target = base + gain;
        let (slot, d0) = critical(&scores, p, target);
        if d0.len() as u64 > gain {
            continue;
        }
        let mut states: HashMap<(u64, u64, Demand), BigUint> = HashMap::new();
        states.insert((0, 0, d0), BigUint::one());
        for (vote, opts) in e.votes().iter().zip(&options) {
            let ranking = vote.ranking();
            let pos = vote.position(p);
            let mut next: HashMap<(u64, u64, Demand), BigUint> = HashMap::new();
            for ((spent, got, d), ways) in &states {
                for &(l, c) in opts {
                    let (spent2, got2) = (spent + c, got + l as u64);
                    if spent2 > r || got2 > gain {
                        continue;
                    }
                    let d2 = apply_gain(d, &slot, &ranking[pos - l..pos]);
                    *next.entry((spent2, got2, d2)).or_default() += ways;
                }
            }
            states = next;
        }
        total += states
            .into_iter()
            .filter(|((spent, got, d), _)| *spent == r && *got == gain && d.iter().all(|&x| x == 0))
            .map(|(_, ways)| ways)
            .sum::<BigUint>();
    }
    Ok(total)
}
