//! Exact counting for `#Swap-Bribery` and `#Shift-Bribery`.
//!
//! Two different notions of "a solution" are counted here:
//!
//! * swap-bribery counts resulting *elections* at swap distance exactly `r`
//!   in which the designated candidate `p` is a winner;
//! * shift-bribery counts per-voter *shift-amount vectors* whose total cost is
//!   exactly `r` and which achieve the goal (make `p` a winner when shifting
//!   forward, make `p` lose when shifting backward). If two shift amounts of a
//!   voter have the same cost they are different solutions.
//!
//! Every fast counter has a brute-force counterpart in [`oracle`] for
//! validation on small instances.

use crate::election::{CandidateId, Election, Rule};
use crate::error::{Error, Result};
use num_bigint::BigUint;

pub mod oracle;
mod shift_borda;
mod shift_plurality;
mod swap;

pub use oracle::{brute_force_count_shift, brute_force_count_swap};
pub use shift_borda::{count_borda_shift_constructive, count_borda_shift_constructive_general};
pub use shift_plurality::{
    count_plurality_shift_constructive, count_plurality_shift_destructive, vgc_shift_minus,
    vgc_shift_plus,
};
pub use swap::{count_plurality_swap_bribery, vgc_swap_plurality, vgc_swap_profile};

/// Direction of shift-bribery.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ShiftMode {
    /// Shift `p` forward, aiming to make `p` a winner.
    Constructive,
    /// Shift `p` backward, aiming to make `p` lose.
    Destructive,
}

impl std::str::FromStr for ShiftMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "constructive" => Ok(ShiftMode::Constructive),
            "destructive" => Ok(ShiftMode::Destructive),
            other => Err(Error::InvalidParameter(format!("unknown shift mode `{other}`"))),
        }
    }
}

/// Limits on the exponential parts of the algorithms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Guards {
    /// Largest voter count accepted by the swap-bribery counter, which is
    /// exponential in the number of voters.
    pub max_voters: usize,
    /// Largest radius accepted by the Borda shift-bribery counter, which is
    /// exponential in the radius.
    pub max_radius: u64,
    /// Largest search space the brute-force oracles will walk.
    pub oracle_states: u128,
}

impl Default for Guards {
    fn default() -> Self {
        Guards {
            max_voters: 10,
            max_radius: 12,
            oracle_states: 10_000_000,
        }
    }
}

/// Cost of shifting `p` by `l` positions in a voter's ranking.
///
/// Costs are small nonnegative integers, `cost(v, 0) = 0`, nondecreasing in
/// the shift amount.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CostFunction {
    /// `cost(v, l) = l` for every voter.
    Unit,
    /// Explicit table, `table[v][l]`.
    Table(Vec<Vec<u64>>),
}

impl CostFunction {
    pub fn unit() -> Self {
        CostFunction::Unit
    }

    pub fn from_table(table: Vec<Vec<u64>>) -> Result<Self> {
        for (v, row) in table.iter().enumerate() {
            match row.first() {
                Some(0) => {}
                Some(c) => {
                    return Err(Error::InvalidCosts(format!(
                        "voter {v}: shifting by 0 must cost 0, not {c}"
                    )))
                }
                None => return Err(Error::InvalidCosts(format!("voter {v}: empty cost row"))),
            }
            if row.windows(2).any(|w| w[1] < w[0]) {
                return Err(Error::InvalidCosts(format!("voter {v}: costs must be nondecreasing")));
            }
        }
        Ok(CostFunction::Table(table))
    }

    /// `cost(voter, shift)`, or `None` when the table does not price it.
    pub fn cost(&self, voter: usize, shift: usize) -> Option<u64> {
        match self {
            CostFunction::Unit => Some(shift as u64),
            CostFunction::Table(t) => t.get(voter).and_then(|row| row.get(shift)).copied(),
        }
    }

    pub fn is_unit(&self) -> bool {
        match self {
            CostFunction::Unit => true,
            CostFunction::Table(t) => t
                .iter()
                .all(|row| row.iter().enumerate().all(|(l, &c)| c == l as u64)),
        }
    }

    /// Checks that every voter of `e` has a price for every shift up to
    /// `m - 1` positions.
    pub fn check_covers(&self, e: &Election) -> Result<()> {
        if let CostFunction::Table(t) = self {
            if t.len() != e.n() {
                return Err(Error::InvalidCosts(format!(
                    "{} cost rows for {} voters",
                    t.len(),
                    e.n()
                )));
            }
            if let Some(v) = t.iter().position(|row| row.len() < e.m()) {
                return Err(Error::InvalidCosts(format!(
                    "voter {v} prices fewer than {} shift amounts",
                    e.m()
                )));
            }
        }
        Ok(())
    }

    /// The `(shift, cost)` pairs of voter `v` for shifts `0..=max_shift`.
    pub(crate) fn options(&self, voter: usize, max_shift: usize) -> Vec<(usize, u64)> {
        (0..=max_shift)
            .map(|l| (l, self.cost(voter, l).expect("costs checked against election")))
            .collect()
    }
}

/// Counts elections at swap distance exactly `r` where `p` wins.
///
/// Only Plurality has an exact algorithm; Borda is answered by the oracle
/// when `use_oracle` is set and refused otherwise.
pub fn count_swap(
    e: &Election,
    p: CandidateId,
    r: u64,
    rule: Rule,
    guards: &Guards,
    use_oracle: bool,
) -> Result<BigUint> {
    if use_oracle {
        return brute_force_count_swap(e, p, r, rule, guards);
    }
    match rule {
        Rule::Plurality => count_plurality_swap_bribery(e, p, r, guards),
        Rule::Borda => Err(Error::Unsupported(
            "no exact algorithm for Borda swap-bribery; use the oracle on small instances".into(),
        )),
    }
}

/// Counts shift vectors of total cost exactly `r` achieving the goal of
/// `mode` under `rule`.
pub fn count_shift(
    e: &Election,
    p: CandidateId,
    r: u64,
    costs: &CostFunction,
    mode: ShiftMode,
    rule: Rule,
    guards: &Guards,
    use_oracle: bool,
) -> Result<BigUint> {
    if use_oracle {
        return brute_force_count_shift(e, p, r, costs, mode, rule, guards);
    }
    match (rule, mode) {
        (Rule::Plurality, ShiftMode::Constructive) => {
            count_plurality_shift_constructive(e, p, r, costs)
        }
        (Rule::Plurality, ShiftMode::Destructive) => {
            count_plurality_shift_destructive(e, p, r, costs)
        }
        (Rule::Borda, ShiftMode::Constructive) => {
            count_borda_shift_constructive(e, p, r, costs, guards)
        }
        (Rule::Borda, ShiftMode::Destructive) => Err(Error::Unsupported(
            "no exact algorithm for Borda destructive shift-bribery; use the oracle".into(),
        )),
    }
}

/// Truncated convolution: `out[k] = sum_{i+j=k} a[i] * b[j]` for `k <= max`.
pub(crate) fn convolve(a: &[BigUint], b: &[BigUint], max: usize) -> Vec<BigUint> {
    let mut out = vec![BigUint::default(); max + 1];
    for (i, x) in a.iter().enumerate().take(max + 1) {
        if x.bits() == 0 {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(max + 1 - i) {
            if y.bits() != 0 {
                out[i + j] += x * y;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cost_validation() {
        assert!(CostFunction::from_table(vec![vec![0, 1, 1, 4]]).is_ok());
        assert!(CostFunction::from_table(vec![vec![1, 2]]).is_err());
        assert!(CostFunction::from_table(vec![vec![0, 2, 1]]).is_err());
        assert!(CostFunction::from_table(vec![vec![]]).is_err());
        assert!(CostFunction::from_table(vec![vec![0, 1, 2], vec![0, 1]]).unwrap().is_unit());
        assert!(!CostFunction::from_table(vec![vec![0, 2]]).unwrap().is_unit());

        let e = Election::from_rankings(&[&[0, 1, 2]]);
        assert!(CostFunction::from_table(vec![vec![0, 1]]).unwrap().check_covers(&e).is_err());
        assert!(CostFunction::from_table(vec![vec![0, 1, 3]]).unwrap().check_covers(&e).is_ok());
        assert!(CostFunction::Unit.check_covers(&e).is_ok());
    }

    #[test]
    fn borda_exclusions_are_explicit() {
        let e = Election::from_rankings(&[&[0, 1, 2]]);
        let g = Guards::default();
        assert!(matches!(
            count_swap(&e, CandidateId(0), 0, Rule::Borda, &g, false),
            Err(Error::Unsupported(_))
        ));
        assert!(matches!(
            count_shift(&e, CandidateId(0), 0, &CostFunction::Unit, ShiftMode::Destructive, Rule::Borda, &g, false),
            Err(Error::Unsupported(_))
        ));
        assert_eq!(
            count_shift(&e, CandidateId(0), 0, &CostFunction::Unit, ShiftMode::Destructive, Rule::Borda, &g, true).unwrap(),
            BigUint::from(0u32)
        );
    }

    #[test]
    fn convolution_truncates() {
        let a: Vec<BigUint> = [1u32, 2].iter().map(|&x| x.into()).collect();
        let b: Vec<BigUint> = [3u32, 4, 5].iter().map(|&x| x.into()).collect();
        let c = convolve(&a, &b, 2);
        assert_eq!(c, vec![3u32.into(), 10u32.into(), 13u32.into()]);
    }
}
