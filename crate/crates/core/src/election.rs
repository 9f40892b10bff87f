//! Elections over strict rankings, positional scoring and swap distance.
//!
//! Candidates are dense indices `0..m`; names only matter for display and
//! file output. A candidate "wins" whenever it belongs to the winner set, so
//! ties count as wins for every tied candidate.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Index of a candidate within an election.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CandidateId(pub usize);

impl CandidateId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for CandidateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<usize> for CandidateId {
    fn from(i: usize) -> Self {
        CandidateId(i)
    }
}

/// Maximum number of inversions of a ranking over `m` candidates, `m(m-1)/2`.
#[inline]
pub fn max_swaps(m: usize) -> u64 {
    let m = m as u64;
    m * m.saturating_sub(1) / 2
}

/// A strict ranking of all candidates, most preferred first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vote {
    ranking: Vec<usize>,
}

impl Vote {
    /// Builds a vote, checking that `ranking` is a permutation of `0..len`.
    pub fn new(ranking: Vec<usize>) -> Result<Self> {
        let m = ranking.len();
        let mut seen = vec![false; m];
        for &c in &ranking {
            if c >= m {
                return Err(Error::InvalidVote(format!(
                    "candidate {c} out of range for {m} candidates"
                )));
            }
            if std::mem::replace(&mut seen[c], true) {
                return Err(Error::InvalidVote(format!("candidate {c} ranked twice")));
            }
        }
        Ok(Vote { ranking })
    }

    /// The vote `0 ≻ 1 ≻ … ≻ m-1`.
    pub fn identity(m: usize) -> Self {
        Vote {
            ranking: (0..m).collect(),
        }
    }

    pub(crate) fn from_ranking_unchecked(ranking: Vec<usize>) -> Self {
        debug_assert!(Vote::new(ranking.clone()).is_ok());
        Vote { ranking }
    }

    pub fn ranking(&self) -> &[usize] {
        &self.ranking
    }

    pub fn len(&self) -> usize {
        self.ranking.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranking.is_empty()
    }

    pub fn top(&self) -> CandidateId {
        CandidateId(self.ranking[0])
    }

    /// Zero-based position of `c` (0 is the top).
    pub fn position(&self, c: CandidateId) -> usize {
        self.ranking
            .iter()
            .position(|&x| x == c.0)
            .expect("candidate present in every valid vote")
    }

    /// `pos[c]` is the position of candidate `c`.
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.ranking.len()];
        for (i, &c) in self.ranking.iter().enumerate() {
            pos[c] = i;
        }
        pos
    }

    pub fn reversed(&self) -> Vote {
        let mut r = self.ranking.clone();
        r.reverse();
        Vote { ranking: r }
    }

    /// Moves the candidate at position `from` to position `to`, shifting
    /// everything in between by one.
    pub fn moved(&self, from: usize, to: usize) -> Vote {
        let mut r = self.ranking.clone();
        let c = r.remove(from);
        r.insert(to, c);
        Vote { ranking: r }
    }
}

impl fmt::Display for Vote {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.ranking.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Positional scoring rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    Plurality,
    Borda,
}

impl Rule {
    pub const ALL: [Rule; 2] = [Rule::Plurality, Rule::Borda];

    /// Points awarded for being ranked at `position` among `m` candidates.
    #[inline]
    pub fn points(self, m: usize, position: usize) -> u64 {
        match self {
            Rule::Plurality => u64::from(position == 0),
            Rule::Borda => (m - 1 - position) as u64,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Rule::Plurality => "plurality",
            Rule::Borda => "borda",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Rule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "plurality" => Ok(Rule::Plurality),
            "borda" => Ok(Rule::Borda),
            other => Err(Error::InvalidParameter(format!("unknown rule `{other}`"))),
        }
    }
}

/// A candidate roster together with an ordered, nonempty list of votes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Election {
    names: Vec<String>,
    votes: Vec<Vote>,
}

impl Election {
    pub fn new(names: Vec<String>, votes: Vec<Vote>) -> Result<Self> {
        let m = names.len();
        if m == 0 {
            return Err(Error::InvalidElection("no candidates".into()));
        }
        if votes.is_empty() {
            return Err(Error::InvalidElection("no votes".into()));
        }
        let mut seen = HashSet::with_capacity(m);
        for n in &names {
            if !seen.insert(n.as_str()) {
                return Err(Error::InvalidElection(format!("duplicate name `{n}`")));
            }
        }
        if let Some(v) = votes.iter().find(|v| v.len() != m) {
            return Err(Error::InvalidElection(format!(
                "vote of length {} in election with {m} candidates",
                v.len()
            )));
        }
        Ok(Election { names, votes })
    }

    /// Names candidates `c0, c1, …`. `m` is taken from the first vote.
    pub fn from_votes(votes: Vec<Vote>) -> Result<Self> {
        let m = votes.first().map(Vote::len).unwrap_or(0);
        Election::new(default_names(m), votes)
    }

    /// Convenience constructor from raw rankings; panics on invalid input.
    pub fn from_rankings(rankings: &[&[usize]]) -> Self {
        let votes = rankings
            .iter()
            .map(|r| Vote::new(r.to_vec()).expect("valid ranking"))
            .collect();
        Election::from_votes(votes).expect("valid election")
    }

    pub fn m(&self) -> usize {
        self.names.len()
    }

    pub fn n(&self) -> usize {
        self.votes.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn votes(&self) -> &[Vote] {
        &self.votes
    }

    pub fn candidates(&self) -> impl Iterator<Item = CandidateId> {
        (0..self.m()).map(CandidateId)
    }

    /// Same roster, different votes.
    pub fn with_votes(&self, votes: Vec<Vote>) -> Result<Self> {
        Election::new(self.names.clone(), votes)
    }

    pub fn check_candidate(&self, c: CandidateId) -> Result<()> {
        if c.0 < self.m() {
            Ok(())
        } else {
            Err(Error::CandidateOutOfRange {
                candidate: c.0,
                m: self.m(),
            })
        }
    }

    pub fn score(&self, rule: Rule, c: CandidateId) -> u64 {
        let m = self.m();
        self.votes
            .iter()
            .map(|v| rule.points(m, v.position(c)))
            .sum()
    }

    /// Scores of all candidates, indexed by candidate.
    pub fn scores(&self, rule: Rule) -> Vec<u64> {
        let m = self.m();
        let mut s = vec![0u64; m];
        for v in &self.votes {
            match rule {
                Rule::Plurality => s[v.ranking[0]] += 1,
                Rule::Borda => {
                    for (pos, &c) in v.ranking.iter().enumerate() {
                        s[c] += (m - 1 - pos) as u64;
                    }
                }
            }
        }
        s
    }

    /// All candidates with maximum score, in index order.
    pub fn winners(&self, rule: Rule) -> Vec<CandidateId> {
        winners_of(&self.scores(rule))
    }

    pub fn is_winner(&self, rule: Rule, c: CandidateId) -> bool {
        let s = self.scores(rule);
        let best = s.iter().copied().max().unwrap_or(0);
        s[c.0] == best
    }
}

pub(crate) fn default_names(m: usize) -> Vec<String> {
    (0..m).map(|i| format!("c{i}")).collect()
}

/// Indices attaining the maximum of `scores`.
pub fn winners_of(scores: &[u64]) -> Vec<CandidateId> {
    let best = scores.iter().copied().max().unwrap_or(0);
    scores
        .iter()
        .enumerate()
        .filter(|&(_, &s)| s == best)
        .map(|(i, _)| CandidateId(i))
        .collect()
}

/// Kendall tau distance between two votes: the minimum number of adjacent
/// swaps turning `u` into `v`.
pub fn swap_distance(u: &Vote, v: &Vote) -> Result<u64> {
    if u.len() != v.len() {
        return Err(Error::ShapeMismatch(format!(
            "votes of length {} and {}",
            u.len(),
            v.len()
        )));
    }
    let pos_v = v.positions();
    let mut seq: Vec<usize> = u.ranking.iter().map(|&c| pos_v[c]).collect();
    Ok(count_inversions(&mut seq))
}

/// Number of inversions of `seq`; sorts `seq` in the process.
pub fn count_inversions(seq: &mut [usize]) -> u64 {
    let mut buf = seq.to_vec();
    merge_count(seq, &mut buf)
}

fn merge_count(a: &mut [usize], buf: &mut [usize]) -> u64 {
    let n = a.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut inv = {
        let (l, r) = a.split_at_mut(mid);
        let (bl, br) = buf.split_at_mut(mid);
        merge_count(l, bl) + merge_count(r, br)
    };
    let (mut i, mut j, mut k) = (0, mid, 0);
    while i < mid && j < n {
        if a[i] <= a[j] {
            buf[k] = a[i];
            i += 1;
        } else {
            buf[k] = a[j];
            inv += (mid - i) as u64;
            j += 1;
        }
        k += 1;
    }
    buf[k..k + mid - i].copy_from_slice(&a[i..mid]);
    k += mid - i;
    buf[k..k + n - j].copy_from_slice(&a[j..n]);
    a.copy_from_slice(&buf[..n]);
    inv
}

/// Sum of per-vote swap distances between two elections of equal shape.
pub fn election_swap_distance(a: &Election, b: &Election) -> Result<u64> {
    if a.m() != b.m() || a.n() != b.n() {
        return Err(Error::ShapeMismatch(format!(
            "elections of shape {}x{} and {}x{}",
            a.m(),
            a.n(),
            b.m(),
            b.n()
        )));
    }
    a.votes
        .iter()
        .zip(&b.votes)
        .map(|(u, v)| swap_distance(u, v))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn vote(r: &[usize]) -> Vote {
        Vote::new(r.to_vec()).unwrap()
    }

    #[test]
    fn borda_top_of_three_gets_two() {
        let e = Election::from_rankings(&[&[0, 1, 2]]);
        assert_eq!(e.score(Rule::Borda, CandidateId(0)), 2);
    }

    #[test]
    fn plurality_zero_without_first_places() {
        let e = Election::from_rankings(&[&[0, 1, 2], &[1, 0, 2]]);
        assert_eq!(e.score(Rule::Plurality, CandidateId(2)), 0);
    }

    #[test]
    fn borda_sums_positions() {
        let e = Election::from_rankings(&[&[0, 1, 2], &[1, 0, 2]]);
        assert_eq!(e.score(Rule::Borda, CandidateId(1)), 3);
    }

    #[test]
    fn winners_examples() {
        let e = Election::from_rankings(&[&[0, 1, 2]]);
        assert_eq!(e.winners(Rule::Plurality), vec![CandidateId(0)]);
        let e = Election::from_rankings(&[&[0, 1], &[1, 0]]);
        assert_eq!(e.winners(Rule::Plurality), vec![CandidateId(0), CandidateId(1)]);
        let e = Election::from_rankings(&[&[0, 1, 2], &[1, 0, 2], &[1, 2, 0]]);
        assert_eq!(e.scores(Rule::Borda), vec![3, 5, 1]);
        assert_eq!(e.winners(Rule::Borda), vec![CandidateId(1)]);
    }

    #[test]
    fn swap_distance_examples() {
        let abc = vote(&[0, 1, 2]);
        assert_eq!(swap_distance(&abc, &abc).unwrap(), 0);
        assert_eq!(swap_distance(&abc, &vote(&[1, 0, 2])).unwrap(), 1);
        assert_eq!(swap_distance(&abc, &vote(&[2, 1, 0])).unwrap(), 3);
        assert!(swap_distance(&abc, &vote(&[0, 1])).is_err());
    }

    #[test]
    fn election_distance_examples() {
        let e = Election::from_rankings(&[&[0, 1, 2], &[0, 1, 2]]);
        assert_eq!(election_swap_distance(&e, &e).unwrap(), 0);
        let f = Election::from_rankings(&[&[1, 0, 2], &[1, 2, 0]]);
        assert_eq!(election_swap_distance(&e, &f).unwrap(), 3);
        let rev = Election::from_rankings(&[&[2, 1, 0], &[2, 1, 0]]);
        assert_eq!(election_swap_distance(&e, &rev).unwrap(), 6);
        let small = Election::from_rankings(&[&[0, 1, 2]]);
        assert!(election_swap_distance(&e, &small).is_err());
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(Vote::new(vec![0, 0, 1]).is_err());
        assert!(Vote::new(vec![0, 3, 1]).is_err());
        assert!(Election::from_votes(vec![]).is_err());
        assert!(Election::new(vec!["a".into(), "a".into()], vec![vote(&[0, 1])]).is_err());
        assert!(Election::new(vec!["a".into(), "b".into()], vec![vote(&[0, 1, 2])]).is_err());
    }

    fn perm(m: usize) -> impl Strategy<Value = Vote> {
        Just((0..m).collect::<Vec<_>>())
            .prop_shuffle()
            .prop_map(|r| Vote::new(r).unwrap())
    }

    fn naive_distance(u: &Vote, v: &Vote) -> u64 {
        let pv = v.positions();
        let r = u.ranking();
        let mut d = 0;
        for i in 0..r.len() {
            for j in i + 1..r.len() {
                if pv[r[i]] > pv[r[j]] {
                    d += 1;
                }
            }
        }
        d
    }

    proptest! {
        #[test]
        fn distance_is_a_metric((u, v, w) in (1usize..=6).prop_flat_map(|m| (perm(m), perm(m), perm(m)))) {
            let duv = swap_distance(&u, &v).unwrap();
            prop_assert_eq!(duv, naive_distance(&u, &v));
            prop_assert_eq!(duv, swap_distance(&v, &u).unwrap());
            prop_assert_eq!(duv == 0, u == v);
            prop_assert!(duv <= max_swaps(u.len()));
            let duw = swap_distance(&u, &w).unwrap();
            let dwv = swap_distance(&w, &v).unwrap();
            prop_assert!(duv <= duw + dwv);
        }

        #[test]
        fn score_totals(votes in (1usize..=6).prop_flat_map(|m| proptest::collection::vec(perm(m), 1..6))) {
            let e = Election::from_votes(votes).unwrap();
            let n = e.n() as u64;
            prop_assert_eq!(e.scores(Rule::Plurality).iter().sum::<u64>(), n);
            prop_assert_eq!(e.scores(Rule::Borda).iter().sum::<u64>(), n * max_swaps(e.m()));
            for rule in Rule::ALL {
                let s = e.scores(rule);
                let best = *s.iter().max().unwrap();
                let w = e.winners(rule);
                prop_assert!(!w.is_empty());
                for c in e.candidates() {
                    prop_assert_eq!(w.contains(&c), s[c.0] == best);
                    prop_assert_eq!(e.score(rule, c), s[c.0]);
                }
            }
        }
    }
}
