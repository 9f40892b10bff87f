//! Desk-scale self-verification: counting tables against enumeration, the
//! sampler against exact distances and uniformity, and every fast counter
//! against its brute-force oracle on random small instances.

use std::collections::HashMap;
use std::path::Path;
use std::time::Instant;

use num_bigint::BigUint;
use rand::Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::bribery::{
    brute_force_count_shift, count_borda_shift_constructive, count_plurality_shift_constructive,
    count_plurality_shift_destructive, count_plurality_swap_bribery, oracle::brute_force_count_swap,
    CostFunction, Guards, ShiftMode,
};
use crate::election::{election_swap_distance, CandidateId, Election, Rule, Vote};
use crate::error::{Error, Result};
use crate::rng::RandomSource;
use crate::sampler::sample_election_at_distance;
use crate::tables::{ElectionCountTable, MahonianTable, SamplingTables};

/// How much work the checks do.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    /// A subset that finishes within seconds.
    Quick,
    Full,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

/// Runs every check. When `cache` is given, the election-count table stored
/// there is loaded and its row sums verified as an extra check.
pub fn run(level: Level, seed: u64, cache: Option<&Path>) -> Vec<CheckReport> {
    let quick = level == Level::Quick;
    let mut out = Vec::new();
    let mut check = |name: &'static str, f: &dyn Fn() -> Result<String>| {
        let start = Instant::now();
        let (passed, detail) = match f() {
            Ok(d) => (true, d),
            Err(e) => (false, e.to_string()),
        };
        out.push(CheckReport {
            name,
            passed,
            detail,
            seconds: start.elapsed().as_secs_f64(),
        });
    };
    let instances = if quick { 30 } else { 200 };
    check("mahonian-census", &|| mahonian_census(if quick { 6 } else { 7 }));
    check("election-count-census", &|| election_census(3, if quick { 2 } else { 3 }));
    check("sampler-distance", &|| sampler_distance(if quick { 1_000 } else { 10_000 }, seed));
    check("sampler-uniformity", &|| sampler_uniformity(if quick { 5_000 } else { 20_000 }, seed));
    check("oracle-swap-plurality", &|| oracle_swap(instances, seed));
    check("oracle-shift-plurality", &|| oracle_shift_plurality(instances, seed));
    check("oracle-shift-borda", &|| oracle_shift_borda(instances, seed));
    if let Some(path) = cache {
        check("table-cache", &|| {
            let t = ElectionCountTable::load(path)?;
            Ok(format!("m={} n<={} row sums ok", t.m(), t.max_n()))
        });
    }
    out
}

fn fail(msg: String) -> Error {
    Error::Checksum(msg)
}

fn permutations(m: usize) -> Vec<Vec<usize>> {
    if m == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(m - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, m - 1);
            out.push(q);
        }
    }
    out
}

fn naive_inversions(p: &[usize]) -> usize {
    (0..p.len())
        .map(|i| (i + 1..p.len()).filter(|&j| p[i] > p[j]).count())
        .sum()
}

fn mahonian_census(max_m: usize) -> Result<String> {
    let t = MahonianTable::build(max_m);
    for m in 0..=max_m {
        let mut counts = vec![0u64; m * m.saturating_sub(1) / 2 + 1];
        for p in permutations(m) {
            counts[naive_inversions(&p)] += 1;
        }
        for (r, &c) in counts.iter().enumerate() {
            if *t.get(m, r as u64) != BigUint::from(c) {
                return Err(fail(format!("T_V[{m}][{r}] = {}, census {c}", t.get(m, r as u64))));
            }
        }
    }
    Ok(format!("m <= {max_m}"))
}

fn election_census(m: usize, max_n: usize) -> Result<String> {
    let mahonian = MahonianTable::build(m);
    let t = ElectionCountTable::build(&mahonian, m, max_n)?;
    let perms = permutations(m);
    for n in 0..=max_n {
        // Distance of every n-tuple of votes from the identity election.
        let mut counts = HashMap::<usize, u64>::new();
        let mut idx = vec![0usize; n];
        loop {
            let d: usize = idx.iter().map(|&i| naive_inversions(&perms[i])).sum();
            *counts.entry(d).or_default() += 1;
            let Some(k) = (0..n).find(|&k| idx[k] + 1 < perms.len()) else { break };
            idx[k] += 1;
            idx[..k].iter_mut().for_each(|x| *x = 0);
        }
        let umax = n * m * (m - 1) / 2;
        for r in 0..=umax {
            let c = counts.get(&r).copied().unwrap_or(0);
            if *t.get(n, r as u64) != BigUint::from(c) {
                return Err(fail(format!("T_E[{n}][{r}] = {}, census {c}", t.get(n, r as u64))));
            }
        }
    }
    Ok(format!("m = {m}, n <= {max_n}"))
}

fn random_election<R: Rng>(m: usize, n: usize, rng: &mut R) -> Election {
    use rand::seq::SliceRandom;
    let votes = (0..n)
        .map(|_| {
            let mut r: Vec<usize> = (0..m).collect();
            r.shuffle(rng);
            Vote::new(r).expect("shuffled permutation")
        })
        .collect();
    Election::from_votes(votes).expect("nonempty")
}

fn sampler_distance(samples: usize, seed: u64) -> Result<String> {
    let mut rng = RandomSource::seeded(seed);
    let tables = SamplingTables::new(5, 4);
    let mut by_m: HashMap<usize, SamplingTables> = HashMap::new();
    for _ in 0..samples {
        let m = rng.gen_range(1..=5);
        let n = rng.gen_range(1..=4);
        let e = random_election(m, n, &mut rng);
        let r = rng.gen_range(0..=(n * m * (m - 1) / 2) as u64);
        let t = if m == 5 { &tables } else { by_m.entry(m).or_insert_with(|| SamplingTables::new(m, 4)) };
        let s = sample_election_at_distance(&e, r, t, &mut rng)?;
        let d = election_swap_distance(&e, &s)?;
        if d != r {
            return Err(fail(format!("sample at distance {d}, asked for {r}")));
        }
    }
    Ok(format!("{samples} samples exact"))
}

/// The chi-square statistic of `observed` against equal expected counts and
/// whether it stays below the critical value at significance 0.001.
pub fn chi_square_uniform(observed: &[u64]) -> (f64, f64) {
    let total: u64 = observed.iter().sum();
    let k = observed.len();
    let expected = total as f64 / k as f64;
    let stat = observed
        .iter()
        .map(|&o| (o as f64 - expected).powi(2) / expected)
        .sum();
    let critical = ChiSquared::new((k - 1) as f64)
        .expect("positive degrees of freedom")
        .inverse_cdf(0.999);
    (stat, critical)
}

fn sampler_uniformity(samples: usize, seed: u64) -> Result<String> {
    let mut rng = RandomSource::seeded(seed ^ 0x5eed);
    let e = Election::from_rankings(&[&[0, 1, 2], &[2, 0, 1]]);
    let tables = SamplingTables::new(3, 2);
    let perms = permutations(3);
    let mut worst = String::new();
    for r in 1..=3u64 {
        let mut support: HashMap<Vec<Vec<usize>>, u64> = HashMap::new();
        for a in &perms {
            for b in &perms {
                let cand = Election::from_rankings(&[a, b]);
                if election_swap_distance(&e, &cand)? == r {
                    support.insert(vec![a.clone(), b.clone()], 0);
                }
            }
        }
        for _ in 0..samples {
            let s = sample_election_at_distance(&e, r, &tables, &mut rng)?;
            let key: Vec<Vec<usize>> = s.votes().iter().map(|v| v.ranking().to_vec()).collect();
            *support
                .get_mut(&key)
                .ok_or_else(|| fail(format!("sample outside R(E, {r})")))? += 1;
        }
        let observed: Vec<u64> = support.values().copied().collect();
        let (stat, critical) = chi_square_uniform(&observed);
        if stat >= critical {
            return Err(fail(format!(
                "r = {r}: chi-square {stat:.2} >= {critical:.2} over {} elections",
                observed.len()
            )));
        }
        worst += &format!("r={r}: {stat:.1}/{critical:.1} ");
    }
    Ok(worst.trim_end().to_string())
}

fn oracle_swap(instances: usize, seed: u64) -> Result<String> {
    let mut rng = RandomSource::seeded(seed ^ 0x5a1);
    let g = Guards::default();
    for i in 0..instances {
        let m = rng.gen_range(1..=4);
        let n = rng.gen_range(1..=3);
        let e = random_election(m, n, &mut rng);
        let p = CandidateId(rng.gen_range(0..m));
        let r = rng.gen_range(0..=5);
        let fast = count_plurality_swap_bribery(&e, p, r, &g)?;
        let slow = brute_force_count_swap(&e, p, r, Rule::Plurality, &g)?;
        if fast != slow {
            return Err(fail(format!("instance {i} (p={p}, r={r}): {fast} vs oracle {slow}\n{e:?}")));
        }
    }
    Ok(format!("{instances} instances"))
}

/// Random cost table with per-step increments in `1..=3`.
fn random_costs<R: Rng>(m: usize, n: usize, rng: &mut R) -> CostFunction {
    let table = (0..n)
        .map(|_| {
            let mut row = vec![0u64];
            for _ in 1..m {
                row.push(row.last().unwrap() + rng.gen_range(1..=3));
            }
            row
        })
        .collect();
    CostFunction::from_table(table).expect("valid by construction")
}

fn oracle_shift_plurality(instances: usize, seed: u64) -> Result<String> {
    let mut rng = RandomSource::seeded(seed ^ 0x5b1f7);
    let g = Guards::default();
    for i in 0..instances {
        let m = rng.gen_range(1..=5);
        let n = rng.gen_range(1..=4);
        let e = random_election(m, n, &mut rng);
        let p = CandidateId(rng.gen_range(0..m));
        let r = rng.gen_range(0..=4);
        let costs = random_costs(m, n, &mut rng);
        for mode in [ShiftMode::Constructive, ShiftMode::Destructive] {
            let fast = match mode {
                ShiftMode::Constructive => count_plurality_shift_constructive(&e, p, r, &costs)?,
                ShiftMode::Destructive => count_plurality_shift_destructive(&e, p, r, &costs)?,
            };
            let slow = brute_force_count_shift(&e, p, r, &costs, mode, Rule::Plurality, &g)?;
            if fast != slow {
                return Err(fail(format!(
                    "instance {i} ({mode:?}, p={p}, r={r}): {fast} vs oracle {slow}"
                )));
            }
        }
    }
    Ok(format!("{instances} instances, both modes"))
}

fn oracle_shift_borda(instances: usize, seed: u64) -> Result<String> {
    let mut rng = RandomSource::seeded(seed ^ 0xb0da);
    let g = Guards::default();
    for i in 0..instances {
        let m = rng.gen_range(1..=6);
        let n = rng.gen_range(1..=5);
        let e = random_election(m, n, &mut rng);
        let p = CandidateId(rng.gen_range(0..m));
        let r = rng.gen_range(0..=4);
        let costs = if i % 2 == 0 { CostFunction::Unit } else { random_costs(m, n, &mut rng) };
        let fast = count_borda_shift_constructive(&e, p, r, &costs, &g)?;
        let slow = brute_force_count_shift(&e, p, r, &costs, ShiftMode::Constructive, Rule::Borda, &g)?;
        if fast != slow {
            return Err(fail(format!("instance {i} (p={p}, r={r}): {fast} vs oracle {slow}")));
        }
    }
    Ok(format!("{instances} instances, unit and table costs"))
}
