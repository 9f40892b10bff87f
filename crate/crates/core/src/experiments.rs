//! Estimating winning probabilities at a given swap distance by sampling,
//! and the 50%-winner thresholds derived from them.

use std::collections::HashMap;
use std::io::Write;
use std::path::Path;

use rand::Rng;
use rayon::prelude::*;

use crate::cultures::{read_manifest, Culture};
use crate::election::{max_swaps, CandidateId, Election, Rule};
use crate::error::{Error, Result};
use crate::format::read_election;
use crate::rng::{derive_seed, stable_hash, RandomSource};
use crate::sampler::sample_election_at_distance;
use crate::tables::SamplingTables;

/// Normalized radii, strictly increasing within `(0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceGrid {
    radii: Vec<f64>,
}

impl DistanceGrid {
    pub fn new(radii: Vec<f64>) -> Result<Self> {
        if radii.is_empty() {
            return Err(Error::InvalidParameter("empty distance grid".into()));
        }
        if let Some(r) = radii.iter().find(|&&r| !(r > 0.0 && r <= 1.0)) {
            return Err(Error::InvalidParameter(format!(
                "grid radius {r} outside (0, 1]"
            )));
        }
        if radii.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter("grid must be strictly increasing".into()));
        }
        Ok(DistanceGrid { radii })
    }

    /// 0.05, 0.10, ..., 1.00.
    pub fn coarse() -> Self {
        DistanceGrid {
            radii: (1..=20).map(|k| k as f64 / 20.0).collect(),
        }
    }

    /// 0.0125, 0.025, ..., 0.5.
    pub fn fine() -> Self {
        DistanceGrid {
            radii: (1..=40).map(|k| k as f64 / 80.0).collect(),
        }
    }

    /// Parses `coarse`, `fine`, or a comma-separated list of radii.
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "coarse" => Ok(Self::coarse()),
            "fine" => Ok(Self::fine()),
            list => {
                let radii = list
                    .split(',')
                    .map(|x| {
                        x.trim()
                            .parse::<f64>()
                            .map_err(|_| Error::InvalidParameter(format!("bad radius `{x}`")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Self::new(radii)
            }
        }
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    /// The value one step past the end of the grid, used in place of a
    /// missing threshold when averaging.
    pub fn beyond(&self) -> f64 {
        let n = self.radii.len();
        let step = if n >= 2 { self.radii[n - 1] - self.radii[n - 2] } else { self.radii[0] };
        self.radii[n - 1] + step
    }
}

/// `round(rho * n * m(m-1)/2)`, rounding halves to even.
///
/// Products within 1e-9 of an integer or of a half are snapped first, so
/// that decimal radii such as 0.05 land where their decimal value would.
pub fn normalized_to_swaps(rho: f64, m: usize, n: usize) -> u64 {
    let total = max_swaps(m) * n as u64;
    let x = rho.clamp(0.0, 1.0) * total as f64;
    const EPS: f64 = 1e-9;
    let nearest = x.round();
    let r = if (x - nearest).abs() < EPS {
        nearest
    } else {
        let floor = x.floor();
        if (x - floor - 0.5).abs() < EPS {
            if floor as u64 % 2 == 0 { floor } else { floor + 1.0 }
        } else {
            nearest
        }
    };
    (r as u64).min(total)
}

/// Win counts of every candidate among `samples` elections drawn uniformly
/// at swap distance `r`, once per rule in `rules` (all rules see the same
/// samples). Ties count as wins for every tied candidate.
pub fn estimate_at_swaps<R: Rng + ?Sized>(
    e: &Election,
    rules: &[Rule],
    r: u64,
    samples: u64,
    tables: &SamplingTables,
    rng: &mut R,
) -> Result<Vec<Vec<u64>>> {
    let mut wins = vec![vec![0u64; e.m()]; rules.len()];
    for _ in 0..samples {
        let s = sample_election_at_distance(e, r, tables, rng)?;
        for (rule, w) in rules.iter().zip(wins.iter_mut()) {
            for c in s.winners(*rule) {
                w[c.0] += 1;
            }
        }
    }
    Ok(wins)
}

/// Win counts at one grid radius.
#[derive(Debug, Clone, PartialEq)]
pub struct RadiusEstimate {
    pub radius_norm: f64,
    pub radius_swaps: u64,
    pub samples: u64,
    pub wins: Vec<u64>,
}

impl RadiusEstimate {
    pub fn frequency(&self, c: CandidateId) -> f64 {
        self.wins[c.0] as f64 / self.samples as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateResult {
    pub election_id: String,
    pub rule: Rule,
    pub seed: u64,
    pub radii: Vec<RadiusEstimate>,
}

/// Estimates winning frequencies of every candidate at every grid radius.
pub fn estimate<R: Rng + ?Sized>(
    e: &Election,
    rule: Rule,
    grid: &DistanceGrid,
    samples: u64,
    tables: &SamplingTables,
    rng: &mut R,
) -> Result<EstimateResult> {
    check_samples(samples)?;
    tables.covers(e.m(), e.n())?;
    let radii = grid
        .radii()
        .iter()
        .map(|&rho| {
            let r = normalized_to_swaps(rho, e.m(), e.n());
            let wins = estimate_at_swaps(e, &[rule], r, samples, tables, rng)?;
            Ok(RadiusEstimate {
                radius_norm: rho,
                radius_swaps: r,
                samples,
                wins: wins.into_iter().next().expect("one rule"),
            })
        })
        .collect::<Result<_>>()?;
    Ok(EstimateResult {
        election_id: String::new(),
        rule,
        seed: 0,
        radii,
    })
}

fn check_samples(samples: u64) -> Result<()> {
    if samples == 0 {
        return Err(Error::InvalidParameter("samples must be at least 1".into()));
    }
    Ok(())
}

/// The smallest grid radius at which `winner` wins strictly less than half
/// of the samples, or `None` if that never happens.
pub fn threshold(res: &EstimateResult, winner: CandidateId) -> Option<f64> {
    res.radii
        .iter()
        .find(|x| 2 * x.wins[winner.0] < x.samples)
        .map(|x| x.radius_norm)
}

/// Winner's score minus the best score among the other candidates. Tied
/// winners are reported as [`Error::TiedWinners`].
pub fn score_margin(e: &Election, rule: Rule) -> Result<u64> {
    let scores = e.scores(rule);
    let winners = e.winners(rule);
    if winners.len() > 1 {
        return Err(Error::TiedWinners(winners.into_iter().map(|c| c.0).collect()));
    }
    let w = winners[0].0;
    let runner_up = scores
        .iter()
        .enumerate()
        .filter(|&(c, _)| c != w)
        .map(|(_, &s)| s)
        .max();
    Ok(scores[w] - runner_up.unwrap_or(0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdResult {
    pub election_id: String,
    pub rule: Rule,
    pub culture: String,
    pub params: String,
    pub score_margin: u64,
    pub threshold: Option<f64>,
}

/// An election of a dataset with its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetEntry {
    pub id: String,
    pub culture: String,
    pub params: String,
    pub election: Election,
}

impl DatasetEntry {
    pub fn new(id: impl Into<String>, culture: &Culture, election: Election) -> Self {
        DatasetEntry {
            id: id.into(),
            culture: culture.name().to_string(),
            params: culture.params(),
            election,
        }
    }
}

/// Loads the elections listed in a manifest from `<id>.election` files next
/// to it.
pub fn load_dataset(manifest: &Path) -> Result<Vec<DatasetEntry>> {
    let dir = manifest.parent().unwrap_or(Path::new("."));
    let file = std::io::BufReader::new(std::fs::File::open(manifest)?);
    read_manifest(file)?
        .into_iter()
        .map(|entry| {
            let path = entry.election_path(dir);
            let f = std::fs::File::open(&path).map_err(|e| {
                Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
            })?;
            let election = read_election(std::io::BufReader::new(f))?;
            if election.m() != entry.spec.m || election.n() != entry.spec.n {
                return Err(Error::ShapeMismatch(format!(
                    "{}: manifest says {}x{}, file has {}x{}",
                    entry.id,
                    entry.spec.m,
                    entry.spec.n,
                    election.m(),
                    election.n()
                )));
            }
            Ok(DatasetEntry::new(entry.id, &entry.spec.culture, election))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub rules: Vec<Rule>,
    pub grid: DistanceGrid,
    pub samples: u64,
    pub base_seed: u64,
    /// Worker threads; results do not depend on it.
    pub jobs: usize,
}

/// An election left out for a rule because its original winners tie.
#[derive(Debug, Clone, PartialEq)]
pub struct ExcludedTie {
    pub election_id: String,
    pub rule: Rule,
    pub winners: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExperimentOutput {
    pub estimates: Vec<EstimateResult>,
    pub thresholds: Vec<ThresholdResult>,
    pub excluded: Vec<ExcludedTie>,
}

/// Runs the estimation over a dataset.
///
/// Every (election, radius) pair is an independent task whose seed derives
/// from the base seed, the election id and the radius index, so the output
/// does not depend on `jobs`. All requested rules are evaluated on the same
/// samples. Elections whose original winners tie under a rule are skipped
/// for that rule and listed in `excluded`.
pub fn run_experiment(dataset: &[DatasetEntry], cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    check_samples(cfg.samples)?;
    let mut ids = std::collections::HashSet::new();
    if let Some(d) = dataset.iter().find(|d| !ids.insert(&d.id)) {
        return Err(Error::InvalidParameter(format!("duplicate election id `{}`", d.id)));
    }
    let mut out = ExperimentOutput::default();

    // Rules to estimate per election, after dropping tied ones.
    let mut active: Vec<Vec<Rule>> = Vec::with_capacity(dataset.len());
    let mut margins: HashMap<(usize, Rule), u64> = HashMap::new();
    for (i, d) in dataset.iter().enumerate() {
        let mut rules = Vec::new();
        for &rule in &cfg.rules {
            match score_margin(&d.election, rule) {
                Ok(margin) => {
                    margins.insert((i, rule), margin);
                    rules.push(rule);
                }
                Err(Error::TiedWinners(winners)) => out.excluded.push(ExcludedTie {
                    election_id: d.id.clone(),
                    rule,
                    winners,
                }),
                Err(e) => return Err(e),
            }
        }
        active.push(rules);
    }

    let mut max_n: HashMap<usize, usize> = HashMap::new();
    for d in dataset {
        let n = max_n.entry(d.election.m()).or_default();
        *n = (*n).max(d.election.n());
    }
    let tables: HashMap<usize, SamplingTables> = max_n
        .into_iter()
        .map(|(m, n)| (m, SamplingTables::new(m, n)))
        .collect();

    let tasks: Vec<(usize, usize)> = (0..dataset.len())
        .filter(|&i| !active[i].is_empty())
        .flat_map(|i| (0..cfg.grid.radii().len()).map(move |k| (i, k)))
        .collect();
    let run = |&(i, k): &(usize, usize)| -> Result<Vec<Vec<u64>>> {
        let d = &dataset[i];
        let e = &d.election;
        let r = normalized_to_swaps(cfg.grid.radii()[k], e.m(), e.n());
        let seed = derive_seed(cfg.base_seed, &[stable_hash(&d.id), k as u64]);
        let mut rng = RandomSource::seeded(seed);
        estimate_at_swaps(e, &active[i], r, cfg.samples, &tables[&e.m()], &mut rng)
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs.max(1))
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    let results: Vec<Vec<Vec<u64>>> =
        pool.install(|| tasks.par_iter().map(run).collect::<Result<_>>())?;

    let mut per_election: HashMap<usize, Vec<Vec<Vec<u64>>>> = HashMap::new();
    for (&(i, _), wins) in tasks.iter().zip(results) {
        per_election.entry(i).or_default().push(wins);
    }
    for (i, d) in dataset.iter().enumerate() {
        let Some(by_radius) = per_election.remove(&i) else { continue };
        let e = &d.election;
        for (j, &rule) in active[i].iter().enumerate() {
            let radii = cfg
                .grid
                .radii()
                .iter()
                .zip(&by_radius)
                .map(|(&rho, wins)| RadiusEstimate {
                    radius_norm: rho,
                    radius_swaps: normalized_to_swaps(rho, e.m(), e.n()),
                    samples: cfg.samples,
                    wins: wins[j].clone(),
                })
                .collect();
            let res = EstimateResult {
                election_id: d.id.clone(),
                rule,
                seed: cfg.base_seed,
                radii,
            };
            let winner = e.winners(rule)[0];
            out.thresholds.push(ThresholdResult {
                election_id: d.id.clone(),
                rule,
                culture: d.culture.clone(),
                params: d.params.clone(),
                score_margin: margins[&(i, rule)],
                threshold: threshold(&res, winner),
            });
            out.estimates.push(res);
        }
    }
    out.estimates
        .sort_by(|a, b| (&a.election_id, a.rule.name()).cmp(&(&b.election_id, b.rule.name())));
    out.thresholds
        .sort_by(|a, b| (&a.election_id, a.rule.name()).cmp(&(&b.election_id, b.rule.name())));
    out.excluded
        .sort_by(|a, b| (&a.election_id, a.rule.name()).cmp(&(&b.election_id, b.rule.name())));
    Ok(out)
}

fn write_comments<W: Write>(w: &mut W, comments: &[String]) -> Result<()> {
    for c in comments {
        writeln!(w, "# {c}")?;
    }
    Ok(())
}

impl ExperimentOutput {
    pub fn write_estimates<W: Write>(&self, mut w: W, comments: &[String]) -> Result<()> {
        write_comments(&mut w, comments)?;
        writeln!(w, "election_id,rule,radius_norm,radius_swaps,candidate,wins,samples,frequency")?;
        for res in &self.estimates {
            for x in &res.radii {
                for (c, &wins) in x.wins.iter().enumerate() {
                    writeln!(
                        w,
                        "{},{},{:.6},{},{},{},{},{:.6}",
                        res.election_id,
                        res.rule.name(),
                        x.radius_norm,
                        x.radius_swaps,
                        c,
                        wins,
                        x.samples,
                        x.frequency(CandidateId(c))
                    )?;
                }
            }
        }
        Ok(())
    }

    pub fn write_summary<W: Write>(&self, mut w: W, comments: &[String]) -> Result<()> {
        write_comments(&mut w, comments)?;
        writeln!(w, "election_id,rule,culture,params,score_margin,threshold")?;
        for t in &self.thresholds {
            let threshold = t.threshold.map_or_else(|| "none".to_string(), |x| format!("{x:.6}"));
            writeln!(
                w,
                "{},{},{},{},{},{}",
                t.election_id,
                t.rule.name(),
                t.culture,
                t.params.replace(',', ";"),
                t.score_margin,
                threshold
            )?;
        }
        Ok(())
    }

    pub fn write_excluded<W: Write>(&self, mut w: W, comments: &[String]) -> Result<()> {
        write_comments(&mut w, comments)?;
        writeln!(w, "election_id,rule,tied_winners")?;
        for x in &self.excluded {
            let winners: Vec<String> = x.winners.iter().map(usize::to_string).collect();
            writeln!(w, "{},{},{}", x.election_id, x.rule.name(), winners.join(" "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn swaps_from_normalized_radius() {
        assert_eq!(normalized_to_swaps(0.0, 10, 100), 0);
        assert_eq!(normalized_to_swaps(1.0, 10, 100), 4500);
        assert_eq!(normalized_to_swaps(0.05, 10, 100), 225);
        for (k, rho) in DistanceGrid::coarse().radii().iter().enumerate() {
            assert_eq!(normalized_to_swaps(*rho, 10, 100), 225 * (k as u64 + 1));
        }
        // 0.5 * 2 * 3 = 3 exactly; halves: 0.25 * 6 = 1.5 -> 2, 0.75 * 6 = 4.5 -> 4.
        assert_eq!(normalized_to_swaps(0.25, 3, 2), 2);
        assert_eq!(normalized_to_swaps(0.75, 3, 2), 4);
        assert_eq!(normalized_to_swaps(0.0125, 10, 50), 28);
    }

    #[test]
    fn grid_validation() {
        assert_eq!(DistanceGrid::coarse().radii().len(), 20);
        assert_eq!(DistanceGrid::fine().radii()[39], 0.5);
        assert!(DistanceGrid::new(vec![0.0, 0.5]).is_err());
        assert!(DistanceGrid::new(vec![0.5, 0.5]).is_err());
        assert!(DistanceGrid::new(vec![0.5, 1.1]).is_err());
        assert!(DistanceGrid::new(vec![]).is_err());
        assert_eq!(DistanceGrid::parse("0.1, 0.2").unwrap().radii(), &[0.1, 0.2]);
        assert!((DistanceGrid::coarse().beyond() - 1.05).abs() < 1e-12);
    }

    fn result(freqs: &[(u64, u64)]) -> EstimateResult {
        EstimateResult {
            election_id: "x".into(),
            rule: Rule::Plurality,
            seed: 0,
            radii: freqs
                .iter()
                .enumerate()
                .map(|(k, &(w, s))| RadiusEstimate {
                    radius_norm: (k + 1) as f64 / 20.0,
                    radius_swaps: 0,
                    samples: s,
                    wins: vec![w, s - w],
                })
                .collect(),
        }
    }

    #[test]
    fn threshold_examples() {
        let w = CandidateId(0);
        assert_eq!(threshold(&result(&[(10, 10), (10, 10)]), w), None);
        assert_eq!(threshold(&result(&[(9, 10), (6, 10), (4, 10), (8, 10)]), w), Some(0.15));
        assert_eq!(threshold(&result(&[(5, 10), (4, 10)]), w), Some(0.1));
    }

    #[test]
    fn margins() {
        let tie = Election::from_rankings(&[&[0, 1], &[1, 0]]);
        assert!(matches!(score_margin(&tie, Rule::Plurality), Err(Error::TiedWinners(_))));
        let (a, b, c): (&[usize], &[usize], &[usize]) = (&[0, 1, 2], &[1, 0, 2], &[2, 0, 1]);
        let mut rows = vec![a; 40];
        rows.extend(vec![b; 30]);
        rows.extend(vec![c; 30]);
        let e = Election::from_rankings(&rows);
        assert_eq!(e.scores(Rule::Plurality), vec![40, 30, 30]);
        assert_eq!(score_margin(&e, Rule::Plurality).unwrap(), 10);
    }

    #[test]
    fn radius_zero_keeps_winner() {
        let e = Election::from_rankings(&[&[0, 1, 2], &[1, 0, 2], &[0, 2, 1]]);
        let t = SamplingTables::new(3, 3);
        let mut rng = RandomSource::seeded(1);
        let wins = estimate_at_swaps(&e, &[Rule::Plurality, Rule::Borda], 0, 50, &t, &mut rng).unwrap();
        assert_eq!(wins[0], vec![50, 0, 0]);
        assert_eq!(wins[1], vec![50, 0, 0]);
    }

    #[test]
    fn empty_dataset() {
        let cfg = ExperimentConfig {
            rules: Rule::ALL.to_vec(),
            grid: DistanceGrid::coarse(),
            samples: 10,
            base_seed: 1,
            jobs: 1,
        };
        assert_eq!(run_experiment(&[], &cfg).unwrap(), ExperimentOutput::default());
    }
}
