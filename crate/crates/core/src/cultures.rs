//! Statistical cultures: random election generators and the structural
//! verifiers for the single-peaked, circular and single-crossing families.

use std::fmt;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::election::{CandidateId, Election, Vote};
use crate::error::{Error, Result};
use crate::rng::RandomSource;

/// A distribution over elections, with its parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Culture {
    /// Impartial culture: every vote uniform over all rankings.
    Ic,
    /// Pólya urn with contagion `alpha >= 0`.
    Urn { alpha: f64 },
    /// Mallows model with dispersion `phi` in `[0, 1]` around a uniformly
    /// drawn central order.
    Mallows { phi: f64 },
    /// Candidates and voters uniform in `[0,1]^dim`.
    Cube { dim: usize },
    /// Candidates and voters uniform on the unit sphere in `dim` dimensions.
    Sphere { dim: usize },
    /// Single-peaked, peak first and then a fair coin for each side.
    SpConitzer,
    /// Single-peaked, uniform over the orders single-peaked on the axis.
    SpWalsh,
    /// Conitzer's scheme on a cyclic axis.
    Spoc,
    /// Votes drawn from a random maximal single-crossing chain.
    SingleCrossing,
}

impl Culture {
    pub fn name(&self) -> &'static str {
        match self {
            Culture::Ic => "ic",
            Culture::Urn { .. } => "urn",
            Culture::Mallows { .. } => "mallows",
            Culture::Cube { .. } => "cube",
            Culture::Sphere { .. } => "sphere",
            Culture::SpConitzer => "conitzer",
            Culture::SpWalsh => "walsh",
            Culture::Spoc => "spoc",
            Culture::SingleCrossing => "single-crossing",
        }
    }

    /// Parameter as `key=value`, or `-` for parameterless cultures.
    pub fn params(&self) -> String {
        match self {
            Culture::Urn { alpha } => format!("alpha={alpha}"),
            Culture::Mallows { phi } => format!("phi={phi}"),
            Culture::Cube { dim } | Culture::Sphere { dim } => format!("t={dim}"),
            _ => "-".to_string(),
        }
    }

    /// Parses a culture from its name and a parameter string as produced by
    /// [`Culture::params`].
    pub fn parse(name: &str, params: &str) -> Result<Self> {
        let value = |key: &str| -> Result<&str> {
            params
                .split(',')
                .filter_map(|kv| kv.split_once('='))
                .find(|(k, _)| k.trim() == key)
                .map(|(_, v)| v.trim())
                .ok_or_else(|| Error::InvalidParameter(format!("culture `{name}` needs `{key}=`")))
        };
        let real = |key: &str| -> Result<f64> {
            let v = value(key)?;
            v.parse()
                .map_err(|_| Error::InvalidParameter(format!("`{key}={v}` is not a number")))
        };
        let int = |key: &str| -> Result<usize> {
            let v = value(key)?;
            v.parse()
                .map_err(|_| Error::InvalidParameter(format!("`{key}={v}` is not an integer")))
        };
        let c = match name.to_ascii_lowercase().as_str() {
            "ic" => Culture::Ic,
            "urn" => Culture::Urn { alpha: real("alpha")? },
            "mallows" => Culture::Mallows { phi: real("phi")? },
            "cube" => Culture::Cube { dim: int("t")? },
            "sphere" => Culture::Sphere { dim: int("t")? },
            "conitzer" | "sp-conitzer" => Culture::SpConitzer,
            "walsh" | "sp-walsh" => Culture::SpWalsh,
            "spoc" => Culture::Spoc,
            "single-crossing" | "sc" => Culture::SingleCrossing,
            other => return Err(Error::InvalidParameter(format!("unknown culture `{other}`"))),
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Culture::Urn { alpha } if !(alpha >= 0.0 && alpha.is_finite()) => Err(
                Error::InvalidParameter(format!("urn alpha must be a nonnegative number, got {alpha}")),
            ),
            Culture::Mallows { phi } if !(0.0..=1.0).contains(&phi) => Err(Error::InvalidParameter(
                format!("mallows phi must lie in [0, 1], got {phi}"),
            )),
            Culture::Cube { dim: 0 } | Culture::Sphere { dim: 0 } => Err(Error::InvalidParameter(
                "euclidean dimension must be positive".into(),
            )),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Culture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.params().as_str() {
            "-" => f.write_str(self.name()),
            p => write!(f, "{}({p})", self.name()),
        }
    }
}

/// A culture together with the election size and the seed that fixes the
/// draw.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CultureSpec {
    pub culture: Culture,
    pub m: usize,
    pub n: usize,
    pub seed: u64,
}

impl CultureSpec {
    /// Draws the election determined by `seed`.
    pub fn generate(&self) -> Result<Election> {
        generate(self, &mut RandomSource::seeded(self.seed))
    }
}

/// A generated election, with the axis for axis-based cultures.
#[derive(Debug, Clone, PartialEq)]
pub struct Generated {
    pub election: Election,
    pub axis: Option<Vec<CandidateId>>,
}

/// Draws an election from `spec.culture` using `rng` (the seed in `spec` is
/// not consulted).
pub fn generate<R: Rng + ?Sized>(spec: &CultureSpec, rng: &mut R) -> Result<Election> {
    Ok(generate_detailed(spec, rng)?.election)
}

pub fn generate_detailed<R: Rng + ?Sized>(spec: &CultureSpec, rng: &mut R) -> Result<Generated> {
    spec.culture.validate()?;
    let (m, n) = (spec.m, spec.n);
    if m == 0 || n == 0 {
        return Err(Error::InvalidParameter(format!(
            "need at least one candidate and one voter, got m={m}, n={n}"
        )));
    }
    let mut axis = None;
    let rankings: Vec<Vec<usize>> = match spec.culture {
        Culture::Ic => (0..n).map(|_| uniform_ranking(m, rng)).collect(),
        Culture::Urn { alpha } => urn(m, n, alpha, rng),
        Culture::Mallows { phi } => {
            let center = uniform_ranking(m, rng);
            (0..n).map(|_| mallows(&center, phi, rng)).collect()
        }
        Culture::Cube { dim } => euclidean(m, n, || (0..dim).map(|_| rng.gen::<f64>()).collect()),
        Culture::Sphere { dim } => euclidean(m, n, || sphere_point(dim, rng)),
        Culture::SpConitzer => {
            let ax = uniform_ranking(m, rng);
            let votes = (0..n).map(|_| conitzer(&ax, false, rng)).collect();
            axis = Some(ax);
            votes
        }
        Culture::Spoc => {
            let ax = uniform_ranking(m, rng);
            let votes = (0..n).map(|_| conitzer(&ax, true, rng)).collect();
            axis = Some(ax);
            votes
        }
        Culture::SpWalsh => {
            let ax = uniform_ranking(m, rng);
            let votes = (0..n).map(|_| walsh(&ax, rng)).collect();
            axis = Some(ax);
            votes
        }
        Culture::SingleCrossing => single_crossing(m, n, rng),
    };
    let votes = rankings
        .into_iter()
        .map(Vote::new)
        .collect::<Result<Vec<_>>>()?;
    Ok(Generated {
        election: Election::from_votes(votes)?,
        axis: axis.map(|a| a.into_iter().map(CandidateId).collect()),
    })
}

fn uniform_ranking<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Vec<usize> {
    let mut r: Vec<usize> = (0..m).collect();
    r.shuffle(rng);
    r
}

/// Sequential form of the Pólya urn: vote `i` (0-based) copies one of the
/// `i` earlier votes with probability `i*alpha / (1 + i*alpha)`.
fn urn<R: Rng + ?Sized>(m: usize, n: usize, alpha: f64, rng: &mut R) -> Vec<Vec<usize>> {
    let mut votes: Vec<Vec<usize>> = Vec::with_capacity(n);
    for i in 0..n {
        let w = i as f64 * alpha;
        if i > 0 && rng.gen::<f64>() < w / (1.0 + w) {
            let j = rng.gen_range(0..i);
            votes.push(votes[j].clone());
        } else {
            votes.push(uniform_ranking(m, rng));
        }
    }
    votes
}

/// Repeated insertion: the `j`-th candidate of the center (0-based) goes to
/// position `i <= j` with weight `phi^(j - i)`.
fn mallows<R: Rng + ?Sized>(center: &[usize], phi: f64, rng: &mut R) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::with_capacity(center.len());
    for (j, &c) in center.iter().enumerate() {
        let weights: Vec<f64> = (0..=j).map(|i| phi.powi((j - i) as i32)).collect();
        let total: f64 = weights.iter().sum();
        let mut x = rng.gen::<f64>() * total;
        let mut pos = j;
        for (i, w) in weights.iter().enumerate() {
            if x < *w {
                pos = i;
                break;
            }
            x -= w;
        }
        out.insert(pos, c);
    }
    out
}

fn sphere_point<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let p: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
        let norm = p.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            return p.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// Candidates first, then voters; each voter ranks by Euclidean distance
/// with ties going to the lower index.
fn euclidean(m: usize, n: usize, mut point: impl FnMut() -> Vec<f64>) -> Vec<Vec<usize>> {
    let cands: Vec<Vec<f64>> = (0..m).map(|_| point()).collect();
    (0..n)
        .map(|_| {
            let v = point();
            let d: Vec<f64> = cands
                .iter()
                .map(|c| c.iter().zip(&v).map(|(a, b)| (a - b) * (a - b)).sum())
                .collect();
            let mut order: Vec<usize> = (0..m).collect();
            order.sort_by(|&a, &b| d[a].total_cmp(&d[b]).then(a.cmp(&b)));
            order
        })
        .collect()
}

/// Uniform peak, then extend left or right with a fair coin. On a cyclic
/// axis neither side runs out until the vote is complete.
fn conitzer<R: Rng + ?Sized>(axis: &[usize], cyclic: bool, rng: &mut R) -> Vec<usize> {
    let m = axis.len();
    let peak = rng.gen_range(0..m);
    let mut vote = vec![axis[peak]];
    // Offsets of the ranked interval around the peak.
    let (mut left, mut right) = (0usize, 0usize);
    while vote.len() < m {
        let can_left = cyclic || peak > left;
        let can_right = cyclic || peak + right + 1 < m;
        let go_left = match (can_left, can_right) {
            (true, true) => rng.gen_bool(0.5),
            (l, _) => l,
        };
        let idx = if go_left {
            left += 1;
            (peak + m - left % m) % m
        } else {
            right += 1;
            (peak + right) % m
        };
        vote.push(axis[idx]);
    }
    vote
}

/// Builds the vote from the bottom: the least preferred remaining candidate
/// is either end of the remaining axis interval, each with probability 1/2.
fn walsh<R: Rng + ?Sized>(axis: &[usize], rng: &mut R) -> Vec<usize> {
    let (mut lo, mut hi) = (0usize, axis.len() - 1);
    let mut bottom_up = Vec::with_capacity(axis.len());
    while lo < hi {
        if rng.gen_bool(0.5) {
            bottom_up.push(axis[lo]);
            lo += 1;
        } else {
            bottom_up.push(axis[hi]);
            hi -= 1;
        }
    }
    bottom_up.push(axis[lo]);
    bottom_up.reverse();
    bottom_up
}

/// A random maximal chain from a uniform order to its reverse, each step
/// swapping an adjacent pair that has not been swapped before; the `n` votes
/// are drawn from the chain with replacement and kept in chain order.
fn single_crossing<R: Rng + ?Sized>(m: usize, n: usize, rng: &mut R) -> Vec<Vec<usize>> {
    let start = uniform_ranking(m, rng);
    let mut rank_in_start = vec![0usize; m];
    for (i, &c) in start.iter().enumerate() {
        rank_in_start[c] = i;
    }
    let mut cur = start;
    let mut chain = vec![cur.clone()];
    loop {
        // A pair is still unswapped iff it keeps its starting order.
        let admissible: Vec<usize> = (0..m.saturating_sub(1))
            .filter(|&k| rank_in_start[cur[k]] < rank_in_start[cur[k + 1]])
            .collect();
        let Some(&k) = admissible.choose(rng) else { break };
        cur.swap(k, k + 1);
        chain.push(cur.clone());
    }
    let mut picks: Vec<usize> = (0..n).map(|_| rng.gen_range(0..chain.len())).collect();
    picks.sort_unstable();
    picks.into_iter().map(|i| chain[i].clone()).collect()
}

fn axis_positions(axis: &[CandidateId], m: usize) -> Option<Vec<usize>> {
    if axis.len() != m {
        return None;
    }
    let mut pos = vec![usize::MAX; m];
    for (i, c) in axis.iter().enumerate() {
        if c.0 >= m || pos[c.0] != usize::MAX {
            return None;
        }
        pos[c.0] = i;
    }
    Some(pos)
}

/// Whether every prefix of `v` is an interval of `axis`. Returns false when
/// `axis` is not a permutation of `v`'s candidates.
pub fn is_single_peaked(v: &Vote, axis: &[CandidateId]) -> bool {
    let Some(pos) = axis_positions(axis, v.len()) else {
        return false;
    };
    let mut ranking = v.ranking().iter();
    let Some(&first) = ranking.next() else {
        return true;
    };
    let (mut lo, mut hi) = (pos[first], pos[first]);
    for &c in ranking {
        let p = pos[c];
        if p + 1 == lo {
            lo = p;
        } else if p == hi + 1 {
            hi = p;
        } else {
            return false;
        }
    }
    true
}

/// Whether every prefix of `v` is an interval of the cyclic `axis`.
pub fn is_single_peaked_on_circle(v: &Vote, axis: &[CandidateId]) -> bool {
    let m = v.len();
    let Some(pos) = axis_positions(axis, m) else {
        return false;
    };
    let mut ranking = v.ranking().iter();
    let Some(&first) = ranking.next() else {
        return true;
    };
    // The prefix covers axis positions lo, lo+1, ..., lo+len-1 (mod m).
    let (mut lo, mut len) = (pos[first], 1usize);
    for &c in ranking {
        let p = pos[c];
        if p == (lo + m - 1) % m {
            lo = p;
        } else if p != (lo + len) % m {
            return false;
        }
        len += 1;
    }
    true
}

/// Whether, for every pair of candidates, the voters preferring the first
/// form a prefix or a suffix of the voter sequence.
pub fn is_single_crossing(e: &Election) -> bool {
    let positions: Vec<Vec<usize>> = e.votes().iter().map(Vote::positions).collect();
    let m = e.m();
    for a in 0..m {
        for b in a + 1..m {
            let flips = positions
                .windows(2)
                .filter(|w| (w[0][a] < w[0][b]) != (w[1][a] < w[1][b]))
                .count();
            if flips > 1 {
                return false;
            }
        }
    }
    true
}

/// One line of a dataset manifest.
#[derive(Debug, Clone, PartialEq)]
pub struct ManifestEntry {
    pub id: String,
    pub spec: CultureSpec,
}

impl ManifestEntry {
    /// Where the election file of this entry lives, next to the manifest.
    pub fn election_path(&self, manifest_dir: &Path) -> PathBuf {
        manifest_dir.join(format!("{}.election", self.id))
    }
}

const MANIFEST_COLUMNS: &str = "id\tculture\tparams\tm\tn\tseed";

/// Writes a tab-separated manifest with a column header and optional
/// `#` comment lines.
pub fn write_manifest<W: Write>(mut w: W, entries: &[ManifestEntry], comments: &[String]) -> Result<()> {
    for c in comments {
        writeln!(w, "# {c}")?;
    }
    writeln!(w, "{MANIFEST_COLUMNS}")?;
    for e in entries {
        let s = &e.spec;
        writeln!(
            w,
            "{}\t{}\t{}\t{}\t{}\t{}",
            e.id,
            s.culture.name(),
            s.culture.params(),
            s.m,
            s.n,
            s.seed
        )?;
    }
    Ok(())
}

pub fn read_manifest<R: BufRead>(reader: R) -> Result<Vec<ManifestEntry>> {
    let mut out = Vec::new();
    let mut ids = std::collections::HashSet::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') || t == MANIFEST_COLUMNS {
            continue;
        }
        let parse = |msg: String| Error::Parse { line: i + 1, msg };
        let cols: Vec<&str> = t.split('\t').collect();
        let [id, culture, params, m, n, seed] = cols[..] else {
            return Err(parse(format!("expected 6 tab-separated columns, got {}", cols.len())));
        };
        let num = |s: &str, what: &str| -> Result<u64> {
            s.parse().map_err(|_| parse(format!("bad {what} `{s}`")))
        };
        if !ids.insert(id.to_string()) {
            return Err(parse(format!("duplicate id `{id}`")));
        }
        out.push(ManifestEntry {
            id: id.to_string(),
            spec: CultureSpec {
                culture: Culture::parse(culture, params).map_err(|e| parse(e.to_string()))?,
                m: num(m, "m")? as usize,
                n: num(n, "n")? as usize,
                seed: num(seed, "seed")?,
            },
        });
    }
    Ok(out)
}

/// The default dataset: one election per (culture, parameter) cell.
pub fn default_cultures() -> Vec<Culture> {
    let mut out = vec![Culture::Ic];
    out.extend([0.05, 0.1, 0.2, 0.5, 1.0].map(|alpha| Culture::Urn { alpha }));
    out.extend([0.1, 0.2, 0.35, 0.5, 0.65, 0.8, 0.95].map(|phi| Culture::Mallows { phi }));
    out.extend([1, 2, 3, 5, 10, 20].map(|dim| Culture::Cube { dim }));
    out.extend([2, 3, 5].map(|dim| Culture::Sphere { dim }));
    out.extend([
        Culture::SpConitzer,
        Culture::SpWalsh,
        Culture::Spoc,
        Culture::SingleCrossing,
    ]);
    out
}
