//! `swapcount`: generate elections, count bribery solutions, estimate
//! winning probabilities at a swap distance and run the self-checks.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 a guard refused the
//! instance, 3 a self-check failed.

mod config;

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{ConfigFile, Resolver, RunRecord};
use swapcount::bribery::{count_shift, count_swap, CostFunction, Guards, ShiftMode};
use swapcount::cultures::{default_cultures, write_manifest, Culture, CultureSpec, ManifestEntry};
use swapcount::experiments::{load_dataset, run_experiment, DistanceGrid, ExperimentConfig};
use swapcount::format::{read_election, read_soc, write_election};
use swapcount::rng::{derive_seed, stable_hash};
use swapcount::selftest::{self, Level};
use swapcount::{CandidateId, Election, ElectionCountTable, Error, MahonianTable, Result, Rule};

#[derive(Parser)]
#[command(name = "swapcount", version, about)]
struct Cli {
    /// Flat `key = value` file supplying defaults for any long flag.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw elections from a statistical culture and write them with a manifest.
    Generate(GenerateArgs),
    /// Print the exact number of bribery solutions.
    Count(CountArgs),
    /// Estimate winning frequencies over a dataset; writes estimates, summary and exclusions.
    Estimate(ExperimentArgs),
    /// Like `estimate`, but writes only the threshold summary and exclusions.
    Threshold(ExperimentArgs),
    /// Build and save an election-count table.
    Tables(TablesArgs),
    /// Check tables, sampler and counters against brute force.
    Selftest(SelftestArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// ic, urn, mallows, cube, sphere, conitzer, walsh, spoc, single-crossing,
    /// or `default` for one election per cell of the built-in culture grid.
    #[arg(long)]
    culture: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    phi: Option<f64>,
    /// Dimension of the cube or sphere.
    #[arg(long)]
    t: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    /// Elections per culture.
    #[arg(long)]
    count: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; receives `<id>.election` files and `manifest.tsv`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Id prefix; defaults to the culture name.
    #[arg(long)]
    prefix: Option<String>,
    /// Add to an existing manifest instead of replacing it.
    #[arg(long)]
    append: bool,
}

#[derive(Args)]
struct CountArgs {
    /// Election file; `.soc` files are read as PrefLib.
    #[arg(long)]
    input: Option<PathBuf>,
    /// `swap` or `shift`.
    #[arg(long)]
    problem: Option<String>,
    #[arg(long)]
    rule: Option<String>,
    /// `constructive` or `destructive` (shift only).
    #[arg(long)]
    mode: Option<String>,
    /// Designated candidate, by index or name.
    #[arg(long)]
    p: Option<String>,
    #[arg(long)]
    r: Option<u64>,
    /// Shift costs: one line per voter, costs of shifting by 0, 1, 2, ...
    #[arg(long)]
    costs: Option<PathBuf>,
    /// Count by brute force.
    #[arg(long)]
    oracle: bool,
    #[arg(long)]
    max_voters: Option<usize>,
    #[arg(long)]
    max_radius: Option<u64>,
    #[arg(long)]
    oracle_states: Option<u128>,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated rules.
    #[arg(long)]
    rules: Option<String>,
    /// `coarse`, `fine`, or comma-separated normalized radii in (0, 1].
    #[arg(long)]
    grid: Option<String>,
    /// Samples per radius; 500 for the coarse grid and 10000 for the fine one.
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; the output does not depend on it.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct TablesArgs {
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SelftestArgs {
    /// Run the fast subset only.
    #[arg(long)]
    quick: bool,
    /// Also verify a saved table.
    #[arg(long)]
    cache: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::GuardExceeded { .. } => 2,
        Error::Checksum(_) => 3,
        _ => 1,
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let file = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    match cli.command {
        Command::Generate(a) => generate(a, &file),
        Command::Count(a) => count(a, &file),
        Command::Estimate(a) => experiment(a, &file, true),
        Command::Threshold(a) => experiment(a, &file, false),
        Command::Tables(a) => tables(a, &file),
        Command::Selftest(a) => selftest(a, &file),
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let f = File::create(path).map_err(|e| {
        Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    })?;
    Ok(BufWriter::new(f))
}

fn generate(a: GenerateArgs, file: &ConfigFile) -> Result<ExitCode> {
    let mut res = Resolver::new(file, "generate");
    let name: String = res.required("culture", a.culture)?;
    let alpha = res.optional("alpha", a.alpha)?;
    let phi = res.optional("phi", a.phi)?;
    let t = res.optional("t", a.t)?;
    let m = res.value("m", a.m, 10)?;
    let n = res.value("n", a.n, 100)?;
    let count = res.value("count", a.count, 1)?;
    let seed = res.value("seed", a.seed, 1)?;
    let out = res.location("out", a.out)?;
    let prefix = res.optional("prefix", a.prefix)?;

    let cultures = if name == "default" {
        default_cultures()
    } else {
        let mut params = Vec::new();
        if let Some(x) = alpha {
            params.push(format!("alpha={x}"));
        }
        if let Some(x) = phi {
            params.push(format!("phi={x}"));
        }
        if let Some(x) = t {
            params.push(format!("t={x}"));
        }
        vec![Culture::parse(&name, &params.join(","))?]
    };
    let record = res.finish();
    let header = record.header();

    std::fs::create_dir_all(&out)?;
    let manifest_path = out.join("manifest.tsv");
    let mut entries: Vec<ManifestEntry> = if a.append && manifest_path.exists() {
        swapcount::cultures::read_manifest(BufReader::new(File::open(&manifest_path)?))?
    } else {
        Vec::new()
    };
    for culture in &cultures {
        let stem = match (&prefix, cultures.len()) {
            (Some(p), 1) => p.clone(),
            (Some(p), _) => format!("{p}-{}", slug(culture)),
            (None, _) => slug(culture),
        };
        for k in 0..count {
            let spec = CultureSpec {
                culture: *culture,
                m,
                n,
                seed: derive_seed(seed, &[stable_hash(&culture.to_string()), k as u64]),
            };
            let entry = ManifestEntry { id: format!("{stem}-{k:03}"), spec };
            let e = spec.generate()?;
            let mut comments = header.clone();
            comments.push(format!("culture {culture} seed {}", spec.seed));
            let mut w = create(&entry.election_path(&out))?;
            write_election(&mut w, &e, &comments)?;
            w.flush()?;
            entries.retain(|x| x.id != entry.id);
            entries.push(entry);
        }
    }
    let mut w = create(&manifest_path)?;
    write_manifest(&mut w, &entries, &header)?;
    w.flush()?;
    println!("wrote {} elections to {}", cultures.len() * count, out.display());
    Ok(ExitCode::SUCCESS)
}

/// File-name friendly culture label, e.g. `urn-alpha0.1`.
fn slug(c: &Culture) -> String {
    match c.params().as_str() {
        "-" => c.name().to_string(),
        p => format!("{}-{}", c.name(), p.replace(['=', ','], "")),
    }
}

fn read_any_election(path: &Path) -> Result<Election> {
    let f = BufReader::new(File::open(path).map_err(|e| {
        Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    })?);
    match path.extension().and_then(|x| x.to_str()) {
        Some("soc") => read_soc(f),
        _ => read_election(f),
    }
}

fn read_costs(path: &Path) -> Result<CostFunction> {
    let text = std::fs::read_to_string(path)?;
    let mut table = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|x| !x.is_empty())
            .map(|x| {
                x.parse::<u64>().map_err(|_| Error::Parse {
                    line: i + 1,
                    msg: format!("bad cost `{x}`"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        table.push(row);
    }
    CostFunction::from_table(table)
}

fn candidate(e: &Election, p: &str) -> Result<CandidateId> {
    let c = match p.parse::<usize>() {
        Ok(i) => CandidateId(i),
        Err(_) => CandidateId(
            e.names()
                .iter()
                .position(|n| n == p)
                .ok_or_else(|| Error::InvalidParameter(format!("no candidate named `{p}`")))?,
        ),
    };
    e.check_candidate(c)?;
    Ok(c)
}

fn count(a: CountArgs, file: &ConfigFile) -> Result<ExitCode> {
    let mut res = Resolver::new(file, "count");
    let input: String = res.required("input", a.input.map(|p| p.display().to_string()))?;
    let problem: String = res.value("problem", a.problem, "swap".into())?;
    let rule: Rule = res.value("rule", a.rule, "plurality".into())?.parse()?;
    let mode: ShiftMode = res.value("mode", a.mode, "constructive".into())?.parse()?;
    let p: String = res.required("p", a.p)?;
    let r: u64 = res.required("r", a.r)?;
    let costs_path = res.optional("costs", a.costs.map(|p| p.display().to_string()))?;
    let defaults = Guards::default();
    let guards = Guards {
        max_voters: res.value("max-voters", a.max_voters, defaults.max_voters)?,
        max_radius: res.value("max-radius", a.max_radius, defaults.max_radius)?,
        oracle_states: res.value("oracle-states", a.oracle_states, defaults.oracle_states)?,
    };
    let oracle = a.oracle || res.value("oracle", None, false)?;

    let e = read_any_election(Path::new(&input))?;
    let p = candidate(&e, &p)?;
    let n = match problem.as_str() {
        "swap" => {
            if costs_path.is_some() {
                return Err(Error::InvalidParameter("swap-bribery uses unit prices; drop --costs".into()));
            }
            count_swap(&e, p, r, rule, &guards, oracle)?
        }
        "shift" => {
            let costs = match costs_path {
                Some(path) => read_costs(Path::new(&path))?,
                None => CostFunction::Unit,
            };
            count_shift(&e, p, r, &costs, mode, rule, &guards, oracle)?
        }
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown problem `{other}`, expected swap or shift"
            )))
        }
    };
    println!("{n}");
    Ok(ExitCode::SUCCESS)
}

fn experiment(a: ExperimentArgs, file: &ConfigFile, estimates: bool) -> Result<ExitCode> {
    let mut res = Resolver::new(file, if estimates { "estimate" } else { "threshold" });
    let manifest: String = res.required("manifest", a.manifest.map(|p| p.display().to_string()))?;
    let out = res.location("out", a.out)?;
    let rules: String = res.value("rules", a.rules, "plurality,borda".into())?;
    let grid_spec: String = res.value("grid", a.grid, "coarse".into())?;
    let grid = DistanceGrid::parse(&grid_spec)?;
    let default_samples = if grid_spec.trim() == "fine" { 10_000 } else { 500 };
    let samples = res.value("samples", a.samples, default_samples)?;
    let seed = res.value("seed", a.seed, 1)?;
    // Not recorded: the output is the same for every job count.
    let jobs = match a.jobs {
        Some(j) => j,
        None => Resolver::new(file, "").value("jobs", None, 0)?,
    };
    let jobs = if jobs == 0 {
        std::thread::available_parallelism().map_or(1, |n| n.get())
    } else {
        jobs
    };
    let rules = rules
        .split(',')
        .map(|x| x.trim().parse())
        .collect::<Result<Vec<Rule>>>()?;
    let record: RunRecord = res.finish();

    let dataset = load_dataset(Path::new(&manifest))?;
    let cfg = ExperimentConfig { rules, grid, samples, base_seed: seed, jobs };
    let result = run_experiment(&dataset, &cfg)?;

    std::fs::create_dir_all(&out)?;
    let header = record.header();
    if estimates {
        let mut w = create(&out.join("estimates.csv"))?;
        result.write_estimates(&mut w, &header)?;
        w.flush()?;
    }
    let mut w = create(&out.join("summary.csv"))?;
    result.write_summary(&mut w, &header)?;
    w.flush()?;
    let mut w = create(&out.join("excluded.csv"))?;
    result.write_excluded(&mut w, &header)?;
    w.flush()?;
    println!(
        "{} elections, {} excluded for ties; results in {}",
        dataset.len(),
        result.excluded.len(),
        out.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn tables(a: TablesArgs, file: &ConfigFile) -> Result<ExitCode> {
    let mut res = Resolver::new(file, "tables");
    let m = res.required("m", a.m)?;
    let n = res.required("n", a.n)?;
    let out = res.location("out", a.out)?;
    let t = ElectionCountTable::build(&MahonianTable::build(m), m, n)?;
    t.save(&out)?;
    println!("wrote table m={m} n<={n} to {}", out.display());
    Ok(ExitCode::SUCCESS)
}

fn selftest(a: SelftestArgs, file: &ConfigFile) -> Result<ExitCode> {
    let mut res = Resolver::new(file, "selftest");
    let seed = res.value("seed", a.seed, 1)?;
    let cache = res.optional("cache", a.cache.map(|p| p.display().to_string()))?;
    let quick = a.quick || res.value("quick", None, false)?;
    let level = if quick { Level::Quick } else { Level::Full };
    let reports = selftest::run(level, seed, cache.as_deref().map(Path::new));
    let mut failed = 0;
    for r in &reports {
        let status = if r.passed { "PASS" } else { "FAIL" };
        println!("{status} {} ({:.2}s): {}", r.name, r.seconds, r.detail);
        failed += usize::from(!r.passed);
    }
    if failed > 0 {
        println!("{failed} of {} checks failed", reports.len());
        return Ok(ExitCode::from(3));
    }
    println!("all {} checks passed", reports.len());
    Ok(ExitCode::SUCCESS)
}
