//! Command-line front end.
//!
//! Exit status: 0 on success, 1 for malformed or unreadable input, 2 for an
//! invalid configuration (bad flags, unknown candidate, out-of-range sizes).
//! Candidate lists are printed in declaration order.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::ballots::{pairwise_tallies, parse_profile, random_profile, PreferenceProfile, TallyMatrix};
use crate::bottleneck::{apbp, schulze_ranking, verify_winner, winners_from_bottlenecks};
use crate::dominance::{parse_matrix, DominanceInstance};
use crate::majority_graph::{
    comparison_graph_from_tallies, pairwise_tallies_fast, parse_graph, random_margin_graph, ComparisonGraph, Strength,
};
use crate::reductions::{dominance_to_wmg_instance, dominating_pairs_to_schulze_instance};
use crate::winners::{find_all_winners_with, find_winner_with, Engine, Options};

#[derive(Debug, Parser)]
#[command(
    name = "schulze",
    version,
    about = "Schulze method: tallies, winners, rankings and reduction instances"
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Pairwise tallies or comparison graph of a ballot file.
    Tally(TallyArgs),
    /// Schulze winners of a ballot file or graph.
    Winners(WinnersArgs),
    /// Whether one candidate is a Schulze winner.
    Verify(VerifyArgs),
    /// Full Schulze order, one tie-class per line.
    Rank(RankArgs),
    /// Seeded random ballot file or graph.
    Gen(GenArgs),
    /// Voting instance from a pair of matrices.
    Reduce(ReduceArgs),
    /// Timing sweeps as `m,algo,seconds` rows.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TallyAlgo {
    Naive,
    Fast,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WinnerAlgo {
    Baseline,
    Dscc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EngineArg {
    Batch,
    PerEdge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    Profile,
    Graph,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReduceKind {
    Wmg,
    Winner,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BenchTask {
    Winners,
    Tally,
}

/// Input that may be a ballot file or a graph file.
#[derive(Debug, Args)]
pub struct ElectionInput {
    /// Ballot or graph file (`-` for stdin). Graph files start with `wmg`.
    #[arg(short, long = "input", default_value = "-")]
    pub input: PathBuf,
    /// Link strength used when the input is a ballot file.
    #[arg(long, default_value = "margin")]
    pub strength: String,
}

#[derive(Debug, Args)]
pub struct TallyArgs {
    /// Ballot file (`-` for stdin).
    #[arg(short, long = "input", default_value = "-")]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = TallyAlgo::Naive)]
    pub algo: TallyAlgo,
    #[arg(long, default_value = "margin")]
    pub strength: String,
    /// Bucket size of the blocked dominance product (fast only).
    #[arg(long)]
    pub block_size: Option<usize>,
    /// Print the tally matrix `M` instead of the graph.
    #[arg(long)]
    pub tallies: bool,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct WinnersArgs {
    #[command(flatten)]
    pub election: ElectionInput,
    #[arg(long, value_enum, default_value_t = WinnerAlgo::Dscc)]
    pub algo: WinnerAlgo,
    #[arg(long, value_enum, default_value_t = EngineArg::Batch)]
    pub engine: EngineArg,
    /// Print every winner (default).
    #[arg(long, conflicts_with = "one")]
    pub all: bool,
    /// Print a single winner.
    #[arg(long)]
    pub one: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub election: ElectionInput,
    #[arg(short, long)]
    pub candidate: String,
}

#[derive(Debug, Args)]
pub struct RankArgs {
    #[command(flatten)]
    pub election: ElectionInput,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(value_enum, default_value_t = GenKind::Profile)]
    pub kind: GenKind,
    #[arg(long)]
    pub m: usize,
    /// Voters for a profile; weight bound for a graph.
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0.0)]
    pub tie_prob: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file (stdout if absent).
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReduceArgs {
    /// Matrix files `A` and `B`, in that order.
    #[arg(short, long = "input", required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t = ReduceKind::Wmg)]
    pub kind: ReduceKind,
    /// Ballot file to write (stdout if absent).
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Role sidecar; defaults to `<output>.roles.json` when `-o` is given.
    #[arg(long)]
    pub roles: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_enum, default_value_t = BenchTask::Winners)]
    pub task: BenchTask,
    /// Candidate counts to sweep.
    #[arg(long, value_delimiter = ',', default_values_t = [250usize, 500, 1000])]
    pub sizes: Vec<usize>,
    /// Algorithms: dscc, dscc-one, baseline (winners); naive, fast (tally).
    #[arg(long, value_delimiter = ',')]
    pub algos: Option<Vec<String>>,
    /// Bucket sizes swept by `fast` (default: the built-in choice only).
    #[arg(long, value_delimiter = ',')]
    pub bucket_sizes: Option<Vec<usize>>,
    /// Weight bound for graphs; voters for profiles.
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Repetitions per row; the fastest is reported.
    #[arg(long, default_value_t = 1)]
    pub trials: usize,
}

#[derive(Debug)]
enum Failure {
    Input(String),
    Config(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Input(_) => 1,
            Failure::Config(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Config(m) => m,
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                2
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    match dispatch(&config, out) {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message());
            f.code()
        }
    }
}

fn dispatch(config: &RunConfig, out: &mut dyn Write) -> Outcome {
    match &config.command {
        Command::Tally(a) => tally(a, out),
        Command::Winners(a) => winners(a, out),
        Command::Verify(a) => verify(a, out),
        Command::Rank(a) => rank(a, out),
        Command::Gen(a) => gen(a, out),
        Command::Reduce(a) => reduce(a, out),
        Command::Bench(a) => bench(a, out),
    }
}

fn read_input(path: &Path) -> Result<String, Failure> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        return Ok(s);
    }
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn write_output(path: &Path, text: &str) -> Outcome {
    std::fs::write(path, text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

fn parse_strength(s: &str) -> Result<Strength, Failure> {
    s.parse()
        .map_err(|e: crate::majority_graph::UnsupportedStrength| Failure::Config(e.to_string()))
}

fn load_profile(path: &Path) -> Result<PreferenceProfile, Failure> {
    let text = read_input(path)?;
    parse_profile(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn is_graph_text(text: &str) -> bool {
    text.lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'))
        .is_some_and(|l| l.split_whitespace().next() == Some("wmg"))
}

fn load_election(input: &ElectionInput) -> Result<ComparisonGraph, Failure> {
    let strength = parse_strength(&input.strength)?;
    let text = read_input(&input.input)?;
    let shown = input.input.display();
    if is_graph_text(&text) {
        return parse_graph(&text).map_err(|e| Failure::Input(format!("{shown}: {e}")));
    }
    let profile = parse_profile(&text).map_err(|e| Failure::Input(format!("{shown}: {e}")))?;
    Ok(comparison_graph_from_tallies(
        profile.candidates().to_vec(),
        &pairwise_tallies(&profile),
        strength,
    ))
}

fn tally(args: &TallyArgs, out: &mut dyn Write) -> Outcome {
    let strength = parse_strength(&args.strength)?;
    if args.block_size == Some(0) {
        return Err(Failure::Config("--block-size must be positive".into()));
    }
    if args.block_size.is_some() && args.algo != TallyAlgo::Fast {
        return Err(Failure::Config("--block-size applies to --algo fast only".into()));
    }
    let profile = load_profile(&args.input)?;
    let tallies = match args.algo {
        TallyAlgo::Naive => pairwise_tallies(&profile),
        TallyAlgo::Fast => pairwise_tallies_fast(&profile, args.block_size),
    };
    let names = profile.candidates();
    let text = if args.tallies {
        tally_text(names, &tallies, args.format)
    } else {
        let graph = comparison_graph_from_tallies(names.to_vec(), &tallies, strength);
        match args.format {
            Format::Text => graph.to_text(),
            Format::Csv => graph_csv(&graph),
        }
    };
    out.write_all(text.as_bytes())?;
    Ok(())
}

fn tally_text(names: &[String], tallies: &TallyMatrix, format: Format) -> String {
    let sep = match format {
        Format::Text => " ",
        Format::Csv => ",",
    };
    let mut s = String::new();
    match format {
        Format::Text => writeln!(s, "# {}", names.join(" ")).unwrap(),
        Format::Csv => writeln!(s, "candidate,{}", names.join(",")).unwrap(),
    }
    for (u, name) in names.iter().enumerate() {
        let row: Vec<String> = tallies.row(u).iter().map(u64::to_string).collect();
        match format {
            Format::Text => writeln!(s, "{}", row.join(sep)).unwrap(),
            Format::Csv => writeln!(s, "{name}{sep}{}", row.join(sep)).unwrap(),
        }
    }
    s
}

fn graph_csv(graph: &ComparisonGraph) -> String {
    let names = graph.candidates();
    let mut s = String::from("source,target,weight\n");
    for u in 0..graph.m() {
        for v in 0..graph.m() {
            if u != v {
                writeln!(s, "{},{},{}", names[u], names[v], graph.weight(u, v)).unwrap();
            }
        }
    }
    s
}

fn winners(args: &WinnersArgs, out: &mut dyn Write) -> Outcome {
    let graph = load_election(&args.election)?;
    let opts = Options {
        engine: match args.engine {
            EngineArg::Batch => Engine::Batch,
            EngineArg::PerEdge => Engine::PerEdge,
        },
        ..Options::default()
    };
    let chosen: Vec<usize> = match (args.algo, args.one) {
        (WinnerAlgo::Dscc, false) => find_all_winners_with(&graph, &opts).0,
        (WinnerAlgo::Dscc, true) => vec![find_winner_with(&graph, &opts).0],
        (WinnerAlgo::Baseline, one) => {
            let all = winners_from_bottlenecks(&apbp(&graph));
            if one {
                all.into_iter().take(1).collect()
            } else {
                all
            }
        }
    };
    for c in chosen {
        writeln!(out, "{}", graph.candidates()[c])?;
    }
    Ok(())
}

fn verify(args: &VerifyArgs, out: &mut dyn Write) -> Outcome {
    let graph = load_election(&args.election)?;
    let c = graph
        .candidate_index(&args.candidate)
        .ok_or_else(|| Failure::Config(format!("unknown candidate `{}`", args.candidate)))?;
    writeln!(out, "{}", if verify_winner(&graph, c) { "yes" } else { "no" })?;
    Ok(())
}

fn rank(args: &RankArgs, out: &mut dyn Write) -> Outcome {
    let graph = load_election(&args.election)?;
    let classes = schulze_ranking(&apbp(&graph)).map_err(|e| Failure::Input(e.to_string()))?;
    let names = graph.candidates();
    match args.format {
        Format::Text => {
            for class in classes {
                let line: Vec<&str> = class.iter().map(|&c| names[c].as_str()).collect();
                writeln!(out, "{}", line.join(" = "))?;
            }
        }
        Format::Csv => {
            writeln!(out, "position,candidate")?;
            for (pos, class) in classes.iter().enumerate() {
                for &c in class {
                    writeln!(out, "{},{}", pos + 1, names[c])?;
                }
            }
        }
    }
    Ok(())
}

fn gen(args: &GenArgs, out: &mut dyn Write) -> Outcome {
    if args.m == 0 {
        return Err(Failure::Config("--m must be at least 1".into()));
    }
    let text = match args.kind {
        GenKind::Profile => {
            if args.n == 0 {
                return Err(Failure::Config("--n must be at least 1".into()));
            }
            if !(0.0..=1.0).contains(&args.tie_prob) {
                return Err(Failure::Config("--tie-prob must be within [0, 1]".into()));
            }
            random_profile(args.m, args.n, args.tie_prob, args.seed).to_ballot_text()
        }
        GenKind::Graph => {
            let bound = i64::try_from(args.n).map_err(|_| Failure::Config("--n is too large".into()))?;
            random_margin_graph(args.m, bound, args.seed).to_text()
        }
    };
    match &args.output {
        Some(path) => write_output(path, &text),
        None => Ok(out.write_all(text.as_bytes())?),
    }
}

fn reduce(args: &ReduceArgs, out: &mut dyn Write) -> Outcome {
    let [a_path, b_path] = args.inputs.as_slice() else {
        return Err(Failure::Config(format!(
            "reduce needs exactly two -i matrix files, got {}",
            args.inputs.len()
        )));
    };
    let load = |p: &PathBuf| -> Result<_, Failure> {
        parse_matrix(&read_input(p)?).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))
    };
    let inst = DominanceInstance::new(load(a_path)?, load(b_path)?).map_err(|e| Failure::Input(e.to_string()))?;
    if inst.r() == 0 {
        return Err(Failure::Input("matrices must be non-empty".into()));
    }
    let red = match args.kind {
        ReduceKind::Wmg => dominance_to_wmg_instance(&inst),
        ReduceKind::Winner => dominating_pairs_to_schulze_instance(&inst),
    };
    let ballots = red.profile.to_ballot_text();
    let roles_path = args.roles.clone().or_else(|| {
        args.output.as_ref().map(|o| {
            let mut s = o.clone().into_os_string();
            s.push(".roles.json");
            PathBuf::from(s)
        })
    });
    match &args.output {
        Some(path) => write_output(path, &ballots)?,
        None => out.write_all(ballots.as_bytes())?,
    }
    if let Some(path) = roles_path {
        write_output(&path, &(red.roles_json() + "\n"))?;
    }
    Ok(())
}

fn fastest(trials: usize, mut f: impl FnMut()) -> f64 {
    (0..trials.max(1))
        .map(|_| {
            let start = Instant::now();
            f();
            start.elapsed().as_secs_f64()
        })
        .fold(f64::INFINITY, f64::min)
}

fn bench(args: &BenchArgs, out: &mut dyn Write) -> Outcome {
    if args.sizes.contains(&0) {
        return Err(Failure::Config("--sizes must be positive".into()));
    }
    if args.bucket_sizes.as_ref().is_some_and(|b| b.contains(&0)) {
        return Err(Failure::Config("--bucket-sizes must be positive".into()));
    }
    let (allowed, defaults): (&[&str], &[&str]) = match args.task {
        BenchTask::Winners => (&["dscc", "dscc-one", "baseline"], &["dscc", "baseline"]),
        BenchTask::Tally => (&["naive", "fast"], &["naive", "fast"]),
    };
    let algos: Vec<String> = args
        .algos
        .clone()
        .unwrap_or_else(|| defaults.iter().map(|s| s.to_string()).collect());
    if let Some(bad) = algos.iter().find(|a| !allowed.contains(&a.as_str())) {
        return Err(Failure::Config(format!(
            "unknown algorithm `{bad}` for this task (expected one of {})",
            allowed.join(", ")
        )));
    }
    writeln!(out, "m,algo,seconds")?;
    for (idx, &m) in args.sizes.iter().enumerate() {
        let seed = args.seed.wrapping_add(idx as u64);
        match args.task {
            BenchTask::Winners => {
                let bound = i64::try_from(args.n).map_err(|_| Failure::Config("--n is too large".into()))?;
                let graph = random_margin_graph(m, bound, seed);
                for algo in &algos {
                    let secs = match algo.as_str() {
                        "dscc" => fastest(args.trials, || {
                            std::hint::black_box(find_all_winners_with(&graph, &Options::default()));
                        }),
                        "dscc-one" => fastest(args.trials, || {
                            std::hint::black_box(find_winner_with(&graph, &Options::default()));
                        }),
                        _ => fastest(args.trials, || {
                            std::hint::black_box(winners_from_bottlenecks(&apbp(&graph)));
                        }),
                    };
                    writeln!(out, "{m},{algo},{secs:.6}")?;
                    out.flush()?;
                }
            }
            BenchTask::Tally => {
                if args.n == 0 {
                    return Err(Failure::Config("--n must be at least 1".into()));
                }
                let profile = random_profile(m, args.n, 0.0, seed);
                for algo in &algos {
                    if algo == "naive" {
                        let secs = fastest(args.trials, || {
                            std::hint::black_box(pairwise_tallies(&profile));
                        });
                        writeln!(out, "{m},naive,{secs:.6}")?;
                    } else {
                        let buckets: Vec<Option<usize>> = match &args.bucket_sizes {
                            Some(b) => b.iter().map(|&s| Some(s)).collect(),
                            None => vec![None],
                        };
                        for bucket in buckets {
                            let secs = fastest(args.trials, || {
                                std::hint::black_box(pairwise_tallies_fast(&profile, bucket));
                            });
                            let label = bucket.map_or_else(|| "fast".to_string(), |s| format!("fast-s{s}"));
                            writeln!(out, "{m},{label},{secs:.6}")?;
                        }
                    }
                    out.flush()?;
                }
            }
        }
    }
    Ok(())
}
