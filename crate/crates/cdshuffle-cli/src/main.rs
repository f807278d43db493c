//! Command-line front end: shuffle playlist files, run repeat simulations,
//! execute the cluster benchmark suite, and emit plot-ready spacing data.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use cdshuffle::stats::bench::{
    benchmark_algorithms, benchmark_pairs_threaded, BenchmarkSpec, DistKind, SizeClass,
};
use cdshuffle::stats::pdf::{
    balanced_spacing_pdf, normalize_to_unit_mean, polacek_spacing_pdf, sample_balanced_spacings,
    sample_gue_pair_spacings, sample_polacek_spacings, sample_uniform_spacings, tv_distance,
    uniform_spacing_pdf, wigner_surmise, Histogram,
};
use cdshuffle::{
    cd_shuffle, shuffle_repeat, AlterKind, AlterState, Group, MapKind, MergeKind, Playlist,
    RngStream, ShuffleConfig,
};

const EXIT_PARSE: i32 = 2;
const EXIT_USAGE: i32 = 64;
const EXIT_OUTPUT: i32 = 73;

/// Failures carry the exit code they map to: 2 for input that does not
/// parse, 64 for unusable flag combinations, 73 for output that cannot be
/// written.
enum Failure {
    Parse(String),
    Usage(String),
    Output(String),
}

impl Failure {
    fn exit_code(&self) -> i32 {
        match self {
            Self::Parse(_) => EXIT_PARSE,
            Self::Usage(_) => EXIT_USAGE,
            Self::Output(_) => EXIT_OUTPUT,
        }
    }

    fn message(&self) -> &str {
        match self {
            Self::Parse(m) | Self::Usage(m) | Self::Output(m) => m,
        }
    }
}

fn usage(err: impl std::fmt::Display) -> Failure {
    Failure::Usage(err.to_string())
}

#[derive(Parser)]
#[command(
    name = "cdshuffle",
    version,
    about = "Cluster-diffusing shuffles for grouped playlists"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Shuffle a playlist file once and print the item ids in play order
    Shuffle(ShuffleArgs),
    /// Run consecutive shuffles with carried-over alter state
    Repeat(RepeatArgs),
    /// Run the benchmark suite and write cluster-statistics CSV files
    Bench(BenchArgs),
    /// Write a spacing-density curve and a matching empirical histogram
    Spacing(SpacingArgs),
}

#[derive(Args)]
struct MapOptions {
    /// Position map: lattice, spectral, gaussian, von_mises, or one of the
    /// whole-algorithm references balanced, polacek, unbiased
    #[arg(long, default_value = "lattice")]
    map: MapKind,
    /// Merge strategy: comparison, kway, or radix
    #[arg(long, default_value = "comparison")]
    merge: MergeKind,
    /// Half-width of the map interval [-r, r]
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
    /// Jitter width for the polacek reference, as a fraction of the even
    /// spacing
    #[arg(long, default_value_t = 0.5)]
    width: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl MapOptions {
    fn config(&self) -> Result<ShuffleConfig, Failure> {
        let mut config = ShuffleConfig::new(self.map);
        config.merge_kind = self.merge;
        config.radius_r = self.radius;
        config.width_w = self.width;
        config.seed = self.seed;
        config.validate().map_err(usage)?;
        Ok(config)
    }
}

#[derive(Args)]
struct ShuffleArgs {
    /// Playlist file: `group_id<TAB>item_id` lines, `#` comments
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    map_options: MapOptions,
}

#[derive(Args)]
struct RepeatArgs {
    /// Playlist file: `group_id<TAB>item_id` lines, `#` comments
    #[arg(long)]
    input: PathBuf,
    /// Number of consecutive shuffles (the first is always a full alter)
    #[arg(long, default_value_t = 2)]
    count: usize,
    /// Alter kind for the follow-up shuffles: full or partial
    #[arg(long, default_value = "partial")]
    alter: AlterKind,
    #[command(flatten)]
    map_options: MapOptions,
}

#[derive(Args)]
struct BenchArgs {
    /// Playlist suite: tiny, small, medium, large, or all
    #[arg(long)]
    suite: String,
    /// Shuffle pairs per algorithm and distribution
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory for sizes.csv, averages.csv, and locations.csv (per-suite
    /// subdirectories when the suite is `all`)
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SpacingArgs {
    /// Spacing model: uniform, balanced, polacek, or wigner
    #[arg(long)]
    dist: String,
    /// Items per group (uniform, balanced, polacek)
    #[arg(long, default_value_t = 4)]
    n: usize,
    /// Jitter width (polacek)
    #[arg(long, default_value_t = 0.5)]
    w: f64,
    /// Symmetry class of the surmise: 1, 2, or 4 (wigner; sampling is
    /// available for beta 2 only)
    #[arg(long, default_value_t = 2)]
    beta: u32,
    /// Empirical spacing samples to draw
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    /// Histogram bins over the density's support
    #[arg(long, default_value_t = 64)]
    bins: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory for curve.csv and histogram.csv
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = err.print();
            std::process::exit(code);
        }
    };
    let result = match cli.command {
        Command::Shuffle(args) => cmd_shuffle(&args),
        Command::Repeat(args) => cmd_repeat(&args),
        Command::Bench(args) => cmd_bench(&args),
        Command::Spacing(args) => cmd_spacing(&args),
    };
    if let Err(failure) = result {
        eprintln!("error: {}", failure.message());
        std::process::exit(failure.exit_code());
    }
}

/// Parses `group_id<TAB>item_id` lines into a playlist. Empty lines and
/// `#` comments are skipped; every reported problem carries its line number.
fn parse_playlist_file(path: &Path) -> Result<Playlist, Failure> {
    let text = fs::read_to_string(path).map_err(|err| {
        Failure::Parse(format!("cannot read {}: {err}", path.display()))
    })?;
    let mut labels: BTreeMap<u32, Vec<String>> = BTreeMap::new();
    let mut seen: BTreeSet<(u32, String)> = BTreeSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((group_field, item_id)) = line.split_once('\t') else {
            return Err(Failure::Parse(format!(
                "{}:{line_no}: expected `group_id<TAB>item_id`",
                path.display()
            )));
        };
        let group_id: u32 = group_field.parse().map_err(|_| {
            Failure::Parse(format!(
                "{}:{line_no}: group id `{group_field}` is not a number",
                path.display()
            ))
        })?;
        if item_id.is_empty() {
            return Err(Failure::Parse(format!(
                "{}:{line_no}: empty item id",
                path.display()
            )));
        }
        if !seen.insert((group_id, item_id.to_string())) {
            return Err(Failure::Parse(format!(
                "{}:{line_no}: duplicate item `{item_id}` in group {group_id}",
                path.display()
            )));
        }
        labels.entry(group_id).or_default().push(item_id.to_string());
    }
    if labels.is_empty() {
        return Err(Failure::Parse(format!(
            "{}: no playlist items",
            path.display()
        )));
    }
    let groups = labels
        .into_iter()
        .map(|(group_id, labels)| Group::new(group_id, labels))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|err| Failure::Parse(format!("{}: {err}", path.display())))?;
    Playlist::new(groups).map_err(|err| Failure::Parse(format!("{}: {err}", path.display())))
}

fn print_stdout(text: &str) -> Result<(), Failure> {
    std::io::stdout()
        .write_all(text.as_bytes())
        .map_err(|err| Failure::Output(format!("cannot write to stdout: {err}")))
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text)
        .map_err(|err| Failure::Output(format!("cannot write {}: {err}", path.display())))
}

fn cmd_shuffle(args: &ShuffleArgs) -> Result<(), Failure> {
    let playlist = parse_playlist_file(&args.input)?;
    let config = args.map_options.config()?;
    let mut state = AlterState::new();
    let mut rng = config.rng();
    let shuffled = cd_shuffle(&playlist, &config, &mut state, &mut rng).map_err(usage)?;
    let mut out = String::new();
    for item in &shuffled {
        out.push_str(&item.item_id);
        out.push('\n');
    }
    print_stdout(&out)
}

fn cmd_repeat(args: &RepeatArgs) -> Result<(), Failure> {
    let playlist = parse_playlist_file(&args.input)?;
    let mut config = args.map_options.config()?;
    config.alter_kind = args.alter;
    let mut rng = config.rng();
    let runs = shuffle_repeat(&playlist, &config, args.count, &mut rng).map_err(usage)?;
    let mut out = String::new();
    for (idx, run) in runs.iter().enumerate() {
        if idx > 0 {
            out.push_str("---\n");
        }
        for item in run {
            out.push_str(&item.item_id);
            out.push('\n');
        }
    }
    print_stdout(&out)
}

/// Worker count: CDSHUFFLE_THREADS, where 0 or unset means one worker per
/// available core.
fn thread_count() -> Result<usize, Failure> {
    let auto = || {
        std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)
    };
    match std::env::var("CDSHUFFLE_THREADS") {
        Err(std::env::VarError::NotPresent) => Ok(auto()),
        Err(err) => Err(Failure::Usage(format!("CDSHUFFLE_THREADS: {err}"))),
        Ok(value) => {
            let count: usize = value.parse().map_err(|_| {
                Failure::Usage(format!("CDSHUFFLE_THREADS `{value}` is not a number"))
            })?;
            Ok(if count == 0 { auto() } else { count })
        }
    }
}

fn cmd_bench(args: &BenchArgs) -> Result<(), Failure> {
    if args.trials == 0 {
        return Err(Failure::Usage("--trials must be at least 1".into()));
    }
    let (suites, split_dirs): (Vec<SizeClass>, bool) = if args.suite == "all" {
        (SizeClass::ALL.to_vec(), true)
    } else {
        (vec![args.suite.parse().map_err(usage)?], false)
    };
    let threads = thread_count()?;
    for size_class in suites {
        let dir = if split_dirs {
            args.out.join(size_class.name())
        } else {
            args.out.clone()
        };
        fs::create_dir_all(&dir).map_err(|err| {
            Failure::Output(format!("cannot create {}: {err}", dir.display()))
        })?;
        run_bench_suite(size_class, args.trials, args.seed, threads, &dir)?;
        eprintln!("suite {size_class}: wrote {}", dir.display());
    }
    Ok(())
}

fn run_bench_suite(
    size_class: SizeClass,
    trials: u64,
    seed: u64,
    threads: usize,
    dir: &Path,
) -> Result<(), Failure> {
    let mut sizes = String::from("algorithm,dist_kind,cluster_size,count\n");
    let mut averages = String::from("algorithm,dist_kind,average\n");
    let mut locations = String::from("algorithm,dist_kind,bin_start,count\n");
    for algorithm in benchmark_algorithms() {
        for dist_kind in DistKind::ALL {
            let spec = BenchmarkSpec {
                size_class,
                dist_kind,
            };
            let report =
                benchmark_pairs_threaded(&spec, &algorithm, trials, seed, threads).map_err(usage)?;
            for (&size, &count) in report.size_histogram() {
                let _ = writeln!(sizes, "{},{dist_kind},{size},{count}", algorithm.label);
            }
            let _ = writeln!(
                averages,
                "{},{dist_kind},{:.4}",
                algorithm.label,
                report.average_size()
            );
            for (idx, &count) in report.location_histogram().iter().enumerate() {
                let _ = writeln!(
                    locations,
                    "{},{dist_kind},{:.2},{count}",
                    algorithm.label,
                    report.location_bin_start(idx)
                );
            }
        }
    }
    write_file(&dir.join("sizes.csv"), &sizes)?;
    write_file(&dir.join("averages.csv"), &averages)?;
    write_file(&dir.join("locations.csv"), &locations)
}

type Density = Box<dyn Fn(f64) -> f64>;

fn cmd_spacing(args: &SpacingArgs) -> Result<(), Failure> {
    if args.samples == 0 {
        return Err(Failure::Usage("--samples must be at least 1".into()));
    }
    if args.bins == 0 {
        return Err(Failure::Usage("--bins must be at least 1".into()));
    }
    let mut rng = RngStream::from_seed(args.seed);
    let n = args.n;

    // Density support, curve, and empirical samples for the chosen model.
    // The wigner empirical sampler exists for beta = 2 only; other betas
    // emit the curve alone.
    let (hi, pdf, samples): (f64, Density, Option<Vec<f64>>) =
        match args.dist.as_str() {
            "uniform" => {
                uniform_spacing_pdf(n, 0.0).map_err(usage)?;
                let draws = args.samples.div_ceil(n - 1);
                let samples = sample_uniform_spacings(n, draws, &mut rng).map_err(usage)?;
                (
                    1.0,
                    Box::new(move |x| uniform_spacing_pdf(n, x).unwrap()),
                    Some(samples),
                )
            }
            "balanced" => {
                balanced_spacing_pdf(n, 0.0).map_err(usage)?;
                let draws = args.samples.div_ceil(n - 1);
                let samples = sample_balanced_spacings(n, draws, &mut rng).map_err(usage)?;
                (
                    2.0 / n as f64,
                    Box::new(move |x| balanced_spacing_pdf(n, x).unwrap()),
                    Some(samples),
                )
            }
            "polacek" => {
                let w = args.w;
                polacek_spacing_pdf(n, w, 0.0).map_err(usage)?;
                let draws = args.samples.div_ceil(n - 1);
                let samples = sample_polacek_spacings(n, w, draws, &mut rng).map_err(usage)?;
                (
                    2.0 / n as f64,
                    Box::new(move |x| polacek_spacing_pdf(n, w, x).unwrap()),
                    Some(samples),
                )
            }
            "wigner" => {
                let beta = args.beta;
                wigner_surmise(beta, 0.0).map_err(usage)?;
                let samples = if beta == 2 {
                    let mut spacings =
                        sample_gue_pair_spacings(args.samples, &mut rng).map_err(usage)?;
                    normalize_to_unit_mean(&mut spacings).map_err(usage)?;
                    Some(spacings)
                } else {
                    None
                };
                (
                    4.0,
                    Box::new(move |s| wigner_surmise(beta, s).unwrap()),
                    samples,
                )
            }
            other => {
                return Err(Failure::Usage(format!(
                    "unknown distribution `{other}` (expected uniform, balanced, polacek, or wigner)"
                )))
            }
        };

    fs::create_dir_all(&args.out).map_err(|err| {
        Failure::Output(format!("cannot create {}: {err}", args.out.display()))
    })?;

    // 512 grid points including both endpoints, so edge values like the
    // uniform density's maximum at x = 0 appear verbatim.
    let mut curve = String::from("x,density\n");
    for i in 0..512 {
        let x = hi * i as f64 / 511.0;
        let _ = writeln!(curve, "{x:.6},{:.6}", pdf(x));
    }
    write_file(&args.out.join("curve.csv"), &curve)?;

    if let Some(mut samples) = samples {
        samples.truncate(args.samples.max(1));
        let mut hist = Histogram::new(0.0, hi, args.bins).map_err(usage)?;
        hist.add_all(samples);
        let tv = tv_distance(&hist, &pdf).map_err(usage)?;
        let mut rows = String::from("bin_start,count\n");
        for (idx, &count) in hist.counts().iter().enumerate() {
            let _ = writeln!(rows, "{:.6},{count}", hist.bin_start(idx));
        }
        write_file(&args.out.join("histogram.csv"), &rows)?;
        print_stdout(&format!("tv {tv:.6}\n"))?;
    }
    Ok(())
}
