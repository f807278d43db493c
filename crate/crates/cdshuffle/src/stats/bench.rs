//! The standard benchmark: four playlist size classes crossed with four
//! group-size distributions, eight algorithm rows, a paired-shuffle cluster
//! benchmark, and an occupancy benchmark for the partial alter.

use std::fmt;
use std::str::FromStr;

use crate::alter::{full_alter, partial_alter};
use crate::error::{Error, Result};
use crate::pipeline::{cd_shuffle, AlterState, MapKind, ShuffleConfig};
use crate::playlist::Playlist;
use crate::rng::RngStream;
use crate::stats::cluster::{find_clusters, ClusterReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SizeClass {
    Tiny,
    Small,
    Medium,
    Large,
}

impl SizeClass {
    pub const ALL: [SizeClass; 4] = [Self::Tiny, Self::Small, Self::Medium, Self::Large];

    pub fn name(self) -> &'static str {
        match self {
            Self::Tiny => "tiny",
            Self::Small => "small",
            Self::Medium => "medium",
            Self::Large => "large",
        }
    }

    /// Bin count for cluster-location histograms, finer for longer
    /// sequences.
    pub fn location_bins(self) -> usize {
        match self {
            Self::Tiny => 20,
            Self::Small => 50,
            Self::Medium | Self::Large => 100,
        }
    }
}

impl fmt::Display for SizeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SizeClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tiny" => Ok(Self::Tiny),
            "small" => Ok(Self::Small),
            "medium" => Ok(Self::Medium),
            "large" => Ok(Self::Large),
            other => Err(Error::Config(format!(
                "unknown size class `{other}` (expected tiny, small, medium, or large)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistKind {
    Impulse,
    Uniform,
    Binomial,
    Zipf,
}

impl DistKind {
    pub const ALL: [DistKind; 4] = [Self::Impulse, Self::Uniform, Self::Binomial, Self::Zipf];

    pub fn name(self) -> &'static str {
        match self {
            Self::Impulse => "impulse",
            Self::Uniform => "uniform",
            Self::Binomial => "binomial",
            Self::Zipf => "zipf",
        }
    }
}

impl fmt::Display for DistKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BenchmarkSpec {
    pub size_class: SizeClass,
    pub dist_kind: DistKind,
}

fn repeat_sizes(spec: &[(usize, usize)]) -> Vec<usize> {
    spec.iter()
        .flat_map(|&(size, count)| std::iter::repeat_n(size, count))
        .collect()
}

impl BenchmarkSpec {
    /// The fixed group-size multiset of this benchmark cell. Impulse is
    /// equal sizes, uniform counts up from one, binomial humps in the
    /// middle, and zipf puts most items in the first group.
    pub fn group_sizes(&self) -> Vec<usize> {
        use DistKind::*;
        use SizeClass::*;
        match (self.size_class, self.dist_kind) {
            (Tiny, Impulse) => vec![2; 5],
            (Tiny, Uniform) => (1..=4).collect(),
            (Tiny, Binomial) => vec![1, 2, 2, 3],
            (Tiny, Zipf) => vec![6, 3, 2],
            (Small, Impulse) => vec![3; 7],
            (Small, Uniform) => (1..=6).collect(),
            (Small, Binomial) => repeat_sizes(&[(1, 1), (2, 3), (3, 3), (4, 1)]),
            (Small, Zipf) => vec![12, 6, 4, 3],
            (Medium, Impulse) => vec![5; 11],
            (Medium, Uniform) => (1..=10).collect(),
            (Medium, Binomial) => repeat_sizes(&[(1, 1), (2, 4), (3, 6), (4, 4), (5, 1)]),
            (Medium, Zipf) => vec![24, 12, 8, 6],
            (Large, Impulse) => vec![8; 17],
            (Large, Uniform) => (1..=16).collect(),
            (Large, Binomial) => {
                repeat_sizes(&[(1, 1), (2, 5), (3, 10), (4, 10), (5, 5), (6, 1)])
            }
            (Large, Zipf) => vec![60, 30, 20, 15, 12],
        }
    }

    pub fn total_items(&self) -> usize {
        self.group_sizes().iter().sum()
    }
}

pub fn generate_benchmark_playlist(spec: &BenchmarkSpec) -> Playlist {
    Playlist::from_group_sizes(&spec.group_sizes()).expect("benchmark sizes are valid")
}

/// One labeled row of the benchmark. The width only matters when the map
/// kind routes to the jittered reference.
#[derive(Debug, Clone)]
pub struct Algorithm {
    pub label: &'static str,
    pub map_kind: MapKind,
    pub width_w: f64,
}

impl Algorithm {
    pub fn config(&self, seed: u64) -> ShuffleConfig {
        let mut config = ShuffleConfig::new(self.map_kind);
        config.width_w = self.width_w;
        config.seed = seed;
        config
    }
}

/// The eight standard rows, in report order.
pub fn benchmark_algorithms() -> Vec<Algorithm> {
    let row = |label, map_kind, width_w| Algorithm {
        label,
        map_kind,
        width_w,
    };
    vec![
        row("unbiased", MapKind::Unbiased, 0.5),
        row("balanced", MapKind::Balanced, 0.5),
        row("polacek_w1.0", MapKind::Polacek, 1.0),
        row("polacek_w0.5", MapKind::Polacek, 0.5),
        row("lattice", MapKind::Lattice, 0.5),
        row("spectral", MapKind::Spectral, 0.5),
        row("gaussian", MapKind::Gaussian, 0.5),
        row("von_mises", MapKind::VonMises, 0.5),
    ]
}

fn run_trial_range(
    playlist: &Playlist,
    algorithm: &Algorithm,
    seed: u64,
    trial_range: std::ops::Range<u64>,
    report: &mut ClusterReport,
) -> Result<()> {
    let config = algorithm.config(seed);
    let mut pair = Vec::with_capacity(2 * playlist.total_items());
    for trial in trial_range {
        let mut rng = RngStream::from_seed(seed.wrapping_add(trial));
        pair.clear();
        for _ in 0..2 {
            let mut state = AlterState::new();
            pair.extend(cd_shuffle(playlist, &config, &mut state, &mut rng)?);
        }
        let clusters = find_clusters(&pair);
        report.record(pair.len(), &clusters);
    }
    Ok(())
}

/// Runs `trials` paired shuffles of the cell's playlist and pools cluster
/// statistics over the concatenated pairs. The two shuffles of a pair are
/// independent full shuffles from one per-trial stream; trial t is seeded
/// with seed + t, so results do not depend on scheduling.
pub fn benchmark_pairs(
    spec: &BenchmarkSpec,
    algorithm: &Algorithm,
    trials: u64,
    seed: u64,
) -> Result<ClusterReport> {
    benchmark_pairs_threaded(spec, algorithm, trials, seed, 1)
}

/// Same statistics as [`benchmark_pairs`], with trials split across worker
/// threads. Per-trial seeding makes the merged report identical to the
/// serial one for any thread count.
pub fn benchmark_pairs_threaded(
    spec: &BenchmarkSpec,
    algorithm: &Algorithm,
    trials: u64,
    seed: u64,
    threads: usize,
) -> Result<ClusterReport> {
    let threads = threads.max(1).min(trials.max(1) as usize);
    let playlist = generate_benchmark_playlist(spec);
    let bins = spec.size_class.location_bins();
    let mut report = ClusterReport::new(bins)?;
    if threads == 1 {
        run_trial_range(&playlist, algorithm, seed, 0..trials, &mut report)?;
        return Ok(report);
    }
    let parts: Vec<Result<ClusterReport>> = std::thread::scope(|scope| {
        let playlist = &playlist;
        let handles: Vec<_> = (0..threads as u64)
            .map(|worker| {
                let start = trials * worker / threads as u64;
                let end = trials * (worker + 1) / threads as u64;
                scope.spawn(move || {
                    let mut part = ClusterReport::new(bins)?;
                    run_trial_range(playlist, algorithm, seed, start..end, &mut part)?;
                    Ok(part)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|handle| handle.join().expect("benchmark worker panicked"))
            .collect()
    });
    for part in parts {
        report.merge(&part?)?;
    }
    Ok(report)
}

/// Where each item of a single group sat after every partial alter, plus
/// the per-alter index deltas. Deltas are bounded by the alter's jump
/// range, so the change histogram covers [-bound, bound] exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlterReport {
    /// occupancy[item][index]: visits of the item to the index.
    pub occupancy: Vec<Vec<u64>>,
    /// index_change[delta + displacement_bound]: per-alter index deltas.
    pub index_change: Vec<u64>,
    pub displacement_bound: usize,
    pub alters: u64,
}

/// Runs `alters` consecutive partial alters over one group of `n_group`
/// items, starting from a full-alter arrangement, and tallies occupancies
/// and index deltas. Panics if an alter ever moves an item further than the
/// jump bound, which the alter construction rules out.
pub fn alter_benchmark(n_group: usize, alters: u64, seed: u64) -> Result<AlterReport> {
    if n_group < 2 {
        return Err(Error::Size(format!(
            "alter benchmark needs a group of at least 2, got {n_group}"
        )));
    }
    let bound = (n_group - 1).div_ceil(4);
    let mut rng = RngStream::from_seed(seed);
    let mut order: Vec<u32> = (0..n_group as u32).collect();
    full_alter(&mut order, &mut rng);

    let mut occupancy = vec![vec![0u64; n_group]; n_group];
    let mut index_change = vec![0u64; 2 * bound + 1];
    let mut prev_index = vec![0usize; n_group];
    let mut cur_index = vec![0usize; n_group];
    for (idx, &item) in order.iter().enumerate() {
        prev_index[item as usize] = idx;
    }
    for _ in 0..alters {
        partial_alter(&mut order, &mut rng);
        for (idx, &item) in order.iter().enumerate() {
            cur_index[item as usize] = idx;
        }
        for item in 0..n_group {
            occupancy[item][cur_index[item]] += 1;
            let delta = cur_index[item] as i64 - prev_index[item] as i64;
            let slot = delta + bound as i64;
            assert!(
                (0..index_change.len() as i64).contains(&slot),
                "delta {delta} exceeds jump bound {bound}"
            );
            index_change[slot as usize] += 1;
        }
        std::mem::swap(&mut prev_index, &mut cur_index);
    }
    Ok(AlterReport {
        occupancy,
        index_change,
        displacement_bound: bound,
        alters,
    })
}
