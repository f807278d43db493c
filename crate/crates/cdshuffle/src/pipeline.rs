//! The alter -> map -> merge pipeline, plus the configuration and
//! carried-over state that make repeated shuffles deterministic.
//!
//! The three reference algorithms are reachable through the same entry
//! point: selecting `balanced`, `polacek`, or `unbiased` as the map kind
//! routes the whole shuffle through the reference module instead of the
//! alter/map/merge stages. They are whole algorithms, not maps, but exposing
//! them here lets the benchmark harness treat every algorithm uniformly.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::alter::{full_alter, partial_alter};
use crate::error::{Error, Result};
use crate::maps::{gaussian_map, lattice_map, spectral_map, von_mises_map};
use crate::merge::{merge_comparison, merge_kway, merge_radix, PositionedItem};
use crate::playlist::{Item, Playlist};
use crate::reference::{balanced_shuffle, polacek_shuffle, unbiased_shuffle};
use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapKind {
    Lattice,
    Spectral,
    Gaussian,
    VonMises,
    Balanced,
    Polacek,
    Unbiased,
}

impl MapKind {
    /// Whole-algorithm references bypass the alter/map/merge stages.
    pub fn is_reference(self) -> bool {
        matches!(self, Self::Balanced | Self::Polacek | Self::Unbiased)
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Lattice => "lattice",
            Self::Spectral => "spectral",
            Self::Gaussian => "gaussian",
            Self::VonMises => "von_mises",
            Self::Balanced => "balanced",
            Self::Polacek => "polacek",
            Self::Unbiased => "unbiased",
        }
    }
}

impl fmt::Display for MapKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MapKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lattice" => Ok(Self::Lattice),
            "spectral" => Ok(Self::Spectral),
            "gaussian" => Ok(Self::Gaussian),
            "von_mises" => Ok(Self::VonMises),
            "balanced" => Ok(Self::Balanced),
            "polacek" => Ok(Self::Polacek),
            "unbiased" => Ok(Self::Unbiased),
            other => Err(Error::Config(format!(
                "unknown map kind `{other}` (expected lattice, spectral, gaussian, \
                 von_mises, balanced, polacek, or unbiased)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlterKind {
    Full,
    Partial,
}

impl AlterKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Full => "full",
            Self::Partial => "partial",
        }
    }
}

impl fmt::Display for AlterKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AlterKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(Self::Full),
            "partial" => Ok(Self::Partial),
            other => Err(Error::Config(format!(
                "unknown alter kind `{other}` (expected full or partial)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MergeKind {
    Comparison,
    Kway,
    Radix,
}

impl MergeKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Comparison => "comparison",
            Self::Kway => "kway",
            Self::Radix => "radix",
        }
    }
}

impl fmt::Display for MergeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MergeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "comparison" => Ok(Self::Comparison),
            "kway" => Ok(Self::Kway),
            "radix" => Ok(Self::Radix),
            other => Err(Error::Config(format!(
                "unknown merge kind `{other}` (expected comparison, kway, or radix)"
            ))),
        }
    }
}

/// Everything a shuffle run needs besides the playlist: algorithm choice,
/// its two real parameters, and the seed.
#[derive(Debug, Clone)]
pub struct ShuffleConfig {
    pub map_kind: MapKind,
    pub alter_kind: AlterKind,
    pub merge_kind: MergeKind,
    /// Half-width of the map interval [-r, r].
    pub radius_r: f64,
    /// Jitter width of the Polacek reference, as a fraction of the even
    /// spacing. Ignored by the other algorithms.
    pub width_w: f64,
    pub seed: u64,
}

impl ShuffleConfig {
    pub fn new(map_kind: MapKind) -> Self {
        Self {
            map_kind,
            alter_kind: AlterKind::Full,
            merge_kind: MergeKind::Comparison,
            radius_r: 1.0,
            width_w: 0.5,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.radius_r > 0.0 && self.radius_r.is_finite()) {
            return Err(Error::Config(format!(
                "radius must be positive and finite, got {}",
                self.radius_r
            )));
        }
        if !(0.0..=1.0).contains(&self.width_w) {
            return Err(Error::Config(format!(
                "width must lie in [0, 1], got {}",
                self.width_w
            )));
        }
        Ok(())
    }

    pub fn rng(&self) -> RngStream {
        RngStream::from_seed(self.seed)
    }
}

/// Per-group orderings carried between consecutive shuffles, so the partial
/// alter can relax from the previous arrangement. A fresh state means
/// identity orderings and forces the first shuffle to use a full alter (the
/// seed shuffle of a repeat sequence).
#[derive(Debug, Clone, Default)]
pub struct AlterState {
    orders: BTreeMap<u32, Vec<u32>>,
    seeded: bool,
}

impl AlterState {
    pub fn new() -> Self {
        Self::default()
    }

    /// Whether the initial full alter has run.
    pub fn is_seeded(&self) -> bool {
        self.seeded
    }

    /// Current ordering of a group (indices into the group's item list), if
    /// the state has been used with a playlist containing it.
    pub fn order(&self, group_id: u32) -> Option<&[u32]> {
        self.orders.get(&group_id).map(Vec::as_slice)
    }

    /// Empty state adopts identity orderings; a used state must cover
    /// exactly the playlist's groups with valid permutations.
    fn prepare(&mut self, playlist: &Playlist) -> Result<()> {
        if self.orders.is_empty() {
            for group in playlist.groups() {
                self.orders
                    .insert(group.group_id(), (0..group.len() as u32).collect());
            }
            return Ok(());
        }
        if self.orders.len() != playlist.groups().len() {
            return Err(Error::StateMismatch(format!(
                "state covers {} groups, playlist has {}",
                self.orders.len(),
                playlist.groups().len()
            )));
        }
        for group in playlist.groups() {
            let order = self.orders.get(&group.group_id()).ok_or_else(|| {
                Error::StateMismatch(format!("state missing group {}", group.group_id()))
            })?;
            let mut seen = vec![false; group.len()];
            if order.len() != group.len() {
                return Err(Error::StateMismatch(format!(
                    "state order for group {} has length {}, group has {}",
                    group.group_id(),
                    order.len(),
                    group.len()
                )));
            }
            for &idx in order {
                if (idx as usize) >= group.len() || seen[idx as usize] {
                    return Err(Error::StateMismatch(format!(
                        "state order for group {} is not a permutation",
                        group.group_id()
                    )));
                }
                seen[idx as usize] = true;
            }
        }
        Ok(())
    }

    /// Reference algorithms shuffle wholesale, so their post-shuffle group
    /// orderings are read back off the output.
    fn update_from_output(&mut self, output: &[Item]) {
        for order in self.orders.values_mut() {
            order.clear();
        }
        for item in output {
            self.orders
                .get_mut(&item.group_id)
                .expect("output item from covered group")
                .push(item.index_in_group);
        }
    }
}

/// One shuffle: alter each group's ordering (full on the first call or when
/// configured, partial otherwise), map the ordered items to positions, and
/// merge globally by position. Returns a permutation of the playlist and
/// leaves the post-alter orderings in `state` for the next call.
///
/// Draw order is fixed for reproducibility: groups in ascending id, each
/// group's alter draws followed by its map draws. If an error is returned
/// the state may hold partially advanced orderings and should be discarded.
pub fn cd_shuffle(
    playlist: &Playlist,
    config: &ShuffleConfig,
    state: &mut AlterState,
    rng: &mut RngStream,
) -> Result<Vec<Item>> {
    config.validate()?;
    state.prepare(playlist)?;

    if config.map_kind.is_reference() {
        let out = match config.map_kind {
            MapKind::Unbiased => unbiased_shuffle(playlist, rng),
            MapKind::Balanced => balanced_shuffle(playlist, rng)?,
            MapKind::Polacek => polacek_shuffle(playlist, config.width_w, rng)?,
            _ => unreachable!("non-reference kinds handled below"),
        };
        state.update_from_output(&out);
        state.seeded = true;
        return Ok(out);
    }

    let full = !state.seeded || config.alter_kind == AlterKind::Full;
    let mut groups = Vec::with_capacity(playlist.groups().len());
    for group in playlist.groups() {
        let order = state
            .orders
            .get_mut(&group.group_id())
            .expect("state prepared for this playlist");
        if full {
            full_alter(order, rng);
        } else {
            partial_alter(order, rng);
        }
        let n = group.len();
        let positions = match config.map_kind {
            MapKind::Lattice => lattice_map(n, config.radius_r)?,
            MapKind::Gaussian => gaussian_map(n, config.radius_r, rng)?,
            MapKind::VonMises => von_mises_map(n, config.radius_r, rng)?,
            MapKind::Spectral => spectral_map(n, config.radius_r, rng)?,
            _ => unreachable!("reference kinds handled above"),
        };
        let items = group.items();
        groups.push(
            order
                .iter()
                .zip(positions)
                .map(|(&idx, position)| {
                    PositionedItem::new(items[idx as usize].clone(), position)
                })
                .collect::<Vec<_>>(),
        );
    }
    state.seeded = true;
    match config.merge_kind {
        MergeKind::Comparison => merge_comparison(groups),
        MergeKind::Kway => merge_kway(groups),
        MergeKind::Radix => merge_radix(groups),
    }
}

/// Runs `count` consecutive shuffles with one threaded state: the first is
/// always a full alter (the seed shuffle), later ones follow
/// `config.alter_kind`.
pub fn shuffle_repeat(
    playlist: &Playlist,
    config: &ShuffleConfig,
    count: usize,
    rng: &mut RngStream,
) -> Result<Vec<Vec<Item>>> {
    if count == 0 {
        return Err(Error::Parameter("repeat count must be at least 1".into()));
    }
    let mut state = AlterState::new();
    (0..count)
        .map(|_| cd_shuffle(playlist, config, &mut state, rng))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const ALL_MAPS: [MapKind; 7] = [
        MapKind::Lattice,
        MapKind::Spectral,
        MapKind::Gaussian,
        MapKind::VonMises,
        MapKind::Balanced,
        MapKind::Polacek,
        MapKind::Unbiased,
    ];
    const ALL_MERGES: [MergeKind; 3] =
        [MergeKind::Comparison, MergeKind::Kway, MergeKind::Radix];

    fn ids(items: &[Item]) -> Vec<String> {
        items.iter().map(|i| i.item_id.clone()).collect()
    }

    #[test]
    fn kind_round_trips() {
        for kind in ALL_MAPS {
            assert_eq!(kind.name().parse::<MapKind>().unwrap(), kind);
        }
        for kind in [AlterKind::Full, AlterKind::Partial] {
            assert_eq!(kind.name().parse::<AlterKind>().unwrap(), kind);
        }
        for kind in ALL_MERGES {
            assert_eq!(kind.name().parse::<MergeKind>().unwrap(), kind);
        }
        assert!("qwerty".parse::<MapKind>().is_err());
        assert!("qwerty".parse::<AlterKind>().is_err());
        assert!("qwerty".parse::<MergeKind>().is_err());
    }

    #[test]
    fn config_validation() {
        let mut config = ShuffleConfig::new(MapKind::Lattice);
        assert!(config.validate().is_ok());
        config.radius_r = 0.0;
        assert!(config.validate().is_err());
        config.radius_r = 1.0;
        config.width_w = 1.5;
        assert!(config.validate().is_err());
    }

    #[test]
    fn single_item_playlist_is_identity_for_every_config() {
        let playlist = Playlist::from_group_sizes(&[1]).unwrap();
        for map_kind in ALL_MAPS {
            let config = ShuffleConfig::new(map_kind);
            let mut state = AlterState::new();
            let mut rng = RngStream::from_seed(7);
            let out = cd_shuffle(&playlist, &config, &mut state, &mut rng).unwrap();
            assert_eq!(ids(&out), ["g0-0"], "map {map_kind}");
        }
    }

    #[test]
    fn singleton_groups_on_lattice_follow_tie_order() {
        let playlist = Playlist::from_group_sizes(&[1, 1, 1, 1]).unwrap();
        let config = ShuffleConfig::new(MapKind::Lattice);
        let mut rng = RngStream::from_seed(8);
        for _ in 0..5 {
            let mut state = AlterState::new();
            let out = cd_shuffle(&playlist, &config, &mut state, &mut rng).unwrap();
            assert_eq!(ids(&out), ["g0-0", "g1-0", "g2-0", "g3-0"]);
        }
    }

    #[test]
    fn lattice_impulse_never_has_adjacent_same_group() {
        // Five groups of two: lattice positions coincide across groups and
        // the tie-break interleaves them, so adjacency is impossible.
        let playlist = Playlist::from_group_sizes(&[2, 2, 2, 2, 2]).unwrap();
        let config = ShuffleConfig::new(MapKind::Lattice);
        let mut rng = RngStream::from_seed(9);
        for _ in 0..10_000 {
            let mut state = AlterState::new();
            let out = cd_shuffle(&playlist, &config, &mut state, &mut rng).unwrap();
            for pair in out.windows(2) {
                assert_ne!(pair[0].group_id, pair[1].group_id);
            }
        }
    }

    #[test]
    fn every_map_outputs_a_permutation() {
        let playlist = Playlist::from_group_sizes(&[3, 1, 4, 2]).unwrap();
        for map_kind in ALL_MAPS {
            let config = ShuffleConfig::new(map_kind);
            let mut state = AlterState::new();
            let mut rng = RngStream::from_seed(10);
            for _ in 0..50 {
                let out = cd_shuffle(&playlist, &config, &mut state, &mut rng).unwrap();
                let mut got = ids(&out);
                got.sort();
                got.dedup();
                assert_eq!(got.len(), 10, "map {map_kind}");
            }
        }
    }

    #[test]
    fn fixed_seed_is_deterministic_for_every_kind() {
        let playlist = Playlist::from_group_sizes(&[3, 5, 2]).unwrap();
        for map_kind in ALL_MAPS {
            for merge_kind in ALL_MERGES {
                for alter_kind in [AlterKind::Full, AlterKind::Partial] {
                    let mut config = ShuffleConfig::new(map_kind);
                    config.merge_kind = merge_kind;
                    config.alter_kind = alter_kind;
                    let run = || {
                        let mut state = AlterState::new();
                        let mut rng = RngStream::from_seed(123);
                        (0..4)
                            .map(|_| {
                                ids(&cd_shuffle(&playlist, &config, &mut state, &mut rng)
                                    .unwrap())
                            })
                            .collect::<Vec<_>>()
                    };
                    assert_eq!(run(), run(), "{map_kind}/{merge_kind}/{alter_kind:?}");
                }
            }
        }
    }

    #[test]
    fn merge_strategies_agree_through_the_pipeline() {
        let playlist = Playlist::from_group_sizes(&[4, 6, 1, 3]).unwrap();
        for map_kind in [MapKind::Lattice, MapKind::Gaussian, MapKind::VonMises] {
            let run = |merge_kind| {
                let mut config = ShuffleConfig::new(map_kind);
                config.merge_kind = merge_kind;
                let mut state = AlterState::new();
                let mut rng = RngStream::from_seed(321);
                (0..20)
                    .map(|_| {
                        ids(&cd_shuffle(&playlist, &config, &mut state, &mut rng).unwrap())
                    })
                    .collect::<Vec<_>>()
            };
            let comparison = run(MergeKind::Comparison);
            assert_eq!(comparison, run(MergeKind::Kway), "map {map_kind}");
            assert_eq!(comparison, run(MergeKind::Radix), "map {map_kind}");
        }
    }

    #[test]
    fn monotone_maps_preserve_group_internal_order() {
        let playlist = Playlist::from_group_sizes(&[5, 3, 7]).unwrap();
        for map_kind in [MapKind::Lattice, MapKind::VonMises] {
            let config = ShuffleConfig::new(map_kind);
            let mut state = AlterState::new();
            let mut rng = RngStream::from_seed(11);
            for _ in 0..100 {
                let out = cd_shuffle(&playlist, &config, &mut state, &mut rng).unwrap();
                for group in playlist.groups() {
                    let in_output: Vec<u32> = out
                        .iter()
                        .filter(|i| i.group_id == group.group_id())
                        .map(|i| i.index_in_group)
                        .collect();
                    assert_eq!(
                        in_output,
                        state.order(group.group_id()).unwrap(),
                        "map {map_kind}"
                    );
                }
            }
        }
    }

    #[test]
    fn reference_kinds_record_output_order_in_state() {
        let playlist = Playlist::from_group_sizes(&[3, 2]).unwrap();
        for map_kind in [MapKind::Unbiased, MapKind::Balanced, MapKind::Polacek] {
            let config = ShuffleConfig::new(map_kind);
            let mut state = AlterState::new();
            let mut rng = RngStream::from_seed(12);
            let out = cd_shuffle(&playlist, &config, &mut state, &mut rng).unwrap();
            assert!(state.is_seeded());
            for group in playlist.groups() {
                let in_output: Vec<u32> = out
                    .iter()
                    .filter(|i| i.group_id == group.group_id())
                    .map(|i| i.index_in_group)
                    .collect();
                assert_eq!(in_output, state.order(group.group_id()).unwrap());
            }
        }
    }

    #[test]
    fn state_mismatch_is_rejected() {
        let a = Playlist::from_group_sizes(&[2, 2]).unwrap();
        let b = Playlist::from_group_sizes(&[2, 2, 2]).unwrap();
        let config = ShuffleConfig::new(MapKind::Lattice);
        let mut state = AlterState::new();
        let mut rng = RngStream::from_seed(13);
        cd_shuffle(&a, &config, &mut state, &mut rng).unwrap();
        assert!(matches!(
            cd_shuffle(&b, &config, &mut state, &mut rng),
            Err(Error::StateMismatch(_))
        ));
    }

    #[test]
    fn repeat_starts_full_then_follows_alter_kind() {
        let playlist = Playlist::from_group_sizes(&[2]).unwrap();
        let mut config = ShuffleConfig::new(MapKind::Lattice);
        config.alter_kind = AlterKind::Partial;
        let mut rng = RngStream::from_seed(14);
        assert!(shuffle_repeat(&playlist, &config, 0, &mut rng).is_err());

        let trials = 100_000;
        let mut swaps = 0u32;
        for _ in 0..trials {
            let runs = shuffle_repeat(&playlist, &config, 2, &mut rng).unwrap();
            if ids(&runs[0]) != ids(&runs[1]) {
                swaps += 1;
            }
        }
        let freq = swaps as f64 / trials as f64;
        assert!((freq - 0.5).abs() < 0.01, "pair swap frequency {freq}");
    }

    #[test]
    fn repeat_respects_displacement_bound() {
        let playlist = Playlist::from_group_sizes(&[100]).unwrap();
        let mut config = ShuffleConfig::new(MapKind::VonMises);
        config.alter_kind = AlterKind::Partial;
        let mut rng = RngStream::from_seed(15);
        for _ in 0..20 {
            let runs = shuffle_repeat(&playlist, &config, 2, &mut rng).unwrap();
            let rank = |run: &[Item], idx: u32| {
                run.iter()
                    .filter(|i| i.group_id == 0)
                    .position(|i| i.index_in_group == idx)
                    .unwrap()
            };
            for idx in 0..100 {
                let before = rank(&runs[0], idx);
                let after = rank(&runs[1], idx);
                assert!(before.abs_diff(after) <= 25, "{before} -> {after}");
            }
        }
    }
}
