//! Reference shuffles the cluster-diffusing maps are benchmarked against:
//! the unbiased Fisher-Yates shuffle, Fiedler's Balanced Shuffle, and
//! Polacek's circular spread (the Spotify approach).

use crate::error::{Error, Result};
use crate::merge::{merge_comparison, PositionedItem};
use crate::playlist::{Item, Playlist};
use crate::rng::RngStream;

/// Uniform in-place permutation. Draw count is len - 1 uniform integers,
/// taken for positions len-1 down to 1.
pub fn fisher_yates<T>(items: &mut [T], rng: &mut RngStream) {
    for i in (1..items.len()).rev() {
        let j = rng.uniform_int(i + 1);
        items.swap(i, j);
    }
}

/// Unbiased whole-playlist shuffle: flatten the groups (ascending id) and
/// Fisher-Yates the result. The flatten order is irrelevant to the output
/// distribution but fixed for reproducibility.
pub fn unbiased_shuffle(playlist: &Playlist, rng: &mut RngStream) -> Vec<Item> {
    let mut flat: Vec<Item> = playlist
        .groups()
        .iter()
        .flat_map(|g| g.items().iter().cloned())
        .collect();
    fisher_yates(&mut flat, rng);
    flat
}

/// One group padded with spacers to the playlist-wide slot count L.
/// `None` slots are spacers; exactly k slots hold items for a group of
/// size k, one per contiguous interval.
#[derive(Debug, Clone)]
pub struct PaddedGroup {
    slots: Vec<Option<Item>>,
}

impl PaddedGroup {
    pub fn slots(&self) -> &[Option<Item>] {
        &self.slots
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }
}

/// Spreads a group's items (already in their shuffled order) over `l` slots.
/// Slot range [0, l) is split into k contiguous intervals with boundaries
/// floor(j*l/k); item j lands on a uniformly chosen slot of interval j.
/// Interval lengths differ by at most one, so every item gets breathing room
/// proportional to l/k.
pub fn balanced_pad(items: &[Item], l: usize, rng: &mut RngStream) -> Result<PaddedGroup> {
    let k = items.len();
    if k == 0 {
        return Err(Error::EmptyInput("balanced_pad needs at least one item"));
    }
    if l < k {
        return Err(Error::Size(format!(
            "cannot pad {k} items into {l} slots"
        )));
    }
    let mut slots = vec![None; l];
    for (j, item) in items.iter().enumerate() {
        let lo = j * l / k;
        let hi = (j + 1) * l / k;
        let slot = lo + rng.uniform_int(hi - lo);
        slots[slot] = Some(item.clone());
    }
    Ok(PaddedGroup { slots })
}

/// Fiedler's Balanced Shuffle. Each group is Fisher-Yates shuffled and
/// padded to L = longest group size; the padded columns are then walked
/// left to right, shuffling each column's items before appending them.
///
/// Draw order: per group ascending by id, the group's shuffle then its
/// padding choices; afterwards one shuffle per non-empty column, columns
/// ascending.
pub fn balanced_shuffle(playlist: &Playlist, rng: &mut RngStream) -> Result<Vec<Item>> {
    let l = playlist.max_group_len();
    let mut padded = Vec::with_capacity(playlist.groups().len());
    for group in playlist.groups() {
        let mut items = group.items().to_vec();
        fisher_yates(&mut items, rng);
        padded.push(balanced_pad(&items, l, rng)?);
    }
    let mut out = Vec::with_capacity(playlist.total_items());
    for t in 0..l {
        let mut batch: Vec<Item> = padded
            .iter()
            .filter_map(|pg| pg.slots()[t].clone())
            .collect();
        fisher_yates(&mut batch, rng);
        out.extend(batch);
    }
    Ok(out)
}

/// Positions for one group of the Polacek shuffle, in the group's current
/// item order: center i/n plus an independent uniform jitter on
/// [-w/(2n), +w/(2n)), then (when `circular_shift` is set) one shared
/// uniform shift with everything wrapped back onto [0, 1).
///
/// With the shift disabled the raw line positions are returned unwrapped;
/// that variant is the real-line balanced spacing model the statistics
/// module validates against.
pub(crate) fn polacek_group_positions(
    n: usize,
    w: f64,
    circular_shift: bool,
    rng: &mut RngStream,
) -> Vec<f64> {
    let nf = n as f64;
    let mut positions: Vec<f64> = (0..n)
        .map(|i| {
            let jitter = (rng.uniform() - 0.5) * (w / nf);
            i as f64 / nf + jitter
        })
        .collect();
    if circular_shift {
        let shift = rng.uniform();
        for p in &mut positions {
            *p = (*p + shift).rem_euclid(1.0);
        }
    }
    positions
}

/// Polacek's shuffle: every group is spread around the unit circle with
/// jitter width `w`, independently rotated, then all groups are merged by
/// position. Position ties are broken by (group id, item index).
pub fn polacek_shuffle(playlist: &Playlist, w: f64, rng: &mut RngStream) -> Result<Vec<Item>> {
    if !(0.0..=1.0).contains(&w) {
        return Err(Error::Parameter(format!(
            "jitter width must lie in [0, 1], got {w}"
        )));
    }
    let mut groups = Vec::with_capacity(playlist.groups().len());
    for group in playlist.groups() {
        let mut items = group.items().to_vec();
        fisher_yates(&mut items, rng);
        let positions = polacek_group_positions(items.len(), w, true, rng);
        groups.push(
            items
                .into_iter()
                .zip(positions)
                .map(|(item, p)| PositionedItem::new(item, p))
                .collect::<Vec<_>>(),
        );
    }
    merge_comparison(groups)
}
