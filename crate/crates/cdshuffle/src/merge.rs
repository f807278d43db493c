//! Merging per-group positioned items into one global order.
//!
//! Three interchangeable strategies are provided: a comparison sort over the
//! concatenation, a k-way heap merge that exploits per-group sortedness, and
//! a byte-wise LSD radix sort over an order-preserving integer image of the
//! position. All three produce identical output for identical input,
//! including on exact position ties, which every strategy resolves by
//! ascending (group_id, index_in_group).

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::playlist::Item;

/// An item annotated with its real-line position, ready to merge.
#[derive(Debug, Clone, PartialEq)]
pub struct PositionedItem {
    pub item: Item,
    pub position: f64,
}

impl PositionedItem {
    pub fn new(item: Item, position: f64) -> Self {
        Self { item, position }
    }
}

/// 64-bit integer image of a finite f64 position such that unsigned integer
/// order equals numeric order. Negative values are bit-complemented,
/// non-negative values get the sign bit set; -0.0 and +0.0 collapse to one
/// key first so the two zero encodings cannot order differently.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct SortKey(u64);

impl SortKey {
    pub fn from_position(position: f64) -> Result<Self> {
        if !position.is_finite() {
            return Err(Error::NonFinitePosition(format!("position {position}")));
        }
        let bits = canonical(position).to_bits();
        let flipped = if bits & SIGN_BIT != 0 { !bits } else { bits | SIGN_BIT };
        Ok(Self(flipped))
    }

    pub fn get(self) -> u64 {
        self.0
    }
}

const SIGN_BIT: u64 = 1 << 63;

/// Collapses -0.0 to +0.0; all other values pass through.
fn canonical(position: f64) -> f64 {
    if position == 0.0 {
        0.0
    } else {
        position
    }
}

fn validate_finite(groups: &[Vec<PositionedItem>]) -> Result<()> {
    for group in groups {
        for pi in group {
            if !pi.position.is_finite() {
                return Err(Error::NonFinitePosition(format!(
                    "{:?} in group {}",
                    pi.item.item_id, pi.item.group_id
                )));
            }
        }
    }
    Ok(())
}

/// Full sort key: position first, ties by (group_id, index_in_group).
fn full_key(pi: &PositionedItem) -> (f64, u32, u32) {
    (canonical(pi.position), pi.item.group_id, pi.item.index_in_group)
}

fn compare_full(a: &PositionedItem, b: &PositionedItem) -> Ordering {
    let (pa, ga, ia) = full_key(a);
    let (pb, gb, ib) = full_key(b);
    pa.total_cmp(&pb).then(ga.cmp(&gb)).then(ia.cmp(&ib))
}

/// Baseline strategy: concatenate everything and comparison-sort it.
pub fn merge_comparison(groups: Vec<Vec<PositionedItem>>) -> Result<Vec<Item>> {
    validate_finite(&groups)?;
    let mut flat: Vec<PositionedItem> = groups.into_iter().flatten().collect();
    flat.sort_by(compare_full);
    Ok(flat.into_iter().map(|pi| pi.item).collect())
}

struct HeapEntry {
    position: f64,
    group_id: u32,
    index_in_group: u32,
    group: usize,
    offset: usize,
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for HeapEntry {}
impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapEntry {
    // Reversed so BinaryHeap's max-heap pops the smallest key.
    fn cmp(&self, other: &Self) -> Ordering {
        let key = |e: &Self| (e.position, e.group_id, e.index_in_group);
        let (pa, ga, ia) = key(self);
        let (pb, gb, ib) = key(other);
        pa.total_cmp(&pb)
            .then(ga.cmp(&gb))
            .then(ia.cmp(&ib))
            .reverse()
    }
}

/// Heap-based k-way merge. Every input group must already be sorted
/// non-decreasing by position or the call fails with `UnsortedGroup`.
pub fn merge_kway(mut groups: Vec<Vec<PositionedItem>>) -> Result<Vec<Item>> {
    validate_finite(&groups)?;
    for (gi, group) in groups.iter().enumerate() {
        for pair in group.windows(2) {
            if canonical(pair[1].position) < canonical(pair[0].position) {
                return Err(Error::UnsortedGroup(gi));
            }
        }
    }
    // The heap holds one entry per group, so a tie inside a group would
    // surface in sequence order. Normalize equal-position runs to the
    // (group_id, index) tie order the other strategies use.
    for group in &mut groups {
        let mut start = 0;
        while start < group.len() {
            let mut end = start + 1;
            while end < group.len()
                && canonical(group[end].position) == canonical(group[start].position)
            {
                end += 1;
            }
            if end - start > 1 {
                group[start..end]
                    .sort_by_key(|pi| (pi.item.group_id, pi.item.index_in_group));
            }
            start = end;
        }
    }
    let total = groups.iter().map(Vec::len).sum();
    let mut out = Vec::with_capacity(total);
    let mut groups: Vec<Vec<Option<PositionedItem>>> = groups
        .into_iter()
        .map(|g| g.into_iter().map(Some).collect())
        .collect();
    let mut heap = BinaryHeap::with_capacity(groups.len());
    for (gi, group) in groups.iter().enumerate() {
        if let Some(pi) = group.first() {
            let pi = pi.as_ref().expect("front not yet taken");
            heap.push(HeapEntry {
                position: canonical(pi.position),
                group_id: pi.item.group_id,
                index_in_group: pi.item.index_in_group,
                group: gi,
                offset: 0,
            });
        }
    }
    while let Some(entry) = heap.pop() {
        let taken = groups[entry.group][entry.offset]
            .take()
            .expect("heap entry taken twice");
        out.push(taken.item);
        let next = entry.offset + 1;
        if let Some(pi) = groups[entry.group].get(next) {
            let pi = pi.as_ref().expect("front not yet taken");
            heap.push(HeapEntry {
                position: canonical(pi.position),
                group_id: pi.item.group_id,
                index_in_group: pi.item.index_in_group,
                group: entry.group,
                offset: next,
            });
        }
    }
    Ok(out)
}

/// Radix strategy: items are arranged by (group_id, index_in_group) first,
/// then stably sorted by their 64-bit position key in eight byte-wide LSD
/// passes. Stability of the passes makes the pre-pass order the tie-break,
/// which matches the comparison strategy's explicit tie key.
pub fn merge_radix(groups: Vec<Vec<PositionedItem>>) -> Result<Vec<Item>> {
    validate_finite(&groups)?;
    let mut flat: Vec<PositionedItem> = groups.into_iter().flatten().collect();
    let pre_ordered = flat
        .windows(2)
        .all(|w| (w[0].item.group_id, w[0].item.index_in_group)
            < (w[1].item.group_id, w[1].item.index_in_group));
    if !pre_ordered {
        // Callers that feed groups in id order skip this; arbitrary input
        // still gets the documented tie behaviour.
        flat.sort_by_key(|pi| (pi.item.group_id, pi.item.index_in_group));
    }

    let mut keyed: Vec<(u64, u32)> = flat
        .iter()
        .enumerate()
        .map(|(slot, pi)| {
            let key = SortKey::from_position(pi.position).expect("validated finite");
            (key.get(), slot as u32)
        })
        .collect();
    let mut buf = vec![(0u64, 0u32); keyed.len()];
    for pass in 0..8 {
        let shift = pass * 8;
        let mut counts = [0usize; 256];
        for &(key, _) in &keyed {
            counts[((key >> shift) & 0xFF) as usize] += 1;
        }
        let mut offsets = [0usize; 256];
        let mut running = 0;
        for (digit, &count) in counts.iter().enumerate() {
            offsets[digit] = running;
            running += count;
        }
        for &(key, slot) in &keyed {
            let digit = ((key >> shift) & 0xFF) as usize;
            buf[offsets[digit]] = (key, slot);
            offsets[digit] += 1;
        }
        std::mem::swap(&mut keyed, &mut buf);
    }

    let mut slots: Vec<Option<PositionedItem>> = flat.into_iter().map(Some).collect();
    Ok(keyed
        .into_iter()
        .map(|(_, slot)| slots[slot as usize].take().expect("slot emitted twice").item)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pi(gid: u32, idx: u32, pos: f64) -> PositionedItem {
        PositionedItem::new(Item::new(gid, format!("g{gid}-{idx}"), idx), pos)
    }

    fn ids(items: &[Item]) -> Vec<String> {
        items.iter().map(|i| i.item_id.clone()).collect()
    }

    #[test]
    fn comparison_orders_two_groups() {
        // Interleaving with a tie at 0.5: group 0 wins the tie.
        let g0 = vec![pi(0, 0, -1.0), pi(0, 1, 0.5)];
        let g1 = vec![pi(1, 0, -0.5), pi(1, 1, 0.5)];
        let out = merge_comparison(vec![g0, g1]).unwrap();
        assert_eq!(ids(&out), ["g0-0", "g1-0", "g0-1", "g1-1"]);
    }

    #[test]
    fn tie_broken_by_group_then_index() {
        let g0 = vec![pi(0, 0, 0.0), pi(0, 1, 0.0)];
        let g2 = vec![pi(2, 0, 0.0)];
        let g1 = vec![pi(1, 0, 0.0)];
        let expect = ["g0-0", "g0-1", "g1-0", "g2-0"];
        let groups = vec![g0, g2, g1];
        assert_eq!(ids(&merge_comparison(groups.clone()).unwrap()), expect);
        assert_eq!(ids(&merge_kway(groups.clone()).unwrap()), expect);
        assert_eq!(ids(&merge_radix(groups).unwrap()), expect);
    }

    #[test]
    fn kway_rejects_unsorted_group() {
        let g0 = vec![pi(0, 0, 1.0), pi(0, 1, 0.0)];
        match merge_kway(vec![g0]) {
            Err(Error::UnsortedGroup(0)) => {}
            other => panic!("expected UnsortedGroup, got {other:?}"),
        }
    }

    #[test]
    fn non_finite_position_rejected_by_all() {
        for bad in [f64::NAN, f64::INFINITY, f64::NEG_INFINITY] {
            let mk = || vec![vec![pi(0, 0, bad)]];
            assert!(merge_comparison(mk()).is_err());
            assert!(merge_kway(mk()).is_err());
            assert!(merge_radix(mk()).is_err());
        }
    }

    #[test]
    fn signed_zeros_share_a_key() {
        let a = SortKey::from_position(0.0).unwrap();
        let b = SortKey::from_position(-0.0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sort_key_is_order_isomorphic_on_samples() {
        let values = [
            -1.0e300, -2.5, -1.0, -0.5, -1.0e-300, -0.0, 0.0, 1.0e-300, 0.25,
            1.0, 2.5, 1.0e300,
        ];
        for &a in &values {
            for &b in &values {
                let ka = SortKey::from_position(a).unwrap();
                let kb = SortKey::from_position(b).unwrap();
                assert_eq!(ka.cmp(&kb), canonical(a).total_cmp(&canonical(b)));
            }
        }
    }

    #[test]
    fn sort_key_rejects_non_finite() {
        assert!(SortKey::from_position(f64::NAN).is_err());
        assert!(SortKey::from_position(f64::INFINITY).is_err());
    }

    #[test]
    fn signed_zero_tie_uses_group_order_in_every_strategy() {
        // -0.0 in the higher group id must not sneak ahead of +0.0.
        let g0 = vec![pi(0, 0, 0.0)];
        let g1 = vec![pi(1, 0, -0.0)];
        let expect = ["g0-0", "g1-0"];
        let groups = vec![g0, g1];
        assert_eq!(ids(&merge_comparison(groups.clone()).unwrap()), expect);
        assert_eq!(ids(&merge_kway(groups.clone()).unwrap()), expect);
        assert_eq!(ids(&merge_radix(groups).unwrap()), expect);
    }

    #[test]
    fn within_group_tie_resolved_by_index_in_every_strategy() {
        // Sequence order deliberately disagrees with index order on the tie.
        let g0 = vec![pi(0, 2, 0.5), pi(0, 0, 0.5), pi(0, 1, 0.7)];
        let expect = ["g0-0", "g0-2", "g0-1"];
        let groups = vec![g0];
        assert_eq!(ids(&merge_comparison(groups.clone()).unwrap()), expect);
        assert_eq!(ids(&merge_kway(groups.clone()).unwrap()), expect);
        assert_eq!(ids(&merge_radix(groups).unwrap()), expect);
    }

    #[test]
    fn strategies_agree_on_randomized_inputs() {
        use crate::rng::RngStream;
        let mut rng = RngStream::from_seed(0xC0FFEE);
        for _ in 0..200 {
            let group_count = 1 + rng.uniform_int(5);
            let mut groups = Vec::new();
            for gid in 0..group_count {
                let n = 1 + rng.uniform_int(8);
                let mut positions: Vec<f64> = (0..n)
                    .map(|_| {
                        // Quantized positions force plenty of exact ties,
                        // including across the sign boundary.
                        (rng.uniform() * 8.0).floor() / 2.0 - 2.0
                    })
                    .collect();
                positions.sort_by(f64::total_cmp);
                // Indices permuted against position order, the way a
                // shuffled group reaches the merge in practice.
                let mut indices: Vec<u32> = (0..n as u32).collect();
                for i in (1..indices.len()).rev() {
                    indices.swap(i, rng.uniform_int(i + 1));
                }
                groups.push(
                    positions
                        .into_iter()
                        .zip(indices)
                        .map(|(p, j)| pi(gid as u32, j, p))
                        .collect::<Vec<_>>(),
                );
            }
            let a = merge_comparison(groups.clone()).unwrap();
            let b = merge_kway(groups.clone()).unwrap();
            let c = merge_radix(groups).unwrap();
            assert_eq!(a, b);
            assert_eq!(a, c);
        }
    }
}
