//! Playlist domain types.
//!
//! A playlist is a set of groups (artists, albums, any clustering key), each
//! holding at least one item. Group ids are non-negative integers, unique
//! within a playlist; item ids are free-form strings, unique within their
//! group. The playlist keeps its groups sorted ascending by group id so that
//! every randomized operation visits groups in one documented order.

use std::collections::HashSet;

use crate::error::{Error, Result};

/// One playlist entry.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Item {
    pub group_id: u32,
    pub item_id: String,
    /// Current position of the item within its group's ordering.
    pub index_in_group: u32,
}

impl Item {
    pub fn new(group_id: u32, item_id: impl Into<String>, index_in_group: u32) -> Self {
        Self {
            group_id,
            item_id: item_id.into(),
            index_in_group,
        }
    }
}

/// A non-empty set of same-group items in a definite order.
#[derive(Debug, Clone)]
pub struct Group {
    group_id: u32,
    items: Vec<Item>,
}

impl Group {
    /// Builds a group from item labels, assigning indices 0..len in order.
    pub fn new<I, S>(group_id: u32, labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let items: Vec<Item> = labels
            .into_iter()
            .enumerate()
            .map(|(j, label)| Item::new(group_id, label, j as u32))
            .collect();
        Self::from_items(group_id, items)
    }

    /// Builds a group from fully formed items, validating every invariant:
    /// non-empty, matching group ids, indices equal to positions, unique
    /// item ids.
    pub fn from_items(group_id: u32, items: Vec<Item>) -> Result<Self> {
        if items.is_empty() {
            return Err(Error::Playlist(format!("group {group_id} has no items")));
        }
        let mut seen = HashSet::with_capacity(items.len());
        for (j, item) in items.iter().enumerate() {
            if item.group_id != group_id {
                return Err(Error::Playlist(format!(
                    "item {:?} carries group id {} inside group {}",
                    item.item_id, item.group_id, group_id
                )));
            }
            if item.index_in_group as usize != j {
                return Err(Error::Playlist(format!(
                    "item {:?} has index {} but sits at position {} of group {}",
                    item.item_id, item.index_in_group, j, group_id
                )));
            }
            if !seen.insert(item.item_id.as_str()) {
                return Err(Error::Playlist(format!(
                    "duplicate item id {:?} in group {}",
                    item.item_id, group_id
                )));
            }
        }
        Ok(Self { group_id, items })
    }

    pub fn group_id(&self) -> u32 {
        self.group_id
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        // Construction rejects empty groups, so this is always false.
        self.items.is_empty()
    }
}

/// A validated playlist: at least one group, distinct group ids, groups kept
/// in ascending group id order.
#[derive(Debug, Clone)]
pub struct Playlist {
    groups: Vec<Group>,
}

impl Playlist {
    pub fn new(mut groups: Vec<Group>) -> Result<Self> {
        if groups.is_empty() {
            return Err(Error::EmptyInput("playlist has no groups"));
        }
        groups.sort_by_key(Group::group_id);
        for pair in groups.windows(2) {
            if pair[0].group_id == pair[1].group_id {
                return Err(Error::Playlist(format!(
                    "duplicate group id {}",
                    pair[0].group_id
                )));
            }
        }
        Ok(Self { groups })
    }

    /// Convenience constructor for benchmarks and tests: group ids are
    /// 0..sizes.len() and item ids are synthesized as "g<gid>-<j>".
    pub fn from_group_sizes(sizes: &[usize]) -> Result<Self> {
        let groups = sizes
            .iter()
            .enumerate()
            .map(|(gid, &n)| {
                if n == 0 {
                    return Err(Error::Playlist(format!("group {gid} has no items")));
                }
                Group::new(gid as u32, (0..n).map(|j| format!("g{gid}-{j}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(groups)
    }

    pub fn groups(&self) -> &[Group] {
        &self.groups
    }

    pub fn total_items(&self) -> usize {
        self.groups.iter().map(Group::len).sum()
    }

    /// Largest group size. Playlists are non-empty so the maximum exists.
    pub fn max_group_len(&self) -> usize {
        self.groups.iter().map(Group::len).max().unwrap_or(0)
    }
}
