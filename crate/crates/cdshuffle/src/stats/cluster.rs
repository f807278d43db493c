//! Cluster detection in shuffled sequences and aggregation across trials.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::playlist::Item;

/// Maximal run of consecutive items sharing a group. Isolated items are
/// size-1 clusters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cluster {
    pub group_id: u32,
    pub start_index: usize,
    pub size: usize,
}

pub fn find_clusters(sequence: &[Item]) -> Vec<Cluster> {
    let mut clusters = Vec::new();
    let mut iter = sequence.iter().enumerate();
    let Some((_, first)) = iter.next() else {
        return clusters;
    };
    let mut current = Cluster {
        group_id: first.group_id,
        start_index: 0,
        size: 1,
    };
    for (idx, item) in iter {
        if item.group_id == current.group_id {
            current.size += 1;
        } else {
            clusters.push(current);
            current = Cluster {
                group_id: item.group_id,
                start_index: idx,
                size: 1,
            };
        }
    }
    clusters.push(current);
    clusters
}

/// Cluster statistics pooled over shuffled sequences: a size histogram over
/// all clusters and a positional histogram over clusters of two or more
/// items (an isolated item has no meaningful location).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterReport {
    size_histogram: BTreeMap<usize, u64>,
    location_histogram: Vec<u64>,
    trials: u64,
    total_items: u64,
    total_clusters: u64,
}

impl ClusterReport {
    pub fn new(location_bins: usize) -> Result<Self> {
        if location_bins == 0 {
            return Err(Error::Parameter(
                "cluster report needs at least one location bin".into(),
            ));
        }
        Ok(Self {
            size_histogram: BTreeMap::new(),
            location_histogram: vec![0; location_bins],
            trials: 0,
            total_items: 0,
            total_clusters: 0,
        })
    }

    /// Records one sequence's clusters. A cluster's location is its midpoint
    /// index divided by the sequence length, binned over [0, 1).
    pub fn record(&mut self, sequence_len: usize, clusters: &[Cluster]) {
        self.trials += 1;
        self.total_items += sequence_len as u64;
        for cluster in clusters {
            *self.size_histogram.entry(cluster.size).or_insert(0) += 1;
            self.total_clusters += 1;
            if cluster.size >= 2 {
                let midpoint = cluster.start_index as f64 + 0.5 * (cluster.size as f64 - 1.0);
                let location = midpoint / sequence_len as f64;
                let bins = self.location_histogram.len();
                let idx = ((location * bins as f64) as usize).min(bins - 1);
                self.location_histogram[idx] += 1;
            }
        }
    }

    /// Folds another report (same binning) into this one.
    pub fn merge(&mut self, other: &ClusterReport) -> Result<()> {
        if other.location_histogram.len() != self.location_histogram.len() {
            return Err(Error::Parameter(format!(
                "cannot merge cluster reports with {} and {} location bins",
                self.location_histogram.len(),
                other.location_histogram.len()
            )));
        }
        for (&size, &count) in &other.size_histogram {
            *self.size_histogram.entry(size).or_insert(0) += count;
        }
        for (mine, theirs) in self
            .location_histogram
            .iter_mut()
            .zip(&other.location_histogram)
        {
            *mine += theirs;
        }
        self.trials += other.trials;
        self.total_items += other.total_items;
        self.total_clusters += other.total_clusters;
        Ok(())
    }

    /// Mean cluster size over everything recorded; every item belongs to
    /// exactly one cluster, so this is items over clusters. Zero before any
    /// nonempty sequence is recorded.
    pub fn average_size(&self) -> f64 {
        if self.total_clusters == 0 {
            return 0.0;
        }
        self.total_items as f64 / self.total_clusters as f64
    }

    pub fn size_histogram(&self) -> &BTreeMap<usize, u64> {
        &self.size_histogram
    }

    pub fn location_histogram(&self) -> &[u64] {
        &self.location_histogram
    }

    pub fn location_bins(&self) -> usize {
        self.location_histogram.len()
    }

    pub fn location_bin_start(&self, idx: usize) -> f64 {
        idx as f64 / self.location_histogram.len() as f64
    }

    pub fn trials(&self) -> u64 {
        self.trials
    }

    pub fn total_items(&self) -> u64 {
        self.total_items
    }

    pub fn total_clusters(&self) -> u64 {
        self.total_clusters
    }
}
