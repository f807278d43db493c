//! Cluster-diffusing shuffles for grouped playlists.
//!
//! A plain unbiased shuffle regularly plays several items from the same
//! group back to back. This crate implements shuffles that spread each
//! group across the sequence instead, built from three stages:
//!
//! 1. **alter**: reorder the items inside each group, either from scratch
//!    (full) or by small bounded jumps from the previous arrangement
//!    (partial), so consecutive shuffles feel related;
//! 2. **map**: assign the ordered items of each group real-valued positions
//!    on a shared interval, using an evenly spaced lattice, jittered
//!    lattices (gaussian or von Mises noise), or the eigenvalues of a
//!    random Hermitian matrix (spectral);
//! 3. **merge**: sort all items globally by position, with a deterministic
//!    tie-break, via comparison sort, k-way heap merge, or radix sort.
//!
//! The classic alternatives (unbiased Fisher-Yates, the balanced
//! column-interleave, and the Polacek jitter-and-wrap shuffle) are included
//! both as baselines for the benchmark harness in [`stats`] and as
//! selectable algorithms behind the same [`cd_shuffle`] entry point.

pub mod alter;
pub mod error;
pub mod maps;
pub mod merge;
pub mod pipeline;
pub mod playlist;
pub mod randmat;
pub mod reference;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};
pub use merge::PositionedItem;
pub use pipeline::{
    cd_shuffle, shuffle_repeat, AlterKind, AlterState, MapKind, MergeKind, ShuffleConfig,
};
pub use playlist::{Group, Item, Playlist};
pub use rng::RngStream;
