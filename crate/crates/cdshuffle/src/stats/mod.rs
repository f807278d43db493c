//! Statistics for shuffled output: cluster detection and pooling, the
//! standard benchmark cells and harness, and spacing-density machinery.

pub mod bench;
pub mod cluster;
pub mod pdf;
