//! Alter step: how much a group's internal order changes between two
//! consecutive shuffles.
//!
//! The full alter is an unbiased reshuffle. The partial alter relaxes only
//! slightly from the previous order: every position gets one turn in random
//! order, its occupant draws a bounded offset (a centered binomial over
//! roughly a quarter of the group length), and swaps with the target if both
//! participants are still unswapped. Items therefore move at most once per
//! alter, and repeated alters leave the long-run index distribution uniform.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::reference::fisher_yates;
use crate::rng::RngStream;

/// Reshuffles the group order from scratch.
pub fn full_alter<T>(order: &mut [T], rng: &mut RngStream) {
    fisher_yates(order, rng);
}

/// The probability margin 1 - p0, where p0 solves
/// p0^2 + (1 - p0)^2 p0^2 = 1/2 on [1/2, 1]. Edge items swap inward with
/// probability p0 and outward with probability 1 - p0; the polynomial pins
/// the two-item swap frequency at exactly one half.
#[derive(Debug, Clone, Copy)]
pub struct PMargin {
    pub value: f64,
}

/// Solves for the margin once by bisection (the polynomial is monotone on
/// the bracket) and caches it. Root-finding rather than a hard-coded radical
/// keeps the constant self-validating.
pub fn compute_p_margin() -> PMargin {
    static CACHE: OnceLock<f64> = OnceLock::new();
    let value = *CACHE.get_or_init(|| {
        let f = |p: f64| p * p + (1.0 - p) * (1.0 - p) * p * p - 0.5;
        let (mut lo, mut hi) = (0.5, 1.0);
        while hi - lo > 1e-15 {
            let mid = 0.5 * (lo + hi);
            if f(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        1.0 - 0.5 * (lo + hi)
    });
    PMargin { value }
}

/// Success probability for the binomial jump of the item at index `i`:
/// linear from 1 - p_margin at the left edge down to p_margin at the right
/// edge, so edge items drift inward. Symmetric: p(i) + p(n-1-i) = 1.
pub fn swap_probability_param(i: usize, n_group: usize, p_margin: f64) -> Result<f64> {
    if n_group < 2 {
        return Err(Error::Size(format!(
            "swap probability needs a group of at least 2, got {n_group}"
        )));
    }
    if i >= n_group {
        return Err(Error::Parameter(format!(
            "index {i} out of range for group of {n_group}"
        )));
    }
    let ramp = (n_group - 1 - i) as f64 / (n_group - 1) as f64;
    Ok(p_margin + (1.0 - 2.0 * p_margin) * ramp)
}

/// Centered binomial jump for one item: support width, success probability,
/// and the left shift that centers the draw.
#[derive(Debug, Clone, Copy)]
pub struct JumpDistribution {
    pub support_n: u64,
    pub p: f64,
    pub shift: u64,
}

impl JumpDistribution {
    /// support_n = 2 ceil((n_group - 1)/4), always even, so the shifted
    /// support {-shift, ..., +shift} has odd length and a proper center.
    pub fn new(i: usize, n_group: usize) -> Result<Self> {
        let p = swap_probability_param(i, n_group, compute_p_margin().value)?;
        let shift = (n_group - 1).div_ceil(4) as u64;
        Ok(Self {
            support_n: 2 * shift,
            p,
            shift,
        })
    }

    pub fn sample(&self, rng: &mut RngStream) -> i64 {
        rng.binomial(self.support_n, self.p) as i64 - self.shift as i64
    }
}

/// Draws the offset the item at index `i` attempts to move by:
/// Binomial(support_n, p(i)) - support_n/2, landing in
/// [-ceil((n_group-1)/4), +ceil((n_group-1)/4)].
pub fn sample_jump(i: usize, n_group: usize, rng: &mut RngStream) -> Result<i64> {
    Ok(JumpDistribution::new(i, n_group)?.sample(rng))
}

/// Protocol core, deterministic given the turn order and the jump draws.
/// `jump` is consulted only for positions whose occupant still has its turn
/// (it is called with the occupant's current index, which for an unswapped
/// occupant is its position).
///
/// Per turn: offset 0 locks the occupant in place (a self swap); an
/// in-bounds unlocked target swaps and locks both; anything else burns the
/// turn but leaves the occupant available as a later swap target.
fn run_partial_alter<T>(
    order: &mut [T],
    turn_order: &[usize],
    mut jump: impl FnMut(usize) -> i64,
) {
    let n = order.len();
    let mut locked = vec![false; n];
    for &p in turn_order {
        if locked[p] {
            continue;
        }
        let d = jump(p);
        if d == 0 {
            locked[p] = true;
            continue;
        }
        let target = p as i64 + d;
        if target < 0 || target >= n as i64 {
            continue;
        }
        let t = target as usize;
        if locked[t] {
            continue;
        }
        order.swap(p, t);
        locked[p] = true;
        locked[t] = true;
    }
}

/// One partial alter pass over a group order, in place. Groups of size 1
/// are untouched and consume no draws. Draw order: one Fisher-Yates pass
/// for the turn order, then one binomial per non-forfeited turn.
pub fn partial_alter<T>(order: &mut [T], rng: &mut RngStream) {
    let n = order.len();
    if n <= 1 {
        return;
    }
    let mut turns: Vec<usize> = (0..n).collect();
    fisher_yates(&mut turns, rng);
    run_partial_alter(order, &turns, |i| {
        sample_jump(i, n, rng).expect("index in range for non-trivial group")
    });
}
