//! Position maps: each assigns a group's n ordered items to real positions
//! in [-r, r].
//!
//! All four maps share the same skeleton, an evenly spaced lattice
//! (r/n)(1 - n + 2i), and differ in the noise placed on top of it: none
//! (lattice), truncated-support circular noise (von Mises), unbounded noise
//! followed by a sort (Gaussian), or the eigenvalue repulsion of a random
//! matrix (spectral). Ascending output order is part of the contract; the
//! merge step relies on it.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::randmat::{coarse_scale, hermitian_eigenvalues, sample_gue};
use crate::rng::RngStream;

/// Default standard deviation of the Gaussian map's per-item noise.
pub const DEFAULT_SIGMA: f64 = 0.5;

/// Default von Mises concentration, (2/pi)^2. At this value the von Mises
/// noise scaled by 1/pi has roughly the same spread as the Gaussian map's
/// noise while staying inside (-1, 1).
pub const DEFAULT_KAPPA: f64 = 4.0 / (PI * PI);

/// Tunable map parameters. `radius_r` is the half-width of the target
/// interval; the noise parameters default to the values above and exist
/// mainly for experimentation.
#[derive(Debug, Clone, Copy)]
pub struct MapParams {
    pub radius_r: f64,
    pub sigma_w: f64,
    pub kappa: f64,
    pub mu: f64,
}

impl MapParams {
    pub fn new(radius_r: f64) -> Result<Self> {
        let params = Self {
            radius_r,
            sigma_w: DEFAULT_SIGMA,
            kappa: DEFAULT_KAPPA,
            mu: 0.0,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn with_sigma(mut self, sigma_w: f64) -> Result<Self> {
        self.sigma_w = sigma_w;
        self.validate()?;
        Ok(self)
    }

    pub fn with_kappa(mut self, kappa: f64) -> Result<Self> {
        self.kappa = kappa;
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        if !(self.radius_r > 0.0 && self.radius_r.is_finite()) {
            return Err(Error::Parameter(format!(
                "map radius must be positive and finite, got {}",
                self.radius_r
            )));
        }
        if !(self.kappa > 0.0 && self.kappa.is_finite()) {
            return Err(Error::Parameter(format!(
                "von Mises kappa must be positive and finite, got {}",
                self.kappa
            )));
        }
        if !(self.sigma_w > 0.0 && self.sigma_w.is_finite()) {
            return Err(Error::Parameter(format!(
                "gaussian sigma must be positive and finite, got {}",
                self.sigma_w
            )));
        }
        if !self.mu.is_finite() {
            return Err(Error::Parameter("von Mises mu must be finite".into()));
        }
        Ok(())
    }
}

fn check_group_size(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Size("map group size must be at least 1".into()));
    }
    Ok(())
}

/// Deterministic evenly spaced positions: position(i) = (r/n)(1 - n + 2i).
/// Spacing is exactly 2r/n and the sequence is symmetric about 0.
pub fn lattice_map(n: usize, r: f64) -> Result<Vec<f64>> {
    check_group_size(n)?;
    let params = MapParams::new(r)?;
    Ok((0..n)
        .map(|i| (params.radius_r / n as f64) * (1.0 - n as f64 + 2.0 * i as f64))
        .collect())
}

/// Lattice positions with i.i.d. Gaussian(0, sigma) noise added to the index
/// term, then sorted ascending. The noise is unbounded, so neighbor order can
/// invert before the sort; sorting restores ascending positions while the
/// merge tie-break keeps the item assignment stable.
pub fn gaussian_map(n: usize, r: f64, rng: &mut RngStream) -> Result<Vec<f64>> {
    gaussian_map_with(&MapParams::new(r)?, n, rng)
}

pub fn gaussian_map_with(params: &MapParams, n: usize, rng: &mut RngStream) -> Result<Vec<f64>> {
    check_group_size(n)?;
    params.validate()?;
    let scale = params.radius_r / n as f64;
    let mut positions: Vec<f64> = (0..n)
        .map(|i| {
            let noise = rng.gaussian() * params.sigma_w;
            scale * (1.0 - n as f64 + 2.0 * i as f64 + noise)
        })
        .collect();
    positions.sort_by(f64::total_cmp);
    Ok(positions)
}

/// Lattice positions with i.i.d. von Mises(mu, kappa) noise scaled by 1/pi.
/// The scaled noise lies strictly inside (-1, 1), so the supports of adjacent
/// items never overlap and the output is already ascending without a sort.
pub fn von_mises_map(n: usize, r: f64, rng: &mut RngStream) -> Result<Vec<f64>> {
    von_mises_map_with(&MapParams::new(r)?, n, rng)
}

pub fn von_mises_map_with(params: &MapParams, n: usize, rng: &mut RngStream) -> Result<Vec<f64>> {
    check_group_size(n)?;
    params.validate()?;
    let scale = params.radius_r / n as f64;
    Ok((0..n)
        .map(|i| {
            let noise = rng.von_mises(params.mu, params.kappa) / PI;
            scale * (1.0 - n as f64 + 2.0 * i as f64 + noise)
        })
        .collect())
}

/// Ascending eigenvalues of a coarse-scaled n x n GUE draw. Eigenvalue
/// repulsion makes near-collisions rare, which is the whole point: positions
/// spread like a rigid spectrum rather than independent draws.
pub fn spectral_map(n: usize, r: f64, rng: &mut RngStream) -> Result<Vec<f64>> {
    check_group_size(n)?;
    let params = MapParams::new(r)?;
    let matrix = coarse_scale(&sample_gue(n, rng)?, params.radius_r);
    hermitian_eigenvalues(&matrix)
}

/// One von Mises(mu, kappa) draw wrapped onto [-pi, pi]. Exact rejection
/// sampler, not a Gaussian approximation.
pub fn sample_von_mises(mu: f64, kappa: f64, rng: &mut RngStream) -> Result<f64> {
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(Error::Parameter(format!(
            "von Mises kappa must be positive and finite, got {kappa}"
        )));
    }
    if !mu.is_finite() {
        return Err(Error::Parameter("von Mises mu must be finite".into()));
    }
    let raw = rng.von_mises(mu, kappa);
    // rem_euclid lands in [0, 2pi); shifting brings it to [-pi, pi).
    Ok((raw + PI).rem_euclid(2.0 * PI) - PI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::pdf::{tv_distance, wigner_surmise, Histogram};

    #[test]
    fn lattice_examples() {
        assert_eq!(lattice_map(1, 1.0).unwrap(), vec![0.0]);
        assert_eq!(lattice_map(2, 1.0).unwrap(), vec![-0.5, 0.5]);
        assert_eq!(lattice_map(4, 2.0).unwrap(), vec![-1.5, -0.5, 0.5, 1.5]);
    }

    #[test]
    fn lattice_spacing_and_symmetry() {
        for n in [1usize, 2, 3, 7, 50] {
            let r = 1.7;
            let pos = lattice_map(n, r).unwrap();
            assert_eq!(pos.len(), n);
            for w in pos.windows(2) {
                assert!((w[1] - w[0] - 2.0 * r / n as f64).abs() < 1e-12);
            }
            let sum: f64 = pos.iter().sum();
            assert!(sum.abs() < 1e-12);
        }
    }

    #[test]
    fn maps_reject_empty_group_and_bad_radius() {
        let mut rng = RngStream::from_seed(0);
        assert!(lattice_map(0, 1.0).is_err());
        assert!(gaussian_map(0, 1.0, &mut rng).is_err());
        assert!(von_mises_map(0, 1.0, &mut rng).is_err());
        assert!(spectral_map(0, 1.0, &mut rng).is_err());
        assert!(lattice_map(3, 0.0).is_err());
        assert!(lattice_map(3, -1.0).is_err());
        assert!(lattice_map(3, f64::NAN).is_err());
        assert!(MapParams::new(1.0).unwrap().with_kappa(0.0).is_err());
        assert!(MapParams::new(1.0).unwrap().with_sigma(-0.5).is_err());
    }

    #[test]
    fn gaussian_single_item_moments() {
        let mut rng = RngStream::from_seed(21);
        let trials = 100_000;
        let (mut sum, mut sq) = (0.0, 0.0);
        for _ in 0..trials {
            let p = gaussian_map(1, 1.0, &mut rng).unwrap()[0];
            sum += p;
            sq += p * p;
        }
        let mean = sum / trials as f64;
        let sigma = (sq / trials as f64 - mean * mean).sqrt();
        assert!(mean.abs() < 0.01, "mean {mean}");
        assert!((sigma - 0.5).abs() < 0.01, "sigma {sigma}");
    }

    #[test]
    fn gaussian_sorted_and_multiset_preserved() {
        let mut rng = RngStream::from_seed(22);
        for _ in 0..200 {
            let n = 1 + rng.uniform_int(12);
            // Replay the same draws through the raw formula to check the
            // sort changed order only, never values.
            let mut replay = rng.clone();
            let out = gaussian_map(n, 2.0, &mut rng).unwrap();
            let mut raw: Vec<f64> = (0..n)
                .map(|i| {
                    (2.0 / n as f64)
                        * (1.0 - n as f64 + 2.0 * i as f64 + replay.gaussian() * 0.5)
                })
                .collect();
            raw.sort_by(f64::total_cmp);
            assert!(out.windows(2).all(|w| w[0] <= w[1]));
            assert_eq!(out, raw);
        }
    }

    /// Standard normal upper tail by Simpson quadrature, for the inversion
    /// probability oracle. The integrand beyond x = 10 is below 1e-22.
    fn normal_upper_tail(from: f64) -> f64 {
        let steps = 20_000;
        let hi = 10.0;
        let h = (hi - from) / steps as f64;
        let pdf = |x: f64| (-0.5 * x * x).exp() / (2.0 * PI).sqrt();
        let mut acc = pdf(from) + pdf(hi);
        for i in 1..steps {
            let x = from + i as f64 * h;
            acc += pdf(x) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        acc * h / 3.0
    }

    #[test]
    fn gaussian_pair_inversion_rate() {
        // For n=2, r=1 the raw positions invert iff G_1 - G_0 < -2, i.e.
        // with probability Phi(-2 sqrt(2)) since the difference of two
        // sigma=1/2 Gaussians is Gaussian with sigma = 1/sqrt(2).
        let expect = normal_upper_tail(2.0 * 2.0_f64.sqrt());
        let mut rng = RngStream::from_seed(23);
        let trials = 1_000_000;
        let mut inverted = 0u64;
        for _ in 0..trials {
            let mut replay = rng.clone();
            gaussian_map(2, 1.0, &mut rng).unwrap();
            let g0 = replay.gaussian() * 0.5;
            let g1 = replay.gaussian() * 0.5;
            if 0.5 * (1.0 + g1) < 0.5 * (-1.0 + g0) {
                inverted += 1;
            }
        }
        let rate = inverted as f64 / trials as f64;
        assert!((rate - expect).abs() < 0.001, "rate {rate} vs {expect}");
    }

    #[test]
    fn von_mises_map_single_item_support() {
        let mut rng = RngStream::from_seed(24);
        for _ in 0..10_000 {
            let p = von_mises_map(1, 1.0, &mut rng).unwrap()[0];
            assert!((-1.0..=1.0).contains(&p));
        }
    }

    #[test]
    fn von_mises_map_disjoint_windows() {
        let mut rng = RngStream::from_seed(25);
        for _ in 0..10_000 {
            let pos = von_mises_map(3, 1.0, &mut rng).unwrap();
            for (i, p) in pos.iter().enumerate() {
                let lo = (2.0 * i as f64 - 3.0) / 3.0;
                let hi = (2.0 * i as f64 - 1.0) / 3.0;
                assert!(lo < *p && *p < hi, "position {p} outside ({lo}, {hi})");
            }
        }
    }

    #[test]
    fn von_mises_map_spacing_bounds_and_mean() {
        let mut rng = RngStream::from_seed(26);
        let trials = 100_000;
        let mut sum = 0.0;
        for _ in 0..trials {
            let pos = von_mises_map(2, 1.0, &mut rng).unwrap();
            let s = pos[1] - pos[0];
            assert!(s > 0.0 && s < 2.0, "spacing {s}");
            sum += s;
        }
        let mean = sum / trials as f64;
        assert!((mean - 1.0).abs() < 0.02, "mean spacing {mean}");

        // General n: spacings stay strictly inside (0, 4r/n).
        let (n, r) = (7, 1.3);
        for _ in 0..2_000 {
            let pos = von_mises_map(n, r, &mut rng).unwrap();
            for w in pos.windows(2) {
                let s = w[1] - w[0];
                assert!(s > 0.0 && s < 4.0 * r / n as f64);
            }
        }
    }

    #[test]
    fn sample_von_mises_contract() {
        let mut rng = RngStream::from_seed(27);
        assert!(sample_von_mises(0.0, 0.0, &mut rng).is_err());
        assert!(sample_von_mises(0.0, -1.0, &mut rng).is_err());

        let draws = 1_000_000;
        let (mut sin_sum, mut cos_sum) = (0.0, 0.0);
        for _ in 0..draws {
            let v = sample_von_mises(0.0, DEFAULT_KAPPA, &mut rng).unwrap();
            assert!((-PI..=PI).contains(&v));
            sin_sum += v.sin();
            cos_sum += v.cos();
        }
        let circ_mean = sin_sum.atan2(cos_sum);
        assert!(circ_mean.abs() < 0.01, "circular mean {circ_mean}");

        // Large kappa limit: von Mises(0, k) tends to Gaussian(0, 1/sqrt(k)).
        let (mut sum, mut sq) = (0.0, 0.0);
        let m = 100_000;
        for _ in 0..m {
            let v = sample_von_mises(0.0, 100.0, &mut rng).unwrap();
            sum += v;
            sq += v * v;
        }
        let mean = sum / m as f64;
        let sigma = (sq / m as f64 - mean * mean).sqrt();
        assert!((sigma - 0.1).abs() < 0.01, "sigma {sigma}");

        // Off-interval mean wraps back onto [-pi, pi].
        let mu = 4.0;
        let (mut sin_sum, mut cos_sum) = (0.0, 0.0);
        for _ in 0..m {
            let v = sample_von_mises(mu, 5.0, &mut rng).unwrap();
            assert!((-PI..=PI).contains(&v));
            sin_sum += v.sin();
            cos_sum += v.cos();
        }
        let circ_mean = sin_sum.atan2(cos_sum);
        let expect = mu - 2.0 * PI;
        assert!((circ_mean - expect).abs() < 0.01, "{circ_mean} vs {expect}");
    }

    #[test]
    fn spectral_single_item_is_scaled_gaussian() {
        let mut rng = RngStream::from_seed(28);
        let trials = 100_000;
        let (mut sum, mut sq) = (0.0, 0.0);
        for _ in 0..trials {
            // For n = 1 the map reduces to r/2 times one N(0,1) draw.
            let p = spectral_map(1, 1.0, &mut rng).unwrap()[0];
            sum += p;
            sq += p * p;
        }
        let mean = sum / trials as f64;
        let sigma = (sq / trials as f64 - mean * mean).sqrt();
        assert!(mean.abs() < 0.01, "mean {mean}");
        assert!((sigma - 0.5).abs() < 0.01, "sigma {sigma}");
    }

    #[test]
    fn spectral_two_by_two_spacing_matches_wigner_surmise() {
        let mut rng = RngStream::from_seed(29);
        let trials = 100_000;
        let mut spacings = Vec::with_capacity(trials);
        for _ in 0..trials {
            let pos = spectral_map(2, 1.0, &mut rng).unwrap();
            spacings.push(pos[1] - pos[0]);
        }
        let mean: f64 = spacings.iter().sum::<f64>() / trials as f64;
        let mut hist = Histogram::new(0.0, 4.0, 64).unwrap();
        for s in &spacings {
            hist.add(s / mean);
        }
        let tv = tv_distance(&hist, |s| wigner_surmise(2, s).unwrap()).unwrap();
        assert!(tv < 0.02, "TV distance {tv}");
    }

    #[test]
    fn spectral_spectrum_stays_near_target_interval() {
        let mut rng = RngStream::from_seed(30);
        let (n, r) = (20, 2.0);
        let mut outside = 0usize;
        let mut total = 0usize;
        for _ in 0..500 {
            let pos = spectral_map(n, r, &mut rng).unwrap();
            assert!(pos.windows(2).all(|w| w[0] <= w[1]));
            total += pos.len();
            outside += pos.iter().filter(|p| p.abs() > 1.05 * r).count();
        }
        assert!(
            (outside as f64) < 0.01 * total as f64,
            "{outside} of {total} outside 1.05 r"
        );
    }

    #[test]
    fn map_position_sums_center_on_zero() {
        let mut rng = RngStream::from_seed(31);
        let trials = 20_000;
        let n = 5;
        let mut sums = [0.0_f64; 3];
        for _ in 0..trials {
            sums[0] += gaussian_map(n, 1.0, &mut rng).unwrap().iter().sum::<f64>();
            sums[1] += von_mises_map(n, 1.0, &mut rng).unwrap().iter().sum::<f64>();
            sums[2] += spectral_map(n, 1.0, &mut rng).unwrap().iter().sum::<f64>();
        }
        for (label, sum) in ["gaussian", "von_mises", "spectral"].iter().zip(sums) {
            let mean = sum / trials as f64;
            assert!(mean.abs() < 0.02, "{label} mean position sum {mean}");
        }
    }
}
