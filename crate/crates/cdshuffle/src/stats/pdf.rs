//! Analytic spacing densities, the samplers for their matching models, and
//! the histogram / total-variation / chi-square machinery used to compare
//! empirical spacing data against those densities.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::randmat::{hermitian_eigenvalues, sample_gue};
use crate::reference::polacek_group_positions;
use crate::rng::RngStream;

/// Fixed-range histogram with an explicit out-of-range counter, so total
/// variation against a density can account for mass the range misses.
#[derive(Debug, Clone)]
pub struct Histogram {
    lo: f64,
    hi: f64,
    counts: Vec<u64>,
    outside: u64,
}

impl Histogram {
    pub fn new(lo: f64, hi: f64, bins: usize) -> Result<Self> {
        if bins == 0 {
            return Err(Error::Parameter("histogram needs at least one bin".into()));
        }
        if !(lo.is_finite() && hi.is_finite() && hi > lo) {
            return Err(Error::Parameter(format!(
                "histogram range [{lo}, {hi}) is not a finite interval"
            )));
        }
        Ok(Self {
            lo,
            hi,
            counts: vec![0; bins],
            outside: 0,
        })
    }

    /// Samples in [lo, hi) land in a bin; everything else, NaN included,
    /// counts as outside.
    pub fn add(&mut self, x: f64) {
        let t = (x - self.lo) / (self.hi - self.lo);
        if (0.0..1.0).contains(&t) {
            let idx = ((t * self.counts.len() as f64) as usize).min(self.counts.len() - 1);
            self.counts[idx] += 1;
        } else {
            self.outside += 1;
        }
    }

    pub fn add_all<I: IntoIterator<Item = f64>>(&mut self, xs: I) {
        for x in xs {
            self.add(x);
        }
    }

    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn bin_width(&self) -> f64 {
        (self.hi - self.lo) / self.counts.len() as f64
    }

    pub fn bin_start(&self, idx: usize) -> f64 {
        self.lo + idx as f64 * self.bin_width()
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn outside(&self) -> u64 {
        self.outside
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum::<u64>() + self.outside
    }
}

/// Total variation distance between the histogram's empirical distribution
/// and a probability density, as half the L1 difference over the bins plus
/// the out-of-range cell. Bin masses of the density come from an eight-point
/// midpoint rule, which keeps kinked densities accurate.
pub fn tv_distance(hist: &Histogram, pdf: impl Fn(f64) -> f64) -> Result<f64> {
    let total = hist.total();
    if total == 0 {
        return Err(Error::EmptyHistogram("tv_distance"));
    }
    let total = total as f64;
    let width = hist.bin_width();
    let sub = 8;
    let sub_width = width / sub as f64;
    let mut l1 = 0.0;
    let mut mass_in_range = 0.0;
    for (idx, &count) in hist.counts().iter().enumerate() {
        let start = hist.bin_start(idx);
        let mut mass = 0.0;
        for j in 0..sub {
            mass += pdf(start + (j as f64 + 0.5) * sub_width) * sub_width;
        }
        mass_in_range += mass;
        l1 += (count as f64 / total - mass).abs();
    }
    let pdf_outside = (1.0 - mass_in_range).max(0.0);
    let emp_outside = hist.outside() as f64 / total;
    Ok(0.5 * (l1 + (emp_outside - pdf_outside).abs()))
}

const GAMMA_EPS: f64 = 1e-14;
const GAMMA_MAX_ITER: usize = 600;

/// Lanczos approximation, good to ~1e-14 relative for x > 0.
fn ln_gamma(x: f64) -> f64 {
    const COF: [f64; 6] = [
        76.180_091_729_471_46,
        -86.505_320_329_416_77,
        24.014_098_240_830_91,
        -1.231_739_572_450_155,
        0.120_865_097_386_617_9e-2,
        -0.539_523_938_495_3e-5,
    ];
    let tmp = x + 5.5;
    let tmp = tmp - (x + 0.5) * tmp.ln();
    let mut y = x;
    let mut ser = 1.000_000_000_190_015;
    for c in COF {
        y += 1.0;
        ser += c / y;
    }
    -tmp + (2.506_628_274_631_000_5 * ser / x).ln()
}

/// Lower regularized incomplete gamma P(a, x) by series expansion.
fn gamma_series(a: f64, x: f64) -> f64 {
    let mut ap = a;
    let mut del = 1.0 / a;
    let mut sum = del;
    for _ in 0..GAMMA_MAX_ITER {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if del.abs() < sum.abs() * GAMMA_EPS {
            break;
        }
    }
    sum * (-x + a * x.ln() - ln_gamma(a)).exp()
}

/// Upper regularized incomplete gamma Q(a, x) by modified Lentz continued
/// fraction; valid for x >= a + 1 where it converges fast.
fn gamma_cont_frac(a: f64, x: f64) -> f64 {
    const FPMIN: f64 = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / FPMIN;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..=GAMMA_MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b + an / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < GAMMA_EPS {
            break;
        }
    }
    (-x + a * x.ln() - ln_gamma(a)).exp() * h
}

/// Right-tail probability of a chi-square statistic: Q(dof/2, stat/2).
pub fn chi_square_p_value(stat: f64, dof: f64) -> f64 {
    assert!(stat >= 0.0 && stat.is_finite(), "statistic must be finite and nonnegative");
    assert!(dof > 0.0 && dof.is_finite(), "dof must be finite and positive");
    let a = 0.5 * dof;
    let x = 0.5 * stat;
    if x == 0.0 {
        return 1.0;
    }
    if x < a + 1.0 {
        1.0 - gamma_series(a, x)
    } else {
        gamma_cont_frac(a, x)
    }
}

/// Gamma function at half-integer arguments: gamma_half(k) = Gamma(k / 2),
/// built exactly from Gamma(1/2) = sqrt(pi) and Gamma(1) = 1 by recursion.
fn gamma_half(k: u32) -> f64 {
    match k {
        0 => panic!("gamma_half(0) is a pole"),
        1 => PI.sqrt(),
        2 => 1.0,
        _ => (0.5 * (k - 2) as f64) * gamma_half(k - 2),
    }
}

/// Constants (a, b) of the surmise density a s^beta exp(-b s^2), solved from
/// the unit-mass and unit-mean constraints rather than hard-coded.
fn surmise_constants(beta: u32) -> Result<(f64, f64)> {
    static TABLE: OnceLock<[(f64, f64); 3]> = OnceLock::new();
    let idx = match beta {
        1 => 0,
        2 => 1,
        4 => 2,
        other => {
            return Err(Error::Parameter(format!(
                "surmise beta must be 1, 2, or 4, got {other}"
            )))
        }
    };
    let table = TABLE.get_or_init(|| {
        [1u32, 2, 4].map(|b| {
            let b_const = (gamma_half(b + 2) / gamma_half(b + 1)).powi(2);
            let a_const = 2.0 * b_const.powf(0.5 * (b as f64 + 1.0)) / gamma_half(b + 1);
            (a_const, b_const)
        })
    });
    Ok(table[idx])
}

/// Wigner surmise for the level-spacing density of the classical ensembles,
/// normalized to unit mass and unit mean spacing. beta selects the symmetry
/// class (1 orthogonal, 2 unitary, 4 symplectic).
pub fn wigner_surmise(beta: u32, s: f64) -> Result<f64> {
    let (a, b) = surmise_constants(beta)?;
    if s.is_nan() {
        return Err(Error::Domain("surmise spacing must not be NaN".into()));
    }
    if s < 0.0 {
        return Ok(0.0);
    }
    Ok(a * s.powi(beta as i32) * (-b * s * s).exp())
}

/// Spacing density between consecutive sorted i.i.d. uniform keys on [0, 1]:
/// each of the n + 1 gaps is marginally Beta(1, n), density n (1 - x)^(n-1).
pub fn uniform_spacing_pdf(n: usize, x: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::Size(format!("uniform spacing needs n >= 2, got {n}")));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!(
            "uniform spacing is defined on [0, 1], got {x}"
        )));
    }
    Ok(n as f64 * (1.0 - x).powi(n as i32 - 1))
}

/// Spacing density for n items jittered uniformly within even intervals of
/// [0, 1]: a triangle of half-width 1/n centered on 1/n. Zero outside the
/// support, no domain error.
pub fn balanced_spacing_pdf(n: usize, x: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::Size(format!("balanced spacing needs n >= 2, got {n}")));
    }
    let nf = n as f64;
    Ok(nf * (1.0 - (nf * x - 1.0).abs()).max(0.0))
}

/// Spacing density of the sorted output of the jitter-and-circular-shift
/// model at width w: a mixture of the pair created when the shift wraps one
/// item past the seam (weight 1/(n-1), a uniform density convolved with a
/// descending ramp) and the n-2 surviving interior pairs (the same triangle
/// as the even-interval model, recentered by the jitter width w).
///
/// The convolution has no elementary closed form worth carrying around, so
/// it is evaluated by a midpoint rule with 2^14 points over the uniform
/// factor's support, accurate to ~1e-4. Zero outside the support.
pub fn polacek_spacing_pdf(n: usize, w: f64, x: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::Size(format!("jitter spacing needs n >= 2, got {n}")));
    }
    if !(w > 0.0 && w <= 1.0) {
        return Err(Error::Parameter(format!(
            "jitter width must lie in (0, 1], got {w}"
        )));
    }
    let nf = n as f64;
    let center = 1.0 / nf;
    let scale = nf / w;
    if !(center - w / nf..=center + w / nf).contains(&x) {
        return Ok(0.0);
    }

    // Ramp from `scale` down to 0 across [center - w/2n, center + w/2n]:
    // the density of the seam pair's distance before adding the second
    // item's jitter.
    let ramp = |t: f64| {
        let z = scale * (t - center);
        if z.abs() <= 0.5 {
            scale * (0.5 - z)
        } else {
            0.0
        }
    };
    let m = 1 << 14;
    let half = 0.5 * w / nf;
    let step = 2.0 * half / m as f64;
    let mut acc = 0.0;
    for i in 0..m {
        let tau = -half + (i as f64 + 0.5) * step;
        acc += ramp(x - tau);
    }
    // The uniform factor's density times the step is exactly 1/m.
    let seam = 2.0 * acc / m as f64;

    let interior = scale * (1.0 - (scale * (x - center)).abs()).max(0.0);
    Ok((seam + (nf - 2.0) * interior) / (nf - 1.0))
}

/// Consecutive spacings of n sorted i.i.d. uniform keys, pooled over draws
/// (n - 1 interior gaps per draw).
pub fn sample_uniform_spacings(n: usize, draws: usize, rng: &mut RngStream) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::Size(format!("uniform spacing needs n >= 2, got {n}")));
    }
    let mut out = Vec::with_capacity(draws * (n - 1));
    let mut keys = vec![0.0f64; n];
    for _ in 0..draws {
        for key in keys.iter_mut() {
            *key = rng.uniform();
        }
        keys.sort_by(f64::total_cmp);
        for pair in keys.windows(2) {
            out.push(pair[1] - pair[0]);
        }
    }
    Ok(out)
}

/// Consecutive spacings of the even-interval jitter model (full-width
/// jitter, no circular shift), pooled over draws.
pub fn sample_balanced_spacings(n: usize, draws: usize, rng: &mut RngStream) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::Size(format!("balanced spacing needs n >= 2, got {n}")));
    }
    let mut out = Vec::with_capacity(draws * (n - 1));
    for _ in 0..draws {
        let pos = polacek_group_positions(n, 1.0, false, rng);
        for pair in pos.windows(2) {
            out.push(pair[1] - pair[0]);
        }
    }
    Ok(out)
}

/// Consecutive spacings of the sorted jitter-and-circular-shift model at
/// width w, pooled over draws (the seam gap is not a spacing of the sorted
/// sequence, so each draw yields n - 1 samples).
pub fn sample_polacek_spacings(
    n: usize,
    w: f64,
    draws: usize,
    rng: &mut RngStream,
) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::Size(format!("jitter spacing needs n >= 2, got {n}")));
    }
    if !(w > 0.0 && w <= 1.0) {
        return Err(Error::Parameter(format!(
            "jitter width must lie in (0, 1], got {w}"
        )));
    }
    let mut out = Vec::with_capacity(draws * (n - 1));
    for _ in 0..draws {
        let mut pos = polacek_group_positions(n, w, true, rng);
        pos.sort_by(f64::total_cmp);
        for pair in pos.windows(2) {
            out.push(pair[1] - pair[0]);
        }
    }
    Ok(out)
}

/// Eigenvalue gaps of 2x2 unitary-ensemble samples, one per draw. Raw scale;
/// divide by the sample mean before comparing against the unit-mean surmise.
pub fn sample_gue_pair_spacings(draws: usize, rng: &mut RngStream) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(draws);
    for _ in 0..draws {
        let matrix = sample_gue(2, rng)?;
        let eigenvalues = hermitian_eigenvalues(&matrix)?;
        out.push(eigenvalues[1] - eigenvalues[0]);
    }
    Ok(out)
}

/// Rescales samples to unit mean in place. Errors if the slice is empty or
/// the mean is not positive.
pub fn normalize_to_unit_mean(samples: &mut [f64]) -> Result<()> {
    if samples.is_empty() {
        return Err(Error::EmptyInput("normalize_to_unit_mean"));
    }
    let mean = samples.iter().sum::<f64>() / samples.len() as f64;
    if !(mean > 0.0 && mean.is_finite()) {
        return Err(Error::Parameter(format!(
            "sample mean must be positive and finite, got {mean}"
        )));
    }
    for s in samples.iter_mut() {
        *s /= mean;
    }
    Ok(())
}
