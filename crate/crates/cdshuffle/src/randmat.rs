//! Gaussian Unitary Ensemble sampling and a dense Hermitian eigensolver.
//!
//! The spectral map draws one GUE matrix per group, rescales it so the
//! semicircle support lands on the target interval, and uses the ascending
//! eigenvalue sequence as item positions. Eigenvalues are computed the
//! classical way: a complex Householder reduction to real symmetric
//! tridiagonal form (unitary phases absorbed into the off-diagonals),
//! followed by the implicitly shifted symmetric QL iteration. O(n^3) time,
//! O(n^2) space, eigenvalues only.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Relative tolerance for the Hermiticity check, measured against the
/// largest entry modulus.
const HERMITICITY_TOL: f64 = 1e-12;

/// Dense complex Hermitian matrix in row-major order.
#[derive(Debug, Clone)]
pub struct HermitianMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl HermitianMatrix {
    /// Builds a matrix from row-major entries, validating the shape and the
    /// Hermitian symmetry (within `1e-12` relative to the largest entry).
    pub fn from_entries(n: usize, data: Vec<Complex64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Size("matrix dimension must be at least 1".into()));
        }
        if data.len() != n * n {
            return Err(Error::Size(format!(
                "expected {} entries for a {n}x{n} matrix, got {}",
                n * n,
                data.len()
            )));
        }
        let m = Self { n, data };
        m.check_hermitian()?;
        Ok(m)
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.n + col]
    }

    /// Sum of the diagonal. Real for a Hermitian matrix.
    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.entry(i, i).re).sum()
    }

    /// Squared Frobenius norm, equal to the sum of squared eigenvalues.
    pub fn frobenius_norm_sq(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    fn check_hermitian(&self) -> Result<()> {
        let max_abs = self
            .data
            .iter()
            .map(|z| z.norm())
            .fold(0.0_f64, f64::max);
        let tol = HERMITICITY_TOL * max_abs;
        for j in 0..self.n {
            if self.entry(j, j).im.abs() > tol {
                return Err(Error::NotHermitian(format!(
                    "diagonal entry ({j},{j}) has imaginary part {}",
                    self.entry(j, j).im
                )));
            }
            for k in j + 1..self.n {
                let delta = (self.entry(j, k) - self.entry(k, j).conj()).norm();
                if delta > tol {
                    return Err(Error::NotHermitian(format!(
                        "entries ({j},{k}) and ({k},{j}) differ by {delta}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Draws an n x n GUE matrix: diagonal entries are real N(0, 1), each
/// off-diagonal entry has independent real and imaginary parts N(0, 1/2),
/// and the lower triangle mirrors the upper by conjugation. Under this
/// normalization the spectrum concentrates on [-2 sqrt(n), 2 sqrt(n)].
///
/// Draw order: rows top to bottom; within a row the diagonal entry first,
/// then the off-diagonals left to right as (real, imaginary) pairs.
pub fn sample_gue(n: usize, rng: &mut RngStream) -> Result<HermitianMatrix> {
    if n == 0 {
        return Err(Error::Size("GUE dimension must be at least 1".into()));
    }
    let off_sigma = 0.5_f64.sqrt();
    let mut data = vec![Complex64::ZERO; n * n];
    for j in 0..n {
        data[j * n + j] = Complex64::new(rng.gaussian(), 0.0);
        for k in j + 1..n {
            let re = rng.gaussian() * off_sigma;
            let im = rng.gaussian() * off_sigma;
            data[j * n + k] = Complex64::new(re, im);
            data[k * n + j] = Complex64::new(re, -im);
        }
    }
    Ok(HermitianMatrix { n, data })
}

/// Rescales a GUE draw so eigenvalues land on roughly [-radius, radius]:
/// every entry is multiplied by radius / (2 sqrt(n)), the inverse of the
/// semicircle support radius.
pub fn coarse_scale(matrix: &HermitianMatrix, radius: f64) -> HermitianMatrix {
    let factor = radius / (2.0 * (matrix.n as f64).sqrt());
    HermitianMatrix {
        n: matrix.n,
        data: matrix.data.iter().map(|z| z * factor).collect(),
    }
}

/// Ascending eigenvalues of a Hermitian matrix.
///
/// Validates Hermiticity, reduces to real symmetric tridiagonal form with
/// Householder reflections, then runs the implicitly shifted QL iteration.
/// Fails with `NoConvergence` if the iteration exceeds 30 sweeps per
/// eigenvalue in total.
pub fn hermitian_eigenvalues(matrix: &HermitianMatrix) -> Result<Vec<f64>> {
    matrix.check_hermitian()?;
    let (mut d, mut e) = tridiagonalize(matrix);
    tridiagonal_eigenvalues(&mut d, &mut e, 30 * matrix.n)?;
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Householder reduction of a Hermitian matrix to real symmetric
/// tridiagonal form. Returns the diagonal and the subdiagonal magnitudes;
/// complex phases on the subdiagonal are similarity-equivalent to their
/// moduli via a diagonal unitary, so they carry no spectral information.
fn tridiagonalize(matrix: &HermitianMatrix) -> (Vec<f64>, Vec<f64>) {
    let n = matrix.n;
    let mut a = matrix.data.clone();
    let mut e = vec![0.0_f64; n.saturating_sub(1)];
    let mut v = vec![Complex64::ZERO; n];
    let mut q = vec![Complex64::ZERO; n];

    for k in 0..n.saturating_sub(2) {
        let norm_sq: f64 = (k + 1..n).map(|r| a[r * n + k].norm_sqr()).sum();
        let norm = norm_sq.sqrt();
        if norm == 0.0 {
            e[k] = 0.0;
            continue;
        }
        let x0 = a[(k + 1) * n + k];
        // Reflect x onto alpha e1 where alpha has the phase opposite x0,
        // so u = x - alpha e1 cannot cancel.
        let alpha = if x0 == Complex64::ZERO {
            Complex64::new(-norm, 0.0)
        } else {
            -(x0 / x0.norm()) * norm
        };
        v[k + 1] = x0 - alpha;
        for r in k + 2..n {
            v[r] = a[r * n + k];
        }
        let u_norm: f64 = (k + 1..n)
            .map(|r| v[r].norm_sqr())
            .sum::<f64>()
            .sqrt();
        for entry in &mut v[k + 1..n] {
            *entry /= u_norm;
        }

        // w = A v on the trailing block, kappa = v* A v (real), q = w - kappa v.
        let mut kappa = Complex64::ZERO;
        for r in k + 1..n {
            let mut w = Complex64::ZERO;
            for c in k + 1..n {
                w += a[r * n + c] * v[c];
            }
            q[r] = w;
            kappa += v[r].conj() * w;
        }
        for r in k + 1..n {
            q[r] -= kappa * v[r];
        }

        // A <- A - 2 v q* - 2 q v* on the trailing block keeps A Hermitian.
        for r in k + 1..n {
            for c in k + 1..n {
                a[r * n + c] -= 2.0 * (v[r] * q[c].conj() + q[r] * v[c].conj());
            }
        }

        a[(k + 1) * n + k] = alpha;
        a[k * n + k + 1] = alpha.conj();
        e[k] = norm;
    }

    if n >= 2 {
        e[n - 2] = a[(n - 1) * n + (n - 2)].norm();
    }
    let d = (0..n).map(|i| a[i * n + i].re).collect();
    (d, e)
}

/// Implicitly shifted symmetric QL iteration on a tridiagonal matrix,
/// eigenvalues only. `d` holds the diagonal; `sub` the subdiagonal
/// (`sub[i]` couples `d[i]` and `d[i+1]`). `max_sweeps` bounds the total
/// number of QL sweeps across all eigenvalues.
fn tridiagonal_eigenvalues(d: &mut [f64], sub: &mut [f64], max_sweeps: usize) -> Result<()> {
    let n = d.len();
    if n <= 1 {
        return Ok(());
    }
    // e gets a trailing sentinel entry so the in-sweep writes to e[i + 1]
    // stay in bounds at i = m - 1.
    let mut e = vec![0.0_f64; n];
    e[..n - 1].copy_from_slice(sub);
    let mut sweeps = 0usize;

    for l in 0..n {
        loop {
            // Find the first negligible coupling at or after l; the block
            // [l, m] is what the sweep works on.
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > max_sweeps {
                return Err(Error::NoConvergence(max_sweeps));
            }

            // Wilkinson-style shift from the leading 2x2 of the block.
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(if g == 0.0 { 1.0 } else { g }));
            let (mut s, mut c, mut p) = (1.0_f64, 1.0_f64, 0.0_f64);

            let mut interrupted = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    // A coupling underflowed mid-sweep; deflate and restart.
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    interrupted = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if interrupted {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    sub.copy_from_slice(&e[..n - 1]);
    Ok(())
}
