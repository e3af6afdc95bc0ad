//! Eigen features of a resized hand frame: row mean, row covariance,
//! cyclic Jacobi spectral decomposition, and truncation to the leading
//! eigenpairs.

use crate::error::{Error, Result};
use crate::imaging::GrayFrame;

/// Number of leading eigenpairs kept as the feature set.
pub const TOP_K: usize = 5;

/// Tolerated asymmetry when accepting a matrix as symmetric.
const SYMMETRY_TOL: f64 = 1e-9;
/// Convergence: every off-diagonal magnitude must drop below this.
const OFF_DIAG_TOL: f64 = 1e-12;
/// Sweep cap before the solver reports non-convergence.
const MAX_SWEEPS: usize = 100;
/// Eigenvalues of a covariance matrix this close below zero are round-off
/// and clamp to zero.
const PSD_CLAMP: f64 = 1e-9;

/// Dense real square matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    order: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    pub fn zeros(order: usize) -> Self {
        assert!(order >= 1);
        Self {
            order,
            data: vec![0.0; order * order],
        }
    }

    pub fn from_fn(order: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(order);
        for i in 0..order {
            for j in 0..order {
                m.data[i * order + j] = f(i, j);
            }
        }
        m
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.order + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.order + j] = v;
    }

    pub fn trace(&self) -> f64 {
        (0..self.order).map(|i| self.get(i, i)).sum()
    }
}

/// Full spectral decomposition; `values[k]` pairs with `vectors[k]`, sorted
/// by descending eigenvalue.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

/// Top [`TOP_K`] eigenpairs of a frame's row covariance. Eigenvalues are
/// descending and non-negative, each eigenvector has unit norm and its
/// largest-magnitude component is positive.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub values: [f64; TOP_K],
    pub vectors: [Vec<f64>; TOP_K],
}

impl FeatureVector {
    /// Dimension of each eigenvector.
    pub fn dim(&self) -> usize {
        self.vectors[0].len()
    }
}

fn require_square(x: &GrayFrame) -> Result<usize> {
    if x.width() != x.height() {
        return Err(Error::NotSquare {
            width: x.width(),
            height: x.height(),
        });
    }
    Ok(x.width() as usize)
}

/// Column-wise mean over the rows, treating each row as one observation.
pub fn row_mean(x: &GrayFrame) -> Result<Vec<f64>> {
    let n = require_square(x)?;
    let mut mean = vec![0.0; n];
    for r in 0..n {
        for (m, &v) in mean.iter_mut().zip(x.row(r as u32)) {
            *m += v;
        }
    }
    for m in &mut mean {
        *m /= n as f64;
    }
    Ok(mean)
}

/// Row covariance `C = (1/n) * sum_r (x_r - m)(x_r - m)^T`. Symmetric by
/// construction: one triangle is accumulated and mirrored.
pub fn covariance(x: &GrayFrame) -> Result<SquareMatrix> {
    let n = require_square(x)?;
    let mean = row_mean(x)?;
    let mut c = SquareMatrix::zeros(n);
    let mut dev = vec![0.0; n];
    for r in 0..n {
        for (d, (&v, &m)) in dev.iter_mut().zip(x.row(r as u32).iter().zip(&mean)) {
            *d = v - m;
        }
        for i in 0..n {
            let di = dev[i];
            let row = &mut c.data[i * n..(i + 1) * n];
            for j in i..n {
                row[j] += di * dev[j];
            }
        }
    }
    let scale = 1.0 / n as f64;
    for i in 0..n {
        for j in i..n {
            let v = c.data[i * n + j] * scale;
            c.data[i * n + j] = v;
            c.data[j * n + i] = v;
        }
    }
    Ok(c)
}

fn max_off_diagonal(a: &[f64], n: usize) -> f64 {
    let mut max = 0.0f64;
    for p in 0..n {
        for q in (p + 1)..n {
            let m = a[p * n + q].abs();
            if m.is_nan() {
                // a non-finite matrix can never meet the threshold; report it
                // as the residual instead of silently dropping it from a max
                return f64::NAN;
            }
            if m > max {
                max = m;
            }
        }
    }
    max
}

/// Spectral decomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Sweeps rotate every upper-triangle element in turn until all off-diagonal
/// magnitudes fall below `1e-12`, with diagonal updates accumulated
/// separately for accuracy. Eigenpairs come back sorted by descending
/// eigenvalue; ties keep the rotation output order.
pub fn eig_sym(c: &SquareMatrix) -> Result<EigenDecomposition> {
    let n = c.order;

    let mut max_asym = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            max_asym = max_asym.max((c.get(i, j) - c.get(j, i)).abs());
        }
    }
    if max_asym > SYMMETRY_TOL {
        return Err(Error::NotSymmetric { max_asymmetry: max_asym });
    }

    let mut a = c.data.clone();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let mut d: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    let mut b = d.clone();
    let mut z = vec![0.0; n];

    let rotate = |m: &mut [f64], i: usize, j: usize, s: f64, tau: f64| {
        let g = m[i];
        let h = m[j];
        m[i] = g - s * (h + g * tau);
        m[j] = h + s * (g - h * tau);
    };

    let mut converged = false;
    for sweep in 0..MAX_SWEEPS {
        if max_off_diagonal(&a, n) < OFF_DIAG_TOL {
            converged = true;
            break;
        }
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                let g = 100.0 * apq.abs();
                // once small enough to not affect the diagonal, zero it out
                if sweep > 3 && d[p].abs() + g == d[p].abs() && d[q].abs() + g == d[q].abs() {
                    a[p * n + q] = 0.0;
                    continue;
                }
                if apq == 0.0 {
                    continue;
                }
                let h = d[q] - d[p];
                let t = if h.abs() + g == h.abs() {
                    apq / h
                } else {
                    let theta = 0.5 * h / apq;
                    let t = 1.0 / (theta.abs() + (1.0 + theta * theta).sqrt());
                    if theta < 0.0 {
                        -t
                    } else {
                        t
                    }
                };
                let cos = 1.0 / (1.0 + t * t).sqrt();
                let sin = t * cos;
                let tau = sin / (1.0 + cos);
                let h = t * apq;
                z[p] -= h;
                z[q] += h;
                d[p] -= h;
                d[q] += h;
                a[p * n + q] = 0.0;
                for j in 0..p {
                    rotate(&mut a, j * n + p, j * n + q, sin, tau);
                }
                for j in (p + 1)..q {
                    rotate(&mut a, p * n + j, j * n + q, sin, tau);
                }
                for j in (q + 1)..n {
                    rotate(&mut a, p * n + j, q * n + j, sin, tau);
                }
                for j in 0..n {
                    rotate(&mut v, j * n + p, j * n + q, sin, tau);
                }
            }
        }
        for i in 0..n {
            b[i] += z[i];
            d[i] = b[i];
            z[i] = 0.0;
        }
    }
    if !converged {
        // the loop checks at sweep start, so re-check after the last sweep;
        // a NaN residual (non-finite input) must also land here
        let residual = max_off_diagonal(&a, n);
        if residual.is_nan() || residual >= OFF_DIAG_TOL {
            return Err(Error::NoConvergence {
                sweeps: MAX_SWEEPS,
                residual,
            });
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[j].total_cmp(&d[i]));
    let values = order.iter().map(|&i| d[i]).collect();
    let vectors = order
        .iter()
        .map(|&col| (0..n).map(|row| v[row * n + col]).collect())
        .collect();
    Ok(EigenDecomposition { values, vectors })
}

/// Flips the vector so its largest-magnitude component (lowest index on
/// ties) is positive. Eigenvectors are only defined up to sign; distances
/// between them are not sign-invariant, so a fixed convention is required.
pub(crate) fn canonicalize_sign(vec: &mut [f64]) {
    let mut max_idx = 0;
    let mut max_abs = 0.0f64;
    for (i, &x) in vec.iter().enumerate() {
        if x.abs() > max_abs {
            max_abs = x.abs();
            max_idx = i;
        }
    }
    if vec[max_idx] < 0.0 {
        for x in vec.iter_mut() {
            *x = -*x;
        }
    }
}

/// Covariance, full eigen decomposition, then truncation to the first
/// [`TOP_K`] pairs with round-off negatives clamped to zero and signs
/// canonicalized.
pub fn extract_features(x: &GrayFrame) -> Result<FeatureVector> {
    let decomp = eig_sym(&covariance(x)?)?;
    if decomp.values.len() < TOP_K {
        return Err(Error::InsufficientOrder {
            order: decomp.values.len(),
            required: TOP_K,
        });
    }
    let mut values = [0.0; TOP_K];
    for (dst, &src) in values.iter_mut().zip(&decomp.values) {
        *dst = if src < 0.0 && src >= -PSD_CLAMP { 0.0 } else { src };
    }
    let mut iter = decomp.vectors.into_iter();
    let vectors = std::array::from_fn(|_| {
        let mut v = iter.next().expect("checked length above");
        canonicalize_sign(&mut v);
        v
    });
    Ok(FeatureVector { values, vectors })
}
