//! Dense/structured linear algebra kernels: Sturm bisection for symmetric
//! tridiagonal matrices, inverse iteration, dense symmetric spectra, and a
//! banded LDLᵀ inertia counter for the 2D oracle.

use crate::{Error, Result};
use nalgebra::DMatrix;

/// Number of eigenvalues of the symmetric tridiagonal (d, e) below `x`,
/// via the signs of the LDLᵀ pivots. Zero pivots count as negative
/// (LAPACK pivmin convention), which keeps the count exact when x hits an
/// eigenvalue of a leading submatrix.
pub fn sturm_count(d: &[f64], e: &[f64], x: f64) -> usize {
    let n = d.len();
    let emax = e.iter().fold(1.0f64, |m, &v| m.max(v * v));
    let pivmin = 1e-290 * emax;
    let mut count = 0;
    let mut q = 1.0;
    for i in 0..n {
        let off = if i == 0 { 0.0 } else { e[i - 1] * e[i - 1] / q };
        q = d[i] - x - off;
        if q.abs() < pivmin {
            q = -pivmin;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Lowest `m` eigenvalues of the symmetric tridiagonal (d, e), ascending,
/// each bisected to machine precision.
pub fn tridiag_lowest_eigenvalues(d: &[f64], e: &[f64], m: usize) -> Vec<f64> {
    let n = d.len();
    assert!(m <= n);
    let mut lo = f64::MAX;
    let mut hi = f64::MIN;
    for i in 0..n {
        let left = if i > 0 { e[i - 1].abs() } else { 0.0 };
        let right = if i < n - 1 { e[i].abs() } else { 0.0 };
        lo = lo.min(d[i] - left - right);
        hi = hi.max(d[i] + left + right);
    }
    let mut out = Vec::with_capacity(m);
    for idx in 0..m {
        let mut a = if idx > 0 { out[idx - 1] } else { lo };
        let mut b = hi;
        for _ in 0..120 {
            let mid = 0.5 * (a + b);
            if b - a <= 2.0 * f64::EPSILON * mid.abs().max(1.0) {
                break;
            }
            if sturm_count(d, e, mid) <= idx {
                a = mid;
            } else {
                b = mid;
            }
        }
        out.push(0.5 * (a + b));
    }
    out
}

/// Eigenvector of the symmetric tridiagonal (d, e) for the (machine
/// accurate) eigenvalue `lambda`, by inverse iteration with a partially
/// pivoted LU of `T - λI`. Returned with unit Euclidean norm.
pub fn tridiag_eigenvector(d: &[f64], e: &[f64], lambda: f64) -> Result<Vec<f64>> {
    let n = d.len();
    if n == 1 {
        return Ok(vec![1.0]);
    }
    let mut du = vec![0.0; n];
    let mut du1 = vec![0.0; n];
    let mut du2 = vec![0.0; n];
    let mut mult = vec![0.0; n];
    let mut swapped = vec![false; n];
    {
        let mut a = d[0] - lambda;
        let mut beta = e[0];
        for i in 0..n - 1 {
            let c = e[i];
            let a_next = d[i + 1] - lambda;
            let b_next = if i + 2 < n { e[i + 1] } else { 0.0 };
            if a.abs() >= c.abs() {
                let safe_a = if a == 0.0 { 1e-300 } else { a };
                let m = c / safe_a;
                du[i] = safe_a;
                du1[i] = beta;
                du2[i] = 0.0;
                mult[i] = m;
                a = a_next - m * beta;
                beta = b_next;
            } else {
                swapped[i] = true;
                let m = a / c;
                du[i] = c;
                du1[i] = a_next;
                du2[i] = b_next;
                mult[i] = m;
                a = beta - m * a_next;
                beta = -m * b_next;
            }
        }
        du[n - 1] = if a == 0.0 { 1e-300 } else { a };
    }
    let solve = |rhs: &mut [f64]| {
        for i in 0..n - 1 {
            if swapped[i] {
                rhs.swap(i, i + 1);
            }
            rhs[i + 1] -= mult[i] * rhs[i];
        }
        for i in (0..n).rev() {
            let mut v = rhs[i];
            if i + 1 < n {
                v -= du1[i] * rhs[i + 1];
            }
            if i + 2 < n {
                v -= du2[i] * rhs[i + 2];
            }
            rhs[i] = v / du[i];
        }
    };
    let mut v = vec![1.0; n];
    for iter in 0..8 {
        solve(&mut v);
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::Numerical("inverse iteration broke down".into()));
        }
        v.iter_mut().for_each(|x| *x /= norm);
        if iter >= 1 {
            let mut res = 0.0f64;
            for i in 0..n {
                let mut r = (d[i] - lambda) * v[i];
                if i > 0 {
                    r += e[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    r += e[i] * v[i + 1];
                }
                res += r * r;
            }
            if res.sqrt() < 1e-11 * lambda.abs().max(1.0) {
                break;
            }
        }
    }
    Ok(v)
}

/// All eigenvalues of a dense symmetric matrix (row-major `data`, n×n).
pub fn symmetric_eigenvalues(data: &[f64], n: usize) -> Vec<f64> {
    assert_eq!(data.len(), n * n);
    if n == 0 {
        return Vec::new();
    }
    let m = DMatrix::from_row_slice(n, n, data);
    let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

/// Symmetric banded matrix in lower storage: `band[j][i]` holds A[i+j, i]
/// for offsets j = 0..=bw.
pub struct BandedSym {
    pub n: usize,
    pub bw: usize,
    pub band: Vec<Vec<f64>>,
}

impl BandedSym {
    pub fn zeros(n: usize, bw: usize) -> Self {
        Self { n, bw, band: (0..=bw).map(|j| vec![0.0; n.saturating_sub(j)]).collect() }
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let (hi, lo) = if i >= j { (i, j) } else { (j, i) };
        let off = hi - lo;
        assert!(off <= self.bw, "entry ({i},{j}) outside bandwidth {}", self.bw);
        self.band[off][lo] += v;
    }

    /// Number of eigenvalues strictly below `sigma`, by the inertia of the
    /// banded LDLᵀ factorization of A - σI. No pivoting: pivots are nudged
    /// off exact zero, which only matters if σ essentially hits an
    /// eigenvalue — callers pick σ in gaps.
    pub fn inertia_below(&self, sigma: f64) -> usize {
        let n = self.n;
        let bw = self.bw;
        let mut work: Vec<Vec<f64>> = (0..n)
            .map(|col| {
                (0..=bw.min(n - 1 - col))
                    .map(|j| self.band[j][col] - if j == 0 { sigma } else { 0.0 })
                    .collect()
            })
            .collect();
        let mut negatives = 0usize;
        for col in 0..n {
            let reach = bw.min(n - 1 - col);
            let pivot = {
                let p = work[col][0];
                if p.abs() < 1e-300 {
                    1e-300f64.copysign(if p == 0.0 { -1.0 } else { p })
                } else {
                    p
                }
            };
            if pivot < 0.0 {
                negatives += 1;
            }
            for r in 1..=reach {
                let lr = work[col][r] / pivot;
                if lr == 0.0 {
                    continue;
                }
                for s in r..=reach {
                    work[col + r][s - r] -= lr * work[col][s];
                }
            }
            work[col] = Vec::new();
        }
        negatives
    }
}
