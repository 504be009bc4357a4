//! Quadrature rules and scalar root finding shared across the crate.

use crate::{Error, Result};

/// Nodes and weights of the n-point Gauss–Legendre rule on [-1, 1].
///
/// Newton iteration on the Legendre recurrence; accurate to machine
/// precision for n ≤ a few hundred.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess for the i-th root (descending).
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=n {
                let jf = j as f64;
                let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn gl15(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64, xs: &[f64], ws: &[f64]) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut s = 0.0;
    for (x, w) in xs.iter().zip(ws) {
        s += w * f(c + h * x);
    }
    s * h
}

/// ∫ₐᵇ f, composite 15-point Gauss–Legendre with adaptive bisection down
/// to absolute tolerance `tol`.
pub fn adaptive(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let (xs, ws) = gauss_legendre(15);
    let whole = gl15(&mut f, a, b, &xs, &ws);
    adaptive_rec(&mut f, a, b, whole, tol.max(1e-15), &xs, &ws, 0)
}

#[allow(clippy::too_many_arguments)]
fn adaptive_rec(
    f: &mut impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    whole: f64,
    tol: f64,
    xs: &[f64],
    ws: &[f64],
    depth: usize,
) -> f64 {
    let m = 0.5 * (a + b);
    let left = gl15(f, a, m, xs, ws);
    let right = gl15(f, m, b, xs, ws);
    if (left + right - whole).abs() <= tol || depth >= 48 {
        return left + right;
    }
    adaptive_rec(f, a, m, left, 0.5 * tol, xs, ws, depth + 1)
        + adaptive_rec(f, m, b, right, 0.5 * tol, xs, ws, depth + 1)
}

/// Brent's method on a bracketing interval [a, b] with f(a)·f(b) ≤ 0.
///
/// Stops when the bracket width drops below `xtol + 4·eps·|x|`.
pub fn brent(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, xtol: f64) -> Result<f64> {
    let (mut a, mut b) = (a, b);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa * fb > 0.0 {
        return Err(Error::Numerical(format!(
            "brent: no sign change on [{a}, {b}] (f={fa}, {fb})"
        )));
    }
    let (mut c, mut fc) = (a, fa);
    let (mut d, mut e) = (b - a, b - a);
    for _ in 0..200 {
        if fb.abs() > fc.abs() {
            (a, b, c) = (b, c, b);
            (fa, fb, fc) = (fb, fc, fb);
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let (qq, r) = (fa / fc, fb / fc);
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            if 2.0 * p < (3.0 * xm * q - (tol1 * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b);
        if (fb > 0.0) == (fc > 0.0) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
    }
    Err(Error::Numerical("brent: no convergence in 200 iterations".into()))
}

/// Expands a bracket geometrically around `seed` until `f` changes sign.
pub fn bracket_root(
    mut f: impl FnMut(f64) -> f64,
    seed: f64,
    initial_step: f64,
) -> Result<(f64, f64)> {
    let f0 = f(seed);
    if f0 == 0.0 {
        return Ok((seed, seed));
    }
    let mut step = initial_step.abs().max(1e-12);
    for _ in 0..120 {
        let lo = seed - step;
        let hi = seed + step;
        if f(lo) * f0 < 0.0 {
            return Ok((lo, seed));
        }
        if f(hi) * f0 < 0.0 {
            return Ok((seed, hi));
        }
        step *= 2.0;
    }
    Err(Error::Numerical("bracket_root: no sign change found".into()))
}

/// Trapezoid weights for a uniform grid of `n` points with spacing `h`.
pub fn trapezoid_weights(n: usize, h: f64) -> Vec<f64> {
    let mut w = vec![h; n];
    if n >= 2 {
        w[0] = 0.5 * h;
        w[n - 1] = 0.5 * h;
    }
    w
}

/// Least-squares line fit y ≈ slope·x + intercept.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let sx: f64 = x.iter().sum();
    let sy: f64 = y.iter().sum();
    let sxx: f64 = x.iter().map(|v| v * v).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - slope * sx) / n;
    (slope, intercept)
}
