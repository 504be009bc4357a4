//! Magnetic-field profiles: `b`, its derivatives, the primitive
//! `a(x) = ∫₀ˣ b`, and the inverse `a⁻¹`.
//!
//! The model family has an exact power tail `b(x) = b₊ - c·x^{-M}` for
//! `x ≥ x₀`, the constant value `b₋` for `x ≤ -x₀`, and a smooth monotone
//! bridge in between built from the standard `e^{-1/s}` cutoff. Everything
//! downstream (band asymptotics, ε(k), kernels ...) only sees the exact
//! tail, so the bridge just has to be increasing, which the constructor
//! verifies numerically.

use crate::quad::adaptive;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Truncated Taylor series (jet) of order 4; coefficient i is f⁽ⁱ⁾/i!.
#[derive(Clone, Copy)]
struct Jet([f64; 5]);

impl Jet {
    fn var(x: f64) -> Self {
        Jet([x, 1.0, 0.0, 0.0, 0.0])
    }
    fn con(c: f64) -> Self {
        Jet([c, 0.0, 0.0, 0.0, 0.0])
    }
    fn add(self, o: Jet) -> Jet {
        let mut r = [0.0; 5];
        for i in 0..5 {
            r[i] = self.0[i] + o.0[i];
        }
        Jet(r)
    }
    fn sub(self, o: Jet) -> Jet {
        let mut r = [0.0; 5];
        for i in 0..5 {
            r[i] = self.0[i] - o.0[i];
        }
        Jet(r)
    }
    fn scale(self, s: f64) -> Jet {
        let mut r = self.0;
        r.iter_mut().for_each(|v| *v *= s);
        Jet(r)
    }
    fn mul(self, o: Jet) -> Jet {
        let mut r = [0.0; 5];
        for i in 0..5 {
            for j in 0..=i {
                r[i] += self.0[j] * o.0[i - j];
            }
        }
        Jet(r)
    }
    fn recip(self) -> Jet {
        let mut r = [0.0; 5];
        r[0] = 1.0 / self.0[0];
        for k in 1..5 {
            let mut s = 0.0;
            for j in 1..=k {
                s += self.0[j] * r[k - j];
            }
            r[k] = -r[0] * s;
        }
        Jet(r)
    }
    fn exp(self) -> Jet {
        let mut r = [0.0; 5];
        r[0] = self.0[0].exp();
        for k in 1..5 {
            let mut s = 0.0;
            for j in 1..=k {
                s += j as f64 * self.0[j] * r[k - j];
            }
            r[k] = s / k as f64;
        }
        Jet(r)
    }
    /// p-th derivative value.
    fn deriv(&self, p: usize) -> f64 {
        const FACT: [f64; 5] = [1.0, 1.0, 2.0, 6.0, 24.0];
        self.0[p] * FACT[p]
    }
}

/// Jet of e^{-1/s} extended by zero for s ≤ 0.
fn cutoff_jet(s: Jet) -> Jet {
    if s.0[0] <= 0.0 {
        Jet::con(0.0)
    } else {
        s.recip().scale(-1.0).exp()
    }
}

/// Jet of the smooth step S(s) = f(s)/(f(s)+f(1-s)), 0 for s≤0, 1 for s≥1.
fn smoothstep_jet(s: Jet) -> Jet {
    let f = cutoff_jet(s);
    let g = cutoff_jet(Jet::con(1.0).sub(s));
    f.mul(f.add(g).recip())
}

/// Monotone piecewise-cubic interpolant (Fritsch–Carlson).
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct MonotoneTable {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    #[serde(skip)]
    slopes: Vec<f64>,
}

impl MonotoneTable {
    fn prepare(&mut self) -> Result<()> {
        let n = self.xs.len();
        if n < 2 || self.ys.len() != n {
            return Err(Error::InvalidParameters("table needs ≥2 knots".into()));
        }
        for i in 1..n {
            if self.xs[i] <= self.xs[i - 1] || self.ys[i] <= self.ys[i - 1] {
                return Err(Error::InvalidParameters(
                    "table knots must be strictly increasing in x and b".into(),
                ));
            }
        }
        let d: Vec<f64> = (0..n - 1)
            .map(|i| (self.ys[i + 1] - self.ys[i]) / (self.xs[i + 1] - self.xs[i]))
            .collect();
        let mut m = vec![0.0; n];
        m[0] = d[0];
        m[n - 1] = d[n - 2];
        for i in 1..n - 1 {
            m[i] = 0.5 * (d[i - 1] + d[i]);
        }
        // Fritsch–Carlson limiter keeps the cubic monotone on each interval
        for i in 0..n - 1 {
            if d[i] == 0.0 {
                m[i] = 0.0;
                m[i + 1] = 0.0;
            } else {
                let alpha = m[i] / d[i];
                let beta = m[i + 1] / d[i];
                let r = alpha * alpha + beta * beta;
                if r > 9.0 {
                    let t = 3.0 / r.sqrt();
                    m[i] = t * alpha * d[i];
                    m[i + 1] = t * beta * d[i];
                }
            }
        }
        self.slopes = m;
        Ok(())
    }

    fn segment(&self, x: f64) -> usize {
        match self.xs.binary_search_by(|v| v.partial_cmp(&x).unwrap()) {
            Ok(i) => i.min(self.xs.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.xs.len() - 2),
        }
    }

    fn eval_deriv(&self, x: f64, p: usize) -> f64 {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return if p == 0 { self.ys[0] } else { 0.0 };
        }
        if x >= self.xs[n - 1] {
            return if p == 0 { self.ys[n - 1] } else { 0.0 };
        }
        let i = self.segment(x);
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let (y0, y1, m0, m1) = (self.ys[i], self.ys[i + 1], self.slopes[i], self.slopes[i + 1]);
        // cubic Hermite coefficients in t
        let c0 = y0;
        let c1 = m0 * h;
        let c2 = 3.0 * (y1 - y0) - (2.0 * m0 + m1) * h;
        let c3 = 2.0 * (y0 - y1) + (m0 + m1) * h;
        match p {
            0 => c0 + t * (c1 + t * (c2 + t * c3)),
            1 => (c1 + t * (2.0 * c2 + 3.0 * t * c3)) / h,
            2 => (2.0 * c2 + 6.0 * t * c3) / (h * h),
            3 => 6.0 * c3 / (h * h * h),
            _ => 0.0,
        }
    }

    /// Exact antiderivative of the cubic from xs[0] to x (clamped-linear
    /// outside the knots), normalized later by the caller.
    fn integral_from_first_knot(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return self.ys[0] * (x - self.xs[0]);
        }
        let mut acc = 0.0;
        for i in 0..n - 1 {
            let (xa, xb) = (self.xs[i], self.xs[i + 1]);
            if x <= xa {
                break;
            }
            let h = xb - xa;
            let t_end = ((x.min(xb)) - xa) / h;
            let (y0, y1, m0, m1) = (self.ys[i], self.ys[i + 1], self.slopes[i], self.slopes[i + 1]);
            let c0 = y0;
            let c1 = m0 * h;
            let c2 = 3.0 * (y1 - y0) - (2.0 * m0 + m1) * h;
            let c3 = 2.0 * (y0 - y1) + (m0 + m1) * h;
            let t = t_end;
            acc += h * (c0 * t + c1 * t * t / 2.0 + c2 * t * t * t / 3.0 + c3 * t * t * t * t / 4.0);
        }
        if x > self.xs[n - 1] {
            acc += self.ys[n - 1] * (x - self.xs[n - 1]);
        }
        acc
    }
}

/// Which analytic family the profile belongs to.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind")]
pub enum ProfileKind {
    /// b ≡ b₀ (Landau case); every threshold gap is zero.
    Constant { b: f64 },
    /// Exact tail b₊ - c·x^{-M} for x ≥ x₀, constant b₋ left of -x₀,
    /// smooth-step bridge in between.
    ModelPowerTail,
    /// Monotone table of (x, b) knots interpolated by a monotone cubic.
    UserTable { table: MonotoneTable },
}

/// A magnetic-field profile together with its tail parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MagneticProfile {
    pub kind: ProfileKind,
    pub b_minus: f64,
    pub b_plus: f64,
    /// Tail exponent M.
    pub m_exp: f64,
    /// Tail amplitude c.
    pub c: f64,
    /// Tail onset x₀.
    pub x0: f64,
    // cached anchors of a(x) at the bridge ends
    a_right: f64,
    a_left: f64,
}

impl MagneticProfile {
    /// Constant field b ≡ b0.
    pub fn constant(b0: f64) -> Result<Self> {
        if !(b0 > 0.0) {
            return Err(Error::InvalidParameters("constant field needs b > 0".into()));
        }
        Ok(Self {
            kind: ProfileKind::Constant { b: b0 },
            b_minus: b0,
            b_plus: b0,
            m_exp: 0.0,
            c: 0.0,
            x0: 0.0,
            a_right: 0.0,
            a_left: 0.0,
        })
    }

    /// Model family with exact power tail.
    pub fn model_power_tail(b_minus: f64, b_plus: f64, m_exp: f64, c: f64, x0: f64) -> Result<Self> {
        if !(b_minus > 0.0 && b_plus > b_minus && m_exp > 0.0 && c > 0.0 && x0 > 0.0) {
            return Err(Error::InvalidParameters(
                "need 0 < b₋ < b₊, M > 0, c > 0, x₀ > 0".into(),
            ));
        }
        let delta = b_plus - c * x0.powf(-m_exp) - b_minus;
        if delta <= 0.0 {
            return Err(Error::InvalidParameters(format!(
                "tail undershoots b₋ at x₀: b₊ - c·x₀^-M = {} ≤ b₋",
                b_plus - c * x0.powf(-m_exp)
            )));
        }
        let mut p = Self {
            kind: ProfileKind::ModelPowerTail,
            b_minus,
            b_plus,
            m_exp,
            c,
            x0,
            a_right: 0.0,
            a_left: 0.0,
        };
        p.a_right = adaptive(|t| p.b_raw(t), 0.0, x0, 1e-13);
        p.a_left = -adaptive(|t| p.b_raw(t), -x0, 0.0, 1e-13);
        p.verify_monotone()?;
        Ok(p)
    }

    /// Profile from a strictly increasing table of (x, b) knots.
    pub fn user_table(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        let mut table = MonotoneTable { xs, ys, slopes: Vec::new() };
        table.prepare()?;
        let b_minus = table.ys[0];
        let b_plus = *table.ys.last().unwrap();
        if !(b_minus > 0.0) {
            return Err(Error::InvalidParameters("table values must be positive".into()));
        }
        let x_first = table.xs[0];
        let norm = table.integral_from_first_knot(0.0);
        let mut p = Self {
            kind: ProfileKind::UserTable { table },
            b_minus,
            b_plus,
            m_exp: 0.0,
            c: 0.0,
            x0: x_first.abs().max(1.0),
            a_right: 0.0,
            a_left: norm,
        };
        p.a_left = norm; // integral_from_first_knot(0) cached as offset
        p.verify_monotone()?;
        Ok(p)
    }

    fn b_raw(&self, x: f64) -> f64 {
        match &self.kind {
            ProfileKind::Constant { b } => *b,
            ProfileKind::UserTable { table } => table.eval_deriv(x, 0),
            ProfileKind::ModelPowerTail => {
                if x >= self.x0 {
                    self.b_plus - self.c * x.powf(-self.m_exp)
                } else if x <= -self.x0 {
                    self.b_minus
                } else {
                    let delta = self.b_plus - self.c * self.x0.powf(-self.m_exp) - self.b_minus;
                    let s = Jet::var(x).add(Jet::con(self.x0)).scale(0.5 / self.x0);
                    self.b_minus + delta * smoothstep_jet(s).0[0]
                }
            }
        }
    }

    /// b⁽ᵖ⁾(x) for p ≤ 4; closed form on the tail and constant pieces,
    /// jet-differentiated smooth step on the bridge.
    pub fn eval_b(&self, x: f64, p: usize) -> Result<f64> {
        if p > 4 {
            return Err(Error::UnsupportedOrder(p));
        }
        match &self.kind {
            ProfileKind::Constant { b } => Ok(if p == 0 { *b } else { 0.0 }),
            ProfileKind::UserTable { table } => Ok(table.eval_deriv(x, p)),
            ProfileKind::ModelPowerTail => {
                if x >= self.x0 {
                    Ok(self.tail_deriv(x, p))
                } else if x <= -self.x0 {
                    Ok(if p == 0 { self.b_minus } else { 0.0 })
                } else {
                    let delta = self.b_plus - self.c * self.x0.powf(-self.m_exp) - self.b_minus;
                    let s = Jet::var(x).add(Jet::con(self.x0)).scale(0.5 / self.x0);
                    let theta = smoothstep_jet(s);
                    Ok(if p == 0 {
                        self.b_minus + delta * theta.deriv(0)
                    } else {
                        delta * theta.deriv(p)
                    })
                }
            }
        }
    }

    /// p-th derivative of b₊ - c·x^{-M} (valid for x ≥ x₀).
    pub fn tail_deriv(&self, x: f64, p: usize) -> f64 {
        let m = self.m_exp;
        if p == 0 {
            return self.b_plus - self.c * x.powf(-m);
        }
        let mut coeff = -self.c;
        let mut expo = -m;
        for _ in 0..p {
            coeff *= expo;
            expo -= 1.0;
        }
        coeff * x.powf(expo)
    }

    /// a(x) = ∫₀ˣ b(t) dt, closed form outside the bridge.
    pub fn eval_a(&self, x: f64) -> f64 {
        match &self.kind {
            ProfileKind::Constant { b } => b * x,
            ProfileKind::UserTable { table } => table.integral_from_first_knot(x) - self.a_left,
            ProfileKind::ModelPowerTail => {
                let (m, c, x0) = (self.m_exp, self.c, self.x0);
                if x >= x0 {
                    let tail = if (m - 1.0).abs() > 1e-12 {
                        c / (m - 1.0) * (x.powf(1.0 - m) - x0.powf(1.0 - m))
                    } else {
                        -c * (x / x0).ln()
                    };
                    self.a_right + self.b_plus * (x - x0) + tail
                } else if x <= -x0 {
                    self.a_left + self.b_minus * (x + x0)
                } else {
                    let anchor = if x >= 0.0 { 0.0 } else { -x0 };
                    let base = if x >= 0.0 { 0.0 } else { self.a_left };
                    base + adaptive(|t| self.b_raw(t), anchor, x, 1e-13)
                }
            }
        }
    }

    /// x_k = a⁻¹(k): safeguarded Newton with a guaranteed monotone bracket.
    pub fn invert_a(&self, k: f64) -> Result<f64> {
        if let ProfileKind::Constant { b } = &self.kind {
            return Ok(k / b);
        }
        let mut x = k / self.b_plus;
        let f0 = self.eval_a(x) - k;
        let (mut lo, mut hi);
        if f0 == 0.0 {
            return Ok(x);
        } else if f0 > 0.0 {
            // a(x) > k: true root is left of x
            hi = x;
            lo = x - (f0 / self.b_minus) * 1.05 - 1e-3;
            let mut guard = 0;
            while self.eval_a(lo) > k {
                lo -= (hi - lo).max(1.0);
                guard += 1;
                if guard > 200 {
                    return Err(Error::Numerical("invert_a: bracket search failed".into()));
                }
            }
        } else {
            lo = x;
            hi = x + ((-f0) / self.b_minus) * 1.05 + 1e-3;
            let mut guard = 0;
            while self.eval_a(hi) < k {
                hi += (hi - lo).max(1.0);
                guard += 1;
                if guard > 200 {
                    return Err(Error::Numerical("invert_a: bracket search failed".into()));
                }
            }
        }
        // Newton with bisection fallback, run to machine precision: x_k
        // centers the Hermite basis, so slack here shows up directly in
        // eigenfunction comparisons
        x = 0.5 * (lo + hi);
        for _ in 0..200 {
            let f = self.eval_a(x) - k;
            if f > 0.0 {
                hi = x;
            } else {
                lo = x;
            }
            let b = self.b_raw(x);
            let mut next = x - f / b;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - x).abs() <= 2.0 * f64::EPSILON * x.abs().max(1.0) {
                return Ok(next);
            }
            x = next;
        }
        let f = self.eval_a(x) - k;
        if f.abs() <= 1e-11 * (1.0 + k.abs()) {
            Ok(x)
        } else {
            Err(Error::Numerical(format!("invert_a: residual {f} at k={k}")))
        }
    }

    /// True when the field is constant (flat bands, degenerate thresholds).
    pub fn is_constant(&self) -> bool {
        matches!(self.kind, ProfileKind::Constant { .. })
    }

    /// Upper threshold Ɛ̄ₙ = b₊(2n-1).
    pub fn threshold_upper(&self, n: usize) -> f64 {
        self.b_plus * (2.0 * n as f64 - 1.0)
    }

    /// Lower threshold Ɛ̲ₙ = b₋(2n-1).
    pub fn threshold_lower(&self, n: usize) -> f64 {
        self.b_minus * (2.0 * n as f64 - 1.0)
    }

    /// Canonical 10⁴-point verification grid for monotonicity checks:
    /// starts just inside the bridge (where the cutoff is far from
    /// underflow) and extends well into the tail.
    pub fn verification_grid(&self) -> Vec<f64> {
        let lo = -0.9 * self.x0.max(1.0);
        let hi = (5.0 * self.x0.max(1.0)).max(20.0);
        let n = 10_000;
        (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
    }

    fn verify_monotone(&self) -> Result<()> {
        // Pointwise the profile must never decrease; strictness is checked
        // at a coarser stride because the e^{-1/s} cutoff saturates below
        // f64 resolution at the bridge ends.
        let strict = matches!(self.kind, ProfileKind::ModelPowerTail);
        let grid = self.verification_grid();
        let stride = 50;
        let bs: Vec<f64> = grid.iter().map(|&x| self.b_raw(x)).collect();
        for (i, (&x, &b)) in grid.iter().zip(&bs).enumerate() {
            if i > 0 && b < bs[i - 1] {
                return Err(Error::InvalidParameters(format!(
                    "profile not increasing near x = {x}"
                )));
            }
            if strict && i >= stride && b <= bs[i - stride] {
                return Err(Error::InvalidParameters(format!(
                    "profile not strictly increasing near x = {x}"
                )));
            }
            if !(b > 0.0 && b >= self.b_minus && b <= self.b_plus) {
                return Err(Error::InvalidParameters(format!("b({x}) = {b} out of [b₋, b₊]")));
            }
        }
        let mut prev_a = f64::MIN;
        for &x in grid.iter().step_by(stride) {
            let a = self.eval_a(x);
            if a <= prev_a {
                return Err(Error::InvalidParameters(format!(
                    "primitive not increasing near x = {x}"
                )));
            }
            prev_a = a;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model() -> MagneticProfile {
        MagneticProfile::model_power_tail(1.0, 2.0, 2.0, 1.0, 2.0).unwrap()
    }

    #[test]
    fn constant_field_basics() {
        let p = MagneticProfile::constant(1.0).unwrap();
        assert_eq!(p.eval_b(3.7, 0).unwrap(), 1.0);
        let p2 = MagneticProfile::constant(2.0).unwrap();
        assert_eq!(p2.eval_a(2.0), 4.0);
        assert_eq!(p2.invert_a(4.0).unwrap(), 2.0);
        let p1 = MagneticProfile::constant(1.0).unwrap();
        assert_eq!(p1.eval_a(0.0), 0.0);
        assert_eq!(p1.invert_a(-3.0).unwrap(), -3.0);
    }

    #[test]
    fn tail_values_match_closed_form() {
        let p = model();
        assert!((p.eval_b(10.0, 0).unwrap() - 1.99).abs() < 1e-15);
        assert!((p.eval_b(10.0, 1).unwrap() - 0.002).abs() < 1e-17);
        // analytic chain up to p = 4 on the tail
        for pd in 0..=4usize {
            let x = 3.5f64;
            let m = 2.0f64;
            let exact = match pd {
                0 => 2.0 - x.powf(-m),
                1 => m * x.powf(-m - 1.0),
                2 => -m * (m + 1.0) * x.powf(-m - 2.0),
                3 => m * (m + 1.0) * (m + 2.0) * x.powf(-m - 3.0),
                _ => -m * (m + 1.0) * (m + 2.0) * (m + 3.0) * x.powf(-m - 4.0),
            };
            assert!(
                (p.eval_b(x, pd).unwrap() - exact).abs() <= 1e-13 * exact.abs().max(1.0),
                "p={pd}"
            );
        }
        assert!(matches!(p.eval_b(1.0, 5), Err(Error::UnsupportedOrder(5))));
    }

    #[test]
    fn bridge_derivatives_match_finite_differences() {
        let p = model();
        let x = 0.7; // inside the bridge
        let h = 1e-5;
        for pd in 1..=3usize {
            let fd = (p.eval_b(x + h, pd - 1).unwrap() - p.eval_b(x - h, pd - 1).unwrap())
                / (2.0 * h);
            let an = p.eval_b(x, pd).unwrap();
            assert!(
                (fd - an).abs() <= 1e-5 * an.abs().max(1.0),
                "p={pd}: fd={fd} analytic={an}"
            );
        }
    }

    #[test]
    fn primitive_matches_quadrature_oracle() {
        let p = model();
        // independent oracle: brute-force adaptive quadrature of b over [0, 10]
        let oracle = adaptive(|t| p.eval_b(t, 0).unwrap(), 0.0, 10.0, 1e-13);
        assert!((p.eval_a(10.0) - oracle).abs() < 1e-10);
        // and across the left piece
        let oracle_l = -adaptive(|t| p.eval_b(t, 0).unwrap(), -7.0, 0.0, 1e-13);
        assert!((p.eval_a(-7.0) - oracle_l).abs() < 1e-10);
    }

    #[test]
    fn inversion_round_trip() {
        let p = model();
        let mut k = -50.0;
        while k <= 500.0 {
            let x = p.invert_a(k).unwrap();
            assert!((p.eval_a(x) - k).abs() <= 1e-10 * k.abs().max(1.0), "k={k}");
            k += 13.7;
        }
        // bisection-style oracle for one value
        let x25 = p.invert_a(25.0).unwrap();
        let oracle = crate::quad::brent(|x| p.eval_a(x) - 25.0, 0.0, 30.0, 1e-12).unwrap();
        assert!((x25 - oracle).abs() < 1e-10 * 25.0);
    }

    #[test]
    fn monotone_on_verification_grid() {
        let p = model();
        let g = p.verification_grid();
        // never decreasing pointwise, strictly increasing at modest stride
        for w in g.windows(2) {
            assert!(p.eval_b(w[0], 0).unwrap() <= p.eval_b(w[1], 0).unwrap());
        }
        for pair in g.chunks(50).collect::<Vec<_>>().windows(2) {
            let (x1, x2) = (pair[0][0], pair[1][0]);
            assert!(p.eval_b(x1, 0).unwrap() < p.eval_b(x2, 0).unwrap());
            assert!(p.eval_a(x1) < p.eval_a(x2));
        }
    }

    #[test]
    fn hypothesis_ratio_decays_on_tail() {
        // b'/(b₊ - b) = M/x must decrease along the tail
        let p = model();
        let mut prev = f64::MAX;
        for i in 0..50 {
            let x = 3.0 + i as f64;
            let r = p.eval_b(x, 1).unwrap() / (p.b_plus - p.eval_b(x, 0).unwrap());
            assert!(r < prev);
            assert!((r - p.m_exp / x).abs() < 1e-12);
            prev = r;
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(MagneticProfile::model_power_tail(1.0, 2.0, 2.0, 8.0, 2.0).is_err());
        assert!(MagneticProfile::model_power_tail(2.0, 1.0, 2.0, 1.0, 2.0).is_err());
        assert!(MagneticProfile::constant(-1.0).is_err());
    }

    #[test]
    fn user_table_interpolates_monotonically() {
        let xs: Vec<f64> = (0..40).map(|i| -4.0 + 0.25 * i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| 1.5 + (x / 3.0).tanh() * 0.4).collect();
        let p = MagneticProfile::user_table(xs, ys).unwrap();
        assert!((p.eval_a(0.0)).abs() < 1e-12);
        let g = p.verification_grid();
        for w in g.windows(2) {
            assert!(p.eval_b(w[0], 0).unwrap() <= p.eval_b(w[1], 0).unwrap());
        }
    }
}
