//! Normalized Hermite functions Ψₙ (indexed from n = 1) and the exact
//! ladder identities for tΨₙ and t³Ψₙ used by the quasi-mode construction.
//!
//! Ψₙ is the (n-1)-th oscillator eigenfunction: (-∂ₜ² + t²)Ψₙ = ΛₙΨₙ with
//! Λₙ = 2n - 1, and Ψ₁ = π^{-1/4} e^{-t²/2}.

use crate::{Error, Result};
use std::collections::BTreeMap;

/// Oscillator eigenvalue Λₙ = 2n - 1.
pub fn oscillator_eigenvalue(n: usize) -> f64 {
    2.0 * n as f64 - 1.0
}

/// Finite expansion in the orthonormal basis {Ψⱼ}, j ≥ 1.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct HermiteExpansion {
    coeffs: BTreeMap<usize, f64>,
}

impl HermiteExpansion {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn unit(n: usize) -> Self {
        let mut e = Self::new();
        e.set(n, 1.0);
        e
    }

    /// Sets a coefficient; zero coefficients and indices < 1 are dropped.
    pub fn set(&mut self, j: usize, v: f64) {
        if j >= 1 && v != 0.0 {
            self.coeffs.insert(j, v);
        } else {
            self.coeffs.remove(&j);
        }
    }

    pub fn add(&mut self, j: usize, v: f64) {
        let cur = self.coeff(j) + v;
        self.set(j, cur);
    }

    pub fn coeff(&self, j: usize) -> f64 {
        self.coeffs.get(&j).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.coeffs.iter().map(|(&j, &v)| (j, v))
    }

    pub fn max_index(&self) -> usize {
        self.coeffs.keys().next_back().copied().unwrap_or(0)
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = Self::new();
        for (j, v) in self.iter() {
            out.set(j, v * s);
        }
        out
    }

    pub fn sum(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (j, v) in other.iter() {
            out.add(j, v);
        }
        out
    }

    /// ⟨self, other⟩ in L² (orthonormal basis).
    pub fn inner(&self, other: &Self) -> f64 {
        self.iter().map(|(j, v)| v * other.coeff(j)).sum()
    }

    pub fn norm2(&self) -> f64 {
        self.iter().map(|(_, v)| v * v).sum()
    }

    /// Expansion of t·(this expansion) via the ladder identity.
    pub fn apply_ladder_t(&self) -> Self {
        let mut out = Self::new();
        for (j, v) in self.iter() {
            for (i, c) in ladder_t(j).iter() {
                out.add(i, v * c);
            }
        }
        out
    }

    /// Pointwise value Σⱼ cⱼ Ψⱼ(t).
    pub fn eval(&self, t: f64) -> Result<f64> {
        let nmax = self.max_index();
        if nmax == 0 {
            return Ok(0.0);
        }
        let table = hermite_values(nmax, t)?;
        Ok(self.iter().map(|(j, v)| v * table[j - 1]).sum())
    }
}

/// Values of Ψ₁..Ψₙ at t by the normalized three-term recurrence
/// Ψ_{j+1} = t√(2/j)·Ψⱼ - √((j-1)/j)·Ψ_{j-1}.
pub fn hermite_values(n: usize, t: f64) -> Result<Vec<f64>> {
    if n < 1 || n > 30 || t.abs() > 40.0 {
        return Err(Error::HermiteRange { n, t });
    }
    Ok(hermite_values_unchecked(n, t))
}

/// The recurrence without the public range gate: stable far past n = 30
/// when |t| stays modest, which the Galerkin basis assembly relies on.
pub(crate) fn hermite_values_unchecked(n: usize, t: f64) -> Vec<f64> {
    let mut vals = Vec::with_capacity(n);
    let psi1 = std::f64::consts::PI.powf(-0.25) * (-0.5 * t * t).exp();
    vals.push(psi1);
    if n >= 2 {
        vals.push(t * std::f64::consts::SQRT_2 * psi1);
        for j in 2..n {
            let jf = j as f64;
            let next = t * (2.0 / jf).sqrt() * vals[j - 1] - ((jf - 1.0) / jf).sqrt() * vals[j - 2];
            vals.push(next);
        }
    }
    vals
}

/// Ψₙ(t).
pub fn hermite_eval(n: usize, t: f64) -> Result<f64> {
    Ok(*hermite_values(n, t)?.last().unwrap())
}

/// tΨₙ = √((n-1)/2)·Ψ_{n-1} + √(n/2)·Ψ_{n+1}.
pub fn ladder_t(n: usize) -> HermiteExpansion {
    assert!(n >= 1);
    let nf = n as f64;
    let mut e = HermiteExpansion::new();
    if n >= 2 {
        e.set(n - 1, ((nf - 1.0) / 2.0).sqrt());
    }
    e.set(n + 1, (nf / 2.0).sqrt());
    e
}

/// t³Ψₙ = 2^{-3/2}·(√((n-1)(n-2)(n-3))·Ψ_{n-3} + 3(n-1)^{3/2}·Ψ_{n-1}
///         + 3n^{3/2}·Ψ_{n+1} + √(n(n+1)(n+2))·Ψ_{n+3}).
pub fn ladder_t3(n: usize) -> HermiteExpansion {
    assert!(n >= 1);
    let nf = n as f64;
    let s = 2f64.powf(-1.5);
    let mut e = HermiteExpansion::new();
    if n >= 4 {
        e.set(n - 3, s * ((nf - 1.0) * (nf - 2.0) * (nf - 3.0)).sqrt());
    }
    if n >= 2 {
        e.set(n - 1, s * 3.0 * (nf - 1.0) * (nf - 1.0).sqrt());
    }
    e.set(n + 1, s * 3.0 * nf * nf.sqrt());
    e.set(n + 3, s * (nf * (nf + 1.0) * (nf + 2.0)).sqrt());
    e
}

/// (⟨t²Ψₙ,Ψₙ⟩, ⟨t⁴Ψₙ,Ψₙ⟩) = ((2n-1)/2, ¾(2n²-2n+1)).
pub fn moments(n: usize) -> (f64, f64) {
    assert!(n >= 1);
    let nf = n as f64;
    ((2.0 * nf - 1.0) / 2.0, 0.75 * (2.0 * nf * nf - 2.0 * nf + 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::adaptive;

    #[test]
    fn ground_state_value() {
        // π^{-1/4}, cross-checked by normalizing e^{-t²/2} with quadrature
        let v = hermite_eval(1, 0.0).unwrap();
        let norm2 = adaptive(|t| (-t * t).exp(), -12.0, 12.0, 1e-13);
        assert!((v - 1.0 / norm2.sqrt()).abs() < 1e-12);
        assert!((v - 0.7511255444649425).abs() < 1e-12);
        assert_eq!(hermite_eval(2, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn normalization_by_quadrature() {
        for n in [1usize, 3, 8] {
            let int = adaptive(|t| hermite_eval(n, t).unwrap().powi(2), -14.0, 14.0, 1e-12);
            assert!((int - 1.0).abs() < 1e-10, "n={n}: {int}");
        }
    }

    #[test]
    fn range_errors() {
        assert!(hermite_eval(31, 0.0).is_err());
        assert!(hermite_eval(0, 0.0).is_err());
        assert!(hermite_eval(3, 41.0).is_err());
    }

    #[test]
    fn gram_matrix_is_identity() {
        for i in 1..=8usize {
            for j in i..=8usize {
                let int = adaptive(
                    |t| hermite_eval(i, t).unwrap() * hermite_eval(j, t).unwrap(),
                    -14.0,
                    14.0,
                    1e-12,
                );
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((int - expect).abs() < 1e-9, "({i},{j}): {int}");
            }
        }
    }

    #[test]
    fn eigen_relation_by_finite_differences() {
        for n in [1usize, 2, 5] {
            let h = 1e-4;
            let lam = oscillator_eigenvalue(n);
            let mut worst: f64 = 0.0;
            for i in 0..200 {
                let t = -5.0 + 10.0 * i as f64 / 199.0;
                let um = hermite_eval(n, t - h).unwrap();
                let u0 = hermite_eval(n, t).unwrap();
                let up = hermite_eval(n, t + h).unwrap();
                let lhs = -(up - 2.0 * u0 + um) / (h * h) + t * t * u0;
                worst = worst.max((lhs - lam * u0).abs());
            }
            assert!(worst < 1e-6 * lam, "n={n}: residual {worst}");
        }
    }

    #[test]
    fn ladder_t_examples() {
        let e1 = ladder_t(1);
        assert!((e1.coeff(2) - 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(e1.coeff(1), 0.0);
        let e2 = ladder_t(2);
        assert!((e2.coeff(1) - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((e2.coeff(3) - 1.0).abs() < 1e-15);
        // quadrature: ∫ t Ψ₂ Ψ₃ = coefficient of Ψ₃ in tΨ₂
        let int = adaptive(
            |t| t * hermite_eval(2, t).unwrap() * hermite_eval(3, t).unwrap(),
            -14.0,
            14.0,
            1e-12,
        );
        assert!((int - 1.0).abs() < 1e-10);
    }

    #[test]
    fn ladder_t3_examples() {
        let e1 = ladder_t3(1);
        assert!((e1.coeff(2) - 3.0 / (2.0 * 2f64.sqrt())).abs() < 1e-15);
        assert!((e1.coeff(4) - 6f64.sqrt() / (2.0 * 2f64.sqrt())).abs() < 1e-15);
        let e2 = ladder_t3(2);
        assert!((e2.coeff(1) - 3.0 / (2.0 * 2f64.sqrt())).abs() < 1e-15);
        assert!((e2.coeff(3) - 3.0).abs() < 1e-14);
        assert!((e2.coeff(5) - 3f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn ladder_coefficients_reproduce_quadrature() {
        for n in 1..=8usize {
            for (expansion, p) in [(ladder_t(n), 1), (ladder_t3(n), 3)] {
                for (j, c) in expansion.iter() {
                    let int = adaptive(
                        |t| {
                            t.powi(p) * hermite_eval(n, t).unwrap() * hermite_eval(j, t).unwrap()
                        },
                        -16.0,
                        16.0,
                        1e-12,
                    );
                    assert!((int - c).abs() < 1e-9, "n={n} p={p} j={j}: {int} vs {c}");
                }
            }
        }
    }

    #[test]
    fn ladder_t3_norm_matches_quadrature() {
        for n in [1usize, 2, 4, 7] {
            let e = ladder_t3(n);
            let int = adaptive(
                |t| (t.powi(3) * hermite_eval(n, t).unwrap()).powi(2),
                -16.0,
                16.0,
                1e-11,
            );
            assert!((e.norm2() - int).abs() < 1e-8 * int.max(1.0), "n={n}");
        }
    }

    #[test]
    fn moment_examples_and_ladder_consistency() {
        assert_eq!(moments(1), (0.5, 0.75));
        assert_eq!(moments(2), (1.5, 3.75));
        for n in 1..=8usize {
            // m4 = ⟨t³Ψₙ, tΨₙ⟩ from the two ladder expansions
            let m4 = ladder_t3(n).inner(&ladder_t(n));
            assert!((m4 - moments(n).1).abs() < 1e-12, "n={n}");
            // m2 from the t-ladder applied twice
            let m2 = ladder_t(n).apply_ladder_t().coeff(n);
            assert!((m2 - moments(n).0).abs() < 1e-13, "n={n}");
        }
    }
}
