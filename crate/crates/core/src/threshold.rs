//! Transport and localization diagnostics near the thresholds Ɛ̄ₙ:
//! extremes of the band velocity Eₙ' over energy windows, and the mass
//! that near-threshold eigenfunctions leave in the region where the field
//! still varies.
//!
//! Everything here reduces statements about arbitrary localized states
//! πₙφ to the per-k quantities that bound them: velocity extremes over
//! the window preimage Eₙ⁻¹(I) and per-fiber eigenfunction masses.

use crate::fiber::{self, SolveOptions};
use crate::field::MagneticProfile;
use crate::quasimode;
use crate::{Error, Result};
use serde::Serialize;

/// Energy window (Ɛ̄ₙ-δ₁, Ɛ̄ₙ-δ₂) below the n-th upper threshold.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EnergyWindow {
    pub n: usize,
    pub delta1: f64,
    pub delta2: f64,
}

impl EnergyWindow {
    pub fn new(n: usize, delta1: f64, delta2: f64) -> Result<Self> {
        if !(delta1 > delta2 && delta2 > 0.0) {
            return Err(Error::Domain(format!(
                "window needs δ₁ > δ₂ > 0, got ({delta1}, {delta2})"
            )));
        }
        Ok(Self { n, delta1, delta2 })
    }

    /// Window must stay inside the band (Ɛ̲ₙ, Ɛ̄ₙ) and clear of every
    /// other threshold.
    pub fn validate(&self, profile: &MagneticProfile) -> Result<()> {
        let upper = profile.threshold_upper(self.n);
        let lower = profile.threshold_lower(self.n);
        let (a, b) = (upper - self.delta1, upper - self.delta2);
        if a <= lower {
            return Err(Error::Domain(format!("window bottom {a} below Ɛ̲ₙ = {lower}")));
        }
        for m in 1..=(self.n + 4) {
            for t in [profile.threshold_lower(m), profile.threshold_upper(m)] {
                if t > a && t < b {
                    return Err(Error::Domain(format!(
                        "window ({a}, {b}) straddles threshold {t}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Localization data at one δ.
#[derive(Debug, Clone, Serialize)]
pub struct LocalizationReport {
    pub delta: f64,
    /// k₋(δ) = ϱₙ(δ).
    pub k_minus: f64,
    /// x(δ) = x_{k₋} - (ν/b₊)√|log rₙ(δ)|.
    pub x_delta: f64,
    /// rₙ(δ) = sup_{k ≥ k₋} ε(k) = ε(k₋) by monotone decay.
    pub r_n: f64,
    /// sup over sampled k ∈ ϱₙ((0,δ)) of ∫_{-∞}^{x(δ)} uₙ(x,k)² dx.
    pub mass_left: f64,
}

fn window_solver() -> SolveOptions {
    SolveOptions { rtol: 1e-8, base_points: 1201, half_width: 12.0, max_levels: 3 }
}

/// (inf, sup) of Eₙ' over k ∈ Eₙ⁻¹(window), by mapping the window ends
/// through ϱₙ and sampling the Feynman–Hellmann derivative at 64
/// log-spaced points per decade.
pub fn current_bounds(profile: &MagneticProfile, window: &EnergyWindow) -> Result<(f64, f64)> {
    window.validate(profile)?;
    let opts = window_solver();
    let k1 = fiber::rho_inverse_with(profile, window.n, window.delta1, &opts)?;
    let k2 = fiber::rho_inverse_with(profile, window.n, window.delta2, &opts)?;
    debug_assert!(k1 < k2);
    let decades = (k2 / k1.max(1e-9)).log10().max(0.05);
    let samples = ((64.0 * decades).ceil() as usize).clamp(9, 256);
    let mut lo = f64::MAX;
    let mut hi = f64::MIN;
    for i in 0..samples {
        let k = k1 * (k2 / k1).powf(i as f64 / (samples - 1) as f64);
        let pairs = fiber::solve_fiber_with(profile, k, window.n, &opts)?;
        let v = fiber::fh_derivative(profile, &pairs[window.n - 1]);
        lo = lo.min(v);
        hi = hi.max(v);
    }
    Ok((lo, hi))
}

/// Mass left of x(δ) for states in the energy band (Ɛ̄ₙ-δ, Ɛ̄ₙ): the
/// per-fiber supremum dominates every mixed state.
pub fn localization_mass(
    profile: &MagneticProfile,
    n: usize,
    delta: f64,
    nu: f64,
) -> Result<LocalizationReport> {
    if !(nu > 1.0) {
        return Err(Error::Parameter(format!("nu = {nu} must exceed 1")));
    }
    let opts = window_solver();
    let k_minus = fiber::rho_inverse_with(profile, n, delta, &opts)?;
    if k_minus < 5.0 * profile.x0 * profile.b_plus {
        return Err(Error::Domain(format!(
            "delta = {delta} too large: ϱₙ(δ) = {k_minus} not in the asymptotic regime"
        )));
    }
    let (sigma, tau) = quasimode::default_sigma_tau(profile);
    let r_n = quasimode::epsilon_bound(profile, k_minus, sigma, tau)?.epsilon_k;
    debug_assert!(
        quasimode::epsilon_bound(profile, 2.0 * k_minus, sigma, tau)?.epsilon_k <= r_n,
        "ε(k) not decreasing past k₋"
    );
    let x_k_minus = profile.invert_a(k_minus)?;
    let x_delta = x_k_minus - nu / profile.b_plus * r_n.ln().abs().sqrt();

    // per-k masses decay as the center moves right; stop sampling once the
    // contribution falls three orders below the running supremum
    let mut mass = 0.0f64;
    let mut k = k_minus;
    for _ in 0..24 {
        let pairs = fiber::solve_fiber_with(profile, k, n, &opts)?;
        let m = pairs[n - 1].mass_left_of(x_delta);
        mass = mass.max(m);
        if m < 1e-3 * mass {
            break;
        }
        k *= 1.3;
    }
    Ok(LocalizationReport { delta, k_minus, x_delta, r_n, mass_left: mass })
}
