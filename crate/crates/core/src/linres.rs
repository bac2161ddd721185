//! Closed-form linear response of the weakly driven atom-cavity system.
//!
//! Zeroth order in velocity the internal state is the semiclassical steady
//! state `s⁽⁰⁾ = η(κ−iΔ_C)/D`, `α_i⁽⁰⁾ = η g_i/D`; first order follows from the
//! same linear system driven by `∂_z` of the zeroth-order amplitudes. All
//! formulas take real mode functions (standing-wave cavity).
//!
//! Sign convention: `beta` is the force per unit velocity, so `beta < 0` damps
//! the motion.

use crate::modes::{CouplingSums, ModeSet};
use crate::params::SystemParams;
use crate::{Error, Result, C64};

/// `D(Ω) = (κ − iΔ_C − iΩ)(γ − iΔ_A − iΩ) + G`.
pub fn determinant(p: &SystemParams, coupling_sq: f64, omega: f64) -> C64 {
    let cav = C64::new(p.kappa, -p.delta_c - omega);
    let atom = C64::new(p.gamma, -p.delta_a - omega);
    cav * atom + coupling_sq
}

fn checked_determinant(p: &SystemParams, coupling_sq: f64) -> Result<C64> {
    let d = determinant(p, coupling_sq, 0.0);
    if d.norm_sqr() == 0.0 || !d.norm_sqr().is_finite() {
        Err(Error::SingularDeterminant)
    } else {
        Ok(d)
    }
}

/// Semiclassical amplitudes; `s1`, `alphas1` are per unit velocity.
#[derive(Debug, Clone, PartialEq)]
pub struct InternalSteadyState {
    pub s0: C64,
    pub alphas: Vec<C64>,
    pub s1: C64,
    pub alphas1: Vec<C64>,
}

/// Steady state for explicit per-mode couplings `g_i(z)` and gradients.
pub fn steady_state_modes(
    p: &SystemParams,
    couplings: &[f64],
    gradients: &[f64],
) -> Result<InternalSteadyState> {
    let sums = CouplingSums::from_modes(couplings, gradients);
    let d = checked_determinant(p, sums.coupling_sq)?;
    let cav = C64::new(p.kappa, -p.delta_c);
    let atom = C64::new(p.gamma, -p.delta_a);
    let eta = p.eta;
    let big_g = sums.coupling_sq;
    let dg = sums.coupling_sq_gradient;
    let cross = sums.cross_gradient;
    let d2 = d * d;
    let d3 = d2 * d;

    let s0 = eta * cav / d;
    let alphas = couplings.iter().map(|&g| eta * g / d).collect();
    let s1 = eta / d3 * (cav * cav - big_g) * dg + eta / d2 * cross;
    let alphas1 = couplings
        .iter()
        .zip(gradients)
        .map(|(&g, &dgi)| eta / d3 * (cav + atom) * g * dg - eta / d2 / cav * (d * dgi - g * cross))
        .collect();
    Ok(InternalSteadyState {
        s0,
        alphas,
        s1,
        alphas1,
    })
}

pub fn steady_state(p: &SystemParams, modes: &ModeSet, z: f64) -> Result<InternalSteadyState> {
    steady_state_modes(p, &modes.couplings(z), &modes.gradients(z))
}

/// `⟨σ†σ⟩ = |s⁽⁰⁾|²`.
pub fn atomic_excitation(state: &InternalSteadyState) -> f64 {
    state.s0.norm_sqr()
}

/// `η²(κ² + Δ_C²)/|D|²`.
pub fn atomic_excitation_closed(p: &SystemParams, coupling_sq: f64) -> f64 {
    let d2 = determinant(p, coupling_sq, 0.0).norm_sqr();
    p.eta * p.eta * (p.kappa * p.kappa + p.delta_c * p.delta_c) / d2
}

/// `|α_i⁽⁰⁾|²` for every mode.
pub fn photon_numbers(state: &InternalSteadyState) -> Vec<f64> {
    state.alphas.iter().map(|a| a.norm_sqr()).collect()
}

/// Expectation of the force operator `F = iΣ ∂g_i (σ†a_i − a_i†σ)` on the
/// semiclassical state.
pub fn mean_force(state: &InternalSteadyState, gradients: &[f64]) -> f64 {
    gradients
        .iter()
        .zip(&state.alphas)
        .map(|(&dg, &a)| -2.0 * dg * (state.s0.conj() * a).im)
        .sum()
}

/// `f_p = −η² Δ_C ∂_z G / |D|²`.
pub fn mean_force_closed(p: &SystemParams, sums: &CouplingSums) -> f64 {
    let d2 = determinant(p, sums.coupling_sq, 0.0).norm_sqr();
    -p.eta * p.eta * p.delta_c * sums.coupling_sq_gradient / d2
}

/// Friction coefficient of a standing-wave cavity in closed form.
pub fn friction(p: &SystemParams, sums: &CouplingSums) -> f64 {
    let SystemParams {
        gamma,
        kappa,
        delta_a,
        delta_c,
        eta,
        ..
    } = *p;
    let big_g = sums.coupling_sq;
    let dg2 = sums.coupling_sq_gradient.powi(2);
    let d2 = determinant(p, big_g, 0.0).norm_sqr();
    let d4 = d2 * d2;
    let d6 = d4 * d2;
    let eta2 = eta * eta;
    let cav2 = kappa * kappa + delta_c * delta_c;

    let first = -eta2 / d4
        * dg2
        * (kappa * delta_a
            + 2.0
                * delta_c
                * (kappa
                    + gamma
                    + kappa * (kappa * gamma - delta_c * delta_a + big_g / 2.0) / cav2));
    let second = 4.0 * eta2 / d6
        * dg2
        * delta_c
        * (kappa * delta_a + gamma * delta_c)
        * (kappa * kappa * delta_a
            + gamma * gamma * delta_c
            + (delta_a + delta_c) * (delta_a * delta_c - big_g));
    let third = 4.0 * eta2 / d2 * kappa * delta_c / cav2 * sums.gradient_sq;
    first + second + third
}

/// Friction from the first-order amplitudes:
/// `β = iΣ ∂g_i (s⁽⁰⁾* α_i⁽¹⁾ + s⁽¹⁾* α_i⁽⁰⁾) + c.c.`
pub fn friction_from_amplitudes(state: &InternalSteadyState, gradients: &[f64]) -> f64 {
    gradients
        .iter()
        .zip(state.alphas.iter().zip(&state.alphas1))
        .map(|(&dg, (&a0, &a1))| {
            let inner = state.s0.conj() * a1 + state.s1.conj() * a0;
            -2.0 * dg * inner.im
        })
        .sum()
}

/// Momentum diffusion from dipole fluctuations, real mode functions.
pub fn diffusion_dipole(p: &SystemParams, sums: &CouplingSums) -> f64 {
    let d2 = determinant(p, sums.coupling_sq, 0.0).norm_sqr();
    2.0 * p.eta * p.eta / d2
        * (p.kappa * sums.gradient_sq
            + sums.coupling_sq_gradient.powi(2)
                * p.delta_c
                * (p.kappa * p.delta_a + p.gamma * p.delta_c)
                / d2)
}

/// Spontaneous-recoil diffusion `2 k_A² ū² γ ⟨σ†σ⟩`.
pub fn diffusion_recoil(p: &SystemParams, state: &InternalSteadyState) -> f64 {
    recoil_from_excitation(p, atomic_excitation(state))
}

pub(crate) fn recoil_from_excitation(p: &SystemParams, excitation: f64) -> f64 {
    2.0 * p.k_atom_ratio.powi(2) * p.u2bar * p.gamma * excitation
}

/// Every position-resolved coefficient at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct MotionCoefficients {
    pub f_p: f64,
    pub beta: f64,
    pub d_dip: f64,
    pub d_rec: f64,
    pub excitation: f64,
    pub photons: Vec<f64>,
}

pub fn motion_coefficients(
    p: &SystemParams,
    modes: &ModeSet,
    z: f64,
) -> Result<MotionCoefficients> {
    let grads = modes.gradients(z);
    let state = steady_state_modes(p, &modes.couplings(z), &grads)?;
    let sums = modes.coupling_sums(z);
    Ok(MotionCoefficients {
        f_p: mean_force(&state, &grads),
        beta: friction(p, &sums),
        d_dip: diffusion_dipole(p, &sums),
        d_rec: diffusion_recoil(p, &state),
        excitation: atomic_excitation(&state),
        photons: photon_numbers(&state),
    })
}

/// The scalar coefficients without per-mode amplitudes; the hot path of
/// averages, scans and trajectories.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalCoefficients {
    pub f_p: f64,
    pub beta: f64,
    pub d_dip: f64,
    pub d_rec: f64,
    pub excitation: f64,
}

pub fn local_coefficients(p: &SystemParams, sums: &CouplingSums) -> Result<LocalCoefficients> {
    checked_determinant(p, sums.coupling_sq)?;
    let excitation = atomic_excitation_closed(p, sums.coupling_sq);
    Ok(LocalCoefficients {
        f_p: mean_force_closed(p, sums),
        beta: friction(p, sums),
        d_dip: diffusion_dipole(p, sums),
        d_rec: recoil_from_excitation(p, excitation),
        excitation,
    })
}
