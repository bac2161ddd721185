//! The master parameter record and its validation.

mod config;

pub use config::{parse_config, RunConfig, SimulateSettings, DEFAULT_GOUY_SCALE_K, KEYS};

use crate::{Error, Result};

/// Excitation above which the low-saturation linearisation is suspect.
pub const DEFAULT_SATURATION_THRESHOLD: f64 = 0.1;

/// `ω_rec/γ` for the ⁸⁷Rb D2 line, with `γ` the dipole (half-width) decay rate.
///
/// `ω_rec = ħk²/2m` with `λ = 780.241 nm`, `m = 86.909 u`; `γ = 1/(2τ)` with
/// the excited-state lifetime `τ = 26.2348 ns` (γ ≈ 19/μs).
pub fn rb87_recoil_ratio() -> f64 {
    const HBAR: f64 = 1.054_571_817e-34;
    const LAMBDA: f64 = 780.241_209_686e-9;
    const MASS: f64 = 86.909_180_527 * 1.660_539_066_60e-27;
    const LIFETIME: f64 = 26.2348e-9;
    let k = 2.0 * std::f64::consts::PI / LAMBDA;
    let recoil = HBAR * k * k / (2.0 * MASS);
    let gamma = 0.5 / LIFETIME;
    recoil / gamma
}

/// All rates and detunings are in units of the dipole decay rate `gamma`.
///
/// `gamma` is the dipole decay rate (spontaneous emission rate `2γ`); it is
/// normally left at 1 and only differs from 1 when roles are exchanged, as in
/// [`SystemParams::swapped`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    pub gamma: f64,
    /// Cavity field decay rate.
    pub kappa: f64,
    /// Pump-atom detuning `ω_p − ω_A`.
    pub delta_a: f64,
    /// Pump-cavity detuning `ω_p − ω_C`.
    pub delta_c: f64,
    /// Coherent pump amplitude.
    pub eta: f64,
    /// Peak vacuum Rabi coupling of the fundamental mode.
    pub g_single: f64,
    /// `ω_rec = ħk²/2m`; encodes the atomic mass.
    pub recoil_freq: f64,
    /// Mean squared projection of the spontaneous recoil on the cavity axis.
    pub u2bar: f64,
    /// `k_A / k`.
    pub k_atom_ratio: f64,
}

impl Default for SystemParams {
    fn default() -> Self {
        Self {
            gamma: 1.0,
            kappa: 1.0,
            delta_a: -3.0,
            delta_c: -3.0,
            eta: 0.01,
            g_single: 3.0,
            recoil_freq: rb87_recoil_ratio(),
            u2bar: 0.4,
            k_atom_ratio: 1.0,
        }
    }
}

impl SystemParams {
    /// Returns `self` unchanged when every invariant holds, otherwise an
    /// error listing each violation.
    pub fn validate(self) -> Result<Self> {
        let mut bad = Vec::new();
        let fields = [
            ("gamma", self.gamma),
            ("kappa", self.kappa),
            ("delta_a", self.delta_a),
            ("delta_c", self.delta_c),
            ("eta", self.eta),
            ("g_single", self.g_single),
            ("recoil_freq", self.recoil_freq),
            ("u2bar", self.u2bar),
            ("k_atom_ratio", self.k_atom_ratio),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                bad.push(format!("{name} must be finite"));
            }
        }
        if !(self.gamma > 0.0) {
            bad.push("gamma must be positive".into());
        }
        if !(self.kappa > 0.0) {
            bad.push("kappa must be positive".into());
        }
        if !(self.eta >= 0.0) {
            bad.push("eta must be non-negative".into());
        }
        if !(self.g_single >= 0.0) {
            bad.push("g_single must be non-negative".into());
        }
        if !(self.recoil_freq > 0.0) {
            bad.push("recoil_freq must be positive".into());
        }
        if !(self.u2bar > 0.0 && self.u2bar <= 1.0) {
            bad.push("u2bar must lie in (0,1]".into());
        }
        if !(self.k_atom_ratio > 0.0) {
            bad.push("k_atom_ratio must be positive".into());
        }
        if bad.is_empty() {
            Ok(self)
        } else {
            Err(Error::InvalidParams(bad))
        }
    }

    /// Atomic mass in units of `ħk²/γ`.
    pub fn mass(&self) -> f64 {
        0.5 / self.recoil_freq
    }

    /// `k_B T_rec = ħ²k²/2m = ħ ω_rec`, in units of `ħγ`.
    pub fn recoil_temperature(&self) -> f64 {
        self.recoil_freq
    }

    pub fn with_detunings(mut self, delta_a: f64, delta_c: f64) -> Self {
        self.delta_a = delta_a;
        self.delta_c = delta_c;
        self
    }

    pub fn with_eta(mut self, eta: f64) -> Self {
        self.eta = eta;
        self
    }

    pub fn with_kappa(mut self, kappa: f64) -> Self {
        self.kappa = kappa;
        self
    }

    pub fn with_coupling(mut self, g_single: f64) -> Self {
        self.g_single = g_single;
        self
    }

    /// Exchanges the roles of dipole and field: `(Δ_A, γ) ↔ (Δ_C, κ)`.
    pub fn swapped(mut self) -> Self {
        std::mem::swap(&mut self.delta_a, &mut self.delta_c);
        std::mem::swap(&mut self.gamma, &mut self.kappa);
        self
    }
}

/// Outcome of [`saturation_guard`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Saturation {
    Pass,
    Warn { excitation: f64, threshold: f64 },
}

/// Flags excitations above `threshold`, where the linearised dipole response
/// stops being trustworthy. Advisory only.
pub fn saturation_guard(excitation: f64, threshold: f64) -> Saturation {
    if excitation <= threshold {
        Saturation::Pass
    } else {
        Saturation::Warn {
            excitation,
            threshold,
        }
    }
}
