//! Degenerate even-index Hermite-Gaussian modes of a confocal cavity, sampled
//! on the cavity axis.
//!
//! Mode `(2n, 2m)` with `0 ≤ n, m ≤ N` has the on-axis coupling
//!
//! ```text
//! g_nm(z) = g · sqrt(w_n w_m) · E(z) · cos(z − (2n+2m+1)·atan(z/z₀))
//! ```
//!
//! where `w_n = (2n−1)!!/(2n)!!` is the squared on-axis amplitude of the
//! one-dimensional Hermite-Gaussian of order `2n` and
//! `E(z) = (1+(z/z₀)²)^(−1/2)` is the axial envelope. Modes sharing
//! `n+m` have identical shape, so the aggregate sums run over the `2N+1`
//! Gouy classes instead of all `(N+1)²` modes.

use crate::{Error, Result, C64};

/// `w_n = (2n−1)!!/(2n)!!`, via the running product `Π (2j−1)/(2j)`.
pub fn onaxis_weight(n: usize) -> f64 {
    (1..=n).fold(1.0, |w, j| w * (2 * j - 1) as f64 / (2 * j) as f64)
}

/// `(2N+1)!!/(2N)!! = Σ_{n≤N} w_n`, via the running product `Π (2j+1)/(2j)`.
pub fn enhancement_factor(n: usize) -> f64 {
    (1..=n).fold(1.0, |r, j| r * (2 * j + 1) as f64 / (2 * j) as f64)
}

/// Single-mode-equivalent coupling of the `(N+1)²` degenerate modes at the
/// waist.
pub fn effective_coupling(n: usize, g: f64) -> f64 {
    g * enhancement_factor(n)
}

/// Aggregate coupling sums at one axial position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingSums {
    /// `G = Σ |g_k|²`.
    pub coupling_sq: f64,
    /// `Γ = Σ g_k ∂_z g_k*`.
    pub cross_gradient: C64,
    /// `∂_z G = Γ + Γ*`.
    pub coupling_sq_gradient: f64,
    /// `Σ (∂_z g_k)²`.
    pub gradient_sq: f64,
}

impl CouplingSums {
    /// Sums for an arbitrary list of real mode couplings and their gradients.
    pub fn from_modes(couplings: &[f64], gradients: &[f64]) -> Self {
        assert_eq!(couplings.len(), gradients.len());
        let mut sums = Self::default();
        for (&g, &dg) in couplings.iter().zip(gradients) {
            sums.coupling_sq += g * g;
            sums.cross_gradient += C64::new(g * dg, 0.0);
            sums.coupling_sq_gradient += 2.0 * g * dg;
            sums.gradient_sq += dg * dg;
        }
        sums
    }
}

impl Default for CouplingSums {
    fn default() -> Self {
        Self {
            coupling_sq: 0.0,
            cross_gradient: C64::new(0.0, 0.0),
            coupling_sq_gradient: 0.0,
            gradient_sq: 0.0,
        }
    }
}

/// How the local antinode coupling is defined away from the waist.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LocalCouplingRule {
    /// `g_eff · E(z)`: the coupling all modes would reach if in phase.
    #[default]
    Envelope,
    /// `sqrt(max G)` over the wavelength starting at `z`.
    MaxOverWavelength,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeSet {
    n_index_max: usize,
    g_single: f64,
    gouy_scale: f64,
    envelope_on: bool,
    weights: Vec<f64>,
    /// `(Gouy order 2s+1, Σ_{n+m=s} w_n w_m)` for `s = 0..=2N`.
    classes: Vec<(f64, f64)>,
}

/// Cosine argument, its derivative, and the envelope with its derivative.
#[derive(Debug, Clone, Copy)]
struct Axial {
    envelope: f64,
    envelope_grad: f64,
    gouy: f64,
    gouy_grad: f64,
}

impl ModeSet {
    pub fn new(
        n_index_max: usize,
        g_single: f64,
        gouy_scale: f64,
        envelope_on: bool,
    ) -> Result<Self> {
        let mut bad = Vec::new();
        if !(gouy_scale > 0.0) {
            bad.push("gouy_scale must be positive".to_string());
        }
        if !(g_single >= 0.0) || !g_single.is_finite() {
            bad.push("g_single must be non-negative".to_string());
        }
        if !bad.is_empty() {
            return Err(Error::InvalidParams(bad));
        }
        let weights: Vec<f64> = (0..=n_index_max).map(onaxis_weight).collect();
        let classes = (0..=2 * n_index_max)
            .map(|s| {
                let lo = s.saturating_sub(n_index_max);
                let hi = s.min(n_index_max);
                let amp: f64 = (lo..=hi).map(|n| weights[n] * weights[s - n]).sum();
                ((2 * s + 1) as f64, amp)
            })
            .collect();
        Ok(Self {
            n_index_max,
            g_single,
            gouy_scale,
            envelope_on,
            weights,
            classes,
        })
    }

    /// One plane standing-wave mode `g cos(z)`: no Gouy phase, no envelope.
    pub fn single_mode(g: f64) -> Self {
        Self::new(0, g, f64::INFINITY, false).expect("non-negative coupling")
    }

    pub fn n_index_max(&self) -> usize {
        self.n_index_max
    }

    pub fn g_single(&self) -> f64 {
        self.g_single
    }

    pub fn gouy_scale(&self) -> f64 {
        self.gouy_scale
    }

    pub fn envelope_on(&self) -> bool {
        self.envelope_on
    }

    /// `M = (N+1)²`.
    pub fn mode_count(&self) -> usize {
        (self.n_index_max + 1).pow(2)
    }

    /// `g · (2N+1)!!/(2N)!!`.
    pub fn effective_coupling(&self) -> f64 {
        effective_coupling(self.n_index_max, self.g_single)
    }

    fn axial(&self, z: f64) -> Axial {
        let x = z / self.gouy_scale;
        let q = 1.0 + x * x;
        let (envelope, envelope_grad) = if self.envelope_on {
            let e = q.powf(-0.5);
            (e, -x / self.gouy_scale * e / q)
        } else {
            (1.0, 0.0)
        };
        Axial {
            envelope,
            envelope_grad,
            gouy: x.atan(),
            gouy_grad: 1.0 / (self.gouy_scale * q),
        }
    }

    /// Axial envelope `E(z)` (1 when disabled).
    pub fn envelope(&self, z: f64) -> f64 {
        self.axial(z).envelope
    }

    fn order(n: usize, m: usize) -> f64 {
        (2 * n + 2 * m + 1) as f64
    }

    fn check_indices(&self, n: usize, m: usize) {
        assert!(
            n <= self.n_index_max && m <= self.n_index_max,
            "mode ({n},{m}) outside 0..={}",
            self.n_index_max
        );
    }

    /// Coupling of mode `(2n, 2m)` at `z`.
    pub fn mode_amplitude(&self, n: usize, m: usize, z: f64) -> f64 {
        self.check_indices(n, m);
        let a = self.axial(z);
        let amp = self.g_single * (self.weights[n] * self.weights[m]).sqrt();
        amp * a.envelope * (z - Self::order(n, m) * a.gouy).cos()
    }

    /// Exact `∂_z` of [`mode_amplitude`](Self::mode_amplitude), in units of `γk`.
    pub fn mode_gradient(&self, n: usize, m: usize, z: f64) -> f64 {
        self.check_indices(n, m);
        let a = self.axial(z);
        let amp = self.g_single * (self.weights[n] * self.weights[m]).sqrt();
        let p = Self::order(n, m);
        let (s, c) = (z - p * a.gouy).sin_cos();
        amp * (a.envelope_grad * c - a.envelope * (1.0 - p * a.gouy_grad) * s)
    }

    /// Per-mode couplings, `(n, m)` in row-major order.
    pub fn couplings(&self, z: f64) -> Vec<f64> {
        self.mode_indices()
            .map(|(n, m)| self.mode_amplitude(n, m, z))
            .collect()
    }

    /// Per-mode gradients, same ordering as [`couplings`](Self::couplings).
    pub fn gradients(&self, z: f64) -> Vec<f64> {
        self.mode_indices()
            .map(|(n, m)| self.mode_gradient(n, m, z))
            .collect()
    }

    pub fn mode_indices(&self) -> impl Iterator<Item = (usize, usize)> {
        let n = self.n_index_max;
        (0..=n).flat_map(move |a| (0..=n).map(move |b| (a, b)))
    }

    pub fn coupling_sums(&self, z: f64) -> CouplingSums {
        let a = self.axial(z);
        let g2 = self.g_single * self.g_single;
        let mut total = 0.0;
        let mut cross = 0.0;
        let mut grad_sq = 0.0;
        for &(p, amp) in &self.classes {
            let (s, c) = (z - p * a.gouy).sin_cos();
            let f = a.envelope * c;
            let df = a.envelope_grad * c - a.envelope * (1.0 - p * a.gouy_grad) * s;
            let w = g2 * amp;
            total += w * f * f;
            cross += w * f * df;
            grad_sq += w * df * df;
        }
        CouplingSums {
            coupling_sq: total,
            cross_gradient: C64::new(cross, 0.0),
            coupling_sq_gradient: 2.0 * cross,
            gradient_sq: grad_sq,
        }
    }

    /// `sqrt(max G)` over `[z, z + 2π]`: a 256-point scan refined by one
    /// Newton step on `∂_z G = 0`.
    pub fn local_coupling(&self, z: f64) -> f64 {
        const GRID: usize = 256;
        let step = std::f64::consts::TAU / GRID as f64;
        let (mut best_z, mut best) = (z, f64::NEG_INFINITY);
        for j in 0..GRID {
            let zj = z + step * j as f64;
            let gj = self.coupling_sums(zj).coupling_sq;
            if gj > best {
                best = gj;
                best_z = zj;
            }
        }
        let h = 1e-4;
        let slope = self.coupling_sums(best_z).coupling_sq_gradient;
        let curvature = (self.coupling_sums(best_z + h).coupling_sq_gradient
            - self.coupling_sums(best_z - h).coupling_sq_gradient)
            / (2.0 * h);
        if curvature < 0.0 {
            let delta = -slope / curvature;
            if delta.abs() <= step {
                best = best.max(self.coupling_sums(best_z + delta).coupling_sq);
            }
        }
        best.max(0.0).sqrt()
    }

    /// `g_eff · E(z)`.
    pub fn envelope_coupling(&self, z: f64) -> f64 {
        self.effective_coupling() * self.envelope(z)
    }

    pub fn local_coupling_by(&self, rule: LocalCouplingRule, z: f64) -> f64 {
        match rule {
            LocalCouplingRule::Envelope => self.envelope_coupling(z),
            LocalCouplingRule::MaxOverWavelength => self.local_coupling(z),
        }
    }
}

/// Detunings that pump the lower dressed state resonantly at an antinode of
/// coupling `g_loc` with the atom-cavity separation held fixed:
/// `Δ_A Δ_C = g_loc²` and `Δ_A − Δ_C = delta_diff`, both negative, `|Δ_A| > |Δ_C|`.
///
/// Returns `(Δ_A, Δ_C)`.
pub fn resonant_detunings(g_loc: f64, delta_diff: f64) -> Result<(f64, f64)> {
    if !(delta_diff < 0.0) || !delta_diff.is_finite() {
        return Err(Error::DetuningGap(delta_diff));
    }
    if !(g_loc >= 0.0) || !g_loc.is_finite() {
        return Err(Error::InvalidParams(vec![
            "local coupling must be non-negative".into(),
        ]));
    }
    // Δ_C² + d Δ_C − g² = 0, negative root in cancellation-free form.
    let g2 = g_loc * g_loc;
    let delta_c = -2.0 * g2 / (-delta_diff + (delta_diff * delta_diff + 4.0 * g2).sqrt());
    Ok((delta_c + delta_diff, delta_c))
}
