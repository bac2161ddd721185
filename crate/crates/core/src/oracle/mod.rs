//! Independent check of the closed forms: the full two-level atom coupled to
//! one or two truncated Fock modes, with Lindblad damping at amplitude rates
//! `γ` (atom) and `κ` (each mode).
//!
//! - friction: expand `ρ = ρ₀(z) + v ρ₁` in `dρ/dt = L(z)ρ` with
//!   `d/dt = v ∂_z`; then `L ρ₁ = ∂_z ρ₀` and `β = Tr(F ρ₁)`.
//! - diffusion: zero-frequency force-noise spectral density from the
//!   regression theorem, `D = 2 Re Tr[F (−L)⁻¹ (Fρ₀ − ⟨F⟩ρ₀)]`.
//!
//! Both solves live on the traceless subspace; the singular generator is
//! made invertible by replacing the `(0,0)` population equation with the
//! trace constraint.
//!
//! Superoperators act on column-stacked density matrices,
//! `vec(AρB) = (Bᵀ ⊗ A) vec(ρ)`.

mod space;

pub use space::FockSpace;

use crate::linres;
use crate::modes::CouplingSums;
use crate::params::SystemParams;
use crate::{Error, Result, C64};
use nalgebra::{DMatrix, DVector, Dyn, LU};

/// Largest admissible Hilbert-space dimension.
pub const MAX_DIM: usize = 64;
/// Pump strength used for comparisons with the linearised closed forms.
pub const VERIFY_ETA: f64 = 0.01;

const CUTOFF_POPULATION: f64 = 1e-6;
const MAX_CONDITION: f64 = 1e14;
const MAX_RESIDUAL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PumpTarget {
    #[default]
    Atom,
    /// Every mode is driven with the same amplitude `η`.
    Cavity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HilbertConfig {
    pub n_modes: usize,
    pub n_max: usize,
    pub pump_target: PumpTarget,
}

impl Default for HilbertConfig {
    fn default() -> Self {
        Self {
            n_modes: 1,
            n_max: 3,
            pump_target: PumpTarget::Atom,
        }
    }
}

impl HilbertConfig {
    pub fn dim(&self) -> usize {
        2 * (self.n_max + 1).pow(self.n_modes as u32)
    }

    fn check(&self) -> Result<()> {
        if !(1..=2).contains(&self.n_modes) {
            return Err(Error::ModeCount(self.n_modes));
        }
        if self.dim() > MAX_DIM {
            return Err(Error::HilbertTooLarge { dim: self.dim() });
        }
        Ok(())
    }
}

/// Density matrix on the truncated atom ⊗ Fock space. Also used for
/// traceless first-order corrections.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator(pub DMatrix<C64>);

impl DensityOperator {
    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    /// `Tr(A ρ)`.
    pub fn expectation(&self, op: &DMatrix<C64>) -> C64 {
        (op * &self.0).trace()
    }

    /// Largest entry of `|ρ − ρ†|`.
    pub fn hermiticity_error(&self) -> f64 {
        (&self.0 - self.0.adjoint()).camax()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (&self.0 + self.0.adjoint()) * C64::new(0.5, 0.0);
        herm.symmetric_eigenvalues().min()
    }

    fn vectorized(&self) -> DVector<C64> {
        DVector::from_column_slice(self.0.as_slice())
    }

    fn from_vector(v: &DVector<C64>, dim: usize) -> Self {
        DensityOperator(DMatrix::from_column_slice(dim, dim, v.as_slice()))
    }
}

/// Generator `L(z)` with its coupling derivatives `∂L/∂g_i`, factorised for
/// repeated traceless solves.
pub struct Liouvillian {
    pub space: FockSpace,
    pub matrix: DMatrix<C64>,
    /// `∂L/∂g_i`: the generator is linear in each coupling.
    pub coupling_generators: Vec<DMatrix<C64>>,
    augmented: LU<C64, Dyn, Dyn>,
    condition: f64,
}

fn hamiltonian_superop(h: &DMatrix<C64>) -> DMatrix<C64> {
    let id = DMatrix::<C64>::identity(h.nrows(), h.ncols());
    (id.kronecker(h) - h.transpose().kronecker(&id)) * C64::new(0.0, -1.0)
}

/// `r (2 c ρ c† − c†c ρ − ρ c†c)`.
fn dissipator_superop(c: &DMatrix<C64>, rate: f64) -> DMatrix<C64> {
    let id = DMatrix::<C64>::identity(c.nrows(), c.ncols());
    let cdc = c.adjoint() * c;
    (c.conjugate().kronecker(c) * C64::new(2.0, 0.0)
        - id.kronecker(&cdc)
        - cdc.transpose().kronecker(&id))
        * C64::new(rate, 0.0)
}

/// Builds the generator for couplings `g_i(z)` (one per oracle mode).
pub fn build_liouvillian(
    p: &SystemParams,
    couplings: &[f64],
    config: HilbertConfig,
) -> Result<Liouvillian> {
    config.check()?;
    if couplings.len() != config.n_modes {
        return Err(Error::ModeCount(couplings.len()));
    }
    let space = FockSpace::new(config.n_modes, config.n_max);
    let sigma = space.sigma();
    let sigma_dag = sigma.adjoint();
    let modes: Vec<_> = (0..config.n_modes).map(|i| space.annihilation(i)).collect();
    let i_unit = C64::new(0.0, 1.0);

    let mut h0 = &sigma_dag * &sigma * C64::new(-p.delta_a, 0.0);
    for a in &modes {
        h0 += a.adjoint() * a * C64::new(-p.delta_c, 0.0);
    }
    let drive = |x: &DMatrix<C64>| (x - x.adjoint()) * (-i_unit * p.eta);
    match config.pump_target {
        PumpTarget::Atom => h0 += drive(&sigma),
        PumpTarget::Cavity => {
            for a in &modes {
                h0 += drive(a);
            }
        }
    }
    let couplers: Vec<DMatrix<C64>> = modes
        .iter()
        .map(|a| (&sigma_dag * a - a.adjoint() * &sigma) * -i_unit)
        .collect();

    let mut matrix = hamiltonian_superop(&h0) + dissipator_superop(&sigma, p.gamma);
    for a in &modes {
        matrix += dissipator_superop(a, p.kappa);
    }
    let coupling_generators: Vec<_> = couplers.iter().map(hamiltonian_superop).collect();
    for (g, gen) in couplings.iter().zip(&coupling_generators) {
        matrix += gen * C64::new(*g, 0.0);
    }

    let dim = space.dim();
    let mut aug = matrix.clone();
    aug.row_mut(0).fill(C64::new(0.0, 0.0));
    for j in 0..dim {
        aug[(0, j * dim + j)] = C64::new(1.0, 0.0);
    }
    let augmented = aug.lu();
    let diag = augmented.u().diagonal().map(|u| u.norm());
    let condition = if diag.min() == 0.0 {
        f64::INFINITY
    } else {
        diag.max() / diag.min()
    };
    Ok(Liouvillian {
        space,
        matrix,
        coupling_generators,
        augmented,
        condition,
    })
}

impl Liouvillian {
    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// Pivot-ratio estimate of the augmented system's condition number.
    pub fn condition_estimate(&self) -> f64 {
        self.condition
    }

    pub fn apply(&self, rho: &DensityOperator) -> DensityOperator {
        DensityOperator::from_vector(&(&self.matrix * rho.vectorized()), self.dim())
    }

    /// Largest column sum of `vec(1)† L`; zero for a trace-preserving generator.
    pub fn trace_residual(&self) -> f64 {
        let dim = self.dim();
        (0..dim * dim)
            .map(|col| {
                (0..dim)
                    .map(|j| self.matrix[(j * dim + j, col)])
                    .sum::<C64>()
                    .norm()
            })
            .fold(0.0, f64::max)
    }

    /// `∂_z L = Σ ∂_z g_i · ∂L/∂g_i`.
    pub fn z_derivative(&self, gradients: &[f64]) -> DMatrix<C64> {
        let n = self.matrix.nrows();
        let mut out = DMatrix::zeros(n, n);
        for (dg, gen) in gradients.iter().zip(&self.coupling_generators) {
            out += gen * C64::new(*dg, 0.0);
        }
        out
    }

    /// Solves `L x = rhs` subject to `Tr x = trace`.
    fn solve_constrained(&self, rhs: &DVector<C64>, trace: C64) -> Result<DVector<C64>> {
        if self.condition > MAX_CONDITION {
            return Err(Error::IllConditioned {
                condition: self.condition,
                residual: f64::NAN,
            });
        }
        let mut b = rhs.clone();
        b[0] = trace;
        let x = self.augmented.solve(&b).ok_or(Error::DegenerateKernel)?;
        let residual = (&self.matrix * &x - rhs).norm();
        let scale = rhs.norm() + x.norm() * self.matrix.norm();
        if residual > MAX_RESIDUAL * scale.max(1.0) {
            return Err(Error::IllConditioned {
                condition: self.condition,
                residual,
            });
        }
        Ok(x)
    }

    /// Solves `L x = rhs` on the traceless subspace (`Tr rhs` must vanish).
    pub fn solve_traceless(&self, rhs: &DensityOperator) -> Result<DensityOperator> {
        let x = self.solve_constrained(&rhs.vectorized(), C64::new(0.0, 0.0))?;
        Ok(DensityOperator::from_vector(&x, self.dim()))
    }
}

/// Unique steady state, Hermitised and trace-normalised.
pub fn steady_density(l: &Liouvillian) -> Result<DensityOperator> {
    let dim = l.dim();
    let x = l.solve_constrained(&DVector::zeros(dim * dim), C64::new(1.0, 0.0))?;
    let raw = DMatrix::from_column_slice(dim, dim, x.as_slice());
    let mut rho = (&raw + raw.adjoint()) * C64::new(0.5, 0.0);
    let tr = rho.trace();
    rho /= tr;
    let rho = DensityOperator(rho);
    let residual = l.apply(&rho).0.norm();
    if residual > MAX_RESIDUAL {
        return Err(Error::IllConditioned {
            condition: l.condition,
            residual,
        });
    }
    let top = l.space.top_fock_population(&rho.0);
    if top > CUTOFF_POPULATION {
        return Err(Error::CutoffTooSmall { population: top });
    }
    Ok(rho)
}

/// `F = i Σ ∂_z g_i (σ†a_i − a_i†σ)` for real mode functions.
pub fn force_operator(space: &FockSpace, gradients: &[f64]) -> DMatrix<C64> {
    let sigma = space.sigma();
    let mut f = DMatrix::zeros(space.dim(), space.dim());
    for (i, dg) in gradients.iter().enumerate() {
        let a = space.annihilation(i);
        f += (sigma.adjoint() * &a - a.adjoint() * &sigma) * C64::new(0.0, *dg);
    }
    f
}

/// `Tr(F ρ)`.
pub fn oracle_force(rho: &DensityOperator, force: &DMatrix<C64>) -> f64 {
    rho.expectation(force).re
}

/// Velocity-expansion friction `Tr(F ρ₁)` with `L ρ₁ = ∂_z ρ₀`.
pub fn oracle_friction(l: &Liouvillian, rho0: &DensityOperator, gradients: &[f64]) -> Result<f64> {
    let dl = l.z_derivative(gradients);
    let source = DensityOperator::from_vector(&(-(dl * rho0.vectorized())), l.dim());
    let drho0 = l.solve_traceless(&source)?;
    let rho1 = l.solve_traceless(&drho0)?;
    Ok(oracle_force(&rho1, &force_operator(&l.space, gradients)))
}

/// Regression-theorem diffusion `2 Re Tr[F (−L)⁻¹ (Fρ₀ − ⟨F⟩ρ₀)]`.
pub fn oracle_diffusion(
    l: &Liouvillian,
    rho0: &DensityOperator,
    force: &DMatrix<C64>,
) -> Result<f64> {
    let mean = rho0.expectation(force);
    let fluct = force * &rho0.0 - &rho0.0 * mean;
    let y = l.solve_traceless(&DensityOperator(-fluct))?;
    Ok(2.0 * y.expectation(force).re)
}

/// Everything the oracle computes at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleOutputs {
    pub force: f64,
    pub friction: f64,
    pub diffusion: f64,
    pub excitation: f64,
    pub photons: Vec<f64>,
}

pub fn evaluate(
    p: &SystemParams,
    couplings: &[f64],
    gradients: &[f64],
    config: HilbertConfig,
) -> Result<OracleOutputs> {
    let l = build_liouvillian(p, couplings, config)?;
    let rho = steady_density(&l)?;
    let force_op = force_operator(&l.space, gradients);
    let sigma = l.space.sigma();
    Ok(OracleOutputs {
        force: oracle_force(&rho, &force_op),
        friction: oracle_friction(&l, &rho, gradients)?,
        diffusion: oracle_diffusion(&l, &rho, &force_op)?,
        excitation: rho.expectation(&(sigma.adjoint() * &sigma)).re,
        photons: (0..config.n_modes)
            .map(|i| {
                let a = l.space.annihilation(i);
                rho.expectation(&(a.adjoint() * a)).re
            })
            .collect(),
    })
}

/// Cavity-pumped oracle friction against the atom-pumped closed form with
/// `(Δ_A, γ) ↔ (Δ_C, κ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwapReport {
    pub cavity_pumped_oracle: f64,
    pub swapped_closed_form: f64,
    pub atom_pumped_oracle: f64,
    pub relative_deviation: f64,
}

/// Single-mode swap-symmetry comparison at coupling `g` and gradient `dg`.
pub fn swap_symmetry_check(p: &SystemParams, g: f64, dg: f64) -> Result<SwapReport> {
    let cfg = |pump_target| HilbertConfig {
        pump_target,
        ..HilbertConfig::default()
    };
    let cavity = evaluate(p, &[g], &[dg], cfg(PumpTarget::Cavity))?.friction;
    let atom = evaluate(p, &[g], &[dg], cfg(PumpTarget::Atom))?.friction;
    let swapped = linres::friction(&p.swapped(), &CouplingSums::from_modes(&[g], &[dg]));
    Ok(SwapReport {
        cavity_pumped_oracle: cavity,
        swapped_closed_form: swapped,
        atom_pumped_oracle: atom,
        relative_deviation: relative_deviation(cavity, swapped),
    })
}

/// `|a − b| / |b|`, or `|a − b|` when `b` is exactly zero.
pub fn relative_deviation(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        (a - b).abs()
    } else {
        ((a - b) / b).abs()
    }
}

#[cfg(test)]
mod tests;
