//! Closed forms against the Liouvillian oracle, as a pass/fail table.

use crate::csv::{Cell, Table};
use crate::linres;
use crate::modes::CouplingSums;
use crate::oracle::{self, relative_deviation, HilbertConfig, PumpTarget, VERIFY_ETA};
use crate::params::SystemParams;
use crate::Result;
use std::f64::consts::FRAC_PI_4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Comparison {
    /// Pass when the relative deviation is below the tolerance.
    Agree,
    /// Pass when the relative deviation exceeds the tolerance.
    Differ,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub reference: f64,
    pub rel_dev: f64,
    pub tol: f64,
    pub comparison: Comparison,
}

impl Check {
    pub fn new(name: &str, value: f64, reference: f64, tol: f64, comparison: Comparison) -> Self {
        Self {
            name: name.to_string(),
            value,
            reference,
            rel_dev: relative_deviation(value, reference),
            tol,
            comparison,
        }
    }

    pub fn pass(&self) -> bool {
        match self.comparison {
            Comparison::Agree => self.rel_dev < self.tol,
            Comparison::Differ => self.rel_dev > self.tol,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CheckTable {
    pub checks: Vec<Check>,
}

impl CheckTable {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(Check::pass)
    }

    pub fn to_table(&self) -> Table {
        let mut t = Table::new(["check", "value", "reference", "rel_dev", "tol", "pass"]);
        for c in &self.checks {
            t.push(vec![
                Cell::Text(c.name.clone()),
                c.value.into(),
                c.reference.into(),
                c.rel_dev.into(),
                c.tol.into(),
                Cell::Text(if c.pass() { "true" } else { "false" }.into()),
            ]);
        }
        t
    }
}

/// Reference point of the swap-symmetry checks: a good cavity with the pump
/// far from the atomic resonance.
pub fn swap_reference_params() -> SystemParams {
    SystemParams::default()
        .with_kappa(0.1)
        .with_coupling(0.3)
        .with_detunings(-5.0, -0.5)
        .with_eta(VERIFY_ETA)
}

/// Runs the oracle suite for a single standing-wave mode `g cos z` at
/// `z = π/4`, using the detunings, `κ` and `g` of `p` and the verification
/// pump `η = 0.01γ`; then the fixed swap-symmetry and cutoff checks.
pub fn run_checks(p: &SystemParams) -> Result<CheckTable> {
    let p = p.with_eta(VERIFY_ETA).validate()?;
    let z = FRAC_PI_4;
    let (g, dg) = (p.g_single * z.cos(), -p.g_single * z.sin());
    let sums = CouplingSums::from_modes(&[g], &[dg]);
    let out = oracle::evaluate(&p, &[g], &[dg], HilbertConfig::default())?;
    let agree = Comparison::Agree;

    let mut checks = vec![
        Check::new(
            "friction",
            out.friction,
            linres::friction(&p, &sums),
            1e-3,
            agree,
        ),
        Check::new(
            "diffusion",
            out.diffusion,
            linres::diffusion_dipole(&p, &sums),
            1e-2,
            agree,
        ),
        Check::new(
            "mean_force",
            out.force,
            linres::mean_force_closed(&p, &sums),
            1e-3,
            agree,
        ),
        Check::new(
            "excitation",
            out.excitation,
            linres::atomic_excitation_closed(&p, sums.coupling_sq),
            1e-3,
            agree,
        ),
    ];

    let finer = oracle::evaluate(
        &p,
        &[g],
        &[dg],
        HilbertConfig {
            n_max: 4,
            ..HilbertConfig::default()
        },
    )?;
    checks.push(Check::new(
        "cutoff_friction",
        out.friction,
        finer.friction,
        1e-6,
        agree,
    ));
    checks.push(Check::new(
        "cutoff_diffusion",
        out.diffusion,
        finer.diffusion,
        1e-6,
        agree,
    ));

    let q = swap_reference_params();
    let (gq, dgq) = (q.g_single * z.cos(), -q.g_single * z.sin());
    let swap = oracle::swap_symmetry_check(&q, gq, dgq)?;
    checks.push(Check::new(
        "swap_symmetry",
        swap.cavity_pumped_oracle,
        swap.swapped_closed_form,
        1e-3,
        agree,
    ));
    checks.push(Check::new(
        "pump_target_differs",
        swap.atom_pumped_oracle,
        swap.cavity_pumped_oracle,
        0.05,
        Comparison::Differ,
    ));

    let cavity_pumped = oracle::evaluate(
        &p,
        &[g],
        &[dg],
        HilbertConfig {
            pump_target: PumpTarget::Cavity,
            ..HilbertConfig::default()
        },
    )?;
    checks.push(Check::new(
        "swap_symmetry_user_point",
        cavity_pumped.friction,
        linres::friction(&p.swapped(), &sums),
        1e-3,
        agree,
    ));
    Ok(CheckTable { checks })
}
