use super::*;
use crate::linres;
use proptest::prelude::*;
use std::f64::consts::FRAC_PI_4;

use super::relative_deviation as oracle_rel;

fn point(kappa: f64, g: f64, da: f64, dc: f64, eta: f64) -> SystemParams {
    SystemParams::default()
        .with_kappa(kappa)
        .with_coupling(g)
        .with_detunings(da, dc)
        .with_eta(eta)
}

/// Single standing-wave mode `g cos z` and its gradient.
fn standing(g: f64, z: f64) -> ([f64; 1], [f64; 1]) {
    ([g * z.cos()], [-g * z.sin()])
}

fn closed(p: &SystemParams, g: &[f64], dg: &[f64]) -> (f64, f64, f64, f64) {
    let sums = CouplingSums::from_modes(g, dg);
    (
        linres::mean_force_closed(p, &sums),
        linres::friction(p, &sums),
        linres::diffusion_dipole(p, &sums),
        linres::atomic_excitation_closed(p, sums.coupling_sq),
    )
}

fn single(p: &SystemParams, g: f64, z: f64) -> OracleOutputs {
    let (c, d) = standing(g, z);
    evaluate(p, &c, &d, HilbertConfig::default()).unwrap()
}

#[test]
fn undriven_system_relaxes_to_vacuum_ground() {
    let p = point(1.0, 3.0, -3.0, -3.0, 0.0);
    let (c, d) = standing(3.0, FRAC_PI_4);
    let l = build_liouvillian(&p, &c, HilbertConfig::default()).unwrap();
    let rho = steady_density(&l).unwrap();
    assert!((rho.0[(0, 0)].re - 1.0).abs() < 1e-14);
    assert!((rho.0.norm() - 1.0).abs() < 1e-14);
    let out = evaluate(&p, &c, &d, HilbertConfig::default()).unwrap();
    assert_eq!(
        (
            out.force.abs() < 1e-15,
            out.friction.abs() < 1e-15,
            out.diffusion.abs() < 1e-15
        ),
        (true, true, true)
    );
}

#[test]
fn generator_preserves_trace() {
    for pump_target in [PumpTarget::Atom, PumpTarget::Cavity] {
        for (n_modes, n_max) in [(1, 3), (2, 2)] {
            let cfg = HilbertConfig {
                n_modes,
                n_max,
                pump_target,
            };
            let g = vec![1.3; n_modes];
            let l = build_liouvillian(&point(0.7, 1.3, -2.0, 1.0, 0.1), &g, cfg).unwrap();
            assert!(l.trace_residual() < 1e-12, "{cfg:?}");
        }
    }
}

#[test]
fn free_space_excitation() {
    let p = point(1.0, 0.0, -2.0, -1.0, 0.01);
    let out = single(&p, 0.0, 0.3);
    let free = p.eta * p.eta / (p.gamma * p.gamma + p.delta_a * p.delta_a);
    assert!(oracle_rel(out.excitation, free) < 1e-3);
}

#[test]
fn steady_state_invariants() {
    let p = point(0.4, 2.0, -1.5, 0.5, 0.05);
    let l = build_liouvillian(
        &p,
        &[1.7],
        HilbertConfig {
            n_max: 5,
            ..Default::default()
        },
    )
    .unwrap();
    let rho = steady_density(&l).unwrap();
    assert!(l.apply(&rho).0.norm() < 1e-10);
    assert!(rho.hermiticity_error() < 1e-12);
    assert!((rho.trace().re - 1.0).abs() < 1e-12);
    assert!(rho.min_eigenvalue() > -1e-10);
}

#[test]
fn headline_point_matches_closed_forms() {
    let p = point(1.0, 3.0, -3.0, -3.0, VERIFY_ETA);
    let (c, d) = standing(3.0, FRAC_PI_4);
    let out = evaluate(&p, &c, &d, HilbertConfig::default()).unwrap();
    let (force, beta, diff, exc) = closed(&p, &c, &d);
    assert!(beta < 0.0 && out.friction < 0.0);
    assert!(
        oracle_rel(out.friction, beta) < 1e-3,
        "{} vs {}",
        out.friction,
        beta
    );
    assert!(
        oracle_rel(out.diffusion, diff) < 1e-2,
        "{} vs {}",
        out.diffusion,
        diff
    );
    assert!(
        oracle_rel(out.force, force) < 1e-3,
        "{} vs {}",
        out.force,
        force
    );
    assert!(
        oracle_rel(out.excitation, exc) < 1e-3,
        "{} vs {}",
        out.excitation,
        exc
    );
}

#[test]
fn hyperbolic_locus_point() {
    let p = point(1.0, 3.0, -3.0, -3.0, VERIFY_ETA);
    let out = single(&p, 3.0, 0.4);
    let (c, d) = standing(3.0, 0.4);
    assert!(out.friction < 0.0);
    assert!(oracle_rel(out.friction, closed(&p, &c, &d).1) < 1e-3);
}

#[test]
fn resonant_drive_has_no_friction() {
    let out = single(&point(1.0, 3.0, 0.0, 0.0, VERIFY_ETA), 3.0, FRAC_PI_4);
    assert!(out.friction.abs() < 1e-12, "{}", out.friction);
}

#[test]
fn resonant_cavity_has_no_mean_force() {
    let p = point(1.0, 3.0, -2.0, 0.0, VERIFY_ETA);
    let out = single(&p, 3.0, FRAC_PI_4);
    assert!(out.force.abs() < 1e-9, "{}", out.force);
    let (c, d) = standing(3.0, FRAC_PI_4);
    let dcl = linres::determinant(&p, c[0] * c[0], 0.0);
    let reduced = 2.0 * p.eta * p.eta * p.kappa * d[0] * d[0] / dcl.norm_sqr();
    assert!(oracle_rel(out.diffusion, reduced) < 1e-2);
}

#[test]
fn two_mode_oracle_matches_multimode_sums() {
    let p = point(0.8, 1.0, -2.0, -1.0, VERIFY_ETA);
    let cfg = HilbertConfig {
        n_modes: 2,
        n_max: 2,
        pump_target: PumpTarget::Atom,
    };
    let (g, dg) = ([1.1, -0.6], [0.4, 0.9]);
    let out = evaluate(&p, &g, &dg, cfg).unwrap();
    let (force, beta, diff, exc) = closed(&p, &g, &dg);
    assert!(oracle_rel(out.friction, beta) < 1e-3);
    assert!(oracle_rel(out.diffusion, diff) < 1e-2);
    assert!(oracle_rel(out.force, force) < 1e-3);
    assert!(oracle_rel(out.excitation, exc) < 1e-3);
    let state = linres::steady_state_modes(&p, &g, &dg).unwrap();
    for (o, c) in out.photons.iter().zip(linres::photon_numbers(&state)) {
        assert!(oracle_rel(*o, c) < 1e-3);
    }
}

#[test]
fn swap_symmetry_reference_point() {
    let p = point(0.1, 0.3, -5.0, -0.5, VERIFY_ETA);
    let (c, d) = standing(0.3, FRAC_PI_4);
    let report = swap_symmetry_check(&p, c[0], d[0]).unwrap();
    assert!(report.relative_deviation < 1e-3, "{report:?}");
    let diff = oracle_rel(report.atom_pumped_oracle, report.cavity_pumped_oracle);
    assert!(diff > 0.05, "{report:?}");
}

#[test]
fn swap_is_identity_at_symmetric_point() {
    let p = point(1.0, 2.0, -2.0, -2.0, VERIFY_ETA);
    let report = swap_symmetry_check(&p, 1.5, -1.2).unwrap();
    assert!(oracle_rel(report.atom_pumped_oracle, report.cavity_pumped_oracle) < 1e-3);
}

#[test]
fn cutoff_robustness() {
    for p in [
        point(1.0, 3.0, -3.0, -3.0, VERIFY_ETA),
        point(0.1, 0.3, -5.0, -0.5, VERIFY_ETA),
        point(10.0, 0.5, 2.0, -4.0, VERIFY_ETA),
    ] {
        for pump_target in [PumpTarget::Atom, PumpTarget::Cavity] {
            let (c, d) = standing(p.g_single, 0.6);
            let run = |n_max| {
                let cfg = HilbertConfig {
                    n_modes: 1,
                    n_max,
                    pump_target,
                };
                evaluate(&p, &c, &d, cfg).unwrap()
            };
            let (a, b) = (run(3), run(4));
            for (x, y) in [
                (a.force, b.force),
                (a.friction, b.friction),
                (a.diffusion, b.diffusion),
                (a.excitation, b.excitation),
                (a.photons[0], b.photons[0]),
            ] {
                assert!(oracle_rel(x, y) < 1e-6, "{x} vs {y}");
            }
        }
    }
}

#[test]
fn rejects_bad_configurations() {
    let p = point(1.0, 3.0, -3.0, -3.0, VERIFY_ETA);
    let big = HilbertConfig {
        n_max: 32,
        ..Default::default()
    };
    assert_eq!(
        build_liouvillian(&p, &[1.0], big).err(),
        Some(Error::HilbertTooLarge { dim: 66 })
    );
    let three = HilbertConfig {
        n_modes: 3,
        n_max: 1,
        ..Default::default()
    };
    assert_eq!(
        build_liouvillian(&p, &[1.0; 3], three).err(),
        Some(Error::ModeCount(3))
    );
    assert_eq!(
        build_liouvillian(&p, &[1.0, 1.0], HilbertConfig::default()).err(),
        Some(Error::ModeCount(2))
    );
    let tiny = HilbertConfig {
        n_max: 1,
        ..Default::default()
    };
    let l = build_liouvillian(&p.with_eta(0.3), &[3.0], tiny).unwrap();
    assert!(matches!(
        steady_density(&l),
        Err(Error::CutoffTooSmall { .. })
    ));
}

#[test]
fn cavity_pump_free_field() {
    let p = point(0.5, 0.0, -1.0, -2.0, VERIFY_ETA);
    let cfg = HilbertConfig {
        pump_target: PumpTarget::Cavity,
        ..Default::default()
    };
    let out = evaluate(&p, &[0.0], &[0.0], cfg).unwrap();
    let free = p.eta * p.eta / (p.kappa * p.kappa + p.delta_c * p.delta_c);
    assert!(oracle_rel(out.photons[0], free) < 1e-10);
    assert!(out.excitation < 1e-20);
}

fn kappa_choice() -> impl Strategy<Value = f64> {
    prop::sample::select(vec![0.1, 1.0, 10.0])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn linearisation_error_scales_as_eta_squared(
        kappa in kappa_choice(),
        g in 0.5f64..3.0,
        da in -5.0f64..5.0,
        dc in -5.0f64..5.0,
        z in 0.2f64..1.3,
    ) {
        let (c, d) = standing(g, z);
        let dev = |eta: f64| {
            let p = point(kappa, g, da, dc, eta);
            let out = evaluate(&p, &c, &d, HilbertConfig::default()).unwrap();
            let (_, beta, _, exc) = closed(&p, &c, &d);
            (oracle_rel(out.friction, beta), oracle_rel(out.excitation, exc))
        };
        let (b1, e1) = dev(VERIFY_ETA);
        let (b2, e2) = dev(2.0 * VERIFY_ETA);
        prop_assert!((3.0..=5.0).contains(&(e2 / e1)), "excitation ratio {}", e2 / e1);
        prop_assert!(b1 < 1e-3 || (3.0..=5.0).contains(&(b2 / b1)), "friction {} -> {}", b1, b2);
    }

    #[test]
    fn density_invariants_hold(
        kappa in kappa_choice(),
        g in 0.0f64..3.0,
        da in -5.0f64..5.0,
        dc in -5.0f64..5.0,
    ) {
        let l = build_liouvillian(&point(kappa, g, da, dc, VERIFY_ETA), &[g], HilbertConfig::default()).unwrap();
        let rho = steady_density(&l).unwrap();
        prop_assert!(rho.hermiticity_error() < 1e-12);
        prop_assert!((rho.trace().re - 1.0).abs() < 1e-12);
        prop_assert!(rho.min_eigenvalue() > -1e-10);
    }
}
