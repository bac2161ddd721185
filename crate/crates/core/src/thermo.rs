//! Wavelength-averaged thermodynamics and the parameter scans built on it.
//!
//! The atom is taken to be uniformly distributed over a wavelength, so the
//! friction and diffusion entering the temperature are plain averages over
//! `[z, z + 2π/k]`. With `β` the force per velocity, the stationary momentum
//! variance of `ṗ = β p/m + ξ` is `m D/(2|β|)`, hence `k_B T = D/(2|β|)` and
//! the momentum variance relaxes at `2|β|/m`, i.e. the cooling time is
//! `τ_c = m/(2|β|)`.

use crate::csv::Table;
use crate::linres::{local_coefficients, LocalCoefficients};
use crate::modes::{effective_coupling, resonant_detunings, LocalCouplingRule, ModeSet};
use crate::par::{try_map_indexed, Exec};
use crate::params::SystemParams;
use crate::{Error, Result};
use std::f64::consts::TAU;

const BASE_PANELS: usize = 256;
const MAX_PANELS: usize = 1024;
const AVERAGE_TOL: f64 = 1e-6;

fn simpson<const K: usize>(samples: &[[f64; K]]) -> [f64; K] {
    let n = samples.len() - 1;
    debug_assert!(n.is_multiple_of(2));
    let mut acc = [0.0; K];
    for (j, s) in samples.iter().enumerate() {
        let w = if j == 0 || j == n {
            1.0
        } else if j % 2 == 1 {
            4.0
        } else {
            2.0
        };
        for k in 0..K {
            acc[k] += w * s[k];
        }
    }
    // (h/3)·Σ / (2π) with h = 2π/n
    acc.map(|a| a / (3.0 * n as f64))
}

fn mean_abs<const K: usize>(samples: &[[f64; K]]) -> [f64; K] {
    let mut acc = [0.0; K];
    for s in &samples[..samples.len() - 1] {
        for k in 0..K {
            acc[k] += s[k].abs();
        }
    }
    acc.map(|a| a / (samples.len() - 1) as f64)
}

/// Average of several quantities over one wavelength starting at `z_center`.
///
/// Composite Simpson on 256 panels, accepted once doubling the panel count
/// changes no component by more than `1e-6` relative (relative to the larger
/// of the average and the mean absolute value, so zero-mean integrands
/// converge too). Gives up after 1024 panels.
pub fn spatial_average_many<const K: usize, F>(f: F, z_center: f64) -> Result<[f64; K]>
where
    F: Fn(f64) -> Result<[f64; K]>,
{
    let mut panels = BASE_PANELS;
    let mut samples = (0..=panels)
        .map(|j| f(z_center + TAU * j as f64 / panels as f64))
        .collect::<Result<Vec<_>>>()?;
    let mut coarse = simpson(&samples);
    loop {
        let fine_panels = 2 * panels;
        let mut fine = Vec::with_capacity(fine_panels + 1);
        for (j, s) in samples.iter().enumerate() {
            fine.push(*s);
            if j < panels {
                fine.push(f(z_center + TAU * (2 * j + 1) as f64 / fine_panels as f64)?);
            }
        }
        samples = fine;
        panels = fine_panels;
        let refined = simpson(&samples);
        let scale = mean_abs(&samples);
        let change = (0..K)
            .map(|k| {
                let s = refined[k].abs().max(scale[k]);
                if s == 0.0 {
                    0.0
                } else {
                    (refined[k] - coarse[k]).abs() / s
                }
            })
            .fold(0.0, f64::max);
        if change <= AVERAGE_TOL {
            return Ok(refined);
        }
        if panels >= MAX_PANELS {
            return Err(Error::Quadrature { panels, change });
        }
        coarse = refined;
    }
}

/// Scalar form of [`spatial_average_many`].
pub fn spatial_average<F>(f: F, z_center: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    spatial_average_many(|z| Ok([f(z)]), z_center).map(|[v]| v)
}

/// `k_B T = D/(2|β|)` in units of `ħγ`.
pub fn temperature(beta_avg: f64, d_avg: f64) -> Result<f64> {
    if !(beta_avg < 0.0) {
        return Err(Error::NoCooling { beta: beta_avg });
    }
    Ok(d_avg / (2.0 * beta_avg.abs()))
}

/// `τ_c = m/(2|β|) = 1/(4 ω_rec |β|)` in units of `1/γ`.
pub fn cooling_time(beta_avg: f64, recoil_freq: f64) -> Result<f64> {
    if !(beta_avg < 0.0) {
        return Err(Error::NoCooling { beta: beta_avg });
    }
    Ok(1.0 / (4.0 * recoil_freq * beta_avg.abs()))
}

/// Spontaneous emissions per cooling time: `2γ⟨σ†σ⟩ τ_c`.
pub fn spontaneous_photon_count(
    excitation_avg: f64,
    beta_avg: f64,
    p: &SystemParams,
) -> Result<f64> {
    Ok(2.0 * p.gamma * excitation_avg * cooling_time(beta_avg, p.recoil_freq)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Cooling,
    Heating,
}

/// Wavelength-averaged coefficients and the quantities derived from them.
/// `temperature`, `cooling_time` and `n_spont` are `None` when heating.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermoReport {
    pub beta_avg: f64,
    pub d_dip_avg: f64,
    pub d_rec_avg: f64,
    /// `d_dip_avg + d_rec_avg`.
    pub d_avg: f64,
    pub force_avg: f64,
    pub excitation_avg: f64,
    pub regime: Regime,
    pub temperature: Option<f64>,
    pub cooling_time: Option<f64>,
    pub n_spont: Option<f64>,
}

impl ThermoReport {
    fn from_averages(p: &SystemParams, avg: LocalCoefficients) -> Self {
        let d_avg = avg.d_dip + avg.d_rec;
        let cooling = avg.beta < 0.0;
        ThermoReport {
            beta_avg: avg.beta,
            d_dip_avg: avg.d_dip,
            d_rec_avg: avg.d_rec,
            d_avg,
            force_avg: avg.f_p,
            excitation_avg: avg.excitation,
            regime: if cooling {
                Regime::Cooling
            } else {
                Regime::Heating
            },
            temperature: temperature(avg.beta, d_avg).ok(),
            cooling_time: cooling_time(avg.beta, p.recoil_freq).ok(),
            n_spont: spontaneous_photon_count(avg.excitation, avg.beta, p).ok(),
        }
    }

    /// Temperature or NaN when heating.
    pub fn temperature_or_nan(&self) -> f64 {
        self.temperature.unwrap_or(f64::NAN)
    }
}

/// Coefficients averaged over `[z_center, z_center + 2π]`.
pub fn average_coefficients(
    p: &SystemParams,
    modes: &ModeSet,
    z_center: f64,
) -> Result<LocalCoefficients> {
    let [f_p, beta, d_dip, d_rec, excitation] = spatial_average_many(
        |z| {
            let c = local_coefficients(p, &modes.coupling_sums(z))?;
            Ok([c.f_p, c.beta, c.d_dip, c.d_rec, c.excitation])
        },
        z_center,
    )?;
    Ok(LocalCoefficients {
        f_p,
        beta,
        d_dip,
        d_rec,
        excitation,
    })
}

pub fn thermo_report(p: &SystemParams, modes: &ModeSet, z_center: f64) -> Result<ThermoReport> {
    Ok(ThermoReport::from_averages(
        p,
        average_coefficients(p, modes, z_center)?,
    ))
}

/// Evenly spaced points `min..=max`, symmetric grids stay exactly symmetric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl Axis {
    pub fn new(min: f64, max: f64, n: usize) -> Self {
        Self { min, max, n }
    }

    pub fn value(&self, i: usize) -> f64 {
        if self.n <= 1 {
            return self.min;
        }
        let last = (self.n - 1) as f64;
        (self.min * (last - i as f64) + self.max * i as f64) / last
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.value(i)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetuningGrid {
    pub delta_a: Axis,
    pub delta_c: Axis,
}

impl Default for DetuningGrid {
    fn default() -> Self {
        Self {
            delta_a: Axis::new(-10.0, 10.0, 101),
            delta_c: Axis::new(-10.0, 10.0, 101),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapNode {
    pub delta_a: f64,
    pub delta_c: f64,
    pub report: ThermoReport,
}

/// Nodes in `(Δ_A index, Δ_C index)` row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct DetuningMap {
    pub grid: DetuningGrid,
    pub nodes: Vec<MapNode>,
}

impl DetuningMap {
    pub fn node(&self, ia: usize, ic: usize) -> &MapNode {
        &self.nodes[ia * self.grid.delta_c.n + ic]
    }

    pub fn to_table(&self) -> Table {
        let mut t = Table::new([
            "delta_a",
            "delta_c",
            "beta",
            "d_dip",
            "d_rec",
            "excitation",
            "temperature",
        ]);
        for n in &self.nodes {
            let r = &n.report;
            t.push(vec![
                n.delta_a.into(),
                n.delta_c.into(),
                r.beta_avg.into(),
                r.d_dip_avg.into(),
                r.d_rec_avg.into(),
                r.excitation_avg.into(),
                r.temperature_or_nan().into(),
            ]);
        }
        t
    }
}

/// Wavelength-averaged report at every `(Δ_A, Δ_C)` node, averaging over the
/// wavelength that starts at `z_center`.
pub fn detuning_map(
    p: &SystemParams,
    modes: &ModeSet,
    grid: DetuningGrid,
    z_center: f64,
    exec: Exec,
) -> Result<DetuningMap> {
    let nc = grid.delta_c.n;
    let nodes = try_map_indexed(exec, grid.delta_a.n * nc, |idx| {
        let (da, dc) = (grid.delta_a.value(idx / nc), grid.delta_c.value(idx % nc));
        let report = thermo_report(&p.with_detunings(da, dc), modes, z_center)?;
        Ok(MapNode {
            delta_a: da,
            delta_c: dc,
            report,
        })
    })?;
    Ok(DetuningMap { grid, nodes })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModesScanRow {
    pub n: usize,
    pub g_eff: f64,
    pub delta_a: f64,
    pub delta_c: f64,
    pub report: ThermoReport,
}

/// Doubling sequence of mode-family sizes: `N = 0, 1, 2, 4, …, 128`.
pub const DOUBLING_N_LIST: [usize; 9] = [0, 1, 2, 4, 8, 16, 32, 64, 128];

/// Effective-mode scan: for each `N` the waist coupling `g_eff(N)` replaces
/// `g_single`, the detunings are re-derived so the lower dressed state stays
/// resonant at an antinode with `Δ_A − Δ_C = delta_diff`, and the report is
/// averaged over the first wavelength.
pub fn modes_scan(
    p: &SystemParams,
    n_list: &[usize],
    delta_diff: f64,
    exec: Exec,
) -> Result<Vec<ModesScanRow>> {
    try_map_indexed(exec, n_list.len(), |i| {
        let n = n_list[i];
        let g_eff = effective_coupling(n, p.g_single);
        let (delta_a, delta_c) = resonant_detunings(g_eff, delta_diff)?;
        let q = p.with_detunings(delta_a, delta_c).with_coupling(g_eff);
        let report = thermo_report(&q, &ModeSet::single_mode(g_eff), 0.0)?;
        Ok(ModesScanRow {
            n,
            g_eff,
            delta_a,
            delta_c,
            report,
        })
    })
}

pub fn modes_scan_table(rows: &[ModesScanRow]) -> Table {
    let mut t = Table::new([
        "N",
        "g_eff",
        "T",
        "N_ph",
        "delta_a",
        "delta_c",
        "beta_avg",
        "d_avg",
        "excitation_avg",
        "cooling_time",
    ]);
    for r in rows {
        let rep = &r.report;
        t.push(vec![
            r.n.into(),
            r.g_eff.into(),
            rep.temperature_or_nan().into(),
            rep.n_spont.unwrap_or(f64::NAN).into(),
            r.delta_a.into(),
            r.delta_c.into(),
            rep.beta_avg.into(),
            rep.d_avg.into(),
            rep.excitation_avg.into(),
            rep.cooling_time.unwrap_or(f64::NAN).into(),
        ]);
    }
    t
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositionRow {
    pub z: f64,
    pub g_loc: f64,
    pub delta_a: f64,
    pub delta_c: f64,
    pub report: ThermoReport,
    /// `T(z)/T(0)`; NaN where the local report is heating.
    pub t_norm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PositionScan {
    pub center: ThermoReport,
    pub rows: Vec<PositionRow>,
}

impl PositionScan {
    pub fn to_table(&self) -> Table {
        let mut t = Table::new([
            "z", "T_norm", "T", "g_loc", "delta_a", "delta_c", "beta_avg", "d_avg",
        ]);
        for r in &self.rows {
            t.push(vec![
                r.z.into(),
                r.t_norm.into(),
                r.report.temperature_or_nan().into(),
                r.g_loc.into(),
                r.delta_a.into(),
                r.delta_c.into(),
                r.report.beta_avg.into(),
                r.report.d_avg.into(),
            ]);
        }
        t
    }

    /// `(z, T_norm)` of the lowest normalised temperature.
    pub fn minimum(&self) -> Option<(f64, f64)> {
        self.rows
            .iter()
            .filter(|r| r.t_norm.is_finite())
            .map(|r| (r.z, r.t_norm))
            .min_by(|a, b| a.1.total_cmp(&b.1))
    }
}

fn retuned_report(
    p: &SystemParams,
    modes: &ModeSet,
    z: f64,
    delta_diff: f64,
    rule: LocalCouplingRule,
) -> Result<(f64, f64, f64, ThermoReport)> {
    let g_loc = modes.local_coupling_by(rule, z);
    let (da, dc) = resonant_detunings(g_loc, delta_diff)?;
    let report = thermo_report(&p.with_detunings(da, dc), modes, z)?;
    Ok((g_loc, da, dc, report))
}

/// Temperature along the axis: at each `z` the detunings are re-derived from
/// the local coupling, coefficients are averaged over the wavelength starting
/// at `z`, and temperatures are normalised to the waist value.
pub fn position_scan(
    p: &SystemParams,
    modes: &ModeSet,
    z_list: &[f64],
    delta_diff: f64,
    rule: LocalCouplingRule,
    exec: Exec,
) -> Result<PositionScan> {
    let (_, _, _, center) = retuned_report(p, modes, 0.0, delta_diff, rule)?;
    let t0 = center.temperature.ok_or(Error::NoCooling {
        beta: center.beta_avg,
    })?;
    let rows = try_map_indexed(exec, z_list.len(), |i| {
        let z = z_list[i];
        let (g_loc, delta_a, delta_c, report) = retuned_report(p, modes, z, delta_diff, rule)?;
        Ok(PositionRow {
            z,
            g_loc,
            delta_a,
            delta_c,
            report,
            t_norm: report.temperature.map_or(f64::NAN, |t| t / t0),
        })
    })?;
    Ok(PositionScan { center, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn headline() -> SystemParams {
        SystemParams::default()
    }

    /// Plain composite Simpson with a fixed panel count.
    fn simpson_reference(f: impl Fn(f64) -> f64, panels: usize) -> f64 {
        let h = TAU / panels as f64;
        let mut s = f(0.0) + f(TAU);
        for j in 1..panels {
            s += if j % 2 == 1 { 4.0 } else { 2.0 } * f(h * j as f64);
        }
        s * h / 3.0 / TAU
    }

    #[test]
    fn averages_of_simple_functions() {
        assert_relative_eq!(
            spatial_average(|_| 2.5, 0.3).unwrap(),
            2.5,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            spatial_average(|z| z.sin().powi(2), 0.0).unwrap(),
            0.5,
            max_relative = 1e-12
        );
        assert!(spatial_average(|z| z.sin(), 0.0).unwrap().abs() < 1e-14);
    }

    #[test]
    fn rough_integrand_fails_to_converge() {
        let err = spatial_average(|z| (z - 3.0).abs().sqrt(), 0.0).unwrap_err();
        assert!(matches!(err, Error::Quadrature { panels: 1024, .. }));
    }

    #[test]
    fn averaged_friction_matches_fine_reference() {
        let p = headline();
        let ms = ModeSet::single_mode(3.0);
        let avg = average_coefficients(&p, &ms, 0.0).unwrap().beta;
        let reference =
            simpson_reference(|z| crate::linres::friction(&p, &ms.coupling_sums(z)), 2048);
        assert_relative_eq!(avg, reference, max_relative = 1e-6);
    }

    #[test]
    fn temperature_contract() {
        assert_eq!(temperature(-0.5, 1.0).unwrap(), 1.0);
        assert!(matches!(
            temperature(0.0, 1.0),
            Err(Error::NoCooling { .. })
        ));
        assert!(temperature(0.3, 1.0).is_err());
    }

    #[test]
    fn photon_count_contract() {
        let p = headline();
        assert_eq!(spontaneous_photon_count(0.0, -0.2, &p).unwrap(), 0.0);
        let light = SystemParams {
            recoil_freq: 2.0 * p.recoil_freq,
            ..p
        };
        let a = spontaneous_photon_count(0.01, -0.2, &p).unwrap();
        let b = spontaneous_photon_count(0.01, -0.2, &light).unwrap();
        assert_relative_eq!(b, a / 2.0, max_relative = 1e-15);
        assert!(spontaneous_photon_count(0.01, 0.2, &p).is_err());
    }

    #[test]
    fn heating_is_flagged_not_negative() {
        let p = headline().with_detunings(3.0, 3.0);
        let r = thermo_report(&p, &ModeSet::single_mode(3.0), 0.0).unwrap();
        assert_eq!(r.regime, Regime::Heating);
        assert!(r.temperature.is_none() && r.n_spont.is_none());
    }

    #[test]
    fn temperature_independent_of_pump() {
        let ms = ModeSet::single_mode(3.0);
        let a = thermo_report(&headline(), &ms, 0.0).unwrap();
        let b = thermo_report(&headline().with_eta(0.02), &ms, 0.0).unwrap();
        assert_eq!(a.regime, Regime::Cooling);
        assert_relative_eq!(
            a.temperature.unwrap(),
            b.temperature.unwrap(),
            max_relative = 1e-10
        );
        assert_relative_eq!(a.n_spont.unwrap(), b.n_spont.unwrap(), max_relative = 1e-10);
    }

    #[test]
    fn symmetric_axis_is_exact() {
        let ax = Axis::new(-10.0, 10.0, 101);
        for i in 0..101 {
            assert_eq!(ax.value(i), -ax.value(100 - i));
        }
        assert_eq!(ax.value(50), 0.0);
    }

    #[test]
    fn map_is_antisymmetric_and_order_independent() {
        let p = headline().with_kappa(10.0).with_coupling(0.5);
        let ms = ModeSet::single_mode(0.5);
        let grid = DetuningGrid {
            delta_a: Axis::new(-6.0, 6.0, 7),
            delta_c: Axis::new(-6.0, 6.0, 5),
        };
        let map = detuning_map(&p, &ms, grid, 0.0, Exec::Parallel).unwrap();
        let seq = detuning_map(&p, &ms, grid, 0.0, Exec::Sequential).unwrap();
        assert_eq!(map, seq);
        for ia in 0..7 {
            for ic in 0..5 {
                let a = map.node(ia, ic).report.beta_avg;
                let b = map.node(6 - ia, 4 - ic).report.beta_avg;
                assert!((a + b).abs() <= 1e-10 * a.abs().max(1e-300));
            }
        }
    }

    #[test]
    fn single_mode_scan_is_direct_computation() {
        let p = headline();
        let rows = modes_scan(&p, &[0], -50.0, Exec::Sequential).unwrap();
        let (da, dc) = resonant_detunings(3.0, -50.0).unwrap();
        let direct =
            thermo_report(&p.with_detunings(da, dc), &ModeSet::single_mode(3.0), 0.0).unwrap();
        assert_eq!(rows[0].report, direct);
        assert_eq!(rows[0].g_eff, 3.0);
    }

    #[test]
    fn position_scan_is_normalised_at_center() {
        let p = headline().with_kappa(0.1).with_coupling(0.3);
        let ms = ModeSet::new(2, 0.3, 2.0 * PI * 1e3, true).unwrap();
        let scan = position_scan(
            &p,
            &ms,
            &[0.0, 50.0],
            -50.0,
            LocalCouplingRule::Envelope,
            Exec::default(),
        )
        .unwrap();
        assert_eq!(scan.rows[0].t_norm, 1.0);
        assert!(scan.rows[1].t_norm.is_finite());
    }
}
