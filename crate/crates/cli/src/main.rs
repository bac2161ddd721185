use cavity_cooling::cmsim::{self, TrajectoryConfig};
use cavity_cooling::csv::{Cell, Table};
use cavity_cooling::linres;
use cavity_cooling::modes::LocalCouplingRule;
use cavity_cooling::par::Exec;
use cavity_cooling::params::{parse_config, RunConfig};
use cavity_cooling::thermo::{self, Axis, DetuningGrid, DOUBLING_N_LIST};
use cavity_cooling::verify;
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

mod manifest;

use manifest::Manifest;

#[derive(Parser, Debug)]
#[command(
    name = "cavcool",
    version,
    about = "Cavity cooling of a driven atom: coefficients, scans, trajectories"
)]
struct Cli {
    /// `key = value` configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output CSV (stdout when omitted).
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Override one configuration key; repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Local coefficients at one position and the wavelength-averaged report.
    Coeffs {
        /// Axial position `kz`.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        z: f64,
    },
    /// Averaged friction, diffusion and temperature over a detuning grid.
    Map(MapArgs),
    /// Temperature and photon budget against the mode-family size.
    ModesScan {
        /// Comma-separated list of `N`.
        #[arg(long, value_delimiter = ',', default_values_t = DOUBLING_N_LIST)]
        n_list: Vec<usize>,
        /// `Δ_A − Δ_C`, held fixed while the detunings are re-tuned.
        #[arg(long, default_value_t = -50.0, allow_negative_numbers = true)]
        delta_diff: f64,
    },
    /// Normalised temperature along the cavity axis.
    PositionScan {
        /// Largest `kz`; defaults to twice `π·l_cav/(4(2N+1))` with `l_cav = 2 z₀`.
        #[arg(long)]
        z_max: Option<f64>,
        #[arg(long, default_value_t = 81)]
        n_points: usize,
        #[arg(long, default_value_t = -50.0, allow_negative_numbers = true)]
        delta_diff: f64,
        #[arg(long, value_enum, default_value_t = Rule::Envelope)]
        rule: Rule,
    },
    /// Stochastic centre-of-mass trajectories (`simulate.*` keys).
    Simulate,
    /// Closed forms against the Liouvillian oracle.
    Verify,
}

#[derive(Args, Debug)]
struct MapArgs {
    #[arg(long, default_value_t = -10.0, allow_negative_numbers = true)]
    da_min: f64,
    #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
    da_max: f64,
    #[arg(long, default_value_t = 101)]
    da_n: usize,
    #[arg(long, default_value_t = -10.0, allow_negative_numbers = true)]
    dc_min: f64,
    #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
    dc_max: f64,
    #[arg(long, default_value_t = 101)]
    dc_n: usize,
    /// Start of the averaging wavelength.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    z_center: f64,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Rule {
    Envelope,
    MaxOverWavelength,
}

impl From<Rule> for LocalCouplingRule {
    fn from(r: Rule) -> Self {
        match r {
            Rule::Envelope => LocalCouplingRule::Envelope,
            Rule::MaxOverWavelength => LocalCouplingRule::MaxOverWavelength,
        }
    }
}

enum Failure {
    Invalid(String),
    Verification,
}

impl From<cavity_cooling::Error> for Failure {
    fn from(e: cavity_cooling::Error) -> Self {
        Failure::Invalid(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Invalid(format!("i/o error: {e}"))
    }
}

fn load_config(cli: &Cli) -> Result<RunConfig, Failure> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::Invalid(format!("cannot read {}: {e}", path.display())))?;
            parse_config(&text)?
        }
        None => RunConfig::default(),
    };
    for pair in &cli.set {
        cfg.set_pair(pair)?;
    }
    cfg.params = cfg.params.validate()?;
    Ok(cfg)
}

/// Writes `table` to `out` via a `.partial` sibling renamed on success, or
/// to stdout.
fn emit(out: Option<&Path>, table: &Table, manifest: &Manifest) -> Result<(), Failure> {
    let comments = manifest.lines();
    match out {
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            table.write(&mut lock, &comments)?;
            lock.flush()?;
        }
        Some(path) => {
            let mut partial = path.as_os_str().to_owned();
            partial.push(".partial");
            let partial = PathBuf::from(partial);
            let result = fs::File::create(&partial).and_then(|f| {
                let mut w = io::BufWriter::new(f);
                table.write(&mut w, &comments)?;
                w.into_inner().map_err(|e| e.into_error())?.sync_all()
            });
            if let Err(e) = result.and_then(|_| fs::rename(&partial, path)) {
                let _ = fs::remove_file(&partial);
                return Err(e.into());
            }
        }
    }
    Ok(())
}

fn key_value_table(pairs: Vec<(&str, f64)>) -> Table {
    let mut t = Table::new(["quantity", "value"]);
    for (k, v) in pairs {
        t.push(vec![Cell::Text(k.to_string()), v.into()]);
    }
    t
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let cfg = load_config(cli)?;
    let p = cfg.params;
    let exec = Exec::default();
    let mut manifest = Manifest::new(subcommand_name(&cli.command), &cfg, cli.out.as_deref());

    let table = match &cli.command {
        Command::Coeffs { z } => {
            manifest.arg("z", z);
            let modes = cfg.mode_set()?;
            let c = linres::motion_coefficients(&p, &modes, *z)?;
            let r = thermo::thermo_report(&p, &modes, 0.0)?;
            let mut pairs = vec![
                ("f_p", c.f_p),
                ("beta", c.beta),
                ("d_dip", c.d_dip),
                ("d_rec", c.d_rec),
                ("excitation", c.excitation),
            ];
            let photons: f64 = c.photons.iter().sum();
            pairs.push(("photons_total", photons));
            pairs.extend([
                ("beta_avg", r.beta_avg),
                ("d_dip_avg", r.d_dip_avg),
                ("d_rec_avg", r.d_rec_avg),
                ("d_avg", r.d_avg),
                ("excitation_avg", r.excitation_avg),
                ("temperature", r.temperature_or_nan()),
                ("cooling_time", r.cooling_time.unwrap_or(f64::NAN)),
                ("n_spont", r.n_spont.unwrap_or(f64::NAN)),
            ]);
            manifest.note(format!("regime: {:?}", r.regime).to_lowercase());
            key_value_table(pairs)
        }
        Command::Map(a) => {
            for (k, v) in [
                ("da_min", a.da_min),
                ("da_max", a.da_max),
                ("dc_min", a.dc_min),
                ("dc_max", a.dc_max),
                ("z_center", a.z_center),
            ] {
                manifest.arg(k, &v);
            }
            manifest.arg("da_n", &a.da_n);
            manifest.arg("dc_n", &a.dc_n);
            if a.da_n == 0 || a.dc_n == 0 {
                return Err(Failure::Invalid("grid sizes must be positive".into()));
            }
            let grid = DetuningGrid {
                delta_a: Axis::new(a.da_min, a.da_max, a.da_n),
                delta_c: Axis::new(a.dc_min, a.dc_max, a.dc_n),
            };
            thermo::detuning_map(&p, &cfg.mode_set()?, grid, a.z_center, exec)?.to_table()
        }
        Command::ModesScan { n_list, delta_diff } => {
            manifest.arg(
                "n_list",
                &n_list
                    .iter()
                    .map(|n| n.to_string())
                    .collect::<Vec<_>>()
                    .join(","),
            );
            manifest.arg("delta_diff", delta_diff);
            thermo::modes_scan_table(&thermo::modes_scan(&p, n_list, *delta_diff, exec)?)
        }
        Command::PositionScan {
            z_max,
            n_points,
            delta_diff,
            rule,
        } => {
            let modes = cfg.mode_set()?;
            let order = (2 * modes.n_index_max() + 1) as f64;
            let z_max = z_max
                .unwrap_or(2.0 * std::f64::consts::PI * 2.0 * modes.gouy_scale() / (4.0 * order));
            if *n_points < 2 || !(z_max > 0.0 && z_max.is_finite()) {
                return Err(Failure::Invalid(
                    "position scan needs n_points >= 2 and a positive finite z_max".into(),
                ));
            }
            manifest.arg("z_max", &z_max);
            manifest.arg("n_points", n_points);
            manifest.arg("delta_diff", delta_diff);
            manifest.arg("rule", &format!("{rule:?}").to_lowercase());
            let z_list: Vec<f64> = (0..*n_points)
                .map(|i| z_max * i as f64 / (*n_points - 1) as f64)
                .collect();
            thermo::position_scan(&p, &modes, &z_list, *delta_diff, (*rule).into(), exec)?
                .to_table()
        }
        Command::Simulate => {
            let modes = cfg.mode_set()?;
            let tc = TrajectoryConfig::from_settings(&cfg.simulate, &p, &modes)?;
            let stats = cmsim::simulate(&tc, &p, &modes, exec)?;
            manifest.note(format!(
                "temperature: {} +- {}",
                cavity_cooling::csv::format_float(stats.temperature),
                cavity_cooling::csv::format_float(stats.temperature_stderr)
            ));
            if stats.below_recoil_floor {
                manifest.note(
                    "warning: temperature below 10 T_rec, outside semiclassical validity".into(),
                );
            }
            match cmsim::cooling_curve(&stats) {
                Ok(fit) => manifest.note(format!(
                    "cooling_rate: {}",
                    cavity_cooling::csv::format_float(fit.rate)
                )),
                Err(e) => manifest.note(format!("cooling_rate: {e}")),
            }
            stats.to_table()
        }
        Command::Verify => {
            let checks = verify::run_checks(&p)?;
            emit(cli.out.as_deref(), &checks.to_table(), &manifest)?;
            for c in checks.checks.iter().filter(|c| !c.pass()) {
                eprintln!(
                    "verification failed: {} (rel_dev {:e}, tol {:e})",
                    c.name, c.rel_dev, c.tol
                );
            }
            return if checks.all_pass() {
                Ok(())
            } else {
                Err(Failure::Verification)
            };
        }
    };
    emit(cli.out.as_deref(), &table, &manifest)
}

fn subcommand_name(c: &Command) -> &'static str {
    match c {
        Command::Coeffs { .. } => "coeffs",
        Command::Map(_) => "map",
        Command::ModesScan { .. } => "modes-scan",
        Command::PositionScan { .. } => "position-scan",
        Command::Simulate => "simulate",
        Command::Verify => "verify",
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Verification) => ExitCode::from(2),
    }
}
