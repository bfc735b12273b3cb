//! Command-line front end. `run` returns the process exit code: 0 on
//! success, 1 when a config or check fails, 2 on a usage error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::coherence::{uniform_times, Basis, CoherenceOptions, Subsystem};
use crate::config::{parse_config_with, preset, HyperfineTensor, Limits, ParseOptions, RadicalPairConfig, SpinAssignment};
use crate::dynamics::{evolve_joint, evolve_joint_direct};
use crate::error::{Error, Result};
use crate::experiments::{
    coherence_vs_angle, coherence_vs_rates, default_coherence_angles, default_map_axes, default_transverse_values,
    reduced_map_axes, sensitivity, sweep_2d, sweep_rates, sweep_transverse, write_result, yield_profile, AngleGrid,
    SweepResult, TRANSVERSE_SWEEP_AZ,
};
use crate::oracle::{integrate_master_equation, OracleSettings, ORACLE_DIM_CAP};
use crate::yields::singlet_yield_closed;

/// Environment variable holding the worker-thread count.
pub const WORKERS_ENV: &str = "RADPAIR_WORKERS";

#[derive(Parser, Debug)]
#[command(name = "radpair", version, about = "Radical-pair singlet yield, compass sensitivity and coherence")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Closed-form singlet yield at one field orientation.
    Yield(Common),
    /// Singlet yield against inclination, written as CSV.
    Profile {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Max minus min of the yield over inclination.
    Sensitivity {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Relative entropy of coherence against time, written as CSV.
    Coherence {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        coherence: CoherenceArgs,
        /// Also trace coherence at inclinations 0, 22.5, 45, 67.5 and 90 degrees.
        #[arg(long)]
        vs_angle: bool,
    },
    /// Sensitivity while setting ax = ay on every nucleus.
    SweepTransverse {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        grid: GridArgs,
        /// Transverse values in mT (default 0 to 0.17 by 0.01).
        #[arg(long = "values-mT", value_delimiter = ',')]
        values: Vec<f64>,
    },
    /// Yield difference between 0 and 90 degrees over (az, transverse).
    #[command(name = "sweep-2d")]
    Sweep2d {
        #[command(flatten)]
        common: Common,
        /// Coarser grid: az by 0.25 mT, transverse by 0.04 mT.
        #[arg(long)]
        reduced: bool,
    },
    /// Sensitivity and profiles for several equal recombination rates.
    SweepRates {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        grid: GridArgs,
        /// Rates in 1/s.
        #[arg(long = "k-values", value_delimiter = ',', default_values_t = vec![1e4, 1e5, 1e6])]
        k_values: Vec<f64>,
        /// Also write un-renormalized coherence traces per rate.
        #[arg(long)]
        with_coherence: bool,
        #[command(flatten)]
        coherence: CoherenceArgs,
    },
    /// Cross-check the fast paths against the master-equation integrator.
    Validate(Common),
    /// List the built-in presets or print one as JSON.
    Presets {
        /// Preset to print.
        #[arg(long)]
        show: Option<String>,
    },
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Built-in configuration name (see `presets`).
    #[arg(long, conflicts_with = "config", required_unless_present = "config")]
    preset: Option<String>,
    /// JSON configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Field inclination in degrees.
    #[arg(long = "theta-deg")]
    theta_deg: Option<f64>,
    /// Field azimuth in degrees.
    #[arg(long = "phi-deg")]
    phi_deg: Option<f64>,
    /// Field magnitude in microtesla.
    #[arg(long = "b-uT")]
    b_ut: Option<f64>,
    /// Equal singlet and triplet recombination rate in 1/s.
    #[arg(long = "k-per-sec")]
    k_per_sec: Option<f64>,
    /// Hyperfine x component applied to every nucleus, in mT.
    #[arg(long = "ax-mT", allow_negative_numbers = true)]
    ax: Option<f64>,
    /// Hyperfine y component applied to every nucleus, in mT.
    #[arg(long = "ay-mT", allow_negative_numbers = true)]
    ay: Option<f64>,
    /// Hyperfine z component applied to every nucleus, in mT.
    #[arg(long = "az-mT", allow_negative_numbers = true)]
    az: Option<f64>,
    /// How nuclear spins are derived from labels.
    #[arg(long = "spin-mapping", value_enum)]
    spin_mapping: Option<SpinMappingArg>,
    /// Output directory for CSV and metadata files.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Record a generation timestamp in metadata files.
    #[arg(long)]
    stamp: bool,
}

#[derive(Args, Debug, Clone)]
struct GridArgs {
    /// Number of inclination samples.
    #[arg(long = "theta-points", default_value_t = 91)]
    theta_points: usize,
    /// Largest inclination in degrees.
    #[arg(long = "theta-max-deg", default_value_t = 90.0)]
    theta_max_deg: f64,
}

#[derive(Args, Debug, Clone)]
struct CoherenceArgs {
    /// End of the time window in microseconds.
    #[arg(long = "t-max-us", default_value_t = 10.0)]
    t_max_us: f64,
    /// Number of time samples.
    #[arg(long = "time-points", default_value_t = 101)]
    time_points: usize,
    #[arg(long, value_enum, default_value_t = SubsystemArg::Joint)]
    subsystem: SubsystemArg,
    #[arg(long, value_enum, default_value_t = BasisArg::ProductZ)]
    basis: BasisArg,
    /// Keep the decaying trace instead of renormalizing.
    #[arg(long)]
    no_renormalize: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum SpinMappingArg {
    ByLabel,
    AllHalf,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum SubsystemArg {
    Joint,
    Electrons,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum BasisArg {
    ProductZ,
    SingletTriplet,
}

impl CoherenceArgs {
    fn options(&self) -> CoherenceOptions {
        CoherenceOptions {
            subsystem: match self.subsystem {
                SubsystemArg::Joint => Subsystem::Joint,
                SubsystemArg::Electrons => Subsystem::Electrons,
            },
            basis: match self.basis {
                BasisArg::ProductZ => Basis::ProductZ,
                BasisArg::SingletTriplet => Basis::SingletTriplet,
            },
            renormalize: !self.no_renormalize,
        }
    }

    fn times(&self) -> Vec<f64> {
        uniform_times(self.t_max_us * 1e-6, self.time_points)
    }
}

impl GridArgs {
    fn grid(&self, phi: f64) -> Result<AngleGrid> {
        Ok(AngleGrid::uniform(0.0, self.theta_max_deg.to_radians(), self.theta_points)?.with_phi(phi))
    }
}

impl Common {
    fn assignment(&self) -> SpinAssignment {
        match self.spin_mapping {
            Some(SpinMappingArg::AllHalf) => SpinAssignment::AllHalf,
            _ => SpinAssignment::ByLabel,
        }
    }

    fn resolve(&self) -> Result<RadicalPairConfig> {
        let mut c = match (&self.preset, &self.config) {
            (Some(name), _) => {
                let c = preset(name)?;
                if matches!(self.spin_mapping, Some(SpinMappingArg::AllHalf)) {
                    c.with_spin_assignment(SpinAssignment::AllHalf)?
                } else {
                    c
                }
            }
            (None, Some(path)) => {
                let text = std::fs::read_to_string(path)?;
                parse_config_with(
                    &text,
                    &ParseOptions {
                        assignment: self.assignment(),
                        limits: Limits::default(),
                    },
                )?
            }
            (None, None) => return Err(Error::Validation("either --preset or --config is required".into())),
        };
        if let Some(t) = self.theta_deg {
            c.field.theta = t.to_radians();
        }
        if let Some(p) = self.phi_deg {
            c.field.phi = p.to_radians();
        }
        if let Some(b) = self.b_ut {
            c.field.b_magnitude = b;
        }
        if let Some(k) = self.k_per_sec {
            c = c.with_rate(k);
        }
        for n in c.radical_a.nuclei.iter_mut().chain(c.radical_b.nuclei.iter_mut()) {
            let t = &mut n.hyperfine;
            *t = HyperfineTensor::new(self.ax.unwrap_or(t.ax), self.ay.unwrap_or(t.ay), self.az.unwrap_or(t.az));
        }
        c.validate(&Limits::default())?;
        Ok(c)
    }
}

/// Parses `argv` (program name first), runs the verb and returns the exit
/// code. Summaries go to standard output, errors to standard error.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let mut stdout = std::io::stdout().lock();
    let mut stderr = std::io::stderr().lock();
    run_with(argv, &mut stdout, &mut stderr)
}

/// [`run`] with explicit output streams.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{rendered}")
            } else {
                write!(err, "{rendered}")
            };
            return code;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(worker_count()).build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: cannot start worker pool: {e}");
            return 1;
        }
    };
    let mut buffer = Vec::new();
    let outcome = pool.install(|| execute(cli.command, &mut buffer));
    let _ = out.write_all(&buffer);
    match outcome {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

/// Worker threads from the environment, else the available parallelism.
pub fn worker_count() -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

fn emit(out: &mut dyn Write, common: &Common, config: &RadicalPairConfig, results: &[SweepResult]) -> Result<()> {
    let mut files = Vec::new();
    for r in results {
        let (csv, meta) = write_result(&common.out, r, config, common.stamp)?;
        files.push(csv.display().to_string());
        files.push(meta.display().to_string());
    }
    writeln!(out, "{}", files.join(" "))?;
    Ok(())
}

fn execute(command: Command, out: &mut dyn Write) -> Result<bool> {
    match command {
        Command::Yield(common) => {
            let c = common.resolve()?;
            writeln!(out, "{:.12}", singlet_yield_closed(&c)?.value)?;
        }
        Command::Profile { common, grid } => {
            let c = common.resolve()?;
            let r = yield_profile(&c, &grid.grid(c.field.phi)?)?;
            emit(out, &common, &c, &[r])?;
        }
        Command::Sensitivity { common, grid } => {
            let c = common.resolve()?;
            writeln!(out, "{:.12}", sensitivity(&c, &grid.grid(c.field.phi)?)?)?;
        }
        Command::Coherence {
            common,
            coherence,
            vs_angle,
        } => {
            let c = common.resolve()?;
            let options = coherence.options();
            let times = coherence.times();
            let angles = if vs_angle {
                default_coherence_angles()
            } else {
                vec![c.field.theta]
            };
            let family = coherence_vs_angle(&c, &angles, &times, &options)?;
            let name = if vs_angle { "coherence_vs_angle" } else { "coherence" };
            emit(out, &common, &c, &[family.table(name)])?;
        }
        Command::SweepTransverse { common, grid, values } => {
            let c = common.resolve()?;
            let values = if values.is_empty() {
                default_transverse_values()
            } else {
                values
            };
            let az = common.az.unwrap_or(TRANSVERSE_SWEEP_AZ);
            let family = sweep_transverse(&c, &values, az, &grid.grid(c.field.phi)?)?;
            let best = family.argmax();
            emit(
                out,
                &common,
                &c,
                &[
                    family.sensitivity_table("transverse_sensitivity"),
                    family.profile_table("transverse_profiles"),
                ],
            )?;
            writeln!(
                out,
                "max sensitivity {:.12} at transverse {} mT",
                family.sensitivities[best], family.values[best]
            )?;
        }
        Command::Sweep2d { common, reduced } => {
            let c = common.resolve()?;
            let (az, transverse) = if reduced { reduced_map_axes() } else { default_map_axes() };
            let map = sweep_2d(&c, &az, &transverse)?;
            emit(out, &common, &c, &[map.table("hyperfine_map")])?;
            let (a, t, v) = map.argmax();
            writeln!(out, "max delta_yield_0_90 {v:.12} at az {a} mT, transverse {t} mT")?;
        }
        Command::SweepRates {
            common,
            grid,
            k_values,
            with_coherence,
            coherence,
        } => {
            let c = common.resolve()?;
            let family = sweep_rates(&c, &k_values, &grid.grid(c.field.phi)?)?;
            let mut results = vec![
                family.sensitivity_table("rate_sensitivity"),
                family.profile_table("rate_profiles"),
            ];
            if with_coherence {
                let options = coherence.options().with_renormalize(false);
                results.push(coherence_vs_rates(&c, &k_values, &coherence.times(), &options)?.table("rate_coherence"));
            }
            emit(out, &common, &c, &results)?;
        }
        Command::Validate(common) => {
            let c = common.resolve()?;
            return validate(&c, out);
        }
        Command::Presets { show } => match show {
            Some(name) => write!(out, "{}", preset(&name)?.to_json())?,
            None => {
                for (name, c) in crate::config::builtin_presets() {
                    writeln!(out, "{name}\tjoint dimension {}\tdigest {}", c.joint_dim(), c.digest())?;
                }
            }
        },
    }
    Ok(true)
}

/// Tolerances used by `validate`.
const YIELD_TOLERANCE: f64 = 1e-4;
const STATE_TOLERANCE: f64 = 1e-7;

fn validate(config: &RadicalPairConfig, out: &mut dyn Write) -> Result<bool> {
    if config.joint_dim() > ORACLE_DIM_CAP {
        return Err(Error::DimensionCap {
            what: "oracle joint",
            dim: config.joint_dim(),
            cap: ORACLE_DIM_CAP,
        });
    }
    let k = config.rates.common()?;
    let closed = singlet_yield_closed(config)?.value;
    let horizon = 15.0 / k;
    let settings = OracleSettings::for_config(config, horizon, 4)?.without_states();
    let oracle_yield = integrate_master_equation(config, &settings)?.final_singlet_yield();
    let yield_dev = (closed - oracle_yield).abs();

    let times = [1e-7, 1e-6, 5e-6];
    let record: f64 = 1e-7;
    let traj = integrate_master_equation(config, &OracleSettings::for_config(config, 5e-6, 50)?)?;
    let mut state_dev = 0.0f64;
    let mut direct_dev = 0.0f64;
    for t in times {
        let idx = (t / record).round() as usize;
        let factorized = evolve_joint(config, t)?;
        let direct = evolve_joint_direct(config, t)?;
        state_dev = state_dev.max((&factorized.matrix - &traj.states[idx].matrix).max_abs());
        direct_dev = direct_dev.max((&factorized.matrix - &direct.matrix).max_abs());
    }
    let checks = [
        ("yield closed vs integrated", yield_dev, YIELD_TOLERANCE),
        ("state factorized vs integrated", state_dev, STATE_TOLERANCE),
        ("state factorized vs direct", direct_dev, STATE_TOLERANCE),
    ];
    let mut ok = true;
    for (name, dev, tol) in checks {
        let pass = dev <= tol;
        ok &= pass;
        writeln!(
            out,
            "{} {name}: max deviation {dev:.3e} (tolerance {tol:.0e})",
            if pass { "PASS" } else { "FAIL" }
        )?;
    }
    Ok(ok)
}
