//! Command-line front end: config parsing, run orchestration and output.
//!
//! Structured results go to standard output or `report.json` as JSON, field
//! data to CSV. Every float is rounded to 9 significant digits on output.

use std::ffi::OsString;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::chain::{ChainState, Forcing, Potential};
use crate::error::{Error, Result};
use crate::integrator::{simulate, Boundary, SimConfig, Trajectory, DEFAULT_DT};
use crate::ptwave::{
    causality_wave, close_family, evaluate_criteria, relative_flux, CriteriaReport, PtWaveState,
};
use crate::riemann::{analyze, run_batch, RiemannConfig, DEFAULT_CAUSALITY_TOL};
use crate::spectral::{sommerfeld_fields, sommerfeld_solution, SommerfeldBranch};
use crate::thermo::{average_trajectory, production_xi, round_sig, CellFields, ScalingConfig};
use crate::twave::{build_wave, tw_mean_fields, TravellingWaveSpec};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "LATTICEWAVE_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "latticewave",
    version,
    about = "Nearest-neighbour chain dynamics and thermodynamic fields"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate a chain and write snapshots and averaged fields.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Closed-form source and sink solutions for a forcing frequency.
    Sommerfeld {
        #[arg(long)]
        sigma: f64,
    },
    /// Closed-form fields of a harmonic travelling wave.
    TwFields {
        #[arg(long)]
        config: PathBuf,
    },
    /// Phase transition wave state and selection criteria.
    Ptwave {
        #[arg(long)]
        config: PathBuf,
    },
    /// Causality wave for a phase speed and mean velocity.
    Causality {
        #[arg(long, allow_hyphen_values = true)]
        cph: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        meanv: f64,
    },
    /// Riemann problems; several configs run in parallel.
    Riemann {
        #[arg(long, required = true, num_args = 1..)]
        config: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Any command described by a config file with a "command" key.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Initial data of a `simulate` run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialData {
    Uniform {
        j_min: i64,
        j_max: i64,
        r: f64,
        v: f64,
    },
    Riemann {
        j_min: i64,
        j_max: i64,
        r_minus: f64,
        r_plus: f64,
        v_minus: f64,
        v_plus: f64,
    },
    TravellingWave {
        j_min: i64,
        j_max: i64,
        wave: TravellingWaveSpec,
    },
    Explicit {
        j_min: i64,
        r: Vec<f64>,
        v: Vec<f64>,
    },
}

impl InitialData {
    pub fn build(&self) -> Result<ChainState> {
        match self {
            InitialData::Uniform { j_min, j_max, r, v } => {
                ChainState::uniform(*j_min, *j_max, *r, *v)
            }
            InitialData::Riemann {
                j_min,
                j_max,
                r_minus,
                r_plus,
                v_minus,
                v_plus,
            } => ChainState::riemann(*j_min, *j_max, *r_minus, *r_plus, *v_minus, *v_plus),
            InitialData::TravellingWave { j_min, j_max, wave } => {
                build_wave(wave)?.sample(*j_min, *j_max, 0.0)
            }
            InitialData::Explicit { j_min, r, v } => {
                ChainState::new(0.0, *j_min, r.clone(), v.clone())
            }
        }
    }
}

fn default_dt() -> f64 {
    DEFAULT_DT
}

fn default_stride() -> usize {
    100
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateParams {
    pub potential: Potential,
    pub initial: InitialData,
    #[serde(default)]
    pub forcing: Option<Forcing>,
    #[serde(default = "default_dt")]
    pub dt: f64,
    pub t_end: f64,
    #[serde(default = "default_stride")]
    pub snapshot_stride: usize,
    /// Defaults to `ScalingConfig::for_particles` of the lattice size.
    #[serde(default)]
    pub scaling: Option<ScalingConfig>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PtWaveParams {
    pub c_ph: f64,
    pub a_minus: f64,
    pub a_plus: f64,
    #[serde(default)]
    pub mean_v: f64,
}

/// Contents of a `--config` file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum RunConfigFile {
    Simulate(SimulateParams),
    Sommerfeld(SommerfeldParams),
    TwFields(TravellingWaveSpec),
    Ptwave(PtWaveParams),
    Causality(CausalityParams),
    Riemann(RiemannConfig),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SommerfeldParams {
    pub sigma: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CausalityParams {
    pub c_ph: f64,
    #[serde(default)]
    pub mean_v: f64,
}

impl RunConfigFile {
    pub fn name(&self) -> &'static str {
        match self {
            RunConfigFile::Simulate(_) => "simulate",
            RunConfigFile::Sommerfeld(_) => "sommerfeld",
            RunConfigFile::TwFields(_) => "tw-fields",
            RunConfigFile::Ptwave(_) => "ptwave",
            RunConfigFile::Causality(_) => "causality",
            RunConfigFile::Riemann(_) => "riemann",
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

fn load_expecting(path: &Path, name: &str) -> Result<RunConfigFile> {
    let cfg = RunConfigFile::load(path)?;
    if cfg.name() != name {
        return Err(Error::Config(format!(
            "{} describes a `{}` run, not `{name}`",
            path.display(),
            cfg.name()
        )));
    }
    Ok(cfg)
}

/// Copy of `v` with every float rounded to 9 significant digits.
pub fn round_json(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => n
            .as_f64()
            .and_then(|x| serde_json::Number::from_f64(round_sig(x)))
            .map_or(Value::Null, Value::Number),
        Value::Array(a) => Value::Array(a.into_iter().map(round_json).collect()),
        Value::Object(m) => Value::Object(m.into_iter().map(|(k, v)| (k, round_json(v))).collect()),
        other => other,
    }
}

pub fn to_json<T: Serialize>(x: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(&round_json(
        serde_json::to_value(x)?,
    ))?)
}

/// Cell fields keyed like the CSV columns.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct FieldRecord {
    pub R: f64,
    pub V: f64,
    pub P: f64,
    pub E: f64,
    pub F: f64,
    pub U: f64,
    pub Q: f64,
    pub E_osc: f64,
    pub E_non: f64,
    pub Xi: f64,
}

impl From<&CellFields> for FieldRecord {
    fn from(c: &CellFields) -> Self {
        FieldRecord {
            R: c.r,
            V: c.v,
            P: c.p,
            E: c.e,
            F: c.f,
            U: c.u,
            Q: c.q,
            E_osc: c.e_osc,
            E_non: c.e_non,
            Xi: c.production,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SommerfeldRecord {
    pub sigma: f64,
    pub kappa: f64,
    pub amplitude: f64,
    pub e_osc: f64,
    pub q_minus_inf: f64,
    pub q_plus_inf: f64,
    pub theta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SommerfeldReport {
    pub source: SommerfeldRecord,
    pub sink: SommerfeldRecord,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PtWaveReport {
    pub state: PtWaveState,
    pub criteria: CriteriaReport,
    pub relative_flux: (f64, f64),
}

impl PtWaveReport {
    fn new(state: PtWaveState) -> Self {
        PtWaveReport {
            criteria: evaluate_criteria(&state),
            relative_flux: relative_flux(&state),
            state,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulateReport {
    pub num_sites: usize,
    pub snapshots: usize,
    pub t_start: f64,
    pub t_end: f64,
    pub energy_start: f64,
    pub energy_end: f64,
    pub scaling: ScalingConfig,
}

pub fn sommerfeld_report(sigma: f64) -> Result<SommerfeldReport> {
    let record = |branch| -> Result<SommerfeldRecord> {
        let sol = sommerfeld_solution(sigma, branch)?;
        let f = sommerfeld_fields(&sol);
        Ok(SommerfeldRecord {
            sigma,
            kappa: sol.kappa,
            amplitude: sol.amplitude,
            e_osc: f.e_osc,
            q_minus_inf: f.q_minus_inf,
            q_plus_inf: f.q_plus_inf,
            theta: f.theta,
        })
    };
    Ok(SommerfeldReport {
        source: record(SommerfeldBranch::Source)?,
        sink: record(SommerfeldBranch::Sink)?,
    })
}

fn require_out(out: Option<&Path>, name: &str) -> Result<PathBuf> {
    out.map(Path::to_path_buf)
        .ok_or_else(|| Error::Config(format!("`{name}` needs an output directory (--out)")))
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)
        .map_err(|e| Error::Config(format!("cannot create {}: {e}", dir.display())))
}

fn write_trajectory_csv(traj: &Trajectory, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    writeln!(w, "t,j,r,v")?;
    for s in &traj.snapshots {
        let r = s.strains();
        for (k, v) in s.velocities().iter().enumerate() {
            let j = s.j_min() + k as i64;
            match r.get(k) {
                Some(&r) => writeln!(
                    w,
                    "{},{j},{},{}",
                    round_sig(s.t),
                    round_sig(r),
                    round_sig(*v)
                )?,
                None => writeln!(w, "{},{j},,{}", round_sig(s.t), round_sig(*v))?,
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn run_simulate(p: &SimulateParams, out: &Path, stdout: &mut dyn Write) -> Result<()> {
    let initial = p.initial.build()?;
    let scaling = p
        .scaling
        .unwrap_or_else(|| ScalingConfig::for_particles(initial.num_sites() - 1));
    scaling.validate()?;
    let cfg = SimConfig {
        potential: p.potential,
        initial,
        forcing: p.forcing.clone(),
        dt: p.dt,
        t_end: p.t_end,
        snapshot_stride: p.snapshot_stride,
        boundary: Boundary::Dirichlet,
    };
    let traj = simulate(&cfg)?;
    let mut fields = average_trajectory(&traj, &scaling)?;
    production_xi(&mut fields, &p.potential);

    create_dir(out)?;
    write_trajectory_csv(&traj, &out.join("trajectory.csv"))?;
    fields.write_csv(BufWriter::new(fs::File::create(out.join("fields.csv"))?))?;
    if !traj.forced_velocity.is_empty() {
        let mut w = BufWriter::new(fs::File::create(out.join("forced_velocity.csv"))?);
        writeln!(w, "t,v0")?;
        let t0 = traj.start_time();
        for (n, v) in traj.forced_velocity.iter().enumerate() {
            writeln!(w, "{},{}", round_sig(t0 + n as f64 * cfg.dt), round_sig(*v))?;
        }
        w.flush()?;
    }
    let report = SimulateReport {
        num_sites: traj.final_state.num_sites(),
        snapshots: traj.snapshots.len(),
        t_start: traj.start_time(),
        t_end: traj.final_state.t,
        energy_start: crate::chain::discrete_energy(&traj.snapshots[0], &p.potential),
        energy_end: crate::chain::discrete_energy(&traj.final_state, &p.potential),
        scaling,
    };
    let text = to_json(&report)?;
    fs::write(out.join("report.json"), &text)?;
    writeln!(stdout, "{text}")?;
    Ok(())
}

fn run_riemann_configs(
    cfgs: &[RiemannConfig],
    out: Option<&Path>,
    stdout: &mut dyn Write,
) -> Result<()> {
    for c in cfgs {
        c.validate()?;
    }
    let runs = run_batch(cfgs);
    let mut reports = Vec::with_capacity(runs.len());
    for (k, run) in runs.into_iter().enumerate() {
        let run = run?;
        let report = analyze(&run, DEFAULT_CAUSALITY_TOL)?;
        if let Some(out) = out {
            let dir = if cfgs.len() == 1 {
                out.to_path_buf()
            } else {
                out.join(format!("run{k}"))
            };
            create_dir(&dir)?;
            run.fields
                .write_csv(BufWriter::new(fs::File::create(dir.join("fields.csv"))?))?;
            fs::write(dir.join("report.json"), to_json(&report)?)?;
        }
        reports.push(report);
    }
    let text = if reports.len() == 1 {
        to_json(&reports[0])?
    } else {
        to_json(&reports)?
    };
    writeln!(stdout, "{text}")?;
    Ok(())
}

/// Executes one configured command, writing JSON to `stdout`.
pub fn execute(cfg: &RunConfigFile, out: Option<&Path>, stdout: &mut dyn Write) -> Result<()> {
    match cfg {
        RunConfigFile::Simulate(p) => run_simulate(p, &require_out(out, "simulate")?, stdout),
        RunConfigFile::Sommerfeld(p) => {
            writeln!(stdout, "{}", to_json(&sommerfeld_report(p.sigma)?)?)?;
            Ok(())
        }
        RunConfigFile::TwFields(spec) => {
            let fields = tw_mean_fields(spec)?;
            writeln!(stdout, "{}", to_json(&FieldRecord::from(&fields))?)?;
            Ok(())
        }
        RunConfigFile::Ptwave(p) => {
            let state = close_family(p.c_ph, p.a_minus, p.a_plus, p.mean_v)?;
            writeln!(stdout, "{}", to_json(&PtWaveReport::new(state))?)?;
            Ok(())
        }
        RunConfigFile::Causality(p) => {
            let state = causality_wave(p.c_ph, p.mean_v)?;
            writeln!(stdout, "{}", to_json(&PtWaveReport::new(state))?)?;
            Ok(())
        }
        RunConfigFile::Riemann(c) => run_riemann_configs(std::slice::from_ref(c), out, stdout),
    }
}

/// Dispatches a parsed command line.
pub fn run_command(cmd: &Command, stdout: &mut dyn Write) -> Result<()> {
    match cmd {
        Command::Simulate { config, out } => {
            execute(&load_expecting(config, "simulate")?, Some(out), stdout)
        }
        Command::Sommerfeld { sigma } => execute(
            &RunConfigFile::Sommerfeld(SommerfeldParams { sigma: *sigma }),
            None,
            stdout,
        ),
        Command::TwFields { config } => {
            execute(&load_expecting(config, "tw-fields")?, None, stdout)
        }
        Command::Ptwave { config } => execute(&load_expecting(config, "ptwave")?, None, stdout),
        Command::Causality { cph, meanv } => execute(
            &RunConfigFile::Causality(CausalityParams {
                c_ph: *cph,
                mean_v: *meanv,
            }),
            None,
            stdout,
        ),
        Command::Riemann { config, out } => {
            let cfgs = config
                .iter()
                .map(|p| match load_expecting(p, "riemann")? {
                    RunConfigFile::Riemann(c) => Ok(c),
                    _ => unreachable!("checked by load_expecting"),
                })
                .collect::<Result<Vec<_>>>()?;
            run_riemann_configs(&cfgs, out.as_deref(), stdout)
        }
        Command::Run { config, out } => {
            execute(&RunConfigFile::load(config)?, out.as_deref(), stdout)
        }
    }
}

fn configure_threads() -> Result<()> {
    let Ok(text) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = text.trim().parse().map_err(|_| {
        Error::Config(format!(
            "{THREADS_ENV} must be a positive integer, got `{text}`"
        ))
    })?;
    if n == 0 {
        return Err(Error::Config(format!("{THREADS_ENV} must be positive")));
    }
    // a second initialisation in the same process keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
    Ok(())
}

/// Exit status for an error: 2 for numerical faults, 1 otherwise.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_numerical() {
        2
    } else {
        1
    }
}

/// Entry point of the binary. Returns the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match configure_threads().and_then(|_| run_command(&cli.command, &mut lock)) {
        Ok(()) => 0,
        // a closed pipe (`| head`) is not a failure
        Err(Error::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
