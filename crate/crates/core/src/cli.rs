//! Command-line front end.
//!
//! Exit codes: 0 success, 1 configuration error, 2 rejected step or no
//! contraction, 3 I/O or snapshot format error.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rayon::prelude::*;

use crate::config::{Mode, RunConfig, System};
use crate::diagnostics::{compute_diagnostics, general_diagnostics, CsvWriter, DiagnosticsRecord};
use crate::error::{Error, Result};
use crate::general::{general_evolve, general_existence_time, GeneralModel};
use crate::image::emit_amplitude_image;
use crate::snapshot::write_snapshot;
use crate::spectral::{FieldN, SpectralField};
use crate::stepper::{evolve, existence_time_estimate, ExistenceReport, StepReport};

#[derive(Debug, Parser)]
#[command(
    name = "ds2sim",
    version,
    about = "Picard-Duhamel pseudospectral solver for DS-II"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evolve the configured initial data, writing diagnostics and snapshots.
    Run { config: PathBuf },
    /// Estimate the local existence time from the Picard contraction ratio.
    #[command(name = "estimate-t")]
    EstimateT { config: PathBuf },
    /// Run every combination of `sweep.*` overrides in its own directory.
    Sweep {
        config: PathBuf,
        /// Worker threads; overrides `sweep.jobs`.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Parse and check a configuration, printing its normalized form.
    Validate { config: PathBuf },
}

/// Entry point used by the binary. Returns the process exit code.
pub fn run_cli<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = if e.use_stderr() {
                write!(err, "{e}")
            } else {
                write!(out, "{e}")
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Run { config } => load(&config, Mode::Run).and_then(|c| run(&c, out, err, false)),
        Command::EstimateT { config } => {
            load(&config, Mode::EstimateT).and_then(|c| estimate(&c, out))
        }
        Command::Sweep { config, jobs } => {
            load(&config, Mode::Sweep).and_then(|c| sweep(&c, &config, jobs, out))
        }
        Command::Validate { config } => load(&config, Mode::Validate).and_then(|c| {
            out.write_all(c.normalized().as_bytes())
                .map_err(|e| Error::io("<stdout>", e))
        }),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn load(path: &Path, mode: Mode) -> Result<RunConfig> {
    RunConfig::from_file(path, mode)
}

/// Writes CSV rows, snapshots and images for one run directory.
struct RunOutput<'a> {
    cfg: &'a RunConfig,
    csv: CsvWriter<BufWriter<File>>,
    csv_path: PathBuf,
    steps: usize,
    leak_warned: bool,
    first: Option<DiagnosticsRecord>,
    last: Option<DiagnosticsRecord>,
    warnings: Vec<String>,
}

impl<'a> RunOutput<'a> {
    fn new(cfg: &'a RunConfig) -> Result<Self> {
        let dir = &cfg.output_dir;
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let csv_path = dir.join("diagnostics.csv");
        let file = File::create(&csv_path).map_err(|e| Error::io(&csv_path, e))?;
        let csv = CsvWriter::new(BufWriter::new(file)).map_err(|e| Error::io(&csv_path, e))?;
        Ok(RunOutput {
            cfg,
            csv,
            csv_path,
            steps: 0,
            leak_warned: false,
            first: None,
            last: None,
            warnings: Vec::new(),
        })
    }

    fn record(
        &mut self,
        rec: DiagnosticsRecord,
        field2d: Option<&SpectralField>,
        final_step: bool,
    ) -> Result<()> {
        self.csv
            .write(&rec)
            .map_err(|e| Error::io(&self.csv_path, e))?;
        if !self.leak_warned && !rec.leak_ok(self.cfg.leak_threshold) {
            self.leak_warned = true;
            self.warnings.push(format!(
                "boundary leak {:e} exceeds {:e} x linf at t = {}; enlarge the box",
                rec.boundary_leak, self.cfg.leak_threshold, rec.t
            ));
        }
        if let Some(f) = field2d {
            let every = self.cfg.snapshot_every;
            let due = every > 0 && self.steps.is_multiple_of(every);
            let dir = &self.cfg.output_dir;
            if due {
                write_snapshot(f, rec.t, dir.join(format!("snap_{:06}.ds2f", self.steps)))?;
                if self.cfg.images {
                    emit_amplitude_image(f, dir.join(format!("amp_{:06}.pgm", self.steps)))?;
                }
            }
            if final_step {
                write_snapshot(f, rec.t, dir.join("final.ds2f"))?;
                if self.cfg.images {
                    emit_amplitude_image(f, dir.join("final.pgm"))?;
                }
            }
        }
        self.first.get_or_insert(rec);
        self.last = Some(rec);
        Ok(())
    }

    fn finish(mut self, out: &mut dyn Write, err: &mut dyn Write, relative: bool) -> Result<()> {
        self.csv.flush().map_err(|e| Error::io(&self.csv_path, e))?;
        for w in &self.warnings {
            let _ = writeln!(err, "warning: {w}");
        }
        if let (Some(a), Some(b)) = (self.first, self.last) {
            let drift = if a.mass > 0.0 {
                (b.mass - a.mass).abs() / a.mass
            } else {
                0.0
            };
            writeln!(
                out,
                "t_final = {}\nsteps = {}\nrelative_mass_drift = {:e}\ndiagnostics = {}",
                b.t,
                self.steps,
                drift,
                if relative {
                    Path::new("diagnostics.csv").display()
                } else {
                    self.csv_path.display()
                }
            )
            .map_err(|e| Error::io("<stdout>", e))?;
        }
        Ok(())
    }
}

/// `relative` prints paths relative to the output directory, which keeps
/// sweep logs identical wherever the sweep was run.
fn run(cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write, relative: bool) -> Result<()> {
    let u0 = cfg.initial_field()?;
    let mut output = RunOutput::new(cfg)?;
    let n_steps = crate::stepper::step_times(cfg.t_end, cfg.dt)?.len();
    let p = cfg.p();
    let result = match &cfg.system {
        System::Ds2(params) => {
            let u0 = u0.to_2d().expect("ds2 grids are 2-D");
            let rec0 = compute_diagnostics(&u0, 0.0, params, p);
            output.record(rec0, Some(&u0), false)?;
            let mut sink = |t: f64, u: &SpectralField, _: &StepReport| -> Result<()> {
                output.steps += 1;
                let last = output.steps == n_steps;
                output.record(compute_diagnostics(u, t, params, p), Some(u), last)
            };
            evolve(&u0, cfg.t_end, cfg.dt, params, &cfg.picard, &mut sink).map(|_| ())
        }
        System::General(spec) => {
            let model = GeneralModel::new(spec.clone(), cfg.grid.clone())?;
            let u0_2d = u0.to_2d();
            output.record(
                general_diagnostics(&u0, 0.0, &model, p),
                u0_2d.as_ref(),
                false,
            )?;
            let mut sink = |t: f64, u: &FieldN, _: &StepReport| -> Result<()> {
                output.steps += 1;
                let last = output.steps == n_steps;
                let rec = general_diagnostics(u, t, &model, p);
                output.record(rec, u.to_2d().as_ref(), last)
            };
            general_evolve(&u0, spec, cfg.t_end, cfg.dt, &cfg.picard, &mut sink).map(|_| ())
        }
    };
    // flush whatever was written before reporting a rejected step
    output.finish(out, err, relative)?;
    result
}

fn estimate(cfg: &RunConfig, out: &mut dyn Write) -> Result<()> {
    let u0 = cfg.initial_field()?;
    let (t_star, report): (f64, ExistenceReport) = match &cfg.system {
        System::Ds2(params) => {
            let u0 = u0.to_2d().expect("ds2 grids are 2-D");
            existence_time_estimate(&u0, params, &cfg.picard, cfg.t_max)?
        }
        System::General(spec) => general_existence_time(&u0, spec, &cfg.picard, cfg.t_max)?,
    };
    let mut text = format!("T_star = {t_star:.16e}\nT,max_ratio,contracting\n");
    for probe in report.ratio_curve() {
        text.push_str(&format!(
            "{:.16e},{:.16e},{}\n",
            probe.t, probe.max_ratio, probe.accepted
        ));
    }
    out.write_all(text.as_bytes())
        .map_err(|e| Error::io("<stdout>", e))
}

fn sweep(
    cfg: &RunConfig,
    config_path: &Path,
    jobs: Option<usize>,
    out: &mut dyn Write,
) -> Result<()> {
    let base_dir = config_path.parent().unwrap_or(Path::new("."));
    let members = cfg.sweep_members(base_dir)?;
    let jobs = jobs.unwrap_or(cfg.jobs);
    if jobs == 0 {
        return Err(Error::config("sweep.jobs", "must be positive"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::config("sweep.jobs", e.to_string()))?;
    let results: Vec<Result<()>> = pool.install(|| {
        members
            .par_iter()
            .map(|(overrides, member)| run_member(overrides, member))
            .collect()
    });
    let mut worst: Option<Error> = None;
    for ((overrides, member), result) in members.iter().zip(results) {
        let status = match &result {
            Ok(()) => "ok".to_string(),
            Err(e) => format!("failed ({e})"),
        };
        let desc: Vec<String> = overrides.iter().map(|(k, v)| format!("{k}={v}")).collect();
        writeln!(
            out,
            "{}: {} {}",
            member.output_dir.display(),
            desc.join(" "),
            status
        )
        .map_err(|e| Error::io("<stdout>", e))?;
        if let Err(e) = result {
            if worst.as_ref().is_none_or(|w| e.exit_code() > w.exit_code()) {
                worst = Some(e);
            }
        }
    }
    worst.map_or(Ok(()), Err)
}

fn run_member(overrides: &[(String, String)], member: &RunConfig) -> Result<()> {
    fs::create_dir_all(&member.output_dir).map_err(|e| Error::io(&member.output_dir, e))?;
    let mut text = String::new();
    for (k, v) in overrides {
        text.push_str(&format!("{k} = {v}\n"));
    }
    let path = member.output_dir.join("overrides.txt");
    fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    let mut log = Vec::new();
    let mut errlog = Vec::new();
    let result = run(member, &mut log, &mut errlog, true);
    if let Err(e) = &result {
        let _ = writeln!(errlog, "error: {e}");
    }
    log.extend_from_slice(&errlog);
    let path = member.output_dir.join("run.log");
    fs::write(&path, log).map_err(|e| Error::io(&path, e))?;
    result
}
