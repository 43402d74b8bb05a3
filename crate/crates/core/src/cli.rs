//! Command-line entry point.
//!
//! Exit codes: 0 success, 1 a scenario assertion failed (or the engine
//! errored), 2 usage or config error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::io::{
    artifact_stem, fmt_f64, parse_config, read_trajectory_csv, render_spacetime_svg, report_markers,
    summary_text, write_artifacts, config_hash, Axis, RunArtifacts, TraceFormat,
};
use crate::lab::{echo_sweep, run_arrow_experiment, run_scenario, run_white_hole_attempt, ScenarioConfig, ScenarioReport, SweepParam};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ASSERTION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "arrowlab", version, about = "Reversible billiard-gas experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Override the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Artifact directory.
    #[arg(long, env = "ARROWLAB_OUT_DIR", default_value = "out")]
    out_dir: PathBuf,
    /// Trace format.
    #[arg(long, value_enum, default_value_t = TraceFormat::Csv)]
    format: TraceFormat,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one scenario and write its artifacts.
    Run {
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Forward and reversed runs sharing one annihilation event.
    Arrow {
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Echo distance over a list of K or delta values.
    Sweep {
        config: PathBuf,
        /// K or delta.
        #[arg(long)]
        param: SweepParam,
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        values: Vec<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Reverse a thermal state and check that no order emerges.
    Whitehole {
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Spacetime SVG from a report JSON or a trajectory CSV.
    Render {
        trace: PathBuf,
        #[arg(long, default_value = "x")]
        axis: Axis,
        /// Table length along the axis; read from the report when omitted.
        #[arg(long)]
        extent: Option<f64>,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidParam { .. } | Error::Config(_) | Error::Json(_) | Error::Csv(_) | Error::Placement(_) | Error::Io(_) => {
            EXIT_USAGE
        }
        _ => EXIT_ASSERTION,
    }
}

fn load(path: &Path, seed: Option<u64>) -> Result<ScenarioConfig> {
    let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let mut cfg = parse_config(&text)?;
    if let Some(s) = seed {
        cfg.seed = s;
        cfg.validate()?;
    }
    Ok(cfg)
}

fn print_artifacts(out: &mut dyn Write, a: &RunArtifacts) -> std::io::Result<()> {
    for p in [&a.config, &a.trace, &a.trajectory, &a.report, &a.summary].into_iter().chain(&a.svgs) {
        writeln!(out, "wrote {}", p.display())?;
    }
    Ok(())
}

fn emit(out: &mut dyn Write, r: &ScenarioReport, common: &Common, prefix: &str) -> Result<()> {
    let a = write_artifacts(r, &common.out_dir, prefix, common.format)?;
    out.write_all(summary_text(r, &config_hash(&r.config)?).as_bytes())?;
    print_artifacts(out, &a)?;
    Ok(())
}

fn execute(cmd: Command, out: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Run { config, common } => {
            let cfg = load(&config, common.seed)?;
            let r = run_scenario(&cfg)?;
            emit(out, &r, &common, "run")?;
            Ok(EXIT_OK)
        }
        Command::Arrow { config, common } => {
            let cfg = load(&config, common.seed)?;
            let pair = run_arrow_experiment(&cfg)?;
            writeln!(out, "== forward")?;
            emit(out, &pair.forward, &common, "arrow-forward")?;
            writeln!(out, "== reversed")?;
            emit(out, &pair.reversed, &common, "arrow-reversed")?;
            if !pair.forward.equilibrated {
                writeln!(out, "FAIL: forward run did not equilibrate within the run length")?;
                return Ok(EXIT_ASSERTION);
            }
            if !pair.as_expected() {
                writeln!(
                    out,
                    "FAIL: expected forward/realigned, got {}/{}",
                    pair.forward.verdict, pair.reversed.verdict
                )?;
                return Ok(EXIT_ASSERTION);
            }
            Ok(EXIT_OK)
        }
        Command::Sweep {
            config,
            param,
            values,
            common,
        } => {
            let cfg = load(&config, common.seed)?;
            let rep = echo_sweep(&cfg, param, &values)?;
            fs::create_dir_all(&common.out_dir)?;
            let stem = artifact_stem("sweep", &rep.config)?;
            let path = match common.format {
                TraceFormat::Csv => {
                    let p = common.out_dir.join(format!("{stem}.csv"));
                    let mut w = csv::Writer::from_writer(Vec::new());
                    w.write_record(["value", "pos_rms", "vel_rms"])?;
                    for pt in &rep.points {
                        w.write_record([fmt_f64(pt.value), fmt_f64(pt.pos_rms), fmt_f64(pt.vel_rms)])?;
                    }
                    fs::write(&p, w.into_inner().map_err(|e| Error::Io(e.into_error()))?)?;
                    p
                }
                TraceFormat::Json => {
                    let p = common.out_dir.join(format!("{stem}.json"));
                    fs::write(&p, serde_json::to_string_pretty(&rep)? + "\n")?;
                    p
                }
            };
            for pt in &rep.points {
                writeln!(out, "{:>14}  pos {:e}  vel {:e}", pt.value, pt.pos_rms, pt.vel_rms)?;
            }
            writeln!(out, "divergence {}", serde_json::to_string(&rep.divergence)?)?;
            writeln!(out, "wrote {}", path.display())?;
            Ok(EXIT_OK)
        }
        Command::Whitehole { config, common } => {
            let cfg = load(&config, common.seed)?;
            let r = run_white_hole_attempt(&cfg)?;
            emit(out, &r, &common, "whitehole")?;
            let w = r.white_hole.expect("white-hole summary");
            if w.reordered {
                writeln!(out, "FAIL: entropy fell to {:.4} of its initial value", w.min_ratio)?;
                return Ok(EXIT_ASSERTION);
            }
            Ok(EXIT_OK)
        }
        Command::Render {
            trace,
            axis,
            extent,
            out: dest,
        } => {
            let text = fs::read_to_string(&trace).map_err(|e| Error::Config(format!("{}: {e}", trace.display())))?;
            let is_json = trace.extension().is_some_and(|e| e == "json");
            let (frames, markers, table_extent) = if is_json {
                let r: ScenarioReport = serde_json::from_str(&text)?;
                let t = r.config.table;
                let ext = match axis {
                    Axis::X => t.width,
                    Axis::Y => t.height,
                };
                (r.trajectory.clone(), report_markers(&r), Some(ext))
            } else {
                (read_trajectory_csv(&text)?, Vec::new(), None)
            };
            let ext = extent
                .or(table_extent)
                .ok_or_else(|| Error::param("extent", "needed when rendering a bare trajectory CSV"))?;
            let svg = render_spacetime_svg(&frames, axis, ext, &markers)?;
            match dest {
                Some(p) => {
                    fs::write(&p, svg)?;
                    writeln!(out, "wrote {}", p.display())?;
                }
                None => out.write_all(svg.as_bytes())?,
            }
            Ok(EXIT_OK)
        }
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(rendered.as_bytes())
            } else {
                out.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}
