//! Config parsing, deterministic serialization and SVG rendering.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::engine::SimState;
use crate::error::{Error, Result};
use crate::lab::{EngineKind, Frame, ScenarioConfig, ScenarioReport};
use crate::observables::EntropyTrace;
use crate::vec2::Vec2;

pub const TRACE_HEADER: &str = "t,S_pos,S_vel,cv,dist_pos,dist_vel";

/// Parses and validates a JSON config. Unknown keys are rejected and every
/// default is filled in.
pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    let cfg: ScenarioConfig = serde_json::from_str(text)
        .map_err(|e| Error::Config(format!("line {}, column {}: {e}", e.line(), e.column())))?;
    let cfg = cfg.resolved();
    cfg.validate()?;
    Ok(cfg)
}

/// Canonical form: resolved config, pretty-printed with a trailing newline.
pub fn canonical_config(cfg: &ScenarioConfig) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&cfg.clone().resolved())?;
    s.push('\n');
    Ok(s)
}

/// First 12 hex digits of the SHA-256 of the canonical config.
pub fn config_hash(cfg: &ScenarioConfig) -> Result<String> {
    let digest = Sha256::digest(canonical_config(cfg)?.as_bytes());
    Ok(digest.iter().take(6).map(|b| format!("{b:02x}")).collect())
}

/// 17 significant digits, so values survive a text round trip.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

pub fn write_trace_csv(trace: &EntropyTrace) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(TRACE_HEADER.split(','))?;
    for s in &trace.samples {
        w.write_record([
            fmt_f64(s.t),
            fmt_f64(s.s_pos),
            fmt_f64(s.s_vel),
            fmt_opt(s.cv),
            fmt_opt(s.dist_pos),
            fmt_opt(s.dist_vel),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is ASCII"))
}

/// One row per (sample, disk): `t,disk,x,y`.
pub fn write_trajectory_csv(frames: &[Frame]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["t", "disk", "x", "y"])?;
    for f in frames {
        for (i, p) in f.positions.iter().enumerate() {
            w.write_record([fmt_f64(f.t), i.to_string(), fmt_f64(p.x), fmt_f64(p.y)])?;
        }
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is ASCII"))
}

#[derive(Debug, Deserialize)]
struct TrajectoryRow {
    t: f64,
    disk: usize,
    x: f64,
    y: f64,
}

/// Inverse of [`write_trajectory_csv`].
pub fn read_trajectory_csv(text: &str) -> Result<Vec<Frame>> {
    let mut frames: Vec<Frame> = Vec::new();
    for row in csv::Reader::from_reader(text.as_bytes()).deserialize() {
        let r: TrajectoryRow = row?;
        if frames.last().is_none_or(|f| f.t != r.t) {
            frames.push(Frame { t: r.t, positions: Vec::new() });
        }
        let f = frames.last_mut().expect("frame pushed above");
        if r.disk != f.positions.len() {
            return Err(Error::Config(format!("trajectory row for disk {} out of order at t = {}", r.disk, r.t)));
        }
        f.positions.push(Vec2::new(r.x, r.y));
    }
    Ok(frames)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    X,
    Y,
}

impl std::str::FromStr for Axis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "x" | "X" => Ok(Axis::X),
            "y" | "Y" => Ok(Axis::Y),
            _ => Err(Error::param("axis", format!("expected x or y, got {s:?}"))),
        }
    }
}

/// A labelled vertical line on the spacetime diagram.
#[derive(Debug, Clone, PartialEq)]
pub struct Marker {
    pub t: f64,
    pub label: String,
}

const SVG_W: f64 = 720.0;
const SVG_H: f64 = 480.0;
const MARGIN: f64 = 40.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// Coordinate along `axis` versus time, one polyline per disk. Time runs
/// left to right; `extent` is the table length along `axis`.
pub fn render_spacetime_svg(frames: &[Frame], axis: Axis, extent: f64, markers: &[Marker]) -> Result<String> {
    let first = frames.first().ok_or_else(|| Error::param("trajectory", "no samples to draw"))?;
    let n = first.positions.len();
    if frames.iter().any(|f| f.positions.len() != n) {
        return Err(Error::param("trajectory", "disk count changes between samples"));
    }
    let t0 = first.t;
    let t1 = frames.last().expect("non-empty").t;
    let span = if t1 > t0 { t1 - t0 } else { 1.0 };
    let (pw, ph) = (SVG_W - 2.0 * MARGIN, SVG_H - 2.0 * MARGIN);
    let sx = |t: f64| MARGIN + (t - t0) / span * pw;
    let sy = |c: f64| MARGIN + ph - c / extent * ph;

    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SVG_W}" height="{SVG_H}" viewBox="0 0 {SVG_W} {SVG_H}">"#
    )
    .unwrap();
    writeln!(s, r#"<rect x="0" y="0" width="{SVG_W}" height="{SVG_H}" fill="white"/>"#).unwrap();
    writeln!(
        s,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    )
    .unwrap();
    let name = match axis {
        Axis::X => "x",
        Axis::Y => "y",
    };
    writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="middle">t</text>"#,
        MARGIN + pw / 2.0,
        SVG_H - 10.0
    )
    .unwrap();
    writeln!(
        s,
        r#"<text x="12" y="{:.2}" font-size="12" text-anchor="middle">{name}</text>"#,
        MARGIN + ph / 2.0
    )
    .unwrap();
    for i in 0..n {
        let pts: Vec<String> = frames
            .iter()
            .map(|f| {
                let p = f.positions[i];
                let c = match axis {
                    Axis::X => p.x,
                    Axis::Y => p.y,
                };
                format!("{:.3},{:.3}", sx(f.t), sy(c))
            })
            .collect();
        writeln!(
            s,
            r#"<polyline fill="none" stroke="{}" stroke-width="1" points="{}"/>"#,
            PALETTE[i % PALETTE.len()],
            pts.join(" ")
        )
        .unwrap();
    }
    for m in markers {
        let x = sx(m.t);
        writeln!(
            s,
            r#"<line x1="{x:.3}" y1="{MARGIN}" x2="{x:.3}" y2="{:.3}" stroke="gray" stroke-dasharray="4 3"/>"#,
            MARGIN + ph
        )
        .unwrap();
        writeln!(
            s,
            r#"<text x="{x:.3}" y="{:.3}" font-size="11" text-anchor="middle">{}</text>"#,
            MARGIN - 6.0,
            m.label
        )
        .unwrap();
    }
    s.push_str("</svg>\n");
    Ok(s)
}

/// Disks to scale on the table, with optional velocity arrows.
pub fn render_snapshot_svg(state: &SimState, arrows: bool) -> String {
    let t = state.table;
    let k = (SVG_W - 2.0 * MARGIN) / t.width.max(t.height);
    let (w, h) = (t.width * k, t.height * k);
    let (cw, ch) = (w + 2.0 * MARGIN, h + 2.0 * MARGIN);
    let px = |x: f64| MARGIN + x * k;
    let py = |y: f64| MARGIN + h - y * k;
    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{cw:.3}" height="{ch:.3}" viewBox="0 0 {cw:.3} {ch:.3}">"#
    )
    .unwrap();
    writeln!(
        s,
        r##"<rect x="{MARGIN}" y="{MARGIN}" width="{w:.3}" height="{h:.3}" fill="#f4f0e6" stroke="black"/>"##
    )
    .unwrap();
    for d in &state.disks {
        writeln!(
            s,
            r#"<circle cx="{:.3}" cy="{:.3}" r="{:.3}" fill="{}"/>"#,
            px(d.position.x),
            py(d.position.y),
            d.radius * k,
            PALETTE[d.id % PALETTE.len()]
        )
        .unwrap();
    }
    if arrows {
        for d in &state.disks {
            let tip = d.position + d.velocity;
            writeln!(
                s,
                r#"<line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="black" stroke-width="1"/>"#,
                px(d.position.x),
                py(d.position.y),
                px(tip.x),
                py(tip.y)
            )
            .unwrap();
        }
    }
    s.push_str("</svg>\n");
    s
}

/// Reversal, perturbation and annihilation times of a report.
pub fn report_markers(r: &ScenarioReport) -> Vec<Marker> {
    let mut m = Vec::new();
    if let Some(t) = r.events.reversal_time {
        m.push(Marker { t, label: "reversal".into() });
    }
    if let Some(p) = &r.events.perturbation {
        m.push(Marker { t: p.time, label: "perturbation".into() });
    }
    if let Some(a) = &r.events.annihilation {
        m.push(Marker { t: a.time, label: "annihilation".into() });
    }
    m.sort_by(|a, b| a.t.total_cmp(&b.t));
    m
}

/// Human-readable summary of a report.
pub fn summary_text(r: &ScenarioReport, hash: &str) -> String {
    let c = &r.config;
    let mut s = String::new();
    writeln!(s, "engine            {:?}", c.engine).unwrap();
    writeln!(s, "disks             {}", r.initial.disks.len()).unwrap();
    writeln!(s, "seed              {}", c.seed).unwrap();
    writeln!(s, "config hash       {hash}").unwrap();
    writeln!(s, "run length        {}", c.run_length).unwrap();
    match c.engine {
        EngineKind::Event => writeln!(s, "collisions        {}", r.events.collisions).unwrap(),
        EngineKind::Bitrev => writeln!(s, "steps             {}", (c.run_length / c.bitrev.dt).round()).unwrap(),
    }
    writeln!(s, "final entropy     {:.6}", r.final_entropy).unwrap();
    writeln!(s, "reference entropy {:.6}", r.equilibrium_reference).unwrap();
    match r.final_cv {
        Some(cv) => writeln!(s, "final CV          {cv:.6}").unwrap(),
        None => writeln!(s, "final CV          undefined").unwrap(),
    }
    writeln!(s, "equilibrated      {}", r.equilibrated).unwrap();
    if let Some(t) = r.events.reversal_time {
        writeln!(s, "reversal at       {t}").unwrap();
    }
    if let Some(e) = &r.echo {
        writeln!(s, "echo distance     pos {:e}  vel {:e}", e.pos_rms, e.vel_rms).unwrap();
        if let Some(b) = e.bitwise {
            writeln!(s, "bitwise echo      {b}").unwrap();
        }
    }
    if let Some(a) = &r.events.annihilation {
        writeln!(s, "annihilated       {} disks at t = {}", a.affected.len(), a.time).unwrap();
    }
    if let Some(w) = &r.white_hole {
        writeln!(s, "min entropy ratio {:.6}", w.min_ratio).unwrap();
    }
    writeln!(s, "verdict           {}", r.verdict).unwrap();
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum TraceFormat {
    #[default]
    Csv,
    Json,
}

/// Files written for one report. Every name carries the seed and config hash.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunArtifacts {
    pub config: PathBuf,
    pub trace: PathBuf,
    pub trajectory: PathBuf,
    pub svgs: Vec<PathBuf>,
    pub report: PathBuf,
    pub summary: PathBuf,
}

pub fn artifact_stem(prefix: &str, cfg: &ScenarioConfig) -> Result<String> {
    Ok(format!("{prefix}-seed{}-{}", cfg.seed, config_hash(cfg)?))
}

/// Writes config echo, trace, trajectory, spacetime and snapshot SVGs,
/// JSON report and text summary under `dir`.
pub fn write_artifacts(r: &ScenarioReport, dir: &Path, prefix: &str, format: TraceFormat) -> Result<RunArtifacts> {
    fs::create_dir_all(dir)?;
    let hash = config_hash(&r.config)?;
    let stem = artifact_stem(prefix, &r.config)?;
    let path = |suffix: &str| dir.join(format!("{stem}{suffix}"));

    let config = path(".config.json");
    fs::write(&config, canonical_config(&r.config)?)?;
    let trace = match format {
        TraceFormat::Csv => {
            let p = path(".trace.csv");
            fs::write(&p, write_trace_csv(&r.trace)?)?;
            p
        }
        TraceFormat::Json => {
            let p = path(".trace.json");
            fs::write(&p, serde_json::to_string_pretty(&r.trace)? + "\n")?;
            p
        }
    };
    let trajectory = path(".trajectory.csv");
    fs::write(&trajectory, write_trajectory_csv(&r.trajectory)?)?;

    let mut svgs = Vec::new();
    if !r.trajectory.is_empty() {
        let markers = report_markers(r);
        for (axis, name, extent) in [(Axis::X, "x", r.config.table.width), (Axis::Y, "y", r.config.table.height)] {
            let p = path(&format!(".spacetime-{name}.svg"));
            fs::write(&p, render_spacetime_svg(&r.trajectory, axis, extent, &markers)?)?;
            svgs.push(p);
        }
    }
    for (name, state) in [("initial", &r.initial), ("final", &r.final_state)] {
        let p = path(&format!(".{name}.svg"));
        fs::write(&p, render_snapshot_svg(state, false))?;
        svgs.push(p);
    }
    let report = path(".report.json");
    fs::write(&report, serde_json::to_string_pretty(r)? + "\n")?;
    let summary = path(".summary.txt");
    fs::write(&summary, summary_text(r, &hash))?;
    Ok(RunArtifacts {
        config,
        trace,
        trajectory,
        svgs,
        report,
        summary,
    })
}
