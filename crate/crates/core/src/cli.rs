//! The `pwlhc` command line: `solve | verify | cycles | orbit | portrait`.
//!
//! Exit codes: 0 success, 1 checks failed, 2 evaluation or input error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::codim3::{self, Mode, SolveOptions, VerifyOptions};
use crate::cycle::{find_cycle, Cycle};
use crate::error::{Error, Result};
use crate::format::{float_fields, write_atomic};
use crate::homoclinic::{branch_segments, build_s_orbit, OrbitOptions};
use crate::map::{MapConfig, PwlMap, DEFAULT_TOL_SIGMA};
use crate::symbolic::Word;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "pwlhc",
    version,
    about = "Saddle cycles, homoclinic connections and X^kY attractors of piecewise-linear maps"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, clap::Args)]
pub struct CommonArgs {
    /// JSON run configuration.
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub k_max: Option<usize>,
    #[arg(long)]
    pub tol_sigma: Option<f64>,
    /// Directory for output files; created if missing.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// `converse` reports an inadmissible S-orbit without failing on it.
    #[arg(long, value_parser = parse_mode)]
    pub mode: Option<Mode>,
}

fn parse_mode(s: &str) -> std::result::Result<Mode, String> {
    match s {
        "direct" => Ok(Mode::Direct),
        "converse" => Ok(Mode::Converse),
        other => Err(format!(
            "unknown mode {other:?}; expected direct or converse"
        )),
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Newton-solve the three conditions over (tauL, tauR, deltaL).
    Solve(CommonArgs),
    /// Check every hypothesis and sweep the X^kY-cycles.
    Verify(CommonArgs),
    /// Report the X-cycle and the X^kY and X^kY^0̄ cycles as JSON.
    Cycles(CommonArgs),
    /// Export the homoclinic orbit and its manifold segments as CSV.
    Orbit(CommonArgs),
    /// Write cycles.csv, orbit.csv and segments.csv.
    Portrait(CommonArgs),
}

/// Contents of a `--config` file. Output of `solve` is itself a valid config.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub map: MapConfig,
    #[serde(rename = "X")]
    pub x: String,
    #[serde(rename = "Y")]
    pub y: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_max: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol_sigma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolveOptions>,
}

/// Output of `solve`; its flattened config fields make it a valid `--config`.
#[derive(Debug, Serialize)]
struct SolveReport {
    status: &'static str,
    #[serde(flatten)]
    config: RunConfig,
    residual_norm: f64,
    #[serde(flatten)]
    outcome: codim3::SolveOutcome,
}

struct Resolved {
    config: RunConfig,
    map: PwlMap,
    x: Word,
    y: Word,
    k_max: usize,
    tol_sigma: f64,
    mode: Mode,
    out_dir: Option<PathBuf>,
}

impl Resolved {
    fn load(args: &CommonArgs, distinct_heads: bool) -> Result<Resolved> {
        let text = std::fs::read_to_string(&args.config)?;
        let config: RunConfig = serde_json::from_str(&text)?;
        let x: Word = config
            .x
            .parse()
            .map_err(|e| Error::Config(format!("X: {e}")))?;
        let y: Word = config
            .y
            .parse()
            .map_err(|e| Error::Config(format!("Y: {e}")))?;
        if distinct_heads && x.first() == y.first() {
            return Err(Error::Config(
                "X and Y must start with different symbols".into(),
            ));
        }
        let map = config.map.to_map()?;
        let tol_sigma = args
            .tol_sigma
            .or(config.tol_sigma)
            .unwrap_or(DEFAULT_TOL_SIGMA);
        if !tol_sigma.is_finite() || tol_sigma < 0.0 {
            return Err(Error::Config(format!(
                "tol_sigma must be a non-negative number, got {tol_sigma}"
            )));
        }
        Ok(Resolved {
            k_max: args.k_max.or(config.k_max).unwrap_or(7),
            mode: args.mode.or(config.mode).unwrap_or_default(),
            out_dir: args.out_dir.clone(),
            tol_sigma,
            config,
            map,
            x,
            y,
        })
    }

    fn write(&self, name: &str, contents: &[u8]) -> Result<()> {
        if let Some(dir) = &self.out_dir {
            write_atomic(&dir.join(name), contents)?;
        }
        Ok(())
    }
}

fn to_json<T: Serialize>(v: &T) -> Result<Vec<u8>> {
    let mut s = serde_json::to_vec_pretty(v)?;
    s.push(b'\n');
    Ok(s)
}

/// Parses `args` and runs the command, writing the primary output to `out`
/// and diagnostics to `err`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return EXIT_ERROR;
            }
            let _ = write!(out, "{e}");
            return EXIT_PASS;
        }
    };
    let result = match &cli.command {
        Command::Solve(a) => cmd_solve(a, out),
        Command::Verify(a) => cmd_verify(a, out),
        Command::Cycles(a) => cmd_cycles(a, out),
        Command::Orbit(a) => cmd_orbit(a, out),
        Command::Portrait(a) => cmd_portrait(a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let body = json!({ "status": "error", "error": e.to_string() });
            let _ = writeln!(err, "{body}");
            EXIT_ERROR
        }
    }
}

fn cmd_solve(args: &CommonArgs, out: &mut dyn Write) -> Result<i32> {
    let r = Resolved::load(args, true)?;
    let MapConfig::Bcnf3(p0) = r.config.map else {
        return Err(Error::Config("solve requires bcnf3".into()));
    };
    let opts = r.config.solver.unwrap_or_default();
    let outcome = codim3::solve(&p0, &r.x, &r.y, &opts)?;
    let body = SolveReport {
        status: "converged",
        config: RunConfig {
            map: MapConfig::Bcnf3(outcome.params),
            ..r.config.clone()
        },
        residual_norm: outcome.residual.norm_inf(),
        outcome,
    };
    let bytes = to_json(&body)?;
    r.write("solve.json", &bytes)?;
    out.write_all(&bytes)?;
    Ok(EXIT_PASS)
}

fn cmd_verify(args: &CommonArgs, out: &mut dyn Write) -> Result<i32> {
    let r = Resolved::load(args, true)?;
    let opts = VerifyOptions {
        k_max: r.k_max,
        tol_sigma: r.tol_sigma,
        mode: r.mode,
        ..VerifyOptions::default()
    };
    let report = codim3::verify_theorems(&r.map, &r.x, &r.y, &opts);
    let bytes = to_json(&report)?;
    r.write("verify.json", &bytes)?;
    out.write_all(&bytes)?;
    Ok(if report.passed {
        EXIT_PASS
    } else {
        EXIT_FAILED
    })
}

/// `(k, cycle)` for the `X^kY` family followed by the `X^kY^0̄` family.
fn cycle_families(r: &Resolved) -> Result<Vec<(usize, Result<Cycle>)>> {
    let y_bar = r.y.flip(0)?;
    let mut v = Vec::new();
    for tail in [&r.y, &y_bar] {
        for k in 0..=r.k_max {
            v.push((k, find_cycle(&r.map, &r.x.power_then(k, tail), r.tol_sigma)));
        }
    }
    Ok(v)
}

fn cmd_cycles(args: &CommonArgs, out: &mut dyn Write) -> Result<i32> {
    let r = Resolved::load(args, false)?;
    let x_cycle = find_cycle(&r.map, &r.x, r.tol_sigma)?;
    let entries: Vec<serde_json::Value> = cycle_families(&r)?
        .into_iter()
        .map(|(k, c)| match c {
            Ok(c) => json!({ "k": k, "cycle": c.report() }),
            Err(e) => json!({ "k": k, "error": e.to_string() }),
        })
        .collect();
    let body = json!({ "x_cycle": x_cycle.report(), "cycles": entries });
    let bytes = to_json(&body)?;
    r.write("cycles.json", &bytes)?;
    out.write_all(&bytes)?;
    Ok(EXIT_PASS)
}

fn cycles_csv(r: &Resolved) -> Result<String> {
    let dim = r.map.dim();
    let mut s = String::from("k,word,point_index,side,stability");
    for k in 1..=dim {
        s.push_str(&format!(",x{k}"));
    }
    s.push('\n');
    for (k, c) in cycle_families(r)? {
        let Ok(c) = c else { continue };
        for (i, x) in c.points.iter().enumerate() {
            s.push_str(&format!(
                "{k},{},{i},{},{},{}\n",
                c.word,
                c.sides[i].tag(),
                c.stability.tag(),
                float_fields(x.as_slice())
            ));
        }
    }
    Ok(s)
}

fn orbit_csvs(r: &Resolved) -> Result<(String, String)> {
    let eval = codim3::evaluate(&r.map, &r.x, &r.y)?;
    let orbit = build_s_orbit(
        &r.map,
        &r.x,
        &r.y,
        &eval.frame,
        &eval.x0,
        &OrbitOptions::default(),
    )?;
    let branch = branch_segments(&orbit)?;
    Ok((orbit.to_csv(), branch.to_csv()))
}

fn cmd_orbit(args: &CommonArgs, out: &mut dyn Write) -> Result<i32> {
    let r = Resolved::load(args, true)?;
    let (orbit, segments) = orbit_csvs(&r)?;
    r.write("orbit.csv", orbit.as_bytes())?;
    r.write("segments.csv", segments.as_bytes())?;
    out.write_all(orbit.as_bytes())?;
    Ok(EXIT_PASS)
}

fn cmd_portrait(args: &CommonArgs, out: &mut dyn Write) -> Result<i32> {
    let mut r = Resolved::load(args, true)?;
    let dir = r
        .out_dir
        .get_or_insert_with(|| Path::new("portrait").to_path_buf())
        .clone();
    std::fs::create_dir_all(&dir)?;
    let cycles = cycles_csv(&r)?;
    let (orbit, segments) = orbit_csvs(&r)?;
    r.write("cycles.csv", cycles.as_bytes())?;
    r.write("orbit.csv", orbit.as_bytes())?;
    r.write("segments.csv", segments.as_bytes())?;
    writeln!(
        out,
        "{}",
        json!({ "status": "written", "out_dir": dir.display().to_string() })
    )?;
    Ok(EXIT_PASS)
}
