//! Command-line front end. Exit codes: 0 solved or valid, 1 infeasible or
//! invalid, 2 usage or input errors.

use std::ffi::OsString;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::dcgraph::build_dc;
use crate::infinite::{build_gpm, solve_infinite, Window};
use crate::instance::{parse_instance, Tiling, TilingInstance, Violation, ViolationCode};
use crate::oracle::{check_tiling, check_window_tiling, enumerate_with, EnumerateOptions};
use crate::render::{parse_layers, render, render_heights, RenderOptions};
use crate::solvers::{
    default_flips, generate_instance_with_flips, solve, Algorithm, OutcomeDoc, SolveOutcome, Status,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "calisson", version, about = "Lozenge tilings under non-overlapping and saliency constraints")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Solve an instance and print the outcome as JSON.
    Solve(SolveArgs),
    /// Validate a tiling, or an infeasibility certificate, against an instance.
    Check(CheckArgs),
    /// Count tilings by exhaustive search (small regions only).
    Count(CountArgs),
    /// Draw an instance, optionally with a solution, as SVG.
    Render(RenderArgs),
    /// Generate a feasible hexagon instance from a random tiling.
    Gen(GenArgs),
    /// Time solvers on generated instances.
    Bench(BenchArgs),
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    /// Instance JSON file, or `-` for stdin.
    #[arg(short, long)]
    pub input: PathBuf,
    #[arg(long, default_value = "bf")]
    pub algo: Algorithm,
    /// Window `x,y,z,r` for the infinite grid.
    #[arg(long)]
    pub window: Option<Window>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Also write an SVG drawing of the outcome.
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    /// A tiling `{"lozenges": [...]}` or a solve outcome.
    #[arg(short, long)]
    pub tiling: PathBuf,
}

#[derive(Args, Debug)]
pub struct CountArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    /// Stop after this many tilings.
    #[arg(long)]
    pub cap: Option<u64>,
    /// Largest region accepted, in triangles.
    #[arg(long, default_value_t = crate::oracle::DEFAULT_TRIANGLE_LIMIT)]
    pub limit: usize,
}

#[derive(Args, Debug)]
pub struct RenderArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    /// Solve outcome JSON to draw on top of the instance.
    #[arg(short, long)]
    pub solution: Option<PathBuf>,
    /// Comma-separated subset of grid,constraints,tiling,heights,dcgraph,cycle.
    #[arg(long)]
    pub layers: Option<String>,
    /// Render options JSON (scale, layers, palette).
    #[arg(long)]
    pub options: Option<PathBuf>,
    /// Draw the numbered height view of the solution instead.
    #[arg(long)]
    pub heights: bool,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(short = 'n', long)]
    pub size: u32,
    #[arg(short = 'k', long)]
    pub clues: usize,
    #[arg(long)]
    pub seed: u64,
    /// Random cubes stacked before picking clues; defaults to n^3/2.
    #[arg(long)]
    pub flips: Option<u64>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_value = "10,20,40,80")]
    pub sizes: Vec<u32>,
    #[arg(long, value_delimiter = ',', default_value = "bf,advancing")]
    pub algos: Vec<Algorithm>,
    /// Seeds 0..N per size.
    #[arg(long, default_value_t = 5)]
    pub seeds: u64,
    /// Clues per instance; defaults to 3n.
    #[arg(long)]
    pub clues: Option<usize>,
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

/// A failure that ends the command with a specific exit code.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: EXIT_USAGE, message: message.into() }
    }
}

impl From<Violation> for Failure {
    fn from(v: Violation) -> Self {
        Failure::usage(v.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::usage(e.to_string())
    }
}

type CmdResult = Result<i32, Failure>;

struct Io<'a> {
    stdout: &'a mut dyn Write,
    stderr: &'a mut dyn Write,
}

impl Io<'_> {
    fn emit(&mut self, path: Option<&Path>, text: &str) -> Result<(), Failure> {
        match path {
            Some(p) => fs::write(p, text)?,
            None => {
                self.stdout.write_all(text.as_bytes())?;
                if !text.ends_with('\n') {
                    self.stdout.write_all(b"\n")?;
                }
            }
        }
        Ok(())
    }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
    }
}

fn load_instance(path: &Path) -> Result<TilingInstance, Failure> {
    let text = read_text(path)?;
    parse_instance(&text).map_err(|e| {
        let msgs: Vec<String> = e.violations().iter().map(|v| v.to_string()).collect();
        Failure::usage(format!("{}: {}", path.display(), msgs.join("; ")))
    })
}

fn load_outcome(path: &Path) -> Result<OutcomeDoc, Failure> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

/// Run the CLI; returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(text.as_bytes()) } else { stdout.write_all(text.as_bytes()) };
            return code;
        }
    };
    let mut io = Io { stdout, stderr };
    let result = match &cli.command {
        Command::Solve(a) => cmd_solve(a, &mut io),
        Command::Check(a) => cmd_check(a, &mut io),
        Command::Count(a) => cmd_count(a, &mut io),
        Command::Render(a) => cmd_render(a, &mut io),
        Command::Gen(a) => cmd_gen(a, &mut io),
        Command::Bench(a) => cmd_bench(a, &mut io),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(io.stderr, "error: {}", f.message);
            f.code
        }
    }
}

fn run_solver(instance: &TilingInstance, algo: Algorithm, window: Option<Window>) -> Result<SolveOutcome, Failure> {
    let bounded = instance.region().is_bounded();
    match (algo, bounded) {
        (Algorithm::Infinite, true) => {
            return Err(Failure::usage("--algo infinite requires a region of type \"infinite\""));
        }
        (Algorithm::Infinite, false) => {}
        (_, false) => return Err(Failure::usage(format!("--algo {algo:?} requires a bounded region").to_lowercase())),
        (_, true) if window.is_some() => return Err(Failure::usage("--window applies to --algo infinite only")),
        _ => {}
    }
    let out = if algo == Algorithm::Infinite { solve_infinite(instance, window) } else { solve(instance, algo) };
    out.map_err(|e| Failure::usage(e.to_string()))
}

fn status_code(status: Status) -> i32 {
    match status {
        Status::Tiled => EXIT_OK,
        Status::Infeasible => EXIT_NEGATIVE,
    }
}

fn cmd_solve(a: &SolveArgs, io: &mut Io) -> CmdResult {
    let instance = load_instance(&a.input)?;
    let out = run_solver(&instance, a.algo, a.window)?;
    log::info!("{:?} finished in {:.3} ms", a.algo, out.stats.elapsed_ms);
    io.emit(a.output.as_deref(), &out.to_json())?;
    if let Some(svg) = &a.svg {
        fs::write(svg, render(&instance, Some(&out), &RenderOptions::default())?)?;
    }
    Ok(status_code(out.status))
}

fn cmd_check(a: &CheckArgs, io: &mut Io) -> CmdResult {
    let instance = load_instance(&a.input)?;
    let text = read_text(&a.tiling)?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Failure::usage(format!("{}: {e}", a.tiling.display())))?;
    let doc: OutcomeDoc = if value.get("status").is_some() {
        serde_json::from_value(value).map_err(|e| Failure::usage(e.to_string()))?
    } else {
        let lozenges = serde_json::from_value(value.get("lozenges").cloned().unwrap_or(json!(null)))
            .map_err(|e| Failure::usage(format!("{}: {e}", a.tiling.display())))?;
        OutcomeDoc {
            status: Status::Tiled,
            algorithm: None,
            lozenges: Some(lozenges),
            heights: None,
            cycle: None,
            cycle_weight: None,
            window: None,
            stats: None,
        }
    };
    let report = match doc.status {
        Status::Tiled => {
            let tiling = doc.tiling().ok_or_else(|| Failure::usage("outcome has no lozenges"))?;
            check_tiled(&instance, &tiling, doc.window)?
        }
        Status::Infeasible => check_certificate(&instance, &doc)?,
    };
    let valid = report.get("valid") == Some(&json!(true));
    io.emit(None, &report.to_string())?;
    Ok(if valid { EXIT_OK } else { EXIT_NEGATIVE })
}

fn check_tiled(instance: &TilingInstance, tiling: &Tiling, window: Option<Window>) -> Result<serde_json::Value, Failure> {
    let verdict = if instance.region().is_bounded() {
        check_tiling(instance, tiling)
    } else {
        let w = window.ok_or_else(|| Failure::usage("a tiling of the infinite grid needs its window"))?;
        check_window_tiling(instance, &w.region(), tiling)
    };
    Ok(match verdict {
        Ok(()) => json!({"valid": true, "kind": "tiling", "lozenges": tiling.len()}),
        Err(v) => json!({"valid": false, "kind": "tiling", "violation": v.to_json()}),
    })
}

/// An infeasible claim is valid when its cycle exists in the constraint
/// graph and has negative total weight.
fn check_certificate(instance: &TilingInstance, doc: &OutcomeDoc) -> Result<serde_json::Value, Failure> {
    let vs = doc.cycle_vertices().ok_or_else(|| Failure::usage("infeasible outcome has no cycle"))?;
    let g = if instance.region().is_bounded() {
        build_dc(instance).map_err(|e| Failure::usage(e.to_string()))?
    } else {
        build_gpm(instance.x1(), instance.x2())
    };
    Ok(match crate::dcgraph::NegativeCycleCertificate::from_vertices(&g, &vs) {
        Some(c) if c.total_weight < 0 && c.verify(&g) => {
            json!({"valid": true, "kind": "certificate", "cycle_weight": c.total_weight})
        }
        Some(c) => json!({"valid": false, "kind": "certificate", "cycle_weight": c.total_weight,
                          "violation": {"kind": "nonnegative-cycle", "message": "cycle weight is not negative"}}),
        None => json!({"valid": false, "kind": "certificate",
                       "violation": {"kind": "missing-arc", "message": "consecutive cycle vertices are not joined by an arc"}}),
    })
}

fn cmd_count(a: &CountArgs, io: &mut Io) -> CmdResult {
    let instance = load_instance(&a.input)?;
    let opts = EnumerateOptions { max_count: a.cap, triangle_limit: a.limit, ..EnumerateOptions::default() };
    let res = enumerate_with(&instance, &opts)?;
    io.emit(None, &json!({"count": res.count, "exhausted": res.exhausted}).to_string())?;
    Ok(if res.count > 0 { EXIT_OK } else { EXIT_NEGATIVE })
}

fn cmd_render(a: &RenderArgs, io: &mut Io) -> CmdResult {
    let instance = load_instance(&a.input)?;
    let mut opts = match &a.options {
        Some(p) => RenderOptions::from_json(&read_text(p)?)?,
        None => RenderOptions::default(),
    };
    if let Some(l) = &a.layers {
        opts.layers = parse_layers(l)?;
    }
    let outcome = match &a.solution {
        Some(p) => Some(load_outcome(p)?.into_outcome(&instance)?),
        None => None,
    };
    let svg = if a.heights {
        let out = outcome.as_ref().ok_or_else(|| Failure::usage("--heights needs --solution"))?;
        let h = out.heights.as_ref().ok_or_else(|| Failure::usage("solution has no heights"))?;
        let region = match out.window {
            Some(w) if !instance.region().is_bounded() => w.region(),
            _ => instance.region().clone(),
        };
        render_heights(h, &region, &opts)?
    } else {
        render(&instance, outcome.as_ref(), &opts)?
    };
    io.emit(a.output.as_deref(), &svg)?;
    Ok(EXIT_OK)
}

fn cmd_gen(a: &GenArgs, io: &mut Io) -> CmdResult {
    if a.size == 0 {
        return Err(Violation::new(ViolationCode::InvalidArgument, "size must be at least 1").into());
    }
    let flips = a.flips.unwrap_or_else(|| default_flips(a.size));
    let inst = generate_instance_with_flips(a.size, a.clues, a.seed, flips).map_err(|e| Failure::usage(e.to_string()))?;
    io.emit(a.output.as_deref(), &inst.to_json())?;
    Ok(EXIT_OK)
}

fn cmd_bench(a: &BenchArgs, io: &mut Io) -> CmdResult {
    if a.algos.contains(&Algorithm::Infinite) || a.algos.contains(&Algorithm::Thurston) {
        return Err(Failure::usage("bench runs constrained hexagons: use bf and/or advancing"));
    }
    let mut csv = String::from("algo,size,seed,status,millis,relaxations\n");
    for &n in &a.sizes {
        let clues = a.clues.unwrap_or(3 * n as usize);
        for seed in 0..a.seeds {
            let inst = generate_instance_with_flips(n, clues, seed, default_flips(n))
                .map_err(|e| Failure::usage(e.to_string()))?;
            for &algo in &a.algos {
                let start = Instant::now();
                let out = solve(&inst, algo).map_err(|e| Failure::usage(e.to_string()))?;
                let ms = start.elapsed().as_secs_f64() * 1e3;
                let work = out.stats.relaxations.or(out.stats.raises).unwrap_or(0);
                let status = match out.status {
                    Status::Tiled => "tiled",
                    Status::Infeasible => "infeasible",
                };
                let algo = serde_json::to_value(algo).unwrap();
                csv.push_str(&format!("{},{n},{seed},{status},{ms:.3},{work}\n", algo.as_str().unwrap()));
            }
        }
    }
    io.emit(a.csv.as_deref(), &csv)?;
    if a.csv.is_some() {
        let _ = writeln!(io.stderr, "wrote {} rows", csv.lines().count() - 1);
    }
    Ok(EXIT_OK)
}
