//! Command-line front end: `limitset`, `mset`, `julia`, `periodic` and
//! `verify`.
//!
//! Settings come from an optional `--config` file of `key=value` lines,
//! overridden by flags. Exit status is 0 on success, 1 when verification
//! fails and 2 on usage or parse errors.

mod config;
mod verify;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex;

pub use config::{parse_complex, parse_size, Settings, UsageError};
pub use verify::{cauchy_jet, run_verify, CheckResult, Status, VerifyReport};

use crate::correspondence::{Parameter, SpherePoint};
use crate::domains::StandardDomains;
use crate::dynamics::{find_periodic, seed_grid, AmbiguityPolicy, NewtonOptions};
use crate::per11::CapParameter;
use crate::render::{
    encode_image, format_complex, render_julia_per11, render_limit_set, render_mset,
    ImageFormat, ImageGrid, Metadata, Palette, Plane, RenderOptions, Viewport, WORKERS_ENV,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "modmate", version, about = "Limit sets, parameter plane and periodic orbits of the modular matings family")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Render the limit sets of F_a in the dynamical plane.
    Limitset(Common),
    /// Render the modular Mandelbrot set in the a-plane.
    Mset(Common),
    /// Render the filled Julia set of z + 1/z + A.
    Julia(Common),
    /// Find periodic points of the restricted branch by Newton's method.
    Periodic(Common),
    /// Run the built-in checks and print a PASS/FAIL report.
    Verify(Common),
}

/// Flags shared by all commands; each command rejects those it does not use.
#[derive(Args, Debug, Default)]
struct Common {
    /// key=value file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Family parameter a, written x+yi.
    #[arg(long, allow_hyphen_values = true)]
    a: Option<String>,
    /// Per_1(1) parameter A, written x+yi.
    #[arg(long = "A", visible_alias = "cap", allow_hyphen_values = true)]
    cap: Option<String>,
    /// Viewport centre, written x+yi.
    #[arg(long, visible_alias = "centre", allow_hyphen_values = true)]
    center: Option<String>,
    /// Viewport width in plane units.
    #[arg(long)]
    width: Option<String>,
    /// Pixels: N or WxH.
    #[arg(long)]
    size: Option<String>,
    /// Coordinate of the viewport: big (Z) or small (z).
    #[arg(long)]
    plane: Option<String>,
    #[arg(long)]
    max_iter: Option<String>,
    #[arg(long)]
    tile: Option<String>,
    /// Worker threads; defaults to $MODMATE_WORKERS, then the core count.
    #[arg(long)]
    workers: Option<String>,
    /// classic or gray.
    #[arg(long)]
    palette: Option<String>,
    /// Report ambiguous steps instead of taking the deeper image.
    #[arg(long)]
    strict: bool,
    /// Escape-time pixels only, without the inverse-iteration cover.
    #[arg(long)]
    no_cover: bool,
    /// Per_1(1) escape radius.
    #[arg(long)]
    escape_radius: Option<String>,
    /// Output file (.ppm or .png; tables for periodic).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Cycle period for periodic.
    #[arg(long, allow_hyphen_values = true)]
    period: Option<String>,
    /// Newton seeds per side for periodic.
    #[arg(long)]
    seeds: Option<String>,
    /// Multiplies every verify tolerance.
    #[arg(long)]
    tol_scale: Option<String>,
}

impl Common {
    fn settings(&self) -> Result<Settings, UsageError> {
        let mut s = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| UsageError(format!("cannot read config {}: {e}", path.display())))?;
                Settings::parse(&text)?
            }
            None => Settings::default(),
        };
        let mut flags = Settings::default();
        let pairs: [(&str, &Option<String>); 13] = [
            ("a", &self.a),
            ("A", &self.cap),
            ("center", &self.center),
            ("width", &self.width),
            ("size", &self.size),
            ("plane", &self.plane),
            ("max_iter", &self.max_iter),
            ("tile", &self.tile),
            ("workers", &self.workers),
            ("palette", &self.palette),
            ("escape_radius", &self.escape_radius),
            ("period", &self.period),
            ("seeds", &self.seeds),
        ];
        for (k, v) in pairs {
            if let Some(v) = v {
                flags.set(k, v.clone());
            }
        }
        if let Some(v) = &self.tol_scale {
            flags.set("tol_scale", v.clone());
        }
        if let Some(out) = &self.out {
            flags.set("out", out.to_string_lossy().into_owned());
        }
        if self.strict {
            flags.set("strict", "true");
        }
        if self.no_cover {
            flags.set("cover", "false");
        }
        s.merge(&flags);
        Ok(s)
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// exit status. Reports go to `stdout`, diagnostics to `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(text.as_bytes()) } else { stdout.write_all(text.as_bytes()) };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Limitset(c) => c.settings().and_then(|s| cmd_limitset(&s, stdout)),
        Command::Mset(c) => c.settings().and_then(|s| cmd_mset(&s, stdout)),
        Command::Julia(c) => c.settings().and_then(|s| cmd_julia(&s, stdout)),
        Command::Periodic(c) => c.settings().and_then(|s| cmd_periodic(&s, stdout)),
        Command::Verify(c) => c.settings().and_then(|s| cmd_verify(&s, stdout)),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            let _ = writeln!(stderr, "run 'modmate help' for usage");
            EXIT_USAGE
        }
    }
}

const RENDER_KEYS: [&str; 13] = [
    "a", "center", "width", "size", "plane", "max_iter", "tile", "workers", "palette",
    "strict", "cover", "out", "escape_radius",
];

fn usage(msg: impl Into<String>) -> UsageError {
    UsageError(msg.into())
}

fn parameter(s: &Settings) -> Result<Parameter<f64>, UsageError> {
    let a = s.complex("a")?.ok_or_else(|| usage("missing --a"))?;
    Parameter::new(a).map_err(|e| usage(format!("a: {e}")))
}

struct Frame {
    viewport: Viewport,
    opts: RenderOptions,
    out: PathBuf,
}

fn frame(s: &Settings, centre: Complex<f64>, width: f64, size: usize, max_iter: u32) -> Result<Frame, UsageError> {
    let centre = s.complex("center")?.unwrap_or(centre);
    let width = s.real("width")?.unwrap_or(width);
    let (w, h) = match s.get("size") {
        Some(v) => parse_size(v)?,
        None => (size, size),
    };
    let plane = match s.get("plane").unwrap_or("big") {
        "big" | "Z" => Plane::Big,
        "small" | "z" => Plane::Small,
        other => return Err(usage(format!("plane: expected big or small, got '{other}'"))),
    };
    let viewport = Viewport::new(centre, width, w, h)
        .map_err(|e| usage(e.to_string()))?
        .in_plane(plane);
    let mut opts = RenderOptions { max_iter, ..Default::default() };
    if let Some(n) = s.count("max_iter")? {
        opts.max_iter = u32::try_from(n).map_err(|_| usage("max_iter: too large"))?;
        if n == 0 {
            return Err(usage("max_iter must be positive"));
        }
    }
    if let Some(n) = s.count("tile")? {
        if n == 0 {
            return Err(usage("tile must be positive"));
        }
        opts.tile_size = n;
    }
    opts.workers = match s.count("workers")? {
        Some(0) => return Err(usage("workers must be positive")),
        Some(n) => Some(n),
        None => None,
    };
    if let Some(p) = s.get("palette") {
        opts.palette = Palette::parse(p).ok_or_else(|| usage(format!("palette: unknown '{p}'")))?;
    }
    if s.flag("strict")?.unwrap_or(false) {
        opts.policy = AmbiguityPolicy::Strict;
    }
    if let Some(c) = s.flag("cover")? {
        opts.cover = c;
    }
    if let Some(r) = s.real("escape_radius")? {
        if r <= 0.0 {
            return Err(usage("escape_radius must be positive"));
        }
        opts.escape_radius = r;
    }
    let out = s.get("out").map(PathBuf::from).ok_or_else(|| usage("missing --out"))?;
    Ok(Frame { viewport, opts, out })
}

/// Writes the image and its sidecar, then reports both paths.
fn write_render(
    grid: &mut ImageGrid,
    settings: &Settings,
    command: &str,
    out: &Path,
    stdout: &mut dyn Write,
) -> Result<i32, UsageError> {
    stamp(&mut grid.metadata, settings, command);
    let bytes = encode_image(grid, ImageFormat::from_path(out)).map_err(|e| usage(e.to_string()))?;
    std::fs::write(out, bytes).map_err(|e| usage(format!("cannot write {}: {e}", out.display())))?;
    let meta = grid
        .metadata
        .write_sidecar(out)
        .map_err(|e| usage(format!("cannot write sidecar: {e}")))?;
    let _ = writeln!(stdout, "wrote {} ({}x{})", out.display(), grid.width, grid.height);
    let _ = writeln!(stdout, "wrote {}", meta.display());
    Ok(EXIT_OK)
}

/// Adds the resolved settings, so `modmate <command> --config <sidecar>`
/// reproduces the run.
fn stamp(m: &mut Metadata, settings: &Settings, command: &str) {
    m.set("command", command);
    m.set("version", env!("CARGO_PKG_VERSION"));
    if let Ok(n) = std::env::var(WORKERS_ENV) {
        m.set("env_workers", n);
    }
    for (k, v) in settings.iter() {
        m.set(k, v);
    }
}

/// Default dynamical-plane frame: `Λₐ,₋` to the left of `P`, `Λₐ,₊` inside
/// the disc to its right.
pub const LIMITSET_CENTRE: (f64, f64) = (0.15, 0.0);
pub const LIMITSET_WIDTH: f64 = 4.4;
/// `𝒟 = {|a − 4| ≤ 3}` with a small margin.
pub const MSET_CENTRE: (f64, f64) = (4.0, 0.0);
pub const MSET_WIDTH: f64 = 6.2;

/// Keys a config file may carry from a sidecar without being flags.
const SIDECAR_KEYS: [&str; 9] = [
    "kind", "command", "version", "env_workers", "transversality_margin", "tangent_regime",
    "cover_nodes", "cover_truncated", "approximation",
];

fn allowed(extra: &[&'static str]) -> Vec<&'static str> {
    let mut v: Vec<&str> = SIDECAR_KEYS.to_vec();
    v.extend_from_slice(&RENDER_KEYS);
    v.extend_from_slice(extra);
    v
}

fn cmd_limitset(s: &Settings, stdout: &mut dyn Write) -> Result<i32, UsageError> {
    s.check_keys(&allowed(&[]))?;
    let a = parameter(s)?;
    if !a.in_standard_disc() {
        return Err(usage(format!("a = {} lies outside the disc |a-4| <= 3", format_complex(a.value()))));
    }
    let (cx, cy) = LIMITSET_CENTRE;
    let f = frame(s, Complex::new(cx, cy), LIMITSET_WIDTH, 512, 2000)?;
    let mut grid = render_limit_set(&a, &f.viewport, &f.opts).map_err(|e| usage(e.to_string()))?;
    if grid.metadata.get("tangent_regime") == Some("true") {
        let _ = writeln!(stdout, "warning: transversality margin below threshold (tangent regime)");
    }
    write_render(&mut grid, s, "limitset", &f.out, stdout)
}

fn cmd_mset(s: &Settings, stdout: &mut dyn Write) -> Result<i32, UsageError> {
    s.check_keys(&allowed(&[]))?;
    let (cx, cy) = MSET_CENTRE;
    let f = frame(s, Complex::new(cx, cy), MSET_WIDTH, 256, 2000)?;
    let mut grid = render_mset(&f.viewport, &f.opts).map_err(|e| usage(e.to_string()))?;
    write_render(&mut grid, s, "mset", &f.out, stdout)
}

fn cmd_julia(s: &Settings, stdout: &mut dyn Write) -> Result<i32, UsageError> {
    s.check_keys(&allowed(&["A"]))?;
    let cap = s.complex("A")?.ok_or_else(|| usage("missing --A"))?;
    let f = frame(s, Complex::new(0.0, 0.0), 8.0, 256, 50_000)?;
    let mut grid = render_julia_per11(&CapParameter::new(cap), &f.viewport, &f.opts)
        .map_err(|e| usage(e.to_string()))?;
    write_render(&mut grid, s, "julia", &f.out, stdout)
}

fn cmd_periodic(s: &Settings, stdout: &mut dyn Write) -> Result<i32, UsageError> {
    s.check_keys(&allowed(&["period", "seeds"]))?;
    let a = parameter(s)?;
    let period = s.count("period")?.ok_or_else(|| usage("missing --period"))?;
    if period == 0 {
        return Err(usage("period must be at least 1"));
    }
    let sd = StandardDomains::new(a).map_err(|e| usage(e.to_string()))?;
    let centre = s.complex("center")?.unwrap_or(Complex::new(LIMITSET_CENTRE.0, LIMITSET_CENTRE.1));
    let width = s.real("width")?.unwrap_or(LIMITSET_WIDTH);
    if !(width > 0.0) {
        return Err(usage("width must be positive"));
    }
    let n = s.count("seeds")?.unwrap_or(64);
    if n == 0 {
        return Err(usage("seeds must be positive"));
    }
    let seeds = seed_grid(&sd, centre, width, width, n);
    let found = find_periodic(&sd, period, &seeds, &NewtonOptions::default())
        .map_err(|e| usage(e.to_string()))?;

    let mut table = String::new();
    table.push_str("# period re im multiplier_abs multiplier residual repelling\n");
    for p in &found {
        table.push_str(&format!(
            "{} {:.15e} {:.15e} {:.6e} {} {:.3e} {}\n",
            p.period,
            p.point.re,
            p.point.im,
            p.multiplier.norm(),
            SpherePoint::Finite(p.multiplier),
            p.residual,
            p.is_repelling()
        ));
    }
    let _ = stdout.write_all(table.as_bytes());
    let _ = writeln!(stdout, "# {} points", found.len());
    if let Some(out) = s.get("out") {
        let out = PathBuf::from(out);
        std::fs::write(&out, &table).map_err(|e| usage(format!("cannot write {}: {e}", out.display())))?;
        let mut m = Metadata::new();
        m.set("kind", "periodic");
        stamp(&mut m, s, "periodic");
        m.write_sidecar(&out).map_err(|e| usage(format!("cannot write sidecar: {e}")))?;
    }
    Ok(EXIT_OK)
}

fn cmd_verify(s: &Settings, stdout: &mut dyn Write) -> Result<i32, UsageError> {
    s.check_keys(&["a", "tol_scale", "workers"])?;
    let a = match s.get("a") {
        Some(_) => parameter(s)?,
        None => Parameter::from_parts(4.5, 0.0).expect("valid default"),
    };
    let scale = s.real("tol_scale")?.unwrap_or(1.0);
    if scale < 0.0 {
        return Err(usage("tol_scale must be non-negative"));
    }
    let report = run_verify(&a, scale);
    let _ = writeln!(stdout, "{report}");
    Ok(if report.passed() { EXIT_OK } else { EXIT_VERIFY_FAILED })
}
