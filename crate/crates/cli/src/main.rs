//! `flatfront`: build, verify, sample and mesh flat fronts from the command
//! line.
//!
//! Exit codes: 0 success, 1 verification failure, 2 invalid input,
//! 3 numerical failure. Errors go to stderr as one JSON line.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use flatfront::front::{sample_mesh, sample_plan, FrontMesh, GridSpec};
use flatfront::gallery::{self, CATALOG};
use flatfront::json::to_deterministic_string;
use flatfront::ply::to_ply_string;
use flatfront::report::{verify, VerificationReport};
use flatfront::spec::{Built, CurveSpec};
use flatfront::{Error, C64};

#[derive(Parser, Debug)]
#[command(name = "flatfront", version, about = "Flat fronts in hyperbolic space from meromorphic data")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// The built-in example families.
    Gallery {
        #[command(subcommand)]
        cmd: GalleryCmd,
    },
    /// Check every identity for a curve spec and emit a report.
    Verify {
        #[arg(long)]
        spec: PathBuf,
        #[command(flatten)]
        check: CheckArgs,
        /// Write the report here instead of stdout.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Evaluate a curve spec at points.
    Sample {
        #[arg(long)]
        spec: PathBuf,
        /// A point `re,im` (repeatable).
        #[arg(long = "point", allow_hyphen_values = true)]
        points: Vec<String>,
        /// JSON file holding a list of `[re, im]` pairs.
        #[arg(long)]
        points_file: Option<PathBuf>,
        /// Write the rows here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Mesh the front of a Legendrian curve spec.
    Mesh {
        #[arg(long)]
        spec: PathBuf,
        /// `rmin,rmax,nr,ntheta`; gallery specs default to their own plan.
        #[arg(long)]
        grid: Option<String>,
        #[arg(long)]
        mesh: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
enum GalleryCmd {
    /// List the entries.
    List,
    /// Build an entry, optionally meshing and verifying it.
    Build {
        name: String,
        /// `name=value` (repeatable).
        #[arg(long = "param", allow_hyphen_values = true)]
        params: Vec<String>,
        #[arg(long)]
        mesh: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        grid: Option<String>,
        #[command(flatten)]
        check: CheckArgs,
    },
}

#[derive(Args, Debug, Clone, Copy)]
struct CheckArgs {
    #[arg(long, default_value_t = 200)]
    samples: usize,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// A failure with its exit code.
struct Fail {
    exit: u8,
    code: String,
    message: String,
    point: Option<C64>,
}

impl Fail {
    fn input(code: &str, message: impl Into<String>) -> Self {
        Fail {
            exit: 2,
            code: code.into(),
            message: message.into(),
            point: None,
        }
    }

    fn io(path: &Path, err: std::io::Error, exit: u8) -> Self {
        Fail {
            exit,
            code: "io-error".into(),
            message: format!("{}: {}", path.display(), err),
            point: None,
        }
    }

    fn at(mut self, z: C64) -> Self {
        self.point = Some(z);
        self.message = format!("at z = {}: {}", z, self.message);
        self
    }
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail {
            exit: if e.is_invalid_input() { 2 } else { 3 },
            code: e.code().into(),
            message: e.to_string(),
            point: None,
        }
    }
}

type CliResult = Result<u8, Fail>;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("FLATFRONT_LOG", "error"))
        .format_timestamp(None)
        .init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            print!("{}", e);
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.kind().to_string();
            let detail = e.to_string();
            let first = detail.lines().next().unwrap_or(&msg).trim_start_matches("error: ");
            report_fail(&Fail::input("usage", first));
            return ExitCode::from(2);
        }
    };
    match run(cli.cmd) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            report_fail(&f);
            ExitCode::from(f.exit)
        }
    }
}

fn report_fail(f: &Fail) {
    let mut v = json!({"error": f.code, "message": f.message, "exit": f.exit});
    if let Some(z) = f.point {
        v["point"] = json!([z.re, z.im]);
    }
    eprintln!("{}", v);
}

fn run(cmd: Cmd) -> CliResult {
    match cmd {
        Cmd::Gallery { cmd: GalleryCmd::List } => {
            for item in CATALOG.iter() {
                println!("{}", item.name);
            }
            Ok(0)
        }
        Cmd::Gallery {
            cmd:
                GalleryCmd::Build {
                    name,
                    params,
                    mesh,
                    report,
                    grid,
                    check,
                },
        } => cmd_gallery(&name, &params, mesh.as_deref(), report.as_deref(), grid.as_deref(), check),
        Cmd::Verify { spec, check, report } => cmd_verify(&spec, check, report.as_deref()),
        Cmd::Sample {
            spec,
            points,
            points_file,
            output,
        } => cmd_sample(&spec, &points, points_file.as_deref(), output.as_deref()),
        Cmd::Mesh { spec, grid, mesh } => cmd_mesh(&spec, grid.as_deref(), &mesh),
    }
}

fn parse_param(s: &str) -> Result<(String, f64), Fail> {
    let bad = || Fail::input("invalid-parameter", format!("expected name=value, got '{}'", s));
    let (k, v) = s.split_once('=').ok_or_else(bad)?;
    let k = k.trim();
    if k.is_empty() {
        return Err(bad());
    }
    let v: f64 = v.trim().parse().map_err(|_| bad())?;
    Ok((k.to_string(), v))
}

fn parse_point(s: &str) -> Result<C64, Fail> {
    let bad = || Fail::input("invalid-point", format!("expected re,im, got '{}'", s));
    let mut parts = s.split(',');
    let re: f64 = parts.next().ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
    let im: f64 = match parts.next() {
        Some(p) => p.trim().parse().map_err(|_| bad())?,
        None => 0.0,
    };
    if parts.next().is_some() || !re.is_finite() || !im.is_finite() {
        return Err(bad());
    }
    Ok(C64::new(re, im))
}

fn read_spec(path: &Path) -> Result<CurveSpec, Fail> {
    let text = fs::read_to_string(path).map_err(|e| Fail::io(path, e, 2))?;
    Ok(CurveSpec::from_json(&text)?)
}

fn write(path: &Path, text: &str) -> Result<(), Fail> {
    fs::write(path, text).map_err(|e| Fail::io(path, e, 3))
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), Fail> {
    match path {
        Some(p) => write(p, text),
        None => {
            print!("{}", text);
            Ok(())
        }
    }
}

fn json_text<T: serde::Serialize>(v: &T) -> Result<String, Fail> {
    to_deterministic_string(v).map_err(|e| Fail {
        exit: 3,
        code: "serialization".into(),
        message: e.to_string(),
        point: None,
    })
}

fn mesh_summary(m: &FrontMesh) -> serde_json::Value {
    json!({
        "vertices": m.vertices.len(),
        "faces": m.faces.len(),
        "max_ball_norm": m.max_norm(),
        "truncated": m.truncated,
        "branch_points": m.branch_points,
    })
}

fn cmd_gallery(
    name: &str,
    raw: &[String],
    mesh: Option<&Path>,
    report: Option<&Path>,
    grid: Option<&str>,
    check: CheckArgs,
) -> CliResult {
    let mut params = BTreeMap::new();
    for p in raw {
        let (k, v) = parse_param(p)?;
        params.insert(k, v);
    }
    let entry = gallery::build(name, &params)?;
    let grid = grid.map(str::parse::<GridSpec>).transpose()?;
    let mut summary = json!({
        "name": entry.name,
        "params": entry.params,
        "G": entry.big_g.to_string(),
        "omega": entry.omega.to_string(),
        "expected_gauss": [entry.expected_gauss.value.0.to_string(), entry.expected_gauss.value.1.to_string()],
        "basepoint": [entry.basepoint.re, entry.basepoint.im],
        "finite_punctures": entry.finite_punctures.iter().map(|p| [p.re, p.im]).collect::<Vec<_>>(),
        "universal_cover": entry.universal_cover,
    });
    let mut exit = 0;
    if let Some(path) = mesh {
        let curve = entry.curve()?;
        let m = match &grid {
            Some(g) => sample_mesh(&curve, g)?,
            None => sample_plan(&curve, &entry.mesh_plan)?,
        };
        write(path, &to_ply_string(&m))?;
        summary["mesh"] = mesh_summary(&m);
    }
    if let Some(path) = report {
        let spec = CurveSpec::Gallery {
            name: name.to_string(),
            params: entry.params.clone(),
        };
        let r = verify_spec(&spec, check)?;
        write(path, &json_text(&r)?)?;
        summary["report_pass"] = json!(r.pass);
        if !r.pass {
            exit = 1;
        }
    }
    print!("{}", json_text(&summary)?);
    Ok(exit)
}

fn verify_spec(spec: &CurveSpec, check: CheckArgs) -> Result<VerificationReport, Fail> {
    if check.tol.is_nan() || check.tol <= 0.0 {
        return Err(Fail::input("invalid-parameter", "--tol must be positive"));
    }
    let kind = spec_kind(spec);
    match spec.build() {
        Ok(built) => Ok(verify(&built, check.samples, check.tol, check.seed)),
        Err(e) if e.is_invalid_input() => Err(e.into()),
        Err(e) => Ok(VerificationReport::construction_failed(
            kind,
            &e,
            check.samples,
            check.tol,
            check.seed,
        )),
    }
}

fn spec_kind(spec: &CurveSpec) -> &'static str {
    match spec {
        CurveSpec::LegendrianGauss { .. } => "legendrian_gauss",
        CurveSpec::LegendrianGOmega { .. } => "legendrian_G_omega",
        CurveSpec::NullSmall { .. } => "null_small",
        CurveSpec::C3Weierstrass { .. } => "c3_weierstrass",
        CurveSpec::C3IntegralFree { .. } => "c3_integral_free",
        CurveSpec::Gallery { .. } => "gallery",
    }
}

fn cmd_verify(spec: &Path, check: CheckArgs, out: Option<&Path>) -> CliResult {
    let spec = read_spec(spec)?;
    let r = verify_spec(&spec, check)?;
    emit(out, &json_text(&r)?)?;
    for rec in r.records.iter().filter(|r| !r.pass) {
        log::info!("failed: {} ({:?} > {:e})", rec.name, rec.max_residual, rec.tolerance);
    }
    Ok(if r.pass { 0 } else { 1 })
}

fn cmd_sample(spec: &Path, raw: &[String], file: Option<&Path>, out: Option<&Path>) -> CliResult {
    let built = read_spec(spec)?.build()?;
    let mut points = raw.iter().map(|s| parse_point(s)).collect::<Result<Vec<_>, _>>()?;
    if let Some(path) = file {
        let text = fs::read_to_string(path).map_err(|e| Fail::io(path, e, 2))?;
        let pairs: Vec<[f64; 2]> = serde_json::from_str(&text)
            .map_err(|e| Fail::input("invalid-points", format!("{}: {}", path.display(), e)))?;
        points.extend(pairs.into_iter().map(|[re, im]| C64::new(re, im)));
    }
    let rows = points
        .iter()
        .map(|&z| sample_one(&built, z))
        .collect::<Result<Vec<_>, _>>()?;
    emit(out, &json_text(&rows)?)?;
    Ok(0)
}

fn sample_one(built: &Built, z: C64) -> Result<flatfront::spec::SampleRow, Fail> {
    built.sample(z).map_err(|e| {
        let mut f = Fail::from(e);
        f.exit = 3;
        f.at(z)
    })
}

fn cmd_mesh(spec: &Path, grid: Option<&str>, out: &Path) -> CliResult {
    let spec = read_spec(spec)?;
    let grid = grid.map(str::parse::<GridSpec>).transpose()?;
    let built = spec.build()?;
    let Built::Legendrian(l) = &built else {
        return Err(Fail::input(
            "invalid-spec",
            format!("meshing needs a Legendrian curve, got {}", built.kind()),
        ));
    };
    let m = match (&grid, &l.gallery) {
        (Some(g), _) => sample_mesh(&l.curve, g)?,
        (None, Some(entry)) => sample_plan(&l.curve, &entry.mesh_plan)?,
        (None, None) => sample_mesh(&l.curve, &GridSpec::annulus(0.2, 5.0, 32, 64))?,
    };
    write(out, &to_ply_string(&m))?;
    print!("{}", json_text(&mesh_summary(&m))?);
    Ok(0)
}
