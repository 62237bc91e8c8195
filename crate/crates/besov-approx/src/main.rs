//! Command-line front end. Every subcommand is a thin wrapper over one
//! library operation: parse and merge parameters (flags override the
//! optional key=value config file), validate through the library's own
//! preconditions, run, and write JSON/CSV with the config digest
//! embedded.
//!
//! Exit codes: 0 success (and every verification property passed),
//! 1 numerical or input error (the diagnostic names the violated
//! inequality), 2 usage error from the argument parser.

use besov_approx::anisotropy::{besov_norm, layer_decompose, SmoothnessVector};
use besov_approx::config;
use besov_approx::error::{Error, Result};
use besov_approx::experiments::{approx_error, rate_experiment, GridPolicy};
use besov_approx::extremal::{f_grid, f_torus, gen_g1, ExtremalSpec};
use besov_approx::io;
use besov_approx::lattice::{AxisSpec, Exponent, GridFunction};
use besov_approx::spectral::{fourier_section, FrequencyBox};
use besov_approx::verify::run_verification;
use clap::{Args, Parser, Subcommand};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "besov-approx",
    version,
    about = "Band-limited approximation on anisotropic dyadic frequency blocks"
)]
struct Cli {
    /// Flat key=value config file; explicit flags override its entries.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sample the extremal function F_n, or the scaled witness g1
    GenExtremal(GenExtremalArgs),
    /// Cut a grid to the frequency box |lambda_j| <= sigma_j
    Section(SectionArgs),
    /// Split a grid into its anisotropic dyadic layers
    Decompose(DecomposeArgs),
    /// Lp or sup norm of a grid
    Norm(NormArgs),
    /// Layered Besov norm of a grid
    BesovNorm(BesovNormArgs),
    /// Sup-norm error of approximation by the section below level n
    ApproxError(ApproxErrorArgs),
    /// Witness decay experiment: measure, fit, compare to the predicted slope
    Rate(RateArgs),
    /// Run the invariant verification suite
    Verify(VerifyArgs),
}

#[derive(Args)]
struct GenExtremalArgs {
    /// Smoothness vector r, comma-separated
    #[arg(long)]
    r: Option<String>,
    /// Level n >= 1
    #[arg(long)]
    n: Option<String>,
    /// Integrability exponent p in (1, inf) [default: 2]
    #[arg(long)]
    p: Option<String>,
    /// Witness scale C1 [default: 1]
    #[arg(long)]
    c1: Option<String>,
    /// Emit the scaled witness g1 instead of F_n
    #[arg(long)]
    witness: bool,
    /// F_n rendering: "raw" pointwise samples or the exact "torus" periodization [default: raw]
    #[arg(long)]
    rendering: Option<String>,
    /// Axis half-widths L_j, one value or a comma list
    #[arg(long = "L")]
    l: Option<String>,
    /// Points per axis N_j (powers of two), one value or a comma list
    #[arg(long = "N")]
    n_points: Option<String>,
    /// Output path; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SectionArgs {
    /// Input grid JSON
    #[arg(long = "in")]
    input: Option<String>,
    /// Box half-widths sigma_j, one value or a comma list
    #[arg(long)]
    sigma: Option<String>,
    /// Output path; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DecomposeArgs {
    /// Input grid JSON
    #[arg(long = "in")]
    input: Option<String>,
    /// Smoothness vector r, comma-separated
    #[arg(long)]
    r: Option<String>,
    /// Largest layer index S [default: largest the grid resolves]
    #[arg(long)]
    cutoff: Option<String>,
    /// Output prefix; layer s goes to <prefix>.layer<s>.json
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct NormArgs {
    /// Input grid JSON
    #[arg(long = "in")]
    input: Option<String>,
    /// Exponent p in [1, inf) or "inf"
    #[arg(long)]
    p: Option<String>,
}

#[derive(Args)]
struct BesovNormArgs {
    /// Input grid JSON
    #[arg(long = "in")]
    input: Option<String>,
    /// Smoothness vector r, comma-separated
    #[arg(long)]
    r: Option<String>,
    /// Integrability exponent p in [1, inf) or "inf"
    #[arg(long)]
    p: Option<String>,
    /// Summability exponent theta in [1, inf) or "inf"
    #[arg(long)]
    theta: Option<String>,
    /// Largest layer index S [default: largest the grid resolves]
    #[arg(long)]
    cutoff: Option<String>,
    /// Output path; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ApproxErrorArgs {
    /// Input grid JSON
    #[arg(long = "in")]
    input: Option<String>,
    /// Smoothness vector r, comma-separated
    #[arg(long)]
    r: Option<String>,
    /// Approximation level n >= 1 (section is cut at a^(n-1))
    #[arg(long)]
    n: Option<String>,
}

#[derive(Args)]
struct RateArgs {
    /// Smoothness vector r, comma-separated
    #[arg(long)]
    r: Option<String>,
    /// Integrability exponent p in (1, inf)
    #[arg(long)]
    p: Option<String>,
    /// Summability exponent theta in [1, inf) or "inf" [default: 1]
    #[arg(long)]
    theta: Option<String>,
    /// First level
    #[arg(long)]
    n_min: Option<String>,
    /// Last level (at least n_min + 2)
    #[arg(long)]
    n_max: Option<String>,
    /// Axis half-widths L_j, one value or a comma list
    #[arg(long = "L")]
    l: Option<String>,
    /// Base points per axis N_j (powers of two), one value or a comma list
    #[arg(long = "N")]
    n_points: Option<String>,
    /// Point cap for the per-level doubling policy [default: max of N, i.e. fixed grids]
    #[arg(long)]
    n_cap: Option<String>,
    /// CSV output path; the full report lands in a .json sidecar
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Run only the fast structural identities
    #[arg(long)]
    quick: bool,
}

/// Merged view of flags and the config file. Flags win; config keys use
/// the flag spelling (hyphens and underscores both accepted).
struct Ctx {
    cfg: BTreeMap<String, String>,
}

impl Ctx {
    fn load(path: Option<&Path>) -> Result<Self> {
        let cfg = match path {
            None => BTreeMap::new(),
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|source| Error::Io {
                    path: p.display().to_string(),
                    source,
                })?;
                config::parse_kv(&text, &p.display().to_string())?
            }
        };
        Ok(Self { cfg })
    }

    fn lookup(&self, key: &str) -> Option<String> {
        self.cfg
            .get(key)
            .or_else(|| self.cfg.get(&key.replace('-', "_")))
            .cloned()
    }

    fn get(&self, flag: &Option<String>, key: &str) -> Option<String> {
        flag.clone().or_else(|| self.lookup(key))
    }

    fn require(&self, flag: &Option<String>, key: &str) -> Result<String> {
        self.get(flag, key).ok_or_else(|| {
            Error::Parameter(format!(
                "missing parameter {key}: pass --{key} or set {key}= in the config file"
            ))
        })
    }

    fn get_or(&self, flag: &Option<String>, key: &str, default: &str) -> String {
        self.get(flag, key).unwrap_or_else(|| default.to_string())
    }

    fn flag_bool(&self, set: bool, key: &str) -> bool {
        set || matches!(self.lookup(key).as_deref(), Some("true") | Some("1"))
    }

    fn out_path(&self, flag: &Option<PathBuf>, key: &str) -> Option<PathBuf> {
        flag.clone().or_else(|| self.lookup(key).map(PathBuf::from))
    }
}

fn parse_f64(key: &str, s: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parameter(format!("cannot parse {key}={s:?} as a number")))
}

fn parse_usize(key: &str, s: &str) -> Result<usize> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parameter(format!("cannot parse {key}={s:?} as an integer")))
}

fn parse_f64_list(key: &str, s: &str) -> Result<Vec<f64>> {
    s.split(',').map(|v| parse_f64(key, v)).collect()
}

fn parse_usize_list(key: &str, s: &str) -> Result<Vec<usize>> {
    s.split(',').map(|v| parse_usize(key, v)).collect()
}

/// Broadcast a one-element list across `d` axes.
fn broadcast<T: Clone>(key: &str, mut list: Vec<T>, d: usize) -> Result<Vec<T>> {
    if list.len() == 1 && d > 1 {
        list = vec![list[0].clone(); d];
    }
    if list.len() != d {
        return Err(Error::Parameter(format!(
            "{key} has {} entries but the problem has {d} axes",
            list.len()
        )));
    }
    Ok(list)
}

fn axes_from(l: &[f64], n: &[usize]) -> Result<Vec<AxisSpec>> {
    l.iter()
        .zip(n)
        .map(|(&li, &ni)| AxisSpec::new(li, ni))
        .collect()
}

fn canon_f64_list(v: &[f64]) -> String {
    v.iter()
        .map(|x| io::fmt_f64(*x))
        .collect::<Vec<_>>()
        .join(",")
}

fn canon_usize_list(v: &[usize]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Largest S with `block(S)` inside every axis Nyquist limit.
fn max_resolvable_cutoff(sv: &SmoothnessVector, axes: &[AxisSpec]) -> Result<usize> {
    if sv.block(0).check_resolved(axes).is_err() {
        return Err(Error::Parameter(
            "grid cannot resolve even the unit frequency block; refine the grid".into(),
        ));
    }
    let mut s = 0usize;
    while sv.block(s + 1).check_resolved(axes).is_ok() {
        s += 1;
        if s > 64 {
            break; // 2^64 exceeds any finite Nyquist limit long before this
        }
    }
    Ok(s)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => io::write_atomic(path, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn unix_now() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn load_grid(ctx: &Ctx, flag: &Option<String>) -> Result<(GridFunction, String)> {
    let path = ctx.require(flag, "in")?;
    let f = io::load_grid(Path::new(&path))?;
    Ok((f, path))
}

fn run_gen_extremal(ctx: &Ctx, args: &GenExtremalArgs) -> Result<()> {
    let r = parse_f64_list("r", &ctx.require(&args.r, "r")?)?;
    let d = r.len();
    let sv = SmoothnessVector::new(r.clone())?;
    let n = parse_usize("n", &ctx.require(&args.n, "n")?)?;
    let p = parse_f64("p", &ctx.get_or(&args.p, "p", "2"))?;
    let c1 = parse_f64("c1", &ctx.get_or(&args.c1, "c1", "1"))?;
    let witness = ctx.flag_bool(args.witness, "witness");
    let rendering = ctx.get_or(&args.rendering, "rendering", "raw");
    let l = broadcast("L", parse_f64_list("L", &ctx.require(&args.l, "L")?)?, d)?;
    let n_points = broadcast(
        "N",
        parse_usize_list("N", &ctx.require(&args.n_points, "N")?)?,
        d,
    )?;
    let axes = axes_from(&l, &n_points)?;
    let spec = ExtremalSpec::new(sv, n, p, c1)?;
    let grid = if witness {
        gen_g1(&spec, &axes)?
    } else {
        match rendering.as_str() {
            "raw" => f_grid(&spec, &axes)?,
            "torus" => f_torus(&spec, &axes)?,
            other => {
                return Err(Error::Parameter(format!(
                    "rendering must be \"raw\" or \"torus\", got {other:?}"
                )))
            }
        }
    };
    let digest = config::digest(&config::pairs(&[
        ("r", canon_f64_list(&r)),
        ("n", n.to_string()),
        ("p", io::fmt_f64(p)),
        ("c1", io::fmt_f64(c1)),
        ("witness", witness.to_string()),
        ("rendering", rendering.clone()),
        ("L", canon_f64_list(&l)),
        ("N", canon_usize_list(&n_points)),
    ]));
    emit(
        ctx.out_path(&args.out, "out").as_deref(),
        &io::grid_to_json(&grid, Some(&digest)),
    )
}

fn run_section(ctx: &Ctx, args: &SectionArgs) -> Result<()> {
    let (f, in_path) = load_grid(ctx, &args.input)?;
    let sigma = broadcast(
        "sigma",
        parse_f64_list("sigma", &ctx.require(&args.sigma, "sigma")?)?,
        f.dim(),
    )?;
    let boxx = FrequencyBox::new(sigma.clone())?;
    let cut = fourier_section(&f, &boxx)?;
    let digest = config::digest(&config::pairs(&[
        ("in", in_path),
        ("sigma", canon_f64_list(&sigma)),
    ]));
    emit(
        ctx.out_path(&args.out, "out").as_deref(),
        &io::grid_to_json(&cut, Some(&digest)),
    )
}

fn run_decompose(ctx: &Ctx, args: &DecomposeArgs) -> Result<()> {
    let (f, in_path) = load_grid(ctx, &args.input)?;
    let r = parse_f64_list("r", &ctx.require(&args.r, "r")?)?;
    let sv = SmoothnessVector::new(r.clone())?;
    let cutoff = match ctx.get(&args.cutoff, "cutoff") {
        Some(s) => parse_usize("cutoff", &s)?,
        None => max_resolvable_cutoff(&sv, f.axes())?,
    };
    let prefix = ctx.out_path(&args.out, "out").ok_or_else(|| {
        Error::Parameter("decompose writes one file per layer: pass --out <prefix>".into())
    })?;
    let dec = layer_decompose(&f, &sv, cutoff)?;
    let digest = config::digest(&config::pairs(&[
        ("in", in_path),
        ("r", canon_f64_list(&r)),
        ("cutoff", cutoff.to_string()),
    ]));
    let mut files = Vec::new();
    for (s, layer) in dec.layers().iter().enumerate() {
        let path = PathBuf::from(format!("{}.layer{s}.json", prefix.display()));
        io::save_grid(&path, layer, Some(&digest))?;
        files.push(path.display().to_string());
    }
    println!(
        "{}",
        serde_json::json!({
            "layers": dec.layers().len(),
            "cutoff": cutoff,
            "files": files,
            "config_digest": digest,
        })
    );
    Ok(())
}

fn run_norm(ctx: &Ctx, args: &NormArgs) -> Result<()> {
    let (f, in_path) = load_grid(ctx, &args.input)?;
    let p = Exponent::parse(&ctx.require(&args.p, "p")?)?;
    let value = p.norm(&f)?;
    let digest = config::digest(&config::pairs(&[("in", in_path), ("p", p.to_string())]));
    println!(
        "{}",
        serde_json::json!({
            "p": p.to_string(),
            "norm": io::fmt_f64(value).parse::<f64>().expect("fmt_f64 round-trips"),
            "config_digest": digest,
        })
    );
    Ok(())
}

fn run_besov_norm(ctx: &Ctx, args: &BesovNormArgs) -> Result<()> {
    let (f, in_path) = load_grid(ctx, &args.input)?;
    let r = parse_f64_list("r", &ctx.require(&args.r, "r")?)?;
    let sv = SmoothnessVector::new(r.clone())?;
    let p = Exponent::parse(&ctx.require(&args.p, "p")?)?;
    let theta = Exponent::parse(&ctx.require(&args.theta, "theta")?)?;
    let cutoff = match ctx.get(&args.cutoff, "cutoff") {
        Some(s) => parse_usize("cutoff", &s)?,
        None => max_resolvable_cutoff(&sv, f.axes())?,
    };
    let norm = besov_norm(&f, &sv, p, theta, cutoff)?;
    let digest = config::digest(&config::pairs(&[
        ("in", in_path),
        ("r", canon_f64_list(&r)),
        ("p", p.to_string()),
        ("theta", theta.to_string()),
        ("cutoff", cutoff.to_string()),
    ]));
    emit(
        ctx.out_path(&args.out, "out").as_deref(),
        &io::besov_norm_to_json(&norm, &digest),
    )
}

fn run_approx_error(ctx: &Ctx, args: &ApproxErrorArgs) -> Result<()> {
    let (f, in_path) = load_grid(ctx, &args.input)?;
    let r = parse_f64_list("r", &ctx.require(&args.r, "r")?)?;
    let sv = SmoothnessVector::new(r.clone())?;
    let n = parse_usize("n", &ctx.require(&args.n, "n")?)?;
    let error = approx_error(&f, &sv, n)?;
    let digest = config::digest(&config::pairs(&[
        ("in", in_path),
        ("r", canon_f64_list(&r)),
        ("n", n.to_string()),
    ]));
    println!(
        "{}",
        serde_json::json!({
            "n": n,
            "error": io::fmt_f64(error).parse::<f64>().expect("fmt_f64 round-trips"),
            "config_digest": digest,
        })
    );
    Ok(())
}

fn run_rate(ctx: &Ctx, args: &RateArgs) -> Result<()> {
    let r = parse_f64_list("r", &ctx.require(&args.r, "r")?)?;
    let d = r.len();
    let sv = SmoothnessVector::new(r)?;
    let p = parse_f64("p", &ctx.require(&args.p, "p")?)?;
    let theta = Exponent::parse(&ctx.get_or(&args.theta, "theta", "1"))?;
    let n_min = parse_usize("n-min", &ctx.require(&args.n_min, "n-min")?)?;
    let n_max = parse_usize("n-max", &ctx.require(&args.n_max, "n-max")?)?;
    let l = broadcast("L", parse_f64_list("L", &ctx.require(&args.l, "L")?)?, d)?;
    let n_points = broadcast(
        "N",
        parse_usize_list("N", &ctx.require(&args.n_points, "N")?)?,
        d,
    )?;
    let cap = match ctx.get(&args.n_cap, "n-cap") {
        Some(s) => parse_usize("n-cap", &s)?,
        None => n_points.iter().copied().max().expect("nonempty"),
    };
    let policy = GridPolicy::new(l, n_points, cap)?;
    let report = rate_experiment(&sv, p, theta, n_min, n_max, &policy)?;
    let out = ctx.out_path(&args.out, "out").ok_or_else(|| {
        Error::Parameter("rate writes CSV plus a JSON sidecar: pass --out <path.csv>".into())
    })?;
    let mut sidecar = out.with_extension("json");
    if sidecar == out {
        sidecar = out.with_extension("meta.json");
    }
    io::write_atomic(&out, io::rate_to_csv(&report).as_bytes())?;
    io::write_atomic(
        &sidecar,
        io::rate_to_json(&report, Some(unix_now())).as_bytes(),
    )?;
    println!(
        "{}",
        serde_json::json!({
            "csv": out.display().to_string(),
            "report": sidecar.display().to_string(),
            "fitted_slope": report.fitted_slope,
            "predicted_slope": report.predicted_slope,
            "excluded": report.excluded,
            "config_digest": report.config_digest,
        })
    );
    Ok(())
}

fn run_verify(ctx: &Ctx, args: &VerifyArgs) -> Result<i32> {
    let quick = ctx.flag_bool(args.quick, "quick");
    let reports = run_verification(quick);
    let mut failures = 0usize;
    for r in &reports {
        let status = if r.passed { "PASS" } else { "FAIL" };
        println!("{status} {}: {}", r.name, r.detail);
        if !r.passed {
            failures += 1;
        }
    }
    println!(
        "{} of {} properties passed{}",
        reports.len() - failures,
        reports.len(),
        if quick { " (quick subset)" } else { "" }
    );
    Ok(if failures == 0 { 0 } else { 1 })
}

fn run(cli: Cli) -> Result<i32> {
    let ctx = Ctx::load(cli.config.as_deref())?;
    match &cli.cmd {
        Cmd::GenExtremal(a) => run_gen_extremal(&ctx, a).map(|_| 0),
        Cmd::Section(a) => run_section(&ctx, a).map(|_| 0),
        Cmd::Decompose(a) => run_decompose(&ctx, a).map(|_| 0),
        Cmd::Norm(a) => run_norm(&ctx, a).map(|_| 0),
        Cmd::BesovNorm(a) => run_besov_norm(&ctx, a).map(|_| 0),
        Cmd::ApproxError(a) => run_approx_error(&ctx, a).map(|_| 0),
        Cmd::Rate(a) => run_rate(&ctx, a).map(|_| 0),
        Cmd::Verify(a) => run_verify(&ctx, a),
    }
}

fn main() {
    env_logger::init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(1);
        }
    }
}
