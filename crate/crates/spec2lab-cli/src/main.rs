use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use spec2lab::io::{self, IoError};
use spec2lab::linalg::{self, HermitianMatrix};
use spec2lab::nesting::{self, NestError, NestOptions, NestReport, NestSchedule, NestState};
use spec2lab::planting::{self, PlantError, PlantMode, TargetSet, TargetSpec, TheoremOptions, TheoremRun};
use spec2lab::report::{self, Check};
use spec2lab::rotation::{self, RotationResult};
use spec2lab::spectra::{self, IntervalUnion, QRegion, SpectraError, Subspace};
use spec2lab::svg::Plot;
use spec2lab::symbol::{self, Dilation, Lemma22Certificate, Lemma22Options, Lemma22Params, SymbolError};
use spec2lab::{tol, Complex64};

const EXIT_CHECK: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

#[derive(Parser)]
#[command(name = "spec2lab", version, about = "Second-order relative spectra: compute, construct, certify")]
struct Cli {
    /// Directory for `<kind>.json` (and `<kind>.svg`).
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,
    /// Also write an SVG plot where one makes sense.
    #[arg(long, global = true)]
    svg: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Second-order spectrum of T relative to a subspace.
    Spec2(MatrixArgs),
    /// Eigenvalues of the compression Q*TQ.
    Galerkin(MatrixArgs),
    /// Membership in Q(Σ).
    Qregion(QregionArgs),
    /// Toeplitz pair whose pencil collapses onto a conjugate pair.
    Lemma22(Lemma22Args),
    /// Dilation of a pair (B, M) with M ⪰ B².
    Dilate(DilateArgs),
    /// Embeds a small Hermitian matrix into a collapsing pair.
    Rotate(RotateArgs),
    /// Finite-stage nesting construction.
    Nest(NestArgs),
    /// Plants a target set level by level.
    Plant(PlantArgs),
    /// Certified root-stability margin of a compressed pencil.
    Delta(DeltaArgs),
    /// Re-checks a saved report from its stored matrices.
    Verify(ReportArgs),
    /// Re-runs the verification of a saved nesting state.
    Replay(ReportArgs),
}

#[derive(Args, Serialize)]
struct MatrixArgs {
    /// Hermitian matrix as JSON, or a real symmetric CSV.
    #[arg(long)]
    matrix: PathBuf,
    /// Orthonormal basis as JSON (`{"basis": …}`).
    #[arg(long, conflicts_with = "window")]
    subspace: Option<PathBuf>,
    /// Use the first N coordinates instead.
    #[arg(long)]
    window: Option<usize>,
}

#[derive(Args, Serialize)]
struct QregionArgs {
    /// Interval endpoints a1,b1,a2,b2,…
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    sigma: Vec<f64>,
    /// Points re,im to test (repeatable).
    #[arg(long = "point", allow_hyphen_values = true)]
    points: Vec<String>,
}

#[derive(Args, Serialize)]
struct Lemma22Args {
    #[arg(long, num_args = 2, allow_negative_numbers = true, required = true)]
    interval: Vec<f64>,
    #[arg(long)]
    r: f64,
    #[arg(long)]
    delta: f64,
    #[arg(long)]
    eps: f64,
    #[arg(long, default_value_t = 4096)]
    n_max: usize,
    /// Build at exactly this N.
    #[arg(long)]
    n: Option<usize>,
    /// Return a certificate even if the density target is missed.
    #[arg(long)]
    accept_sparse: bool,
    #[arg(long, default_value_t = 0x22)]
    seed: u64,
}

#[derive(Args, Serialize)]
struct DilateArgs {
    #[arg(long)]
    b: PathBuf,
    #[arg(long)]
    m: PathBuf,
}

#[derive(Args, Serialize)]
struct RotateArgs {
    /// Hermitian matrix to embed.
    #[arg(long)]
    target: PathBuf,
    #[arg(long, num_args = 2, allow_negative_numbers = true, required = true)]
    interval: Vec<f64>,
    #[arg(long)]
    r: f64,
    #[arg(long)]
    delta: f64,
    #[arg(long)]
    eps: f64,
    /// Size of the collapsing pair.
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0x22)]
    seed: u64,
}

#[derive(Args, Serialize)]
struct NestArgs {
    #[arg(long, num_args = 2, allow_negative_numbers = true, required = true)]
    interval: Vec<f64>,
    #[arg(long)]
    r: f64,
    /// Strictly decreasing α_1,α_2,…
    #[arg(long, value_delimiter = ',', required = true)]
    alpha: Vec<f64>,
    #[arg(long)]
    loose: bool,
    #[arg(long, default_value_t = 4000)]
    max_dim: usize,
    #[arg(long, default_value_t = 2000)]
    delta_evaluations: usize,
    #[arg(long, default_value_t = 0x25)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum ModeArg {
    Mechanism,
    Full,
}

#[derive(Args, Serialize)]
struct PlantArgs {
    /// `{"sigma": …, "F": …}`.
    #[arg(long)]
    target: PathBuf,
    /// Second target set; odd levels aim at it.
    #[arg(long)]
    alternate: Option<PathBuf>,
    #[arg(long, default_value_t = 4)]
    levels: usize,
    #[arg(long, value_enum, default_value = "mechanism")]
    mode: ModeArg,
    #[arg(long, default_value_t = 200)]
    per_band: usize,
    /// α_l for the nesting runs in full mode.
    #[arg(long, value_delimiter = ',', default_value = "0.5,0.4,0.3")]
    alpha: Vec<f64>,
    #[arg(long, default_value_t = 4000)]
    max_dim: usize,
}

#[derive(Args, Serialize)]
struct DeltaArgs {
    #[command(flatten)]
    #[serde(flatten)]
    matrix: MatrixArgs,
    #[arg(long)]
    eps: f64,
    #[arg(long, default_value_t = 20_000)]
    max_evaluations: usize,
}

#[derive(Args, Serialize)]
struct ReportArgs {
    #[arg(long)]
    report: PathBuf,
}

#[derive(Serialize, Deserialize)]
struct Tolerances {
    version: String,
    values: BTreeMap<String, f64>,
}

/// Every report file has this shape.
#[derive(Serialize, Deserialize)]
struct Envelope {
    kind: String,
    version: String,
    config: Value,
    seed: u64,
    tolerances: Tolerances,
    payload: Value,
    checks: Vec<Check>,
    passed: bool,
}

struct Outcome {
    kind: &'static str,
    config: Value,
    seed: u64,
    payload: Value,
    checks: Vec<Check>,
    plot: Option<String>,
}

enum Failure {
    Usage(String),
    Numerical(String),
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<SpectraError> for Failure {
    fn from(e: SpectraError) -> Self {
        match e {
            SpectraError::InvalidIntervals(_) | SpectraError::InvalidEpsilon(_) | SpectraError::AmbientMismatch { .. } => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Numerical(e.to_string()),
        }
    }
}

impl From<linalg::LinalgError> for Failure {
    fn from(e: linalg::LinalgError) -> Self {
        Failure::Numerical(e.to_string())
    }
}

fn symbol_failure(e: SymbolError) -> Failure {
    match e {
        SymbolError::InvalidParameters(_) => Failure::Usage(e.to_string()),
        _ => Failure::Numerical(e.to_string()),
    }
}

fn plant_failure(e: PlantError) -> Failure {
    match e {
        PlantError::InvalidInput(_) | PlantError::OutsideRegion { .. } | PlantError::EmptyBand { .. } => {
            Failure::Usage(e.to_string())
        }
        PlantError::Nest(NestError::InvalidSchedule(_)) => Failure::Usage(e.to_string()),
        _ => Failure::Numerical(e.to_string()),
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn from_value<T: for<'de> Deserialize<'de>>(v: &Value, what: &str) -> Result<T, Failure> {
    serde_json::from_value(v.clone()).map_err(|e| Failure::Usage(format!("payload `{what}`: {e}")))
}

fn read_matrix(path: &Path) -> Result<HermitianMatrix, Failure> {
    if path.extension().is_some_and(|e| e == "csv") {
        let file = std::fs::File::open(path).map_err(|source| IoError::File { path: path.display().to_string(), source })?;
        Ok(io::read_symmetric_csv(file, &path.display().to_string())?)
    } else {
        Ok(io::read_json(path)?)
    }
}

fn interval(v: &[f64]) -> Result<(f64, f64), Failure> {
    match v {
        [a, b] if a < b => Ok((*a, *b)),
        _ => Err(Failure::Usage(format!("--interval needs two increasing numbers, got {v:?}"))),
    }
}

fn subspace(args: &MatrixArgs, dim: usize) -> Result<Subspace, Failure> {
    match (&args.subspace, args.window) {
        (Some(p), _) => Ok(io::read_json(p)?),
        (None, Some(k)) if k >= 1 && k <= dim => Ok(Subspace::window(dim, k)),
        (None, Some(k)) => Err(Failure::Usage(format!("--window {k} outside 1..={dim}"))),
        (None, None) => Err(Failure::Usage("give --subspace or --window".into())),
    }
}

fn hull(values: &[f64]) -> Result<IntervalUnion, Failure> {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let pad = if hi > lo { 0.0 } else { 0.5 };
    Ok(IntervalUnion::single(lo - pad, hi + pad)?)
}

fn spec2_cmd(a: &MatrixArgs) -> Result<Outcome, Failure> {
    let t = read_matrix(&a.matrix)?;
    let l = subspace(a, t.dim())?;
    let p = spectra::compress(&t, &l)?;
    let s = spectra::spec2(&p)?;
    let residual = spectra::spec2_residual(&p, &s)?;
    let eig = linalg::hermitian_eigenvalues(&t)?;
    let enclosed = spectra::enclosure_check(&s, &eig);
    let sigma = hull(&eig)?;
    let plot = Plot { sigma: &sigma, spectrum: s.points(), target: &[], title: "Spec2(T, L)" }.render();
    Ok(Outcome {
        kind: "spec2",
        config: to_value(a),
        seed: 0,
        payload: json!({ "dim": t.dim(), "rank": l.rank(), "spectrum": s, "residual": residual, "enclosure": enclosed }),
        checks: vec![
            Check::at_most("residual", residual, tol::POINTS),
            Check::flag("enclosure", enclosed.iter().all(|&b| b)),
        ],
        plot: Some(plot),
    })
}

fn galerkin_cmd(a: &MatrixArgs) -> Result<Outcome, Failure> {
    let t = read_matrix(&a.matrix)?;
    let l = subspace(a, t.dim())?;
    let ev = spectra::galerkin_spectrum(&t, &l)?;
    Ok(Outcome {
        kind: "galerkin",
        config: to_value(a),
        seed: 0,
        payload: json!({ "dim": t.dim(), "rank": l.rank(), "eigenvalues": ev }),
        checks: Vec::new(),
        plot: None,
    })
}

fn parse_point(s: &str) -> Result<Complex64, Failure> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |x: &str| x.parse::<f64>().map_err(|e| Failure::Usage(format!("--point `{s}`: {e}")));
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(Failure::Usage(format!("--point `{s}`: expected re,im"))),
    }
}

fn qregion_cmd(a: &QregionArgs) -> Result<Outcome, Failure> {
    if !a.sigma.len().is_multiple_of(2) {
        return Err(Failure::Usage("--sigma needs an even number of endpoints".into()));
    }
    let sigma = IntervalUnion::new(a.sigma.chunks(2).map(|c| (c[0], c[1])).collect())?;
    let q = QRegion::new(&sigma);
    let points = a.points.iter().map(|s| parse_point(s)).collect::<Result<Vec<_>, _>>()?;
    let rows: Vec<Value> = points
        .iter()
        .map(|&z| json!({ "point": { "re": z.re, "im": z.im }, "inside": q.contains(z), "margin": q.margin(z) }))
        .collect();
    let plot = Plot { sigma: &sigma, spectrum: &[], target: &points, title: "Q(Σ)" }.render();
    Ok(Outcome {
        kind: "qregion",
        config: to_value(a),
        seed: 0,
        payload: json!({ "sigma": sigma, "region": q, "points": rows }),
        checks: Vec::new(),
        plot: Some(plot),
    })
}

fn lemma22_plot(cert: &Lemma22Certificate) -> Option<String> {
    let sigma = IntervalUnion::single(cert.params.rho_minus, cert.params.rho_plus).ok()?;
    let spec: Vec<Complex64> = cert.spec_b.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    Some(Plot { sigma: &sigma, spectrum: &[cert.z0, cert.z0.conj()], target: &spec, title: "z0 and Spec(B)" }.render())
}

fn lemma22_cmd(a: &Lemma22Args) -> Result<Outcome, Failure> {
    let (lo, hi) = interval(&a.interval)?;
    let params = Lemma22Params::new(lo, hi, a.r, a.delta, a.eps).map_err(symbol_failure)?;
    let opts = Lemma22Options { n_max: a.n_max, fixed_n: a.n, accept_sparse: a.accept_sparse, seed: a.seed };
    let cert = match symbol::lemma22_construct(&params, &opts) {
        Ok(c) => c,
        Err(SymbolError::DensityNotAchieved { best, .. }) => *best,
        Err(e) => return Err(symbol_failure(e)),
    };
    Ok(Outcome {
        kind: "lemma22",
        config: to_value(a),
        seed: a.seed,
        payload: to_value(&cert),
        checks: cert.checks.clone(),
        plot: lemma22_plot(&cert),
    })
}

fn dilate_cmd(a: &DilateArgs) -> Result<Outcome, Failure> {
    let b = read_matrix(&a.b)?;
    let m = read_matrix(&a.m)?;
    match symbol::dilate(&b, &m) {
        Ok(d) => Ok(Outcome {
            kind: "dilate",
            config: to_value(a),
            seed: 0,
            payload: json!({ "b": b, "m": m, "dilation": d }),
            checks: d.checks.clone(),
            plot: None,
        }),
        Err(SymbolError::NotDilatable { min_eigenvalue }) => Ok(Outcome {
            kind: "dilate",
            config: to_value(a),
            seed: 0,
            payload: json!({ "b": b, "m": m, "min_eigenvalue": min_eigenvalue }),
            checks: vec![Check::at_least("dilatable", min_eigenvalue, 0.0)],
            plot: None,
        }),
        Err(e) => Err(symbol_failure(e)),
    }
}

fn rotate_cmd(a: &RotateArgs) -> Result<Outcome, Failure> {
    let t = read_matrix(&a.target)?;
    let (lo, hi) = interval(&a.interval)?;
    let params = Lemma22Params::new(lo, hi, a.r, a.delta, a.eps).map_err(symbol_failure)?;
    let opts = Lemma22Options { fixed_n: Some(a.n), accept_sparse: true, seed: a.seed, ..Lemma22Options::default() };
    let cert = symbol::lemma22_construct(&params, &opts).map_err(symbol_failure)?;
    let (payload, checks) = match rotation::rotate_embedding(&t, &cert.b, &cert.r_mat, a.delta) {
        Ok(r) => (json!({ "t": t, "b_prime": cert.b, "r_prime": cert.r_mat, "rotation": r }), r.checks.clone()),
        Err(e @ rotation::RotationError::Pairing { .. }) => {
            (json!({ "t": t, "error": e.to_string() }), vec![Check::flag("pairing", false)])
        }
        Err(e @ (rotation::RotationError::InvalidDelta(_) | rotation::RotationError::TooSmall { .. })) => {
            return Err(Failure::Usage(e.to_string()))
        }
        Err(e) => return Err(Failure::Numerical(e.to_string())),
    };
    Ok(Outcome { kind: "rotate", config: to_value(a), seed: a.seed, payload, checks, plot: None })
}

fn nest_cmd(a: &NestArgs) -> Result<Outcome, Failure> {
    let (lo, hi) = interval(&a.interval)?;
    let schedule = NestSchedule { rho_minus: lo, rho_plus: hi, r: a.r, alpha: a.alpha.clone() };
    let opts = NestOptions {
        loose: a.loose,
        max_dim: a.max_dim,
        delta_evaluations: a.delta_evaluations,
        seed: a.seed,
        ..NestOptions::default()
    };
    let (payload, checks) = match nesting::nest_run(&schedule, &opts) {
        Ok(state) => {
            let report = nesting::verify_nest(&state).map_err(nest_failure)?;
            let checks = report.all_checks();
            (json!({ "state": state, "report": report }), checks)
        }
        Err(NestError::StageInfeasible { stage, detail, partial }) => (
            json!({ "state": partial, "infeasible_stage": stage, "detail": detail }),
            vec![Check::flag(&format!("stage{stage}_built"), false)],
        ),
        Err(e) => return Err(nest_failure(e)),
    };
    Ok(Outcome { kind: "nest", config: to_value(a), seed: a.seed, payload, checks, plot: None })
}

fn nest_failure(e: NestError) -> Failure {
    match e {
        NestError::InvalidSchedule(_) => Failure::Usage(e.to_string()),
        _ => Failure::Numerical(e.to_string()),
    }
}

fn read_target(path: &Path) -> Result<TargetSet, Failure> {
    let spec: TargetSpec = io::read_json(path)?;
    TargetSet::from_spec(spec).map_err(plant_failure)
}

fn plant_checks(run: &TheoremRun) -> Vec<Check> {
    let mut checks = run.report.checks.clone();
    for l in &run.report.levels {
        checks.extend(l.checks.iter().map(|c| Check { name: format!("level{}.{}", l.level, c.name), ..c.clone() }));
    }
    checks
}

fn plant_cmd(a: &PlantArgs) -> Result<Outcome, Failure> {
    let target = read_target(&a.target)?;
    let alternate = a.alternate.as_deref().map(read_target).transpose()?;
    let opts = TheoremOptions {
        mode: match a.mode {
            ModeArg::Mechanism => PlantMode::Mechanism,
            ModeArg::Full => PlantMode::Full,
        },
        levels: a.levels,
        per_band: a.per_band,
        alpha: a.alpha.clone(),
        nest: NestOptions { loose: true, max_dim: a.max_dim, ..NestOptions::default() },
        ..TheoremOptions::default()
    };
    let run = planting::theorem11_run(&target, alternate.as_ref(), &opts).map_err(plant_failure)?;
    let plot = run.report.levels.last().map(|l| {
        Plot { sigma: &target.sigma, spectrum: l.spectrum.points(), target: &l.sample.points, title: "Spec2(T, L_l) and F_l" }
            .render()
    });
    Ok(Outcome { kind: "plant", config: to_value(a), seed: 0, checks: plant_checks(&run), payload: to_value(&run), plot })
}

fn delta_cmd(a: &DeltaArgs) -> Result<Outcome, Failure> {
    let t = read_matrix(&a.matrix.matrix)?;
    let l = subspace(&a.matrix, t.dim())?;
    let p = spectra::compress(&t, &l)?;
    let opts = spectra::DeltaOptions { max_evaluations: a.max_evaluations, ..spectra::DeltaOptions::default() };
    let cert = spectra::delta_bound_with(&p, a.eps, None, &opts)?;
    let checks = vec![Check::flag("positive", cert.delta > 0.0)];
    Ok(Outcome { kind: "delta", config: to_value(a), seed: 0, payload: to_value(&cert), checks, plot: None })
}

fn load(path: &Path) -> Result<Envelope, Failure> {
    Ok(io::read_json(path)?)
}

fn verify_cmd(a: &ReportArgs) -> Result<Outcome, Failure> {
    let env = load(&a.report)?;
    let p = &env.payload;
    let checks = match env.kind.as_str() {
        "lemma22" => {
            let cert: Lemma22Certificate = from_value(p, "lemma22")?;
            cert.verify().map_err(symbol_failure)?
        }
        "dilate" => {
            let b: HermitianMatrix = from_value(&p["b"], "b")?;
            let m: HermitianMatrix = from_value(&p["m"], "m")?;
            if p.get("dilation").is_none() {
                env.checks.clone()
            } else {
                let d: Dilation = from_value(&p["dilation"], "dilation")?;
                d.verify(&b, &m).map_err(symbol_failure)?
            }
        }
        "rotate" => {
            if p.get("rotation").is_none() {
                env.checks.clone()
            } else {
                let t: HermitianMatrix = from_value(&p["t"], "t")?;
                let b: HermitianMatrix = from_value(&p["b_prime"], "b_prime")?;
                let r: HermitianMatrix = from_value(&p["r_prime"], "r_prime")?;
                let rot: RotationResult = from_value(&p["rotation"], "rotation")?;
                rot.verify(&t, &b, &r).map_err(|e| Failure::Numerical(e.to_string()))?
            }
        }
        "plant" => {
            let run: TheoremRun = from_value(p, "plant")?;
            run.verify().map_err(plant_failure)?
        }
        "nest" => replay_checks(&env)?.0,
        other => return Err(Failure::Usage(format!("reports of kind `{other}` carry no certificate to verify"))),
    };
    let agree = report::all_passed(&checks) == env.passed;
    Ok(Outcome {
        kind: "verify",
        config: to_value(a),
        seed: env.seed,
        payload: json!({ "kind": env.kind, "original_passed": env.passed, "agree": agree }),
        checks,
        plot: None,
    })
}

/// Rebuilds the nesting checks from the stored state.
fn replay_checks(env: &Envelope) -> Result<(Vec<Check>, bool), Failure> {
    if env.kind != "nest" {
        return Err(Failure::Usage(format!("replay needs a nest report, got `{}`", env.kind)));
    }
    let state: NestState = from_value(&env.payload["state"], "state")?;
    if env.payload.get("report").is_none() {
        return Ok((env.checks.clone(), true));
    }
    let stored: NestReport = from_value(&env.payload["report"], "report")?;
    let fresh = nesting::verify_nest(&state).map_err(nest_failure)?;
    let a = fresh.all_checks();
    let b = stored.all_checks();
    let same = a.len() == b.len() && a.iter().zip(&b).all(|(x, y)| x.name == y.name && x.passed == y.passed);
    Ok((a, same))
}

fn replay_cmd(a: &ReportArgs) -> Result<Outcome, Failure> {
    let env = load(&a.report)?;
    let (checks, agree) = replay_checks(&env)?;
    Ok(Outcome {
        kind: "replay",
        config: to_value(a),
        seed: env.seed,
        payload: json!({ "kind": env.kind, "original_passed": env.passed, "agree": agree }),
        checks,
        plot: None,
    })
}

fn configure_threads() -> Result<(), Failure> {
    match std::env::var("SPEC2LAB_THREADS") {
        Err(_) => faer::set_global_parallelism(faer::Par::Seq),
        Ok(v) => {
            let n: usize = v.trim().parse().map_err(|_| Failure::Usage(format!("SPEC2LAB_THREADS=`{v}` is not a count")))?;
            faer::set_global_parallelism(if n <= 1 { faer::Par::Seq } else { faer::Par::rayon(n) });
        }
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<bool, Failure> {
    configure_threads()?;
    let out = match &cli.command {
        Command::Spec2(a) => spec2_cmd(a)?,
        Command::Galerkin(a) => galerkin_cmd(a)?,
        Command::Qregion(a) => qregion_cmd(a)?,
        Command::Lemma22(a) => lemma22_cmd(a)?,
        Command::Dilate(a) => dilate_cmd(a)?,
        Command::Rotate(a) => rotate_cmd(a)?,
        Command::Nest(a) => nest_cmd(a)?,
        Command::Plant(a) => plant_cmd(a)?,
        Command::Delta(a) => delta_cmd(a)?,
        Command::Verify(a) => verify_cmd(a)?,
        Command::Replay(a) => replay_cmd(a)?,
    };
    let passed = report::all_passed(&out.checks);
    let env = Envelope {
        kind: out.kind.into(),
        version: env!("CARGO_PKG_VERSION").into(),
        config: out.config,
        seed: out.seed,
        tolerances: Tolerances {
            version: tol::VERSION.into(),
            values: tol::all().into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
        },
        payload: out.payload,
        checks: out.checks,
        passed,
    };
    let path = cli.out_dir.join(format!("{}.json", out.kind));
    io::write_json(&path, &env)?;
    if cli.svg {
        if let Some(svg) = out.plot {
            io::write_atomic(&cli.out_dir.join(format!("{}.svg", out.kind)), svg.as_bytes())?;
        }
    }
    let failing = report::failing(&env.checks);
    if failing.is_empty() {
        println!("{}: pass ({})", out.kind, path.display());
    } else {
        println!("{}: FAIL [{}] ({})", out.kind, failing.join(", "), path.display());
    }
    Ok(passed)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_CHECK),
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Numerical(m)) => {
            eprintln!("numerical failure: {m}");
            ExitCode::from(EXIT_NUMERICAL)
        }
    }
}
