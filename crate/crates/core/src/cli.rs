//! Command-line front end: argument parsing, output files and run manifests.
//! The bin is a one-line wrapper around [`run`].

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::barrier::{
    box_count, calibrate_c1, certify_enumeration, enumerate_spectrum, enumerate_until_exit, phi_r, BarrierSpec,
    Enumeration,
};
use crate::bounds::{
    bound_compact, bound_compact_weighted, bound_poly, jensen_two_sided, lower_bounds_barrier, BoundReport,
};
use crate::branchmath::{sq_plus, Wide, C64};
use crate::construction::{
    build, jensen_growth_report, stage_parameters, Profile, ShiftOptions, StageParameters, StageRecord,
};
use crate::error::{Error, Result};
use crate::jost::{jost_ode, jost_series, jost_transfer_matrix, JostEvaluation, OdeOptions};
use crate::potentials::{Potential, PotentialSpec};
use crate::spectra::{find_spectrum_with, SearchOptions};
use crate::sums::{eval_sum, points_from_enumeration, points_from_report, SpectralPoint, SumSpec};
use crate::verify::{self, Context, VerifyOptions};

/// Default output directory when `--out` is absent.
pub const OUT_ENV: &str = "JOSTLT_OUT";

#[derive(Parser, Debug)]
#[command(name = "jostlt", version, about = "Jost functions, complex eigenvalues and eigenvalue sums on the half-line")]
pub struct Cli {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Output directory (default: $JOSTLT_OUT, else ./jostlt-out).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Jsonl,
    Csv,
}

impl Format {
    fn ext(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Jsonl => "jsonl",
            Format::Csv => "csv",
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate e₊(0,z) and its derivative.
    Jost(JostArgs),
    /// Discrete spectrum of a general potential by argument-principle search.
    Spectrum(SpectrumArgs),
    /// Stream the fixed-point eigenvalues of the barrier iγ·χ_[0,R].
    Barrier(BarrierArgs),
    /// Invariant suite for the barrier eigenvalue family.
    BarrierCheck(BarrierCheckArgs),
    /// Eigenvalue sums of a stored spectrum.
    Sums(SumsArgs),
    /// Upper and lower bounds for a potential's eigenvalue sums.
    Bounds(BoundsArgs),
    /// Staged construction of a potential with growing Jensen sum.
    Construct(ConstructArgs),
    /// Run every acceptance criterion.
    VerifyAll(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodArg {
    Tm,
    Series,
    Ode,
    All,
}

#[derive(Args, Debug, Serialize)]
pub struct JostArgs {
    /// Potential descriptor: a JSON file or inline JSON.
    #[arg(long)]
    pub potential: String,
    /// Spectral parameter as `RE,IM`.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub z: C64,
    #[arg(long, value_enum, default_value = "all")]
    pub method: MethodArg,
    /// Series tolerance.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
}

#[derive(Args, Debug, Serialize)]
pub struct SpectrumArgs {
    #[arg(long)]
    pub potential: String,
    /// Box size at which zeros are reported.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Lower edge `Im z ≥ floor` of the search.
    #[arg(long)]
    pub floor: Option<f64>,
}

#[derive(Args, Debug, Serialize)]
pub struct BarrierArgs {
    #[arg(long)]
    pub gamma: f64,
    #[arg(long = "R")]
    pub r: f64,
    /// Last index (default M_R).
    #[arg(long, conflicts_with = "all")]
    pub jmax: Option<u64>,
    /// Continue past M_R until the family leaves the upper half-plane.
    #[arg(long)]
    pub all: bool,
    #[arg(long, default_value_t = verify::FP_TOL)]
    pub tol: f64,
}

#[derive(Args, Debug, Serialize)]
pub struct BarrierCheckArgs {
    #[arg(long)]
    pub gamma: f64,
    #[arg(long = "R")]
    pub r: f64,
    #[arg(long, default_value_t = verify::FP_TOL)]
    pub tol: f64,
    /// Random points for the φ-identity check.
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SumKind {
    /// `S_ε`.
    S,
    /// Jensen sum.
    J,
    /// `S_{α,β}`.
    Gen,
}

#[derive(Args, Debug, Serialize)]
pub struct SumsArgs {
    /// Spectrum from `spectrum` or `barrier` (JSON or JSON-lines).
    #[arg(long)]
    pub spectrum: PathBuf,
    #[arg(long, value_enum)]
    pub kind: SumKind,
    #[arg(long, default_value_t = 0.0)]
    pub eps: f64,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Upper,
    Lower,
    All,
}

#[derive(Args, Debug, Serialize)]
pub struct BoundsArgs {
    #[arg(long)]
    pub potential: String,
    #[arg(long, value_enum, default_value = "all")]
    pub suite: Suite,
    /// Exponent of the polynomial weight `1 + x^p`.
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    /// ε of the barrier lower bound for `S_ε`.
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long, default_value_t = 1e-11)]
    pub tol: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileArg {
    Full,
    Toy,
}

#[derive(Args, Debug, Serialize)]
pub struct ConstructArgs {
    #[arg(long, default_value_t = 3)]
    pub stages: u64,
    #[arg(long, value_enum, default_value = "toy")]
    pub profile: ProfileArg,
    /// Last n of the divergence series table.
    #[arg(long, default_value_t = 1_000_000)]
    pub series_n: u64,
}

#[derive(Args, Debug, Serialize)]
pub struct VerifyArgs {
    /// Thinner grids and fewer samples; tolerances are unchanged.
    #[arg(long)]
    pub quick: bool,
    #[arg(long, default_value_t = VerifyOptions::default().seed)]
    pub seed: u64,
    /// Run only these criteria.
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<u8>,
}

fn parse_complex(s: &str) -> std::result::Result<C64, String> {
    let (a, b) = s.split_once(',').ok_or("expected RE,IM")?;
    let re = a.trim().parse::<f64>().map_err(|e| e.to_string())?;
    let im = b.trim().parse::<f64>().map_err(|e| e.to_string())?;
    Ok(C64::new(re, im))
}

#[derive(Serialize)]
pub struct OutputFile {
    /// Relative to the manifest's directory.
    pub path: String,
    pub sha256: String,
}

/// Everything needed to reproduce a run. Result files never contain
/// timestamps; set `SOURCE_DATE_EPOCH` to pin the two here as well.
#[derive(Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: Value,
    pub version: String,
    pub threads: usize,
    pub started_unix: u64,
    pub finished_unix: u64,
    pub input_hashes: BTreeMap<String, String>,
    pub outputs: Vec<OutputFile>,
}

fn now_unix() -> u64 {
    if let Some(t) = std::env::var("SOURCE_DATE_EPOCH").ok().and_then(|s| s.parse().ok()) {
        return t;
    }
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Collects output files of one run and writes the manifest last.
struct Run {
    dir: PathBuf,
    stem: String,
    manifest: RunManifest,
}

impl Run {
    fn new(dir: PathBuf, command: &str, parameters: Value, threads: usize) -> Result<Self> {
        std::fs::create_dir_all(&dir)?;
        Ok(Self {
            dir,
            stem: command.to_string(),
            manifest: RunManifest {
                command: command.into(),
                parameters,
                version: env!("CARGO_PKG_VERSION").into(),
                threads,
                started_unix: now_unix(),
                finished_unix: 0,
                input_hashes: BTreeMap::new(),
                outputs: vec![],
            },
        })
    }

    fn manifest_name(&self) -> String {
        format!("{}.manifest.json", self.stem)
    }

    /// Records the hash of a potential argument, inline or from a file.
    fn hash_input(&mut self, arg: &str) -> Result<()> {
        if arg.trim_start().starts_with('{') {
            self.manifest.input_hashes.insert("inline".into(), sha256_hex(arg.trim().as_bytes()));
        } else {
            self.hash_file(Path::new(arg))?;
        }
        Ok(())
    }

    fn hash_file(&mut self, p: &Path) -> Result<()> {
        let bytes = std::fs::read(p)
            .map_err(|e| Error::InvalidParameter(format!("cannot read {}: {e}", p.display())))?;
        self.manifest.input_hashes.insert(p.display().to_string(), sha256_hex(&bytes));
        Ok(())
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    fn register(&mut self, name: &str) -> Result<()> {
        let bytes = std::fs::read(self.path(name))?;
        self.manifest.outputs.push(OutputFile { path: name.into(), sha256: sha256_hex(&bytes) });
        Ok(())
    }

    /// One JSON document wrapped with a pointer to its manifest.
    fn write_json<T: Serialize>(&mut self, name: &str, result: &T) -> Result<()> {
        #[derive(Serialize)]
        struct Doc<'a, T> {
            manifest: String,
            result: &'a T,
        }
        let doc = Doc { manifest: self.manifest_name(), result };
        let mut w = BufWriter::new(File::create(self.path(name))?);
        serde_json::to_writer_pretty(&mut w, &doc)?;
        writeln!(w)?;
        w.flush()?;
        drop(w);
        self.register(name)
    }

    fn write_jsonl<R: Serialize>(&mut self, name: &str, rows: impl IntoIterator<Item = R>) -> Result<()> {
        let mut w = BufWriter::new(File::create(self.path(name))?);
        for r in rows {
            serde_json::to_writer(&mut w, &r)?;
            writeln!(w)?;
        }
        w.flush()?;
        drop(w);
        self.register(name)
    }

    fn write_csv<R: Serialize>(&mut self, name: &str, rows: impl IntoIterator<Item = R>) -> Result<()> {
        let mut w = csv::Writer::from_path(self.path(name))?;
        for r in rows {
            w.serialize(r)?;
        }
        w.flush()?;
        drop(w);
        self.register(name)
    }

    /// Writes `result` as JSON, or its flat `rows` as JSON-lines or CSV.
    fn emit<T: Serialize, R: Serialize>(&mut self, fmt: Format, result: &T, rows: impl IntoIterator<Item = R>) -> Result<()> {
        let name = format!("{}.{}", self.stem, fmt.ext());
        match fmt {
            Format::Json => self.write_json(&name, result),
            Format::Jsonl => self.write_jsonl(&name, rows),
            Format::Csv => self.write_csv(&name, rows),
        }
    }

    fn finish(mut self) -> Result<PathBuf> {
        self.manifest.finished_unix = now_unix();
        let p = self.path(&self.manifest_name());
        let mut w = BufWriter::new(File::create(&p)?);
        serde_json::to_writer_pretty(&mut w, &self.manifest)?;
        writeln!(w)?;
        w.flush()?;
        Ok(p)
    }
}

/// Process exit status: 0 success, 1 a bound or check failed, 2 usage or
/// input error.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok = 0,
    BoundFailed = 1,
    Usage = 2,
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { Status::Usage as i32 } else { Status::Ok as i32 };
        }
    };
    match execute(cli) {
        Ok(s) => s as i32,
        Err(e) => {
            eprintln!("error: {e}");
            Status::Usage as i32
        }
    }
}

fn out_dir(cli: &Cli) -> PathBuf {
    cli.out
        .clone()
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("jostlt-out"))
}

pub fn execute(cli: Cli) -> Result<Status> {
    let threads = cli.threads.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if threads == 0 {
        return Err(Error::InvalidParameter("--threads must be positive".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let dir = out_dir(&cli);
    pool.install(|| match &cli.command {
        Command::Jost(a) => cmd_jost(a, dir, threads, cli.format.unwrap_or(Format::Json)),
        Command::Spectrum(a) => cmd_spectrum(a, dir, threads, cli.format.unwrap_or(Format::Json)),
        Command::Barrier(a) => cmd_barrier(a, dir, threads, cli.format.unwrap_or(Format::Jsonl)),
        Command::BarrierCheck(a) => cmd_barrier_check(a, dir, threads, cli.format.unwrap_or(Format::Json)),
        Command::Sums(a) => cmd_sums(a, dir, threads, cli.format.unwrap_or(Format::Json)),
        Command::Bounds(a) => cmd_bounds(a, dir, threads, cli.format.unwrap_or(Format::Json)),
        Command::Construct(a) => cmd_construct(a, dir, threads, cli.format.unwrap_or(Format::Json)),
        Command::VerifyAll(a) => cmd_verify(a, dir, threads, cli.format.unwrap_or(Format::Json)),
    })
}

fn params<T: Serialize>(a: &T) -> Value {
    serde_json::to_value(a).unwrap_or(Value::Null)
}

fn done(run: Run) -> Result<()> {
    let p = run.finish()?;
    println!("manifest: {}", p.display());
    Ok(())
}

#[derive(Serialize)]
struct JostRow {
    method: String,
    z_re: f64,
    z_im: f64,
    value_re: f64,
    value_im: f64,
    derivative_re: f64,
    derivative_im: f64,
    error: f64,
    work: usize,
}

impl JostRow {
    fn new(e: &JostEvaluation) -> Self {
        let method = serde_json::to_value(e.method).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
        let (v, d) = (e.value(), e.derivative());
        Self {
            method,
            z_re: e.z.re,
            z_im: e.z.im,
            value_re: v.re,
            value_im: v.im,
            derivative_re: d.re,
            derivative_im: d.im,
            error: e.error_estimate(),
            work: e.work,
        }
    }
}

fn cmd_jost(a: &JostArgs, dir: PathBuf, threads: usize, fmt: Format) -> Result<Status> {
    let mut run = Run::new(dir, "jost", params(a), threads)?;
    run.hash_input(&a.potential)?;
    let q = PotentialSpec::parse(&a.potential)?.build()?;
    let mut evals = vec![];
    if matches!(a.method, MethodArg::Tm | MethodArg::All) {
        evals.push(jost_transfer_matrix(&q, a.z)?);
    }
    if matches!(a.method, MethodArg::Series | MethodArg::All) {
        evals.push(jost_series(&q, a.z, a.tol)?);
    }
    if matches!(a.method, MethodArg::Ode | MethodArg::All) {
        evals.push(jost_ode(&q, a.z, OdeOptions::default())?);
    }
    let rows: Vec<JostRow> = evals.iter().map(JostRow::new).collect();
    for r in &rows {
        println!(
            "{:>16}: e₊(0,z) = {:+.15e} {:+.15e}i  (error {:.1e})",
            r.method, r.value_re, r.value_im, r.error
        );
    }
    run.emit(fmt, &rows, &rows)?;
    done(run)?;
    Ok(Status::Ok)
}

#[derive(Serialize)]
struct EigenRow {
    lambda_re: f64,
    lambda_im: f64,
    z_re: f64,
    z_im: f64,
    multiplicity: u32,
    residual: f64,
}

fn cmd_spectrum(a: &SpectrumArgs, dir: PathBuf, threads: usize, fmt: Format) -> Result<Status> {
    let mut run = Run::new(dir, "spectrum", params(a), threads)?;
    run.hash_input(&a.potential)?;
    let q = PotentialSpec::parse(&a.potential)?.build()?;
    let rep = find_spectrum_with(&q, &SearchOptions { tol: a.tol, floor: a.floor, ..Default::default() })?;
    let rows: Vec<EigenRow> = rep
        .eigenvalues
        .iter()
        .map(|e| EigenRow {
            lambda_re: e.lambda.re,
            lambda_im: e.lambda.im,
            z_re: e.z.re,
            z_im: e.z.im,
            multiplicity: e.multiplicity,
            residual: e.residual,
        })
        .collect();
    println!(
        "{} eigenvalues (total multiplicity {}), enclosure |λ| ≤ {:.6}, {} unresolved region(s)",
        rep.eigenvalues.len(),
        rep.total_multiplicity(),
        rep.enclosure.r,
        rep.unresolved.len()
    );
    for u in &rep.unresolved {
        println!("  unresolved: {} (count {:?})", u.reason, u.count);
    }
    run.emit(fmt, &rep, &rows)?;
    done(run)?;
    Ok(Status::Ok)
}

#[derive(Serialize)]
struct FixedPointRow {
    j: u64,
    lambda_re: f64,
    lambda_im: f64,
    z_re: f64,
    z_im: f64,
    iterations: usize,
    residual_phi: f64,
    contraction: f64,
    in_spectrum: bool,
    eigenvalue: bool,
    guaranteed: bool,
}

fn fixed_point_rows(en: &Enumeration) -> impl Iterator<Item = FixedPointRow> + '_ {
    en.solutions.iter().map(|s| FixedPointRow {
        j: s.j,
        lambda_re: s.lambda.re,
        lambda_im: s.lambda.im,
        z_re: s.z.re,
        z_im: s.z.im,
        iterations: s.iterations,
        residual_phi: s.residual_phi,
        contraction: s.contraction,
        in_spectrum: s.in_spectrum,
        eigenvalue: s.eigenvalue,
        guaranteed: s.guaranteed,
    })
}

fn cmd_barrier(a: &BarrierArgs, dir: PathBuf, threads: usize, fmt: Format) -> Result<Status> {
    let mut run = Run::new(dir, "barrier", params(a), threads)?;
    let spec = BarrierSpec::new(a.gamma, a.r)?;
    let en = if a.all { enumerate_until_exit(&spec, a.tol) } else { enumerate_spectrum(&spec, a.jmax, a.tol) };
    println!(
        "γ = {}, R = {}: M_R = {}, {} solutions, {} eigenvalues, {} in the strip, {} failures{}",
        a.gamma,
        a.r,
        en.m_r,
        en.solutions.len(),
        en.eigenvalues().count(),
        en.in_spectrum_count(),
        en.failures.len(),
        if en.capped { " (capped)" } else { "" }
    );
    match fmt {
        Format::Json => run.emit(fmt, &en.solutions, std::iter::empty::<()>())?,
        Format::Jsonl => run.emit(fmt, &(), en.solutions.iter())?,
        Format::Csv => run.emit(fmt, &(), fixed_point_rows(&en))?,
    }
    if !en.failures.is_empty() {
        run.write_jsonl("barrier_failures.jsonl", en.failures.iter())?;
    }
    done(run)?;
    Ok(if en.failures.is_empty() { Status::Ok } else { Status::BoundFailed })
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckRow {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub threshold: f64,
    pub detail: String,
}

fn check(name: &str, passed: bool, value: f64, threshold: f64, detail: String) -> CheckRow {
    CheckRow { name: name.into(), passed, value, threshold, detail }
}

/// Invariant suite on the full barrier eigenvalue family.
pub fn barrier_checks(spec: &BarrierSpec, tol: f64, samples: usize, seed: u64) -> Result<Vec<CheckRow>> {
    let en = enumerate_until_exit(spec, tol);
    let mut out = vec![];
    out.push(check(
        "fixed_point_failures",
        en.failures.is_empty() && !en.capped,
        en.failures.len() as f64,
        0.0,
        format!("{} solutions", en.solutions.len()),
    ));
    let guaranteed: Vec<_> = en.solutions.iter().filter(|s| s.guaranteed).collect();
    let strip_misses = guaranteed.iter().filter(|s| !(s.in_spectrum && s.eigenvalue)).count();
    out.push(check(
        "guaranteed_in_strip",
        strip_misses == 0,
        strip_misses as f64,
        0.0,
        format!("{} of {} guaranteed solutions", guaranteed.len() - strip_misses, guaranteed.len()),
    ));
    let worst_c = guaranteed.iter().map(|s| s.contraction).fold(0.0, f64::max);
    out.push(check(
        "contraction",
        !spec.satisfies_bigr() || worst_c < 1.0,
        worst_c,
        1.0,
        format!("large-R condition {}", if spec.satisfies_bigr() { "met" } else { "not met; informational" }),
    ));
    let worst_phi = en.solutions.iter().filter(|s| s.in_spectrum).map(|s| s.residual_phi).fold(0.0, f64::max);
    let worst_all = en.eigenvalues().map(|s| s.residual_phi).fold(0.0, f64::max);
    out.push(check(
        "phi_residual",
        worst_phi < 1e-10,
        worst_phi,
        1e-10,
        format!("normalized |φ_R(z_j)| in the strip; {worst_all:.2e} over all eigenvalues"),
    ));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = Potential::barrier(spec.gamma, spec.r);
    let mut worst_id: f64 = 0.0;
    for _ in 0..samples {
        let m = rng.gen_range((0.05f64).ln()..(2.0 * spec.l1_norm()).ln()).exp();
        let z = C64::from_polar(m, rng.gen_range(0.0..std::f64::consts::PI));
        let s = sq_plus(z * z - C64::new(0.0, spec.gamma));
        let e = jost_transfer_matrix(&q, z)?.value_wide();
        let phi = phi_r(spec, z);
        let lhs = phi + e * Wide::exp(C64::new(0.0, -spec.r) * z) * (s * 2.0);
        worst_id = worst_id.max(lhs.abs_ratio(&(Wide::ONE + phi.abs_wide())));
    }
    out.push(check("phi_identity", worst_id <= 1e-11, worst_id, 1e-11, format!("{samples} random z")));
    let cert = certify_enumeration(&en, 1e-12)?;
    out.push(check(
        "completeness",
        cert.complete,
        cert.contour_count.count as f64,
        cert.enumerated as f64,
        "argument-principle count over the strip vs enumerated".into(),
    ));
    let bc = box_count(&en, calibrate_c1(&en));
    out.push(check(
        "box_count",
        bc.meets_bound,
        bc.count as f64,
        bc.bound,
        format!("eigenvalues with {:.3} ≤ |λ| ≤ {:.3}, calibrated C₁ = {:.3}", bc.lo, bc.hi, bc.c1),
    ));
    Ok(out)
}

fn cmd_barrier_check(a: &BarrierCheckArgs, dir: PathBuf, threads: usize, fmt: Format) -> Result<Status> {
    let mut run = Run::new(dir, "barrier-check", params(a), threads)?;
    let spec = BarrierSpec::new(a.gamma, a.r)?;
    let rows = barrier_checks(&spec, a.tol, a.samples, a.seed)?;
    for r in &rows {
        println!("{} {}: {:.4e} vs {:.4e} ({})", if r.passed { "PASS" } else { "FAIL" }, r.name, r.value, r.threshold, r.detail);
    }
    run.emit(fmt, &rows, &rows)?;
    done(run)?;
    Ok(if rows.iter().all(|r| r.passed) { Status::Ok } else { Status::BoundFailed })
}

/// Reads a spectrum written by `spectrum` or `barrier`: a JSON document
/// (with `eigenvalues` or a list of records) or JSON-lines. Records need
/// `lambda` or `lambda_re`/`lambda_im`; those marked `"eigenvalue": false`
/// are skipped.
pub fn read_spectrum(path: &Path) -> Result<Vec<SpectralPoint>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidParameter(format!("cannot read {}: {e}", path.display())))?;
    let records: Vec<Value> = match serde_json::from_str::<Value>(&text) {
        Ok(v) => {
            let v = v.get("result").cloned().unwrap_or(v);
            let v = v.get("eigenvalues").cloned().unwrap_or(v);
            match v {
                Value::Array(a) => a,
                other => vec![other],
            }
        }
        Err(_) => text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(serde_json::from_str)
            .collect::<std::result::Result<_, _>>()?,
    };
    let mut out = vec![];
    for r in records {
        if r.get("eigenvalue") == Some(&Value::Bool(false)) {
            continue;
        }
        let lambda = if let Some(l) = r.get("lambda") {
            serde_json::from_value::<C64>(l.clone())?
        } else {
            let f = |k: &str| r.get(k).and_then(Value::as_f64);
            match (f("lambda_re"), f("lambda_im")) {
                (Some(re), Some(im)) => C64::new(re, im),
                _ => return Err(Error::InvalidParameter("spectrum record without lambda".into())),
            }
        };
        let multiplicity = r.get("multiplicity").and_then(Value::as_u64).unwrap_or(1) as u32;
        out.push(SpectralPoint { lambda, multiplicity });
    }
    Ok(out)
}

fn cmd_sums(a: &SumsArgs, dir: PathBuf, threads: usize, fmt: Format) -> Result<Status> {
    let mut run = Run::new(dir, "sums", params(a), threads)?;
    run.hash_file(&a.spectrum)?;
    let spec = match a.kind {
        SumKind::S => SumSpec::SEps { eps: a.eps },
        SumKind::J => SumSpec::Jensen,
        SumKind::Gen => match (a.alpha, a.beta) {
            (Some(alpha), Some(beta)) => SumSpec::SAlphaBeta { alpha, beta },
            _ => return Err(Error::InvalidParameter("--kind gen needs --alpha and --beta".into())),
        },
    };
    let pts = read_spectrum(&a.spectrum)?;
    let rep = eval_sum(&pts, spec, false)?;
    println!("{:?} over {} eigenvalues = {:.15e}", rep.spec, rep.n_terms, rep.value);
    run.emit(fmt, &rep, [rep])?;
    done(run)?;
    Ok(Status::Ok)
}

#[derive(Serialize)]
struct BoundRow<'a> {
    name: &'a str,
    direction: &'a str,
    lhs: f64,
    rhs: f64,
    margin: f64,
    preconditions_met: bool,
}

/// Bounds of one suite for a potential: barriers use the full certified
/// eigenvalue family, other potentials the argument-principle spectrum.
pub fn bound_suite(q_spec: &PotentialSpec, suite: Suite, p: f64, eps: Option<f64>, tol: f64) -> Result<(Vec<BoundReport>, Vec<String>)> {
    let q = q_spec.build()?;
    let upper = matches!(suite, Suite::Upper | Suite::All);
    let lower = matches!(suite, Suite::Lower | Suite::All);
    let mut out = vec![];
    let mut notes = vec![];
    if let PotentialSpec::Barrier { gamma, r } = *q_spec {
        let spec = BarrierSpec::new(gamma, r)?;
        let en = enumerate_until_exit(&spec, verify::FP_TOL);
        let cert = certify_enumeration(&en, 1e-12)?;
        if !cert.complete {
            notes.push(format!("enumeration incomplete: contour {} vs {}", cert.contour_count.count, cert.enumerated));
        }
        let pts = points_from_enumeration(&en, false);
        let j = eval_sum(&pts, SumSpec::Jensen, !cert.complete)?.value;
        let [lo, hi] = jensen_two_sided(&spec, j);
        if upper {
            out.push(bound_poly(&q, p, j)?);
            out.push(bound_compact(&q, Some(r), j)?);
            out.push(bound_compact_weighted(&q, r, j)?);
            out.push(hi);
        }
        if lower {
            out.push(lo);
            out.extend(lower_bounds_barrier(&spec, eps, &[1.0, 2.0], &pts)?);
        }
    } else {
        let rep = find_spectrum_with(&q, &SearchOptions { tol, ..Default::default() })?;
        if !rep.is_resolved() {
            notes.push(format!("{} unresolved region(s); J misses their eigenvalues", rep.unresolved.len()));
        }
        let j = eval_sum(&points_from_report(&rep), SumSpec::Jensen, !rep.is_resolved())?.value;
        if upper {
            out.push(bound_poly(&q, p, j)?);
            if q.support_end().is_some() {
                out.push(bound_compact(&q, None, j)?);
            } else {
                notes.push("compact-support bound skipped: unbounded support".into());
            }
        }
        if lower {
            notes.push("lower bounds apply to barrier potentials only".into());
        }
    }
    Ok((out, notes))
}

fn cmd_bounds(a: &BoundsArgs, dir: PathBuf, threads: usize, fmt: Format) -> Result<Status> {
    let mut run = Run::new(dir, "bounds", params(a), threads)?;
    run.hash_input(&a.potential)?;
    let q = PotentialSpec::parse(&a.potential)?;
    let (reps, notes) = bound_suite(&q, a.suite, a.p, a.eps, a.tol)?;
    for r in &reps {
        let verdict = match r.passed() {
            Some(true) => "PASS",
            Some(false) => "FAIL",
            None => "N/A ",
        };
        println!("{verdict} {:<24} lhs {:.6e}  rhs {:.6e}  margin {:+.4e}", r.name, r.lhs, r.rhs, r.margin);
    }
    for n in &notes {
        println!("note: {n}");
    }
    let rows: Vec<BoundRow> = reps
        .iter()
        .map(|r| BoundRow {
            name: &r.name,
            direction: if r.direction == crate::bounds::Direction::Upper { "upper" } else { "lower" },
            lhs: r.lhs,
            rhs: r.rhs,
            margin: r.margin,
            preconditions_met: r.preconditions_met,
        })
        .collect();
    run.emit(fmt, &reps, &rows)?;
    done(run)?;
    Ok(if reps.iter().any(BoundReport::failed) { Status::BoundFailed } else { Status::Ok })
}

#[derive(Serialize)]
struct StageOutput<'a> {
    stage: &'a StageRecord,
    /// Full profile: `γ_n`, `R_n`, `M_{R_n}` and the certified contribution.
    parameters: Option<StageParameters>,
    /// Full profile: `Σ_{k≤n} γ_kR_k log R_k/(64π)`.
    certified_partial_sum: Option<f64>,
}

#[derive(Serialize)]
struct StageRow {
    n: u64,
    gamma: f64,
    half_width: f64,
    x: f64,
    certified: bool,
    tracked: usize,
    jensen_partial: f64,
    half_retention: bool,
}

fn cmd_construct(a: &ConstructArgs, dir: PathBuf, threads: usize, fmt: Format) -> Result<Status> {
    let mut run = Run::new(dir, "construct", params(a), threads)?;
    let profile = match a.profile {
        ProfileArg::Full => Profile::Full,
        ProfileArg::Toy => Profile::Toy,
    };
    let state = build(profile, a.stages, &ShiftOptions::default())?;
    let mut certified_sum = 0.0;
    for s in &state.stages {
        println!(
            "stage {}: γ = {:.6e}, half-width {:.6e}, X = {}, certified {}, {} tracked, J-partial {:.6}",
            s.n,
            s.gamma,
            s.half_width,
            s.x,
            s.certified,
            s.tracked.len(),
            s.jensen_partial
        );
        let parameters = (profile == Profile::Full).then(|| stage_parameters(s.n)).transpose()?;
        if let Some(p) = &parameters {
            certified_sum += p.certified_contribution;
        }
        let doc = StageOutput {
            stage: s,
            parameters,
            certified_partial_sum: (profile == Profile::Full).then_some(certified_sum),
        };
        run.write_json(&format!("construct_stage_{:03}.json", s.n), &doc)?;
    }
    let rows: Vec<StageRow> = state
        .stages
        .iter()
        .map(|s| StageRow {
            n: s.n,
            gamma: s.gamma,
            half_width: s.half_width,
            x: s.x,
            certified: s.certified,
            tracked: s.tracked.len(),
            jensen_partial: s.jensen_partial,
            half_retention: s.half_retention,
        })
        .collect();
    run.emit(fmt, &state, &rows)?;
    let series = jensen_growth_report(a.series_n)?;
    run.write_csv("construct_series.csv", &series)?;
    if let Some(last) = series.last() {
        println!(
            "certified Jensen partial sum through n = {}: {:.4} (L¹ norm {:.4})",
            last.n, last.partial_sum, last.l1_partial
        );
    }
    done(run)?;
    let ok = state.supports_disjoint() && state.stages.iter().all(|s| s.half_retention);
    Ok(if ok { Status::Ok } else { Status::BoundFailed })
}

fn cmd_verify(a: &VerifyArgs, dir: PathBuf, threads: usize, fmt: Format) -> Result<Status> {
    let mut run = Run::new(dir, "verify-all", params(a), threads)?;
    let ctx = Context::new(VerifyOptions { quick: a.quick, seed: a.seed });
    let ids: Vec<u8> = if a.only.is_empty() { (1..=10).collect() } else { a.only.clone() };
    if let Some(bad) = ids.iter().find(|&&i| !(1..=10).contains(&i)) {
        return Err(Error::InvalidParameter(format!("no criterion {bad}")));
    }
    let mut reps = vec![];
    for id in ids {
        let r = verify::run(&ctx, id);
        println!("{}", r.line());
        reps.push(r);
    }
    // timings vary between runs; keep them out of the result file
    let stable: Vec<_> = reps
        .iter()
        .map(|r| verify::CriterionReport {
            seconds: 0.0,
            details: r.details.iter().filter(|d| !d.contains("runtime")).cloned().collect(),
            ..r.clone()
        })
        .collect();
    #[derive(Serialize)]
    struct Row<'a> {
        id: u8,
        title: &'a str,
        passed: bool,
        summary: &'a str,
    }
    let rows: Vec<Row> = stable.iter().map(|r| Row { id: r.id, title: &r.title, passed: r.passed, summary: &r.summary }).collect();
    run.emit(fmt, &stable, &rows)?;
    done(run)?;
    Ok(if reps.iter().all(|r| r.passed) { Status::Ok } else { Status::BoundFailed })
}
