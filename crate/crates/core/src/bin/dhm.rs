//! `dhm`: transforms, norms, weight constants, embedding dumps and
//! verification sweeps from the command line.
//!
//! Exit status: 0 success, 1 an asserted check failed, 2 usage or input error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use dhm_core::embedding::{self, WeightStyle};
use dhm_core::norms;
use dhm_core::transforms;
use dhm_core::verify::{self, RunConfig, SCHEMA_VERSION};
use dhm_core::{EvalPlan, Fixture, MorreyParams, Seq, TailPolicy, Weight, WeightFamily};

#[derive(Parser)]
#[command(
    name = "dhm",
    version,
    about = "Discrete Hilbert transform and weighted Morrey norms"
)]
struct Cli {
    /// Worker threads.
    #[arg(long, global = true, env = "DHM_PARALLELISM")]
    parallelism: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Hilbert transform of a sequence on an evaluation window (JSON).
    Transform(TransformArgs),
    /// Weighted Morrey norm of a sequence (JSON).
    Norm(NormArgs),
    /// Discrete Muckenhoupt constant of a weight (JSON).
    Apconst(ApArgs),
    /// Sampled embedding f, w(x), S(f), M(f) (CSV).
    Embed(EmbedArgs),
    /// Run a verification sweep.
    Verify(VerifyArgs),
    /// Time the direct and FFT transforms.
    Bench(BenchArgs),
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct SeqSource {
    /// Unit impulse at this index.
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<i64>,
    /// JSON fixture `{"lo": .., "values": [..], "family": null}`.
    #[arg(long)]
    fixture: Option<PathBuf>,
    /// Comma-separated values starting at `--offset`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    values: Option<Vec<f64>>,
}

#[derive(Args)]
struct SeqArgs {
    #[command(flatten)]
    source: SeqSource,
    /// Index of the first of `--values`.
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    offset: i64,
}

impl SeqArgs {
    fn load(&self) -> Result<Seq, String> {
        let s = &self.source;
        if let Some(k) = s.delta {
            return Ok(Seq::delta(k));
        }
        if let Some(path) = &s.fixture {
            let text = read(path)?;
            let fixture = Fixture::from_json(&text).map_err(|e| format!("{}: {e}", path.display()))?;
            return Seq::from_fixture(&fixture).map_err(|e| format!("{}: {e}", path.display()));
        }
        let values = s.values.clone().unwrap_or_default();
        Seq::new(values, self.offset).map_err(|e| e.to_string())
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum TransformPath {
    Naive,
    Fast,
}

#[derive(Args)]
struct TransformArgs {
    #[command(flatten)]
    seq: SeqArgs,
    /// Evaluate on `[-window, window]`.
    #[arg(long, conflicts_with_all = ["lo", "hi"])]
    window: Option<i64>,
    #[arg(long, requires = "hi", allow_hyphen_values = true)]
    lo: Option<i64>,
    #[arg(long, requires = "lo", allow_hyphen_values = true)]
    hi: Option<i64>,
    #[arg(long, value_enum, default_value = "naive")]
    path: TransformPath,
    /// Shorthand for `--path fast`.
    #[arg(long)]
    fast: bool,
    /// Use the sharper tail bound when the sequence sums to zero.
    #[arg(long)]
    analytic_tail: bool,
    /// Write JSON here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct NormArgs {
    #[command(flatten)]
    seq: SeqArgs,
    #[arg(long, default_value = "const:1")]
    weight: String,
    #[arg(long)]
    p: f64,
    #[arg(long, default_value_t = 0.0)]
    lambda: f64,
    /// Extra centers searched on each side of the support.
    #[arg(long, default_value_t = 0)]
    margin: i64,
}

#[derive(Args)]
struct ApArgs {
    #[arg(long)]
    weight: String,
    #[arg(long)]
    p: f64,
    /// Intervals inside `[-window, window]`.
    #[arg(long)]
    window: i64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Style {
    Quarter,
    Half,
}

#[derive(Args)]
struct EmbedArgs {
    #[command(flatten)]
    seq: SeqArgs,
    #[arg(long, default_value = "const:1")]
    weight: String,
    #[arg(long, value_enum, default_value = "quarter")]
    style: Style,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    /// Sample range; defaults to the support widened by 2.
    #[arg(long, allow_hyphen_values = true)]
    from: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    to: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// TOML config; the built-in defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Report JSON path (overrides the config).
    #[arg(long)]
    json: Option<PathBuf>,
    /// Report CSV path (overrides the config).
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Print the effective config as TOML and exit.
    #[arg(long)]
    print_config: bool,
}

#[derive(Args)]
struct BenchArgs {
    /// Evaluation window length.
    #[arg(long, default_value_t = 1 << 15)]
    window: i64,
    /// Support length of the random input; the window length by default.
    #[arg(long)]
    support: Option<usize>,
    #[arg(long, default_value_t = 3)]
    repeats: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

enum Failure {
    Usage(String),
    Checks,
}

impl From<String> for Failure {
    fn from(s: String) -> Self {
        Failure::Usage(s)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let parallelism = cli
        .parallelism
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1));
    let outcome = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism.max(1))
        .build()
        .map_err(|e| Failure::Usage(format!("thread pool: {e}")))
        .and_then(|pool| {
            pool.install(|| match cli.command {
                Command::Transform(a) => transform(a),
                Command::Norm(a) => norm(a),
                Command::Apconst(a) => apconst(a),
                Command::Embed(a) => embed(a),
                Command::Verify(a) => run_verify(a, parallelism),
                Command::Bench(a) => bench(a),
            })
        });
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("dhm: {msg}");
            ExitCode::from(2)
        }
    }
}

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), String> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| format!("stdout: {e}")),
    }
}

/// Fails early when a report could not be written at the end of a run.
fn ensure_writable(path: &Path) -> Result<(), String> {
    let parent = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    if !parent.is_dir() {
        return Err(format!("{}: directory does not exist", parent.display()));
    }
    if let Ok(meta) = fs::metadata(path) {
        if meta.is_dir() || meta.permissions().readonly() {
            return Err(format!("{}: not writable", path.display()));
        }
    }
    Ok(())
}

fn json_text(value: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("json value serializes");
    s.push('\n');
    s
}

fn transform(a: TransformArgs) -> Result<(), Failure> {
    let b = a.seq.load()?;
    let plan = match (a.window, a.lo, a.hi) {
        (Some(h), _, _) => EvalPlan::symmetric(h),
        (None, Some(lo), Some(hi)) => EvalPlan::new(lo, hi),
        _ => return Err(Failure::Usage("give --window or --lo/--hi".into())),
    }
    .map_err(|e| e.to_string())?;
    let plan = if a.analytic_tail {
        plan.with_tail_policy(TailPolicy::AnalyticTail)
    } else {
        plan
    };
    let fast = a.fast || matches!(a.path, TransformPath::Fast);
    let result = if fast {
        transforms::hilbert_fast(&b, &plan)
    } else {
        transforms::hilbert_naive(&b, &plan)
    }
    .map_err(|e| e.to_string())?;
    let n: Vec<i64> = (plan.eval_lo..=plan.eval_hi).collect();
    let hb: Vec<f64> = n.iter().map(|&k| result.get(k)).collect();
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "path": if fast { "fast" } else { "naive" },
        "n": n,
        "Hb": hb,
        "tail_bound": result.tail_bound,
    });
    emit(a.out.as_deref(), &json_text(&doc))?;
    let peak = hb.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    eprintln!(
        "transform: {} points on [{}, {}], max |Hb| = {peak}, tail bound = {}",
        plan.len(),
        plan.eval_lo,
        plan.eval_hi,
        result.tail_bound
    );
    Ok(())
}

fn norm(a: NormArgs) -> Result<(), Failure> {
    let b = a.seq.load()?;
    let family: WeightFamily = a.weight.parse().map_err(|e: dhm_core::Error| e.to_string())?;
    let params = MorreyParams::new(a.p, a.lambda).map_err(|e| e.to_string())?;
    let plan = EvalPlan::around(&b, 1)
        .with_margin(a.margin)
        .map_err(|e| e.to_string())?;
    let reach = 1 + a.margin;
    let w = Weight::from_family(family, b.lo() - reach, b.hi() + reach).map_err(|e| e.to_string())?;
    let v = norms::weighted_morrey_norm(&b, &w, params, &plan).map_err(|e| e.to_string())?;
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "value": v.value,
        "exactness": v.exactness,
        "witness": [v.witness.0, v.witness.1],
    });
    emit(None, &json_text(&doc))?;
    Ok(())
}

fn apconst(a: ApArgs) -> Result<(), Failure> {
    let family: WeightFamily = a.weight.parse().map_err(|e: dhm_core::Error| e.to_string())?;
    if a.window < 0 {
        return Err(Failure::Usage(format!("--window {} < 0", a.window)));
    }
    let w = Weight::from_family(family, -a.window, a.window).map_err(|e| e.to_string())?;
    let v = norms::ap_constant(&w, a.p, -a.window, a.window).map_err(|e| e.to_string())?;
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "value": v.value,
        "exactness": v.exactness,
        "witness": [v.witness.0, v.witness.1],
        "window": [-a.window, a.window],
    });
    emit(None, &json_text(&doc))?;
    Ok(())
}

fn embed(a: EmbedArgs) -> Result<(), Failure> {
    let b = a.seq.load()?;
    let family: WeightFamily = a.weight.parse().map_err(|e: dhm_core::Error| e.to_string())?;
    if a.samples < 2 {
        return Err(Failure::Usage("--samples must be at least 2".into()));
    }
    let from = a.from.unwrap_or(b.lo() as f64 - 2.0);
    let to = a.to.unwrap_or(b.hi() as f64 + 2.0);
    if !(from.is_finite() && to.is_finite()) || from >= to {
        return Err(Failure::Usage(format!("empty sample range [{from}, {to}]")));
    }
    let w = Weight::from_family(family, from.floor() as i64 - 1, to.ceil() as i64 + 1).map_err(|e| e.to_string())?;
    let style = match a.style {
        Style::Quarter => WeightStyle::QuarterLinear,
        Style::Half => WeightStyle::HalfStep,
    };
    let f = embedding::embed_sequence(&b);
    let wfn = embedding::embed_weight(&w, style);
    let mut out = Vec::new();
    {
        let mut csv = csv::Writer::from_writer(&mut out);
        let io = |e: csv::Error| e.to_string();
        csv.write_record(["x", "f", "w", "Sf", "Mf"]).map_err(io)?;
        for i in 0..a.samples {
            let x = from + (to - from) * i as f64 / (a.samples - 1) as f64;
            csv.write_record([
                x.to_string(),
                f.value_at(x).to_string(),
                wfn.value_at(x).to_string(),
                embedding::continuous_singular(&f, x).to_string(),
                embedding::continuous_maximal(&f, x).to_string(),
            ])
            .map_err(io)?;
        }
        csv.flush().map_err(|e| e.to_string())?;
    }
    let text = String::from_utf8(out).expect("csv is utf-8");
    emit(a.out.as_deref(), &format!("#schema_version={SCHEMA_VERSION}\n{text}"))?;
    Ok(())
}

fn run_verify(a: VerifyArgs, parallelism: usize) -> Result<(), Failure> {
    let mut cfg = match &a.config {
        Some(path) => RunConfig::from_toml(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))?,
        None => RunConfig::default(),
    };
    if a.print_config {
        emit(None, &cfg.to_toml())?;
        return Ok(());
    }
    if let Some(p) = a.json {
        cfg.output.json = Some(p);
    }
    if let Some(p) = a.csv {
        cfg.output.csv = Some(p);
    }
    for path in cfg.output.json.iter().chain(&cfg.output.csv) {
        ensure_writable(path)?;
    }

    let start = Instant::now();
    let report = verify::sweep(&cfg, parallelism).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();

    if let Some(path) = &cfg.output.json {
        fs::write(path, report.to_json()).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    if let Some(path) = &cfg.output.csv {
        fs::write(path, report.to_csv()).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    for row in report.failures() {
        eprintln!(
            "FAIL {} {}: lhs = {} rhs = {} ({})",
            row.check_id, row.descriptor, row.lhs, row.rhs, row.witness
        );
    }
    let s = report.summary;
    println!(
        "verify: {} rows, {} asserted, {} failed, {} rejected (seed {}, {:.2?}, parallelism {parallelism})",
        s.rows, s.asserted, s.failed, s.rejected, report.seed, elapsed
    );
    if report.all_pass() {
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}

fn bench(a: BenchArgs) -> Result<(), Failure> {
    use rand::{RngExt, SeedableRng};
    let support = a.support.unwrap_or(a.window.max(0) as usize);
    if a.window < 1 || support == 0 || support as i64 > a.window || a.repeats == 0 {
        return Err(Failure::Usage("need 0 < support <= window and repeats > 0".into()));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(a.seed);
    let values: Vec<f64> = (0..support).map(|_| 2.0 * rng.random::<f64>() - 1.0).collect();
    let b = Seq::new(values, 0).map_err(|e| e.to_string())?;
    let plan = EvalPlan::new(0, a.window - 1).map_err(|e| e.to_string())?;

    let time = |fast: bool| -> Result<(f64, transforms::TransformResult), String> {
        let mut best = f64::INFINITY;
        let mut last = None;
        for _ in 0..a.repeats {
            let t = Instant::now();
            let r = if fast {
                transforms::hilbert_fast(&b, &plan)
            } else {
                transforms::hilbert_naive(&b, &plan)
            }
            .map_err(|e| e.to_string())?;
            best = best.min(t.elapsed().as_secs_f64());
            last = Some(r);
        }
        Ok((best, last.expect("repeats > 0")))
    };
    let (naive_s, naive) = time(false)?;
    let (fast_s, fast) = time(true)?;
    let scale = naive.iter().fold(0.0f64, |m, (_, v)| m.max(v.abs()));
    let diff = naive.iter().fold(0.0f64, |m, (n, v)| m.max((v - fast.get(n)).abs()));
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "window": a.window,
        "support": support,
        "naive_seconds": naive_s,
        "fast_seconds": fast_s,
        "speedup": naive_s / fast_s,
        "max_relative_difference": diff / scale,
    });
    emit(None, &json_text(&doc))?;
    Ok(())
}
