//! `tailweight` — tail index estimation and simulation studies from the
//! command line.
//!
//! Subcommands: `sample` (draw from a benchmark model), `estimate` (tail
//! index estimates from a CSV of observations), `table` (mean/MSE
//! comparison study from a plan file), `zn-study` (distribution study of
//! the studentized statistic), `diagnose-b1` (bias diagnostic for the
//! slowly varying part of a Hall-type quantile).
//!
//! Every command is deterministic given its full flag set: simulation
//! replications are keyed by `(seed, replication_index)`, so `--threads`
//! changes wall-clock time but never a byte of output. Exit codes: 0
//! success, 2 validation/usage error, 3 I/O error, 4 numerical failure.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};

use tailweight::asymptotics::{self, AsymptoticContext};
use tailweight::error::Error as LibError;
use tailweight::estimators::{self, order_statistics, EstimatorSpec, Sample, SortedSample};
use tailweight::models::{b1_diagnostic, validate_kn, B1_DEFAULT_GRID};
use tailweight::montecarlo::{
    run_table, run_zn_study, ModelKind, ModelSpec, SimulationPlan, SummaryTable, ZnStudyPlan,
    ZnStudyReport,
};
use tailweight::rng::{sample_model, RngStream};
use tailweight::weights::WeightScheme;

#[derive(Parser)]
#[command(
    name = "tailweight",
    version,
    about = "Tail index estimation and simulation studies"
)]
struct Cli {
    /// Worker threads for simulation commands. Defaults to the
    /// TAILWEIGHT_THREADS environment variable, then to all cores.
    /// Output is identical for any value.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a sample from a benchmark model and write it one value per line.
    Sample(SampleArgs),
    /// Estimate the tail index from a CSV file of observations.
    Estimate(EstimateArgs),
    /// Run a table plan: estimator means and MSEs over a (rho, gamma, p) grid.
    Table(TableArgs),
    /// Run a Z_n distribution study plan.
    ZnStudy(ZnStudyArgs),
    /// Bias diagnostic for the slowly varying factor D1 (1 + D2 u^beta).
    DiagnoseB1(DiagnoseArgs),
}

#[derive(Args)]
struct ModelArgs {
    /// Benchmark model family.
    #[arg(long, value_enum)]
    model: ModelFlag,
    /// Tail index.
    #[arg(long)]
    gamma: f64,
    /// Hall scale parameter D1 (hall model only).
    #[arg(long)]
    d1: Option<f64>,
    /// Hall second-order coefficient D2 (hall model only).
    #[arg(long)]
    d2: Option<f64>,
    /// Hall second-order index beta (hall model only).
    #[arg(long)]
    beta: Option<f64>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum ModelFlag {
    Pareto,
    Hall,
    Frechet,
}

impl ModelArgs {
    fn spec(&self) -> ModelSpec {
        ModelSpec {
            model: match self.model {
                ModelFlag::Pareto => ModelKind::Pareto,
                ModelFlag::Hall => ModelKind::Hall,
                ModelFlag::Frechet => ModelKind::Frechet,
            },
            d1: self.d1,
            d2: self.d2,
            beta: self.beta,
        }
    }
}

#[derive(Args)]
struct SampleArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Sample size.
    #[arg(long)]
    n: usize,
    /// Master seed.
    #[arg(long)]
    seed: u64,
    /// Stream index within the seed (useful for drawing related samples).
    #[arg(long, default_value_t = 0)]
    stream: u64,
    /// Output CSV path; stdout when omitted (no provenance sidecar then).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodFlag {
    Wps,
    Hill,
    Pickands,
    Moment,
    All,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatFlag {
    Json,
    Csv,
}

#[derive(Args)]
struct EstimateArgs {
    /// Input CSV: one observation per line, optional `x` header row.
    #[arg(long)]
    input: PathBuf,
    /// Estimator to evaluate.
    #[arg(long, value_enum, default_value_t = MethodFlag::All)]
    method: MethodFlag,
    /// Number of upper order statistics.
    #[arg(long)]
    k: usize,
    /// Power p of the logarithms (wps only).
    #[arg(long, default_value_t = 1.0)]
    p: f64,
    /// Weight index rho (wps only).
    #[arg(long, default_value_t = 0.0)]
    rho: f64,
    /// Confidence level for the wps interval.
    #[arg(long, default_value_t = 0.95)]
    level: f64,
    /// Report format.
    #[arg(long, value_enum, default_value_t = FormatFlag::Json)]
    format: FormatFlag,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TableArgs {
    /// JSON plan file (model, gammas, rhos, ps, n, k, replications, seed).
    #[arg(long)]
    plan: PathBuf,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
    /// Override the plan's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the plan's replication count.
    #[arg(long)]
    replications: Option<u64>,
    /// Override the plan's sample size.
    #[arg(long)]
    n: Option<usize>,
    /// Override the plan's k.
    #[arg(long)]
    k: Option<usize>,
}

#[derive(Args)]
struct ZnStudyArgs {
    /// JSON plan file (model, gamma, rho, p, n, k, replications, seed).
    #[arg(long)]
    plan: PathBuf,
    /// Summary JSON output path.
    #[arg(long)]
    out_summary: PathBuf,
    /// Histogram CSV output path.
    #[arg(long)]
    out_histogram: PathBuf,
    /// Override the plan's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the plan's replication count.
    #[arg(long)]
    replications: Option<u64>,
}

#[derive(Args)]
struct DiagnoseArgs {
    /// Scale factor D1 of the slowly varying part.
    #[arg(long)]
    d1: f64,
    /// Second-order coefficient D2.
    #[arg(long)]
    d2: f64,
    /// Second-order index beta.
    #[arg(long)]
    beta: f64,
    /// Tail index.
    #[arg(long)]
    gamma: f64,
    /// Sample size.
    #[arg(long)]
    n: usize,
    /// Number of upper order statistics.
    #[arg(long)]
    k: usize,
    /// Grid size for the supremum evaluation.
    #[arg(long, default_value_t = B1_DEFAULT_GRID)]
    grid_points: usize,
}

/// CLI-level error carrying the process exit code.
struct CliError {
    message: String,
    code: u8,
}

impl CliError {
    fn io(context: &str, err: std::io::Error) -> Self {
        Self {
            message: format!("{context}: {err}"),
            code: 3,
        }
    }

    fn validation(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
            code: 2,
        }
    }

    fn tagged(self, estimator: &str) -> Self {
        Self {
            message: format!("{estimator}: {}", self.message),
            code: self.code,
        }
    }
}

impl From<LibError> for CliError {
    fn from(err: LibError) -> Self {
        let code = match err {
            LibError::Validation(_)
            | LibError::Domain(_)
            | LibError::Precondition(_)
            | LibError::InsufficientData(_) => 2,
            LibError::Numerical(_) | LibError::DegenerateSample(_) => 4,
        };
        Self {
            message: err.to_string(),
            code,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(err) = configure_threads(cli.threads) {
        eprintln!("error: {}", err.message);
        return ExitCode::from(err.code);
    }
    let result = match cli.command {
        Command::Sample(args) => cmd_sample(args),
        Command::Estimate(args) => cmd_estimate(args),
        Command::Table(args) => cmd_table(args),
        Command::ZnStudy(args) => cmd_zn_study(args),
        Command::DiagnoseB1(args) => cmd_diagnose_b1(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message);
            ExitCode::from(err.code)
        }
    }
}

fn configure_threads(flag: Option<usize>) -> CliResult<()> {
    let threads = match flag {
        Some(t) => Some(t),
        None => match std::env::var("TAILWEIGHT_THREADS") {
            Ok(v) => Some(v.parse::<usize>().map_err(|_| {
                CliError::validation(format!(
                    "TAILWEIGHT_THREADS must be a positive integer, got {v:?}"
                ))
            })?),
            Err(_) => None,
        },
    };
    if let Some(t) = threads {
        if t < 1 {
            return Err(CliError::validation("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::validation(format!("thread pool setup failed: {e}")))?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Output helpers
// ---------------------------------------------------------------------------

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    std::fs::write(path, contents)
        .map_err(|e| CliError::io(&format!("writing {}", path.display()), e))
}

fn read_file(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::io(&format!("reading {}", path.display()), e))
}

fn print_or_write(out: Option<&Path>, contents: &str) -> CliResult<()> {
    match out {
        Some(path) => write_file(path, contents),
        None => std::io::stdout()
            .write_all(contents.as_bytes())
            .map_err(|e| CliError::io("writing to stdout", e)),
    }
}

/// Provenance sidecar written next to every file artifact: the resolved
/// plan/arguments, their SHA-256, the seed, and the crate version. All
/// fields are deterministic, so re-runs produce identical sidecars.
fn write_sidecar<P: Serialize>(path: &Path, command: &str, seed: u64, plan: &P) -> CliResult<()> {
    let plan_json = serde_json::to_string(plan).expect("plan serializes");
    let digest = Sha256::digest(plan_json.as_bytes());
    let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
    #[derive(Serialize)]
    struct Sidecar<'a> {
        command: &'a str,
        version: &'a str,
        seed: u64,
        plan_sha256: String,
        plan: serde_json::Value,
    }
    let sidecar = Sidecar {
        command,
        version: env!("CARGO_PKG_VERSION"),
        seed,
        plan_sha256: hex,
        plan: serde_json::from_str(&plan_json).expect("round trip"),
    };
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".meta.json");
    let sidecar_path = path.with_file_name(name);
    write_file(
        &sidecar_path,
        &format!(
            "{}\n",
            serde_json::to_string_pretty(&sidecar).expect("serializes")
        ),
    )
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

// ---------------------------------------------------------------------------
// sample
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct SampleProvenance {
    #[serde(flatten)]
    model: ModelSpec,
    gamma: f64,
    n: usize,
    seed: u64,
    stream: u64,
}

fn cmd_sample(args: SampleArgs) -> CliResult<()> {
    let model = args.model.spec().instantiate(args.model.gamma)?;
    if args.n < 1 {
        return Err(CliError::validation("--n must be at least 1"));
    }
    let mut stream = RngStream::new(args.seed, args.stream);
    let sample = sample_model(&model, args.n, &mut stream);

    let mut csv = String::with_capacity(args.n * 20 + 2);
    csv.push_str("x\n");
    for v in sample.values() {
        csv.push_str(&v.to_string());
        csv.push('\n');
    }
    print_or_write(args.out.as_deref(), &csv)?;
    if let Some(out) = &args.out {
        let provenance = SampleProvenance {
            model: args.model.spec(),
            gamma: args.model.gamma,
            n: args.n,
            seed: args.seed,
            stream: args.stream,
        };
        write_sidecar(out, "sample", args.seed, &provenance)?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// estimate
// ---------------------------------------------------------------------------

fn parse_sample_file(path: &Path) -> CliResult<Sample> {
    let text = read_file(path)?;
    let mut values = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if idx == 0 && trimmed == "x" {
            continue; // optional header
        }
        match trimmed.parse::<f64>() {
            Ok(v) => values.push(v),
            Err(_) => {
                return Err(CliError::validation(format!(
                    "{}:{}: cannot parse {trimmed:?} as a number",
                    path.display(),
                    idx + 1
                )))
            }
        }
    }
    if values.is_empty() {
        return Err(CliError::validation(format!(
            "{}: no observations found",
            path.display()
        )));
    }
    Ok(Sample::new(values))
}

#[derive(Serialize)]
struct WpsDetail {
    gamma_hat: f64,
    p: f64,
    rho: f64,
    t_n: f64,
    ci_level: f64,
    ci_lower: f64,
    ci_upper: f64,
}

#[derive(Serialize)]
struct EstimateReport {
    n: usize,
    k: usize,
    warnings: Vec<String>,
    estimates: BTreeMap<&'static str, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    wps: Option<WpsDetail>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    errors: BTreeMap<&'static str, String>,
}

fn wps_estimate(sorted: &SortedSample, args: &EstimateArgs) -> CliResult<WpsDetail> {
    let scheme = WeightScheme::new(args.rho)?;
    let spec = EstimatorSpec::new(args.p, args.k, scheme)?;
    let gamma_hat = estimators::gamma_wps(sorted, &spec)?;
    let ctx = AsymptoticContext::new(sorted.len(), args.k, args.rho, args.p, gamma_hat)?;
    let ci = asymptotics::confidence_interval(gamma_hat, &ctx, args.level)?;
    Ok(WpsDetail {
        gamma_hat,
        p: args.p,
        rho: args.rho,
        t_n: asymptotics::t_n(&ctx),
        ci_level: args.level,
        ci_lower: ci.lower,
        ci_upper: ci.upper,
    })
}

fn cmd_estimate(args: EstimateArgs) -> CliResult<()> {
    let sample = parse_sample_file(&args.input)?;
    let sorted = order_statistics(&sample)?;
    let n = sorted.len();
    let warnings: Vec<String> = validate_kn(n, args.k)?
        .iter()
        .map(|w| w.to_string())
        .collect();

    let mut estimates: BTreeMap<&'static str, f64> = BTreeMap::new();
    let mut errors: BTreeMap<&'static str, String> = BTreeMap::new();
    let mut wps_detail = None;
    let all = args.method == MethodFlag::All;

    if all || args.method == MethodFlag::Wps {
        match wps_estimate(&sorted, &args) {
            Ok(detail) => {
                estimates.insert("wps", detail.gamma_hat);
                wps_detail = Some(detail);
            }
            Err(e) if all => {
                errors.insert("wps", e.message);
            }
            Err(e) => return Err(e.tagged("wps")),
        }
    }
    let comparators: [(&'static str, bool, Result<f64, LibError>); 3] = [
        (
            "hill",
            all || args.method == MethodFlag::Hill,
            estimators::hill(&sorted, args.k),
        ),
        (
            "pickands",
            all || args.method == MethodFlag::Pickands,
            estimators::pickands(&sorted, args.k),
        ),
        (
            "moment",
            all || args.method == MethodFlag::Moment,
            estimators::moment_estimator(&sorted, args.k),
        ),
    ];
    for (name, wanted, result) in comparators {
        if !wanted {
            continue;
        }
        match result {
            Ok(v) => {
                estimates.insert(name, v);
            }
            Err(e) if all => {
                errors.insert(name, e.to_string());
            }
            Err(e) => return Err(CliError::from(e).tagged(name)),
        }
    }

    if all && estimates.is_empty() {
        let detail = errors
            .iter()
            .map(|(k, v)| format!("{k}: {v}"))
            .collect::<Vec<_>>()
            .join("; ");
        return Err(CliError::validation(format!(
            "every estimator failed on this sample ({detail})"
        )));
    }

    let report = EstimateReport {
        n,
        k: args.k,
        warnings,
        estimates,
        wps: wps_detail,
        errors,
    };
    let rendered = match args.format {
        FormatFlag::Json => format!(
            "{}\n",
            serde_json::to_string_pretty(&report).expect("report serializes")
        ),
        FormatFlag::Csv => {
            let mut csv = String::from("method,estimate,t_n,ci_lower,ci_upper\n");
            for (name, value) in &report.estimates {
                if *name == "wps" {
                    let d = report.wps.as_ref().expect("wps detail present");
                    csv.push_str(&format!(
                        "wps,{},{},{},{}\n",
                        value, d.t_n, d.ci_lower, d.ci_upper
                    ));
                } else {
                    csv.push_str(&format!("{name},{value},,,\n"));
                }
            }
            csv
        }
    };
    print_or_write(args.out.as_deref(), &rendered)
}

// ---------------------------------------------------------------------------
// table
// ---------------------------------------------------------------------------

fn load_json<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = read_file(path)?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::validation(format!("{}: invalid plan file: {e}", path.display())))
}

fn table_csv(table: &SummaryTable) -> String {
    let mut csv = String::from("estimator,rho,gamma,p,mean,mse\n");
    for row in &table.rows {
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            row.estimator,
            fmt_opt(row.rho),
            row.gamma,
            fmt_opt(row.p),
            row.mean,
            row.mse
        ));
    }
    csv
}

fn cmd_table(args: TableArgs) -> CliResult<()> {
    let mut plan: SimulationPlan = load_json(&args.plan)?;
    if let Some(seed) = args.seed {
        plan.master_seed = seed;
    }
    if let Some(r) = args.replications {
        plan.replications = r;
    }
    if let Some(n) = args.n {
        plan.n = n;
    }
    if let Some(k) = args.k {
        plan.k_n = k;
    }
    let table = run_table(&plan)?;
    write_file(&args.out, &table_csv(&table))?;
    write_sidecar(&args.out, "table", plan.master_seed, &plan)?;
    println!(
        "wrote {} ({} rows, R = {}, excluded replication-cells = {})",
        args.out.display(),
        table.rows.len(),
        table.replications,
        table.excluded
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// zn-study
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct ZnSummary {
    gamma: f64,
    rho: f64,
    p: f64,
    n: usize,
    k: usize,
    replications: u64,
    excluded: u64,
    zn_mean: f64,
    zn_sd: f64,
    gamma_hat_mean: f64,
    chi2_pvalue: f64,
}

fn histogram_csv(report: &ZnStudyReport) -> String {
    let mut csv = String::from("bin_left,bin_right,count,fitted_density_at_midpoint\n");
    let h = &report.histogram;
    for i in 0..h.counts.len() {
        csv.push_str(&format!(
            "{},{},{},{}\n",
            h.edges[i],
            h.edges[i + 1],
            h.counts[i],
            h.fitted_density[i]
        ));
    }
    csv
}

fn cmd_zn_study(args: ZnStudyArgs) -> CliResult<()> {
    let mut plan: ZnStudyPlan = load_json(&args.plan)?;
    if let Some(seed) = args.seed {
        plan.master_seed = seed;
    }
    if let Some(r) = args.replications {
        plan.replications = r;
    }
    let report = run_zn_study(&plan)?;
    let summary = ZnSummary {
        gamma: plan.gamma,
        rho: plan.rho,
        p: plan.p,
        n: plan.n,
        k: plan.k_n,
        replications: plan.replications,
        excluded: report.excluded,
        zn_mean: report.zn_mean,
        zn_sd: report.zn_sd,
        gamma_hat_mean: report.gamma_hat_mean,
        chi2_pvalue: report.chi2_pvalue,
    };
    write_file(
        &args.out_summary,
        &format!(
            "{}\n",
            serde_json::to_string_pretty(&summary).expect("summary serializes")
        ),
    )?;
    write_sidecar(&args.out_summary, "zn-study", plan.master_seed, &plan)?;
    write_file(&args.out_histogram, &histogram_csv(&report))?;
    write_sidecar(&args.out_histogram, "zn-study", plan.master_seed, &plan)?;
    println!(
        "wrote {} and {} (R = {}, zn_mean = {:.4}, zn_sd = {:.4}, chi2 p = {:.4})",
        args.out_summary.display(),
        args.out_histogram.display(),
        plan.replications,
        report.zn_mean,
        report.zn_sd,
        report.chi2_pvalue
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// diagnose-b1
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct B1Report {
    b1_diagnostic: f64,
    n: usize,
    k: usize,
    grid_points: usize,
    kn_warnings: Vec<String>,
}

fn cmd_diagnose_b1(args: DiagnoseArgs) -> CliResult<()> {
    let warnings: Vec<String> = validate_kn(args.n, args.k)?
        .iter()
        .map(|w| w.to_string())
        .collect();
    let value = b1_diagnostic(
        args.d1,
        args.d2,
        args.beta,
        args.gamma,
        args.n,
        args.k,
        args.grid_points,
    )?;
    let report = B1Report {
        b1_diagnostic: value,
        n: args.n,
        k: args.k,
        grid_points: args.grid_points,
        kn_warnings: warnings,
    };
    println!(
        "{}",
        serde_json::to_string_pretty(&report).expect("report serializes")
    );
    Ok(())
}
