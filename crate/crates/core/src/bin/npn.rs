//! `npn`: generate graph precisions, transform them through an odd map, and
//! check the predicted structure.
//!
//! Exit codes: 0 success, 2 usage or configuration, 3 engine failure
//! (including non-positive-definite input), 4 input outside the near-identity
//! or odd-function regime, 5 Monte Carlo verification failure.

use std::fs;
use std::io::IsTerminal;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use nonparanormal::covariance::{convergence_check, transform_covariance, TransformRequest};
use nonparanormal::graph::{
    build_precision, grid_covariance_closed_form, star_inverse_closed_form, GraphKind, GraphSpec,
};
use nonparanormal::mc::{
    compare, sample_transformed_covariance, SampleConfig, DEFAULT_SE_MULTIPLIER,
};
use nonparanormal::moments::{isserlis_bivariate, BivariateMomentQuery};
use nonparanormal::precision::{
    analyze_near_identity, constants_for, error_scaling_probe, predict_and_compare,
    DEFAULT_SPARSITY_THRESHOLD,
};
use nonparanormal::render::render_pgm;
use nonparanormal::series::{Builtin, ScalarMap, DEFAULT_MAX_ORDER};
use nonparanormal::{make_builtin, DerivativeSeries, Error, SymMatrix};

const GRID_SPARSITY_THRESHOLD: f64 = 0.02;

#[derive(Parser)]
#[command(
    name = "npn",
    version,
    about = "Nonparanormal covariance and precision toolkit"
)]
struct Cli {
    /// Output directory for written files.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,

    /// Comma-separated output formats (csv, json, pgm). A single csv or json
    /// value also selects the input format for files without a known extension.
    #[arg(long, global = true, value_delimiter = ',')]
    format: Option<Vec<Format>>,

    /// Magnitude below which a transformed precision entry counts as zero.
    /// Defaults to 0.02 for grids and 0.01 otherwise.
    #[arg(long, global = true)]
    threshold: Option<f64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a chain, star or grid precision (and its closed-form inverse when one exists).
    Generate(GraphArgs),
    /// Transform a covariance through f and compare against the predicted structure.
    Transform(TransformArgs),
    /// Check the exact transformed covariance against Monte Carlo samples.
    Verify(VerifyArgs),
    /// Export a matrix as a grayscale PGM (dark = large magnitude).
    Render(RenderArgs),
    /// Evaluate E[X_i^p X_j^q] for a centred bivariate normal.
    Moment(MomentArgs),
    /// Tabulate |E'| against eps^2 over a sweep of edge weights.
    Probe(ProbeArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Pgm,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum InputKind {
    Precision,
    Covariance,
}

#[derive(Args, Clone)]
struct GraphArgs {
    #[arg(long, value_parser = parse_graph)]
    graph: GraphKind,
    /// Number of nodes (chain, star) or side length (grid).
    #[arg(long, visible_alias = "side")]
    dim: usize,
    /// Edge weight, as a decimal or a `p/q` rational.
    #[arg(long, value_parser = parse_weight, allow_hyphen_values = true)]
    weight: f64,
}

#[derive(Args, Clone)]
#[group(skip)]
struct SourceArgs {
    #[arg(
        long,
        value_parser = parse_graph,
        requires_all = ["dim", "weight"],
        conflicts_with = "input",
        required_unless_present = "input"
    )]
    graph: Option<GraphKind>,
    /// Number of nodes (chain, star) or side length (grid).
    #[arg(long, visible_alias = "side")]
    dim: Option<usize>,
    /// Edge weight, as a decimal or a `p/q` rational.
    #[arg(long, value_parser = parse_weight, allow_hyphen_values = true)]
    weight: Option<f64>,
    /// Matrix file (.csv or .json).
    #[arg(long)]
    input: Option<PathBuf>,
    /// Whether `--input` holds a precision or a covariance matrix.
    #[arg(long, value_enum, default_value = "precision")]
    input_kind: InputKind,
}

#[derive(Args, Clone)]
struct FunctionArgs {
    /// Built-in name (sin, sinh, cube, identity, odd-monomial:L) or a JSON derivative file.
    #[arg(long, default_value = "sin")]
    function: String,
    /// Truncation order for built-in functions.
    #[arg(long, default_value_t = DEFAULT_MAX_ORDER)]
    max_order: usize,
}

#[derive(Args)]
struct TransformArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[command(flatten)]
    function: FunctionArgs,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[command(flatten)]
    function: FunctionArgs,
    #[arg(long, default_value_t = nonparanormal::mc::DEFAULT_SAMPLES)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of standard errors an entry may deviate before failing.
    #[arg(long, default_value_t = DEFAULT_SE_MULTIPLIER)]
    tolerance_se: f64,
    /// Add this offset to every analytic entry before comparing (fault injection).
    #[arg(long, allow_hyphen_values = true)]
    perturb: Option<f64>,
}

#[derive(Args)]
struct RenderArgs {
    #[arg(long)]
    input: PathBuf,
    /// Pixels per matrix entry along each axis.
    #[arg(long, default_value_t = 1)]
    cell_size: usize,
    /// Output path; defaults to `<out>/<input stem>.pgm`.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct MomentArgs {
    #[arg(long)]
    p: u32,
    #[arg(long)]
    q: u32,
    #[arg(long)]
    var_i: f64,
    #[arg(long)]
    var_j: f64,
    #[arg(long, allow_hyphen_values = true)]
    cov: f64,
}

#[derive(Args)]
struct ProbeArgs {
    #[arg(long, value_parser = parse_graph)]
    graph: GraphKind,
    #[arg(long, visible_alias = "side")]
    dim: usize,
    /// Comma-separated edge weights (decimals or `p/q` rationals).
    #[arg(long, value_delimiter = ',', value_parser = parse_weight, allow_hyphen_values = true)]
    weights: Vec<f64>,
    #[command(flatten)]
    function: FunctionArgs,
}

enum Failure {
    Config(String),
    Engine(Error),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Engine(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Verification(_) => 5,
            Failure::Engine(e) => match e {
                Error::NotNearIdentity(_) | Error::NotOdd(_) => 4,
                Error::InvalidArgument(_)
                | Error::InvalidSeries(_)
                | Error::Parse(_)
                | Error::Io(_)
                | Error::Json(_) => 2,
                _ => 3,
            },
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Config(m) | Failure::Verification(m) => m.clone(),
            Failure::Engine(e) => e.to_string(),
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn parse_graph(s: &str) -> std::result::Result<GraphKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_weight(s: &str) -> std::result::Result<f64, String> {
    let value = match s.split_once('/') {
        Some((p, q)) => {
            let p: f64 = p
                .trim()
                .parse()
                .map_err(|_| format!("bad numerator in '{s}'"))?;
            let q: f64 = q
                .trim()
                .parse()
                .map_err(|_| format!("bad denominator in '{s}'"))?;
            if q == 0.0 {
                return Err(format!("zero denominator in '{s}'"));
            }
            p / q
        }
        None => s
            .trim()
            .parse()
            .map_err(|_| format!("'{s}' is not a number"))?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(format!("'{s}' is not finite"))
    }
}

fn graph_spec(kind: GraphKind, dim: usize, weight: f64) -> GraphSpec {
    match kind {
        GraphKind::Chain => GraphSpec::chain(dim, weight),
        GraphKind::Star => GraphSpec::star(dim, weight),
        GraphKind::Grid => GraphSpec::grid(dim, weight),
    }
}

struct Output {
    dir: PathBuf,
    formats: Vec<Format>,
}

impl Output {
    fn new(dir: &Path, formats: Option<&[Format]>) -> CliResult<Self> {
        fs::create_dir_all(dir)
            .map_err(|e| Failure::Config(format!("cannot create {}: {e}", dir.display())))?;
        let formats = formats.map_or_else(|| vec![Format::Csv], <[_]>::to_vec);
        Ok(Self {
            dir: dir.to_path_buf(),
            formats,
        })
    }

    fn matrix(&self, name: &str, m: &SymMatrix) -> CliResult<()> {
        for fmt in &self.formats {
            match fmt {
                Format::Csv => self.write(&format!("{name}.csv"), m.to_csv().as_bytes())?,
                Format::Json => self.write(&format!("{name}.json"), m.to_json().as_bytes())?,
                Format::Pgm => self.write(&format!("{name}.pgm"), &render_pgm(m, 1)?)?,
            }
        }
        Ok(())
    }

    fn json<T: Serialize>(&self, name: &str, value: &T) -> CliResult<()> {
        let mut text = serde_json::to_string_pretty(value).map_err(Error::from)?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    fn write(&self, name: &str, bytes: &[u8]) -> CliResult<()> {
        let path = self.dir.join(name);
        fs::write(&path, bytes)
            .map_err(|e| Failure::Config(format!("cannot write {}: {e}", path.display())))
    }

    /// Run metadata lives beside the data so the data files stay reproducible.
    fn meta(&self, command: &str) -> CliResult<()> {
        #[derive(Serialize)]
        struct Meta<'a> {
            tool: &'a str,
            version: &'a str,
            command: &'a str,
            args: Vec<String>,
            created_unix: u64,
        }
        let created_unix = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs());
        self.json(
            &format!("{command}.meta.json"),
            &Meta {
                tool: "npn",
                version: env!("CARGO_PKG_VERSION"),
                command,
                args: std::env::args().skip(1).collect(),
                created_unix,
            },
        )
    }
}

fn read_matrix(path: &Path, formats: Option<&[Format]>) -> CliResult<SymMatrix> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase);
    let format = match (ext.as_deref(), formats) {
        (Some("csv"), _) => Format::Csv,
        (Some("json"), _) => Format::Json,
        (_, Some([f @ (Format::Csv | Format::Json)])) => *f,
        _ => {
            return Err(Failure::Config(format!(
                "cannot tell the format of {}; pass --format csv or --format json",
                path.display()
            )))
        }
    };
    Ok(match format {
        Format::Json => SymMatrix::from_json(&text)?,
        _ => SymMatrix::from_csv(&text)?,
    })
}

/// Analytic series plus the map used for sampling, which is the exact
/// function for built-ins.
struct Function {
    series: DerivativeSeries,
    builtin: Option<Builtin>,
}

impl Function {
    fn load(args: &FunctionArgs) -> CliResult<Self> {
        let path = Path::new(&args.function);
        if path.extension().is_some_and(|e| e == "json") || path.is_file() {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
            let series: DerivativeSeries = serde_json::from_str(&text).map_err(Error::from)?;
            return Ok(Self {
                series,
                builtin: None,
            });
        }
        let builtin = Builtin::parse(&args.function)?;
        Ok(Self {
            series: make_builtin(builtin, args.max_order)?,
            builtin: Some(builtin),
        })
    }

    fn label(&self) -> String {
        self.builtin
            .map(Builtin::name)
            .or_else(|| self.series.name().map(str::to_owned))
            .unwrap_or_else(|| "custom".into())
    }

    fn sampler(&self) -> &dyn ScalarMap {
        match &self.builtin {
            Some(b) => b,
            None => &self.series,
        }
    }
}

/// The matrix a command starts from.
enum Source {
    Precision {
        gamma: SymMatrix,
        graph: Option<GraphSpec>,
    },
    Covariance(SymMatrix),
}

impl Source {
    fn load(args: &SourceArgs, formats: Option<&[Format]>) -> CliResult<Self> {
        if let Some(kind) = args.graph {
            let (Some(dim), Some(weight)) = (args.dim, args.weight) else {
                return Err(Failure::Config("--graph needs --dim and --weight".into()));
            };
            let spec = graph_spec(kind, dim, weight);
            return Ok(Source::Precision {
                gamma: build_precision(&spec)?,
                graph: Some(spec),
            });
        }
        let path = args
            .input
            .as_ref()
            .ok_or_else(|| Failure::Config("need --graph or --input".into()))?;
        let m = read_matrix(path, formats)?;
        Ok(match args.input_kind {
            InputKind::Precision => Source::Precision {
                gamma: m,
                graph: None,
            },
            InputKind::Covariance => Source::Covariance(m),
        })
    }

    fn covariance(&self) -> CliResult<SymMatrix> {
        match self {
            Source::Precision { gamma, .. } => Ok(gamma.inverse_spd()?),
            Source::Covariance(sigma) => Ok(sigma.clone()),
        }
    }
}

fn default_threshold(explicit: Option<f64>, graph: Option<&GraphSpec>) -> f64 {
    explicit.unwrap_or(match graph.map(|g| g.kind) {
        Some(GraphKind::Grid) => GRID_SPARSITY_THRESHOLD,
        _ => DEFAULT_SPARSITY_THRESHOLD,
    })
}

fn warn_convergence(f: &DerivativeSeries, sigma: &SymMatrix) {
    let report = convergence_check(f, sigma);
    if !report.ok {
        eprintln!(
            "warning: f carries no derivative growth bound; series convergence at marginal sd {:.4} is unchecked",
            report.bound_m
        );
    }
}

struct Style {
    color: bool,
}

impl Style {
    fn detect() -> Self {
        Self {
            color: std::env::var_os("NO_COLOR").is_none() && std::io::stdout().is_terminal(),
        }
    }

    fn verdict(&self, ok: bool, text: &str) -> String {
        match (self.color, ok) {
            (false, _) => text.to_owned(),
            (true, true) => format!("\x1b[32m{text}\x1b[0m"),
            (true, false) => format!("\x1b[31m{text}\x1b[0m"),
        }
    }
}

fn row(label: &str, value: impl std::fmt::Display) {
    println!("  {label:<24} {value}");
}

fn cmd_generate(cli: &Cli, args: &GraphArgs) -> CliResult<()> {
    let spec = graph_spec(args.graph, args.dim, args.weight);
    let gamma = build_precision(&spec)?;
    let out = Output::new(&cli.out, cli.format.as_deref())?;
    out.matrix("gamma_rho", &gamma)?;
    let closed = match spec.kind {
        GraphKind::Star => Some(star_inverse_closed_form(&spec)?),
        GraphKind::Grid if spec.dim_param == 3 => Some(grid_covariance_closed_form(&spec)?),
        _ => None,
    };
    if let Some(sigma) = &closed {
        out.matrix("sigma_rho", sigma)?;
    }
    out.meta("generate")?;
    println!(
        "{} graph, d = {}, weight = {}: wrote gamma_rho{}",
        spec.kind,
        spec.dim(),
        spec.weight,
        if closed.is_some() {
            " and sigma_rho"
        } else {
            ""
        }
    );
    Ok(())
}

fn cmd_transform(cli: &Cli, args: &TransformArgs) -> CliResult<()> {
    let source = Source::load(&args.source, cli.format.as_deref())?;
    let f = Function::load(&args.function)?;
    let out = Output::new(&cli.out, cli.format.as_deref())?;
    let style = Style::detect();

    match &source {
        Source::Covariance(sigma) => {
            warn_convergence(&f.series, sigma);
            let request = TransformRequest::new(sigma.clone(), f.series.clone())?;
            let sigma_pi = transform_covariance(&request)?;
            out.matrix("sigma_pi", &sigma_pi)?;
            out.matrix("gamma_pi", &sigma_pi.inverse_spd()?)?;
            out.json("constants.json", &constants_for(&f.series)?)?;
            out.meta("transform")?;
            println!("transform of a covariance input through {}", f.label());
            println!("  near-identity analysis skipped for covariance input");
        }
        Source::Precision { gamma, graph } => {
            let prec = analyze_near_identity(gamma)?;
            let threshold = default_threshold(cli.threshold, graph.as_ref());
            let report = predict_and_compare(&prec, &f.series, threshold)?;
            warn_convergence(&f.series, &report.sigma_rho);

            out.matrix("sigma_rho", &report.sigma_rho)?;
            out.matrix("sigma_pi", &report.sigma_pi)?;
            out.matrix("gamma_pi", &report.gamma_pi)?;
            out.matrix("predicted_sigma", &report.predicted_sigma)?;
            out.matrix("predicted_gamma", &report.predicted_gamma)?;
            out.json("constants.json", &report.constants)?;
            out.json("report.json", &report)?;
            out.meta("transform")?;

            let c = &report.constants;
            let s = &report.sparsity;
            println!("transform through {} (d = {})", f.label(), gamma.dim());
            row("kappa", format!("{:.6}", c.kappa));
            row("lambda", format!("{:.6}", c.lambda));
            row("1/kappa", format!("{:.6}", c.inv_kappa));
            row("lambda/kappa^2", format!("{:.6}", c.lambda_over_kappa_sq));
            row(
                "predicted edge scale",
                format!("{:.6}", c.lambda_over_kappa_sq * prec.b_matrix.max_abs()),
            );
            row("delta", format!("{:.6}", report.delta));
            row("epsilon", format!("{:.6}", report.epsilon));
            row("|E'|_op", format!("{:.3e}", report.e_prime_opnorm));
            row("|E1|_op (diagonal)", format!("{:.3e}", report.e1_opnorm));
            row(
                "|E2|_op (off-diagonal)",
                format!("{:.3e}", report.e2_opnorm),
            );
            row("max |non-edge|", format!("{:.3e}", s.max_non_edge));
            let verdict = if s.recovers_graph() {
                format!("graph recovered at threshold {threshold}")
            } else {
                format!(
                    "graph not recovered at threshold {threshold} ({} false positives, {} false negatives)",
                    s.false_positives.len(),
                    s.false_negatives.len()
                )
            };
            row("sparsity", style.verdict(s.recovers_graph(), &verdict));
        }
    }
    Ok(())
}

fn cmd_verify(cli: &Cli, args: &VerifyArgs) -> CliResult<()> {
    let cfg =
        SampleConfig::new(args.samples, args.seed).map_err(|e| Failure::Config(e.to_string()))?;
    if !(args.tolerance_se.is_finite() && args.tolerance_se > 0.0) {
        return Err(Failure::Config("--tolerance-se must be positive".into()));
    }
    let source = Source::load(&args.source, cli.format.as_deref())?;
    let f = Function::load(&args.function)?;
    let sigma = source.covariance()?;
    warn_convergence(&f.series, &sigma);
    if f.builtin.is_none() {
        eprintln!(
            "warning: sampling a derivative-only function through its Taylor series; tail mass beyond the series radius is unvalidated"
        );
    }

    let mut analytic =
        transform_covariance(&TransformRequest::new(sigma.clone(), f.series.clone())?)?;
    if let Some(offset) = args.perturb {
        analytic = analytic.map(|x| x + offset);
    }
    let empirical = sample_transformed_covariance(&sigma, f.sampler(), &cfg)?;
    let cmp = compare(&empirical, &analytic, cfg.n_samples, args.tolerance_se)?;

    #[derive(Serialize)]
    struct VerifyReport<'a> {
        function: String,
        config: SampleConfig,
        passed: bool,
        comparison: &'a nonparanormal::mc::EmpiricalComparison,
    }
    let out = Output::new(&cli.out, cli.format.as_deref())?;
    out.json(
        "verify.json",
        &VerifyReport {
            function: f.label(),
            config: cfg,
            passed: cmp.passed(),
            comparison: &cmp,
        },
    )?;
    out.meta("verify")?;

    let style = Style::detect();
    println!(
        "verify {} with {} samples (seed {})",
        f.label(),
        cfg.n_samples,
        cfg.seed
    );
    row(
        "max |empirical - exact|",
        format!("{:.3e}", cmp.max_abs_dev),
    );
    row("entries beyond SE bound", cmp.flagged.len());
    if cmp.passed() {
        row("result", style.verdict(true, "pass"));
        Ok(())
    } else {
        row("result", style.verdict(false, "FAIL"));
        Err(Failure::Verification(format!(
            "{} entries deviate by more than {} standard errors",
            cmp.flagged.len(),
            args.tolerance_se
        )))
    }
}

fn cmd_render(cli: &Cli, args: &RenderArgs) -> CliResult<()> {
    let m = read_matrix(&args.input, cli.format.as_deref())?;
    let bytes = render_pgm(&m, args.cell_size)?;
    let path = match &args.output {
        Some(p) => p.clone(),
        None => {
            let stem = args
                .input
                .file_stem()
                .map_or_else(|| "matrix".into(), |s| s.to_string_lossy().into_owned());
            fs::create_dir_all(&cli.out).map_err(|e| {
                Failure::Config(format!("cannot create {}: {e}", cli.out.display()))
            })?;
            cli.out.join(format!("{stem}.pgm"))
        }
    };
    fs::write(&path, bytes)
        .map_err(|e| Failure::Config(format!("cannot write {}: {e}", path.display())))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_moment(args: &MomentArgs) -> CliResult<()> {
    let q = BivariateMomentQuery::new(args.p, args.q, args.var_i, args.var_j, args.cov)?;
    println!("{}", isserlis_bivariate(&q));
    Ok(())
}

fn cmd_probe(cli: &Cli, args: &ProbeArgs) -> CliResult<()> {
    if args.weights.is_empty() {
        return Err(Failure::Config("--weights needs at least one value".into()));
    }
    let f = Function::load(&args.function)?;
    let spec = graph_spec(args.graph, args.dim, args.weights[0]);
    let rows = error_scaling_probe(&f.series, &spec, &args.weights)?;
    let out = Output::new(&cli.out, cli.format.as_deref())?;
    out.json("probe.json", &rows)?;
    out.meta("probe")?;

    println!(
        "{:>12} {:>12} {:>12} {:>12}",
        "weight", "epsilon", "|E'|", "|E'|/eps^2"
    );
    for r in &rows {
        let ratio = r.ratio.map_or_else(|| "-".into(), |x| format!("{x:.4}"));
        println!(
            "{:>12.6} {:>12.6} {:>12.4e} {:>12}",
            r.weight, r.epsilon, r.e_prime_norm, ratio
        );
    }
    Ok(())
}

fn run(cli: &Cli) -> CliResult<()> {
    if let Some(t) = cli.threshold {
        if !(t.is_finite() && t >= 0.0) {
            return Err(Failure::Config(
                "--threshold must be a non-negative number".into(),
            ));
        }
    }
    match &cli.command {
        Command::Generate(a) => cmd_generate(cli, a),
        Command::Transform(a) => cmd_transform(cli, a),
        Command::Verify(a) => cmd_verify(cli, a),
        Command::Render(a) => cmd_render(cli, a),
        Command::Moment(a) => cmd_moment(a),
        Command::Probe(a) => cmd_probe(cli, a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.code())
        }
    }
}
