use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use toeplitz_core::criteria::{analyze, attach_oracle, spectrum_probe, Verdict};
use toeplitz_core::oracle::{truncate, Thresholds};
use toeplitz_core::scalarpoly::{Field, GaussRat};
use toeplitz_core::selftest::{run_all, SelftestConfig};
use toeplitz_core::symbol::Backend;
use toeplitz_core::{Error, PolyanalyticSymbol};

mod grid;

use grid::GridSpec;

#[derive(Parser)]
#[command(
    name = "toeplitz",
    version,
    about = "Kernel, cokernel and invertibility of Bergman-space Toeplitz operators with polyanalytic polynomial symbols"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze T_φ for a symbol and print a report.
    Analyze(AnalyzeArgs),
    /// Verdicts for T_{φ-μ} over a polar grid of μ, as CSV.
    Spectrum(SpectrumArgs),
    /// Dump N×N finite sections and their singular values.
    Truncate(TruncateArgs),
    /// Run the exact identity suites.
    Selftest(SelftestArgs),
}

#[derive(Args)]
struct Input {
    /// Symbol JSON: {"n": <int>, "coeffs": [[[re, im], ...], ...]}.
    #[arg(long)]
    symbol: PathBuf,
    #[arg(long, value_enum, default_value_t = BackendArg::Exact)]
    backend: BackendArg,
}

#[derive(Args)]
struct Output {
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct ThresholdArgs {
    /// Minimal decay factor per size step for a vanishing singular value.
    #[arg(long, default_value_t = Thresholds::default().decay_factor)]
    decay_factor: f64,
    /// A vanishing singular value must end below this.
    #[arg(long, default_value_t = Thresholds::default().final_max)]
    final_max: f64,
    /// The first non-vanishing singular value must stay above this.
    #[arg(long, default_value_t = Thresholds::default().gap_min)]
    gap_min: f64,
    /// Values below this fraction of the largest singular value count as zero.
    #[arg(long, default_value_t = Thresholds::default().noise_floor)]
    noise_floor: f64,
}

impl ThresholdArgs {
    fn thresholds(&self) -> Thresholds {
        Thresholds {
            decay_factor: self.decay_factor,
            final_max: self.final_max,
            gap_min: self.gap_min,
            noise_floor: self.noise_floor,
        }
    }
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    input: Input,
    /// Strictly increasing section sizes for the finite-section oracle.
    #[arg(long, value_delimiter = ',')]
    truncate: Vec<usize>,
    #[command(flatten)]
    thresholds: ThresholdArgs,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct SpectrumArgs {
    #[command(flatten)]
    input: Input,
    /// `cx,cy,r,nr,ntheta`: radii r·j/nr (j = 1..nr) around (cx, cy), ntheta angles each.
    #[arg(long)]
    grid: GridSpec,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct TruncateArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long, value_delimiter = ',', required = true)]
    truncate: Vec<usize>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct SelftestArgs {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 50)]
    cases: usize,
    #[command(flatten)]
    output: Output,
    /// Perturb D_φ in the identity suite (falsifiability check).
    #[arg(long, hide = true)]
    inject_fault: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Exact,
    Float,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

/// Exit codes: 0 completed, 1 selftest failure, 2 input or analysis error.
enum Failure {
    Selftest,
    Input(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_)
            | Error::Validation(_)
            | Error::InvalidArgument(_)
            | Error::OrderTooSmall { .. } => Failure::Input(e.to_string()),
            other => Failure::Input(format!("analysis failed: {other}")),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analyze(a) => cmd_analyze(a),
        Command::Spectrum(a) => cmd_spectrum(a),
        Command::Truncate(a) => cmd_truncate(a),
        Command::Selftest(a) => cmd_selftest(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Selftest) => ExitCode::from(1),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn load(input: &Input) -> Result<(PolyanalyticSymbol, Backend), Failure> {
    let text = fs::read_to_string(&input.symbol)
        .map_err(|e| Failure::Input(format!("cannot read {}: {e}", input.symbol.display())))?;
    let backend = match input.backend {
        BackendArg::Exact => Backend::Exact,
        BackendArg::Float => Backend::Float,
    };
    let sym = PolyanalyticSymbol::from_json(&text, backend)?;
    sym.validate_canonical()?;
    Ok((sym, backend))
}

fn check_sizes(sizes: &[usize]) -> Result<(), Failure> {
    if sizes.contains(&0) || sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Failure::Input(format!(
            "--truncate sizes must be positive and strictly increasing: {sizes:?}"
        )));
    }
    Ok(())
}

fn emit(output: &Output, text: String) -> Result<(), Failure> {
    match &output.out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn cmd_analyze(args: AnalyzeArgs) -> Result<(), Failure> {
    let (sym, backend) = load(&args.input)?;
    check_sizes(&args.truncate)?;
    let mut report = analyze(&sym)?;
    if backend == Backend::Float {
        // Float input is taken at its binary value, so integrality is only as good as the input.
        report.confidence = "numeric-confidence";
    }
    if !args.truncate.is_empty() {
        attach_oracle(
            &mut report,
            &sym,
            &args.truncate,
            &args.thresholds.thresholds(),
        );
    }
    let text = match args.output.format {
        Format::Json => {
            let mut v = report.to_json();
            v["input"] = json!({ "symbol": sym.to_json_value(), "backend": backend });
            pretty(&v)
        }
        Format::Text => {
            let mut t = report.to_text();
            if let Some(o) = &report.oracle {
                t.push_str("kernel trace:\n");
                t.push_str(&o.kernel.to_csv());
                t.push_str("cokernel trace:\n");
                t.push_str(&o.cokernel.to_csv());
            }
            t
        }
    };
    emit(&args.output, text)
}

fn cmd_spectrum(args: SpectrumArgs) -> Result<(), Failure> {
    let (sym, _) = load(&args.input)?;
    let points: Vec<GaussRat> = args.grid.points().map_err(Failure::Input)?;
    let results = spectrum_probe(&sym, &points);
    let verdicts = [
        Verdict::Invertible,
        Verdict::NotInvertible,
        Verdict::NotFredholm,
        Verdict::Inconclusive,
    ];
    let counts: Vec<(Verdict, usize)> = verdicts
        .iter()
        .map(|v| (*v, results.iter().filter(|p| p.verdict == *v).count()))
        .collect();
    let text = match args.output.format {
        Format::Text => {
            let mut t = String::from("re,im,verdict\n");
            for p in &results {
                let z = p.mu.to_c64();
                t.push_str(&format!("{:.9},{:.9},{:?}\n", z.re, z.im, p.verdict));
            }
            let summary: Vec<String> = counts.iter().map(|(v, c)| format!("{v:?}={c}")).collect();
            t.push_str(&format!("# {}\n", summary.join(" ")));
            t
        }
        Format::Json => {
            let rows: Vec<Value> = results
                .iter()
                .map(|p| {
                    let z = p.mu.to_c64();
                    json!({ "re": z.re, "im": z.im, "verdict": p.verdict, "warnings": p.warnings })
                })
                .collect();
            let summary: serde_json::Map<String, Value> = counts
                .iter()
                .map(|(v, c)| (format!("{v:?}"), json!(c)))
                .collect();
            pretty(&json!({ "points": rows, "summary": summary }))
        }
    };
    emit(&args.output, text)
}

fn cmd_truncate(args: TruncateArgs) -> Result<(), Failure> {
    let (sym, _) = load(&args.input)?;
    check_sizes(&args.truncate)?;
    let mut sections = Vec::new();
    for &n in &args.truncate {
        sections.push(truncate(&sym, n)?);
    }
    let text = match args.output.format {
        Format::Json => {
            let rows: Vec<Value> = sections
                .iter()
                .map(|t| {
                    let matrix: Vec<Vec<[f64; 2]>> = (0..t.size)
                        .map(|q| {
                            (0..t.size)
                                .map(|p| [t.entries[(q, p)].re, t.entries[(q, p)].im])
                                .collect()
                        })
                        .collect();
                    json!({
                        "n": t.size,
                        "bandWidth": t.band_width(),
                        "matrix": matrix,
                        "singularValues": t.singular_values(),
                    })
                })
                .collect();
            pretty(&json!({ "sections": rows }))
        }
        Format::Text => {
            let mut out = String::new();
            for t in &sections {
                out.push_str(&format!(
                    "# N = {}, band width {}\n",
                    t.size,
                    t.band_width()
                ));
                for q in 0..t.size {
                    let row: Vec<String> = (0..t.size)
                        .map(|p| {
                            let z = t.entries[(q, p)];
                            format!("{:.6e}{:+.6e}i", z.re, z.im)
                        })
                        .collect();
                    out.push_str(&row.join(","));
                    out.push('\n');
                }
                let sv: Vec<String> = t
                    .singular_values()
                    .iter()
                    .map(|s| format!("{s:.6e}"))
                    .collect();
                out.push_str(&format!("singular values: {}\n", sv.join(",")));
            }
            out
        }
    };
    emit(&args.output, text)
}

fn cmd_selftest(args: SelftestArgs) -> Result<(), Failure> {
    if args.cases == 0 {
        return Err(Failure::Input("--cases must be at least 1".into()));
    }
    let cfg = SelftestConfig {
        seed: args.seed,
        cases: args.cases,
        inject_fault: args.inject_fault,
    };
    let suites = run_all(&cfg);
    let text = match args.output.format {
        Format::Json => {
            pretty(&json!({ "seed": args.seed, "cases": args.cases, "suites": suites }))
        }
        Format::Text => {
            let mut t = format!("{:<16} {:>6}  result\n", "suite", "cases");
            for s in &suites {
                let result = if s.passed() {
                    "pass".to_string()
                } else {
                    format!("FAIL ({})", s.failures.len())
                };
                t.push_str(&format!("{:<16} {:>6}  {result}\n", s.name, s.cases));
                for f in s.failures.iter().take(5) {
                    t.push_str(&format!("    {f}\n"));
                }
            }
            t
        }
    };
    emit(&args.output, text)?;
    if suites.iter().all(|s| s.passed()) {
        Ok(())
    } else {
        Err(Failure::Selftest)
    }
}
