//! `jensen3`: check scenario files, analyze functions, generate scenarios and
//! search for counterexamples.
//!
//! Exit codes: 0 holds (or nothing found), 1 input error, 2 fails (or a
//! counterexample found), 3 hypotheses unmet.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use jensen3::scenario::{run_scenario, AnalysisReport, Provenance, ReportFile, ScenarioFile, SearchReport, SCHEMA_VERSION};
use jensen3::scengen::{gen_for_function, search_counterexamples, GenSpec, SearchOptions};
use jensen3::{catalog, Interval, Mode, TheoremId, Verdict, DEFAULT_GRID};

#[derive(Parser)]
#[command(name = "jensen3", version, about = "Numerical verification of refined Jensen-type inequalities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Verify a scenario file and print its report.
    Check {
        file: PathBuf,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the file's equality tolerance.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Feasible constant interval and class of a function at a point.
    Analyze {
        #[arg(long = "fn")]
        function: String,
        #[arg(long, allow_hyphen_values = true)]
        point: f64,
        #[arg(long, value_parser = parse_interval, default_value = "-1,1", allow_hyphen_values = true)]
        interval: Interval,
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: usize,
    },
    /// Emit a seeded scenario file whose hypotheses hold.
    Gen {
        #[arg(long)]
        theorem: TheoremId,
        #[command(flatten)]
        shape: Shape,
        /// Function written into the file; generation retries until its
        /// hypotheses hold for it.
        #[arg(long = "fn", default_value = "signed_square")]
        function: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Seeded random probing for scenarios that violate a result.
    Search {
        #[arg(long)]
        theorem: TheoremId,
        #[arg(long = "fn")]
        function: String,
        #[command(flatten)]
        shape: Shape,
        #[arg(long, default_value_t = 1000)]
        budget: u64,
        /// For literal two-pair searches: include the documented straddling
        /// instance and draw straddling scenarios.
        #[arg(long)]
        straddle: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Shape {
    #[arg(long)]
    mode: Option<Mode>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_parser = parse_interval, allow_hyphen_values = true)]
    interval: Option<Interval>,
    /// The split point `c`.
    #[arg(long, allow_hyphen_values = true)]
    point: Option<f64>,
    /// Group sizes `n,m,l`.
    #[arg(long, value_parser = parse_sizes)]
    sizes: Option<(usize, usize, usize)>,
}

impl Shape {
    fn spec(&self) -> Result<GenSpec> {
        let base = GenSpec::standard(self.seed);
        let interval = self.interval.unwrap_or(base.interval);
        let c = self.point.unwrap_or_else(|| if interval.contains_interior(base.c) { base.c } else { 0.5 * (interval.lo() + interval.hi()) });
        Ok(GenSpec::new(self.seed, interval, c, self.sizes.unwrap_or(base.sizes))?)
    }

    fn mode(&self, theorem: TheoremId) -> Mode {
        self.mode.unwrap_or(if theorem.is_affine() || !two_sided(theorem) { Mode::Proper } else { Mode::RegionRestricted })
    }
}

fn two_sided(t: TheoremId) -> bool {
    matches!(t, TheoremId::Mt4 | TheoremId::Mt5 | TheoremId::Mc1 | TheoremId::Mc2 | TheoremId::Mc3)
}

fn parse_interval(s: &str) -> Result<Interval, String> {
    let (lo, hi) = s.split_once(',').ok_or("expected `lo,hi`")?;
    let num = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("`{v}`: {e}"));
    Interval::new(num(lo)?, num(hi)?).map_err(|e| e.to_string())
}

fn parse_sizes(s: &str) -> Result<(usize, usize, usize), String> {
    let parts: Vec<usize> = s.split(',').map(|p| p.trim().parse::<usize>().map_err(|e| format!("`{p}`: {e}"))).collect::<Result<_, _>>()?;
    match parts[..] {
        [n, m, l] => Ok((n, m, l)),
        [n, m] => Ok((n, m, 0)),
        _ => Err("expected `n,m,l`".into()),
    }
}

/// Rewrite a relative table path inside a function spec against `base`.
fn resolve_tables(spec: &str, base: &Path) -> String {
    for key in ["tabulated-spline:", "tabulated:"] {
        if let Some(i) = spec.find(key) {
            let start = i + key.len();
            let path = Path::new(spec[start..].trim());
            if path.is_relative() {
                return format!("{}{}", &spec[..start], base.join(path).display());
            }
            return spec.to_string();
        }
    }
    spec.to_string()
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn check(file: &Path, out: Option<&Path>, tol: Option<f64>) -> Result<u8> {
    let text = std::fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    let (header, payload) = ScenarioFile::parse(&text).with_context(|| format!("{}", file.display()))?;
    let base = file.parent().unwrap_or(Path::new("."));
    let f = catalog(&resolve_tables(&header.function, base))?;
    let report = run_scenario(&f, &header, &payload, tol)?;
    let seed = header.provenance.as_ref().and_then(|p| p.seed);
    let report = ReportFile::new(&header.function, report, Provenance::new(seed, Some(file.display().to_string())));
    emit(&report.to_json(), out)?;
    let margin = report.report.margin.map_or("n/a".to_string(), |m| format!("{m:.6e}"));
    eprintln!("{}: {} (margin {margin})", report.report.theorem, report.verdict());
    Ok(report.verdict().exit_code() as u8)
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Check { file, out, tol } => check(&file, out.as_deref(), tol),
        Command::Analyze { function, point, interval, grid } => {
            if !interval.contains_interior(point) {
                bail!("point {point} is not interior to [{}, {}]", interval.lo(), interval.hi());
            }
            let f = catalog(&function)?;
            print!("{}", AnalysisReport::run(&f, &function, point, interval, grid)?.to_json());
            Ok(0)
        }
        Command::Gen { theorem, shape, function, out } => {
            let spec = shape.spec()?;
            let mode = shape.mode(theorem);
            let f = catalog(&function)?;
            let payload = gen_for_function(&f, &spec, theorem, mode)?;
            let mut file = ScenarioFile::new(&payload, mode, &function);
            file.provenance = Some(Provenance::new(Some(spec.seed), Some("gen".into())));
            emit(&file.to_json(), out.as_deref())?;
            Ok(0)
        }
        Command::Search { theorem, function, shape, budget, straddle, out } => {
            let spec = shape.spec()?;
            let mode = shape.mode(theorem);
            let f = catalog(&function)?;
            let opts = SearchOptions { interval: spec.interval, c: spec.c, sizes: spec.sizes, straddle };
            let (results, skipped) = search_counterexamples(&f, theorem, mode, budget, spec.seed, &opts)?;
            let found = !results.is_empty();
            let report = SearchReport {
                schema_version: SCHEMA_VERSION,
                theorem,
                mode,
                function,
                budget,
                seed: spec.seed,
                skipped,
                results,
                provenance: Provenance::new(Some(spec.seed), Some("search".into())),
            };
            emit(&report.to_json(), out.as_deref())?;
            eprintln!("{theorem} ({mode}): {} failing of {budget}, {skipped} skipped", report.results.len());
            Ok(if found { Verdict::Fails.exit_code() as u8 } else { 0 })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
