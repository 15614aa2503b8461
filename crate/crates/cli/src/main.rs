use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use elliptic_cfrac::derivation::{h_series, ramanujan_series, true_inverse_series};
use elliptic_cfrac::goldens::{check_cfrac, GoldenTable};
use elliptic_cfrac::numeric::{
    asymptotic_law_violations, error_sweep, fmt_f64, invert_from_measurements, sweep_tsv,
    uniform_grid, NumericError, PrecisionConfig,
};
use elliptic_cfrac::{
    cfrac_expand, collapse_to_closed_form, convergent_agreement_order, freeze_tail, PowerSeries,
    Rational,
};

/// Exact derivation of a closed-form approximation to the ellipse shape
/// parameter from its perimeter, and numeric checks of its accuracy.
#[derive(Debug, Parser)]
#[command(name = "elliptic-cfrac", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the h, reverted, closed-form and difference series and check them
    /// against the published coefficients.
    VerifySeries {
        /// Truncation order (at least 8).
        #[arg(long, default_value_t = 12)]
        order: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[command(flatten)]
        out: OutArg,
    },
    /// Expand the reverted series as a C-fraction, optionally freezing its tail.
    Cfrac {
        /// Number of partial numerators (at least 1).
        #[arg(long, default_value_t = 4)]
        depth: usize,
        /// Replace the tail by this constant, written p/q.
        #[arg(long)]
        freeze: Option<Rational>,
        /// 1-based index where the frozen tail starts. Defaults to the first
        /// partial numerator equal to the frozen value.
        #[arg(long, requires = "freeze")]
        freeze_from: Option<usize>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Tabulate the approximation error over a uniform lambda grid.
    #[command(allow_negative_numbers = true)]
    ErrorTable {
        #[arg(long)]
        lambda_min: f64,
        #[arg(long)]
        lambda_max: f64,
        /// Number of intervals; the grid has steps + 1 points.
        #[arg(long)]
        steps: usize,
        #[arg(long, default_value_t = 1e-14)]
        abs_tol: f64,
        #[arg(long, default_value_t = 64)]
        max_iter: usize,
        #[command(flatten)]
        out: OutArg,
    },
    /// Recover semiaxes from a perimeter and a + b.
    #[command(allow_negative_numbers = true)]
    Invert {
        #[arg(long)]
        perimeter: f64,
        #[arg(long)]
        sum: f64,
        #[command(flatten)]
        out: OutArg,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Tsv,
}

#[derive(Debug, Args)]
struct OutArg {
    /// Write output to this file (atomically) instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    /// Verification or domain failure. Output, if any, is still emitted.
    Check(String),
}

struct Outcome {
    text: String,
    failure: Option<String>,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome {
            text,
            failure: None,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Check(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    let (outcome, out) = match command {
        Command::VerifySeries { order, format, out } => (verify_series(order, format)?, out),
        Command::Cfrac {
            depth,
            freeze,
            freeze_from,
            out,
        } => (cfrac(depth, freeze, freeze_from)?, out),
        Command::ErrorTable {
            lambda_min,
            lambda_max,
            steps,
            abs_tol,
            max_iter,
            out,
        } => (
            error_table(lambda_min, lambda_max, steps, abs_tol, max_iter)?,
            out,
        ),
        Command::Invert {
            perimeter,
            sum,
            out,
        } => (invert(perimeter, sum)?, out),
    };
    emit(&outcome.text, out.out.as_deref())?;
    match outcome.failure {
        Some(msg) => Err(Failure::Check(msg)),
        None => Ok(()),
    }
}

fn emit(text: &str, path: Option<&Path>) -> Result<(), Failure> {
    let io_err = |e: std::io::Error| Failure::Check(format!("writing output: {e}"));
    match path {
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|()| stdout.flush())
                .map_err(io_err)
        }
        Some(path) => {
            let dir = match path.parent() {
                Some(p) if !p.as_os_str().is_empty() => p,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
            tmp.write_all(text.as_bytes()).map_err(io_err)?;
            tmp.as_file().sync_all().map_err(io_err)?;
            tmp.persist(path).map_err(|e| io_err(e.error))?;
            Ok(())
        }
    }
}

fn verify_series(order: usize, format: Format) -> Result<Outcome, Failure> {
    if order < 8 {
        return Err(Failure::Usage(format!(
            "--order must be at least 8, got {order}"
        )));
    }
    let internal = |e: &dyn std::fmt::Display| Failure::Check(e.to_string());
    let h = h_series(order).map_err(|e| internal(&e))?;
    let t = true_inverse_series(order).map_err(|e| internal(&e))?;
    let a = ramanujan_series(order).map_err(|e| internal(&e))?;
    let d = &t - &a;
    let columns: [(GoldenTable, &PowerSeries); 4] = [
        (GoldenTable::HSeries, &h),
        (GoldenTable::TrueInverse, &t),
        (GoldenTable::Approx, &a),
        (GoldenTable::Difference, &d),
    ];

    let mut mismatches = Vec::new();
    let mut markers = Vec::with_capacity(order + 1);
    for k in 0..=order {
        let mut published = 0;
        let mut bad = false;
        for (table, s) in &columns {
            if let Some(expected) = table.value(k) {
                published += 1;
                let computed = s.coeff(k).expect("within order");
                if *computed != expected {
                    bad = true;
                    mismatches.push(format!(
                        "{}[{k}]: published {expected}, computed {computed}",
                        table.name()
                    ));
                }
            }
        }
        markers.push(if bad {
            "MISMATCH"
        } else if published == columns.len() {
            "published"
        } else {
            "derived"
        });
    }

    let mut text = String::new();
    match format {
        Format::Tsv => {
            text.push_str("power\th_series\ttrue_series\tapprox_series\tdifference\tsource\n");
            for (k, marker) in markers.iter().enumerate() {
                write!(text, "{k}").unwrap();
                for (_, s) in &columns {
                    write!(text, "\t{}", s.coeff(k).unwrap()).unwrap();
                }
                writeln!(text, "\t{marker}").unwrap();
            }
        }
        Format::Text => {
            writeln!(text, "order: {order}").unwrap();
            for (table, s) in &columns {
                let list: Vec<String> = s.coeffs().iter().map(ToString::to_string).collect();
                writeln!(text, "{}: {}", table.name(), list.join(", ")).unwrap();
            }
            let published_rows = markers.iter().filter(|m| **m == "published").count();
            writeln!(text, "published rows: {published_rows}").unwrap();
            writeln!(
                text,
                "derived rows: {}",
                markers.iter().filter(|m| **m == "derived").count()
            )
            .unwrap();
            for m in &mismatches {
                writeln!(text, "mismatch: {m}").unwrap();
            }
        }
    }
    let failure = (!mismatches.is_empty())
        .then(|| format!("{} published coefficient(s) mismatch", mismatches.len()));
    Ok(Outcome { text, failure })
}

fn join(v: &[Rational]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(", ")
}

fn cfrac(
    depth: usize,
    freeze: Option<Rational>,
    freeze_from: Option<usize>,
) -> Result<Outcome, Failure> {
    if depth < 1 {
        return Err(Failure::Usage("--depth must be at least 1".into()));
    }
    let series = true_inverse_series(depth + 2).map_err(|e| Failure::Check(e.to_string()))?;
    let cf = cfrac_expand(&series, depth).map_err(|e| Failure::Check(e.to_string()))?;
    for m in check_cfrac(&cf) {
        eprintln!("note: {m}");
    }

    let mut text = format!("{}\n", join(cf.partial_coeffs()));
    let Some(value) = freeze else {
        return Ok(Outcome::ok(text));
    };
    let from = match freeze_from {
        Some(i) => i,
        None => cf
            .partial_coeffs()
            .iter()
            .position(|c| *c == value)
            .map(|i| i + 1)
            .ok_or_else(|| {
                Failure::Usage(format!(
                    "{value} is not among the partial numerators; pass --freeze-from"
                ))
            })?,
    };
    let frozen =
        freeze_tail(&cf, from, value.clone()).map_err(|e| Failure::Usage(e.to_string()))?;
    writeln!(text, "freeze: {value} from a{from}").unwrap();
    writeln!(text, "frozen: {frozen}").unwrap();
    writeln!(
        text,
        "agreement: {}",
        convergent_agreement_order(&cf, &frozen)
    )
    .unwrap();
    match collapse_to_closed_form(&frozen) {
        Ok(expr) => {
            writeln!(text, "closed form: {expr}").unwrap();
            Ok(Outcome::ok(text))
        }
        Err(e) => Ok(Outcome {
            text,
            failure: Some(format!("collapse failed: {e}")),
        }),
    }
}

fn error_table(
    min: f64,
    max: f64,
    steps: usize,
    abs_tol: f64,
    max_iter: usize,
) -> Result<Outcome, Failure> {
    if !(0.0 <= min && min < max && max < 1.0) {
        return Err(Failure::Usage(format!(
            "need 0 <= lambda-min < lambda-max < 1, got {min}, {max}"
        )));
    }
    if steps < 1 {
        return Err(Failure::Usage("--steps must be at least 1".into()));
    }
    let cfg = PrecisionConfig::new(abs_tol, max_iter).map_err(|e| Failure::Usage(e.to_string()))?;
    let rows = error_sweep(&uniform_grid(min, max, steps), &cfg)
        .map_err(|e| Failure::Check(e.to_string()))?;
    let unresolved = rows.iter().filter(|r| !r.is_resolved()).count();
    if unresolved > 0 {
        eprintln!(
            "note: {unresolved} row(s) below the precision floor are excluded from the law check"
        );
    }
    let violations = asymptotic_law_violations(&rows);
    let failure = (!violations.is_empty()).then(|| {
        let lambdas: Vec<String> = violations.iter().map(|r| r.lambda.to_string()).collect();
        format!("asymptotic law fails at lambda = {}", lambdas.join(", "))
    });
    Ok(Outcome {
        text: sweep_tsv(&rows),
        failure,
    })
}

fn invert(perimeter: f64, sum: f64) -> Result<Outcome, Failure> {
    let inv = invert_from_measurements(perimeter, sum).map_err(|e| match e {
        NumericError::OutOfRange { side, min, max, .. } => Failure::Check(format!(
            "perimeter {perimeter} is {side} the bracket [pi s, 4 s] = [{min}, {max}]"
        )),
        other => Failure::Check(other.to_string()),
    })?;
    if inv.clamped {
        eprintln!("note: closed form gives lambda > 1; clamped to 1");
    }
    let mut text = String::new();
    writeln!(text, "a\t{}", fmt_f64(inv.ellipse.a())).unwrap();
    writeln!(text, "b\t{}", fmt_f64(inv.ellipse.b())).unwrap();
    writeln!(text, "lambda\t{}", fmt_f64(inv.lambda)).unwrap();
    writeln!(text, "h\t{}", fmt_f64(inv.h)).unwrap();
    Ok(Outcome::ok(text))
}
