use std::fmt::Write as _;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use lieclass::classifier::{classify, ClassifyOptions, Verdict};
use lieclass::detsys::{GridSpec, VectorField};
use lieclass::input::{ParamDecl, Problem};
use lieclass::report;
use lieclass::table::{row_keys, run_table, skipped_rows};
use lieclass::verifier::verify_field;

const EXIT_OK: u8 = 0;
const EXIT_INPUT: u8 = 1;
const EXIT_UNDECIDED: u8 = 2;
const EXIT_FAILED: u8 = 3;

/// Lie point-symmetry classification of y'' = A(x) y' + F(y).
#[derive(Parser)]
#[command(name = "lieclass", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify one equation and print its symmetry algebra.
    Classify {
        #[command(flatten)]
        eq: Equation,
        /// Skip the numerical check of the generators.
        #[arg(long)]
        no_verify: bool,
    },
    /// Reproduce the classification table on concrete instances.
    Table {
        /// Only rows with this key, e.g. "y^-1".
        #[arg(long)]
        row: Option<String>,
    },
    /// Check whether a given field is a symmetry.
    Verify {
        #[command(flatten)]
        eq: Equation,
        /// x-component of the field.
        #[arg(long)]
        xi: String,
        /// y-component of the field.
        #[arg(long)]
        phi: String,
        /// Also transport numerical solutions along the flow of the field.
        #[arg(long)]
        flow: bool,
    },
}

#[derive(Args)]
struct Equation {
    /// Coefficient A(x).
    #[arg(long = "A", value_name = "EXPR", allow_hyphen_values = true)]
    a: String,
    /// Right-hand side F(y).
    #[arg(long = "F", value_name = "EXPR", allow_hyphen_values = true)]
    f: String,
    /// Parameter declaration: name=value, name=nonzero or name=zero.
    #[arg(long = "param", value_name = "DECL")]
    params: Vec<ParamDecl>,
    /// Print the report as JSON on stdout.
    #[arg(long)]
    json: bool,
}

fn seed() -> Result<u64, String> {
    match std::env::var("LIECLASS_SEED") {
        Ok(s) => s.trim().parse().map_err(|_| format!("LIECLASS_SEED must be a decimal integer, got `{s}`")),
        Err(_) => Ok(GridSpec::DEFAULT_SEED),
    }
}

fn print_json(v: &serde_json::Value) {
    print_out(&format!("{}\n", serde_json::to_string_pretty(v).expect("JSON values always serialize")));
}

/// Writes to stdout, ignoring a closed pipe.
fn print_out(s: &str) {
    use std::io::Write;
    let _ = std::io::stdout().lock().write_all(s.as_bytes());
}

fn cmd_classify(eq: &Equation, verify: bool, grid: GridSpec) -> u8 {
    let problem = match Problem::new(&eq.a, &eq.f, &eq.params) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT;
        }
    };
    let seed = grid.seed;
    let opts = ClassifyOptions { verify, grid };
    let started = Instant::now();
    let result = match classify(&problem.a, &problem.f, &problem.assumptions, &opts) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT;
        }
    };
    if eq.json {
        print_json(&report::classification_json(&problem, &result, seed));
    } else {
        print_out(&report::classification_text(&problem, &result));
        print_out(&format!("time:       {:.3} s\n", started.elapsed().as_secs_f64()));
    }
    if !result.generators_verified() {
        EXIT_FAILED
    } else if result.verdict == Verdict::Definite {
        EXIT_OK
    } else {
        EXIT_UNDECIDED
    }
}

fn cmd_verify(eq: &Equation, xi: &str, phi: &str, flow: bool, grid: GridSpec) -> u8 {
    let problem = match Problem::new(&eq.a, &eq.f, &eq.params) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT;
        }
    };
    let field = match VectorField::parse(xi, phi) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: in the field: {e}");
            return EXIT_INPUT;
        }
    };
    let free: Vec<String> = problem
        .a
        .free_symbols()
        .iter()
        .chain(problem.f.free_symbols().iter())
        .chain(field.xi.free_symbols().iter())
        .chain(field.phi.free_symbols().iter())
        .map(|s| s.to_string())
        .filter(|s| s != "x" && s != "y")
        .collect();
    if !free.is_empty() {
        eprintln!("error: verification needs numeric values for: {}", free.join(", "));
        return EXIT_INPUT;
    }
    let seed = grid.seed;
    let check = verify_field(&problem.a, &problem.f, &field, &grid, flow);
    if eq.json {
        print_json(&report::verification_json(&problem, &field, &check, seed));
    } else {
        print_out(&report::verification_text(&problem, &field, &check));
    }
    if check.passed() {
        EXIT_OK
    } else {
        EXIT_FAILED
    }
}

fn cmd_table(row: Option<&str>, grid: GridSpec) -> u8 {
    if let Some(r) = row {
        if !row_keys().contains(&r) {
            eprintln!("error: unknown row `{r}`; rows are: {}", row_keys().join(", "));
            return EXIT_INPUT;
        }
    }
    let mut out = String::new();
    let started = Instant::now();
    let results = run_table(row, &grid);
    let _ = writeln!(out, "{:<16} {:<34} {:<22} {:>4} {:>4}  result", "F row", "A", "F", "want", "got");
    for r in &results {
        let got = r.outcome.as_ref().map(|o| o.dimension.to_string()).unwrap_or_else(|_| "err".into());
        let status = if r.passed() { "PASS".to_string() } else { format!("FAIL: {}", r.failures.join("; ")) };
        let _ = writeln!(out, "{:<16} {:<34} {:<22} {:>4} {:>4}  {status}", r.case.row, r.case.a, r.case.f, r.case.expected, got);
        if let Ok(o) = &r.outcome {
            for g in &o.generators {
                let _ = writeln!(out, "{:<16}   generator {}", "", g.field);
            }
        }
    }
    for s in skipped_rows().iter().filter(|s| row.is_none_or(|r| r == s.row)) {
        let _ = writeln!(out, "{:<16} {:<34} SKIP: {}", s.row, s.a, s.reason);
    }
    let failed = results.iter().filter(|r| !r.passed()).count();
    let _ = writeln!(
        out,
        "{} cases, {} passed, {} failed in {:.2} s",
        results.len(),
        results.len() - failed,
        failed,
        started.elapsed().as_secs_f64()
    );
    print_out(&out);
    if failed == 0 {
        EXIT_OK
    } else {
        EXIT_FAILED
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT } else { EXIT_OK });
        }
    };
    let grid = match seed() {
        Ok(s) => GridSpec::with_seed(s),
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INPUT);
        }
    };
    let code = match &cli.command {
        Command::Classify { eq, no_verify } => cmd_classify(eq, !no_verify, grid),
        Command::Table { row } => cmd_table(row.as_deref(), grid),
        Command::Verify { eq, xi, phi, flow } => cmd_verify(eq, xi, phi, *flow, grid),
    };
    ExitCode::from(code)
}
