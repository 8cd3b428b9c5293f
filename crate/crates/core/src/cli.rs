//! Command-line front end. Data goes to stdout or `--output`, diagnostics to
//! stderr.
//!
//! Exit codes: 0 success, 1 error, 2 success with a quality warning.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::analysis::{convergence_study, error_report, ode_residual, Sample};
use crate::assembly::{assemble, Scheme};
use crate::basis::{
    check_printed_row, knot_stencil, DiscrepancyKind, KnotGrid, KnotLimit, MIN_INTERVALS,
};
use crate::problem::{builtin, load_problem, LinearBvp7};
use crate::selftest;
use crate::solver::{eval_solution, solve, SolverChoice};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_WARNING: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "septic-bvp",
    version,
    about = "Septic B-spline collocation for seventh-order BVPs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve one problem and write the solution at the sample points.
    Solve(SolveArgs),
    /// Solve on several meshes and estimate the convergence order.
    Converge(ConvergeArgs),
    /// Print the knot stencils of the septic B-spline (h = 1).
    BasisTable(OutputArgs),
    /// Run the built-in oracle suite.
    Selftest(SelftestArgs),
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Built-in problem: example1 or poly0 .. poly7.
    #[arg(long)]
    builtin: Option<String>,
    /// JSON problem file.
    #[arg(long)]
    problem: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct Method {
    #[arg(long, default_value = "least_squares", value_parser = parse_scheme)]
    scheme: Scheme,
    #[arg(long, default_value = "band-lu", value_parser = parse_solver)]
    solver: SolverChoice,
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Write CSV here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long)]
    n: usize,
    #[command(flatten)]
    method: Method,
    #[arg(long, default_value = "knots", value_parser = parse_sample)]
    sample: Sample,
    #[command(flatten)]
    output: OutputArgs,
    /// Write the equilibrated system as CSV.
    #[arg(long)]
    dump_system: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ConvergeArgs {
    #[command(flatten)]
    source: Source,
    /// Comma-separated mesh sizes.
    #[arg(long, value_delimiter = ',', required = true)]
    ns: Vec<usize>,
    #[command(flatten)]
    method: Method,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct SelftestArgs {
    #[arg(long, hide = true)]
    corrupt_stencil: bool,
}

fn parse_scheme(s: &str) -> Result<Scheme, String> {
    Scheme::from_name(s).ok_or_else(|| {
        "expected one of least_squares, square_drop_first, square_drop_last".to_string()
    })
}

fn parse_solver(s: &str) -> Result<SolverChoice, String> {
    SolverChoice::from_name(s).ok_or_else(|| "expected one of band-lu, normal, dense".to_string())
}

fn parse_sample(s: &str) -> Result<Sample, String> {
    Sample::from_name(s).ok_or_else(|| "expected knots or knots_and_midpoints".to_string())
}

/// Command failure with a one-line message.
struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

type Outcome = Result<i32, Failure>;

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn load(source: &Source) -> Result<LinearBvp7, Failure> {
    match (&source.builtin, &source.problem) {
        (Some(name), _) => Ok(builtin(name)?),
        (None, Some(path)) => {
            let bytes = std::fs::read(path)
                .map_err(|e| Failure(format!("cannot read {}: {e}", path.display())))?;
            load_problem(&bytes).map_err(|e| Failure(format!("{}: {e}", path.display())))
        }
        (None, None) => Err(Failure("a problem source is required".into())),
    }
}

fn check_mesh(n: usize) -> Result<(), Failure> {
    if n < MIN_INTERVALS {
        return Err(Failure(format!("n must be >= {MIN_INTERVALS} (got {n})")));
    }
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Failure(format!("cannot write {}: {e}", path.display())))
}

/// Sends `body` to the output file or to `stdout`.
fn emit(output: &OutputArgs, stdout: &mut dyn Write, body: &str) -> Result<(), Failure> {
    match &output.output {
        Some(path) => {
            let mut f = create(path)?;
            f.write_all(body.as_bytes())?;
            f.flush()?;
        }
        None => stdout.write_all(body.as_bytes())?,
    }
    Ok(())
}

fn run_solve(args: &SolveArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Outcome {
    check_mesh(args.n)?;
    let p = load(&args.source)?;
    let Method { scheme, solver } = args.method;
    if let Some(path) = &args.dump_system {
        let grid = KnotGrid::uniform(p.a(), p.b(), args.n)?;
        let sys = assemble(&p, &grid, scheme)?;
        let mut f = create(path)?;
        sys.write_csv(&mut f)?;
        f.flush()?;
    }
    let s = solve(&p, args.n, scheme, solver)?;

    let mut body = String::from("x,y_spline,y_exact,abs_error\n");
    let max_abs_error = if p.exact().is_some() {
        let r = error_report(&s, &p, args.sample)?;
        for k in 0..r.points.len() {
            body += &format!(
                "{},{},{},{}\n",
                num(r.points[k]),
                num(r.spline_values[k]),
                num(r.exact_values[k]),
                num(r.abs_errors[k])
            );
        }
        Some(r.max_abs_error)
    } else {
        for x in crate::analysis::sample_points(&s, args.sample) {
            body += &format!("{},{},,\n", num(x), num(eval_solution(&s, x, 0)?));
        }
        None
    };
    emit(&args.output, stdout, &body)?;

    match max_abs_error {
        Some(e) => writeln!(stderr, "max_abs_error={}", num(e))?,
        None => writeln!(
            stderr,
            "max_abs_error=\node_residual={}",
            num(ode_residual(&s, &p, args.n)?)
        )?,
    }
    writeln!(stderr, "solve_residual={}", num(s.solve_residual))?;
    writeln!(stderr, "scheme={scheme}")?;
    writeln!(stderr, "n={}", args.n)?;
    Ok(match &s.warning {
        Some(w) => {
            writeln!(stderr, "warning: {w}")?;
            EXIT_WARNING
        }
        None => EXIT_OK,
    })
}

fn run_converge(args: &ConvergeArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Outcome {
    let mut ns = args.ns.clone();
    ns.sort_unstable();
    ns.dedup();
    if ns.len() < 2 {
        return Err(Failure("converge needs at least 2 distinct meshes".into()));
    }
    for &n in &ns {
        check_mesh(n)?;
    }
    let p = load(&args.source)?;
    if p.exact().is_none() {
        return Err(Failure("exact solution required".into()));
    }
    let report = convergence_study(&p, &ns, args.method.scheme, args.method.solver)?;
    let mut body = String::from("n,h,max_abs_error,solve_residual,pairwise_order,wall_time_ms\n");
    for (r, order) in report.records.iter().zip(&report.pairwise_orders) {
        body += &format!(
            "{},{},{},{},{},{:.3}\n",
            r.n,
            num(r.h),
            num(r.max_abs_error),
            num(r.solve_residual),
            order.map(num).unwrap_or_default(),
            r.wall_time.as_secs_f64() * 1e3
        );
    }
    body += &format!(
        "# fitted_order={}\n",
        report.fitted_order.map(num).unwrap_or_else(|| "NA".into())
    );
    emit(&args.output, stdout, &body)?;
    let mut code = EXIT_OK;
    for r in &report.records {
        if let Some(w) = &r.warning {
            writeln!(stderr, "warning: n={}: {w}", r.n)?;
            code = EXIT_WARNING;
        }
    }
    Ok(code)
}

/// Basis-table CSV: one row per derivative order, then a comment for every
/// cell where the printed tables disagree with the computed stencil.
pub fn basis_table() -> String {
    let mut body = String::from("d");
    for k in -4..=4 {
        body += &format!(",v_{k}");
    }
    body.push('\n');
    for d in 0..=7 {
        let ints = knot_stencil(d)
            .as_integers()
            .expect("unit stencils are integral");
        body += &d.to_string();
        for v in ints {
            body += &format!(",{v}");
        }
        body.push('\n');
    }
    for d in 3..=7 {
        let Some(check) = check_printed_row(d) else {
            continue;
        };
        let limit = match check.limit {
            Some(KnotLimit::Left) => " (left limit)",
            Some(KnotLimit::Right) => " (right limit)",
            None => "",
        };
        for c in &check.discrepancies {
            let kind = match c.kind {
                DiscrepancyKind::Sign => "sign",
                DiscrepancyKind::Value => "value",
            };
            body += &format!(
                "# d={d}{limit} offset {:+}: printed {} computed {} {kind}\n",
                c.offset(),
                c.printed,
                c.computed
            );
        }
    }
    body
}

fn run_selftest(args: &SelftestArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Outcome {
    let report = selftest::run(selftest::Options {
        corrupt_stencil: args.corrupt_stencil,
    });
    for g in &report.groups {
        match &g.outcome {
            Ok(()) => writeln!(stdout, "{}: pass", g.name)?,
            Err(msg) => writeln!(stdout, "{}: FAIL ({msg})", g.name)?,
        }
    }
    let secs = report.elapsed.as_secs_f64();
    let budget = selftest::BUDGET.as_secs_f64();
    let verdict = if report.elapsed <= selftest::BUDGET {
        "ok"
    } else {
        "over budget"
    };
    writeln!(
        stdout,
        "runtime: {secs:.2} s (budget {budget:.0} s): {verdict}"
    )?;
    if report.passed() {
        Ok(EXIT_OK)
    } else {
        writeln!(
            stderr,
            "error: failed groups: {}",
            report.failed().join(", ")
        )?;
        Ok(EXIT_ERROR)
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{}", e.render());
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{}", e.render());
                    EXIT_ERROR
                }
            };
        }
    };
    let outcome = match &cli.command {
        Command::Solve(a) => run_solve(a, stdout, stderr),
        Command::Converge(a) => run_converge(a, stdout, stderr),
        Command::BasisTable(a) => emit(a, stdout, &basis_table()).map(|()| EXIT_OK),
        Command::Selftest(a) => run_selftest(a, stdout, stderr),
    };
    let code = match outcome {
        Ok(code) => code,
        Err(Failure(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_ERROR
        }
    };
    let _ = stdout.flush();
    code
}

/// Entry point for the binary.
pub fn main_with_std() -> i32 {
    let stdout = io::stdout();
    let stderr = io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut argv = vec!["septic-bvp"];
        argv.extend_from_slice(args);
        let code = run(argv, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn basis_table_rows() {
        let (code, out, _) = call(&["basis-table"]);
        assert_eq!(code, 0);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], "d,v_-4,v_-3,v_-2,v_-1,v_0,v_1,v_2,v_3,v_4");
        assert_eq!(lines[4], "3,0,210,1680,-3990,0,3990,-1680,-210,0");
        assert_eq!(
            lines[7],
            "6,0,5040,-30240,75600,-100800,75600,-30240,5040,0"
        );
        let flagged: Vec<&str> = lines
            .iter()
            .filter(|l| l.starts_with("# d=7"))
            .copied()
            .collect();
        assert!(
            flagged.iter().filter(|l| l.ends_with("sign")).count() == 3,
            "{flagged:?}"
        );
        assert!(lines
            .iter()
            .filter(|l| l.starts_with('#'))
            .all(|l| l.starts_with("# d=7")));
    }

    #[test]
    fn mesh_gate() {
        let (code, out, err) = call(&["solve", "--builtin", "example1", "--n", "7"]);
        assert_eq!(code, 1);
        assert!(out.is_empty());
        assert!(err.contains("n must be >= 8"), "{err}");
        assert_eq!(err.lines().count(), 1);
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(call(&["solve", "--n", "10"]).0, 1);
        assert_eq!(
            call(&[
                "solve",
                "--builtin",
                "example1",
                "--problem",
                "x.json",
                "--n",
                "10"
            ])
            .0,
            1
        );
        assert_eq!(
            call(&[
                "solve",
                "--builtin",
                "example1",
                "--n",
                "10",
                "--scheme",
                "qr"
            ])
            .0,
            1
        );
        assert_eq!(call(&["frobnicate"]).0, 1);
        assert_eq!(call(&["--help"]).0, 0);
    }

    #[test]
    fn converge_needs_two_meshes() {
        let (code, _, err) = call(&["converge", "--builtin", "example1", "--ns", "20"]);
        assert_eq!(code, 1);
        assert!(err.contains("at least 2"));
        let (code, _, _) = call(&["converge", "--builtin", "example1", "--ns", "20,20"]);
        assert_eq!(code, 1);
    }

    #[test]
    fn unknown_builtin() {
        let (code, _, err) = call(&["solve", "--builtin", "poly9", "--n", "10"]);
        assert_eq!(code, 1);
        assert!(err.starts_with("error:"));
    }
}
