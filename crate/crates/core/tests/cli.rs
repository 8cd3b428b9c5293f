use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_septic-bvp"))
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("problems")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn stat(o: &Output, key: &str) -> f64 {
    stderr(o)
        .lines()
        .find_map(|l| l.strip_prefix(key)?.strip_prefix('='))
        .unwrap_or_else(|| panic!("no {key} in {}", stderr(o)))
        .parse()
        .unwrap()
}

#[test]
fn poly7_file_is_solved_exactly() {
    let p = fixture("poly7.json");
    let o = run(&["solve", "--problem", p.to_str().unwrap(), "--n", "16"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stat(&o, "max_abs_error") <= 1e-6);
    let csv = String::from_utf8(o.stdout).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("x,y_spline,y_exact,abs_error"));
    assert_eq!(lines.count(), 17);
}

#[test]
fn output_files_go_only_where_asked() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sol.csv");
    let sys = dir.path().join("sys.csv");
    let o = run(&[
        "solve",
        "--builtin",
        "example1",
        "--n",
        "10",
        "--output",
        out.to_str().unwrap(),
        "--dump-system",
        sys.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
    let mut names: Vec<_> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names, ["sol.csv", "sys.csv"]);
    let system = std::fs::read_to_string(&sys).unwrap();
    let header = system.lines().next().unwrap();
    assert!(
        header.starts_with("row,a-3,") && header.ends_with(",a13,rhs"),
        "{header}"
    );
    // 4 + 11 + 3 rows under least squares
    assert_eq!(system.lines().count(), 1 + 18);
}

#[test]
fn problem_without_exact_solution() {
    let p = fixture("no_exact.json");
    let p = p.to_str().unwrap();
    let o = run(&["converge", "--problem", p, "--ns", "10,20"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(
        stderr(&o).contains("exact solution required"),
        "{}",
        stderr(&o)
    );

    let o = run(&["solve", "--problem", p, "--n", "20"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stat(&o, "ode_residual").is_finite());
    let csv = String::from_utf8(o.stdout).unwrap();
    assert!(csv.lines().nth(1).unwrap().ends_with(",,"));
}

#[test]
fn exit_codes() {
    assert_eq!(
        run(&["solve", "--builtin", "example1", "--n", "4"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        run(&["solve", "--builtin", "nope", "--n", "10"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(run(&["solve", "--n", "10"]).status.code(), Some(1));
    assert_eq!(
        run(&[
            "solve",
            "--builtin",
            "example1",
            "--n",
            "10",
            "--scheme",
            "bogus"
        ])
        .status
        .code(),
        Some(1)
    );
    let o = run(&["solve", "--builtin", "example1", "--n", "4"]);
    assert!(stderr(&o).contains("n must be >= 8 (got 4)"));

    // a rough forcing term leaves the over-determined system inconsistent
    let dir = tempfile::tempdir().unwrap();
    let rough = dir.path().join("rough.json");
    std::fs::write(
        &rough,
        r#"{"a": 0, "b": 1, "g": "0", "q": "sqrt(x)", "bc": [0, 0, 0, 0, 0, 0, 0]}"#,
    )
    .unwrap();
    let o = run(&["solve", "--problem", rough.to_str().unwrap(), "--n", "8"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("warning:"));
}

#[test]
fn converge_reports_orders() {
    let o = run(&["converge", "--builtin", "example1", "--ns", "40,20"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<_> = csv.lines().collect();
    assert_eq!(
        lines[0],
        "n,h,max_abs_error,solve_residual,pairwise_order,wall_time_ms"
    );
    assert!(lines[1].starts_with("20,") && lines[2].starts_with("40,"));
    assert!(lines[3].starts_with("# fitted_order="));
}

#[test]
fn selftest_catches_corrupted_stencil() {
    let o = run(&["selftest"]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stdout)
    );
    let o = run(&["selftest", "--corrupt-stencil"]);
    assert_eq!(o.status.code(), Some(1));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("stencil: FAIL"), "{text}");
    assert!(text.contains("band-vs-dense: pass"), "{text}");
}

#[test]
fn csv_is_byte_deterministic() {
    let args = [
        "solve",
        "--builtin",
        "example1",
        "--n",
        "40",
        "--sample",
        "knots_and_midpoints",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(!text.contains('\r'));
    assert_eq!(text.lines().count(), 1 + 81);
}

#[test]
fn basis_table_lists_all_orders() {
    let o = run(&["basis-table"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(
        text.contains("\n6,0,5040,-30240,75600,-100800,75600,-30240,5040,0\n"),
        "{text}"
    );
}
