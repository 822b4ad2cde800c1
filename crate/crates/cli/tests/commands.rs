use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use paving::random::uniform_matrix;
use paving::{exact_moment, DenseMatrix, ProjectorModel, Seed};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_paving"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn paving")
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn field(text: &str, key: &str) -> String {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key} = ")))
        .unwrap_or_else(|| panic!("no '{key}' in:\n{text}"))
        .to_string()
}

fn write_matrix(dir: &Path, name: &str, a: &DenseMatrix) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, a.to_text()).unwrap();
    path
}

#[test]
fn gen_hadamard_has_unit_norm_and_flat_entries() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("h.txt");
    let o = run(&["gen", "hadamard", "8", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let a = DenseMatrix::parse_text(&fs::read_to_string(&out).unwrap()).unwrap();
    let norm: f64 = field(&stdout(&o), "spectral_norm").parse().unwrap();
    assert!((norm - 1.0).abs() < 1e-12);
    let h = 8f64.sqrt().recip();
    assert!(a.data().iter().all(|x| (x.abs() - h).abs() < 1e-15));
}

#[test]
fn gen_bounded_respects_mu_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (p1, p2) = (dir.path().join("a.txt"), dir.path().join("b.txt"));
    for p in [&p1, &p2] {
        let o = run(&["gen", "bounded-random", "16", "--mu", "0.2", "--seed", "0x2a", "--out", p.to_str().unwrap()]);
        assert!(o.status.success());
        let entry: f64 = field(&stdout(&o), "max_abs_entry").parse().unwrap();
        assert!(entry <= 0.2);
    }
    assert_eq!(fs::read(&p1).unwrap(), fs::read(&p2).unwrap());
    let o = run(&["gen", "no-such-kind", "4"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn pave_trivial_cases() {
    let dir = tempfile::tempdir().unwrap();
    let a = uniform_matrix(6, 6, Seed(3), 0);
    let path = write_matrix(dir.path(), "a.txt", &a);
    let o = run(&["pave", path.to_str().unwrap(), "--m", "1", "--trials", "5"]);
    let text = stdout(&o);
    assert_eq!(field(&text, "quality"), field(&text, "spectral_norm"));

    let hollow = DenseMatrix::from_fn(6, 6, |i, j| if i == j { 0.0 } else { a.get(i, j) });
    let path = write_matrix(dir.path(), "h.txt", &hollow);
    let o = run(&["pave", path.to_str().unwrap(), "--m", "6", "--trials", "5"]);
    assert_eq!(field(&stdout(&o), "quality"), "0");
}

#[test]
fn pave_fixture_matches_exhaustive_value() {
    let expected: f64 = fs::read_to_string(fixture("hollow8_m2_optimum.txt"))
        .unwrap()
        .lines()
        .find(|l| !l.starts_with('#'))
        .unwrap()
        .trim()
        .parse()
        .unwrap();
    let input = fixture("hollow8.txt");
    let o = run(&["pave", input.to_str().unwrap(), "--m", "2", "--trials", "10000", "--seed", "1"]);
    assert!(o.status.success());
    let q: f64 = field(&stdout(&o), "quality").parse().unwrap();
    assert!((q - expected).abs() <= 1e-12);
    let o = run(&["pave", input.to_str().unwrap(), "--m", "2", "--exhaustive"]);
    let q: f64 = field(&stdout(&o), "quality").parse().unwrap();
    assert!((q - expected).abs() <= 1e-12);
}

#[test]
fn pave_pads_and_reports_original_coordinates() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_matrix(dir.path(), "a.txt", &uniform_matrix(7, 7, Seed(9), 0));
    let part = dir.path().join("p.txt");
    let o = run(&["pave", path.to_str().unwrap(), "--m", "3", "--eps", "0.4", "--out", part.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("padded"));
    let text = stdout(&o);
    assert_eq!(field(&text, "padded_n"), "9");
    assert!(["true", "false"].contains(&field(&text, "within_3eps").as_str()));
    assert!(["true", "false"].contains(&field(&text, "within_6eps").as_str()));
    let p = paving::Partition::parse_text(7, &fs::read_to_string(&part).unwrap()).unwrap();
    assert_eq!(p.ambient(), 7);
}

#[test]
fn pave_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "2 2\n1 2\n3\n").unwrap();
    assert_eq!(run(&["pave", bad.to_str().unwrap(), "--m", "2"]).status.code(), Some(2));
    let big = write_matrix(dir.path(), "big.txt", &DenseMatrix::zeros(16, 16));
    let o = run(&["pave", big.to_str().unwrap(), "--m", "2", "--exhaustive"]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(run(&["pave", "/nonexistent/matrix.txt", "--m", "2"]).status.code(), Some(2));
}

#[test]
fn verify_suites() {
    let o = run(&["verify", "DECOUPLING", "--size", "tiny"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("suite DECOUPLING: 100/100 hold"));
    let o = run(&["verify", "MARKOV"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("11/11 hold"));
    let o = run(&["verify", "all", "--size", "smoke"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("summary: size=smoke"));
    assert_eq!(run(&["verify", "NOT_A_SUITE"]).status.code(), Some(2));
}

#[test]
fn scan_full_rate_gives_spectral_norm() {
    let dir = tempfile::tempdir().unwrap();
    let a = uniform_matrix(5, 5, Seed(12), 0);
    let path = write_matrix(dir.path(), "a.txt", &a);
    let csv = dir.path().join("s.csv");
    let o = run(&["scan", path.to_str().unwrap(), "--vary", "rho", "--grid", "1", "--out", csv.to_str().unwrap()]);
    assert!(o.status.success());
    let text = fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("param,value,p,estimate,stderr,trials,seed,step3_bound,extrap_bound"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[3].parse::<f64>().unwrap(), paving::spectral_norm(&a).unwrap());
    assert_eq!(row[4], "0");
}

#[test]
fn scan_exact_matches_enumeration_and_bounds_dominate() {
    let dir = tempfile::tempdir().unwrap();
    let raw = uniform_matrix(10, 10, Seed(10), 0);
    let a = raw.scale(1.0 / raw.op_norm());
    let path = write_matrix(dir.path(), "a.txt", &a);
    // reload to use exactly what the CLI sees
    let a = DenseMatrix::parse_text(&fs::read_to_string(&path).unwrap()).unwrap();
    let csv = dir.path().join("s.csv");
    let o = run(&[
        "scan", path.to_str().unwrap(), "--vary", "delta", "--grid", "0.1,0.3,0.5,0.7", "--p", "6",
        "--out", csv.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&csv).unwrap();
    for line in text.lines().skip(1) {
        let row: Vec<&str> = line.split(',').collect();
        let rate: f64 = row[1].parse().unwrap();
        let est: f64 = row[3].parse().unwrap();
        let exact = exact_moment(&a, &ProjectorModel::bernoulli(10, rate).unwrap(), 6.0).unwrap().value;
        assert!((est - exact).abs() <= 1e-12);
        for bound in &row[7..] {
            if !bound.is_empty() {
                assert!(bound.parse::<f64>().unwrap() >= est);
            }
        }
        assert!(!row[7].is_empty() && !row[8].is_empty(), "hypotheses hold here: {line}");
    }
}

#[test]
fn scan_rejects_bad_grid() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_matrix(dir.path(), "a.txt", &uniform_matrix(4, 4, Seed(1), 0));
    let o = run(&["scan", path.to_str().unwrap(), "--vary", "rho", "--grid", "1.5"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["scan", path.to_str().unwrap(), "--vary", "p", "--grid", "x"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bound_examples() {
    let o = run(&["bound", "paving-size", "--gamma", "2", "--eps", "0.5"]);
    let v: f64 = field(&stdout(&o), "paving_size_bound").parse().unwrap();
    assert!((v - 8e6).abs() < 1e-6);
    let o = run(&["bound", "khintchine", "--p", "2"]);
    assert_eq!(field(&stdout(&o), "exact"), "1");
    let o = run(&["bound", "pipeline", "--n", "1024", "--gamma", "1"]);
    assert_eq!(field(&stdout(&o), "lambda"), "0.25");
    assert_eq!(run(&["bound", "unknown"]).status.code(), Some(2));
    assert_eq!(run(&["bound", "haagerup", "--q", "1"]).status.code(), Some(2));
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# defaults\ngamma = 2\neps = 0.5\n").unwrap();
    let o = run(&["--config", cfg.to_str().unwrap(), "bound", "paving-size"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: f64 = field(&stdout(&o), "paving_size_bound").parse().unwrap();
    assert!((v - 8e6).abs() < 1e-6);
    let o = run(&["--config", cfg.to_str().unwrap(), "bound", "paving-size", "--eps", "0.25"]);
    let v: f64 = field(&stdout(&o), "paving_size_bound").parse().unwrap();
    assert!((v / 6.4e7 - 1.0).abs() < 1e-12);
}
