use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn oklab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_oklab")).args(args).output().expect("binary runs")
}

fn instance(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../instances").join(name).to_string_lossy().into_owned()
}

fn row<'a>(csv: &'a str, name: &str) -> Vec<&'a str> {
    csv.lines().find(|l| l.starts_with(&format!("{name},"))).unwrap_or_else(|| panic!("no {name} row")).split(',').collect()
}

#[test]
fn p1_full_run_passes_and_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let r = oklab(&["run", "--instance", &instance("p1_linear.txt"), "--out", out]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let summary = fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    assert_eq!(summary.lines().next(), Some("name,estimate,reference,gap,pass"));
    let hs = row(&summary, "hilbert_samuel");
    assert!(hs[3].parse::<f64>().unwrap() <= 0.05);
    assert_eq!(hs[4], "true");
    for f in ["transform.csv", "measures.csv", "volumes.csv"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let measures = fs::read_to_string(dir.path().join("measures.csv")).unwrap();
    assert_eq!(measures.lines().count(), 61);
}

#[test]
fn function_field_volumes_match_the_integral() {
    let dir = tempfile::tempdir().unwrap();
    let r = oklab(&["run", "--instance", &instance("p1_function_field.txt"), "--suite", "volumes", "--out", dir.path().to_str().unwrap()]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let volumes = fs::read_to_string(dir.path().join("volumes.csv")).unwrap();
    assert_eq!(volumes.lines().next(), Some("quantity,estimate,error_bar,reference_value"));
    assert!(volumes.lines().count() > 1);
}

#[test]
fn reports_are_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let r = oklab(&["run", "--instance", &instance("p2_linear.txt"), "--suite", "toric", "--truncation", "12", "--samples", "500", "--out", d.path().to_str().unwrap()]);
        assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    }
    for f in ["summary.csv", "transform.csv", "measures.csv"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn malformed_instance_exits_two_with_a_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.txt");
    let good = fs::read_to_string(instance("p1_linear.txt")).unwrap();
    let mut lines: Vec<&str> = good.lines().collect();
    let n = lines.len();
    lines[n - 1] = "roof nonsense ][";
    fs::write(&path, lines.join("\n")).unwrap();
    let r = oklab(&["run", "--instance", path.to_str().unwrap(), "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(2));
    let err = String::from_utf8_lossy(&r.stderr);
    assert!(err.contains("bad.txt:"), "{err}");
}

#[test]
fn missing_instance_exits_three() {
    let r = oklab(&["run", "--instance", "/nonexistent/instance.txt"]);
    assert_eq!(r.status.code(), Some(3));
}

#[test]
fn too_small_truncation_is_rejected() {
    let r = oklab(&["run", "--instance", &instance("p1_linear.txt"), "--truncation", "2"]);
    assert_eq!(r.status.code(), Some(2));
}

#[test]
fn random_template_is_reproducible() {
    let a = oklab(&["generate", "random_pl", "--seed", "42"]);
    let b = oklab(&["generate", "random_pl", "--seed", "42"]);
    let c = oklab(&["generate", "random_pl", "--seed", "43"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    let shipped = fs::read(instance("random_pl.txt")).unwrap();
    assert_eq!(a.stdout, shipped);
}

#[test]
fn generated_instances_parse_back() {
    let dir = tempfile::tempdir().unwrap();
    for t in ["p1_linear", "p2_linear", "p1_function_field_impure"] {
        let path = dir.path().join(format!("{t}.txt"));
        assert!(oklab(&["generate", t, "--out", path.to_str().unwrap()]).status.success());
        let r = oklab(&["run", "--instance", path.to_str().unwrap(), "--suite", "okounkov", "--truncation", "8", "--out", dir.path().join(t).to_str().unwrap()]);
        assert!(r.status.success(), "{t}: {}", String::from_utf8_lossy(&r.stderr));
    }
}

#[test]
fn boundary_family_writes_a_directory() {
    let dir = tempfile::tempdir().unwrap();
    let fam = dir.path().join("family");
    let r = oklab(&["generate", "boundary_family", "--eps", "-1/2,1/4,1", "--out", fam.to_str().unwrap()]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let index = fs::read_to_string(fam.join("family.csv")).unwrap();
    assert_eq!(index.lines().count(), 4);
    let member = fs::read_to_string(fam.join("member_01.txt")).unwrap();
    assert!(member.starts_with("# epsilon 1/4\n"));
    let r = oklab(&["run", "--instance", fam.join("member_01.txt").to_str().unwrap(), "--suite", "okounkov", "--out", dir.path().join("o").to_str().unwrap()]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
}

#[test]
fn unknown_template_fails() {
    let r = oklab(&["generate", "p7_quintic"]);
    assert!(!r.status.success());
    assert!(r.stdout.is_empty());
}
