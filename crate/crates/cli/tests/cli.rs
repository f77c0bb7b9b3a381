use std::fs;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polytope-fem")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn tabulate_n2_triangle() {
    let o = run(&["tabulate", "--family", "n2", "--order", "1", "--dim", "2"]);
    assert!(o.status.success());
    let s = stdout(&o);
    for t in ["T_1 ", "T_2 ", "T_3 ", "T_12 ", "T_13 ", "T_23 ", "T_123 "] {
        assert!(s.contains(t), "{t}");
    }
    assert!(s.contains("functions 6 (expected 6)"));
}

#[test]
fn tabulate_rt0_shows_divergences() {
    let s = stdout(&run(&["tabulate", "--family", "rt", "--order", "0", "--dim", "2"]));
    assert_eq!(s.matches("div = ").count(), 3);
}

#[test]
fn tabulate_rejects_first_type_on_tetrahedra() {
    let o = run(&["tabulate", "--family", "n1", "--order", "1", "--dim", "3"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("not covered"));
}

#[test]
fn verify_bdm2_tetrahedron() {
    let o = run(&["verify", "--family", "bdm", "--order", "2", "--dim", "3", "--seed", "3"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("rank 30 of 30"));
    assert!(!s.contains("FAIL"));
}

#[test]
fn verify_is_deterministic() {
    let args = ["verify", "--family", "n2", "--order", "3", "--dim", "2"];
    let (a, b) = (run(&args), run(&args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).contains("rank 20 of 20"));
}

#[test]
fn perturbed_template_fails_conformity() {
    let o = run(&["verify", "--family", "n2", "--order", "2", "--dim", "2", "--perturb-template", "0"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("conformity"));
}

#[test]
fn converge_writes_stable_csv_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("a.csv");
    let csv2 = dir.path().join("b.csv");
    let svg = dir.path().join("plot.svg");
    let meshes = dir.path().join("meshes");
    let base = ["converge", "--problem", "antiplane", "--pairing", "l1-n1_0", "--levels", "3"];
    let o = run(&[
        &base[..],
        &["--out", csv.to_str().unwrap(), "--svg", svg.to_str().unwrap(), "--dump-mesh", meshes.to_str().unwrap()],
    ]
    .concat());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(run(&[&base[..], &["--out", csv2.to_str().unwrap()]].concat()).status.success());
    let a = fs::read(&csv).unwrap();
    assert_eq!(a, fs::read(&csv2).unwrap());
    let text = String::from_utf8(a).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "family_u,family_p,p,refine,dofs,err_u,err_p");
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("L,N1,1,0,25,"));
    let plot = fs::read_to_string(&svg).unwrap();
    assert_eq!(plot.matches("<polyline").count(), 2);
    assert_eq!(fs::read_dir(&meshes).unwrap().count(), 3);
    assert!(stdout(&o).contains("slope_u"));
}

#[test]
fn converge_needs_enough_levels() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.csv");
    let o = run(&["converge", "--problem", "antiplane", "--pairing", "l1-n1_0", "--levels", "2", "--out", out.to_str().unwrap()]);
    assert!(!o.status.success());
    let o = run(&["converge", "--problem", "antiplane", "--pairing", "l1-n2_0", "--levels", "3", "--out", out.to_str().unwrap()]);
    assert!(!o.status.success());
}
