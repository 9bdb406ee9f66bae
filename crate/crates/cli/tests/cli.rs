use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const KNOWN_ORDER: &str = "de < ad < ac < ab < ce < be < bc < cd < ae < bd";

fn dir(name: &str) -> PathBuf {
    let d = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    fs::create_dir_all(&d).unwrap();
    d
}

fn ordrep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ordrep")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(d: &Path, name: &str, text: &str) -> String {
    let p = d.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

const LINE3: &str = "3\n0 1 3\n1 0 2\n3 2 0\n";

#[test]
fn known_order_refutation_and_check() {
    let d = dir("known");
    let order = write(&d, "order.txt", KNOWN_ORDER);
    let proof = d.join("proof.txt");
    let o = ordrep(&["prove", "--order", &order, "--mode", "extremal", "--max-depth", "1", "--out", proof.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&proof).unwrap();
    assert!(text.starts_with(&format!("TEST OF EDGE ORDER {KNOWN_ORDER}")));
    let o = ordrep(&["prove", "--check", proof.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("valid refutation"));

    let bad = write(&d, "bad.txt", &text.replacen("< 60", "< 50", 1));
    assert_eq!(ordrep(&["prove", "--check", &bad]).status.code(), Some(1));
}

#[test]
fn planar_order_is_unknown() {
    let d = dir("planar");
    // every order on four points has a plane representation
    let order = write(&d, "order.txt", "0-1 2-3 1-2 0-3 0-2 1-3\n");
    let proof = d.join("proof.txt");
    let o = ordrep(&["prove", "--order", &order, "--out", proof.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(ordrep(&["prove", "--check", proof.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn cluster_line_for_three_points() {
    let d = dir("cluster");
    let dist = write(&d, "m.txt", LINE3);
    let o = ordrep(&["embed-cluster", "--dist", &dist]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).split_whitespace().collect::<Vec<_>>(), vec!["0", "1", "3"]);
}

#[test]
fn theorem_line_needs_a_power_of_two() {
    let d = dir("line");
    let dist = write(&d, "m.txt", LINE3);
    assert_eq!(ordrep(&["embed-line", "--dist", &dist]).status.code(), Some(1));
    let o = ordrep(&["embed-line", "--dist", &dist, "--best-effort"]);
    assert!(o.status.success());
    let m4 = write(&d, "m4.txt", "4\n0 1 4 9\n1 0 2 7\n4 2 0 3\n9 7 3 0\n");
    let cert = d.join("cert.txt");
    let o = ordrep(&["embed-line", "--dist", &m4, "--certificates", cert.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).split_whitespace().count(), 4);
    assert!(fs::read_to_string(cert).unwrap().lines().count() >= 2);
}

#[test]
fn confidence_reproduces_the_reference_bound() {
    let o = ordrep(&["confidence", "--s", "795", "--N", "10000", "--beta", "0.995"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("upper bound for the complement 0.927"), "{}", stdout(&o));
    assert_eq!(ordrep(&["confidence", "--s", "5", "--N", "3"]).status.code(), Some(1));
}

#[test]
fn nearest_graph_and_plane_check() {
    let d = dir("nn");
    let dist = write(&d, "m.txt", LINE3);
    let o = ordrep(&["nn", "--dist", &dist, "--check-plane"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.starts_with("0 1\n1 0\n2 1\n"), "{s}");
    assert!(s.contains("feasible"));
    // a root with five leaves
    let mut m = String::from("7\n");
    for i in 0..7 {
        let row: Vec<String> = (0..7)
            .map(|j| {
                let v = match (i.min(j), i.max(j)) {
                    (a, b) if a == b => 0.0,
                    (0, 1) => 1.0,
                    (0, b) => 1.5 + b as f64 * 0.01,
                    (1, b) => 3.0 + b as f64 * 0.01,
                    (a, b) => 2.0 + (a * 7 + b) as f64 * 0.01,
                };
                format!("{v}")
            })
            .collect();
        m.push_str(&row.join(" "));
        m.push('\n');
    }
    let star = write(&d, "star.txt", &m);
    assert_eq!(ordrep(&["nn", "--dist", &star, "--check-plane"]).status.code(), Some(2));
}

#[test]
fn farthest_embedding_writes_points_and_svg() {
    let d = dir("fn");
    let dist = write(&d, "m.txt", LINE3);
    let svg = d.join("fn.svg");
    let o = ordrep(&["embed-farthest", "--dist", &dist, "--svg", svg.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("3 2 l2"));
    assert!(fs::read_to_string(svg).unwrap().contains("<svg"));
}

#[test]
fn accuracy_of_a_matching_order() {
    let d = dir("accuracy");
    let dist = write(&d, "m.txt", LINE3);
    let pts = write(&d, "p.txt", "3 1 l2\n0\n1\n3\n");
    let o = ordrep(&["accuracy", "--dist", &dist, "--points", &pts]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("accuracy 1/1"), "{}", stdout(&o));
    let rev = write(&d, "o.txt", "0-2 1-2 0-1\n");
    let o = ordrep(&["accuracy", "--dist", &dist, "--image-order", &rev]);
    assert!(stdout(&o).contains("tau -1/1"), "{}", stdout(&o));
}

#[test]
fn optimize_and_coverage_run() {
    let d = dir("optimize");
    let order = write(&d, "o.txt", "0-1 1-2 0-2\n");
    let o = ordrep(&["optimize", "--order", &order, "--seed", "3"]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("order represented"));
    let o = ordrep(&["coverage", "--n", "4", "--trials", "100", "--kind", "extremal"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("of 720 orders"));
    let o = ordrep(&["nnstats", "--n", "2", "--trials", "3"]);
    assert!(stdout(&o).contains("biroot_prob 1.00000"));
}

#[test]
fn errors_exit_with_one() {
    let o = ordrep(&["embed-cluster", "--dist", "/nonexistent/file"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error: "));
}
