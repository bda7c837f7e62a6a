use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn meigen(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_meigen"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn generate_then_embed() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let o = meigen(&["generate", "--generator", "flow-groups", "--seed", "4", "--out", "g"], d);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(d.join("g/labels.csv").exists());

    let o = meigen(&["embed", "--input", "g/graph.edges", "--g", "1/4", "--out", "e"], d);
    assert!(o.status.success(), "{}", stderr(&o));
    let coords = fs::read_to_string(d.join("e/coords.csv")).unwrap();
    assert_eq!(coords.lines().count(), 31);
    for line in coords.lines().skip(1) {
        for cell in line.split(',').skip(1).take(2) {
            let t: f64 = cell.parse().unwrap();
            assert!((0.0..std::f64::consts::TAU).contains(&t));
        }
    }
    for f in ["spectrum.csv", "diagnostics.json", "embedding.svg", "spectrum.svg"] {
        assert!(d.join("e").join(f).exists(), "{f}");
    }
}

#[test]
fn generator_runs_report_cluster_scores() {
    let dir = tempfile::tempdir().unwrap();
    let o = meigen(&["embed", "--generator", "flow-groups:seed=2", "--out", "o"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("cluster score on axis 0"), "{stdout}");
}

#[test]
fn zero_charge_warns() {
    let dir = tempfile::tempdir().unwrap();
    let o = meigen(&["embed", "--generator", "cycle:n=5", "--g", "0", "--out", "o"], dir.path());
    assert!(o.status.success());
    assert!(stderr(&o).contains("no directional information"));
}

#[test]
fn parse_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.edges"), "0 1\n1 1\n").unwrap();
    let o = meigen(&["embed", "--input", "bad.edges"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2"));

    fs::write(dir.path().join("bad.gml"), "graph [ node [ id 0 ").unwrap();
    let o = meigen(&["spectrum", "--input", "bad.gml"], dir.path());
    assert_eq!(o.status.code(), Some(2));

    let o = meigen(&["embed", "--generator", "cycle:n=3", "--g", "3/4"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let o = meigen(&["embed", "--generator", "cycle:n=3", "--axes", "0"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn numerical_failure_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let o = meigen(
        &["embed", "--generator", "cycle:n=6", "--solver", "power", "--tol", "0", "--max-iter", "1"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(
        d.join("run.toml"),
        "g = \"1/3\"\nk = 3\naxes = [0, 2]\nout = \"from-config\"\n\n[generator]\nkind = \"flow_groups\"\nseed = 5\n",
    )
    .unwrap();
    let o = meigen(&["embed", "--config", "run.toml"], d);
    assert!(o.status.success(), "{}", stderr(&o));
    let json = fs::read_to_string(d.join("from-config/diagnostics.json")).unwrap();
    assert!(json.contains("\"charge\": \"1/3\""));
    let header = fs::read_to_string(d.join("from-config/coords.csv")).unwrap();
    assert!(header.starts_with("node_id,phase_0,phase_1,phase_2,"));

    let o = meigen(&["embed", "--config", "run.toml", "--g", "1/4", "--out", "flag"], d);
    assert!(o.status.success(), "{}", stderr(&o));
    let json = fs::read_to_string(d.join("flag/diagnostics.json")).unwrap();
    assert!(json.contains("\"charge\": \"1/4\""));

    fs::write(d.join("typo.toml"), "gee = 1\n").unwrap();
    let o = meigen(&["embed", "--config", "typo.toml"], d);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn svg_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    for out in ["a", "b"] {
        let o = meigen(&["embed", "--generator", "cluster-hubs:seed=9", "--out", out], d);
        assert!(o.status.success());
    }
    let a = fs::read(d.join("a/embedding.svg")).unwrap();
    let b = fs::read(d.join("b/embedding.svg")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn gml_with_isolated_nodes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(
        d.join("g.gml"),
        "graph [ directed 1\n node [ id 0 value 0 ] node [ id 1 value 1 ] node [ id 2 value 1 ] node [ id 3 value 0 ]\n edge [ source 0 target 1 ] edge [ source 1 target 2 ] edge [ source 2 target 0 ] ]\n",
    )
    .unwrap();
    let o = meigen(&["embed", "--input", "g.gml", "--out", "o"], d);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("isolated"));
    let o = meigen(&["embed", "--input", "g.gml", "--drop-isolated", "--out", "o"], d);
    assert!(o.status.success(), "{}", stderr(&o));
    let coords = fs::read_to_string(d.join("o/coords.csv")).unwrap();
    assert_eq!(coords.lines().count(), 4);
}

#[test]
fn rotate_shifts_one_axis() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let base = ["embed", "--generator", "flow-groups:seed=1"];
    let o = meigen(&[&base[..], &["--out", "plain"]].concat(), d);
    assert!(o.status.success());
    let o = meigen(&[&base[..], &["--rotate", "0,1.0", "--out", "rot"]].concat(), d);
    assert!(o.status.success(), "{}", stderr(&o));
    let read = |p: &str| -> Vec<Vec<f64>> {
        fs::read_to_string(d.join(p))
            .unwrap()
            .lines()
            .skip(1)
            .map(|l| l.split(',').skip(1).map(|c| c.parse().unwrap()).collect())
            .collect()
    };
    let (a, b) = (read("plain/coords.csv"), read("rot/coords.csv"));
    for (x, y) in a.iter().zip(&b) {
        let shift = (y[0] - x[0]).rem_euclid(std::f64::consts::TAU);
        assert!((shift - 1.0).abs() < 1e-9);
        assert_eq!(x[1], y[1]);
    }
}

#[test]
fn baseline_writes_scatter() {
    let dir = tempfile::tempdir().unwrap();
    let o = meigen(&["baseline", "--generator", "cluster-hubs", "--out", "b"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("b/baseline.csv")).unwrap();
    assert!(csv.starts_with("node_id,phi_1,phi_2\n"));
    assert_eq!(csv.lines().count(), 33);
}
