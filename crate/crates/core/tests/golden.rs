//! Byte-for-byte plot comparisons. Set `MEIGEN_BLESS=1` to rewrite the files.

use std::path::PathBuf;

use magnetic_eigenmaps::eigen::eig_dense;
use magnetic_eigenmaps::embedding::phases;
use magnetic_eigenmaps::io::svg::{spectrum_svg, strip_generator_comment, torus_svg};
use magnetic_eigenmaps::laplacian::build_magnetic_laplacian;
use magnetic_eigenmaps::{Charge, DirectedGraph};

fn check(name: &str, svg: &str) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    let got = strip_generator_comment(svg);
    if std::env::var_os("MEIGEN_BLESS").is_some() {
        std::fs::write(&path, &got).unwrap();
    }
    let want = std::fs::read_to_string(&path).unwrap();
    assert_eq!(got, want, "{name} differs from its golden file");
}

/// Two directed 4-cycles joined by a reciprocal pair.
fn two_loops() -> DirectedGraph {
    let arcs = [(0, 1), (1, 2), (2, 3), (3, 0), (4, 5), (5, 6), (6, 7), (7, 4), (0, 4), (4, 0)];
    DirectedGraph::from_arcs(8, arcs).unwrap()
}

#[test]
fn torus_plot_matches_golden() {
    let sym = two_loops().symmetrize();
    let lap = build_magnetic_laplacian(&sym, Charge::new(1, 4).unwrap()).normalize().unwrap();
    let es = eig_dense(&lap, 2).unwrap();
    let emb = phases(&es, &[0, 1]).unwrap();
    let xs: Vec<f64> = emb.coords().iter().map(|r| r[0]).collect();
    let ys: Vec<f64> = emb.coords().iter().map(|r| r[1]).collect();
    let labels = [0, 0, 0, 0, 1, 1, 1, 1];
    check("two_loops_torus.svg", &torus_svg(&xs, &ys, Some(&labels), "two loops, g = 1/4", "phase 0", "phase 1"));
}

#[test]
fn spectrum_plot_matches_golden() {
    let magnetic = [0.0, 0.25, 0.5, 1.0];
    let plain = [0.0, 0.5, 1.0, 1.5];
    check("spectrum.svg", &spectrum_svg(&[("g = 1/4", &magnetic), ("g = 0", &plain)], "spectrum"));
}
