//! End-to-end runs: load a graph, solve, embed, diagnose and write outputs.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::charge::Charge;
use crate::diagnostics::{bound_ledger, holonomies, recover_potential_for_charge, synchronize_with};
use crate::eigen::{eig_dense, eig_dense_real, eig_iterative, spectrum_dense, EigenSystem, PowerOptions};
use crate::embedding::{circular_cluster_score, phases, TorusEmbedding};
use crate::error::{Error, Result};
use crate::generators::GeneratorSpec;
use crate::graph::{DirectedGraph, SymmetrizedView};
use crate::io::export::{
    write_coords_csv, write_json, write_real_coords_csv, write_spectrum_csv, ClusterScore, DiagnosticsReport,
    PotentialSummary,
};
use crate::io::{read_edge_list, read_gml, svg, write_edge_list};
use crate::laplacian::{build_magnetic_laplacian, MagneticLaplacian};

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputSource {
    EdgeList(PathBuf),
    Gml(PathBuf),
    Generator(GeneratorSpec),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    #[default]
    Dense,
    Power,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub input: InputSource,
    pub charge: Charge,
    /// Number of eigenpairs computed.
    pub k: usize,
    /// Eigen indices plotted as the torus axes.
    pub axes: (usize, usize),
    pub solver: SolverKind,
    pub power: PowerOptions,
    pub out_dir: PathBuf,
    /// Overrides generator and solver seeds.
    pub seed: Option<u64>,
    pub drop_isolated: bool,
    /// `(eigen index, angle)` shifts applied after gauge fixing.
    pub rotate: Vec<(usize, f64)>,
}

impl RunConfig {
    pub fn new(input: InputSource) -> Self {
        RunConfig {
            input,
            charge: Charge::new(1, 4).expect("valid preset"),
            k: 2,
            axes: (0, 1),
            solver: SolverKind::Dense,
            power: PowerOptions::default(),
            out_dir: PathBuf::from("out"),
            seed: None,
            drop_isolated: false,
            rotate: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::ParamOutOfRange {
                name: "k",
                detail: format!("{} < 2", self.k),
            });
        }
        for idx in [self.axes.0, self.axes.1].into_iter().chain(self.rotate.iter().map(|r| r.0)) {
            if idx >= self.k {
                return Err(Error::IndexOutOfRange { index: idx, limit: self.k });
            }
        }
        Ok(())
    }

    fn power_options(&self) -> PowerOptions {
        let mut opts = self.power;
        if let Some(s) = self.seed {
            opts.seed = s;
        }
        opts
    }
}

/// Graph ready for the Laplacian: no isolated nodes, connected.
#[derive(Debug, Clone)]
pub struct LoadedGraph {
    pub graph: DirectedGraph,
    pub labels: Option<Vec<usize>>,
    pub warnings: Vec<String>,
}

fn warn(warnings: &mut Vec<String>, msg: String) {
    log::warn!("{msg}");
    warnings.push(msg);
}

/// Reads the configured input. Isolated nodes are an error unless
/// `drop_isolated` is set; a disconnected graph is cut down to its largest
/// component with a warning.
pub fn load_input(cfg: &RunConfig) -> Result<LoadedGraph> {
    let mut warnings = Vec::new();
    let (mut graph, mut labels) = match &cfg.input {
        InputSource::EdgeList(path) => (read_edge_list(path)?, None),
        InputSource::Gml(path) => {
            let gml = read_gml(path, false)?;
            if gml.self_loops_dropped > 0 {
                warn(&mut warnings, format!("skipped {} self-loop(s)", gml.self_loops_dropped));
            }
            (gml.graph, gml.labels)
        }
        InputSource::Generator(spec) => {
            let spec = match cfg.seed {
                Some(s) => spec.clone().with_seed(s),
                None => spec.clone(),
            };
            spec.generate()?
        }
    };

    let isolated = graph.isolated_nodes();
    if !isolated.is_empty() {
        if !cfg.drop_isolated {
            return Err(Error::IsolatedNodes(isolated.len()));
        }
        let keep: Vec<usize> = (0..graph.node_count())
            .filter(|i| isolated.binary_search(i).is_err())
            .collect();
        warn(&mut warnings, format!("dropped {} isolated node(s)", isolated.len()));
        restrict(&mut graph, &mut labels, &keep)?;
    }
    if graph.node_count() == 0 {
        return Err(Error::NotConnected);
    }
    if !graph.is_connected() {
        let components = graph.components();
        let keep = components[0].clone();
        warn(
            &mut warnings,
            format!(
                "graph has {} components; keeping the largest ({} of {} nodes)",
                components.len(),
                keep.len(),
                graph.node_count()
            ),
        );
        restrict(&mut graph, &mut labels, &keep)?;
    }
    Ok(LoadedGraph { graph, labels, warnings })
}

fn restrict(graph: &mut DirectedGraph, labels: &mut Option<Vec<usize>>, keep: &[usize]) -> Result<()> {
    *graph = graph.induced_subgraph(keep)?;
    if let Some(l) = labels.as_mut() {
        *l = keep.iter().map(|&i| l[i]).collect();
    }
    Ok(())
}

fn solve(lap: &MagneticLaplacian, k: usize, cfg: &RunConfig) -> Result<EigenSystem> {
    match cfg.solver {
        SolverKind::Dense => eig_dense(lap, k),
        SolverKind::Power => eig_iterative(lap, k, &cfg.power_options()),
    }
}

/// Everything computed by one run.
#[derive(Debug, Clone)]
pub struct EmbeddingRun {
    pub loaded: LoadedGraph,
    pub sym: SymmetrizedView,
    pub eigen: EigenSystem,
    /// Eigenvalues of the `g = 0` problem, same count as `eigen`.
    pub baseline: Vec<f64>,
    pub embedding: TorusEmbedding,
    pub report: DiagnosticsReport,
}

pub fn run_embedding(cfg: &RunConfig) -> Result<EmbeddingRun> {
    cfg.validate()?;
    let mut loaded = load_input(cfg)?;
    let n = loaded.graph.node_count();
    if cfg.k > n {
        return Err(Error::TooManyEigenpairs { requested: cfg.k, n });
    }
    let g = cfg.charge;
    if g.is_zero() {
        warn(
            &mut loaded.warnings,
            "g = 0 carries no directional information; phases are constant".into(),
        );
    }
    let sym = loaded.graph.symmetrize();
    let lap = build_magnetic_laplacian(&sym, g).normalize()?;
    let eigen = solve(&lap, cfg.k, cfg)?;
    let baseline = if g.is_zero() {
        eigen.eigenvalues().to_vec()
    } else {
        let lap0 = build_magnetic_laplacian(&sym, Charge::ZERO).normalize()?;
        match cfg.solver {
            SolverKind::Dense => spectrum_dense(&lap0)?[..cfg.k].to_vec(),
            SolverKind::Power => solve(&lap0, cfg.k, cfg)?.eigenvalues().to_vec(),
        }
    };

    let indices: Vec<usize> = (0..cfg.k).collect();
    let mut embedding = phases(&eigen, &indices)?;
    for &(idx, angle) in &cfg.rotate {
        embedding.rotate(embedding.column_of(idx)?, angle)?;
    }
    if !embedding.gauge_mixed().is_empty() {
        warn(
            &mut loaded.warnings,
            format!("degenerate eigenvalues at indices {:?}; their phases are gauge-mixed", embedding.gauge_mixed()),
        );
    }
    if !embedding.flagged().is_empty() {
        warn(
            &mut loaded.warnings,
            format!("{} entries with vanishing modulus have phase 0", embedding.flagged().len()),
        );
    }

    let tree = sym.spanning_tree()?;
    let hol = holonomies(&sym, &tree, g);
    let sync = synchronize_with(&sym, g, &eigen)?;
    let spectral_gap = baseline[1];
    let bounds = bound_ledger(&lap, &eigen, spectral_gap, &hol)?;
    for b in bounds.iter().filter(|b| !b.holds()) {
        warn(&mut loaded.warnings, format!("bound {} violated by {:e}", b.name, -b.slack));
    }
    let potential = recover_potential_for_charge(&sym, g)?;
    let mut cluster_scores = Vec::new();
    if let Some(labels) = &loaded.labels {
        let mut axes = vec![cfg.axes.0];
        if cfg.axes.1 != cfg.axes.0 {
            axes.push(cfg.axes.1);
        }
        for eigen_index in axes {
            cluster_scores.push(ClusterScore {
                eigen_index,
                score: circular_cluster_score(&embedding, labels, eigen_index)?,
            });
        }
    }

    let report = DiagnosticsReport {
        charge: g.to_string(),
        nodes: n,
        edges: sym.edge_count(),
        lambda0: eigen.eigenvalues()[0],
        spectral_gap,
        frustration: sync.frustration,
        epsilon: hol.epsilon,
        epsilon_kind: "fundamental_cycles",
        beta1: hol.beta1,
        bounds,
        potential: PotentialSummary::from(&potential),
        cluster_scores,
        warnings: loaded.warnings.clone(),
    };
    Ok(EmbeddingRun {
        loaded,
        sym,
        eigen,
        baseline,
        embedding,
        report,
    })
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    fs::create_dir_all(dir)?;
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn write_text(dir: &Path, name: &str, text: &str) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(name), text)?;
    Ok(())
}

fn spectrum_plot(run: &EmbeddingRun) -> String {
    let g = run.report.charge.clone();
    svg::spectrum_svg(
        &[
            (&format!("g = {g}"), run.eigen.eigenvalues()),
            ("g = 0", &run.baseline),
        ],
        "lowest eigenvalues of the normalized Laplacians",
    )
}

/// Writes `coords.csv`, `spectrum.csv`, `diagnostics.json`,
/// `embedding.svg` and `spectrum.svg`.
pub fn cmd_embed(cfg: &RunConfig) -> Result<EmbeddingRun> {
    let run = run_embedding(cfg)?;
    let dir = &cfg.out_dir;
    let ids = run.loaded.graph.ids();
    write_coords_csv(&run.embedding, ids, create(dir, "coords.csv")?)?;
    write_spectrum_csv(run.eigen.eigenvalues(), &run.baseline, create(dir, "spectrum.csv")?)?;
    write_json(&run.report, create(dir, "diagnostics.json")?)?;
    let (a, b) = cfg.axes;
    let plot = svg::torus_svg(
        &run.embedding.axis(a)?,
        &run.embedding.axis(b)?,
        run.loaded.labels.as_deref(),
        &format!("magnetic eigenmap, g = {}", run.report.charge),
        &format!("phase of eigenvector {a}"),
        &format!("phase of eigenvector {b}"),
    );
    write_text(dir, "embedding.svg", &plot)?;
    write_text(dir, "spectrum.svg", &spectrum_plot(&run))?;
    Ok(run)
}

/// Writes `spectrum.csv` and `spectrum.svg`.
pub fn cmd_spectrum(cfg: &RunConfig) -> Result<EmbeddingRun> {
    let run = run_embedding(cfg)?;
    write_spectrum_csv(run.eigen.eigenvalues(), &run.baseline, create(&cfg.out_dir, "spectrum.csv")?)?;
    write_text(&cfg.out_dir, "spectrum.svg", &spectrum_plot(&run))?;
    Ok(run)
}

/// Writes `diagnostics.json`.
pub fn cmd_diagnose(cfg: &RunConfig) -> Result<DiagnosticsReport> {
    let run = run_embedding(cfg)?;
    write_json(&run.report, create(&cfg.out_dir, "diagnostics.json")?)?;
    Ok(run.report)
}

/// Real coordinates of the `g = 0` problem.
#[derive(Debug, Clone)]
pub struct DiffusionCoordinates {
    pub eigenvalues: Vec<f64>,
    /// `φ^(0)_1, φ^(0)_2, ...`; the constant vector is left out.
    pub coords: Vec<Vec<f64>>,
}

/// Lowest `count + 1` generalized eigenvectors at `g = 0`, without the
/// constant one.
pub fn diffusion_coordinates(sym: &SymmetrizedView, count: usize) -> Result<DiffusionCoordinates> {
    let lap = build_magnetic_laplacian(sym, Charge::ZERO).normalize()?;
    let (values, psi) = eig_dense_real(&lap, count + 1)?;
    let coords = psi
        .iter()
        .skip(1)
        .map(|v| v.iter().zip(lap.degrees()).map(|(x, d)| x / d.sqrt()).collect())
        .collect();
    Ok(DiffusionCoordinates {
        eigenvalues: values,
        coords,
    })
}

/// Writes `baseline.csv` (`φ^(0)_1`, `φ^(0)_2`) and `baseline.svg`.
pub fn cmd_diffusion_baseline(cfg: &RunConfig) -> Result<(LoadedGraph, DiffusionCoordinates)> {
    let loaded = load_input(cfg)?;
    if loaded.graph.node_count() < 3 {
        return Err(Error::TooManyEigenpairs {
            requested: 3,
            n: loaded.graph.node_count(),
        });
    }
    let sym = loaded.graph.symmetrize();
    let diff = diffusion_coordinates(&sym, 2)?;
    let ids = loaded.graph.ids();
    let vectors: Vec<&[f64]> = diff.coords.iter().map(Vec::as_slice).collect();
    write_real_coords_csv(ids, &[1, 2], &vectors, create(&cfg.out_dir, "baseline.csv")?)?;
    let plot = svg::scatter_svg(
        &diff.coords[0],
        &diff.coords[1],
        loaded.labels.as_deref(),
        "diffusion baseline, g = 0",
        "eigenvector 1",
        "eigenvector 2",
    );
    write_text(&cfg.out_dir, "baseline.svg", &plot)?;
    Ok((loaded, diff))
}

/// Writes `graph.edges` and, for labeled families, `labels.csv`.
pub fn cmd_generate(spec: &GeneratorSpec, out_dir: &Path) -> Result<(DirectedGraph, Option<Vec<usize>>)> {
    let (graph, labels) = spec.generate()?;
    write_edge_list(&graph, create(out_dir, "graph.edges")?)?;
    if let Some(l) = &labels {
        let mut text = String::from("node_id,label\n");
        for (id, c) in graph.ids().iter().zip(l) {
            text.push_str(&format!("{id},{c}\n"));
        }
        write_text(out_dir, "labels.csv", &text)?;
    }
    Ok((graph, labels))
}
