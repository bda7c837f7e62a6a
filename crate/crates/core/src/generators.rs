//! Seeded synthetic directed networks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::DirectedGraph;

pub const CONNECTIVITY_RETRIES: usize = 100;

/// A graph with one ground-truth class per node.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledGraph {
    pub graph: DirectedGraph,
    pub labels: Vec<usize>,
}

fn check_prob(name: &'static str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::ParamOutOfRange {
            name,
            detail: format!("{p} not in [0, 1]"),
        })
    }
}

fn check_size(name: &'static str, value: usize, min: usize) -> Result<()> {
    if value >= min {
        Ok(())
    } else {
        Err(Error::ParamOutOfRange {
            name,
            detail: format!("{value} < {min}"),
        })
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Groups with an overall cyclic flow `0 → 1 → … → G−1 → 0`.
///
/// Intra-group pairs are linked in both directions with probability
/// `p_intra`. Inter-group pairs are linked with probability `p_inter`; such a
/// link follows the flow with probability `directed_fraction` and runs
/// against it otherwise. For group pairs that are not cyclic neighbours the
/// flow direction is the shorter way round the cycle (ties: lower group first).
pub fn gen_flow_groups(
    groups: usize,
    size: usize,
    p_intra: f64,
    p_inter: f64,
    directed_fraction: f64,
    seed: u64,
) -> Result<LabeledGraph> {
    check_size("groups", groups, 2)?;
    check_size("size", size, 1)?;
    check_prob("p_intra", p_intra)?;
    check_prob("p_inter", p_inter)?;
    check_prob("directed_fraction", directed_fraction)?;
    let n = groups * size;
    let labels: Vec<usize> = (0..n).map(|i| i / size).collect();
    let mut rng = rng(seed);
    let mut arcs = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let (a, b) = (labels[i], labels[j]);
            if a == b {
                if rng.random_bool(p_intra) {
                    arcs.push((i, j));
                    arcs.push((j, i));
                }
                continue;
            }
            if !rng.random_bool(p_inter) {
                continue;
            }
            let forward = (b + groups - a) % groups;
            let flow_i_to_j = forward <= groups - forward;
            let along = rng.random_bool(directed_fraction);
            if flow_i_to_j == along {
                arcs.push((i, j));
            } else {
                arcs.push((j, i));
            }
        }
    }
    Ok(LabeledGraph {
        graph: DirectedGraph::from_arcs(n, arcs)?,
        labels,
    })
}

/// Labels used by [`gen_cluster_hubs`].
pub const CORE_A: usize = 0;
pub const CORE_B: usize = 1;
pub const SINKS: usize = 2;
pub const SOURCES: usize = 3;

/// Two dense undirected cores joined by a few undirected links, plus
/// `hub_pairs` sink nodes fed by every core node and `hub_pairs` source
/// nodes feeding every core node.
///
/// Node layout: core A, core B, sinks, sources.
pub fn gen_cluster_hubs(
    group_size: usize,
    p_intra: f64,
    n_interlinks: usize,
    hub_pairs: usize,
    seed: u64,
) -> Result<LabeledGraph> {
    check_size("group_size", group_size, 1)?;
    check_prob("p_intra", p_intra)?;
    if n_interlinks > group_size * group_size {
        return Err(Error::ParamOutOfRange {
            name: "n_interlinks",
            detail: format!("{n_interlinks} > {}", group_size * group_size),
        });
    }
    let core = 2 * group_size;
    let n = core + 2 * hub_pairs;
    let mut labels = vec![CORE_A; group_size];
    labels.extend(std::iter::repeat_n(CORE_B, group_size));
    labels.extend(std::iter::repeat_n(SINKS, hub_pairs));
    labels.extend(std::iter::repeat_n(SOURCES, hub_pairs));

    let mut rng = rng(seed);
    let mut arcs = Vec::new();
    for offset in [0, group_size] {
        for i in 0..group_size {
            for j in (i + 1)..group_size {
                if rng.random_bool(p_intra) {
                    arcs.push((offset + i, offset + j));
                    arcs.push((offset + j, offset + i));
                }
            }
        }
    }
    // interlinks: partial Fisher–Yates over the group_size² cross pairs
    let mut cross: Vec<usize> = (0..group_size * group_size).collect();
    for k in 0..n_interlinks {
        let pick = rng.random_range(k..cross.len());
        cross.swap(k, pick);
        let (i, j) = (cross[k] / group_size, group_size + cross[k] % group_size);
        arcs.push((i, j));
        arcs.push((j, i));
    }
    for h in 0..hub_pairs {
        let sink = core + h;
        let source = core + hub_pairs + h;
        for i in 0..core {
            arcs.push((i, sink));
            arcs.push((source, i));
        }
    }
    Ok(LabeledGraph {
        graph: DirectedGraph::from_arcs(n, arcs)?,
        labels,
    })
}

/// Each ordered pair `(i, j)`, `i ≠ j`, is an arc with probability `p`.
/// Resamples until connected.
pub fn erdos_renyi_digraph(n: usize, p: f64, seed: u64) -> Result<DirectedGraph> {
    check_size("n", n, 1)?;
    check_prob("p", p)?;
    let mut rng = rng(seed);
    for _ in 0..CONNECTIVITY_RETRIES {
        let mut arcs = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i != j && rng.random_bool(p) {
                    arcs.push((i, j));
                }
            }
        }
        let g = DirectedGraph::from_arcs(n, arcs)?;
        if g.is_connected() {
            return Ok(g);
        }
    }
    Err(Error::ConnectivityRetryExceeded(CONNECTIVITY_RETRIES))
}

/// Random recursive tree: node `i` attaches to a uniform earlier node; the
/// link is `i → j`, `j → i` or reciprocal with equal probability.
pub fn random_tree(n: usize, seed: u64) -> Result<DirectedGraph> {
    check_size("n", n, 1)?;
    let mut rng = rng(seed);
    let mut arcs = Vec::with_capacity(2 * n);
    for i in 1..n {
        let j = rng.random_range(0..i);
        match rng.random_range(0..3) {
            0 => arcs.push((i, j)),
            1 => arcs.push((j, i)),
            _ => {
                arcs.push((i, j));
                arcs.push((j, i));
            }
        }
    }
    DirectedGraph::from_arcs(n, arcs)
}

/// Directed cycle `0 → 1 → … → n−1 → 0`.
pub fn directed_cycle(n: usize) -> Result<DirectedGraph> {
    check_size("n", n, 3)?;
    DirectedGraph::from_arcs(n, (0..n).map(|i| (i, (i + 1) % n)))
}

/// Generator description accepted from the command line and config files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GeneratorSpec {
    FlowGroups {
        #[serde(default = "defaults::groups")]
        groups: usize,
        #[serde(default = "defaults::flow_size")]
        size: usize,
        #[serde(default = "defaults::half")]
        p_intra: f64,
        #[serde(default = "defaults::half")]
        p_inter: f64,
        #[serde(default = "defaults::directed_fraction")]
        directed_fraction: f64,
        #[serde(default)]
        seed: u64,
    },
    ClusterHubs {
        #[serde(default = "defaults::hub_group_size")]
        group_size: usize,
        #[serde(default = "defaults::half")]
        p_intra: f64,
        #[serde(default = "defaults::interlinks")]
        n_interlinks: usize,
        #[serde(default = "defaults::hub_pairs")]
        hub_pairs: usize,
        #[serde(default)]
        seed: u64,
    },
    ErdosRenyiDigraph {
        n: usize,
        p: f64,
        #[serde(default)]
        seed: u64,
    },
    Tree {
        n: usize,
        #[serde(default)]
        seed: u64,
    },
    Cycle {
        n: usize,
    },
}

mod defaults {
    pub fn groups() -> usize {
        3
    }
    pub fn flow_size() -> usize {
        10
    }
    pub fn half() -> f64 {
        0.5
    }
    pub fn directed_fraction() -> f64 {
        0.9
    }
    pub fn hub_group_size() -> usize {
        14
    }
    pub fn interlinks() -> usize {
        4
    }
    pub fn hub_pairs() -> usize {
        2
    }
}

impl GeneratorSpec {
    pub fn flow_groups_default(seed: u64) -> Self {
        GeneratorSpec::FlowGroups {
            groups: 3,
            size: 10,
            p_intra: 0.5,
            p_inter: 0.5,
            directed_fraction: 0.9,
            seed,
        }
    }

    pub fn cluster_hubs_default(seed: u64) -> Self {
        GeneratorSpec::ClusterHubs {
            group_size: 14,
            p_intra: 0.5,
            n_interlinks: 4,
            hub_pairs: 2,
            seed,
        }
    }

    /// Replaces the seed, for kinds that have one.
    pub fn with_seed(mut self, new_seed: u64) -> Self {
        match &mut self {
            GeneratorSpec::FlowGroups { seed, .. }
            | GeneratorSpec::ClusterHubs { seed, .. }
            | GeneratorSpec::ErdosRenyiDigraph { seed, .. }
            | GeneratorSpec::Tree { seed, .. } => *seed = new_seed,
            GeneratorSpec::Cycle { .. } => {}
        }
        self
    }

    /// Builds the graph; labels are present for the two labeled families.
    pub fn generate(&self) -> Result<(DirectedGraph, Option<Vec<usize>>)> {
        match *self {
            GeneratorSpec::FlowGroups {
                groups,
                size,
                p_intra,
                p_inter,
                directed_fraction,
                seed,
            } => {
                let lg = gen_flow_groups(groups, size, p_intra, p_inter, directed_fraction, seed)?;
                Ok((lg.graph, Some(lg.labels)))
            }
            GeneratorSpec::ClusterHubs {
                group_size,
                p_intra,
                n_interlinks,
                hub_pairs,
                seed,
            } => {
                let lg = gen_cluster_hubs(group_size, p_intra, n_interlinks, hub_pairs, seed)?;
                Ok((lg.graph, Some(lg.labels)))
            }
            GeneratorSpec::ErdosRenyiDigraph { n, p, seed } => Ok((erdos_renyi_digraph(n, p, seed)?, None)),
            GeneratorSpec::Tree { n, seed } => Ok((random_tree(n, seed)?, None)),
            GeneratorSpec::Cycle { n } => Ok((directed_cycle(n)?, None)),
        }
    }

    /// Parses `kind[:key=value,...]`, e.g. `flow-groups:seed=3,p_inter=0.4`.
    pub fn parse_cli(text: &str) -> Result<Self> {
        let (kind, params) = text.split_once(':').unwrap_or((text, ""));
        let kind = kind.trim().replace('-', "_");
        let mut table = serde_json::Map::new();
        table.insert("kind".into(), serde_json::Value::String(kind));
        for item in params.split(',').filter(|s| !s.trim().is_empty()) {
            let (key, value) = item.split_once('=').ok_or_else(|| Error::Parse {
                line: 1,
                msg: format!("expected key=value, got `{item}`"),
            })?;
            let value: serde_json::Value = serde_json::from_str(value.trim()).map_err(|_| Error::Parse {
                line: 1,
                msg: format!("bad value for `{key}`"),
            })?;
            table.insert(key.trim().to_string(), value);
        }
        serde_json::from_value(serde_json::Value::Object(table)).map_err(|e| Error::Parse {
            line: 1,
            msg: e.to_string(),
        })
    }
}
