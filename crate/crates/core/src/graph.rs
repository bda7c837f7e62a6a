//! Directed graphs with binary weights, their symmetrization into
//! `(w̄, a)` and BFS spanning trees.

use std::collections::{BTreeMap, VecDeque};

use crate::error::{Error, Result};

/// One stored record per unordered pair `{u, v}` with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairRecord {
    pub u: usize,
    pub v: usize,
    /// Arc `u → v` present.
    pub forward: bool,
    /// Arc `v → u` present.
    pub backward: bool,
}

impl PairRecord {
    /// Symmetrized weight `(w_uv + w_vu)/2`.
    pub fn weight(&self) -> f64 {
        (u8::from(self.forward) + u8::from(self.backward)) as f64 / 2.0
    }

    /// Edge flow `a_uv = w_uv − w_vu`.
    pub fn flow(&self) -> i8 {
        i8::from(self.forward) - i8::from(self.backward)
    }
}

type Adjacency = Vec<Vec<(usize, usize)>>;

/// Directed graph with binary weights and no self-loops.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectedGraph {
    ids: Vec<String>,
    pairs: Vec<PairRecord>,
    /// Per node: `(neighbor, pair index)` sorted by neighbor.
    adjacency: Adjacency,
}

impl DirectedGraph {
    /// Nodes get ids `"0".."n-1"`. Duplicate arcs collapse.
    pub fn from_arcs<I>(n: usize, arcs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let ids = (0..n).map(|i| i.to_string()).collect();
        Self::with_ids(ids, arcs)
    }

    pub fn with_ids<I>(ids: Vec<String>, arcs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let n = ids.len();
        let mut map: BTreeMap<(usize, usize), (bool, bool)> = BTreeMap::new();
        for (i, j) in arcs {
            for index in [i, j] {
                if index >= n {
                    return Err(Error::NodeOutOfRange { index, n });
                }
            }
            if i == j {
                return Err(Error::SelfLoopNode(i));
            }
            let entry = map.entry((i.min(j), i.max(j))).or_default();
            if i < j {
                entry.0 = true;
            } else {
                entry.1 = true;
            }
        }
        let pairs: Vec<PairRecord> = map
            .into_iter()
            .map(|((u, v), (forward, backward))| PairRecord {
                u,
                v,
                forward,
                backward,
            })
            .collect();
        let adjacency = build_adjacency(n, &pairs);
        Ok(DirectedGraph {
            ids,
            pairs,
            adjacency,
        })
    }

    pub fn node_count(&self) -> usize {
        self.ids.len()
    }

    /// Number of undirected edges `|E|`.
    pub fn edge_count(&self) -> usize {
        self.pairs.len()
    }

    pub fn arc_count(&self) -> usize {
        self.pairs
            .iter()
            .map(|p| usize::from(p.forward) + usize::from(p.backward))
            .sum()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn pairs(&self) -> &[PairRecord] {
        &self.pairs
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.adjacency[i].iter().map(|&(j, _)| j)
    }

    pub fn pair_index(&self, i: usize, j: usize) -> Option<usize> {
        lookup(&self.adjacency, i, j)
    }

    pub fn has_arc(&self, i: usize, j: usize) -> bool {
        self.pair_index(i, j).is_some_and(|k| {
            let p = self.pairs[k];
            if i < j {
                p.forward
            } else {
                p.backward
            }
        })
    }

    /// All arcs `(i, j)` in pair order.
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.pairs.iter().flat_map(|p| {
            let f = p.forward.then_some((p.u, p.v));
            let b = p.backward.then_some((p.v, p.u));
            f.into_iter().chain(b)
        })
    }

    pub fn out_degree(&self, i: usize) -> usize {
        self.adjacency[i]
            .iter()
            .filter(|&&(j, _)| self.has_arc(i, j))
            .count()
    }

    pub fn in_degree(&self, i: usize) -> usize {
        self.adjacency[i]
            .iter()
            .filter(|&&(j, _)| self.has_arc(j, i))
            .count()
    }

    pub fn isolated_nodes(&self) -> Vec<usize> {
        (0..self.node_count())
            .filter(|&i| self.adjacency[i].is_empty())
            .collect()
    }

    /// True iff the undirected support is connected.
    pub fn is_connected(&self) -> bool {
        let n = self.node_count();
        n == 0 || bfs_reach(&self.adjacency, 0).iter().filter(|&&r| r).count() == n
    }

    /// Connected components of the undirected support, largest first
    /// (ties broken by smallest member).
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.node_count();
        let mut label = vec![usize::MAX; n];
        let mut comps = Vec::new();
        for start in 0..n {
            if label[start] != usize::MAX {
                continue;
            }
            let id = comps.len();
            let mut members = vec![start];
            label[start] = id;
            let mut queue = VecDeque::from([start]);
            while let Some(i) = queue.pop_front() {
                for &(j, _) in &self.adjacency[i] {
                    if label[j] == usize::MAX {
                        label[j] = id;
                        members.push(j);
                        queue.push_back(j);
                    }
                }
            }
            members.sort_unstable();
            comps.push(members);
        }
        comps.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));
        comps
    }

    /// Subgraph induced by `nodes` (kept in the given order), ids preserved.
    pub fn induced_subgraph(&self, nodes: &[usize]) -> Result<DirectedGraph> {
        let n = self.node_count();
        let mut new_index = vec![usize::MAX; n];
        for (k, &i) in nodes.iter().enumerate() {
            if i >= n {
                return Err(Error::NodeOutOfRange { index: i, n });
            }
            new_index[i] = k;
        }
        let ids = nodes.iter().map(|&i| self.ids[i].clone()).collect();
        let arcs = self
            .arcs()
            .filter(|&(i, j)| new_index[i] != usize::MAX && new_index[j] != usize::MAX)
            .map(|(i, j)| (new_index[i], new_index[j]))
            .collect::<Vec<_>>();
        DirectedGraph::with_ids(ids, arcs)
    }

    /// Same nodes with every arc flipped.
    pub fn reversed(&self) -> DirectedGraph {
        let mut g = self.clone();
        for p in &mut g.pairs {
            std::mem::swap(&mut p.forward, &mut p.backward);
        }
        g
    }

    pub fn symmetrize(&self) -> SymmetrizedView {
        let weights: Vec<f64> = self.pairs.iter().map(PairRecord::weight).collect();
        let flows: Vec<i8> = self.pairs.iter().map(PairRecord::flow).collect();
        let mut degrees = vec![0.0; self.node_count()];
        for (p, w) in self.pairs.iter().zip(&weights) {
            degrees[p.u] += w;
            degrees[p.v] += w;
        }
        let volume = degrees.iter().sum();
        SymmetrizedView {
            endpoints: self.pairs.iter().map(|p| (p.u, p.v)).collect(),
            weights,
            flows,
            degrees,
            volume,
            adjacency: self.adjacency.clone(),
        }
    }

    pub fn spanning_tree(&self) -> Result<SpanningTree> {
        SpanningTree::bfs(&self.adjacency, |k| (self.pairs[k].u, self.pairs[k].v))
    }
}

fn build_adjacency(n: usize, pairs: &[PairRecord]) -> Adjacency {
    let mut adjacency: Adjacency = vec![Vec::new(); n];
    for (k, p) in pairs.iter().enumerate() {
        adjacency[p.u].push((p.v, k));
        adjacency[p.v].push((p.u, k));
    }
    for list in &mut adjacency {
        list.sort_unstable();
    }
    adjacency
}

fn lookup(adjacency: &Adjacency, i: usize, j: usize) -> Option<usize> {
    let list = adjacency.get(i)?;
    list.binary_search_by_key(&j, |&(nb, _)| nb)
        .ok()
        .map(|pos| list[pos].1)
}

fn bfs_reach(adjacency: &Adjacency, start: usize) -> Vec<bool> {
    let mut seen = vec![false; adjacency.len()];
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(i) = queue.pop_front() {
        for &(j, _) in &adjacency[i] {
            if !seen[j] {
                seen[j] = true;
                queue.push_back(j);
            }
        }
    }
    seen
}

/// Symmetric weights `w̄`, skew-symmetric flow `a`, degrees and volume.
///
/// Edge `k` joins `endpoints[k] = (u, v)` with `u < v`; `flows[k]` is `a_uv`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetrizedView {
    endpoints: Vec<(usize, usize)>,
    weights: Vec<f64>,
    flows: Vec<i8>,
    degrees: Vec<f64>,
    volume: f64,
    adjacency: Adjacency,
}

/// One undirected edge of a [`SymmetrizedView`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymEdge {
    pub u: usize,
    pub v: usize,
    pub weight: f64,
    /// `a_uv`.
    pub flow: i8,
}

impl SymmetrizedView {
    pub fn node_count(&self) -> usize {
        self.degrees.len()
    }

    pub fn edge_count(&self) -> usize {
        self.endpoints.len()
    }

    pub fn edge(&self, k: usize) -> SymEdge {
        let (u, v) = self.endpoints[k];
        SymEdge {
            u,
            v,
            weight: self.weights[k],
            flow: self.flows[k],
        }
    }

    pub fn edges(&self) -> impl Iterator<Item = SymEdge> + '_ {
        (0..self.edge_count()).map(|k| self.edge(k))
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    pub fn edge_index(&self, i: usize, j: usize) -> Option<usize> {
        lookup(&self.adjacency, i, j)
    }

    /// `w̄_ij`, zero when `{i, j}` is not an edge.
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.edge_index(i, j).map_or(0.0, |k| self.weights[k])
    }

    /// `a_ij`, zero when `{i, j}` is not an edge.
    pub fn flow(&self, i: usize, j: usize) -> i8 {
        match self.edge_index(i, j) {
            Some(k) if i < j => self.flows[k],
            Some(k) => -self.flows[k],
            None => 0,
        }
    }

    /// Neighbors of `i` as `(j, edge index)`, sorted by `j`.
    pub fn neighbors(&self, i: usize) -> &[(usize, usize)] {
        &self.adjacency[i]
    }

    pub fn is_connected(&self) -> bool {
        let n = self.node_count();
        n == 0 || bfs_reach(&self.adjacency, 0).iter().all(|&r| r)
    }

    pub fn spanning_tree(&self) -> Result<SpanningTree> {
        SpanningTree::bfs(&self.adjacency, |k| self.endpoints[k])
    }
}

/// BFS spanning tree rooted at node 0, neighbors visited in index order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanningTree {
    parent: Vec<Option<usize>>,
    parent_edge: Vec<Option<usize>>,
    depth: Vec<usize>,
    order: Vec<usize>,
    tree_edges: Vec<usize>,
    cotree_edges: Vec<usize>,
    endpoints: Vec<(usize, usize)>,
}

impl SpanningTree {
    fn bfs(adjacency: &Adjacency, endpoint: impl Fn(usize) -> (usize, usize)) -> Result<Self> {
        let n = adjacency.len();
        let m = adjacency.iter().map(Vec::len).sum::<usize>() / 2;
        let mut parent = vec![None; n];
        let mut parent_edge = vec![None; n];
        let mut depth = vec![0; n];
        let mut seen = vec![false; n];
        let mut in_tree = vec![false; m];
        let mut order = Vec::with_capacity(n);
        if n > 0 {
            seen[0] = true;
            let mut queue = VecDeque::from([0]);
            while let Some(i) = queue.pop_front() {
                order.push(i);
                for &(j, k) in &adjacency[i] {
                    if !seen[j] {
                        seen[j] = true;
                        parent[j] = Some(i);
                        parent_edge[j] = Some(k);
                        depth[j] = depth[i] + 1;
                        in_tree[k] = true;
                        queue.push_back(j);
                    }
                }
            }
        }
        if order.len() != n {
            return Err(Error::NotConnected);
        }
        let mut tree_edges: Vec<usize> = parent_edge.iter().flatten().copied().collect();
        tree_edges.sort_unstable();
        let cotree_edges = (0..m).filter(|&k| !in_tree[k]).collect();
        Ok(SpanningTree {
            parent,
            parent_edge,
            depth,
            order,
            tree_edges,
            cotree_edges,
            endpoints: (0..m).map(endpoint).collect(),
        })
    }

    pub fn root(&self) -> usize {
        0
    }

    pub fn node_count(&self) -> usize {
        self.parent.len()
    }

    pub fn parent(&self, i: usize) -> Option<usize> {
        self.parent[i]
    }

    /// Edge index joining `i` to its parent.
    pub fn parent_edge(&self, i: usize) -> Option<usize> {
        self.parent_edge[i]
    }

    /// Nodes in BFS order (every parent precedes its children).
    pub fn bfs_order(&self) -> &[usize] {
        &self.order
    }

    /// Edge indices of tree edges, ascending.
    pub fn tree_edges(&self) -> &[usize] {
        &self.tree_edges
    }

    /// Edge indices of `T̄ = E \ T`, ascending.
    pub fn cotree_edges(&self) -> &[usize] {
        &self.cotree_edges
    }

    pub fn endpoints(&self, edge: usize) -> (usize, usize) {
        self.endpoints[edge]
    }

    /// First Betti number, `|E| − |V| + 1`.
    pub fn beta1(&self) -> usize {
        self.cotree_edges.len()
    }

    /// The unique tree path from `src` to `dst` as consecutive node pairs.
    pub fn tree_path(&self, src: usize, dst: usize) -> Vec<(usize, usize)> {
        let (mut a, mut b) = (src, dst);
        let mut up = Vec::new();
        let mut down = Vec::new();
        while self.depth[a] > self.depth[b] {
            let p = self.parent[a].expect("non-root has parent");
            up.push((a, p));
            a = p;
        }
        while self.depth[b] > self.depth[a] {
            let p = self.parent[b].expect("non-root has parent");
            down.push((p, b));
            b = p;
        }
        while a != b {
            let pa = self.parent[a].expect("non-root has parent");
            let pb = self.parent[b].expect("non-root has parent");
            up.push((a, pa));
            down.push((pb, b));
            a = pa;
            b = pb;
        }
        down.reverse();
        up.extend(down);
        up
    }
}
