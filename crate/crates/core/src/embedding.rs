//! Phase coordinates on the torus `[0, 2π)^m`.
//!
//! Every eigenvector is defined up to a global factor `e^{iα}`. Columns are
//! gauge-fixed so the entry of largest modulus has phase 0 (ties go to the
//! smallest node index), which makes the embedding independent of `α`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::eigen::EigenSystem;
use crate::error::{Error, Result};

/// Entries below this modulus have no meaningful phase.
pub const ZERO_MODULUS: f64 = 1e-12;

/// Relative tolerance under which two moduli count as tied for the gauge
/// reference.
const GAUGE_TIE: f64 = 1e-9;

/// Phases within this of the cut are written as exactly 0.
pub const PHASE_SNAP: f64 = 1e-13;

pub const CLUSTER_RESTARTS: usize = 50;
pub const CLUSTER_SEED: u64 = 0x7c1f_5eed;

#[derive(Debug, Clone, PartialEq)]
pub struct TorusEmbedding {
    /// `coords[i][c]`: phase of node `i` in column `c`.
    coords: Vec<Vec<f64>>,
    moduli: Vec<Vec<f64>>,
    /// Rotation `α_c` removed from each column.
    gauge: Vec<f64>,
    indices: Vec<usize>,
    /// `(node, column)` entries whose modulus is below [`ZERO_MODULUS`].
    flagged: Vec<(usize, usize)>,
    /// Eigen indices that sit inside a degenerate cluster.
    gauge_mixed: Vec<usize>,
}

/// Maps an angle to `[0, 2π)`.
pub fn wrap_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    if t >= TAU {
        0.0
    } else {
        t
    }
}

/// Phase of `z` in `[0, 2π)`.
pub fn phase(z: Complex64) -> f64 {
    wrap_angle(z.im.atan2(z.re))
}

/// Column index of the gauge reference: largest modulus, smallest index on ties.
fn gauge_reference(v: &[Complex64]) -> usize {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    v.iter()
        .position(|z| z.norm() >= max * (1.0 - GAUGE_TIE))
        .unwrap_or(0)
}

/// Gauge-fixed phases of the generalized eigenvectors `φ_k`, `k ∈ indices`.
pub fn phases(es: &EigenSystem, indices: &[usize]) -> Result<TorusEmbedding> {
    let n = if es.is_empty() { 0 } else { es.phi(0).len() };
    let m = indices.len();
    let mut coords = vec![vec![0.0; m]; n];
    let mut moduli = vec![vec![0.0; m]; n];
    let mut gauge = Vec::with_capacity(m);
    let mut flagged = Vec::new();
    let mut gauge_mixed = Vec::new();
    for (c, &k) in indices.iter().enumerate() {
        if k >= es.len() {
            return Err(Error::IndexOutOfRange {
                index: k,
                limit: es.len(),
            });
        }
        if es.is_degenerate(k) {
            log::warn!("eigenvalue {k} is degenerate; its phase coordinate is gauge-mixed");
            gauge_mixed.push(k);
        }
        let v = es.phi(k);
        let r = gauge_reference(v);
        let reference = v[r];
        gauge.push(phase(reference));
        let unit = if reference.norm() > 0.0 {
            reference.conj() / reference.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for (i, z) in v.iter().enumerate() {
            let modulus = z.norm();
            moduli[i][c] = modulus;
            if modulus < ZERO_MODULUS {
                flagged.push((i, c));
                coords[i][c] = 0.0;
            } else {
                let t = phase(z * unit);
                coords[i][c] = if i == r || circular_distance(t, 0.0) < PHASE_SNAP { 0.0 } else { t };
            }
        }
    }
    if !flagged.is_empty() {
        log::warn!("{} entries have vanishing modulus; phase set to 0", flagged.len());
    }
    Ok(TorusEmbedding {
        coords,
        moduli,
        gauge,
        indices: indices.to_vec(),
        flagged,
        gauge_mixed,
    })
}

impl TorusEmbedding {
    pub fn node_count(&self) -> usize {
        self.coords.len()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn coords(&self) -> &[Vec<f64>] {
        &self.coords
    }

    pub fn moduli(&self) -> &[Vec<f64>] {
        &self.moduli
    }

    pub fn gauge(&self) -> &[f64] {
        &self.gauge
    }

    pub fn flagged(&self) -> &[(usize, usize)] {
        &self.flagged
    }

    pub fn gauge_mixed(&self) -> &[usize] {
        &self.gauge_mixed
    }

    pub fn column_of(&self, eigen_index: usize) -> Result<usize> {
        self.indices
            .iter()
            .position(|&k| k == eigen_index)
            .ok_or(Error::IndexOutOfRange {
                index: eigen_index,
                limit: self.indices.len(),
            })
    }

    /// Phases of eigen index `k` for all nodes.
    pub fn axis(&self, eigen_index: usize) -> Result<Vec<f64>> {
        let c = self.column_of(eigen_index)?;
        Ok(self.coords.iter().map(|row| row[c]).collect())
    }

    /// Shifts every phase in column `c` by `angle` (moves the cut).
    pub fn rotate(&mut self, c: usize, angle: f64) -> Result<()> {
        if c >= self.indices.len() {
            return Err(Error::IndexOutOfRange {
                index: c,
                limit: self.indices.len(),
            });
        }
        for row in &mut self.coords {
            row[c] = wrap_angle(row[c] + angle);
        }
        Ok(())
    }

    /// Rows restricted to `nodes`.
    pub fn select_nodes(&self, nodes: &[usize]) -> TorusEmbedding {
        let mut remap = std::collections::HashMap::new();
        for (k, &i) in nodes.iter().enumerate() {
            remap.insert(i, k);
        }
        TorusEmbedding {
            coords: nodes.iter().map(|&i| self.coords[i].clone()).collect(),
            moduli: nodes.iter().map(|&i| self.moduli[i].clone()).collect(),
            gauge: self.gauge.clone(),
            indices: self.indices.clone(),
            flagged: self
                .flagged
                .iter()
                .filter_map(|&(i, c)| remap.get(&i).map(|&k| (k, c)))
                .collect(),
            gauge_mixed: self.gauge_mixed.clone(),
        }
    }
}

/// Per-axis wrap-around distance combined in the Euclidean way.
pub fn torus_distance(p: &[f64], q: &[f64]) -> f64 {
    p.iter()
        .zip(q)
        .map(|(a, b)| circular_distance(*a, *b).powi(2))
        .sum::<f64>()
        .sqrt()
}

pub fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).abs().rem_euclid(TAU);
    d.min(TAU - d)
}

/// `Σ d_i(|φ_i| − μ)² / Σ d_i|φ_i|²` with `μ = Σ d_j|φ_j| / vol`.
pub fn modulus_variability(phi: &[Complex64], degrees: &[f64]) -> f64 {
    let vol: f64 = degrees.iter().sum();
    let mu = phi.iter().zip(degrees).map(|(z, d)| d * z.norm()).sum::<f64>() / vol;
    let num: f64 = phi
        .iter()
        .zip(degrees)
        .map(|(z, d)| d * (z.norm() - mu).powi(2))
        .sum();
    let den: f64 = phi.iter().zip(degrees).map(|(z, d)| d * z.norm_sqr()).sum();
    num / den
}

fn mean_direction(angles: impl Iterator<Item = f64>) -> Option<f64> {
    let (s, c, count) = angles.fold((0.0, 0.0, 0usize), |(s, c, n), t| (s + t.sin(), c + t.cos(), n + 1));
    if count == 0 || (s == 0.0 && c == 0.0) {
        None
    } else {
        Some(wrap_angle(s.atan2(c)))
    }
}

/// Circular k-means; returns `(assignment, cost)` with cost `Σ (1 − cos(θ − center))`.
fn kmeans_once(theta: &[f64], k: usize, rng: &mut ChaCha8Rng) -> (Vec<usize>, f64) {
    let n = theta.len();
    // k-means++ seeding on the circle
    let mut centers = vec![theta[rng.random_range(0..n)]];
    while centers.len() < k {
        let weights: Vec<f64> = theta
            .iter()
            .map(|&t| {
                centers
                    .iter()
                    .map(|&c| circular_distance(t, c).powi(2))
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
        let total: f64 = weights.iter().sum();
        let next = if total <= 0.0 {
            rng.random_range(0..n)
        } else {
            let mut target = rng.random::<f64>() * total;
            let mut pick = n - 1;
            for (i, w) in weights.iter().enumerate() {
                if target < *w {
                    pick = i;
                    break;
                }
                target -= w;
            }
            pick
        };
        centers.push(theta[next]);
    }

    let mut assign = vec![usize::MAX; n];
    for _ in 0..100 {
        let mut changed = false;
        for (i, &t) in theta.iter().enumerate() {
            let best = (0..k)
                .min_by(|&a, &b| {
                    circular_distance(t, centers[a]).total_cmp(&circular_distance(t, centers[b]))
                })
                .expect("k >= 1");
            if assign[i] != best {
                assign[i] = best;
                changed = true;
            }
        }
        for (c, center) in centers.iter_mut().enumerate() {
            let members = theta.iter().zip(&assign).filter(|(_, &a)| a == c).map(|(&t, _)| t);
            if let Some(m) = mean_direction(members) {
                *center = m;
            }
        }
        if !changed {
            break;
        }
    }
    let cost = theta
        .iter()
        .zip(&assign)
        .map(|(&t, &a)| 1.0 - (t - centers[a]).cos())
        .sum();
    (assign, cost)
}

/// Best-of-`restarts` circular k-means clustering of angles.
pub fn circular_kmeans(theta: &[f64], k: usize, restarts: usize, seed: u64) -> Vec<usize> {
    if theta.is_empty() || k == 0 {
        return vec![0; theta.len()];
    }
    let k = k.min(theta.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(Vec<usize>, f64)> = None;
    for _ in 0..restarts.max(1) {
        let (assign, cost) = kmeans_once(theta, k, &mut rng);
        if best.as_ref().is_none_or(|(_, c)| cost < *c - 1e-12) {
            best = Some((assign, cost));
        }
    }
    best.expect("at least one restart").0
}

/// Fraction of nodes whose cluster's majority label matches their own.
pub fn purity(assign: &[usize], labels: &[usize]) -> f64 {
    use std::collections::BTreeMap;
    let mut table: BTreeMap<usize, BTreeMap<usize, usize>> = BTreeMap::new();
    for (&a, &l) in assign.iter().zip(labels) {
        *table.entry(a).or_default().entry(l).or_default() += 1;
    }
    let hits: usize = table
        .values()
        .map(|row| row.values().copied().max().unwrap_or(0))
        .sum();
    hits as f64 / assign.len().max(1) as f64
}

/// Purity of a circular k-means clustering of raw angles (k = #classes).
pub fn circular_purity(theta: &[f64], labels: &[usize]) -> Result<f64> {
    if theta.len() != labels.len() {
        return Err(Error::LabelMismatch {
            labels: labels.len(),
            nodes: theta.len(),
        });
    }
    let classes = labels.iter().collect::<std::collections::BTreeSet<_>>().len();
    let assign = circular_kmeans(theta, classes, CLUSTER_RESTARTS, CLUSTER_SEED);
    Ok(purity(&assign, labels))
}

/// Purity of a `k`-class circular clustering of the `eigen_index` axis.
pub fn circular_cluster_score(emb: &TorusEmbedding, labels: &[usize], eigen_index: usize) -> Result<f64> {
    if labels.len() != emb.node_count() {
        return Err(Error::LabelMismatch {
            labels: labels.len(),
            nodes: emb.node_count(),
        });
    }
    circular_purity(&emb.axis(eigen_index)?, labels)
}
