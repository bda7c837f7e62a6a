//! Analytic quantities attached to the magnetic Laplacian: frustration of an
//! angle assignment, the direction-aware partition energy and its cut
//! function, exact potentials, cycle holonomies over a spanning tree, the
//! tree gauge transformation, and the upper bounds on `λ₀`.

use num_complex::Complex64;
use serde::Serialize;

use crate::charge::Charge;
use crate::eigen::{eig_dense, EigenSystem};
use crate::embedding::phase;
use crate::error::{Error, Result};
use crate::graph::{SpanningTree, SymmetrizedView};
use crate::laplacian::{build_magnetic_laplacian, transporter, MagneticLaplacian, SparseHermitian};

/// Slack below which a bound counts as violated.
pub const BOUND_TOLERANCE: f64 = 1e-8;

/// Largest graph accepted by [`exhaustive_partition_search`].
pub const EXHAUSTIVE_LIMIT: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct Frustration {
    pub value: f64,
    pub subset: Vec<usize>,
    pub theta: Vec<f64>,
}

fn check_angles(sym: &SymmetrizedView, theta: &[f64]) -> Result<()> {
    if theta.len() != sym.node_count() {
        return Err(Error::AngleLengthMismatch {
            got: theta.len(),
            expected: sym.node_count(),
        });
    }
    Ok(())
}

fn subset_mask(n: usize, subset: &[usize]) -> Result<Vec<bool>> {
    let mut mask = vec![false; n];
    for &i in subset {
        if i >= n {
            return Err(Error::SubsetOutOfRange(i));
        }
        mask[i] = true;
    }
    Ok(mask)
}

/// `Σ_{edges inside mask} w̄_ij |e^{iθ_i} − t_ij e^{iθ_j}|²`.
fn mismatch_sum(sym: &SymmetrizedView, g: Charge, theta: &[f64], mask: &[bool]) -> f64 {
    let t = transporter(sym, g);
    sym.edges()
        .enumerate()
        .filter(|(_, e)| mask[e.u] && mask[e.v])
        .map(|(k, e)| {
            let zi = Complex64::from_polar(1.0, theta[e.u]);
            let zj = Complex64::from_polar(1.0, theta[e.v]);
            e.weight * (zi - t.edge(k) * zj).norm_sqr()
        })
        .sum()
}

/// `η_S(θ) = ½ Σ_{i,j∈S} w̄_ij |e^{iθ_i} − e^{iθ_ij} e^{iθ_j}|² / vol(G)`
/// with `θ_ij = 2πg·a_ji`; the sum runs over ordered pairs.
pub fn frustration(sym: &SymmetrizedView, g: Charge, theta: &[f64], subset: &[usize]) -> Result<Frustration> {
    check_angles(sym, theta)?;
    let mask = subset_mask(sym.node_count(), subset)?;
    Ok(Frustration {
        value: mismatch_sum(sym, g, theta, &mask) / sym.volume(),
        subset: subset.to_vec(),
        theta: theta.to_vec(),
    })
}

/// Frustration over the whole vertex set.
pub fn total_frustration(sym: &SymmetrizedView, g: Charge, theta: &[f64]) -> Result<f64> {
    let all: Vec<usize> = (0..sym.node_count()).collect();
    frustration(sym, g, theta, &all).map(|f| f.value)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Synchronization {
    pub angles: Vec<f64>,
    pub frustration: f64,
    pub lambda0: f64,
}

/// Angles `phase(φ₀)` from the lowest eigenvector, with their frustration.
pub fn synchronize(sym: &SymmetrizedView, g: Charge) -> Result<Synchronization> {
    let lap = build_magnetic_laplacian(sym, g).normalize()?;
    let es = eig_dense(&lap, 1)?;
    synchronize_with(sym, g, &es)
}

pub fn synchronize_with(sym: &SymmetrizedView, g: Charge, es: &EigenSystem) -> Result<Synchronization> {
    if es.is_empty() {
        return Err(Error::IndexOutOfRange { index: 0, limit: 0 });
    }
    let angles: Vec<f64> = es.phi(0).iter().map(|&z| phase(z)).collect();
    let frustration = total_frustration(sym, g, &angles)?;
    Ok(Synchronization {
        angles,
        frustration,
        lambda0: es.eigenvalues()[0],
    })
}

/// Terms of the partition energy `E_{A,Ā}(θ*)`.
///
/// The frustration of each side is normalized by that side's volume, which
/// is the normalization under which `E` equals the Rayleigh quotient of the
/// cut function.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartitionEnergy {
    pub subset: Vec<usize>,
    pub vol_a: f64,
    pub vol_complement: f64,
    pub volume: f64,
    /// `c_{A,Ā} = Σ_{i∈A, j∈Ā} w̄_ij`.
    pub cut: f64,
    /// Frustration of `S_A` normalized by `vol(S_A)`.
    pub frustration_a: f64,
    pub frustration_complement: f64,
    /// `vol(S_Ā)/vol(G) · η_A`, ≥ 0.
    pub frustration_term_a: f64,
    /// `vol(S_A)/vol(G) · η_Ā`, ≥ 0.
    pub frustration_term_complement: f64,
    /// `c/vol(S_A) + c/vol(S_Ā)`, ≥ 0.
    pub normalized_cut_term: f64,
    /// `γ_{A,Ā} = −4 Σ_{i∈A, j∈Ā} w̄_ij sin²((θ*_i − θ*_j − θ_ij)/2)`, ≤ 0.
    pub generalized_cut: f64,
    /// `γ/vol(G)`, ≤ 0.
    pub generalized_cut_term: f64,
    pub total: f64,
}

fn partition_sides(sym: &SymmetrizedView, subset: &[usize]) -> Result<(Vec<bool>, f64, f64)> {
    let mask = subset_mask(sym.node_count(), subset)?;
    let d = sym.degrees();
    let vol_a: f64 = (0..d.len()).filter(|&i| mask[i]).map(|i| d[i]).sum();
    let vol_b: f64 = (0..d.len()).filter(|&i| !mask[i]).map(|i| d[i]).sum();
    if vol_a <= 0.0 || vol_b <= 0.0 {
        return Err(Error::EmptySide);
    }
    Ok((mask, vol_a, vol_b))
}

pub fn partition_energy(
    sym: &SymmetrizedView,
    g: Charge,
    theta_star: &[f64],
    subset: &[usize],
) -> Result<PartitionEnergy> {
    check_angles(sym, theta_star)?;
    let (mask, vol_a, vol_b) = partition_sides(sym, subset)?;
    let vol = sym.volume();
    let complement: Vec<bool> = mask.iter().map(|&m| !m).collect();
    let eta_a = mismatch_sum(sym, g, theta_star, &mask) / vol_a;
    let eta_b = mismatch_sum(sym, g, theta_star, &complement) / vol_b;

    let mut cut = 0.0;
    let mut gamma = 0.0;
    for e in sym.edges() {
        if mask[e.u] == mask[e.v] {
            continue;
        }
        let (i, j) = if mask[e.u] { (e.u, e.v) } else { (e.v, e.u) };
        // θ_ij = 2πg·a_ji
        let theta_ij = g.angle(-i64::from(sym.flow(i, j)));
        let x = (theta_star[i] - theta_star[j] - theta_ij) / 2.0;
        cut += e.weight;
        gamma += e.weight * x.sin().powi(2);
    }
    let gamma = -4.0 * gamma;

    let frustration_term_a = vol_b / vol * eta_a;
    let frustration_term_complement = vol_a / vol * eta_b;
    let normalized_cut_term = cut / vol_a + cut / vol_b;
    let generalized_cut_term = gamma / vol;
    Ok(PartitionEnergy {
        subset: (0..mask.len()).filter(|&i| mask[i]).collect(),
        vol_a,
        vol_complement: vol_b,
        volume: vol,
        cut,
        frustration_a: eta_a,
        frustration_complement: eta_b,
        frustration_term_a,
        frustration_term_complement,
        normalized_cut_term,
        generalized_cut: gamma,
        generalized_cut_term,
        total: frustration_term_a + frustration_term_complement + normalized_cut_term + generalized_cut_term,
    })
}

/// `f_i = √(vol Ā / vol A) e^{iθ*_i}` on `A`, `−√(vol A / vol Ā) e^{iθ*_i}` on `Ā`.
pub fn cut_function(sym: &SymmetrizedView, theta_star: &[f64], subset: &[usize]) -> Result<Vec<Complex64>> {
    check_angles(sym, theta_star)?;
    let (mask, vol_a, vol_b) = partition_sides(sym, subset)?;
    let in_a = (vol_b / vol_a).sqrt();
    let in_b = -(vol_a / vol_b).sqrt();
    Ok(theta_star
        .iter()
        .zip(&mask)
        .map(|(&t, &m)| Complex64::from_polar(if m { in_a } else { in_b }, t))
        .collect())
}

/// Minimizes `E_{A,Ā}` over every partition with node 0 in `A`. Cost `2^(n−1)`.
pub fn exhaustive_partition_search(
    sym: &SymmetrizedView,
    g: Charge,
    theta_star: &[f64],
) -> Result<PartitionEnergy> {
    let n = sym.node_count();
    if n > EXHAUSTIVE_LIMIT {
        return Err(Error::TooLargeForExhaustive {
            n,
            limit: EXHAUSTIVE_LIMIT,
        });
    }
    let mut best: Option<PartitionEnergy> = None;
    for bits in 0..(1u32 << (n - 1)) {
        let subset: Vec<usize> = std::iter::once(0)
            .chain((1..n).filter(|&i| bits & (1 << (i - 1)) != 0))
            .collect();
        if subset.len() == n {
            continue;
        }
        let e = match partition_energy(sym, g, theta_star, &subset) {
            Ok(e) => e,
            Err(Error::EmptySide) => continue,
            Err(err) => return Err(err),
        };
        if best.as_ref().is_none_or(|b| e.total < b.total) {
            best = Some(e);
        }
    }
    best.ok_or(Error::EmptySide)
}

/// Outcome of potential recovery.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Potential {
    /// `a_ij = h_j − h_i` on every edge (`h_0 = 0`).
    Exact { h: Vec<i64> },
    /// The first edge (in index order) where the tree potential fails, with
    /// `a_ij − (h_j − h_i)`: the flux of its fundamental cycle.
    Obstructed { edge: (usize, usize), flux: i64 },
}

impl Potential {
    pub fn exists(&self) -> bool {
        matches!(self, Potential::Exact { .. })
    }
}

/// Integer potential along the BFS tree: `P(root) = 0`, `P(c) = P(p) + a_pc`.
fn tree_potential(sym: &SymmetrizedView, tree: &SpanningTree) -> Vec<i64> {
    let mut h = vec![0i64; sym.node_count()];
    for &c in tree.bfs_order() {
        if let Some(p) = tree.parent(c) {
            h[c] = h[p] + i64::from(sym.flow(p, c));
        }
    }
    h
}

/// Searches for an integer `h` with `a_ij = h_j − h_i` on every edge.
pub fn recover_potential(sym: &SymmetrizedView) -> Result<Potential> {
    recover_potential_modulo(sym, 0)
}

/// Same as [`recover_potential`] but checks `a_ij ≡ h_j − h_i (mod m)`;
/// `m = 0` means exact integers. With `g = k/m` in lowest terms this is the
/// condition for `L^(g)` to be gauge-equivalent to the combinatorial Laplacian.
pub fn recover_potential_modulo(sym: &SymmetrizedView, m: u32) -> Result<Potential> {
    let tree = sym.spanning_tree()?;
    let h = tree_potential(sym, &tree);
    for e in sym.edges() {
        let mismatch = i64::from(e.flow) - (h[e.v] - h[e.u]);
        let bad = if m == 0 {
            mismatch != 0
        } else {
            mismatch.rem_euclid(i64::from(m)) != 0
        };
        if bad {
            return Ok(Potential::Obstructed {
                edge: (e.u, e.v),
                flux: mismatch,
            });
        }
    }
    let h = if m == 0 {
        h
    } else {
        h.into_iter().map(|x| x.rem_euclid(i64::from(m))).collect()
    };
    Ok(Potential::Exact { h })
}

/// Gauge-trivial at charge `g`: some potential modulo the denominator of `g`.
pub fn recover_potential_for_charge(sym: &SymmetrizedView, g: Charge) -> Result<Potential> {
    if g.is_zero() {
        let n = sym.node_count();
        sym.spanning_tree()?;
        return Ok(Potential::Exact { h: vec![0; n] });
    }
    recover_potential_modulo(sym, g.denominator())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CycleHolonomy {
    /// Cotree edge `(i, j)`, `i < j`; the cycle runs `i → j` then back to
    /// `i` along the tree.
    pub edge: (usize, usize),
    pub weight: f64,
    /// `∮_C a`, an integer.
    pub flux: i64,
    /// `t_C = exp(i2πg ∮_C a)`.
    pub holonomy: (f64, f64),
}

impl CycleHolonomy {
    pub fn holonomy(&self) -> Complex64 {
        Complex64::new(self.holonomy.0, self.holonomy.1)
    }
}

/// Holonomies of the fundamental cycles of one spanning tree.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HolonomyReport {
    pub cycles: Vec<CycleHolonomy>,
    /// Fundamental-cycle ε: `max |t_C − 1|` over the cotree edges.
    pub epsilon: f64,
    pub beta1: usize,
    /// `Σ_{T̄} w̄`.
    pub cotree_weight: f64,
    /// `Σ_{T̄} w̄ |1 − t_C|²`.
    pub cotree_defect: f64,
    pub edge_count: usize,
}

pub fn holonomies(sym: &SymmetrizedView, tree: &SpanningTree, g: Charge) -> HolonomyReport {
    let p = tree_potential(sym, tree);
    let mut cycles = Vec::with_capacity(tree.beta1());
    let mut epsilon: f64 = 0.0;
    let mut cotree_weight = 0.0;
    let mut cotree_defect = 0.0;
    for &k in tree.cotree_edges() {
        let e = sym.edge(k);
        let flux = p[e.u] + i64::from(e.flow) - p[e.v];
        let t = g.phasor(flux);
        let gap = (t - 1.0).norm();
        epsilon = epsilon.max(gap);
        cotree_weight += e.weight;
        cotree_defect += e.weight * gap * gap;
        cycles.push(CycleHolonomy {
            edge: (e.u, e.v),
            weight: e.weight,
            flux,
            holonomy: (t.re, t.im),
        });
    }
    HolonomyReport {
        cycles,
        epsilon,
        beta1: tree.beta1(),
        cotree_weight,
        cotree_defect,
        edge_count: sym.edge_count(),
    }
}

fn entry_lookup(m: &SparseHermitian) -> std::collections::HashMap<(usize, usize), Complex64> {
    m.upper().iter().map(|&(i, j, v)| ((i, j), v)).collect()
}

/// Diagonal unitary `U` with `U_root = 1` and `U_c = U_p · conj(t_pc)` along
/// tree edges, read off the off-diagonal entries `L_pc = −w̄ t_pc`.
pub fn tree_gauge(lap: &MagneticLaplacian, tree: &SpanningTree) -> Vec<Complex64> {
    let entries = entry_lookup(lap.matrix());
    let mut u = vec![Complex64::new(1.0, 0.0); lap.dim()];
    for &c in tree.bfs_order() {
        if let Some(p) = tree.parent(c) {
            let l_pc = if p < c {
                entries[&(p, c)]
            } else {
                entries[&(c, p)].conj()
            };
            let t_pc = -l_pc / l_pc.norm();
            u[c] = u[p] * t_pc.conj();
        }
    }
    u
}

/// `U† L U` with the tree gauge: tree entries become `−w̄`, cotree entries
/// carry the cycle holonomy.
pub fn gauge_transform(lap: &MagneticLaplacian, tree: &SpanningTree) -> MagneticLaplacian {
    let u = tree_gauge(lap, tree);
    lap.conjugate_by_diagonal(&u)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Bound {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs − lhs`; negative beyond [`BOUND_TOLERANCE`] is a violation.
    pub slack: f64,
}

impl Bound {
    fn new(name: &str, lhs: f64, rhs: f64) -> Self {
        Bound {
            name: name.to_string(),
            lhs,
            rhs,
            slack: rhs - lhs,
        }
    }

    pub fn holds(&self) -> bool {
        self.slack >= -BOUND_TOLERANCE
    }
}

/// Checks every upper bound involving `λ₀^(g)`:
///
/// - `modulus_variability`: `Σ d_i(|φ₀,i| − μ₀)² / Σ d_i|φ₀,i|² ≤ λ₀^(g)/λ₁^(0)`
/// - `lambda0_tree_rayleigh`: `λ₀ ≤ Σ_{T̄} w̄ |1 − t_C|² / vol`
/// - `lambda0_cotree`: `λ₀ ≤ ε² Σ_{T̄} w̄ / vol`
/// - `lambda0_betti`: `λ₀ ≤ ε² β₁ / (2|E|)`
/// - `lambda0_eps_half`: `λ₀ ≤ ε²/2`
pub fn bound_ledger(
    lap: &MagneticLaplacian,
    es: &EigenSystem,
    spectral_gap: f64,
    hol: &HolonomyReport,
) -> Result<Vec<Bound>> {
    if spectral_gap <= 1e-14 {
        return Err(Error::MissingSpectralGap);
    }
    if es.is_empty() {
        return Err(Error::IndexOutOfRange { index: 0, limit: 0 });
    }
    let lambda0 = es.eigenvalues()[0];
    let vol = lap.volume();
    let eps2 = hol.epsilon * hol.epsilon;
    let variability = crate::embedding::modulus_variability(es.phi(0), lap.degrees());
    let mut out = vec![
        Bound::new("modulus_variability", variability, lambda0 / spectral_gap),
        Bound::new("lambda0_tree_rayleigh", lambda0, hol.cotree_defect / vol),
        Bound::new("lambda0_cotree", lambda0, eps2 * hol.cotree_weight / vol),
    ];
    if hol.edge_count > 0 {
        out.push(Bound::new(
            "lambda0_betti",
            lambda0,
            eps2 * hol.beta1 as f64 / (2.0 * hol.edge_count as f64),
        ));
    }
    out.push(Bound::new("lambda0_eps_half", lambda0, eps2 / 2.0));
    Ok(out)
}
