//! Generalized eigenproblem `L φ = λ D φ`, solved through the normalized
//! Hermitian matrix `L_N` with `φ = D^{-1/2} ψ`.
//!
//! Two routes: a dense Hermitian decomposition (the reference) and block
//! power iteration on `2I − L_N` with locking of converged vectors.

use std::ops::Range;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::laplacian::{MagneticLaplacian, SparseHermitian};

pub const DEFAULT_DENSE_LIMIT: usize = 4096;

/// Eigenvalues closer than this are reported as one degenerate cluster.
pub const DEGENERACY_GAP: f64 = 1e-8;

/// Lowest eigenpairs of `L_N`, sorted ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSystem {
    eigenvalues: Vec<f64>,
    psi: Vec<Vec<Complex64>>,
    phi: Vec<Vec<Complex64>>,
    residuals: Vec<f64>,
    clusters: Vec<Range<usize>>,
}

impl EigenSystem {
    /// Assembles a system from unit eigenvectors `ψ_k` of `L_N`.
    /// Residuals are recomputed against `normalized`.
    pub fn from_normalized_pairs(
        normalized: &SparseHermitian,
        degrees: &[f64],
        eigenvalues: Vec<f64>,
        psi: Vec<Vec<Complex64>>,
    ) -> Self {
        let inv_sqrt: Vec<f64> = degrees.iter().map(|d| 1.0 / d.sqrt()).collect();
        let phi = psi
            .iter()
            .map(|v| v.iter().zip(&inv_sqrt).map(|(x, s)| x * s).collect())
            .collect();
        let residuals = eigenvalues
            .iter()
            .zip(&psi)
            .map(|(&lambda, v)| {
                let av = normalized.mul_vec(v);
                norm(
                    &av.iter()
                        .zip(v)
                        .map(|(a, x)| a - x * lambda)
                        .collect::<Vec<_>>(),
                )
            })
            .collect();
        let clusters = degenerate_clusters(&eigenvalues);
        EigenSystem {
            eigenvalues,
            psi,
            phi,
            residuals,
            clusters,
        }
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Unit eigenvector `ψ_k` of `L_N`.
    pub fn psi(&self, k: usize) -> &[Complex64] {
        &self.psi[k]
    }

    /// Generalized eigenvector `φ_k = D^{-1/2} ψ_k`.
    pub fn phi(&self, k: usize) -> &[Complex64] {
        &self.phi[k]
    }

    /// `‖L_N ψ_k − λ_k ψ_k‖₂`.
    pub fn residuals(&self) -> &[f64] {
        &self.residuals
    }

    /// Index ranges of eigenvalues separated by less than [`DEGENERACY_GAP`].
    pub fn degenerate_clusters(&self) -> &[Range<usize>] {
        &self.clusters
    }

    pub fn is_degenerate(&self, k: usize) -> bool {
        self.clusters.iter().any(|r| r.contains(&k))
    }

    /// Copy with eigenvector `k` multiplied by `e^{iα}`.
    pub fn rotated(&self, k: usize, alpha: f64) -> EigenSystem {
        let z = Complex64::from_polar(1.0, alpha);
        let mut out = self.clone();
        for x in &mut out.psi[k] {
            *x *= z;
        }
        for x in &mut out.phi[k] {
            *x *= z;
        }
        out
    }
}

fn degenerate_clusters(values: &[f64]) -> Vec<Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for k in 1..=values.len() {
        if k == values.len() || values[k] - values[k - 1] >= DEGENERACY_GAP {
            if k - start > 1 {
                out.push(start..k);
            }
            start = k;
        }
    }
    out
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt()
}

fn dot(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

fn axpy(alpha: Complex64, x: &[Complex64], y: &mut [Complex64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn check_count(k: usize, n: usize) -> Result<()> {
    if k > n {
        Err(Error::TooManyEigenpairs { requested: k, n })
    } else {
        Ok(())
    }
}

/// All eigenvalues of `L_N`, ascending.
pub fn spectrum_dense(lap: &MagneticLaplacian) -> Result<Vec<f64>> {
    spectrum_of(&lap.normalized_matrix()?)
}

/// All eigenvalues of a sparse Hermitian matrix, ascending.
/// Real matrices take the cheaper real symmetric route.
pub fn spectrum_of(m: &SparseHermitian) -> Result<Vec<f64>> {
    let n = m.dim();
    if n > DEFAULT_DENSE_LIMIT {
        return Err(Error::DenseLimitExceeded {
            n,
            limit: DEFAULT_DENSE_LIMIT,
        });
    }
    let dense = m.to_dense();
    let mut values: Vec<f64> = if m.upper().iter().all(|e| e.2.im == 0.0) {
        DMatrix::from_fn(n, n, |i, j| dense[(i, j)].re)
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect()
    } else {
        dense.symmetric_eigenvalues().iter().copied().collect()
    };
    values.sort_by(f64::total_cmp);
    Ok(values)
}

pub fn eig_dense(lap: &MagneticLaplacian, k: usize) -> Result<EigenSystem> {
    eig_dense_with_limit(lap, k, DEFAULT_DENSE_LIMIT)
}

pub fn eig_dense_with_limit(lap: &MagneticLaplacian, k: usize, limit: usize) -> Result<EigenSystem> {
    let n = lap.dim();
    if n > limit {
        return Err(Error::DenseLimitExceeded { n, limit });
    }
    check_count(k, n)?;
    let ln = lap.normalized_matrix()?;
    let eig = SymmetricEigen::new(ln.to_dense());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]).then(a.cmp(&b)));
    let values = order[..k].iter().map(|&c| eig.eigenvalues[c]).collect();
    let vectors = order[..k]
        .iter()
        .map(|&c| eig.eigenvectors.column(c).iter().copied().collect())
        .collect();
    Ok(EigenSystem::from_normalized_pairs(&ln, lap.degrees(), values, vectors))
}

/// Real eigenpairs of a real symmetric `L_N` (the `g = 0` case), ascending.
/// Each vector is scaled so its largest-magnitude entry is positive.
pub fn eig_dense_real(lap: &MagneticLaplacian, k: usize) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = lap.dim();
    if n > DEFAULT_DENSE_LIMIT {
        return Err(Error::DenseLimitExceeded {
            n,
            limit: DEFAULT_DENSE_LIMIT,
        });
    }
    check_count(k, n)?;
    let ln = lap.normalized_matrix()?.to_dense();
    let real = DMatrix::from_fn(n, n, |i, j| ln[(i, j)].re);
    let eig = SymmetricEigen::new(real);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]).then(a.cmp(&b)));
    let values = order[..k].iter().map(|&c| eig.eigenvalues[c]).collect();
    let vectors = order[..k]
        .iter()
        .map(|&c| {
            let mut v: Vec<f64> = eig.eigenvectors.column(c).iter().copied().collect();
            let lead = v
                .iter()
                .copied()
                .fold(0.0_f64, |m, x| if x.abs() > m.abs() { x } else { m });
            if lead < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
            v
        })
        .collect();
    Ok((values, vectors))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerOptions {
    /// Residual tolerance `‖L_N ψ − λψ‖₂`.
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
    /// Guard vectors carried beyond the `k` requested.
    pub guard: usize,
}

impl Default for PowerOptions {
    fn default() -> Self {
        PowerOptions {
            tol: 1e-10,
            max_iter: 10_000,
            seed: 0x6d65_6967,
            guard: 8,
        }
    }
}

/// Orthonormalizes `v` against `basis` (two Gram–Schmidt passes).
/// Returns false if nothing is left.
fn orthonormalize_against(v: &mut [Complex64], basis: &[Vec<Complex64>]) -> bool {
    let before = norm(v);
    for _ in 0..2 {
        for u in basis {
            let c = dot(u, v);
            axpy(-c, u, v);
        }
    }
    let after = norm(v);
    if after <= 1e-10 * before.max(f64::MIN_POSITIVE) || after == 0.0 {
        return false;
    }
    v.iter_mut().for_each(|x| *x /= after);
    true
}

fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect()
}

/// Lowest `k` eigenpairs of `L_N` as the dominant eigenpairs of
/// `B = 2I − L_N` (spectrum in `[0, 2]`, so `B` is positive semi-definite).
///
/// Block power iteration with a Rayleigh–Ritz step per sweep; leading Ritz
/// pairs are locked once their residual drops below `tol`, and the active
/// block is kept orthogonal to locked vectors (deflation).
pub fn eig_iterative(lap: &MagneticLaplacian, k: usize, opts: &PowerOptions) -> Result<EigenSystem> {
    let n = lap.dim();
    check_count(k, n)?;
    let ln = lap.normalized_matrix()?;
    let apply_b = |x: &[Complex64]| -> Vec<Complex64> {
        let mut y = ln.mul_vec(x);
        for (yi, xi) in y.iter_mut().zip(x) {
            *yi = xi * 2.0 - *yi;
        }
        y
    };

    let block = n.min(k + opts.guard.max(k));
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut locked: Vec<Vec<Complex64>> = Vec::with_capacity(k);
    let mut locked_values: Vec<f64> = Vec::with_capacity(k);
    let mut active: Vec<Vec<Complex64>> = Vec::with_capacity(block);
    let mut last_residuals = Vec::new();

    let refill = |active: &mut Vec<Vec<Complex64>>,
                  locked: &[Vec<Complex64>],
                  rng: &mut ChaCha8Rng| {
        let target = block.min(n - locked.len());
        let mut attempts = 0;
        while active.len() < target && attempts < 100 * block {
            attempts += 1;
            let mut v = random_vector(rng, n);
            let mut basis: Vec<Vec<Complex64>> = locked.to_vec();
            basis.extend(active.iter().cloned());
            if orthonormalize_against(&mut v, &basis) {
                active.push(v);
            }
        }
    };

    if k == 0 {
        return Ok(EigenSystem::from_normalized_pairs(&ln, lap.degrees(), vec![], vec![]));
    }
    refill(&mut active, &locked, &mut rng);

    for _ in 0..opts.max_iter {
        // Rayleigh–Ritz on span(active).
        let images: Vec<Vec<Complex64>> = active.iter().map(|x| apply_b(x)).collect();
        let p = active.len();
        let h = DMatrix::from_fn(p, p, |a, b| {
            if a <= b {
                dot(&active[a], &images[b])
            } else {
                dot(&active[b], &images[a]).conj()
            }
        });
        let eig = SymmetricEigen::new(h);
        let mut order: Vec<usize> = (0..p).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));

        let mut ritz = Vec::with_capacity(p);
        let mut ritz_images = Vec::with_capacity(p);
        for &c in &order {
            let mut x = vec![Complex64::default(); n];
            let mut bx = vec![Complex64::default(); n];
            for a in 0..p {
                let coef = eig.eigenvectors[(a, c)];
                axpy(coef, &active[a], &mut x);
                axpy(coef, &images[a], &mut bx);
            }
            ritz.push(x);
            ritz_images.push(bx);
        }
        let mus: Vec<f64> = order.iter().map(|&c| eig.eigenvalues[c]).collect();
        let residuals: Vec<f64> = (0..p)
            .map(|c| {
                let r: Vec<Complex64> = ritz_images[c]
                    .iter()
                    .zip(&ritz[c])
                    .map(|(bx, x)| bx - x * mus[c])
                    .collect();
                norm(&r)
            })
            .collect();

        let mut consumed = 0;
        while consumed < p && locked.len() < k && residuals[consumed] <= opts.tol {
            locked.push(ritz[consumed].clone());
            locked_values.push(2.0 - mus[consumed]);
            consumed += 1;
        }
        last_residuals = residuals[consumed..].to_vec();
        if locked.len() >= k {
            break;
        }

        // Power step: the next block is B applied to the remaining Ritz vectors.
        active.clear();
        for mut v in ritz_images.into_iter().skip(consumed) {
            let mut basis = locked.clone();
            basis.extend(active.iter().cloned());
            if orthonormalize_against(&mut v, &basis) {
                active.push(v);
            }
        }
        refill(&mut active, &locked, &mut rng);
    }

    if locked.len() < k {
        return Err(Error::NoConvergence {
            achieved: locked.len(),
            requested: k,
            residuals: last_residuals,
        });
    }
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| locked_values[a].total_cmp(&locked_values[b]).then(a.cmp(&b)));
    let values = order.iter().map(|&c| locked_values[c]).collect();
    let vectors = order.iter().map(|&c| locked[c].clone()).collect();
    Ok(EigenSystem::from_normalized_pairs(&ln, lap.degrees(), values, vectors))
}

/// `(f† L f)/(f† D f)` as a complex number; the imaginary part is rounding.
pub fn rayleigh_quotient_complex(lap: &MagneticLaplacian, f: &[Complex64]) -> Result<Complex64> {
    let denom: f64 = f
        .iter()
        .zip(lap.degrees())
        .map(|(x, d)| d * x.norm_sqr())
        .sum();
    if denom == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok(lap.matrix().quadratic_form(f) / denom)
}

pub fn rayleigh_quotient(lap: &MagneticLaplacian, f: &[Complex64]) -> Result<f64> {
    rayleigh_quotient_complex(lap, f).map(|q| q.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charge::Charge;
    use crate::graph::DirectedGraph;
    use crate::laplacian::build_magnetic_laplacian;

    fn lap(g: &DirectedGraph, q: Charge) -> MagneticLaplacian {
        build_magnetic_laplacian(&g.symmetrize(), q).normalize().unwrap()
    }

    fn cycle3() -> DirectedGraph {
        DirectedGraph::from_arcs(3, [(0, 1), (1, 2), (2, 0)]).unwrap()
    }

    #[test]
    fn single_undirected_edge() {
        let g = DirectedGraph::from_arcs(2, [(0, 1), (1, 0)]).unwrap();
        let es = eig_dense(&lap(&g, Charge::ZERO), 2).unwrap();
        assert!(es.eigenvalues()[0].abs() < 1e-14);
        assert!((es.eigenvalues()[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn cycle_third_charge_has_zero_mode() {
        let es = eig_dense(&lap(&cycle3(), Charge::new(1, 3).unwrap()), 3).unwrap();
        assert!(es.eigenvalues()[0].abs() < 1e-10);
    }

    #[test]
    fn tree_spectrum_is_charge_independent() {
        let g = DirectedGraph::from_arcs(3, [(0, 1), (1, 2)]).unwrap();
        let a = spectrum_dense(&lap(&g, Charge::new(1, 4).unwrap())).unwrap();
        let b = spectrum_dense(&lap(&g, Charge::ZERO)).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn dense_limit() {
        let l = lap(&cycle3(), Charge::ZERO);
        assert!(matches!(
            eig_dense_with_limit(&l, 1, 2),
            Err(Error::DenseLimitExceeded { n: 3, limit: 2 })
        ));
        assert!(matches!(eig_dense(&l, 4), Err(Error::TooManyEigenpairs { .. })));
    }

    #[test]
    fn iterative_zero_charge_ground_state() {
        let g = DirectedGraph::from_arcs(5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 2)]).unwrap();
        let l = lap(&g, Charge::ZERO);
        let es = eig_iterative(&l, 1, &PowerOptions::default()).unwrap();
        assert!(es.eigenvalues()[0].abs() < 1e-10);
        let phi = es.phi(0);
        for x in phi {
            assert!(((x / phi[0]) - Complex64::new(1.0, 0.0)).norm() < 1e-8);
        }
    }

    #[test]
    fn iterative_matches_dense_on_cycle_half_charge() {
        let l = lap(&cycle3(), Charge::new(1, 2).unwrap());
        let it = eig_iterative(&l, 1, &PowerOptions::default()).unwrap();
        let de = eig_dense(&l, 1).unwrap();
        assert!((it.eigenvalues()[0] - de.eigenvalues()[0]).abs() < 1e-10);
    }

    #[test]
    fn iterative_reports_no_convergence() {
        let g = DirectedGraph::from_arcs(
            8,
            (0..8).map(|i| (i, (i + 1) % 8)).chain([(0, 4), (2, 6)]),
        )
        .unwrap();
        let l = lap(&g, Charge::new(1, 4).unwrap());
        let opts = PowerOptions {
            max_iter: 1,
            guard: 0,
            tol: 0.0,
            ..PowerOptions::default()
        };
        assert!(matches!(
            eig_iterative(&l, 2, &opts),
            Err(Error::NoConvergence { achieved: 0, requested: 2, .. })
        ));
    }

    #[test]
    fn rayleigh_values() {
        let g = cycle3();
        let l0 = lap(&g, Charge::ZERO);
        let ones = vec![Complex64::new(1.0, 0.0); 3];
        assert!(rayleigh_quotient(&l0, &ones).unwrap().abs() < 1e-15);
        let lq = lap(&g, Charge::new(1, 4).unwrap());
        let es = eig_dense(&lq, 1).unwrap();
        let r = rayleigh_quotient(&lq, es.phi(0)).unwrap();
        assert!((r - es.eigenvalues()[0]).abs() < 1e-12);
        assert!(matches!(
            rayleigh_quotient(&lq, &[Complex64::default(); 3]),
            Err(Error::ZeroVector)
        ));
    }

    #[test]
    fn clusters_detected() {
        assert_eq!(degenerate_clusters(&[0.0, 0.5, 0.5 + 1e-12, 1.0]), vec![1..3]);
        assert!(degenerate_clusters(&[0.0, 1.0]).is_empty());
    }
}
