//! Magnetic Laplacian `L = D − T ⊙ W̄` and its normalized form
//! `L_N = D^{-1/2} L D^{-1/2}`.
//!
//! Off-diagonal entries are stored once per undirected edge `(u, v)`, `u < v`;
//! the `(v, u)` entry is its conjugate, so Hermiticity holds by construction.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::charge::Charge;
use crate::error::{Error, Result};
use crate::graph::SymmetrizedView;

/// Sparse Hermitian matrix: real diagonal plus strictly upper entries.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseHermitian {
    diag: Vec<f64>,
    upper: Vec<(usize, usize, Complex64)>,
}

impl SparseHermitian {
    pub fn new(diag: Vec<f64>, upper: Vec<(usize, usize, Complex64)>) -> Self {
        debug_assert!(upper.iter().all(|&(i, j, _)| i < j && j < diag.len()));
        SparseHermitian { diag, upper }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    /// Strictly upper entries `(i, j, value)` with `i < j`.
    pub fn upper(&self) -> &[(usize, usize, Complex64)] {
        &self.upper
    }

    /// `y = A x`, accumulated in a fixed order.
    pub fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        for ((yi, &d), &xi) in y.iter_mut().zip(&self.diag).zip(x) {
            *yi = xi * d;
        }
        for &(i, j, v) in &self.upper {
            y[i] += v * x[j];
            y[j] += v.conj() * x[i];
        }
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![Complex64::default(); self.dim()];
        self.apply(x, &mut y);
        y
    }

    /// `x† A x`, real up to rounding.
    pub fn quadratic_form(&self, x: &[Complex64]) -> Complex64 {
        let ax = self.mul_vec(x);
        x.iter().zip(&ax).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let n = self.dim();
        let mut m = DMatrix::from_element(n, n, Complex64::default());
        for (i, &d) in self.diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(d, 0.0);
        }
        for &(i, j, v) in &self.upper {
            m[(i, j)] += v;
            m[(j, i)] += v.conj();
        }
        m
    }

    /// `U† A U` for the diagonal unitary `U = diag(u)`.
    pub fn conjugate_by_diagonal(&self, u: &[Complex64]) -> SparseHermitian {
        let upper = self
            .upper
            .iter()
            .map(|&(i, j, v)| (i, j, u[i].conj() * v * u[j]))
            .collect();
        SparseHermitian {
            diag: self.diag.clone(),
            upper,
        }
    }

    /// `S A S` for the positive diagonal `S = diag(s)`.
    fn scale_symmetric(&self, s: &[f64]) -> SparseHermitian {
        SparseHermitian {
            diag: self
                .diag
                .iter()
                .zip(s)
                .map(|(&d, &si)| d * si * si)
                .collect(),
            upper: self
                .upper
                .iter()
                .map(|&(i, j, v)| (i, j, v * (s[i] * s[j])))
                .collect(),
        }
    }
}

/// Edge transporters `t_uv = exp(i2πg·a_vu)` indexed like the view's edges.
/// `t_vu` is the conjugate.
#[derive(Debug, Clone, PartialEq)]
pub struct Transporter {
    values: Vec<Complex64>,
}

impl Transporter {
    /// `t_uv` for edge `k = (u, v)`, `u < v`.
    pub fn edge(&self, k: usize) -> Complex64 {
        self.values[k]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// `t_ij` for arbitrary orientation; `None` if `{i, j}` is not an edge.
    pub fn get(&self, sym: &SymmetrizedView, i: usize, j: usize) -> Option<Complex64> {
        sym.edge_index(i, j)
            .map(|k| if i < j { self.values[k] } else { self.values[k].conj() })
    }
}

pub fn transporter(sym: &SymmetrizedView, g: Charge) -> Transporter {
    // a_vu = −a_uv
    let values = sym.edges().map(|e| g.phasor(-i64::from(e.flow))).collect();
    Transporter { values }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MagneticLaplacian {
    charge: Charge,
    matrix: SparseHermitian,
    degrees: Vec<f64>,
    normalized: Option<SparseHermitian>,
}

pub fn build_magnetic_laplacian(sym: &SymmetrizedView, g: Charge) -> MagneticLaplacian {
    let t = transporter(sym, g);
    let upper = sym
        .edges()
        .enumerate()
        .map(|(k, e)| (e.u, e.v, -t.edge(k) * e.weight))
        .collect();
    MagneticLaplacian {
        charge: g,
        matrix: SparseHermitian::new(sym.degrees().to_vec(), upper),
        degrees: sym.degrees().to_vec(),
        normalized: None,
    }
}

impl MagneticLaplacian {
    /// Wraps an arbitrary Hermitian matrix sharing the degree matrix `D`.
    pub fn from_parts(charge: Charge, matrix: SparseHermitian, degrees: Vec<f64>) -> Self {
        MagneticLaplacian {
            charge,
            matrix,
            degrees,
            normalized: None,
        }
    }

    pub fn charge(&self) -> Charge {
        self.charge
    }

    pub fn dim(&self) -> usize {
        self.degrees.len()
    }

    pub fn matrix(&self) -> &SparseHermitian {
        &self.matrix
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    pub fn volume(&self) -> f64 {
        self.degrees.iter().sum()
    }

    pub fn normalized(&self) -> Option<&SparseHermitian> {
        self.normalized.as_ref()
    }

    /// Adds `L_N`. Fails on the first node with zero degree.
    pub fn normalize(mut self) -> Result<Self> {
        if let Some(i) = self.degrees.iter().position(|&d| d <= 0.0) {
            return Err(Error::ZeroDegree(i));
        }
        let s: Vec<f64> = self.degrees.iter().map(|d| 1.0 / d.sqrt()).collect();
        self.normalized = Some(self.matrix.scale_symmetric(&s));
        Ok(self)
    }

    /// `L_N`, computing it when absent.
    pub fn normalized_matrix(&self) -> Result<SparseHermitian> {
        match &self.normalized {
            Some(m) => Ok(m.clone()),
            None => Ok(self.clone().normalize()?.normalized.expect("just set")),
        }
    }

    /// `U† L U` for diagonal unitary `U = diag(u)`; `D` is unchanged.
    pub fn conjugate_by_diagonal(&self, u: &[Complex64]) -> MagneticLaplacian {
        let out = MagneticLaplacian {
            charge: self.charge,
            matrix: self.matrix.conjugate_by_diagonal(u),
            degrees: self.degrees.clone(),
            normalized: None,
        };
        if self.normalized.is_some() {
            out.normalize().expect("degrees already validated")
        } else {
            out
        }
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        self.matrix.to_dense()
    }
}
