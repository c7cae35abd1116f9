//! Spectral calculus for the Laplacian of a finite weighted graph.
//!
//! `L = M^{-1} A` is self-adjoint in `l^2(X, m)`. It is diagonalized through
//! the symmetric matrix `S = M^{-1/2} A M^{-1/2}`; eigenvectors of `S` are
//! mapped back by `M^{-1/2}` so that they are orthonormal for the weighted
//! inner product. Every function of `L` is then a sum over eigenpairs.

mod jacobi;
mod propagator;

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::graph::{VertexId, WeightedGraph};
use crate::operator::{dense_matrices, Compensated, DenseMatrix, RealVector, WeightedVector, DENSE_LIMIT};

pub use jacobi::jacobi_eigen;
pub use propagator::{Evaluation, Method, Propagator, SeriesConfig};

/// Relative size below which negative eigenvalues count as round-off.
pub const NEGATIVE_DUST: f64 = 1e-10;

/// Eigenvalues (ascending) and `m`-orthonormal eigenvectors of `L`.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    // column i holds u_i(x)
    vectors: DenseMatrix,
    // column i holds sqrt(m(x)) u_i(x), orthonormal in the plain inner product
    basis: DenseMatrix,
    m: Vec<f64>,
    root: Vec<f64>,
}

pub fn decompose(g: &WeightedGraph) -> Result<SpectralDecomposition> {
    decompose_with_limit(g, DENSE_LIMIT)
}

pub fn decompose_with_limit(g: &WeightedGraph, limit: usize) -> Result<SpectralDecomposition> {
    let (a, m) = dense_matrices(g, limit)?;
    let n = g.len();
    let root: Vec<f64> = m.iter().map(|v| v.sqrt()).collect();
    let mut s = DenseMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            s.set(i, j, a.get(i, j) / (root[i] * root[j]));
        }
    }
    let (values, v) = jacobi_eigen(s)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]).then(i.cmp(&j)));

    let top = order.last().map(|&i| values[i]).unwrap_or(0.0);
    let dust = NEGATIVE_DUST * top.max(1.0);
    let mut eigenvalues = Vec::with_capacity(n);
    let mut vectors = DenseMatrix::zeros(n);
    let mut basis = DenseMatrix::zeros(n);
    for (k, &i) in order.iter().enumerate() {
        let mut lambda = values[i];
        if lambda < 0.0 {
            if lambda < -dust {
                return Err(Error::NegativeSpectrum(lambda));
            }
            lambda = 0.0;
        }
        eigenvalues.push(lambda);
        for x in 0..n {
            vectors.set(x, k, v.get(x, i) / root[x]);
            basis.set(x, k, v.get(x, i));
        }
    }
    Ok(SpectralDecomposition { eigenvalues, vectors, basis, m, root })
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    /// `u_i(x)`.
    pub fn eigenvector_entry(&self, i: usize, x: VertexId) -> f64 {
        self.vectors.get(x.index(), i)
    }

    pub fn eigenvector(&self, i: usize) -> RealVector {
        RealVector::from_entries((0..self.dim()).map(|x| (VertexId::from(x), self.vectors.get(x, i))))
    }

    fn check(&self, f: &WeightedVector) -> Result<()> {
        match f.support().find(|x| x.0 < 0 || x.index() >= self.dim()) {
            Some(x) => Err(Error::UnknownVertex(x)),
            None => Ok(()),
        }
    }

    /// `<u_i, f>` for every eigenvector.
    pub fn coefficients(&self, f: &WeightedVector) -> Result<Vec<Complex64>> {
        self.check(f)?;
        Ok((0..self.dim())
            .map(|i| {
                let mut acc = Compensated::new();
                for (x, fx) in f.iter() {
                    acc.add(fx * (self.m[x.index()] * self.vectors.get(x.index(), i)));
                }
                acc.value()
            })
            .collect())
    }

    /// `<u_i, 1_x> <u_i, 1_y> = sqrt(m(x) m(y)) v_i(x) v_i(y)`, with `m(x) v_i(x)^2`
    /// on the diagonal.
    fn point_weight(&self, i: usize, x: VertexId, y: VertexId) -> f64 {
        let (x, y) = (x.index(), y.index());
        if x == y {
            self.m[x] * (self.basis.get(x, i) * self.basis.get(x, i))
        } else {
            (self.root[x] * self.root[y]) * (self.basis.get(x, i) * self.basis.get(y, i))
        }
    }

    /// `sum_i c_i u_i`.
    pub fn synthesize(&self, coeffs: &[Complex64]) -> WeightedVector {
        WeightedVector::from_entries((0..self.dim()).map(|x| {
            let mut acc = Compensated::new();
            for (i, &c) in coeffs.iter().enumerate() {
                acc.add(c * self.vectors.get(x, i));
            }
            (VertexId::from(x), acc.value())
        }))
    }

    /// `<f, Phi(L) g> = sum_i Phi(lambda_i) conj(<u_i,f>) <u_i,g>`.
    pub fn functional_calculus(&self, phi: &PhiSpec, f: &WeightedVector, g: &WeightedVector) -> Result<Complex64> {
        Ok(self.spectral_measure(f, g)?.integrate(|s| phi.eval(s)))
    }

    /// `Phi(L) f`.
    pub fn apply_function(&self, phi: impl Fn(f64) -> Complex64, f: &WeightedVector) -> Result<WeightedVector> {
        let coeffs: Vec<Complex64> = self
            .coefficients(f)?
            .into_iter()
            .zip(&self.eigenvalues)
            .map(|(c, &l)| phi(l) * c)
            .collect();
        Ok(self.synthesize(&coeffs))
    }

    /// `<1_x, Phi(L) 1_y>` directly from the eigenvector entries.
    pub fn point_element(&self, phi: impl Fn(f64) -> Complex64, x: VertexId, y: VertexId) -> Result<Complex64> {
        for v in [x, y] {
            if v.0 < 0 || v.index() >= self.dim() {
                return Err(Error::UnknownVertex(v));
            }
        }
        let mut acc = Compensated::new();
        for (i, &l) in self.eigenvalues.iter().enumerate() {
            let w = self.point_weight(i, x, y);
            if w != 0.0 {
                acc.add(phi(l) * w);
            }
        }
        Ok(acc.value())
    }

    /// `rho_{f,g}`: atoms `(lambda_i, conj(<u_i,f>) <u_i,g>)`.
    pub fn spectral_measure(&self, f: &WeightedVector, g: &WeightedVector) -> Result<SpectralMeasure> {
        let cf = self.coefficients(f)?;
        let cg = self.coefficients(g)?;
        Ok(SpectralMeasure {
            atoms: self.eigenvalues.iter().zip(cf.iter().zip(&cg)).map(|(&l, (a, b))| (l, a.conj() * b)).collect(),
        })
    }

    /// `rho_h`: atoms `(lambda_i, |<u_i,h>|^2)`.
    pub fn spectral_measure_diag(&self, h: &WeightedVector) -> Result<SpectralMeasure> {
        let ch = self.coefficients(h)?;
        Ok(SpectralMeasure {
            atoms: self.eigenvalues.iter().zip(&ch).map(|(&l, c)| (l, Complex64::new(c.norm_sqr(), 0.0))).collect(),
        })
    }

    /// `rho_{f,g}` reconstructed from the four diagonal measures
    /// `rho_{f + i^k g}`. With the inner product conjugate-linear in its
    /// first slot the phases are `i^{-k}`: `rho_{f,g} = 1/4 sum_k i^{-k} rho_{f + i^k g}`.
    pub fn polarization(&self, f: &WeightedVector, g: &WeightedVector) -> Result<SpectralMeasure> {
        self.polarize_with(f, g, -1)
    }

    /// `1/4 sum_k (i^sign)^k rho_{f + i^k g}`; `sign = +1` gives the measure
    /// for the inner product linear in its first slot, i.e. `rho_{g,f}` here.
    pub fn polarize_with(&self, f: &WeightedVector, g: &WeightedVector, sign: i32) -> Result<SpectralMeasure> {
        let i = Complex64::new(0.0, 1.0);
        let mut atoms: Vec<(f64, Complex64)> = self.eigenvalues.iter().map(|&l| (l, Complex64::new(0.0, 0.0))).collect();
        for k in 0..4 {
            let rot = i.powi(k);
            let h = f.add(&g.scale(rot));
            let phase = i.powi(sign * k) * 0.25;
            for (atom, (_, w)) in atoms.iter_mut().zip(self.spectral_measure_diag(&h)?.atoms) {
                atom.1 += phase * w;
            }
        }
        Ok(SpectralMeasure { atoms })
    }
}

/// A finitely supported measure on the spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralMeasure {
    pub atoms: Vec<(f64, Complex64)>,
}

impl SpectralMeasure {
    pub fn total_mass(&self) -> Complex64 {
        self.integrate(|_| Complex64::new(1.0, 0.0))
    }

    pub fn integrate(&self, phi: impl Fn(f64) -> Complex64) -> Complex64 {
        let mut acc = Compensated::new();
        for &(l, w) in &self.atoms {
            if w != Complex64::new(0.0, 0.0) {
                acc.add(phi(l) * w);
            }
        }
        acc.value()
    }
}

type Evaluator = dyn Fn(f64) -> Complex64 + Send + Sync;

/// A function of the operator together with the Taylor data a truncation
/// bound needs: `Phi^(n)(0)` for `n = 0..=N` and an upper bound on
/// `sup |Phi^(N+1)|`.
#[derive(Clone)]
pub struct PhiSpec {
    evaluator: Arc<Evaluator>,
    derivatives_at_zero: Vec<Complex64>,
    sup_bound_next: f64,
}

impl fmt::Debug for PhiSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PhiSpec")
            .field("derivatives_at_zero", &self.derivatives_at_zero)
            .field("sup_bound_next", &self.sup_bound_next)
            .finish_non_exhaustive()
    }
}

impl PhiSpec {
    pub fn new(
        evaluator: impl Fn(f64) -> Complex64 + Send + Sync + 'static,
        derivatives_at_zero: Vec<Complex64>,
        sup_bound_next: f64,
    ) -> Result<Self> {
        if !(sup_bound_next >= 0.0) {
            return Err(Error::Precondition(format!("sup bound {sup_bound_next} must be non-negative")));
        }
        Ok(PhiSpec { evaluator: Arc::new(evaluator), derivatives_at_zero, sup_bound_next })
    }

    /// `cos`, with derivatives `1, 0, -1, 0, ...` up to `order` and sup
    /// bound 1.
    pub fn cosine(order: usize) -> Self {
        let d = (0..=order)
            .map(|n| match n % 4 {
                0 => 1.0,
                2 => -1.0,
                _ => 0.0,
            })
            .map(|v| Complex64::new(v, 0.0))
            .collect();
        PhiSpec { evaluator: Arc::new(|s: f64| Complex64::new(s.cos(), 0.0)), derivatives_at_zero: d, sup_bound_next: 1.0 }
    }

    /// `e^{-s}` on the spectrum (`s >= 0`), derivatives `(-1)^n`, sup bound 1
    /// for its bounded extension to the whole line.
    pub fn exp_decay(order: usize) -> Self {
        let d = (0..=order).map(|n| Complex64::new(if n % 2 == 0 { 1.0 } else { -1.0 }, 0.0)).collect();
        PhiSpec { evaluator: Arc::new(|s: f64| Complex64::new((-s).exp(), 0.0)), derivatives_at_zero: d, sup_bound_next: 1.0 }
    }

    /// `e^{-i s}`, derivatives `(-i)^n`, sup bound 1.
    pub fn unitary(order: usize) -> Self {
        let mi = Complex64::new(0.0, -1.0);
        let d = (0..=order).map(|n| mi.powi(n as i32)).collect();
        PhiSpec { evaluator: Arc::new(|s: f64| Complex64::new(0.0, -s).exp()), derivatives_at_zero: d, sup_bound_next: 1.0 }
    }

    /// The polynomial `sum_k coeffs[k] s^k`, with Taylor data up to `order`.
    /// Requires `degree <= order`, so the next derivative vanishes.
    pub fn polynomial(coeffs: Vec<f64>, order: usize) -> Result<Self> {
        if coeffs.len() > order + 1 {
            return Err(Error::Precondition(format!(
                "polynomial of degree {} needs order >= its degree, got {order}",
                coeffs.len() - 1
            )));
        }
        let mut fact = 1.0;
        let d = (0..=order)
            .map(|n| {
                if n > 0 {
                    fact *= n as f64;
                }
                Complex64::new(coeffs.get(n).copied().unwrap_or(0.0) * fact, 0.0)
            })
            .collect();
        let eval = move |s: f64| Complex64::new(coeffs.iter().rev().fold(0.0, |acc, &c| acc * s + c), 0.0);
        Ok(PhiSpec { evaluator: Arc::new(eval), derivatives_at_zero: d, sup_bound_next: 0.0 })
    }

    pub fn eval(&self, s: f64) -> Complex64 {
        (self.evaluator)(s)
    }

    pub fn order(&self) -> usize {
        self.derivatives_at_zero.len().saturating_sub(1)
    }

    pub fn derivative_at_zero(&self, n: usize) -> Option<Complex64> {
        self.derivatives_at_zero.get(n).copied()
    }

    pub fn sup_bound_next(&self) -> f64 {
        self.sup_bound_next
    }
}
