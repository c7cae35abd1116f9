//! The Hilbert space `l^2(X, m)` and the graph Laplacian acting on finitely
//! supported functions.
//!
//! ```text
//! (L f)(x) = ( sum_y b(x,y) (f(x) - f(y)) + c(x) f(x) ) / m(x)
//! <f, g>   = sum_x m(x) conj(f(x)) g(x)
//! ```
//!
//! The inner product is conjugate-linear in its first argument. [`apply`]
//! only ever writes entries in the 1-ball of the input support, so
//! `<1_x, L^n 1_y>` is exactly `0.0` whenever `n` is below the combinatorial
//! distance.
//!
//! [`apply`]: LaplacianOperator::apply

use std::collections::{BTreeMap, BTreeSet};
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::graph::{GraphSource, VertexId, WeightedGraph};

/// Default vertex limit for dense matrices.
pub const DENSE_LIMIT: usize = 2000;

/// Field of values a sparse vector can hold.
pub trait Scalar:
    Copy
    + PartialEq
    + std::fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Neg<Output = Self>
    + Mul<Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn conj(self) -> Self;
    fn into_complex(self) -> Complex64;
    fn add_compensated(acc: &mut Compensated<Self>, v: Self);
}

/// Running sum with Neumaier error compensation, per real component.
#[derive(Debug, Clone, Copy)]
pub struct Compensated<T> {
    sum: T,
    err: T,
}

impl<T: Scalar> Compensated<T> {
    pub fn new() -> Self {
        Compensated { sum: T::zero(), err: T::zero() }
    }

    pub fn add(&mut self, v: T) {
        T::add_compensated(self, v);
    }

    pub fn value(&self) -> T {
        self.sum + self.err
    }
}

impl<T: Scalar> Default for Compensated<T> {
    fn default() -> Self {
        Self::new()
    }
}

fn two_sum(sum: &mut f64, err: &mut f64, v: f64) {
    let t = *sum + v;
    if sum.abs() >= v.abs() {
        *err += (*sum - t) + v;
    } else {
        *err += (v - t) + *sum;
    }
    *sum = t;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn conj(self) -> Self {
        self
    }
    fn into_complex(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
    fn add_compensated(acc: &mut Compensated<Self>, v: Self) {
        two_sum(&mut acc.sum, &mut acc.err, v);
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    fn into_complex(self) -> Complex64 {
        self
    }
    fn add_compensated(acc: &mut Compensated<Self>, v: Self) {
        two_sum(&mut acc.sum.re, &mut acc.err.re, v.re);
        two_sum(&mut acc.sum.im, &mut acc.err.im, v.im);
    }
}

/// A finitely supported function on the vertices. Entries that are exactly
/// zero are never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseVector<T> {
    entries: BTreeMap<VertexId, T>,
}

/// Complex-valued finitely supported function.
pub type WeightedVector = SparseVector<Complex64>;
/// Real-valued finitely supported function.
pub type RealVector = SparseVector<f64>;

impl<T: Scalar> Default for SparseVector<T> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<T: Scalar> SparseVector<T> {
    pub fn zero() -> Self {
        SparseVector { entries: BTreeMap::new() }
    }

    /// The point mass `1_x`.
    pub fn indicator(x: VertexId) -> Self {
        Self::from_entries([(x, T::one())])
    }

    /// Builds a vector, summing repeated ids and dropping zeros.
    pub fn from_entries(entries: impl IntoIterator<Item = (VertexId, T)>) -> Self {
        let mut v = Self::zero();
        for (x, a) in entries {
            let cur = v.get(x);
            v.set(x, cur + a);
        }
        v
    }

    pub fn get(&self, x: VertexId) -> T {
        self.entries.get(&x).copied().unwrap_or_else(T::zero)
    }

    pub fn set(&mut self, x: VertexId, value: T) {
        if value == T::zero() {
            self.entries.remove(&x);
        } else {
            self.entries.insert(x, value);
        }
    }

    pub fn support(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.entries.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (VertexId, T)> + '_ {
        self.entries.iter().map(|(&x, &v)| (x, v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn scale(&self, a: T) -> Self {
        Self::from_entries(self.iter().map(|(x, v)| (x, v * a)))
    }

    pub fn scale_real(&self, a: f64) -> Self {
        Self::from_entries(self.iter().map(|(x, v)| (x, v * a)))
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_entries(self.iter().chain(other.iter()))
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::from_entries(self.iter().chain(other.iter().map(|(x, v)| (x, -v))))
    }
}

impl RealVector {
    pub fn to_complex(&self) -> WeightedVector {
        WeightedVector::from_entries(self.iter().map(|(x, v)| (x, Complex64::new(v, 0.0))))
    }
}

impl WeightedVector {
    /// The constant function one on a finite graph.
    pub fn constant_one(g: &WeightedGraph) -> Self {
        Self::from_entries(g.vertices().map(|x| (x, Complex64::new(1.0, 0.0))))
    }
}

/// Row-major dense real matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        DenseMatrix { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n, "matrix must be square");
            m.data[i * n..(i + 1) * n].copy_from_slice(row);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }
}

/// `(A, m)` with `A[x][y] = <1_x, L 1_y>` and `m` the diagonal of `M`, so that
/// `L = M^{-1} A` in coordinates.
pub fn dense_matrices(g: &WeightedGraph, limit: usize) -> Result<(DenseMatrix, Vec<f64>)> {
    if g.len() > limit {
        return Err(Error::TooLarge { n: g.len(), limit });
    }
    let mut a = DenseMatrix::zeros(g.len());
    for x in g.vertices() {
        let mut diag = g.killing(x)?;
        for &(y, b) in g.neighbors(x)? {
            a.set(x.index(), y.index(), -b);
            diag += b;
        }
        a.set(x.index(), x.index(), diag);
    }
    Ok((a, g.measures().to_vec()))
}

/// The Laplacian of a weighted graph, acting on finitely supported functions.
#[derive(Debug, Clone)]
pub struct LaplacianOperator {
    source: GraphSource,
}

impl LaplacianOperator {
    pub fn new(source: impl Into<GraphSource>) -> Self {
        LaplacianOperator { source: source.into() }
    }

    pub fn source(&self) -> &GraphSource {
        &self.source
    }

    pub fn graph(&self) -> Option<&WeightedGraph> {
        self.source.as_finite()
    }

    /// `Lf`, supported in the 1-ball of the support of `f`.
    pub fn apply<T: Scalar>(&self, f: &SparseVector<T>) -> Result<SparseVector<T>> {
        let mut candidates = BTreeSet::new();
        for x in f.support() {
            candidates.insert(x);
            for &(y, _) in self.source.neighbors(x)?.iter() {
                candidates.insert(y);
            }
        }
        let mut out = SparseVector::zero();
        for x in candidates {
            let fx = f.get(x);
            let mut acc = Compensated::new();
            for &(y, b) in self.source.neighbors(x)?.iter() {
                acc.add((fx - f.get(y)) * b);
            }
            acc.add(fx * self.source.killing(x)?);
            out.set(x, acc.value() / self.source.measure(x)?);
        }
        Ok(out)
    }

    /// `L^n f` by `n` sparse applications.
    pub fn apply_power<T: Scalar>(&self, f: &SparseVector<T>, n: usize) -> Result<SparseVector<T>> {
        let mut v = f.clone();
        for _ in 0..n {
            v = self.apply(&v)?;
        }
        Ok(v)
    }

    /// `<f, g> = sum_x m(x) conj(f(x)) g(x)`.
    pub fn inner<T: Scalar>(&self, f: &SparseVector<T>, g: &SparseVector<T>) -> Result<T> {
        let (small, large, flip) = if f.len() <= g.len() { (f, g, false) } else { (g, f, true) };
        let mut acc = Compensated::new();
        for (x, a) in small.iter() {
            let m = self.source.measure(x)?;
            let b = large.get(x);
            if b == T::zero() {
                continue;
            }
            let term = if flip { b.conj() * a } else { a.conj() * b };
            acc.add(term * m);
        }
        for x in large.support() {
            if !self.source.contains(x) {
                return Err(Error::UnknownVertex(x));
            }
        }
        Ok(acc.value())
    }

    pub fn norm<T: Scalar>(&self, f: &SparseVector<T>) -> Result<f64> {
        Ok(self.inner(f, f)?.into_complex().re.max(0.0).sqrt())
    }

    /// `<1_x, L 1_y>`: `-b(x,y)` off the diagonal, `sum_z b(x,z) + c(x)` on it.
    pub fn matrix_element(&self, x: VertexId, y: VertexId) -> Result<f64> {
        if x != y {
            return Ok(-self.source.weight(x, y)?);
        }
        let mut sum = self.source.killing(x)?;
        for &(_, b) in self.source.neighbors(x)?.iter() {
            sum += b;
        }
        Ok(sum)
    }

    /// `Q(f, h) = 1/2 sum_{x,y} b(x,y) (f(x)-f(y)) conj(h(x)-h(y)) + sum_x c(x) f(x) conj(h(x))`.
    ///
    /// Linear in `f`, conjugate-linear in `h`, so `Q(f, h) = <h, L f>` under
    /// the inner-product convention of this module.
    pub fn quadratic_form(&self, f: &WeightedVector, h: &WeightedVector) -> Result<Complex64> {
        let support: BTreeSet<VertexId> = f.support().chain(h.support()).collect();
        let mut inside = Compensated::new();
        let mut boundary = Compensated::new();
        let mut killing = Compensated::new();
        for &x in &support {
            let (fx, hx) = (f.get(x), h.get(x));
            for &(y, b) in self.source.neighbors(x)?.iter() {
                let term = (fx - f.get(y)) * (hx - h.get(y)).conj() * b;
                if support.contains(&y) {
                    inside.add(term);
                } else {
                    boundary.add(term);
                }
            }
            killing.add(fx * hx.conj() * self.source.killing(x)?);
        }
        Ok(inside.value() * 0.5 + boundary.value() + killing.value())
    }

    /// Row-sum bound on the spectral radius of `L` over the given vertices:
    /// `max_x (2 sum_z b(x,z) + c(x)) / m(x)`.
    pub fn radius_bound_over(&self, vertices: impl IntoIterator<Item = VertexId>) -> Result<f64> {
        let mut bound: f64 = 0.0;
        for x in vertices {
            let sum: f64 = self.source.neighbors(x)?.iter().map(|&(_, b)| b).sum();
            bound = bound.max((2.0 * sum + self.source.killing(x)?) / self.source.measure(x)?);
        }
        Ok(bound)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn v(i: i64) -> VertexId {
        VertexId(i)
    }

    fn p2() -> LaplacianOperator {
        LaplacianOperator::new(WeightedGraph::builder(2).edge(0, 1, 1.0).build().unwrap())
    }

    #[test]
    fn inner_examples() {
        let g = WeightedGraph::builder(2).measure(0, 2.0).edge(0, 1, 1.0).build().unwrap();
        let op = LaplacianOperator::new(g);
        let one0 = WeightedVector::indicator(v(0));
        let one1 = WeightedVector::indicator(v(1));
        assert_eq!(op.inner(&one0, &one0).unwrap(), c(2.0, 0.0));
        assert_eq!(op.inner(&one0, &one1).unwrap(), c(0.0, 0.0));
        let f = one0.scale(c(0.0, 1.0));
        assert_eq!(op.inner(&f, &one0).unwrap(), c(0.0, -2.0));
        let stray = WeightedVector::indicator(v(7));
        assert!(matches!(op.inner(&one0, &stray), Err(Error::UnknownVertex(_))));
    }

    #[test]
    fn apply_examples() {
        let op = p2();
        let out = op.apply(&RealVector::indicator(v(0))).unwrap();
        assert_eq!(out, RealVector::from_entries([(v(0), 1.0), (v(1), -1.0)]));

        let iso = LaplacianOperator::new(WeightedGraph::builder(1).killing(0, 5.0).build().unwrap());
        let out = iso.apply(&RealVector::indicator(v(0))).unwrap();
        assert_eq!(out, RealVector::indicator(v(0)).scale(5.0));

        assert!(op.apply(&RealVector::zero()).unwrap().is_empty());
    }

    #[test]
    fn apply_drops_cancelled_entries() {
        // L applied to the constant function on P2 vanishes identically
        let op = p2();
        let ones = RealVector::from_entries([(v(0), 1.0), (v(1), 1.0)]);
        assert!(op.apply(&ones).unwrap().is_empty());
    }

    #[test]
    fn matrix_elements() {
        let op = p2();
        assert_eq!(op.matrix_element(v(0), v(1)).unwrap(), -1.0);
        assert_eq!(op.matrix_element(v(0), v(0)).unwrap(), 1.0);
        let p3 = LaplacianOperator::new(
            WeightedGraph::builder(3).edge(0, 1, 1.0).edge(1, 2, 1.0).build().unwrap(),
        );
        assert_eq!(p3.matrix_element(v(0), v(2)).unwrap(), 0.0);
        assert!(p3.matrix_element(v(0), v(3)).is_err());
    }

    #[test]
    fn quadratic_form_examples() {
        let g = WeightedGraph::builder(3)
            .edge(0, 1, 2.0)
            .edge(0, 2, 0.5)
            .killing(0, 0.25)
            .killing(2, 1.5)
            .measure(1, 3.0)
            .build()
            .unwrap();
        let op = LaplacianOperator::new(g.clone());
        let one0 = WeightedVector::indicator(v(0));
        assert_eq!(op.quadratic_form(&one0, &one0).unwrap(), c(2.75, 0.0));
        let ones = WeightedVector::constant_one(&g);
        assert_eq!(op.quadratic_form(&ones, &ones).unwrap(), c(1.75, 0.0));
    }

    #[test]
    fn dense_examples() {
        let (a, m) = dense_matrices(p2().graph().unwrap(), DENSE_LIMIT).unwrap();
        assert_eq!(a, DenseMatrix::from_rows(&[vec![1.0, -1.0], vec![-1.0, 1.0]]));
        assert_eq!(m, vec![1.0, 1.0]);

        let single = WeightedGraph::builder(1).killing(0, 3.0).measure(0, 2.0).build().unwrap();
        let (a, m) = dense_matrices(&single, DENSE_LIMIT).unwrap();
        assert_eq!((a.get(0, 0), m[0]), (3.0, 2.0));

        let empty = WeightedGraph::builder(3).build().unwrap();
        assert_eq!(dense_matrices(&empty, DENSE_LIMIT).unwrap().0, DenseMatrix::zeros(3));
        assert!(matches!(dense_matrices(&empty, 2), Err(Error::TooLarge { n: 3, limit: 2 })));
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut acc = Compensated::<f64>::new();
        for v in [1e16, 1.0, -1e16, 1.0] {
            acc.add(v);
        }
        assert_eq!(acc.value(), 2.0);
    }
}
