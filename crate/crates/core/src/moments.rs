//! Moment matrix elements `<1_x, L^n 1_y>` and their first non-vanishing
//! order.
//!
//! Moments are computed by repeated sparse application of the Laplacian.
//! Because [`LaplacianOperator::apply`] never writes outside the 1-ball of its
//! input, `L^n 1_y` is supported in the `n`-ball around `y` and the moment is
//! exactly `0.0` for `n < d_E(x, y)`. The first non-vanishing order is found
//! with an exact-zero test, no threshold.
//!
//! [`path_sum_oracle`] evaluates the same quantity by enumerating walks
//! through matrix elements and serves as an independent check.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::graph::VertexId;
use crate::operator::{LaplacianOperator, RealVector, WeightedVector};

/// Default cap on sequences visited by [`path_sum_oracle`].
pub const PATH_SUM_BUDGET: u64 = 10_000_000;

/// Smallest `n` with `<f, L^n g> != 0`, or the search limit when none was
/// found.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VanishingOrder {
    At(usize),
    UnknownAbove(usize),
}

impl VanishingOrder {
    pub fn finite(self) -> Option<usize> {
        match self {
            VanishingOrder::At(n) => Some(n),
            VanishingOrder::UnknownAbove(_) => None,
        }
    }
}

impl fmt::Display for VanishingOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VanishingOrder::At(n) => write!(f, "{n}"),
            VanishingOrder::UnknownAbove(_) => write!(f, "INF"),
        }
    }
}

/// `<1_x, L^n 1_y>` for `n = 0..=N` together with the vanishing order.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentTable {
    pub x: VertexId,
    pub y: VertexId,
    pub values: Vec<f64>,
    pub d_l: VanishingOrder,
}

/// `<1_x, L^n 1_y>`.
pub fn moment(op: &LaplacianOperator, x: VertexId, y: VertexId, n: usize) -> Result<f64> {
    let v = op.apply_power(&RealVector::indicator(y), n)?;
    op.inner(&RealVector::indicator(x), &v)
}

/// `<1_x, L^n 1_y>` for all `n <= max_n`, sharing the sparse iterates.
pub fn moment_sequence(op: &LaplacianOperator, x: VertexId, y: VertexId, max_n: usize) -> Result<Vec<f64>> {
    let one_x = RealVector::indicator(x);
    let mut v = RealVector::indicator(y);
    let mut out = Vec::with_capacity(max_n + 1);
    out.push(op.inner(&one_x, &v)?);
    for _ in 0..max_n {
        v = op.apply(&v)?;
        out.push(op.inner(&one_x, &v)?);
    }
    Ok(out)
}

/// `<f, L^n g>` for arbitrary finitely supported vectors.
pub fn vector_moment(op: &LaplacianOperator, f: &WeightedVector, g: &WeightedVector, n: usize) -> Result<Complex64> {
    op.inner(f, &op.apply_power(g, n)?)
}

/// First `n <= max_n` with a nonzero moment.
pub fn d_l(op: &LaplacianOperator, x: VertexId, y: VertexId, max_n: usize) -> Result<VanishingOrder> {
    let one_x = RealVector::indicator(x);
    let mut v = RealVector::indicator(y);
    for n in 0..=max_n {
        if n > 0 {
            v = op.apply(&v)?;
        }
        if op.inner(&one_x, &v)? != 0.0 {
            return Ok(VanishingOrder::At(n));
        }
        if v.is_empty() {
            break;
        }
    }
    Ok(VanishingOrder::UnknownAbove(max_n))
}

pub fn moment_table(op: &LaplacianOperator, x: VertexId, y: VertexId, max_n: usize) -> Result<MomentTable> {
    let values = moment_sequence(op, x, y, max_n)?;
    let d_l = match values.iter().position(|&v| v != 0.0) {
        Some(n) => VanishingOrder::At(n),
        None => VanishingOrder::UnknownAbove(max_n),
    };
    Ok(MomentTable { x, y, values, d_l })
}

/// Result of a walk enumeration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathSum {
    pub value: f64,
    /// Sum of the absolute values of all terms; the natural scale for
    /// comparing against other evaluations.
    pub abs_sum: f64,
    pub sequences: u64,
}

/// `<1_x, L^n 1_y>` as the explicit sum over sequences
/// `x = x_0, x_1, ..., x_{n-1}, x_n = y` of
/// `e(x_0,x_1) ... e(x_{n-1},x_n) / (m(x_1) ... m(x_{n-1}))`, with
/// `e(u,v) = <1_u, L 1_v>`. Only sequences whose consecutive entries are equal
/// or adjacent contribute, so only those are enumerated.
pub fn path_sum_oracle(op: &LaplacianOperator, x: VertexId, y: VertexId, n: usize, budget: u64) -> Result<PathSum> {
    if n == 0 {
        return Err(Error::Precondition("path-sum oracle needs n >= 1".into()));
    }
    let src = op.source();
    if !src.contains(y) {
        return Err(Error::UnknownVertex(y));
    }
    let mut state = Walk { op, target: y, budget, visited: 0, value: 0.0, abs_sum: 0.0 };
    state.descend(x, n - 1, 1.0)?;
    Ok(PathSum { value: state.value, abs_sum: state.abs_sum, sequences: state.visited })
}

struct Walk<'a> {
    op: &'a LaplacianOperator,
    target: VertexId,
    budget: u64,
    visited: u64,
    value: f64,
    abs_sum: f64,
}

impl Walk<'_> {
    fn descend(&mut self, at: VertexId, remaining: usize, product: f64) -> Result<()> {
        self.visited += 1;
        if self.visited > self.budget {
            return Err(Error::EnumerationBudget(self.budget));
        }
        if remaining == 0 {
            let e = self.op.matrix_element(at, self.target)?;
            let term = product * e;
            self.value += term;
            self.abs_sum += term.abs();
            return Ok(());
        }
        let src = self.op.source();
        let mut next: Vec<VertexId> = vec![at];
        next.extend(src.neighbors(at)?.iter().map(|&(v, _)| v));
        for v in next {
            let e = self.op.matrix_element(at, v)?;
            let m = src.measure(v)?;
            self.descend(v, remaining - 1, product * e / m)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::WeightedGraph;

    fn v(i: i64) -> VertexId {
        VertexId(i)
    }

    fn path(n: usize) -> LaplacianOperator {
        let mut b = WeightedGraph::builder(n);
        for i in 0..n - 1 {
            b = b.edge(i, i + 1, 1.0);
        }
        LaplacianOperator::new(b.build().unwrap())
    }

    fn star3() -> LaplacianOperator {
        LaplacianOperator::new(
            WeightedGraph::builder(4).edge(0, 1, 1.0).edge(0, 2, 1.0).edge(0, 3, 1.0).build().unwrap(),
        )
    }

    #[test]
    fn moment_examples() {
        let p3 = path(3);
        assert_eq!(moment(&p3, v(0), v(0), 0).unwrap(), 1.0);
        assert_eq!(moment(&p3, v(0), v(2), 2).unwrap(), 1.0);
        let zero = moment(&p3, v(0), v(2), 1).unwrap();
        assert_eq!(zero.to_bits(), 0.0f64.to_bits());

        let g = WeightedGraph::builder(2).measure(1, 3.0).edge(0, 1, 1.0).build().unwrap();
        let op = LaplacianOperator::new(g);
        assert_eq!(moment(&op, v(1), v(1), 0).unwrap(), 3.0);
        assert_eq!(moment(&op, v(0), v(1), 0).unwrap(), 0.0);
    }

    #[test]
    fn path_sum_examples() {
        let p2 = path(2);
        assert_eq!(path_sum_oracle(&p2, v(0), v(1), 1, PATH_SUM_BUDGET).unwrap().value, -1.0);
        assert_eq!(path_sum_oracle(&p2, v(0), v(0), 2, PATH_SUM_BUDGET).unwrap().value, 2.0);
        assert_eq!(path_sum_oracle(&star3(), v(0), v(0), 2, PATH_SUM_BUDGET).unwrap().value, 12.0);
        assert_eq!(path_sum_oracle(&path(3), v(0), v(2), 2, PATH_SUM_BUDGET).unwrap().value, 1.0);
    }

    #[test]
    fn path_sum_budget_is_enforced() {
        assert!(matches!(
            path_sum_oracle(&star3(), v(0), v(0), 8, 100),
            Err(Error::EnumerationBudget(100))
        ));
        assert!(path_sum_oracle(&star3(), v(0), v(0), 0, 100).is_err());
    }

    #[test]
    fn vanishing_order_examples() {
        let p3 = path(3);
        assert_eq!(d_l(&p3, v(1), v(1), 0).unwrap(), VanishingOrder::At(0));
        assert_eq!(d_l(&p3, v(0), v(2), 10).unwrap(), VanishingOrder::At(2));
        let two = LaplacianOperator::new(
            WeightedGraph::builder(4).edge(0, 1, 1.0).edge(2, 3, 1.0).build().unwrap(),
        );
        assert_eq!(d_l(&two, v(0), v(3), 10).unwrap(), VanishingOrder::UnknownAbove(10));
    }

    #[test]
    fn moment_table_examples() {
        let t = moment_table(&path(2), v(0), v(1), 2).unwrap();
        assert_eq!(t.values, vec![0.0, -1.0, -2.0]);
        assert_eq!(t.d_l, VanishingOrder::At(1));

        let t = moment_table(&path(3), v(0), v(2), 3).unwrap();
        assert_eq!(t.values, vec![0.0, 0.0, 1.0, 4.0]);
        assert_eq!(t.d_l, VanishingOrder::At(2));

        let t = moment_table(&path(3), v(1), v(1), 0).unwrap();
        assert_eq!(t.values, vec![1.0]);
        assert_eq!(t.d_l, VanishingOrder::At(0));
    }

    #[test]
    fn vector_moment_is_sesquilinear() {
        let op = path(3);
        let f = WeightedVector::from_entries([(v(0), Complex64::new(0.0, 1.0))]);
        let g = WeightedVector::indicator(v(1));
        // <i 1_0, L 1_1> = conj(i) * (-1)
        assert_eq!(vector_moment(&op, &f, &g, 1).unwrap(), Complex64::new(0.0, 1.0));
    }
}
