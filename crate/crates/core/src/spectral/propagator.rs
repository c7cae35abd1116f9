use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use super::{decompose, SpectralDecomposition};
use crate::error::{Error, Result};
use crate::graph::{VertexId, WeightedGraph};
use crate::operator::{Compensated, LaplacianOperator, RealVector, Scalar, WeightedVector};

/// Evaluation route for propagator matrix elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Sum over eigenpairs.
    Eigen,
    /// Truncated Taylor series in the moments.
    Series,
    /// Series when `t * lambda_max <= 1/2`, eigenpairs otherwise.
    Auto,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Eigen => "eigen",
            Method::Series => "series",
            Method::Auto => "auto",
        })
    }
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "eigen" => Ok(Method::Eigen),
            "series" => Ok(Method::Series),
            "auto" => Ok(Method::Auto),
            other => Err(format!("unknown method `{other}` (expected eigen, series or auto)")),
        }
    }
}

/// A propagator value and the route that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation<T> {
    pub value: T,
    pub method: Method,
    /// Number of series terms summed (zero for the eigen route).
    pub terms: usize,
}

/// Stopping rule for the series route.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesConfig {
    pub rel_tol: f64,
    pub abs_floor: f64,
    pub max_terms: usize,
}

impl Default for SeriesConfig {
    fn default() -> Self {
        SeriesConfig { rel_tol: 1e-17, abs_floor: 1e-300, max_terms: 2000 }
    }
}

/// Largest `t * lambda_max` for which AUTO picks the series route.
pub const AUTO_SERIES_LIMIT: f64 = 0.5;
/// Largest `t * lambda_max` for which the series route is accepted at all.
pub const SERIES_LIMIT: f64 = 2.0;

/// Heat semigroup `e^{-tL}` and unitary group `e^{-itL}` matrix elements.
///
/// The eigen route loses relative accuracy for small `t` between distant
/// vertices: the value is of order `t^d` but is assembled from eigen
/// contributions of order one. The series route sums
/// `(-t)^n <1_x, L^n 1_y> / n!` from sparse iterates, where every term below
/// order `d` is exactly zero, and stops once the remainder bound
/// `t^{K+1} (<1_x, L^{K+1} 1_x> + <1_y, L^{K+1} 1_y>) / (2 (K+1)!)` drops
/// below the tolerance.
#[derive(Debug, Clone)]
pub struct Propagator {
    op: LaplacianOperator,
    dec: Option<Arc<SpectralDecomposition>>,
    config: SeriesConfig,
}

impl Propagator {
    /// Series-only propagator (any locally finite source).
    pub fn new(op: LaplacianOperator) -> Self {
        Propagator { op, dec: None, config: SeriesConfig::default() }
    }

    pub fn with_decomposition(op: LaplacianOperator, dec: Arc<SpectralDecomposition>) -> Self {
        Propagator { op, dec: Some(dec), config: SeriesConfig::default() }
    }

    /// Decomposes a finite graph and keeps both routes available.
    pub fn for_graph(g: WeightedGraph) -> Result<Self> {
        let dec = decompose(&g)?;
        Ok(Self::with_decomposition(LaplacianOperator::new(g), Arc::new(dec)))
    }

    pub fn with_series_config(mut self, config: SeriesConfig) -> Self {
        self.config = config;
        self
    }

    pub fn operator(&self) -> &LaplacianOperator {
        &self.op
    }

    pub fn decomposition(&self) -> Option<&SpectralDecomposition> {
        self.dec.as_deref()
    }

    /// Largest eigenvalue when decomposed, otherwise the row-sum bound on a
    /// finite graph. `None` for procedural sources.
    pub fn lambda_max(&self) -> Result<Option<f64>> {
        if let Some(dec) = &self.dec {
            return Ok(Some(dec.lambda_max()));
        }
        match self.op.graph() {
            Some(g) => Ok(Some(self.op.radius_bound_over(g.vertices())?)),
            None => Ok(None),
        }
    }

    fn resolve(&self, t: f64, method: Method) -> Result<Method> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::Precondition(format!("time {t} must be finite and non-negative")));
        }
        let lambda = self.lambda_max()?;
        let scaled = lambda.map(|l| t * l);
        match method {
            Method::Eigen if self.dec.is_none() => Err(Error::NoDecomposition),
            Method::Eigen => Ok(Method::Eigen),
            Method::Series => match scaled {
                Some(s) if s > SERIES_LIMIT => Err(Error::SeriesInadmissible(s)),
                _ => Ok(Method::Series),
            },
            Method::Auto => match scaled {
                Some(s) if s <= AUTO_SERIES_LIMIT => Ok(Method::Series),
                _ if self.dec.is_some() => Ok(Method::Eigen),
                Some(s) if s > SERIES_LIMIT => Err(Error::SeriesInadmissible(s)),
                _ => Ok(Method::Series),
            },
        }
    }

    /// `<1_x, e^{-tL} 1_y>`.
    pub fn heat_element(&self, x: VertexId, y: VertexId, t: f64, method: Method) -> Result<Evaluation<f64>> {
        match self.resolve(t, method)? {
            Method::Eigen => {
                let dec = self.dec.as_ref().ok_or(Error::NoDecomposition)?;
                let value = dec.point_element(|l| Complex64::new((-t * l).exp(), 0.0), x, y)?.re;
                Ok(Evaluation { value, method: Method::Eigen, terms: 0 })
            }
            _ => {
                let (value, terms) = self.series(x, y, t, |n| if n % 2 == 0 { 1.0 } else { -1.0 })?;
                Ok(Evaluation { value, method: Method::Series, terms })
            }
        }
    }

    /// `<1_x, e^{-itL} 1_y>`.
    pub fn wave_element(&self, x: VertexId, y: VertexId, t: f64, method: Method) -> Result<Evaluation<Complex64>> {
        match self.resolve(t, method)? {
            Method::Eigen => {
                let dec = self.dec.as_ref().ok_or(Error::NoDecomposition)?;
                let value = dec.point_element(|l| Complex64::new(0.0, -t * l).exp(), x, y)?;
                Ok(Evaluation { value, method: Method::Eigen, terms: 0 })
            }
            _ => {
                let (value, terms) = self.series(x, y, t, |n| Complex64::new(0.0, -1.0).powi((n % 4) as i32))?;
                Ok(Evaluation { value, method: Method::Series, terms })
            }
        }
    }

    /// `e^{-tL} f` through the eigenpairs.
    pub fn heat_apply(&self, f: &WeightedVector, t: f64) -> Result<WeightedVector> {
        let dec = self.dec.as_ref().ok_or(Error::NoDecomposition)?;
        dec.apply_function(|l| Complex64::new((-t * l).exp(), 0.0), f)
    }

    /// `e^{-itL} f` through the eigenpairs.
    pub fn wave_apply(&self, f: &WeightedVector, t: f64) -> Result<WeightedVector> {
        let dec = self.dec.as_ref().ok_or(Error::NoDecomposition)?;
        dec.apply_function(|l| Complex64::new(0.0, -t * l).exp(), f)
    }

    /// `sum_n phase(n) t^n <1_x, L^n 1_y> / n!`, iterating the scaled vectors
    /// `(tL)^n 1_y / n!` and `(tL)^n 1_x / n!` so that nothing overflows.
    fn series<T: Scalar>(&self, x: VertexId, y: VertexId, t: f64, phase: impl Fn(usize) -> T) -> Result<(T, usize)> {
        let src = self.op.source();
        let mx = src.measure(x)?;
        let my = src.measure(y)?;
        if t == 0.0 {
            return Ok((if x == y { T::one() * mx } else { T::zero() }, 1));
        }
        let procedural = self.op.graph().is_none();
        let mut seen = BTreeSet::new();
        let mut local_bound: f64 = 0.0;

        let mut from_y = RealVector::indicator(y);
        let mut from_x = (x != y).then(|| RealVector::indicator(x));
        let mut sum = Compensated::<T>::new();
        for n in 0..self.config.max_terms {
            sum.add(phase(n) * (mx * from_y.get(x)));

            let scale = t / (n + 1) as f64;
            from_y = self.op.apply(&from_y)?.scale_real(scale);
            if let Some(v) = from_x.as_mut() {
                *v = self.op.apply(v)?.scale_real(scale);
            }
            if procedural {
                let fresh: Vec<VertexId> = from_y
                    .support()
                    .chain(from_x.iter().flat_map(|v| v.support()))
                    .filter(|v| seen.insert(*v))
                    .collect();
                local_bound = local_bound.max(self.op.radius_bound_over(fresh)?);
                if t * local_bound > SERIES_LIMIT {
                    return Err(Error::SeriesInadmissible(t * local_bound));
                }
            }

            let rx = match &from_x {
                Some(v) => mx * v.get(x),
                None => mx * from_y.get(x),
            };
            let remainder = 0.5 * (rx + my * from_y.get(y));
            let value = sum.value();
            let target = (self.config.rel_tol * value.into_complex().norm()).max(self.config.abs_floor);
            if remainder <= target {
                return Ok((value, n + 1));
            }
        }
        Err(Error::SeriesNotConverged(self.config.max_terms))
    }
}
