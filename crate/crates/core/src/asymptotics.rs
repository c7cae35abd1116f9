//! Short-time bounds for the heat semigroup and unitary group, checked
//! numerically.
//!
//! Every check produces a [`BoundReport`] holding both sides of one
//! inequality. The inequalities are theorems, so a failed report on valid
//! input means an implementation bug, not a property of the graph.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::graph::{Distance, VertexId};
use crate::moments::{d_l, moment, vector_moment, VanishingOrder};
use crate::operator::WeightedVector;
use crate::spectral::{Method, PhiSpec, Propagator};

/// Relative slack allowed when comparing the two sides of a bound.
pub const REL_SLACK: f64 = 1e-9;
/// Absolute slack allowed when comparing the two sides of a bound.
pub const ABS_SLACK: f64 = 1e-300;
/// Values at or below this are treated as underflow by the exponent fit.
pub const UNDERFLOW_FLOOR: f64 = 1e-280;

/// Which inequality a report certifies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundKind {
    /// Taylor expansion of a general `Phi(L)`.
    Prop1,
    /// `|<1_x, e^{-tL} 1_y> - (-t)^n M_n / n!|`.
    Semigroup,
    /// `|<1_x, e^{-itL} 1_y> - (-it)^n M_n / n!|`.
    Unitary,
    /// `|<1_x, e^{-tL} 1_y> - t^d |M_d| / d!|`.
    TheoremHeat,
    /// `||<1_x, e^{-itL} 1_y>| - t^d |M_d| / d!|`.
    TheoremWave,
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundKind::Prop1 => "PROP1",
            BoundKind::Semigroup => "SEMIGROUP",
            BoundKind::Unitary => "UNITARY",
            BoundKind::TheoremHeat => "THEOREM_HEAT",
            BoundKind::TheoremWave => "THEOREM_WAVE",
        })
    }
}

/// One evaluated inequality `lhs <= rhs`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    pub which: BoundKind,
    pub x: Option<VertexId>,
    pub y: Option<VertexId>,
    pub d: Option<Distance>,
    pub t: f64,
    pub n: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub passed: bool,
}

impl BoundReport {
    pub fn new(which: BoundKind, x: Option<VertexId>, y: Option<VertexId>, t: f64, n: usize, lhs: f64, rhs: f64) -> Self {
        BoundReport {
            which,
            x,
            y,
            d: None,
            t,
            n,
            lhs,
            rhs,
            margin: rhs - lhs,
            passed: lhs <= rhs * (1.0 + REL_SLACK) + ABS_SLACK,
        }
    }

    pub fn with_distance(mut self, d: Distance) -> Self {
        self.d = Some(d);
        self
    }
}

/// `t^n / n!`, accumulated as a product so it neither overflows nor loses
/// precision for moderate `n`.
pub fn taylor_weight(t: f64, n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * t / k as f64)
}

fn pair_constant(prop: &Propagator, x: VertexId, y: VertexId, n: usize) -> Result<f64> {
    let op = prop.operator();
    Ok(0.5 * (moment(op, x, x, n)? + moment(op, y, y, n)?))
}

/// Taylor bound for an arbitrary `Phi`:
///
/// ```text
/// |<f, Phi(L) g> - sum_{n<=N} Phi^(n)(0)/n! <f, L^n g>|
///     <= sup|Phi^(N+1)| / (N+1)! * (<f, L^{N+1} f> + <g, L^{N+1} g>) / 2
/// ```
///
/// The left side is `|rho_{f,g}(R_N)|` with the remainder
/// `R_N(s) = Phi(s) - sum_{n<=N} Phi^(n)(0) s^n / n!` evaluated per eigenvalue,
/// so it vanishes exactly where `R_N` does. The right side uses sparse
/// moments. `|L| = L` since `L >= 0`.
pub fn prop1_bound(prop: &Propagator, phi: &PhiSpec, f: &WeightedVector, g: &WeightedVector, order: usize) -> Result<BoundReport> {
    let dec = prop.decomposition().ok_or(Error::NoDecomposition)?;
    let op = prop.operator();
    if phi.order() < order {
        return Err(Error::Precondition(format!(
            "Taylor data up to order {order} required, function provides {}",
            phi.order()
        )));
    }
    let coeffs: Vec<Complex64> = (0..=order)
        .map(|n| phi.derivative_at_zero(n).expect("order checked") * taylor_weight(1.0, n))
        .collect();
    let remainder = |s: f64| {
        let mut taylor = Complex64::new(0.0, 0.0);
        for c in coeffs.iter().rev() {
            taylor = taylor * s + c;
        }
        phi.eval(s) - taylor
    };
    let lhs = dec.spectral_measure(f, g)?.integrate(remainder).norm();
    let ff = vector_moment(op, f, f, order + 1)?.re;
    let gg = vector_moment(op, g, g, order + 1)?.re;
    let rhs = phi.sup_bound_next() * taylor_weight(1.0, order + 1) * 0.5 * (ff + gg);
    Ok(BoundReport::new(BoundKind::Prop1, None, None, 1.0, order, lhs, rhs))
}

fn check_order(prop: &Propagator, x: VertexId, y: VertexId, n: usize) -> Result<Option<Distance>> {
    match d_l(prop.operator(), x, y, n)? {
        VanishingOrder::At(k) if k < n => Err(Error::Precondition(format!(
            "order {n} exceeds the first non-vanishing moment order {k} of ({x},{y})"
        ))),
        VanishingOrder::At(k) => Ok(Some(Distance::Finite(k))),
        VanishingOrder::UnknownAbove(_) => Ok(None),
    }
}

/// `|<1_x, e^{-tL} 1_y> - (-t)^n M_n / n!| <= t^{n+1} (M^x_{n+1} + M^y_{n+1}) / (2 (n+1)!)`
/// for `n` not above the first non-vanishing moment order.
pub fn semigroup_bound(prop: &Propagator, x: VertexId, y: VertexId, t: f64, n: usize) -> Result<BoundReport> {
    let d = check_order(prop, x, y, n)?;
    let heat = prop.heat_element(x, y, t, Method::Auto)?.value;
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    let approx = sign * taylor_weight(t, n) * moment(prop.operator(), x, y, n)?;
    let rhs = taylor_weight(t, n + 1) * pair_constant(prop, x, y, n + 1)?;
    let mut r = BoundReport::new(BoundKind::Semigroup, Some(x), Some(y), t, n, (heat - approx).abs(), rhs);
    r.d = d;
    Ok(r)
}

/// The unitary-group analogue of [`semigroup_bound`], with `(-it)^n`.
pub fn unitary_bound(prop: &Propagator, x: VertexId, y: VertexId, t: f64, n: usize) -> Result<BoundReport> {
    let d = check_order(prop, x, y, n)?;
    let wave = prop.wave_element(x, y, t, Method::Auto)?.value;
    let phase = Complex64::new(0.0, -1.0).powi((n % 4) as i32);
    let approx = phase * (taylor_weight(t, n) * moment(prop.operator(), x, y, n)?);
    let rhs = taylor_weight(t, n + 1) * pair_constant(prop, x, y, n + 1)?;
    let mut r = BoundReport::new(BoundKind::Unitary, Some(x), Some(y), t, n, (wave - approx).norm(), rhs);
    r.d = d;
    Ok(r)
}

/// Both leading-order estimates for a connected pair at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoremCheck {
    pub d: usize,
    /// `|<1_x, L^d 1_y>| / d!`.
    pub leading_coefficient: f64,
    /// `C(x,y) = (<1_x, L^{d+1} 1_x> + <1_y, L^{d+1} 1_y>) / (2 (d+1)!)`.
    pub constant: f64,
    pub heat: BoundReport,
    pub wave: BoundReport,
}

/// Checks
///
/// ```text
/// | <1_x, e^{-tL} 1_y>  - t^d |M_d| / d! | <= t^{d+1} C(x,y)
/// ||<1_x, e^{-itL} 1_y>| - t^d |M_d| / d! | <= t^{d+1} C(x,y)
/// ```
///
/// with `d` the combinatorial distance. For `x = y` this is the `d = 0` case
/// with leading term `m(x)`.
pub fn theorem_check(prop: &Propagator, x: VertexId, y: VertexId, t: f64) -> Result<TheoremCheck> {
    theorem_check_with_cutoff(prop, x, y, t, None)
}

pub fn theorem_check_with_cutoff(prop: &Propagator, x: VertexId, y: VertexId, t: f64, cutoff: Option<usize>) -> Result<TheoremCheck> {
    let op = prop.operator();
    let d = match op.source().combinatorial_distance(x, y, cutoff)? {
        Distance::Finite(d) => d,
        Distance::Infinite => return Err(Error::Disconnected(x, y)),
    };
    let md = moment(op, x, y, d)?;
    if md == 0.0 {
        return Err(Error::Precondition(format!("moment of order {d} vanishes for ({x},{y})")));
    }
    let diagonal = pair_constant(prop, x, y, d + 1)?;
    let leading_coefficient = md.abs() * taylor_weight(1.0, d);
    let constant = taylor_weight(1.0, d + 1) * diagonal;
    let leading = taylor_weight(t, d) * md.abs();
    let rhs = taylor_weight(t, d + 1) * diagonal;
    let heat = prop.heat_element(x, y, t, Method::Auto)?.value;
    let wave = prop.wave_element(x, y, t, Method::Auto)?.value;
    let dist = Distance::Finite(d);
    Ok(TheoremCheck {
        d,
        leading_coefficient,
        constant,
        heat: BoundReport::new(BoundKind::TheoremHeat, Some(x), Some(y), t, d, (heat - leading).abs(), rhs).with_distance(dist),
        wave: BoundReport::new(BoundKind::TheoremWave, Some(x), Some(y), t, d, (wave.norm() - leading).abs(), rhs)
            .with_distance(dist),
    })
}

/// Which propagator the exponent is fitted for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Group {
    Heat,
    Wave,
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Group::Heat => "heat",
            Group::Wave => "wave",
        })
    }
}

impl std::str::FromStr for Group {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "heat" => Ok(Group::Heat),
            "wave" => Ok(Group::Wave),
            other => Err(format!("unknown group `{other}` (expected heat or wave)")),
        }
    }
}

/// Geometric time grid `t_k = t0 * ratio^k`, `k = 0..count`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub t0: f64,
    pub ratio: f64,
    pub count: usize,
}

impl Default for TimeGrid {
    fn default() -> Self {
        TimeGrid { t0: 1e-3, ratio: 0.1, count: 4 }
    }
}

impl TimeGrid {
    pub fn validate(&self) -> Result<()> {
        if !(self.t0 > 0.0 && self.t0.is_finite()) {
            return Err(Error::Precondition(format!("t0 = {} must be positive", self.t0)));
        }
        if !(self.ratio > 0.0 && self.ratio < 1.0) {
            return Err(Error::Precondition(format!("ratio = {} must lie in (0, 1)", self.ratio)));
        }
        if self.count < 3 {
            return Err(Error::Precondition(format!("count = {} must be at least 3", self.count)));
        }
        Ok(())
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.count).map(|k| self.t0 * self.ratio.powi(k as i32)).collect()
    }
}

/// Least-squares fit of `log |element|` against `log t`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentFit {
    pub x: VertexId,
    pub y: VertexId,
    pub group: Group,
    pub d_e: usize,
    pub t_grid: Vec<f64>,
    pub log_values: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    pub max_residual: f64,
}

impl ExponentFit {
    pub fn abs_error(&self) -> f64 {
        (self.slope - self.d_e as f64).abs()
    }
}

/// Ordinary least squares `y = slope * x + intercept`; returns
/// `(slope, intercept, max |residual|)`.
pub fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let max_residual = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - slope * x - intercept).abs())
        .fold(0.0, f64::max);
    (slope, intercept, max_residual)
}

/// Estimates the short-time exponent of `|<1_x, P_t 1_y>|`; the slope tends
/// to the combinatorial distance. The grid must satisfy
/// `t0 * lambda_max <= 1/2` so every point is evaluated by the series.
pub fn leading_exponent(prop: &Propagator, x: VertexId, y: VertexId, grid: TimeGrid, group: Group) -> Result<ExponentFit> {
    leading_exponent_with_cutoff(prop, x, y, grid, group, None)
}

pub fn leading_exponent_with_cutoff(
    prop: &Propagator,
    x: VertexId,
    y: VertexId,
    grid: TimeGrid,
    group: Group,
    cutoff: Option<usize>,
) -> Result<ExponentFit> {
    grid.validate()?;
    let d_e = match prop.operator().source().combinatorial_distance(x, y, cutoff)? {
        Distance::Finite(d) => d,
        Distance::Infinite => return Err(Error::Disconnected(x, y)),
    };
    if let Some(l) = prop.lambda_max()? {
        if grid.t0 * l > 0.5 {
            return Err(Error::Precondition(format!(
                "t0 * lambda_max = {} exceeds 1/2; shrink t0",
                grid.t0 * l
            )));
        }
    }
    let times = grid.times();
    let mut log_t = Vec::with_capacity(times.len());
    let mut log_values = Vec::with_capacity(times.len());
    for &t in &times {
        let value = match group {
            Group::Heat => prop.heat_element(x, y, t, Method::Series)?.value.abs(),
            Group::Wave => prop.wave_element(x, y, t, Method::Series)?.value.norm(),
        };
        if value <= UNDERFLOW_FLOOR {
            return Err(Error::Underflow { collected: log_values.len(), requested: grid.count });
        }
        log_t.push(t.ln());
        log_values.push(value.ln());
    }
    let (slope, intercept, max_residual) = least_squares(&log_t, &log_values);
    Ok(ExponentFit { x, y, group, d_e, t_grid: times, log_values, slope, intercept, max_residual })
}

/// Outcome of the vanishing-order check for a pair whose moments all vanish.
#[derive(Debug, Clone, PartialEq)]
pub struct VanishingCheck {
    pub holds: bool,
    /// `C_k = (<1_x, L^{k+1} 1_x> + <1_y, L^{k+1} 1_y>) / (2 (k+1)!)`, `k = 0..=n`.
    pub constants: Vec<f64>,
    pub max_abs_heat: f64,
    pub max_abs_wave: f64,
}

/// For a pair with `<1_x, L^k 1_y> = 0` for all `k <= n`, checks
/// `|<1_x, e^{-tL} 1_y>|, |<1_x, e^{-itL} 1_y>| <= C_k t^{k+1}` for every
/// `k <= n` at each sample time.
pub fn vanishing_order_check(prop: &Propagator, x: VertexId, y: VertexId, n: usize, t_samples: &[f64], method: Method) -> Result<VanishingCheck> {
    if let VanishingOrder::At(k) = d_l(prop.operator(), x, y, n)? {
        return Err(Error::Precondition(format!("moment of order {k} of ({x},{y}) is nonzero")));
    }
    let constants = (0..=n)
        .map(|k| Ok(taylor_weight(1.0, k + 1) * pair_constant(prop, x, y, k + 1)?))
        .collect::<Result<Vec<f64>>>()?;
    let mut holds = true;
    let (mut max_abs_heat, mut max_abs_wave) = (0.0f64, 0.0f64);
    for &t in t_samples {
        let heat = prop.heat_element(x, y, t, method)?.value.abs();
        let wave = prop.wave_element(x, y, t, method)?.value.norm();
        max_abs_heat = max_abs_heat.max(heat);
        max_abs_wave = max_abs_wave.max(wave);
        for (k, &c) in constants.iter().enumerate() {
            let bound = c * t.powi(k as i32 + 1);
            let ok = |v: f64| v <= bound * (1.0 + REL_SLACK) + ABS_SLACK;
            holds &= ok(heat) && ok(wave);
        }
    }
    Ok(VanishingCheck { holds, constants, max_abs_heat, max_abs_wave })
}

/// `(t, t log p_t(x,y))` on the grid. On graphs this tends to zero rather
/// than to a negative multiple of a squared distance.
pub fn varadhan_diagnostic(prop: &Propagator, x: VertexId, y: VertexId, t_grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    if x == y {
        return Err(Error::Precondition("diagnostic needs distinct vertices".into()));
    }
    t_grid
        .iter()
        .map(|&t| {
            let p = prop.heat_element(x, y, t, Method::Auto)?.value;
            if !(p > 0.0) {
                return Err(Error::Precondition(format!("heat kernel {p} at t = {t} is not positive")));
            }
            Ok((t, t * p.ln()))
        })
        .collect()
}
