use graphheat::asymptotics::{
    leading_exponent_with_cutoff, semigroup_bound, theorem_check_with_cutoff, unitary_bound, BoundReport,
};
use graphheat::graph::Distance;
use graphheat::moments::d_l;
use graphheat::operator::DENSE_LIMIT;
use graphheat::report::{bound_row, exponent_row, float, BOUND_HEADER, EXPONENT_HEADER};
use graphheat::{
    Error, GraphSource, Group, LaplacianOperator, Method, Propagator, TimeGrid, VanishingOrder, VertexId,
    WeightedGraph,
};

/// CSV lines (header first) plus what the caller needs for the exit code.
#[derive(Debug, Default)]
pub struct Report {
    pub lines: Vec<String>,
    pub failures: usize,
    pub notes: Vec<String>,
}

impl Report {
    fn new(header: &str) -> Self {
        Report { lines: vec![header.to_string()], ..Default::default() }
    }

    pub fn csv(&self) -> String {
        let mut out = self.lines.join("\n");
        out.push('\n');
        out
    }
}

pub struct Context {
    pub graph: WeightedGraph,
    pub pairs: Vec<(VertexId, VertexId)>,
    pub grid: TimeGrid,
    pub method: Method,
    pub group: Group,
    pub tol: f64,
    pub cutoff: Option<usize>,
}

impl Context {
    fn source(&self) -> GraphSource {
        GraphSource::from(self.graph.clone())
    }

    fn distance(&self, src: &GraphSource, x: VertexId, y: VertexId) -> Result<Distance, Error> {
        src.combinatorial_distance(x, y, self.cutoff)
    }

    /// Order up to which moments are searched: the cutoff, else the vertex
    /// count (every finite distance is below it).
    fn max_order(&self) -> usize {
        self.cutoff.unwrap_or(self.graph.len())
    }

    /// Sample times in increasing order.
    fn times(&self) -> Vec<f64> {
        let mut t = self.grid.times();
        t.reverse();
        t
    }

    /// Full decomposition when the graph is small enough, series only otherwise.
    fn propagator(&self) -> Result<Propagator, Error> {
        if self.graph.len() <= DENSE_LIMIT {
            Propagator::for_graph(self.graph.clone())
        } else {
            Ok(Propagator::new(LaplacianOperator::new(self.graph.clone())))
        }
    }
}

pub fn distance(ctx: &Context) -> Result<Report, Error> {
    let src = ctx.source();
    let op = LaplacianOperator::new(src.clone());
    let mut report = Report::new("x,y,d_E,d_L,status");
    for &(x, y) in &ctx.pairs {
        let d_e = ctx.distance(&src, x, y)?;
        let order = d_l(&op, x, y, ctx.max_order())?;
        let consistent = match (d_e, order) {
            (Distance::Finite(a), VanishingOrder::At(b)) => a == b,
            (Distance::Infinite, VanishingOrder::UnknownAbove(_)) => true,
            _ => false,
        };
        report.failures += usize::from(!consistent);
        report
            .lines
            .push(format!("{x},{y},{d_e},{order},{}", if consistent { "ok" } else { "MISMATCH" }));
    }
    Ok(report)
}

pub fn verify(ctx: &Context) -> Result<Report, Error> {
    if ctx.graph.len() > DENSE_LIMIT {
        return Err(Error::TooLarge { n: ctx.graph.len(), limit: DENSE_LIMIT });
    }
    let prop = ctx.propagator()?;
    let src = ctx.source();
    let mut report = Report::new(BOUND_HEADER);
    let mut passed = 0usize;
    for &(x, y) in &ctx.pairs {
        let d = ctx.distance(&src, x, y)?;
        for t in ctx.times() {
            let rows: Vec<BoundReport> = match d {
                Distance::Finite(_) => {
                    let check = theorem_check_with_cutoff(&prop, x, y, t, ctx.cutoff)?;
                    vec![
                        check.heat,
                        check.wave,
                        semigroup_bound(&prop, x, y, t, check.d)?,
                        unitary_bound(&prop, x, y, t, check.d)?,
                    ]
                }
                Distance::Infinite => {
                    let n = ctx.max_order();
                    vec![
                        semigroup_bound(&prop, x, y, t, n)?.with_distance(Distance::Infinite),
                        unitary_bound(&prop, x, y, t, n)?.with_distance(Distance::Infinite),
                    ]
                }
            };
            for r in rows {
                if r.passed {
                    passed += 1;
                } else {
                    report.failures += 1;
                }
                report.lines.push(bound_row(&r));
            }
        }
    }
    let total = passed + report.failures;
    report.notes.push(format!(
        "summary: {passed}/{total} passed, {} failed, {} pairs",
        report.failures,
        ctx.pairs.len()
    ));
    Ok(report)
}

pub fn exponent(ctx: &Context) -> Result<Report, Error> {
    let prop = ctx.propagator()?;
    let mut report = Report::new(EXPONENT_HEADER);
    for &(x, y) in &ctx.pairs {
        match leading_exponent_with_cutoff(&prop, x, y, ctx.grid, ctx.group, ctx.cutoff) {
            Ok(fit) => {
                if !(fit.abs_error() <= ctx.tol) {
                    report.failures += 1;
                }
                report.lines.push(exponent_row(&fit));
            }
            Err(e @ (Error::Disconnected(..) | Error::Underflow { .. })) => {
                report.notes.push(format!("skipped ({x},{y}): {e}"));
            }
            Err(e) => return Err(e),
        }
    }
    Ok(report)
}

/// Leading coefficient `|M_d| / d!` and constant `C(x,y)` for a connected pair.
fn leading_data(ctx: &Context, prop: &Propagator, x: VertexId, y: VertexId) -> Result<Option<(usize, f64, f64)>, Error> {
    match theorem_check_with_cutoff(prop, x, y, 0.0, ctx.cutoff) {
        Ok(c) => Ok(Some((c.d, c.leading_coefficient, c.constant))),
        Err(Error::Disconnected(..)) => Ok(None),
        Err(e) => Err(e),
    }
}

fn overlay(data: Option<(usize, f64, f64)>, t: f64) -> (String, String, String) {
    match data {
        Some((d, lead, c)) => {
            let td = t.powi(d as i32);
            (d.to_string(), float(lead * td), float(c * td * t))
        }
        None => (Distance::Infinite.to_string(), float(0.0), String::new()),
    }
}

pub fn heat(ctx: &Context) -> Result<Report, Error> {
    let prop = ctx.propagator()?;
    let mut report = Report::new("x,y,t,value,method,d,leading,bound");
    for &(x, y) in &ctx.pairs {
        let data = leading_data(ctx, &prop, x, y)?;
        for t in std::iter::once(0.0).chain(ctx.times()) {
            let e = prop.heat_element(x, y, t, ctx.method)?;
            let (d, lead, bound) = overlay(data, t);
            report
                .lines
                .push(format!("{x},{y},{},{},{},{d},{lead},{bound}", float(t), float(e.value), e.method));
        }
    }
    Ok(report)
}

pub fn wave(ctx: &Context) -> Result<Report, Error> {
    let prop = ctx.propagator()?;
    let mut report = Report::new("x,y,t,re,im,value,method,d,leading,bound");
    for &(x, y) in &ctx.pairs {
        let data = leading_data(ctx, &prop, x, y)?;
        for t in std::iter::once(0.0).chain(ctx.times()) {
            let e = prop.wave_element(x, y, t, ctx.method)?;
            let (d, lead, bound) = overlay(data, t);
            report.lines.push(format!(
                "{x},{y},{},{},{},{},{},{d},{lead},{bound}",
                float(t),
                float(e.value.re),
                float(e.value.im),
                float(e.value.norm()),
                e.method
            ));
        }
    }
    Ok(report)
}
