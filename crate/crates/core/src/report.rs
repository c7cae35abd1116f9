//! CSV rows for the command-line reports.
//!
//! Floats are written in shortest round-trip scientific notation (`{:e}`),
//! which is locale-independent and byte-stable for identical inputs.

use crate::asymptotics::{BoundReport, ExponentFit};
use crate::graph::VertexId;
use crate::moments::{MomentTable, VanishingOrder};

pub const BOUND_HEADER: &str = "which,x,y,d,t,n,lhs,rhs,margin,passed";
pub const EXPONENT_HEADER: &str = "x,y,group,slope,d_E,abs_error,max_residual";
pub const MOMENT_HEADER: &str = "x,y,n,moment,d_L";

pub fn float(v: f64) -> String {
    format!("{v:e}")
}

fn opt_vertex(v: Option<VertexId>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

pub fn bound_row(r: &BoundReport) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{}",
        r.which,
        opt_vertex(r.x),
        opt_vertex(r.y),
        r.d.map(|d| d.to_string()).unwrap_or_default(),
        float(r.t),
        r.n,
        float(r.lhs),
        float(r.rhs),
        float(r.margin),
        r.passed
    )
}

pub fn exponent_row(f: &ExponentFit) -> String {
    format!(
        "{},{},{},{},{},{},{}",
        f.x,
        f.y,
        f.group,
        float(f.slope),
        f.d_e,
        float(f.abs_error()),
        float(f.max_residual)
    )
}

/// One row per order `n` of the table.
pub fn moment_rows(t: &MomentTable) -> Vec<String> {
    let d_l = match t.d_l {
        VanishingOrder::At(n) => n.to_string(),
        VanishingOrder::UnknownAbove(_) => "INF".to_string(),
    };
    t.values
        .iter()
        .enumerate()
        .map(|(n, &v)| format!("{},{},{},{},{}", t.x, t.y, n, float(v), d_l))
        .collect()
}
