//! Number formatting and JSON conversion of core results.

use corrcat_core::catalysis::{BalanceCurve, CorrelatedReport, ExtensionParams};
use corrcat_core::protocols::{PipelineStage, ProtocolReport, ReportLevel, StageOp};
use corrcat_core::ExtendedReal;
use serde_json::{json, Map, Value};

/// Twelve significant digits, `%g` style: plain notation for exponents in
/// `[-5, 12)`, scientific otherwise. Trailing zeros are dropped.
pub fn g12(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.11e}", x);
    let (mant, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let s = format!("{:.*}", (11 - exp).max(0) as usize, x);
        trim_zeros(&s)
    } else {
        format!("{}e{}", trim_zeros(mant), exp)
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

/// Finite values as JSON numbers, infinities as the strings `"inf"` and
/// `"-inf"`, NaN as `null`.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x.is_nan() {
        Value::Null
    } else {
        json!(g12(x))
    }
}

pub fn ext(x: ExtendedReal) -> Value {
    num(x.to_f64())
}

pub fn opt_num(x: Option<f64>) -> Value {
    x.map(num).unwrap_or(Value::Null)
}

pub fn params(p: &ExtensionParams) -> Value {
    json!({ "delta": num(p.delta), "n": p.n })
}

pub fn balance_summary(b: &BalanceCurve) -> Value {
    json!({
        "params": params(&b.params),
        "grid": b.grid,
        "min_value": num(b.min_value()),
        "burg": ext(b.burg_value),
    })
}

pub fn correlated(r: &CorrelatedReport) -> Value {
    json!({
        "feasible": r.feasible,
        "h0_p": num(r.h0_p),
        "h0_q": num(r.h0_q),
        "h_p": num(r.h_p),
        "h_q": num(r.h_q),
        "rank_condition": r.rank_condition,
        "shannon_condition": r.shannon_condition,
        "reduced_dim": r.reduced_dim,
        "lift_kappa": num(r.lift_kappa),
        "params": r.params.as_ref().map(params),
        "mutual_information": opt_num(r.mutual_information),
        "balance": r.balance.as_ref().map(balance_summary),
        "explicit": r.explicit.as_ref().map(|e| json!({
            "params": params(&e.params),
            "catalyst": e.catalyst.probs().iter().copied().map(num).collect::<Vec<_>>(),
            "joint_dims": [e.joint.dims().0, e.joint.dims().1],
            "mutual_information": num(e.mutual_information),
        })),
    })
}

fn stage(s: &PipelineStage) -> Value {
    let (kind, extra) = match &s.op {
        StageOp::Local { left, right, .. } => ("local", json!({ "left": left, "right": right })),
        StageOp::Embed { spec, right } => ("embed", json!({ "blocks": spec.len(), "total": spec.total(), "right": right })),
        StageOp::Unembed { spec, right } => ("unembed", json!({ "blocks": spec.len(), "total": spec.total(), "right": right })),
        StageOp::Bistochastic(chain) => ("bistochastic", json!({ "t_transforms": chain.steps.len() })),
    };
    json!({ "name": s.name, "kind": kind, "d_in": s.d_in(), "d_out": s.d_out(), "detail": extra })
}

pub fn protocol(r: &ProtocolReport) -> Value {
    let mut q = Map::new();
    for (k, v) in &r.quantities {
        q.insert((*k).to_string(), num(*v));
    }
    json!({
        "feasible": r.feasible,
        "level": match r.level {
            ReportLevel::Pipeline => "pipeline",
            ReportLevel::Certificate => "certificate",
        },
        "exact": r.exact,
        "achieved_work": num(r.achieved_work),
        "gap": r.gap.map(|g| json!({ "gap": num(g.gap), "num": g.num, "den": g.den })),
        "requested_epsilon": num(r.requested_epsilon),
        "output_error": num(r.output_error),
        "gibbs_fixed_point_error": num(r.gibbs_fixed_point_error),
        "marginal_m_exact": r.marginal_m_exact,
        "workbit_pure": r.workbit_pure,
        "sink_exact": r.sink_exact,
        "mutual_info_am": num(r.mutual_info_am),
        "composite_dim": r.composite_dim,
        "embedding_total": r.embedding.as_ref().map(|e| e.total()),
        "extension": r.extension.as_ref().map(params),
        "catalyst_dim": r.catalyst_dim,
        "sigma_m": r.sigma_m.as_ref().map(|s| s.probs().iter().copied().map(num).collect::<Vec<_>>()),
        "balance": r.balance.as_ref().map(balance_summary),
        "pipeline": r.pipeline.iter().map(stage).collect::<Vec<_>>(),
        "quantities": Value::Object(q),
        "notes": r.notes,
    })
}

/// Comma-separated table with a header row.
pub fn csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for r in rows {
        out.push_str(&r.join(","));
        out.push('\n');
    }
    out
}

pub fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}
