//! The subcommands, as functions from parsed options to output text and an
//! exit code.

use anyhow::{bail, Result};
use corrcat_core::catalysis::{main_theorem_check, ExplicitSearch};
use corrcat_core::entropy::{burg_entropy, free_energy_alpha, renyi_entropy};
use corrcat_core::majorization::{trumping_conditions_with, Feasibility};
use corrcat_core::protocols::{
    run_main_result_1, run_main_result_1_with_joint, run_work_extraction, run_work_formation, sink_condition,
    ProtocolCaps, ProtocolReport, SharpState,
};
use corrcat_core::scenarios::{
    figure3_data, figure3_pair, figure5_data, qubit_example_states, qubit_heating_instance, QubitScenario,
};
use corrcat_core::thermo::{
    formation_feasible, formation_instance, min_work_formation_with, thermo_margin, thermomajorizes,
    thermomajorizes_with, FormationMode, DEFAULT_WORK_UPPER,
};
use corrcat_core::{Alpha, AlphaGrid, Dist, Error, Rational, ThermalContext, Tolerances};
use serde_json::{json, Value};

use crate::input::{DistJson, Problem};
use crate::output::{csv, g12, num, pretty, protocol};

/// Exit code for a feasible verdict or a successful command.
pub const EXIT_OK: i32 = 0;
/// Usage, parse and internal errors.
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    Float,
    Rational,
}

/// Options shared by every command.
#[derive(Debug, Clone)]
pub struct Common {
    pub alpha_grid: Option<String>,
    pub backend: Backend,
    pub tolerance: Option<f64>,
    pub seed: u64,
    pub format: Format,
    pub bits: bool,
}

impl Default for Common {
    fn default() -> Self {
        Common {
            alpha_grid: None,
            backend: Backend::Float,
            tolerance: None,
            seed: 0,
            format: Format::Json,
            bits: false,
        }
    }
}

impl Common {
    fn grid(&self, default: &str) -> Result<AlphaGrid> {
        Ok(AlphaGrid::parse(self.alpha_grid.as_deref().unwrap_or(default))?)
    }

    fn float_only(&self, what: &str) -> Result<()> {
        if self.backend == Backend::Rational {
            bail!("the rational backend is not available for {what}");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub text: String,
    pub code: i32,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome { text, code: EXIT_OK }
    }

    fn verdict(text: String, feasible: bool) -> Self {
        Outcome {
            text,
            code: if feasible { EXIT_OK } else { EXIT_INFEASIBLE },
        }
    }
}

/// Built-in inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    /// The heated qubit with work bit and memory.
    Qubit,
    /// The three-level entropy-balance pair.
    Fig3,
}

#[derive(Debug, Clone)]
pub enum Source {
    File(Problem),
    Scenario(Scenario),
}

struct Pair {
    p: DistJson,
    q: DistJson,
    ctx: ThermalContext,
}

fn rational_json(d: &Dist<Rational>) -> DistJson {
    DistJson {
        probs: d.probs().iter().map(|x| crate::input::Num::Text(x.to_string())).collect(),
    }
}

fn float_json(d: &Dist) -> DistJson {
    DistJson {
        probs: d.probs().iter().map(|&x| crate::input::Num::Float(x)).collect(),
    }
}

fn file_pair(pr: &Problem) -> Result<Pair> {
    let (p, q) = pr.pair()?;
    let dim = p.probs.len();
    Ok(Pair {
        p,
        q,
        ctx: pr.context_or_trivial(dim)?,
    })
}

// ---------------------------------------------------------------- entropy

pub fn entropy(src: &Source, c: &Common) -> Result<Outcome> {
    c.float_only("entropy")?;
    let (dists, ctx): (Vec<(&str, Dist)>, Option<ThermalContext>) = match src {
        Source::File(pr) => {
            let ctx = pr.context()?;
            if pr.p.is_some() && pr.q.is_some() {
                let (p, q) = pr.pair()?;
                (vec![("p", p.to_f64()?), ("q", q.to_f64()?)], ctx)
            } else {
                (vec![("p", pr.single()?.to_f64()?)], ctx)
            }
        }
        Source::Scenario(Scenario::Fig3) => {
            let (p, q) = figure3_pair();
            (vec![("p", p), ("q", q)], None)
        }
        Source::Scenario(Scenario::Qubit) => {
            let s = QubitScenario::new();
            (vec![("p", s.gibbs_a().to_f64()), ("q", s.rho_a().to_f64())], Some(s.ctx_a))
        }
    };
    if let Some(ctx) = &ctx {
        for (_, d) in &dists {
            if d.dim() != ctx.dim() {
                bail!("Hamiltonian has {} levels, state has {}", ctx.dim(), d.dim());
            }
        }
    }
    let grid = c.grid("0+0.5+1+2+inf")?;
    let scale = if c.bits { 1.0 / std::f64::consts::LN_2 } else { 1.0 };
    let mut header = vec!["alpha".to_string()];
    for (name, _) in &dists {
        header.push(format!("renyi_{name}"));
    }
    if dists.len() == 2 {
        header.push("renyi_q_minus_p".into());
    }
    if ctx.is_some() {
        for (name, _) in &dists {
            header.push(format!("free_energy_{name}"));
        }
    }
    let mut rows: Vec<Vec<Option<f64>>> = Vec::new();
    for &a in grid.points() {
        let mut row = Vec::new();
        let hs: Vec<f64> = dists
            .iter()
            .map(|(_, d)| {
                let h = if a == Alpha::Burg { burg_entropy(d) } else { renyi_entropy(d, a) };
                h.to_f64() * scale
            })
            .collect();
        row.extend(hs.iter().map(|&h| Some(h)));
        if hs.len() == 2 {
            row.push(Some(hs[1] - hs[0]));
        }
        if let Some(ctx) = &ctx {
            for (_, d) in &dists {
                row.push(if a == Alpha::Burg {
                    None
                } else {
                    Some(free_energy_alpha(d, ctx, a)?.to_f64())
                });
            }
        }
        rows.push(row);
    }
    let labels: Vec<String> = grid.points().iter().map(|a| a.to_string()).collect();
    let text = match c.format {
        Format::Csv => {
            let h: Vec<&str> = header.iter().map(String::as_str).collect();
            let body: Vec<Vec<String>> = labels
                .iter()
                .zip(&rows)
                .map(|(l, r)| {
                    std::iter::once(l.clone())
                        .chain(r.iter().map(|v| v.map(g12).unwrap_or_default()))
                        .collect()
                })
                .collect();
            csv(&h, &body)
        }
        Format::Json => {
            let pts: Vec<Value> = labels
                .iter()
                .zip(&rows)
                .map(|(l, r)| {
                    let mut m = serde_json::Map::new();
                    m.insert("alpha".into(), json!(l));
                    for (k, v) in header[1..].iter().zip(r) {
                        m.insert(k.clone(), v.map(num).unwrap_or(Value::Null));
                    }
                    Value::Object(m)
                })
                .collect();
            pretty(&json!({
                "units": if c.bits { "bits" } else { "nats" },
                "grid": grid.description(),
                "rows": pts,
            }))
        }
    };
    Ok(Outcome::ok(text))
}

// ---------------------------------------------------------------- check

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckMode {
    Thermo,
    Trumping,
    Correlated,
}

#[derive(Debug, Clone)]
pub struct CheckOpts {
    pub mode: CheckMode,
    /// Work-bit gap for the qubit scenario, units of kT.
    pub delta: f64,
    pub eps_corr: f64,
    /// Also try to materialize an extension with a catalyst.
    pub explicit: bool,
}

fn check_pair(src: &Source, delta: f64) -> Result<Pair> {
    match src {
        Source::File(pr) => file_pair(pr),
        Source::Scenario(Scenario::Qubit) => {
            let (p, q, ctx) = qubit_example_states(delta)?;
            Ok(Pair {
                p: rational_json(&p),
                q: rational_json(&q),
                ctx,
            })
        }
        Source::Scenario(Scenario::Fig3) => {
            let (p, q) = figure3_pair();
            Ok(Pair {
                p: float_json(&p),
                q: float_json(&q),
                ctx: ThermalContext::trivial(3),
            })
        }
    }
}

/// Runs of consecutive grid points that fail, as `[first, last]` labels.
fn violated_ranges(margins: &[(Alpha, f64)], violated: &[(Alpha, f64)]) -> Vec<[String; 2]> {
    let mut out: Vec<[String; 2]> = Vec::new();
    let mut open: Option<(Alpha, Alpha)> = None;
    for (a, _) in margins {
        let bad = violated.iter().any(|(b, _)| b == a);
        match (bad, open) {
            (true, None) => open = Some((*a, *a)),
            (true, Some((s, _))) => open = Some((s, *a)),
            (false, Some((s, e))) => {
                out.push([s.to_string(), e.to_string()]);
                open = None;
            }
            (false, None) => {}
        }
    }
    if let Some((s, e)) = open {
        out.push([s.to_string(), e.to_string()]);
    }
    out
}

pub fn check(src: &Source, o: &CheckOpts, c: &Common) -> Result<Outcome> {
    let pair = check_pair(src, o.delta)?;
    match o.mode {
        CheckMode::Thermo => {
            let (feasible, backend) = match c.backend {
                Backend::Float => {
                    let (p, q) = (pair.p.to_f64()?, pair.q.to_f64()?);
                    (thermomajorizes(&p, &q, &pair.ctx)?, "float")
                }
                Backend::Rational => {
                    let (p, q) = (pair.p.to_rational()?, pair.q.to_rational()?);
                    let g = pair.ctx.gibbs().to_rational();
                    (thermomajorizes_with(&p, &q, &g)?, "rational")
                }
            };
            let margin = thermo_margin(&pair.p.to_f64()?, &pair.q.to_f64()?, &pair.ctx)?;
            let v = json!({ "mode": "thermo", "backend": backend, "feasible": feasible, "margin": num(margin) });
            Ok(Outcome::verdict(render_kv(&v, c.format), feasible))
        }
        CheckMode::Trumping => {
            c.float_only("trumping checks")?;
            let grid = c.grid("standard")?;
            let tol = Tolerances {
                boundary: c.tolerance.unwrap_or(Tolerances::DEFAULT.boundary),
                ..Tolerances::DEFAULT
            };
            let v = trumping_conditions_with(&pair.p.to_f64()?, &pair.q.to_f64()?, &grid, &tol)?;
            let feasible = v.feasible != Feasibility::No;
            if c.format == Format::Csv {
                let rows: Vec<Vec<String>> = v
                    .margins
                    .iter()
                    .map(|(a, m)| {
                        let bad = v.violated.iter().any(|(b, _)| b == a);
                        vec![a.to_string(), g12(*m), bad.to_string()]
                    })
                    .collect();
                return Ok(Outcome::verdict(csv(&["alpha", "margin", "violated"], &rows), feasible));
            }
            let out = json!({
                "mode": "trumping",
                "verdict": match v.feasible {
                    Feasibility::Yes => "yes",
                    Feasibility::No => "no",
                    Feasibility::Boundary => "boundary",
                },
                "feasible": feasible,
                "grid": v.grid,
                "points": v.margins.len(),
                "min_margin": num(v.min_margin()),
                "violated_count": v.violated.len(),
                "violated_ranges": violated_ranges(&v.margins, &v.violated),
            });
            Ok(Outcome::verdict(pretty(&out), feasible))
        }
        CheckMode::Correlated => {
            c.float_only("correlated checks")?;
            let grid = c.grid("standard")?;
            let search = ExplicitSearch {
                seed: c.seed,
                ..ExplicitSearch::default()
            };
            let r = main_theorem_check(
                &pair.p.to_f64()?,
                &pair.q.to_f64()?,
                o.eps_corr,
                &grid,
                o.explicit.then_some(&search),
            )?;
            let mut v = crate::output::correlated(&r);
            v["mode"] = json!("correlated");
            v["eps_corr"] = num(o.eps_corr);
            Ok(Outcome::verdict(render_kv(&v, c.format), r.feasible))
        }
    }
}

/// JSON as is; CSV as `key,value` rows of the scalar top-level entries.
fn render_kv(v: &Value, f: Format) -> String {
    match f {
        Format::Json => pretty(v),
        Format::Csv => {
            let mut rows = Vec::new();
            flatten("", v, &mut rows);
            csv(&["key", "value"], &rows)
        }
    }
}

fn flatten(prefix: &str, v: &Value, rows: &mut Vec<Vec<String>>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, x, rows);
            }
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                flatten(&format!("{prefix}.{i}"), x, rows);
            }
        }
        Value::Number(n) => rows.push(vec![prefix.to_string(), g12(n.as_f64().unwrap_or(f64::NAN))]),
        Value::String(s) => rows.push(vec![prefix.to_string(), s.clone()]),
        Value::Bool(b) => rows.push(vec![prefix.to_string(), b.to_string()]),
        Value::Null => rows.push(vec![prefix.to_string(), String::new()]),
    }
}

// ---------------------------------------------------------------- minwork

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WorkMode {
    NoCatalyst,
    WithJoint,
    Extraction,
}

#[derive(Debug, Clone)]
pub struct WorkOpts {
    pub mode: WorkMode,
    pub delta_gap: f64,
    pub epsilon: f64,
    pub eps_corr: f64,
    pub sink: Option<(u64, u64)>,
    pub sink_eps: f64,
}

struct WorkInput {
    p: Dist,
    q: Dist,
    ctx: ThermalContext,
    joint: Option<(corrcat_core::BipartiteDist, Dist)>,
}

fn work_input(src: &Source, mode: WorkMode) -> Result<WorkInput> {
    match src {
        Source::File(pr) => {
            let pair = file_pair(pr)?;
            let joint = match pr.joint()? {
                Some(j) => {
                    let sigma = match &pr.sigma_m {
                        Some(s) => s.to_f64()?,
                        None => j.marginal_b(),
                    };
                    Some((j, sigma))
                }
                None => None,
            };
            Ok(WorkInput {
                p: pair.p.to_f64()?,
                q: pair.q.to_f64()?,
                ctx: pair.ctx,
                joint,
            })
        }
        Source::Scenario(Scenario::Qubit) => {
            let s = QubitScenario::new();
            let (mut p, mut q) = (s.gibbs_a().to_f64(), s.rho_a().to_f64());
            if mode == WorkMode::Extraction {
                std::mem::swap(&mut p, &mut q);
            }
            Ok(WorkInput {
                p,
                q,
                ctx: s.ctx_a.clone(),
                joint: Some((s.rho_am.to_f64(), s.sigma_m.to_f64())),
            })
        }
        Source::Scenario(Scenario::Fig3) => bail!("the fig3 scenario has no work task"),
    }
}

/// `max_α (F_α(target) - F_α(initial))` over the non-negative grid points,
/// a lower bound on the work of any formation.
fn renyi_bound(init: &Dist, target: &Dist, ctx: &ThermalContext, grid: &AlphaGrid) -> Result<(f64, Alpha)> {
    let mut best = (f64::NEG_INFINITY, Alpha::Zero);
    for &a in grid.points() {
        if a == Alpha::Burg || a.is_negative() {
            continue;
        }
        let d = free_energy_alpha(target, ctx, a)?.to_f64() - free_energy_alpha(init, ctx, a)?.to_f64();
        if d > best.0 {
            best = (d, a);
        }
    }
    Ok(best)
}

fn default_sink(p: &Dist, q: &Dist, ctx: &ThermalContext, eps: f64) -> Result<SharpState> {
    let (_, need) = sink_condition(p, q, ctx, &SharpState::new(1, 1, 0.0)?)?;
    let n = ((need.exp().floor() as u64) + 1).max(3);
    Ok(SharpState::new(1, n, eps)?)
}

pub fn minwork(src: &Source, o: &WorkOpts, c: &Common) -> Result<Outcome> {
    c.float_only("minwork")?;
    let w = work_input(src, o.mode)?;
    let kt = w.ctx.kt();
    if o.mode == WorkMode::Extraction {
        let sink = match o.sink {
            Some((m, n)) => SharpState::new(m, n, o.sink_eps)?,
            None => default_sink(&w.p, &w.q, &w.ctx, o.sink_eps)?,
        };
        let caps = ProtocolCaps {
            eps_corr: o.eps_corr,
            ..caps_for(c)
        };
        let r = match run_work_extraction(&w.p, &w.q, &w.ctx, o.delta_gap, o.epsilon, &sink, &caps) {
            Ok(r) => r,
            Err(e @ (Error::FreeEnergyViolation { .. } | Error::SinkTooSmall { .. })) => {
                return Ok(infeasible("extraction", &e, c.format));
            }
            Err(e) => return Err(e.into()),
        };
        let v = json!({
            "mode": "extraction",
            "work": num(r.achieved_work),
            "work_over_kt": num(r.achieved_work / kt),
            "free_energy_drop": num(r.quantity("f_p").unwrap_or(f64::NAN) - r.quantity("f_q").unwrap_or(f64::NAN)),
            "sink": { "m": sink.m, "n": sink.n, "eps_smear": num(sink.eps_smear) },
            "report": protocol(&r),
        });
        return Ok(Outcome::verdict(render_kv(&v, c.format), r.feasible));
    }
    let mode = match o.mode {
        WorkMode::NoCatalyst => FormationMode::NoCatalyst,
        _ => {
            let Some((joint, sigma_m)) = w.joint.clone() else {
                bail!("with-joint needs \"joint\" in the input");
            };
            FormationMode::WithJoint { joint, sigma_m }
        }
    };
    let tol = c.tolerance.unwrap_or(1e-10) * kt;
    let work = match min_work_formation_with(&w.p, &w.q, &w.ctx, &mode, DEFAULT_WORK_UPPER * kt, tol) {
        Ok(x) => x,
        Err(e @ Error::InfeasibleAtUpperBound { .. }) => return Ok(infeasible(mode_name(o.mode), &e, c.format)),
        Err(e) => return Err(e.into()),
    };
    let (init, target, full) = formation_instance(&w.p, &w.q, &w.ctx, &mode, 0.0)?;
    let (bound, at) = renyi_bound(&init, &target, &full, &c.grid("geom:0.01:100:81+0+1+inf")?)?;
    let below = (work - tol).max(0.0);
    let v = json!({
        "mode": mode_name(o.mode),
        "work": num(work),
        "work_over_kt": num(work / kt),
        "tolerance": num(tol),
        "certificate": {
            "feasible_at_work": formation_feasible(&w.p, &w.q, &w.ctx, &mode, work)?,
            "infeasible_below": if work > 0.0 { Value::Bool(!formation_feasible(&w.p, &w.q, &w.ctx, &mode, below)?) } else { Value::Null },
            "renyi_lower_bound": num(bound),
            "renyi_lower_bound_alpha": at.to_string(),
        },
    });
    Ok(Outcome::ok(render_kv(&v, c.format)))
}

fn mode_name(m: WorkMode) -> &'static str {
    match m {
        WorkMode::NoCatalyst => "no-catalyst",
        WorkMode::WithJoint => "with-joint",
        WorkMode::Extraction => "extraction",
    }
}

fn infeasible(mode: &str, e: &Error, f: Format) -> Outcome {
    let v = json!({ "mode": mode, "feasible": false, "reason": e.to_string() });
    Outcome::verdict(render_kv(&v, f), false)
}

// ---------------------------------------------------------------- figure

pub fn figure(name: &str, delta: f64, c: &Common) -> Result<Outcome> {
    c.float_only("figures")?;
    match name {
        "fig3" => {
            let grid = c.grid("lin:-3:6:181+-inf+inf+burg")?;
            let b = figure3_data(&grid)?;
            let mut pts: Vec<(String, f64, f64)> = b
                .samples
                .iter()
                .zip(&b.limit)
                .map(|((a, v), (_, l))| (a.to_string(), v.to_f64(), l.to_f64()))
                .collect();
            if grid.points().contains(&Alpha::Burg) {
                let (p, _) = figure3_pair();
                let lim = -(3f64.ln()) - burg_entropy(&p).to_f64();
                pts.push(("burg".into(), b.burg_value.to_f64(), lim));
            }
            let text = match c.format {
                Format::Csv => {
                    let rows: Vec<Vec<String>> = pts.iter().map(|(a, v, l)| vec![a.clone(), g12(*v), g12(*l)]).collect();
                    csv(&["alpha", "balance", "limit"], &rows)
                }
                Format::Json => pretty(&json!({
                    "name": "fig3",
                    "params": crate::output::params(&b.params),
                    "points": pts.iter().map(|(a, v, l)| json!({ "alpha": a, "balance": num(*v), "limit": num(*l) })).collect::<Vec<_>>(),
                })),
            };
            Ok(Outcome::ok(text))
        }
        "fig5" => {
            let (lp, lq) = figure5_data(delta)?;
            let curves = [("initial", lp), ("target", lq)];
            let text = match c.format {
                Format::Csv => {
                    let mut rows = Vec::new();
                    for (n, l) in &curves {
                        for (x, y) in l.elbows() {
                            rows.push(vec![n.to_string(), g12(*x), g12(*y)]);
                        }
                    }
                    csv(&["curve", "x", "y"], &rows)
                }
                Format::Json => {
                    let mut m = serde_json::Map::new();
                    m.insert("name".into(), json!("fig5"));
                    m.insert("delta".into(), num(delta));
                    for (n, l) in &curves {
                        let e: Vec<Value> = l.elbows().iter().map(|(x, y)| json!([num(*x), num(*y)])).collect();
                        m.insert(n.to_string(), Value::Array(e));
                    }
                    pretty(&Value::Object(m))
                }
            };
            Ok(Outcome::ok(text))
        }
        other => bail!("unknown figure '{other}' (expected fig3 or fig5)"),
    }
}

// ---------------------------------------------------------------- run

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunMode {
    State,
    Formation,
    Extraction,
}

fn caps_for(c: &Common) -> ProtocolCaps {
    let mut caps = ProtocolCaps {
        exact: c.backend == Backend::Rational,
        ..ProtocolCaps::default()
    };
    caps.search.seed = c.seed;
    caps
}

pub fn run(src: &Source, mode: RunMode, o: &WorkOpts, delta: f64, c: &Common) -> Result<Outcome> {
    let caps = ProtocolCaps {
        eps_corr: o.eps_corr,
        ..caps_for(c)
    };
    let result: std::result::Result<ProtocolReport, Error> = match (mode, src) {
        (RunMode::State, Source::Scenario(Scenario::Qubit)) => {
            let (p, j, ctx) = qubit_heating_instance(delta)?;
            run_main_result_1_with_joint(&p, &j, &ctx, o.epsilon, &caps)
        }
        (RunMode::State, Source::File(pr)) if pr.joint.is_some() => {
            let pair = file_pair(pr)?;
            run_main_result_1_with_joint(&pair.p.to_f64()?, &pr.joint()?.expect("checked"), &pair.ctx, o.epsilon, &caps)
        }
        (RunMode::State, _) => {
            let w = work_input(src, WorkMode::NoCatalyst)?;
            run_main_result_1(&w.p, &w.q, &w.ctx, o.epsilon, o.eps_corr, &caps)
        }
        (RunMode::Formation, _) => {
            let w = work_input(src, WorkMode::NoCatalyst)?;
            run_work_formation(&w.p, &w.q, &w.ctx, o.delta_gap, o.epsilon, &caps)
        }
        (RunMode::Extraction, _) => {
            let w = work_input(src, WorkMode::Extraction)?;
            let sink = match o.sink {
                Some((m, n)) => SharpState::new(m, n, o.sink_eps)?,
                None => default_sink(&w.p, &w.q, &w.ctx, o.sink_eps)?,
            };
            run_work_extraction(&w.p, &w.q, &w.ctx, o.delta_gap, o.epsilon, &sink, &caps)
        }
    };
    let name = match mode {
        RunMode::State => "state",
        RunMode::Formation => "formation",
        RunMode::Extraction => "extraction",
    };
    match result {
        Ok(r) => {
            let mut v = protocol(&r);
            v["mode"] = json!(name);
            Ok(Outcome::verdict(render_kv(&v, c.format), r.feasible))
        }
        Err(e @ (Error::FreeEnergyViolation { .. } | Error::SinkTooSmall { .. })) => Ok(infeasible(name, &e, c.format)),
        Err(e) => Err(e.into()),
    }
}

