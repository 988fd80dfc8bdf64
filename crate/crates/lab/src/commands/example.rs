use serde_json::{json, Value};
use subgauss_core::applications::{
    bilinear_bound_check, compute_bk, default_x_vectors, pooled_vs_naive, sweep_min_m, BilinearConfig, PooledSpec,
    Regime, SweepConfig,
};

use super::{family, vector, Sink};
use crate::config::{Config, Key, Params};
use crate::error::{LabError, Result};
use crate::output::{fmt_f64, num, nums, Table};
use crate::pool::Pool;

const BK: &[Key] = &[("dim", Some("8")), ("m", Some("1000")), ("x", Some("e1"))];

const BTILDE: &[Key] = &[
    ("dim", Some("8")),
    ("q", Some("2")),
    ("m", Some("1000")),
    ("scales", None),
];

const SWEEP: &[Key] = &[
    ("regime", Some("pooled_spec")),
    ("dim", Some("16")),
    ("q", Some("1")),
    ("eps_target", Some("0.5")),
    ("delta", None),
    ("m_grid", Some("doubling:8:4096")),
    ("trials", Some("400")),
    ("scales", None),
];

const BILINEAR: &[Key] = &[
    ("family", Some("standard_gaussian")),
    ("dim", Some("8")),
    ("z1", Some("e1")),
    ("z2", Some("e2")),
    ("rows", Some("400")),
    ("eps", Some("0.5")),
    ("trials", Some("10000")),
];

const SWEEP_COLUMNS: &[&str] = &[
    "regime",
    "n",
    "q",
    "m",
    "eps_target",
    "delta",
    "trials",
    "successes",
    "success_prob",
    "m_star",
    "seed",
];

pub(super) fn schema(config: &Config) -> Result<Vec<Key>> {
    let task = config.get("task").unwrap_or("bk");
    let keys = match task {
        "bk" => BK,
        "btilde" => BTILDE,
        "sweep" => SWEEP,
        "bilinear" => BILINEAR,
        other => {
            return Err(LabError::config(format!(
                "`task` = `{other}` is not bk, btilde, sweep or bilinear"
            )))
        }
    };
    Ok([&[("task", Some("bk"))], keys].concat())
}

fn scales(params: &Params, q: usize) -> Result<Vec<f64>> {
    if !params.has("scales") {
        return Ok(vec![1.0; q]);
    }
    let s = params.f64_list("scales")?;
    if s.len() != q {
        return Err(LabError::config(format!(
            "`scales` has {} entries, expected q = {q}",
            s.len()
        )));
    }
    Ok(s)
}

pub(super) fn run(params: &Params, sink: &mut Sink, pool: &Pool) -> Result<(Value, Vec<String>)> {
    match params.str("task")? {
        "bk" => bk(params, sink),
        "btilde" => btilde(params, sink),
        "sweep" => sweep(params, sink, pool),
        "bilinear" => bilinear(params, sink, pool),
        other => Err(LabError::config(format!("unknown task `{other}`"))),
    }
}

fn bk(params: &Params, sink: &mut Sink) -> Result<(Value, Vec<String>)> {
    let dim = params.usize("dim")?;
    let x = vector(params, "x", dim)?;
    let m = params.usize("m")?;
    let seed = params.u64("seed")?;
    let value = compute_bk(&x, m, seed)?;
    let summary = json!({
        "task": "bk",
        "n": dim,
        "m": m,
        "x": nums(&x)?,
        "seed": seed,
        "b_k": num(value)?,
        "relative": num(value / x.iter().map(|v| v * v).sum::<f64>())?,
    });
    sink.json("bk.json", &summary)?;
    Ok((summary, vec![format!("b_k = {value:.6e} (n {dim}, m {m})")]))
}

fn btilde(params: &Params, sink: &mut Sink) -> Result<(Value, Vec<String>)> {
    let dim = params.usize("dim")?;
    let q = params.usize("q")?;
    let seed = params.u64("seed")?;
    let spec = PooledSpec {
        n: dim,
        q,
        m: params.usize("m")?,
        scales: scales(params, q)?,
        x_vectors: Some(default_x_vectors(dim, q, seed)),
        seed,
    };
    let cmp = pooled_vs_naive(&spec)?;
    let summary = json!({
        "task": "btilde",
        "n": dim,
        "q": q,
        "m": spec.m,
        "scales": nums(&spec.scales)?,
        "seed": seed,
        "btilde": num(cmp.btilde)?,
        "naive_bound": num(cmp.naive_bound)?,
        "per_block": nums(&cmp.per_block)?,
        "holds": cmp.holds(),
        "warnings": spec.warnings(),
    });
    sink.json("btilde.json", &summary)?;
    Ok((
        summary,
        vec![format!(
            "btilde = {:.6e} <= naive {:.6e}: {}",
            cmp.btilde,
            cmp.naive_bound,
            cmp.holds()
        )],
    ))
}

fn sweep(params: &Params, sink: &mut Sink, pool: &Pool) -> Result<(Value, Vec<String>)> {
    let regime: Regime = params.str("regime")?.parse()?;
    let q = params.usize("q")?;
    let seed = params.u64("seed")?;
    let config = SweepConfig {
        regime,
        n: params.usize("dim")?,
        q,
        eps_target: params.f64("eps_target")?,
        delta: params.opt_f64("delta")?,
        m_grid: params.usize_grid("m_grid")?,
        trials: params.usize("trials")?,
        seed,
        scales: if params.has("scales") {
            Some(scales(params, q)?)
        } else {
            None
        },
        x_vectors: None,
    };
    let r = sweep_min_m(&config, pool)?;
    let m_star = r.m_star.map(|m| m.to_string()).unwrap_or_default();
    let mut table = Table::new(SWEEP_COLUMNS);
    for (i, &m) in r.grid.iter().enumerate() {
        table.push(vec![
            regime.name().to_string(),
            r.n.to_string(),
            r.q.to_string(),
            m.to_string(),
            fmt_f64(r.eps_target)?,
            fmt_f64(r.delta)?,
            r.trials.to_string(),
            r.successes[i].to_string(),
            fmt_f64(r.success_prob[i])?,
            m_star.clone(),
            seed.to_string(),
        ]);
    }
    sink.table("sweep.csv", &table)?;
    let ci =
        r.ci.iter()
            .map(|&(lo, hi)| Ok(json!([num(lo)?, num(hi)?])))
            .collect::<Result<Vec<_>>>()?;
    let summary = json!({
        "task": "sweep",
        "regime": regime.name(),
        "n": r.n,
        "q": r.q,
        "eps_target": num(r.eps_target)?,
        "delta": num(r.delta)?,
        "trials": r.trials,
        "seed": seed,
        "m_star": r.m_star,
        "rows": table.to_json(),
        "ci": ci,
        "warnings": r.warnings,
    });
    sink.json("sweep.json", &summary)?;
    let mut lines = vec![format!(
        "{} n={} q={}: m* = {}",
        regime.name(),
        r.n,
        r.q,
        r.m_star.map_or_else(|| "not reached".to_string(), |m| m.to_string())
    )];
    lines.extend(r.warnings.iter().map(|w| format!("warning: {w}")));
    Ok((summary, lines))
}

fn bilinear(params: &Params, sink: &mut Sink, pool: &Pool) -> Result<(Value, Vec<String>)> {
    let dim = params.usize("dim")?;
    let config = BilinearConfig {
        family: family(params, "family", dim)?,
        z1: vector(params, "z1", dim)?,
        z2: vector(params, "z2", dim)?,
        n_rows: params.usize("rows")?,
        eps: params.f64("eps")?,
        trials: params.usize("trials")?,
        seed: params.u64("seed")?,
    };
    let c = bilinear_bound_check(&config, pool)?;
    let summary = json!({
        "task": "bilinear",
        "family": config.family.to_string(),
        "n": dim,
        "N": config.n_rows,
        "eps": num(config.eps)?,
        "seed": config.seed,
        "trials": c.trials,
        "failures_eps_sq": c.failures_eps_sq,
        "failures_eps": c.failures_eps,
        "p_fail_eps_sq": num(c.p_fail_eps_sq)?,
        "p_fail_eps": num(c.p_fail_eps)?,
        "threshold_eps_sq": num(c.threshold_eps_sq)?,
        "threshold_eps": num(c.threshold_eps)?,
    });
    sink.json("bilinear.json", &summary)?;
    Ok((
        summary,
        vec![format!(
            "bilinear failures: {} at eps^2 threshold, {} at eps threshold, of {}",
            c.failures_eps_sq, c.failures_eps, c.trials
        )],
    ))
}
