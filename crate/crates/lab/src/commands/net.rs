use serde_json::{json, Value};
use subgauss_core::nets::{log_cardinality_bound, verify_covering, NetBuilder, Polish, Saturation};
use subgauss_core::rng::derive_seed;

use super::Sink;
use crate::config::{Key, Params};
use crate::error::{LabError, Result};
use crate::output::{fmt_f64, num, Table};

pub(super) const SCHEMA: &[Key] = &[
    ("dim", Some("3")),
    ("eps", Some("0.25")),
    ("saturation", Some("fixed:1000")),
    ("polish", Some("true")),
    ("polish_patience", Some("2000")),
    ("max_candidates", None),
    ("probes", Some("100000")),
];

/// `fixed:K` or `adaptive:FACTOR`.
fn saturation(raw: &str) -> Result<Saturation> {
    let bad = || LabError::config(format!("`saturation` = `{raw}` is not fixed:K or adaptive:FACTOR"));
    let (rule, n) = raw.split_once(':').ok_or_else(bad)?;
    let n: u64 = n.trim().parse().map_err(|_| bad())?;
    match rule.trim() {
        "fixed" => Ok(Saturation::Fixed(n)),
        "adaptive" => Ok(Saturation::Adaptive { factor: n }),
        _ => Err(bad()),
    }
}

pub(super) fn run(params: &Params, sink: &mut Sink) -> Result<(Value, Vec<String>)> {
    let dim = params.usize("dim")?;
    let eps = params.f64("eps")?;
    let seed = params.u64("seed")?;
    let probes = params.usize("probes")?;
    let mut builder = NetBuilder::new(dim, eps, seed).saturation(saturation(params.str("saturation")?)?);
    builder = builder.polish(if params.bool("polish")? {
        Some(Polish {
            patience: params.u64("polish_patience")?,
            ..Polish::default()
        })
    } else {
        None
    });
    if params.has("max_candidates") {
        builder = builder.max_candidates(params.u64("max_candidates")?);
    }
    let net = builder.build()?;

    let header: Vec<String> = (1..=dim).map(|i| format!("x{i}")).collect();
    let mut table = Table::new(&header.iter().map(String::as_str).collect::<Vec<_>>());
    for x in net.iter() {
        table.push(x.iter().map(|&v| fmt_f64(v)).collect::<Result<_>>()?);
    }
    sink.table("net.csv", &table)?;

    let max_gap = verify_covering(&net, probes, derive_seed(seed, &[probes as u64]));
    let min_sep = if net.len() > 1 {
        Some(num(net.min_pairwise_distance())?)
    } else {
        None
    };
    let log_bound = log_cardinality_bound(dim, eps);
    let summary = json!({
        "dim": dim,
        "eps": num(eps)?,
        "seed": seed,
        "cardinality": net.len(),
        "log_cardinality": num((net.len() as f64).ln())?,
        "log_cardinality_bound": num(log_bound)?,
        "within_cardinality_bound": net.within_cardinality_bound(),
        "saturated": net.saturated,
        "saturation_rejections": net.saturation_rejections,
        "candidates": net.candidates,
        "polish": net.polish.map(|p| json!({"descents": p.descents, "added": p.added})),
        "probes": probes,
        "max_gap": num(max_gap)?,
        "covering_ok": max_gap <= eps,
        "min_separation": min_sep,
    });
    sink.json("net.json", &summary)?;
    let lines = vec![
        format!("{}-point net on S^{} at eps {eps} (seed {seed})", net.len(), dim - 1),
        format!(
            "probe gap {max_gap:.6} over {probes} probes, log|N| {:.4} <= {log_bound:.4}: {}",
            (net.len() as f64).ln(),
            net.within_cardinality_bound()
        ),
    ];
    Ok((summary, lines))
}
