use serde_json::{json, Value};
use subgauss_core::montecarlo::{
    fit_decay, mc_failure, union_bound_gap, Claim, ExperimentConfig, GapRow, NStar, UnionGapConfig, ZMode,
};
use subgauss_core::samplers::{FamilyKind, FamilySpec};

use super::{family, vector, Sink};
use crate::config::{Key, Params};
use crate::error::{LabError, Result};
use crate::output::{fmt_f64, num, Table};
use crate::pool::Pool;

pub(super) const SCHEMA: &[Key] = &[
    ("family", Some("standard_gaussian")),
    ("dim", Some("8")),
    ("eps", Some("0.5")),
    ("n_grid", Some("25,50,100,200,400")),
    ("trials", Some("10000")),
    ("claim", Some("both")),
    ("z", Some("e1")),
    ("k", None),
    ("union.enabled", Some("false")),
    ("union.dims", Some("4,8,16")),
    ("union.n_grid", Some("doubling:2:2048")),
    ("union.eps", Some("0.5")),
    ("union.trials", Some("1000")),
    ("union.family", Some("standard_gaussian")),
];

const COLUMNS: &[&str] = &[
    "claim",
    "family",
    "n",
    "N",
    "eps",
    "trials",
    "failures",
    "p_hat",
    "ci_lo",
    "ci_hi",
    "threshold",
    "c_hat",
    "r_squared",
    "seed",
];

const GAP_COLUMNS: &[&str] = &[
    "n",
    "N",
    "eps",
    "trials",
    "threshold",
    "failures_quad",
    "p_quad",
    "ci_lo_quad",
    "ci_hi_quad",
    "failures_spec",
    "p_spec",
    "ci_lo_spec",
    "ci_hi_spec",
    "domination_violations",
    "seed",
];

fn claims(raw: &str) -> Result<Vec<Claim>> {
    match raw {
        "quad" => Ok(vec![Claim::QuadForm]),
        "spec" => Ok(vec![Claim::SpecNorm]),
        "both" => Ok(vec![Claim::QuadForm, Claim::SpecNorm]),
        other => Err(LabError::config(format!(
            "`claim` = `{other}` is not quad, spec or both"
        ))),
    }
}

pub(super) fn run(params: &Params, sink: &mut Sink, pool: &Pool) -> Result<(Value, Vec<String>)> {
    let dim = params.usize("dim")?;
    let fam = family(params, "family", dim)?;
    let eps = params.f64("eps")?;
    let seed = params.u64("seed")?;
    let z_mode = match params.str("z")? {
        "random" => ZMode::RandomUnit,
        _ => ZMode::FixedUnit(vector(params, "z", dim)?),
    };
    let mut table = Table::new(COLUMNS);
    let mut fits = serde_json::Map::new();
    let mut lines = Vec::new();
    for claim in claims(params.str("claim")?)? {
        let config = ExperimentConfig {
            family: fam.clone(),
            n_grid: params.usize_grid("n_grid")?,
            eps,
            z_mode: z_mode.clone(),
            trials: params.usize("trials")?,
            master_seed: seed,
            claim,
            k_override: params.opt_f64("k")?,
        };
        let estimates = mc_failure(&config, pool)?;
        let fit = fit_decay(&estimates, eps);
        let (c_hat, r2) = match &fit {
            Ok(f) => (fmt_f64(f.c_hat)?, fmt_f64(f.r_squared)?),
            Err(_) => (String::new(), String::new()),
        };
        for e in &estimates {
            table.push(vec![
                claim.name().to_string(),
                fam.to_string(),
                dim.to_string(),
                e.n_rows.to_string(),
                fmt_f64(eps)?,
                e.trials.to_string(),
                e.failures.to_string(),
                fmt_f64(e.p_hat)?,
                fmt_f64(e.ci_lo)?,
                fmt_f64(e.ci_hi)?,
                fmt_f64(e.threshold)?,
                c_hat.clone(),
                r2.clone(),
                seed.to_string(),
            ]);
            lines.push(format!(
                "{:<4} N={:<6} failures {:>6}/{} p_hat {:.3e} [{:.3e}, {:.3e}]",
                claim.name(),
                e.n_rows,
                e.failures,
                e.trials,
                e.p_hat,
                e.ci_lo,
                e.ci_hi
            ));
        }
        let fit_json = match fit {
            Ok(f) => {
                lines.push(format!(
                    "{} decay: c_hat {:.4}, R^2 {:.4}",
                    claim.name(),
                    f.c_hat,
                    f.r_squared
                ));
                json!({
                    "slope": num(f.slope)?,
                    "intercept": num(f.intercept)?,
                    "c_hat": num(f.c_hat)?,
                    "r_squared": num(f.r_squared)?,
                    "points_used": f.points_used,
                })
            }
            Err(e) => {
                lines.push(format!("{} decay: no fit ({e})", claim.name()));
                json!({ "error": e.to_string() })
            }
        };
        fits.insert(claim.name().to_string(), fit_json);
    }
    sink.table("theorem1.csv", &table)?;
    let mut summary = json!({
        "family": fam.to_string(),
        "n": dim,
        "eps": num(eps)?,
        "k": num(params.opt_f64("k")?.unwrap_or(fam.k_bound))?,
        "seed": seed,
        "rows": table.to_json(),
        "fits": fits,
    });
    sink.json("theorem1.json", &summary)?;

    if params.bool("union.enabled")? {
        let (gap, gap_lines) = union_gap(params, sink, pool)?;
        summary["union_gap"] = gap;
        lines.extend(gap_lines);
    }
    Ok((summary, lines))
}

fn n_star_cell(n: NStar) -> String {
    n.0.map(|v| v.to_string()).unwrap_or_default()
}

fn union_gap(params: &Params, sink: &mut Sink, pool: &Pool) -> Result<(Value, Vec<String>)> {
    let config = UnionGapConfig {
        dims: params.usize_grid("union.dims")?,
        n_grid: params.usize_grid("union.n_grid")?,
        eps: params.f64("union.eps")?,
        trials: params.usize("union.trials")?,
        master_seed: params.u64("seed")?,
    };
    let kind: FamilyKind = params.str("union.family")?.parse()?;
    let rows: Vec<GapRow> = union_bound_gap(&config, |dim| FamilySpec::new(kind.clone(), dim), pool)?;

    let mut cells = Table::new(GAP_COLUMNS);
    let mut stars = Table::new(&["n", "N_star_quad", "N_star_spec", "saturated_quad", "saturated_spec"]);
    let mut lines = Vec::new();
    for row in &rows {
        for c in &row.cells {
            cells.push(vec![
                c.dim.to_string(),
                c.n_rows.to_string(),
                fmt_f64(config.eps)?,
                config.trials.to_string(),
                fmt_f64(c.quad.threshold)?,
                c.quad.failures.to_string(),
                fmt_f64(c.quad.p_hat)?,
                fmt_f64(c.quad.ci_lo)?,
                fmt_f64(c.quad.ci_hi)?,
                c.spec.failures.to_string(),
                fmt_f64(c.spec.p_hat)?,
                fmt_f64(c.spec.ci_lo)?,
                fmt_f64(c.spec.ci_hi)?,
                c.domination_violations.to_string(),
                config.master_seed.to_string(),
            ]);
        }
        stars.push(vec![
            row.dim.to_string(),
            n_star_cell(row.n_star_quad),
            n_star_cell(row.n_star_spec),
            row.n_star_quad.saturated().to_string(),
            row.n_star_spec.saturated().to_string(),
        ]);
        let show = |n: NStar| n.0.map_or_else(|| "saturated".to_string(), |v| v.to_string());
        lines.push(format!(
            "n={:<3} N*_quad {:>9}  N*_spec {:>9}",
            row.dim,
            show(row.n_star_quad),
            show(row.n_star_spec)
        ));
    }
    sink.table("union_gap.csv", &cells)?;
    sink.table("union_nstar.csv", &stars)?;
    let value = json!({
        "eps": num(config.eps)?,
        "trials": config.trials,
        "family": params.str("union.family")?,
        "cells": cells.to_json(),
        "n_star": stars.to_json(),
    });
    sink.json("union_gap.json", &value)?;
    Ok((value, lines))
}
