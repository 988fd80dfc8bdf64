use serde_json::{json, Value};
use subgauss_core::norms::{
    gaussian_abs_moment, subexponential_norm_scalar, subgaussian_norm_scalar, verify_square_subexp, NormKind,
    ScalarLaw, SQUARE_CHECK_SLACK,
};

use super::{family, vector, Sink};
use crate::config::{Key, Params};
use crate::error::{LabError, Result};
use crate::output::{fmt_f64, num, nums, Table};

pub(super) const SCHEMA: &[Key] = &[
    ("mode", Some("scalar")),
    ("law", Some("gaussian")),
    ("scale", Some("1")),
    ("kind", Some("subgaussian")),
    ("p_max", Some("16")),
    ("samples", Some("1000000")),
    ("family", Some("standard_gaussian")),
    ("dim", Some("4")),
    ("z", Some("e1")),
];

fn law(params: &Params) -> Result<ScalarLaw> {
    let scale = params.f64("scale")?;
    Ok(match params.str("law")? {
        "gaussian" => ScalarLaw::Gaussian { scale },
        "gaussian_squared" => ScalarLaw::GaussianSquared { scale },
        "rademacher" => ScalarLaw::Rademacher,
        "constant" => ScalarLaw::Constant(scale),
        other => return Err(LabError::config(format!("unknown law `{other}`"))),
    })
}

fn kind(params: &Params) -> Result<NormKind> {
    match params.str("kind")? {
        "subgaussian" => Ok(NormKind::SubGaussian),
        "subexponential" => Ok(NormKind::SubExponential),
        other => Err(LabError::config(format!("unknown norm kind `{other}`"))),
    }
}

/// Exact `max_{p <= p_max} p^{-1/α} (E|x|^p)^{1/p}` for each named law.
fn closed_form(law: ScalarLaw, kind: NormKind, p_max: u32) -> f64 {
    let inv_alpha = match kind {
        NormKind::SubGaussian => 0.5,
        NormKind::SubExponential => 1.0,
    };
    let weight = |p: u32| (p as f64).powf(-inv_alpha);
    let sup = |moment: &dyn Fn(u32) -> f64| {
        (1..=p_max)
            .map(|p| weight(p) * moment(p).powf(1.0 / p as f64))
            .fold(0.0, f64::max)
    };
    match law {
        ScalarLaw::Gaussian { scale } => scale.abs() * sup(&gaussian_abs_moment),
        ScalarLaw::GaussianSquared { scale } => scale * scale * sup(&|p| gaussian_abs_moment(2 * p)),
        ScalarLaw::Rademacher => 1.0,
        ScalarLaw::Constant(c) => c.abs(),
    }
}

pub(super) fn run(params: &Params, sink: &mut Sink) -> Result<(Value, Vec<String>)> {
    let p_max = u32::try_from(params.usize("p_max")?).map_err(|_| LabError::config("`p_max` is too large"))?;
    let samples = params.usize("samples")?;
    let seed = params.u64("seed")?;
    match params.str("mode")? {
        "scalar" => scalar(params, sink, p_max, samples, seed),
        "square" => square(params, sink, p_max, samples, seed),
        other => Err(LabError::config(format!("unknown mode `{other}`"))),
    }
}

fn scalar(params: &Params, sink: &mut Sink, p_max: u32, samples: usize, seed: u64) -> Result<(Value, Vec<String>)> {
    let law = law(params)?;
    let kind = kind(params)?;
    let est = match kind {
        NormKind::SubGaussian => subgaussian_norm_scalar(&law, p_max, samples, seed)?,
        NormKind::SubExponential => subexponential_norm_scalar(&law, p_max, samples, seed)?,
    };
    let exact = closed_form(law, kind, p_max);

    let mut table = Table::new(&["p", "value"]);
    for (i, v) in est.per_p_values.iter().enumerate() {
        table.push(vec![(i + 1).to_string(), fmt_f64(*v)?]);
    }
    sink.table("norm.csv", &table)?;
    let summary = json!({
        "law": params.str("law")?,
        "scale": num(params.f64("scale")?)?,
        "kind": params.str("kind")?,
        "value": num(est.value)?,
        "stderr": num(est.stderr)?,
        "argmax_p": est.argmax_p,
        "p_max": est.p_max,
        "samples": est.samples,
        "seed": seed,
        "per_p_values": nums(&est.per_p_values)?,
        "closed_form": num(exact)?,
    });
    sink.json("norm.json", &summary)?;
    let lines = vec![format!(
        "{} norm of {} law: {:.6} +/- {:.6} (closed form {:.6}, p* = {})",
        params.str("kind")?,
        params.str("law")?,
        est.value,
        est.stderr,
        exact,
        est.argmax_p
    )];
    Ok((summary, lines))
}

fn square(params: &Params, sink: &mut Sink, p_max: u32, samples: usize, seed: u64) -> Result<(Value, Vec<String>)> {
    let dim = params.usize("dim")?;
    let fam = family(params, "family", dim)?;
    let z = vector(params, "z", dim)?;
    let check = verify_square_subexp(&fam, &z, p_max, samples, seed)?;
    let bound = 4.0 * check.phi2_of_wz * check.phi2_of_wz;
    let summary = json!({
        "family": fam.to_string(),
        "n": dim,
        "z": nums(&z)?,
        "p_max": p_max,
        "samples": samples,
        "seed": seed,
        "phi2_of_wz": num(check.phi2_of_wz)?,
        "phi1_of_sq": num(check.phi1_of_sq)?,
        "bound": num(bound)?,
        "slack": num(SQUARE_CHECK_SLACK)?,
        "ratio_ok": check.ratio_ok,
    });
    sink.json("square_check.json", &summary)?;
    let lines = vec![format!(
        "centered square: psi1 {:.6} vs 4 psi2^2 = {:.6} ({})",
        check.phi1_of_sq,
        bound,
        if check.ratio_ok { "ok" } else { "violated" }
    )];
    Ok((summary, lines))
}
