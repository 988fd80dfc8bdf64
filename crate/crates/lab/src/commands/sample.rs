use serde_json::{json, Value};
use subgauss_core::deviation::spectral_summary;
use subgauss_core::samplers::sample_ensemble;

use super::{family, Sink};
use crate::config::{Key, Params};
use crate::error::Result;
use crate::output::{fmt_f64, num};

pub(super) const SCHEMA: &[Key] = &[
    ("family", Some("standard_gaussian")),
    ("dim", Some("8")),
    ("rows", Some("100")),
];

pub(super) fn run(params: &Params, sink: &mut Sink) -> Result<(Value, Vec<String>)> {
    let dim = params.usize("dim")?;
    let rows = params.usize("rows")?;
    let seed = params.u64("seed")?;
    let fam = family(params, "family", dim)?;
    let ensemble = sample_ensemble(&fam, rows, seed)?;
    let descriptor = ensemble.descriptor();

    let path = sink.path("ensemble.csv");
    let mut w = csv::WriterBuilder::new().flexible(true).from_path(&path)?;
    w.write_record(["n", "N", "family"])?;
    w.write_record([dim.to_string(), rows.to_string(), descriptor.clone()])?;
    for j in 0..rows {
        let row = ensemble
            .rows
            .row(j)
            .iter()
            .map(|&x| fmt_f64(x))
            .collect::<Result<Vec<_>>>()?;
        w.write_record(&row)?;
    }
    w.flush()
        .map_err(|e| crate::error::LabError::io(format!("writing {}", path.display()), e))?;

    let s = spectral_summary(&ensemble)?;
    let summary = json!({
        "n": dim,
        "N": rows,
        "family": descriptor,
        "seed": seed,
        "k_bound": num(fam.k_bound)?,
        "spec_norm_d": num(s.spec_norm_d)?,
        "lam_min_gram": num(s.lam_min_gram)?,
        "lam_max_gram": num(s.lam_max_gram)?,
        "sigma_min_w": num(s.sigma_min_w)?,
        "sigma_max_w": num(s.sigma_max_w)?,
    });
    sink.json("summary.json", &summary)?;
    let lines = vec![
        format!("{rows} x {dim} rows from {descriptor} (seed {seed})"),
        format!(
            "||D|| = {:.6}, gram eigenvalues in [{:.6}, {:.6}]",
            s.spec_norm_d, s.lam_min_gram, s.lam_max_gram
        ),
    ];
    Ok((summary, lines))
}
