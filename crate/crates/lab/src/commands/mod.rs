mod example;
mod net;
mod norm;
mod sample;
mod theorem1;

use std::path::{Path, PathBuf};

use serde_json::Value;
use subgauss_core::samplers::{FamilyKind, FamilySpec};

use crate::config::{Config, Key, Params};
use crate::error::{LabError, Result};
use crate::output::{write_json, Table};
use crate::pool::Pool;
use crate::Outcome;

pub(crate) fn schema(command: &str, config: &Config) -> Result<Vec<Key>> {
    let mut keys: Vec<Key> = vec![("seed", Some("0"))];
    keys.extend_from_slice(match command {
        "sample" => sample::SCHEMA,
        "norm" => norm::SCHEMA,
        "net" => net::SCHEMA,
        "theorem1" => theorem1::SCHEMA,
        "example" => return example::schema(config).map(|k| [keys, k].concat()),
        other => return Err(LabError::config(format!("unknown command `{other}`"))),
    });
    Ok(keys)
}

pub(crate) fn run(command: &str, params: &Params, out: &Path, pool: &Pool) -> Result<Outcome> {
    let mut sink = Sink::new(out);
    let (summary, lines) = match command {
        "sample" => sample::run(params, &mut sink)?,
        "norm" => norm::run(params, &mut sink)?,
        "net" => net::run(params, &mut sink)?,
        "theorem1" => theorem1::run(params, &mut sink, pool)?,
        "example" => example::run(params, &mut sink, pool)?,
        other => return Err(LabError::config(format!("unknown command `{other}`"))),
    };
    Ok(Outcome {
        summary,
        lines,
        outputs: sink.paths,
    })
}

/// Collects the files a command writes under the output directory.
pub(crate) struct Sink {
    dir: PathBuf,
    paths: Vec<PathBuf>,
}

impl Sink {
    fn new(dir: &Path) -> Self {
        Sink {
            dir: dir.to_path_buf(),
            paths: Vec::new(),
        }
    }

    fn path(&mut self, name: &str) -> PathBuf {
        let p = self.dir.join(name);
        self.paths.push(p.clone());
        p
    }

    fn json(&mut self, name: &str, value: &Value) -> Result<()> {
        let p = self.path(name);
        write_json(&p, value)
    }

    fn table(&mut self, name: &str, table: &Table) -> Result<()> {
        let p = self.path(name);
        table.write(&p)
    }
}

fn family(params: &Params, key: &str, dim: usize) -> Result<FamilySpec> {
    let kind: FamilyKind = params.str(key)?.parse()?;
    Ok(FamilySpec::new(kind, dim)?)
}

/// `e1`, `e2`, ... or a comma-separated vector of length `dim`.
fn vector(params: &Params, key: &str, dim: usize) -> Result<Vec<f64>> {
    let raw = params.str(key)?.trim();
    if let Some(i) = raw.strip_prefix('e').and_then(|s| s.parse::<usize>().ok()) {
        if i == 0 || i > dim {
            return Err(LabError::config(format!("`{key}` = `{raw}` is outside 1..={dim}")));
        }
        let mut v = vec![0.0; dim];
        v[i - 1] = 1.0;
        return Ok(v);
    }
    let v = params.f64_list(key)?;
    if v.len() != dim {
        return Err(LabError::config(format!(
            "`{key}` has {} entries, expected {dim}",
            v.len()
        )));
    }
    Ok(v)
}
