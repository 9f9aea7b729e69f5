use crate::config::{Experiment, ExperimentConfig};
use mfunc_core::Result;
use serde::Serialize;
use serde_json::{Map, Value};
use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

pub const SCHEMA: &str = "mfunc-report/1";

/// A computed value compared against an oracle.
#[derive(Debug, Clone, Serialize)]
pub struct Gap {
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Everything an experiment produces besides its data files.
#[derive(Debug, Default)]
pub struct Outcome {
    pub outputs: Map<String, Value>,
    pub gaps: BTreeMap<String, Gap>,
    pub warnings: Vec<String>,
}

impl Outcome {
    pub fn output(&mut self, key: &str, value: impl Serialize) {
        self.outputs.insert(key.to_string(), serde_json::to_value(value).expect("serialisable output"));
    }

    pub fn gap(&mut self, key: &str, value: f64, tolerance: f64) {
        self.gaps.insert(key.to_string(), Gap { value, tolerance, pass: value <= tolerance });
    }
}

#[derive(Serialize)]
struct Report<'a> {
    schema: &'static str,
    experiment: &'static str,
    version: &'static str,
    config: &'a ExperimentConfig,
    outputs: &'a Map<String, Value>,
    oracle_gaps: &'a BTreeMap<String, Gap>,
    warnings: &'a [String],
    files: &'a [String],
}

/// Output directory with a record of the files written into it.
pub struct OutDir {
    dir: PathBuf,
    files: Vec<String>,
}

/// Number formatting for CSV cells: plain decimals in the usual range,
/// scientific notation otherwise. Both are shortest round-trip forms.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-4..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

impl OutDir {
    pub fn create(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(Self { dir: dir.to_path_buf(), files: Vec::new() })
    }

    pub fn path(&mut self, name: &str) -> PathBuf {
        self.files.push(name.to_string());
        self.dir.join(name)
    }

    pub fn writer(&mut self, name: &str) -> Result<BufWriter<File>> {
        Ok(BufWriter::new(File::create(self.path(name))?))
    }

    /// Writes a CSV file with a mandatory header row.
    pub fn csv<I, R>(&mut self, name: &str, header: &[&str], rows: I) -> Result<()>
    where
        I: IntoIterator<Item = R>,
        R: IntoIterator<Item = String>,
    {
        let mut w = csv::Writer::from_writer(self.writer(name)?);
        w.write_record(header)?;
        for row in rows {
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn json(&mut self, name: &str, value: &impl Serialize) -> Result<()> {
        let mut w = self.writer(name)?;
        serde_json::to_writer_pretty(&mut w, value)?;
        writeln!(w)?;
        w.flush()?;
        Ok(())
    }

    /// Writes `report.json` (deterministic) and `timing.json`.
    pub fn finish(mut self, experiment: Experiment, config: &ExperimentConfig, outcome: &Outcome, seconds: f64) -> Result<()> {
        let mut files = self.files.clone();
        files.sort();
        let report = Report {
            schema: SCHEMA,
            experiment: experiment.name(),
            version: env!("CARGO_PKG_VERSION"),
            config,
            outputs: &outcome.outputs,
            oracle_gaps: &outcome.gaps,
            warnings: &outcome.warnings,
            files: &files,
        };
        self.json("report.json", &report)?;
        self.json("timing.json", &serde_json::json!({ "experiment": experiment.name(), "wall_seconds": seconds }))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::num;

    #[test]
    fn number_format() {
        assert_eq!(num(0.0), "0");
        assert_eq!(num(1.5), "1.5");
        assert_eq!(num(1e-12), "1e-12");
        assert_eq!(num(-2.5e20), "-2.5e20");
        assert_eq!(num(0.1).parse::<f64>().unwrap(), 0.1);
    }
}
