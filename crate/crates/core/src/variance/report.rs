//! CSV and JSON serialization of variance rows.
//!
//! CSV files open with `#` comment lines carrying the artifact version and
//! the run configuration, followed by a header row. Absent optionals are
//! empty fields. JSON files hold `{"meta": …, "rows": […]}`.

use std::io::{BufRead, Read, Write};

use serde::{Deserialize, Serialize};

use super::experiment::VarianceRow;
use crate::error::{Error, Result};

pub const CSV_COLUMNS: [&str; 14] = [
    "n",
    "family",
    "cost_kind",
    "scheme",
    "samples",
    "grad_mean",
    "grad_mean_stderr",
    "grad_var",
    "var_ci_lo",
    "var_ci_hi",
    "exact_value",
    "bound_value",
    "seed",
    "wall_time_ms",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportMeta {
    pub version: String,
    pub command: String,
    pub config: serde_json::Value,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VarianceReport {
    pub meta: ReportMeta,
    pub rows: Vec<VarianceRow>,
}

/// `# key value` lines shared by every CSV output.
pub fn write_csv_preamble<W: Write + ?Sized>(w: &mut W, meta: &ReportMeta) -> Result<()> {
    writeln!(w, "# plateau-lab {}", meta.version)?;
    writeln!(w, "# command {}", meta.command)?;
    writeln!(w, "# config {}", serde_json::to_string(&meta.config)?)?;
    Ok(())
}

impl VarianceReport {
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        write_csv_preamble(&mut w, &self.meta)?;
        let mut out = csv::WriterBuilder::new().has_headers(false).from_writer(w);
        out.write_record(CSV_COLUMNS)?;
        for row in &self.rows {
            out.serialize(row)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn write_json<W: Write>(&self, mut w: W) -> Result<()> {
        serde_json::to_writer_pretty(&mut w, self)?;
        writeln!(w)?;
        Ok(())
    }

    /// Reads a CSV written by [`VarianceReport::write_csv`].
    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut reader = std::io::BufReader::new(r);
        let mut comments = Vec::new();
        let mut line = String::new();
        loop {
            line.clear();
            if reader.read_line(&mut line)? == 0 || !line.starts_with('#') {
                break;
            }
            comments.push(line.trim_end().to_string());
        }
        let field = |key: &str| -> Result<String> {
            let prefix = format!("# {key} ");
            comments
                .iter()
                .find_map(|c| c.strip_prefix(&prefix).map(str::to_string))
                .ok_or_else(|| Error::InvalidArgument(format!("missing '{key}' comment line")))
        };
        let meta = ReportMeta {
            version: field("plateau-lab")?,
            command: field("command")?,
            config: serde_json::from_str(&field("config")?)?,
        };
        let header: Vec<&str> = line.trim_end().split(',').collect();
        if header != CSV_COLUMNS {
            return Err(Error::InvalidArgument(format!(
                "unexpected CSV header {header:?}"
            )));
        }
        let mut csv_reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .from_reader(reader);
        let rows = csv_reader
            .deserialize()
            .collect::<std::result::Result<Vec<VarianceRow>, _>>()?;
        Ok(VarianceReport { meta, rows })
    }
}
