//! Atomic output files and the tables written by each command.

use std::io::Write;
use std::path::Path;

use plateau_core::variance::{write_csv_preamble, ReportMeta, VarianceReport};
use serde::Serialize;

use crate::config::Format;
use crate::CliError;

/// Writes `render`'s bytes to `path` through a sibling temporary file and a
/// rename, or to standard output when `path` is `None`.
pub fn emit<F>(path: Option<&Path>, render: F) -> Result<(), CliError>
where
    F: FnOnce(&mut dyn Write) -> Result<(), CliError>,
{
    let Some(path) = path else {
        let stdout = std::io::stdout();
        let mut lock = stdout.lock();
        render(&mut lock)?;
        return lock.flush().map_err(io_error(Path::new("<stdout>")));
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_error(dir))?;
    {
        let mut buf = std::io::BufWriter::new(tmp.as_file_mut());
        render(&mut buf)?;
        buf.flush().map_err(io_error(path))?;
    }
    tmp.as_file().sync_all().map_err(io_error(path))?;
    tmp.persist(path).map_err(|e| io_error(path)(e.error))?;
    Ok(())
}

fn io_error(path: &Path) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |e| CliError::Io(format!("{}: {e}", path.display()))
}

pub fn write_variance(
    w: &mut dyn Write,
    report: &VarianceReport,
    format: Format,
) -> Result<(), CliError> {
    match format {
        Format::Csv => report.write_csv(w)?,
        Format::Json => report.write_json(w)?,
    }
    Ok(())
}

#[derive(Serialize)]
struct Document<'a, T> {
    meta: &'a ReportMeta,
    rows: &'a [T],
}

/// Any other table: preamble, header row, records; or `{meta, rows}`.
pub fn write_table<T: Serialize>(
    w: &mut dyn Write,
    meta: &ReportMeta,
    columns: &[&str],
    rows: &[T],
    format: Format,
) -> Result<(), CliError> {
    match format {
        Format::Csv => {
            write_csv_preamble(w, meta)?;
            let mut out = csv::WriterBuilder::new().has_headers(false).from_writer(w);
            out.write_record(columns)
                .map_err(plateau_core::Error::from)?;
            for row in rows {
                out.serialize(row).map_err(plateau_core::Error::from)?;
            }
            out.flush().map_err(|e| CliError::Io(e.to_string()))?;
        }
        Format::Json => {
            serde_json::to_writer_pretty(&mut *w, &Document { meta, rows })
                .map_err(plateau_core::Error::from)?;
            writeln!(w).map_err(|e| CliError::Io(e.to_string()))?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn failed_render_leaves_no_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        let r = emit(Some(&path), |w| {
            w.write_all(b"partial").unwrap();
            Err(CliError::Usage("stop".into()))
        });
        assert!(r.is_err());
        assert!(!path.exists());
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
        emit(Some(&path), |w| Ok(w.write_all(b"done\n").unwrap())).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "done\n");
    }
}
