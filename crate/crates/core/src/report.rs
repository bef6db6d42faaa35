//! Output formatting: CSV files, the plain-text comparison table and the
//! run manifest. All output is deterministic for a given input.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use crate::config::RunConfig;
use crate::pipeline::TableRow;

/// Twelve significant digits in scientific notation. Missing values are
/// written as empty fields.
pub fn format_value(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{x:.11e}"),
        None => String::new(),
    }
}

pub fn csv_string(header: &[&str], rows: &[Vec<Option<f64>>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let fields: Vec<String> = row.iter().map(|&v| format_value(v)).collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<Option<f64>>]) -> io::Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, csv_string(header, rows))
}

/// Transposes optional columns into rows; a `None` column is blank throughout.
pub fn columns_to_rows(columns: &[Option<&[f64]>]) -> Vec<Vec<Option<f64>>> {
    let len = columns.iter().flatten().map(|c| c.len()).max().unwrap_or(0);
    (0..len)
        .map(|i| {
            columns
                .iter()
                .map(|c| c.and_then(|c| c.get(i).copied()))
                .collect()
        })
        .collect()
}

pub const MANIFEST_NAME: &str = "manifest.txt";

pub fn manifest_string(command: &str, cfg: &RunConfig) -> String {
    let mut s = String::from("# whlpa run manifest\n");
    writeln!(s, "version={}", crate::VERSION).unwrap();
    writeln!(s, "command={command}").unwrap();
    s.push_str(&cfg.to_kv());
    s
}

pub fn write_manifest(command: &str, cfg: &RunConfig) -> io::Result<PathBuf> {
    fs::create_dir_all(&cfg.out_dir)?;
    let path = cfg.out_dir.join(MANIFEST_NAME);
    fs::write(&path, manifest_string(command, cfg))?;
    Ok(path)
}

/// Fixed-width text rendering of the comparison table.
pub fn format_table(rows: &[TableRow]) -> String {
    let mut s = String::new();
    let header: Vec<String> = TableRow::HEADER
        .iter()
        .map(|h| format!("{h:>12}"))
        .collect();
    writeln!(s, "{}", header.join(" ")).unwrap();
    for row in rows {
        let cells: Vec<String> = row
            .values()
            .iter()
            .map(|v| match v {
                Some(x) => format!("{x:>12.6}"),
                None => format!("{:>12}", "-"),
            })
            .collect();
        writeln!(s, "{}", cells.join(" ")).unwrap();
    }
    s
}
