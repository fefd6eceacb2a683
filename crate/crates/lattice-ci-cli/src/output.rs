//! CSV output: fixed column sets per subcommand, header always present,
//! floats printed with 10 significant digits.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

/// 10 significant digits, deterministic across platforms.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.9e}")
}

pub fn open_output(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

pub fn write_csv(
    out: &mut dyn Write,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> io::Result<()> {
    writeln!(out, "{}", header.join(","))?;
    for row in rows {
        debug_assert_eq!(row.len(), header.len());
        writeln!(out, "{}", row.join(","))?;
    }
    out.flush()
}
