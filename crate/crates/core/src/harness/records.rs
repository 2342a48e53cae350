use std::io::Write;

use crate::error::{Error, Result};

/// One row of an experiment CSV: one statistic of one replicate at one `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentRecord {
    pub n: usize,
    pub replicate: u64,
    pub seed: u64,
    pub statistic: &'static str,
    pub value: f64,
    /// Analytic companion value; NaN when there is none.
    pub target: f64,
    pub mode: &'static str,
    /// Milliseconds spent on the replicate; written only when timing is on.
    pub wall_ms: f64,
}

pub const HEADER: [&str; 7] = ["n", "replicate", "seed", "statistic", "value", "target", "mode"];

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// Writes `# comment` lines, then the header row and the records.
pub fn write_records<W: Write>(mut w: W, comment: &str, records: &[ExperimentRecord], timing: bool) -> Result<()> {
    for line in comment.lines() {
        writeln!(w, "# {line}")?;
    }
    let mut out = csv::Writer::from_writer(w);
    let mut header = HEADER.to_vec();
    if timing {
        header.push("wall_ms");
    }
    out.write_record(&header).map_err(csv_err)?;
    for r in records {
        let mut row = vec![
            r.n.to_string(),
            r.replicate.to_string(),
            r.seed.to_string(),
            r.statistic.to_string(),
            r.value.to_string(),
            r.target.to_string(),
            r.mode.to_string(),
        ];
        if timing {
            row.push(format!("{:.3}", r.wall_ms));
        }
        out.write_record(&row).map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

/// Reads rows written by [`write_records`] back as string fields, skipping
/// comment lines.
pub fn read_rows(text: &str) -> Result<Vec<Vec<String>>> {
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    reader
        .records()
        .map(|r| r.map(|rec| rec.iter().map(str::to_string).collect()).map_err(csv_err))
        .collect()
}

/// Per-`n` mean of one statistic, for the plot file.
pub fn means_by_n(records: &[ExperimentRecord], statistic: &str) -> Vec<(usize, f64)> {
    let mut out: Vec<(usize, f64, usize)> = Vec::new();
    for r in records.iter().filter(|r| r.statistic == statistic) {
        match out.last_mut() {
            Some((n, sum, count)) if *n == r.n => {
                *sum += r.value;
                *count += 1;
            }
            _ => out.push((r.n, r.value, 1)),
        }
    }
    out.into_iter().map(|(n, s, c)| (n, s / c as f64)).collect()
}

pub fn write_plot<W: Write>(mut w: W, points: &[(usize, f64)]) -> Result<()> {
    for (n, v) in points {
        writeln!(w, "{n} {v}")?;
    }
    Ok(())
}
