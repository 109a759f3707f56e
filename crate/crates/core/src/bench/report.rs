//! CSV sample rows and JSON summaries.
//!
//! The CSV starts with one `# generated <unix seconds>` line; everything after
//! it depends only on the configuration and seed.

use std::io::{BufRead, BufReader, Read, Write};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use super::SampleRow;
use crate::error::Result;

const STAMP_PREFIX: &str = "# generated ";

pub fn write_rows<W: Write>(mut out: W, rows: &[SampleRow]) -> Result<()> {
    let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    writeln!(out, "{STAMP_PREFIX}{secs}")?;
    let mut writer = csv::Writer::from_writer(out);
    for row in rows {
        writer.serialize(row)?;
    }
    if rows.is_empty() {
        writer.write_record(["seed", "basis", "t", "m", "budget", "residual", "sigma", "d", "ratio_sigma", "ratio_d"])?;
    }
    writer.flush()?;
    Ok(())
}

/// Reads rows written by [`write_rows`]; the stamp line is optional.
pub fn read_rows<R: Read>(input: R) -> Result<Vec<SampleRow>> {
    let mut reader = BufReader::new(input);
    let mut first = String::new();
    reader.read_line(&mut first)?;
    let body: Box<dyn Read> = if first.starts_with(STAMP_PREFIX) {
        Box::new(reader)
    } else {
        Box::new(std::io::Cursor::new(first.into_bytes()).chain(reader))
    };
    let mut rows = Vec::new();
    for row in csv::Reader::from_reader(body).deserialize() {
        rows.push(row?);
    }
    Ok(rows)
}

/// Pretty JSON followed by a newline.
pub fn write_summary<W: Write, T: Serialize + ?Sized>(mut out: W, summary: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, summary)?;
    writeln!(out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(seed: u64, ratio: Option<f64>) -> SampleRow {
        SampleRow {
            seed,
            basis: "lp:2:4".into(),
            t: 0.5,
            m: 2,
            budget: "count:2".into(),
            residual: 0.1 + 0.2,
            sigma: 1.0 / 3.0,
            d: 0.5,
            ratio_sigma: ratio,
            ratio_d: ratio.map(|r| r / 2.0),
        }
    }

    #[test]
    fn rows_round_trip() {
        let rows = vec![row(1, Some(0.9)), row(2, None)];
        let mut buf = Vec::new();
        write_rows(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(STAMP_PREFIX));
        assert!(text.lines().nth(1).unwrap().starts_with("seed,basis,t,m,budget,residual"));
        assert_eq!(read_rows(&buf[..]).unwrap(), rows);
    }

    #[test]
    fn empty_files_keep_the_header() {
        let mut buf = Vec::new();
        write_rows(&mut buf, &[]).unwrap();
        assert!(read_rows(&buf[..]).unwrap().is_empty());
    }
}
