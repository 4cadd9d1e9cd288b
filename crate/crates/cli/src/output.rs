//! Row-streaming table output. Every command funnels through one writer so
//! the three formats stay in lockstep: csv and markdown print the cell
//! projection of each row, json prints the serde form of the typed row,
//! one object per line inside one array. Integers stay integers in json;
//! factored values appear as "2^3*5*7" strings everywhere.

use std::io::{self, Write};

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Markdown,
}

pub struct StreamWriter<W: Write> {
    format: Format,
    out: W,
    columns: usize,
    rows: u64,
}

impl<W: Write> StreamWriter<W> {
    /// Writes the table prologue (csv header row, markdown header and
    /// rule, or the opening json bracket) and returns the writer.
    pub fn new(mut out: W, format: Format, headers: &[&str]) -> io::Result<Self> {
        match format {
            Format::Csv => {
                writeln!(out, "{}", headers.join(","))?;
            }
            Format::Markdown => {
                writeln!(out, "| {} |", headers.join(" | "))?;
                writeln!(out, "|{}", " --- |".repeat(headers.len()))?;
            }
            Format::Json => {
                write!(out, "[")?;
            }
        }
        Ok(StreamWriter { format, out, columns: headers.len(), rows: 0 })
    }

    /// One row: `item` feeds json, `cells` feed csv/markdown.
    pub fn row<T: Serialize>(&mut self, item: &T, cells: &[String]) -> io::Result<()> {
        assert_eq!(cells.len(), self.columns, "row width must match the header");
        match self.format {
            Format::Csv => {
                let line: Vec<String> = cells.iter().map(|c| csv_escape(c)).collect();
                writeln!(self.out, "{}", line.join(","))?;
            }
            Format::Markdown => {
                writeln!(self.out, "| {} |", cells.join(" | "))?;
            }
            Format::Json => {
                let sep = if self.rows == 0 { "\n  " } else { ",\n  " };
                let body = serde_json::to_string(item).map_err(io::Error::other)?;
                write!(self.out, "{sep}{body}")?;
            }
        }
        self.rows += 1;
        Ok(())
    }

    /// Closes the table; json needs the trailing bracket.
    pub fn finish(mut self) -> io::Result<u64> {
        if self.format == Format::Json {
            writeln!(self.out, "\n]")?;
        }
        self.out.flush()?;
        Ok(self.rows)
    }
}

fn csv_escape(cell: &str) -> String {
    if cell.contains([',', '"', '\n']) {
        format!("\"{}\"", cell.replace('"', "\"\""))
    } else {
        cell.to_string()
    }
}

/// Witness pairs as a single spreadsheet-safe cell: "3:5 5:9".
pub fn pairs_cell(pairs: &[(u64, u64)]) -> String {
    let parts: Vec<String> = pairs.iter().map(|(p, q)| format!("{p}:{q}")).collect();
    parts.join(" ")
}

/// Cell text for an optional number; absent values print as empty cells.
pub fn opt_cell<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map_or_else(String::new, T::to_string)
}
