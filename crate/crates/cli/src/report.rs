//! Column-aligned CSV assembly with deterministic number formatting.
//!
//! Data cells use the shortest round-trip rendering of `f64`, so a file is
//! byte-stable across runs as long as the computed values are. Timing
//! columns are the deliberate exception; their headers carry a `_us`
//! suffix and readers should treat them as informational.

use std::io;
use std::path::Path;

/// Cell used where a value does not exist, e.g. a term count for a window
/// on which the expansion never meets the tolerance.
pub const DASH: &str = "-";

/// Shortest decimal string that parses back to exactly `x`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

/// Exponent rendering for tolerances, e.g. `1e-7`.
pub fn fmt_eps(x: f64) -> String {
    format!("{x:e}")
}

/// `Some` value as a number, `None` as [`DASH`].
pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_else(|| DASH.to_string())
}

/// Rows under a fixed header, rendered as comma-separated lines.
#[derive(Clone, Debug)]
pub struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        assert!(!header.is_empty(), "a table needs at least one column");
        Self { header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.header.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.header.join(","));
        out.push('\n');
        for row in &self.rows {
            for cell in row {
                assert!(
                    !cell.contains(',') && !cell.contains('\n'),
                    "cells must not need quoting"
                );
            }
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: &Path) -> io::Result<()> {
        std::fs::write(path, self.to_csv())
    }
}
