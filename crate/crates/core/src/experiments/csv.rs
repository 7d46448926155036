//! CSV rendering with a `# meta` provenance header. Output is a pure
//! function of the config: no timestamps, worker counts, or host details,
//! so reruns are byte-identical.

use std::fmt::Write as _;

use super::config::ExperimentConfig;

/// Library version recorded in output metadata.
pub const CORE_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Shortest decimal that round-trips; integers print without a point.
pub fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

/// A CSV document: meta lines, a header row, data rows.
#[derive(Debug, Clone)]
pub struct CsvTable {
    meta: Vec<(String, String)>,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(columns: &[&str]) -> Self {
        CsvTable {
            meta: Vec::new(),
            header: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    /// Standard provenance block shared by every experiment output.
    pub fn with_provenance(columns: &[&str], config: &ExperimentConfig, hash: &str) -> Self {
        let mut table = CsvTable::new(columns);
        table.meta("kind", config.kind.as_str());
        table.meta("config_hash", hash);
        table.meta("master_seed", config.master_seed.to_string());
        table.meta("instance_seed", config.instance.seed.to_string());
        table.meta("scale_factor", fmt_f64(config.scale_factor));
        table.meta("core_version", CORE_VERSION);
        table.meta("rng", crate::rng::ALGORITHM);
        table
    }

    pub fn meta(&mut self, key: &str, value: impl Into<String>) {
        self.meta.push((key.to_string(), value.into()));
    }

    pub fn row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.header.len());
        self.rows.push(cells);
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.meta {
            writeln!(out, "# meta {k}={v}").unwrap();
        }
        writeln!(out, "{}", self.header.join(",")).unwrap();
        for row in &self.rows {
            writeln!(out, "{}", row.join(",")).unwrap();
        }
        out
    }
}
