use std::fmt;
use std::path::Path;

use serde_json::{Map, Value};

#[derive(Debug)]
pub struct CliError {
    pub flag: Option<&'static str>,
    pub message: String,
}

impl CliError {
    pub fn flag(flag: &'static str, message: impl fmt::Display) -> Self {
        Self { flag: Some(flag), message: message.to_string() }
    }

    pub fn runtime(message: impl fmt::Display) -> Self {
        Self { flag: None, message: message.to_string() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let message = self.message.replace('\n', " ");
        match self.flag {
            Some(flag) => write!(f, "error: {flag}: {message}"),
            None => write!(f, "error: {message}"),
        }
    }
}

/// Rendered output of one subcommand and whether a checked inequality failed.
pub struct Outcome {
    pub text: String,
    pub violation: bool,
}

/// A CSV table preceded by a `# config: {...}` line.
pub struct Table {
    config: Map<String, Value>,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(config: Map<String, Value>, header: &[&str]) -> Self {
        Self { config, header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.header.len());
        self.rows.push(cells);
    }

    pub fn render(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        let body = String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is UTF-8");
        format!("# config: {}\n{body}", Value::Object(self.config.clone()))
    }
}

pub fn num(x: f64) -> String {
    format!("{x:?}")
}

pub fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub fn write_file(path: &Path, text: &str, flag: &'static str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::flag(flag, format!("cannot write {}: {e}", path.display())))
}
