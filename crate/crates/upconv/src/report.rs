//! Report files: '#'-prefixed key=value header lines, locale-independent
//! numeric body at 12 significant digits, no timestamps so identical runs
//! produce identical bytes.

use std::io::Write;
use std::path::Path;

use crate::error::Result;

/// 12 significant digits, scientific.
pub fn sig12(x: f64) -> String {
    format!("{x:.11e}")
}

pub struct Report {
    header: Vec<(String, String)>,
    body: String,
}

impl Report {
    pub fn new(command: &str, config_sha256: &str) -> Self {
        let mut header = Vec::new();
        header.push(("tool".to_string(), "upconv".to_string()));
        header.push(("version".to_string(), env!("CARGO_PKG_VERSION").to_string()));
        header.push(("command".to_string(), command.to_string()));
        header.push(("config_sha256".to_string(), config_sha256.to_string()));
        Self { header, body: String::new() }
    }

    pub fn echo(&mut self, key: &str, value: impl std::fmt::Display) -> &mut Self {
        self.header.push((key.to_string(), value.to_string()));
        self
    }

    pub fn echo_num(&mut self, key: &str, value: f64) -> &mut Self {
        self.echo(key, sig12(value))
    }

    pub fn line(&mut self, text: impl AsRef<str>) -> &mut Self {
        self.body.push_str(text.as_ref());
        self.body.push('\n');
        self
    }

    pub fn row(&mut self, values: &[f64]) -> &mut Self {
        let cells: Vec<String> = values.iter().map(|&v| sig12(v)).collect();
        self.line(cells.join(" "))
    }

    pub fn comment(&mut self, text: impl AsRef<str>) -> &mut Self {
        self.body.push_str("# ");
        self.body.push_str(text.as_ref());
        self.body.push('\n');
        self
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.header {
            out.push_str(&format!("# {k}={v}\n"));
        }
        out.push_str(&self.body);
        out
    }

    /// Write to the path, or to stdout when no path is given.
    pub fn emit(&self, out: Option<&Path>) -> Result<()> {
        let text = self.render();
        match out {
            Some(path) => {
                let mut f = std::fs::File::create(path)?;
                f.write_all(text.as_bytes())?;
            }
            None => {
                std::io::stdout().write_all(text.as_bytes())?;
            }
        }
        Ok(())
    }
}
