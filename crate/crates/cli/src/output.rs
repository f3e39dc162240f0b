//! Rendering and file helpers shared by the commands.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

use crate::{CliError, CliResult};

pub use ktrace_core::bounds::fmt17;

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

/// Writes `text` to `out`, or to stdout when no path is given.
pub fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(p) => write_file(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn write_file(path: &Path, text: &str) -> CliResult<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
    }
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn ensure_dir(path: &Path) -> CliResult<()> {
    fs::create_dir_all(path).map_err(|e| CliError::io(path, e))
}

pub fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    serde_json::from_str(&read_text(path)?).map_err(|source| CliError::Json {
        path: path.to_path_buf(),
        source,
    })
}

/// `# key=value` lines for CSV headers.
pub fn csv_echo(config: &Value) -> String {
    let mut out = String::new();
    if let Value::Object(map) = config {
        for (k, v) in map {
            out.push_str(&format!("# {k}={v}\n"));
        }
    }
    out
}

pub fn md_echo(config: &Value) -> String {
    format!("Config: `{config}`\n\n")
}

/// Markdown table from a header and rows.
pub fn md_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = format!("| {} |\n", header.join(" | "));
    out.push_str(&format!("|{}\n", "---|".repeat(header.len())));
    for r in rows {
        out.push_str(&format!("| {} |\n", r.join(" | ")));
    }
    out
}

pub fn csv_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = format!("{}\n", header.join(","));
    for r in rows {
        out.push_str(&format!("{}\n", r.join(",")));
    }
    out
}

pub fn opt17(v: Option<f64>) -> String {
    v.map(fmt17).unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn echo_lines() {
        let v = serde_json::json!({"seed": 7, "suite": "af"});
        assert_eq!(csv_echo(&v), "# seed=7\n# suite=\"af\"\n");
    }

    #[test]
    fn tables() {
        let rows = vec![vec!["1".to_string(), "2".to_string()]];
        assert_eq!(md_table(&["a", "b"], &rows), "| a | b |\n|---|---|\n| 1 | 2 |\n");
        assert_eq!(csv_table(&["a", "b"], &rows), "a,b\n1,2\n");
    }
}
