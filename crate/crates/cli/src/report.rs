//! JSON report envelope and output routing.

use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::config::RunConfig;
use crate::CliError;

pub struct Output {
    pub command: &'static str,
    /// The inputs after defaults and config values are applied.
    pub arguments: Value,
    pub config: RunConfig,
    pub result: Value,
    pub summary: String,
    pub code: u8,
    /// Printed to standard error when present.
    pub message: Option<String>,
}

#[derive(Serialize)]
struct Envelope<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    arguments: &'a Value,
    config: &'a RunConfig,
    exit_code: u8,
    result: &'a Value,
}

pub fn render(out: &Output) -> String {
    let env = Envelope {
        tool: "densclone",
        version: env!("CARGO_PKG_VERSION"),
        command: out.command,
        arguments: &out.arguments,
        config: &out.config,
        exit_code: out.code,
        result: &out.result,
    };
    let mut s = serde_json::to_string_pretty(&env).expect("report values serialize");
    s.push('\n');
    s
}

pub fn emit(out: &Output, report: Option<&Path>, summary: bool) -> Result<(), CliError> {
    if let Some(msg) = &out.message {
        eprintln!("{msg}");
    }
    let text = render(out);
    match report {
        Some(path) => std::fs::write(path, &text)
            .map_err(|e| CliError::Usage(format!("cannot write report {}: {e}", path.display())))?,
        None if !summary => print!("{text}"),
        None => {}
    }
    if summary {
        print!("{}", out.summary);
    }
    Ok(())
}

/// Left-aligned text table with a header row.
pub fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| -> String {
        let parts: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        parts.join("  ").trim_end().to_string() + "\n"
    };
    let mut s = line(header.to_vec());
    s += &line(widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().iter().map(String::as_str).collect());
    for row in rows {
        s += &line(row.iter().map(String::as_str).collect());
    }
    s
}
