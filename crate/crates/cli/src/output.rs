//! Result envelopes. JSON is produced from ordered maps only, so identical
//! inputs give byte-identical output.

use serde::Serialize;
use serde_json::Value;

use crate::config::RunConfig;

pub const TOOL: &str = "thhforge";
pub const SCHEMA_VERSION: u32 = 1;
pub const SCHEMA: &str = include_str!("../schema/output.schema.json");

#[derive(Serialize)]
pub struct Envelope<'a> {
    pub tool: &'static str,
    pub schema_version: u32,
    pub command: &'a str,
    pub config: &'a RunConfig,
    pub result: Value,
}

/// Pretty JSON with a trailing newline.
pub fn envelope_json(command: &str, config: &RunConfig, result: Value) -> anyhow::Result<String> {
    let env = Envelope {
        tool: TOOL,
        schema_version: SCHEMA_VERSION,
        command,
        config,
        result,
    };
    // round-trip through Value so every object has sorted keys
    let v = serde_json::to_value(&env)?;
    let mut s = serde_json::to_string_pretty(&v)?;
    s.push('\n');
    Ok(s)
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header.iter().map(|h| csv_field(h)).collect::<Vec<_>>().join(",");
    out.push('\n');
    for r in rows {
        out.push_str(&r.iter().map(|c| csv_field(c)).collect::<Vec<_>>().join(","));
        out.push('\n');
    }
    out
}

/// Left-aligned text table.
pub fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (i, c) in r.iter().enumerate() {
            widths[i] = widths[i].max(c.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let s: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
            .collect();
        s.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(header.to_vec());
    for r in rows {
        out.push_str(&line(r.iter().map(String::as_str).collect()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_quotes() {
        assert_eq!(csv(&["a", "b"], &[vec!["x,y".into(), "z".into()]]), "a,b\n\"x,y\",z\n");
    }
}
