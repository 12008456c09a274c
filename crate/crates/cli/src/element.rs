//! Element files: a header line, then the terms as `[[exponents, [s, index]], ...]`.

use serde_json::{json, Value};
use steenres::{FreeElement, Resolution};

pub const FORMAT: &str = "steenres-element";
pub const VERSION: u64 = 1;

pub fn render(x: &FreeElement) -> String {
    format!(
        "{}\n{}\n",
        json!({"format": FORMAT, "version": VERSION}),
        x.to_json()
    )
}

pub fn parse(text: &str, res: &Resolution) -> Result<FreeElement, String> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: Value = serde_json::from_str(lines.next().ok_or("empty element file")?)
        .map_err(|e| format!("header: {e}"))?;
    if header.get("format").and_then(Value::as_str) != Some(FORMAT) {
        return Err("not a steenres element file".into());
    }
    match header.get("version").and_then(Value::as_u64) {
        Some(VERSION) => {}
        other => return Err(format!("unsupported element file version {other:?}")),
    }
    let body = lines.next().ok_or("missing terms line")?;
    if lines.next().is_some() {
        return Err("trailing data after the terms line".into());
    }
    let terms: Value = serde_json::from_str(body).map_err(|e| format!("terms: {e}"))?;
    FreeElement::from_json(&terms, res)
}
