//! Deterministic report serialization.

use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};

/// Pretty JSON with keys sorted at every level and a trailing newline.
pub fn to_sorted_json<T: Serialize>(value: &T) -> Result<String> {
    // `serde_json::Value` keeps object keys in a BTreeMap, which sorts them.
    let value = serde_json::to_value(value)
        .map_err(|e| Error::InvalidArgument(format!("cannot serialize report: {e}")))?;
    let mut text = serde_json::to_string_pretty(&value)
        .map_err(|e| Error::InvalidArgument(format!("cannot serialize report: {e}")))?;
    text.push('\n');
    Ok(text)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_text(path, &to_sorted_json(value)?)
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Minimal CSV table: header row then one line per row, fields joined by commas.
pub fn csv_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn fmt_opt(value: Option<f64>) -> String {
    value.map(|v| format!("{v:?}")).unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    #[test]
    fn keys_sorted_with_trailing_newline() {
        let mut m = HashMap::new();
        m.insert("zeta", 1);
        m.insert("alpha", 2);
        m.insert("mid", 3);
        let text = to_sorted_json(&m).unwrap();
        let a = text.find("alpha").unwrap();
        let b = text.find("mid").unwrap();
        let c = text.find("zeta").unwrap();
        assert!(a < b && b < c);
        assert!(text.ends_with("}\n"));
    }

    #[test]
    fn csv_layout() {
        let t = csv_table(&["a", "b"], &[vec!["1".into(), "".into()]]);
        assert_eq!(t, "a,b\n1,\n");
        assert_eq!(fmt_opt(Some(1.0)), "1.0");
        assert_eq!(fmt_opt(None), "");
    }
}
