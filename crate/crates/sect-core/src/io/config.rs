//! Flat `key = value` configuration files.
//!
//! Full-line comments start with `#` or `;`. Keys are restricted to
//! `[A-Za-z0-9_.-]` and may appear only once.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::parse(line_no, format!("expected `key = value`, got `{line}`")))?;
        let key = key.trim();
        let value = value.trim();
        if key.is_empty() {
            return Err(Error::parse(line_no, "empty key"));
        }
        if !key
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '-'))
        {
            return Err(Error::parse(
                line_no,
                format!("key `{key}` contains invalid characters"),
            ));
        }
        if map.insert(key.to_string(), value.to_string()).is_some() {
            return Err(Error::parse(line_no, format!("duplicate key `{key}`")));
        }
    }
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_keys_and_values() {
        let map = parse_config("# header\nalpha = 0.05\nseed=42\n\n; note\nepsilons = 0,0.1\n")
            .unwrap();
        assert_eq!(map["alpha"], "0.05");
        assert_eq!(map["seed"], "42");
        assert_eq!(map["epsilons"], "0,0.1");
    }

    #[test]
    fn rejects_duplicates_and_garbage() {
        assert!(parse_config("a = 1\na = 2\n").is_err());
        assert!(parse_config("just words\n").is_err());
        assert!(parse_config(" = 3\n").is_err());
        assert!(parse_config("bad key = 3\n").is_err());
    }
}
