//! Message-list text format: one hex value per line.
//!
//! Blank lines and lines starting with `#` are skipped; an optional `0x`
//! prefix is accepted. Output is lowercase, at least two digits, ascending.

use crate::codec::MessageWord;
use crate::error::{Error, Result};

/// Parses a message list; values must fit in `data_bits`. Duplicates are
/// dropped and the result is sorted.
pub fn parse_messages(text: &str, data_bits: u32) -> Result<Vec<MessageWord>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let digits = line
            .strip_prefix("0x")
            .or_else(|| line.strip_prefix("0X"))
            .unwrap_or(line);
        let value = u64::from_str_radix(digits, 16).map_err(|e| Error::Parse {
            line: i + 1,
            msg: format!("{line:?} is not a hex value: {e}"),
        })?;
        out.push(MessageWord::new(value, data_bits).map_err(|e| Error::Parse {
            line: i + 1,
            msg: e.to_string(),
        })?);
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

pub fn format_messages(msgs: &[MessageWord]) -> String {
    let mut sorted = msgs.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    sorted.iter().map(|m| format!("{m}\n")).collect()
}
