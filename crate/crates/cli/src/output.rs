use std::io::Write;

use anyhow::{Context, Result};
use serde_json::Value;

use crate::{Common, Format};

/// Whether text output may use ANSI colour (`QUALRED_COLOR=1|always|true`).
pub fn color_enabled() -> bool {
    std::env::var("QUALRED_COLOR")
        .map(|v| matches!(v.to_ascii_lowercase().as_str(), "1" | "always" | "true" | "yes"))
        .unwrap_or(false)
}

/// Colours a verdict word green when it is good and red otherwise.
pub fn paint(word: &str, good: bool) -> String {
    if color_enabled() {
        let code = if good { 32 } else { 31 };
        format!("\x1b[{code}m{word}\x1b[0m")
    } else {
        word.to_string()
    }
}

pub struct Report<'a> {
    pub json: Value,
    pub csv: &'a dyn Fn() -> Vec<Vec<String>>,
    pub text: &'a dyn Fn() -> String,
}

pub fn emit(common: &Common, default: Format, report: Report<'_>) -> Result<()> {
    let body = match common.format.unwrap_or(default) {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&report.json)?;
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for row in (report.csv)() {
                w.write_record(&row)?;
            }
            String::from_utf8(w.into_inner()?)?
        }
        Format::Text => {
            let mut s = (report.text)();
            if !s.ends_with('\n') {
                s.push('\n');
            }
            s
        }
    };
    match &common.out {
        Some(path) => std::fs::write(path, body).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(body.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

/// Writes already formatted CSV text.
pub fn emit_raw(common: &Common, body: String) -> Result<()> {
    match &common.out {
        Some(path) => std::fs::write(path, body).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(body.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

pub fn row<I: IntoIterator<Item = S>, S: Into<String>>(cells: I) -> Vec<String> {
    cells.into_iter().map(Into::into).collect()
}
