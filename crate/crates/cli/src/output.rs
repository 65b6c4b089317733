use std::io::Write;

use clap::ValueEnum;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Failure of a command: exit status plus the error reported on stderr.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub kind: String,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure { code: 2, kind: "invalid-argument".into(), message: message.into() }
    }

    pub fn io(err: std::io::Error) -> Self {
        Failure { code: 1, kind: "io".into(), message: err.to_string() }
    }

    pub fn report(&self) {
        let body = serde_json::json!({ "error": { "kind": self.kind, "message": self.message } });
        eprintln!("{body}");
    }
}

impl From<lmg_core::Error> for Failure {
    fn from(e: lmg_core::Error) -> Self {
        let code = if matches!(e, lmg_core::Error::InvalidArgument(_)) { 2 } else { 1 };
        Failure { code, kind: e.kind().to_string(), message: e.to_string() }
    }
}

pub type CmdResult = Result<(), Failure>;

pub fn json_string<T: Serialize>(value: &T) -> Result<String, Failure> {
    serde_json::to_string_pretty(value)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| Failure { code: 1, kind: "serialization".into(), message: e.to_string() })
}

pub fn csv_string<T: Serialize>(rows: &[T]) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Failure { code: 1, kind: "serialization".into(), message: e.to_string() })?;
    }
    let bytes = w.into_inner().map_err(|e| Failure { code: 1, kind: "serialization".into(), message: e.to_string() })?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Writes `text` to `path`, or to stdout when no path is given.
pub fn emit(text: &str, path: Option<&std::path::Path>) -> CmdResult {
    match path {
        Some(p) => std::fs::write(p, text).map_err(Failure::io),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(Failure::io)?;
            out.flush().map_err(Failure::io)
        }
    }
}

/// JSON of `full`, or CSV of `rows`.
pub fn emit_table<J: Serialize, R: Serialize>(format: Format, full: &J, rows: &[R]) -> CmdResult {
    let text = match format {
        Format::Json => json_string(full)?,
        Format::Csv => csv_string(rows)?,
    };
    emit(&text, None)
}
