//! JSON input with field-level diagnostics, and output with 17 significant
//! digits per float.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

/// Reads and parses `path`, naming the offending field on failure.
pub fn read_json<T: DeserializeOwned>(path: &Path, what: &str) -> Result<T, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("cannot read {what} `{}`: {e}", path.display()))?;
    parse_json(&text, what)
}

pub fn parse_json<T: DeserializeOwned>(text: &str, what: &str) -> Result<T, String> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let field = if path == "." { what.to_string() } else { format!("{what} field `{path}`") };
        format!("invalid {field}: {}", e.into_inner())
    })
}

/// Writes every float as `{:.16e}`.
struct Precise;

impl serde_json::ser::Formatter for Precise {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        write!(w, "{v:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        write!(w, "{:.16e}", f64::from(v))
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Precise);
    value.serialize(&mut ser).expect("result types serialize");
    String::from_utf8(buf).expect("JSON is UTF-8")
}

pub fn emit<T: Serialize>(value: &T, output: Option<&Path>) -> Result<(), String> {
    let text = to_json(value) + "\n";
    match output {
        Some(p) => fs::write(p, text).map_err(|e| format!("cannot write `{}`: {e}", p.display())),
        None => io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| format!("cannot write stdout: {e}")),
    }
}
