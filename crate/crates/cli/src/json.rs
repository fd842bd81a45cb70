//! JSON output with every float written to 17 significant digits.

use std::io;

use serde::Serialize;
use serde_json::ser::Formatter;

use crate::{CliError, CliResult};

/// Compact JSON; floats as `d.dddddddddddddddde±x`, which parses back to
/// the same bits.
struct Digits17;

impl Formatter for Digits17 {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        write!(w, "{v:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        self.write_f64(w, v as f64)
    }
}

pub fn to_bytes<T: Serialize>(value: &T) -> CliResult<Vec<u8>> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Digits17);
    value
        .serialize(&mut ser)
        .map_err(|e| CliError::Config(format!("serialization: {e}")))?;
    out.push(b'\n');
    Ok(out)
}

pub fn from_slice<T: serde::de::DeserializeOwned>(bytes: &[u8], what: &str) -> CliResult<T> {
    serde_json::from_slice(bytes).map_err(|e| CliError::Config(format!("{what}: {e}")))
}

pub fn read_file(path: &std::path::Path) -> CliResult<Vec<u8>> {
    std::fs::read(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn write_file(path: &std::path::Path, bytes: &[u8]) -> CliResult<()> {
    std::fs::write(path, bytes).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}
