use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::EventRecord;
use crate::error::{Error, Result};

/// Column header of event files; positions are in units of `σ`.
pub const EVENT_HEADER: &str = "kind,x_over_sigma,xprime_over_sigma";

/// Events together with the `#key=value` metadata lines of their file.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EventFile {
    pub metadata: BTreeMap<String, String>,
    pub events: Vec<EventRecord>,
}

pub fn ingest_events(path: impl AsRef<Path>) -> Result<EventFile> {
    let path = path.as_ref();
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let reader = BufReader::new(File::open(path).map_err(io_err)?);
    let shown = path.display().to_string();
    let malformed = |line: usize, reason: String| Error::MalformedRow {
        path: shown.clone(),
        line,
        reason,
    };

    let mut file = EventFile::default();
    let mut header_seen = false;
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(io_err)?;
        let lineno = i + 1;
        let line = line.trim_end_matches('\r');
        if let Some(meta) = line.strip_prefix('#') {
            if let Some((k, v)) = meta.split_once('=') {
                file.metadata.insert(k.trim().to_owned(), v.trim().to_owned());
            }
            continue;
        }
        if !header_seen {
            if line.trim() != EVENT_HEADER {
                return Err(Error::UnitHeaderMismatch {
                    path: shown.clone(),
                    found: line.to_owned(),
                    expected: EVENT_HEADER,
                });
            }
            header_seen = true;
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(malformed(lineno, format!("expected 3 fields, found {}", fields.len())));
        }
        let record = match fields[0] {
            "c" => {
                let parse = |s: &str, name: &str| -> Result<f64> {
                    if s.is_empty() {
                        return Err(malformed(lineno, format!("coincidence row is missing {name}")));
                    }
                    let v: f64 = s
                        .parse()
                        .map_err(|_| malformed(lineno, format!("{name} `{s}` is not a number")))?;
                    if !v.is_finite() {
                        return Err(malformed(lineno, format!("{name} `{s}` is not finite")));
                    }
                    Ok(v)
                };
                EventRecord::Coincidence {
                    x: parse(fields[1], "x_over_sigma")?,
                    x_prime: parse(fields[2], "xprime_over_sigma")?,
                }
            }
            "d" => {
                if !fields[1].is_empty() || !fields[2].is_empty() {
                    return Err(malformed(lineno, "double row must not carry positions".into()));
                }
                EventRecord::Double
            }
            other => return Err(malformed(lineno, format!("unknown event kind `{other}`"))),
        };
        file.events.push(record);
    }
    if !header_seen {
        return Err(Error::UnitHeaderMismatch {
            path: shown,
            found: String::new(),
            expected: EVENT_HEADER,
        });
    }
    Ok(file)
}

/// Writes metadata lines, the header, and one row per event. Positions use 17
/// significant digits so that reading the file back is lossless.
pub fn export_events(
    path: impl AsRef<Path>,
    events: &[EventRecord],
    metadata: &BTreeMap<String, String>,
) -> Result<()> {
    let path = path.as_ref();
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut w = BufWriter::new(File::create(path).map_err(io_err)?);
    write_events(&mut w, events, metadata).map_err(io_err)?;
    w.flush().map_err(io_err)
}

pub(crate) fn write_events<W: Write + ?Sized>(
    w: &mut W,
    events: &[EventRecord],
    metadata: &BTreeMap<String, String>,
) -> std::io::Result<()> {
    for (k, v) in metadata {
        writeln!(w, "#{k}={v}")?;
    }
    writeln!(w, "{EVENT_HEADER}")?;
    for e in events {
        match e {
            EventRecord::Coincidence { x, x_prime } => writeln!(w, "c,{x:.16e},{x_prime:.16e}")?,
            EventRecord::Double => writeln!(w, "d,,")?,
        }
    }
    Ok(())
}
