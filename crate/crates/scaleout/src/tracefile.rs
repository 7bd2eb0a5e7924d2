//! Line-oriented trace documents.
//!
//! The first object is a header, followed by one object per gradient event:
//!
//! ```text
//! {"name":"resnet50","t_batch_s":0.1,"t_back_s":0.065}
//! {"layer":0,"bytes":8196000,"ready_s":0.00003}
//! {"layer":1,"bytes":4206592,"ready_s":0.0004}
//! ```
//!
//! `t_back_s` is optional; when present it must equal the latest `ready_s`.
//! Blank lines and lines starting with `#` are ignored.

use std::io::{self, BufRead, Write};

use scaleout_core::{GradientEvent, ModelTrace};
use serde_json::{Map, Value};

#[derive(Debug, thiserror::Error)]
pub enum TraceFileError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}, field `{field}`: {message}")]
    Field {
        line: usize,
        field: &'static str,
        message: String,
    },
    #[error("line {line}: {source}")]
    Invalid {
        line: usize,
        source: scaleout_core::Error,
    },
    #[error("document has no header line")]
    MissingHeader,
    #[error(transparent)]
    Io(#[from] io::Error),
}

struct Header {
    name: String,
    t_batch: f64,
    t_back: Option<f64>,
}

fn object(line: usize, text: &str) -> Result<Map<String, Value>, TraceFileError> {
    match serde_json::from_str::<Value>(text) {
        Ok(Value::Object(map)) => Ok(map),
        Ok(_) => Err(TraceFileError::Syntax {
            line,
            message: "expected a JSON object".into(),
        }),
        Err(e) => Err(TraceFileError::Syntax {
            line,
            message: e.to_string(),
        }),
    }
}

fn check_keys(
    line: usize,
    map: &Map<String, Value>,
    allowed: &[&str],
) -> Result<(), TraceFileError> {
    match map.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(TraceFileError::Syntax {
            line,
            message: format!("unknown field `{k}`"),
        }),
        None => Ok(()),
    }
}

fn field<'a>(
    line: usize,
    map: &'a Map<String, Value>,
    field: &'static str,
) -> Result<&'a Value, TraceFileError> {
    map.get(field).ok_or_else(|| TraceFileError::Field {
        line,
        field,
        message: "missing".into(),
    })
}

fn seconds(
    line: usize,
    map: &Map<String, Value>,
    name: &'static str,
) -> Result<f64, TraceFileError> {
    let bad = |message: &str| TraceFileError::Field {
        line,
        field: name,
        message: message.into(),
    };
    let v = field(line, map, name)?
        .as_f64()
        .ok_or_else(|| bad("expected a number"))?;
    if v < 0.0 {
        return Err(bad("negative time"));
    }
    Ok(v)
}

fn count(line: usize, map: &Map<String, Value>, name: &'static str) -> Result<u64, TraceFileError> {
    let bad = |message: &str| TraceFileError::Field {
        line,
        field: name,
        message: message.into(),
    };
    let v = field(line, map, name)?;
    if let Some(n) = v.as_u64() {
        return Ok(n);
    }
    match v.as_f64() {
        Some(f) if f < 0.0 => Err(bad("negative size")),
        _ => Err(bad("expected a non-negative integer")),
    }
}

fn header(line: usize, map: &Map<String, Value>) -> Result<Header, TraceFileError> {
    check_keys(line, map, &["name", "t_batch_s", "t_back_s"])?;
    let name = field(line, map, "name")?
        .as_str()
        .ok_or_else(|| TraceFileError::Field {
            line,
            field: "name",
            message: "expected a string".into(),
        })?
        .to_owned();
    let t_batch = seconds(line, map, "t_batch_s")?;
    let t_back = if map.contains_key("t_back_s") {
        Some(seconds(line, map, "t_back_s")?)
    } else {
        None
    };
    Ok(Header {
        name,
        t_batch,
        t_back,
    })
}

fn event(line: usize, map: &Map<String, Value>) -> Result<GradientEvent, TraceFileError> {
    check_keys(line, map, &["layer", "bytes", "ready_s"])?;
    let layer = count(line, map, "layer")?;
    let layer_index = u32::try_from(layer).map_err(|_| TraceFileError::Field {
        line,
        field: "layer",
        message: "exceeds u32".into(),
    })?;
    Ok(GradientEvent {
        layer_index,
        size_bytes: count(line, map, "bytes")?,
        ready_time: seconds(line, map, "ready_s")?,
    })
}

/// Parses and validates a trace document.
pub fn parse_trace<R: BufRead>(reader: R) -> Result<ModelTrace, TraceFileError> {
    let mut head: Option<(usize, Header)> = None;
    let mut events = Vec::new();
    for (i, text) in reader.lines().enumerate() {
        let text = text?;
        let line = i + 1;
        let trimmed = text.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let map = object(line, trimmed)?;
        if head.is_none() {
            head = Some((line, header(line, &map)?));
        } else {
            events.push(event(line, &map)?);
        }
    }
    let (line, h) = head.ok_or(TraceFileError::MissingHeader)?;
    ModelTrace::with_declared_t_back(h.name, events, h.t_batch, h.t_back)
        .map_err(|source| TraceFileError::Invalid { line, source })
}

pub fn parse_trace_str(text: &str) -> Result<ModelTrace, TraceFileError> {
    parse_trace(text.as_bytes())
}

/// Writes `trace` so that [`parse_trace`] reproduces it exactly.
pub fn write_trace<W: Write>(trace: &ModelTrace, mut out: W) -> io::Result<()> {
    let head = serde_json::json!({
        "name": trace.name(),
        "t_batch_s": trace.t_batch(),
        "t_back_s": trace.t_back(),
    });
    writeln!(out, "{head}")?;
    for e in trace.events() {
        let rec = serde_json::json!({ "layer": e.layer_index, "bytes": e.size_bytes, "ready_s": e.ready_time });
        writeln!(out, "{rec}")?;
    }
    Ok(())
}

pub fn trace_to_string(trace: &ModelTrace) -> String {
    let mut buf = Vec::new();
    write_trace(trace, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}
