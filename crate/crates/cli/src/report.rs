//! Report envelope and output plumbing shared by the subcommands.
//!
//! Every report is a JSON object `{"tool", "version", "command", "config",
//! "seed", "result"}`. The config echo leaves out the output path and the
//! thread count so that reports do not depend on either.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::time::{Duration, Instant};

use anyhow::{Context as _, Result};
use serde::Serialize;
use serde_json::Value;

pub struct Context {
    started: Instant,
    record_timing: bool,
}

impl Context {
    pub fn new(record_timing: bool) -> Self {
        Context {
            started: Instant::now(),
            record_timing,
        }
    }

    pub fn elapsed(&self) -> Duration {
        self.started.elapsed()
    }

    /// The envelope fields that precede `result`, as a JSON object text
    /// without its closing brace.
    fn envelope_head(&self, command: &str, config: &Value, seed: Option<u64>) -> Result<String> {
        let mut head = serde_json::Map::new();
        head.insert("tool".into(), "ftenum".into());
        head.insert("version".into(), ftenum::VERSION.into());
        head.insert("command".into(), command.into());
        head.insert("config".into(), config.clone());
        head.insert("seed".into(), seed.map_or(Value::Null, Value::from));
        if self.record_timing {
            head.insert(
                "duration_ms".into(),
                (self.elapsed().as_millis() as u64).into(),
            );
        }
        let text = serde_json::to_string(&Value::Object(head))?;
        Ok(text[..text.len() - 1].to_string())
    }

    /// Full envelope around a serializable result.
    pub fn envelope<T: Serialize>(
        &self,
        command: &str,
        config: &Value,
        seed: Option<u64>,
        result: &T,
    ) -> Result<String> {
        let mut text = self.envelope_head(command, config, seed)?;
        text.push_str(",\"result\":");
        text.push_str(&serde_json::to_string_pretty(result)?);
        text.push_str("}\n");
        Ok(text)
    }

    /// Writes the envelope head, lets `body` stream the result value, then
    /// closes the object.
    pub fn stream_envelope<W: Write>(
        &self,
        out: &mut W,
        command: &str,
        config: &Value,
        seed: Option<u64>,
        body: impl FnOnce(&mut W) -> Result<()>,
    ) -> Result<()> {
        out.write_all(self.envelope_head(command, config, seed)?.as_bytes())?;
        out.write_all(b",\"result\":")?;
        body(out)?;
        out.write_all(b"}\n")?;
        Ok(())
    }
}

/// Opens the report destination; standard output when no path is given.
pub fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

/// Summary lines go to standard output when the report goes to a file, and
/// to standard error otherwise so that piped reports stay clean.
pub fn summary(report_to_file: bool, text: &str) {
    if report_to_file {
        print!("{text}");
    } else {
        eprint!("{text}");
    }
}

pub fn csv_string(
    rows: impl FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>,
) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    rows(&mut w)?;
    let bytes = w
        .into_inner()
        .map_err(|e| anyhow::anyhow!("csv flush: {e}"))?;
    Ok(String::from_utf8(bytes)?)
}
