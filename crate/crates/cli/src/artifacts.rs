use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use dqkit_core::{Error, Result};

use crate::args::Command;

pub struct Artifact {
    pub name: String,
    pub body: Vec<u8>,
}

impl Artifact {
    pub fn json<T: Serialize>(name: &str, value: &T) -> Result<Self> {
        let mut body = serde_json::to_vec_pretty(value)?;
        body.push(b'\n');
        Ok(Artifact {
            name: name.to_string(),
            body,
        })
    }

    pub fn csv(name: &str, write: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<Self> {
        let mut body = Vec::new();
        write(&mut body)?;
        Ok(Artifact {
            name: name.to_string(),
            body,
        })
    }
}

/// Result of one command: the artifacts (the first is printed when no
/// output directory is given), derived settings for the metadata, and a
/// numerical failure to report after the artifacts are written.
pub struct Outcome {
    pub artifacts: Vec<Artifact>,
    pub resolved: Value,
    pub failure: Option<Error>,
}

impl Outcome {
    pub fn new(artifacts: Vec<Artifact>, resolved: Value) -> Self {
        Outcome {
            artifacts,
            resolved,
            failure: None,
        }
    }
}

pub fn write_csv_rows<W: Write, R: Serialize>(w: W, rows: impl IntoIterator<Item = R>) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    for row in rows {
        wtr.serialize(row).map_err(|e| Error::Parse(e.to_string()))?;
    }
    wtr.flush()?;
    Ok(())
}

fn metadata(command: &Command, argv: &[String], outcome: &Outcome) -> Value {
    json!({
        "tool": "dqkit",
        "cli_version": env!("CARGO_PKG_VERSION"),
        "core_version": dqkit_core::VERSION,
        "command": command.name(),
        "argv": argv,
        "parameters": command,
        "resolved": outcome.resolved,
        "artifacts": outcome.artifacts.iter().map(|a| a.name.as_str()).collect::<Vec<_>>(),
        "status": outcome.failure.as_ref().map_or("ok".to_string(), |e| e.to_string()),
    })
}

pub fn emit(command: &Command, argv: &[String], outcome: &Outcome) -> Result<()> {
    match &command.common().out {
        None => {
            if let Some(first) = outcome.artifacts.first() {
                std::io::stdout().write_all(&first.body)?;
            }
        }
        Some(dir) => {
            fs::create_dir_all(dir)?;
            for a in &outcome.artifacts {
                fs::write(dir.join(&a.name), &a.body)?;
            }
            let mut meta = serde_json::to_vec_pretty(&metadata(command, argv, outcome))?;
            meta.push(b'\n');
            fs::write(Path::new(dir).join("metadata.json"), meta)?;
        }
    }
    Ok(())
}
