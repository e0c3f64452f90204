//! CSV and JSON writers shared by all commands.
//!
//! CSV starts with `# key: value` metadata lines, then a header row and the
//! data rows; summaries follow as trailing `#` lines. JSON is an object with
//! `meta` (summary under `meta.summary`) and `rows`.

use std::io::Write;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::{Map, Value};

use super::CliError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Debug)]
pub struct Output<R> {
    pub meta: Map<String, Value>,
    pub rows: Vec<R>,
    pub summary: Map<String, Value>,
}

impl<R: Serialize> Output<R> {
    pub fn write(&self, format: Format, w: &mut dyn Write) -> Result<(), CliError> {
        match format {
            Format::Csv => self.write_csv(w),
            Format::Json => self.write_json(w),
        }
    }

    fn write_csv(&self, w: &mut dyn Write) -> Result<(), CliError> {
        write_comments(w, &self.meta)?;
        {
            let mut csv = csv::Writer::from_writer(&mut *w);
            for row in &self.rows {
                csv.serialize(row)?;
            }
            csv.flush()?;
        }
        write_comments(w, &self.summary)?;
        Ok(())
    }

    fn write_json(&self, w: &mut dyn Write) -> Result<(), CliError> {
        let mut meta = self.meta.clone();
        if !self.summary.is_empty() {
            meta.insert("summary".into(), Value::Object(self.summary.clone()));
        }
        let doc = serde_json::json!({ "meta": meta, "rows": self.rows });
        serde_json::to_writer_pretty(&mut *w, &doc)?;
        writeln!(w)?;
        Ok(())
    }
}

/// One line per entry; arrays of objects get one line per element.
fn write_comments(w: &mut dyn Write, map: &Map<String, Value>) -> std::io::Result<()> {
    for (k, v) in map {
        match v {
            Value::Array(items) if items.iter().all(Value::is_object) => {
                for item in items {
                    writeln!(w, "# {k}: {}", plain(item))?;
                }
            }
            _ => writeln!(w, "# {k}: {}", plain(v))?,
        }
    }
    Ok(())
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
