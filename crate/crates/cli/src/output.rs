use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{Context, Result};
use serde_json::{json, Value};

use modcorr::report::FORMAT_VERSION;

/// Where reports go; nothing is written without an output directory.
pub struct Output {
    pub dir: Option<PathBuf>,
    pub name: String,
}

impl Output {
    fn path(&self, suffix: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{}.{suffix}", self.name)))
    }

    pub fn prepare(&self) -> Result<()> {
        if let Some(d) = &self.dir {
            std::fs::create_dir_all(d).with_context(|| format!("creating {}", d.display()))?;
        }
        Ok(())
    }

    /// `<name>.report.json`: format version, resolved config and one entry per run.
    pub fn write_report(&self, config: &BTreeMap<String, String>, reports: Vec<Value>) -> Result<()> {
        let Some(path) = self.path("report.json") else { return Ok(()) };
        let doc = json!({ "format_version": FORMAT_VERSION, "config": config, "reports": reports });
        let text = serde_json::to_string_pretty(&doc)?;
        std::fs::write(&path, text + "\n").with_context(|| format!("writing {}", path.display()))
    }

    /// `<name>.<suffix>` as CSV with the given header.
    pub fn write_csv(&self, suffix: &str, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
        let Some(path) = self.path(suffix) else { return Ok(()) };
        let mut w = csv::Writer::from_path(&path).with_context(|| format!("writing {}", path.display()))?;
        w.write_record(header)?;
        for r in rows {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(())
    }
}
