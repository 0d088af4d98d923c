//! Artifact writing. Every file is written to a temp file in the output
//! directory and renamed into place, and carries the run's identity: JSON
//! under a `meta` key, CSV as a leading `#` line that the parsers skip.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};
use tempfile::NamedTempFile;

use crate::config::RunConfig;
use crate::failure::{CliResult, Failure};

pub const TOOL: &str = "drivelife";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Serialize)]
pub struct Meta {
    pub tool: &'static str,
    pub version: &'static str,
    pub config_hash: String,
    pub seed: Option<u64>,
    pub config: RunConfig,
}

impl Meta {
    pub fn new(cfg: &RunConfig) -> Self {
        Meta {
            tool: TOOL,
            version: VERSION,
            config_hash: cfg.hash(),
            seed: cfg.seed,
            config: cfg.clone(),
        }
    }

    pub fn csv_line(&self) -> String {
        let seed = self.seed.map_or("none".to_string(), |s| s.to_string());
        format!("# {TOOL} {VERSION} command={} config_hash={} seed={seed}\n", self.config.command, self.config_hash)
    }
}

struct Envelope<'a, T> {
    meta: &'a Meta,
    key: &'a str,
    value: &'a T,
}

impl<T: Serialize> Serialize for Envelope<'_, T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(2))?;
        m.serialize_entry("meta", self.meta)?;
        m.serialize_entry(self.key, self.value)?;
        m.end()
    }
}

/// Output directory of one run.
pub struct Out {
    pub dir: PathBuf,
    pub meta: Meta,
}

impl Out {
    pub fn create(cfg: &RunConfig) -> CliResult<Self> {
        fs::create_dir_all(&cfg.out).map_err(|e| Failure::io(cfg.out.display(), e))?;
        Ok(Out {
            dir: cfg.out.clone(),
            meta: Meta::new(cfg),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    fn atomic(&mut self, name: &str, body: impl FnOnce(&mut dyn Write) -> CliResult<()>) -> CliResult<()> {
        let target = self.path(name);
        let mut tmp = NamedTempFile::new_in(&self.dir).map_err(|e| Failure::io(self.dir.display(), e))?;
        {
            let mut w = BufWriter::new(tmp.as_file_mut());
            body(&mut w)?;
            w.flush().map_err(|e| Failure::io(target.display(), e))?;
        }
        // temp files are created owner-only
        #[cfg(unix)]
        {
            use std::os::unix::fs::PermissionsExt;
            tmp.as_file()
                .set_permissions(fs::Permissions::from_mode(0o644))
                .map_err(|e| Failure::io(target.display(), e))?;
        }
        tmp.persist(&target).map_err(|e| Failure::io(target.display(), e.error))?;
        Ok(())
    }

    /// `{"meta": ..., key: value}`, pretty-printed.
    pub fn json<T: Serialize>(&mut self, name: &str, key: &str, value: &T) -> CliResult<()> {
        let meta = self.meta.clone();
        self.atomic(name, |w| {
            serde_json::to_writer_pretty(&mut *w, &Envelope { meta: &meta, key, value: &value })?;
            w.write_all(b"\n")?;
            Ok(())
        })
    }

    /// A CSV produced by `body`, after the meta comment line.
    pub fn csv_with(&mut self, name: &str, body: impl FnOnce(&mut dyn Write) -> CliResult<()>) -> CliResult<()> {
        let line = self.meta.csv_line();
        self.atomic(name, |w| {
            w.write_all(line.as_bytes())?;
            body(w)
        })
    }

    /// Plain text; the caller embeds the meta.
    pub fn text(&mut self, name: &str, body: &str) -> CliResult<()> {
        self.atomic(name, |w| Ok(w.write_all(body.as_bytes())?))
    }

    /// A CSV from a header and string rows.
    pub fn csv<I>(&mut self, name: &str, header: &[&str], rows: I) -> CliResult<()>
    where
        I: IntoIterator<Item = Vec<String>>,
    {
        self.csv_with(name, |w| {
            let mut cw = csv::Writer::from_writer(w);
            cw.write_record(header)?;
            for r in rows {
                cw.write_record(&r)?;
            }
            cw.flush()?;
            Ok(())
        })
    }
}

/// CSV cell for an optional number; absent is empty.
pub fn cell<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn same_file(a: &Path, b: &Path) -> bool {
    match (a.canonicalize(), b.canonicalize()) {
        (Ok(x), Ok(y)) => x == y,
        _ => false,
    }
}
