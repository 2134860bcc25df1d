use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Lines, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::{CliError, Result};

/// Documents handed to the worker pool at once. Bounds memory while keeping
/// every worker busy on large inputs.
pub const BATCH: usize = 512;

/// Non-blank lines in chunks of at most `size`, each tagged with its 1-based
/// line number.
pub struct Batches<R> {
    lines: std::iter::Enumerate<Lines<R>>,
    size: usize,
}

impl<R: BufRead> Batches<R> {
    pub fn new(reader: R, size: usize) -> Self {
        Self {
            lines: reader.lines().enumerate(),
            size: size.max(1),
        }
    }
}

impl<R: BufRead> Iterator for Batches<R> {
    type Item = io::Result<Vec<(usize, String)>>;

    fn next(&mut self) -> Option<Self::Item> {
        let mut batch = Vec::with_capacity(self.size);
        for (n, line) in self.lines.by_ref() {
            match line {
                Ok(l) if l.trim().is_empty() => continue,
                Ok(l) => batch.push((n + 1, l)),
                Err(e) => return Some(Err(e)),
            }
            if batch.len() == self.size {
                break;
            }
        }
        (!batch.is_empty()).then_some(Ok(batch))
    }
}

pub fn open_reader(stage: &'static str, path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| CliError::data(stage, format!("cannot read {}: {e}", path.display())))
}

/// Create the parent directory of an output path if it is missing.
pub fn ensure_parent(stage: &'static str, path: &Path) -> Result<()> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() => std::fs::create_dir_all(dir)
            .map_err(|e| CliError::data(stage, format!("cannot create {}: {e}", dir.display()))),
        _ => Ok(()),
    }
}

pub fn create_writer(stage: &'static str, path: &Path) -> Result<BufWriter<File>> {
    ensure_parent(stage, path)?;
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::data(stage, format!("cannot create {}: {e}", path.display())))
}

pub fn write_line(stage: &'static str, out: &mut impl Write, value: &impl Serialize) -> Result<()> {
    serde_json::to_writer(&mut *out, value).map_err(|e| CliError::data(stage, e))?;
    out.write_all(b"\n").map_err(|e| CliError::data(stage, e))
}

pub fn finish(stage: &'static str, mut out: impl Write) -> Result<()> {
    out.flush().map_err(|e| CliError::data(stage, e))
}
