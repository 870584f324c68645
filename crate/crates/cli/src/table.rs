//! Append-only CSV tables and ordered parallel evaluation.

use std::fs::{File, OpenOptions};
use std::path::Path;

use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::{io_err, CliError, Result};

pub(crate) struct Table {
    writer: csv::Writer<File>,
}

impl Table {
    /// Opens `path` for writing. With `resume`, rows already in the file are
    /// returned and new rows are appended; otherwise the file is truncated.
    pub(crate) fn open<R: DeserializeOwned>(path: &Path, resume: bool) -> Result<(Self, Vec<R>)> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(io_err(dir))?;
        }
        let existing_len = std::fs::metadata(path).map(|m| m.len()).unwrap_or(0);
        if resume && existing_len > 0 {
            let rows = csv::Reader::from_path(path)?
                .into_deserialize()
                .collect::<std::result::Result<Vec<R>, _>>()?;
            let file = OpenOptions::new()
                .append(true)
                .open(path)
                .map_err(io_err(path))?;
            let writer = csv::WriterBuilder::new()
                .has_headers(false)
                .from_writer(file);
            return Ok((Self { writer }, rows));
        }
        let file = File::create(path).map_err(io_err(path))?;
        Ok((
            Self {
                writer: csv::Writer::from_writer(file),
            },
            Vec::new(),
        ))
    }

    pub(crate) fn push<R: Serialize>(&mut self, row: &R) -> Result<()> {
        self.writer.serialize(row)?;
        self.writer.flush().map_err(|e| CliError::Csv(e.into()))
    }
}

pub(crate) fn read_rows<R: DeserializeOwned>(path: &Path) -> Result<Vec<R>> {
    Ok(csv::Reader::from_path(path)?
        .into_deserialize()
        .collect::<std::result::Result<Vec<R>, _>>()?)
}

/// Evaluates `items` on `workers` threads in batches and hands the results to
/// `emit` in input order.
pub(crate) fn run_ordered<T, R>(
    items: &[T],
    workers: usize,
    compute: impl Fn(&T) -> R + Sync,
    mut emit: impl FnMut(R) -> Result<()>,
) -> Result<()>
where
    T: Sync,
    R: Send,
{
    let workers = workers.max(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Input(format!("cannot start worker pool: {e}")))?;
    for batch in items.chunks(workers) {
        let out: Vec<R> = pool.install(|| batch.par_iter().map(&compute).collect());
        for r in out {
            emit(r)?;
        }
    }
    Ok(())
}
