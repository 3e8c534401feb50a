use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::marker::PhantomData;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;

use super::StoreError;

/// Buffered JSONL writer. Output goes to `<path>.partial` and is renamed
/// into place by [`JsonlWriter::finish`]; dropping an unfinished writer
/// removes the partial file.
pub struct JsonlWriter<T> {
    path: PathBuf,
    partial: PathBuf,
    out: Option<BufWriter<File>>,
    count: usize,
    _record: PhantomData<fn(&T)>,
}

pub(crate) fn partial_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".partial");
    path.with_file_name(name)
}

/// Output directories are created on demand.
pub(crate) fn create_parent(path: &Path) -> Result<(), StoreError> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() => std::fs::create_dir_all(dir).map_err(|e| StoreError::io(dir, e)),
        _ => Ok(()),
    }
}

impl<T: Serialize> JsonlWriter<T> {
    pub fn create(path: &Path) -> Result<Self, StoreError> {
        let partial = partial_path(path);
        create_parent(&partial)?;
        let file = File::create(&partial).map_err(|e| StoreError::io(&partial, e))?;
        Ok(JsonlWriter {
            path: path.to_path_buf(),
            partial,
            out: Some(BufWriter::new(file)),
            count: 0,
            _record: PhantomData,
        })
    }

    pub fn write(&mut self, record: &T) -> Result<(), StoreError> {
        let out = self.out.as_mut().expect("writer used after finish");
        serde_json::to_writer(&mut *out, record).map_err(|e| StoreError::Encode {
            path: self.path.clone(),
            message: e.to_string(),
        })?;
        out.write_all(b"\n").map_err(|e| StoreError::io(&self.partial, e))?;
        self.count += 1;
        Ok(())
    }

    /// Flushes, renames into place and returns the record count.
    pub fn finish(mut self) -> Result<usize, StoreError> {
        let out = self.out.take().expect("writer finished twice");
        out.into_inner()
            .map_err(|e| StoreError::io(&self.partial, e.into_error()))?
            .sync_all()
            .map_err(|e| StoreError::io(&self.partial, e))?;
        std::fs::rename(&self.partial, &self.path).map_err(|e| StoreError::io(&self.path, e))?;
        Ok(self.count)
    }
}

impl<T> Drop for JsonlWriter<T> {
    fn drop(&mut self) {
        if self.out.take().is_some() {
            let _ = std::fs::remove_file(&self.partial);
        }
    }
}

pub fn write_jsonl<'a, T, I>(path: &Path, records: I) -> Result<usize, StoreError>
where
    T: Serialize + 'a,
    I: IntoIterator<Item = &'a T>,
{
    let mut w = JsonlWriter::create(path)?;
    for r in records {
        w.write(r)?;
    }
    w.finish()
}

/// Streaming JSONL reader; each item is checked by `validate` and errors
/// carry 1-based line numbers. Blank lines are skipped.
pub struct JsonlReader<T, R = BufReader<File>> {
    path: PathBuf,
    input: R,
    line: usize,
    buf: String,
    validate: fn(&T) -> Result<(), String>,
    done: bool,
}

fn accept<T>(_: &T) -> Result<(), String> {
    Ok(())
}

impl<T: DeserializeOwned> JsonlReader<T> {
    pub fn open(path: &Path) -> Result<Self, StoreError> {
        let file = File::open(path).map_err(|e| StoreError::io(path, e))?;
        Ok(Self::from_reader(path, BufReader::new(file)))
    }
}

impl<T: DeserializeOwned, R: BufRead> JsonlReader<T, R> {
    /// `path` is used only in error messages.
    pub fn from_reader(path: &Path, input: R) -> Self {
        JsonlReader {
            path: path.to_path_buf(),
            input,
            line: 0,
            buf: String::new(),
            validate: accept::<T>,
            done: false,
        }
    }

    pub fn with_validation(mut self, validate: fn(&T) -> Result<(), String>) -> Self {
        self.validate = validate;
        self
    }
}

impl<T: DeserializeOwned, R: BufRead> Iterator for JsonlReader<T, R> {
    type Item = Result<T, StoreError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        loop {
            self.buf.clear();
            self.line += 1;
            match self.input.read_line(&mut self.buf) {
                Ok(0) => {
                    self.done = true;
                    return None;
                }
                Ok(_) => {}
                Err(e) => {
                    self.done = true;
                    return Some(Err(StoreError::io(&self.path, e)));
                }
            }
            let text = self.buf.trim_end_matches(['\n', '\r']);
            if text.trim().is_empty() {
                continue;
            }
            let bad = |message: String| StoreError::BadRecord {
                path: self.path.clone(),
                line: self.line,
                message,
            };
            let record: T = match serde_json::from_str(text) {
                Ok(r) => r,
                Err(e) => return Some(Err(bad(e.to_string()))),
            };
            return Some(match (self.validate)(&record) {
                Ok(()) => Ok(record),
                Err(msg) => Err(bad(msg)),
            });
        }
    }
}
