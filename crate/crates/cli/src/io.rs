//! Input sources and output sinks shared by the subcommands.
//!
//! File outputs go through a temporary file in the destination directory and
//! are renamed into place only on success, unless `--partial` was given.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use tempfile::NamedTempFile;

pub fn check_input(path: &Path) -> Result<()> {
    if !path.is_file() {
        bail!("input file not found: {}", path.display());
    }
    Ok(())
}

pub fn check_output(path: &Path) -> Result<()> {
    if path.is_dir() {
        bail!("output path is a directory: {}", path.display());
    }
    let parent = parent_dir(path);
    if !parent.is_dir() {
        bail!("output directory does not exist: {}", parent.display());
    }
    Ok(())
}

fn parent_dir(path: &Path) -> &Path {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    }
}

pub fn open_input(path: Option<&Path>) -> Result<Box<dyn BufRead>> {
    Ok(match path {
        Some(p) => {
            let f = File::open(p).with_context(|| format!("cannot open {}", p.display()))?;
            Box::new(BufReader::new(f))
        }
        None => Box::new(BufReader::new(io::stdin().lock())),
    })
}

pub fn read_to_string(path: &Path) -> Result<String> {
    let mut s = String::new();
    File::open(path)
        .and_then(|mut f| f.read_to_string(&mut s))
        .with_context(|| format!("cannot read {}", path.display()))?;
    Ok(s)
}

pub enum Sink {
    Stdout(BufWriter<io::Stdout>),
    Staged {
        file: BufWriter<NamedTempFile>,
        dest: PathBuf,
    },
    Direct(BufWriter<File>),
}

impl Sink {
    pub fn open(path: Option<&Path>, partial: bool) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Sink::Stdout(BufWriter::new(io::stdout())));
        };
        if partial {
            let f =
                File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
            return Ok(Sink::Direct(BufWriter::new(f)));
        }
        let tmp = NamedTempFile::new_in(parent_dir(path))
            .with_context(|| format!("cannot stage output for {}", path.display()))?;
        Ok(Sink::Staged {
            file: BufWriter::new(tmp),
            dest: path.to_path_buf(),
        })
    }

    /// Flushes and, for staged files, moves the result into place.
    pub fn finish(self) -> Result<()> {
        match self {
            Sink::Stdout(mut w) => w.flush()?,
            Sink::Direct(mut w) => w.flush()?,
            Sink::Staged { file, dest } => {
                let tmp = file.into_inner().map_err(|e| e.into_error())?;
                tmp.persist(&dest)
                    .with_context(|| format!("cannot write {}", dest.display()))?;
            }
        }
        Ok(())
    }
}

impl Write for Sink {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        match self {
            Sink::Stdout(w) => w.write(buf),
            Sink::Staged { file, .. } => file.write(buf),
            Sink::Direct(w) => w.write(buf),
        }
    }

    fn flush(&mut self) -> io::Result<()> {
        match self {
            Sink::Stdout(w) => w.flush(),
            Sink::Staged { file, .. } => file.flush(),
            Sink::Direct(w) => w.flush(),
        }
    }
}

/// Writes several files so that either all of them appear or, on failure
/// before the final renames, none do.
pub fn write_all_files(files: &[(&Path, Vec<u8>)], partial: bool) -> Result<()> {
    let mut staged = Vec::with_capacity(files.len());
    for (path, bytes) in files {
        let mut sink = Sink::open(Some(path), partial)?;
        sink.write_all(bytes)
            .with_context(|| format!("cannot write {}", path.display()))?;
        staged.push(sink);
    }
    staged.into_iter().try_for_each(Sink::finish)
}
