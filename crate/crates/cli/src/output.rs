//! Outputs are staged next to their destination and only renamed into place
//! once the whole command has succeeded.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use tempfile::NamedTempFile;

use crate::Result;

#[derive(Default)]
pub struct Staged {
    files: Vec<(NamedTempFile, PathBuf)>,
}

impl Staged {
    pub fn new() -> Self {
        Self::default()
    }

    /// Writes `path`'s future content through `f`.
    pub fn write(&mut self, path: &Path, f: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
        let dir = match path.parent() {
            Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
            _ => PathBuf::from("."),
        };
        fs::create_dir_all(&dir).map_err(|e| format!("{}: {e}", dir.display()))?;
        let tmp = staging_file(&dir).map_err(|e| format!("{}: {e}", dir.display()))?;
        {
            let mut w = BufWriter::new(tmp.as_file());
            f(&mut w)?;
            w.flush()?;
        }
        self.files.push((tmp, path.to_path_buf()));
        Ok(())
    }

    /// Moves every staged file into place. Dropping without committing
    /// deletes them.
    pub fn commit(self) -> Result<()> {
        for (tmp, path) in self.files {
            tmp.persist(&path).map_err(|e| format!("{}: {}", path.display(), e.error))?;
        }
        Ok(())
    }
}

#[cfg(unix)]
fn staging_file(dir: &Path) -> io::Result<NamedTempFile> {
    use std::os::unix::fs::PermissionsExt;
    tempfile::Builder::new()
        .permissions(fs::Permissions::from_mode(0o644))
        .tempfile_in(dir)
}

#[cfg(not(unix))]
fn staging_file(dir: &Path) -> io::Result<NamedTempFile> {
    NamedTempFile::new_in(dir)
}

/// A single-output command writes either to a staged file or to stdout.
pub fn emit(staged: &mut Staged, out: Option<&Path>, f: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match out {
        Some(path) => staged.write(path, f),
        None => {
            let stdout = io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            f(&mut w)?;
            w.flush()?;
            Ok(())
        }
    }
}
