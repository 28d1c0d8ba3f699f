use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use tempfile::TempDir;

/// Output files are first written into a hidden directory next to their
/// destination and moved into place only by [`Staging::commit`]; dropping
/// the staging area discards everything, including an output directory
/// that did not exist before.
pub struct Staging {
    out: PathBuf,
    dir: Option<TempDir>,
    created_out: bool,
}

impl Staging {
    pub fn new(out: &Path) -> io::Result<Self> {
        let created_out = !out.exists();
        fs::create_dir_all(out)?;
        let dir = tempfile::Builder::new().prefix(".staging-").tempdir_in(out)?;
        Ok(Self {
            out: out.to_path_buf(),
            dir: Some(dir),
            created_out,
        })
    }

    /// Where staged entries are written.
    pub fn path(&self) -> &Path {
        self.dir.as_ref().expect("staging directory is live").path()
    }

    /// Moves every staged entry to the output directory, replacing
    /// existing entries of the same name.
    pub fn commit(mut self) -> io::Result<()> {
        self.created_out = false;
        let mut names: Vec<_> = fs::read_dir(self.path())?
            .map(|e| e.map(|e| e.file_name()))
            .collect::<io::Result<_>>()?;
        names.sort();
        for name in names {
            let target = self.out.join(&name);
            if target.is_dir() {
                fs::remove_dir_all(&target)?;
            }
            fs::rename(self.path().join(&name), target)?;
        }
        Ok(())
    }
}

impl Drop for Staging {
    fn drop(&mut self) {
        drop(self.dir.take());
        if self.created_out {
            let _ = fs::remove_dir(&self.out);
        }
    }
}

pub fn json_bytes<T: serde::Serialize>(value: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("report serializes");
    bytes.push(b'\n');
    bytes
}
