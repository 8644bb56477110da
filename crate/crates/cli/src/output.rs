use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;

/// Collects output files in a hidden staging directory inside the target
/// and moves them into place only on [`Staging::commit`]. Dropping an
/// uncommitted stage deletes everything written so far.
pub struct Staging {
    root: PathBuf,
    stage: PathBuf,
    files: Vec<PathBuf>,
    committed: bool,
}

impl Staging {
    pub fn new(root: &Path) -> anyhow::Result<Staging> {
        fs::create_dir_all(root).with_context(|| format!("creating output directory {}", root.display()))?;
        let stage = root.join(format!(".staging-{}", std::process::id()));
        if stage.exists() {
            fs::remove_dir_all(&stage)?;
        }
        fs::create_dir_all(&stage)?;
        Ok(Staging {
            root: root.to_path_buf(),
            stage,
            files: Vec::new(),
            committed: false,
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn write(&mut self, rel: impl AsRef<Path>, contents: impl AsRef<[u8]>) -> anyhow::Result<()> {
        let rel = rel.as_ref();
        let path = self.stage.join(rel);
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir)?;
        }
        fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        self.files.push(rel.to_path_buf());
        Ok(())
    }

    pub fn write_json<T: serde::Serialize>(&mut self, rel: impl AsRef<Path>, value: &T) -> anyhow::Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(rel, text)
    }

    /// Renames every staged file over its final path.
    pub fn commit(mut self) -> anyhow::Result<Vec<PathBuf>> {
        let mut done = Vec::with_capacity(self.files.len());
        for rel in &self.files {
            let dest = self.root.join(rel);
            if let Some(dir) = dest.parent() {
                fs::create_dir_all(dir)?;
            }
            fs::rename(self.stage.join(rel), &dest).with_context(|| format!("moving output into {}", dest.display()))?;
            done.push(dest);
        }
        self.committed = true;
        fs::remove_dir_all(&self.stage).ok();
        Ok(done)
    }
}

impl Drop for Staging {
    fn drop(&mut self) {
        if !self.committed {
            fs::remove_dir_all(&self.stage).ok();
        }
    }
}

/// Writes one file through a sibling temp file and a rename.
pub fn write_atomic(path: &Path, contents: impl AsRef<[u8]>) -> anyhow::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let name = path.file_name().context("output path has no file name")?.to_string_lossy();
    let tmp = path.with_file_name(format!(".{name}.tmp-{}", std::process::id()));
    fs::write(&tmp, contents).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display())).inspect_err(|_| {
        fs::remove_file(&tmp).ok();
    })
}
