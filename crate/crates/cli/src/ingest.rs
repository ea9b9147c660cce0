//! Turning files and directory trees into components.

use std::collections::BTreeMap;
use std::env;
use std::fs;
use std::path::{Component as PathPart, Path, PathBuf};

use catt_core::{Component, ComponentDigest, DigestSet};
use walkdir::WalkDir;

use crate::failure::Failure;

/// Resolves `.` and `..` without touching the filesystem, so symlinked
/// parents are never followed.
fn lexical_absolute(p: &Path) -> Result<PathBuf, Failure> {
    let joined = if p.is_absolute() {
        p.to_path_buf()
    } else {
        env::current_dir()
            .map_err(|e| Failure::io("current directory", e))?
            .join(p)
    };
    let mut out = PathBuf::new();
    for part in joined.components() {
        match part {
            PathPart::CurDir => {}
            PathPart::ParentDir => {
                out.pop();
            }
            other => out.push(other),
        }
    }
    Ok(out)
}

/// Component id for `file`: its path below `base`, with forward slashes.
pub fn component_id(base: &Path, file: &Path) -> Result<String, Failure> {
    let base = lexical_absolute(base)?;
    let file = lexical_absolute(file)?;
    let rel = file.strip_prefix(&base).map_err(|_| {
        Failure::usage(format!(
            "{} is outside base directory {}",
            file.display(),
            base.display()
        ))
    })?;
    let parts: Vec<&str> = rel
        .components()
        .map(|c| {
            c.as_os_str()
                .to_str()
                .ok_or_else(|| Failure::usage(format!("{} is not valid UTF-8", file.display())))
        })
        .collect::<Result<_, _>>()?;
    if parts.is_empty() {
        return Err(Failure::usage(format!(
            "{} names the base directory itself",
            file.display()
        )));
    }
    Ok(parts.join("/"))
}

/// Regular files under each path, keyed by component id.
pub fn collect_files(
    base: &Path,
    paths: &[PathBuf],
    verbose: bool,
) -> Result<BTreeMap<String, PathBuf>, Failure> {
    let mut files = BTreeMap::new();
    for root in paths {
        let walker = WalkDir::new(root)
            .follow_links(false)
            .follow_root_links(false);
        for entry in walker {
            let entry = entry.map_err(|e| {
                let path = e.path().unwrap_or(root).display().to_string();
                match e.into_io_error() {
                    Some(io) => Failure::io(&path, io),
                    None => Failure::io_msg(format!("{path}: filesystem loop")),
                }
            })?;
            let ft = entry.file_type();
            if ft.is_symlink() {
                eprintln!("warning: skipping symlink {}", entry.path().display());
                continue;
            }
            if !ft.is_file() {
                continue;
            }
            let id = component_id(base, entry.path())?;
            if verbose {
                eprintln!("  {id}");
            }
            files.insert(id, entry.into_path());
        }
    }
    Ok(files)
}

pub fn read_components(files: &BTreeMap<String, PathBuf>) -> Result<Vec<Component>, Failure> {
    files
        .iter()
        .map(|(id, path)| {
            let payload =
                fs::read(path).map_err(|e| Failure::io(&path.display().to_string(), e))?;
            Component::new(id.clone(), payload).map_err(Failure::from)
        })
        .collect()
}

pub fn components(
    base: &Path,
    paths: &[PathBuf],
    verbose: bool,
) -> Result<Vec<Component>, Failure> {
    read_components(&collect_files(base, paths, verbose)?)
}

pub fn digests(cs: &[Component]) -> DigestSet {
    cs.iter().map(Component::digest).collect()
}

/// Digest of the single file at `path`.
pub fn single_digest(base: &Path, path: &Path) -> Result<ComponentDigest, Failure> {
    let id = component_id(base, path)?;
    let payload = fs::read(path).map_err(|e| Failure::io(&path.display().to_string(), e))?;
    Ok(Component::new(id, payload)?.digest())
}
