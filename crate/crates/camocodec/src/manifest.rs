//! `path,label,split` CSV manifests. Relative paths resolve against the
//! manifest's own directory.

use std::path::{Path, PathBuf};

use camocodec_core::dataset::{Manifest, ManifestEntry, Split};

use crate::error::{Error, Result};
use crate::io::{read_bytes, write_bytes};

const HEADER: [&str; 3] = ["path", "label", "split"];

pub fn parse_manifest(bytes: &[u8], origin: &Path) -> Result<Manifest> {
    let bad = |line: u64, message: String| Error::Manifest { path: origin.to_path_buf(), line, message };
    let mut reader = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(bytes);
    let header = reader.headers().map_err(|e| bad(1, e.to_string()))?;
    if header.iter().collect::<Vec<_>>() != HEADER {
        return Err(bad(1, format!("expected header `path,label,split`, found `{}`", header.iter().collect::<Vec<_>>().join(","))));
    }
    let mut entries = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| bad(e.position().map_or(0, |p| p.line()), e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        let token = &record[2];
        let split = Split::parse(token).ok_or_else(|| bad(line, format!("unknown split `{token}` (expected train or val)")))?;
        if record[0].is_empty() || record[1].is_empty() {
            return Err(bad(line, "empty path or label".into()));
        }
        entries.push(ManifestEntry { path: record[0].to_string(), label: record[1].to_string(), split });
    }
    Ok(Manifest { entries })
}

pub fn load_manifest(path: &Path) -> Result<Manifest> {
    parse_manifest(&read_bytes(path)?, path)
}

pub fn manifest_to_csv(m: &Manifest) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(HEADER).expect("in-memory write");
    for e in &m.entries {
        w.write_record([e.path.as_str(), e.label.as_str(), e.split.as_str()]).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

pub fn save_manifest(m: &Manifest, path: &Path) -> Result<()> {
    write_bytes(path, manifest_to_csv(m).as_bytes())
}

/// Absolute location of an entry listed in the manifest at `manifest_path`.
pub fn resolve(manifest_path: &Path, entry: &ManifestEntry) -> PathBuf {
    let p = Path::new(&entry.path);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        manifest_path.parent().unwrap_or(Path::new("")).join(p)
    }
}

/// Source line (1-based, header is line 1) of entry `index`.
pub fn entry_line(index: usize) -> u64 {
    index as u64 + 2
}
