use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::hex;

pub const MANIFEST: &str = "manifest.json";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FileEntry {
    pub path: String,
    pub schema: String,
    pub schema_version: u32,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub experiment: String,
    pub config_sha256: String,
    pub seed: u64,
    pub files: Vec<FileEntry>,
}

/// Writes files under one directory and records each in the manifest.
pub struct Artifacts {
    dir: PathBuf,
    files: Vec<FileEntry>,
}

impl Artifacts {
    pub fn create(dir: &Path) -> io::Result<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(Self { dir: dir.to_path_buf(), files: Vec::new() })
    }

    fn record(&mut self, name: &str, schema: &str, bytes: Vec<u8>) -> io::Result<()> {
        let path = self.dir.join(name);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        std::fs::write(&path, &bytes)?;
        self.files.push(FileEntry {
            path: name.to_string(),
            schema: schema.to_string(),
            schema_version: 1,
            sha256: hex(&Sha256::digest(&bytes)),
            bytes: bytes.len() as u64,
        });
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, schema: &str, value: &T) -> io::Result<()> {
        let mut bytes = serde_json::to_vec_pretty(value).map_err(io::Error::other)?;
        bytes.push(b'\n');
        self.record(name, schema, bytes)
    }

    pub fn csv(&mut self, name: &str, schema: &str, header: &[&str], rows: &[Vec<f64>]) -> io::Result<()> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header).map_err(io::Error::other)?;
        for r in rows {
            debug_assert_eq!(r.len(), header.len());
            w.write_record(r.iter().map(|v| v.to_string())).map_err(io::Error::other)?;
        }
        let bytes = w.into_inner().map_err(|e| io::Error::other(e.to_string()))?;
        self.record(name, schema, bytes)
    }

    pub fn finish(self, experiment: &str, config_sha256: &str, seed: u64) -> io::Result<Manifest> {
        let m = Manifest {
            schema_version: 1,
            experiment: experiment.to_string(),
            config_sha256: config_sha256.to_string(),
            seed,
            files: self.files,
        };
        let mut bytes = serde_json::to_vec_pretty(&m).map_err(io::Error::other)?;
        bytes.push(b'\n');
        std::fs::write(self.dir.join(MANIFEST), bytes)?;
        Ok(m)
    }
}

/// Evenly spaced row indices, at most `max` of them, always including both ends.
pub fn decimate(n: usize, max: usize) -> Vec<usize> {
    if n <= max || max < 2 {
        return (0..n).collect();
    }
    let mut out: Vec<usize> = (0..max).map(|k| ((k as f64) * (n - 1) as f64 / (max - 1) as f64).round() as usize).collect();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimate_keeps_ends() {
        assert_eq!(decimate(5, 10), vec![0, 1, 2, 3, 4]);
        let d = decimate(1001, 11);
        assert_eq!(d.len(), 11);
        assert_eq!((d[0], d[10]), (0, 1000));
    }

    #[test]
    fn manifest_lists_every_file() {
        let dir = tempfile::tempdir().unwrap();
        let mut a = Artifacts::create(dir.path()).unwrap();
        a.csv("t.csv", "test", &["x", "y"], &[vec![1.0, 2.5], vec![f64::NAN, -0.0]]).unwrap();
        a.json("sub/r.json", "test-json", &vec![1, 2]).unwrap();
        let m = a.finish("selfsimilar", "abc", 7).unwrap();
        assert_eq!(m.files.len(), 2);
        let text = std::fs::read_to_string(dir.path().join("t.csv")).unwrap();
        assert_eq!(text, "x,y\n1,2.5\nNaN,-0\n");
        assert!(dir.path().join(MANIFEST).exists());
    }
}
