//! Binary trajectory checkpoints.
//!
//! Layout, all little-endian:
//!
//! | bytes | content |
//! |-------|---------|
//! | 8 | magic `BNFTRAJ\0` |
//! | 4 | format version (`u32`, currently 1) |
//! | 8 | grid points `N` (`u64`) |
//! | 8 | half width `L` (`f64`) |
//! | 8 | slice count `M` (`u64`) |
//! | 8·M | times (`f64`) |
//! | 16·N·M | samples, slice by slice, interleaved `re, im` (`f64`) |
//!
//! A JSON sidecar `<file>.json` repeats the header fields for inspection.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::grid::{ComplexField, SpatialGrid, Trajectory};

pub const MAGIC: &[u8; 8] = b"BNFTRAJ\0";
pub const VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub format: String,
    pub version: u32,
    pub points: usize,
    pub half_width: f64,
    pub slices: usize,
    pub t_first: f64,
    pub t_last: f64,
    pub bytes: u64,
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

pub fn encode(traj: &Trajectory, out: &mut impl Write) -> Result<()> {
    let grid = traj.grid().ok_or_else(|| Error::Format("empty trajectory".into()))?;
    out.write_all(MAGIC)?;
    out.write_all(&VERSION.to_le_bytes())?;
    out.write_all(&(grid.len() as u64).to_le_bytes())?;
    out.write_all(&grid.half_width().to_le_bytes())?;
    out.write_all(&(traj.len() as u64).to_le_bytes())?;
    for t in traj.times() {
        out.write_all(&t.to_le_bytes())?;
    }
    for f in traj.fields() {
        for z in f.values() {
            out.write_all(&z.re.to_le_bytes())?;
            out.write_all(&z.im.to_le_bytes())?;
        }
    }
    Ok(())
}

fn read_u64(r: &mut impl Read) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_f64(r: &mut impl Read) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

pub fn decode(r: &mut impl Read) -> Result<Trajectory> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let mut v = [0u8; 4];
    r.read_exact(&mut v)?;
    let version = u32::from_le_bytes(v);
    if version != VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let n = read_u64(r)? as usize;
    let half_width = read_f64(r)?;
    let m = read_u64(r)? as usize;
    let grid = SpatialGrid::new(half_width, n)?;
    let times = (0..m).map(|_| read_f64(r)).collect::<Result<Vec<_>>>()?;
    let mut fields = Vec::with_capacity(m);
    for _ in 0..m {
        let mut vals = Vec::with_capacity(n);
        for _ in 0..n {
            let re = read_f64(r)?;
            let im = read_f64(r)?;
            vals.push(Complex64::new(re, im));
        }
        fields.push(ComplexField::new(grid, vals)?);
    }
    Trajectory::new(times, fields)
}

/// Write the binary file and its JSON sidecar; returns the sidecar path.
pub fn write_checkpoint(path: &Path, traj: &Trajectory) -> Result<PathBuf> {
    let mut w = BufWriter::new(File::create(path)?);
    encode(traj, &mut w)?;
    w.flush()?;
    let grid = traj.grid().ok_or_else(|| Error::Format("empty trajectory".into()))?;
    let meta = Sidecar {
        format: "binormal-trajectory".into(),
        version: VERSION,
        points: grid.len(),
        half_width: grid.half_width(),
        slices: traj.len(),
        t_first: traj.times()[0],
        t_last: *traj.times().last().unwrap(),
        bytes: 36 + 8 * traj.len() as u64 + 16 * (grid.len() * traj.len()) as u64,
    };
    let side = sidecar_path(path);
    let text = serde_json::to_string_pretty(&meta).map_err(|e| Error::Format(e.to_string()))?;
    std::fs::write(&side, text + "\n")?;
    Ok(side)
}

pub fn read_checkpoint(path: &Path) -> Result<Trajectory> {
    decode(&mut BufReader::new(File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Trajectory {
        let g = SpatialGrid::new(5.0, 32).unwrap();
        let f1 = ComplexField::from_fn(g, |x| Complex64::new(x.sin(), x.cos()));
        let f2 = f1.scale(Complex64::new(0.0, 2.0));
        Trajectory::new(vec![1.0, 1.5], vec![f1, f2]).unwrap()
    }

    #[test]
    fn round_trip_in_memory() {
        let tr = sample();
        let mut buf = Vec::new();
        encode(&tr, &mut buf).unwrap();
        assert_eq!(buf.len(), 36 + 16 + 16 * 64);
        assert_eq!(decode(&mut buf.as_slice()).unwrap(), tr);
    }

    #[test]
    fn rejects_corrupt_header() {
        let mut buf = Vec::new();
        encode(&sample(), &mut buf).unwrap();
        buf[0] = b'X';
        assert!(matches!(decode(&mut buf.as_slice()), Err(Error::Format(_))));
        let mut buf2 = Vec::new();
        encode(&sample(), &mut buf2).unwrap();
        buf2.truncate(100);
        assert!(decode(&mut buf2.as_slice()).is_err());
    }
}
