//! The NLSH1 binary field format: magic, length-prefixed JSON header, then
//! interleaved little-endian `f64` pairs in row-major order.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Field, Grid};
use crate::error::{Error, Result};

pub const NLSH1_MAGIC: &[u8; 5] = b"NLSH1";

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Header {
    d: usize,
    #[serde(rename = "L")]
    half_widths: Vec<f64>,
    n: Vec<usize>,
    dtype: String,
}

pub fn write_nlsh1<W: Write>(f: &Field, mut w: W) -> Result<()> {
    let g = f.grid();
    let header = Header {
        d: g.dim(),
        half_widths: vec![g.half_width(); g.dim()],
        n: vec![g.n(); g.dim()],
        dtype: "c128".into(),
    };
    let json = serde_json::to_vec(&header)?;
    w.write_all(NLSH1_MAGIC)?;
    w.write_all(&(json.len() as u32).to_le_bytes())?;
    w.write_all(&json)?;
    for z in f.values() {
        w.write_all(&z.re.to_le_bytes())?;
        w.write_all(&z.im.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_nlsh1<R: Read>(mut r: R) -> Result<Field> {
    let mut magic = [0u8; 5];
    r.read_exact(&mut magic)?;
    if &magic != NLSH1_MAGIC {
        return Err(Error::Format("bad magic, expected NLSH1".into()));
    }
    let mut len = [0u8; 4];
    r.read_exact(&mut len)?;
    let len = u32::from_le_bytes(len) as usize;
    let mut json = vec![0u8; len];
    r.read_exact(&mut json)?;
    let header: Header = serde_json::from_slice(&json)?;
    if header.dtype != "c128" {
        return Err(Error::Format(format!("unsupported dtype {}", header.dtype)));
    }
    if header.half_widths.len() != header.d || header.n.len() != header.d {
        return Err(Error::Format("per-axis header arrays do not match d".into()));
    }
    let (l, n) = (header.half_widths[0], header.n[0]);
    if header.half_widths.iter().any(|&x| x != l) || header.n.iter().any(|&x| x != n) {
        return Err(Error::Unsupported("anisotropic grids".into()));
    }
    let grid = Grid::new(header.d, l, n)?;
    let mut bytes = vec![0u8; grid.len() * 16];
    r.read_exact(&mut bytes)?;
    let values = bytes
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().expect("8 bytes"));
            let im = f64::from_le_bytes(c[8..].try_into().expect("8 bytes"));
            Complex64::new(re, im)
        })
        .collect();
    Field::from_values(&grid, values)
}

pub fn write_nlsh1_file(f: &Field, path: impl AsRef<Path>) -> Result<()> {
    write_nlsh1(f, BufWriter::new(File::create(path)?))
}

pub fn read_nlsh1_file(path: impl AsRef<Path>) -> Result<Field> {
    read_nlsh1(BufReader::new(File::open(path)?))
}
