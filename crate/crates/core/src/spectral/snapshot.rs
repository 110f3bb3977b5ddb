//! Binary field snapshots.
//!
//! Layout, little-endian: `b"TDHO"`, `u32` version, `u32` n, `n × u64` sizes, `n × f64` x_min,
//! `n × f64` dx, `u8` has_time, `f64` time, then `(re, im)` pairs of `f64` in row-major order.

use std::io::{Read, Write};

use num_complex::Complex;

use super::field::Field;
use super::grid::Grid;
use crate::error::{Error, Result};
use crate::scalar::Real;

pub const MAGIC: &[u8; 4] = b"TDHO";
pub const VERSION: u32 = 1;

pub fn write_snapshot<T: Real, W: Write>(f: &Field<T>, mut w: W) -> Result<()> {
    let g = f.grid();
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(g.dim() as u32).to_le_bytes())?;
    for &s in g.sizes() {
        w.write_all(&(s as u64).to_le_bytes())?;
    }
    for &x in g.x_min() {
        w.write_all(&x.to_f64_lossy().to_le_bytes())?;
    }
    for &d in g.dx() {
        w.write_all(&d.to_f64_lossy().to_le_bytes())?;
    }
    w.write_all(&[u8::from(f.time().is_some())])?;
    w.write_all(&f.time().map_or(0.0, |t| t.to_f64_lossy()).to_le_bytes())?;
    let mut buf = Vec::with_capacity(16 * f.values().len());
    for z in f.values() {
        buf.extend_from_slice(&z.re.to_f64_lossy().to_le_bytes());
        buf.extend_from_slice(&z.im.to_f64_lossy().to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

fn read_array<const N: usize, R: Read>(r: &mut R) -> Result<[u8; N]> {
    let mut b = [0u8; N];
    r.read_exact(&mut b).map_err(|e| Error::Format(format!("truncated snapshot: {e}")))?;
    Ok(b)
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    Ok(f64::from_le_bytes(read_array::<8, _>(r)?))
}

pub fn read_snapshot<T: Real, R: Read>(mut r: R) -> Result<Field<T>> {
    let magic = read_array::<4, _>(&mut r)?;
    if &magic != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let version = u32::from_le_bytes(read_array::<4, _>(&mut r)?);
    if version != VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let n = u32::from_le_bytes(read_array::<4, _>(&mut r)?) as usize;
    if !(1..=3).contains(&n) {
        return Err(Error::Format(format!("dimension {n}")));
    }
    let mut sizes = Vec::with_capacity(n);
    for _ in 0..n {
        let s = u64::from_le_bytes(read_array::<8, _>(&mut r)?);
        sizes.push(usize::try_from(s).map_err(|_| Error::Format("size overflow".into()))?);
    }
    let conv = |v: f64| T::from_f64(v).ok_or_else(|| Error::Format("value not representable".into()));
    let mut x_min = Vec::with_capacity(n);
    for _ in 0..n {
        x_min.push(conv(read_f64(&mut r)?)?);
    }
    let mut dx = Vec::with_capacity(n);
    for _ in 0..n {
        dx.push(conv(read_f64(&mut r)?)?);
    }
    let has_time = read_array::<1, _>(&mut r)?[0];
    let time = read_f64(&mut r)?;
    let grid = Grid::new(sizes, x_min, dx).map_err(|e| Error::Format(e.to_string()))?;
    let mut values = Vec::with_capacity(grid.len());
    for _ in 0..grid.len() {
        let re = conv(read_f64(&mut r)?)?;
        let im = conv(read_f64(&mut r)?)?;
        values.push(Complex::new(re, im));
    }
    let mut extra = [0u8; 1];
    if r.read(&mut extra)? != 0 {
        return Err(Error::Format("trailing bytes".into()));
    }
    let f = Field::new(grid, values).map_err(|e| Error::Format(e.to_string()))?;
    Ok(match has_time {
        0 => f,
        1 => f.with_time(conv(time)?),
        b => return Err(Error::Format(format!("has_time flag {b}"))),
    })
}

pub fn save_snapshot<T: Real>(f: &Field<T>, path: &std::path::Path) -> Result<()> {
    let file = std::fs::File::create(path)?;
    let mut w = std::io::BufWriter::new(file);
    write_snapshot(f, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn load_snapshot<T: Real>(path: &std::path::Path) -> Result<Field<T>> {
    let file = std::fs::File::open(path)?;
    read_snapshot(std::io::BufReader::new(file))
}
