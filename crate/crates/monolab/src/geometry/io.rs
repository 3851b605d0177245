//! Point-set persistence: CSV with 17-significant-digit floats and a compact
//! little-endian binary form.
//!
//! Binary layout: a 16-byte header (`MLABPTS1` followed by 8 reserved zero
//! bytes), a little-endian u64 point count, then `count` pairs of
//! little-endian f64 `(x, y)`.

use super::{Point, PointSet};
use crate::{Error, Result};
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

const MAGIC: &[u8; 8] = b"MLABPTS1";

pub fn write_points_csv(ps: &PointSet, path: &Path) -> Result<()> {
    let tmp = tmp_path(path);
    {
        let mut w = BufWriter::new(std::fs::File::create(&tmp)?);
        writeln!(w, "x,y")?;
        for p in ps.points() {
            // {:.16e} prints 17 significant digits, enough to round-trip f64.
            writeln!(w, "{:.16e},{:.16e}", p.x, p.y)?;
        }
        w.flush()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

pub fn read_points_csv(path: &Path) -> Result<PointSet> {
    let r = BufReader::new(std::fs::File::open(path)?);
    let mut points = Vec::new();
    for (lineno, line) in r.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || (lineno == 0 && line.eq_ignore_ascii_case("x,y")) {
            continue;
        }
        let mut it = line.split(',');
        let x = parse_field(it.next(), lineno)?;
        let y = parse_field(it.next(), lineno)?;
        points.push(Point::new(x, y));
    }
    PointSet::new(points, 0)
}

fn parse_field(field: Option<&str>, lineno: usize) -> Result<f64> {
    field
        .ok_or_else(|| Error::Parse(format!("line {}: expected x,y", lineno + 1)))?
        .trim()
        .parse::<f64>()
        .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))
}

pub fn write_points_binary(ps: &PointSet, path: &Path) -> Result<()> {
    let tmp = tmp_path(path);
    {
        let mut w = BufWriter::new(std::fs::File::create(&tmp)?);
        w.write_all(MAGIC)?;
        w.write_all(&[0u8; 8])?;
        w.write_all(&(ps.len() as u64).to_le_bytes())?;
        for p in ps.points() {
            w.write_all(&p.x.to_le_bytes())?;
            w.write_all(&p.y.to_le_bytes())?;
        }
        w.flush()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

pub fn read_points_binary(path: &Path) -> Result<PointSet> {
    let mut r = BufReader::new(std::fs::File::open(path)?);
    let mut header = [0u8; 16];
    r.read_exact(&mut header)?;
    if &header[..8] != MAGIC {
        return Err(Error::Parse("bad magic in binary point file".into()));
    }
    let mut buf8 = [0u8; 8];
    r.read_exact(&mut buf8)?;
    let count = u64::from_le_bytes(buf8) as usize;
    let mut points = Vec::with_capacity(count);
    for _ in 0..count {
        r.read_exact(&mut buf8)?;
        let x = f64::from_le_bytes(buf8);
        r.read_exact(&mut buf8)?;
        let y = f64::from_le_bytes(buf8);
        points.push(Point::new(x, y));
    }
    PointSet::new(points, 0)
}

pub(crate) fn tmp_path(path: &Path) -> std::path::PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".tmp");
    path.with_file_name(name)
}
