//! Serialization of grid fields.
//!
//! Binary layout, all little-endian:
//!
//! ```text
//! u32 d | u32 N | f64 L | f64 m | N^d f64 (f) | N^d f64 (g, optional)
//! ```
//!
//! Payloads are row-major with axis 0 slowest. A file carrying a single payload
//! is a bare field; two payloads are Cauchy data `(f, g)`.
//!
//! For `d = 1` a CSV form with header `x,f,g` is also supported.

use std::io::{BufRead, Read, Write};

use crate::cauchy::CauchyData;
use crate::error::{Error, Result};
use crate::grid::{Field, GridSpec};

const HEADER_LEN: usize = 4 + 4 + 8 + 8;

fn write_header<W: Write>(w: &mut W, grid: &GridSpec, mass: f64) -> Result<()> {
    w.write_all(&(grid.dim() as u32).to_le_bytes())?;
    w.write_all(&(grid.n() as u32).to_le_bytes())?;
    w.write_all(&grid.half_extent().to_le_bytes())?;
    w.write_all(&mass.to_le_bytes())?;
    Ok(())
}

fn write_payload<W: Write>(w: &mut W, field: &Field) -> Result<()> {
    for v in field.values() {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn write_field<W: Write>(w: &mut W, field: &Field, mass: f64) -> Result<()> {
    write_header(w, field.grid(), mass)?;
    write_payload(w, field)
}

pub fn write_cauchy<W: Write>(w: &mut W, data: &CauchyData) -> Result<()> {
    write_header(w, data.grid(), data.mass())?;
    write_payload(w, data.f())?;
    write_payload(w, data.g())
}

/// Contents of a binary field file.
#[derive(Debug, Clone)]
pub struct FieldFile {
    pub grid: GridSpec,
    pub mass: f64,
    pub fields: Vec<Field>,
}

impl FieldFile {
    /// Interpret the file as Cauchy data; a single payload is read as `(f, 0)`.
    pub fn into_cauchy(self) -> Result<CauchyData> {
        let mut it = self.fields.into_iter();
        let f = it.next().ok_or_else(|| Error::Format("empty payload".into()))?;
        let g = it.next().unwrap_or_else(|| self.grid.zeros());
        CauchyData::new(f, g, self.mass)
    }
}

pub fn read_fields<R: Read>(r: &mut R) -> Result<FieldFile> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    if bytes.len() < HEADER_LEN {
        return Err(Error::Format("file shorter than header".into()));
    }
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
    let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
    let grid = GridSpec::new(u32_at(0) as usize, u32_at(4) as usize, f64_at(8))?;
    let mass = f64_at(16);
    let payload = &bytes[HEADER_LEN..];
    let field_bytes = grid.len() * 8;
    if payload.is_empty() || payload.len() % field_bytes != 0 || payload.len() / field_bytes > 2 {
        return Err(Error::Format(format!(
            "payload of {} bytes is not one or two fields of {field_bytes} bytes",
            payload.len()
        )));
    }
    let fields = payload
        .chunks_exact(field_bytes)
        .map(|chunk| {
            let data = chunk.chunks_exact(8).map(|b| f64::from_le_bytes(b.try_into().unwrap())).collect();
            Field::from_vec(grid, data)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FieldFile { grid, mass, fields })
}

/// One-dimensional Cauchy data as CSV rows `x,f,g`.
pub fn write_csv_1d<W: Write>(w: &mut W, data: &CauchyData) -> Result<()> {
    let grid = data.grid();
    if grid.dim() != 1 {
        return Err(Error::InvalidInput("CSV form is only defined for d = 1".into()));
    }
    writeln!(w, "x,f,g")?;
    for (j, (f, g)) in data.f().values().iter().zip(data.g().values()).enumerate() {
        writeln!(w, "{},{},{}", grid.coord(j), f, g)?;
    }
    Ok(())
}

/// Parse `x,f,g` rows (or `x,f` with `g = 0`). The abscissae must form the
/// grid `-L + jΔx` with a power-of-two count.
pub fn read_csv_1d<R: BufRead>(r: R, mass: f64) -> Result<CauchyData> {
    let (xs, cols) = read_csv_columns(r)?;
    let n = xs.len();
    if n < 2 {
        return Err(Error::Format("need at least two rows".into()));
    }
    let dx = xs[1] - xs[0];
    let half_extent = -xs[0];
    let grid = GridSpec::new(1, n, half_extent)?;
    for (j, x) in xs.iter().enumerate() {
        if (x - grid.coord(j)).abs() > 1e-9 * half_extent.max(dx) {
            return Err(Error::Format(format!("row {j}: x = {x} is off the uniform grid")));
        }
    }
    let f = Field::from_vec(grid, cols[0].clone())?;
    let g = match cols.get(1) {
        Some(c) => Field::from_vec(grid, c.clone())?,
        None => grid.zeros(),
    };
    CauchyData::new(f, g, mass)
}

/// Read a numeric CSV with a header line; returns the first column and the rest.
pub fn read_csv_columns<R: BufRead>(r: R) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let mut lines = r.lines();
    let header = lines.next().ok_or_else(|| Error::Format("empty CSV".into()))??;
    let width = header.split(',').count();
    if width < 2 {
        return Err(Error::Format("CSV needs at least two columns".into()));
    }
    let mut first = Vec::new();
    let mut rest = vec![Vec::new(); width - 1];
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let vals: Vec<f64> = line
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Format(format!("row {}: {e}", i + 1)))?;
        if vals.len() != width {
            return Err(Error::Format(format!("row {}: expected {width} columns", i + 1)));
        }
        first.push(vals[0]);
        for (c, v) in rest.iter_mut().zip(&vals[1..]) {
            c.push(*v);
        }
    }
    Ok((first, rest))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> CauchyData {
        let grid = GridSpec::new(1, 64, 3.0).unwrap();
        let f = grid.sample(|x| (-4.0 * x[0] * x[0]).exp());
        let g = grid.sample(|x| x[0] * (-4.0 * x[0] * x[0]).exp());
        CauchyData::new(f, g, 0.5).unwrap()
    }

    #[test]
    fn binary_round_trip_is_bit_exact() {
        let data = sample();
        let mut buf = Vec::new();
        write_cauchy(&mut buf, &data).unwrap();
        assert_eq!(buf.len(), HEADER_LEN + 2 * 64 * 8);
        let back = read_fields(&mut buf.as_slice()).unwrap().into_cauchy().unwrap();
        assert_eq!(back.f(), data.f());
        assert_eq!(back.g(), data.g());
        assert_eq!(back.mass(), 0.5);
    }

    #[test]
    fn truncated_payload_is_rejected() {
        let data = sample();
        let mut buf = Vec::new();
        write_cauchy(&mut buf, &data).unwrap();
        buf.pop();
        assert!(matches!(read_fields(&mut buf.as_slice()), Err(Error::Format(_))));
    }

    #[test]
    fn csv_round_trip() {
        let data = sample();
        let mut buf = Vec::new();
        write_csv_1d(&mut buf, &data).unwrap();
        let back = read_csv_1d(buf.as_slice(), 0.5).unwrap();
        let err = back.f().zip_map(data.f(), |a, b| (a - b).abs()).max_abs();
        assert!(err < 1e-15);
    }
}
