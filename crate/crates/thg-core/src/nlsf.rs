//! NLSF field snapshot format.
//!
//! Layout, all little-endian:
//!   magic "NLSF" | version u32 | n u32 | points_per_axis u32 |
//!   half_width f64 | component_count u32 |
//!   components, each points^n row-major (re, im) f64 pairs.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{make_grid, Field};

pub const MAGIC: &[u8; 4] = b"NLSF";
pub const VERSION: u32 = 1;

/// Write one or more components sharing a grid.
pub fn write_snapshot(path: &Path, components: &[&Field]) -> Result<()> {
    let first = components
        .first()
        .ok_or_else(|| Error::SnapshotFormat("no components".into()))?;
    let grid = first.grid();
    if components.iter().any(|c| c.grid() != grid) {
        return Err(Error::GridMismatch);
    }
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(grid.n() as u32).to_le_bytes())?;
    w.write_all(&(grid.points_per_axis() as u32).to_le_bytes())?;
    w.write_all(&grid.half_width().to_le_bytes())?;
    w.write_all(&(components.len() as u32).to_le_bytes())?;
    for c in components {
        for v in c.values() {
            w.write_all(&v.re.to_le_bytes())?;
            w.write_all(&v.im.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Read all components of a snapshot.
pub fn read_snapshot(path: &Path) -> Result<Vec<Field>> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::SnapshotFormat("bad magic bytes".into()));
    }
    let version = read_u32(&mut r)?;
    if version != VERSION {
        return Err(Error::SnapshotFormat(format!(
            "unsupported version {version}"
        )));
    }
    let n = read_u32(&mut r)? as usize;
    let points = read_u32(&mut r)? as usize;
    let half_width = read_f64(&mut r)?;
    let count = read_u32(&mut r)? as usize;
    let grid = make_grid(n, points, half_width)?;
    let total = grid.total_points();
    let mut fields = Vec::with_capacity(count);
    for _ in 0..count {
        let mut values = Vec::with_capacity(total);
        for _ in 0..total {
            let re = read_f64(&mut r)?;
            let im = read_f64(&mut r)?;
            values.push(Complex64::new(re, im));
        }
        fields.push(Field::new(grid.clone(), values)?);
    }
    Ok(fields)
}

fn read_u32(r: &mut impl Read) -> Result<u32> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf)?;
    Ok(u32::from_le_bytes(buf))
}

fn read_f64(r: &mut impl Read) -> Result<f64> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)?;
    Ok(f64::from_le_bytes(buf))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn round_trip(samples in proptest::collection::vec((-1e3f64..1e3, -1e3f64..1e3), 32)) {
            let grid = make_grid(1, 32, 2.5).unwrap();
            let values: Vec<Complex64> = samples.iter().map(|(re, im)| Complex64::new(*re, *im)).collect();
            let f = Field::new(grid.clone(), values).unwrap();
            let g = Field::from_real_fn(grid, |x| x[0]);
            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join("pair.nlsf");
            write_snapshot(&path, &[&f, &g]).unwrap();
            let back = read_snapshot(&path).unwrap();
            prop_assert_eq!(back.len(), 2);
            prop_assert_eq!(back[0].values(), f.values());
            prop_assert_eq!(back[1].values(), g.values());
        }
    }

    #[test]
    fn rejects_bad_magic() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bogus.nlsf");
        std::fs::write(&path, b"XXXX").unwrap();
        assert!(read_snapshot(&path).is_err());
    }
}
