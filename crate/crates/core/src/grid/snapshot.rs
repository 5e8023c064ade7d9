//! Lossless binary snapshots of a [`DistributionField`].
//!
//! Layout (all integers and floats little-endian):
//!
//! | bytes | content |
//! |-------|---------|
//! | 5 | magic `RBGK1` |
//! | 4 + 8 | u32 n_cells, f64 length |
//! | 4 + 8 | u32 n_per_axis, f64 p_max |
//! | 4 + 8 | u32 n_energy, f64 t_ref |
//! | 8 n_energy | energy nodes |
//! | 8 n_energy | energy weights |
//! | 1 + 24 | u8 density kind (0 power law, 1 damped), f64 f_i, f64 b_damp, f64 r |
//! | 32 | f64 c, m, k_b, tau |
//! | 8 | f64 simulation time |
//! | 8 | u64 payload length in values |
//! | 8 payload | f64 values in (cell, momentum, energy) order |

use std::io::{Read, Write};
use std::sync::Arc;

use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::grid::energy::EnergyQuadrature;
use crate::grid::field::DistributionField;
use crate::grid::mesh::SpatialMesh;
use crate::grid::momentum::MomentumGrid;
use crate::grid::phase::PhaseGrid;
use crate::special::StateDensity;

pub const MAGIC: &[u8; 5] = b"RBGK1";

fn put_u32<W: Write>(w: &mut W, v: usize) -> Result<()> {
    let v = u32::try_from(v).map_err(|_| Error::Snapshot(format!("{v} does not fit in u32")))?;
    w.write_all(&v.to_le_bytes())?;
    Ok(())
}

fn put_f64<W: Write>(w: &mut W, v: f64) -> Result<()> {
    w.write_all(&v.to_le_bytes())?;
    Ok(())
}

fn get_u32<R: Read>(r: &mut R) -> Result<usize> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b) as usize)
}

fn get_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn get_f64<R: Read>(r: &mut R) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

pub fn write_snapshot<W: Write>(w: &mut W, field: &DistributionField, t: f64) -> Result<()> {
    let g = &field.grid;
    w.write_all(MAGIC)?;
    put_u32(w, field.mesh.n_cells)?;
    put_f64(w, field.mesh.length)?;
    put_u32(w, g.momentum.n_per_axis)?;
    put_f64(w, g.momentum.p_max)?;
    put_u32(w, g.energy.len())?;
    put_f64(w, g.t_ref)?;
    for &x in &g.energy.nodes {
        put_f64(w, x)?;
    }
    for &x in &g.energy.weights {
        put_f64(w, x)?;
    }
    let (kind, f_i, b_damp, r) = match g.density {
        StateDensity::PowerLaw { f_i } => (0u8, f_i, 0.0, 0.0),
        StateDensity::DampedPowerLaw { f_i, b_damp, r } => (1u8, f_i, b_damp, r),
    };
    w.write_all(&[kind])?;
    for v in [f_i, b_damp, r, g.constants.c, g.constants.m, g.constants.k_b, g.constants.tau, t] {
        put_f64(w, v)?;
    }
    w.write_all(&(field.values.len() as u64).to_le_bytes())?;
    let mut buf = Vec::with_capacity(8 * field.values.len());
    for &v in &field.values {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

/// Reads a snapshot; returns the field and its simulation time.
pub fn read_snapshot<R: Read>(r: &mut R) -> Result<(DistributionField, f64)> {
    let mut magic = [0u8; 5];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Snapshot("bad magic".into()));
    }
    let n_cells = get_u32(r)?;
    let length = get_f64(r)?;
    let n_per_axis = get_u32(r)?;
    let p_max = get_f64(r)?;
    let ne = get_u32(r)?;
    let t_ref = get_f64(r)?;
    let nodes = (0..ne).map(|_| get_f64(r)).collect::<Result<Vec<_>>>()?;
    let weights = (0..ne).map(|_| get_f64(r)).collect::<Result<Vec<_>>>()?;
    let mut kind = [0u8; 1];
    r.read_exact(&mut kind)?;
    let f_i = get_f64(r)?;
    let b_damp = get_f64(r)?;
    let rr = get_f64(r)?;
    let density = match kind[0] {
        0 => StateDensity::PowerLaw { f_i },
        1 => StateDensity::DampedPowerLaw { f_i, b_damp, r: rr },
        k => return Err(Error::Snapshot(format!("unknown density kind {k}"))),
    };
    let constants = PhysicalConstants {
        c: get_f64(r)?,
        m: get_f64(r)?,
        k_b: get_f64(r)?,
        tau: get_f64(r)?,
    };
    let t = get_f64(r)?;
    constants.validate()?;
    density.validate()?;
    let mesh = SpatialMesh::new(n_cells, length)?;
    let momentum = MomentumGrid::new(p_max, n_per_axis, &constants)?;
    let energy = EnergyQuadrature::from_parts(nodes, weights)?;
    let grid = Arc::new(PhaseGrid::from_parts(constants, density, t_ref, momentum, energy));
    let len = get_u64(r)? as usize;
    if len != n_cells * grid.cell_len() {
        return Err(Error::Snapshot(format!(
            "payload of {len} values does not match the header ({} expected)",
            n_cells * grid.cell_len()
        )));
    }
    let mut buf = vec![0u8; 8 * len];
    r.read_exact(&mut buf)?;
    let values = buf
        .chunks_exact(8)
        .map(|b| f64::from_le_bytes(b.try_into().expect("chunk of 8")))
        .collect();
    let field = DistributionField::from_values(grid, mesh, values)?;
    Ok((field, t))
}

pub fn save(path: &std::path::Path, field: &DistributionField, t: f64) -> Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_snapshot(&mut w, field, t)?;
    w.flush()?;
    Ok(())
}

pub fn load(path: &std::path::Path) -> Result<(DistributionField, f64)> {
    let mut r = std::io::BufReader::new(std::fs::File::open(path)?);
    read_snapshot(&mut r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::phase::GridSpec;

    #[test]
    fn round_trip_is_bit_exact() {
        let k = PhysicalConstants { c: 1.5, ..Default::default() };
        let d = StateDensity::DampedPowerLaw { f_i: 3.0, b_damp: 0.2, r: 1.0 };
        let spec = GridSpec {
            n_per_axis: 8,
            n_energy: 3,
            ..Default::default()
        };
        let grid = Arc::new(PhaseGrid::new(k, d, &spec, 0.1).unwrap());
        let mesh = SpatialMesh::new(3, 2.0).unwrap();
        let mut f = DistributionField::zeros(grid, mesh);
        for (i, v) in f.values.iter_mut().enumerate() {
            *v = (i as f64 * 0.37).sin() * 1e-3 - 1e-300;
        }
        let mut bytes = Vec::new();
        write_snapshot(&mut bytes, &f, 4.25).unwrap();
        assert_eq!(&bytes[..5], MAGIC);
        let (g, t) = read_snapshot(&mut bytes.as_slice()).unwrap();
        assert_eq!(t, 4.25);
        assert_eq!(g, f);
        bytes[0] = b'X';
        assert!(read_snapshot(&mut bytes.as_slice()).is_err());
    }

    #[test]
    fn truncated_payload_is_an_error() {
        let k = PhysicalConstants::default();
        let spec = GridSpec {
            n_per_axis: 8,
            n_energy: 2,
            ..Default::default()
        };
        let grid = Arc::new(PhaseGrid::new(k, StateDensity::power_law(2.0), &spec, 0.1).unwrap());
        let f = DistributionField::zeros(grid, SpatialMesh::default());
        let mut bytes = Vec::new();
        write_snapshot(&mut bytes, &f, 0.0).unwrap();
        bytes.truncate(bytes.len() - 3);
        assert!(read_snapshot(&mut bytes.as_slice()).is_err());
    }
}
