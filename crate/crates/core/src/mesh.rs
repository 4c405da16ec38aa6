//! Grid meshes of a rotational surface, written as OBJ (three projected
//! coordinates, quad faces) or CSV (all four coordinates and K).

use crate::algebra::PseudoVector4;
use crate::curve::{CurveError, ProfileCurve};
use crate::grid::{sample_positions, GridSpec};
use crate::surface::SurfaceKind;
use std::io::{self, Write};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshVertex {
    pub t: f64,
    pub s: f64,
    pub position: PseudoVector4,
    pub k: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub nt: usize,
    pub ns: usize,
    /// Row-major, s outer and t inner.
    pub vertices: Vec<MeshVertex>,
}

/// Checks 1-based projection axes: three distinct indices in 1..=4.
pub fn check_projection(axes: [usize; 3]) -> Result<(), String> {
    if axes.iter().any(|&a| !(1..=4).contains(&a)) {
        return Err(format!("projection axes must lie in 1..4, got {axes:?}"));
    }
    if axes[0] == axes[1] || axes[0] == axes[2] || axes[1] == axes[2] {
        return Err(format!("projection axes must be distinct, got {axes:?}"));
    }
    Ok(())
}

impl Mesh {
    pub fn build(kind: SurfaceKind, curve: &ProfileCurve, grid: &GridSpec) -> Result<Self, CurveError> {
        let vertices = sample_positions(kind, curve, grid)?
            .into_iter()
            .map(|(t, s, position, k)| MeshVertex { t, s, position, k })
            .collect();
        Ok(Self { nt: grid.nt, ns: grid.ns, vertices })
    }

    pub fn quad_count(&self) -> usize {
        self.nt.saturating_sub(1) * self.ns.saturating_sub(1)
    }

    /// 1-based vertex indices of every quad, counter-clockwise in (t, s).
    pub fn quads(&self) -> impl Iterator<Item = [usize; 4]> + '_ {
        let nt = self.nt;
        (0..self.ns.saturating_sub(1)).flat_map(move |j| {
            (0..nt.saturating_sub(1)).map(move |i| {
                let v = j * nt + i + 1;
                [v, v + 1, v + 1 + nt, v + nt]
            })
        })
    }

    pub fn write_obj<W: Write>(&self, mut w: W, axes: [usize; 3]) -> io::Result<()> {
        check_projection(axes).map_err(|e| io::Error::new(io::ErrorKind::InvalidInput, e))?;
        writeln!(w, "# rotational surface mesh {}x{}, axes {},{},{}", self.nt, self.ns, axes[0], axes[1], axes[2])?;
        for v in &self.vertices {
            let p = v.position;
            writeln!(w, "v {} {} {}", p[axes[0] - 1], p[axes[1] - 1], p[axes[2] - 1])?;
        }
        for q in self.quads() {
            writeln!(w, "f {} {} {} {}", q[0], q[1], q[2], q[3])?;
        }
        Ok(())
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "t,s,x1,x2,x3,x4,K")?;
        for v in &self.vertices {
            let p = v.position;
            writeln!(w, "{},{},{},{},{},{},{}", v.t, v.s, p.x1, p.x2, p.x3, p.x4, v.k)?;
        }
        Ok(())
    }
}
