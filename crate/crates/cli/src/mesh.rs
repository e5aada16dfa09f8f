//! Triangulated parametric grids in the Wavefront OBJ text format.

use std::io::{self, Write};

use frontlab::spec::{Domain, SurfaceSpec};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("grid must be at least 2x2, got {0}x{1}")]
    Grid(usize, usize),
    #[error("f is not finite at ({u:.6}, {v:.6})")]
    NonFinite { u: f64, v: f64 },
    #[error(transparent)]
    Eval(#[from] frontlab::expr::EvalError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<[f64; 3]>,
    /// Zero-based vertex indices.
    pub faces: Vec<[usize; 3]>,
}

/// Sample f on an nu × nv grid over `domain` and split each cell into two
/// triangles.
pub fn grid_mesh(spec: &SurfaceSpec, domain: Domain, nu: usize, nv: usize) -> Result<Mesh, MeshError> {
    if nu < 2 || nv < 2 {
        return Err(MeshError::Grid(nu, nv));
    }
    let lerp = |r: [f64; 2], i: usize, n: usize| r[0] + (r[1] - r[0]) * i as f64 / (n - 1) as f64;
    let mut vertices = Vec::with_capacity(nu * nv);
    for i in 0..nu {
        for j in 0..nv {
            let (u, v) = (lerp(domain.u, i, nu), lerp(domain.v, j, nv));
            let mut x = [0.0; 3];
            for k in 0..3 {
                x[k] = spec.f[k].eval(&[u, v], &spec.params)?;
            }
            if x.iter().any(|c| !c.is_finite()) {
                return Err(MeshError::NonFinite { u, v });
            }
            vertices.push(x);
        }
    }
    let at = |i: usize, j: usize| i * nv + j;
    let mut faces = Vec::with_capacity(2 * (nu - 1) * (nv - 1));
    for i in 0..nu - 1 {
        for j in 0..nv - 1 {
            faces.push([at(i, j), at(i + 1, j), at(i + 1, j + 1)]);
            faces.push([at(i, j), at(i + 1, j + 1), at(i, j + 1)]);
        }
    }
    Ok(Mesh { vertices, faces })
}

impl Mesh {
    pub fn write_obj<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "# {} vertices, {} triangles", self.vertices.len(), self.faces.len())?;
        for v in &self.vertices {
            writeln!(w, "v {:.12e} {:.12e} {:.12e}", v[0], v[1], v[2])?;
        }
        for f in &self.faces {
            writeln!(w, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_rejection() {
        let spec = SurfaceSpec::from_map(["u", "v^2", "v^3"]).unwrap();
        let d = Domain { u: [-1.0, 1.0], v: [-1.0, 1.0] };
        let m = grid_mesh(&spec, d, 100, 100).unwrap();
        assert_eq!(m.vertices.len(), 10_000);
        assert_eq!(m.faces.len(), 2 * 99 * 99);
        assert_eq!(m.vertices[0], [-1.0, 1.0, -1.0]);
        assert!(m.faces.iter().flatten().all(|&i| i < m.vertices.len()));
        assert!(matches!(grid_mesh(&spec, d, 1, 50), Err(MeshError::Grid(1, 50))));
    }

    #[test]
    fn obj_text() {
        let spec = SurfaceSpec::from_map(["u", "v", "0"]).unwrap();
        let m = grid_mesh(&spec, Domain::default(), 2, 2).unwrap();
        let mut buf = Vec::new();
        m.write_obj(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert_eq!(s.lines().filter(|l| l.starts_with("v ")).count(), 4);
        assert!(s.contains("f 1 3 4\nf 1 4 2\n"), "{s}");
    }
}
