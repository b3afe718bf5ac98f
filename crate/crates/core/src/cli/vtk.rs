//! Legacy ASCII VTK unstructured-grid snapshots.

use std::io::Write;

use crate::fem::{ScalarField, VectorField};
use crate::mesh::TriMesh;

const VTK_TRIANGLE: u8 = 5;

/// Writes `eta` as point scalars and `u` as point vectors (z = 0).
pub fn write_vtk(
    mut w: impl Write,
    mesh: &TriMesh,
    eta: &ScalarField,
    u: &VectorField,
    title: &str,
) -> std::io::Result<()> {
    let nv = mesh.num_vertices();
    let nt = mesh.num_triangles();
    writeln!(w, "# vtk DataFile Version 3.0")?;
    writeln!(w, "{}", title.lines().next().unwrap_or("").chars().take(255).collect::<String>())?;
    writeln!(w, "ASCII")?;
    writeln!(w, "DATASET UNSTRUCTURED_GRID")?;
    writeln!(w, "POINTS {nv} double")?;
    for p in mesh.vertices() {
        writeln!(w, "{:.16e} {:.16e} 0", p[0], p[1])?;
    }
    writeln!(w, "CELLS {nt} {}", 4 * nt)?;
    for t in mesh.triangles() {
        writeln!(w, "3 {} {} {}", t[0], t[1], t[2])?;
    }
    writeln!(w, "CELL_TYPES {nt}")?;
    for _ in 0..nt {
        writeln!(w, "{VTK_TRIANGLE}")?;
    }
    writeln!(w, "POINT_DATA {nv}")?;
    writeln!(w, "SCALARS eta double 1")?;
    writeln!(w, "LOOKUP_TABLE default")?;
    for v in eta.values() {
        writeln!(w, "{v:.16e}")?;
    }
    writeln!(w, "VECTORS u double")?;
    for c in u.values().chunks_exact(2) {
        writeln!(w, "{:.16e} {:.16e} 0", c[0], c[1])?;
    }
    Ok(())
}
