//! Legacy ASCII VTK output of the mesh and nodal fields.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use pnp_core::{Mesh, State};

/// VTK cell type of a linear triangle.
pub const VTK_TRIANGLE: u8 = 5;

#[derive(Debug, thiserror::Error)]
#[error("cannot write {path}: {source}")]
pub struct VtkError {
    pub path: PathBuf,
    #[source]
    pub source: io::Error,
}

/// Writes the mesh with the given point scalars.
pub fn write_vtk<W: Write>(mut w: W, mesh: &Mesh, title: &str, scalars: &[(&str, &[f64])]) -> io::Result<()> {
    let nn = mesh.num_nodes();
    for (name, values) in scalars {
        if values.len() != nn {
            return Err(io::Error::new(
                io::ErrorKind::InvalidInput,
                format!("field '{name}' has {} values for {nn} nodes", values.len()),
            ));
        }
    }
    writeln!(w, "# vtk DataFile Version 3.0")?;
    writeln!(w, "{}", title.lines().next().unwrap_or(""))?;
    writeln!(w, "ASCII")?;
    writeln!(w, "DATASET UNSTRUCTURED_GRID")?;
    writeln!(w, "POINTS {nn} double")?;
    for [x, y] in mesh.nodes() {
        writeln!(w, "{x:.16e} {y:.16e} 0")?;
    }
    let ne = mesh.num_elements();
    writeln!(w, "CELLS {ne} {}", 4 * ne)?;
    for [a, b, c] in mesh.elements() {
        writeln!(w, "3 {a} {b} {c}")?;
    }
    writeln!(w, "CELL_TYPES {ne}")?;
    for _ in 0..ne {
        writeln!(w, "{VTK_TRIANGLE}")?;
    }
    if !scalars.is_empty() {
        writeln!(w, "POINT_DATA {nn}")?;
        for (name, values) in scalars {
            writeln!(w, "SCALARS {name} double 1")?;
            writeln!(w, "LOOKUP_TABLE default")?;
            for v in values.iter() {
                writeln!(w, "{v:.16e}")?;
            }
        }
    }
    w.flush()
}

fn to_file(path: &Path, body: impl FnOnce(BufWriter<File>) -> io::Result<()>) -> Result<(), VtkError> {
    let wrap = |source| VtkError { path: path.to_path_buf(), source };
    let file = File::create(path).map_err(wrap)?;
    body(BufWriter::new(file)).map_err(wrap)
}

/// Writes the bare mesh.
pub fn write_mesh(mesh: &Mesh, path: &Path) -> Result<(), VtkError> {
    to_file(path, |w| write_vtk(w, mesh, "mesh", &[]))
}

/// Writes `p`, `n` and `phi` of a state.
pub fn write_vtk_snapshot(state: &State, mesh: &Mesh, path: &Path) -> Result<(), VtkError> {
    let title = format!("t = {}", state.t);
    to_file(path, |w| write_vtk(w, mesh, &title, &[("p", &state.p[..]), ("n", &state.n[..]), ("phi", &state.phi[..])]))
}
