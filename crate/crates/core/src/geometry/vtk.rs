//! Legacy ASCII VTK export of space-time slabs. Elements are written as
//! hexahedra (`d = 2`, coordinates `(x_1, x_2, t)`) or quads (`d = 1`,
//! coordinates `(x_1, t, 0)`), one unshared set of points per element.

use std::io::{self, Write};

use super::slab::{mesh_metrics, SpaceTimeSlab};

const VTK_QUAD: u8 = 9;
const VTK_HEXAHEDRON: u8 = 12;

/// Node order of VTK cells in terms of element node ids (bit 0 = time).
fn vtk_order(dim: usize) -> &'static [usize] {
    match dim {
        // (x-, t-), (x+, t-), (x+, t+), (x-, t+)
        1 => &[0, 2, 3, 1],
        // bottom ring counter-clockwise, then top ring
        _ => &[0, 2, 6, 4, 1, 3, 7, 5],
    }
}

/// Optional nodal field per slab: `values[s][e * n_nodes + node]` in element
/// node order.
pub struct NodalField<'a> {
    pub name: &'a str,
    pub values: &'a [Vec<f64>],
}

pub fn write_slabs<W: Write>(out: &mut W, slabs: &[SpaceTimeSlab], field: Option<NodalField<'_>>) -> io::Result<()> {
    let dim = slabs.first().map_or(2, |s| s.dim);
    let order = vtk_order(dim);
    let npe = order.len();
    let n_cells: usize = slabs.iter().map(|s| s.elements.len()).sum();
    writeln!(out, "# vtk DataFile Version 3.0")?;
    writeln!(out, "space-time slabs")?;
    writeln!(out, "ASCII")?;
    writeln!(out, "DATASET UNSTRUCTURED_GRID")?;
    writeln!(out, "POINTS {} double", n_cells * npe)?;
    for s in slabs {
        for e in &s.elements {
            for &i in order {
                let n = e.nodes[i];
                match dim {
                    1 => writeln!(out, "{:e} {:e} 0", n[1], n[0])?,
                    _ => writeln!(out, "{:e} {:e} {:e}", n[1], n[2], n[0])?,
                }
            }
        }
    }
    writeln!(out, "CELLS {} {}", n_cells, n_cells * (npe + 1))?;
    for c in 0..n_cells {
        write!(out, "{npe}")?;
        for k in 0..npe {
            write!(out, " {}", c * npe + k)?;
        }
        writeln!(out)?;
    }
    writeln!(out, "CELL_TYPES {n_cells}")?;
    let ty = if dim == 1 { VTK_QUAD } else { VTK_HEXAHEDRON };
    for _ in 0..n_cells {
        writeln!(out, "{ty}")?;
    }
    writeln!(out, "CELL_DATA {n_cells}")?;
    writeln!(out, "SCALARS slab int 1")?;
    writeln!(out, "LOOKUP_TABLE default")?;
    for s in slabs {
        for _ in &s.elements {
            writeln!(out, "{}", s.index)?;
        }
    }
    writeln!(out, "SCALARS shape_ratio double 1")?;
    writeln!(out, "LOOKUP_TABLE default")?;
    for s in slabs {
        for m in mesh_metrics(s) {
            writeln!(out, "{:e}", m.ratio)?;
        }
    }
    if let Some(f) = field {
        writeln!(out, "POINT_DATA {}", n_cells * npe)?;
        writeln!(out, "SCALARS {} double 1", f.name)?;
        writeln!(out, "LOOKUP_TABLE default")?;
        for (s, vals) in slabs.iter().zip(f.values) {
            for e in 0..s.elements.len() {
                for &i in order {
                    writeln!(out, "{:e}", vals[e * npe + i])?;
                }
            }
        }
    }
    Ok(())
}
