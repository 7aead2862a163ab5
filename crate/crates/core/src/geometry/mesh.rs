use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryTag {
    /// Homogeneous Dirichlet, `u = 0`.
    Dirichlet,
    /// Mixed inflow/Neumann condition `-ζ u β·n + ν ∇u·n = g`.
    Neumann,
}

impl BoundaryTag {
    fn letter(self) -> char {
        match self {
            BoundaryTag::Dirichlet => 'D',
            BoundaryTag::Neumann => 'N',
        }
    }
}

/// A tagged boundary face of the spatial mesh: an edge `(v0, v1)` for
/// `d = 2`, a single vertex for `d = 1` (second entry unused).
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryFace {
    pub vertices: [usize; 2],
    pub tag: BoundaryTag,
}

/// Conforming spatial mesh of segments (`d = 1`) or counter-clockwise
/// quadrilaterals (`d = 2`).
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialMesh {
    pub dim: usize,
    pub vertices: Vec<[f64; 2]>,
    /// `2^d` vertex ids per cell; quadrilaterals are listed counter-clockwise.
    pub cells: Vec<[usize; 4]>,
    pub boundary: Vec<BoundaryFace>,
}

/// A spatial face (edge or vertex) with its adjacent cells.
#[derive(Debug, Clone)]
pub struct SpatialFace {
    /// Canonical vertex order: `vertices[0] < vertices[1]` for edges.
    pub vertices: [usize; 2],
    /// `(cell, local face)` pairs sorted by cell id.
    pub cells: Vec<(usize, usize)>,
    pub tag: Option<BoundaryTag>,
}

#[derive(Debug, Clone)]
pub struct MeshTopology {
    pub faces: Vec<SpatialFace>,
    /// Spatial face id for each local face `0..2d` of each cell.
    pub cell_faces: Vec<[usize; 4]>,
}

/// Tensor corner `(a, b)` (index `a + 2b`) to position in the
/// counter-clockwise vertex list of a quadrilateral.
pub(crate) const QUAD_CORNER_TO_CCW: [usize; 4] = [0, 1, 3, 2];

impl SpatialMesh {
    pub fn vertices_per_cell(&self) -> usize {
        1 << self.dim
    }

    pub fn faces_per_cell(&self) -> usize {
        2 * self.dim
    }

    /// Vertices of local face `lf` of `cell`, ordered from the end at
    /// tangential reference coordinate `-1` to the end at `+1`.
    /// Local face `2(k-1) + s` is the face `ξ_k = ∓1` for spatial axis `k`.
    pub fn local_face_vertices(&self, cell: usize, lf: usize) -> [usize; 2] {
        let c = &self.cells[cell];
        match self.dim {
            1 => [c[lf], c[lf]],
            _ => match lf {
                0 => [c[0], c[3]],
                1 => [c[1], c[2]],
                2 => [c[0], c[1]],
                _ => [c[3], c[2]],
            },
        }
    }

    /// Uniform `nx × ny` grid of the box `[lower, upper]`. The tag of each
    /// boundary edge is chosen by `tag` from the edge midpoint.
    pub fn uniform_grid(
        nx: usize,
        ny: usize,
        lower: [f64; 2],
        upper: [f64; 2],
        tag: impl Fn([f64; 2]) -> BoundaryTag,
    ) -> SpatialMesh {
        let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
        for j in 0..=ny {
            for i in 0..=nx {
                let x = lower[0] + (upper[0] - lower[0]) * i as f64 / nx as f64;
                let y = lower[1] + (upper[1] - lower[1]) * j as f64 / ny as f64;
                vertices.push([x, y]);
            }
        }
        let vid = |i: usize, j: usize| j * (nx + 1) + i;
        let mut cells = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                cells.push([vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)]);
            }
        }
        let mut boundary = Vec::new();
        let push = |a: usize, b: usize, boundary: &mut Vec<BoundaryFace>| {
            let (pa, pb) = (vertices[a], vertices[b]);
            let mid = [0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])];
            boundary.push(BoundaryFace { vertices: [a, b], tag: tag(mid) });
        };
        for i in 0..nx {
            push(vid(i, 0), vid(i + 1, 0), &mut boundary);
        }
        for j in 0..ny {
            push(vid(nx, j), vid(nx, j + 1), &mut boundary);
        }
        for i in (0..nx).rev() {
            push(vid(i + 1, ny), vid(i, ny), &mut boundary);
        }
        for j in (0..ny).rev() {
            push(vid(0, j + 1), vid(0, j), &mut boundary);
        }
        SpatialMesh { dim: 2, vertices, cells, boundary }
    }

    /// Uniform partition of `[a, b]` into `n` segments with end tags.
    pub fn uniform_interval(n: usize, a: f64, b: f64, tags: [BoundaryTag; 2]) -> SpatialMesh {
        let vertices = (0..=n).map(|i| [a + (b - a) * i as f64 / n as f64, 0.0]).collect();
        let cells = (0..n).map(|i| [i, i + 1, 0, 0]).collect();
        let boundary =
            vec![BoundaryFace { vertices: [0, 0], tag: tags[0] }, BoundaryFace { vertices: [n, n], tag: tags[1] }];
        SpatialMesh { dim: 1, vertices, cells, boundary }
    }

    /// Signed measure of a cell (length or shoelace area).
    pub fn cell_measure(&self, cell: usize) -> f64 {
        let c = &self.cells[cell];
        let v = &self.vertices;
        match self.dim {
            1 => v[c[1]][0] - v[c[0]][0],
            _ => {
                let mut a = 0.0;
                for k in 0..4 {
                    let p = v[c[k]];
                    let q = v[c[(k + 1) % 4]];
                    a += p[0] * q[1] - q[0] * p[1];
                }
                0.5 * a
            }
        }
    }

    /// Builds face adjacency and checks the mesh invariants: positive cell
    /// measures and boundary tags covering every boundary face exactly once.
    pub fn topology(&self) -> Result<MeshTopology> {
        if self.dim != 1 && self.dim != 2 {
            return Err(Error::UnsupportedDimension(self.dim));
        }
        let nv = self.vertices.len();
        for (ci, c) in self.cells.iter().enumerate() {
            if c[..self.vertices_per_cell()].iter().any(|&v| v >= nv) {
                return Err(Error::InvalidMesh(format!("cell {ci} references a missing vertex")));
            }
            if self.cell_measure(ci) <= 0.0 {
                return Err(Error::InvalidMesh(format!(
                    "cell {ci} is degenerate or clockwise (measure {:e})",
                    self.cell_measure(ci)
                )));
            }
        }
        let mut index: HashMap<[usize; 2], usize> = HashMap::new();
        let mut faces: Vec<SpatialFace> = Vec::new();
        let mut cell_faces = vec![[usize::MAX; 4]; self.cells.len()];
        for ci in 0..self.cells.len() {
            for lf in 0..self.faces_per_cell() {
                let [a, b] = self.local_face_vertices(ci, lf);
                let key = [a.min(b), a.max(b)];
                let id = *index.entry(key).or_insert_with(|| {
                    faces.push(SpatialFace { vertices: key, cells: Vec::new(), tag: None });
                    faces.len() - 1
                });
                faces[id].cells.push((ci, lf));
                cell_faces[ci][lf] = id;
            }
        }
        for (fi, f) in faces.iter().enumerate() {
            if f.cells.len() > 2 {
                return Err(Error::InvalidMesh(format!("face {fi} is shared by more than two cells")));
            }
        }
        for bf in &self.boundary {
            let [a, b] = bf.vertices;
            let key = if self.dim == 1 { [a, a] } else { [a.min(b), a.max(b)] };
            let Some(&id) = index.get(&key) else {
                return Err(Error::InvalidMesh(format!("boundary face {:?} is not a mesh face", bf.vertices)));
            };
            let face = &mut faces[id];
            if face.cells.len() != 1 {
                return Err(Error::InvalidMesh(format!("tagged face {:?} is interior", bf.vertices)));
            }
            if face.tag.is_some() {
                return Err(Error::InvalidMesh(format!("boundary face {:?} tagged twice", bf.vertices)));
            }
            face.tag = Some(bf.tag);
        }
        if let Some(f) = faces.iter().find(|f| f.cells.len() == 1 && f.tag.is_none()) {
            return Err(Error::InvalidMesh(format!("boundary face {:?} has no tag", f.vertices)));
        }
        Ok(MeshTopology { faces, cell_faces })
    }

    /// Parses the plain-text mesh format.
    ///
    /// ```text
    /// d nv nc nb
    /// x [y]                 # nv vertex lines
    /// v0 v1 [v2 v3]         # nc cell lines, 2^d ids, quads counter-clockwise
    /// v0 [v1] D|N           # nb boundary lines: vertex (d=1) or edge (d=2)
    /// ```
    ///
    /// Indices are zero based. Blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<SpatialMesh> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let err = |line: usize, message: &str| Error::MeshFormat { line, message: message.to_string() };
        let (hl, header) = lines.next().ok_or_else(|| err(1, "missing header"))?;
        let head: Vec<usize> = header
            .split_whitespace()
            .map(|s| s.parse().map_err(|_| err(hl, "header must be `d nv nc nb`")))
            .collect::<Result<_>>()?;
        let [dim, nv, nc, nb] = head[..] else {
            return Err(err(hl, "header must be `d nv nc nb`"));
        };
        if dim != 1 && dim != 2 {
            return Err(Error::UnsupportedDimension(dim));
        }
        let mut next = |what: &str| lines.next().ok_or_else(|| err(0, &format!("unexpected end of file in {what}")));
        let mut vertices = Vec::with_capacity(nv);
        for _ in 0..nv {
            let (ln, l) = next("vertices")?;
            let c: Vec<f64> = l
                .split_whitespace()
                .map(|s| s.parse().map_err(|_| err(ln, "bad coordinate")))
                .collect::<Result<_>>()?;
            if c.len() != dim {
                return Err(err(ln, "wrong number of coordinates"));
            }
            vertices.push([c[0], if dim == 2 { c[1] } else { 0.0 }]);
        }
        let nvc = 1 << dim;
        let mut cells = Vec::with_capacity(nc);
        for _ in 0..nc {
            let (ln, l) = next("cells")?;
            let c: Vec<usize> = l
                .split_whitespace()
                .map(|s| s.parse().map_err(|_| err(ln, "bad vertex index")))
                .collect::<Result<_>>()?;
            if c.len() != nvc {
                return Err(err(ln, "wrong number of cell vertices"));
            }
            let mut cell = [0; 4];
            cell[..nvc].copy_from_slice(&c);
            cells.push(cell);
        }
        let mut boundary = Vec::with_capacity(nb);
        for _ in 0..nb {
            let (ln, l) = next("boundary")?;
            let tok: Vec<&str> = l.split_whitespace().collect();
            if tok.len() != dim + 1 {
                return Err(err(ln, "boundary line must list the face vertices and a tag"));
            }
            let ids: Vec<usize> =
                tok[..dim].iter().map(|s| s.parse().map_err(|_| err(ln, "bad vertex index"))).collect::<Result<_>>()?;
            let tag = match tok[dim] {
                "D" => BoundaryTag::Dirichlet,
                "N" => BoundaryTag::Neumann,
                _ => return Err(err(ln, "tag must be D or N")),
            };
            let vertices = if dim == 1 { [ids[0], ids[0]] } else { [ids[0], ids[1]] };
            boundary.push(BoundaryFace { vertices, tag });
        }
        Ok(SpatialMesh { dim, vertices, cells, boundary })
    }

    pub fn read(path: &Path) -> Result<SpatialMesh> {
        SpatialMesh::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} {} {} {}", self.dim, self.vertices.len(), self.cells.len(), self.boundary.len());
        for v in &self.vertices {
            match self.dim {
                1 => writeln!(s, "{:e}", v[0]),
                _ => writeln!(s, "{:e} {:e}", v[0], v[1]),
            }
            .ok();
        }
        for c in &self.cells {
            let ids: Vec<String> = c[..self.vertices_per_cell()].iter().map(|v| v.to_string()).collect();
            let _ = writeln!(s, "{}", ids.join(" "));
        }
        for b in &self.boundary {
            match self.dim {
                1 => writeln!(s, "{} {}", b.vertices[0], b.tag.letter()),
                _ => writeln!(s, "{} {} {}", b.vertices[0], b.vertices[1], b.tag.letter()),
            }
            .ok();
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_n(_: [f64; 2]) -> BoundaryTag {
        BoundaryTag::Neumann
    }

    #[test]
    fn grid_topology_counts() {
        let m = SpatialMesh::uniform_grid(3, 2, [0.0, 0.0], [1.0, 1.0], all_n);
        let t = m.topology().unwrap();
        // edges: 3*3 horizontal + 4*2 vertical
        assert_eq!(t.faces.len(), 17);
        assert_eq!(t.faces.iter().filter(|f| f.cells.len() == 2).count(), 7);
        assert_eq!(m.boundary.len(), 10);
    }

    #[test]
    fn text_round_trip() {
        let m = SpatialMesh::uniform_grid(2, 2, [-0.5, -0.5], [0.5, 0.5], |p| {
            if p[0] < -0.49 {
                BoundaryTag::Dirichlet
            } else {
                BoundaryTag::Neumann
            }
        });
        let back = SpatialMesh::parse(&m.to_text()).unwrap();
        assert_eq!(m, back);
        let i = SpatialMesh::uniform_interval(4, 0.0, 1.0, [BoundaryTag::Neumann, BoundaryTag::Dirichlet]);
        assert_eq!(i, SpatialMesh::parse(&i.to_text()).unwrap());
    }

    #[test]
    fn parse_rejects_bad_tag() {
        let text = "1 2 1 2\n0\n1\n0 1\n0 N\n1 X\n";
        assert!(matches!(SpatialMesh::parse(text), Err(Error::MeshFormat { line: 6, .. })));
    }

    #[test]
    fn missing_tag_is_invalid() {
        let mut m = SpatialMesh::uniform_grid(2, 2, [0.0, 0.0], [1.0, 1.0], all_n);
        m.boundary.pop();
        assert!(matches!(m.topology(), Err(Error::InvalidMesh(_))));
    }

    #[test]
    fn clockwise_cell_is_degenerate() {
        let mut m = SpatialMesh::uniform_grid(1, 1, [0.0, 0.0], [1.0, 1.0], all_n);
        m.cells[0] = [0, 2, 3, 1];
        assert!(m.topology().is_err());
    }
}
