use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use super::{BoundaryTag, Mesh, Point};
use crate::error::{Error, Result};

/// Splits every included cell of an integer grid into two counterclockwise
/// triangles along the lower-left to upper-right diagonal.
struct GridBuilder {
    index: BTreeMap<(usize, usize), usize>,
    nodes: Vec<Point>,
    elements: Vec<[usize; 3]>,
}

impl GridBuilder {
    /// Nodes are numbered row by row (`iy` major) so the adjacency bandwidth
    /// stays close to one grid row.
    fn new(
        nx: usize,
        ny: usize,
        include_node: impl Fn(usize, usize) -> bool,
        coord: impl Fn(usize, usize) -> Point,
    ) -> Self {
        let mut index = BTreeMap::new();
        let mut nodes = Vec::new();
        for iy in 0..=ny {
            for ix in 0..=nx {
                if include_node(ix, iy) {
                    index.insert((ix, iy), nodes.len());
                    nodes.push(coord(ix, iy));
                }
            }
        }
        GridBuilder { index, nodes, elements: Vec::new() }
    }

    fn add_cells(&mut self, nx: usize, ny: usize, include_cell: impl Fn(usize, usize) -> bool) {
        for iy in 0..ny {
            for ix in 0..nx {
                if !include_cell(ix, iy) {
                    continue;
                }
                let v00 = self.index[&(ix, iy)];
                let v10 = self.index[&(ix + 1, iy)];
                let v01 = self.index[&(ix, iy + 1)];
                let v11 = self.index[&(ix + 1, iy + 1)];
                self.elements.push([v00, v10, v11]);
                self.elements.push([v00, v11, v01]);
            }
        }
    }
}

impl Mesh {
    /// Structured mesh of `(-1/2, 1/2)^2 + offset` with `n x n` cells, each
    /// split into two right triangles.
    pub fn unit_square(n: usize, offset: Point) -> Result<Mesh> {
        if n < 2 {
            return Err(Error::invalid(format!("unit square needs n >= 2, got {n}")));
        }
        let step = 1.0 / n as f64;
        let mut grid = GridBuilder::new(
            n,
            n,
            |_, _| true,
            |ix, iy| [offset[0] - 0.5 + ix as f64 * step, offset[1] - 0.5 + iy as f64 * step],
        );
        grid.add_cells(n, n, |_, _| true);
        Mesh::new(grid.nodes, grid.elements)
    }

    /// Structured triangulation of the ion channel: a 4 x 1.5 reservoir at
    /// each end joined by a 2 x 4 channel, outline
    /// `(-2,0) (2,0) (2,1.5) (1,1.5) (1,5.5) (2,5.5) (2,7) (-2,7) (-2,5.5)
    /// (-1,5.5) (-1,1.5) (-2,1.5)`.
    ///
    /// Boundary nodes are tagged `Bottom` (`y = 0`), `Top` (`y = 7`),
    /// `Membrane` (`x = ±1`, `1.5 <= y <= 5.5`) or `OtherBoundary`.
    pub fn channel(cell: f64) -> Result<Mesh> {
        if !(cell > 0.0 && cell <= 0.5) {
            return Err(Error::invalid(format!("channel cell must lie in (0, 0.5], got {cell}")));
        }
        let ratio = 0.5 / cell;
        let m = libm::round(ratio);
        if (ratio - m).abs() > 1e-9 * ratio {
            return Err(Error::invalid(format!("channel cell {cell} does not divide 0.5")));
        }
        let m = m as usize;
        // Integer grid in units of `cell`: x in [0, 8m] ~ [-2, 2], y in [0, 14m] ~ [0, 7].
        let (nx, ny) = (8 * m, 14 * m);
        let (y_neck_lo, y_neck_hi) = (3 * m, 11 * m);
        let (x_neck_lo, x_neck_hi) = (2 * m, 6 * m);
        let in_domain =
            |ix: usize, iy: usize| iy <= y_neck_lo || iy >= y_neck_hi || (x_neck_lo..=x_neck_hi).contains(&ix);
        let h = 0.5 / m as f64;
        let mut grid = GridBuilder::new(nx, ny, in_domain, |ix, iy| [ix as f64 * h - 2.0, iy as f64 * h]);
        grid.add_cells(nx, ny, |ix, iy| iy < y_neck_lo || iy >= y_neck_hi || (x_neck_lo..x_neck_hi).contains(&ix));
        let grid_index: Vec<(usize, usize)> = {
            let mut v = alloc::vec![(0, 0); grid.nodes.len()];
            for (&key, &i) in &grid.index {
                v[i] = key;
            }
            v
        };
        let mut mesh = Mesh::new(grid.nodes, grid.elements)?;
        mesh.retag(|i, _| {
            let (ix, iy) = grid_index[i];
            if iy == 0 {
                BoundaryTag::Bottom
            } else if iy == ny {
                BoundaryTag::Top
            } else if (ix == x_neck_lo || ix == x_neck_hi) && (y_neck_lo..=y_neck_hi).contains(&iy) {
                BoundaryTag::Membrane
            } else {
                BoundaryTag::OtherBoundary
            }
        });
        Ok(mesh)
    }

    /// Triangulation by equilateral triangles of side `spacing`: `ny + 1`
    /// rows of `nx + 1` nodes, odd rows shifted by half a spacing, centred at
    /// `center`. Every stiffness off-diagonal is strictly negative.
    pub fn equilateral(nx: usize, ny: usize, spacing: f64, center: Point) -> Result<Mesh> {
        if nx < 1 || ny < 1 || !(spacing > 0.0) {
            return Err(Error::invalid("equilateral mesh needs nx, ny >= 1 and spacing > 0"));
        }
        let row_height = spacing * libm::sqrt(3.0) / 2.0;
        let width = (nx as f64 + 0.5) * spacing;
        let height = ny as f64 * row_height;
        let mut nodes = Vec::with_capacity((nx + 1) * (ny + 1));
        for j in 0..=ny {
            let shift = if j % 2 == 1 { 0.5 } else { 0.0 };
            for i in 0..=nx {
                nodes.push([
                    center[0] - 0.5 * width + (i as f64 + shift) * spacing,
                    center[1] - 0.5 * height + j as f64 * row_height,
                ]);
            }
        }
        let id = |i: usize, j: usize| j * (nx + 1) + i;
        let mut elements = Vec::with_capacity(2 * nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                if j % 2 == 0 {
                    elements.push([id(i, j), id(i + 1, j), id(i, j + 1)]);
                    elements.push([id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)]);
                } else {
                    elements.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
                    elements.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
                }
            }
        }
        Mesh::new(nodes, elements)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_square_counts() {
        let m = Mesh::unit_square(2, [0.0, 0.0]).unwrap();
        assert_eq!(m.num_nodes(), 9);
        assert_eq!(m.num_elements(), 8);
        assert!(matches!(Mesh::unit_square(1, [0.0, 0.0]), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn unit_square_mesh_size() {
        let m = Mesh::unit_square(40, [0.0, 0.0]).unwrap();
        assert!((m.h() - 2f64.sqrt() / 40.0).abs() < 1e-14);
        assert!((m.h() - 0.0354).abs() < 1e-4);
        assert_eq!(m.num_nodes(), 41 * 41);
    }

    #[test]
    fn unit_square_interior_degree() {
        let m = Mesh::unit_square(3, [0.0, 0.0]).unwrap();
        let interior: Vec<usize> = (0..m.num_nodes()).filter(|&i| !m.is_boundary(i)).collect();
        assert_eq!(interior.len(), 4);
        for i in interior {
            assert_eq!(m.neighbors(i).len(), 7);
        }
    }

    #[test]
    fn unit_square_offset_shifts_domain() {
        let m = Mesh::unit_square(4, [1.0, -2.0]).unwrap();
        let xs: Vec<f64> = m.nodes().iter().map(|p| p[0]).collect();
        let ys: Vec<f64> = m.nodes().iter().map(|p| p[1]).collect();
        assert_eq!(xs.iter().cloned().fold(f64::INFINITY, f64::min), 0.5);
        assert_eq!(ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max), -1.5);
    }

    #[test]
    fn channel_rejects_bad_cells() {
        for cell in [0.3, 0.0, -0.25, 0.75] {
            assert!(matches!(Mesh::channel(cell), Err(Error::InvalidArgument(_))), "{cell}");
        }
    }

    #[test]
    fn channel_area_and_tags() {
        let m = Mesh::channel(0.5).unwrap();
        assert!((m.total_area() - 20.0).abs() < 1e-12);
        for i in 0..m.num_nodes() {
            let [x, y] = m.node(i);
            match m.tag(i) {
                BoundaryTag::Bottom => assert_eq!(y, 0.0),
                BoundaryTag::Top => assert_eq!(y, 7.0),
                BoundaryTag::Membrane => {
                    assert!((x.abs() - 1.0).abs() < 1e-12 && (1.5..=5.5).contains(&y))
                }
                _ => {}
            }
        }
        assert!(m.has_tag(BoundaryTag::Membrane));
    }

    #[test]
    fn equilateral_elements_are_equilateral() {
        let m = Mesh::equilateral(4, 3, 0.5, [0.0, 0.0]).unwrap();
        assert_eq!(m.num_elements(), 24);
        let expected = 0.25 * 3f64.sqrt() / 4.0;
        for e in 0..m.num_elements() {
            assert!((m.element_area(e) - expected).abs() < 1e-14);
        }
        assert!((m.h() - 0.5).abs() < 1e-14);
    }
}
