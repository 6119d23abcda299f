//! Cubical complexes of binary pixel masks.

use std::collections::HashMap;

use crate::shape::{Frame, GridShape};

/// Cell complex of a pixel mask: lattice vertices, axis-aligned unit
/// edges, and unit-square faces, one face per foreground pixel. Cells are
/// deduplicated, and the closure property holds by construction (a face is
/// only ever pushed together with its four edges and four vertices).
#[derive(Debug, Clone)]
pub struct CubicalComplex {
    frame: Frame,
    /// Lattice coordinates of each vertex.
    vertices: Vec<(u32, u32)>,
    /// Endpoint indices into `vertices`, lower index first.
    edges: Vec<(u32, u32)>,
    /// Corner indices in (i,j), (i+1,j), (i+1,j+1), (i,j+1) order.
    faces: Vec<[u32; 4]>,
}

impl CubicalComplex {
    /// Builds the complex of a nonempty shape. Pixels are visited in
    /// row-major order, so cell numbering is deterministic.
    pub fn from_shape(shape: &GridShape) -> Self {
        let mut vertex_index: HashMap<(u32, u32), u32> = HashMap::new();
        let mut vertices = Vec::new();
        let mut edge_seen: HashMap<(u32, u32), ()> = HashMap::new();
        let mut edges = Vec::new();
        let mut faces = Vec::new();

        let mut vertex = |lat: (u32, u32), vertices: &mut Vec<(u32, u32)>| -> u32 {
            *vertex_index.entry(lat).or_insert_with(|| {
                vertices.push(lat);
                (vertices.len() - 1) as u32
            })
        };

        for (i, j) in shape.foreground() {
            let (i, j) = (i as u32, j as u32);
            let v00 = vertex((i, j), &mut vertices);
            let v10 = vertex((i + 1, j), &mut vertices);
            let v11 = vertex((i + 1, j + 1), &mut vertices);
            let v01 = vertex((i, j + 1), &mut vertices);
            for (a, b) in [(v00, v10), (v10, v11), (v01, v11), (v00, v01)] {
                let key = (a.min(b), a.max(b));
                if edge_seen.insert(key, ()).is_none() {
                    edges.push(key);
                }
            }
            faces.push([v00, v10, v11, v01]);
        }

        Self {
            frame: *shape.frame(),
            vertices,
            edges,
            faces,
        }
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn vertices(&self) -> &[(u32, u32)] {
        &self.vertices
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn faces(&self) -> &[[u32; 4]] {
        &self.faces
    }

    /// Physical position of vertex `idx`.
    pub fn vertex_position(&self, idx: u32) -> (f64, f64) {
        let (i, j) = self.vertices[idx as usize];
        self.frame.vertex(i as usize, j as usize)
    }

    /// `#V - #E + #F` of the full complex.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edges.len() as i64 + self.faces.len() as i64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shape::Frame;

    fn shape_from(rows: &[&str]) -> GridShape {
        let height = rows.len();
        let width = rows[0].len();
        let mut mask = vec![false; width * height];
        for (j, row) in rows.iter().enumerate() {
            for (i, c) in row.chars().enumerate() {
                // String rows read top-down; flip so j indexes y upward.
                mask[(height - 1 - j) * width + i] = c == '#';
            }
        }
        let frame = Frame::new(1000.0, 1.0, (-(width as f64) / 2.0, -(height as f64) / 2.0))
            .unwrap();
        GridShape::new(width, height, mask, frame).unwrap()
    }

    #[test]
    fn single_pixel_counts() {
        let complex = CubicalComplex::from_shape(&shape_from(&["#"]));
        assert_eq!(complex.vertex_count(), 4);
        assert_eq!(complex.edge_count(), 4);
        assert_eq!(complex.face_count(), 1);
        assert_eq!(complex.euler_characteristic(), 1);
    }

    #[test]
    fn edge_sharing_pixels() {
        let complex = CubicalComplex::from_shape(&shape_from(&["##"]));
        assert_eq!(complex.vertex_count(), 6);
        assert_eq!(complex.edge_count(), 7);
        assert_eq!(complex.face_count(), 2);
        assert_eq!(complex.euler_characteristic(), 1);
    }

    #[test]
    fn diagonal_pixels_share_one_vertex() {
        let complex = CubicalComplex::from_shape(&shape_from(&["#.", ".#"]));
        assert_eq!(complex.vertex_count(), 7);
        assert_eq!(complex.edge_count(), 8);
        assert_eq!(complex.face_count(), 2);
        assert_eq!(complex.euler_characteristic(), 1);
    }

    #[test]
    fn ring_has_euler_characteristic_zero() {
        let complex = CubicalComplex::from_shape(&shape_from(&["###", "#.#", "###"]));
        assert_eq!(complex.euler_characteristic(), 0);
    }

    #[test]
    fn closure_property() {
        let complex = CubicalComplex::from_shape(&shape_from(&["##.", ".##", "#.#"]));
        let edge_set: std::collections::HashSet<(u32, u32)> =
            complex.edges().iter().copied().collect();
        for face in complex.faces() {
            let [v00, v10, v11, v01] = *face;
            for (a, b) in [(v00, v10), (v10, v11), (v01, v11), (v00, v01)] {
                assert!(edge_set.contains(&(a.min(b), a.max(b))));
            }
            for &v in face {
                assert!((v as usize) < complex.vertex_count());
            }
        }
        for &(a, b) in complex.edges() {
            assert!((a as usize) < complex.vertex_count());
            assert!((b as usize) < complex.vertex_count());
            assert!(a < b);
        }
    }

    #[test]
    fn no_duplicate_cells() {
        let complex = CubicalComplex::from_shape(&shape_from(&["###", "###"]));
        let mut verts = complex.vertices().to_vec();
        verts.sort_unstable();
        verts.dedup();
        assert_eq!(verts.len(), complex.vertex_count());
        let mut edges = complex.edges().to_vec();
        edges.sort_unstable();
        edges.dedup();
        assert_eq!(edges.len(), complex.edge_count());
    }
}
