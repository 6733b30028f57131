use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Color, SceneError};
use crate::geometry::Pose;
use crate::Vec3;

/// Minimum triangle area (m²) below which a triangle counts as degenerate.
pub const DEGENERATE_AREA: f64 = 1e-12;

/// Tessellation segments around the axis of round primitives.
pub const ROUND_SEGMENTS: usize = 16;
/// Latitude bands of the UV sphere.
pub const SPHERE_RINGS: usize = 8;

/// Indexed triangle mesh with a single solid color.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    vertices: Vec<Vec3>,
    triangles: Vec<[u32; 3]>,
    base_color: Color,
}

impl Mesh {
    pub fn new(vertices: Vec<Vec3>, triangles: Vec<[u32; 3]>, base_color: Color) -> Result<Self, SceneError> {
        if vertices.len() < 3 {
            return Err(SceneError::TooFewVertices(vertices.len()));
        }
        if triangles.is_empty() {
            return Err(SceneError::EmptyMesh);
        }
        for (t, tri) in triangles.iter().enumerate() {
            for &i in tri {
                if i as usize >= vertices.len() {
                    return Err(SceneError::IndexOutOfRange {
                        triangle: t,
                        index: i,
                        count: vertices.len(),
                    });
                }
            }
            let [a, b, c] = tri.map(|i| vertices[i as usize]);
            if (b - a).cross(c - a).norm() * 0.5 <= DEGENERATE_AREA {
                return Err(SceneError::DegenerateTriangle(t));
            }
        }
        Ok(Self {
            vertices,
            triangles,
            base_color,
        })
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[u32; 3]] {
        &self.triangles
    }

    pub fn base_color(&self) -> Color {
        self.base_color
    }

    pub fn with_color(mut self, color: Color) -> Self {
        self.base_color = color;
        self
    }

    /// Axis-aligned bounds `(min, max)`.
    pub fn bounds(&self) -> (Vec3, Vec3) {
        self.vertices.iter().fold(
            (Vec3::splat(f64::INFINITY), Vec3::splat(f64::NEG_INFINITY)),
            |(lo, hi), &v| (lo.component_min(v), hi.component_max(v)),
        )
    }

    /// Mean of the vertex positions.
    pub fn centroid(&self) -> Vec3 {
        let sum = self.vertices.iter().fold(Vec3::zero(), |acc, &v| acc + v);
        sum / self.vertices.len() as f64
    }

    /// Concatenates transformed parts into one mesh with the given color.
    pub fn merge(parts: &[(Mesh, Pose<f64>)], base_color: Color) -> Result<Self, SceneError> {
        let mut vertices = Vec::new();
        let mut triangles = Vec::new();
        for (mesh, pose) in parts {
            let offset = vertices.len() as u32;
            vertices.extend(mesh.vertices.iter().map(|&v| pose.transform_point(v)));
            triangles.extend(mesh.triangles.iter().map(|t| t.map(|i| i + offset)));
        }
        Mesh::new(vertices, triangles, base_color)
    }
}

/// Parses the `v`/`f` subset of Wavefront OBJ. Faces with more than three
/// corners are fan-triangulated; other record types are skipped.
pub fn parse_obj(text: &str, base_color: Color) -> Result<Mesh, SceneError> {
    let mut vertices = Vec::new();
    let mut faces: Vec<(usize, Vec<u32>)> = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        let mut tokens = line.split_whitespace();
        let Some(tag) = tokens.next() else { continue };
        let parse_err = |message: String| SceneError::Parse {
            line: line_no,
            message,
        };
        match tag {
            "v" => {
                let coords: Vec<f64> = tokens
                    .map(|t| t.parse::<f64>().map_err(|e| parse_err(format!("bad coordinate {t:?}: {e}"))))
                    .collect::<Result<_, _>>()?;
                if !(3..=4).contains(&coords.len()) {
                    return Err(parse_err(format!("vertex needs 3 coordinates, got {}", coords.len())));
                }
                if coords.iter().any(|c| !c.is_finite()) {
                    return Err(parse_err("non-finite coordinate".into()));
                }
                vertices.push(Vec3::new(coords[0], coords[1], coords[2]));
            }
            "f" => {
                let idx: Vec<u32> = tokens
                    .map(|t| {
                        let head = t.split('/').next().unwrap_or("");
                        match head.parse::<u32>() {
                            Ok(i) if i >= 1 => Ok(i - 1),
                            _ => Err(parse_err(format!("bad face index {t:?}"))),
                        }
                    })
                    .collect::<Result<_, _>>()?;
                if idx.len() < 3 {
                    return Err(parse_err(format!("face needs at least 3 indices, got {}", idx.len())));
                }
                faces.push((line_no, idx));
            }
            _ => {}
        }
    }

    let mut triangles = Vec::new();
    for (line, idx) in &faces {
        if let Some(bad) = idx.iter().find(|&&i| i as usize >= vertices.len()) {
            return Err(SceneError::Parse {
                line: *line,
                message: format!("vertex index {} out of range (have {})", bad + 1, vertices.len()),
            });
        }
        for k in 1..idx.len() - 1 {
            triangles.push([idx[0], idx[k], idx[k + 1]]);
        }
    }
    if triangles.is_empty() {
        return Err(SceneError::EmptyMesh);
    }
    if vertices.len() < 3 {
        return Err(SceneError::TooFewVertices(vertices.len()));
    }
    Mesh::new(vertices, triangles, base_color)
}

/// Loads an OBJ file. The mesh gets a neutral gray color.
pub fn load_mesh(path: impl AsRef<Path>) -> Result<Mesh, SceneError> {
    let path = path.as_ref();
    if !path.exists() {
        return Err(SceneError::FileNotFound(path.to_path_buf()));
    }
    let text = std::fs::read_to_string(path).map_err(|source| SceneError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_obj(&text, [0.5, 0.5, 0.5])
}

/// Serializes to OBJ with shortest round-trip float formatting.
pub fn write_obj(mesh: &Mesh) -> String {
    let mut out = String::new();
    for v in mesh.vertices() {
        let _ = writeln!(out, "v {} {} {}", v.x, v.y, v.z);
    }
    for t in mesh.triangles() {
        let _ = writeln!(out, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrimitiveKind {
    Cube,
    Cone,
    Sphere,
    Cylinder,
}

impl PrimitiveKind {
    pub const ALL: [PrimitiveKind; 4] = [
        PrimitiveKind::Cube,
        PrimitiveKind::Cone,
        PrimitiveKind::Sphere,
        PrimitiveKind::Cylinder,
    ];
}

/// Closed primitive centered at the origin. `size` is the cube edge, sphere
/// diameter, and the diameter and height of cones and cylinders.
pub fn make_primitive(kind: PrimitiveKind, size: f64, color: Color) -> Result<Mesh, SceneError> {
    if !(size > 0.0 && size.is_finite()) {
        return Err(SceneError::InvalidSize(size));
    }
    let h = size / 2.0;
    match kind {
        PrimitiveKind::Cube => box_mesh(Vec3::splat(h), color),
        PrimitiveKind::Sphere => sphere_mesh(h, color),
        PrimitiveKind::Cylinder => cylinder_mesh(h, h, color),
        PrimitiveKind::Cone => cone_mesh(h, h, color),
    }
}

/// Axis-aligned box with the given half extents.
pub(crate) fn box_mesh(half: Vec3, color: Color) -> Result<Mesh, SceneError> {
    let mut vertices = Vec::with_capacity(8);
    for i in 0..8u32 {
        let sx = if i & 1 == 0 { -1.0 } else { 1.0 };
        let sy = if i & 2 == 0 { -1.0 } else { 1.0 };
        let sz = if i & 4 == 0 { -1.0 } else { 1.0 };
        vertices.push(Vec3::new(sx * half.x, sy * half.y, sz * half.z));
    }
    // Outward counter-clockwise winding.
    let triangles = vec![
        [0, 2, 3], [0, 3, 1], // -z
        [4, 5, 7], [4, 7, 6], // +z
        [0, 1, 5], [0, 5, 4], // -y
        [2, 6, 7], [2, 7, 3], // +y
        [0, 4, 6], [0, 6, 2], // -x
        [1, 3, 7], [1, 7, 5], // +x
    ];
    Mesh::new(vertices, triangles, color)
}

fn ring(radius: f64, z: f64) -> impl Iterator<Item = Vec3> {
    (0..ROUND_SEGMENTS).map(move |k| {
        let a = std::f64::consts::TAU * k as f64 / ROUND_SEGMENTS as f64;
        Vec3::new(radius * a.cos(), radius * a.sin(), z)
    })
}

/// Closed cylinder along +Z.
pub(crate) fn cylinder_mesh(radius: f64, half_height: f64, color: Color) -> Result<Mesh, SceneError> {
    let n = ROUND_SEGMENTS as u32;
    let mut vertices: Vec<Vec3> = ring(radius, -half_height).chain(ring(radius, half_height)).collect();
    let bottom = vertices.len() as u32;
    vertices.push(Vec3::new(0.0, 0.0, -half_height));
    let top = bottom + 1;
    vertices.push(Vec3::new(0.0, 0.0, half_height));
    let mut triangles = Vec::new();
    for k in 0..n {
        let k1 = (k + 1) % n;
        triangles.push([k, k1, n + k1]);
        triangles.push([k, n + k1, n + k]);
        triangles.push([bottom, k1, k]);
        triangles.push([top, n + k, n + k1]);
    }
    Mesh::new(vertices, triangles, color)
}

/// Cone with base at `-half_height` and apex at `+half_height`.
pub(crate) fn cone_mesh(radius: f64, half_height: f64, color: Color) -> Result<Mesh, SceneError> {
    let n = ROUND_SEGMENTS as u32;
    let mut vertices: Vec<Vec3> = ring(radius, -half_height).collect();
    vertices.push(Vec3::new(0.0, 0.0, half_height));
    vertices.push(Vec3::new(0.0, 0.0, -half_height));
    let (apex, base) = (n, n + 1);
    let mut triangles = Vec::new();
    for k in 0..n {
        let k1 = (k + 1) % n;
        triangles.push([k, k1, apex]);
        triangles.push([base, k1, k]);
    }
    Mesh::new(vertices, triangles, color)
}

/// UV sphere with `ROUND_SEGMENTS` × `SPHERE_RINGS` tessellation.
pub(crate) fn sphere_mesh(radius: f64, color: Color) -> Result<Mesh, SceneError> {
    let n = ROUND_SEGMENTS as u32;
    let mut vertices = vec![Vec3::new(0.0, 0.0, radius)];
    for r in 1..SPHERE_RINGS {
        let theta = std::f64::consts::PI * r as f64 / SPHERE_RINGS as f64;
        vertices.extend(ring(radius * theta.sin(), radius * theta.cos()));
    }
    let south = vertices.len() as u32;
    vertices.push(Vec3::new(0.0, 0.0, -radius));
    let row = |r: u32, k: u32| 1 + (r - 1) * n + (k % n);
    let mut triangles = Vec::new();
    let last = SPHERE_RINGS as u32 - 1;
    for k in 0..n {
        triangles.push([0, row(1, k), row(1, k + 1)]);
        for r in 1..last {
            triangles.push([row(r, k), row(r + 1, k), row(r + 1, k + 1)]);
            triangles.push([row(r, k), row(r + 1, k + 1), row(r, k + 1)]);
        }
        triangles.push([south, row(last, k + 1), row(last, k)]);
    }
    Mesh::new(vertices, triangles, color)
}

#[cfg(test)]
mod tests {
    use super::*;

    const GRAY: Color = [0.5; 3];

    #[test]
    fn minimal_obj() {
        let m = parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n", GRAY).unwrap();
        assert_eq!(m.vertices().len(), 3);
        assert_eq!(m.triangles(), &[[0, 1, 2]]);
    }

    #[test]
    fn quad_is_fan_triangulated() {
        let m = parse_obj("v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n", GRAY).unwrap();
        assert_eq!(m.triangles(), &[[0, 1, 2], [0, 2, 3]]);
    }

    #[test]
    fn slash_indices_and_comments() {
        let m = parse_obj("# tri\nv 0 0 0\nv 1 0 0\nvn 0 0 1\nv 0 1 0\nf 1/1/1 2//1 3/2\n", GRAY).unwrap();
        assert_eq!(m.triangles().len(), 1);
    }

    #[test]
    fn out_of_range_index_reports_line() {
        let err = parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 9\n", GRAY).unwrap_err();
        assert!(matches!(err, SceneError::Parse { line: 4, .. }), "{err:?}");
    }

    #[test]
    fn malformed_vertex_reports_line() {
        let err = parse_obj("v 0 0\n", GRAY).unwrap_err();
        assert!(matches!(err, SceneError::Parse { line: 1, .. }));
        let err = parse_obj("v 0 0 0\nv a 0 0\n", GRAY).unwrap_err();
        assert!(matches!(err, SceneError::Parse { line: 2, .. }));
    }

    #[test]
    fn no_faces_is_empty_mesh() {
        let err = parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\n", GRAY).unwrap_err();
        assert!(matches!(err, SceneError::EmptyMesh));
    }

    #[test]
    fn missing_file() {
        let err = load_mesh("/nonexistent/mesh.obj").unwrap_err();
        assert!(matches!(err, SceneError::FileNotFound(_)));
    }

    #[test]
    fn unit_cube() {
        let m = make_primitive(PrimitiveKind::Cube, 1.0, GRAY).unwrap();
        assert_eq!(m.vertices().len(), 8);
        assert_eq!(m.triangles().len(), 12);
        let (lo, hi) = m.bounds();
        assert_eq!(lo, Vec3::splat(-0.5));
        assert_eq!(hi, Vec3::splat(0.5));
    }

    #[test]
    fn unit_sphere_radius() {
        let m = make_primitive(PrimitiveKind::Sphere, 1.0, GRAY).unwrap();
        assert_eq!(m.vertices().len(), 2 + (SPHERE_RINGS - 1) * ROUND_SEGMENTS);
        for v in m.vertices() {
            assert!((v.norm() - 0.5).abs() <= 1e-6);
        }
    }

    #[test]
    fn zero_size_rejected() {
        assert!(matches!(
            make_primitive(PrimitiveKind::Cone, 0.0, GRAY),
            Err(SceneError::InvalidSize(_))
        ));
        assert!(make_primitive(PrimitiveKind::Cube, -1.0, GRAY).is_err());
    }

    /// Closed, consistently oriented meshes have every directed edge matched by its reverse.
    #[test]
    fn primitives_are_watertight_and_outward() {
        for kind in PrimitiveKind::ALL {
            let m = make_primitive(kind, 2.0, GRAY).unwrap();
            let mut edges = std::collections::HashMap::new();
            for t in m.triangles() {
                for k in 0..3 {
                    *edges.entry((t[k], t[(k + 1) % 3])).or_insert(0) += 1;
                }
            }
            for (&(a, b), &n) in &edges {
                assert_eq!(n, 1, "{kind:?} duplicated edge");
                assert_eq!(edges.get(&(b, a)), Some(&1), "{kind:?} open edge {a}-{b}");
            }
            // Signed volume is positive for outward winding.
            let vol: f64 = m
                .triangles()
                .iter()
                .map(|t| {
                    let [a, b, c] = t.map(|i| m.vertices()[i as usize]);
                    a.dot(b.cross(c)) / 6.0
                })
                .sum();
            assert!(vol > 0.0, "{kind:?} volume {vol}");
        }
    }

    #[test]
    fn cube_is_point_symmetric() {
        let m = make_primitive(PrimitiveKind::Cube, 1.7, GRAY).unwrap();
        for v in m.vertices() {
            let r = -*v;
            assert!(m.vertices().iter().any(|w| (*w - r).norm() < 1e-9));
        }
    }

    #[test]
    fn obj_round_trip() {
        for kind in PrimitiveKind::ALL {
            let m = make_primitive(kind, 0.37, GRAY).unwrap();
            let back = parse_obj(&write_obj(&m), GRAY).unwrap();
            assert_eq!(back.vertices(), m.vertices());
            assert_eq!(back.triangles(), m.triangles());
        }
    }
}
