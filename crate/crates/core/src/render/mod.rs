//! Deterministic software rasterizer.
//!
//! Produces an 8-bit RGB image, a per-pixel instance-id buffer (0 is
//! background) and a view-depth buffer. Pixels are sampled once at their
//! centers; the id buffer is never anti-aliased. The nearest surface wins and
//! exact depth ties go to the lower instance id, so the result does not depend
//! on entity order.

mod io;
mod shade;

use image::{Rgb, RgbImage};

pub use io::{read_instance_png, read_sidecar, write_instance_png, write_rgb_png, write_sidecar, RenderError};
pub use shade::{sample_environment, shade, Lighting, DIFFUSE_GAIN};

use crate::camera::{CameraBasis, CameraSpec, Projection};
use crate::randomizer::{Background, PosedEntity, SceneFrame};
use crate::scene::Color;
use crate::Vec3;

/// Near clipping distance, meters.
pub const NEAR_PLANE: f64 = 0.01;

/// Pinhole projection of a world point.
pub fn project(point: Vec3, camera: &CameraSpec) -> Projection {
    camera.project(point)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RenderMode {
    /// Shaded surfaces over the background.
    #[default]
    Full,
    /// Instance ids and depth only; the RGB image stays black.
    GeometryOnly,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenderOutput {
    pub rgb: RgbImage,
    /// Row-major instance ids, 0 for background.
    pub instance_ids: Vec<u32>,
    /// Row-major view depth in meters; infinite on background.
    pub depth: Vec<f32>,
}

impl RenderOutput {
    pub fn width(&self) -> u32 {
        self.rgb.width()
    }

    pub fn height(&self) -> u32 {
        self.rgb.height()
    }

    pub fn id_at(&self, x: u32, y: u32) -> u32 {
        self.instance_ids[(y * self.width() + x) as usize]
    }
}

/// Screen-space vertex: pixel position and view depth.
#[derive(Debug, Clone, Copy)]
struct ScreenVertex {
    x: f64,
    y: f64,
    depth: f64,
}

struct Target {
    width: usize,
    height: usize,
    depth: Vec<f64>,
    ids: Vec<u32>,
    colors: Vec<Color>,
}

impl Target {
    fn new(width: usize, height: usize) -> Self {
        let n = width * height;
        Self {
            width,
            height,
            depth: vec![f64::INFINITY; n],
            ids: vec![0; n],
            colors: vec![[0.0; 3]; n],
        }
    }

    fn raster_triangle(&mut self, v: [ScreenVertex; 3], id: u32, color: Color) {
        let edge = |a: ScreenVertex, b: ScreenVertex, x: f64, y: f64| (b.x - a.x) * (y - a.y) - (b.y - a.y) * (x - a.x);
        let area = edge(v[0], v[1], v[2].x, v[2].y);
        if area == 0.0 || !area.is_finite() {
            return;
        }
        let min_x = v.iter().map(|p| p.x).fold(f64::INFINITY, f64::min);
        let max_x = v.iter().map(|p| p.x).fold(f64::NEG_INFINITY, f64::max);
        let min_y = v.iter().map(|p| p.y).fold(f64::INFINITY, f64::min);
        let max_y = v.iter().map(|p| p.y).fold(f64::NEG_INFINITY, f64::max);
        // Pixel c covers [c, c+1) and is sampled at c + 0.5.
        let col0 = (min_x - 0.5).ceil().max(0.0);
        let col1 = (max_x - 0.5).floor().min(self.width as f64 - 1.0);
        let row0 = (min_y - 0.5).ceil().max(0.0);
        let row1 = (max_y - 0.5).floor().min(self.height as f64 - 1.0);
        if col0 > col1 || row0 > row1 {
            return;
        }
        let inv = [1.0 / v[0].depth, 1.0 / v[1].depth, 1.0 / v[2].depth];
        for row in row0 as usize..=row1 as usize {
            let sy = row as f64 + 0.5;
            for col in col0 as usize..=col1 as usize {
                let sx = col as f64 + 0.5;
                let w0 = edge(v[1], v[2], sx, sy) / area;
                let w1 = edge(v[2], v[0], sx, sy) / area;
                let w2 = edge(v[0], v[1], sx, sy) / area;
                if w0 < 0.0 || w1 < 0.0 || w2 < 0.0 {
                    continue;
                }
                let depth = 1.0 / (w0 * inv[0] + w1 * inv[1] + w2 * inv[2]);
                let i = row * self.width + col;
                let cur = self.depth[i];
                if depth < cur || (depth == cur && id < self.ids[i]) {
                    self.depth[i] = depth;
                    self.ids[i] = id;
                    self.colors[i] = color;
                }
            }
        }
    }
}

/// Clips a camera-space polygon to `depth >= NEAR_PLANE` (Sutherland–Hodgman, one plane).
fn clip_near(poly: &[Vec3]) -> Vec<Vec3> {
    let inside = |p: &Vec3| -p.z >= NEAR_PLANE;
    let mut out = Vec::with_capacity(4);
    for i in 0..poly.len() {
        let a = poly[i];
        let b = poly[(i + 1) % poly.len()];
        match (inside(&a), inside(&b)) {
            (true, true) => out.push(b),
            (true, false) | (false, true) => {
                let t = (-NEAR_PLANE - a.z) / (b.z - a.z);
                out.push(a.lerp(b, t));
                if inside(&b) {
                    out.push(b);
                }
            }
            (false, false) => {}
        }
    }
    out
}

fn draw_entity(target: &mut Target, basis: &CameraBasis, entity: &PosedEntity, lighting: Option<&Lighting>) {
    let world: Vec<Vec3> = entity.mesh.vertices().iter().map(|&v| entity.pose.transform_point(v)).collect();
    let cam: Vec<Vec3> = world.iter().map(|&p| basis.to_camera(p)).collect();
    let base = entity.mesh.base_color();
    for tri in entity.mesh.triangles() {
        let [a, b, c] = tri.map(|i| i as usize);
        if cam[a].z > -NEAR_PLANE && cam[b].z > -NEAR_PLANE && cam[c].z > -NEAR_PLANE {
            continue;
        }
        let color = match lighting {
            Some(l) => {
                let mut n = (world[b] - world[a]).cross(world[c] - world[a]).normalize();
                if n.dot(basis.origin - world[a]) < 0.0 {
                    n = -n;
                }
                shade(n, base, l)
            }
            None => [0.0; 3],
        };
        let poly = clip_near(&[cam[a], cam[b], cam[c]]);
        if poly.len() < 3 {
            continue;
        }
        let screen: Vec<ScreenVertex> = poly
            .iter()
            .map(|&p| {
                let (x, y) = basis.project_camera(p);
                ScreenVertex { x, y, depth: -p.z }
            })
            .collect();
        for k in 1..screen.len() - 1 {
            target.raster_triangle([screen[0], screen[k], screen[k + 1]], entity.instance_id, color);
        }
    }
}

fn to_u8(c: Color) -> Rgb<u8> {
    Rgb(c.map(|v| (v.clamp(0.0, 1.0) * 255.0).round() as u8))
}

pub fn rasterize(frame: &SceneFrame) -> RenderOutput {
    rasterize_with(frame, RenderMode::Full)
}

pub fn rasterize_with(frame: &SceneFrame, mode: RenderMode) -> RenderOutput {
    let cam = &frame.camera;
    let (w, h) = (cam.image_width as usize, cam.image_height as usize);
    let basis = cam.basis();
    let mut target = Target::new(w, h);
    let lighting = match mode {
        RenderMode::Full => Some(Lighting::for_background(&frame.background)),
        RenderMode::GeometryOnly => None,
    };
    for e in &frame.entities {
        draw_entity(&mut target, &basis, e, lighting.as_ref());
    }

    let rgb = match mode {
        RenderMode::GeometryOnly => RgbImage::new(w as u32, h as u32),
        RenderMode::Full => RgbImage::from_fn(w as u32, h as u32, |x, y| {
            let i = y as usize * w + x as usize;
            if target.ids[i] != 0 {
                return to_u8(target.colors[i]);
            }
            match &frame.background {
                Background::Hdri(env) => to_u8(sample_environment(basis.ray(x as f64 + 0.5, y as f64 + 0.5), env)),
                Background::Image(img) => {
                    let sx = (x as u64 * img.width() as u64 / w as u64) as u32;
                    let sy = (y as u64 * img.height() as u64 / h as u64) as u32;
                    *img.get_pixel(sx, sy)
                }
            }
        }),
    };
    RenderOutput {
        rgb,
        instance_ids: target.ids,
        depth: target.depth.iter().map(|&d| d as f32).collect(),
    }
}
