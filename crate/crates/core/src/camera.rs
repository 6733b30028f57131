//! Ideal pinhole camera focused at infinity.

use serde::{Deserialize, Serialize};

use crate::Vec3;

/// Sensor width in millimeters (full-frame).
pub const SENSOR_WIDTH_MM: f64 = 36.0;

/// Points with camera-space `z` at or above this are behind the camera.
pub const BEHIND_EPS: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraSpec {
    pub position: Vec3,
    pub look_at: Vec3,
    pub focal_length: f64,
    pub sensor_width: f64,
    pub image_width: u32,
    pub image_height: u32,
}

/// Orthonormal camera frame. Camera space looks down `-z`, `+y` is up.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CameraBasis {
    pub origin: Vec3,
    pub right: Vec3,
    pub up: Vec3,
    pub forward: Vec3,
    /// Pixels per unit of tangent (`f · w / sensor_width`).
    pub focal_px: f64,
    pub cx: f64,
    pub cy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Projection {
    /// Pixel coordinates (x right, y down) and view depth in meters.
    Visible { x: f64, y: f64, depth: f64 },
    BehindCamera,
}

impl Projection {
    pub fn visible(self) -> Option<(f64, f64, f64)> {
        match self {
            Projection::Visible { x, y, depth } => Some((x, y, depth)),
            Projection::BehindCamera => None,
        }
    }
}

impl CameraSpec {
    pub fn new(position: Vec3, look_at: Vec3, focal_length: f64, image_width: u32, image_height: u32) -> Self {
        Self {
            position,
            look_at,
            focal_length,
            sensor_width: SENSOR_WIDTH_MM,
            image_width,
            image_height,
        }
    }

    pub fn basis(&self) -> CameraBasis {
        let forward = (self.look_at - self.position)
            .try_normalize()
            .unwrap_or(Vec3::new(1.0, 0.0, 0.0));
        let world_up = Vec3::new(0.0, 0.0, 1.0);
        let right = forward
            .cross(world_up)
            .try_normalize()
            .unwrap_or_else(|| forward.cross(Vec3::new(0.0, 1.0, 0.0)).normalize());
        let up = right.cross(forward);
        CameraBasis {
            origin: self.position,
            right,
            up,
            forward,
            focal_px: self.focal_length * self.image_width as f64 / self.sensor_width,
            cx: self.image_width as f64 / 2.0,
            cy: self.image_height as f64 / 2.0,
        }
    }

    pub fn project(&self, point: Vec3) -> Projection {
        self.basis().project(point)
    }

    /// Horizontal field of view in radians.
    pub fn horizontal_fov(&self) -> f64 {
        2.0 * (self.sensor_width / (2.0 * self.focal_length)).atan()
    }
}

impl CameraBasis {
    pub fn to_camera(&self, p: Vec3) -> Vec3 {
        let d = p - self.origin;
        Vec3::new(d.dot(self.right), d.dot(self.up), -d.dot(self.forward))
    }

    /// Projects a camera-space point with `z < 0`.
    pub fn project_camera(&self, c: Vec3) -> (f64, f64) {
        let depth = -c.z;
        (
            self.cx + self.focal_px * (c.x / depth),
            self.cy - self.focal_px * (c.y / depth),
        )
    }

    pub fn project(&self, p: Vec3) -> Projection {
        let c = self.to_camera(p);
        if c.z >= -BEHIND_EPS {
            return Projection::BehindCamera;
        }
        let (x, y) = self.project_camera(c);
        Projection::Visible { x, y, depth: -c.z }
    }

    /// Unit world-space ray through pixel coordinates `(x, y)`.
    pub fn ray(&self, x: f64, y: f64) -> Vec3 {
        let a = (x - self.cx) / self.focal_px;
        let b = (self.cy - y) / self.focal_px;
        (self.forward + self.right * a + self.up * b).normalize()
    }
}
