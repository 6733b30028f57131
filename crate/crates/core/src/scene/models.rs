//! Procedural stand-in meshes: multirotor drones, a low-poly bird and street props.

use serde::{Deserialize, Serialize};

use super::mesh::{box_mesh, cone_mesh, cylinder_mesh, make_primitive, PrimitiveKind};
use super::{Color, Mesh, SceneError};
use crate::geometry::{Pose, Quaternion};
use crate::Vec3;

pub const DRONE_MODEL_COUNT: usize = 5;

/// Rotor-tip to rotor-tip diagonal of every stand-in drone, in meters.
pub const DRONE_DIAGONAL: f64 = 0.35;

struct DroneProportions {
    body: [f64; 3],
    /// Arm reach as a fraction of the rotor-center radius.
    arm_width: f64,
    /// Rotor radius relative to rotor-center radius.
    rotor_ratio: f64,
    /// Arm yaw offsets from the body x axis, degrees.
    arm_angle: f64,
    color: Color,
}

const DRONES: [DroneProportions; DRONE_MODEL_COUNT] = [
    // Wide white quad with large props.
    DroneProportions { body: [0.10, 0.10, 0.05], arm_width: 0.020, rotor_ratio: 0.55, arm_angle: 45.0, color: [0.92, 0.92, 0.92] },
    // Long-bodied gray quad.
    DroneProportions { body: [0.16, 0.07, 0.05], arm_width: 0.025, rotor_ratio: 0.45, arm_angle: 35.0, color: [0.55, 0.56, 0.58] },
    // Compact folding quad, dark gray.
    DroneProportions { body: [0.12, 0.06, 0.04], arm_width: 0.015, rotor_ratio: 0.40, arm_angle: 50.0, color: [0.28, 0.29, 0.30] },
    // Compact folding quad, light gray.
    DroneProportions { body: [0.11, 0.06, 0.045], arm_width: 0.015, rotor_ratio: 0.42, arm_angle: 40.0, color: [0.70, 0.70, 0.68] },
    // Stubby racing quad with a tall body.
    DroneProportions { body: [0.13, 0.08, 0.07], arm_width: 0.030, rotor_ratio: 0.35, arm_angle: 45.0, color: [0.15, 0.15, 0.16] },
];

fn yaw(deg: f64) -> Quaternion<f64> {
    Quaternion::from_axis_angle(Vec3::new(0.0, 0.0, 1.0), deg.to_radians())
}

/// Stand-in multirotor `index` (mod [`DRONE_MODEL_COUNT`]): central body, four
/// arms and four rotor discs, symmetric about the origin in every axis.
pub fn drone_model(index: usize) -> Mesh {
    let p = &DRONES[index % DRONE_MODEL_COUNT];
    // Rotor centers sit at radius r; rotor tips at r·(1 + rotor_ratio).
    let r = DRONE_DIAGONAL / 2.0 / (1.0 + p.rotor_ratio);
    let rotor_radius = r * p.rotor_ratio;
    let grey = p.color;

    let build = || -> Result<Mesh, SceneError> {
        let mut parts = vec![(
            box_mesh(Vec3::new(p.body[0] / 2.0, p.body[1] / 2.0, p.body[2] / 2.0), grey)?,
            Pose::default(),
        )];
        let arm = box_mesh(Vec3::new(r / 2.0, p.arm_width / 2.0, p.arm_width / 2.0), grey)?;
        let disc = cylinder_mesh(rotor_radius, 0.004, grey)?;
        for angle in [p.arm_angle, 180.0 - p.arm_angle, 180.0 + p.arm_angle, 360.0 - p.arm_angle] {
            let rot = yaw(angle);
            parts.push((arm.clone(), Pose::new(rot.rotate(Vec3::new(r / 2.0, 0.0, 0.0)), rot, 1.0)));
            parts.push((disc.clone(), Pose::at(rot.rotate(Vec3::new(r, 0.0, 0.0)))));
        }
        Mesh::merge(&parts, grey)
    };
    build().expect("drone proportions are valid")
}

/// Low-poly bird: spindle body and two flat wings spanning the y axis.
pub fn bird_mesh() -> Mesh {
    let color = [0.25, 0.20, 0.16];
    let build = || -> Result<Mesh, SceneError> {
        let body = box_mesh(Vec3::new(0.14, 0.03, 0.03), color)?;
        let head = box_mesh(Vec3::new(0.025, 0.02, 0.02), color)?;
        let wing = box_mesh(Vec3::new(0.06, 0.16, 0.004), color)?;
        Mesh::merge(
            &[
                (body, Pose::default()),
                (head, Pose::at(Vec3::new(0.16, 0.0, 0.01))),
                (wing.clone(), Pose::at(Vec3::new(0.0, 0.18, 0.0))),
                (wing, Pose::at(Vec3::new(0.0, -0.18, 0.0))),
            ],
            color,
        )
    };
    build().expect("bird proportions are valid")
}

/// Realistic street props. Meshes stand on the z = 0 plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PropKind {
    Car,
    Lamppost,
    TrafficCone,
    TrafficSign,
}

impl PropKind {
    pub const ALL: [PropKind; 4] = [
        PropKind::Car,
        PropKind::Lamppost,
        PropKind::TrafficCone,
        PropKind::TrafficSign,
    ];
}

pub fn prop_mesh(kind: PropKind, color: Color) -> Mesh {
    let build = || -> Result<Mesh, SceneError> {
        match kind {
            PropKind::Car => Mesh::merge(
                &[
                    (box_mesh(Vec3::new(2.1, 0.9, 0.35), color)?, Pose::at(Vec3::new(0.0, 0.0, 0.65))),
                    (box_mesh(Vec3::new(1.1, 0.8, 0.3), color)?, Pose::at(Vec3::new(-0.2, 0.0, 1.3))),
                    (make_primitive(PrimitiveKind::Cylinder, 0.6, color)?, Pose::new(Vec3::new(1.3, 0.9, 0.3), x_axis_up(), 1.0)),
                    (make_primitive(PrimitiveKind::Cylinder, 0.6, color)?, Pose::new(Vec3::new(-1.3, 0.9, 0.3), x_axis_up(), 1.0)),
                    (make_primitive(PrimitiveKind::Cylinder, 0.6, color)?, Pose::new(Vec3::new(1.3, -0.9, 0.3), x_axis_up(), 1.0)),
                    (make_primitive(PrimitiveKind::Cylinder, 0.6, color)?, Pose::new(Vec3::new(-1.3, -0.9, 0.3), x_axis_up(), 1.0)),
                ],
                color,
            ),
            PropKind::Lamppost => Mesh::merge(
                &[
                    (cylinder_mesh(0.08, 3.0, color)?, Pose::at(Vec3::new(0.0, 0.0, 3.0))),
                    (box_mesh(Vec3::new(0.6, 0.05, 0.05), color)?, Pose::at(Vec3::new(0.55, 0.0, 5.95))),
                    (box_mesh(Vec3::new(0.2, 0.12, 0.06), color)?, Pose::at(Vec3::new(1.05, 0.0, 5.85))),
                ],
                color,
            ),
            PropKind::TrafficCone => Mesh::merge(
                &[
                    (box_mesh(Vec3::new(0.2, 0.2, 0.02), color)?, Pose::at(Vec3::new(0.0, 0.0, 0.02))),
                    (cone_mesh(0.16, 0.35, color)?, Pose::at(Vec3::new(0.0, 0.0, 0.39))),
                ],
                color,
            ),
            PropKind::TrafficSign => Mesh::merge(
                &[
                    (cylinder_mesh(0.03, 1.2, color)?, Pose::at(Vec3::new(0.0, 0.0, 1.2))),
                    (cylinder_mesh(0.35, 0.01, color)?, Pose::new(Vec3::new(0.0, 0.03, 2.4), x_axis_up(), 1.0)),
                ],
                color,
            ),
        }
    };
    build().expect("prop proportions are valid")
}

/// Rotates a +Z-aligned part so its axis lies along ±Y (wheels, sign plates).
fn x_axis_up() -> Quaternion<f64> {
    Quaternion::from_axis_angle(Vec3::new(1.0, 0.0, 0.0), std::f64::consts::FRAC_PI_2)
}
