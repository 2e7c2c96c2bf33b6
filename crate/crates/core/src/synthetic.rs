//! Procedural labeled shapes for fixtures, self-tests and the browser demo.
//!
//! Shapes are centered on their centroid and scaled into the unit ball. Labels
//! are a Gaussian falloff around the shape's affordance region, zeroed below
//! 0.01 so every shape has both positive and negative points.

use std::f64::consts::TAU;

use crate::cloud::{LabeledCloud, Point3};
use crate::rng::{derive_stream, RngStream};

const SYNTHETIC_TAG: u64 = 0x5348_4150_4553; // "SHAPES"

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shape {
    /// Cylinder with a ring handle; labels mark the handle (grasp).
    Mug,
    /// Seat, backrest and four legs; labels mark the seat top (sit).
    Chair,
    /// Open hemispherical shell; labels mark the inner bottom (contain).
    Bowl,
}

impl Shape {
    pub const ALL: [Shape; 3] = [Shape::Mug, Shape::Chair, Shape::Bowl];

    pub fn name(self) -> &'static str {
        match self {
            Shape::Mug => "mug",
            Shape::Chair => "chair",
            Shape::Bowl => "bowl",
        }
    }

    pub fn from_name(name: &str) -> Option<Shape> {
        Shape::ALL.into_iter().find(|s| s.name().eq_ignore_ascii_case(name))
    }

    /// `(object category, affordance)` matching the labels.
    pub fn pairing(self) -> (&'static str, &'static str) {
        match self {
            Shape::Mug => ("Mug", "grasp"),
            Shape::Chair => ("Chair", "sit"),
            Shape::Bowl => ("Bowl", "contain"),
        }
    }
}

pub fn generate(shape: Shape, n: usize, seed: u64) -> LabeledCloud {
    let mut rng = derive_stream(seed, n as u64, SYNTHETIC_TAG + shape as u64);
    let mut points = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let (p, l) = match shape {
            Shape::Mug => mug_point(&mut rng),
            Shape::Chair => chair_point(&mut rng),
            Shape::Bowl => bowl_point(&mut rng),
        };
        points.push(p);
        labels.push(if l < 0.01 { 0.0 } else { l.min(1.0) });
    }
    normalize(LabeledCloud::new(points, labels))
}

pub fn mug(n: usize, seed: u64) -> LabeledCloud {
    generate(Shape::Mug, n, seed)
}

fn falloff(d: f64, width: f64) -> f64 {
    (-(d * d) / (2.0 * width * width)).exp()
}

fn mug_point(rng: &mut RngStream) -> (Point3, f64) {
    let handle_center = [0.62, 0.0, 0.0];
    let (major, minor) = (0.28, 0.05);
    let p = if rng.uniform() < 0.78 {
        let a = rng.range(0.0, TAU);
        if rng.uniform() < 0.85 {
            [0.5 * a.cos(), 0.5 * a.sin(), rng.range(-0.6, 0.6)]
        } else {
            let r = 0.5 * rng.uniform().sqrt();
            [r * a.cos(), r * a.sin(), -0.6]
        }
    } else {
        let u = rng.range(0.0, TAU);
        let v = rng.range(0.0, TAU);
        let ring = major + minor * v.cos();
        [
            handle_center[0] + ring * u.cos(),
            minor * v.sin(),
            handle_center[2] + ring * u.sin(),
        ]
    };
    // Distance to the handle's center circle in the xz plane.
    let dx = p[0] - handle_center[0];
    let dz = p[2] - handle_center[2];
    let radial = (dx * dx + dz * dz).sqrt() - major;
    let d = (radial * radial + p[1] * p[1]).sqrt();
    let outside = if p[0] > 0.45 { 1.0 } else { 0.0 };
    (p, outside * falloff(d, 0.08))
}

fn chair_point(rng: &mut RngStream) -> (Point3, f64) {
    let pick = rng.uniform();
    let p = if pick < 0.4 {
        // seat slab
        [rng.range(-0.5, 0.5), rng.range(-0.5, 0.5), rng.range(0.0, 0.08)]
    } else if pick < 0.7 {
        // backrest
        [rng.range(-0.5, 0.5), rng.range(0.42, 0.5), rng.range(0.08, 0.9)]
    } else {
        let leg = rng.below(4);
        let (sx, sy) = [(-1.0, -1.0), (1.0, -1.0), (-1.0, 1.0), (1.0, 1.0)][leg];
        [
            sx * 0.44 + rng.range(-0.04, 0.04),
            sy * 0.44 + rng.range(-0.04, 0.04),
            rng.range(-0.7, 0.0),
        ]
    };
    let on_seat = p[2] >= 0.0 && p[2] <= 0.08 && p[1] < 0.42;
    let l = if on_seat {
        falloff((p[0] * p[0] + p[1] * p[1]).sqrt(), 0.3)
    } else {
        0.0
    };
    (p, l)
}

fn bowl_point(rng: &mut RngStream) -> (Point3, f64) {
    // Uniform on the lower hemisphere of radius 0.8.
    let z = -rng.uniform();
    let a = rng.range(0.0, TAU);
    let r = (1.0 - z * z).sqrt();
    let p = [0.8 * r * a.cos(), 0.8 * r * a.sin(), 0.8 * z];
    let d = ((p[0] * p[0] + p[1] * p[1]) + (p[2] + 0.8).powi(2)).sqrt();
    (p, falloff(d, 0.35))
}

fn normalize(cloud: LabeledCloud) -> LabeledCloud {
    let Some(c) = cloud.centroid() else {
        return cloud;
    };
    let centered: Vec<Point3> = cloud
        .points
        .iter()
        .map(|p| [p[0] - c[0], p[1] - c[1], p[2] - c[2]])
        .collect();
    let r = centered
        .iter()
        .map(|p| (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt())
        .fold(0.0, f64::max);
    if r == 0.0 {
        return LabeledCloud::new(centered, cloud.labels);
    }
    let points = centered
        .into_iter()
        .map(|p| [p[0] / r, p[1] / r, p[2] / r])
        .collect();
    LabeledCloud::new(points, cloud.labels)
}
