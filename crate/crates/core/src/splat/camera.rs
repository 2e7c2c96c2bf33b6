//! Pinhole cameras on elevation rings around a cloud.
//!
//! World space is Z-up. View space follows the usual computer-vision
//! convention: x right, y down, z forward along the optical axis.

use serde::{Deserialize, Serialize};

use super::SplatError;
use crate::cloud::{LabeledCloud, Point3};

/// Rigid world-to-view transform: `x_view = rotation · (x_world − eye)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    /// Rows are the view-space right, down and forward axes in world space.
    pub rotation: [[f64; 3]; 3],
    pub eye: Point3,
}

impl Pose {
    /// Camera at `eye` looking at `target` with world +Z as up.
    pub fn look_at(eye: Point3, target: Point3) -> Self {
        let f = normalize(sub(target, eye));
        let mut r = cross(f, [0.0, 0.0, 1.0]);
        if norm(r) < 1e-9 {
            r = cross(f, [0.0, 1.0, 0.0]);
        }
        let r = normalize(r);
        let d = cross(f, r);
        Self {
            rotation: [r, d, f],
            eye,
        }
    }

    pub fn to_view(&self, p: &Point3) -> Point3 {
        let q = sub(*p, self.eye);
        let m = &self.rotation;
        [dot(m[0], q), dot(m[1], q), dot(m[2], q)]
    }

    pub fn forward(&self) -> Point3 {
        self.rotation[2]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Intrinsics {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CameraRig {
    pub poses: Vec<Pose>,
    pub intrinsics: Intrinsics,
    pub height: usize,
    pub width: usize,
}

impl CameraRig {
    pub fn views(&self) -> usize {
        self.poses.len()
    }
}

/// Rig layout. Angles are in degrees.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RigConfig {
    pub views: usize,
    pub height: usize,
    pub width: usize,
    /// Camera distance in units of the cloud's bounding radius.
    pub radius_factor: f64,
    pub elevations_deg: Vec<f64>,
}

impl Default for RigConfig {
    fn default() -> Self {
        Self {
            views: 12,
            height: 112,
            width: 112,
            radius_factor: 2.5,
            elevations_deg: vec![30.0, -30.0],
        }
    }
}

/// Fraction of the shorter image side covered by the bounding sphere.
const FILL: f64 = 0.95;

/// Places `views` cameras around `center`. View `k` sits on elevation ring
/// `k % rings` at azimuth `2πk / views` and distance
/// `radius_factor · radius`. The focal length makes the bounding sphere
/// span 95% of the shorter image side.
pub fn make_views(center: Point3, radius: f64, config: &RigConfig) -> Result<CameraRig, SplatError> {
    if config.views == 0 {
        return Err(SplatError::InvalidConfig("at least one view is required".into()));
    }
    if !(config.radius_factor > 1.0) {
        return Err(SplatError::InvalidConfig(format!(
            "radius factor must exceed 1, got {}",
            config.radius_factor
        )));
    }
    if config.elevations_deg.is_empty() {
        return Err(SplatError::InvalidConfig("no elevation rings".into()));
    }
    if config.height == 0 || config.width == 0 {
        return Err(SplatError::InvalidConfig("resolution must be positive".into()));
    }
    let radius = if radius > 0.0 && radius.is_finite() { radius } else { 1.0 };
    let distance = config.radius_factor * radius;
    let rings = config.elevations_deg.len();
    let poses = (0..config.views)
        .map(|k| {
            let el = config.elevations_deg[k % rings].to_radians();
            let az = std::f64::consts::TAU * k as f64 / config.views as f64;
            let eye = [
                center[0] + distance * el.cos() * az.cos(),
                center[1] + distance * el.cos() * az.sin(),
                center[2] + distance * el.sin(),
            ];
            Pose::look_at(eye, center)
        })
        .collect();
    let half_angle = (1.0 / config.radius_factor).asin();
    let focal = FILL * (config.height.min(config.width) as f64 / 2.0) / half_angle.tan();
    Ok(CameraRig {
        poses,
        intrinsics: Intrinsics {
            fx: focal,
            fy: focal,
            cx: config.width as f64 / 2.0,
            cy: config.height as f64 / 2.0,
        },
        height: config.height,
        width: config.width,
    })
}

/// Rig centered on the cloud centroid and sized by its bounding radius.
pub fn rig_for_cloud(cloud: &LabeledCloud, config: &RigConfig) -> Result<CameraRig, SplatError> {
    let center = cloud.centroid().unwrap_or([0.0; 3]);
    make_views(center, cloud.radius_about(&center), config)
}

fn sub(a: Point3, b: Point3) -> Point3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: Point3, b: Point3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: Point3, b: Point3) -> Point3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn norm(a: Point3) -> f64 {
    dot(a, a).sqrt()
}

fn normalize(a: Point3) -> Point3 {
    let n = norm(a);
    [a[0] / n, a[1] / n, a[2] / n]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_views_two_rings() {
        let rig = make_views([0.0; 3], 1.0, &RigConfig::default()).unwrap();
        assert_eq!(rig.views(), 12);
        let upper = rig.poses.iter().filter(|p| p.eye[2] > 0.0).count();
        assert_eq!(upper, 6);
        assert_eq!((rig.height, rig.width), (112, 112));
    }

    #[test]
    fn optical_axes_hit_the_center() {
        let center = [0.3, -0.2, 0.5];
        let rig = make_views(center, 0.8, &RigConfig::default()).unwrap();
        for pose in &rig.poses {
            let v = pose.to_view(&center);
            assert!(v[0].abs() < 1e-6 && v[1].abs() < 1e-6, "{v:?}");
            assert!((v[2] - 2.0).abs() < 1e-9);
            // orthonormal rows
            for i in 0..3 {
                for j in 0..3 {
                    let d = dot(pose.rotation[i], pose.rotation[j]);
                    assert!((d - if i == j { 1.0 } else { 0.0 }).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn image_down_is_world_down_for_level_camera() {
        let pose = Pose::look_at([3.0, 0.0, 0.0], [0.0; 3]);
        let above = pose.to_view(&[0.0, 0.0, 1.0]);
        assert!(above[1] < 0.0);
    }

    #[test]
    fn bounding_sphere_fits() {
        let cfg = RigConfig::default();
        let rig = make_views([0.0; 3], 1.0, &cfg).unwrap();
        let pose = &rig.poses[0];
        // the tangent ray to the unit sphere projects to 95% of the half-width
        let d = cfg.radius_factor;
        let t = (1.0 / d).asin().tan();
        let u = rig.intrinsics.fx * t + rig.intrinsics.cx;
        assert!((u - (56.0 + 0.95 * 56.0)).abs() < 1e-9);
        assert!(pose.to_view(&[0.0; 3])[2] > 0.0);
    }

    #[test]
    fn rejects_bad_config() {
        let mut cfg = RigConfig::default();
        cfg.radius_factor = 1.0;
        assert!(matches!(make_views([0.0; 3], 1.0, &cfg), Err(SplatError::InvalidConfig(_))));
        cfg.radius_factor = 2.0;
        cfg.views = 0;
        assert!(make_views([0.0; 3], 1.0, &cfg).is_err());
    }

    #[test]
    fn polar_camera_is_well_defined() {
        let cfg = RigConfig {
            views: 1,
            elevations_deg: vec![90.0],
            ..Default::default()
        };
        let rig = make_views([0.0; 3], 1.0, &cfg).unwrap();
        assert!(rig.poses[0].rotation.iter().flatten().all(|x| x.is_finite()));
    }
}
