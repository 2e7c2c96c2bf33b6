//! Labeled point clouds and their validation.

use std::fmt;

/// A point in normalized model space.
pub type Point3 = [f64; 3];

/// Number of points per cloud in the source affordance datasets.
pub const CANONICAL_POINT_COUNT: usize = 2048;

/// N points with one affordance score per point.
///
/// Fields are public so that malformed clouds can be represented and reported
/// on by [`validate_cloud`]; operations that need a valid cloud validate first.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LabeledCloud {
    pub points: Vec<Point3>,
    pub labels: Vec<f64>,
}

impl LabeledCloud {
    pub fn new(points: Vec<Point3>, labels: Vec<f64>) -> Self {
        Self { points, labels }
    }

    /// Cloud with every label set to zero.
    pub fn unlabeled(points: Vec<Point3>) -> Self {
        let labels = vec![0.0; points.len()];
        Self { points, labels }
    }

    pub fn n_points(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Iterates `(point, label)` pairs.
    pub fn pairs(&self) -> impl Iterator<Item = (&Point3, f64)> + '_ {
        self.points.iter().zip(self.labels.iter().copied())
    }

    pub fn centroid(&self) -> Option<Point3> {
        if self.points.is_empty() {
            return None;
        }
        let mut c = [0.0; 3];
        for p in &self.points {
            for k in 0..3 {
                c[k] += p[k];
            }
        }
        let n = self.points.len() as f64;
        Some([c[0] / n, c[1] / n, c[2] / n])
    }

    /// Largest distance from `center` to any point.
    pub fn radius_about(&self, center: &Point3) -> f64 {
        self.points
            .iter()
            .map(|p| norm(&sub(p, center)))
            .fold(0.0, f64::max)
    }

    /// Checks the invariants and returns an error carrying the full report if
    /// any is violated.
    pub fn validated(self) -> Result<Self, ValidationReport> {
        let report = validate_cloud(&self);
        if report.is_ok() {
            Ok(self)
        } else {
            Err(report)
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    LengthMismatch { points: usize, labels: usize },
    NonFiniteCoordinate { index: usize },
    LabelOutOfRange { index: usize, value: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::LengthMismatch { points, labels } => {
                write!(f, "length mismatch: {points} points, {labels} labels")
            }
            Violation::NonFiniteCoordinate { index } => {
                write!(f, "non-finite coordinate at index {index}")
            }
            Violation::LabelOutOfRange { index, value } => {
                write!(f, "label out of range at index {index}: {value}")
            }
        }
    }
}

/// Outcome of [`validate_cloud`]. Warnings never make a cloud invalid.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "ok");
        }
        let parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", parts.join("; "))
    }
}

impl std::error::Error for ValidationReport {}

/// Reports every invariant violation of `cloud`.
///
/// A point count other than [`CANONICAL_POINT_COUNT`] produces a warning.
pub fn validate_cloud(cloud: &LabeledCloud) -> ValidationReport {
    let mut report = ValidationReport::default();
    if cloud.points.len() != cloud.labels.len() {
        report.violations.push(Violation::LengthMismatch {
            points: cloud.points.len(),
            labels: cloud.labels.len(),
        });
    }
    for (index, p) in cloud.points.iter().enumerate() {
        if !p.iter().all(|c| c.is_finite()) {
            report
                .violations
                .push(Violation::NonFiniteCoordinate { index });
        }
    }
    for (index, &value) in cloud.labels.iter().enumerate() {
        // NaN fails the range test too.
        if !(0.0..=1.0).contains(&value) {
            report
                .violations
                .push(Violation::LabelOutOfRange { index, value });
        }
    }
    if cloud.points.len() != CANONICAL_POINT_COUNT {
        report.warnings.push(format!(
            "cloud has {} points, canonical size is {CANONICAL_POINT_COUNT}",
            cloud.points.len()
        ));
    }
    report
}

pub(crate) fn sub(a: &Point3, b: &Point3) -> Point3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn norm(a: &Point3) -> f64 {
    (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt()
}

pub(crate) fn dist2(a: &Point3, b: &Point3) -> f64 {
    let d = sub(a, b);
    d[0] * d[0] + d[1] * d[1] + d[2] * d[2]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> LabeledCloud {
        let points = (0..n)
            .map(|i| {
                let t = i as f64 / n as f64;
                [t, (t * 7.0).sin(), (t * 3.0).cos()]
            })
            .collect();
        let labels = (0..n).map(|i| (i % 11) as f64 / 10.0).collect();
        LabeledCloud::new(points, labels)
    }

    #[test]
    fn canonical_cloud_is_ok() {
        let report = validate_cloud(&grid(2048));
        assert!(report.is_ok());
        assert!(report.warnings.is_empty());
    }

    #[test]
    fn label_above_one_is_reported_with_index() {
        let mut cloud = grid(2048);
        cloud.labels[17] = 1.5;
        let report = validate_cloud(&cloud);
        assert_eq!(
            report.violations,
            vec![Violation::LabelOutOfRange {
                index: 17,
                value: 1.5
            }]
        );
        assert!(report.to_string().contains("label out of range at index 17"));
    }

    #[test]
    fn short_label_array_is_length_mismatch() {
        let mut cloud = grid(2048);
        cloud.labels.pop();
        let report = validate_cloud(&cloud);
        assert_eq!(
            report.violations,
            vec![Violation::LengthMismatch {
                points: 2048,
                labels: 2047
            }]
        );
        assert!(report.to_string().contains("length mismatch"));
    }

    #[test]
    fn nan_coordinate_and_nan_label() {
        let mut cloud = grid(4);
        cloud.points[2][1] = f64::NAN;
        cloud.labels[3] = f64::NAN;
        let report = validate_cloud(&cloud);
        assert_eq!(report.violations.len(), 2);
        assert_eq!(
            report.violations[0],
            Violation::NonFiniteCoordinate { index: 2 }
        );
    }

    #[test]
    fn non_canonical_size_only_warns() {
        let report = validate_cloud(&grid(100));
        assert!(report.is_ok());
        assert_eq!(report.warnings.len(), 1);
    }
}
