use nalgebra::{Matrix3, Vector3};

use super::{
    round_count, CorruptError, CorruptionKind, CorruptionSpec, ADD_LOCAL_SIGMA_RANGE,
    SEVERITY_TABLE,
};
use crate::cloud::{dist2, norm, validate_cloud, LabeledCloud, Point3};
use crate::rng::RngStream;

/// Upper bound of the cluster count `C ~ U{1..8}` for local corruptions.
pub const MAX_LOCAL_CLUSTERS: usize = 8;

fn check(cloud: &LabeledCloud, spec: &CorruptionSpec, expected: CorruptionKind) -> Result<(), CorruptError> {
    if spec.kind != expected {
        return Err(CorruptError::WrongKind {
            expected,
            found: spec.kind,
        });
    }
    let report = validate_cloud(cloud);
    if !report.is_ok() {
        return Err(CorruptError::InvalidCloud(report));
    }
    Ok(())
}

/// Adds independent `N(0, σ²)` noise to every coordinate.
pub fn jitter(cloud: &LabeledCloud, spec: &CorruptionSpec) -> Result<LabeledCloud, CorruptError> {
    check(cloud, spec, CorruptionKind::Jitter)?;
    let sigma = SEVERITY_TABLE.jitter_sigma[spec.severity.index()];
    Ok(jitter_with_sigma(cloud, &mut spec.stream.clone(), sigma))
}

/// Jitter with an explicit σ. Draws x, y, z noise per point in point order.
pub fn jitter_with_sigma(cloud: &LabeledCloud, stream: &mut RngStream, sigma: f64) -> LabeledCloud {
    let points = cloud
        .points
        .iter()
        .map(|p| {
            let mut q = *p;
            for c in q.iter_mut() {
                *c += sigma * stream.normal();
            }
            q
        })
        .collect();
    LabeledCloud::new(points, cloud.labels.clone())
}

/// Scales each axis by `s ~ U(1/S, S)`, then recenters on the centroid and
/// divides by the largest point norm.
pub fn scale(cloud: &LabeledCloud, spec: &CorruptionSpec) -> Result<LabeledCloud, CorruptError> {
    check(cloud, spec, CorruptionKind::Scale)?;
    if cloud.is_empty() {
        return Err(CorruptError::EmptyCloud);
    }
    let s = SEVERITY_TABLE.scale_s[spec.severity.index()];
    let factors = sample_scale_factors(&mut spec.stream.clone(), s);
    unit_sphere_normalize(&apply_scale_factors(cloud, factors))
}

/// Draws the x, y, z factors from `U(1/s, s)` in that order.
pub fn sample_scale_factors(stream: &mut RngStream, s: f64) -> [f64; 3] {
    let lo = 1.0 / s;
    [stream.range(lo, s), stream.range(lo, s), stream.range(lo, s)]
}

pub fn apply_scale_factors(cloud: &LabeledCloud, factors: [f64; 3]) -> LabeledCloud {
    let points = cloud
        .points
        .iter()
        .map(|p| [p[0] * factors[0], p[1] * factors[1], p[2] * factors[2]])
        .collect();
    LabeledCloud::new(points, cloud.labels.clone())
}

/// Centers the cloud on its centroid and scales it so the farthest point has
/// norm 1.
pub fn unit_sphere_normalize(cloud: &LabeledCloud) -> Result<LabeledCloud, CorruptError> {
    let c = cloud.centroid().ok_or(CorruptError::EmptyCloud)?;
    let centered: Vec<Point3> = cloud
        .points
        .iter()
        .map(|p| [p[0] - c[0], p[1] - c[1], p[2] - c[2]])
        .collect();
    let max_norm = centered.iter().map(norm).fold(0.0, f64::max);
    // Centering identical points leaves only rounding noise.
    let scale = cloud.points.iter().map(norm).fold(1.0, f64::max);
    if !(max_norm > 1e-12 * scale) {
        return Err(CorruptError::DegenerateCloud);
    }
    let points = centered
        .into_iter()
        .map(|p| [p[0] / max_norm, p[1] / max_norm, p[2] / max_norm])
        .collect();
    Ok(LabeledCloud::new(points, cloud.labels.clone()))
}

/// Rotates by Euler angles `α, β, γ ~ U(-θ, θ)` as `Rz(γ)·Ry(β)·Rx(α)`.
pub fn rotate(cloud: &LabeledCloud, spec: &CorruptionSpec) -> Result<LabeledCloud, CorruptError> {
    check(cloud, spec, CorruptionKind::Rotate)?;
    let theta = SEVERITY_TABLE.rotate_theta[spec.severity.index()];
    let angles = sample_euler_angles(&mut spec.stream.clone(), theta);
    Ok(apply_euler_rotation(cloud, angles))
}

/// Draws `[α, β, γ]` in that order.
pub fn sample_euler_angles(stream: &mut RngStream, theta: f64) -> [f64; 3] {
    [
        stream.range(-theta, theta),
        stream.range(-theta, theta),
        stream.range(-theta, theta),
    ]
}

/// `Rz(γ)·Ry(β)·Rx(α)`: rotate about x first, then y, then z (extrinsic).
pub fn euler_rotation_matrix(angles: [f64; 3]) -> Matrix3<f64> {
    let [a, b, g] = angles;
    let (sa, ca) = a.sin_cos();
    let (sb, cb) = b.sin_cos();
    let (sg, cg) = g.sin_cos();
    let rx = Matrix3::new(1.0, 0.0, 0.0, 0.0, ca, -sa, 0.0, sa, ca);
    let ry = Matrix3::new(cb, 0.0, sb, 0.0, 1.0, 0.0, -sb, 0.0, cb);
    let rz = Matrix3::new(cg, -sg, 0.0, sg, cg, 0.0, 0.0, 0.0, 1.0);
    rz * ry * rx
}

pub fn apply_euler_rotation(cloud: &LabeledCloud, angles: [f64; 3]) -> LabeledCloud {
    let r = euler_rotation_matrix(angles);
    let points = cloud
        .points
        .iter()
        .map(|p| {
            let q = r * Vector3::new(p[0], p[1], p[2]);
            [q.x, q.y, q.z]
        })
        .collect();
    LabeledCloud::new(points, cloud.labels.clone())
}

/// Shuffles `(point, label)` pairs with Fisher–Yates and drops the last
/// `round(N·ρ)`. Survivors keep their shuffled order.
pub fn drop_global(cloud: &LabeledCloud, spec: &CorruptionSpec) -> Result<LabeledCloud, CorruptError> {
    check(cloud, spec, CorruptionKind::DropGlobal)?;
    let n = cloud.n_points();
    let rho = SEVERITY_TABLE.drop_global_rho[spec.severity.index()];
    let dropped = round_count(n as f64 * rho);
    if dropped >= n {
        return Err(CorruptError::EmptyResult { n, dropped });
    }
    let mut order: Vec<usize> = (0..n).collect();
    spec.stream.clone().shuffle(&mut order);
    order.truncate(n - dropped);
    Ok(select(cloud, &order))
}

fn select(cloud: &LabeledCloud, indices: &[usize]) -> LabeledCloud {
    LabeledCloud::new(
        indices.iter().map(|&i| cloud.points[i]).collect(),
        indices.iter().map(|&i| cloud.labels[i]).collect(),
    )
}

/// Splits `k` into `clusters` positive sizes.
///
/// Draws one uniform weight per cluster, normalizes, and sets
/// `N_i = max(1, round(k·w_i))` for all but the last cluster, which takes the
/// residue. If the residue would fall below 1, the largest earlier cluster
/// (lowest index on ties) gives up points one at a time.
///
/// Panics unless `1 <= clusters <= k`.
pub fn partition_count(stream: &mut RngStream, k: usize, clusters: usize) -> Vec<usize> {
    assert!(clusters >= 1 && clusters <= k, "cannot split {k} into {clusters} clusters");
    let weights: Vec<f64> = (0..clusters).map(|_| stream.uniform()).collect();
    let total: f64 = weights.iter().sum();
    let share = |w: f64| {
        if total > 0.0 {
            w / total
        } else {
            1.0 / clusters as f64
        }
    };
    let mut sizes: Vec<usize> = weights[..clusters - 1]
        .iter()
        .map(|&w| round_count(k as f64 * share(w)).max(1))
        .collect();
    let mut used: usize = sizes.iter().sum();
    while used + 1 > k {
        let (idx, _) = sizes
            .iter()
            .enumerate()
            .rev()
            .max_by_key(|&(_, &s)| s)
            .expect("at least one earlier cluster when residue is short");
        sizes[idx] -= 1;
        used -= 1;
    }
    sizes.push(k - used);
    sizes
}

/// One local cluster: the center as an index into the input cloud and the
/// number of points removed or added around it.
#[derive(Clone, Debug, PartialEq)]
pub struct ClusterTrace {
    pub center_index: usize,
    pub size: usize,
    /// Spread of the added points (Add Local only).
    pub sigma: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct DropLocalTrace {
    pub cloud: LabeledCloud,
    pub clusters: Vec<ClusterTrace>,
    /// Input indices removed, in removal order.
    pub removed: Vec<usize>,
}

/// Removes `K` points in `C ~ U{1..8}` nearest-neighbor clusters.
pub fn drop_local(cloud: &LabeledCloud, spec: &CorruptionSpec) -> Result<LabeledCloud, CorruptError> {
    check(cloud, spec, CorruptionKind::DropLocal)?;
    let k = SEVERITY_TABLE.drop_local_k[spec.severity.index()];
    check_drop_local_size(cloud.n_points(), k)?;
    let mut stream = spec.stream.clone();
    let clusters = 1 + stream.below(MAX_LOCAL_CLUSTERS);
    drop_local_with_clusters(cloud, &mut stream, k, clusters).map(|t| t.cloud)
}

fn check_drop_local_size(n: usize, k: usize) -> Result<(), CorruptError> {
    if n > k + MAX_LOCAL_CLUSTERS {
        Ok(())
    } else {
        Err(CorruptError::CloudTooSmall { n, k })
    }
}

/// Drop Local with a fixed cluster count.
///
/// Cluster sizes come from [`partition_count`]. Each cluster then picks a
/// center uniformly among the remaining points and removes the `N_i`
/// remaining points nearest to it. The center always goes first; other
/// distance ties go to the lower input index. Survivors keep input order.
pub fn drop_local_with_clusters(
    cloud: &LabeledCloud,
    stream: &mut RngStream,
    k: usize,
    clusters: usize,
) -> Result<DropLocalTrace, CorruptError> {
    check_drop_local_size(cloud.n_points(), k)?;
    let sizes = partition_count(stream, k, clusters);
    let mut remaining: Vec<usize> = (0..cloud.n_points()).collect();
    let mut traces = Vec::with_capacity(clusters);
    let mut removed = Vec::with_capacity(k);
    for size in sizes {
        let center = remaining[stream.below(remaining.len())];
        let c = cloud.points[center];
        let mut keyed: Vec<(f64, bool, usize)> = remaining
            .iter()
            .map(|&i| (dist2(&cloud.points[i], &c), i != center, i))
            .collect();
        let cmp = |a: &(f64, bool, usize), b: &(f64, bool, usize)| a.partial_cmp(b).unwrap();
        if size < keyed.len() {
            keyed.select_nth_unstable_by(size - 1, cmp);
        }
        let mut nearest: Vec<(f64, bool, usize)> = keyed[..size].to_vec();
        nearest.sort_unstable_by(cmp);
        let mut gone = vec![false; cloud.n_points()];
        for &(_, _, i) in &nearest {
            gone[i] = true;
            removed.push(i);
        }
        remaining.retain(|&i| !gone[i]);
        traces.push(ClusterTrace {
            center_index: center,
            size,
            sigma: None,
        });
    }
    Ok(DropLocalTrace {
        cloud: select(cloud, &remaining),
        clusters: traces,
        removed,
    })
}

/// Appends `K` points drawn uniformly from the unit ball, labeled 0.
///
/// Each point draws a direction from three standard normals (redrawn in the
/// measure-zero case of a zero vector) and then a radius `u^(1/3)`.
pub fn add_global(cloud: &LabeledCloud, spec: &CorruptionSpec) -> Result<LabeledCloud, CorruptError> {
    check(cloud, spec, CorruptionKind::AddGlobal)?;
    let k = SEVERITY_TABLE.add_global_k[spec.severity.index()];
    let mut stream = spec.stream.clone();
    let mut out = cloud.clone();
    out.points.reserve(k);
    out.labels.reserve(k);
    for _ in 0..k {
        let dir = loop {
            let d = [stream.normal(), stream.normal(), stream.normal()];
            let n = norm(&d);
            if n > 0.0 {
                break [d[0] / n, d[1] / n, d[2] / n];
            }
        };
        let r = stream.uniform().cbrt();
        let p = [dir[0] * r, dir[1] * r, dir[2] * r];
        // Rounding in the normalization can push |p| a hair above r.
        let n = norm(&p);
        let p = if n > 1.0 { [p[0] / n, p[1] / n, p[2] / n] } else { p };
        out.points.push(p);
        out.labels.push(0.0);
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct AddLocalTrace {
    pub cloud: LabeledCloud,
    pub clusters: Vec<ClusterTrace>,
}

/// Appends `K` points in `C ~ U{1..8}` Gaussian clusters around existing
/// points, labeled 0.
pub fn add_local(cloud: &LabeledCloud, spec: &CorruptionSpec) -> Result<LabeledCloud, CorruptError> {
    check(cloud, spec, CorruptionKind::AddLocal)?;
    let k = SEVERITY_TABLE.add_local_k[spec.severity.index()];
    let mut stream = spec.stream.clone();
    let clusters = 1 + stream.below(MAX_LOCAL_CLUSTERS);
    add_local_with_clusters(cloud, &mut stream, k, clusters).map(|t| t.cloud)
}

/// Add Local with a fixed cluster count.
///
/// Draw order: `clusters` center indices (uniform over input points, with
/// replacement), the size partition, then per cluster `σ_i ~ U(0.075, 0.125)`
/// followed by its points' x, y, z normals.
pub fn add_local_with_clusters(
    cloud: &LabeledCloud,
    stream: &mut RngStream,
    k: usize,
    clusters: usize,
) -> Result<AddLocalTrace, CorruptError> {
    if cloud.is_empty() {
        return Err(CorruptError::EmptyCloud);
    }
    let centers: Vec<usize> = (0..clusters).map(|_| stream.below(cloud.n_points())).collect();
    let sizes = partition_count(stream, k, clusters);
    let mut out = cloud.clone();
    let mut traces = Vec::with_capacity(clusters);
    for (&center, size) in centers.iter().zip(sizes) {
        let sigma = stream.range(ADD_LOCAL_SIGMA_RANGE.0, ADD_LOCAL_SIGMA_RANGE.1);
        let mu = cloud.points[center];
        for _ in 0..size {
            let p = [
                mu[0] + sigma * stream.normal(),
                mu[1] + sigma * stream.normal(),
                mu[2] + sigma * stream.normal(),
            ];
            out.points.push(p);
            out.labels.push(0.0);
        }
        traces.push(ClusterTrace {
            center_index: center,
            size,
            sigma: Some(sigma),
        });
    }
    Ok(AddLocalTrace {
        cloud: out,
        clusters: traces,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corrupt::{SeverityLevel, SEVERITY_TABLE};
    use crate::rng::derive_stream;
    use crate::synthetic;
    use proptest::prelude::*;

    fn sev(l: u8) -> SeverityLevel {
        SeverityLevel::new(l).unwrap()
    }

    fn spec(kind: CorruptionKind, level: u8, sample: u64) -> CorruptionSpec {
        CorruptionSpec::for_sample(kind, sev(level), 42, sample)
    }

    fn mug(n: usize, seed: u64) -> LabeledCloud {
        synthetic::mug(n, seed)
    }

    #[test]
    fn zero_sigma_jitter_is_identity() {
        let c = mug(512, 1);
        assert_eq!(jitter_with_sigma(&c, &mut derive_stream(1, 1, 1), 0.0), c);
    }

    #[test]
    fn jitter_is_deterministic() {
        let c = mug(512, 1);
        let s = spec(CorruptionKind::Jitter, 3, 7);
        assert_eq!(jitter(&c, &s).unwrap(), jitter(&c, &s).unwrap());
    }

    #[test]
    fn jitter_std_matches_sigma_at_severity_one() {
        let c = mug(2048, 3);
        let mut sum2 = 0.0;
        let mut count = 0usize;
        for sample in 0..100 {
            let out = jitter(&c, &spec(CorruptionKind::Jitter, 1, sample)).unwrap();
            for (p, q) in c.points.iter().zip(&out.points) {
                for k in 0..3 {
                    sum2 += (q[k] - p[k]).powi(2);
                    count += 1;
                }
            }
            assert_eq!(out.labels, c.labels);
        }
        let std = (sum2 / count as f64).sqrt();
        assert!((std / 0.01 - 1.0).abs() < 0.02, "std {std}");
    }

    #[test]
    fn wrong_kind_is_rejected() {
        let c = mug(64, 1);
        let err = jitter(&c, &spec(CorruptionKind::Scale, 1, 0)).unwrap_err();
        assert!(matches!(err, CorruptError::WrongKind { .. }));
    }

    #[test]
    fn identity_scale_equals_normalized_input() {
        let c = mug(300, 2);
        let scaled = unit_sphere_normalize(&apply_scale_factors(&c, [1.0, 1.0, 1.0])).unwrap();
        assert_eq!(scaled, unit_sphere_normalize(&c).unwrap());
    }

    #[test]
    fn scale_renormalizes_to_unit_max_norm() {
        let c = mug(400, 4);
        for level in 1..=5 {
            let out = scale(&c, &spec(CorruptionKind::Scale, level, 9)).unwrap();
            let max = out.points.iter().map(norm).fold(0.0, f64::max);
            assert!((max - 1.0).abs() <= 1e-6);
            assert_eq!(out.labels, c.labels);
        }
    }

    #[test]
    fn severity_five_scale_factors_in_range() {
        let c = mug(400, 4);
        let s = SEVERITY_TABLE.scale_s[4];
        for sample in 0..50 {
            let f = sample_scale_factors(&mut derive_stream(0, sample, 5), s);
            let scaled = apply_scale_factors(&c, f);
            for axis in 0..3 {
                let ext = |cl: &LabeledCloud| {
                    let v: Vec<f64> = cl.points.iter().map(|p| p[axis]).collect();
                    v.iter().cloned().fold(f64::MIN, f64::max) - v.iter().cloned().fold(f64::MAX, f64::min)
                };
                let ratio = ext(&scaled) / ext(&c);
                assert!(ratio >= 0.5 - 1e-12 && ratio <= 2.0 + 1e-12, "{ratio}");
            }
        }
    }

    #[test]
    fn all_identical_points_are_degenerate() {
        let c = LabeledCloud::new(vec![[0.3, 0.3, 0.3]; 10], vec![0.0; 10]);
        assert_eq!(
            scale(&c, &spec(CorruptionKind::Scale, 1, 0)).unwrap_err(),
            CorruptError::DegenerateCloud
        );
    }

    #[test]
    fn zero_angles_are_identity() {
        let c = mug(100, 5);
        assert_eq!(apply_euler_rotation(&c, [0.0; 3]), c);
    }

    #[test]
    fn euler_matrix_matches_nalgebra_roll_pitch_yaw() {
        let angles = [0.1, -0.2, 0.3];
        let ours = euler_rotation_matrix(angles);
        let theirs = nalgebra::Rotation3::from_euler_angles(0.1, -0.2, 0.3).into_inner();
        assert!((ours - theirs).abs().max() < 1e-15);
    }

    #[test]
    fn severity_one_angles_bounded() {
        let theta = std::f64::consts::PI / 30.0;
        for sample in 0..200 {
            let a = sample_euler_angles(&mut derive_stream(1, sample, 3), theta);
            assert!(a.iter().all(|x| x.abs() <= theta));
        }
    }

    #[test]
    fn drop_global_counts() {
        let c = mug(2048, 6);
        assert_eq!(drop_global(&c, &spec(CorruptionKind::DropGlobal, 1, 0)).unwrap().n_points(), 1536);
        assert_eq!(drop_global(&c, &spec(CorruptionKind::DropGlobal, 5, 0)).unwrap().n_points(), 512);
    }

    #[test]
    fn drop_global_empty_result() {
        let c = LabeledCloud::new(vec![[0.0, 0.0, 1.0]], vec![1.0]);
        assert!(matches!(
            drop_global(&c, &spec(CorruptionKind::DropGlobal, 5, 0)),
            Err(CorruptError::EmptyResult { n: 1, dropped: 1 })
        ));
    }

    #[test]
    fn drop_local_removes_exactly_k() {
        let c = mug(2048, 7);
        for level in 1..=5u8 {
            let out = drop_local(&c, &spec(CorruptionKind::DropLocal, level, 3)).unwrap();
            assert_eq!(out.n_points(), 2048 - 100 * level as usize);
        }
    }

    #[test]
    fn drop_local_too_small() {
        let c = mug(108, 7);
        assert_eq!(
            drop_local(&c, &spec(CorruptionKind::DropLocal, 1, 3)).unwrap_err(),
            CorruptError::CloudTooSmall { n: 108, k: 100 }
        );
        assert!(drop_local(&mug(109, 7), &spec(CorruptionKind::DropLocal, 1, 3)).is_ok());
    }

    #[test]
    fn single_cluster_drop_is_brute_force_knn() {
        let c = mug(600, 8);
        for sample in 0..10 {
            let trace = drop_local_with_clusters(&c, &mut derive_stream(3, sample, 0), 100, 1).unwrap();
            let center = trace.clusters[0].center_index;
            let cp = c.points[center];
            // O(N²): point i is removed iff fewer than K points precede it in
            // (distance, not-center, index) order.
            let key = |i: usize| (dist2(&c.points[i], &cp), i != center, i);
            let mut expected: Vec<usize> = (0..c.n_points())
                .filter(|&i| {
                    (0..c.n_points())
                        .filter(|&j| key(j).partial_cmp(&key(i)) == Some(std::cmp::Ordering::Less))
                        .count()
                        < 100
                })
                .collect();
            let mut removed = trace.removed.clone();
            removed.sort_unstable();
            expected.sort_unstable();
            assert_eq!(removed, expected);
            assert_eq!(removed[0..].contains(&center), true);
        }
    }

    #[test]
    fn add_global_appends_zero_labeled_ball_points() {
        let c = mug(2048, 9);
        let out = add_global(&c, &spec(CorruptionKind::AddGlobal, 1, 0)).unwrap();
        assert_eq!(out.n_points(), 2058);
        assert_eq!(&out.points[..2048], &c.points[..]);
        assert_eq!(&out.labels[..2048], &c.labels[..]);
        assert!(out.points[2048..].iter().all(|p| norm(p) <= 1.0));
        assert!(out.labels[2048..].iter().all(|&l| l == 0.0));
    }

    #[test]
    fn add_local_counts_and_labels() {
        let c = mug(2048, 10);
        let out = add_local(&c, &spec(CorruptionKind::AddLocal, 3, 0)).unwrap();
        assert_eq!(out.n_points(), 2348);
        assert!(out.labels[2048..].iter().all(|&l| l == 0.0));
        assert_eq!(&out.points[..2048], &c.points[..]);
    }

    #[test]
    fn add_local_single_cluster_spread() {
        let c = mug(256, 11);
        let trace = add_local_with_clusters(&c, &mut derive_stream(4, 4, 4), 10_000, 1).unwrap();
        let cl = &trace.clusters[0];
        let sigma = cl.sigma.unwrap();
        assert!((0.075..0.125).contains(&sigma));
        let mu = c.points[cl.center_index];
        let added = &trace.cloud.points[256..];
        let mut sum2 = 0.0;
        for p in added {
            for k in 0..3 {
                sum2 += (p[k] - mu[k]).powi(2);
            }
        }
        let std = (sum2 / (3.0 * added.len() as f64)).sqrt();
        assert!((std / sigma - 1.0).abs() < 0.03, "{std} vs {sigma}");
    }

    proptest! {
        #[test]
        fn partition_sums_to_k(seed in any::<u64>(), k in 8usize..600, c in 1usize..=8) {
            let sizes = partition_count(&mut derive_stream(seed, 0, 0), k, c);
            prop_assert_eq!(sizes.len(), c);
            prop_assert_eq!(sizes.iter().sum::<usize>(), k);
            prop_assert!(sizes.iter().all(|&s| s >= 1));
        }

        #[test]
        fn rotation_preserves_distances(seed in any::<u64>(), level in 1u8..=5) {
            let c = mug(64, seed % 17);
            let out = rotate(&c, &CorruptionSpec::for_sample(CorruptionKind::Rotate, sev(level), seed, 0)).unwrap();
            for i in 0..c.n_points() {
                for j in (i + 1)..c.n_points() {
                    let a = dist2(&c.points[i], &c.points[j]).sqrt();
                    let b = dist2(&out.points[i], &out.points[j]).sqrt();
                    prop_assert!((a - b).abs() <= 1e-6 * a.max(1e-12));
                }
            }
        }
    }
}
