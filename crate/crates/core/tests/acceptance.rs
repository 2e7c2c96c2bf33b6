//! Acceptance checks. Each test prints one `[PASS]` or `[FAIL]` line before
//! asserting, so `--nocapture --test-threads=1` yields a readable summary.

use std::collections::BTreeMap;
use std::fs;
use std::hash::{DefaultHasher, Hasher};
use std::path::{Path, PathBuf};

use splatbench::corrupt::{
    apply, build_benchmark, corruption_lineage, euler_rotation_matrix, expected_count, jitter, plan_benchmark,
    rotate, sample_euler_angles, scale, BenchmarkOptions, CorruptError, CorruptionSpec, SEVERITY_TABLE,
};
use splatbench::io::{self, IoError};
use splatbench::manifest::ManifestError;
use splatbench::oracle;
use splatbench::rng::check_golden_vectors;
use splatbench::selftest::{metric_max_diffs, random_scene};
use splatbench::splat::{
    composite_alpha, make_views, rasterize, reference_rasterize, render_affordance_masks, rig_for_cloud,
    GaussianSet, RigConfig,
};
use splatbench::synthetic::{generate, Shape};
use splatbench::vocab::{CategoryStat, LASO_C_STATS, PIAD_C_STATS};
use splatbench::{derive_stream, CorruptionKind, LabeledCloud, RngStream, SampleManifest, SeverityLevel};

fn report(n: u32, name: &str, passed: bool, detail: impl AsRef<str>) {
    let tag = if passed { "PASS" } else { "FAIL" };
    println!("[{tag}] criterion {n}: {name}: {}", detail.as_ref());
    assert!(passed, "criterion {n} ({name}) failed: {}", detail.as_ref());
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn spec(kind: CorruptionKind, severity: SeverityLevel, seed: u64, id: u64) -> CorruptionSpec {
    CorruptionSpec::new(kind, severity, RngStream::new(corruption_lineage(seed, id, kind, severity)))
}

/// Uniform points in `[-1, 1]³`; about a third of the labels are zero.
fn random_cloud(seed: u64, n: usize) -> LabeledCloud {
    let mut s = derive_stream(seed, n as u64, 0xC10D);
    let points = (0..n)
        .map(|_| [s.range(-1.0, 1.0), s.range(-1.0, 1.0), s.range(-1.0, 1.0)])
        .collect();
    let labels = (0..n)
        .map(|_| if s.uniform() < 0.33 { 0.0 } else { s.uniform() })
        .collect();
    LabeledCloud::new(points, labels)
}

fn dist(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

fn norm(p: &[f64; 3]) -> f64 {
    dist(p, &[0.0; 3])
}

fn synthetic_manifests(stats: &[CategoryStat], first_id: u64) -> Vec<SampleManifest> {
    let mut out = Vec::new();
    let mut id = first_id;
    for stat in stats {
        for k in 0..stat.pairings {
            let aff = stat.affordances[k % stat.affordances.len()];
            out.push(SampleManifest::new(id, stat.category, aff, format!("{id}.pcaf")));
            id += 1;
        }
    }
    out
}

/// Writes `count` synthetic clouds and their manifest into `dir`.
fn desk_dataset(dir: &Path, count: u64, points: usize) -> Vec<SampleManifest> {
    fs::create_dir_all(dir).unwrap();
    (0..count)
        .map(|id| {
            let shape = Shape::ALL[id as usize % Shape::ALL.len()];
            let (category, affordance) = shape.pairing();
            let path = format!("{id}.pcaf");
            io::write_cloud(&dir.join(&path), &generate(shape, points, id)).unwrap();
            SampleManifest::new(id, category, affordance, path)
        })
        .collect()
}

#[test]
fn criterion_01_benchmark_cardinality() {
    let options = BenchmarkOptions::full(0);
    let piad = synthetic_manifests(&PIAD_C_STATS, 0);
    let laso = synthetic_manifests(&LASO_C_STATS, 1_000_000);
    let union: Vec<_> = piad.iter().chain(&laso).cloned().collect();
    let p = plan_benchmark(&piad, &options).summary;
    let l = plan_benchmark(&laso, &options).summary;
    let u = plan_benchmark(&union, &options).summary;

    let dir = tempfile::tempdir().unwrap();
    let manifests = desk_dataset(&dir.path().join("in"), 10, 1024);
    let desk = build_benchmark(&manifests, &dir.path().join("in"), &dir.path().join("out"), &options).unwrap();
    let index = io::load_index(&dir.path().join("out").join(splatbench::corrupt::INDEX_FILE)).unwrap();

    let passed = p.base_pairings == 2474
        && l.base_pairings == 2416
        && u.base_pairings == 4890
        && [&p, &l, &u].iter().all(|s| s.variants_per_pairing == 35)
        && u.variants_planned == 4890 * 35
        && desk.variants_written == 350
        && desk.skipped.is_empty()
        && index.len() == 350;
    report(
        1,
        "benchmark cardinality",
        passed,
        format!(
            "PIAD-C {}, LASO-C {}, union {}, {} variants/pairing, desk benchmark {} variants ({} indexed)",
            p.base_pairings, l.base_pairings, u.base_pairings, u.variants_per_pairing, desk.variants_written,
            index.len()
        ),
    );
}

#[test]
fn criterion_02_count_laws() {
    let mut s = derive_stream(2, 0, 0xC0C0);
    let mut checked = 0;
    let mut too_small = 0;
    let mut failures = Vec::new();
    for c in 0..500u64 {
        let n = 64 + s.below(4096 - 64 + 1);
        let cloud = random_cloud(c, n);
        for kind in CorruptionKind::ALL {
            for sev in SeverityLevel::ALL {
                let result = apply(&cloud, &spec(kind, sev, 2, c));
                let k = SEVERITY_TABLE.drop_local_k[sev.index()];
                match result {
                    Err(CorruptError::CloudTooSmall { .. })
                        if kind == CorruptionKind::DropLocal && n <= k + splatbench::corrupt::MAX_LOCAL_CLUSTERS =>
                    {
                        too_small += 1
                    }
                    Ok(out) if out.n_points() == expected_count(kind, sev, n) && out.labels.len() == out.n_points() => {
                        checked += 1
                    }
                    other => failures.push(format!("{kind:?} s{} N={n}: {:?}", sev.level(), other.map(|o| o.n_points()))),
                }
            }
        }
    }
    report(
        2,
        "corruption count laws",
        failures.is_empty(),
        format!(
            "{checked} variants exact, {too_small} Drop Local refusals on clouds with N <= K+{}; {} failures {:?}",
            splatbench::corrupt::MAX_LOCAL_CLUSTERS,
            failures.len(),
            failures.iter().take(3).collect::<Vec<_>>()
        ),
    );
}

#[test]
fn criterion_03_jitter_calibration() {
    let mut worst = 0.0f64;
    let mut detail = Vec::new();
    for sev in SeverityLevel::ALL {
        let sigma = SEVERITY_TABLE.jitter_sigma[sev.index()];
        let mut sum = [0.0f64; 3];
        let mut sq = [0.0f64; 3];
        let mut count = 0.0;
        for seed in 0..100u64 {
            let cloud = random_cloud(seed, 2048);
            let out = jitter(&cloud, &spec(CorruptionKind::Jitter, sev, seed, seed)).unwrap();
            for (p, q) in cloud.points.iter().zip(&out.points) {
                for a in 0..3 {
                    let d = q[a] - p[a];
                    sum[a] += d;
                    sq[a] += d * d;
                }
                count += 1.0;
            }
        }
        let stds: Vec<f64> = (0..3)
            .map(|a| (sq[a] / count - (sum[a] / count).powi(2)).sqrt())
            .collect();
        for s in &stds {
            worst = worst.max((s / sigma - 1.0).abs());
        }
        detail.push(format!("s{} σ={sigma} std={:.5}/{:.5}/{:.5}", sev.level(), stds[0], stds[1], stds[2]));
    }
    report(
        3,
        "jitter calibration",
        worst <= 0.02,
        format!("max relative error {:.3}%; {}", worst * 100.0, detail.join(", ")),
    );
}

#[test]
fn criterion_04_scale_rotate_geometry() {
    let mut scale_err = 0.0f64;
    let mut rot_err = 0.0f64;
    let mut angle_ok = true;
    let mut rotation_matches = true;
    for seed in 0..40u64 {
        let cloud = random_cloud(seed + 500, 256);
        for sev in SeverityLevel::ALL {
            let scaled = scale(&cloud, &spec(CorruptionKind::Scale, sev, seed, seed)).unwrap();
            let max_norm = scaled.points.iter().map(norm).fold(0.0, f64::max);
            scale_err = scale_err.max((max_norm - 1.0).abs());

            let rs = spec(CorruptionKind::Rotate, sev, seed, seed);
            let theta = SEVERITY_TABLE.rotate_theta[sev.index()];
            let angles = sample_euler_angles(&mut rs.stream.clone(), theta);
            angle_ok &= angles.iter().all(|a| a.abs() <= theta);
            let r = euler_rotation_matrix(angles);
            let rotated = rotate(&cloud, &rs).unwrap();
            for (p, q) in cloud.points.iter().zip(&rotated.points) {
                let e = [0, 1, 2].map(|i| r[(i, 0)] * p[0] + r[(i, 1)] * p[1] + r[(i, 2)] * p[2]);
                rotation_matches &= dist(&e, q) <= 1e-12;
            }
            for i in 0..cloud.n_points() {
                for j in (i + 1)..cloud.n_points() {
                    let d0 = dist(&cloud.points[i], &cloud.points[j]);
                    let d1 = dist(&rotated.points[i], &rotated.points[j]);
                    rot_err = rot_err.max((d1 - d0).abs() / d0);
                }
            }
        }
    }
    let mut bound_ok = true;
    for sev in SeverityLevel::ALL {
        let theta = SEVERITY_TABLE.rotate_theta[sev.index()];
        let mut s = derive_stream(4, sev.level() as u64, 0xE0E);
        for _ in 0..10_000 {
            bound_ok &= sample_euler_angles(&mut s, theta).iter().all(|a| a.abs() <= theta);
        }
    }
    report(
        4,
        "scale/rotate geometry",
        scale_err <= 1e-6 && rot_err <= 1e-6 && angle_ok && bound_ok && rotation_matches,
        format!(
            "max | |p|max - 1 | = {scale_err:.2e}, max relative distance change {rot_err:.2e}, angles within θ: {}",
            angle_ok && bound_ok
        ),
    );
}

#[test]
fn criterion_05_add_labeling() {
    let mut appended = 0usize;
    let mut nonzero = 0usize;
    let mut outside = 0usize;
    let mut prefix_kept = true;
    for seed in 0..50u64 {
        let cloud = random_cloud(seed + 900, 512 + 37 * seed as usize);
        for kind in [CorruptionKind::AddGlobal, CorruptionKind::AddLocal] {
            for sev in SeverityLevel::ALL {
                let out = apply(&cloud, &spec(kind, sev, seed, seed)).unwrap();
                let n = cloud.n_points();
                prefix_kept &= out.points[..n] == cloud.points[..] && out.labels[..n] == cloud.labels[..];
                for (p, &l) in out.points[n..].iter().zip(&out.labels[n..]) {
                    appended += 1;
                    if l != 0.0 || l.is_sign_negative() {
                        nonzero += 1;
                    }
                    if kind == CorruptionKind::AddGlobal && norm(p) > 1.0 {
                        outside += 1;
                    }
                }
            }
        }
    }
    report(
        5,
        "add-type labeling",
        nonzero == 0 && outside == 0 && prefix_kept,
        format!(
            "{appended} appended points, {nonzero} with nonzero label, {outside} Add Global points outside the unit ball"
        ),
    );
}

/// Gaussians packed into a small ball with wide footprints and high opacity,
/// so most pixels saturate and the tile rasterizer's early exit fires.
fn dense_scene(seed: u64, n: usize) -> GaussianSet {
    let mut s = derive_stream(seed, n as u64, 0xDE5E);
    let means = (0..n)
        .map(|_| [0.3 * s.normal(), 0.3 * s.normal(), 0.3 * s.normal()])
        .collect();
    let colors = (0..n).map(|_| s.uniform()).collect();
    let features = (0..n * 3).map(|_| s.normal()).collect();
    GaussianSet::new(means, colors, 1, s.range(0.04, 0.12), s.range(0.85, 1.0))
        .and_then(|g| g.with_features(features, 3))
        .unwrap()
}

#[test]
fn criterion_06_renderer_oracle() {
    let rig = make_views([0.0; 3], 3f64.sqrt(), &RigConfig::default()).unwrap();
    let mut s = derive_stream(6, 0, 0x5CE);
    let mut worst = 0.0f64;
    let mut saturated = 0usize;
    for k in 0..50u64 {
        let n = 1 + s.below(1000);
        let g = if k % 2 == 0 { random_scene(k, n, 3) } else { dense_scene(k, n) };
        let tile = rasterize(&g, &rig);
        let reference = reference_rasterize(&g, &rig);
        worst = worst.max(tile.max_abs_diff(&reference).unwrap());
        saturated += tile.alpha.data.iter().filter(|&&a| a > 1.0 - 1e-4).count();
    }
    report(
        6,
        "renderer oracle equivalence",
        worst <= 1e-5,
        format!(
            "50 scenes, 12 views of 112x112, color/depth/alpha/feature max abs diff {worst:.3e}, {saturated} saturated pixels"
        ),
    );
}

#[test]
fn criterion_07_alpha_conservation() {
    let mut s = derive_stream(7, 0, 0xA1F);
    let mut worst = 0.0f64;
    let mut in_range = true;
    for k in 0..10_000 {
        let len = s.below(200);
        let alphas: Vec<f64> = (0..len)
            .map(|_| match k % 4 {
                0 => s.uniform(),
                1 => s.uniform() * 0.05,
                2 => 0.95 + 0.05 * s.uniform(),
                _ => if s.uniform() < 0.1 { 1.0 } else { s.uniform() },
            })
            .collect();
        let a = composite_alpha(&alphas);
        in_range &= (0.0..=1.0).contains(&a);
        worst = worst.max((a - oracle::alpha_product(&alphas)).abs());
    }
    report(
        7,
        "alpha-blend conservation",
        worst <= 1e-10 && in_range,
        format!("10000 sequences, max diff from 1 - prod(1 - a) {worst:.3e}, all in [0, 1]: {in_range}"),
    );
}

#[test]
fn criterion_08_feature_linearity() {
    let rig = make_views([0.0; 3], 3f64.sqrt(), &RigConfig::default()).unwrap();
    let mut worst = 0.0f64;
    for k in 0..8u64 {
        let mut s = derive_stream(8, k, 0xF1);
        let base = if k % 2 == 0 { random_scene(k + 100, 400, 1) } else { dense_scene(k + 100, 400) };
        let dim = 4;
        let n = base.len();
        let f1: Vec<f64> = (0..n * dim).map(|_| s.normal()).collect();
        let f2: Vec<f64> = (0..n * dim).map(|_| s.normal()).collect();
        let (a, b) = (s.range(-2.0, 2.0), s.range(-2.0, 2.0));
        let mix: Vec<f64> = f1.iter().zip(&f2).map(|(x, y)| a * x + b * y).collect();
        let render = |f: Vec<f64>| {
            rasterize(&base.clone().with_features(f, dim).unwrap(), &rig)
                .feature
                .unwrap()
        };
        let (r1, r2, rm) = (render(f1), render(f2), render(mix));
        for i in 0..rm.data.len() {
            worst = worst.max((rm.data[i] - a * r1.data[i] - b * r2.data[i]).abs());
        }
    }
    report(
        8,
        "feature-splat linearity",
        worst <= 1e-5,
        format!("8 scenes, 4-dim features, max |splat(a f1 + b f2) - a splat(f1) - b splat(f2)| = {worst:.3e}"),
    );
}

#[test]
fn criterion_09_metric_oracles() {
    let [auc, aiou, rest] = metric_max_diffs(9, 1000);
    report(
        9,
        "metric oracles",
        auc <= 1e-9 && aiou == 0.0 && rest <= 1e-12,
        format!("1000 pairs, AUC diff {auc:.2e}, aIoU diff {aiou:.1e}, SIM/MAE/MSE diff {rest:.2e}"),
    );
}

/// Relative path to bytes for every file below `root`.
fn tree(root: &Path) -> BTreeMap<String, Vec<u8>> {
    fn walk(root: &Path, dir: &Path, out: &mut BTreeMap<String, Vec<u8>>) {
        let mut entries: Vec<_> = fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
        entries.sort();
        for p in entries {
            if p.is_dir() {
                walk(root, &p, out);
            } else {
                let rel = p.strip_prefix(root).unwrap().to_string_lossy().into_owned();
                out.insert(rel, fs::read(&p).unwrap());
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(root, root, &mut out);
    out
}

fn checksum(files: &BTreeMap<String, Vec<u8>>) -> u64 {
    let mut h = DefaultHasher::new();
    for (k, v) in files {
        h.write(k.as_bytes());
        h.write(v);
    }
    h.finish()
}

/// Corrupts the desk dataset and renders every variant's masks as raw views.
fn corrupt_and_render(input: &Path, manifests: &[SampleManifest], out: &Path) {
    let options = BenchmarkOptions::full(10);
    let bench = out.join("bench");
    build_benchmark(manifests, input, &bench, &options).unwrap();
    let index = io::load_index(&bench.join(splatbench::corrupt::INDEX_FILE)).unwrap();
    let rig_config = RigConfig {
        views: 4,
        height: 48,
        width: 48,
        ..Default::default()
    };
    use rayon::prelude::*;
    index.par_iter().for_each(|r| {
        let cloud = io::read_cloud(&bench.join(&r.cloud_path)).unwrap();
        let rig = rig_for_cloud(&cloud, &rig_config).unwrap();
        let masks = render_affordance_masks(&cloud, &rig, 0.02, 0.9).unwrap();
        let dir = out.join("render").join(r.cloud_path.trim_end_matches(".pcaf"));
        fs::create_dir_all(&dir).unwrap();
        for v in 0..rig.views() {
            io::write_raw_view(&dir.join(format!("view_{v}.f32")), &masks, v).unwrap();
        }
    });
}

#[test]
fn criterion_10_thread_independence() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in");
    let manifests = desk_dataset(&input, 6, 1024);
    let mut sums = Vec::new();
    let mut first: Option<BTreeMap<String, Vec<u8>>> = None;
    let mut identical = true;
    for threads in [1, 4, 16] {
        let out = dir.path().join(format!("t{threads}"));
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| corrupt_and_render(&input, &manifests, &out));
        let files = tree(&out);
        sums.push(format!("{threads} workers {:016x} ({} files)", checksum(&files), files.len()));
        match &first {
            None => first = Some(files),
            Some(f) => identical &= *f == files,
        }
    }
    report(10, "determinism and thread independence", identical, sums.join(", "));
}

#[test]
fn criterion_11_rng_golden_vectors() {
    let failures = check_golden_vectors();
    report(
        11,
        "RNG golden vectors",
        failures.is_empty(),
        if failures.is_empty() {
            "3 lineages x 4 uniforms match".to_string()
        } else {
            failures.join("; ")
        },
    );
}

/// Coordinates and labels that are exactly representable in `f32`.
fn f32_cloud(seed: u64) -> LabeledCloud {
    let mut s = derive_stream(seed, 12, 0x10);
    let n = s.below(3000);
    let f = |x: f64| x as f32 as f64;
    let points = (0..n)
        .map(|_| [f(s.range(-5.0, 5.0)), f(s.range(-5.0, 5.0)), f(s.range(-5.0, 5.0))])
        .collect();
    let labels = (0..n).map(|_| f(s.uniform())).collect();
    LabeledCloud::new(points, labels)
}

fn header(magic: &[u8; 4], version: u32, n: u32, flags: u32) -> Vec<u8> {
    let mut b = magic.to_vec();
    for v in [version, n, flags] {
        b.extend_from_slice(&v.to_le_bytes());
    }
    b
}

#[test]
fn criterion_12_io_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let mut mismatched = 0;
    for seed in 0..200u64 {
        let cloud = f32_cloud(seed);
        let path = dir.path().join(format!("{seed}.pcaf"));
        io::write_cloud(&path, &cloud).unwrap();
        let back = io::read_cloud(&path).unwrap();
        let same = back.points.len() == cloud.points.len()
            && back.points.iter().flatten().zip(cloud.points.iter().flatten()).all(|(a, b)| a.to_bits() == b.to_bits())
            && back.labels.iter().zip(&cloud.labels).all(|(a, b)| a.to_bits() == b.to_bits())
            && back.labels.len() == cloud.labels.len();
        if !same {
            mismatched += 1;
        }
    }

    let one_point = |label: f32| {
        let mut b = header(b"PCAF", 1, 1, 1);
        for v in [0.0f32, 0.0, 0.0, label] {
            b.extend_from_slice(&v.to_le_bytes());
        }
        b
    };
    let mut trailing = one_point(1.0);
    trailing.push(0);
    let mut truncated = one_point(1.0);
    truncated.pop();
    let decode = |b: &[u8]| io::decode_cloud(b).map(|_| ());
    let cases: Vec<(&str, bool)> = vec![
        ("bad magic", matches!(decode(&header(b"PCAX", 1, 0, 0)), Err(IoError::BadMagic { .. }))),
        ("newer version", matches!(decode(&header(b"PCAF", 2, 0, 0)), Err(IoError::UnsupportedVersion(2)))),
        ("unknown flags", matches!(decode(&header(b"PCAF", 1, 0, 2)), Err(IoError::UnsupportedFlags(_)))),
        ("short header", matches!(decode(b"PCAF\x01\x00"), Err(IoError::Truncated { .. }))),
        ("truncated payload", matches!(decode(&truncated), Err(IoError::Truncated { .. }))),
        ("trailing bytes", matches!(decode(&trailing), Err(IoError::TrailingBytes { extra: 1 }))),
        ("label above 1", matches!(decode(&one_point(1.5)), Err(IoError::LabelOutOfRange { index: 0, .. }))),
        ("NaN label", matches!(decode(&one_point(f32::NAN)), Err(IoError::LabelOutOfRange { .. }))),
        (
            "big-endian PLY",
            matches!(io::ingest_ply(&fixture("big_endian.ply"), "label"), Err(IoError::UnsupportedPly(_))),
        ),
        (
            "PLY list property",
            matches!(io::ingest_ply(&fixture("list_property.ply"), "label"), Err(IoError::UnsupportedPly(_))),
        ),
        (
            "CSV without z",
            matches!(io::ingest_csv(&fixture("missing_z.csv"), "label"), Err(IoError::MissingColumn(c)) if c == "z"),
        ),
        (
            "unknown category",
            matches!(
                io::load_manifest(&fixture("unknown_category.jsonl")),
                Err(IoError::Manifest { line: 2, source: ManifestError::UnknownCategory { sample_id: 1, .. }, .. })
            ),
        ),
    ];
    let wrong: Vec<&str> = cases.iter().filter(|(_, ok)| !ok).map(|(n, _)| *n).collect();
    report(
        12,
        "I/O round trip and malformed inputs",
        mismatched == 0 && wrong.is_empty(),
        format!(
            "200 clouds, {mismatched} not bit-identical; {} of {} malformed fixtures rejected as specified{}",
            cases.len() - wrong.len(),
            cases.len(),
            if wrong.is_empty() { String::new() } else { format!(" (wrong: {})", wrong.join(", ")) }
        ),
    );
}
