//! Built-in consistency checks: RNG golden vectors, tile vs reference
//! renderer, alpha conservation and metric oracles.

use serde::Serialize;

use crate::metrics::{self, default_thresholds};
use crate::oracle;
use crate::rng::{check_golden_vectors, derive_stream};
use crate::splat::{self, composite_alpha, make_views, GaussianSet, RigConfig, ViewStack};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SelftestReport {
    pub checks: Vec<Check>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SelftestOptions {
    pub seed: u64,
    pub scenes: usize,
    pub max_gaussians: usize,
    pub rig: RigConfig,
    pub metric_pairs: usize,
}

impl Default for SelftestOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            scenes: 4,
            max_gaussians: 1000,
            rig: RigConfig::default(),
            metric_pairs: 200,
        }
    }
}

/// Random Gaussians in `[-1, 1]³` with 1 color channel and `dim` features.
pub fn random_scene(seed: u64, n: usize, dim: usize) -> GaussianSet {
    let mut s = derive_stream(seed, n as u64, 0x5CE);
    let means = (0..n)
        .map(|_| [s.range(-1.0, 1.0), s.range(-1.0, 1.0), s.range(-1.0, 1.0)])
        .collect();
    let colors = (0..n).map(|_| s.uniform()).collect();
    let features = (0..n * dim).map(|_| s.normal()).collect();
    GaussianSet::new(means, colors, 1, s.range(0.01, 0.06), s.range(0.3, 1.0))
        .and_then(|g| g.with_features(features, dim))
        .expect("valid scene")
}

/// Prediction/ground-truth pair of length `n` with tied scores and about
/// 40% positives, guaranteed to contain both classes.
pub fn random_metric_pair(seed: u64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut s = derive_stream(seed, n as u64, 0xA0C);
    let pred = (0..n).map(|_| (s.uniform() * 20.0).floor() / 20.0).collect();
    let mut gt: Vec<f64> = (0..n)
        .map(|_| if s.uniform() < 0.6 { 0.0 } else { s.range(0.05, 1.0) })
        .collect();
    gt[0] = 1.0;
    gt[n - 1] = 0.0;
    (pred, gt)
}

fn check(name: &str, passed: bool, detail: String) -> Check {
    Check {
        name: name.to_string(),
        passed,
        detail,
    }
}

pub fn check_rng() -> Check {
    let failures = check_golden_vectors();
    check(
        "rng golden vectors",
        failures.is_empty(),
        if failures.is_empty() {
            "3 lineages match".to_string()
        } else {
            failures.join("; ")
        },
    )
}

/// Largest tile-vs-reference difference over `scenes` random scenes.
pub fn renderer_max_diff(opts: &SelftestOptions) -> f64 {
    let mut worst = 0.0f64;
    for k in 0..opts.scenes {
        let mut s = derive_stream(opts.seed, k as u64, 0x4E4);
        let n = 1 + s.below(opts.max_gaussians);
        let g = random_scene(opts.seed ^ k as u64, n, 3);
        let rig = make_views([0.0; 3], 3f64.sqrt(), &opts.rig).expect("valid rig");
        let d = splat::rasterize(&g, &rig)
            .max_abs_diff(&splat::reference_rasterize(&g, &rig))
            .expect("same shapes");
        worst = worst.max(d);
    }
    worst
}

pub fn check_renderer(opts: &SelftestOptions) -> Check {
    let d = renderer_max_diff(opts);
    check(
        "renderer oracle",
        d <= 1e-5,
        format!("{} scenes, max abs diff {d:.3e}", opts.scenes),
    )
}

pub fn check_alpha(seed: u64, sequences: usize) -> Check {
    let mut s = derive_stream(seed, 0, 0xA1F);
    let mut worst = 0.0f64;
    let mut in_range = true;
    for _ in 0..sequences {
        let alphas: Vec<f64> = (0..s.below(64)).map(|_| s.uniform()).collect();
        let a = composite_alpha(&alphas);
        in_range &= (0.0..=1.0).contains(&a);
        worst = worst.max((a - oracle::alpha_product(&alphas)).abs());
    }
    check(
        "alpha conservation",
        in_range && worst <= 1e-10,
        format!("{sequences} sequences, max diff {worst:.3e}"),
    )
}

/// Largest deviations `(auc, aiou, sim/mae/mse)` against the oracles over
/// `pairs` random pairs of up to 512 points.
pub fn metric_max_diffs(seed: u64, pairs: usize) -> [f64; 3] {
    let grid = default_thresholds();
    let mut worst = [0.0f64; 3];
    let mut s = derive_stream(seed, 0, 0x3E7);
    for k in 0..pairs {
        let n = 2 + s.below(511);
        let (p, g) = random_metric_pair(seed ^ (k as u64) << 16, n);
        let auc = metrics::auc(&p, &g).unwrap();
        worst[0] = worst[0].max((auc - oracle::auc_pairwise(&p, &g).unwrap()).abs());
        let a = metrics::aiou(&p, &g, &grid).unwrap();
        if a != oracle::aiou_sets(&p, &g, &grid).unwrap() {
            worst[1] = f64::INFINITY;
        }
        let q: Vec<f64> = p.iter().map(|x| x + 0.01).collect();
        worst[2] = worst[2].max((metrics::sim(&q, &g).unwrap() - oracle::sim_loop(&q, &g)).abs());
        worst[2] = worst[2].max((metrics::mae(&p, &g).unwrap() - oracle::mae_loop(&p, &g)).abs());
        if k % 10 == 0 {
            let (a, b, mask) = random_feature_pair(seed ^ k as u64);
            let fast = metrics::consistency_mse(&a, &b, &mask).unwrap();
            worst[2] = worst[2].max((fast - oracle::mse_loop(&a, &b, &mask)).abs());
        }
    }
    worst
}

fn random_feature_pair(seed: u64) -> (ViewStack, ViewStack, Vec<bool>) {
    let mut s = derive_stream(seed, 1, 0xFEA);
    let (v, d, h, w) = (1 + s.below(3), 1 + s.below(4), 1 + s.below(9), 1 + s.below(9));
    let mut a = ViewStack::zeros(v, d, h, w);
    let mut b = a.clone();
    a.data.iter_mut().for_each(|x| *x = s.normal());
    b.data.iter_mut().for_each(|x| *x = s.normal());
    let mut mask: Vec<bool> = (0..v * h * w).map(|_| s.uniform() < 0.7).collect();
    mask[0] = true;
    (a, b, mask)
}

pub fn check_metrics(seed: u64, pairs: usize) -> Check {
    let [auc, aiou, rest] = metric_max_diffs(seed, pairs);
    check(
        "metric oracles",
        auc <= 1e-9 && aiou == 0.0 && rest <= 1e-12,
        format!("{pairs} pairs, auc {auc:.1e}, aiou {aiou:.1e}, sim/mae/mse {rest:.1e}"),
    )
}

pub fn run_selftest(opts: &SelftestOptions) -> SelftestReport {
    SelftestReport {
        checks: vec![
            check_rng(),
            check_renderer(opts),
            check_alpha(opts.seed, 10_000),
            check_metrics(opts.seed, opts.metric_pairs),
        ],
    }
}
