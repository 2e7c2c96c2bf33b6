//! Projection of isotropic Gaussians and front-to-back alpha blending.
//!
//! Both renderers share [`project`], [`Splat::alpha_at`] and [`Blender`],
//! so they evaluate bit-identical per-Gaussian alphas. They differ only in
//! which Gaussians a pixel visits (tile bins vs all) and in early exit.

use rayon::prelude::*;

use super::camera::{CameraRig, Intrinsics, Pose};
use super::{GaussianSet, RenderedViews};

pub const TILE_SIZE: usize = 16;
/// Footprint cutoff on the squared Mahalanobis distance (3σ).
pub const CUTOFF: f64 = 9.0;
/// Added to the diagonal of every projected covariance, in px².
pub const DILATION: f64 = 0.3;
/// Gaussians with view-space depth at or below this are culled.
pub const NEAR_PLANE: f64 = 0.01;
/// A tile pixel stops blending once `T · max(1, max |attribute|)` falls
/// below this, which bounds the truncation error of every channel.
pub const EXIT_BOUND: f64 = 1e-6;

/// A Gaussian projected into one view.
#[derive(Clone, Debug, PartialEq)]
pub struct Splat {
    pub index: usize,
    pub depth: f64,
    pub center: [f64; 2],
    /// Inverse 2D covariance `[a, b, c]` of `[[a, b], [b, c]]`.
    pub conic: [f64; 3],
    pub opacity: f64,
    /// Inclusive pixel bounds `[x0, y0, x1, y1]`, possibly outside the image.
    pub bounds: [i64; 4],
}

impl Splat {
    /// Opacity-weighted Gaussian at the center of pixel `(x, y)`, or `None`
    /// outside the 3σ footprint.
    pub fn alpha_at(&self, x: usize, y: usize) -> Option<f64> {
        let dx = x as f64 + 0.5 - self.center[0];
        let dy = y as f64 + 0.5 - self.center[1];
        let [a, b, c] = self.conic;
        let q = a * dx * dx + 2.0 * b * dx * dy + c * dy * dy;
        if q > CUTOFF {
            return None;
        }
        Some(self.opacity * (-0.5 * q).exp())
    }
}

/// Projects Gaussian `i` through the local affine approximation of the
/// pinhole model: `Σ2D = s²·J·Jᵀ + DILATION·I`.
pub fn project(gaussians: &GaussianSet, i: usize, pose: &Pose, k: &Intrinsics) -> Option<Splat> {
    let [x, y, z] = pose.to_view(&gaussians.means[i]);
    if !(z > NEAR_PLANE) {
        return None;
    }
    let u = k.fx * x / z + k.cx;
    let v = k.fy * y / z + k.cy;
    let j = [[k.fx / z, 0.0, -k.fx * x / (z * z)], [0.0, k.fy / z, -k.fy * y / (z * z)]];
    let s2 = gaussians.iso_scale * gaussians.iso_scale;
    let row_dot = |p: [f64; 3], q: [f64; 3]| p[0] * q[0] + p[1] * q[1] + p[2] * q[2];
    let sa = s2 * row_dot(j[0], j[0]) + DILATION;
    let sb = s2 * row_dot(j[0], j[1]);
    let sc = s2 * row_dot(j[1], j[1]) + DILATION;
    let det = sa * sc - sb * sb;
    if !(det > 0.0) || !u.is_finite() || !v.is_finite() {
        return None;
    }
    let conic = [sc / det, -sb / det, sa / det];
    let mid = 0.5 * (sa + sc);
    let lambda_max = mid + (mid * mid - det).max(0.0).sqrt();
    let r = (CUTOFF * lambda_max).sqrt();
    let to_px = |t: f64| t.clamp(-1e9, 1e9) as i64;
    let bounds = [
        to_px((u - r - 0.5).ceil()) - 1,
        to_px((v - r - 0.5).ceil()) - 1,
        to_px((u + r - 0.5).floor()) + 1,
        to_px((v + r - 0.5).floor()) + 1,
    ];
    Some(Splat {
        index: i,
        depth: z,
        center: [u, v],
        conic,
        opacity: gaussians.opacity,
        bounds,
    })
}

/// Front-to-back compositing state for one pixel.
#[derive(Clone, Debug)]
pub struct Blender {
    transmittance: f64,
    alpha: f64,
    values: Vec<f64>,
}

impl Blender {
    pub fn new(channels: usize) -> Self {
        Self {
            transmittance: 1.0,
            alpha: 0.0,
            values: vec![0.0; channels],
        }
    }

    /// Adds one layer: every accumulator gains `attribute · α · T`, and the
    /// alpha accumulator gains `α · T`.
    pub fn add(&mut self, alpha: f64, attributes: &[f64]) {
        let w = alpha * self.transmittance;
        for (acc, a) in self.values.iter_mut().zip(attributes) {
            *acc += w * a;
        }
        self.alpha += w;
        self.transmittance *= 1.0 - alpha;
    }

    pub fn transmittance(&self) -> f64 {
        self.transmittance
    }

    /// Accumulated alpha, kept in `[0, 1]` against rounding in the sum.
    pub fn alpha(&self) -> f64 {
        self.alpha.clamp(0.0, 1.0)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Accumulated alpha of a front-to-back sequence of layer alphas.
pub fn composite_alpha(alphas: &[f64]) -> f64 {
    let mut b = Blender::new(0);
    for &a in alphas {
        b.add(a, &[]);
    }
    b.alpha()
}

/// Per-view projected Gaussians sorted front to back, with their blended
/// attributes `[color.., depth, feature..]` laid out row by row.
struct ViewSplats {
    splats: Vec<Splat>,
    attributes: Vec<f64>,
    stride: usize,
}

impl ViewSplats {
    fn attrs(&self, k: usize) -> &[f64] {
        &self.attributes[k * self.stride..(k + 1) * self.stride]
    }
}

fn prepare_view(gaussians: &GaussianSet, pose: &Pose, k: &Intrinsics) -> ViewSplats {
    let mut splats: Vec<Splat> = (0..gaussians.len())
        .filter_map(|i| project(gaussians, i, pose, k))
        .collect();
    splats.sort_by(|a, b| a.depth.total_cmp(&b.depth).then(a.index.cmp(&b.index)));
    let cc = gaussians.color_channels;
    let fd = gaussians.feature_dim();
    let stride = cc + 1 + fd;
    let mut attributes = Vec::with_capacity(splats.len() * stride);
    for s in &splats {
        attributes.extend_from_slice(&gaussians.colors[s.index * cc..(s.index + 1) * cc]);
        attributes.push(s.depth);
        if let Some(f) = &gaussians.features {
            attributes.extend_from_slice(&f[s.index * fd..(s.index + 1) * fd]);
        }
    }
    ViewSplats {
        splats,
        attributes,
        stride,
    }
}

fn assemble(gaussians: &GaussianSet, rig: &CameraRig, pixels: Vec<Vec<f64>>) -> RenderedViews {
    // `pixels[v]` holds `H·W` rows of `[color.., depth, feature.., alpha]`.
    let (h, w, nv) = (rig.height, rig.width, rig.views());
    let cc = gaussians.color_channels;
    let fd = gaussians.feature_dim();
    let stride = cc + fd + 2;
    let mut out = RenderedViews::empty(nv, cc, gaussians.features.as_ref().map(|_| fd), h, w);
    for (v, buf) in pixels.iter().enumerate() {
        for p in 0..h * w {
            let row = &buf[p * stride..(p + 1) * stride];
            for c in 0..cc {
                out.color.plane_mut(v, c)[p] = row[c];
            }
            out.depth.plane_mut(v, 0)[p] = row[cc];
            if let Some(feat) = out.feature.as_mut() {
                for d in 0..fd {
                    feat.plane_mut(v, d)[p] = row[cc + 1 + d];
                }
            }
            out.alpha.plane_mut(v, 0)[p] = row[stride - 1];
        }
    }
    out
}

fn write_pixel(buf: &mut [f64], b: &Blender) {
    let n = b.values().len();
    buf[..n].copy_from_slice(b.values());
    buf[n] = b.alpha();
}

/// Tile rasterizer: 16×16 tiles, per-tile culling by footprint bounds, work
/// spread over (view, tile) pairs. Output does not depend on the number of
/// worker threads.
pub fn rasterize(gaussians: &GaussianSet, rig: &CameraRig) -> RenderedViews {
    let (h, w) = (rig.height, rig.width);
    let views: Vec<ViewSplats> = rig
        .poses
        .par_iter()
        .map(|pose| prepare_view(gaussians, pose, &rig.intrinsics))
        .collect();
    let tiles_x = w.div_ceil(TILE_SIZE);
    let tiles_y = h.div_ceil(TILE_SIZE);
    let stride = gaussians.color_channels + gaussians.feature_dim() + 2;

    // Bins keep the sorted order, so every tile blends front to back.
    let bins: Vec<Vec<Vec<u32>>> = views
        .par_iter()
        .map(|vs| {
            let mut bins = vec![Vec::new(); tiles_x * tiles_y];
            for (k, s) in vs.splats.iter().enumerate() {
                let [x0, y0, x1, y1] = s.bounds;
                if x1 < 0 || y1 < 0 || x0 >= w as i64 || y0 >= h as i64 {
                    continue;
                }
                let tx0 = x0.max(0) as usize / TILE_SIZE;
                let ty0 = y0.max(0) as usize / TILE_SIZE;
                let tx1 = (x1 as usize).min(w - 1) / TILE_SIZE;
                let ty1 = (y1 as usize).min(h - 1) / TILE_SIZE;
                for ty in ty0..=ty1 {
                    for tx in tx0..=tx1 {
                        bins[ty * tiles_x + tx].push(k as u32);
                    }
                }
            }
            bins
        })
        .collect();

    let jobs: Vec<(usize, usize)> = (0..views.len())
        .flat_map(|v| (0..tiles_x * tiles_y).map(move |t| (v, t)))
        .collect();
    let tiles: Vec<Vec<f64>> = jobs
        .par_iter()
        .map(|&(v, t)| {
            let vs = &views[v];
            let bin = &bins[v][t];
            let (tx, ty) = (t % tiles_x, t / tiles_x);
            let xs = tx * TILE_SIZE..((tx + 1) * TILE_SIZE).min(w);
            let ys = ty * TILE_SIZE..((ty + 1) * TILE_SIZE).min(h);
            let bound = bin
                .iter()
                .flat_map(|&k| vs.attrs(k as usize))
                .fold(1.0f64, |m, a| m.max(a.abs()));
            let mut out = vec![0.0; xs.len() * ys.len() * stride];
            let mut p = 0;
            for y in ys.clone() {
                for x in xs.clone() {
                    let mut b = Blender::new(stride - 1);
                    for &k in bin {
                        if b.transmittance() * bound < EXIT_BOUND {
                            break;
                        }
                        let k = k as usize;
                        if let Some(a) = vs.splats[k].alpha_at(x, y) {
                            b.add(a, vs.attrs(k));
                        }
                    }
                    write_pixel(&mut out[p * stride..(p + 1) * stride], &b);
                    p += 1;
                }
            }
            out
        })
        .collect();

    let mut pixels = vec![vec![0.0; h * w * stride]; views.len()];
    for (&(v, t), tile) in jobs.iter().zip(&tiles) {
        let (tx, ty) = (t % tiles_x, t / tiles_x);
        let x0 = tx * TILE_SIZE;
        let tw = ((tx + 1) * TILE_SIZE).min(w) - x0;
        for (row, chunk) in tile.chunks(tw * stride).enumerate() {
            let start = ((ty * TILE_SIZE + row) * w + x0) * stride;
            pixels[v][start..start + chunk.len()].copy_from_slice(chunk);
        }
    }
    assemble(gaussians, rig, pixels)
}

/// Brute-force renderer: every pixel visits every projected Gaussian in
/// depth order, with no tiling and no early exit.
pub fn reference_rasterize(gaussians: &GaussianSet, rig: &CameraRig) -> RenderedViews {
    let (h, w) = (rig.height, rig.width);
    let stride = gaussians.color_channels + gaussians.feature_dim() + 2;
    let pixels: Vec<Vec<f64>> = rig
        .poses
        .par_iter()
        .map(|pose| {
            let vs = prepare_view(gaussians, pose, &rig.intrinsics);
            let mut buf = vec![0.0; h * w * stride];
            for y in 0..h {
                for x in 0..w {
                    let mut b = Blender::new(stride - 1);
                    for (k, s) in vs.splats.iter().enumerate() {
                        if let Some(a) = s.alpha_at(x, y) {
                            b.add(a, vs.attrs(k));
                        }
                    }
                    let p = y * w + x;
                    write_pixel(&mut buf[p * stride..(p + 1) * stride], &b);
                }
            }
            buf
        })
        .collect();
    assemble(gaussians, rig, pixels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::derive_stream;

    #[test]
    fn blender_two_layers() {
        let mut b = Blender::new(1);
        b.add(0.5, &[1.0]);
        b.add(0.5, &[0.0]);
        assert_eq!(b.values()[0], 0.5);
        assert_eq!(b.alpha(), 0.75);
        assert_eq!(b.transmittance(), 0.25);
    }

    #[test]
    fn composite_alpha_telescopes() {
        let mut s = derive_stream(5, 5, 5);
        for _ in 0..1000 {
            let n = s.below(40);
            let alphas: Vec<f64> = (0..n).map(|_| s.uniform()).collect();
            let product: f64 = alphas.iter().map(|a| 1.0 - a).product();
            let acc = composite_alpha(&alphas);
            assert!((acc - (1.0 - product)).abs() < 1e-12);
            assert!((0.0..=1.0).contains(&acc));
        }
    }

    #[test]
    fn footprint_bounds_contain_cutoff_region() {
        let mut s = derive_stream(8, 0, 0);
        let rig = crate::splat::make_views([0.0; 3], 1.0, &crate::splat::RigConfig::default()).unwrap();
        for _ in 0..50 {
            let p = [s.range(-1.0, 1.0), s.range(-1.0, 1.0), s.range(-1.0, 1.0)];
            let g = GaussianSet::new(vec![p], vec![1.0], 1, s.range(0.005, 0.1), 0.9).unwrap();
            let sp = project(&g, 0, &rig.poses[0], &rig.intrinsics).unwrap();
            for y in 0..rig.height {
                for x in 0..rig.width {
                    if sp.alpha_at(x, y).is_some() {
                        let [x0, y0, x1, y1] = sp.bounds;
                        assert!((x0..=x1).contains(&(x as i64)) && (y0..=y1).contains(&(y as i64)));
                    }
                }
            }
        }
    }
}
