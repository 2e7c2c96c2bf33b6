//! Point-based Gaussian splatting of labeled clouds.
//!
//! Every point becomes an isotropic Gaussian with the point as its mean.
//! Views are rendered front to back with alpha blending:
//!
//! ```text
//! C(v) = Σᵢ cᵢ αᵢ Πⱼ<ᵢ (1 − αⱼ),   αᵢ = o · G²ᴰᵢ(v)
//! ```
//!
//! and the same sum with view-space depth `dᵢ` or a feature vector `fᵢ` in
//! place of `cᵢ` gives depth and feature images.

mod camera;
mod colormap;
mod raster;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cloud::{validate_cloud, LabeledCloud, Point3, ValidationReport};

pub use camera::{make_views, rig_for_cloud, CameraRig, Intrinsics, Pose, RigConfig};
pub use colormap::{colormap_depth, DepthColormap, DepthImages, TURBO, VALID_ALPHA};
pub use raster::{
    composite_alpha, project, rasterize, reference_rasterize, Blender, Splat, CUTOFF, DILATION,
    EXIT_BOUND, NEAR_PLANE, TILE_SIZE,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SplatError {
    #[error("invalid render config: {0}")]
    InvalidConfig(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error(transparent)]
    InvalidCloud(#[from] ValidationReport),
}

/// Dense `views × channels × height × width` array, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ViewStack {
    pub views: usize,
    pub channels: usize,
    pub height: usize,
    pub width: usize,
    pub data: Vec<f64>,
}

impl ViewStack {
    pub fn zeros(views: usize, channels: usize, height: usize, width: usize) -> Self {
        Self {
            views,
            channels,
            height,
            width,
            data: vec![0.0; views * channels * height * width],
        }
    }

    pub fn shape(&self) -> [usize; 4] {
        [self.views, self.channels, self.height, self.width]
    }

    fn plane_range(&self, view: usize, channel: usize) -> std::ops::Range<usize> {
        assert!(view < self.views && channel < self.channels);
        let n = self.height * self.width;
        let start = (view * self.channels + channel) * n;
        start..start + n
    }

    pub fn plane(&self, view: usize, channel: usize) -> &[f64] {
        &self.data[self.plane_range(view, channel)]
    }

    pub fn plane_mut(&mut self, view: usize, channel: usize) -> &mut [f64] {
        let r = self.plane_range(view, channel);
        &mut self.data[r]
    }

    /// All channels of one view, `channels × height × width`.
    pub fn view(&self, view: usize) -> &[f64] {
        let n = self.channels * self.height * self.width;
        &self.data[view * n..(view + 1) * n]
    }

    pub fn get(&self, view: usize, channel: usize, y: usize, x: usize) -> f64 {
        self.plane(view, channel)[y * self.width + x]
    }

    /// Largest absolute elementwise difference; `None` on shape mismatch.
    pub fn max_abs_diff(&self, other: &ViewStack) -> Option<f64> {
        (self.shape() == other.shape()).then(|| {
            self.data
                .iter()
                .zip(&other.data)
                .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
        })
    }
}

/// Isotropic Gaussians sharing one scale and one opacity.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianSet {
    pub means: Vec<Point3>,
    /// World-space standard deviation; the covariance is `iso_scale²·I`.
    pub iso_scale: f64,
    pub opacity: f64,
    /// `len × color_channels`, row-major.
    pub colors: Vec<f64>,
    pub color_channels: usize,
    /// Optional `len × D` features, row-major.
    pub features: Option<Vec<f64>>,
    feature_dim: usize,
}

impl GaussianSet {
    pub fn new(
        means: Vec<Point3>,
        colors: Vec<f64>,
        color_channels: usize,
        iso_scale: f64,
        opacity: f64,
    ) -> Result<Self, SplatError> {
        if !(iso_scale > 0.0 && iso_scale.is_finite()) {
            return Err(SplatError::InvalidConfig(format!("iso scale must be positive, got {iso_scale}")));
        }
        if !(opacity > 0.0 && opacity <= 1.0) {
            return Err(SplatError::InvalidConfig(format!("opacity must be in (0, 1], got {opacity}")));
        }
        if color_channels == 0 || colors.len() != means.len() * color_channels {
            return Err(SplatError::DimensionMismatch(format!(
                "{} colors for {} Gaussians with {} channels",
                colors.len(),
                means.len(),
                color_channels
            )));
        }
        Ok(Self {
            means,
            iso_scale,
            opacity,
            colors,
            color_channels,
            features: None,
            feature_dim: 0,
        })
    }

    /// Attaches `len × dim` features.
    pub fn with_features(mut self, features: Vec<f64>, dim: usize) -> Result<Self, SplatError> {
        if dim == 0 || features.len() != self.len() * dim {
            return Err(SplatError::DimensionMismatch(format!(
                "{} feature values for {} Gaussians of dimension {}",
                features.len(),
                self.len(),
                dim
            )));
        }
        self.features = Some(features);
        self.feature_dim = dim;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.means.len()
    }

    pub fn is_empty(&self) -> bool {
        self.means.is_empty()
    }

    pub fn feature_dim(&self) -> usize {
        self.feature_dim
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ColorMode {
    /// Color is the point's affordance label.
    Affordance,
    Constant(f64),
    /// `1 − distance to centroid / max distance`.
    DepthShaded,
}

/// One Gaussian per point, colored per `mode`.
pub fn init_gaussians(
    cloud: &LabeledCloud,
    iso_scale: f64,
    opacity: f64,
    mode: ColorMode,
) -> Result<GaussianSet, SplatError> {
    let report = validate_cloud(cloud);
    if !report.is_ok() {
        return Err(SplatError::InvalidCloud(report));
    }
    let colors = match mode {
        ColorMode::Affordance => cloud.labels.clone(),
        ColorMode::Constant(c) => vec![c; cloud.n_points()],
        ColorMode::DepthShaded => {
            let center = cloud.centroid().unwrap_or([0.0; 3]);
            let r = cloud.radius_about(&center);
            cloud
                .points
                .iter()
                .map(|p| {
                    if r > 0.0 {
                        1.0 - crate::cloud::dist2(p, &center).sqrt() / r
                    } else {
                        1.0
                    }
                })
                .collect()
        }
    };
    GaussianSet::new(cloud.points.clone(), colors, 1, iso_scale, opacity)
}

/// Rendered images. Background is 0 in every channel; `alpha` tells empty
/// pixels from covered ones.
#[derive(Clone, Debug, PartialEq)]
pub struct RenderedViews {
    pub color: ViewStack,
    /// Alpha-blended view-space depth of the Gaussian means.
    pub depth: ViewStack,
    pub alpha: ViewStack,
    pub feature: Option<ViewStack>,
}

impl RenderedViews {
    pub fn empty(views: usize, color_channels: usize, feature_dim: Option<usize>, h: usize, w: usize) -> Self {
        Self {
            color: ViewStack::zeros(views, color_channels, h, w),
            depth: ViewStack::zeros(views, 1, h, w),
            alpha: ViewStack::zeros(views, 1, h, w),
            feature: feature_dim.map(|d| ViewStack::zeros(views, d, h, w)),
        }
    }

    /// Largest absolute difference over all channels; `None` on shape
    /// mismatch.
    pub fn max_abs_diff(&self, other: &RenderedViews) -> Option<f64> {
        let mut m = self.color.max_abs_diff(&other.color)?;
        m = m.max(self.depth.max_abs_diff(&other.depth)?);
        m = m.max(self.alpha.max_abs_diff(&other.alpha)?);
        match (&self.feature, &other.feature) {
            (None, None) => {}
            (Some(a), Some(b)) => m = m.max(a.max_abs_diff(b)?),
            _ => return None,
        }
        Some(m)
    }
}

/// Rig layout plus Gaussian parameters. Defaults: 12 views at 112×112 on
/// two rings at ±30°, iso scale 0.02, opacity 0.9.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RenderConfig {
    pub rig: RigConfig,
    pub iso_scale: f64,
    pub opacity: f64,
}

impl Default for RenderConfig {
    fn default() -> Self {
        Self {
            rig: RigConfig::default(),
            iso_scale: 0.02,
            opacity: 0.9,
        }
    }
}

/// Builds Gaussians with `mode` colors and renders them on the cloud's rig.
pub fn render_cloud(cloud: &LabeledCloud, config: &RenderConfig, mode: ColorMode) -> Result<RenderedViews, SplatError> {
    let g = init_gaussians(cloud, config.iso_scale, config.opacity, mode)?;
    let rig = rig_for_cloud(cloud, &config.rig)?;
    Ok(rasterize(&g, &rig))
}

/// 2D affordance masks: the color channel of an affordance-colored render,
/// `V×1×H×W`.
pub fn render_affordance_masks(
    cloud: &LabeledCloud,
    rig: &CameraRig,
    iso_scale: f64,
    opacity: f64,
) -> Result<ViewStack, SplatError> {
    let g = init_gaussians(cloud, iso_scale, opacity, ColorMode::Affordance)?;
    Ok(rasterize(&g, rig).color)
}

/// Splats `N × dim` per-point features into `V×dim×H×W` images.
pub fn splat_features(
    cloud: &LabeledCloud,
    features: &[f64],
    dim: usize,
    rig: &CameraRig,
    iso_scale: f64,
    opacity: f64,
) -> Result<ViewStack, SplatError> {
    let g = init_gaussians(cloud, iso_scale, opacity, ColorMode::Constant(0.0))?
        .with_features(features.to_vec(), dim)?;
    Ok(rasterize(&g, rig).feature.expect("features attached"))
}
