//! Corruption-robustness benchmarks, Gaussian-splat rendering and heatmap
//! metrics for affordance-labeled point clouds.
//!
//! The crate is organised around four pieces:
//!
//! * [`corrupt`] generates the seven corruption kinds at five severity levels
//!   and writes whole benchmarks (index manifest plus cloud containers).
//! * [`splat`] turns a cloud into isotropic Gaussians and alpha-blends them
//!   into color, depth, alpha and feature images over a ring of cameras, with
//!   a tile rasterizer and a brute-force reference renderer.
//! * [`metrics`] scores per-point heatmaps (AUC, aIoU, SIM, MAE), computes the
//!   feature consistency MSE and aggregates results into tables.
//! * [`io`] reads and writes the on-disk formats.
//!
//! Every stochastic step draws from an [`RngStream`] derived from a
//! `(master_seed, sample_id, corruption_tag)` lineage, so outputs never depend
//! on call order or thread count.

pub mod cloud;
pub mod corrupt;
pub mod io;
pub mod manifest;
pub mod metrics;
pub mod oracle;
pub mod rng;
pub mod selftest;
pub mod splat;
pub mod synthetic;
pub mod vocab;

pub use cloud::{validate_cloud, LabeledCloud, Point3, ValidationReport, Violation};
pub use corrupt::{CorruptionKind, CorruptionSpec, SeverityLevel};
pub use manifest::SampleManifest;
pub use rng::{derive_stream, Lineage, RngStream};
