//! Raster primitives used by the segmentation stages.

mod filter;
mod grid;
mod label;
mod morph;
mod stats;

pub use filter::{gaussian_kernel, hessian, masked_gaussian, Hessian};
pub use grid::Grid;
pub use label::{label_components, largest_component, Connectivity, Labeling};
pub use morph::{boundary_distance, thin};
pub use stats::{mean_std, percentile};
