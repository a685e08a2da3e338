//! Degradation-aware SDR-to-HDR conversion.
//!
//! The crate is organized around the pipeline stages:
//!
//! - [`color`]: exact transfer-function, gamut, YCbCr and ITP math,
//! - [`image`]: raster containers and file formats,
//! - [`degrade`]: multi-style SDR synthesis from linear HDR sources,
//! - [`mining`]: luma-/chroma-aware negative exemplar construction,
//! - [`nn`]: a small deterministic reverse-mode autodiff engine,
//! - [`encoder`]: the multi-view attribute encoder and fusion block,
//! - [`contrastive`]: the four-term InfoNCE objective and momentum encoder,
//! - [`ddacm`]: the controlled mapping network,
//! - [`train`]: the two-stage optimization loop and checkpointing,
//! - [`eval`]: metrics, reports, and embedding exports.

pub mod color;
pub mod contrastive;
pub mod ddacm;
pub mod degrade;
pub mod encoder;
pub mod error;
pub mod eval;
pub mod image;
pub mod mining;
pub mod nn;
pub mod train;

pub use error::{Error, Result};
