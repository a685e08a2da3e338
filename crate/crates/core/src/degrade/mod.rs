//! Multi-style SDR synthesis from linear HDR sources.
//!
//! Eight tone-mapping operators span luminance-dominant and
//! chrominance-dominant distortions; each maps a BT.2020 linear image
//! (nits) to a gamma-2.2 BT.709 image in [0,1]. Procedural HDR patterns
//! and the dataset/manifest machinery live in the submodules.

mod dataset;
mod operators;
mod synth;

pub use dataset::{
    synthesize_dataset, DatasetManifest, ManifestEntry, Split, SynthesisOptions,
};
pub use operators::{DegradationOperator, GamutStrategy};
pub use synth::{make_synthetic_hdr, SynthPattern};
