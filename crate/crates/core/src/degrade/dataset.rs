//! Dataset synthesis: render every HDR source through every operator and
//! record the results in a JSON manifest.

use super::operators::DegradationOperator;
use crate::error::{Error, Result};
use crate::image::{self, LinearImage};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

/// Train/test membership of a manifest entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train,
    Test,
}

/// One HDR source and its SDR renditions.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub hdr_path: PathBuf,
    /// Operator id -> rendered SDR path.
    pub sdr_paths: BTreeMap<String, PathBuf>,
    pub split: Split,
}

/// Index of a synthesized dataset.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub seed: u64,
    pub operators: Vec<String>,
    pub entries: Vec<ManifestEntry>,
    /// Per-file errors encountered during synthesis (run continues).
    pub errors: Vec<String>,
}

impl DatasetManifest {
    pub fn save(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self)?;
        std::fs::write(path, json)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Data(format!("cannot read manifest {}: {e}", path.display())))?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn entries_for_split(&self, split: Split) -> impl Iterator<Item = &ManifestEntry> {
        self.entries.iter().filter(move |e| e.split == split)
    }
}

/// Knobs for [`synthesize_dataset`].
#[derive(Debug, Clone)]
pub struct SynthesisOptions {
    /// Grid-crop tile size; 0 keeps sources whole.
    pub crop: usize,
    pub seed: u64,
    /// Every n-th entry goes to the test split (0 = everything trains).
    pub test_every: usize,
}

impl Default for SynthesisOptions {
    fn default() -> Self {
        SynthesisOptions {
            crop: 0,
            seed: 0,
            test_every: 4,
        }
    }
}

/// Renders every HDR source in `hdr_dir` (planar f32 raw + sidecar) through
/// every operator, writing 16-bit SDR PNGs and a manifest under `out_dir`.
///
/// Unreadable sources are recorded in `manifest.errors` and skipped; an
/// empty source directory or an empty operator list is fatal. Re-running
/// with the same inputs and seed is byte-identical.
pub fn synthesize_dataset(
    hdr_dir: &Path,
    operators: &[DegradationOperator],
    out_dir: &Path,
    options: &SynthesisOptions,
) -> Result<DatasetManifest> {
    if operators.is_empty() {
        return Err(Error::Config("operator list is empty".into()));
    }
    let mut sources: Vec<PathBuf> = std::fs::read_dir(hdr_dir)
        .map_err(|e| Error::Data(format!("cannot read {}: {e}", hdr_dir.display())))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().map(|e| e == "f32").unwrap_or(false))
        .collect();
    sources.sort();
    if sources.is_empty() {
        return Err(Error::Data(format!(
            "no .f32 HDR sources found in {}",
            hdr_dir.display()
        )));
    }

    std::fs::create_dir_all(out_dir.join("sdr"))?;
    std::fs::create_dir_all(out_dir.join("hdr"))?;

    let mut errors = Vec::new();
    let mut tiles: Vec<(String, LinearImage)> = Vec::new();
    for src in &sources {
        let stem = src
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "src".into());
        match image::read_linear_raw(src) {
            Ok((img, _)) => {
                for (tile_id, tile) in grid_crops(&stem, &img, options.crop) {
                    tiles.push((tile_id, tile));
                }
            }
            Err(e) => errors.push(format!("{}: {e}", src.display())),
        }
    }
    if tiles.is_empty() {
        return Err(Error::Data("no decodable HDR sources".into()));
    }

    // Per-tile rendering is independent; write SDRs in parallel, then
    // assemble the manifest single-writer in tile order.
    let rendered: Vec<Result<ManifestEntry>> = tiles
        .par_iter()
        .enumerate()
        .map(|(idx, (tile_id, tile))| -> Result<ManifestEntry> {
            let hdr_path = out_dir.join("hdr").join(format!("{tile_id}.f32"));
            image::write_linear_raw(&hdr_path, tile, tile.max_nits() as f64)?;
            let mut sdr_paths = BTreeMap::new();
            for op in operators {
                let sdr = op.apply(tile)?;
                let sdr_path = out_dir.join("sdr").join(format!("{tile_id}__{}.png", op.id));
                image::write_png16(&sdr_path, &sdr)?;
                sdr_paths.insert(op.id.clone(), sdr_path);
            }
            let split = if options.test_every > 0 && (idx + 1) % options.test_every == 0 {
                Split::Test
            } else {
                Split::Train
            };
            Ok(ManifestEntry {
                id: tile_id.clone(),
                hdr_path,
                sdr_paths,
                split,
            })
        })
        .collect();

    let mut entries = Vec::new();
    for r in rendered {
        match r {
            Ok(e) => entries.push(e),
            Err(e) => errors.push(e.to_string()),
        }
    }

    let manifest = DatasetManifest {
        seed: options.seed,
        operators: operators.iter().map(|o| o.id.clone()).collect(),
        entries,
        errors,
    };
    manifest.save(&out_dir.join("manifest.json"))?;
    Ok(manifest)
}

/// Deterministic top-left-anchored grid crops; crop = 0 keeps the image whole.
fn grid_crops(stem: &str, img: &LinearImage, crop: usize) -> Vec<(String, LinearImage)> {
    if crop == 0 || (img.height() == crop && img.width() == crop) {
        return vec![(stem.to_string(), img.clone())];
    }
    let rows = img.height() / crop;
    let cols = img.width() / crop;
    if rows == 0 || cols == 0 {
        return vec![(stem.to_string(), img.clone())];
    }
    let mut out = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            let tile = img
                .pixels
                .slice(ndarray::s![
                    r * crop..(r + 1) * crop,
                    c * crop..(c + 1) * crop,
                    ..
                ])
                .to_owned();
            out.push((
                format!("{stem}_r{r}c{c}"),
                LinearImage {
                    pixels: tile,
                    primaries: img.primaries,
                },
            ));
        }
    }
    out
}
