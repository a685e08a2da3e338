//! Luma-/chroma-aware negative exemplar mining.
//!
//! For an anchor rendition and the other renditions of the same source,
//! candidates are ranked by mean L1 distance in luma or chroma; the most
//! dissimilar ones are composed into attribute-isolated negatives by
//! swapping exactly one attribute in YCbCr:
//! - luminance negative: candidate luma + anchor chroma,
//! - chrominance negative: anchor luma + candidate chroma.
//!
//! The swap happens in YCbCr before conversion back to RGB, so the
//! untouched attribute planes equal the anchor's bit-exactly in the
//! YCbCr form; the RGB form is clamped to gamut afterwards.

use crate::degrade::DatasetManifest;
use crate::error::{Error, Result};
use crate::image::{self, EncodedImage, YCbCrImage};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

/// An anchor rendition plus the candidate pool it is mined against.
#[derive(Debug, Clone)]
pub struct AnchorGroup {
    pub reference: EncodedImage,
    /// Other degradations of the same source; excludes the reference.
    pub candidates: Vec<EncodedImage>,
    pub k_l: usize,
    pub k_c: usize,
}

/// Which candidate produced a negative, and at what distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub candidate: usize,
    pub distance: f64,
}

/// Composed negatives for one anchor.
#[derive(Debug, Clone)]
pub struct NegativeBank {
    /// Luminance negatives (candidate luma, anchor chroma), RGB form.
    pub n_l: Vec<EncodedImage>,
    /// Chrominance negatives (anchor luma, candidate chroma), RGB form.
    pub n_c: Vec<EncodedImage>,
    /// The same negatives in YCbCr, prior to RGB conversion. The anchor's
    /// untouched planes are bit-exact here.
    pub n_l_ycc: Vec<YCbCrImage>,
    pub n_c_ycc: Vec<YCbCrImage>,
    pub provenance_l: Vec<Provenance>,
    pub provenance_c: Vec<Provenance>,
}

impl NegativeBank {
    pub fn is_empty(&self) -> bool {
        self.n_l.is_empty() && self.n_c.is_empty()
    }
}

/// Mean absolute luma distance and mean absolute chroma distance
/// (averaged over both chroma planes). Symmetric, nonnegative, and
/// resolution-independent thanks to the mean reduction.
pub fn attribute_distances(reference: &YCbCrImage, candidate: &YCbCrImage) -> Result<(f64, f64)> {
    if !reference.same_shape(candidate) {
        return Err(Error::Shape(format!(
            "attribute_distances: {:?} vs {:?}",
            reference.y.shape(),
            candidate.y.shape()
        )));
    }
    let n = reference.y.len() as f64;
    let d_l: f64 = reference
        .y
        .iter()
        .zip(candidate.y.iter())
        .map(|(a, b)| (*a as f64 - *b as f64).abs())
        .sum::<f64>()
        / n;
    let d_cb: f64 = reference
        .cb
        .iter()
        .zip(candidate.cb.iter())
        .map(|(a, b)| (*a as f64 - *b as f64).abs())
        .sum::<f64>();
    let d_cr: f64 = reference
        .cr
        .iter()
        .zip(candidate.cr.iter())
        .map(|(a, b)| (*a as f64 - *b as f64).abs())
        .sum::<f64>();
    let d_c = (d_cb + d_cr) / (2.0 * n);
    Ok((d_l, d_c))
}

/// Indices of the top-k most dissimilar candidates, largest distance
/// first, ties broken by ascending candidate index.
fn top_k_dissimilar(distances: &[f64], k: usize) -> Vec<Provenance> {
    let mut order: Vec<usize> = (0..distances.len()).collect();
    order.sort_by(|&a, &b| {
        distances[b]
            .partial_cmp(&distances[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    order
        .into_iter()
        .take(k)
        .map(|candidate| Provenance {
            candidate,
            distance: distances[candidate],
        })
        .collect()
}

/// Runs the mining step for one anchor group.
///
/// Selection is by descending attribute distance; k larger than the pool
/// takes the whole pool. Each selected candidate contributes one composed
/// negative per attribute list.
pub fn mine_negatives(group: &AnchorGroup) -> Result<NegativeBank> {
    let ref_ycc = image::rgb_to_ycbcr(&group.reference);
    let mut cand_ycc = Vec::with_capacity(group.candidates.len());
    let mut d_l = Vec::with_capacity(group.candidates.len());
    let mut d_c = Vec::with_capacity(group.candidates.len());
    for cand in &group.candidates {
        if cand.height() != group.reference.height() || cand.width() != group.reference.width() {
            return Err(Error::Shape(
                "anchor group images must share one size".into(),
            ));
        }
        let ycc = image::rgb_to_ycbcr(cand);
        let (dl, dc) = attribute_distances(&ref_ycc, &ycc)?;
        d_l.push(dl);
        d_c.push(dc);
        cand_ycc.push(ycc);
    }

    let provenance_l = top_k_dissimilar(&d_l, group.k_l);
    let provenance_c = top_k_dissimilar(&d_c, group.k_c);

    let mut n_l = Vec::with_capacity(provenance_l.len());
    let mut n_l_ycc = Vec::with_capacity(provenance_l.len());
    for p in &provenance_l {
        let composed = YCbCrImage {
            y: cand_ycc[p.candidate].y.clone(),
            cb: ref_ycc.cb.clone(),
            cr: ref_ycc.cr.clone(),
        };
        n_l.push(image::ycbcr_to_rgb(&composed, group.reference.encoding)?);
        n_l_ycc.push(composed);
    }
    let mut n_c = Vec::with_capacity(provenance_c.len());
    let mut n_c_ycc = Vec::with_capacity(provenance_c.len());
    for p in &provenance_c {
        let composed = YCbCrImage {
            y: ref_ycc.y.clone(),
            cb: cand_ycc[p.candidate].cb.clone(),
            cr: cand_ycc[p.candidate].cr.clone(),
        };
        n_c.push(image::ycbcr_to_rgb(&composed, group.reference.encoding)?);
        n_c_ycc.push(composed);
    }

    Ok(NegativeBank {
        n_l,
        n_c,
        n_l_ycc,
        n_c_ycc,
        provenance_l,
        provenance_c,
    })
}

/// Mines a bank for every (entry, operator) anchor in the manifest.
///
/// Keys are `"<entry id>/<operator id>"`. Entries with fewer than two
/// renditions are skipped with a warning.
pub fn build_bank_for_batch(
    manifest: &DatasetManifest,
    k_l: usize,
    k_c: usize,
) -> Result<BTreeMap<String, NegativeBank>> {
    let mut jobs = Vec::new();
    for entry in &manifest.entries {
        if entry.sdr_paths.len() < 2 {
            log::warn!(
                "entry {} has a single degradation; skipped for mining",
                entry.id
            );
            continue;
        }
        let loaded: Vec<(String, EncodedImage)> = entry
            .sdr_paths
            .iter()
            .map(|(op, path)| {
                image::read_png16(path, crate::color::ColorEncoding::sdr())
                    .map(|img| (op.clone(), img))
            })
            .collect::<Result<_>>()?;
        for (i, (op, anchor)) in loaded.iter().enumerate() {
            let candidates: Vec<EncodedImage> = loaded
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, (_, img))| img.clone())
                .collect();
            jobs.push((
                format!("{}/{}", entry.id, op),
                AnchorGroup {
                    reference: anchor.clone(),
                    candidates,
                    k_l,
                    k_c,
                },
            ));
        }
    }
    let banks: Vec<(String, Result<NegativeBank>)> = jobs
        .par_iter()
        .map(|(key, group)| (key.clone(), mine_negatives(group)))
        .collect();
    let mut out = BTreeMap::new();
    for (key, bank) in banks {
        out.insert(key, bank?);
    }
    Ok(out)
}

/// Writes a bank's composed negatives (16-bit PNG) and provenance (JSON)
/// under `dir/<sanitized key>/`.
pub fn write_bank_cache(dir: &Path, key: &str, bank: &NegativeBank) -> Result<()> {
    let sub = dir.join(key.replace('/', "__"));
    std::fs::create_dir_all(&sub)?;
    for (i, img) in bank.n_l.iter().enumerate() {
        image::write_png16(&sub.join(format!("neg_luma_{i}.png")), img)?;
    }
    for (i, img) in bank.n_c.iter().enumerate() {
        image::write_png16(&sub.join(format!("neg_chroma_{i}.png")), img)?;
    }
    #[derive(Serialize)]
    struct ProvenanceFile<'a> {
        luma: &'a [Provenance],
        chroma: &'a [Provenance],
    }
    let json = serde_json::to_string_pretty(&ProvenanceFile {
        luma: &bank.provenance_l,
        chroma: &bank.provenance_c,
    })?;
    std::fs::write(sub.join("provenance.json"), json)?;
    Ok(())
}
