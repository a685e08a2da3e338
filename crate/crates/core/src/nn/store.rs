//! Named parameter storage.
//!
//! A [`ParamStore`] owns every learnable array of a model. Shadow copies
//! (EMA weights, momentum encoder) are plain clones: ids stay valid across
//! clones because registration order defines them.

use crate::error::{Error, Result};
use ndarray::ArrayD;
use std::collections::HashMap;

/// Stable handle to one parameter array.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ParamId(pub(crate) usize);

impl ParamId {
    pub fn index(&self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone)]
pub struct ParamEntry {
    pub name: String,
    pub value: ArrayD<f64>,
}

/// Ordered, named collection of parameter arrays.
#[derive(Debug, Clone, Default)]
pub struct ParamStore {
    entries: Vec<ParamEntry>,
    by_name: HashMap<String, ParamId>,
}

impl ParamStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers a new array under a unique name.
    ///
    /// Panics on duplicates: parameter layout is a construction-time
    /// contract, not runtime input.
    pub fn register(&mut self, name: &str, value: ArrayD<f64>) -> ParamId {
        assert!(
            !self.by_name.contains_key(name),
            "duplicate parameter name '{name}'"
        );
        let id = ParamId(self.entries.len());
        self.entries.push(ParamEntry {
            name: name.to_string(),
            value,
        });
        self.by_name.insert(name.to_string(), id);
        id
    }

    pub fn id(&self, name: &str) -> Option<ParamId> {
        self.by_name.get(name).copied()
    }

    pub fn get(&self, id: ParamId) -> &ArrayD<f64> {
        &self.entries[id.0].value
    }

    pub fn get_mut(&mut self, id: ParamId) -> &mut ArrayD<f64> {
        &mut self.entries[id.0].value
    }

    pub fn name(&self, id: ParamId) -> &str {
        &self.entries[id.0].name
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (ParamId, &ParamEntry)> {
        self.entries.iter().enumerate().map(|(i, e)| (ParamId(i), e))
    }

    /// Total scalar count across all parameters.
    pub fn num_scalars(&self) -> usize {
        self.entries.iter().map(|e| e.value.len()).sum()
    }

    /// `self <- decay * self + (1 - decay) * other`, parameterwise.
    ///
    /// Shapes and layout must match (shadow stores are clones of the live
    /// store, so they always do unless callers mix models).
    pub fn lerp_toward(&mut self, other: &ParamStore, decay: f64) -> Result<()> {
        if self.entries.len() != other.entries.len() {
            return Err(Error::Shape(format!(
                "parameter stores differ in length: {} vs {}",
                self.entries.len(),
                other.entries.len()
            )));
        }
        for (mine, theirs) in self.entries.iter_mut().zip(&other.entries) {
            if mine.value.shape() != theirs.value.shape() {
                return Err(Error::Shape(format!(
                    "parameter '{}' shape mismatch: {:?} vs {:?}",
                    mine.name,
                    mine.value.shape(),
                    theirs.value.shape()
                )));
            }
            mine.value.zip_mut_with(&theirs.value, |a, &b| {
                *a = decay * *a + (1.0 - decay) * b;
            });
        }
        Ok(())
    }

    /// Copies all values from another store with the same layout.
    pub fn copy_from(&mut self, other: &ParamStore) -> Result<()> {
        self.lerp_toward(other, 0.0)
    }

    /// Order-stable FNV-1a hash over the exact bit patterns of a subset of
    /// parameters (or all of them). Used to assert "untouched" contracts.
    pub fn checksum(&self, ids: Option<&[ParamId]>) -> u64 {
        let mut hash: u64 = 0xcbf29ce484222325;
        let mut absorb = |v: f64| {
            for byte in v.to_bits().to_le_bytes() {
                hash ^= byte as u64;
                hash = hash.wrapping_mul(0x100000001b3);
            }
        };
        match ids {
            Some(ids) => {
                for id in ids {
                    self.entries[id.0].value.iter().copied().for_each(&mut absorb);
                }
            }
            None => {
                for e in &self.entries {
                    e.value.iter().copied().for_each(&mut absorb);
                }
            }
        }
        hash
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::IxDyn;

    #[test]
    fn register_and_lookup() {
        let mut ps = ParamStore::new();
        let a = ps.register("w", ArrayD::zeros(IxDyn(&[2, 3])));
        assert_eq!(ps.id("w"), Some(a));
        assert_eq!(ps.get(a).shape(), &[2, 3]);
        assert_eq!(ps.num_scalars(), 6);
    }

    #[test]
    fn lerp_matches_scalar_formula() {
        let mut live = ParamStore::new();
        let mut shadow = ParamStore::new();
        live.register("w", ArrayD::from_elem(IxDyn(&[1]), 1.0));
        shadow.register("w", ArrayD::from_elem(IxDyn(&[1]), 0.0));
        shadow.lerp_toward(&live, 0.999).unwrap();
        let v = shadow.get(ParamId(0))[[0]];
        assert!((v - 0.001).abs() < 1e-15);

        // decay 1 leaves shadow unchanged; decay 0 copies live
        shadow.lerp_toward(&live, 1.0).unwrap();
        assert!((shadow.get(ParamId(0))[[0]] - 0.001).abs() < 1e-15);
        shadow.lerp_toward(&live, 0.0).unwrap();
        assert_eq!(shadow.get(ParamId(0))[[0]], 1.0);
    }

    #[test]
    fn checksum_tracks_bits() {
        let mut ps = ParamStore::new();
        let id = ps.register("w", ArrayD::from_elem(IxDyn(&[2]), 0.5));
        let before = ps.checksum(None);
        assert_eq!(before, ps.checksum(None));
        ps.get_mut(id)[[0]] = 0.5000000001;
        assert_ne!(before, ps.checksum(None));
    }
}
