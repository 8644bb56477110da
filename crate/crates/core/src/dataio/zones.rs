use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::SpectralDataset;
use crate::error::{Result, SmxError};

/// One named spectral interval, inclusive at both ends.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Zone {
    pub name: String,
    pub start: f64,
    pub end: f64,
    pub plausible: bool,
}

/// Ordered list of zones. Serialized as a bare JSON array.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ZoneConfig {
    pub zones: Vec<Zone>,
}

/// Column indices captured by each zone, in config order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZoneIndices {
    pub name: String,
    pub indices: Vec<usize>,
}

impl ZoneConfig {
    pub fn new(zones: Vec<Zone>) -> Result<Self> {
        let cfg = ZoneConfig { zones };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks names, bounds and pairwise overlap. Zones that only touch
    /// (one ends where the next starts) are allowed.
    pub fn validate(&self) -> Result<()> {
        if self.zones.is_empty() {
            return Err(SmxError::Config("zone config is empty".into()));
        }
        let mut names = HashSet::new();
        for z in &self.zones {
            if !(z.start.is_finite() && z.end.is_finite() && z.start < z.end) {
                return Err(SmxError::Config(format!(
                    "zone '{}' needs start < end (got {} .. {})",
                    z.name, z.start, z.end
                )));
            }
            if !names.insert(z.name.as_str()) {
                return Err(SmxError::Config(format!("duplicate zone name '{}'", z.name)));
            }
        }
        let mut sorted: Vec<&Zone> = self.zones.iter().collect();
        sorted.sort_by(|a, b| a.start.total_cmp(&b.start));
        for w in sorted.windows(2) {
            if w[1].start < w[0].end {
                return Err(SmxError::Config(format!(
                    "zones '{}' and '{}' overlap",
                    w[0].name, w[1].name
                )));
            }
        }
        Ok(())
    }

    pub fn names(&self) -> Vec<String> {
        self.zones.iter().map(|z| z.name.clone()).collect()
    }

    pub fn get(&self, name: &str) -> Option<&Zone> {
        self.zones.iter().find(|z| z.name == name)
    }

    pub fn plausible_names(&self) -> HashSet<String> {
        self.zones
            .iter()
            .filter(|z| z.plausible)
            .map(|z| z.name.clone())
            .collect()
    }
}

pub fn load_zone_config(path: impl AsRef<Path>) -> Result<ZoneConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| SmxError::io(path, e))?;
    let cfg: ZoneConfig = serde_json::from_str(&text)?;
    cfg.validate()?;
    Ok(cfg)
}

/// Maps each zone to `{ j : start <= axis[j] <= end }`.
///
/// An axis value sitting exactly on a boundary shared by two touching zones
/// belongs to the zone listed first in the config, so index sets stay
/// disjoint.
pub fn resolve_zones(cfg: &ZoneConfig, ds: &SpectralDataset) -> Result<Vec<ZoneIndices>> {
    cfg.validate()?;
    let mut taken = vec![false; ds.axis.len()];
    let mut out = Vec::with_capacity(cfg.zones.len());
    for z in &cfg.zones {
        let indices: Vec<usize> = ds
            .axis
            .iter()
            .enumerate()
            .filter(|&(j, &a)| z.start <= a && a <= z.end && !taken[j])
            .map(|(j, _)| j)
            .collect();
        if indices.len() < 2 {
            return Err(SmxError::Config(format!(
                "zone '{}' captures {} axis point(s); at least 2 required",
                z.name,
                indices.len()
            )));
        }
        for &j in &indices {
            taken[j] = true;
        }
        out.push(ZoneIndices {
            name: z.name.clone(),
            indices,
        });
    }
    Ok(out)
}
