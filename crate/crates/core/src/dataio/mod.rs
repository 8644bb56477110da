//! Dataset representation, CSV ingestion, zone configuration,
//! preprocessing transforms and per-class Kennard–Stone splitting.

mod csvio;
mod dataset;
mod preprocess;
mod savgol;
mod split;
mod zones;

pub use csvio::{load_csv, read_csv, save_csv, write_csv};
pub use dataset::SpectralDataset;
pub use preprocess::{apply_preprocess, fit_preprocess, PreprocessMethod, PreprocessState, SavgolParams};
pub use savgol::savgol_smooth;
pub use split::{kennard_stone_select, kennard_stone_split};
pub use zones::{load_zone_config, resolve_zones, Zone, ZoneConfig, ZoneIndices};
