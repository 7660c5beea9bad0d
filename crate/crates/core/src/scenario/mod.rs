//! Experiment files, the shared packet/transport pipeline and artifact
//! output with a hashed manifest.

pub mod config;
pub mod manifest;
pub mod pipeline;
pub mod run;

pub use config::{ExperimentConfig, ScenarioKind};
pub use manifest::{sha256_hex, ArtifactWriter, Manifest, ManifestEntry};
pub use pipeline::{profile_width, run_front, run_transport, FrontOutcome, PacketSetup, PacketSummary, TransportOutcome};
pub use run::{random_field, run_scenario, RunOutcome};
