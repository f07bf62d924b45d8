//! Scenario configuration, pipeline dispatch and artifact emission.

mod artifacts;
mod config;
mod run;

pub use artifacts::{field_table, fmt_float, ArtifactWriter, Check, CsvTable, RunManifest, Stage, ARTIFACT_VERSION, MANIFEST_NAME};
pub use config::{
    parse_config, CarlemanSection, CoefficientSection, CostSection, DriftSection, GridSection, HumSection, NashSection,
    NonlinearitySection, RegionsSection, Scenario, ScenarioConfig,
};
pub use run::{run_scenario, Command, CHARACTERIZATION_TOL, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_OK, H_RATIO_LIMIT, SLOPE_BAND};
