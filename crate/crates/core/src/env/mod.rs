//! Space-air-ground scheduling environment: device motion and energy,
//! per-GS observations, feasibility projection and the utility-minus-cost
//! reward.
//!
//! The link model (SNR falling off as a power of distance), the coverage
//! rule (elevation mask), CubeSat link energy and solar charging are
//! declared models; each lives behind one function and is configurable.
//! The cost term multiplies energy use by the spread of residual energies,
//! so it vanishes whenever the covered devices hold equal charge.

mod config;
mod link;
mod metrics;
mod presets;
mod sim;
mod state;

pub use config::{CubeSatConfig, GroundStationConfig, LinkConfig, ScenarioConfig, UavConfig};
pub use link::{capacity_limit, data_rate, link_energy, quality, quality_from_rate, rate_from_snr, snr};
pub use metrics::StepMetricsWriter;
pub use presets::{preset, PRESET_NAMES};
pub use sim::{Environment, StepOutcome, GS_FEATURES, SLOT_FEATURES};
pub use state::{
    CubeSatState, DeviceKind, DeviceRef, GsObservation, LinkTerms, RewardBreakdown, SaginState,
    ScheduleAction, StepMetrics, UavState,
};
