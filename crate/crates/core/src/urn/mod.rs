//! The competing-urns model and exact computation of its laws.

mod conditional;
mod interval;
mod model;
mod occupancy;
pub mod oracle;
pub mod random;
mod tail;
mod xy;

pub use conditional::{conditional_xy_law, ConditioningEvent};
pub use interval::{interval_urn_measure, Binning, IntervalSpec, ThresholdSpec};
pub use model::{weight, Assignment, ModelFile, UrnModel};
pub(crate) use occupancy::{run_dp, window_cap};
pub use occupancy::{
    occupancy_law, occupancy_table, occupancy_table_capped, p_window, p_window_sequence,
    window_joint_sequence, window_prob, OccupancySpec, OccupancyTable, Windows, DEFAULT_MAX_STATES,
};
pub use oracle::{assignment_law_oracle, oracle_pushforward};
pub use tail::{tail_event_prob, IncreasingFamily};
pub use xy::{JointXYLaw, XYLawFile};
