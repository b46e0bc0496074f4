//! Monte Carlo transport: problem description, analog tracking, and the
//! step-by-step driver shared with the importance-sampled engine.

mod analog;
mod config;
mod driver;
mod sampling;
mod tally;

pub use analog::{AnalogEngine, Particle};
pub use config::{Mode, ProblemConfig, Source};
pub use driver::{run, HistoryTally, ShellProfile, StatusCounts, TallyResult, Transport, MAX_EVENTS};
pub use sampling::{
    attenuate_weight, sample_collision_distance, sample_lambert_incoming, scatter_direction, uniform,
};
pub use tally::{decayed_length, shell_volume, tally_track_length};

use crate::error::Result;
use crate::real::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    InFlight,
    /// Weight fell below the cutoff.
    AbsorbedCutoff,
    /// Reached the inner sphere (the scored target).
    ExitedInner,
    ExitedOuter,
    /// Still alive at the end of the run.
    Census,
}

/// Analog run of `cfg`.
pub fn run_analog<T: Real>(cfg: &ProblemConfig<T>) -> Result<TallyResult<T>> {
    let mut engine = AnalogEngine::new(cfg)?;
    run(cfg, &mut engine)
}
