//! Empirical measures on the sphere and equidistribution diagnostics.

mod accumulator;
mod experiment;
mod harmonics;

pub use accumulator::{cap_area, default_caps, Cap, SphericalAccumulator};
pub use experiment::{
    axis_experiment, character_experiment, hypothesis_flags, orbit_experiment, MAX_EXPERIMENT_CHAR_DEGREE,
};
pub use harmonics::{index as harmonic_index, RealHarmonics, MAX_DEGREE};

/// Default maximum harmonic degree for reports.
pub const DEFAULT_LMAX: usize = 8;
