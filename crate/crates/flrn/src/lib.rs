//! Files, experiment drivers and the `flrn` command line on top of
//! [`flrn_core`].

pub mod cli;
mod error;
pub mod eval;
pub mod io;
pub mod manifest;
pub mod svg;

pub use error::{AppError, AppResult};

/// Seed used by every command when `--seed` is not given.
pub const DEFAULT_SEED: u64 = 20_240_901;

#[cfg(test)]
mod tests {
    #[test]
    fn default_seed_matches_generator_default() {
        assert_eq!(super::DEFAULT_SEED, flrn_core::synth::SynthConfig::default().seed);
    }
}
