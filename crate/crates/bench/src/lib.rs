//! Shared fixtures for the benchmarks.

use metriplectic::presets;
use metriplectic::systems::System;
use metriplectic::{Prng, State};

/// Every preset with one sampled admissible state.
pub fn fixtures() -> Vec<(&'static str, System, State)> {
    presets::NAMES
        .iter()
        .map(|&name| {
            let sys = presets::preset(name).expect("preset builds");
            let x = sys.sample(&mut Prng::new(1));
            (name, sys, x)
        })
        .collect()
}
