//! Shared fixtures for the criterion benches.

use dpimpute::simulation::{generate_population, inject_missingness};
use dpimpute::{Dataset, RandomSource, SimConfig};

/// Generator dataset of size `n` with missingness injected, fixed seed.
pub fn fixture(n: usize) -> Dataset {
    let cfg = SimConfig { n, ..Default::default() };
    let mut rng = RandomSource::new(0xBE4C);
    let pop = generate_population(&cfg, &mut rng).expect("valid config");
    inject_missingness(&pop, &mut rng).expect("fresh population")
}
