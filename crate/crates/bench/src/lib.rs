//! Fixtures shared by the benchmarks.

use sqdist::fuzz::trial_instance;
use sqdist::{FuzzConfig, TopologyKind, WeightMode, WeightedTree};

/// A reproducible tree on exactly `n` vertices with `s x s` diagonal
/// weights and no degree-2 vertex, so every closed form applies.
pub fn tree_without_degree_two(n: usize, s: usize) -> WeightedTree {
    let cfg = FuzzConfig {
        trials: 1,
        n_range: (n, n),
        s_range: (s, s),
        weight_mode: WeightMode::Diagonal,
        topology: TopologyKind::NoDeg2,
        seed: 2024,
        ..FuzzConfig::default()
    };
    trial_instance(&cfg, 0).expect("fixture config is valid").tree
}
