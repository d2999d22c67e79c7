//! Fixed workloads shared by the benchmarks.

use fredholm_core::{random_chain, random_pair, ChainInstance, GenConfig, PairInstance};

pub fn pairs(count: u64, max_dim: usize) -> Vec<PairInstance> {
    (0..count)
        .map(|seed| {
            let cfg = GenConfig::new(seed, max_dim, 2.min(max_dim), 4, seed % 2 == 0)
                .expect("valid config");
            random_pair(&cfg)
        })
        .collect()
}

pub fn chains(count: u64, max_dim: usize, length: usize) -> Vec<ChainInstance> {
    (0..count)
        .map(|seed| {
            let cfg =
                GenConfig::new(seed, max_dim, 2.min(max_dim), 4, false).expect("valid config");
            random_chain(&cfg, length).expect("length >= 1")
        })
        .collect()
}
