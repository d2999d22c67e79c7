//! Seeded random pairs and chains with bounded composition ranks.
//!
//! The stream is SplitMix64 (Steele, Lea & Flood), whose output is fixed by
//! its constants and therefore identical on every platform. Per-instance
//! seeds for batch runs come from [`instance_seed`], so instance `i` of a run
//! can be regenerated on its own.

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;
use serde::Serialize;

use crate::chain::ChainInstance;
use crate::error::{Error, Result};
use crate::matrix::RatMatrix;
use crate::pair::{composition_ranges, PairInstance};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GenConfig {
    pub seed: u64,
    pub max_dim: usize,
    /// Upper bound for `dim R(ST)`, `dim R(TS)` and `dim R(δ_p δ_{p+1})`.
    pub rank_budget: usize,
    /// Numerators come from `[-entry_bound, entry_bound]`, denominators from
    /// `[1, entry_bound]`.
    pub entry_bound: u32,
    pub complex_only: bool,
}

impl GenConfig {
    pub fn new(
        seed: u64,
        max_dim: usize,
        rank_budget: usize,
        entry_bound: u32,
        complex_only: bool,
    ) -> Result<Self> {
        if max_dim == 0 {
            return Err(Error::Precondition("max_dim must be at least 1".into()));
        }
        if rank_budget > max_dim {
            return Err(Error::Precondition(format!(
                "rank_budget {rank_budget} exceeds max_dim {max_dim}"
            )));
        }
        if entry_bound == 0 {
            return Err(Error::Precondition("entry_bound must be positive".into()));
        }
        Ok(GenConfig {
            seed,
            max_dim,
            rank_budget,
            entry_bound,
            complex_only,
        })
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        GenConfig {
            seed,
            ..self.clone()
        }
    }
}

/// Seed of instance `ordinal` in a run started from `seed`: the
/// `(ordinal + 1)`-th SplitMix64 output for that seed.
pub fn instance_seed(seed: u64, ordinal: u64) -> u64 {
    let mut z = seed.wrapping_add(ordinal.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub struct Generator {
    cfg: GenConfig,
    rng: SplitMix64,
}

impl Generator {
    pub fn new(cfg: &GenConfig) -> Self {
        Generator {
            cfg: cfg.clone(),
            rng: SplitMix64::seed_from_u64(cfg.seed),
        }
    }

    fn below_or_equal(&mut self, hi: usize) -> usize {
        self.rng.random_range(0..=hi as u64) as usize
    }

    fn entry(&mut self) -> Rational {
        let bound = i64::from(self.cfg.entry_bound);
        let num = self.rng.random_range(-bound..=bound);
        let den = self.rng.random_range(1..=bound);
        Rational::new(BigInt::from(num), BigInt::from(den))
    }

    fn dense(&mut self, rows: usize, cols: usize) -> RatMatrix {
        RatMatrix::from_fn(rows, cols, |_, _| self.entry())
    }

    fn full_rank(&mut self, rows: usize, cols: usize) -> RatMatrix {
        loop {
            let m = self.dense(rows, cols);
            if m.rank() == rows.min(cols) {
                return m;
            }
        }
    }

    /// A `rows x cols` matrix of exactly the requested rank, built as a
    /// product of full-rank factors.
    pub fn matrix(&mut self, rows: usize, cols: usize, rank: usize) -> Result<RatMatrix> {
        if rank > rows.min(cols) {
            return Err(Error::Precondition(format!(
                "rank {rank} is infeasible for a {rows}x{cols} matrix"
            )));
        }
        if rank == 0 {
            return Ok(RatMatrix::zeros(rows, cols));
        }
        let left = self.full_rank(rows, rank);
        let right = self.full_rank(rank, cols);
        let m = &left * &right;
        debug_assert_eq!(m.rank(), rank);
        Ok(m)
    }

    fn any_rank(&mut self, rows: usize, cols: usize) -> RatMatrix {
        let rank = self.below_or_equal(rows.min(cols));
        self.matrix(rows, cols, rank).expect("rank within bounds")
    }

    /// Splits a random leak of at most `rank_budget` between two
    /// perturbations, each capped by `cap`.
    fn leak(&mut self, cap: usize) -> (usize, usize) {
        if self.cfg.complex_only {
            return (0, 0);
        }
        let total = self.below_or_equal(self.cfg.rank_budget);
        let first = self.below_or_equal(total);
        (first.min(cap), (total - first).min(cap))
    }

    /// A pair whose composition ranks stay within the budget: a complex
    /// `(S₀, T₀)` with `S₀` factoring through `N(T₀)` and the left kernel of
    /// `T₀`, plus low-rank perturbations of both maps.
    pub fn pair(&mut self) -> PairInstance {
        let dim_x = self.below_or_equal(self.cfg.max_dim);
        let dim_y = self.below_or_equal(self.cfg.max_dim);
        let t0 = self.any_rank(dim_x, dim_y);
        let kernel_t = t0.kernel_basis().basis().transpose();
        let cokernel_t = t0.transpose().kernel_basis().basis().clone();
        let middle = self.any_rank(kernel_t.cols(), cokernel_t.rows());
        let s0 = &(&kernel_t * &middle) * &cokernel_t;

        let (leak_s, leak_t) = self.leak(dim_x.min(dim_y));
        let s = &s0 + &self.matrix(dim_y, dim_x, leak_s).expect("capped");
        let t = &t0 + &self.matrix(dim_x, dim_y, leak_t).expect("capped");
        let p = PairInstance::new(s, t).expect("shapes by construction");

        let (st, ts) = composition_ranges(&p);
        assert!(
            st <= self.cfg.rank_budget && ts <= self.cfg.rank_budget,
            "generated pair exceeds its rank budget"
        );
        assert!(!self.cfg.complex_only || p.is_complex());
        p
    }

    /// A chain with `length` maps. Each `δ_p` is a map into `N(δ_{p-1})`
    /// plus a perturbation of rank at most the budget.
    pub fn chain(&mut self, length: usize) -> Result<ChainInstance> {
        if length == 0 {
            return Err(Error::Precondition(
                "chain length must be at least 1".into(),
            ));
        }
        let dims: Vec<usize> = (0..=length)
            .map(|_| self.below_or_equal(self.cfg.max_dim))
            .collect();
        let mut maps: Vec<RatMatrix> = vec![self.any_rank(dims[0], dims[1])];
        for p in 2..=length {
            let previous = maps.last().expect("at least one map");
            let kernel = previous.kernel_basis().basis().transpose();
            let inner = self.any_rank(kernel.cols(), dims[p]);
            let leak = if self.cfg.complex_only {
                0
            } else {
                self.below_or_equal(self.cfg.rank_budget)
                    .min(dims[p - 1].min(dims[p]))
            };
            let perturbation = self.matrix(dims[p - 1], dims[p], leak).expect("capped");
            maps.push(&(&kernel * &inner) + &perturbation);
        }
        let c = ChainInstance::new(dims, maps).expect("shapes by construction");
        for p in 1..length as i64 {
            assert!(
                c.composite(p).rank() <= self.cfg.rank_budget,
                "generated chain exceeds its rank budget"
            );
        }
        assert!(!self.cfg.complex_only || c.is_complex());
        Ok(c)
    }
}

pub fn random_matrix(cfg: &GenConfig, rows: usize, cols: usize, rank: usize) -> Result<RatMatrix> {
    Generator::new(cfg).matrix(rows, cols, rank)
}

pub fn random_pair(cfg: &GenConfig) -> PairInstance {
    Generator::new(cfg).pair()
}

pub fn random_chain(cfg: &GenConfig, length: usize) -> Result<ChainInstance> {
    Generator::new(cfg).chain(length)
}
