//! Fredholm chains `X_0 <- X_1 <- ... <- X_n` with `δ_p: X_p -> X_{p-1}`.
//!
//! Spaces outside `0..=n` are zero and so are the maps touching them. A
//! chain is not required to be a complex; only the quotient chain built by
//! [`quotient_chain`] is guaranteed to satisfy `δ̃_p δ̃_{p+1} = 0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::RatMatrix;
use crate::pair::{
    extensions_from_induced, fredholm_data, induced_pair, pair_defects, relative_defects,
    InverseMode, PairInstance,
};
use crate::report::TheoremReport;
use crate::subspace::{induced_map, QuotientStructure};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainInstance {
    /// `dim X_0, ..., dim X_n`.
    pub dims: Vec<usize>,
    /// `δ_1, ..., δ_n`; `maps[p-1]` has shape `dims[p-1] x dims[p]`.
    pub maps: Vec<RatMatrix>,
}

#[derive(Deserialize)]
struct ChainRepr {
    dims: Vec<usize>,
    maps: Vec<RatMatrix>,
}

impl<'de> Deserialize<'de> for ChainInstance {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = ChainRepr::deserialize(d)?;
        if raw.dims.is_empty() {
            return Err(serde::de::Error::custom("a chain needs at least one space"));
        }
        if raw.maps.len() + 1 != raw.dims.len() {
            return Err(serde::de::Error::custom(format!(
                "{} spaces need {} maps, found {}",
                raw.dims.len(),
                raw.dims.len() - 1,
                raw.maps.len()
            )));
        }
        let maps = raw
            .maps
            .into_iter()
            .enumerate()
            .map(|(i, m)| m.with_shape(raw.dims[i], raw.dims[i + 1], &format!("map {}", i + 1)))
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        Ok(ChainInstance {
            dims: raw.dims,
            maps,
        })
    }
}

impl ChainInstance {
    pub fn new(dims: Vec<usize>, maps: Vec<RatMatrix>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::dim("chain", "a chain needs at least one space"));
        }
        if maps.len() + 1 != dims.len() {
            return Err(Error::dim(
                "chain",
                format!("{} spaces but {} maps", dims.len(), maps.len()),
            ));
        }
        for (i, m) in maps.iter().enumerate() {
            if m.shape() != (dims[i], dims[i + 1]) {
                return Err(Error::dim(
                    "chain",
                    format!(
                        "map {} has shape {:?}, expected ({}, {})",
                        i + 1,
                        m.shape(),
                        dims[i],
                        dims[i + 1]
                    ),
                ));
            }
        }
        Ok(ChainInstance { dims, maps })
    }

    /// Highest degree `n`.
    pub fn top(&self) -> usize {
        self.dims.len() - 1
    }

    /// `dim X_p`, zero outside `0..=n`.
    pub fn dim(&self, p: i64) -> usize {
        usize::try_from(p)
            .ok()
            .and_then(|p| self.dims.get(p).copied())
            .unwrap_or(0)
    }

    /// `δ_p: X_p -> X_{p-1}` for any integer `p`.
    pub fn delta(&self, p: i64) -> RatMatrix {
        if p >= 1 && (p as usize) <= self.maps.len() {
            self.maps[p as usize - 1].clone()
        } else {
            RatMatrix::zeros(self.dim(p - 1), self.dim(p))
        }
    }

    /// `δ_p δ_{p+1}: X_{p+1} -> X_{p-1}`.
    pub fn composite(&self, p: i64) -> RatMatrix {
        &self.delta(p) * &self.delta(p + 1)
    }

    pub fn is_complex(&self) -> bool {
        (1..self.maps.len() as i64).all(|p| self.composite(p).is_zero())
    }

    /// `Σ (-1)^p dim X_p`.
    pub fn euler_characteristic(&self) -> i64 {
        alternating(self.dims.iter().map(|&d| d as i64))
    }
}

fn alternating(values: impl Iterator<Item = i64>) -> i64 {
    values
        .enumerate()
        .map(|(p, v)| if p % 2 == 0 { v } else { -v })
        .sum()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainDefects {
    /// `dim N(δ_p)/(N(δ_p) ∩ R(δ_{p+1}))`.
    pub a: Vec<usize>,
    /// `dim R(δ_{p+1})/(N(δ_p) ∩ R(δ_{p+1}))`.
    pub b: Vec<usize>,
    /// `a_p - b_p`.
    pub d: Vec<i64>,
    pub index: i64,
}

pub fn chain_defects(c: &ChainInstance) -> ChainDefects {
    let (mut a, mut b, mut d) = (Vec::new(), Vec::new(), Vec::new());
    for p in 0..=c.top() as i64 {
        let (ap, bp) = relative_defects(&c.delta(p).kernel_basis(), &c.delta(p + 1).image_basis());
        a.push(ap);
        b.push(bp);
        d.push(ap as i64 - bp as i64);
    }
    let index = alternating(d.iter().copied());
    ChainDefects { a, b, d, index }
}

/// Block positions of each degree inside `⊕_even X_p` and `⊕_odd X_p`,
/// ascending in `p`.
struct FoldLayout {
    offsets: Vec<usize>,
    even_total: usize,
    odd_total: usize,
}

impl FoldLayout {
    fn new(dims: &[usize]) -> Self {
        let (mut even, mut odd) = (0, 0);
        let offsets = dims
            .iter()
            .enumerate()
            .map(|(p, &d)| {
                let slot = if p % 2 == 0 { &mut even } else { &mut odd };
                let at = *slot;
                *slot += d;
                at
            })
            .collect();
        FoldLayout {
            offsets,
            even_total: even,
            odd_total: odd,
        }
    }

    fn total(&self, parity: usize) -> usize {
        if parity == 0 {
            self.even_total
        } else {
            self.odd_total
        }
    }

    /// Operator from the `source_parity` sum to the other one, built from
    /// blocks `(source degree, target degree, matrix)`. Blocks touching
    /// degrees outside the chain must be empty and are skipped.
    fn assemble(&self, source_parity: usize, blocks: &[(i64, i64, RatMatrix)]) -> RatMatrix {
        let mut out = RatMatrix::zeros(self.total(1 - source_parity), self.total(source_parity));
        for (from, to, block) in blocks {
            debug_assert_eq!(from.rem_euclid(2) as usize, source_parity);
            let (Ok(from), Ok(to)) = (usize::try_from(*from), usize::try_from(*to)) else {
                continue;
            };
            if from >= self.offsets.len() || to >= self.offsets.len() {
                continue;
            }
            out.set_block(self.offsets[to], self.offsets[from], block);
        }
        out
    }
}

/// Even degrees become `X`, odd degrees `Y`; `S` collects the even `δ_p`,
/// `T` the odd ones.
pub fn fold_to_pair(c: &ChainInstance) -> PairInstance {
    let layout = FoldLayout::new(&c.dims);
    let degrees = |parity: usize| -> Vec<(i64, i64, RatMatrix)> {
        (0..=c.top() as i64)
            .filter(|p| (*p as usize) % 2 == parity)
            .map(|p| (p, p - 1, c.delta(p)))
            .collect()
    };
    let s = layout.assemble(0, &degrees(0));
    let t = layout.assemble(1, &degrees(1));
    PairInstance::new(s, t).expect("folded blocks conform")
}

pub fn verify_remark_2_3(c: &ChainInstance) -> TheoremReport {
    let mut report = TheoremReport::new("remark_2_3");
    let chain = chain_defects(c);
    let folded = fold_to_pair(c);
    let pair = pair_defects(&folded);
    let sum_parity = |v: &[usize], parity: usize| -> usize {
        v.iter()
            .enumerate()
            .filter(|(p, _)| p % 2 == parity)
            .map(|(_, x)| x)
            .sum()
    };
    let euler = c.euler_characteristic();
    let b_total: usize = chain.b.iter().sum();

    report
        .check("ind(chain) = ind(S,T)", chain.index == pair.index)
        .check("ind(chain) = Euler characteristic", chain.index == euler)
        .check(
            "Σ_p b_p = dim R(ST) + dim R(TS)",
            b_total == pair.dim_range_st + pair.dim_range_ts,
        )
        .check("a = Σ_even a_p", pair.a == sum_parity(&chain.a, 0))
        .check("b = Σ_even b_p", pair.b == sum_parity(&chain.b, 0))
        .check("c = Σ_odd a_p", pair.c == sum_parity(&chain.a, 1))
        .check("d = Σ_odd b_p", pair.d == sum_parity(&chain.b, 1));
    report
        .int("index_chain", chain.index)
        .int("index_pair", pair.index)
        .int("euler_characteristic", euler)
        .int("sum_b", b_total)
        .int("dim_range_st", pair.dim_range_st)
        .int("dim_range_ts", pair.dim_range_ts);
    report
}

/// The complex `𝒳_p = X_p / R(δ_{p+1}δ_{p+2})` with its induced maps and a
/// complex of normalized generalized inverses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientChain {
    /// One per degree `0..=n`.
    pub quotients: Vec<QuotientStructure>,
    /// `δ̃_1, ..., δ̃_n`.
    pub maps_tilde: Vec<RatMatrix>,
    /// `δ̃′_1, ..., δ̃′_n` with `δ̃′_p: 𝒳_{p-1} -> 𝒳_p`.
    pub inverses_tilde: Vec<RatMatrix>,
    /// `δ′_p = σ_p δ̃′_p π_{p-1}: X_{p-1} -> X_p`.
    pub extended_inverses: Vec<RatMatrix>,
}

impl QuotientChain {
    pub fn as_chain(&self) -> ChainInstance {
        ChainInstance::new(
            self.quotients.iter().map(|q| q.quotient_dim).collect(),
            self.maps_tilde.clone(),
        )
        .expect("induced maps conform to quotient dimensions")
    }

    fn top(&self) -> usize {
        self.quotients.len() - 1
    }

    fn quotient_dim(&self, p: i64) -> usize {
        usize::try_from(p)
            .ok()
            .and_then(|p| self.quotients.get(p))
            .map_or(0, |q| q.quotient_dim)
    }

    /// `δ̃_p` for any integer `p`.
    pub fn delta_tilde(&self, p: i64) -> RatMatrix {
        self.pick(&self.maps_tilde, p)
            .unwrap_or_else(|| RatMatrix::zeros(self.quotient_dim(p - 1), self.quotient_dim(p)))
    }

    /// `δ̃′_p` for any integer `p`.
    pub fn inverse_tilde(&self, p: i64) -> RatMatrix {
        self.pick(&self.inverses_tilde, p)
            .unwrap_or_else(|| RatMatrix::zeros(self.quotient_dim(p), self.quotient_dim(p - 1)))
    }

    /// `δ′_p` for any integer `p`, given the original dimensions.
    pub fn inverse(&self, c: &ChainInstance, p: i64) -> RatMatrix {
        self.pick(&self.extended_inverses, p)
            .unwrap_or_else(|| RatMatrix::zeros(c.dim(p), c.dim(p - 1)))
    }

    fn pick(&self, list: &[RatMatrix], p: i64) -> Option<RatMatrix> {
        (p >= 1 && (p as usize) <= list.len()).then(|| list[p as usize - 1].clone())
    }

    /// Complex property of `δ̃` and `δ̃′`, normalization, and vanishing of
    /// `δ′_p` on `R(δ_p δ_{p+1})`.
    pub fn invariants_hold(&self, c: &ChainInstance) -> bool {
        let n = self.top() as i64;
        (1..=n).all(|p| {
            let dt = self.delta_tilde(p);
            let it = self.inverse_tilde(p);
            let complex = (&dt * &self.delta_tilde(p + 1)).is_zero()
                && (&self.inverse_tilde(p + 1) * &it).is_zero();
            let vanishes = {
                let killed = c.composite(p).image_basis();
                (&self.inverse(c, p) * &killed.basis().transpose()).is_zero()
            };
            complex && dt.is_normalized_inverse(&it) && vanishes
        })
    }
}

pub fn quotient_chain(c: &ChainInstance) -> QuotientChain {
    let n = c.top() as i64;
    let quotients: Vec<QuotientStructure> = (0..=n)
        .map(|p| {
            let killed = c.composite(p + 1).image_basis();
            QuotientStructure::new(c.dim(p), &killed).expect("killed subspace lives in X_p")
        })
        .collect();
    let mut maps_tilde = Vec::new();
    let mut inverses_tilde = Vec::new();
    let mut extended_inverses = Vec::new();
    for p in 1..=n as usize {
        // δ_p(R(δ_{p+1}δ_{p+2})) ⊆ R(δ_p δ_{p+1}).
        let dt = induced_map(&c.maps[p - 1], &quotients[p], &quotients[p - 1])
            .expect("δ_p preserves the killed subspaces");
        let it = dt.pseudoinverse();
        let ext = &(&quotients[p].section * &it) * &quotients[p - 1].projection;
        maps_tilde.push(dt);
        inverses_tilde.push(it);
        extended_inverses.push(ext);
    }
    let qc = QuotientChain {
        quotients,
        maps_tilde,
        inverses_tilde,
        extended_inverses,
    };
    assert!(
        qc.invariants_hold(c),
        "quotient chain invariants failed; this is a bug"
    );
    qc
}

/// `E = ⊕_even (δ_p + δ′_{p+1})` and `O = ⊕_odd (δ_p + δ′_{p+1})` in the
/// folded coordinates.
pub fn parity_operators(c: &ChainInstance, qc: &QuotientChain) -> (RatMatrix, RatMatrix) {
    let layout = FoldLayout::new(&c.dims);
    let blocks = |parity: usize| -> Vec<(i64, i64, RatMatrix)> {
        (0..=c.top() as i64)
            .filter(|p| (*p as usize) % 2 == parity)
            .flat_map(|p| [(p, p - 1, c.delta(p)), (p, p + 1, qc.inverse(c, p + 1))])
            .collect()
    };
    (
        layout.assemble(0, &blocks(0)),
        layout.assemble(1, &blocks(1)),
    )
}

pub fn verify_theorem_4_2(c: &ChainInstance) -> TheoremReport {
    let mut report = TheoremReport::new("theorem_4_2");
    let chain = chain_defects(c);
    let qc = quotient_chain(c);
    let (even, odd) = parity_operators(c, &qc);
    let fe = fredholm_data(&even);
    let fo = fredholm_data(&odd);

    let folded = fold_to_pair(c);
    let induced = induced_pair(&folded);
    let bundle = extensions_from_induced(&induced, InverseMode::ChainCompatibleMp)
        .expect("pseudoinverses are generalized inverses");
    let quotient_folded = fold_to_pair(&qc.as_chain());

    report
        .check("ind(chain) = ind E", chain.index == fe.index)
        .check("ind(chain) = -ind O", chain.index == -fo.index)
        .check(
            "E = S + T′ of the folded pair",
            even == &folded.s + &bundle.t_prime,
        )
        .check(
            "O = T + S′ of the folded pair",
            odd == &folded.t + &bundle.s_prime,
        )
        .check(
            "folded quotient chain = induced folded pair",
            quotient_folded.s == induced.s_tilde && quotient_folded.t == induced.t_tilde,
        );
    report
        .int("index_chain", chain.index)
        .int("index_even", fe.index)
        .int("index_odd", fo.index)
        .int("nullity_even", fe.nullity)
        .int("corank_even", fe.corank)
        .int("nullity_odd", fo.nullity)
        .int("corank_odd", fo.corank)
        .matrix("even", even)
        .matrix("odd", odd);
    report
}

pub fn verify_theorem_4_4(c: &ChainInstance) -> TheoremReport {
    let mut report = TheoremReport::new("theorem_4_4");
    let chain = chain_defects(c);
    let qc = quotient_chain(c);
    let complex = c.is_complex();
    for p in 0..=c.top() as i64 {
        let laplacian =
            &(&c.delta(p + 1) * &qc.inverse(c, p + 1)) + &(&qc.inverse(c, p) * &c.delta(p));
        let quotient_laplacian = &(&qc.delta_tilde(p + 1) * &qc.inverse_tilde(p + 1))
            + &(&qc.inverse_tilde(p) * &qc.delta_tilde(p));
        let q = &qc.quotients[p as usize];
        let lifted = &(&q.section * &quotient_laplacian) * &q.projection;
        let perturbation = (&laplacian - &lifted).rank();
        let budget = c.composite(p + 1).rank() + c.composite(p).rank();

        let fl = fredholm_data(&laplacian);
        let fq = fredholm_data(&quotient_laplacian);
        let a_p = chain.a[p as usize];
        report
            .check(format!("nullity(L~_{p}) = a_{p}"), fq.nullity == a_p)
            .check(format!("ind(L~_{p}) = 0"), fq.index == 0)
            .check(
                format!(
                    "rank(L_{p} - lift L~_{p}) <= dim R(δ_{}δ_{}) + dim R(δ_{p}δ_{})",
                    p + 1,
                    p + 2,
                    p + 1
                ),
                perturbation <= budget,
            );
        if complex {
            report.check(
                format!("nullity(L_{p}) = a_{p} on a complex"),
                fl.nullity == a_p,
            );
        }
        report
            .int(format!("a_{p}"), a_p)
            .int(format!("nullity_laplacian_{p}"), fl.nullity)
            .int(format!("corank_laplacian_{p}"), fl.corank)
            .int(format!("index_laplacian_{p}"), fl.index)
            .int(format!("nullity_quotient_laplacian_{p}"), fq.nullity)
            .int(format!("corank_quotient_laplacian_{p}"), fq.corank)
            .int(format!("index_quotient_laplacian_{p}"), fq.index)
            .int(format!("rank_perturbation_{p}"), perturbation);
    }
    report
}
