//! Acceptance criteria, one line each:
//!
//! ```text
//! cargo test -p fredholm-cli --test acceptance -- --nocapture
//! ```
//!
//! Everything is exact rational arithmetic, so every tolerance is zero: an
//! identity either holds as an equation between integers or matrices, or
//! the criterion fails.

use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use fredholm_core::{
    build_extensions, chain_defects, fold_to_pair, instance_seed, pair_defects, quotient_chain,
    random_chain, random_matrix, random_pair, verify_remark_2_3, verify_theorem_3_2,
    verify_theorem_3_4, verify_theorem_3_6, verify_theorem_4_2, verify_theorem_4_4, ChainInstance,
    GenConfig, InverseMode, PairInstance, TheoremReport,
};
use serde_json::{json, Value};

const PAIR_COUNT: usize = 500;
const PAIR_MAX_DIM: usize = 8;
const CHAIN_COUNT: usize = 300;
const CHAIN_MAX_DIM: usize = 6;
const CHAIN_MAX_LENGTH: usize = 5;
const RANK_BUDGET: usize = 2;
const ENTRY_BOUND: u32 = 3;
const MATRIX_COUNT: usize = 1000;
const TRANSPORT_COUNT: usize = 200;
const PAIR_SEED: u64 = 0x5eed_0001;
const CHAIN_SEED: u64 = 0x5eed_0002;
const MATRIX_SEED: u64 = 0x5eed_0003;

/// Complex and non-complex instances alternate.
fn pairs() -> Vec<PairInstance> {
    (0..PAIR_COUNT)
        .map(|i| {
            let seed = instance_seed(PAIR_SEED, i as u64);
            let cfg =
                GenConfig::new(seed, PAIR_MAX_DIM, RANK_BUDGET, ENTRY_BOUND, i % 2 == 0).unwrap();
            random_pair(&cfg)
        })
        .collect()
}

fn chains() -> Vec<ChainInstance> {
    (0..CHAIN_COUNT)
        .map(|i| {
            let seed = instance_seed(CHAIN_SEED, i as u64);
            let cfg =
                GenConfig::new(seed, CHAIN_MAX_DIM, RANK_BUDGET, ENTRY_BOUND, i % 2 == 0).unwrap();
            random_chain(&cfg, 1 + i % CHAIN_MAX_LENGTH).unwrap()
        })
        .collect()
}

struct Tally {
    passed: usize,
    total: usize,
    first_failure: Option<String>,
}

impl Tally {
    fn new() -> Self {
        Tally {
            passed: 0,
            total: 0,
            first_failure: None,
        }
    }

    fn record(&mut self, ok: bool, why: impl FnOnce() -> String) {
        self.total += 1;
        if ok {
            self.passed += 1;
        } else if self.first_failure.is_none() {
            self.first_failure = Some(why());
        }
    }

    fn report(&mut self, ok: bool, i: usize, report: &TheoremReport) {
        self.record(ok, || {
            let failing: Vec<_> = report.failures().collect();
            format!("instance {i} {}: {failing:?}", report.name)
        });
    }
}

struct Line {
    criterion: u32,
    title: &'static str,
    ok: bool,
    detail: String,
}

fn line(criterion: u32, title: &'static str, tally: Tally, started: Instant) -> Line {
    let ok = tally.total > 0 && tally.passed == tally.total;
    let mut detail = format!(
        "{}/{} in {:.1}s",
        tally.passed,
        tally.total,
        started.elapsed().as_secs_f64()
    );
    if let Some(f) = tally.first_failure {
        detail.push_str(&format!("; first failure: {f}"));
    }
    Line {
        criterion,
        title,
        ok,
        detail,
    }
}

fn criterion_1(pairs: &[PairInstance]) -> Line {
    let started = Instant::now();
    let mut t = Tally::new();
    for (i, p) in pairs.iter().enumerate() {
        let d = pair_defects(p);
        let (st, ts) = (p.st().rank(), p.ts().rank());
        t.record(
            d.b == st && d.d == ts && d.index == p.dim_x as i64 - p.dim_y as i64,
            || format!("instance {i}: {d:?}, rank ST {st}, rank TS {ts}"),
        );
    }
    line(
        1,
        "defect identities b = dim R(ST), d = dim R(TS), index = dim X - dim Y",
        t,
        started,
    )
}

fn criterion_2(pairs: &[PairInstance]) -> Line {
    let started = Instant::now();
    let mut t = Tally::new();
    for (i, p) in pairs.iter().enumerate() {
        let r = verify_theorem_3_4(p);
        let d = |k: &str| r.get_int(k).unwrap();
        let ok = r.passed
            && d("index_pair") == d("index_s_plus_t_prime")
            && d("index_pair") == -d("index_t_plus_s_prime")
            && d("index_pair") - d("dim_range_ts") + d("dim_range_st") == d("index_quotient_pair");
        t.report(ok, i, &r);
    }
    line(
        2,
        "index equalities for S+T′ and T+S′ with the quotient identity",
        t,
        started,
    )
}

fn criterion_3(pairs: &[PairInstance]) -> Line {
    let started = Instant::now();
    let mut t = Tally::new();
    for (i, p) in pairs.iter().enumerate() {
        let bundle = build_extensions(p, InverseMode::ChainCompatibleMp).unwrap();
        let r = verify_theorem_3_6(p, &bundle).unwrap();
        let d = |k: &str| r.get_int(k).unwrap();
        let ok = r.passed
            && r.checks.len() == 4
            && d("rank_corrector") <= d("rank_budget")
            && d("nullity_quotient_laplacian_x") == d("a")
            && d("nullity_quotient_laplacian_y") == d("c");
        t.report(ok, i, &r);
    }
    line(
        3,
        "V² block diagonal, rank F bounded, quotient Laplacian nullities a and c",
        t,
        started,
    )
}

fn criterion_4(chains: &[ChainInstance]) -> Line {
    let started = Instant::now();
    let mut t = Tally::new();
    for (i, c) in chains.iter().enumerate() {
        let r = verify_remark_2_3(c);
        let index = chain_defects(c).index;
        let ok = r.passed
            && index == pair_defects(&fold_to_pair(c)).index
            && index == c.euler_characteristic();
        t.report(ok, i, &r);
    }
    line(
        4,
        "chain index = folded pair index = Euler characteristic",
        t,
        started,
    )
}

fn criterion_5(chains: &[ChainInstance]) -> Line {
    let started = Instant::now();
    let mut t = Tally::new();
    for (i, c) in chains.iter().enumerate() {
        let r = verify_theorem_4_2(c);
        let d = |k: &str| r.get_int(k).unwrap();
        let ok =
            r.passed && d("index_even") == d("index_chain") && d("index_chain") == -d("index_odd");
        t.report(ok, i, &r);
    }
    line(
        5,
        "index of even and odd sums of δ_p + δ′_{p+1}",
        t,
        started,
    )
}

fn criterion_6(chains: &[ChainInstance]) -> Line {
    let started = Instant::now();
    let mut t = Tally::new();
    for (i, c) in chains.iter().enumerate() {
        let r = verify_theorem_4_4(c);
        let a = chain_defects(c).a;
        let per_degree = (0..=c.top()).all(|p| {
            r.get_int(&format!("nullity_quotient_laplacian_{p}")) == Some(a[p] as i64)
                && r.get_int(&format!("index_quotient_laplacian_{p}")) == Some(0)
        });
        t.report(r.passed && per_degree, i, &r);
    }
    line(
        6,
        "quotient Laplacians: nullity = a_p and index 0 in every degree",
        t,
        started,
    )
}

fn criterion_7(pairs: &[PairInstance], chains: &[ChainInstance]) -> Line {
    let started = Instant::now();
    let mut t = Tally::new();
    for (i, c) in chains.iter().enumerate() {
        let qc = quotient_chain(c);
        let ok = qc.invariants_hold(c) && qc.as_chain().is_complex();
        t.record(ok, || format!("quotient chain of instance {i}"));
    }
    for i in 0..MATRIX_COUNT {
        let seed = instance_seed(MATRIX_SEED, i as u64);
        let cfg = GenConfig::new(seed, 6, 0, ENTRY_BOUND, false).unwrap();
        let rows = (seed % 7) as usize;
        let cols = (seed / 7 % 7) as usize;
        let rank = (seed / 49) as usize % (rows.min(cols) + 1);
        let a = random_matrix(&cfg, rows, cols, rank).unwrap();
        let b = a.pseudoinverse();
        let (ab, ba) = (&a * &b, &b * &a);
        let ok = &ab * &a == a && &ba * &b == b && ab.transpose() == ab && ba.transpose() == ba;
        t.record(ok, || format!("Penrose identities for matrix {i}: {a}"));
    }
    for (i, p) in pairs.iter().take(TRANSPORT_COUNT).enumerate() {
        let r = verify_theorem_3_2(p);
        t.report(r.passed, i, &r);
    }
    line(
        7,
        "quotient chains, Penrose identities, complement transport",
        t,
        started,
    )
}

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

fn cli_json(args: &[&str]) -> (Option<i32>, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_fredholm"))
        .args(args)
        .output()
        .expect("binary runs");
    let value = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (out.status.code(), value)
}

fn named<'a>(reports: &'a Value, name: &str) -> &'a Value {
    reports
        .as_array()
        .and_then(|rs| rs.iter().find(|r| r["name"] == name))
        .unwrap_or(&Value::Null)
}

/// Hand-computed values for the worked pair and chains, compared as JSON.
fn criterion_8() -> Line {
    let started = Instant::now();
    let mut t = Tally::new();
    let w2 = data("w2.json");
    let w2 = w2.to_str().unwrap();
    let mut expect = |what: &str, got: &Value, want: Value| {
        t.record(*got == want, || format!("{what}: got {got}, want {want}"));
    };

    let (code, v) = cli_json(&["pair-report", w2]);
    expect("W2 exit", &json!(code), json!(0));
    expect(
        "W2 defects",
        &v,
        json!({"a":0,"b":0,"c":0,"d":1,"index":1,"dim_range_st":0,"dim_range_ts":1}),
    );
    let (code, v) = cli_json(&["verify", "--thm34", "--thm36", w2]);
    expect("W2 verify exit", &json!(code), json!(0));
    let d34 = &named(&v, "theorem_3_4")["details"];
    expect("W2 ind(S+T′)", &d34["index_s_plus_t_prime"], json!(1));
    expect("W2 ind(T+S′)", &d34["index_t_plus_s_prime"], json!(-1));
    let d36 = &named(&v, "theorem_3_6")["details"];
    expect("W2 V", &d36["v"], json!([[0, 0, 1], [0, 0, 1], [1, 0, 0]]));
    expect(
        "W2 nullity x",
        &d36["nullity_quotient_laplacian_x"],
        json!(0),
    );
    expect(
        "W2 nullity y",
        &d36["nullity_quotient_laplacian_y"],
        json!(0),
    );

    let exact = data("exact_complex.json");
    let (_, v) = cli_json(&["chain-report", exact.to_str().unwrap()]);
    expect("exact complex d", &v["d"], json!([0, 0, 0]));
    expect("exact complex index", &v["index"], json!(0));
    let (code, v) = cli_json(&["verify", "--all", exact.to_str().unwrap()]);
    expect("exact complex exit", &json!(code), json!(0));
    expect(
        "exact complex E",
        &named(&v, "theorem_4_2")["details"]["even"],
        json!([[0, 1], [1, 0]]),
    );
    expect(
        "exact complex nullity L_1",
        &named(&v, "theorem_4_4")["details"]["nullity_laplacian_1"],
        json!(0),
    );

    let zero = data("zero_map.json");
    let (_, v) = cli_json(&["chain-report", zero.to_str().unwrap()]);
    expect("zero map d", &v["d"], json!([1, 1]));
    expect("zero map index", &v["index"], json!(0));

    let bent = data("non_complex.json");
    let (_, v) = cli_json(&["chain-report", bent.to_str().unwrap()]);
    expect("non-complex d", &v["d"], json!([0, -1, 0]));
    expect("non-complex index", &v["index"], json!(1));
    let (code, v) = cli_json(&["verify", "--remark23", bent.to_str().unwrap()]);
    expect("non-complex exit", &json!(code), json!(0));
    expect(
        "non-complex folded index",
        &named(&v, "remark_2_3")["details"]["index_pair"],
        json!(1),
    );
    line(
        8,
        "worked pair and hand-computed chains through the CLI",
        t,
        started,
    )
}

fn criterion_9() -> Line {
    let started = Instant::now();
    let mut t = Tally::new();
    let dir = tempfile::tempdir().unwrap();
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_fredholm"))
            .args(["fuzz", "--seed", "42", "--count", "50"])
            .current_dir(dir.path())
            .output()
            .expect("binary runs")
    };
    let (first, second) = (run(), run());
    t.record(first.status.success(), || "first run did not pass".into());
    t.record(
        first.stdout == second.stdout && !first.stdout.is_empty(),
        || "outputs differ".into(),
    );
    line(
        9,
        "fuzz --seed 42 --count 50 is byte-identical across runs",
        t,
        started,
    )
}

#[test]
fn acceptance() {
    let pairs = pairs();
    let chains = chains();
    let lines = [
        criterion_1(&pairs),
        criterion_2(&pairs),
        criterion_3(&pairs),
        criterion_4(&chains),
        criterion_5(&chains),
        criterion_6(&chains),
        criterion_7(&pairs, &chains),
        criterion_8(),
        criterion_9(),
    ];
    for l in &lines {
        println!(
            "{} criterion {}: {} ({})",
            if l.ok { "PASS" } else { "FAIL" },
            l.criterion,
            l.title,
            l.detail
        );
    }
    let failed: Vec<u32> = lines
        .iter()
        .filter(|l| !l.ok)
        .map(|l| l.criterion)
        .collect();
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
