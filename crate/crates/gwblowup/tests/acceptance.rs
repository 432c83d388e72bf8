//! End-to-end acceptance checks, one test per criterion. Each prints a single
//! `ACCEPTANCE <k>: PASS` / `FAIL` line (run with `--nocapture` to see them
//! for passing tests).

use std::time::{Duration, Instant};

use gwblowup::cache;
use gwblowup::cremona::{enumerativity, EnumStatus};
use gwblowup::engine::{Engine, EngineConfig, PivotRule};
use gwblowup::lattice::{canonicalize, BigCount, CanonResult, CurveClass};
use gwblowup::relations::{verify_relations, PerturbedSource};

fn cc(d: i64, alpha: &[i64]) -> CurveClass {
    CurveClass::new(d, alpha.to_vec())
}

fn big(text: &str) -> BigCount {
    text.parse().unwrap()
}

fn check(k: u32, result: Result<(), String>) {
    match result {
        Ok(()) => println!("ACCEPTANCE {k}: PASS"),
        Err(msg) => {
            println!("ACCEPTANCE {k}: FAIL ({msg})");
            panic!("acceptance criterion {k} failed: {msg}");
        }
    }
}

fn expect_values(engine: &Engine, rows: &[(i64, &[i64], &str)]) -> Result<(), String> {
    for &(d, alpha, want) in rows {
        let got = engine
            .invariant(&cc(d, alpha))
            .map_err(|e| format!("({d}, {alpha:?}): {e}"))?;
        if got != big(want) {
            return Err(format!("({d}, {alpha:?}): got {got}, want {want}"));
        }
    }
    Ok(())
}

fn within(start: Instant, budget: Duration) -> Result<(), String> {
    let elapsed = start.elapsed();
    if elapsed <= budget {
        Ok(())
    } else {
        Err(format!("took {elapsed:?}, budget {budget:?}"))
    }
}

#[test]
fn criterion_1_plane_degrees_up_to_seven() {
    let start = Instant::now();
    let engine = Engine::default();
    let rows: [(i64, &[i64], &str); 7] = [
        (1, &[], "1"),
        (2, &[], "1"),
        (3, &[], "12"),
        (4, &[], "620"),
        (5, &[], "87304"),
        (6, &[], "26312976"),
        (7, &[], "14616808192"),
    ];
    check(1, expect_values(&engine, &rows).and_then(|()| within(start, Duration::from_secs(1))));
}

#[test]
fn criterion_2_table_one() {
    let start = Instant::now();
    let engine = Engine::default();
    let rows: [(i64, &[i64], &str); 21] = [
        (1, &[], "1"),
        (2, &[], "1"),
        (3, &[], "12"),
        (3, &[2], "1"),
        (4, &[], "620"),
        (4, &[2], "96"),
        (4, &[2, 2], "12"),
        (4, &[2, 2, 2], "1"),
        (4, &[3], "1"),
        (5, &[], "87304"),
        (5, &[2], "18132"),
        (5, &[2, 2], "3510"),
        (5, &[2, 2, 2], "620"),
        (5, &[2, 2, 2, 2], "96"),
        (5, &[2, 2, 2, 2, 2], "12"),
        (5, &[2, 2, 2, 2, 2, 2], "1"),
        (5, &[3], "640"),
        (5, &[3, 2], "96"),
        (5, &[3, 2, 2], "12"),
        (5, &[3, 2, 2, 2], "1"),
        (5, &[4], "1"),
    ];
    check(2, expect_values(&engine, &rows).and_then(|()| within(start, Duration::from_secs(5))));
}

#[test]
fn criterion_3_table_two() {
    let start = Instant::now();
    let engine = Engine::default();
    let rows: [(i64, &[i64], &str); 36] = [
        (6, &[], "26312976"),
        (6, &[2], "6506400"),
        (6, &[2, 2], "1558272"),
        (6, &[2, 2, 2], "359640"),
        (6, &[2, 2, 2, 2], "79416"),
        (6, &[2, 2, 2, 2, 2], "16608"),
        (6, &[2, 2, 2, 2, 2, 2], "3240"),
        (6, &[2, 2, 2, 2, 2, 2, 2], "576"),
        (6, &[2, 2, 2, 2, 2, 2, 2, 2], "90"),
        (6, &[3], "401172"),
        (6, &[3, 2], "87544"),
        (6, &[4], "3840"),
        (7, &[], "14616808192"),
        (7, &[2], "4059366000"),
        (7, &[2, 2], "1108152240"),
        (7, &[2, 2, 2], "296849546"),
        (7, &[2, 2, 2, 2], "77866800"),
        (7, &[2, 2, 2, 2, 2], "19948176"),
        (7, &[2, 2, 2, 2, 2, 2], "4974460"),
        (7, &[2, 2, 2, 2, 2, 2, 2], "1202355"),
        (7, &[2, 2, 2, 2, 2, 2, 2, 2], "280128"),
        (7, &[2, 2, 2, 2, 2, 2, 2, 2, 2], "62450"),
        (7, &[2, 2, 2, 2, 2, 2, 2, 2, 2, 2], "13188"),
        (7, &[3], "347987200"),
        (7, &[3, 2], "90777600"),
        (7, &[3, 2, 2], "23133696"),
        (7, &[3, 2, 2, 2], "5739856"),
        (7, &[3, 2, 2, 2, 2], "1380648"),
        (7, &[3, 2, 2, 2, 2, 2], "320160"),
        (7, &[3, 2, 2, 2, 2, 2, 2], "71040"),
        (7, &[3, 2, 2, 2, 2, 2, 2, 2], "14928"),
        (7, &[3, 2, 2, 2, 2, 2, 2, 2, 2], "2928"),
        (7, &[3, 3], "6508640"),
        (7, &[4], "7492040"),
        (7, &[4, 2], "1763415"),
        (7, &[5], "21504"),
    ];
    check(3, expect_values(&engine, &rows).and_then(|()| within(start, Duration::from_secs(120))));
}

#[test]
fn criterion_4_high_degree_targets() {
    let start = Instant::now();
    let engine = Engine::default();
    let rows: [(i64, &[i64], &str); 4] = [
        (10, &[4, 4, 3, 3, 3, 3, 3, 3, 3], "520"),
        (10, &[5, 3, 3, 3, 3, 3, 3, 3, 3], "90"),
        (11, &[5, 3, 3, 3, 3, 3, 3, 3, 3, 3], "707328"),
        (11, &[4, 4, 3, 3, 3, 3, 3, 3, 3, 3], "2350228"),
    ];
    check(4, expect_values(&engine, &rows).and_then(|()| within(start, Duration::from_secs(600))));
}

#[test]
fn criterion_5_relations_and_fault_injection() {
    let result = (|| {
        let engine = Engine::default();
        for r in 0..=3usize {
            let report = verify_relations(r, 3, 8, &engine).map_err(|e| e.to_string())?;
            if !report.all_zero() {
                return Err(format!("r={r}: {report}"));
            }
            if report.instances == 0 {
                return Err(format!("r={r}: nothing checked"));
            }
        }
        let target = match canonicalize(&cc(3, &[])) {
            CanonResult::Key(k) => k,
            CanonResult::KnownValue(_) => unreachable!(),
        };
        let bad = PerturbedSource::new(&engine, target, BigCount::from(1));
        let report = verify_relations(0, 3, 8, &bad).map_err(|e| e.to_string())?;
        if report.all_zero() {
            return Err("perturbed source produced no nonzero residual".into());
        }
        Ok(())
    })();
    check(5, result);
}

/// Canonical keys (d, descending entries >= 2) with d <= d_max, at most r_max
/// entries, and non-negative expected dimension.
fn canonical_keys(d_max: i64, r_max: usize) -> Vec<CurveClass> {
    fn extend(d: i64, budget: i64, max_entry: i64, left: usize, cur: &mut Vec<i64>, out: &mut Vec<CurveClass>) {
        out.push(CurveClass::new(d, cur.clone()));
        if left == 0 {
            return;
        }
        for a in 2..=max_entry.min(budget) {
            cur.push(a);
            extend(d, budget - a, a, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    for d in 1..=d_max {
        let mut cur = Vec::new();
        extend(d, 3 * d - 1, 3 * d - 1, r_max, &mut cur, &mut out);
    }
    out
}

#[test]
fn criterion_6_property_suites() {
    let result = (|| {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(20260824);
        let engine = Engine::default();
        // Appending a 0, or a 1 when the expected dimension stays
        // non-negative, never changes the invariant.
        let mut done = 0;
        while done < 200 {
            let d = rng.gen_range(1..=6i64);
            let r = rng.gen_range(0..=5usize);
            let alpha: Vec<i64> = (0..r).map(|_| rng.gen_range(0..=d)).collect();
            let c = CurveClass::new(d, alpha.clone());
            if gwblowup::lattice::expected_dim(&c) < 0 {
                continue;
            }
            let base = engine.invariant(&c).map_err(|e| e.to_string())?;
            let mut padded = alpha.clone();
            padded.push(0);
            let with_zero = engine
                .invariant(&CurveClass::new(d, padded))
                .map_err(|e| e.to_string())?;
            if with_zero != base {
                return Err(format!("append-0 changed ({d}, {alpha:?})"));
            }
            if gwblowup::lattice::expected_dim(&c) > 0 {
                let mut padded = alpha.clone();
                padded.push(1);
                let with_one = engine
                    .invariant(&CurveClass::new(d, padded))
                    .map_err(|e| e.to_string())?;
                if with_one != base {
                    return Err(format!("append-1 changed ({d}, {alpha:?})"));
                }
            }
            done += 1;
        }
        // Cremona invariance on random admissible classes.
        let mut done = 0;
        while done < 100 {
            let d = rng.gen_range(1..=8i64);
            let r = rng.gen_range(3..=6usize);
            let alpha: Vec<i64> = (0..r).map(|_| rng.gen_range(0..=d)).collect();
            let c = CurveClass::new(d, alpha);
            let t = gwblowup::cremona::cremona_transform(&c, 0, 1, 2);
            if gwblowup::lattice::expected_dim(&c) < 0
                || t.d <= 0
                || t.alpha.iter().any(|&a| a < 0)
            {
                continue;
            }
            let before = engine.invariant(&c).map_err(|e| e.to_string())?;
            let after = engine.invariant(&t).map_err(|e| e.to_string())?;
            if before != after {
                return Err(format!("Cremona changed {c}: {before} vs {after}"));
            }
            done += 1;
        }
        // Pivot-rule and shortcut determinism over all canonical keys.
        let configs = [
            EngineConfig { use_vanishing_shortcuts: true, pivot_rule: PivotRule::LargestEntry },
            EngineConfig { use_vanishing_shortcuts: true, pivot_rule: PivotRule::FirstEntry },
            EngineConfig { use_vanishing_shortcuts: false, pivot_rule: PivotRule::LargestEntry },
            EngineConfig { use_vanishing_shortcuts: false, pivot_rule: PivotRule::FirstEntry },
        ];
        let engines: Vec<Engine> = configs.iter().map(|&cfg| Engine::new(cfg)).collect();
        for key in canonical_keys(6, 6) {
            let reference = engines[0].invariant(&key).map_err(|e| e.to_string())?;
            for e in &engines[1..] {
                let v = e.invariant(&key).map_err(|e| e.to_string())?;
                if v != reference {
                    return Err(format!("configs disagree on {key}: {reference} vs {v}"));
                }
            }
            if reference < BigCount::from(0) {
                return Err(format!("negative invariant for {key}"));
            }
        }
        Ok(())
    })();
    check(6, result);
}

/// Partitions of 3d − 1 into parts >= 3, descending.
fn deep_classes(d: i64) -> Vec<Vec<i64>> {
    fn extend(budget: i64, max_entry: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if budget == 0 {
            out.push(cur.clone());
            return;
        }
        for a in 3..=max_entry.min(budget) {
            if budget - a != 0 && budget - a < 3 {
                continue;
            }
            cur.push(a);
            extend(budget - a, a, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    let mut cur = Vec::new();
    extend(3 * d - 1, 3 * d - 1, &mut cur, &mut out);
    out
}

#[test]
fn criterion_7_enumerativity() {
    let result = (|| {
        for d in 1..=10i64 {
            for alpha in deep_classes(d) {
                let c = CurveClass::new(d, alpha);
                if let EnumStatus::Unknown = enumerativity(&c) {
                    return Err(format!("{c} unexpectedly Unknown"));
                }
            }
        }
        for alpha in [vec![5, 3, 3, 3, 3, 3, 3, 3, 3, 3], vec![4, 4, 3, 3, 3, 3, 3, 3, 3, 3]] {
            let c = CurveClass::new(11, alpha);
            if enumerativity(&c) != EnumStatus::Unknown {
                return Err(format!("{c} should be Unknown"));
            }
        }
        Ok(())
    })();
    check(7, result);
}

#[test]
fn criterion_8_cache_round_trip() {
    let result = (|| {
        let table: Vec<(i64, Vec<i64>)> = canonical_keys(5, 6)
            .into_iter()
            .map(|c| (c.d, c.alpha))
            .collect();
        let cold = Engine::default();
        let cold_values: Vec<BigCount> = table
            .iter()
            .map(|(d, a)| cold.invariant(&cc(*d, a)).unwrap())
            .collect();
        let mut bytes1 = Vec::new();
        cache::save(cold.store(), &mut bytes1).map_err(|e| e.to_string())?;
        let loaded = cache::load(&bytes1[..]).map_err(|e| e.to_string())?;
        let warm = Engine::with_store(loaded, EngineConfig::default());
        let warm_values: Vec<BigCount> = table
            .iter()
            .map(|(d, a)| warm.invariant(&cc(*d, a)).unwrap())
            .collect();
        if warm_values != cold_values {
            return Err("warm cache changed a value".into());
        }
        let mut bytes2 = Vec::new();
        cache::save(warm.store(), &mut bytes2).map_err(|e| e.to_string())?;
        if bytes1 != bytes2 {
            return Err("save output not byte-stable across round trip".into());
        }
        Ok(())
    })();
    check(8, result);
}
