//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use itertools::Itertools;
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use pirbatch::array_code::{
    build_rk_batch, five_batch_code, greedy_slope_set, has_weighted_ap, ArrayCode, ArrayCodeParams,
};
use pirbatch::batch_mult::{plan_batch, recover_batch, validate_batch_params};
use pirbatch::curves::{self, Which};
use pirbatch::descriptor::Descriptor;
use pirbatch::gf::{is_prime, Elem};
use pirbatch::mpoly::MultiPoly;
use pirbatch::multiplicity::{MultCodeParams, MultiplicityCode};
use pirbatch::pir::{pir_recovery_plans, recover_symbol};
use pirbatch::verify::{
    certify_batch, certify_code_pir, determined_by, enumerate_requests, generator_of, info_determined_by,
    is_recovering_set, min_distance, recovers_symbol, EXHAUSTIVE_LIMIT,
};
use pirbatch::AvailabilityCode;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn mult(m: usize, d: usize, s: usize, q: u32) -> MultiplicityCode {
    MultiplicityCode::new(MultCodeParams::new(m, d, s, q).unwrap()).unwrap()
}

fn within(start: Instant, limit: Duration, detail: String) -> Outcome {
    let took = start.elapsed();
    if took <= limit {
        Ok(format!("{detail} in {:.2}s", took.as_secs_f64()))
    } else {
        Err(format!("{detail} but took {:.2}s, limit {}s", took.as_secs_f64(), limit.as_secs()))
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn multiplicity_pir() -> Outcome {
    let start = Instant::now();
    let code = mult(2, 2, 2, 7);
    let g = generator_of(&code, 1).map_err(|e| e.to_string())?;
    for t in code.targets() {
        let plans = pir_recovery_plans(&code, &code.point(t)).map_err(|e| e.to_string())?;
        ensure(plans.len() == 3, || format!("point {t} has {} plans", plans.len()))?;
        for (a, b) in plans.iter().tuple_combinations() {
            ensure(a.coordinates.is_disjoint(&b.coordinates), || format!("plans of {t} overlap"))?;
        }
    }
    let report = certify_code_pir(&code, &g).map_err(|e| e.to_string())?;
    ensure(report.total() == 49 && report.all_passed(), || {
        format!("{} of {} coordinates failed", report.failed(), report.total())
    })?;
    within(start, Duration::from_secs(5), "49 coordinates × 3 disjoint plans certified".into())
}

fn recovery_round_trip() -> Outcome {
    let start = Instant::now();
    let mut checked = 0usize;
    for (m, d, s, q) in [(2, 2, 2, 7), (2, 4, 2, 11)] {
        let code = mult(m, d, s, q);
        let field = code.field().clone();
        let plans: Vec<_> =
            code.targets().into_iter().map(|t| pir_recovery_plans(&code, &code.point(t)).unwrap()).collect();
        let mismatches: usize = (0..200u64)
            .into_par_iter()
            .map(|trial| {
                let mut rng = ChaCha8Rng::seed_from_u64(1000 + trial);
                let p = MultiPoly::random(&field, s, d as u32, &mut rng);
                let word = code.encode_poly(&p).unwrap();
                let mut bad = 0;
                for (t, ps) in plans.iter().enumerate() {
                    for plan in ps {
                        let r = word.restrict(plan.coordinates.iter().copied()).unwrap();
                        match recover_symbol(&code, &r, plan) {
                            Ok(ev) if ev.entries == word.as_slice()[t * code.width()..(t + 1) * code.width()] => {}
                            _ => bad += 1,
                        }
                    }
                }
                bad
            })
            .sum();
        ensure(mismatches == 0, || format!("{mismatches} mismatches at ({m},{d},{s},{q})"))?;
        checked += 200 * plans.iter().map(Vec::len).sum::<usize>();
    }
    within(start, Duration::from_secs(60), format!("{checked} recoveries exact"))
}

fn distance_bound() -> Outcome {
    let start = Instant::now();
    let code = mult(2, 2, 2, 7);
    let bound = code.profile().distance_bound;
    ensure(bound == Ratio::from_integer(42), || format!("bound evaluates to {bound}"))?;
    let g = generator_of(&code, 2).map_err(|e| e.to_string())?;
    let d = min_distance(&g).map_err(|e| e.to_string())?;
    ensure(d >= 42, || format!("minimum distance {d} < 42"))?;
    within(start, Duration::from_secs(600), format!("exact symbol distance {d} ≥ 42 over 7^6 − 1 messages"))
}

fn batch_over_multiplicity() -> Outcome {
    let start = Instant::now();
    let params = MultCodeParams::new(2, 4, 2, 11).unwrap();
    let code = MultiplicityCode::new(params.clone()).unwrap();
    let bp = validate_batch_params(&params, 2).map_err(|e| e.to_string())?;
    let field = code.field().clone();
    let requests: Vec<Vec<usize>> = (0..121).combinations_with_replacement(2).collect();
    ensure(requests.len() == 7381, || format!("{} requests", requests.len()))?;
    let results: Vec<Result<usize, String>> = requests
        .par_iter()
        .enumerate()
        .map(|(id, req)| {
            let mut rng = ChaCha8Rng::seed_from_u64(id as u64);
            let p = MultiPoly::random(&field, 2, 4, &mut rng);
            let word = code.encode_poly(&p).unwrap();
            let points: Vec<Vec<Elem>> = req.iter().map(|&i| code.point(i)).collect();
            let plan = plan_batch(&code, &bp, &points).map_err(|e| format!("{req:?}: {e}"))?;
            if !plan.is_disjoint() {
                return Err(format!("{req:?}: plans overlap"));
            }
            let restricted = word.restrict(plan.plans.iter().flat_map(|p| p.coordinates.iter().copied())).unwrap();
            let got = recover_batch(&code, &restricted, &plan).map_err(|e| format!("{req:?}: {e}"))?;
            for (&t, ev) in plan.request.iter().zip(&got) {
                if ev.entries != word.as_slice()[t * 3..t * 3 + 3] {
                    return Err(format!("{req:?}: wrong symbol at {t}"));
                }
            }
            Ok(plan.max_drops())
        })
        .collect();
    let mut max_drops = 0;
    for r in results {
        max_drops = max_drops.max(r?);
    }
    ensure(max_drops <= bp.drop_budget() && bp.drop_budget() == 4, || format!("{max_drops} drops on one line"))?;
    let g = generator_of(&code, 3).map_err(|e| e.to_string())?;
    let reqs = enumerate_requests(&code.targets(), 2, EXHAUSTIVE_LIMIT, 0, 0);
    let report = certify_batch(&g, |r| code.plan_batch(r), &reqs);
    ensure(report.all_passed(), || format!("{} requests failed certification", report.failed()))?;
    within(start, Duration::from_secs(600), format!("7381 requests, max drops per line {max_drops} ≤ 4"))
}

fn array_pir() -> Outcome {
    let start = Instant::now();
    let code = ArrayCode::new(ArrayCodeParams::new(5, 5, vec![0, 1, 2], false).unwrap()).unwrap();
    ensure(code.params().redundancy() == 15, || format!("redundancy {}", code.params().redundancy()))?;
    let g = generator_of(&code, 4).map_err(|e| e.to_string())?;
    let report = certify_code_pir(&code, &g).map_err(|e| e.to_string())?;
    ensure(report.total() == 25 && report.all_passed(), || format!("{} bits failed", report.failed()))?;
    ensure(report.entries.iter().all(|e| e.set_sizes == [5, 5, 5]), || "set sizes differ from 5".into())?;
    within(start, Duration::from_secs(1), "redundancy 15, 25 bits × 3 disjoint sets of size 5".into())
}

fn array_batch() -> Outcome {
    let start = Instant::now();
    let params = build_rk_batch(3, 2).map_err(|e| e.to_string())?;
    let (n, red) = (params.dimension(), params.redundancy());
    ensure(params.p == 73 && n == 219 && red == 146, || format!("p={} n={n} redundancy={red}", params.p))?;
    let rate = Ratio::new(n, n + red);
    ensure(rate == Ratio::new(3, 5), || format!("rate {rate}"))?;
    let code = ArrayCode::new(params).unwrap();
    let g = generator_of(&code, 5).map_err(|e| e.to_string())?;
    let reqs = enumerate_requests(&code.targets(), 2, EXHAUSTIVE_LIMIT, 0, 0);
    ensure(reqs.exhaustive && reqs.requests.len() == 24090, || format!("{} requests", reqs.requests.len()))?;
    let report = certify_batch(&g, |r| code.plan_array_batch(r), &reqs);
    ensure(report.all_passed(), || {
        let first = report.failures().next().unwrap();
        format!("{} failed, first {:?}: {}", report.failed(), first.request, first.detail)
    })?;
    within(start, Duration::from_secs(120), "p=73 n=219 redundancy 146 rate 3/5, 24090 requests certified".into())
}

fn slope_search() -> Outcome {
    let s = greedy_slope_set(3, 73, 3).map_err(|e| e.to_string())?;
    ensure(has_weighted_ap(&s, 3, 73).is_none(), || format!("{s:?} contains a weighted progression"))?;
    let mut runs = 0;
    for (r, k) in [(3usize, 2usize), (3, 3), (4, 2)] {
        for p in (2 * k * k * r * r + 1..=200).filter(|&p| is_prime(p as u64)) {
            let got = greedy_slope_set(r, p, k).map_err(|e| format!("r={r} k={k} p={p}: {e}"))?;
            ensure(got.len() == k && has_weighted_ap(&got, r, p).is_none(), || format!("r={r} k={k} p={p}"))?;
            runs += 1;
        }
    }
    Ok(format!("S = {s:?}; {runs} (r,k,p) searches reached size k"))
}

fn five_batch() -> Outcome {
    let start = Instant::now();
    let params = five_batch_code(5).map_err(|e| e.to_string())?;
    ensure(params.redundancy() == 26, || format!("redundancy {}", params.redundancy()))?;
    let code = ArrayCode::new(params).unwrap();
    let g = generator_of(&code, 6).map_err(|e| e.to_string())?;
    let reqs = enumerate_requests(&code.targets(), 5, EXHAUSTIVE_LIMIT, 1_000_000, 20_240_601);
    let report = certify_batch(&g, |r| code.plan_array_batch(r), &reqs);
    let mode = if reqs.exhaustive { "exhaustive".to_string() } else { format!("sampled, seed {:?}", reqs.seed) };
    ensure(report.all_passed(), || {
        let first = report.failures().next().unwrap();
        format!(
            "{} of {} failed ({mode}), first {:?}: {}",
            report.failed(),
            report.total(),
            first.request,
            first.detail
        )
    })?;
    within(start, Duration::from_secs(1800), format!("redundancy 26, {} size-5 requests ({mode})", report.total()))
}

fn curve_reproduction() -> Outcome {
    let tenth = Ratio::new(1, 10);
    let grid: Vec<Ratio<i64>> = (0..10).map(|i| tenth * i).collect();
    let one = Ratio::from_integer(1);
    let mut checked = 0;
    for which in [Which::PirBinary, Which::PirQary, Which::Batch] {
        let rows = curves::curves(which, tenth).map_err(|e| e.to_string())?;
        let mut csv = Vec::new();
        curves::write_csv(&rows, &mut csv).map_err(|e| e.to_string())?;
        let mut reader = csv::Reader::from_reader(csv.as_slice());
        for rec in reader.records() {
            let rec = rec.map_err(|e| e.to_string())?;
            let eps: Ratio<i64> = rec[4].parse().map_err(|_| "bad epsilon".to_string())?;
            let delta: Ratio<i64> = rec[5].parse().map_err(|_| "bad delta".to_string())?;
            if !grid.contains(&eps) {
                continue;
            }
            let series = &rec[2];
            let s: Option<i64> = rec[3].parse().ok();
            let expected = match (which, series) {
                (Which::PirBinary, "delta_s") => {
                    let s = Ratio::from_integer(s.unwrap());
                    Some(one - (s * (one - eps) - one) / (s * (s - one) * 2))
                }
                (Which::PirQary, "delta_s") => {
                    let s = Ratio::from_integer(s.unwrap());
                    Some(one - one / s + eps / (s - one))
                }
                (Which::PirQary, "delta_min") => {
                    let star = (Ratio::from_integer(2) / (one - eps)).floor().to_integer();
                    ensure(s == Some(star), || format!("s* = {s:?} at ε = {eps}, expected {star}"))?;
                    let st = Ratio::from_integer(star);
                    Some(one - one / st + eps / (st - one))
                }
                (Which::Batch, "multiplicity_binary") => Some(Ratio::new(5, 6) + eps / 3),
                (Which::Batch, "multiplicity_qary") => Some(Ratio::new(3, 4) + eps / 2),
                (Which::Batch, "array") => Some(Ratio::new(2, 3) + eps * Ratio::new(5, 3)),
                (Which::Batch, "delta_min") => {
                    let m = Ratio::new(5, 6) + eps / 3;
                    Some(if eps < Ratio::new(1, 2) {
                        m.min(Ratio::new(2, 3) + eps * Ratio::new(5, 3))
                    } else {
                        Ratio::new(1, 2) + eps
                    })
                }
                (Which::Batch, "large_k") => Some(Ratio::new(1, 2) + eps),
                _ => None,
            };
            if let Some(x) = expected {
                ensure(x == delta, || format!("{which} {series} at ε = {eps}: {delta} ≠ {x}"))?;
                checked += 1;
            }
        }
    }
    let pick = |which, series: &str, eps: Ratio<i64>, s: Option<i64>| {
        curves::curves(which, tenth)
            .unwrap()
            .into_iter()
            .find(|r| r.series == series && r.epsilon == eps && (s.is_none() || r.s == s))
            .map(|r| (r.s, r.delta))
    };
    let zero = Ratio::from_integer(0);
    ensure(pick(Which::PirBinary, "delta_s", zero, Some(3)) == Some((Some(3), Ratio::new(5, 6))), || "δ_3(0)".into())?;
    ensure(pick(Which::Batch, "delta_min", Ratio::new(1, 5), None) == Some((None, Ratio::new(9, 10))), || {
        "batch δ(0.2)".into()
    })?;
    ensure(pick(Which::PirQary, "delta_min", zero, None) == Some((Some(2), Ratio::new(1, 2))), || "Q-ary ε=0".into())?;
    let cross = curves::batch_crossover();
    let fine = curves::epsilon_grid(Ratio::new(1, 10_000), Ratio::new(1, 2)).map_err(|e| e.to_string())?;
    let switch = curves::switch_point(&fine).map_err(|e| e.to_string())?;
    ensure(cross.by_formula == Ratio::new(1, 8) && switch == Some(Ratio::new(1, 8)), || {
        format!("crossover {} / switch {switch:?}", cross.by_formula)
    })?;
    Ok(format!(
        "{checked} rows exact; crossover by formula ε = {} (0.125) vs quoted 0.0755; DISCREPANCY flagged",
        cross.by_formula
    ))
}

/// Every instance small enough to enumerate all `q^n ≤ 10⁴` messages.
fn oracle_instances() -> Vec<(String, Box<dyn AvailabilityCode>)> {
    let mut out: Vec<(String, Box<dyn AvailabilityCode>)> = Vec::new();
    let mut push = |d: Descriptor| {
        let code = d.build().unwrap();
        out.push((code.describe(), code));
    };
    for (m, d, s, q) in [
        (1, 1, 1, 3),
        (1, 2, 1, 5),
        (2, 2, 1, 5),
        (2, 3, 1, 7),
        (2, 1, 2, 3),
        (1, 1, 2, 4),
        (2, 2, 2, 3),
        (1, 1, 2, 5),
        (3, 2, 1, 4),
    ] {
        push(Descriptor::Multiplicity { m, d, s, q, modulus: None });
    }
    for (r, p, slopes) in
        [(2, 3, vec![0, 1]), (3, 3, vec![0, 1]), (2, 5, vec![0, 1, 2]), (3, 3, vec![0, 1, 2]), (2, 2, vec![0, 1])]
    {
        push(Descriptor::Array { r, p, slopes, global_parity: false });
    }
    push(Descriptor::Array { r: 2, p: 5, slopes: vec![0, 1], global_parity: true });
    push(Descriptor::BinaryExpansion {
        base: Box::new(Descriptor::Multiplicity { m: 1, d: 1, s: 1, q: 4, modulus: None }),
    });
    push(Descriptor::BinaryExpansion {
        base: Box::new(Descriptor::Multiplicity { m: 2, d: 1, s: 1, q: 4, modulus: None }),
    });
    push(Descriptor::Replicated {
        copies: 2,
        base: Box::new(Descriptor::Multiplicity { m: 1, d: 1, s: 1, q: 3, modulus: None }),
    });
    out
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut comparisons = 0usize;
    let mut codes = 0usize;
    for (name, code) in oracle_instances() {
        let q = code.field().order() as u64;
        if q.checked_pow(code.dimension() as u32).is_none_or(|s| s > 10_000) {
            return Err(format!("{name} exceeds the enumeration bound"));
        }
        codes += 1;
        let g = generator_of(code.as_ref(), 7).map_err(|e| e.to_string())?;
        let len = g.length();
        let mut rng = ChaCha8Rng::seed_from_u64(codes as u64);
        // Coordinate sets: the claimed symbol sets, each with one coordinate
        // removed, plus random subsets of every size.
        let mut coord_sets: BTreeSet<Vec<usize>> = BTreeSet::new();
        let mut symbol_sets: BTreeSet<(usize, Vec<usize>)> = BTreeSet::new();
        for t in code.targets() {
            for set in code.pir_sets(t).map_err(|e| e.to_string())? {
                let cols = g.symbol_columns(&set);
                for drop in 0..cols.len() {
                    let mut c = cols.clone();
                    c.remove(drop);
                    coord_sets.insert(c);
                }
                coord_sets.insert(cols);
                symbol_sets.insert((t, set));
            }
        }
        for _ in 0..60 {
            let size = rng.gen_range(0..=len);
            let mut c: Vec<usize> = (0..len).filter(|_| rng.gen_range(0..len) < size).collect();
            c.dedup();
            coord_sets.insert(c);
        }
        for coords in &coord_sets {
            for info in 0..g.dimension() {
                let linear = is_recovering_set(&g, info, coords).map_err(|e| e.to_string())?.is_some();
                let functional = info_determined_by(&g, info, coords).map_err(|e| e.to_string())?;
                ensure(linear == functional, || format!("{name}: x_{info} from {coords:?}: {linear} vs {functional}"))?;
                comparisons += 1;
            }
        }
        for (t, set) in &symbol_sets {
            let linear = recovers_symbol(&g, *t, set).map_err(|e| e.to_string())?;
            let functional =
                determined_by(&g, &g.symbol_columns(&[*t]), &g.symbol_columns(set)).map_err(|e| e.to_string())?;
            ensure(linear && functional, || format!("{name}: symbol {t} from {set:?}: {linear} vs {functional}"))?;
            comparisons += 1;
        }
    }
    within(start, Duration::from_secs(600), format!("{comparisons} comparisons over {codes} codes agree"))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("1 multiplicity PIR C(2,2,2,7), k=3", multiplicity_pir),
        ("2 recovery round trip", recovery_round_trip),
        ("3 distance bound C(2,2,2,7) ≥ 42", distance_bound),
        ("4 batch over multiplicity (2,4,2,11), k=2", batch_over_multiplicity),
        ("5 array PIR r=p=5, S=[3]", array_pir),
        ("6 array (3,2)-batch, p=73", array_batch),
        ("7 slope search", slope_search),
        ("8 5-batch with global parity, p=5", five_batch),
        ("9 curve reproduction", curve_reproduction),
        ("10 oracle equivalence", oracle_equivalence),
    ];
    let filter: Option<String> = std::env::args().skip(1).find(|a| !a.starts_with('-'));
    let mut failed = 0;
    for (name, run) in criteria {
        if filter.as_deref().is_some_and(|f| !name.contains(f)) {
            continue;
        }
        match run() {
            Ok(detail) => println!("PASS  criterion {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  criterion {name}: {detail}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
