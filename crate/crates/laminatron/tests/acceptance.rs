//! Acceptance suite. Run with `cargo test --test acceptance -- --nocapture`
//! to see one PASS/FAIL line per criterion.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::One;

use laminatron::curves::Surface;
use laminatron::estimates::{
    admissible_a, measure_big_b, random_twist_samples, twist_inequality, verify_sandwich, EstimateLedger,
};
use laminatron::exactnum::{int, make_esequence, rat, BigRat, ESequence, SequenceMode};
use laminatron::family::{generate, FamilySpec, GeneratedSequence, DIGIT_BUDGET};
use laminatron::limitset::{trace_limit_cycle, Mode, TraceOptions};
use laminatron::measures::{cauchy_report, default_probes, singularity_diagnostics, ProbeTable};
use laminatron::timeline::{
    build_timeline, build_timeline_from_logs, check_ordering, g1_minimal_logs, g1_product_report, geometric_logs,
};
use laminatron::verify::check_p;

const SLOPE_TOL: f64 = 0.1;
const BAND: f64 = 10.0;
const VERTEX_TOL: f64 = 0.05;
const INTERIOR_TOL: f64 = 0.02;

type Outcome = (bool, String);

fn geometric(a: i64, e0: i64, n: usize) -> ESequence {
    make_esequence(rat(a, 1), int(e0), n, SequenceMode::Geometric).unwrap()
}

fn pentagon(e: ESequence, n: usize) -> GeneratedSequence {
    generate(&FamilySpec::s05(e), n, DIGIT_BUDGET).unwrap()
}

fn ledger(seq: &GeneratedSequence) -> EstimateLedger {
    let b = BigInt::from(measure_big_b(seq).unwrap().value);
    EstimateLedger::for_sequence(seq, b, seq.len()).unwrap()
}

fn flip_bit(v: &BigInt, bit: u64) -> BigInt {
    v ^ (BigInt::one() << bit)
}

fn local_conditions() -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for (a, e0) in [(576, 1), (576, 3), (600, 2)] {
        let seq = pentagon(geometric(a, e0, 10), 6);
        let p = check_p(&seq, seq.len()).unwrap();
        ok &= p.verdict && p.upto >= 6;
        let mut caught = 0;
        let mut tried = 0;
        for k in 0..seq.len() - seq.m() {
            for bit in [0, 3] {
                let mut bad = seq.clone();
                let v = flip_bit(bad.spec.eseq.e(k), bit);
                bad.spec.eseq = bad.spec.eseq.with_value_unchecked(k, v);
                tried += 1;
                if !check_p(&bad, bad.len()).unwrap().verdict {
                    caught += 1;
                }
            }
        }
        ok &= caught == tried;
        detail.push(format!("a={a} e0={e0}: {} curves, {caught}/{tried} corruptions caught", p.upto));
    }
    (ok, detail.join("; "))
}

fn twist_formula() -> Outcome {
    let start = Instant::now();
    let mut failures = 0;
    let mut count = 0;
    for (s, seed) in [(Surface::s05(), 1), (Surface { punctures: 6 }, 2)] {
        let samples = random_twist_samples(s, 250, 12, 50, seed).unwrap();
        for x in &samples {
            count += 1;
            if !twist_inequality(&x.beta, &x.delta, &x.delta_p, &BigInt::from(x.e)).unwrap().holds() {
                failures += 1;
            }
        }
    }
    let took = start.elapsed();
    (
        failures == 0 && count >= 500 && took <= Duration::from_secs(120),
        format!("{count} triples, {failures} failures, {:.1}s", took.as_secs_f64()),
    )
}

fn constant_ledger() -> Outcome {
    let seq = pentagon(geometric(576, 1, 10), 6);
    let b = BigInt::from(measure_big_b(&seq).unwrap().value);
    let s = &seq.spec;
    let adm = admissible_a(s.m, &b, &s.b1, &s.b2).unwrap();
    let ok = adm.a >= BigInt::from(16) && adm.c_upper < rat(2, 1);
    (ok, format!("B = {b}, admissible a = {}, C(a) <= {}", adm.a, adm.c_upper))
}

fn sandwich() -> Outcome {
    let probe = pentagon(geometric(576, 1, 10), 6);
    let b = BigInt::from(measure_big_b(&probe).unwrap().value);
    let a = admissible_a(2, &b, &int(2), &int(2)).unwrap().a;
    let e = make_esequence(BigRat::from_integer(a.clone()), int(1), 10, SequenceMode::Geometric).unwrap();
    let seq = pentagon(e, 7);
    let table = seq.intersection_table(8).unwrap();
    let l = ledger(&seq);
    let sw = verify_sandwich(&table, &l).unwrap();
    (
        sw.pass && table.len() == 8,
        format!("a = {a}, N = {}, {} pairs, ratios in [{}, {}]", table.len(), sw.rows.len(), sw.min_ratio, sw.max_ratio),
    )
}

fn measures_seq() -> (GeneratedSequence, ProbeTable, EstimateLedger) {
    let seq = pentagon(geometric(576, 1, 13), 10);
    let pt = ProbeTable::compute(&seq, &default_probes(seq.surface()), seq.len()).unwrap();
    let l = ledger(&seq);
    (seq, pt, l)
}

fn cauchy(pt: &ProbeTable, l: &EstimateLedger) -> Outcome {
    let r = cauchy_report(pt, l, SLOPE_TOL);
    let fitted: Vec<_> = r.slopes.iter().filter(|s| s.slope.is_some()).collect();
    let mut probes: Vec<&str> = fitted.iter().map(|s| s.probe.as_str()).collect();
    probes.sort();
    probes.dedup();
    let slopes_ok = fitted.iter().all(|s| s.pass);
    let worst = fitted.iter().filter_map(|s| s.slope).fold(f64::NEG_INFINITY, f64::max);
    (
        r.bounds_pass && r.telescoping_failures.is_empty() && slopes_ok && probes.len() >= 3,
        format!("{} bound rows, {} probes with fitted slopes, worst slope {worst:.4}", r.rows.len(), probes.len()),
    )
}

fn singularity(seq: &GeneratedSequence, l: &EstimateLedger) -> Outcome {
    let table = seq.intersection_table(seq.len()).unwrap();
    let d = singularity_diagnostics(&table, l, SLOPE_TOL, BAND);
    let cross = d.iter().filter(|x| x.h != x.h2).count();
    let diag = d.iter().filter(|x| x.h == x.h2).count();
    let ok = d.iter().all(|x| x.pass)
        && cross > 0
        && diag > 0
        && d.iter().filter(|x| x.h != x.h2).all(|x| x.slope.is_some())
        && d.iter().filter(|x| x.h == x.h2).all(|x| x.band.is_some_and(|b| b <= BAND));
    (ok, format!("{cross} cross pairs, {diag} diagonal pairs"))
}

fn timeline() -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    let ln2 = 2f64.ln();
    for (m, n) in [(2, 14), (3, 14)] {
        let model = build_timeline_from_logs(&g1_minimal_logs(ln2, ln2, n), ln2, m, ln2, &vec![1.0; m]).unwrap();
        let ord = check_ordering(&model);
        let products = g1_product_report(&model);
        let here = model.g1
            && ord.shift_error <= 1e-9
            && ord.pass
            && ord.threshold.is_some()
            && ord.skipped.is_empty()
            && !products.is_empty()
            && products.iter().all(|p| p.increasing);
        ok &= here;
        detail.push(format!("m={m}: shift {:.1e}, threshold {:?}", ord.shift_error, ord.threshold));
    }
    let exact = build_timeline(&geometric(576, 1, 10), 2, &int(2), &[1.0, 1.0]).unwrap();
    let shift = check_ordering(&exact).shift_error;
    ok &= shift <= 1e-9;
    detail.push(format!("geometric shift {shift:.1e}"));
    (ok, detail.join("; "))
}

fn limit_cycle(pt: &ProbeTable) -> Outcome {
    let m = 3;
    let model =
        build_timeline_from_logs(&geometric_logs(8f64.ln(), 64f64.ln(), 30), 8f64.ln(), m, 2f64.ln(), &[1.0; 3]).unwrap();
    let windows = m..model.len() - m;
    let last = windows.end - 1;
    let tr = trace_limit_cycle(&model, Mode::Synthetic, windows, &TraceOptions::default()).unwrap();
    let from = tr.cyclic_from();
    let cyclic_windows = from.map_or(0, |f| last + 1 - f);
    let endpoint = tr.endpoint_error(last).unwrap();
    let interior = tr.min_coordinate(last).unwrap();
    let synthetic_ok = endpoint <= VERTEX_TOL && interior <= INTERIOR_TOL && cyclic_windows >= 6;

    let e = geometric(576, 1, 13);
    let exact = build_timeline(&e.truncated(pt.len()), 2, &int(2), &[1.0, 1.0]).unwrap();
    let ew = 2..pt.len().min(exact.len()) - 2;
    let elast = ew.end - 1;
    let etr = trace_limit_cycle(&exact, Mode::Exact(pt), ew, &TraceOptions::default()).unwrap();
    let eend = etr.endpoint_error(elast).unwrap();
    let exact_ok = eend <= VERTEX_TOL && etr.cyclic_from().is_some();
    (
        synthetic_ok && exact_ok,
        format!(
            "m=3 synthetic: cyclic over {cyclic_windows} windows from {from:?}, endpoint {endpoint:.2e}, \
             min coordinate {interior:.2e}; m=2 exact: endpoint {eend:.2e}"
        ),
    )
}

#[test]
fn acceptance_criteria() {
    let (seq, pt, l) = measures_seq();
    let results: Vec<(&str, Outcome)> = vec![
        ("1 local conditions", local_conditions()),
        ("2 twist formula", twist_formula()),
        ("3 constant ledger", constant_ledger()),
        ("4 intersection sandwich", sandwich()),
        ("5 cauchy decay", cauchy(&pt, &l)),
        ("6 singularity ratios", singularity(&seq, &l)),
        ("7 timeline ordering", timeline()),
        ("8 limit cycle", limit_cycle(&pt)),
    ];
    for (name, (ok, detail)) in &results {
        println!("{name:<26} {}  {detail}", if *ok { "PASS" } else { "FAIL" });
    }
    let failed: Vec<&str> = results.iter().filter(|r| !r.1 .0).map(|r| r.0).collect();
    assert!(failed.is_empty(), "failed: {failed:?}");
}
