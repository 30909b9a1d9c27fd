//! Acceptance suite: one line per criterion, non-zero exit on any failure.
//!
//! Run with `cargo test -p nilflow --test acceptance`.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use nilflow::analysis::{
    case1_bound, eq_ineq_check, ineq_cases, is_certificate_base, isla_check, lemma_main_certificate,
    lex_family_check, markov_expectation, second_increment_check, transition_probabilities, HolderSamples,
    PowerLengths, SamplingPlan,
};
use nilflow::chart::{comparable, regularity_probe, ChartProfile, Frame, PTMap, Quadruple};
use nilflow::group::{a_word, b_word, c_word, embedding_identity_check};
use nilflow::interval::{search_feasible, FeasibilityGrid};
use nilflow::lattice::{check_homomorphism, check_order_preservation};
use nilflow::{Convention, Generator, IntervalFamily, LatticePoint, N4Element, ParamSet, Realization, Word};
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

/// Id, name, time budget in seconds, body.
type Criterion = (u32, &'static str, u64, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn closed_form_params() -> ParamSet {
    ParamSet::new(0.4, 10.0, 10.0, 4.0 / 3.0).unwrap()
}

// ─── criterion 1: exact algebra ─────────────────────────────────────────────

type Mat = [[i128; 4]; 4];

fn mat_identity() -> Mat {
    let mut m = [[0; 4]; 4];
    for (n, row) in m.iter_mut().enumerate() {
        row[n] = 1;
    }
    m
}

fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let mut out = [[0; 4]; 4];
    for r in 0..4 {
        for c in 0..4 {
            out[r][c] = (0..4).map(|k| a[r][k] * b[k][c]).sum();
        }
    }
    out
}

/// `I + n·E_slot`, written out independently of the library.
fn elementary(slot: (usize, usize), n: i64) -> Mat {
    let mut m = mat_identity();
    m[slot.0][slot.1] = n as i128;
    m
}

/// Normal form `f e d a b c` as a matrix product.
fn oracle_matrix(exps: [i64; 6]) -> Mat {
    const SLOTS: [(usize, usize); 6] = [(2, 1), (1, 0), (3, 2), (2, 0), (3, 1), (3, 0)];
    SLOTS
        .iter()
        .zip(exps)
        .fold(mat_identity(), |acc, (&slot, n)| mat_mul(&acc, &elementary(slot, n)))
}

fn lib_matrix(g: &N4Element) -> Mat {
    let m = g.to_matrix().unwrap();
    let mut out = [[0; 4]; 4];
    for r in 0..4 {
        for c in 0..4 {
            out[r][c] = m.entry(r, c) as i128;
        }
    }
    out
}

fn random_element(rng: &mut ChaCha8Rng) -> N4Element {
    let mut e = [0i64; 6];
    for x in e.iter_mut() {
        *x = rng.gen_range(-10..=10);
    }
    N4Element::new(e)
}

fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let elem = |s: &str| -> N4Element { s.parse::<Word>().unwrap().evaluate().unwrap() };
    let mut checks = 0usize;
    let mut failures = Vec::new();
    let mut check = |ok: bool, what: String| {
        checks += 1;
        if !ok && failures.len() < 5 {
            failures.push(what);
        }
    };
    for _ in 0..10_000 {
        let (g, h, k) = (random_element(&mut rng), random_element(&mut rng), random_element(&mut rng));
        check(lib_matrix(&g) == oracle_matrix(g.exponents()), format!("matrix of {g}"));
        let back = N4Element::from_matrix(&g.to_matrix().unwrap()).unwrap();
        check(back == g, format!("round trip {g}"));
        let gh = g.multiply(&h).unwrap();
        check(lib_matrix(&gh) == mat_mul(&lib_matrix(&g), &lib_matrix(&h)), format!("product {g}·{h}"));
        let left = gh.multiply(&k).unwrap();
        let right = g.multiply(&h.multiply(&k).unwrap()).unwrap();
        check(left == right, format!("associativity {g} {h} {k}"));
        check(g.multiply(&N4Element::identity()).unwrap() == g, format!("identity {g}"));
        check(g.multiply(&g.inverse().unwrap()).unwrap().is_identity(), format!("inverse {g}"));
        let word_back: Word = g.to_word().to_string().parse().unwrap();
        check(word_back.evaluate().unwrap() == g, format!("word round trip {g}"));
        let n1 = rng.gen_range(-10..=10);
        let n2 = if n1 == 0 { rng.gen_range(1..=10) } else { rng.gen_range(-10..=10) };
        let n3 = rng.gen_range(-10..=10);
        check(embedding_identity_check(n1, n2, n3).unwrap(), format!("embedding identity ({n1},{n2},{n3})"));
        // the same identity against the oracle matrices
        let x = oracle_matrix([0, n2, n1, 0, 0, 0]);
        let y = oracle_matrix([0, 0, 0, n1, -n2, n3]);
        let xi = lib_matrix(&N4Element::new([0, n2, n1, 0, 0, 0]).inverse().unwrap());
        let yi = lib_matrix(&N4Element::new([0, 0, 0, n1, -n2, n3]).inverse().unwrap());
        let comm = mat_mul(&mat_mul(&mat_mul(&x, &y), &xi), &yi);
        check(comm == oracle_matrix([0, 0, 0, 0, 0, n1 * n1 + n2 * n2]), format!("oracle commutator ({n1},{n2},{n3})"));
    }
    let gen = N4Element::generator;
    check(elem("f e f^-1 e^-1") == gen(Generator::A), "[f,e] = a".into());
    check(elem("d f d^-1 f^-1") == gen(Generator::B), "[d,f] = b".into());
    check(elem("d a d^-1 a^-1") == gen(Generator::C), "[d,a] = c".into());
    check(a_word().evaluate().unwrap() == gen(Generator::A), "a word".into());
    check(b_word().evaluate().unwrap() == gen(Generator::B), "b word".into());
    check(c_word().evaluate().unwrap() == gen(Generator::C), "c word".into());
    if failures.is_empty() {
        Ok(format!("{checks} exact checks, 0 failures"))
    } else {
        Err(format!("failures: {failures:?}"))
    }
}

// ─── criterion 2: lattice action ────────────────────────────────────────────

fn criterion_2() -> Outcome {
    let mut parts = Vec::new();
    for conv in [Convention::Interval, Convention::Proposition] {
        let hom = check_homomorphism(100_000, 7, conv);
        let ord = check_order_preservation(100_000, 8, conv);
        ensure(hom.passed(), || format!("{conv:?} homomorphism: {:?}", hom.examples))?;
        ensure(ord.passed(), || format!("{conv:?} order: {:?}", ord.examples))?;
        parts.push(format!("{conv:?}: 2×{} samples", hom.samples));
    }
    Ok(format!("{}, 0 failures", parts.join("; ")))
}

// ─── criterion 3: feasibility frontier ──────────────────────────────────────

fn criterion_3() -> Outcome {
    let grid = FeasibilityGrid::default();
    let mut feasible = Vec::new();
    for n in 1..=4 {
        feasible.push(n as f64 / 10.0);
    }
    feasible.push(0.49);
    for &alpha in &feasible {
        ensure(search_feasible(alpha, &grid).unwrap().is_some(), || format!("no parameters at α = {alpha}"))?;
    }
    let mut infeasible = 0;
    for n in 0..=8 {
        let alpha = 0.5 + 0.05 * n as f64;
        ensure(search_feasible(alpha, &grid).unwrap().is_none(), || format!("parameters found at α = {alpha}"))?;
        infeasible += 1;
    }
    Ok(format!("feasible at {feasible:?}, infeasible at {infeasible} values in [0.50, 0.90]"))
}

// ─── criterion 4: equivariant map contract ──────────────────────────────────

fn random_frame(rng: &mut ChaCha8Rng) -> Frame {
    let scale = 10f64.powf(rng.gen_range(-6.0..-1.0));
    let left = rng.gen_range(0.0..0.5);
    Frame::new(left, scale * rng.gen_range(0.2..1.0), scale * rng.gen_range(0.2..1.0)).unwrap()
}

fn random_comparable(rng: &mut ChaCha8Rng) -> Quadruple {
    loop {
        let q = (rng.gen_range(0.3..3.0), rng.gen_range(0.3..3.0), rng.gen_range(0.3..3.0), rng.gen_range(0.3..3.0));
        if comparable(&q) {
            return q;
        }
    }
}

fn criterion_4() -> Outcome {
    let profile = ChartProfile::new();
    let mut rng = ChaCha8Rng::seed_from_u64(404);

    // equivariance on random triples
    let mut equiv: f64 = 0.0;
    for _ in 0..1000 {
        let (i, j, k) = (random_frame(&mut rng), random_frame(&mut rng), random_frame(&mut rng));
        let (ij, jk, ik) = (PTMap::new(&profile, i, j), PTMap::new(&profile, j, k), PTMap::new(&profile, i, k));
        let x = i.left + i.len * rng.gen_range(0.0..1.0);
        let via = jk.eval(ij.eval(x).unwrap()).unwrap();
        equiv = equiv.max((via - ik.eval(x).unwrap()).abs());
    }
    ensure(equiv < 1e-10, || format!("equivariance residual {equiv:e}"))?;

    // endpoint derivatives: one-sided differences at 1e-4..1e-7, Richardson-extrapolated
    let mut endpoint: f64 = 0.0;
    // frames anchored at 0 so that offsets down to 1e-7 of a short interval stay resolvable
    for _ in 0..200 {
        let anchored = |rng: &mut ChaCha8Rng| {
            let f = random_frame(rng);
            Frame::new(0.0, f.len, f.prev_len).unwrap()
        };
        let (i, j) = (anchored(&mut rng), anchored(&mut rng));
        let m = PTMap::new(&profile, i, j);
        let (dl, dr) = m.endpoint_derivatives();
        ensure(dr == j.len / i.len && dl == j.prev_len / i.prev_len, || "analytic endpoint values".into())?;
        let diff = |h: f64, left: bool| {
            let step = h * i.len;
            if left {
                (m.eval(i.left + step).unwrap() - m.eval(i.left).unwrap()) / step
            } else {
                (m.eval(i.right()).unwrap() - m.eval(i.right() - step).unwrap()) / step
            }
        };
        for (left, exact) in [(true, dl), (false, dr)] {
            let d: Vec<f64> = [1e-4, 1e-5, 1e-6, 1e-7].iter().map(|&h| diff(h, left)).collect();
            let extrapolated = (10.0 * d[2] - d[1]) / 9.0;
            endpoint = endpoint.max((extrapolated - exact).abs() / exact);
            // the raw differences converge toward the analytic value
            ensure((d[3] - exact).abs() <= (d[0] - exact).abs() + 1e-9 * exact, || "differences do not converge".into())?;
        }
    }
    ensure(endpoint < 1e-6, || format!("endpoint derivative mismatch {endpoint:e}"))?;

    // ρ = 1 gives the affine map
    let mut affine: f64 = 0.0;
    for _ in 0..200 {
        let i = random_frame(&mut rng);
        let s = rng.gen_range(0.1..3.0);
        let j = Frame::new(rng.gen_range(0.0..0.5), i.len * s, i.prev_len * s).unwrap();
        let m = PTMap::new(&profile, i, j);
        for n in 0..=20 {
            let x = i.left + i.len * n as f64 / 20.0;
            let exact = j.left + (j.len / i.len) * (x - i.left);
            affine = affine.max((m.eval(x).unwrap() - exact).abs());
        }
    }
    ensure(affine < 1e-12, || format!("ρ = 1 affinity residual {affine:e}"))?;

    // distortion constant on 1e4 comparable quadruples, then its scale stability
    let quads: Vec<Quadruple> = (0..10_000).map(|_| random_comparable(&mut rng)).collect();
    let probe = regularity_probe(&profile, &quads, 17).map_err(|e| e.to_string())?;
    ensure(probe.m_estimate.is_finite() && probe.m_estimate < 1e3, || format!("M = {}", probe.m_estimate))?;
    let shapes = &quads[..500];
    let mut per_scale = Vec::new();
    for e in 1..=6 {
        let s = 10f64.powi(-e);
        let scaled: Vec<Quadruple> = shapes.iter().map(|q| (q.0 * s, q.1 * s, q.2 * s, q.3 * s)).collect();
        per_scale.push(regularity_probe(&profile, &scaled, 17).map_err(|e| e.to_string())?.m_estimate);
    }
    let (lo, hi) = per_scale.iter().fold((f64::MAX, 0.0f64), |(lo, hi), &m| (lo.min(m), hi.max(m)));
    ensure(hi <= 2.0 * lo, || format!("M across scales {per_scale:?}"))?;
    Ok(format!(
        "equivariance {equiv:.1e}, endpoint {endpoint:.1e}, affine {affine:.1e}, M = {:.3}, M over 1e-1..1e-6 in [{lo:.3}, {hi:.3}]",
        probe.m_estimate
    ))
}

// ─── criterion 5: assembled action ──────────────────────────────────────────

fn criterion_5() -> Outcome {
    let r = Realization::build(IntervalFamily::build(closed_form_params(), 8).unwrap());
    let perm = r.induced_permutation_check(1);
    ensure(perm.passed(), || format!("permutation mismatches: {:?}", &perm.mismatches[..perm.mismatches.len().min(5)]))?;
    let c1 = r.check_c1_matching();
    ensure(c1.max_log_mismatch < 1e-9, || format!("C¹ mismatch {c1:?}"))?;

    // words that differ letter by letter but agree in the group
    let expand = |s: &str| -> Word { s.parse::<Word>().unwrap().expand_to_edf() };
    let pairs = [
        ("c", "d a d^-1 a^-1"),
        ("a", "f e f^-1 e^-1"),
        ("b", "d f d^-1 f^-1"),
        ("e f e^-1", "f a^-1"),
        ("d a d^-1", "c a"),
        ("c e", "e c"),
        ("c d", "d c"),
        ("c f", "f c"),
        ("d e", "e d"),
    ];
    let mut worst: f64 = 0.0;
    let mut compared = 0;
    for (s1, s2) in pairs {
        let (w1, w2) = (expand(s1), expand(s2));
        ensure(w1.evaluate().unwrap() == w2.evaluate().unwrap(), || format!("{s1} ≠ {s2} in the group"))?;
        for idx in r.family().indices().step_by(3) {
            if !(r.is_safe(&w1, idx) && r.is_safe(&w2, idx)) {
                continue;
            }
            let frame = r.frame(idx).unwrap();
            for u in [0.1, 0.5, 0.9] {
                let x = frame.left + frame.len * u;
                let (y1, y2) = (r.eval(&w1, x).unwrap(), r.eval(&w2, x).unwrap());
                worst = worst.max((y1 - y2).abs());
                compared += 1;
            }
        }
    }
    ensure(compared > 1000 && worst < 1e-8, || format!("relation residual {worst:e} over {compared} points"))?;
    Ok(format!(
        "{} index checks exact, C¹ mismatch {:.1e} over {} endpoints, relations within {worst:.1e} on {compared} points",
        perm.checked, c1.max_log_mismatch, c1.endpoints
    ))
}

// ─── criterion 6: regularity dichotomy ──────────────────────────────────────

fn criterion_6() -> Outcome {
    let params = closed_form_params();
    let f = Word::letter(Generator::F);
    let plan = SamplingPlan::default();
    let at = |n: i64| -> (f64, f64) {
        let r = Realization::build(IntervalFamily::build(params, n).unwrap());
        let samples = HolderSamples::collect(&r, &f, &plan).unwrap();
        let low = samples.constant(0.4).unwrap();
        let high = samples.constant(0.6).unwrap();
        for rep in [&low, &high] {
            let again = rep.reproduce(&r).unwrap();
            assert!((again - rep.constant).abs() < 1e-9, "argmax does not reproduce");
        }
        (low.constant, high.constant)
    };
    let (c4, h4) = at(4);
    let (c8, _) = at(8);
    let (c12, h12) = at(12);
    let growth_low = c12 / c8 - 1.0;
    let growth_high = h12 / h4 - 1.0;
    let detail = format!(
        "α=0.40: C(8)={c8:.4}, C(12)={c12:.4}, growth {:.1}% (need < 10%); α=0.60: C(4)={h4:.4}, C(12)={h12:.4}, growth {:.1}% (need > 100%); C(4) at α=0.40 = {c4:.4}",
        100.0 * growth_low,
        100.0 * growth_high
    );
    if growth_low < 0.10 && growth_high > 1.0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

// ─── criterion 7: estimate chain ────────────────────────────────────────────

fn criterion_7() -> Outcome {
    let params = closed_form_params();
    let alpha = 0.4;
    let growth = |a: f64, b: f64| if a == 0.0 { if b == 0.0 { 0.0 } else { f64::INFINITY } } else { b / a - 1.0 };
    let mut lines = Vec::new();

    let (c8, c16) = (case1_bound(&params, 8, alpha).unwrap(), case1_bound(&params, 16, alpha).unwrap());
    let g = growth(c8.value, c16.value);
    ensure(c16.value.is_finite() && g < 0.05, || format!("case 1: {} → {}", c8.value, c16.value))?;
    lines.push(format!("case1 {:.4}→{:.4}", c8.value, c16.value));

    let (i8, i16) = (isla_check(&params, 8, 16).unwrap(), isla_check(&params, 16, 16).unwrap());
    let g = growth(i8.value, i16.value);
    ensure(g < 0.05, || format!("isla: {} → {}", i8.value, i16.value))?;
    lines.push(format!("isla {:.4}→{:.4}", i8.value, i16.value));

    for case in ineq_cases(&params, alpha) {
        let (a, b) = (eq_ineq_check(&params, 8, &case).unwrap(), eq_ineq_check(&params, 16, &case).unwrap());
        ensure(a.premise, || format!("premise of {} fails", case.name))?;
        ensure(a.violations == 0 && b.violations == 0, || format!("{} violated", case.name))?;
        let g = growth(a.max_ratio, b.max_ratio);
        ensure(g < 0.05, || format!("{}: {} → {}", case.name, a.max_ratio, b.max_ratio))?;
    }
    lines.push(format!("{} inequality instances stable, 0 violations", ineq_cases(&params, alpha).len()));

    let (s8, s16) = (
        second_increment_check(&params, 8, 1000, 77).unwrap(),
        second_increment_check(&params, 16, 1000, 77).unwrap(),
    );
    ensure(s8.violations == 0 && s16.violations == 0, || format!("increment bound violated: {:?} {:?}", s8.worst, s16.worst))?;
    let g = growth(s8.max_tightness, s16.max_tightness);
    ensure(g < 0.05, || format!("increment tightness {} → {}", s8.max_tightness, s16.max_tightness))?;
    lines.push(format!(
        "second increments: 0 violations, tightness {:.4}→{:.4}, worst slack {:.2e}",
        s8.max_tightness,
        s16.max_tightness,
        s8.worst_slack.min(s16.worst_slack)
    ));
    Ok(lines.join("; "))
}

// ─── criterion 8: Markov series ─────────────────────────────────────────────

fn criterion_8() -> Outcome {
    let row = transition_probabilities(&[1, 0, 0]);
    ensure(row == vec![Ratio::new(1u64, 2), Ratio::new(1, 4), Ratio::new(1, 4)], || format!("row {row:?}"))?;
    ensure(transition_probabilities(&[0, 0, 0]) == vec![Ratio::new(1u64, 3); 3], || "origin row".into())?;
    let p = closed_form_params();
    let horizons = [1_000u64, 10_000, 100_000];
    let lengths = PowerLengths::new(&[p.p, p.q, p.r], 100_000);
    let rep = markov_expectation(&lengths, 0.4, 10_000, &horizons, 2024).map_err(|e| e.to_string())?;
    let means: Vec<String> = rep.estimates.iter().map(|e| format!("{:.6}±{:.1e}", e.mean, 1.96 * e.std_error)).collect();
    let detail = format!("E[S] at 1e3/1e4/1e5: {}; relative deltas {:?}", means.join(", "), rep.relative_deltas);
    if rep.is_cauchy(0.02) {
        Ok(detail)
    } else {
        Err(detail)
    }
}

// ─── criterion 9: three-element certificate ─────────────────────────────────

fn criterion_9() -> Outcome {
    let r = Realization::build(IntervalFamily::build(closed_form_params(), 6).unwrap());
    let mut bases = 0;
    for idx in r.family().indices() {
        if !is_certificate_base(&r, idx) {
            continue;
        }
        let cert = lemma_main_certificate(&r, idx).map_err(|e| format!("{idx}: {e}"))?;
        ensure(cert.passed(), || format!("certificate fails at {idx}: {cert:?}"))?;
        bases += 1;
    }
    ensure(bases > 0, || "no safe base points".into())?;
    let lex = lex_family_check(&r, LatticePoint::new(0, 0, 0), 2).map_err(|e| e.to_string())?;
    ensure(lex.passed() && lex.intervals == 125, || format!("lex family: {:?}", lex.failures))?;
    Ok(format!("certificate passes at all {bases} safe base points; lex family of {} intervals checked", lex.intervals))
}

// ─── driver ─────────────────────────────────────────────────────────────────

fn main() {
    let criteria: [Criterion; 9] = [
        (1, "exact algebra", 5, criterion_1),
        (2, "lattice action", 10, criterion_2),
        (3, "feasibility frontier", 5, criterion_3),
        (4, "equivariant map contract", 60, criterion_4),
        (5, "assembled action", 120, criterion_5),
        (6, "regularity dichotomy", 600, criterion_6),
        (7, "estimate chain", 300, criterion_7),
        (8, "Markov series", 300, criterion_8),
        (9, "three-element certificate", 60, criterion_9),
    ];
    let mut failed = Vec::new();
    for (id, name, budget, run) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|panic| {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        let over = elapsed > Duration::from_secs(budget);
        let (status, detail) = match (&outcome, over) {
            (Ok(d), false) => ("PASS", d.clone()),
            (Ok(d), true) => ("FAIL", format!("over time budget; {d}")),
            (Err(d), _) => ("FAIL", d.clone()),
        };
        println!(
            "criterion {id} ({name}): {status} in {:.2} s [budget {budget} s]: {detail}",
            elapsed.as_secs_f64()
        );
        if status == "FAIL" {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 9 criteria pass");
    } else {
        println!("acceptance: failing criteria {failed:?}");
        std::process::exit(1);
    }
}
