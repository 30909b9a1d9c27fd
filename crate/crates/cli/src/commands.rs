//! One function per subcommand. Each returns a JSON report (or writes CSV)
//! and signals failure through [`CliError`].

use std::io::Write;

use nilflow::analysis::{
    lemma_main_certificate, lex_family_check, markov_expectation, transition_probabilities, HolderReport,
    HolderSamples, PowerLengths, SamplingPlan,
};
use nilflow::chart::{ChartProfile, Frame, PTMap};
use nilflow::group::{c_word, embedding_identity_check, Generator};
use nilflow::interval::{check_conditions, ParamConfig, CONDITION_NAMES};
use nilflow::lattice::{check_homomorphism, check_order_preservation};
use nilflow::{Convention, IntervalFamily, LatticePoint, N4Element, ParamSet, Realization, Word};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{RunConfig, Suite};
use crate::error::CliError;

/// Common envelope: command name, resolved config, chart profile hash.
fn envelope(command: &str, config: &RunConfig, profile: &ChartProfile, body: Value) -> Value {
    json!({
        "command": command,
        "config": config,
        "profile_hash": profile.content_hash(),
        "report": body,
    })
}

fn build_realization(config: &RunConfig, params: ParamSet, radius: i64) -> Result<Realization, CliError> {
    let family = IntervalFamily::build(params, radius)?;
    Ok(match config.verify.perturb_lengths {
        Some(eps) => Realization::build_perturbed(family, eps),
        None => Realization::build(family),
    })
}

fn parse_word(text: &str) -> Result<Word, CliError> {
    let word: Word = text.parse().map_err(|e: nilflow::Error| CliError::Usage(e.to_string()))?;
    Ok(word.expand_to_edf())
}

// ─── check-params ───────────────────────────────────────────────────────────

/// Reports the eight conditions. Auto mode is evaluated here for any
/// `α ∈ (0, 1)`, so that the closed form can be seen failing past 1/2.
pub fn check_params(config: &RunConfig) -> Result<(Value, bool), CliError> {
    let params = match config.params {
        ParamConfig::Auto { alpha, auto: true } => ParamSet::closed_form(alpha)?,
        _ => config.resolve_params()?,
    };
    let report = check_conditions(&params);
    let conditions: serde_json::Map<String, Value> = CONDITION_NAMES
        .iter()
        .zip(report.conditions)
        .map(|(name, ok)| (name.to_string(), Value::Bool(ok)))
        .collect();
    let body = json!({
        "params": params,
        "conditions": conditions,
        "failing": report.failing(),
        "feasible": report.feasible,
    });
    Ok((envelope("check-params", config, &ChartProfile::new(), body), report.feasible))
}

// ─── build ──────────────────────────────────────────────────────────────────

pub fn build(config: &RunConfig) -> Result<Value, CliError> {
    let params = config.resolve_params()?;
    let r = build_realization(config, params, config.radius)?;
    let family = r.family();
    let safe: serde_json::Map<String, Value> = [("e", Word::letter(Generator::E)), ("d", Word::letter(Generator::D)), ("f", Word::letter(Generator::F)), ("c", c_word())]
        .into_iter()
        .map(|(name, w)| (name.to_string(), json!(r.safe_domain(&w).len())))
        .collect();
    let body = json!({
        "params": params,
        "radius": family.radius(),
        "intervals": family.len(),
        "normalization": family.normalization(),
        "cached_charts": r.profile().cached_charts(),
        "safe_indices": safe,
    });
    Ok(envelope("build", config, r.profile(), body))
}

// ─── eval / export-layout ───────────────────────────────────────────────────

pub fn eval<W: Write>(config: &RunConfig, out: W) -> Result<(), CliError> {
    let params = config.resolve_params()?;
    let r = build_realization(config, params, config.radius)?;
    let word = parse_word(&config.eval.word)?;
    let xs = if config.eval.x.is_empty() {
        r.safe_domain(&word).into_iter().map(|idx| r.family().midpoint(idx)).collect::<Result<Vec<_>, _>>()?
    } else {
        config.eval.x.clone()
    };
    r.write_eval_csv(&word, &xs, out)?;
    Ok(())
}

pub fn export_layout<W: Write>(config: &RunConfig, out: W) -> Result<(), CliError> {
    let family = IntervalFamily::build(config.resolve_params()?, config.radius)?;
    family.write_csv(out)?;
    Ok(())
}

pub fn chart_table<W: Write>(ratio: f64, points: usize, mut out: W) -> Result<(), CliError> {
    if !(ratio.is_finite() && ratio > 0.0) || points == 0 {
        return Err(CliError::Usage(format!("need a positive ratio and at least one point, got {ratio}, {points}")));
    }
    let chart = ChartProfile::new().chart(ratio);
    writeln!(out, "u,h,dh")?;
    for n in 1..=points {
        let u = n as f64 / (points + 1) as f64;
        writeln!(out, "{u},{},{}", chart.eval(u)?, chart.density(u))?;
    }
    Ok(())
}

// ─── verify ─────────────────────────────────────────────────────────────────

#[derive(Debug, Serialize)]
pub struct SuiteResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn suite(name: &'static str, passed: bool, detail: String) -> SuiteResult {
    SuiteResult { name, passed, detail }
}

fn group_suite(seed: u64) -> Result<SuiteResult, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let random = |rng: &mut ChaCha8Rng| {
        let mut e = [0i64; 6];
        e.iter_mut().for_each(|x| *x = rng.gen_range(-10..=10));
        N4Element::new(e)
    };
    let samples = 2000;
    let mut failures = 0;
    for _ in 0..samples {
        let (g, h, k) = (random(&mut rng), random(&mut rng), random(&mut rng));
        let ok = N4Element::from_matrix(&g.to_matrix()?)? == g
            && g.multiply(&h)?.multiply(&k)? == g.multiply(&h.multiply(&k)?)?
            && g.multiply(&g.inverse()?)?.is_identity()
            && g.commutator(&h)?.commutator(&k)?.is_central();
        let (n1, n2, n3) = (rng.gen_range(-10..=10), rng.gen_range(1..=10), rng.gen_range(-10..=10));
        if !ok || !embedding_identity_check(n1, n2, n3)? {
            failures += 1;
        }
    }
    let rel = |s: &str, gen: Generator| -> Result<bool, CliError> {
        Ok(parse_word(s)?.evaluate()? == N4Element::generator(gen))
    };
    let relations = rel("f e f^-1 e^-1", Generator::A)? && rel("d f d^-1 f^-1", Generator::B)? && rel("d a d^-1 a^-1", Generator::C)?;
    Ok(suite(
        "group",
        failures == 0 && relations,
        format!("{samples} random triples, {failures} failures, commutator relations {}", if relations { "hold" } else { "fail" }),
    ))
}

fn lattice_suite(seed: u64) -> SuiteResult {
    let hom = check_homomorphism(10_000, seed, Convention::Interval);
    let ord = check_order_preservation(10_000, seed.wrapping_add(1), Convention::Interval);
    suite(
        "lattice",
        hom.passed() && ord.passed(),
        format!("{} homomorphism and {} order samples, {} violations", hom.samples, ord.samples, hom.violations + ord.violations),
    )
}

fn pt_suite(seed: u64) -> Result<SuiteResult, CliError> {
    let profile = ChartProfile::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let frame = |rng: &mut ChaCha8Rng| {
        let scale = 10f64.powf(rng.gen_range(-6.0..-1.0));
        Frame::new(rng.gen_range(0.0..0.5), scale * rng.gen_range(0.2..1.0), scale * rng.gen_range(0.2..1.0))
    };
    let (mut equiv, mut affine) = (0.0f64, 0.0f64);
    for _ in 0..200 {
        let (i, j, k) = (frame(&mut rng)?, frame(&mut rng)?, frame(&mut rng)?);
        let x = i.left + i.len * rng.gen_range(0.0..1.0);
        let via = PTMap::new(&profile, j, k).eval(PTMap::new(&profile, i, j).eval(x)?)?;
        equiv = equiv.max((via - PTMap::new(&profile, i, k).eval(x)?).abs());
        let s = rng.gen_range(0.1..3.0);
        let twin = Frame::new(j.left, i.len * s, i.prev_len * s)?;
        let exact = twin.left + s * (x - i.left);
        affine = affine.max((PTMap::new(&profile, i, twin).eval(x)? - exact).abs());
    }
    Ok(suite(
        "pt-contract",
        equiv < 1e-10 && affine < 1e-12,
        format!("equivariance residual {equiv:.3e} (< 1e-10), unit-ratio affinity {affine:.3e} (< 1e-12)"),
    ))
}

pub fn verify(config: &RunConfig) -> Result<(Value, Vec<String>), CliError> {
    let mut suites = vec![group_suite(config.seed)?, lattice_suite(config.seed)];
    let profile = if config.verify.suite == Suite::All {
        let params = config.resolve_params()?;
        let r = build_realization(config, params, config.radius)?;
        let perm = r.induced_permutation_check(1);
        suites.push(suite(
            "permutation",
            perm.passed(),
            format!("{} index checks, {} mismatches", perm.checked, perm.mismatches.len()),
        ));
        let c1 = r.check_c1_matching();
        suites.push(suite(
            "c1-matching",
            c1.endpoints > 0 && c1.max_log_mismatch < 1e-9,
            format!("max |log D+ - log D-| = {:.3e} over {} endpoints (< 1e-9)", c1.max_log_mismatch, c1.endpoints),
        ));
        suites.push(pt_suite(config.seed)?);
        r.profile().content_hash()
    } else {
        ChartProfile::new().content_hash()
    };
    let failed: Vec<String> = suites.iter().filter(|s| !s.passed).map(|s| s.name.to_string()).collect();
    let report = json!({
        "command": "verify",
        "config": config,
        "profile_hash": profile,
        "report": { "suites": suites, "passed": failed.is_empty() },
    });
    Ok((report, failed))
}

// ─── holder ─────────────────────────────────────────────────────────────────

pub fn holder(config: &RunConfig) -> Result<(Vec<HolderReport>, Value), CliError> {
    let params = config.resolve_params()?;
    let opts = &config.holder;
    if opts.alpha_list.iter().any(|a| !(*a > 0.0 && *a < 1.0)) {
        return Err(CliError::Usage(format!("Hölder exponents must lie in (0, 1): {:?}", opts.alpha_list)));
    }
    if opts.radius_list.iter().any(|&n| n < 1) {
        return Err(CliError::Usage(format!("N values must be positive: {:?}", opts.radius_list)));
    }
    let word = parse_word(&opts.word)?;
    let plan = SamplingPlan {
        points_per_interval: opts.points_per_interval,
        random_points: opts.random_points,
        seed: config.seed,
    };
    let mut reports = Vec::new();
    let mut profile_hash = ChartProfile::new().content_hash();
    for &n in &opts.radius_list {
        let r = build_realization(config, params, n)?;
        let samples = HolderSamples::collect(&r, &word, &plan)?;
        for &alpha in &opts.alpha_list {
            reports.push(samples.constant(alpha)?);
        }
        profile_hash = r.profile().content_hash();
    }
    let summary = json!({
        "command": "holder",
        "config": config,
        "profile_hash": profile_hash,
        "report": { "params": params, "sweep": reports },
    });
    Ok((reports, summary))
}

// ─── markov ─────────────────────────────────────────────────────────────────

pub fn markov(config: &RunConfig) -> Result<(Value, bool), CliError> {
    let params = config.resolve_params()?;
    let opts = &config.markov;
    if opts.d == 0 {
        return Err(CliError::Usage("d must be positive".into()));
    }
    let exponents = match (&opts.exponents, opts.d) {
        (Some(e), d) if e.len() == d => e.clone(),
        (Some(e), d) => return Err(CliError::Usage(format!("{} exponents given for d = {d}", e.len()))),
        (None, 3) => vec![params.p, params.q, params.r],
        (None, d) => return Err(CliError::Usage(format!("d = {d} needs explicit exponents"))),
    };
    let max = *opts.horizons.iter().max().ok_or_else(|| CliError::Usage("no horizons".into()))?;
    let lengths = PowerLengths::new(&exponents, max as usize);
    let report = markov_expectation(&lengths, params.alpha, opts.paths, &opts.horizons, config.seed)?;
    let mut unit = vec![0u64; opts.d];
    unit[0] = 1;
    let row: Vec<String> = transition_probabilities(&unit).iter().map(|p| p.to_string()).collect();
    let cauchy = report.is_cauchy(opts.tolerance);
    let body = json!({
        "exponents": exponents,
        "transition_from_unit": row,
        "estimate": report,
        "cauchy": cauchy,
    });
    Ok((envelope("markov", config, &ChartProfile::new(), body), cauchy))
}

// ─── obstruction ────────────────────────────────────────────────────────────

pub fn obstruction(config: &RunConfig) -> Result<(Value, bool), CliError> {
    let params = config.resolve_params()?;
    let r = build_realization(config, params, config.radius)?;
    let [i, j, k] = config.obstruction.base;
    let base = LatticePoint::new(i, j, k);
    if !r.family().contains(base) {
        return Err(CliError::Usage(format!("base {base} lies outside the box of radius {}", config.radius)));
    }
    let cert = lemma_main_certificate(&r, base)?;
    let lex = match config.obstruction.lex_radius {
        0 => None,
        radius => Some(lex_family_check(&r, base, radius)?),
    };
    let passed = cert.passed() && lex.as_ref().is_none_or(|l| l.passed());
    let body = json!({ "certificate": cert, "lex_family": lex, "passed": passed });
    Ok((envelope("obstruction", config, r.profile(), body), passed))
}
