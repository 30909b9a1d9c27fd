//! Orbit hulls `J_g(x₀)`, the moves/fixes dichotomy, the three-element
//! certificate for `(e, d, c)`, the lexicographic family generated by
//! `(e, d, c⁻¹)`, and translation numbers read off block indices.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{c_word, Generator, N4Element, Word};
use crate::lattice::LatticePoint;
use crate::realization::Realization;

/// Relative tolerance for comparing orbit points.
const POINT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JInterval {
    pub word: String,
    pub x0: f64,
    pub inf: f64,
    pub sup: f64,
    /// Orbit points with their interval indices, ordered by exponent
    /// `n = −back, …, forward`.
    pub orbit: Vec<(i64, f64, LatticePoint)>,
}

impl JInterval {
    pub fn length(&self) -> f64 {
        self.sup - self.inf
    }
}

/// Iterates `g^{±1}` from `x0` up to `horizon` times in each direction,
/// stopping early where the orbit leaves the safe domain.
pub fn j_interval(realization: &Realization, g: &Word, x0: f64, horizon: usize) -> Result<JInterval> {
    let start = realization
        .family()
        .locate(x0)
        .ok_or(Error::OutsideInterval { x: x0, left: 0.0, right: 1.0 })?;
    let mut orbit = vec![(0i64, x0, start)];
    for (dir, word) in [(1i64, g.clone()), (-1, g.inverse())] {
        let (mut x, mut idx) = (x0, start);
        for n in 1..=horizon as i64 {
            match realization.apply_word_at(&word, x, idx) {
                Ok(ev) => {
                    x = ev.value;
                    idx = ev.index;
                    orbit.push((dir * n, x, idx));
                }
                Err(Error::Unsafe { .. }) => break,
                Err(e) => return Err(e),
            }
        }
    }
    orbit.sort_by_key(|o| o.0);
    let inf = orbit.iter().map(|o| o.1).fold(f64::INFINITY, f64::min);
    let sup = orbit.iter().map(|o| o.1).fold(f64::NEG_INFINITY, f64::max);
    Ok(JInterval { word: g.to_string(), x0, inf, sup, orbit })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    Moves,
    Fixes,
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= POINT_TOL * a.abs().max(b.abs()).max(1e-300) + 1e-300
}

/// `Moves` if `h(J)` and `J` have disjoint interiors, `Fixes` if `h` maps
/// the orbit back into `J`. The orbit is truncated, so for `Fixes` one
/// orbit point (the extreme one on the side `h` pushes toward) may map
/// outside or out of the box. Anything else is a consistency failure.
pub fn moves(realization: &Realization, h: &Word, j: &JInterval) -> Result<Relation> {
    let mut images = Vec::with_capacity(j.orbit.len());
    for &(_, x, idx) in &j.orbit {
        match realization.apply_word_at(h, x, idx) {
            Ok(ev) => images.push((x, Some(ev.value))),
            Err(Error::Unsafe { .. }) => images.push((x, None)),
            Err(e) => return Err(e),
        }
    }
    let extremes_known = images.iter().filter(|o| o.0 == j.inf || o.0 == j.sup).all(|o| o.1.is_some());
    let computed: Vec<f64> = images.iter().filter_map(|o| o.1).collect();
    if computed.is_empty() {
        return Err(Error::Consistency(format!("{h} cannot be applied anywhere on J_{}({})", j.word, j.x0)));
    }
    let left_of = |y: f64| y <= j.inf || close(y, j.inf);
    let right_of = |y: f64| y >= j.sup || close(y, j.sup);
    if extremes_known && (computed.iter().all(|&y| left_of(y)) || computed.iter().all(|&y| right_of(y))) {
        return Ok(Relation::Moves);
    }
    let inside = |y: f64| (y >= j.inf || close(y, j.inf)) && (y <= j.sup || close(y, j.sup));
    let escaped = images.iter().filter(|o| !o.1.is_some_and(inside)).count();
    if escaped <= 1 {
        Ok(Relation::Fixes)
    } else {
        Err(Error::Consistency(format!(
            "{h} neither moves nor fixes J_{}({}) = [{}, {}]: {escaped} orbit images escape",
            j.word, j.x0, j.inf, j.sup
        )))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub base: LatticePoint,
    pub x0: f64,
    /// `J_c(x₀)` is not a point.
    pub nondegenerate: bool,
    /// `d` moves `J_c(x₀)`.
    pub d_moves_jc: bool,
    /// `e` moves `J_d(x₀)`.
    pub e_moves_jd: bool,
    /// `e, d, c` commute pairwise.
    pub commute: bool,
    pub jc: (f64, f64),
    pub jd: (f64, f64),
}

impl Certificate {
    pub fn passed(&self) -> bool {
        self.nondegenerate && self.d_moves_jc && self.e_moves_jd && self.commute
    }
}

fn commute_pairwise(elems: &[N4Element]) -> Result<bool> {
    for (n, a) in elems.iter().enumerate() {
        for b in &elems[n + 1..] {
            if !a.commutator(b)?.is_identity() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Whether `I_base` admits the certificate: the `c`-word is safe there, and
/// `d` and `e` can each be applied once to the relevant orbit hulls.
pub fn is_certificate_base(realization: &Realization, base: LatticePoint) -> bool {
    let n = realization.family().radius();
    realization.is_safe(&c_word(), base) && base.i < n && base.j < n
}

/// Checks the three conditions for `(g₁, g₂, g₃) = (e, d, c)` at the
/// midpoint of `I_base`.
pub fn lemma_main_certificate(realization: &Realization, base: LatticePoint) -> Result<Certificate> {
    if !is_certificate_base(realization, base) {
        return Err(Error::Unsafe { prefix: "certificate base".into(), index: base });
    }
    let x0 = realization.family().midpoint(base)?;
    let horizon = 4 * realization.family().len();
    let (e, d, c) = (Word::letter(Generator::E), Word::letter(Generator::D), c_word());
    let jc = j_interval(realization, &c, x0, horizon)?;
    let jd = j_interval(realization, &d, x0, horizon)?;
    let commute = commute_pairwise(&[e.evaluate()?, d.evaluate()?, c.evaluate()?])?;
    Ok(Certificate {
        base,
        x0,
        nondegenerate: jc.length() > 0.0,
        d_moves_jc: moves(realization, &d, &jc)? == Relation::Moves,
        e_moves_jd: moves(realization, &e, &jd)? == Relation::Moves,
        commute,
        jc: (jc.inf, jc.sup),
        jd: (jd.inf, jd.sup),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LexReport {
    pub base: LatticePoint,
    pub radius: i64,
    pub intervals: usize,
    pub failures: Vec<String>,
}

impl LexReport {
    pub fn passed(&self) -> bool {
        self.intervals > 0 && self.failures.is_empty()
    }
}

/// `w(n) = e^{n₁} d^{n₂} c^{−n₃}` as a word in `e, d, f`.
fn lex_word(n: [i64; 3]) -> Word {
    let c_inv = c_word().inverse();
    let mut w = Word::from_factors([(Generator::E, n[0]), (Generator::D, n[1])]);
    for _ in 0..n[2].unsigned_abs() {
        w = w.concat(&if n[2] > 0 { c_inv.clone() } else { c_word() });
    }
    w
}

/// Builds `I_n := e^{n₁} d^{n₂} c^{−n₃}(I_base)` for `|n_i| ≤ radius` and
/// checks that the images are the layout intervals at `base + n`, that
/// they are disjoint and ordered like `n`, and that each generator of the
/// triple shifts its own coordinate.
pub fn lex_family_check(realization: &Realization, base: LatticePoint, radius: i64) -> Result<LexReport> {
    let family = realization.family();
    let (left0, right0) = (family.left_endpoint(base)?, family.right_endpoint(base)?);
    let mut report = LexReport { base, radius, intervals: 0, failures: Vec::new() };
    let mut images: Vec<([i64; 3], f64, f64)> = Vec::new();
    let range = -radius..=radius;
    for n1 in range.clone() {
        for n2 in range.clone() {
            for n3 in range.clone() {
                let n = [n1, n2, n3];
                let word = lex_word(n);
                let target = LatticePoint::new(base.i + n1, base.j + n2, base.k + n3);
                let (a, b) = match (
                    realization.apply_word_at(&word, left0, base),
                    realization.apply_word_at(&word, right0, base),
                ) {
                    (Ok(a), Ok(b)) => (a, b),
                    (Err(e), _) | (_, Err(e)) => {
                        report.failures.push(format!("{n:?}: {e}"));
                        continue;
                    }
                };
                report.intervals += 1;
                let (tl, tr) = (family.left_endpoint(target)?, family.right_endpoint(target)?);
                if a.index != target || !close(a.value, tl) || !close(b.value, tr) {
                    report.failures.push(format!(
                        "{n:?}: image [{}, {}] in {} differs from layout interval {target} = [{tl}, {tr}]",
                        a.value, b.value, a.index
                    ));
                }
                images.push((n, a.value, b.value));
            }
        }
    }
    // lex order of n must be the order on the line, with disjoint interiors
    images.sort_by_key(|x| x.0);
    for w in images.windows(2) {
        let (prev, next) = (&w[0], &w[1]);
        if !(prev.2 <= next.1 || close(prev.2, next.1)) {
            report.failures.push(format!("{:?} and {:?} are not disjoint and ordered", prev.0, next.0));
        }
    }
    // shift property: f_i(I_n) = I_{n + e_i}
    let shifts = [Word::letter(Generator::E), Word::letter(Generator::D), c_word().inverse()];
    for &(n, l, r) in &images {
        for (axis, f) in shifts.iter().enumerate() {
            let mut m = n;
            m[axis] += 1;
            if m[axis] > radius {
                continue;
            }
            let Some(&(_, ml, mr)) = images.iter().find(|x| x.0 == m) else { continue };
            let idx = LatticePoint::new(base.i + n[0], base.j + n[1], base.k + n[2]);
            // the c-word passes through k ± ij, which can leave the box
            let (fl, fr) = match (realization.apply_word_at(f, l, idx), realization.apply_word_at(f, r, idx)) {
                (Ok(a), Ok(b)) => (a.value, b.value),
                (Err(Error::Unsafe { .. }), _) | (_, Err(Error::Unsafe { .. })) => continue,
                (Err(e), _) | (_, Err(e)) => return Err(e),
            };
            if !close(fl, ml) || !close(fr, mr) {
                report.failures.push(format!("generator {axis} does not shift {n:?} onto {m:?}"));
            }
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranslationReport {
    pub word: String,
    pub iterates: usize,
    /// Mean displacement per iterate of `(i, j, k)`.
    pub per_direction: [f64; 3],
}

/// Applies `g` `n` times from `x0` and reports the average block-index
/// displacement per iterate in each lattice direction.
pub fn translation_number(realization: &Realization, g: &Word, x0: f64, n: usize) -> Result<TranslationReport> {
    if n == 0 {
        return Err(Error::InvalidParameter("need at least one iterate".into()));
    }
    let start = realization
        .family()
        .locate(x0)
        .ok_or(Error::OutsideInterval { x: x0, left: 0.0, right: 1.0 })?;
    let (mut x, mut idx) = (x0, start);
    for step in 0..n {
        match realization.apply_word_at(g, x, idx) {
            Ok(ev) => {
                x = ev.value;
                idx = ev.index;
            }
            Err(Error::Unsafe { .. }) => {
                return Err(Error::HorizonExhausted(format!(
                    "{g} left the box after {step} of {n} iterates from {start}"
                )))
            }
            Err(e) => return Err(e),
        }
    }
    let nf = n as f64;
    Ok(TranslationReport {
        word: g.to_string(),
        iterates: n,
        per_direction: [
            (idx.i - start.i) as f64 / nf,
            (idx.j - start.j) as f64 / nf,
            (idx.k - start.k) as f64 / nf,
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::{IntervalFamily, ParamSet};
    use std::sync::OnceLock;

    fn realization() -> &'static Realization {
        static R: OnceLock<Realization> = OnceLock::new();
        R.get_or_init(|| {
            let params = ParamSet::new(0.4, 10.0, 10.0, 4.0 / 3.0).unwrap();
            Realization::build(IntervalFamily::build(params, 4).unwrap())
        })
    }

    fn p(i: i64, j: i64, k: i64) -> LatticePoint {
        LatticePoint::new(i, j, k)
    }

    #[test]
    fn jc_spans_the_k_column() {
        let r = realization();
        let x0 = r.family().midpoint(p(0, 0, 0)).unwrap();
        let jc = j_interval(r, &c_word(), x0, 50).unwrap();
        assert!(jc.inf <= x0 && x0 <= jc.sup);
        let ks: Vec<i64> = jc.orbit.iter().map(|o| o.2.k).collect();
        assert!(jc.orbit.iter().all(|o| o.2.i == 0 && o.2.j == 0));
        assert_eq!(*ks.iter().min().unwrap(), -4);
        assert_eq!(*ks.iter().max().unwrap(), 4);
    }

    #[test]
    fn moves_and_fixes() {
        let r = realization();
        let x0 = r.family().midpoint(p(0, 0, 0)).unwrap();
        let jc = j_interval(r, &c_word(), x0, 50).unwrap();
        assert_eq!(moves(r, &Word::letter(Generator::D), &jc).unwrap(), Relation::Moves);
        assert_eq!(moves(r, &c_word(), &jc).unwrap(), Relation::Fixes);
        assert_eq!(moves(r, &c_word().inverse(), &jc).unwrap(), Relation::Fixes);
    }

    #[test]
    fn certificate_at_origin() {
        let r = realization();
        let cert = lemma_main_certificate(r, p(0, 0, 0)).unwrap();
        assert!(cert.passed(), "{cert:?}");
        assert!(lemma_main_certificate(r, p(4, 0, 0)).is_err());
    }

    #[test]
    fn lex_family_around_origin() {
        let rep = lex_family_check(realization(), p(0, 0, 0), 1).unwrap();
        assert_eq!(rep.intervals, 27);
        assert!(rep.passed(), "{:?}", rep.failures);
    }

    #[test]
    fn translation_numbers() {
        let r = realization();
        let x0 = r.family().midpoint(p(-3, 0, 0)).unwrap();
        let e = translation_number(r, &"e".parse().unwrap(), x0, 6).unwrap();
        assert_eq!(e.per_direction, [1.0, 0.0, 0.0]);
        let x1 = r.family().midpoint(p(-4, 2, 0)).unwrap();
        let ed = translation_number(r, &"e^2 d^-1".parse().unwrap(), x1, 3).unwrap();
        assert_eq!(ed.per_direction, [2.0, -1.0, 0.0]);
        // f fixes every interval of the i = 0 plane
        let f = translation_number(r, &"f".parse().unwrap(), r.family().midpoint(p(0, 1, 1)).unwrap(), 5).unwrap();
        assert_eq!(f.per_direction, [0.0, 0.0, 0.0]);
        assert!(matches!(
            translation_number(r, &"e".parse().unwrap(), x0, 20),
            Err(Error::HorizonExhausted(_))
        ));
    }
}
