//! Exact integer arithmetic in the group of 4×4 lower unitriangular integer
//! matrices.
//!
//! Elements are stored in the normal form `f^n1 e^n2 d^n3 a^n4 b^n5 c^n6`.
//! Multiplication goes through the matrix representation, which is exact and
//! serves as its own oracle. All arithmetic is checked; overflow is reported
//! as [`Error::Overflow`] and never wraps.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One of the six elementary generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Generator {
    F,
    E,
    D,
    A,
    B,
    C,
}

impl Generator {
    /// Normal-form order.
    pub const ALL: [Generator; 6] = [
        Generator::F,
        Generator::E,
        Generator::D,
        Generator::A,
        Generator::B,
        Generator::C,
    ];

    /// Zero-based (row, column) of the off-diagonal entry carrying this
    /// generator.
    pub fn slot(self) -> (usize, usize) {
        match self {
            Generator::E => (1, 0),
            Generator::A => (2, 0),
            Generator::F => (2, 1),
            Generator::C => (3, 0),
            Generator::B => (3, 1),
            Generator::D => (3, 2),
        }
    }

    pub fn letter(self) -> char {
        match self {
            Generator::F => 'f',
            Generator::E => 'e',
            Generator::D => 'd',
            Generator::A => 'a',
            Generator::B => 'b',
            Generator::C => 'c',
        }
    }

    pub fn from_letter(ch: char) -> Option<Self> {
        Some(match ch {
            'f' => Generator::F,
            'e' => Generator::E,
            'd' => Generator::D,
            'a' => Generator::A,
            'b' => Generator::B,
            'c' => Generator::C,
            _ => return None,
        })
    }

    fn index(self) -> usize {
        match self {
            Generator::F => 0,
            Generator::E => 1,
            Generator::D => 2,
            Generator::A => 3,
            Generator::B => 4,
            Generator::C => 5,
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

// ─────────────────────────────────────────────────────────────────────
// Matrices
// ─────────────────────────────────────────────────────────────────────

/// A 4×4 integer matrix. Group elements are the lower unitriangular ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntMatrix4(pub [[i64; 4]; 4]);

impl IntMatrix4 {
    pub fn identity() -> Self {
        let mut m = [[0; 4]; 4];
        for (r, row) in m.iter_mut().enumerate() {
            row[r] = 1;
        }
        IntMatrix4(m)
    }

    /// `I + n·E_slot`, the matrix of `gen^n`.
    pub fn generator_power(gen: Generator, n: i64) -> Self {
        let mut m = Self::identity();
        let (r, c) = gen.slot();
        m.0[r][c] = n;
        m
    }

    pub fn entry(&self, row: usize, col: usize) -> i64 {
        self.0[row][col]
    }

    pub fn is_lower_unitriangular(&self) -> bool {
        (0..4).all(|r| {
            (0..4).all(|c| match c.cmp(&r) {
                std::cmp::Ordering::Equal => self.0[r][c] == 1,
                std::cmp::Ordering::Greater => self.0[r][c] == 0,
                std::cmp::Ordering::Less => true,
            })
        })
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        let mut out = [[0i64; 4]; 4];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, slot) in row.iter_mut().enumerate() {
                let mut acc: i64 = 0;
                for k in 0..4 {
                    let term = self.0[r][k]
                        .checked_mul(other.0[k][c])
                        .ok_or(Error::Overflow("matrix product"))?;
                    acc = acc
                        .checked_add(term)
                        .ok_or(Error::Overflow("matrix product"))?;
                }
                *slot = acc;
            }
        }
        Ok(IntMatrix4(out))
    }

    /// Inverse of a unitriangular matrix: `I − N + N² − N³` with `N = M − I`
    /// nilpotent.
    pub fn checked_unitriangular_inverse(&self) -> Result<Self> {
        if !self.is_lower_unitriangular() {
            return Err(Error::InvalidParameter(
                "matrix is not lower unitriangular".into(),
            ));
        }
        let mut nil = self.0;
        for (r, row) in nil.iter_mut().enumerate() {
            row[r] = 0;
        }
        let nil = IntMatrix4(nil);
        let n2 = nil.checked_mul(&nil)?;
        let n3 = n2.checked_mul(&nil)?;
        let mut out = Self::identity().0;
        for r in 0..4 {
            for c in 0..4 {
                let v = out[r][c]
                    .checked_sub(nil.0[r][c])
                    .and_then(|v| v.checked_add(n2.0[r][c]))
                    .and_then(|v| v.checked_sub(n3.0[r][c]))
                    .ok_or(Error::Overflow("matrix inverse"))?;
                out[r][c] = v;
            }
        }
        Ok(IntMatrix4(out))
    }

    /// Reads off the normal-form exponents.
    ///
    /// Expanding the normal-form product gives
    /// `M21 = n2`, `M32 = n1`, `M43 = n3`, `M42 = n5`,
    /// `M31 = n1·n2 + n4` and `M41 = n3·n4 + n6`.
    pub fn to_element(&self) -> Result<N4Element> {
        if !self.is_lower_unitriangular() {
            return Err(Error::InvalidParameter(
                "matrix is not lower unitriangular".into(),
            ));
        }
        let m = &self.0;
        let n2 = m[1][0];
        let n1 = m[2][1];
        let n3 = m[3][2];
        let n5 = m[3][1];
        let n4 = n1
            .checked_mul(n2)
            .and_then(|v| m[2][0].checked_sub(v))
            .ok_or(Error::Overflow("normal form extraction"))?;
        let n6 = n3
            .checked_mul(n4)
            .and_then(|v| m[3][0].checked_sub(v))
            .ok_or(Error::Overflow("normal form extraction"))?;
        Ok(N4Element::new([n1, n2, n3, n4, n5, n6]))
    }
}

// ─────────────────────────────────────────────────────────────────────
// Group elements
// ─────────────────────────────────────────────────────────────────────

/// An element in normal form `f^n1 e^n2 d^n3 a^n4 b^n5 c^n6`.
///
/// Normal forms are unique, so structural equality is group equality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct N4Element {
    exps: [i64; 6],
}

impl N4Element {
    pub const fn new(exps: [i64; 6]) -> Self {
        N4Element { exps }
    }

    pub const fn identity() -> Self {
        N4Element { exps: [0; 6] }
    }

    pub fn generator(gen: Generator) -> Self {
        Self::power(gen, 1)
    }

    pub fn power(gen: Generator, n: i64) -> Self {
        let mut exps = [0; 6];
        exps[gen.index()] = n;
        N4Element { exps }
    }

    pub fn exponents(&self) -> [i64; 6] {
        self.exps
    }

    pub fn exponent(&self, gen: Generator) -> i64 {
        self.exps[gen.index()]
    }

    pub fn is_identity(&self) -> bool {
        self.exps == [0; 6]
    }

    /// True when the element lies in the center `⟨c⟩`.
    pub fn is_central(&self) -> bool {
        self.exps[..5].iter().all(|&n| n == 0)
    }

    /// True when the element lies in the derived subgroup `⟨a, b, c⟩`.
    pub fn in_derived_subgroup(&self) -> bool {
        self.exps[..3].iter().all(|&n| n == 0)
    }

    pub fn to_matrix(&self) -> Result<IntMatrix4> {
        let mut m = IntMatrix4::identity();
        for gen in Generator::ALL {
            let n = self.exponent(gen);
            if n != 0 {
                m = m.checked_mul(&IntMatrix4::generator_power(gen, n))?;
            }
        }
        Ok(m)
    }

    pub fn from_matrix(m: &IntMatrix4) -> Result<Self> {
        m.to_element()
    }

    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.to_matrix()?
            .checked_mul(&other.to_matrix()?)?
            .to_element()
    }

    pub fn inverse(&self) -> Result<Self> {
        self.to_matrix()?
            .checked_unitriangular_inverse()?
            .to_element()
    }

    /// `[g, h] = g h g⁻¹ h⁻¹`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        let gh = self.multiply(other)?;
        let ginv = self.inverse()?;
        let hinv = other.inverse()?;
        gh.multiply(&ginv)?.multiply(&hinv)
    }

    /// `self^n` for any integer `n`, by repeated squaring.
    pub fn pow(&self, n: i64) -> Result<Self> {
        let mut base = if n < 0 { self.inverse()? } else { *self };
        let mut e = n.unsigned_abs();
        let mut acc = Self::identity();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.multiply(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.multiply(&base)?;
            }
        }
        Ok(acc)
    }

    /// The normal form read as a word.
    pub fn to_word(&self) -> Word {
        Word::from_factors(Generator::ALL.iter().map(|&g| (g, self.exponent(g))))
    }
}

impl fmt::Display for N4Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_word())
    }
}

impl FromStr for N4Element {
    type Err = Error;

    /// Accepts any word in the six letters; the result is reduced to normal
    /// form.
    fn from_str(s: &str) -> Result<Self> {
        s.parse::<Word>()?.evaluate()
    }
}

// ─────────────────────────────────────────────────────────────────────
// Words
// ─────────────────────────────────────────────────────────────────────

/// A finite product of generator powers, read left to right.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Word {
    factors: Vec<(Generator, i64)>,
}

impl Word {
    pub fn empty() -> Self {
        Word::default()
    }

    /// Zero exponents are dropped; adjacent equal letters are not merged.
    pub fn from_factors<I: IntoIterator<Item = (Generator, i64)>>(factors: I) -> Self {
        Word {
            factors: factors.into_iter().filter(|&(_, n)| n != 0).collect(),
        }
    }

    pub fn letter(gen: Generator) -> Self {
        Word::from_factors([(gen, 1)])
    }

    pub fn factors(&self) -> &[(Generator, i64)] {
        &self.factors
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut factors = self.factors.clone();
        factors.extend_from_slice(&other.factors);
        Word { factors }
    }

    /// Formal inverse: reversed order, negated exponents.
    pub fn inverse(&self) -> Word {
        Word {
            factors: self.factors.iter().rev().map(|&(g, n)| (g, -n)).collect(),
        }
    }

    /// The formal commutator `u v u⁻¹ v⁻¹`.
    pub fn commutator(u: &Word, v: &Word) -> Word {
        u.concat(v).concat(&u.inverse()).concat(&v.inverse())
    }

    pub fn evaluate(&self) -> Result<N4Element> {
        self.factors
            .iter()
            .try_fold(N4Element::identity(), |acc, &(g, n)| {
                acc.multiply(&N4Element::power(g, n))
            })
    }

    /// Replaces every `a`, `b`, `c` by its commutator expression in `e, d, f`:
    /// `a = [f,e]`, `b = [d,f]`, `c = [d,a]`.
    pub fn expand_to_edf(&self) -> Word {
        let mut out = Vec::new();
        for &(g, n) in &self.factors {
            let block = match g {
                Generator::A => Some(a_word()),
                Generator::B => Some(b_word()),
                Generator::C => Some(c_word()),
                _ => None,
            };
            match block {
                None => out.push((g, n)),
                Some(w) => {
                    let w = if n < 0 { w.inverse() } else { w };
                    for _ in 0..n.unsigned_abs() {
                        out.extend_from_slice(&w.factors);
                    }
                }
            }
        }
        Word { factors: out }
    }
}

/// `a = [f, e]` as a word in `e, d, f`.
pub fn a_word() -> Word {
    Word::commutator(&Word::letter(Generator::F), &Word::letter(Generator::E))
}

/// `b = [d, f]` as a word in `e, d, f`.
pub fn b_word() -> Word {
    Word::commutator(&Word::letter(Generator::D), &Word::letter(Generator::F))
}

/// `c = [d, a] = [d, [f, e]]` as a word in `e, d, f`.
pub fn c_word() -> Word {
    Word::commutator(&Word::letter(Generator::D), &a_word())
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        for (pos, &(g, n)) in self.factors.iter().enumerate() {
            if pos > 0 {
                write!(f, " ")?;
            }
            if n == 1 {
                write!(f, "{g}")?;
            } else {
                write!(f, "{g}^{n}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;

    /// Grammar: a sequence of letters from `fedabc`, each optionally followed
    /// by `^n` or `^{n}` with a signed integer `n`. Whitespace is ignored.
    /// The string `1` (or an empty string) is the empty word.
    fn from_str(s: &str) -> Result<Self> {
        let trimmed = s.trim();
        if trimmed.is_empty() || trimmed == "1" {
            return Ok(Word::empty());
        }
        let chars: Vec<char> = trimmed.chars().filter(|c| !c.is_whitespace()).collect();
        let mut pos = 0;
        let mut factors = Vec::new();
        while pos < chars.len() {
            let ch = chars[pos];
            let gen = Generator::from_letter(ch)
                .ok_or_else(|| Error::Parse(format!("unexpected character `{ch}`")))?;
            pos += 1;
            let mut exp = 1i64;
            if pos < chars.len() && chars[pos] == '^' {
                pos += 1;
                let braced = pos < chars.len() && chars[pos] == '{';
                if braced {
                    pos += 1;
                }
                let start = pos;
                if pos < chars.len() && (chars[pos] == '-' || chars[pos] == '+') {
                    pos += 1;
                }
                while pos < chars.len() && chars[pos].is_ascii_digit() {
                    pos += 1;
                }
                let digits: String = chars[start..pos].iter().collect();
                exp = digits
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad exponent `{digits}` after `{ch}`")))?;
                if braced {
                    if pos >= chars.len() || chars[pos] != '}' {
                        return Err(Error::Parse("unterminated `{` in exponent".into()));
                    }
                    pos += 1;
                }
            }
            factors.push((gen, exp));
        }
        Ok(Word::from_factors(factors))
    }
}

/// Checks `[d^n1 e^n2, a^n1 b^-n2 c^n3] = c^(n1² + n2²)`, the identity behind
/// the injectivity criterion (a homomorphism that is faithful on `c` is
/// faithful).
pub fn embedding_identity_check(n1: i64, n2: i64, n3: i64) -> Result<bool> {
    if n1 == 0 && n2 == 0 {
        return Err(Error::InvalidParameter(
            "(n1, n2) must not be (0, 0)".into(),
        ));
    }
    let left = N4Element::power(Generator::D, n1)
        .multiply(&N4Element::power(Generator::E, n2))?;
    let neg_n2 = n2.checked_neg().ok_or(Error::Overflow("exponent"))?;
    let right = N4Element::new([0, 0, 0, n1, neg_n2, n3]);
    let expected_exp = n1
        .checked_mul(n1)
        .and_then(|s| n2.checked_mul(n2).and_then(|t| s.checked_add(t)))
        .ok_or(Error::Overflow("n1^2 + n2^2"))?;
    Ok(left.commutator(&right)? == N4Element::power(Generator::C, expected_exp))
}
