//! Words in a free group of finite rank.
//!
//! Letters are signed generator indices: `i` is the `i`-th generator and `-i`
//! its inverse, with generators numbered from 1. Words are always kept freely
//! reduced. Cyclic words are stored as cyclically reduced letter sequences in a
//! particular rotation; [`CyclicWord::canonical`] picks the representative of
//! the class under rotation and inversion.
//!
//! ASCII syntax: `a`..`z` are generators 1..26 and `A`..`Z` their inverses.
//! For larger ranks `x<n>` / `X<n>` name generator `n` and its inverse. A token
//! may carry an exponent (`a^3`, `b^-2`). `1` or the empty string denote the
//! identity; whitespace and `.` are ignored.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// A signed generator index.
pub type Letter = i32;

/// Sort key realising the letter order `1 < -1 < 2 < -2 < ...`.
#[inline]
pub fn letter_key(l: Letter) -> (u32, bool) {
    (l.unsigned_abs(), l < 0)
}

/// Compares letter sequences lexicographically under [`letter_key`].
pub fn cmp_letters(a: &[Letter], b: &[Letter]) -> Ordering {
    a.iter()
        .map(|&l| letter_key(l))
        .cmp(b.iter().map(|&l| letter_key(l)))
}

/// The generating set of a free group `F_r`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Alphabet {
    rank: usize,
}

impl Alphabet {
    pub fn new(rank: usize) -> Result<Self> {
        if rank == 0 {
            return Err(Error::EmptyAlphabet);
        }
        Ok(Alphabet { rank })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// All letters in canonical order: `1, -1, 2, -2, ...`.
    pub fn letters(&self) -> impl Iterator<Item = Letter> + Clone {
        (1..=self.rank as Letter).flat_map(|g| [g, -g])
    }

    pub fn contains(&self, l: Letter) -> bool {
        l != 0 && l.unsigned_abs() as usize <= self.rank
    }

    pub fn check(&self, letters: &[Letter]) -> Result<()> {
        match letters.iter().find(|&&l| !self.contains(l)) {
            Some(&letter) => Err(Error::LetterOutOfRange {
                letter,
                rank: self.rank,
            }),
            None => Ok(()),
        }
    }

    /// Freely reduces a raw letter sequence over this alphabet.
    pub fn reduce(&self, letters: &[Letter]) -> Result<Word> {
        self.check(letters)?;
        Ok(Word::from_raw(letters.iter().copied()))
    }

    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let raw = parse_letters(text)?;
        self.check(&raw)?;
        Ok(Word::from_raw(raw))
    }

    /// Renders letters in the ASCII syntax appropriate for this rank.
    pub fn format(&self, letters: &[Letter]) -> String {
        format_letters(letters, self.rank > 26)
    }
}

/// Parses the ASCII syntax into a raw (not necessarily reduced) sequence.
pub fn parse_letters(text: &str) -> Result<Vec<Letter>> {
    let trimmed = text.trim();
    if trimmed.is_empty() || trimmed == "1" {
        return Ok(Vec::new());
    }
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let start = i;
        let c = bytes[i];
        if c.is_ascii_whitespace() || c == b'.' {
            i += 1;
            continue;
        }
        let letter = if c == b'x' || c == b'X' {
            let mut j = i + 1;
            while j < bytes.len() && bytes[j].is_ascii_digit() {
                j += 1;
            }
            if j > i + 1 {
                let n: i64 = text[i + 1..j]
                    .parse()
                    .map_err(|_| Error::parse_at(text, start, &text[start..j], "bad index"))?;
                if n == 0 || n > i32::MAX as i64 {
                    return Err(Error::parse_at(
                        text,
                        start,
                        &text[start..j],
                        "generator index must be positive",
                    ));
                }
                i = j;
                if c == b'x' {
                    n as Letter
                } else {
                    -(n as Letter)
                }
            } else {
                i += 1;
                if c == b'x' {
                    24
                } else {
                    -24
                }
            }
        } else if c.is_ascii_lowercase() {
            i += 1;
            (c - b'a' + 1) as Letter
        } else if c.is_ascii_uppercase() {
            i += 1;
            -((c - b'A' + 1) as Letter)
        } else {
            let end = text[start..]
                .char_indices()
                .nth(1)
                .map_or(text.len(), |(k, _)| start + k);
            return Err(Error::parse_at(
                text,
                start,
                &text[start..end],
                "unexpected character",
            ));
        };
        // optional exponent
        if i < bytes.len() && bytes[i] == b'^' {
            let exp_start = i;
            let mut j = i + 1;
            if j < bytes.len() && bytes[j] == b'-' {
                j += 1;
            }
            let digits = j;
            while j < bytes.len() && bytes[j].is_ascii_digit() {
                j += 1;
            }
            if j == digits {
                return Err(Error::parse_at(
                    text,
                    exp_start,
                    &text[exp_start..j],
                    "exponent needs digits",
                ));
            }
            let e: i64 = text[exp_start + 1..j].parse().map_err(|_| {
                Error::parse_at(text, exp_start, &text[exp_start..j], "bad exponent")
            })?;
            if e.unsigned_abs() > 1 << 20 {
                return Err(Error::parse_at(
                    text,
                    exp_start,
                    &text[exp_start..j],
                    "exponent too large",
                ));
            }
            let l = if e < 0 { -letter } else { letter };
            out.extend(std::iter::repeat_n(l, e.unsigned_abs() as usize));
            i = j;
        } else {
            out.push(letter);
        }
    }
    Ok(out)
}

/// Renders a letter sequence. `indexed` forces the `x<n>` token form.
pub fn format_letters(letters: &[Letter], indexed: bool) -> String {
    if letters.is_empty() {
        return "1".to_string();
    }
    let indexed = indexed || letters.iter().any(|l| l.unsigned_abs() > 26);
    let mut s = String::with_capacity(letters.len() * if indexed { 3 } else { 1 });
    for &l in letters {
        if indexed {
            s.push(if l > 0 { 'x' } else { 'X' });
            s.push_str(&l.unsigned_abs().to_string());
        } else {
            let base = if l > 0 { b'a' } else { b'A' };
            s.push((base + (l.unsigned_abs() as u8 - 1)) as char);
        }
    }
    s
}

/// A freely reduced word. The empty word is the identity.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn identity() -> Self {
        Word::default()
    }

    /// Freely reduces an arbitrary sequence of nonzero letters.
    pub fn from_raw(letters: impl IntoIterator<Item = Letter>) -> Self {
        let mut stack: Vec<Letter> = Vec::new();
        for l in letters {
            debug_assert!(l != 0, "zero is not a letter");
            if stack.last() == Some(&-l) {
                stack.pop();
            } else {
                stack.push(l);
            }
        }
        Word { letters: stack }
    }

    pub fn generator(g: Letter) -> Self {
        Word { letters: vec![g] }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    /// Largest generator index used, 0 for the identity.
    pub fn max_generator(&self) -> usize {
        self.letters
            .iter()
            .map(|l| l.unsigned_abs() as usize)
            .max()
            .unwrap_or(0)
    }

    pub fn inverse(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(|&l| -l).collect(),
        }
    }

    pub fn mul(&self, other: &Word) -> Word {
        let mut k = 0;
        let (a, b) = (&self.letters, &other.letters);
        while k < a.len() && k < b.len() && a[a.len() - 1 - k] == -b[k] {
            k += 1;
        }
        let mut letters = Vec::with_capacity(a.len() + b.len() - 2 * k);
        letters.extend_from_slice(&a[..a.len() - k]);
        letters.extend_from_slice(&b[k..]);
        Word { letters }
    }

    pub fn pow(&self, n: i64) -> Word {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut acc = Word::identity();
        for _ in 0..n.unsigned_abs() {
            acc = acc.mul(&base);
        }
        acc
    }

    /// `t⁻¹ · self · t`.
    pub fn conjugate_by(&self, t: &Word) -> Word {
        t.inverse().mul(self).mul(t)
    }

    pub fn cmp_shortlex(&self, other: &Word) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| cmp_letters(&self.letters, &other.letters))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_letters(&self.letters, false))
    }
}

impl serde::Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl std::ops::Mul for &Word {
    type Output = Word;

    fn mul(self, rhs: &Word) -> Word {
        Word::mul(self, rhs)
    }
}

/// A cyclically reduced word, kept in a specific rotation.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct CyclicWord {
    letters: Vec<Letter>,
}

impl CyclicWord {
    pub fn new(letters: Vec<Letter>) -> Result<Self> {
        if !is_cyclically_reduced(&letters) {
            return Err(Error::NotCyclicallyReduced);
        }
        Ok(CyclicWord { letters })
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn to_word(&self) -> Word {
        Word {
            letters: self.letters.clone(),
        }
    }

    pub fn inverse(&self) -> CyclicWord {
        CyclicWord {
            letters: self.letters.iter().rev().map(|&l| -l).collect(),
        }
    }

    pub fn pow(&self, n: usize) -> CyclicWord {
        CyclicWord {
            letters: self.letters.repeat(n),
        }
    }

    /// Offset of the lexicographically least rotation.
    fn least_rotation_offset(&self) -> usize {
        let n = self.letters.len();
        (0..n)
            .min_by(|&i, &j| {
                let a = self.letters[i..].iter().chain(&self.letters[..i]);
                let b = self.letters[j..].iter().chain(&self.letters[..j]);
                a.map(|&l| letter_key(l))
                    .cmp(b.map(|&l| letter_key(l)))
                    .then(i.cmp(&j))
            })
            .unwrap_or(0)
    }

    pub fn rotate(&self, k: usize) -> CyclicWord {
        let mut letters = self.letters.clone();
        if !letters.is_empty() {
            let k = k % letters.len();
            letters.rotate_left(k);
        }
        CyclicWord { letters }
    }

    pub fn least_rotation(&self) -> CyclicWord {
        self.rotate(self.least_rotation_offset())
    }

    /// Least representative over all rotations of the word and its inverse.
    pub fn canonical(&self) -> CyclicWord {
        let a = self.least_rotation();
        let b = self.inverse().least_rotation();
        if cmp_letters(&b.letters, &a.letters) == Ordering::Less {
            b
        } else {
            a
        }
    }

    /// Whether `other` is a rotation of `self`.
    pub fn is_rotation_of(&self, other: &CyclicWord) -> bool {
        self.len() == other.len()
            && (self.is_empty() || find_in_doubled(&other.letters, &self.letters).is_some())
    }
}

impl fmt::Display for CyclicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_letters(&self.letters, false))
    }
}

pub fn is_cyclically_reduced(letters: &[Letter]) -> bool {
    letters.windows(2).all(|w| w[0] != -w[1])
        && (letters.len() < 2 || letters[0] != -letters[letters.len() - 1])
        && letters.iter().all(|&l| l != 0)
}

/// Splits `w` as `conjugator · core · conjugator⁻¹` with `core` cyclically
/// reduced. The core is returned in its least rotation; the conjugator absorbs
/// the rotation.
pub fn cyclic_reduce(w: &Word) -> (Word, CyclicWord) {
    let l = w.letters();
    let mut k = 0;
    while 2 * k + 1 < l.len() && l[k] == -l[l.len() - 1 - k] {
        k += 1;
    }
    let prefix = Word {
        letters: l[..k].to_vec(),
    };
    let core = CyclicWord {
        letters: l[k..l.len() - k].to_vec(),
    };
    // core = x·y, least rotation y·x = x⁻¹·core·x
    let offset = core.least_rotation_offset();
    let x = Word {
        letters: core.letters[..offset].to_vec(),
    };
    (prefix.mul(&x), core.rotate(offset))
}

/// Knuth–Morris–Pratt failure function (border array).
fn failure_function(p: &[Letter]) -> Vec<usize> {
    let mut fail = vec![0; p.len()];
    let mut k = 0;
    for i in 1..p.len() {
        while k > 0 && p[i] != p[k] {
            k = fail[k - 1];
        }
        if p[i] == p[k] {
            k += 1;
        }
        fail[i] = k;
    }
    fail
}

/// First position `1 <= p <= n` at which `needle` occurs in `hay·hay`
/// (with `hay` and `needle` of equal length `n`).
fn find_in_doubled(hay: &[Letter], needle: &[Letter]) -> Option<usize> {
    let n = needle.len();
    if n == 0 || hay.len() != n {
        return None;
    }
    let fail = failure_function(needle);
    let mut k = 0;
    for i in 0..2 * n {
        let c = hay[i % n];
        while k > 0 && c != needle[k] {
            k = fail[k - 1];
        }
        if c == needle[k] {
            k += 1;
        }
        if k == n {
            return Some(i + 1 - n);
        }
    }
    None
}

/// Smallest rotation period of a cyclic sequence; always divides its length.
pub fn cyclic_period(letters: &[Letter]) -> usize {
    let n = letters.len();
    if n == 0 {
        return 0;
    }
    let fail = failure_function(letters);
    // search starting at offset 1 of the doubled sequence
    let mut k = 0;
    for i in 1..2 * n {
        let c = letters[i % n];
        while k > 0 && c != letters[k] {
            k = fail[k - 1];
        }
        if c == letters[k] {
            k += 1;
        }
        if k == n {
            return i + 1 - n;
        }
    }
    n
}

/// Writes the cyclic reduction of `w` as `root^exponent` with `root` not a
/// proper power.
pub fn primitive_root(w: &Word) -> Result<(CyclicWord, usize)> {
    if w.is_identity() {
        return Err(Error::IdentityWord);
    }
    let (_, core) = cyclic_reduce(w);
    let p = cyclic_period(core.letters());
    let root = CyclicWord {
        letters: core.letters[..p].to_vec(),
    };
    Ok((root, core.len() / p))
}

/// Result of comparing two cyclic words up to rotation and inversion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CyclicComparison {
    pub equal: bool,
    /// `+1` when `v` is a rotation of `u`, `-1` when it is a rotation of `u⁻¹`.
    /// Meaningless when `equal` is false, where it is `+1`.
    pub orientation: i8,
}

pub fn cyclic_equal_up_to_inversion(u: &CyclicWord, v: &CyclicWord) -> CyclicComparison {
    if v.is_rotation_of(u) {
        CyclicComparison {
            equal: true,
            orientation: 1,
        }
    } else if v.is_rotation_of(&u.inverse()) {
        CyclicComparison {
            equal: true,
            orientation: -1,
        }
    } else {
        CyclicComparison {
            equal: false,
            orientation: 1,
        }
    }
}
