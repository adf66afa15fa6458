//! Alphabets, finite words and lazily generated infinite words.
//!
//! Letters are stored internally as `1..=d`. An [`Alphabet`] carries the
//! display label of each letter, so words over `{0, 1, 2}` keep their
//! written form while the lexicographic order of the labels is preserved.

use std::fmt;
use std::ops::Deref;
use std::sync::{Arc, RwLock};

use crate::error::{invalid, Error, Result};

pub type Letter = u8;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Alphabet {
    labels: Vec<String>,
}

impl Alphabet {
    /// The alphabet `{1, …, d}`.
    pub fn numeric(d: usize) -> Result<Self> {
        Self::from_labels((1..=d).map(|i| i.to_string()))
    }

    /// Labels are listed in increasing order; the i-th label is letter `i + 1`.
    pub fn from_labels<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(invalid("alphabet must contain at least one letter"));
        }
        if labels.len() > Letter::MAX as usize {
            return Err(invalid("alphabet too large"));
        }
        for (i, l) in labels.iter().enumerate() {
            if l.is_empty() || l.chars().any(char::is_whitespace) {
                return Err(invalid(format!("bad letter label {l:?}")));
            }
            if labels[..i].contains(l) {
                return Err(invalid(format!("duplicate letter label {l:?}")));
            }
        }
        Ok(Alphabet { labels })
    }

    /// Parses the right-hand side of an `alphabet:` line: either a run of
    /// single characters (`012`) or whitespace-separated labels (`1 2 … 12`).
    pub fn parse(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        if spec.split_whitespace().count() > 1 {
            Self::from_labels(spec.split_whitespace())
        } else {
            Self::from_labels(spec.chars().map(String::from))
        }
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> {
        1..=self.labels.len() as Letter
    }

    pub fn contains(&self, letter: Letter) -> bool {
        letter >= 1 && (letter as usize) <= self.labels.len()
    }

    pub fn label(&self, letter: Letter) -> &str {
        &self.labels[letter as usize - 1]
    }

    pub fn letter_of(&self, label: &str) -> Option<Letter> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|i| (i + 1) as Letter)
    }

    /// Single-character labels render without separators.
    pub fn is_compact(&self) -> bool {
        self.labels.iter().all(|l| l.chars().count() == 1)
    }

    pub fn render(&self, word: &[Letter]) -> String {
        if self.is_compact() {
            word.iter().map(|&a| self.label(a)).collect()
        } else {
            word.iter()
                .map(|&a| self.label(a))
                .collect::<Vec<_>>()
                .join(" ")
        }
    }

    pub fn parse_word(&self, text: &str) -> Result<FiniteWord> {
        let tokens: Vec<String> = if self.is_compact() {
            text.chars()
                .filter(|c| !c.is_whitespace())
                .map(String::from)
                .collect()
        } else {
            text.split_whitespace().map(String::from).collect()
        };
        tokens
            .iter()
            .map(|t| {
                self.letter_of(t)
                    .ok_or_else(|| Error::Parse(format!("letter {t:?} not in alphabet")))
            })
            .collect::<Result<Vec<_>>>()
            .map(FiniteWord)
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_compact() {
            write!(f, "{}", self.labels.concat())
        } else {
            write!(f, "{}", self.labels.join(" "))
        }
    }
}

/// A finite word over internal letters. Ordering is lexicographic.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
#[serde(transparent)]
pub struct FiniteWord(Vec<Letter>);

impl FiniteWord {
    pub fn new(letters: Vec<Letter>) -> Self {
        FiniteWord(letters)
    }

    pub fn empty() -> Self {
        FiniteWord(Vec::new())
    }

    /// Builds a word from decimal digits `1..=9`, e.g. `"1211"`.
    ///
    /// # Panics
    /// On any character that is not a digit in `1..=9`.
    pub fn from_digits(s: &str) -> Self {
        FiniteWord(
            s.chars()
                .map(|c| match c.to_digit(10) {
                    Some(d @ 1..=9) => d as Letter,
                    _ => panic!("from_digits: {c:?} is not a letter in 1..=9"),
                })
                .collect(),
        )
    }

    pub fn into_inner(self) -> Vec<Letter> {
        self.0
    }

    pub fn as_slice(&self) -> &[Letter] {
        &self.0
    }

    pub fn concat(&self, other: &[Letter]) -> FiniteWord {
        let mut v = self.0.clone();
        v.extend_from_slice(other);
        FiniteWord(v)
    }

    pub fn reversed(&self) -> FiniteWord {
        FiniteWord(self.0.iter().rev().copied().collect())
    }

    pub fn push(&mut self, a: Letter) {
        self.0.push(a);
    }
}

impl Deref for FiniteWord {
    type Target = [Letter];
    fn deref(&self) -> &[Letter] {
        &self.0
    }
}

impl std::borrow::Borrow<[Letter]> for FiniteWord {
    fn borrow(&self) -> &[Letter] {
        &self.0
    }
}

impl From<Vec<Letter>> for FiniteWord {
    fn from(v: Vec<Letter>) -> Self {
        FiniteWord(v)
    }
}

impl From<&[Letter]> for FiniteWord {
    fn from(v: &[Letter]) -> Self {
        FiniteWord(v.to_vec())
    }
}

impl fmt::Display for FiniteWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "ε");
        }
        if self.0.iter().all(|&a| a <= 9) {
            for a in &self.0 {
                write!(f, "{a}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.0.iter().map(|a| a.to_string()).collect();
            write!(f, "{}", parts.join(" "))
        }
    }
}

/// A deterministic rule producing the letters of an infinite word.
pub trait LetterSource: Send + Sync {
    /// Appends letters to `buf` (which already holds a prefix produced by
    /// this source) until it holds at least `len` letters. May overshoot.
    /// Finite sources stop at their [`limit`](LetterSource::limit).
    fn extend(&self, buf: &mut Vec<Letter>, len: usize);

    /// Total length for sources backed by finite data.
    fn limit(&self) -> Option<usize> {
        None
    }
}

struct Inner {
    source: Box<dyn LetterSource>,
    alphabet: Alphabet,
    description: String,
    cache: RwLock<Vec<Letter>>,
}

/// A lazily generated infinite word with a shared prefix cache.
///
/// Cloning is cheap and clones share the cache. Queries are deterministic:
/// `prefix(n)` is always a prefix of `prefix(m)` for `n <= m`.
#[derive(Clone)]
pub struct WordStream {
    inner: Arc<Inner>,
}

impl fmt::Debug for WordStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WordStream")
            .field("description", &self.inner.description)
            .field("alphabet", &self.inner.alphabet)
            .finish()
    }
}

impl WordStream {
    pub fn new(
        source: impl LetterSource + 'static,
        alphabet: Alphabet,
        description: impl Into<String>,
    ) -> Self {
        WordStream {
            inner: Arc::new(Inner {
                source: Box::new(source),
                alphabet,
                description: description.into(),
                cache: RwLock::new(Vec::new()),
            }),
        }
    }

    /// `preperiod · period^ω`.
    pub fn periodic(
        alphabet: Alphabet,
        preperiod: &[Letter],
        period: &[Letter],
        description: impl Into<String>,
    ) -> Result<Self> {
        if period.is_empty() {
            return Err(invalid("period must be non-empty"));
        }
        check_letters(&alphabet, preperiod)?;
        check_letters(&alphabet, period)?;
        Ok(Self::new(
            Periodic {
                preperiod: preperiod.to_vec(),
                period: period.to_vec(),
            },
            alphabet,
            description,
        ))
    }

    /// A word known only through finite data (e.g. read from a file).
    pub fn finite(
        alphabet: Alphabet,
        word: FiniteWord,
        description: impl Into<String>,
    ) -> Result<Self> {
        check_letters(&alphabet, &word)?;
        Ok(Self::new(Finite(word.into_inner()), alphabet, description))
    }

    /// Word whose k-th letter (0-based) is `f(k)`.
    pub fn from_fn<F>(alphabet: Alphabet, description: impl Into<String>, f: F) -> Self
    where
        F: Fn(usize) -> Letter + Send + Sync + 'static,
    {
        Self::new(FromFn(f), alphabet, description)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.inner.alphabet
    }

    pub fn description(&self) -> &str {
        &self.inner.description
    }

    pub fn limit(&self) -> Option<usize> {
        self.inner.source.limit()
    }

    /// Number of letters actually obtainable when `n` are requested.
    pub fn available(&self, n: usize) -> usize {
        self.limit().map_or(n, |l| l.min(n))
    }

    /// Runs `f` on the first `n` letters (fewer for finite sources).
    pub fn with_prefix<R>(&self, n: usize, f: impl FnOnce(&[Letter]) -> R) -> R {
        let want = self.available(n);
        {
            let cache = self.inner.cache.read().expect("prefix cache poisoned");
            if cache.len() >= want {
                return f(&cache[..want]);
            }
        }
        {
            let mut cache = self.inner.cache.write().expect("prefix cache poisoned");
            if cache.len() < want {
                self.inner.source.extend(&mut cache, want);
                debug_assert!(cache.iter().all(|&a| self.inner.alphabet.contains(a)));
            }
        }
        let cache = self.inner.cache.read().expect("prefix cache poisoned");
        let got = want.min(cache.len());
        f(&cache[..got])
    }

    pub fn prefix(&self, n: usize) -> FiniteWord {
        self.with_prefix(n, |p| FiniteWord(p.to_vec()))
    }

    pub fn letter(&self, k: usize) -> Option<Letter> {
        self.with_prefix(k + 1, |p| p.get(k).copied())
    }

    /// `S^m(w)`: the word with its first `m` letters removed.
    pub fn shift(&self, m: usize) -> WordStream {
        if m == 0 {
            return self.clone();
        }
        WordStream::new(
            Shifted {
                inner: self.clone(),
                offset: m,
            },
            self.alphabet().clone(),
            format!("S^{m}({})", self.description()),
        )
    }
}

fn check_letters(alphabet: &Alphabet, letters: &[Letter]) -> Result<()> {
    match letters.iter().find(|&&a| !alphabet.contains(a)) {
        Some(a) => Err(invalid(format!(
            "letter {a} outside alphabet of size {}",
            alphabet.size()
        ))),
        None => Ok(()),
    }
}

struct Periodic {
    preperiod: Vec<Letter>,
    period: Vec<Letter>,
}

impl LetterSource for Periodic {
    fn extend(&self, buf: &mut Vec<Letter>, len: usize) {
        let pre = self.preperiod.len();
        for k in buf.len()..len {
            let a = if k < pre {
                self.preperiod[k]
            } else {
                self.period[(k - pre) % self.period.len()]
            };
            buf.push(a);
        }
    }
}

struct Finite(Vec<Letter>);

impl LetterSource for Finite {
    fn extend(&self, buf: &mut Vec<Letter>, len: usize) {
        let end = len.min(self.0.len());
        if buf.len() < end {
            let start = buf.len();
            buf.extend_from_slice(&self.0[start..end]);
        }
    }

    fn limit(&self) -> Option<usize> {
        Some(self.0.len())
    }
}

struct FromFn<F>(F);

impl<F> LetterSource for FromFn<F>
where
    F: Fn(usize) -> Letter + Send + Sync,
{
    fn extend(&self, buf: &mut Vec<Letter>, len: usize) {
        for k in buf.len()..len {
            buf.push((self.0)(k));
        }
    }
}

struct Shifted {
    inner: WordStream,
    offset: usize,
}

impl LetterSource for Shifted {
    fn extend(&self, buf: &mut Vec<Letter>, len: usize) {
        let start = buf.len() + self.offset;
        self.inner.with_prefix(len + self.offset, |p| {
            if p.len() > start {
                buf.extend_from_slice(&p[start..]);
            }
        });
    }

    fn limit(&self) -> Option<usize> {
        self.inner.limit().map(|l| l.saturating_sub(self.offset))
    }
}

/// Number of occurrences of each letter of the alphabet in `word`.
pub fn letter_counts(alphabet: &Alphabet, word: &[Letter]) -> Vec<(Letter, u64)> {
    let mut counts = vec![0u64; alphabet.size()];
    for &a in word {
        counts[a as usize - 1] += 1;
    }
    alphabet.letters().zip(counts).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn periodic_prefixes() {
        let ones = WordStream::periodic(Alphabet::numeric(1).unwrap(), &[], &[1], "1^w").unwrap();
        assert_eq!(ones.prefix(5).to_string(), "11111");
        let w =
            WordStream::periodic(Alphabet::numeric(3).unwrap(), &[], &[1, 2, 3, 3], "").unwrap();
        assert_eq!(w.prefix(6).to_string(), "123312");
        assert_eq!(w.prefix(0), FiniteWord::empty());
    }

    #[test]
    fn prefixes_are_consistent() {
        let w = WordStream::from_fn(Alphabet::numeric(2).unwrap(), "", |k| {
            (k % 3 == 0) as u8 + 1
        });
        let long = w.prefix(100);
        let short = w.prefix(40);
        assert_eq!(&long[..40], &short[..]);
        assert_eq!(w.prefix(100), long);
    }

    #[test]
    fn labelled_alphabet_round_trip() {
        let a = Alphabet::parse("012").unwrap();
        let w = a.parse_word("2010").unwrap();
        assert_eq!(w.as_slice(), &[3, 1, 2, 1]);
        assert_eq!(a.render(&w), "2010");
        let big = Alphabet::numeric(12).unwrap();
        assert!(!big.is_compact());
        let w = big.parse_word("12 1 10").unwrap();
        assert_eq!(big.render(&w), "12 1 10");
        assert!(a.parse_word("0x").is_err());
        assert!(Alphabet::from_labels(["1", "1"]).is_err());
    }

    #[test]
    fn letter_counts_examples() {
        let a = Alphabet::numeric(2).unwrap();
        assert_eq!(letter_counts(&a, &[]), vec![(1, 0), (2, 0)]);
        let fib = FiniteWord::from_digits("1211212112112");
        assert_eq!(letter_counts(&a, &fib), vec![(1, 8), (2, 5)]);
        let z = Alphabet::parse("012").unwrap();
        let w = z.parse_word("2010").unwrap();
        let counts: Vec<_> = letter_counts(&z, &w)
            .into_iter()
            .map(|(l, c)| (z.label(l).to_string(), c))
            .collect();
        assert_eq!(
            counts,
            vec![("0".into(), 2), ("1".into(), 1), ("2".into(), 1)]
        );
    }

    #[test]
    fn shift_and_finite() {
        let a = Alphabet::numeric(3).unwrap();
        let w = WordStream::periodic(a.clone(), &[3], &[1, 2], "").unwrap();
        assert_eq!(w.shift(1).prefix(4).to_string(), "1212");
        let f = WordStream::finite(a, FiniteWord::from_digits("123"), "file").unwrap();
        assert_eq!(f.prefix(10).len(), 3);
        assert_eq!(f.shift(2).prefix(10).to_string(), "3");
        assert_eq!(f.letter(5), None);
    }
}
