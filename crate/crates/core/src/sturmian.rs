//! Substitutions, standard Sturmian words from directive sequences, the
//! renormalization operator and exact letter frequencies.
//!
//! Binary words use the internal letters `1` and `2`. The two elementary
//! substitutions are `σ1: 1 ↦ 1, 2 ↦ 12` and `σ2: 1 ↦ 21, 2 ↦ 2`; `R_i`
//! undoes `σ_i` by erasing the `i` immediately before every other letter.

use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use serde::Serialize;

use crate::arith::{periodic_cf_value, QuadraticReal};
use crate::error::{invalid, Error, Result};
use crate::word::{Alphabet, FiniteWord, Letter, LetterSource, WordStream};

/// A letter-to-word morphism over the letters `1..=k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Substitution {
    images: Vec<FiniteWord>,
}

impl Substitution {
    /// `images[a - 1]` is the image of letter `a`; every image is non-empty.
    pub fn new(images: Vec<FiniteWord>) -> Result<Self> {
        if images.is_empty() || images.iter().any(|u| u.is_empty()) {
            return Err(invalid("substitution images must be non-empty"));
        }
        Ok(Substitution { images })
    }

    pub fn sigma1() -> Self {
        Substitution {
            images: vec![FiniteWord::from_digits("1"), FiniteWord::from_digits("12")],
        }
    }

    pub fn sigma2() -> Self {
        Substitution {
            images: vec![FiniteWord::from_digits("21"), FiniteWord::from_digits("2")],
        }
    }

    pub fn sigma(i: Letter) -> Self {
        if i == 1 {
            Self::sigma1()
        } else {
            Self::sigma2()
        }
    }

    pub fn domain_size(&self) -> usize {
        self.images.len()
    }

    pub fn image(&self, a: Letter) -> Result<&FiniteWord> {
        (a as usize)
            .checked_sub(1)
            .and_then(|k| self.images.get(k))
            .ok_or_else(|| invalid(format!("letter {a} outside the substitution domain")))
    }

    pub fn apply(&self, u: &[Letter]) -> Result<FiniteWord> {
        let mut out = Vec::with_capacity(u.len() * 2);
        for &a in u {
            out.extend_from_slice(self.image(a)?);
        }
        Ok(FiniteWord::new(out))
    }

    /// Lazy image of an infinite word, over `target` letters.
    pub fn apply_stream(&self, w: &WordStream, target: Alphabet) -> Result<WordStream> {
        if w.alphabet().size() > self.domain_size() {
            return Err(invalid("stream alphabet exceeds the substitution domain"));
        }
        if let Some(a) = self
            .images
            .iter()
            .flat_map(|u| u.iter())
            .find(|&&a| !target.contains(a))
        {
            return Err(invalid(format!("image letter {a} outside target alphabet")));
        }
        let desc = format!("subst({})", w.description());
        Ok(WordStream::new(
            SubstSource {
                inner: w.clone(),
                subst: self.clone(),
                cursor: Mutex::new(0),
            },
            target,
            desc,
        ))
    }
}

struct SubstSource {
    inner: WordStream,
    subst: Substitution,
    cursor: Mutex<usize>,
}

impl LetterSource for SubstSource {
    fn extend(&self, buf: &mut Vec<Letter>, len: usize) {
        let mut cursor = self.cursor.lock().expect("cursor poisoned");
        while buf.len() < len {
            // Each input letter yields at least one output letter.
            let want = *cursor + (len - buf.len());
            let got = self.inner.with_prefix(want, |p| {
                for &a in &p[*cursor..] {
                    buf.extend_from_slice(self.subst.image(a).expect("checked domain"));
                }
                p.len()
            });
            if got == *cursor {
                break;
            }
            *cursor = got;
        }
    }

    fn limit(&self) -> Option<usize> {
        let l = self.inner.limit()?;
        Some(self.inner.with_prefix(l, |p| {
            p.iter()
                .map(|&a| self.subst.image(a).map_or(0, |u| u.len()))
                .sum()
        }))
    }
}

type Rule = Arc<dyn Fn(usize) -> u64 + Send + Sync>;

/// Run-length sequence `(b_0, b_1, …)`: the directive `1^{b_0} 2^{b_1} 1^{b_2} …`.
#[derive(Clone)]
pub enum DirectiveSpec {
    /// `pre · period^ω`.
    Periodic { pre: Vec<u64>, period: Vec<u64> },
    /// `b_k = f(k)`; positivity of `b_k` for `k >= 1` is checked lazily.
    Rule(Rule),
}

impl fmt::Debug for DirectiveSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DirectiveSpec({self})")
    }
}

impl fmt::Display for DirectiveSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DirectiveSpec::Periodic { pre, period } => {
                let join = |v: &[u64]| {
                    v.iter()
                        .map(|b| b.to_string())
                        .collect::<Vec<_>>()
                        .join(",")
                };
                write!(f, "pre:[{}] period:[{}]", join(pre), join(period))
            }
            DirectiveSpec::Rule(_) => write!(f, "rule"),
        }
    }
}

impl PartialEq for DirectiveSpec {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (
                DirectiveSpec::Periodic { pre: a, period: b },
                DirectiveSpec::Periodic { pre: c, period: d },
            ) => a == c && b == d,
            _ => false,
        }
    }
}

impl DirectiveSpec {
    pub fn periodic(pre: Vec<u64>, period: Vec<u64>) -> Result<Self> {
        if period.is_empty() {
            return Err(invalid("directive period must be non-empty"));
        }
        // A zero inside the period recurs at some index k >= 1.
        if pre.iter().skip(1).any(|&b| b == 0) || period.contains(&0) {
            return Err(invalid("run-lengths b_k for k >= 1 must be >= 1"));
        }
        Ok(DirectiveSpec::Periodic { pre, period })
    }

    /// All `b_n = 1`: the Fibonacci word.
    pub fn fibonacci() -> Self {
        DirectiveSpec::Periodic {
            pre: vec![],
            period: vec![1],
        }
    }

    pub fn from_fn(f: impl Fn(usize) -> u64 + Send + Sync + 'static) -> Self {
        DirectiveSpec::Rule(Arc::new(f))
    }

    pub fn b(&self, k: usize) -> u64 {
        match self {
            DirectiveSpec::Periodic { pre, period } => {
                if k < pre.len() {
                    pre[k]
                } else {
                    period[(k - pre.len()) % period.len()]
                }
            }
            DirectiveSpec::Rule(f) => f(k),
        }
    }

    pub fn run_lengths(&self, k: usize) -> Vec<u64> {
        (0..k).map(|i| self.b(i)).collect()
    }

    /// The directive letters `i_0 i_1 …` as an iterator.
    pub fn directive(&self) -> impl Iterator<Item = Letter> + '_ {
        (0usize..).flat_map(move |k| {
            let b = self.b(k);
            assert!(k == 0 || b >= 1, "run-length b_{k} must be >= 1");
            let letter = if k % 2 == 0 { 1 } else { 2 };
            std::iter::repeat_n(letter, b as usize)
        })
    }

    pub fn is_eventually_periodic(&self) -> bool {
        matches!(self, DirectiveSpec::Periodic { .. })
    }
}

impl FromStr for DirectiveSpec {
    type Err = Error;

    /// `"b0,b1,…,bk"` (the last entry repeats forever) or
    /// `"pre:[b0,…] period:[…]"`.
    fn from_str(s: &str) -> Result<Self> {
        let err = || Error::Parse(format!("bad directive spec `{s}`"));
        let list = |t: &str| -> Result<Vec<u64>> {
            let t = t.trim();
            if t.is_empty() {
                return Ok(vec![]);
            }
            t.split(',')
                .map(|x| x.trim().parse::<u64>().map_err(|_| err()))
                .collect()
        };
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("pre:") {
            let (pre, rest) = rest
                .trim()
                .strip_prefix('[')
                .and_then(|r| r.split_once(']'))
                .ok_or_else(err)?;
            let rest = rest.trim().strip_prefix("period:").ok_or_else(err)?;
            let period = rest
                .trim()
                .strip_prefix('[')
                .and_then(|r| r.strip_suffix(']'))
                .ok_or_else(err)?;
            return Self::periodic(list(pre)?, list(period)?);
        }
        let mut all = list(s)?;
        let last = all.pop().ok_or_else(err)?;
        Self::periodic(all, vec![last])
    }
}

fn binary() -> Alphabet {
    Alphabet::numeric(2).expect("2 letters")
}

struct StandardSource {
    spec: DirectiveSpec,
    state: Mutex<StandardState>,
}

struct StandardState {
    run: usize,
    left_in_run: u64,
    u: Vec<Letter>,
    v: Vec<Letter>,
    p: Vec<Letter>,
}

impl StandardState {
    fn next_letter(&mut self, spec: &DirectiveSpec) -> Letter {
        while self.left_in_run == 0 {
            self.run += 1;
            let b = spec.b(self.run);
            assert!(b >= 1, "run-length b_{} must be >= 1", self.run);
            self.left_in_run = b;
        }
        self.left_in_run -= 1;
        if self.run.is_multiple_of(2) {
            1
        } else {
            2
        }
    }
}

impl LetterSource for StandardSource {
    fn extend(&self, buf: &mut Vec<Letter>, len: usize) {
        let mut st = self.state.lock().expect("state poisoned");
        // (u, v) = (σ_{i0}…σ_{in}(1), σ_{i0}…σ_{in}(2)); p is their stable
        // common prefix.
        while st.p.len() < len {
            let i = st.next_letter(&self.spec);
            let st = &mut *st;
            if i == 1 {
                let mut nv = st.u.clone();
                nv.extend_from_slice(&st.v);
                st.v = nv;
                st.p = st.u.clone();
            } else {
                let mut nu = st.v.clone();
                nu.extend_from_slice(&st.u);
                st.u = nu;
                st.p = st.v.clone();
            }
        }
        let start = buf.len();
        buf.extend_from_slice(&st.p[start..len.max(start)]);
    }
}

/// The standard Sturmian word with the given run-lengths, with its first
/// `prefix_len` letters materialized.
pub fn standard_sturmian(spec: &DirectiveSpec, prefix_len: usize) -> Result<WordStream> {
    if prefix_len == 0 {
        return Err(invalid("prefix_len must be >= 1"));
    }
    if let DirectiveSpec::Rule(_) = spec {
        if let Some(k) = (1..64).find(|&k| spec.b(k) == 0) {
            return Err(invalid(format!("run-length b_{k} must be >= 1")));
        }
    }
    let b0 = spec.b(0);
    let state = StandardState {
        run: 0,
        left_in_run: b0,
        u: vec![1],
        v: vec![2],
        p: vec![],
    };
    let w = WordStream::new(
        StandardSource {
            spec: spec.clone(),
            state: Mutex::new(state),
        },
        binary(),
        format!("standard-sturmian({spec})"),
    );
    w.with_prefix(prefix_len, |_| ());
    Ok(w)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum SturmianType {
    /// Contains `11`.
    Type1,
    /// Contains `22`.
    Type2,
}

impl SturmianType {
    pub fn letter(self) -> Letter {
        match self {
            SturmianType::Type1 => 1,
            SturmianType::Type2 => 2,
        }
    }
}

fn check_binary(w: &WordStream) -> Result<()> {
    if w.alphabet().size() != 2 {
        return Err(invalid("expected a binary word"));
    }
    Ok(())
}

/// Type of a finite word: which of `11` / `22` occurs.
pub fn finite_word_type(u: &[Letter]) -> Result<Option<SturmianType>> {
    let has = |a: Letter| u.windows(2).any(|x| x[0] == a && x[1] == a);
    match (has(1), has(2)) {
        (true, true) => Err(Error::NotSturmian),
        (true, false) => Ok(Some(SturmianType::Type1)),
        (false, true) => Ok(Some(SturmianType::Type2)),
        (false, false) => Ok(None),
    }
}

/// Scans prefixes of length 64, 128, … up to `horizon` for `11` or `22`.
pub fn word_type(w: &WordStream, horizon: usize) -> Result<SturmianType> {
    check_binary(w)?;
    let mut n = 64.min(horizon);
    loop {
        if let Some(t) = w.with_prefix(n, finite_word_type)? {
            return Ok(t);
        }
        if n >= horizon || w.available(n) < n {
            return Err(Error::Undetermined(w.available(n)));
        }
        n = (n * 2).min(horizon);
    }
}

/// `R_i` on a finite word. The final letter is dropped when it is `i`,
/// since its successor is unknown.
pub fn renormalize_finite(u: &[Letter], i: Letter) -> FiniteWord {
    let mut out = Vec::with_capacity(u.len());
    for (k, &a) in u.iter().enumerate() {
        match u.get(k + 1) {
            Some(&next) if a == i && next != i => {}
            None if a == i => {}
            _ => out.push(a),
        }
    }
    FiniteWord::new(out)
}

struct RenormSource {
    inner: WordStream,
    i: Letter,
    cursor: Mutex<usize>,
}

impl LetterSource for RenormSource {
    fn extend(&self, buf: &mut Vec<Letter>, len: usize) {
        let mut cursor = self.cursor.lock().expect("cursor poisoned");
        while buf.len() < len {
            let want = (*cursor + 2 * (len - buf.len()) + 2).max(64);
            let done = self.inner.with_prefix(want, |p| {
                let last = p.len() == want;
                let mut k = *cursor;
                // One letter of lookahead; the last letter waits for its
                // successor unless the input is finite.
                while k < p.len() && buf.len() < len {
                    let a = p[k];
                    match p.get(k + 1) {
                        Some(&next) => {
                            if !(a == self.i && next != self.i) {
                                buf.push(a);
                            }
                        }
                        None if last => break,
                        None => {
                            if a != self.i {
                                buf.push(a);
                            }
                        }
                    }
                    k += 1;
                }
                let exhausted = !last && k >= p.len();
                (k, exhausted)
            });
            *cursor = done.0;
            if done.1 {
                break;
            }
        }
    }

    fn limit(&self) -> Option<usize> {
        let l = self.inner.limit()?;
        Some(
            self.inner
                .with_prefix(l, |p| renormalize_finite(p, self.i).len()),
        )
    }
}

/// `R(w)`: detects the type within `horizon` letters, then erases lazily.
pub fn renormalize(w: &WordStream, horizon: usize) -> Result<WordStream> {
    let t = word_type(w, horizon)?;
    Ok(renormalize_with(w, t))
}

/// `R_i(w)` for a known type.
pub fn renormalize_with(w: &WordStream, t: SturmianType) -> WordStream {
    let desc = format!("R({})", w.description());
    WordStream::new(
        RenormSource {
            inner: w.clone(),
            i: t.letter(),
            cursor: Mutex::new(0),
        },
        w.alphabet().clone(),
        desc,
    )
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RunLengths {
    pub terms: Vec<u64>,
    /// False when fewer terms than requested could be confirmed.
    pub complete: bool,
    /// Why extraction stopped early.
    pub caveat: Option<String>,
}

/// Run-lengths of the successive renormalization types, read off the first
/// `horizon` letters. A run is reported only once the type has switched.
pub fn run_length_extract(w: &WordStream, terms: usize, horizon: usize) -> Result<RunLengths> {
    check_binary(w)?;
    let mut cur = w.prefix(horizon).into_inner();
    let mut out: Vec<u64> = Vec::new();
    let mut current: Option<(SturmianType, u64)> = None;
    let caveat = loop {
        if out.len() >= terms {
            break None;
        }
        let t = match finite_word_type(&cur) {
            Ok(Some(t)) => t,
            Ok(None) => {
                break Some(format!(
                    "type undetermined after {} renormalizations ({} letters left)",
                    out.iter().sum::<u64>() + current.map_or(0, |c| c.1),
                    cur.len()
                ))
            }
            Err(e) => break Some(e.to_string()),
        };
        match current {
            None => {
                if t == SturmianType::Type2 {
                    out.push(0);
                }
                current = Some((t, 1));
            }
            Some((prev, n)) if prev == t => current = Some((t, n + 1)),
            Some((_, n)) => {
                out.push(n);
                current = Some((t, 1));
            }
        }
        cur = renormalize_finite(&cur, t.letter()).into_inner();
    };
    out.truncate(terms);
    Ok(RunLengths {
        complete: out.len() == terms,
        terms: out,
        caveat,
    })
}

/// Exact letter frequencies `(f1, f2)` of the standard Sturmian word.
pub fn exact_frequencies(spec: &DirectiveSpec) -> Result<(QuadraticReal, QuadraticReal)> {
    let DirectiveSpec::Periodic { pre, period } = spec else {
        return Err(Error::Unsupported(
            "exact frequencies need eventually periodic run-lengths".into(),
        ));
    };
    let big = |v: &[u64]| v.iter().map(|&b| BigInt::from(b)).collect::<Vec<_>>();
    let x = periodic_cf_value(&big(pre), &big(period))?;
    frequencies_from_ratio(&x)
}

/// `(x / (1 + x), 1 / (1 + x))` for an irrational ratio `x = f1 / f2 > 0`.
pub fn frequencies_from_ratio(x: &QuadraticReal) -> Result<(QuadraticReal, QuadraticReal)> {
    if x.is_rational() {
        return Err(invalid(format!("rational frequency ratio {x}")));
    }
    let one = QuadraticReal::integer(1);
    let f2 = (&one + x).recip()?;
    let f1 = &one - &f2;
    Ok((f1, f2))
}
