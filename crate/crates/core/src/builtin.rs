//! Named example words and the `kind:argument` word-spec syntax.
//!
//! Specs: `builtin:NAME`, `directive:RUNS`, `rotation:y=Y,alpha=A`,
//! `line:x=X1;X2,theta=T1;T2[,coding=cutting|billiard|flow]`,
//! `file:PATH[;alphabet=LABELS]`.

use std::sync::Mutex;

use crate::arith::QuadraticReal;
use crate::codings::{
    billiard_word, cutting_sequence, flow_word, rotation_stream, LineParams, RotationParams,
};
use crate::error::{invalid, Error, Result};
use crate::graphs::{quasi_sturmian_build, LetterPartition};
use crate::sturmian::{
    exact_frequencies, renormalize, standard_sturmian, DirectiveSpec, Substitution,
};
use crate::word::{Alphabet, FiniteWord, Letter, LetterSource, WordStream};

/// A resolved word together with what is known about it exactly.
#[derive(Clone, Debug)]
pub struct NamedWord {
    pub name: String,
    pub stream: WordStream,
    /// Exact letter frequencies, one per letter, when they exist in a
    /// single quadratic field.
    pub exact_freqs: Option<Vec<QuadraticReal>>,
    /// Run-lengths, for standard Sturmian words.
    pub directive: Option<DirectiveSpec>,
    /// A prefix quoted in the literature, reproduced exactly.
    pub quoted_prefix: Option<&'static str>,
}

impl NamedWord {
    fn plain(name: &str, stream: WordStream) -> Self {
        NamedWord {
            name: name.to_string(),
            stream,
            exact_freqs: None,
            directive: None,
            quoted_prefix: None,
        }
    }

    fn freqs(mut self, f: &[(i64, i64)]) -> Self {
        self.exact_freqs = Some(f.iter().map(|&(p, q)| QuadraticReal::ratio(p, q)).collect());
        self
    }

    fn quoted(mut self, p: &'static str) -> Self {
        self.quoted_prefix = Some(p);
        self
    }
}

pub const BUILTIN_NAMES: &[&str] = &[
    "ones",
    "period-12",
    "period-123",
    "period-1122",
    "period-1233",
    "two-then-010",
    "two-then-ones",
    "fibonacci",
    "fibonacci-renormalized",
    "quasi-sturmian-31-32",
    "tribonacci",
    "tijdeman-exercise-binary",
    "tijdeman-exercise-ternary",
    "champernowne-binary",
];

fn numeric(d: usize) -> Alphabet {
    Alphabet::numeric(d).expect("small alphabet")
}

fn periodic(name: &str, labels: Alphabet, pre: &[Letter], period: &[Letter]) -> NamedWord {
    let w = WordStream::periodic(labels, pre, period, name).expect("valid builtin");
    NamedWord::plain(name, w)
}

/// Looks up a builtin word by name.
pub fn builtin(name: &str) -> Result<NamedWord> {
    let fib = || standard_sturmian(&DirectiveSpec::fibonacci(), 64);
    Ok(match name {
        "ones" => periodic(name, numeric(1), &[], &[1]).freqs(&[(1, 1)]),
        "period-12" => periodic(name, numeric(2), &[], &[1, 2]).freqs(&[(1, 2), (1, 2)]),
        "period-123" => {
            periodic(name, numeric(3), &[], &[1, 2, 3]).freqs(&[(1, 3), (1, 3), (1, 3)])
        }
        "period-1122" => periodic(name, numeric(2), &[], &[1, 1, 2, 2]).freqs(&[(1, 2), (1, 2)]),
        "period-1233" => periodic(name, numeric(3), &[], &[1, 2, 3, 3])
            .freqs(&[(1, 4), (1, 4), (1, 2)])
            .quoted("123312"),
        "two-then-010" => {
            let labels = Alphabet::from_labels(["0", "1", "2"])?;
            periodic(name, labels, &[3], &[1, 2, 1])
                .freqs(&[(2, 3), (1, 3), (0, 1)])
                .quoted("2010010010010010")
        }
        "two-then-ones" => periodic(name, numeric(2), &[2], &[1]).freqs(&[(1, 1), (0, 1)]),
        "fibonacci" => {
            let spec = DirectiveSpec::fibonacci();
            let (f1, f2) = exact_frequencies(&spec)?;
            NamedWord {
                exact_freqs: Some(vec![f1, f2]),
                directive: Some(spec),
                ..NamedWord::plain(name, fib()?)
            }
            .quoted("1211212112112121121211211212112112")
        }
        "fibonacci-renormalized" => NamedWord::plain(name, renormalize(&fib()?, 4096)?),
        "quasi-sturmian-31-32" => {
            let part = LetterPartition {
                a: vec![1],
                b: vec![2],
                c: vec![3],
            };
            let w = quasi_sturmian_build(&fib()?, 0, &part, numeric(3))?;
            // σ doubles lengths: f3 = 1/2, f_a = f_a(fib)/2.
            let (f1, f2) = exact_frequencies(&DirectiveSpec::fibonacci())?;
            let half = QuadraticReal::ratio(1, 2);
            NamedWord {
                exact_freqs: Some(vec![&f1 * &half, &f2 * &half, half]),
                ..NamedWord::plain(name, w)
            }
            .quoted("31323131")
        }
        "tribonacci" => {
            let s = Substitution::new(vec![
                FiniteWord::from_digits("12"),
                FiniteWord::from_digits("13"),
                FiniteWord::from_digits("1"),
            ])?;
            NamedWord::plain(name, fixed_point(s, 1, numeric(3), name))
        }
        "tijdeman-exercise-binary" => NamedWord::plain(name, exercise_binary())
            .quoted("101100111111111111111111000000000000000000"),
        "tijdeman-exercise-ternary" => NamedWord::plain(name, exercise_ternary()?)
            .quoted("102100121211211212112121000000000000000000"),
        "champernowne-binary" => NamedWord::plain(
            name,
            WordStream::new(
                Champernowne(Mutex::new(0)),
                Alphabet::from_labels(["0", "1"])?,
                name,
            ),
        ),
        _ => return Err(Error::NotFound(format!("builtin word `{name}`"))),
    })
}

struct FixedPoint(Substitution, Letter);

impl LetterSource for FixedPoint {
    fn extend(&self, buf: &mut Vec<Letter>, len: usize) {
        let mut cur = if buf.is_empty() {
            vec![self.1]
        } else {
            buf.clone()
        };
        while cur.len() < len {
            cur = self.0.apply(&cur).expect("letters in domain").into_inner();
        }
        buf.extend_from_slice(&cur[buf.len()..]);
    }
}

/// Fixed point of a substitution prolongable on `a`.
pub fn fixed_point(s: Substitution, a: Letter, alphabet: Alphabet, name: &str) -> WordStream {
    WordStream::new(FixedPoint(s, a), alphabet, name)
}

/// Binary expansions of 0, 1, 2, … concatenated.
struct Champernowne(Mutex<u64>);

impl LetterSource for Champernowne {
    fn extend(&self, buf: &mut Vec<Letter>, len: usize) {
        let mut next = self.0.lock().expect("counter poisoned");
        while buf.len() < len {
            buf.extend(format!("{:b}", *next).bytes().map(|b| b - b'0' + 1));
            *next += 1;
        }
    }
}

/// Construction stages of the exercise word: `u_0 = 1`; for even `n`,
/// append zeros until the counts balance; for odd `n`, append `n·|u_n|`
/// ones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExerciseStage {
    pub n: usize,
    pub len: usize,
    pub zeros: usize,
    pub ones: usize,
}

/// Stages `u_0, u_1, …` while `|u_n|` stays below `cap`.
pub fn exercise_stages(cap: usize) -> Vec<ExerciseStage> {
    let mut out = vec![ExerciseStage {
        n: 0,
        len: 1,
        zeros: 0,
        ones: 1,
    }];
    loop {
        let s = out.last().expect("non-empty");
        let mut t = ExerciseStage {
            n: s.n + 1,
            ..s.clone()
        };
        if s.n % 2 == 0 {
            t.zeros = s.ones;
        } else {
            let Some(add) = s.n.checked_mul(s.len) else {
                break;
            };
            t.ones += add;
        }
        t.len = t.zeros + t.ones;
        if t.len >= cap {
            break;
        }
        out.push(t);
    }
    out
}

const STAGE_CAP: usize = 1 << 40;

/// Letter 1 is `0`, letter 2 is `1`, so that labels read as in the
/// construction.
fn exercise_binary() -> WordStream {
    let stages = exercise_stages(STAGE_CAP);
    let alphabet = Alphabet::from_labels(["0", "1"]).expect("two labels");
    WordStream::from_fn(alphabet, "tijdeman-exercise-binary", move |k| {
        if exercise_bit(&stages, k).0 {
            2
        } else {
            1
        }
    })
}

/// `(is_one, ones strictly before k)` for position `k`.
fn exercise_bit(stages: &[ExerciseStage], k: usize) -> (bool, usize) {
    if k == 0 {
        return (true, 0);
    }
    let i = stages.partition_point(|s| s.len <= k);
    let prev = &stages[i - 1];
    // Block after u_{n} is zeros for even n, ones for odd n.
    if prev.n.is_multiple_of(2) {
        (false, prev.ones)
    } else {
        (true, prev.ones + (k - prev.len))
    }
}

/// The exercise word with its `1`s replaced, in order, by the letters of
/// the Fibonacci word.
fn exercise_ternary() -> Result<WordStream> {
    let stages = exercise_stages(STAGE_CAP);
    let fib = standard_sturmian(&DirectiveSpec::fibonacci(), 64)?;
    let alphabet = Alphabet::from_labels(["0", "1", "2"])?;
    Ok(WordStream::from_fn(
        alphabet,
        "tijdeman-exercise-ternary",
        move |k| match exercise_bit(&stages, k) {
            (false, _) => 1,
            (true, j) => fib.letter(j).expect("infinite word") + 1,
        },
    ))
}

/// Resolves a word spec; `len` bounds the letters computed for finite
/// codings.
pub fn resolve(spec: &str, len: usize) -> Result<NamedWord> {
    let (kind, arg) = spec
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("word spec `{spec}` lacks a `kind:` prefix")))?;
    match kind {
        "builtin" => builtin(arg),
        "directive" => {
            let d: DirectiveSpec = arg.parse()?;
            let w = standard_sturmian(&d, 64)?;
            let freqs = exact_frequencies(&d).ok().map(|(a, b)| vec![a, b]);
            Ok(NamedWord {
                exact_freqs: freqs,
                directive: Some(d),
                ..NamedWord::plain(spec, w)
            })
        }
        "rotation" => {
            let kv = key_values(arg)?;
            let p = RotationParams::new(quad(&kv, "y")?, quad(&kv, "alpha")?)?;
            Ok(NamedWord::plain(spec, rotation_stream(&p)))
        }
        "line" => {
            let kv = key_values(arg)?;
            let p = LineParams::new(pair(&kv, "x")?, pair(&kv, "theta")?)?;
            let word = match lookup(&kv, "coding").unwrap_or("cutting") {
                "cutting" => cutting_sequence(&p, len)?,
                "billiard" => billiard_word(&p, len)?,
                "flow" => flow_word(&p, len)?,
                c => return Err(Error::Parse(format!("unknown coding `{c}`"))),
            };
            Ok(NamedWord::plain(
                spec,
                WordStream::finite(numeric(2), word, spec)?,
            ))
        }
        "file" => {
            let (path, alphabet) = match arg.split_once(";alphabet=") {
                Some((p, a)) => (p, Some(Alphabet::parse(a)?)),
                None => (arg, None),
            };
            let text = std::fs::read_to_string(path)?;
            let (alphabet, word) = parse_word_text(&text, alphabet)?;
            Ok(NamedWord::plain(
                spec,
                WordStream::finite(alphabet, word, spec)?,
            ))
        }
        _ => Err(Error::Parse(format!("unknown word kind `{kind}`"))),
    }
}

/// Without an explicit alphabet, letters must be digits `1..=9` and the
/// alphabet is `{1, …, max}`.
pub fn parse_word_text(text: &str, alphabet: Option<Alphabet>) -> Result<(Alphabet, FiniteWord)> {
    if let Some(a) = alphabet {
        let w = a.parse_word(text)?;
        return Ok((a, w));
    }
    let letters: Vec<Letter> = text
        .chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| match c {
            '1'..='9' => Ok(c as u8 - b'0'),
            _ => Err(Error::Parse(format!("invalid letter {c:?} in word file"))),
        })
        .collect::<Result<_>>()?;
    let d = letters
        .iter()
        .copied()
        .max()
        .ok_or_else(|| invalid("empty word file"))?;
    Ok((numeric(usize::from(d)), FiniteWord::new(letters)))
}

fn key_values(arg: &str) -> Result<Vec<(&str, &str)>> {
    arg.split(',')
        .map(|kv| {
            kv.split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| Error::Parse(format!("expected key=value, got `{kv}`")))
        })
        .collect()
}

fn lookup<'a>(kv: &[(&str, &'a str)], key: &str) -> Option<&'a str> {
    kv.iter().find(|(k, _)| *k == key).map(|(_, v)| *v)
}

fn quad(kv: &[(&str, &str)], key: &str) -> Result<QuadraticReal> {
    lookup(kv, key)
        .ok_or_else(|| Error::Parse(format!("missing `{key}`")))?
        .parse()
}

fn pair(kv: &[(&str, &str)], key: &str) -> Result<(QuadraticReal, QuadraticReal)> {
    let v = lookup(kv, key).ok_or_else(|| Error::Parse(format!("missing `{key}`")))?;
    let (a, b) = v
        .split_once(';')
        .ok_or_else(|| Error::Parse(format!("`{key}` needs two `;`-separated values")))?;
    Ok((a.parse()?, b.parse()?))
}
