//! Extension and flow matrices of Rauzy graphs, exact rational kernels,
//! factor frequencies and complexity lower bounds from rational rank.
//!
//! Index lists are always in lexicographic order, so every matrix built
//! here is reproducible bit for bit.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;
use serde_json::json;

use crate::arith::{QuadraticReal, Rational};
use crate::error::{invalid, Error, Result};
use crate::factors::{complexity_profile, factor_table};
use crate::graphs::{ExtensionGraph, RauzyGraph};
use crate::par::Exec;
use crate::sturmian::{exact_frequencies, standard_sturmian, DirectiveSpec};
use crate::word::{Alphabet, FiniteWord, Letter, WordStream};

/// Row or column label: a factor, or one copy of a split vertex.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label {
    pub word: FiniteWord,
    pub copy: Option<u8>,
}

impl Label {
    pub fn word(word: FiniteWord) -> Self {
        Label { word, copy: None }
    }

    pub fn render(&self, alphabet: &Alphabet) -> String {
        let mut s = if self.word.is_empty() {
            "ε".to_string()
        } else {
            alphabet.render(&self.word)
        };
        if let Some(c) = self.copy {
            write!(s, "#{c}").unwrap();
        }
        s
    }
}

/// Dense matrix of rationals indexed by labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalMatrix {
    row_index: Vec<Label>,
    col_index: Vec<Label>,
    entries: Vec<Vec<Rational>>,
    alphabet: Alphabet,
}

impl RationalMatrix {
    /// Index lists must be strictly increasing.
    pub fn new(
        row_index: Vec<Label>,
        col_index: Vec<Label>,
        entries: Vec<Vec<Rational>>,
        alphabet: Alphabet,
    ) -> Result<Self> {
        if entries.len() != row_index.len() || entries.iter().any(|r| r.len() != col_index.len()) {
            return Err(invalid("matrix entries do not match the index lists"));
        }
        let sorted = |v: &[Label]| v.windows(2).all(|p| p[0] < p[1]);
        if !sorted(&row_index) || !sorted(&col_index) {
            return Err(invalid("matrix index lists must be strictly increasing"));
        }
        Ok(RationalMatrix {
            row_index,
            col_index,
            entries,
            alphabet,
        })
    }

    /// Matrix with integer entries over plain word labels.
    pub fn from_integers(
        rows: Vec<FiniteWord>,
        cols: Vec<FiniteWord>,
        entries: Vec<Vec<i64>>,
        alphabet: Alphabet,
    ) -> Result<Self> {
        Self::new(
            rows.into_iter().map(Label::word).collect(),
            cols.into_iter().map(Label::word).collect(),
            entries
                .into_iter()
                .map(|r| {
                    r.into_iter()
                        .map(|x| Rational::from_integer(x.into()))
                        .collect()
                })
                .collect(),
            alphabet,
        )
    }

    pub fn rows(&self) -> usize {
        self.row_index.len()
    }

    pub fn cols(&self) -> usize {
        self.col_index.len()
    }

    pub fn row_index(&self) -> &[Label] {
        &self.row_index
    }

    pub fn col_index(&self) -> &[Label] {
        &self.col_index
    }

    pub fn entries(&self) -> &[Vec<Rational>] {
        &self.entries
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i][j]
    }

    /// Entries as `i64` when they are all small integers.
    pub fn to_integers(&self) -> Option<Vec<Vec<i64>>> {
        use num_traits::ToPrimitive;
        self.entries
            .iter()
            .map(|r| {
                r.iter()
                    .map(|x| x.is_integer().then(|| x.to_integer().to_i64()).flatten())
                    .collect()
            })
            .collect()
    }

    pub fn transpose(&self) -> RationalMatrix {
        let entries = (0..self.cols())
            .map(|j| {
                (0..self.rows())
                    .map(|i| self.entries[i][j].clone())
                    .collect()
            })
            .collect();
        RationalMatrix {
            row_index: self.col_index.clone(),
            col_index: self.row_index.clone(),
            entries,
            alphabet: self.alphabet.clone(),
        }
    }

    pub fn column_sums(&self) -> Vec<Rational> {
        (0..self.cols())
            .map(|j| self.entries.iter().map(|r| &r[j]).sum())
            .collect()
    }

    /// Entrywise `self - other`; index lists must agree.
    pub fn checked_sub(&self, other: &RationalMatrix) -> Result<RationalMatrix> {
        if self.row_index != other.row_index || self.col_index != other.col_index {
            return Err(invalid("matrix indices differ"));
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect())
            .collect();
        Ok(RationalMatrix {
            entries,
            ..self.clone()
        })
    }

    pub fn mul_vec(&self, x: &[Rational]) -> Result<Vec<Rational>> {
        if x.len() != self.cols() {
            return Err(invalid(format!(
                "vector of length {} against {} columns",
                x.len(),
                self.cols()
            )));
        }
        Ok(self
            .entries
            .iter()
            .map(|r| r.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// Rank over the rationals (equivalently over the reals).
    pub fn rank(&self) -> usize {
        bareiss(self.integer_rows()).1.len()
    }

    /// Rows scaled by the lcm of their denominators; same row space.
    fn integer_rows(&self) -> Vec<Vec<BigInt>> {
        self.entries
            .iter()
            .map(|r| {
                let l = r.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
                r.iter().map(|x| x.numer() * (&l / x.denom())).collect()
            })
            .collect()
    }

    /// CSV with a header row of column labels and one labelled line per row.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for c in &self.col_index {
            write!(out, ",{}", c.render(&self.alphabet)).unwrap();
        }
        out.push('\n');
        for (label, row) in self.row_index.iter().zip(&self.entries) {
            out.push_str(&label.render(&self.alphabet));
            for x in row {
                write!(out, ",{x}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let labels =
            |v: &[Label]| -> Vec<String> { v.iter().map(|l| l.render(&self.alphabet)).collect() };
        json!({
            "rows": labels(&self.row_index),
            "cols": labels(&self.col_index),
            "entries": self
                .entries
                .iter()
                .map(|r| r.iter().map(fraction).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        })
    }
}

impl fmt::Display for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.entries {
            let cells: Vec<String> = row.iter().map(|x| format!("{x:>3}")).collect();
            writeln!(f, "[{}]", cells.join(" "))?;
        }
        Ok(())
    }
}

/// `"p/q"`, always with an explicit denominator.
fn fraction(x: &Rational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Fraction-free elimination to row echelon form.
///
/// Returns the reduced rows and the pivot columns. After step `k` every
/// entry below the pivots is a `(k+1)`-minor, so each division is exact.
fn bareiss(mut a: Vec<Vec<BigInt>>) -> (Vec<Vec<BigInt>>, Vec<usize>) {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut prev = BigInt::one();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let (top, rest) = a.split_at_mut(r + 1);
        let pivot_row = &top[r];
        for row in rest.iter_mut() {
            for j in c + 1..cols {
                let num = &pivot_row[c] * &row[j] - &row[c] * &pivot_row[j];
                let (q, rem) = num.div_rem(&prev);
                debug_assert!(rem.is_zero(), "inexact Bareiss step");
                row[j] = q;
            }
            row[c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        pivots.push(c);
        r += 1;
    }
    a.truncate(r);
    (a, pivots)
}

/// Right kernel `{v : M v = 0}` or left kernel `{x : Mᵀ x = 0}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Right,
    Left,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelBasis {
    pub side: Side,
    pub rank: usize,
    /// Coordinates of every basis vector, in this order.
    pub index: Vec<Label>,
    /// One vector per free column; that column is 1 and the other free
    /// columns are 0.
    pub basis: Vec<Vec<Rational>>,
}

impl KernelBasis {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    /// True iff the kernel is exactly the line through `(1, …, 1)`.
    pub fn is_all_ones_line(&self) -> bool {
        match self.basis.as_slice() {
            [v] => !v.is_empty() && v.iter().all(|x| *x == v[0]),
            _ => false,
        }
    }

    pub fn to_json(&self, alphabet: &Alphabet) -> serde_json::Value {
        json!({
            "side": self.side,
            "rank": self.rank,
            "dimension": self.dimension(),
            "index": self.index.iter().map(|l| l.render(alphabet)).collect::<Vec<_>>(),
            "basis": self
                .basis
                .iter()
                .map(|v| v.iter().map(fraction).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        })
    }
}

/// Exact kernel basis by fraction-free elimination and back substitution.
pub fn kernel_basis(m: &RationalMatrix, side: Side) -> KernelBasis {
    let m = match side {
        Side::Right => m.clone(),
        Side::Left => m.transpose(),
    };
    let cols = m.cols();
    let (ech, pivots) = bareiss(m.integer_rows());
    let is_pivot: BTreeSet<usize> = pivots.iter().copied().collect();
    let basis = (0..cols)
        .filter(|c| !is_pivot.contains(c))
        .map(|free| {
            let mut x = vec![Rational::zero(); cols];
            x[free] = Rational::one();
            for (row, &p) in ech.iter().zip(&pivots).rev() {
                let s: Rational = (p + 1..cols)
                    .filter(|&j| !row[j].is_zero())
                    .map(|j| Rational::from_integer(row[j].clone()) * &x[j])
                    .sum();
                x[p] = -s / Rational::from_integer(row[p].clone());
            }
            x
        })
        .collect();
    KernelBasis {
        side,
        rank: pivots.len(),
        index: m.col_index.clone(),
        basis,
    }
}

/// Rank by ordinary Gauss–Jordan elimination over the rationals.
pub fn rational_rank(rows: &[Vec<Rational>]) -> usize {
    rref(rows.to_vec()).1.len()
}

fn rref(mut a: Vec<Vec<Rational>>) -> (Vec<Vec<Rational>>, Vec<usize>) {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for x in a[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let k = row[c].clone();
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x -= &k * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

/// The unique solution of `A x = b`, if there is exactly one.
fn solve_unique(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let cols = a.first().map_or(0, Vec::len);
    let aug: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(r, y)| r.iter().cloned().chain([y.clone()]).collect())
        .collect();
    let (red, pivots) = rref(aug);
    if pivots.len() != cols || pivots.last() == Some(&cols) {
        return None;
    }
    Some(red[..cols].iter().map(|r| r[cols].clone()).collect())
}

/// Right- and left-extension matrices `(R, L)` for the length `n`.
///
/// `R[u][v] = 1` iff `v` starts with `u`, `L[u][v] = 1` iff `v` ends with
/// `u`. The boolean reports saturation of both factor tables.
pub fn extension_matrices(
    w: &WordStream,
    n: usize,
    horizon: usize,
) -> Result<(RationalMatrix, RationalMatrix, bool)> {
    let g = crate::graphs::rauzy_graph(w, n, horizon)?;
    let (r, l) = extension_matrices_of(&g);
    Ok((r, l, g.saturated))
}

fn extension_matrices_of(g: &RauzyGraph) -> (RationalMatrix, RationalMatrix) {
    let (nv, ne) = (g.vertices.len(), g.edges.len());
    let mut r = vec![vec![Rational::zero(); ne]; nv];
    let mut l = vec![vec![Rational::zero(); ne]; nv];
    for e in 0..ne {
        let (s, t) = g.endpoints(e);
        r[s][e] = Rational::one();
        l[t][e] = Rational::one();
    }
    let rows: Vec<Label> = g.vertices.iter().cloned().map(Label::word).collect();
    let cols: Vec<Label> = g.edges.iter().cloned().map(Label::word).collect();
    let make = |entries| RationalMatrix {
        row_index: rows.clone(),
        col_index: cols.clone(),
        entries,
        alphabet: g.alphabet().clone(),
    };
    (make(r), make(l))
}

/// Flow matrix `M = R - L` of the Rauzy graph for the length `n`.
pub fn flow_matrix(w: &WordStream, n: usize, horizon: usize) -> Result<(RationalMatrix, bool)> {
    let g = crate::graphs::rauzy_graph(w, n, horizon)?;
    Ok((flow_matrix_of(&g), g.saturated))
}

/// `+1` where an edge leaves a vertex, `-1` where it enters, `0` on loops.
pub fn flow_matrix_of(g: &RauzyGraph) -> RationalMatrix {
    let (r, l) = extension_matrices_of(g);
    r.checked_sub(&l).expect("same indices")
}

/// How a frequency vector was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum FrequencyMode {
    /// Occurrence counts in the prefix of the given length, divided by it.
    Empirical {
        prefix_len: usize,
    },
    Exact,
}

/// Frequencies of the length-`n` factors; absent factors have frequency 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrequencyVector {
    pub n: usize,
    pub mode: FrequencyMode,
    pub values: BTreeMap<FiniteWord, QuadraticReal>,
}

impl FrequencyVector {
    pub fn get(&self, u: &[Letter]) -> QuadraticReal {
        self.values
            .get(u)
            .cloned()
            .unwrap_or_else(|| QuadraticReal::integer(0))
    }

    pub fn total(&self) -> Result<QuadraticReal> {
        self.values
            .values()
            .try_fold(QuadraticReal::integer(0), |s, x| s.checked_add(x))
    }

    pub fn to_json(&self, alphabet: &Alphabet) -> serde_json::Value {
        let values: serde_json::Map<String, serde_json::Value> = self
            .values
            .iter()
            .map(|(u, x)| {
                (
                    Label::word(u.clone()).render(alphabet),
                    json!(x.to_string()),
                )
            })
            .collect();
        json!({ "n": self.n, "mode": self.mode, "values": values })
    }
}

/// Empirical length-`n` factor frequencies at each prefix length.
///
/// A factor is counted at every start position `i` with `i + n <= P`.
pub fn frequency_vector(
    w: &WordStream,
    n: usize,
    prefixes: &[usize],
) -> Result<Vec<FrequencyVector>> {
    if prefixes.windows(2).any(|p| p[0] >= p[1]) {
        return Err(invalid("prefix lengths must be strictly increasing"));
    }
    let Some(&last) = prefixes.last() else {
        return Ok(Vec::new());
    };
    if prefixes[0] == 0 {
        return Err(invalid("prefix lengths must be positive"));
    }
    if w.available(last) < last {
        return Err(invalid(format!(
            "word has only {} letters, {last} requested",
            w.available(last)
        )));
    }
    w.with_prefix(last, |p| {
        let mut counts: BTreeMap<&[Letter], u64> = BTreeMap::new();
        let mut out = Vec::with_capacity(prefixes.len());
        let mut next_start = 0;
        for &len in prefixes {
            while next_start + n <= len {
                *counts.entry(&p[next_start..next_start + n]).or_default() += 1;
                next_start += 1;
            }
            let denom = BigInt::from(len);
            let values = counts
                .iter()
                .map(|(u, &c)| {
                    (
                        FiniteWord::from(u.to_vec()),
                        QuadraticReal::rational(Rational::new(c.into(), denom.clone())),
                    )
                })
                .collect();
            out.push(FrequencyVector {
                n,
                mode: FrequencyMode::Empirical { prefix_len: len },
                values,
            });
        }
        Ok(out)
    })
}

/// Exact length-`n` factor frequencies from exact letter frequencies.
///
/// Level by level, the frequencies of length-`k+1` factors are the unique
/// solution of `R f = L f = (f_u)_u`. Fails with `Unsupported` when the
/// system is underdetermined at some level.
pub fn propagate_frequencies(
    w: &WordStream,
    letter_freqs: &[QuadraticReal],
    n: usize,
    horizon: usize,
) -> Result<FrequencyVector> {
    let d = w.alphabet().size();
    if letter_freqs.len() != d {
        return Err(invalid(format!(
            "{} letter frequencies for an alphabet of size {d}",
            letter_freqs.len()
        )));
    }
    let field = common_radicand(letter_freqs)?;
    if n == 0 {
        let total = letter_freqs
            .iter()
            .try_fold(QuadraticReal::integer(0), |s, x| s.checked_add(x))?;
        return Ok(FrequencyVector {
            n,
            mode: FrequencyMode::Exact,
            values: [(FiniteWord::empty(), total)].into(),
        });
    }
    let letters = factor_table(w, 1, horizon)?;
    let mut current: BTreeMap<FiniteWord, QuadraticReal> = letters
        .words()
        .map(|u| (u.clone(), letter_freqs[usize::from(u[0]) - 1].clone()))
        .collect();
    for k in 1..n {
        let g = crate::graphs::rauzy_graph(w, k, horizon)?;
        let (r, l) = extension_matrices_of(&g);
        let a: Vec<Vec<Rational>> = r.entries.iter().chain(&l.entries).cloned().collect();
        let rhs: Vec<&QuadraticReal> = g
            .vertices
            .iter()
            .chain(&g.vertices)
            .map(|u| {
                current
                    .get(u)
                    .ok_or_else(|| invalid("factor table mismatch"))
            })
            .collect::<Result<_>>()?;
        let undetermined = || {
            Error::Unsupported(format!(
                "frequencies of length-{} factors are not determined by those of length {k}",
                k + 1
            ))
        };
        let ra: Vec<Rational> = rhs.iter().map(|x| x.a().clone()).collect();
        let rb: Vec<Rational> = rhs.iter().map(|x| x.b().clone()).collect();
        let xa = solve_unique(&a, &ra).ok_or_else(undetermined)?;
        let xb = solve_unique(&a, &rb).ok_or_else(undetermined)?;
        current = g
            .edges
            .iter()
            .zip(xa.into_iter().zip(xb))
            .map(|(v, (a, b))| Ok((v.clone(), QuadraticReal::new(a, b, field.clone())?)))
            .collect::<Result<_>>()?;
    }
    Ok(FrequencyVector {
        n,
        mode: FrequencyMode::Exact,
        values: current,
    })
}

/// Exact length-`n` factor frequencies of a standard Sturmian word with
/// eventually periodic run-lengths.
pub fn sturmian_frequency_vector(
    spec: &DirectiveSpec,
    n: usize,
    horizon: usize,
) -> Result<FrequencyVector> {
    let (f1, f2) = exact_frequencies(spec)?;
    let w = standard_sturmian(spec, horizon)?;
    propagate_frequencies(&w, &[f1, f2], n, horizon)
}

fn common_radicand(values: &[QuadraticReal]) -> Result<BigInt> {
    let mut field = BigInt::zero();
    for x in values {
        let d = x.radicand();
        if d.is_zero() {
            continue;
        }
        if field.is_zero() {
            field = d.clone();
        } else if &field != d {
            return Err(Error::UnsupportedField(field.to_string(), d.to_string()));
        }
    }
    Ok(field)
}

/// `max_u |(M f)_u|`, exact.
///
/// `f` must hold factors of the column length only, each a column label.
pub fn kirchhoff_residual(m: &RationalMatrix, f: &FrequencyVector) -> Result<QuadraticReal> {
    if let Some(c) = m
        .col_index
        .iter()
        .find(|c| c.copy.is_some() || c.word.len() != f.n)
    {
        return Err(invalid(format!(
            "column {} does not index length-{} factors",
            c.render(&m.alphabet),
            f.n
        )));
    }
    if let Some(u) = f.values.keys().find(|u| {
        m.col_index
            .binary_search(&Label::word((*u).clone()))
            .is_err()
    }) {
        return Err(invalid(format!(
            "frequency given for {}, which is not a column",
            m.alphabet.render(u)
        )));
    }
    let x: Vec<QuadraticReal> = m.col_index.iter().map(|c| f.get(&c.word)).collect();
    let mut worst = QuadraticReal::integer(0);
    for row in &m.entries {
        let mut s = QuadraticReal::integer(0);
        for (a, v) in row.iter().zip(&x) {
            if !a.is_zero() {
                s = s.checked_add(&QuadraticReal::rational(a.clone()).checked_mul(v)?)?;
            }
        }
        if s.signum().is_lt() {
            s = -s;
        }
        if s.compare(&worst)?.is_gt() {
            worst = s;
        }
    }
    Ok(worst)
}

/// Dimension of the rational span of values in one field `Q(√D)`.
///
/// Each value `a + b√D` is the vector `(a, b)`; the answer is the rank of
/// those vectors, so 0, 1 or 2.
pub fn rational_span_dimension(values: &[QuadraticReal]) -> Result<usize> {
    common_radicand(values)?;
    let rows: Vec<Vec<Rational>> = values
        .iter()
        .map(|x| vec![x.a().clone(), x.b().clone()])
        .collect();
    Ok(rational_rank(&rows))
}

/// What is known about the degrees of irrationality of the letters.
#[derive(Clone, Debug)]
pub enum Irrationality {
    /// Exact letter frequencies; `δ = Δ` is their rational span dimension.
    Exact(Vec<QuadraticReal>),
    /// Caller-supplied `Δ` and optionally `δ`, audited but not verified.
    Claimed {
        delta: Option<usize>,
        max_delta: usize,
    },
    Unknown,
}

/// One instance of `p(n) ≥ (k - 1)(n - 1) + d`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundCheck {
    pub n: usize,
    pub p: usize,
    pub bound: usize,
    pub pass: bool,
    pub tight: bool,
    /// For `n ≥ 2`, the largest `k` this `p(n)` admits.
    pub implied_max: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TijdemanAudit {
    pub d: usize,
    pub n_max: usize,
    pub horizon: usize,
    pub saturated: bool,
    /// `p(0), …, p(n_max + 1)`.
    pub complexity: Vec<usize>,
    pub source: &'static str,
    /// Minimal degree `δ`, when known or claimed.
    pub delta: Option<usize>,
    /// Maximal degree `Δ`, when known or claimed.
    pub max_delta: Option<usize>,
    /// Checks with `Δ`, for `1 ≤ n ≤ n_max`.
    pub bound_checks: Vec<BoundCheck>,
    /// Checks with `δ`, for `1 ≤ n ≤ n_max`.
    pub delta_checks: Vec<BoundCheck>,
    /// `min(d, min_m p(m+1) - p(m) + 1)` over `0 ≤ m ≤ n_max`: an upper
    /// bound on `Δ` whenever the profile is saturated.
    pub forced_max_delta: usize,
}

impl TijdemanAudit {
    pub fn passes(&self) -> bool {
        self.bound_checks
            .iter()
            .chain(&self.delta_checks)
            .all(|c| c.pass)
    }

    /// True iff every `Δ` check holds with equality.
    pub fn tight_everywhere(&self) -> bool {
        !self.bound_checks.is_empty() && self.bound_checks.iter().all(|c| c.tight)
    }

    pub fn first_failure(&self) -> Option<&BoundCheck> {
        self.bound_checks.iter().find(|c| !c.pass)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("audit serializes");
        v["passes"] = json!(self.passes());
        v["tight_everywhere"] = json!(self.tight_everywhere());
        v
    }
}

fn bound_checks(p: &[usize], d: usize, k: usize, n_max: usize) -> Vec<BoundCheck> {
    (1..=n_max)
        .map(|n| {
            let bound = (k - 1) * (n - 1) + d;
            BoundCheck {
                n,
                p: p[n],
                bound,
                pass: p[n] >= bound,
                tight: p[n] == bound,
                implied_max: (n >= 2).then(|| p[n].saturating_sub(d) / (n - 1) + 1),
            }
        })
        .collect()
}

/// Audits `p(n) ≥ (Δ - 1)(n - 1) + d` and `p(n) ≥ (δ - 1)(n - 1) + d` for
/// `1 ≤ n ≤ n_max`, and the bound `Δ ≤ p(m+1) - p(m) + 1` forced by the
/// complexity profile.
pub fn tijdeman_audit(
    w: &WordStream,
    d: usize,
    n_max: usize,
    horizon: usize,
    info: &Irrationality,
    exec: Exec,
) -> Result<TijdemanAudit> {
    if n_max == 0 {
        return Err(invalid("n_max must be at least 1"));
    }
    let profile = complexity_profile(w, n_max + 1, horizon, exec)?;
    let p = &profile.values;
    if p[1] != d {
        return Err(Error::AlphabetMismatch {
            expected: d,
            found: p[1],
        });
    }
    let (source, delta, max_delta) = match info {
        Irrationality::Exact(freqs) => {
            if freqs.len() != d {
                return Err(invalid(format!("{} frequencies for d = {d}", freqs.len())));
            }
            let k = rational_span_dimension(freqs)?;
            ("exact", Some(k), Some(k))
        }
        Irrationality::Claimed { delta, max_delta } => ("claimed", *delta, Some(*max_delta)),
        Irrationality::Unknown => ("none", None, None),
    };
    for k in [delta, max_delta].into_iter().flatten() {
        if k < 1 || k > d {
            return Err(invalid(format!("degree {k} outside 1..={d}")));
        }
    }
    if let (Some(a), Some(b)) = (delta, max_delta) {
        if a > b {
            return Err(invalid(format!("δ = {a} exceeds Δ = {b}")));
        }
    }
    let forced_max_delta = (0..=n_max)
        .map(|m| (p[m + 1] + 1).saturating_sub(p[m]))
        .min()
        .unwrap_or(d)
        .min(d);
    Ok(TijdemanAudit {
        d,
        n_max,
        horizon: profile.horizon,
        saturated: profile.all_saturated(),
        complexity: p.clone(),
        source,
        delta,
        max_delta,
        bound_checks: max_delta.map_or_else(Vec::new, |k| bound_checks(p, d, k, n_max)),
        delta_checks: delta.map_or_else(Vec::new, |k| bound_checks(p, d, k, n_max)),
        forced_max_delta,
    })
}

/// A split of the vertex set of `Ext(u)` into two sides.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SplitPartition {
    pub l1: BTreeSet<Letter>,
    pub r1: BTreeSet<Letter>,
    pub l2: BTreeSet<Letter>,
    pub r2: BTreeSet<Letter>,
}

impl SplitPartition {
    /// Side 1 is the connected component of `Ext(u)` containing its
    /// smallest left letter; side 2 is everything else.
    pub fn from_component(ext: &ExtensionGraph) -> SplitPartition {
        let mut l1 = BTreeSet::new();
        let mut r1 = BTreeSet::new();
        let mut stack: Vec<(bool, Letter)> =
            ext.left.first().map(|&a| (true, a)).into_iter().collect();
        while let Some((is_left, x)) = stack.pop() {
            let fresh = if is_left { l1.insert(x) } else { r1.insert(x) };
            if !fresh {
                continue;
            }
            for &(a, b) in &ext.edges {
                if is_left && a == x {
                    stack.push((false, b));
                } else if !is_left && b == x {
                    stack.push((true, a));
                }
            }
        }
        SplitPartition {
            l2: ext.left.difference(&l1).copied().collect(),
            r2: ext.right.difference(&r1).copied().collect(),
            l1,
            r1,
        }
    }

    fn non_empty_parts(&self) -> usize {
        [&self.l1, &self.r1, &self.l2, &self.r2]
            .iter()
            .filter(|s| !s.is_empty())
            .count()
    }
}

/// Flow matrix of the graph obtained by splitting vertex `u` into `u#1`
/// and `u#2`.
///
/// An edge `a·u` (resp. `u·b`) is attached to `u#1` when `a ∈ L1` (resp.
/// `b ∈ R1`), and to `u#2` otherwise.
pub fn vertex_split_flow_matrix(
    g: &RauzyGraph,
    ext: &ExtensionGraph,
    part: &SplitPartition,
) -> Result<RationalMatrix> {
    let u = &ext.u;
    let alpha = g.alphabet();
    if u.len() != g.n || g.vertex_index(u).is_none() {
        return Err(invalid(format!(
            "{} is not a vertex of the length-{} Rauzy graph",
            Label::word(u.clone()).render(alpha),
            g.n
        )));
    }
    let disjoint_cover = |p: &BTreeSet<Letter>, q: &BTreeSet<Letter>, all: &BTreeSet<Letter>| {
        p.is_disjoint(q) && p.union(q).copied().collect::<BTreeSet<_>>() == *all
    };
    if !disjoint_cover(&part.l1, &part.l2, &ext.left)
        || !disjoint_cover(&part.r1, &part.r2, &ext.right)
    {
        return Err(invalid(
            "partition must split the left and right letters of Ext(u)",
        ));
    }
    if part.non_empty_parts() < 3 {
        return Err(invalid(
            "at least three of L1, R1, L2, R2 must be non-empty",
        ));
    }
    if let Some(&(a, b)) = ext
        .edges
        .iter()
        .find(|(a, b)| part.l1.contains(a) != part.r1.contains(b))
    {
        return Err(Error::NotADisconnection(
            alpha.label(a).to_string(),
            alpha.label(b).to_string(),
        ));
    }
    let n = g.n;
    let mut rows: Vec<Label> = Vec::with_capacity(g.vertices.len() + 1);
    for v in &g.vertices {
        if v == u {
            rows.push(Label {
                word: v.clone(),
                copy: Some(1),
            });
            rows.push(Label {
                word: v.clone(),
                copy: Some(2),
            });
        } else {
            rows.push(Label::word(v.clone()));
        }
    }
    let row_of = |word: &[Letter], copy: Option<u8>| {
        rows.binary_search(&Label {
            word: FiniteWord::from(word.to_vec()),
            copy,
        })
        .expect("vertex present")
    };
    let mut entries = vec![vec![Rational::zero(); g.edges.len()]; rows.len()];
    for (e, v) in g.edges.iter().enumerate() {
        let src = &v[..n];
        let dst = &v[1..];
        let src_copy = (src == u.as_slice()).then(|| if part.r1.contains(&v[n]) { 1 } else { 2 });
        let dst_copy = (dst == u.as_slice()).then(|| if part.l1.contains(&v[0]) { 1 } else { 2 });
        let (s, t) = (row_of(src, src_copy), row_of(dst, dst_copy));
        if s != t {
            entries[s][e] = Rational::one();
            entries[t][e] = -Rational::one();
        }
    }
    RationalMatrix::new(
        rows,
        g.edges.iter().cloned().map(Label::word).collect(),
        entries,
        alpha.clone(),
    )
}
