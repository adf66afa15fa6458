//! Factor tables, complexity, special factors and the Morse–Hedlund detector.
//!
//! Everything here is computed on a finite prefix (the *horizon*) of a
//! [`WordStream`]. A table is called saturated when every factor it lists
//! already occurs entirely within the first half of the horizon, i.e. doubling
//! the scanned prefix from `horizon / 2` to `horizon` uncovered nothing new.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::par::{self, Exec};
use crate::word::{Alphabet, FiniteWord, Letter, WordStream};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FactorStats {
    /// Occurrences inside the scanned prefix, overlaps included.
    pub count: u64,
    /// Start index of the first occurrence.
    pub first: usize,
}

#[derive(Clone, Debug)]
pub struct FactorTable {
    pub n: usize,
    /// Letters actually scanned (may be below the request for finite words).
    pub horizon: usize,
    pub saturated: bool,
    pub factors: BTreeMap<FiniteWord, FactorStats>,
    alphabet: Alphabet,
}

impl FactorTable {
    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn contains(&self, u: &[Letter]) -> bool {
        self.factors.contains_key(u)
    }

    pub fn count(&self, u: &[Letter]) -> u64 {
        self.factors.get(u).map_or(0, |s| s.count)
    }

    /// Factors in lexicographic order.
    pub fn words(&self) -> impl Iterator<Item = &FiniteWord> {
        self.factors.keys()
    }

    pub fn factor_set(&self) -> BTreeSet<FiniteWord> {
        self.factors.keys().cloned().collect()
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct Export {
            n: usize,
            horizon: usize,
            saturated: bool,
            factors: Vec<String>,
            counts: BTreeMap<String, u64>,
        }
        let render = |u: &FiniteWord| self.alphabet.render(u);
        let export = Export {
            n: self.n,
            horizon: self.horizon,
            saturated: self.saturated,
            factors: self.factors.keys().map(render).collect(),
            counts: self
                .factors
                .iter()
                .map(|(u, s)| (render(u), s.count))
                .collect(),
        };
        serde_json::to_value(export).expect("factor table serializes")
    }
}

fn scan(prefix: &[Letter], n: usize) -> HashMap<&[Letter], FactorStats> {
    let mut map: HashMap<&[Letter], FactorStats> = HashMap::new();
    if prefix.len() < n {
        return map;
    }
    for start in 0..=prefix.len() - n {
        map.entry(&prefix[start..start + n])
            .and_modify(|s| s.count += 1)
            .or_insert(FactorStats {
                count: 1,
                first: start,
            });
    }
    map
}

/// All distinct length-`n` blocks of the first `horizon` letters, with counts.
pub fn factor_table(w: &WordStream, n: usize, horizon: usize) -> Result<FactorTable> {
    if horizon < n {
        return Err(invalid(format!("horizon {horizon} < factor length {n}")));
    }
    let clamped = w.available(horizon) < horizon;
    w.with_prefix(horizon, |p| {
        let map = scan(p, n);
        let half = p.len() / 2;
        let saturated = !clamped && map.values().all(|s| s.first + n <= half);
        Ok(FactorTable {
            n,
            horizon: p.len(),
            saturated,
            factors: map
                .into_iter()
                .map(|(u, s)| (FiniteWord::from(u), s))
                .collect(),
            alphabet: w.alphabet().clone(),
        })
    })
}

fn distinct_count(p: &[Letter], n: usize) -> (usize, bool) {
    if p.len() < n {
        return (0, false);
    }
    let mut seen: HashSet<&[Letter]> = HashSet::new();
    let mut last_new = 0;
    for start in 0..=p.len() - n {
        if seen.insert(&p[start..start + n]) {
            last_new = start + n;
        }
    }
    (seen.len(), last_new <= p.len() / 2)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComplexityProfile {
    pub horizon: usize,
    /// `values[n]` = number of distinct length-`n` factors at the horizon.
    pub values: Vec<usize>,
    /// Per-length saturation flags.
    pub saturated: Vec<bool>,
}

impl ComplexityProfile {
    pub fn all_saturated(&self) -> bool {
        self.saturated.iter().all(|&s| s)
    }
}

/// `p(0..=n_max)` at the given horizon, one length per task.
pub fn complexity_profile(
    w: &WordStream,
    n_max: usize,
    horizon: usize,
    exec: Exec,
) -> Result<ComplexityProfile> {
    if horizon < n_max {
        return Err(invalid(format!("horizon {horizon} < n_max {n_max}")));
    }
    let clamped = w.available(horizon) < horizon;
    w.with_prefix(horizon, |p| {
        let rows = par::map_range(exec, n_max + 1, |n| distinct_count(p, n));
        Ok(ComplexityProfile {
            horizon: p.len(),
            values: rows.iter().map(|r| r.0).collect(),
            saturated: rows.iter().map(|r| r.1 && !clamped).collect(),
        })
    })
}

/// Horizon-bounded complexity `p(0), …, p(n_max)`.
pub fn complexity(w: &WordStream, n_max: usize, horizon: usize) -> Result<Vec<usize>> {
    complexity_profile(w, n_max, horizon, Exec::default()).map(|c| c.values)
}

/// Scans the schedule and stops at the first horizon whose factor set
/// coincides with the one at the next schedule point.
pub fn stabilize_horizon(
    w: &WordStream,
    n: usize,
    schedule: &[usize],
) -> Result<(FactorTable, bool)> {
    let (&last, _) = schedule
        .split_last()
        .ok_or_else(|| invalid("empty horizon schedule"))?;
    if schedule.windows(2).any(|p| p[0] >= p[1]) {
        return Err(invalid("horizon schedule must be strictly increasing"));
    }
    if schedule[0] < n {
        return Err(invalid("horizon schedule starts below the factor length"));
    }
    // First-occurrence ends at the largest horizon give the factor set at
    // every smaller horizon.
    let full = factor_table(w, n, last)?;
    let ends: Vec<usize> = full.factors.values().map(|s| s.first + n).collect();
    for pair in schedule.windows(2) {
        let (lo, hi) = (pair[0], pair[1]);
        if w.available(hi) < hi {
            break;
        }
        if !ends.iter().any(|&e| e > lo && e <= hi) {
            let mut table = factor_table(w, n, lo)?;
            table.saturated = true;
            return Ok((table, true));
        }
    }
    let mut table = full;
    table.saturated = false;
    Ok((table, false))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecialFactors {
    pub n: usize,
    pub right_special: BTreeSet<FiniteWord>,
    pub left_special: BTreeSet<FiniteWord>,
    /// `Σ_u (|R(u)| − 1)` over length-`n` factors.
    pub right_excess: usize,
    pub left_excess: usize,
    pub saturated: bool,
}

pub fn special_factors(w: &WordStream, n: usize, horizon: usize) -> Result<SpecialFactors> {
    if horizon < n + 2 {
        return Err(invalid(format!("horizon {horizon} < n + 2")));
    }
    let ext = factor_table(w, n + 1, horizon)?;
    let base = factor_table(w, n, horizon)?;
    let mut right: BTreeMap<&[Letter], BTreeSet<Letter>> = BTreeMap::new();
    let mut left: BTreeMap<&[Letter], BTreeSet<Letter>> = BTreeMap::new();
    for v in ext.words() {
        right.entry(&v[..n]).or_default().insert(v[n]);
        left.entry(&v[1..]).or_default().insert(v[0]);
    }
    let pick = |m: &BTreeMap<&[Letter], BTreeSet<Letter>>| -> (BTreeSet<FiniteWord>, usize) {
        let set = m
            .iter()
            .filter(|(_, s)| s.len() >= 2)
            .map(|(u, _)| FiniteWord::from(*u))
            .collect();
        let excess = m.values().map(|s| s.len() - 1).sum();
        (set, excess)
    };
    let (right_special, right_excess) = pick(&right);
    let (left_special, left_excess) = pick(&left);
    Ok(SpecialFactors {
        n,
        right_special,
        left_special,
        right_excess,
        left_excess,
        saturated: ext.saturated && base.saturated,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum PeriodicityVerdict {
    /// `p(n0 + 1) = p(n0) = complexity`.
    EventuallyPeriodic {
        n0: usize,
        complexity: usize,
    },
    NoEvidence,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MorseHedlundReport {
    pub verdict: PeriodicityVerdict,
    /// False when some table used was not saturated; the verdict is then
    /// only a horizon-bounded observation.
    pub saturated: bool,
    pub complexity: Vec<usize>,
}

/// Looks for a length where the complexity stops growing.
pub fn morse_hedlund_detect(
    w: &WordStream,
    n_max: usize,
    horizon: usize,
) -> Result<MorseHedlundReport> {
    if horizon < n_max + 1 {
        return Err(invalid("horizon must be at least n_max + 1"));
    }
    let profile = complexity_profile(w, n_max + 1, horizon, Exec::default())?;
    let p = &profile.values;
    let hit = (0..=n_max).find(|&n| p[n + 1] == p[n]);
    let (verdict, saturated) = match hit {
        Some(n0) => (
            PeriodicityVerdict::EventuallyPeriodic {
                n0,
                complexity: p[n0],
            },
            profile.saturated[n0] && profile.saturated[n0 + 1],
        ),
        None => (PeriodicityVerdict::NoEvidence, profile.all_saturated()),
    };
    Ok(MorseHedlundReport {
        verdict,
        saturated,
        complexity: profile.values,
    })
}

/// Recurrence up to length `n`: every factor of length `<= n` of the first
/// `horizon` letters occurs again within the second half of that prefix.
/// This never certifies recurrence of the whole infinite word.
pub fn recurrent_up_to(w: &WordStream, n: usize, horizon: usize) -> Result<bool> {
    if horizon < 2 * n + 2 {
        return Err(invalid("horizon too small for the recurrence probe"));
    }
    Ok(w.with_prefix(horizon, |p| {
        let tail = &p[p.len() / 2..];
        (0..=n).all(|m| {
            let later: HashSet<&[Letter]> = tail.windows(m.max(1)).collect();
            if m == 0 {
                return true;
            }
            p.windows(m).all(|u| later.contains(u))
        })
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::Alphabet;

    fn periodic(labels: &str, pre: &str, period: &str) -> WordStream {
        let a = Alphabet::parse(labels).unwrap();
        let pre = a.parse_word(pre).unwrap();
        let per = a.parse_word(period).unwrap();
        WordStream::periodic(a, &pre, &per, "test").unwrap()
    }

    fn rendered(t: &FactorTable) -> Vec<String> {
        t.words().map(|u| t.alphabet().render(u)).collect()
    }

    #[test]
    fn factor_table_examples() {
        let w = periodic("12", "", "12");
        let t = factor_table(&w, 1, 10).unwrap();
        assert_eq!(rendered(&t), ["1", "2"]);
        assert_eq!(t.count(&[1]), 5);
        assert_eq!(t.count(&[2]), 5);

        let w = periodic("123", "", "1233");
        assert_eq!(
            rendered(&factor_table(&w, 2, 40).unwrap()),
            ["12", "23", "31", "33"]
        );

        let w = periodic("012", "2", "010");
        assert_eq!(
            rendered(&factor_table(&w, 2, 40).unwrap()),
            ["00", "01", "10", "20"]
        );
        assert!(factor_table(&w, 5, 4).is_err());
    }

    #[test]
    fn overlapping_counts() {
        let w = periodic("1", "", "1");
        let t = factor_table(&w, 2, 3).unwrap();
        assert_eq!(t.count(&[1, 1]), 2);
        let t0 = factor_table(&w, 0, 3).unwrap();
        assert_eq!(t0.count(&[]), 4);
    }

    #[test]
    fn complexity_examples() {
        let ones = periodic("1", "", "1");
        assert_eq!(complexity(&ones, 5, 100).unwrap(), vec![1; 6]);
        let w = periodic("123", "", "1233");
        assert_eq!(complexity(&w, 4, 100).unwrap(), vec![1, 3, 4, 4, 4]);
    }

    #[test]
    fn stabilize_examples() {
        let w = periodic("12", "", "12");
        let (t, sat) = stabilize_horizon(&w, 3, &[10, 20, 40]).unwrap();
        assert!(sat);
        assert_eq!(t.horizon, 10);
        assert_eq!(rendered(&t), ["121", "212"]);
        assert!(stabilize_horizon(&w, 3, &[]).is_err());
        assert!(stabilize_horizon(&w, 3, &[20, 10]).is_err());
    }

    #[test]
    fn special_factor_examples() {
        let ones = periodic("1", "", "1");
        let s = special_factors(&ones, 2, 50).unwrap();
        assert!(s.right_special.is_empty() && s.left_special.is_empty());

        let w = periodic("12", "", "1122");
        let s = special_factors(&w, 1, 50).unwrap();
        let expect: BTreeSet<_> = [FiniteWord::from_digits("1"), FiniteWord::from_digits("2")]
            .into_iter()
            .collect();
        assert_eq!(s.right_special, expect);
    }

    #[test]
    fn morse_hedlund_on_periodic_words() {
        let w = periodic("012", "2", "010");
        let r = morse_hedlund_detect(&w, 5, 200).unwrap();
        assert_eq!(
            r.verdict,
            PeriodicityVerdict::EventuallyPeriodic {
                n0: 2,
                complexity: 4
            }
        );
        assert!(r.saturated);
        assert_eq!(&r.complexity[..4], &[1, 3, 4, 4]);

        let w = periodic("12", "", "12");
        let r = morse_hedlund_detect(&w, 3, 50).unwrap();
        assert_eq!(
            r.verdict,
            PeriodicityVerdict::EventuallyPeriodic {
                n0: 1,
                complexity: 2
            }
        );
    }

    #[test]
    fn finite_words_are_never_saturated_past_their_end() {
        let a = Alphabet::numeric(2).unwrap();
        let w = WordStream::finite(a, FiniteWord::from_digits("1212"), "f").unwrap();
        let t = factor_table(&w, 1, 100).unwrap();
        assert_eq!(t.horizon, 4);
        assert!(!t.saturated);
    }

    #[test]
    fn recurrence_probe() {
        assert!(recurrent_up_to(&periodic("12", "", "1122"), 5, 200).unwrap());
        assert!(!recurrent_up_to(&periodic("12", "2", "1"), 1, 200).unwrap());
    }

    #[test]
    fn json_export_shape() {
        let w = periodic("12", "", "12");
        let t = factor_table(&w, 1, 10).unwrap();
        let v = t.to_json();
        assert_eq!(v["n"], 1);
        assert_eq!(v["horizon"], 10);
        assert_eq!(v["saturated"], true);
        assert_eq!(v["factors"], serde_json::json!(["1", "2"]));
        assert_eq!(v["counts"]["1"], 5);
    }
}
