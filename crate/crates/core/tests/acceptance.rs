use std::collections::HashSet;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use slab_core::arith::{cf_expand, CfStatus, QuadraticReal};
use slab_core::builtin::builtin;
use slab_core::codings::{
    billiard_word, cutting_sequence, flow_word, rotation_word, LineParams, RotationParams,
};
use slab_core::factors::{complexity_profile, morse_hedlund_detect, PeriodicityVerdict};
use slab_core::flow::{
    flow_matrix, frequency_vector, kernel_basis, kirchhoff_residual, rational_span_dimension,
    sturmian_frequency_vector, tijdeman_audit, Irrationality, Side,
};
use slab_core::graphs::{
    dendricity_check, extension_graph, second_derivative_identity_check, TreeVerdict,
};
use slab_core::sturmian::{run_length_extract, standard_sturmian, DirectiveSpec};
use slab_core::word::letter_counts;
use slab_core::{Exec, Letter, WordStream};

type Outcome = Result<(), String>;
type Criterion = (&'static str, fn() -> Outcome, u64);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn word(name: &str) -> WordStream {
    builtin(name).expect("builtin").stream
}

/// Distinct length-`n` factors of the first `len` letters.
fn naive_p(w: &WordStream, n: usize, len: usize) -> usize {
    let prefix = w.prefix(len);
    let s = prefix.as_slice();
    if n > s.len() {
        return 0;
    }
    s.windows(n.max(1))
        .take(if n == 0 { 1 } else { s.len() - n + 1 })
        .map(|f| if n == 0 { &f[..0] } else { f })
        .collect::<HashSet<&[Letter]>>()
        .len()
}

/// `v_0 = 1`, `v_1 = 12`, `v_{n+2} = v_{n+1} v_n`.
fn fibonacci_by_concatenation(len: usize) -> Vec<Letter> {
    let (mut a, mut b) = (vec![1], vec![1, 2]);
    while b.len() < len {
        let next = [b.as_slice(), a.as_slice()].concat();
        a = b;
        b = next;
    }
    b.truncate(len);
    b
}

fn q(s: &str) -> QuadraticReal {
    s.parse().expect("quadratic literal")
}

const FIB_13: &[Letter] = &[1, 2, 1, 1, 2, 1, 2, 1, 1, 2, 1, 1, 2];

const CORPUS: [&str; 8] = [
    "fibonacci",
    "period-12",
    "two-then-010",
    "quasi-sturmian-31-32",
    "period-123",
    "period-1233",
    "tribonacci",
    "ones",
];

fn c1_flow_matrix_golden() -> Outcome {
    let (m, saturated) = flow_matrix(&word("two-then-010"), 1, 1000).map_err(err)?;
    ensure!(saturated, "table not saturated");
    let expected = vec![vec![0, 1, -1, -1], vec![0, -1, 1, 0], vec![0, 0, 0, 1]];
    ensure!(
        m.to_integers() == Some(expected.clone()),
        "got {:?}",
        m.to_integers()
    );
    ensure!(
        m.to_csv() == ",00,01,10,20\n0,0,1,-1,-1\n1,0,-1,1,0\n2,0,0,0,1\n",
        "csv {}",
        m.to_csv()
    );
    Ok(())
}

fn c2_fibonacci_prefix() -> Outcome {
    let spec = DirectiveSpec::fibonacci();
    let w = standard_sturmian(&spec, 10_000).map_err(err)?;
    let p13 = w.prefix(13);
    ensure!(p13.as_slice() == FIB_13, "prefix {:?}", p13.as_slice());
    let oracle = fibonacci_by_concatenation(10_000);
    ensure!(
        w.prefix(10_000).as_slice() == oracle.as_slice(),
        "recurrence disagrees"
    );
    Ok(())
}

fn c3_sturmian_complexity() -> Outcome {
    let w = word("fibonacci");
    let profile = complexity_profile(&w, 50, 100_000, Exec::default()).map_err(err)?;
    ensure!(profile.all_saturated(), "horizon 10^5 not saturated");
    let expected: Vec<usize> = (0..=50).map(|n| n + 1).collect();
    ensure!(profile.values == expected, "profile {:?}", profile.values);
    Ok(())
}

fn c4_continued_fractions() -> Outcome {
    let big = |v: &[i64]| v.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>();
    let r = cf_expand(&QuadraticReal::ratio(17, 6), 20).map_err(err)?;
    ensure!(
        r.status() == CfStatus::Terminated,
        "17/6 status {:?}",
        r.status()
    );
    ensure!(
        r.stored_terms() == big(&[2, 1, 5]).as_slice(),
        "17/6 {:?}",
        r.stored_terms()
    );
    let phi = cf_expand(&QuadraticReal::golden(), 20).map_err(err)?;
    ensure!(
        phi.preperiod().is_empty(),
        "phi preperiod {:?}",
        phi.preperiod()
    );
    ensure!(
        phi.period() == Some(big(&[1]).as_slice()),
        "phi period {:?}",
        phi.period()
    );
    let s2 = cf_expand(&QuadraticReal::sqrt(2).map_err(err)?, 20).map_err(err)?;
    ensure!(
        s2.preperiod() == big(&[1]).as_slice(),
        "sqrt2 preperiod {:?}",
        s2.preperiod()
    );
    ensure!(
        s2.period() == Some(big(&[2]).as_slice()),
        "sqrt2 period {:?}",
        s2.period()
    );
    Ok(())
}

fn c5_renormalization_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for trial in 0..20 {
        let pre: Vec<u64> = (0..6).map(|_| rng.gen_range(1..=4)).collect();
        let period = vec![rng.gen_range(1..=4)];
        let spec = DirectiveSpec::periodic(pre.clone(), period).map_err(err)?;
        let w = standard_sturmian(&spec, 400_000).map_err(err)?;
        let rl = run_length_extract(&w, 6, 400_000).map_err(err)?;
        ensure!(
            rl.complete,
            "trial {trial} {pre:?}: incomplete ({:?})",
            rl.caveat
        );
        ensure!(
            rl.terms == spec.run_lengths(6),
            "trial {trial}: {:?} vs {pre:?}",
            rl.terms
        );
    }
    Ok(())
}

fn c6_coding_equivalence() -> Outcome {
    let oracle = fibonacci_by_concatenation(10_000);
    let fib = word("fibonacci").prefix(10_000);
    ensure!(
        fib.as_slice() == oracle.as_slice(),
        "builtin fibonacci disagrees"
    );
    let alpha = q("3/2-1/2*sqrt(5)");
    let rot = rotation_word(
        &RotationParams::new(alpha.clone(), alpha).map_err(err)?,
        10_000,
    );
    ensure!(
        rot.as_slice() == oracle.as_slice(),
        "rotation word disagrees"
    );
    let line = LineParams::new(
        (QuadraticReal::integer(0), QuadraticReal::integer(0)),
        (q("1/2*sqrt(5)-1/2"), q("3/2-1/2*sqrt(5)")),
    )
    .map_err(err)?;
    for (name, w) in [
        ("billiard", billiard_word(&line, 1000).map_err(err)?),
        ("cutting", cutting_sequence(&line, 1000).map_err(err)?),
        ("flow", flow_word(&line, 1000).map_err(err)?),
    ] {
        ensure!(w.as_slice() == &oracle[..1000], "{name} word disagrees");
    }
    Ok(())
}

fn c7_kernel_identities() -> Outcome {
    let horizon = 20_000;
    for name in CORPUS {
        let w = word(name);
        for n in 0..=8 {
            let (m, _) = flow_matrix(&w, n, horizon).map_err(err)?;
            let left = kernel_basis(&m, Side::Left);
            ensure!(
                left.is_all_ones_line(),
                "{name} n={n}: left kernel {:?}",
                left.basis
            );
            let right = kernel_basis(&m, Side::Right);
            let expected = naive_p(&w, n + 1, horizon) + 1 - naive_p(&w, n, horizon);
            ensure!(
                right.dimension() == expected,
                "{name} n={n}: dim right kernel {} vs {expected}",
                right.dimension()
            );
        }
    }
    Ok(())
}

fn c8_kirchhoff() -> Outcome {
    let spec = DirectiveSpec::fibonacci();
    let w = word("fibonacci");
    for n in 1..=6 {
        let (m, _) = flow_matrix(&w, n, 20_000).map_err(err)?;
        let f = sturmian_frequency_vector(&spec, n + 1, 20_000).map_err(err)?;
        let r = kirchhoff_residual(&m, &f).map_err(err)?;
        ensure!(r.is_zero(), "exact residual at n={n} is {r}");
        let total = f.total().map_err(err)?;
        ensure!(
            total == QuadraticReal::integer(1),
            "frequencies sum to {total}"
        );
    }
    for name in CORPUS {
        let w = word(name);
        for n in 1..=6 {
            let (m, _) = flow_matrix(&w, n, 20_000).map_err(err)?;
            let f = &frequency_vector(&w, n + 1, &[10_000]).map_err(err)?[0];
            let r = kirchhoff_residual(&m, f).map_err(err)?;
            let p = naive_p(&w, n, 20_000) as i64;
            let bound = QuadraticReal::ratio(10 * p * (n as i64 + 1), 10_000);
            ensure!(
                r.compare(&bound).map_err(err)?.is_le(),
                "{name} n={n}: empirical residual {r} above {bound}"
            );
        }
    }
    Ok(())
}

fn c9_tijdeman_bounds() -> Outcome {
    let fib = builtin("fibonacci").map_err(err)?;
    let freqs = fib.exact_freqs.clone().ok_or("no exact frequencies")?;
    ensure!(
        rational_span_dimension(&freqs).map_err(err)? == 2,
        "span dimension"
    );
    let a = tijdeman_audit(
        &fib.stream,
        2,
        20,
        20_000,
        &Irrationality::Exact(freqs),
        Exec::default(),
    )
    .map_err(err)?;
    ensure!(a.max_delta == Some(2), "fibonacci Δ {:?}", a.max_delta);
    ensure!(a.passes() && a.tight_everywhere(), "fibonacci not tight");
    for c in &a.bound_checks {
        ensure!(
            c.p == c.n + 1 && c.bound == c.n + 1,
            "fibonacci n={}: p={} bound={}",
            c.n,
            c.p,
            c.bound
        );
    }

    let qs = word("quasi-sturmian-31-32");
    for n in 2..=12 {
        let p = naive_p(&qs, n, 20_000);
        ensure!(p == n + 2 && p < 2 * n + 1, "31/32 p({n}) = {p}");
    }
    let b = tijdeman_audit(&qs, 3, 12, 20_000, &Irrationality::Unknown, Exec::default())
        .map_err(err)?;
    ensure!(
        b.forced_max_delta == 2,
        "31/32 forced Δ ≤ {}",
        b.forced_max_delta
    );
    let claimed = Irrationality::Claimed {
        delta: None,
        max_delta: 3,
    };
    let b3 = tijdeman_audit(&qs, 3, 12, 20_000, &claimed, Exec::default()).map_err(err)?;
    ensure!(!b3.passes(), "Δ = 3 claim should fail on the 31/32 word");

    let per = builtin("period-123").map_err(err)?;
    let info = Irrationality::Exact(per.exact_freqs.clone().ok_or("no frequencies")?);
    let c = tijdeman_audit(&per.stream, 3, 10, 1000, &info, Exec::default()).map_err(err)?;
    ensure!(c.max_delta == Some(1), "(123)^ω Δ {:?}", c.max_delta);
    for ch in &c.bound_checks {
        ensure!(
            ch.bound == 3 && ch.tight,
            "(123)^ω n={}: bound {} p {}",
            ch.n,
            ch.bound,
            ch.p
        );
    }
    Ok(())
}

fn c10_dendricity() -> Outcome {
    let fib = dendricity_check(&word("fibonacci"), 15, 20_000, Exec::default()).map_err(err)?;
    ensure!(
        fib.is_dendric(),
        "fibonacci not dendric: {:?}",
        fib.failure.map(|f| f.u)
    );

    let p = word("period-1122");
    let verdict = extension_graph(&p, &[], 1000)
        .map_err(err)?
        .is_tree()
        .map_err(err)?;
    ensure!(verdict == TreeVerdict::Cyclic, "(1122)^ω at ε: {verdict:?}");
    let r = dendricity_check(&p, 4, 1000, Exec::default()).map_err(err)?;
    let wit = r.failure.ok_or("(1122)^ω reported dendric")?;
    ensure!(
        wit.u.is_empty() && wit.kind == TreeVerdict::Cyclic,
        "witness {:?} {:?}",
        wit.u,
        wit.kind
    );

    let t = dendricity_check(&word("two-then-ones"), 4, 1000, Exec::default()).map_err(err)?;
    ensure!(!t.is_dendric(), "2111… reported dendric");

    for name in CORPUS {
        let w = word(name);
        for n in 0..=8 {
            let s = second_derivative_identity_check(&w, n, 20_000).map_err(err)?;
            let p: Vec<i64> = (n..=n + 2).map(|k| naive_p(&w, k, 20_000) as i64).collect();
            let lhs = (p[2] - p[1]) - (p[1] - p[0]);
            ensure!(
                s.pass && s.lhs == s.rhs,
                "{name} n={n}: {} vs {}",
                s.lhs,
                s.rhs
            );
            ensure!(s.lhs == lhs, "{name} n={n}: lhs {} vs oracle {lhs}", s.lhs);
        }
    }
    Ok(())
}

fn c11_morse_hedlund() -> Outcome {
    let w = word("two-then-010");
    ensure!(
        naive_p(&w, 2, 1000) == 4 && naive_p(&w, 3, 1000) == 4,
        "p(2), p(3) ≠ 4"
    );
    let r = morse_hedlund_detect(&w, 8, 1000).map_err(err)?;
    ensure!(
        matches!(r.verdict, PeriodicityVerdict::EventuallyPeriodic { complexity: 4, n0 } if n0 <= 3),
        "2(010)^ω verdict {:?}",
        r.verdict
    );
    let f = morse_hedlund_detect(&word("fibonacci"), 20, 20_000).map_err(err)?;
    ensure!(
        f.verdict == PeriodicityVerdict::NoEvidence,
        "fibonacci verdict {:?}",
        f.verdict
    );
    Ok(())
}

/// `(len, ones, zeros)` at each stage: even `n` pads zeros to balance, odd `n`
/// appends `n·|u_n|` ones.
fn exercise_oracle(cap: usize) -> Vec<(usize, usize, usize)> {
    let mut out = vec![(1, 1, 0)];
    loop {
        let n = out.len() - 1;
        let (len, ones, zeros) = out[n];
        let next = if n % 2 == 0 {
            (len + ones - zeros, ones, ones)
        } else {
            (len + n * len, ones + n * len, zeros)
        };
        if next.0 > cap {
            return out;
        }
        out.push(next);
    }
}

fn c12_exercise_word() -> Outcome {
    let named = builtin("tijdeman-exercise-binary").map_err(err)?;
    let alphabet = named.stream.alphabet().clone();
    let one = alphabet.letter_of("1").ok_or("no letter `1`")?;
    let stages = exercise_oracle(10_000);
    ensure!(stages.len() >= 8, "only {} stages", stages.len());
    let mut last_share = QuadraticReal::integer(0);
    for (n, &(len, ones, _)) in stages.iter().enumerate().skip(1).take(6) {
        let counts = letter_counts(&alphabet, named.stream.prefix(len).as_slice());
        let c1 = counts
            .iter()
            .find(|(a, _)| *a == one)
            .map(|c| c.1)
            .unwrap_or(0) as i64;
        ensure!(c1 as usize == ones, "stage {n}: {c1} ones vs oracle {ones}");
        let share = QuadraticReal::ratio(c1, len as i64);
        if n % 2 == 1 {
            ensure!(
                share == QuadraticReal::ratio(1, 2),
                "|u_{n}| = {len}: share {share}"
            );
        } else {
            ensure!(
                share.compare(&last_share).map_err(err)?.is_gt(),
                "|u_{n}|: share {share} not increasing"
            );
            last_share = share;
        }
    }

    let ternary = word("tijdeman-exercise-ternary");
    let claimed = Irrationality::Claimed {
        delta: None,
        max_delta: 3,
    };
    let a = tijdeman_audit(&ternary, 3, 15, 100_000, &claimed, Exec::default()).map_err(err)?;
    ensure!(
        a.passes(),
        "ternary audit fails at {:?}",
        a.first_failure().map(|c| c.n)
    );
    for n in 1..=15 {
        let p = naive_p(&ternary, n, 100_000);
        ensure!(p > 2 * n, "ternary p({n}) = {p} below 2n+1");
    }
    Ok(())
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 12] = [
        ("flow-matrix golden", c1_flow_matrix_golden, 1),
        ("fibonacci prefix and recurrence", c2_fibonacci_prefix, 1),
        ("sturmian complexity n<=50", c3_sturmian_complexity, 5),
        ("continued fractions", c4_continued_fractions, 1),
        (
            "renormalization round trip",
            c5_renormalization_round_trip,
            10,
        ),
        ("coding equivalence", c6_coding_equivalence, 30),
        ("kernel identities", c7_kernel_identities, 30),
        ("kirchhoff residuals", c8_kirchhoff, 10),
        ("tijdeman bounds", c9_tijdeman_bounds, 30),
        ("dendricity", c10_dendricity, 30),
        ("morse-hedlund detector", c11_morse_hedlund, 30),
        ("exercise word", c12_exercise_word, 30),
    ];
    let mut failed = Vec::new();
    for (i, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut outcome = run();
        let elapsed = start.elapsed();
        if outcome.is_ok() && elapsed > Duration::from_secs(*limit) {
            outcome = Err(format!("took {elapsed:.2?}, limit {limit} s"));
        }
        match &outcome {
            Ok(()) => println!("PASS {:>2} {name} ({elapsed:.2?})", i + 1),
            Err(e) => {
                println!("FAIL {:>2} {name} ({elapsed:.2?}): {e}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
