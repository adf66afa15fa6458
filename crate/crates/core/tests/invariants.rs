use num_bigint::BigInt;
use proptest::prelude::*;

use slab_core::arith::{cf_expand, cf_value, CfStatus, QuadraticReal, Rational};
use slab_core::factors::complexity_profile;
use slab_core::flow::{flow_matrix, kernel_basis, rational_rank, RationalMatrix, Side};
use slab_core::graphs::{dendricity_check, second_derivative_identity_check};
use slab_core::sturmian::{run_length_extract, standard_sturmian, DirectiveSpec};
use slab_core::{Alphabet, Exec, FiniteWord};

/// Rank by partial-pivot elimination in floating point.
fn f64_rank(mut m: Vec<Vec<f64>>) -> usize {
    let cols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).max_by(|&a, &b| m[a][c].abs().total_cmp(&m[b][c].abs()))
        else {
            break;
        };
        if m[p][c].abs() < 1e-9 {
            continue;
        }
        m.swap(rank, p);
        for r in 0..m.len() {
            if r != rank {
                let k = m[r][c] / m[rank][c];
                let pivot = m[rank].clone();
                for (x, y) in m[r].iter_mut().zip(&pivot) {
                    *x -= k * y;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn labels(k: usize) -> Vec<FiniteWord> {
    (1..=k as u8).map(|a| FiniteWord::new(vec![a])).collect()
}

fn matrix_strategy() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..=5, 1usize..=5).prop_flat_map(|(r, c)| {
        proptest::collection::vec(proptest::collection::vec(-3i64..=3, c), r)
    })
}

fn directive_strategy() -> impl Strategy<Value = (Vec<u64>, Vec<u64>)> {
    (
        proptest::collection::vec(1u64..=4, 0..4),
        proptest::collection::vec(1u64..=4, 1..3),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn three_rank_routes_agree(entries in matrix_strategy()) {
        let (r, c) = (entries.len(), entries[0].len());
        let m = RationalMatrix::from_integers(
            labels(r), labels(c), entries.clone(), Alphabet::numeric(9).unwrap(),
        ).unwrap();
        let rows: Vec<Vec<Rational>> = entries
            .iter()
            .map(|row| row.iter().map(|&x| Rational::from_integer(x.into())).collect())
            .collect();
        let floats = entries.iter().map(|row| row.iter().map(|&x| x as f64).collect()).collect();
        prop_assert_eq!(m.rank(), rational_rank(&rows));
        prop_assert_eq!(m.rank(), f64_rank(floats));
        prop_assert_eq!(kernel_basis(&m, Side::Right).dimension(), c - m.rank());
        prop_assert_eq!(kernel_basis(&m, Side::Left).dimension(), r - m.rank());
    }

    #[test]
    fn kernel_vectors_are_annihilated(entries in matrix_strategy()) {
        let (r, c) = (entries.len(), entries[0].len());
        let m = RationalMatrix::from_integers(
            labels(r), labels(c), entries, Alphabet::numeric(9).unwrap(),
        ).unwrap();
        for v in kernel_basis(&m, Side::Right).basis {
            prop_assert!(m.mul_vec(&v).unwrap().iter().all(|x| *x == Rational::from_integer(0.into())));
        }
        let t = m.transpose();
        for v in kernel_basis(&m, Side::Left).basis {
            prop_assert!(t.mul_vec(&v).unwrap().iter().all(|x| *x == Rational::from_integer(0.into())));
        }
    }

    #[test]
    fn sturmian_flow_matrices((pre, period) in directive_strategy(), n in 0usize..=6) {
        let spec = DirectiveSpec::periodic(pre, period).unwrap();
        let w = standard_sturmian(&spec, 50_000).unwrap();
        let (m, _) = flow_matrix(&w, n, 50_000).unwrap();
        prop_assert!(m.column_sums().iter().all(|s| *s == Rational::from_integer(0.into())));
        prop_assert!(kernel_basis(&m, Side::Left).is_all_ones_line());
        prop_assert_eq!(kernel_basis(&m, Side::Right).dimension(), 2);
        prop_assert_eq!(m.rows(), n + 1);
        prop_assert_eq!(m.cols(), n + 2);
    }

    #[test]
    fn sturmian_words_are_sturmian_and_dendric((pre, period) in directive_strategy()) {
        let spec = DirectiveSpec::periodic(pre, period).unwrap();
        let w = standard_sturmian(&spec, 50_000).unwrap();
        let p = complexity_profile(&w, 12, 50_000, Exec::default()).unwrap();
        prop_assert_eq!(p.values, (0..=12).map(|n| n + 1).collect::<Vec<_>>());
        prop_assert!(dendricity_check(&w, 6, 50_000, Exec::default()).unwrap().is_dendric());
        for n in 0..=6 {
            let s = second_derivative_identity_check(&w, n, 50_000).unwrap();
            prop_assert!(s.pass && s.lhs == 0);
        }
    }

    #[test]
    fn run_lengths_round_trip(bs in proptest::collection::vec(1u64..=4, 5)) {
        let spec = DirectiveSpec::periodic(bs.clone(), vec![1]).unwrap();
        let w = standard_sturmian(&spec, 200_000).unwrap();
        let rl = run_length_extract(&w, 5, 200_000).unwrap();
        prop_assert!(rl.complete);
        prop_assert_eq!(rl.terms, bs);
    }

    #[test]
    fn sequential_and_parallel_agree((pre, period) in directive_strategy()) {
        let spec = DirectiveSpec::periodic(pre, period).unwrap();
        let w = standard_sturmian(&spec, 20_000).unwrap();
        let s = complexity_profile(&w, 15, 20_000, Exec::Sequential).unwrap();
        let p = complexity_profile(&w, 15, 20_000, Exec::Parallel).unwrap();
        prop_assert_eq!(s.values, p.values);
        prop_assert_eq!(s.saturated, p.saturated);
    }

    #[test]
    fn rational_cf_round_trip(p in -500i64..500, q in 1i64..500) {
        let x = QuadraticReal::ratio(p, q);
        if p <= 0 {
            prop_assert!(cf_expand(&x, 64).is_err());
            return Ok(());
        }
        let cf = cf_expand(&x, 64).unwrap();
        prop_assert_eq!(cf.status(), CfStatus::Terminated);
        let back = cf_value(cf.stored_terms()).unwrap();
        prop_assert_eq!(QuadraticReal::rational(back), x);
    }

    #[test]
    fn quadratic_field_operations(
        a in -20i64..20, b in -20i64..20, c in -20i64..20, e in 1i64..20, d in 2i64..8,
    ) {
        let s = QuadraticReal::sqrt(d).unwrap();
        let x = QuadraticReal::integer(a).checked_add(&s.checked_mul(&QuadraticReal::integer(b)).unwrap()).unwrap();
        let y = QuadraticReal::ratio(c, e).checked_add(&s).unwrap();
        let sum = x.checked_add(&y).unwrap();
        prop_assert_eq!(sum.checked_sub(&y).unwrap(), x.clone());
        let prod = x.checked_mul(&y).unwrap();
        prop_assert_eq!(prod.checked_div(&y).unwrap(), x.clone());
        let approx = x.to_f64() * y.to_f64();
        prop_assert!((prod.to_f64() - approx).abs() <= 1e-9 * (1.0 + approx.abs()));
        prop_assert_eq!(
            x.compare(&y).unwrap(),
            x.to_f64().partial_cmp(&y.to_f64()).unwrap()
        );
        prop_assert!(x.floor() <= BigInt::from(x.to_f64().floor() as i64 + 1));
    }
}
