use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use slab_core::builtin::builtin;
use slab_core::factors::complexity_profile;
use slab_core::flow::{tijdeman_audit, Irrationality};
use slab_core::graphs::dendricity_check;
use slab_core::Exec;

const MODES: [(&str, Exec); 2] = [
    ("sequential", Exec::Sequential),
    ("parallel", Exec::Parallel),
];

fn complexity(c: &mut Criterion) {
    let mut g = c.benchmark_group("complexity_profile");
    g.sample_size(10);
    for name in ["fibonacci", "tribonacci", "champernowne-binary"] {
        let w = builtin(name).unwrap().stream;
        w.prefix(200_000);
        for (mode, exec) in MODES {
            g.bench_with_input(BenchmarkId::new(mode, name), &w, |b, w| {
                b.iter(|| complexity_profile(w, 40, 200_000, exec).unwrap())
            });
        }
    }
    g.finish();
}

fn dendricity(c: &mut Criterion) {
    let mut g = c.benchmark_group("dendricity_check");
    g.sample_size(10);
    for name in ["fibonacci", "tribonacci"] {
        let w = builtin(name).unwrap().stream;
        w.prefix(50_000);
        for (mode, exec) in MODES {
            g.bench_with_input(BenchmarkId::new(mode, name), &w, |b, w| {
                b.iter(|| dendricity_check(w, 20, 50_000, exec).unwrap())
            });
        }
    }
    g.finish();
}

fn audit(c: &mut Criterion) {
    let mut g = c.benchmark_group("tijdeman_audit");
    g.sample_size(10);
    let fib = builtin("fibonacci").unwrap();
    let info = Irrationality::Exact(fib.exact_freqs.clone().unwrap());
    fib.stream.prefix(50_000);
    for (mode, exec) in MODES {
        g.bench_function(BenchmarkId::new(mode, "fibonacci"), |b| {
            b.iter(|| tijdeman_audit(&fib.stream, 2, 30, 50_000, &info, exec).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, complexity, dendricity, audit);
criterion_main!(benches);
