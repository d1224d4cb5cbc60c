//! Monte Carlo throughput: rayon-chunked sampling against the sequential
//! fallback on the same circuits. Both paths reduce chunk sums in fixed
//! order, so they produce bit-identical estimates; the bench measures the
//! scheduling overhead and speedup only.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use magickit::channels::ChoiOperator;
use magickit::numerics::matrix::{ComplexMatrix, C64};
use magickit::simulate::{bench_sample_mean, Circuit};
use magickit::stabilizer::hadamard;

fn t_gate_choi() -> ChoiOperator {
    let a = std::f64::consts::FRAC_PI_4;
    let u = ComplexMatrix::from_rows(vec![
        vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        vec![C64::new(0.0, 0.0), C64::new(a.cos(), a.sin())],
    ]);
    ChoiOperator::from_unitary(&u).expect("T gate is unitary")
}

fn single_qubit_circuit(depth: usize) -> Circuit {
    let h = ChoiOperator::from_unitary(&hadamard()).unwrap();
    let mut elements = Vec::with_capacity(depth);
    for i in 0..depth {
        if i % 2 == 0 {
            elements.push(h.clone());
        } else {
            elements.push(t_gate_choi());
        }
    }
    Circuit::new(elements, "X".parse().unwrap()).unwrap()
}

fn bench_sampling(c: &mut Criterion) {
    let mut group = c.benchmark_group("static_monte_carlo_sampling");
    for &samples in &[10_000u64, 100_000] {
        let circuit = single_qubit_circuit(4);
        group.bench_with_input(
            BenchmarkId::new("sequential", samples),
            &samples,
            |b, &n| {
                b.iter(|| bench_sample_mean(&circuit, n, 42, false).unwrap());
            },
        );
        #[cfg(feature = "parallel")]
        group.bench_with_input(BenchmarkId::new("rayon", samples), &samples, |b, &n| {
            b.iter(|| bench_sample_mean(&circuit, n, 42, true).unwrap());
        });
    }
    group.finish();
}

fn bench_agreement(c: &mut Criterion) {
    // Not a timing benchmark so much as a standing check that the two paths
    // cannot drift: run both once per iteration and compare bits.
    let circuit = single_qubit_circuit(3);
    c.bench_function("paths_agree_bitwise", |b| {
        b.iter(|| {
            let seq = bench_sample_mean(&circuit, 8192, 7, false).unwrap();
            #[cfg(feature = "parallel")]
            {
                let par = bench_sample_mean(&circuit, 8192, 7, true).unwrap();
                assert_eq!(seq.to_bits(), par.to_bits());
            }
            seq
        });
    });
}

criterion_group!(benches, bench_sampling, bench_agreement);
criterion_main!(benches);
