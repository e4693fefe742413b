use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use padic_montes::factor::{lift_all_sequential, FactorConfig};
use padic_montes::montes::{montes, MontesConfig};
use padic_montes::testpolys::{gen_family, FamilySpec};

fn lifting(c: &mut Criterion) {
    let cases = [
        ("C17_19", FamilySpec::c(17, 19).unwrap(), 200u32),
        ("D5_3_2_3", FamilySpec::d(5, 3, 2, 3).unwrap(), 400),
    ];
    let mut group = c.benchmark_group("lift_all_factors");
    group.sample_size(10);
    for (name, spec, nu) in cases {
        let f = gen_family(&spec).unwrap();
        let out = montes(&f, spec.prime(), &MontesConfig::default()).unwrap();
        let cfg = FactorConfig {
            nu,
            ..Default::default()
        };
        group.bench_with_input(BenchmarkId::new("sequential", name), &nu, |b, &nu| {
            b.iter(|| lift_all_sequential(black_box(&f), &out, nu, &cfg).unwrap())
        });
        #[cfg(feature = "parallel")]
        group.bench_with_input(BenchmarkId::new("parallel", name), &nu, |b, &nu| {
            b.iter(|| {
                padic_montes::factor::lift_all_parallel(black_box(&f), &out, nu, &cfg).unwrap()
            })
        });
    }
    group.finish();
}

fn high_precision(c: &mut Criterion) {
    let spec = FamilySpec::b(7, 5).unwrap();
    let f = gen_family(&spec).unwrap();
    let out = montes(&f, 7, &MontesConfig::default()).unwrap();
    let mut group = c.benchmark_group("b7_5_precision_sweep");
    group.sample_size(10);
    for nu in [100u32, 400, 1600] {
        let cfg = FactorConfig {
            nu,
            ..Default::default()
        };
        group.bench_with_input(BenchmarkId::from_parameter(nu), &nu, |b, &nu| {
            b.iter(|| lift_all_sequential(black_box(&f), &out, nu, &cfg).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, lifting, high_precision);
criterion_main!(benches);
