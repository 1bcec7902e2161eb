//! Sequential against rayon-parallel execution on the data-parallel kernels.

use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use compers_core::analysis::{enumerate_component_modules, EnumerationOptions};
use compers_core::component::{classify, component_split, ComponentKind};
use compers_core::fixtures;
use compers_core::par;
use compers_core::pmodule::{is_isomorphic, IsoOptions};
use compers_core::random::{self, rng};
use compers_core::{Exec, Field, Poset};

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn enumeration(c: &mut Criterion) {
    let diamond = Arc::new(Poset::new(&["b", "l", "r", "t"], &[("b", "l"), ("b", "r"), ("l", "t"), ("r", "t")]).unwrap());
    let mut g = c.benchmark_group("enumerate_diamond_2222_semi");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| {
                let opts = EnumerationOptions { exec, ..EnumerationOptions::default() };
                enumerate_component_modules(&diamond, &[2, 2, 2, 2], ComponentKind::SemiComponent, opts).unwrap()
            })
        });
    }
    g.finish();
}

fn exhaustive_iso(c: &mut Criterion) {
    // two non-isomorphic modules with equal dimensions force the full GF(2) search
    let gf2 = Field::prime(2).unwrap();
    let a = fixtures::jordan_star(3, 0, gf2);
    let b = fixtures::jordan_star(3, 1, gf2);
    let mut g = c.benchmark_group("exhaustive_iso_gf2");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |bch| {
            bch.iter(|| is_isomorphic(&a, &b, IsoOptions { exec, ..IsoOptions::default() }).unwrap())
        });
    }
    g.finish();
}

fn batch_splits(c: &mut Criterion) {
    let mut r = rng(17);
    let batch: Vec<_> = (0..200)
        .map(|_| random::random_component_module(&mut r, 8, 4, Field::Rationals))
        .collect();
    let mut g = c.benchmark_group("split_200_random_modules");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| {
                par::map(&batch, exec, |m| {
                    let cs = classify(m).unwrap();
                    component_split(&cs).unwrap().interval.module.total_dim()
                })
            })
        });
    }
    g.finish();
}

criterion_group!(benches, enumeration, exhaustive_iso, batch_splits);
criterion_main!(benches);
