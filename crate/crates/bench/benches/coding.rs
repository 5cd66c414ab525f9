use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tricast_core::coding::random_code;
use tricast_core::construction::{construct, random_class_instance};
use tricast_core::counterexample::{certify, FamilyId};
use tricast_core::field::{Field, FieldMatrix};
use tricast_core::packing::{
    enumerate_embeddings, level_template, packed_throughput, sample_level_network, Simulation,
};
use tricast_core::verify::{verify_decoding, Budget};

fn field_rank(c: &mut Criterion) {
    let f = Field::new(257).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let m = FieldMatrix::from_fn(f, 24, 24, |_, _| rng.gen_range(0..257));
    c.bench_function("rank 24x24 over GF(257)", |b| {
        b.iter(|| black_box(&m).rank())
    });
}

fn construction(c: &mut Criterion) {
    let f = Field::new(257).unwrap();
    let mut group = c.benchmark_group("construct");
    for class in [[1, 3, 3], [2, 2, 4], [1, 2, 5]] {
        let inst = random_class_instance(class, 7);
        group.bench_function(format!("{class:?}"), |b| {
            b.iter(|| construct(black_box(&inst), f, 0).unwrap())
        });
    }
    group.finish();
}

fn verification(c: &mut Criterion) {
    let f = Field::new(257).unwrap();
    let inst = random_class_instance([1, 2, 5], 3);
    let mut seed = 0u64;
    c.bench_function("random code and verify [1 2 5]", |b| {
        b.iter_batched(
            || {
                seed += 1;
                random_code(&inst, f, seed)
            },
            |code| verify_decoding(&inst, &code).unwrap(),
            BatchSize::SmallInput,
        )
    });
}

fn brute_force(c: &mut Criterion) {
    let mut group = c.benchmark_group("certify");
    group.sample_size(10);
    group.bench_function("rate family, p=2, T=1", |b| {
        b.iter(|| certify(FamilyId::Fig23Rate21, 2, 1, &Budget::default()).unwrap())
    });
    group.finish();
}

fn packing(c: &mut Criterion) {
    let list = enumerate_embeddings(&level_template(1).unwrap().instance).unwrap();
    let mut seed = 0u64;
    c.bench_function("packed throughput, level 1", |b| {
        b.iter_batched(
            || {
                seed += 1;
                sample_level_network(1, Simulation::Two, seed).unwrap()
            },
            |inst| packed_throughput(&inst, &list.embeddings).unwrap(),
            BatchSize::SmallInput,
        )
    });
}

criterion_group!(
    benches,
    field_rank,
    construction,
    verification,
    brute_force,
    packing
);
criterion_main!(benches);
