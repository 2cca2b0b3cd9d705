use criterion::{criterion_group, criterion_main, Criterion};

use plethys::bimodule::plethysm;
use plethys::elements::{element_category, element_plethysm, ElementRep};
use plethys::factorize::horizontal_extension;
use plethys::zoo::{build_cospan, build_surjection, CospanVariant};
use plethys::Flavor;

fn bench_box_product(c: &mut Criterion) {
    let f = build_cospan(2, 1, CospanVariant::Nd).unwrap();
    let r = &f.monoid.bimodule;
    c.bench_function("box cospan nmax=2", |b| {
        b.iter(|| plethysm(r, r).unwrap())
    });

    let rr = plethysm(r, r).unwrap();
    c.bench_function("box triple cospan nmax=2", |b| {
        b.iter(|| plethysm(&rr.product, r).unwrap())
    });
}

fn bench_diamond_product(c: &mut Criterion) {
    let f = build_surjection(3).unwrap();
    let el = element_category(&f.monoid.bimodule).unwrap();
    let d = ElementRep::trivial(&el, Flavor::FinSet);
    c.bench_function("diamond surjection nmax=3", |b| {
        b.iter(|| element_plethysm(&d, &d, &f.monoid).unwrap())
    });
}

fn bench_extension(c: &mut Criterion) {
    let f = build_surjection(2).unwrap();
    c.bench_function("extension surjection nmax=2 cap=2", |b| {
        b.iter(|| horizontal_extension(&f.witness.basic, &f.fa, 2, true).unwrap())
    });
}

criterion_group!(
    benches,
    bench_box_product,
    bench_diamond_product,
    bench_extension
);
criterion_main!(benches);
