use cellsat_core::analysis::{decide_injectivity, preimages};
use cellsat_core::inverse::{apply_inverse, build_refutation, structural_inverse};
use cellsat_core::{build_table, gen_onto_php, parse_dimacs, Assignment, CaTable, FormulaAutomaton};
use criterion::{black_box, criterion_group, criterion_main, Criterion};

fn step(c: &mut Criterion) {
    let aut = FormulaAutomaton::new(&gen_onto_php(2));
    let a = Assignment::new(vec![false; aut.m()]);
    let t = build_table(aut.formula(), &a).unwrap();
    c.bench_function("build_table php2", |b| b.iter(|| build_table(aut.formula(), black_box(&a)).unwrap()));
    c.bench_function("step php2", |b| b.iter(|| aut.step(black_box(&t)).unwrap()));
    let img = aut.step(&t).unwrap();
    c.bench_function("preimages php2", |b| b.iter(|| preimages(&aut, black_box(&img)).unwrap()));
}

fn decide(c: &mut Criterion) {
    let php = gen_onto_php(2);
    c.bench_function("decide php2", |b| b.iter(|| decide_injectivity(black_box(&php)).unwrap()));
}

fn inverse(c: &mut Criterion) {
    let php = gen_onto_php(1);
    let aut = FormulaAutomaton::new(&php);
    let inv = structural_inverse(&php).unwrap();
    let t = build_table(aut.formula(), &Assignment::new(vec![true, false])).unwrap();
    let img = aut.step(&t).unwrap();
    c.bench_function("apply_inverse php1", |b| b.iter(|| apply_inverse(&inv, black_box(&img)).unwrap()));
    c.bench_function("build_refutation php1", |b| b.iter(|| build_refutation(black_box(&php)).unwrap()));
}

fn table(c: &mut Criterion) {
    let aut = FormulaAutomaton::new(&parse_dimacs("p cnf 1 1\n1 0").unwrap());
    let mut g = c.benchmark_group("table");
    g.sample_size(10);
    g.bench_function("materialize 1x1", |b| b.iter(|| CaTable::materialize(&aut, 1 << 28).unwrap()));
    let t = CaTable::materialize(&aut, 1 << 28).unwrap();
    g.bench_function("encode 1x1", |b| b.iter(|| t.encode()));
    g.finish();
}

criterion_group!(benches, step, decide, inverse, table);
criterion_main!(benches);
