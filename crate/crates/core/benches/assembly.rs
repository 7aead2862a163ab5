use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use sthdg::assembly::{assemble_local, FaceRoles};
use sthdg::geometry::{BoundaryTag, PulseDeformation, SlabBuilder, SpatialMesh};
use sthdg::harness::benchmark;
use sthdg::par;
use sthdg::solver::{initial_trace, solve_slab, SlabContext, DEFAULT_TOLERANCE};
use sthdg::spaces::{Degrees, RefTables};

fn modes() -> Vec<(&'static str, bool)> {
    if cfg!(feature = "parallel") {
        vec![("parallel", false), ("sequential", true)]
    } else {
        vec![("sequential", true)]
    }
}

fn slab_solve(c: &mut Criterion) {
    let bench = benchmark("rotating-pulse", 2, 1e-2, None).unwrap();
    let mesh = SpatialMesh::uniform_grid(16, 16, [-0.5, -0.5], [0.5, 0.5], |_| BoundaryTag::Neumann);
    let deform = PulseDeformation::new(0.1);
    let slab = SlabBuilder::new(&mesh, &deform).unwrap().build(0, 0.0, 1.0 / 16.0).unwrap();
    let mut group = c.benchmark_group("slab_solve_256_cells");
    group.sample_size(10);
    for p in [1, 2] {
        let tables = RefTables::new(Degrees::uniform(p).unwrap(), 2).unwrap();
        let ctx = SlabContext {
            slab: &slab,
            tables: &tables,
            problem: &bench.problem,
            alpha: 4.0 * ((p + 1) * (p + 1)) as f64,
            bottom_neumann: true,
            top_neumann: false,
            tolerance: DEFAULT_TOLERANCE,
        };
        let bottom = initial_trace(&slab, &bench.problem, &tables).unwrap();
        for (label, seq) in modes() {
            group.bench_with_input(BenchmarkId::new(label, format!("p{p}")), &p, |b, _| {
                b.iter(|| {
                    let f = || solve_slab(&ctx, &bottom).unwrap();
                    if seq {
                        par::sequential(f)
                    } else {
                        f()
                    }
                })
            });
        }
    }
    group.finish();
}

fn element_assembly(c: &mut Criterion) {
    let bench = benchmark("rotating-pulse", 2, 1e-2, None).unwrap();
    let mesh = SpatialMesh::uniform_grid(16, 16, [-0.5, -0.5], [0.5, 0.5], |_| BoundaryTag::Neumann);
    let deform = PulseDeformation::new(0.1);
    let slab = SlabBuilder::new(&mesh, &deform).unwrap().build(0, 0.0, 1.0 / 16.0).unwrap();
    let tables = RefTables::new(Degrees::uniform(2).unwrap(), 2).unwrap();
    let mut group = c.benchmark_group("element_assembly_256_cells_p2");
    group.sample_size(10);
    for (label, seq) in modes() {
        group.bench_function(label, |b| {
            b.iter(|| {
                let f = || {
                    par::map_indexed(slab.n_elements(), |e| {
                        let roles = FaceRoles::in_slab(&slab, e, true, false);
                        assemble_local(&slab.elements[e], &slab.element_flips[e], &roles, 20.0, &bench.problem, &tables)
                    })
                };
                if seq {
                    par::sequential(f)
                } else {
                    f()
                }
            })
        });
    }
    group.finish();
}

criterion_group!(benches, slab_solve, element_assembly);
criterion_main!(benches);
