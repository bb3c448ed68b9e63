//! Benchmarks for the numeric kernels behind fringe-pattern assembly.
//!
//! Run the full suite with `cargo bench -p talbot-bench`, or one group at a
//! time, e.g. `cargo bench -p talbot-bench -- collapse/`. The heavyweight
//! end-to-end group (`pattern/`) drives the same code path as the CLI
//! `pattern` subcommand, so regressions here translate directly into
//! scan-time regressions.

use std::f64::consts::PI;
use std::hint::black_box;
use std::time::Duration;

use criterion::{criterion_group, criterion_main, Criterion};
use num_complex::Complex64;
use talbot_bench::reference_config;
use talbot_core::{
    aleph, bessel_j, gamma_function, radius_from_mass, sine_integral, talbot_coefficient,
    CslParams, CslShape, PatternKind, QuadratureSpec, Simulation,
};

const SI_DENSITY: f64 = 2329.0;

fn bench_special_functions(c: &mut Criterion) {
    let mut group = c.benchmark_group("special_functions");
    group.bench_function("bessel_j8_real", |b| {
        let z = Complex64::new(5.3, 0.0);
        b.iter(|| bessel_j(8, black_box(z)))
    });
    group.bench_function("bessel_j8_complex", |b| {
        let z = Complex64::new(3.7, 1.2);
        b.iter(|| bessel_j(8, black_box(z)))
    });
    group.bench_function("sine_integral_series", |b| {
        b.iter(|| sine_integral(black_box(7.5)))
    });
    group.bench_function("sine_integral_asymptotic", |b| {
        b.iter(|| sine_integral(black_box(1.0e7)))
    });
    group.bench_function("gamma_function", |b| {
        b.iter(|| gamma_function(black_box(2.75)))
    });
    group.finish();
}

fn bench_collapse(c: &mut Criterion) {
    let r_c_m = 1e-7;
    let radius_m = radius_from_mass(1e7 * talbot_core::constants::AMU, SI_DENSITY);
    let quad = QuadratureSpec::default();
    let shape = CslShape::new(r_c_m, radius_m, SI_DENSITY, quad).unwrap();

    let mut group = c.benchmark_group("collapse");
    group.bench_function("shape_new", |b| {
        b.iter(|| CslShape::new(black_box(r_c_m), black_box(radius_m), SI_DENSITY, quad).unwrap())
    });
    // Mid-range separation: the weighted sine-integral average is evaluated
    // by quadrature, the dominant cost of a fresh collapse kernel.
    group.bench_function("g_quadrature", |b| {
        b.iter(|| shape.g(black_box(3.0 * r_c_m)).unwrap())
    });
    // Far separation: the closed-form tail takes over.
    group.bench_function("g_asymptotic", |b| {
        b.iter(|| shape.g(black_box(1e4 * r_c_m)).unwrap())
    });
    group.bench_function("kernel", |b| {
        b.iter(|| {
            shape
                .kernel(black_box(1e-12), black_box(2.5 * r_c_m), black_box(0.8))
                .unwrap()
        })
    });
    group.finish();
}

fn bench_optics(c: &mut Criterion) {
    let config = reference_config(1e8);
    let sim = Simulation::new(&config).unwrap();
    let omega = 2.0 * PI * talbot_core::constants::C / config.grating.wavelength_m;
    let prepared = sim.optics().prepare(omega).unwrap();

    let mut group = c.benchmark_group("optics");
    group.bench_function("mie_prepare", |b| {
        b.iter(|| sim.optics().prepare(black_box(omega)).unwrap())
    });
    group.bench_function("mie_amplitude_products", |b| {
        b.iter(|| prepared.amplitude_products(black_box(0.3)))
    });
    group.bench_function("mie_cross_sections", |b| {
        b.iter(|| prepared.cross_sections())
    });
    group.finish();
}

fn bench_grating(c: &mut Criterion) {
    let config = reference_config(1e7);
    let sim = Simulation::new(&config).unwrap();
    let coupling = sim.coupling();
    let geometry = sim.geometry();
    let s1 = geometry.separation_m(1);
    let eik = coupling.eikonal_quantities(s1).unwrap();

    let mut group = c.benchmark_group("grating");
    // Full phase-plus-depletion model: three adaptive angular integrals over
    // Mie amplitude products per separation.
    group.bench_function("eikonal_quantities_full", |b| {
        b.iter(|| coupling.eikonal_quantities(black_box(s1)).unwrap())
    });
    group.bench_function("talbot_coefficient_n3", |b| {
        b.iter(|| talbot_coefficient(black_box(&eik), 3).unwrap())
    });
    group.finish();
}

fn bench_environment(c: &mut Criterion) {
    let config = reference_config(1e7);
    let sim = Simulation::new(&config).unwrap();
    let geometry = sim.geometry();
    let decoherence = sim.decoherence();
    let trajectory = sim.trajectory();

    let mut group = c.benchmark_group("environment");
    // n = 1 carries the widest photon kernels; higher harmonics reuse the
    // same machinery at larger separations.
    group.bench_function("kernel_ln_parts_n1", |b| {
        b.iter(|| {
            decoherence
                .kernel_ln_parts(black_box(1), &geometry, trajectory)
                .unwrap()
        })
    });
    group.bench_function("kernel_ln_parts_n5", |b| {
        b.iter(|| {
            decoherence
                .kernel_ln_parts(black_box(5), &geometry, trajectory)
                .unwrap()
        })
    });
    group.finish();
}

fn bench_pattern(c: &mut Criterion) {
    let config = reference_config(1e7);
    let sim = Simulation::new(&config).unwrap();
    let csl = CslParams {
        lambda_per_s: 1e-12,
        r_c_m: 1e-7,
    };

    let mut group = c.benchmark_group("pattern");
    group.sample_size(10);
    group.warm_up_time(Duration::from_secs(1));
    group.measurement_time(Duration::from_secs(8));
    // Scenario setup: optics, grating coupling, collision rate, and the
    // internal-temperature history through cooling and free fall.
    group.bench_function("simulation_new", |b| {
        b.iter(|| Simulation::new(black_box(&config)).unwrap())
    });
    // Harmonic assembly alone (the per-point cost of an exclusion scan once
    // the scenario is prepared).
    group.bench_function("components_quantum_csl", |b| {
        b.iter(|| {
            sim.components(PatternKind::Quantum, black_box(Some(&csl)))
                .unwrap()
        })
    });
    // Series assembly plus screen sampling, as the CLI `pattern` command
    // runs it.
    group.bench_function("pattern_quantum", |b| {
        b.iter(|| sim.pattern_quantum().unwrap())
    });
    group.finish();
}

fn bench_analysis(c: &mut Criterion) {
    let config = reference_config(1e7);
    let sim = Simulation::new(&config).unwrap();
    let quantum = sim.pattern_quantum().unwrap();
    let with_csl = sim
        .pattern_quantum_csl(&CslParams {
            lambda_per_s: 1e-12,
            r_c_m: 1e-7,
        })
        .unwrap();

    let mut group = c.benchmark_group("analysis");
    group.bench_function("aleph_2001_samples", |b| {
        b.iter(|| {
            aleph(
                black_box(&quantum),
                black_box(&with_csl),
                config.screen_window_m,
                0.05,
            )
            .unwrap()
        })
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_special_functions,
    bench_collapse,
    bench_optics,
    bench_grating,
    bench_environment,
    bench_pattern,
    bench_analysis
);
criterion_main!(benches);
