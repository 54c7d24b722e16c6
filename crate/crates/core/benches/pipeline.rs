//! Parallel vs single-thread timings of the heavy stages.
//!
//! `cargo bench -p cec-edge` compares a one-thread pool against the default
//! pool; `cargo bench -p cec-edge --no-default-features` times the purely
//! sequential build.

use cec_edge::cec::{build_masks, quaternion_convolve};
use cec_edge::image::to_quaternion_image;
use cec_edge::par::with_jobs;
use cec_edge::{classic_canny, run_pipeline, HysteresisParams, PipelineConfig, RasterImage, RotationOperator};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn test_image(size: usize) -> RasterImage {
    RasterImage::from_rgb_fn(size, size, |x, y| {
        let (fx, fy) = (x as f64 / size as f64, y as f64 / size as f64);
        let ring = (((fx - 0.5).powi(2) + (fy - 0.5).powi(2)).sqrt() * 12.0).sin();
        [0.5 + 0.4 * ring, 0.5 + 0.3 * (fx * 9.0).cos(), 0.5 - 0.4 * ring * fy]
    })
    .unwrap()
}

const THREADS: [(&str, usize); 2] = [("one_thread", 1), ("default_pool", 0)];

fn bench_pipeline(c: &mut Criterion) {
    let mut g = c.benchmark_group("run_pipeline");
    g.sample_size(20);
    for size in [128, 256] {
        let img = test_image(size);
        let cfg = PipelineConfig::default();
        for (label, jobs) in THREADS {
            g.bench_with_input(BenchmarkId::new(label, size), &img, |b, img| {
                b.iter(|| with_jobs(jobs, || run_pipeline(img, &cfg).unwrap()))
            });
        }
    }
    g.finish();
}

fn bench_convolve(c: &mut Criterion) {
    let mut g = c.benchmark_group("quaternion_convolve");
    let masks = build_masks(&RotationOperator::gray_half_turn());
    let q = to_quaternion_image(&test_image(256)).unwrap();
    for (label, jobs) in THREADS {
        g.bench_function(label, |b| b.iter(|| with_jobs(jobs, || quaternion_convolve(&q, &masks).unwrap())));
    }
    g.finish();
}

fn bench_canny(c: &mut Criterion) {
    let mut g = c.benchmark_group("classic_canny");
    let img = test_image(256);
    let params = HysteresisParams::default();
    for (label, jobs) in THREADS {
        g.bench_function(label, |b| b.iter(|| with_jobs(jobs, || classic_canny(&img, &params).unwrap())));
    }
    g.finish();
}

criterion_group!(benches, bench_pipeline, bench_convolve, bench_canny);
criterion_main!(benches);
