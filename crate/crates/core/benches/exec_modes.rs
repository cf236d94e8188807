use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ssf_core::campaign::{run_campaign, CampaignConfig, CampaignKind};
use ssf_core::sample::{contraction, trial_rng};
use ssf_core::shift::QuadConfig;
use ssf_core::{Exec, PathSpec, ShiftFunction};

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn campaigns(c: &mut Criterion) {
    let mut group = c.benchmark_group("campaign");
    group.sample_size(10);
    for kind in [CampaignKind::Linear, CampaignKind::Mult, CampaignKind::Truncate] {
        for (name, exec) in MODES {
            let cfg = CampaignConfig { kind, trials: 16, dims: vec![3, 4, 5], degrees: vec![4], exec, ..CampaignConfig::default() };
            group.bench_with_input(BenchmarkId::new(kind.as_str(), name), &cfg, |b, cfg| {
                b.iter(|| run_campaign(black_box(cfg)).unwrap())
            });
        }
    }
    group.finish();
}

fn step_functions(c: &mut Criterion) {
    let mut rng = trial_rng(9, 0);
    let path = PathSpec::between(&contraction(&mut rng, 4), &contraction(&mut rng, 4)).unwrap();
    let mut group = c.benchmark_group("step_function");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| {
                // A fresh shift function each time so the cache does not hide the work.
                let shift = ShiftFunction::with_config(path.clone(), QuadConfig::default(), exec);
                shift.step_function(black_box(12)).unwrap()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, campaigns, step_functions);
criterion_main!(benches);
