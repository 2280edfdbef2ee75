mod support;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use support::{random_metric, random_signed, two_point, vertex_oracle, IndexMetric};
use walkbench_core::dual_norm::{flat_norm, Backend, FlatNormOptions};
use walkbench_core::measures::SignedFinMeasure;
use walkbench_core::weight::rat;

fn forced(b: Backend) -> FlatNormOptions {
    FlatNormOptions { simplex_limit: 48, force: Some(b) }
}

#[test]
fn backends_match_vertex_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..60 {
        let n = rng.gen_range(1..=5);
        let d = random_metric(&mut rng, n);
        let c = random_signed(&mut rng, n);
        let m = SignedFinMeasure::from_atoms(c.iter().cloned().enumerate());
        let want = vertex_oracle(&c, &d);
        let metric = IndexMetric(d);
        assert_eq!(flat_norm(&m, &metric, &forced(Backend::Simplex)).value, want);
        assert_eq!(flat_norm(&m, &metric, &forced(Backend::MinCostFlow)).value, want);
    }
}

#[test]
fn cut_backend_on_integer_metrics() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..60 {
        let n = rng.gen_range(1..=5);
        let mut d = random_metric(&mut rng, n);
        for row in d.iter_mut() {
            for v in row.iter_mut() {
                *v = v.ceil();
            }
        }
        let c = random_signed(&mut rng, n);
        let m = SignedFinMeasure::from_atoms(c.iter().cloned().enumerate());
        let want = vertex_oracle(&c, &d);
        let metric = IndexMetric(d);
        assert_eq!(flat_norm(&m, &metric, &forced(Backend::MinCut)).value, want);
    }
}

#[test]
fn two_point_formula() {
    for (num, den) in [(1, 2), (1, 1), (3, 2), (2, 1), (7, 3), (5, 1)] {
        let dxy = rat(num, den);
        let d = vec![vec![rat(0, 1), dxy.clone()], vec![dxy.clone(), rat(0, 1)]];
        let m = SignedFinMeasure::from_atoms([(0usize, rat(3, 4)), (1, rat(-3, 4))]);
        let v = flat_norm(&m, &IndexMetric(d.clone()), &FlatNormOptions::default()).value;
        assert_eq!(v, two_point(&rat(3, 4), &dxy));
        assert_eq!(v, vertex_oracle(&[rat(3, 4), rat(-3, 4)], &d));
    }
}

#[test]
fn large_supports_agree_across_backends() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..5 {
        let n = rng.gen_range(20..=40);
        let d = random_metric(&mut rng, n);
        let c = random_signed(&mut rng, n);
        let m = SignedFinMeasure::from_atoms(c.iter().cloned().enumerate());
        let metric = IndexMetric(d);
        let a = flat_norm(&m, &metric, &forced(Backend::Simplex)).value;
        let b = flat_norm(&m, &metric, &forced(Backend::MinCostFlow)).value;
        assert_eq!(a, b);
    }
}
