use walkbench_core::actions::SelfAction;
use walkbench_core::dual_norm::{deficiency_profile, FlatNormOptions, WordMetric};
use walkbench_core::groups::{FreeGroup, FreeWord, Group, LatticeGroup, LatticePoint};
use walkbench_core::harmonic::{
    clamped_identity, free_first_letter_profile, liouville_scan, oscillation, valley, PointFn, ScanOptions,
};
use walkbench_core::measures::FinMeasure;
use walkbench_core::weight::{rat, Rational};

type BoxedFn = Box<dyn Fn(&LatticePoint) -> Rational + Sync>;

fn lazy() -> FinMeasure<LatticePoint, Rational> {
    FinMeasure::from_atoms([
        (LatticeGroup::int(-1), rat(1, 4)),
        (LatticeGroup::int(0), rat(1, 2)),
        (LatticeGroup::int(1), rat(1, 4)),
    ])
    .unwrap()
}

#[test]
fn valley_family_flattens_on_integers() {
    let act = SelfAction::new(LatticeGroup::new(1));
    let sample: Vec<_> = (-10..=10).map(LatticeGroup::int).collect();
    let fs: Vec<BoxedFn> = [1, 2, 5, 10]
        .into_iter()
        .map(|w| {
            let v = valley(w);
            Box::new(move |p: &LatticePoint| v(p.0[0])) as BoxedFn
        })
        .collect();
    let refs: Vec<PointFn<LatticePoint, Rational>> = fs.iter().map(|b| b.as_ref()).collect();
    let opts = ScanOptions { n_max: 1000, ..Default::default() };
    let scan = liouville_scan(&act, &lazy(), &refs, &sample, &opts).unwrap();
    assert_eq!(scan.exact_depth, 1000);
    let first_below = [71usize, 132, 249, 326];
    for (i, &n0) in first_below.iter().enumerate() {
        assert!(scan.exact_monotone(i));
        let osc = scan.exact_oscillations(i);
        assert!(osc[1000] < rat(1, 5));
        assert_eq!(osc.iter().position(|o| *o < rat(1, 5)), Some(n0), "w index {i}");
    }
}

#[test]
fn clamped_identity_decays_slowly() {
    let act = SelfAction::new(LatticeGroup::new(1));
    let sample: Vec<_> = (-10..=10).map(LatticeGroup::int).collect();
    let f = |p: &LatticePoint| clamped_identity(p.0[0]);
    let scan =
        liouville_scan(&act, &lazy(), &[&f], &sample, &ScanOptions { n_max: 1000, ..Default::default() }).unwrap();
    assert!(scan.exact_monotone(0));
    let last = scan.oscillations(0)[1000];
    assert!((last - 0.6904).abs() < 1e-4, "{last}");
}

#[test]
fn free_group_deficiency_stays_at_one() {
    let f2 = FreeGroup::new(2);
    let mu: FinMeasure<FreeWord, Rational> = FinMeasure::uniform(f2.symmetric_generators()).unwrap();
    let d = WordMetric::standard(f2.clone());
    let prof = deficiency_profile(&f2, &mu, &f2.generators(), 8, &d, rat(0, 1), &FlatNormOptions::default(), 4);
    for g in 0..2 {
        assert_eq!(prof.series(g), vec![rat(1, 1); 8]);
    }
}

#[test]
fn free_group_first_letter_floor() {
    let f2 = FreeGroup::new(2);
    let sample: Vec<FreeWord> = ["", "a", "A", "b", "B"].iter().map(|s| f2.word(s)).collect();
    let prof = free_first_letter_profile(&f2, 1, &sample, 20);
    let osc: Vec<Rational> = prof.iter().map(|r| oscillation(r)).collect();
    assert_eq!(osc[20], Rational::new(91719335475u64.into(), 137438953472u64.into()));
    assert!(osc.iter().all(|o| *o > rat(66, 100)));
}
