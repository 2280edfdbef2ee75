use walkbench_core::dual_norm::WordMetric;
use walkbench_core::groups::LatticeGroup;
use walkbench_core::kv::{integer_schedule, kv_build, verify_claims, ClaimOptions, KvOptions, LatticeBoxOracle};
use walkbench_core::weight::{rat, Rational};

#[test]
fn integer_construction_claims() {
    let zg = LatticeGroup::new(1);
    let d = WordMetric::standard(zg.clone());
    let opts = KvOptions { workers: 4, ..Default::default() };
    let r = kv_build(&zg, &integer_schedule::<Rational>(2), &LatticeBoxOracle, &d, &opts).unwrap();
    assert!(r.conditions_hold());
    assert_eq!(r.levels[1].n_m, Some(1));
    assert_eq!(r.levels[2].n_m, Some(3));
    assert!(r.levels[1].max_deficiency < rat(1, 1));
    assert!(r.levels[2].max_deficiency < rat(1, 2));
    let gs = [LatticeGroup::int(1)];
    let rep = verify_claims(&zg, &r, &gs, &d, &ClaimOptions::default(), &opts).unwrap();
    assert!(rep.conditions_hold());
    assert!(rep.claim1_holds());
    assert!(rep.claim2_holds());
    assert!(rep.claim3_holds(), "{:?}", rep.claim3.series(0));
    assert_eq!(rep.claim3.rows.len(), 20);
    assert!(rep.claim1_skipped.is_empty());
    assert_eq!(rep.claim1.len(), 2 + 19 * 3);
    assert_eq!(rep.claim2.len(), 1 + 3);
}
