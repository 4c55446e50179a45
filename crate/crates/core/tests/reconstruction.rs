use treelen::classgen::{enumerate_class, injectivity_oracle, non_injectivity_witnesses};
use treelen::lengthseq::exact_distribution;
use treelen::reconstruct::{
    caterpillar_statistics, reconstruct, solve_caterpillar, DEFAULT_CATERPILLAR_SEARCH_CAP,
};
use treelen::tree::{hat_weights, is_isomorphic, parse_tree, Mark};
use treelen::{Error, TreeClass};

#[test]
fn every_enumerable_class_round_trips_through_the_facade() {
    for (class, sizes) in [
        (TreeClass::KValent(2), vec![4, 5, 6, 7]),
        (TreeClass::KValent(3), vec![4, 6]),
        (TreeClass::KAry(2), vec![3, 4, 5, 6]),
        (TreeClass::KAry(3), vec![3, 5]),
        (TreeClass::Caterpillar, vec![3, 4, 5]),
    ] {
        for n in sizes {
            for t in enumerate_class(class, n).unwrap().items {
                let d = exact_distribution(&t).unwrap();
                let back = reconstruct(&d, class).unwrap();
                assert!(is_isomorphic(&back, &t), "{class} n={n}");
            }
        }
    }
}

#[test]
fn hat_weighted_trees_come_back_combinatorial() {
    for n in 3..=6 {
        for t in enumerate_class(TreeClass::CombinatorialHat, n).unwrap().items {
            let center = t.centers()[0];
            let hat = hat_weights(&t.with_mark(Mark::Root(center)).unwrap()).unwrap().unmarked();
            let d = exact_distribution(&hat).unwrap();
            let back = reconstruct(&d, TreeClass::CombinatorialHat).unwrap();
            assert!(is_isomorphic(&back, &t));
        }
    }
}

#[test]
fn flagship_caterpillar_pair_is_separated() {
    let a = solve_caterpillar(
        &caterpillar_statistics(&[2, 11, 12]).unwrap(),
        DEFAULT_CATERPILLAR_SEARCH_CAP,
    )
    .unwrap();
    let b = solve_caterpillar(
        &caterpillar_statistics(&[3, 14, 8]).unwrap(),
        DEFAULT_CATERPILLAR_SEARCH_CAP,
    )
    .unwrap();
    assert_eq!(a, vec![2, 11, 12]);
    assert_eq!(b, vec![3, 14, 8]);
}

#[test]
fn class_violations_name_the_failing_step() {
    let quartet = parse_tree("((a:1,b:1):1,c:1,d:1);").unwrap();
    let d = exact_distribution(&quartet).unwrap();
    match reconstruct(&d, TreeClass::Star) {
        Err(Error::ClassViolation { step, .. }) => assert_eq!(step, "star-total"),
        other => panic!("unexpected {other:?}"),
    }
    let not_caterpillar = parse_tree("((a:1,b:1):1,(c:1,d:1):1,(e:1,f:1):1);").unwrap();
    let d = exact_distribution(&not_caterpillar).unwrap();
    assert!(matches!(
        reconstruct(&d, TreeClass::Caterpillar),
        Err(Error::ClassViolation { .. })
    ));
}

#[test]
fn oracles_agree_with_the_theorems() {
    for n in 4..=7 {
        assert!(injectivity_oracle(TreeClass::KValent(2), n).unwrap().injective());
    }
    for n in 2..=7 {
        assert!(injectivity_oracle(TreeClass::KAry(2), n).unwrap().injective());
    }
    assert!(non_injectivity_witnesses().unwrap().iter().all(|w| w.confirmed));
}
