use proptest::prelude::*;

use treelen::classgen::{random_tree, WeightScheme};
use treelen::lengthseq::{exact_distribution, read_distribution, write_distribution};
use treelen::reconstruct::{reconstruct, reconstruct_ultrametric};
use treelen::tree::{canonical_code, format_tree, is_isomorphic, parse_tree};
use treelen::TreeClass;

fn any_class() -> impl Strategy<Value = (TreeClass, WeightScheme)> {
    prop_oneof![
        Just((TreeClass::GeneralPosition, WeightScheme::GeneralPosition)),
        Just((TreeClass::Ultrametric, WeightScheme::Ultrametric)),
        Just((TreeClass::CombinatorialHat, WeightScheme::RandomRational)),
        Just((TreeClass::Caterpillar, WeightScheme::RandomRational)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tree_text_round_trips((class, scheme) in any_class(), n in 2usize..12, seed in any::<u64>()) {
        let t = random_tree(class, n, seed, scheme).unwrap();
        let back = parse_tree(&format_tree(&t)).unwrap();
        prop_assert!(is_isomorphic(&t, &back));
        prop_assert_eq!(format_tree(&t), format_tree(&back));
    }

    #[test]
    fn canonical_code_ignores_vertex_order((class, scheme) in any_class(), n in 2usize..10, seed in any::<u64>()) {
        let t = random_tree(class, n, seed, scheme).unwrap();
        let mut perm: Vec<usize> = (0..t.n_vertices()).collect();
        let shift = seed as usize % perm.len();
        perm.rotate_left(shift);
        let shuffled = t.permute_vertices(&perm).unwrap();
        prop_assert_eq!(canonical_code(&t), canonical_code(&shuffled));
    }

    #[test]
    fn distribution_files_round_trip((class, scheme) in any_class(), n in 2usize..7, seed in any::<u64>()) {
        let t = random_tree(class, n, seed, scheme).unwrap();
        let d = exact_distribution(&t).unwrap();
        let mut buf = Vec::new();
        write_distribution(&mut buf, &d).unwrap();
        let back = read_distribution(buf.as_slice()).unwrap();
        prop_assert!(back.same_law(&d));
        let mut again = Vec::new();
        write_distribution(&mut again, &back).unwrap();
        prop_assert_eq!(buf, again);
    }

    #[test]
    fn general_position_trees_are_recovered(n in 2usize..8, seed in any::<u64>()) {
        let t = random_tree(TreeClass::GeneralPosition, n, seed, WeightScheme::GeneralPosition).unwrap();
        let d = exact_distribution(&t).unwrap();
        prop_assert!(is_isomorphic(&reconstruct(&d, TreeClass::GeneralPosition).unwrap(), &t));
    }

    #[test]
    fn ultrametric_trees_need_only_the_minimal_sequence(n in 2usize..9, seed in any::<u64>()) {
        let t = random_tree(TreeClass::Ultrametric, n, seed, WeightScheme::Ultrametric).unwrap();
        let d = exact_distribution(&t).unwrap();
        prop_assert!(is_isomorphic(&reconstruct_ultrametric(&d.min_lex()).unwrap(), &t));
    }

    #[test]
    fn splits_recover_valent_and_ary_trees(leaves in 1usize..5, seed in any::<u64>()) {
        let n = 2 * leaves;
        let t = random_tree(TreeClass::KValent(2), n, seed, WeightScheme::Unit).unwrap();
        let d = exact_distribution(&t).unwrap();
        prop_assert!(is_isomorphic(&reconstruct(&d, TreeClass::KValent(2)).unwrap(), &t));
        let r = random_tree(TreeClass::KAry(2), n, seed, WeightScheme::Unit).unwrap();
        let d = exact_distribution(&r).unwrap();
        prop_assert!(is_isomorphic(&reconstruct(&d, TreeClass::KAry(2)).unwrap(), &r));
    }
}
