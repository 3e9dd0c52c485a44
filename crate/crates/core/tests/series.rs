use num_rational::BigRational;
use orbidt::partitions::{macmahon_counts, ColorVector};
use orbidt::pleth::{pexp_eval, Formula, PointEval};
use orbidt::points::PointSampler;
use orbidt::qseries::FixedPointTable;
use orbidt::transfer::z_plain;
use proptest::prelude::*;

fn int(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

#[test]
fn signed_count_r1_is_alternating_macmahon() {
    let z = FixedPointTable::new(1, 7).unwrap().z_numerical(7).unwrap();
    for (n, c) in macmahon_counts(7).into_iter().enumerate() {
        let sign = if n % 2 == 0 { 1 } else { -1 };
        assert_eq!(z.coeff(&ColorVector(vec![n as i64])), int(sign * c as i64));
    }
}

#[test]
fn plain_transfer_counts_colored_partitions() {
    for r in 1..=3 {
        let order = 5;
        let z = z_plain(r, order).unwrap();
        let table = FixedPointTable::new(r, order).unwrap();
        let mut direct = std::collections::BTreeMap::new();
        for f in table.points() {
            *direct.entry(f.alpha.clone()).or_insert(0i64) += 1;
        }
        for (alpha, n) in direct {
            assert_eq!(z.coeff(&alpha), int(n), "r = {r}, alpha = {:?}", alpha.0);
        }
        assert_eq!(z.len(), table.points().iter().map(|f| &f.alpha).collect::<std::collections::BTreeSet<_>>().len());
    }
}

#[test]
fn colors_sum_to_size() {
    let table = FixedPointTable::new(3, 5).unwrap();
    for f in table.points() {
        assert_eq!(f.alpha.total(), f.partition.len() as i64);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn truncation_commutes_with_evaluation(seed in any::<u64>(), k in 0usize..5) {
        let table = FixedPointTable::new(2, 5).unwrap();
        let mut s = PointSampler::new(seed);
        let (pt, full) = s.draw_generic(|p| table.z_point(p, 5)).unwrap();
        prop_assert_eq!(full.truncate(k), table.z_point(&pt, k).unwrap());

        let main = Formula::Main.build(2).unwrap();
        let closed = pexp_eval(&main, 5, &PointEval(pt.clone())).unwrap();
        prop_assert_eq!(closed.truncate(k), pexp_eval(&main, k, &PointEval(pt)).unwrap());
    }

    #[test]
    fn flip_is_an_involution(seed in any::<u64>()) {
        let table = FixedPointTable::new(2, 4).unwrap();
        let mut s = PointSampler::new(seed);
        let (_, z) = s.draw_generic(|p| table.z_point(p, 4)).unwrap();
        prop_assert_eq!(z.flip_q0().flip_q0(), z.clone());
        prop_assert_eq!(z.restrict(table.semigroup()).unwrap(), z);
    }
}
