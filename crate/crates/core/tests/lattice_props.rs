use proptest::prelude::*;

use tropabel::lattice::{hnf, FiniteAbelianGroup, IntMatrix};
use tropabel::{Rational, RationalLattice, Sublattice};

fn nonsingular(g: usize) -> impl Strategy<Value = IntMatrix> {
    prop::collection::vec(-4i64..=4, g * g)
        .prop_map(move |xs| {
            let rows: Vec<Vec<i64>> = xs.chunks(g).map(<[i64]>::to_vec).collect();
            IntMatrix::from_rows(&rows).unwrap()
        })
        .prop_filter("nonsingular", |m| m.determinant().unwrap() != 0)
}

/// A unimodular matrix as a product of elementary column operations.
fn unimodular(g: usize) -> impl Strategy<Value = IntMatrix> {
    prop::collection::vec((0..g, 0..g, -3i64..=3), 0..8).prop_map(move |ops| {
        let mut u = IntMatrix::identity(g);
        for (a, b, k) in ops {
            if a != b {
                for i in 0..g {
                    u[(i, a)] += k * u[(i, b)];
                }
            }
        }
        u
    })
}

fn sublattice(g: usize) -> impl Strategy<Value = Sublattice> {
    nonsingular(g).prop_map(|m| Sublattice::from_basis(&m).unwrap())
}

proptest! {
    #[test]
    fn hnf_is_invariant_under_unimodular_change((a, u) in (1usize..=3).prop_flat_map(|g| (nonsingular(g), unimodular(g)))) {
        let (h1, _) = hnf(&a).unwrap();
        let (h2, _) = hnf(&a.mul(&u).unwrap()).unwrap();
        prop_assert_eq!(h1, h2);
    }

    #[test]
    fn hnf_transform_is_unimodular(a in (1usize..=3).prop_flat_map(nonsingular)) {
        let (h, u) = hnf(&a).unwrap();
        prop_assert_eq!(a.mul(&u).unwrap(), h);
        prop_assert_eq!(u.determinant().unwrap().abs(), 1);
    }

    #[test]
    fn intersection_and_sum_indices((a, b) in (1usize..=3).prop_flat_map(|g| (sublattice(g), sublattice(g)))) {
        let meet = a.intersect(&b).unwrap();
        let join = a.sum(&b).unwrap();
        prop_assert_eq!(meet.index() * join.index(), a.index() * b.index());
        prop_assert!(meet.is_subset_of(&a).unwrap() && meet.is_subset_of(&b).unwrap());
        prop_assert!(a.is_subset_of(&join).unwrap() && b.is_subset_of(&join).unwrap());
    }

    #[test]
    fn quotient_order_is_index_ratio((a, c) in (1usize..=3).prop_flat_map(|g| (sublattice(g), sublattice(g)))) {
        let b = a.intersect(&c).unwrap();
        let group = a.quotient(&b).unwrap();
        prop_assert_eq!(group.order(), b.index() / a.index());
        prop_assert_eq!(a.coset_representatives(&b).unwrap().len() as u64, group.order());
    }

    #[test]
    fn reduction_is_idempotent_and_coset_invariant(
        (basis, v, k) in (1usize..=3).prop_flat_map(|g| (
            nonsingular(g),
            prop::collection::vec((-20i64..=20, 1i64..=6), g),
            prop::collection::vec(-5i64..=5, g),
        ))
    ) {
        let g = basis.rows();
        let cols: Vec<Vec<Rational>> = basis
            .columns()
            .iter()
            .map(|c| c.iter().map(|&x| Rational::new(x, 2)).collect())
            .collect();
        let lat = RationalLattice::from_generators(g, &cols).unwrap();
        let v: Vec<Rational> = v.iter().map(|&(n, d)| Rational::new(n, d)).collect();
        let r = lat.reduce(&v).unwrap();
        prop_assert_eq!(lat.reduce(&r).unwrap(), r.clone());
        let shift = lat.basis().mul_int_vec(&k).unwrap();
        let moved: Vec<Rational> = v.iter().zip(&shift).map(|(a, b)| a + b).collect();
        prop_assert_eq!(lat.reduce(&moved).unwrap(), r);
    }
}

#[test]
fn subgroups_of_elementary_groups() {
    for p in [2, 3, 5] {
        let group = FiniteAbelianGroup::from_invariant_factors(&[p, p]).unwrap();
        assert_eq!(group.enumerate_subgroups(1_000).unwrap().len() as i64, p + 3);
    }
}
