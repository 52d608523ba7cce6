use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use tropabel::bundle::is_homogeneous;
use tropabel::random;
use tropabel::trop_char::{
    canonical_form, decompose_rep, eta_trop, induced_representation, TropGlElement,
    TropRepresentation,
};
use tropabel::Rational;

fn min_plus(a: &[Vec<Option<Rational>>], b: &[Vec<Option<Rational>>]) -> Vec<Vec<Option<Rational>>> {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|k| {
                    (0..n)
                        .filter_map(|j| match (&a[i][j], &b[j][k]) {
                            (Some(x), Some(y)) => Some(x + y),
                            _ => None,
                        })
                        .min()
                })
                .collect()
        })
        .collect()
}

/// A commuting representation: a conjugated sum of induced representations.
fn commuting_rep(rng: &mut ChaCha8Rng, g: usize) -> TropRepresentation {
    let k = rng.gen_range(1..=2);
    let mut rho: Option<TropRepresentation> = None;
    for _ in 0..k {
        let lat = random::sublattice(rng, g, 3).unwrap();
        let piece = induced_representation(&lat, &random::rationals(rng, g, 6, 4)).unwrap();
        rho = Some(match rho {
            None => piece,
            Some(r) => r.direct_sum(&piece).unwrap(),
        });
    }
    let rho = rho.unwrap();
    let c = random::trop_gl(rng, rho.r());
    rho.conjugate(&c).unwrap()
}

proptest! {
    #[test]
    fn compose_is_min_plus_multiplication(seed in any::<u64>(), r in 1usize..=6) {
        let mut rng = random::seeded(seed);
        let a = random::trop_gl(&mut rng, r);
        let b = random::trop_gl(&mut rng, r);
        let ab = a.compose(&b).unwrap();
        prop_assert_eq!(ab.to_matrix(), min_plus(&a.to_matrix(), &b.to_matrix()));
        prop_assert_eq!(TropGlElement::from_matrix(&ab.to_matrix()).unwrap(), ab.clone());
        prop_assert!(a.compose(&a.inverse()).unwrap().is_identity());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn orbits_partition_and_orbit_characters_are_additive(seed in any::<u64>()) {
        let mut rng = random::seeded(seed);
        let g = rng.gen_range(1..=3);
        let rho = commuting_rep(&mut rng, g);
        let comps = decompose_rep(&rho).unwrap();
        let total: usize = comps.iter().map(|c| c.orbit.len()).sum();
        prop_assert_eq!(total, rho.r());
        for c in &comps {
            prop_assert_eq!(c.lattice.index() as usize, c.orbit.len());
            let p = c.orbit[0] - 1;
            let basis = c.lattice.basis_vectors();
            for _ in 0..4 {
                let coeffs: Vec<i64> = (0..basis.len()).map(|_| rng.gen_range(-3..=3)).collect();
                let mut v = vec![0i64; g];
                for (k, b) in coeffs.iter().zip(&basis) {
                    for (x, y) in v.iter_mut().zip(b) {
                        *x += k * y;
                    }
                }
                let image = rho.evaluate(&v).unwrap();
                prop_assert_eq!(image.perm()[p], p);
                let linear: Rational = coeffs.iter().zip(&c.l).map(|(&k, x)| x.mul_int(k)).sum();
                prop_assert_eq!(&image.translation()[p], &linear);
            }
        }
    }

    #[test]
    fn eta_of_a_commuting_representation_is_homogeneous(seed in any::<u64>()) {
        let mut rng = random::seeded(seed);
        let g = rng.gen_range(1..=3);
        let rho = commuting_rep(&mut rng, g);
        let e = eta_trop(&rho).unwrap();
        prop_assert!(is_homogeneous(&e));
        prop_assert_eq!(e.rank() as usize, rho.r());
    }

    #[test]
    fn canonical_form_is_a_conjugation_invariant(seed in any::<u64>()) {
        let mut rng = random::seeded(seed);
        let g = rng.gen_range(1..=2);
        let rho = commuting_rep(&mut rng, g);
        let canon = canonical_form(&rho).unwrap();
        for _ in 0..20 {
            let c = random::trop_gl(&mut rng, rho.r());
            prop_assert_eq!(&canonical_form(&rho.conjugate(&c).unwrap()).unwrap(), &canon);
        }
    }
}
