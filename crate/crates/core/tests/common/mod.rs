#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use tropabel::monomial::{MultiplicativePoint, ValuedMonomial};
use tropabel::ns::{NaTorus, NsClass};
use tropabel::random;
use tropabel::{Rational, Sublattice};

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

pub fn example_torus() -> NaTorus {
    let t = ValuedMonomial::t_power(Rational::one());
    NaTorus::new(vec![
        MultiplicativePoint::new(vec![t.clone(), ValuedMonomial::one()]),
        MultiplicativePoint::new(vec![ValuedMonomial::minus_one(), t]),
    ])
    .unwrap()
}

/// Random torus and class with `|Λ_H/Γ_H| ≤ 64`.
pub fn instance(rng: &mut ChaCha8Rng, max_g: usize) -> (NaTorus, NsClass) {
    loop {
        let g = rng.gen_range(1..=max_g);
        let t = random::na_torus(rng, g, 4);
        let h = random::ns_class(rng, t.trop(), 3, 2);
        if let Ok(cg) = t.commutator_group(&h) {
            if cg.group.order() <= 64 {
                return (t, h);
            }
        }
    }
}

pub fn lattice_vector(rng: &mut ChaCha8Rng, lat: &Sublattice, max: i64) -> Vec<i64> {
    let mut v = vec![0i64; lat.rank()];
    for b in lat.basis_vectors() {
        let c = rng.gen_range(-max..=max);
        for (x, y) in v.iter_mut().zip(&b) {
            *x += c * y;
        }
    }
    v
}
