//! Seeded generators of small random instances.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::lattice::{IntMatrix, Sublattice};
use crate::monomial::{MultiplicativePoint, ValuedMonomial};
use crate::na::{NaCharacter, NaSemisimpleRep};
use crate::ns::{NaTorus, NsClass, TropTorus};
use crate::rational::{Rational, RationalMatrix};
use crate::trop_char::TropGlElement;

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `p/q` with `|p| ≤ max_num` and `1 ≤ q ≤ max_den`.
pub fn rational<R: Rng>(rng: &mut R, max_num: i64, max_den: i64) -> Rational {
    Rational::new(rng.gen_range(-max_num..=max_num), rng.gen_range(1..=max_den))
}

pub fn rationals<R: Rng>(rng: &mut R, n: usize, max_num: i64, max_den: i64) -> Vec<Rational> {
    (0..n).map(|_| rational(rng, max_num, max_den)).collect()
}

pub fn int_vector<R: Rng>(rng: &mut R, n: usize, max: i64) -> Vec<i64> {
    (0..n).map(|_| rng.gen_range(-max..=max)).collect()
}

pub fn phase<R: Rng>(rng: &mut R, max_den: i64) -> Rational {
    let q = rng.gen_range(1..=max_den);
    Rational::new(rng.gen_range(0..q), q)
}

/// A monomial with magnitude among a few small rationals.
pub fn monomial<R: Rng>(rng: &mut R) -> ValuedMonomial {
    const MAGS: [(i64, i64); 6] = [(1, 1), (1, 1), (2, 1), (3, 1), (1, 2), (2, 3)];
    let (n, d) = MAGS[rng.gen_range(0..MAGS.len())];
    ValuedMonomial::new(Rational::new(n, d), phase(rng, 6), rational(rng, 6, 4))
        .expect("positive magnitude")
}

/// A monomial of magnitude one with integral valuation.
pub fn unit_monomial<R: Rng>(rng: &mut R, valuation: i64, max_den: i64) -> ValuedMonomial {
    ValuedMonomial::new(Rational::one(), phase(rng, max_den), Rational::from_int(valuation))
        .expect("positive magnitude")
}

/// A nonsingular integer matrix with small entries.
pub fn nonsingular_matrix<R: Rng>(rng: &mut R, g: usize, max: i64) -> IntMatrix {
    loop {
        let rows: Vec<Vec<i64>> = (0..g)
            .map(|i| {
                (0..g)
                    .map(|j| {
                        let x = rng.gen_range(-max..=max);
                        if i == j {
                            x.abs() + 1
                        } else {
                            x
                        }
                    })
                    .collect()
            })
            .collect();
        let m = IntMatrix::from_rows(&rows).expect("square");
        if m.determinant().map(|d| d != 0).unwrap_or(false) {
            return m;
        }
    }
}

/// Generators of magnitude one with phases of denominator at most `max_den`.
pub fn na_torus<R: Rng>(rng: &mut R, g: usize, max_den: i64) -> NaTorus {
    let v = nonsingular_matrix(rng, g, 1);
    let generators = (0..g)
        .map(|j| {
            MultiplicativePoint::new((0..g).map(|i| unit_monomial(rng, v[(i, j)], max_den)).collect())
        })
        .collect();
    NaTorus::new(generators).expect("nonsingular valuations")
}

pub fn trop_torus<R: Rng>(rng: &mut R, g: usize) -> TropTorus {
    let v = nonsingular_matrix(rng, g, 1);
    TropTorus::new(v.to_rational()).expect("nonsingular")
}

/// `H = V^{-T} S` for a random symmetric `S`, so that `V^T H` is symmetric.
pub fn ns_class<R: Rng>(rng: &mut R, torus: &TropTorus, max_num: i64, max_den: i64) -> NsClass {
    let g = torus.rank();
    let mut s = RationalMatrix::zeros(g, g);
    for i in 0..g {
        for j in i..g {
            let x = rational(rng, max_num, max_den);
            s[(i, j)] = x.clone();
            s[(j, i)] = x;
        }
    }
    let v_inv_t = torus
        .valuation_matrix()
        .transpose()
        .inverse()
        .expect("square")
        .expect("nonsingular");
    NsClass::new(v_inv_t.mul(&s).expect("shapes"), torus).expect("symmetric by construction")
}

pub fn rational_matrix<R: Rng>(rng: &mut R, g: usize, max_num: i64, max_den: i64) -> RationalMatrix {
    RationalMatrix::from_fn(g, g, |_, _| rational(rng, max_num, max_den))
}

pub fn character<R: Rng>(rng: &mut R, g: usize) -> NaCharacter {
    NaCharacter::new((0..g).map(|_| monomial(rng)).collect())
}

pub fn semisimple_rep<R: Rng>(rng: &mut R, g: usize, r: usize) -> NaSemisimpleRep {
    NaSemisimpleRep::new((0..r).map(|_| character(rng, g)).collect()).expect("nonempty")
}

pub fn trop_gl<R: Rng>(rng: &mut R, r: usize) -> TropGlElement {
    let mut perm: Vec<usize> = (0..r).collect();
    perm.shuffle(rng);
    TropGlElement::new(perm, rationals(rng, r, 8, 4)).expect("valid permutation")
}

/// A sublattice of `Z^g` of index at most `max_index` from a random lower-triangular basis.
pub fn sublattice<R: Rng>(rng: &mut R, g: usize, max_index: u64) -> Result<Sublattice> {
    loop {
        let mut m = IntMatrix::zeros(g, g);
        for i in 0..g {
            m[(i, i)] = rng.gen_range(1..=max_index as i64);
            for j in 0..i {
                m[(i, j)] = rng.gen_range(-2..=2);
            }
        }
        let lat = Sublattice::from_basis(&m)?;
        if lat.index() <= max_index {
            return Ok(lat);
        }
    }
}
