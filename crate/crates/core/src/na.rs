//! Factors of automorphy `(H, r)` on the analytic torus, in the valued
//! monomial model, and their tropicalizations.

use serde::{Deserialize, Serialize};

use crate::bundle::{moduli_point, sym_point, ModuliPoint, SymPoint, TropLineBundle};
use crate::error::{Error, Result};
use crate::lattice::Sublattice;
use crate::monomial::{monomial_product, MultiplicativePoint, ValuedMonomial};
use crate::ns::{NaTorus, NsClass};
use crate::rational::{Rational, RationalMatrix};
use crate::trop_char::{eta_trop, TropRepresentation};

/// A homomorphism `Λ → G_m`, given on the standard basis.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NaCharacter {
    values: Vec<ValuedMonomial>,
}

impl NaCharacter {
    pub fn new(values: Vec<ValuedMonomial>) -> Self {
        NaCharacter { values }
    }

    pub fn trivial(g: usize) -> Self {
        NaCharacter {
            values: vec![ValuedMonomial::one(); g],
        }
    }

    pub fn rank(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[ValuedMonomial] {
        &self.values
    }

    pub fn eval(&self, lambda: &[i64]) -> Result<ValuedMonomial> {
        if lambda.len() != self.rank() {
            return Err(Error::DimensionMismatch("lattice vector of wrong length".into()));
        }
        Ok(monomial_product(&self.values, lambda))
    }

    pub fn mul(&self, other: &NaCharacter) -> Result<NaCharacter> {
        if self.rank() != other.rank() {
            return Err(Error::DimensionMismatch("characters of different rank".into()));
        }
        Ok(NaCharacter {
            values: self.values.iter().zip(&other.values).map(|(a, b)| a.mul(b)).collect(),
        })
    }

    /// The tropical character `ν ∘ χ` on the standard basis.
    pub fn tropicalize(&self) -> Vec<Rational> {
        self.values.iter().map(ValuedMonomial::valuation).collect()
    }
}

/// The character `λ ↦ ⟨λ, m⟩` of `Λ` given by `m ∈ M`.
pub fn character_of(torus: &NaTorus, m: &[i64]) -> Result<NaCharacter> {
    let values = torus
        .generators()
        .iter()
        .map(|p| p.eval_character(m))
        .collect::<Result<Vec<_>>>()?;
    Ok(NaCharacter::new(values))
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct NaLineBundle {
    lattice: Sublattice,
    #[serde(rename = "H")]
    h: RationalMatrix,
    #[serde(rename = "r")]
    r_basis: Vec<ValuedMonomial>,
}

impl NaLineBundle {
    /// `r_basis[j]` is `r` on the `j`-th HNF basis vector of `lattice`.
    pub fn new(
        torus: &NaTorus,
        lattice: Sublattice,
        h: RationalMatrix,
        r_basis: Vec<ValuedMonomial>,
    ) -> Result<Self> {
        let b = NaLineBundle {
            lattice,
            h,
            r_basis,
        };
        b.validate(torus)?;
        Ok(b)
    }

    /// Checks dimensions, integrality and `G_m`-symmetry of `H` on the lattice.
    pub fn validate(&self, torus: &NaTorus) -> Result<()> {
        let g = torus.rank();
        if self.lattice.rank() != g
            || self.h.rows() != g
            || self.h.cols() != g
            || self.r_basis.len() != g
        {
            return Err(Error::DimensionMismatch(format!(
                "line bundle on a rank {g} torus needs a {g}x{g} class and {g} values"
            )));
        }
        let class = self.class();
        if !class.is_integral_on(&self.lattice)? {
            return Err(Error::Invalid("class is not integral on the lattice".into()));
        }
        if !torus.is_gm_symmetric_on(&class, &self.lattice)? {
            return Err(Error::Invalid("class is not G_m-symmetric on the lattice".into()));
        }
        if !torus.trop().is_r_symmetric(&self.h)? {
            return Err(Error::Invalid("class is not R-symmetric".into()));
        }
        Ok(())
    }

    pub fn lattice(&self) -> &Sublattice {
        &self.lattice
    }

    pub fn h(&self) -> &RationalMatrix {
        &self.h
    }

    pub fn class(&self) -> NsClass {
        NsClass::unchecked(self.h.clone())
    }

    pub fn r_basis(&self) -> &[ValuedMonomial] {
        &self.r_basis
    }

    /// `b ⊗ L(0, χ)`.
    pub fn twist(&self, chi: &NaCharacter) -> Result<NaLineBundle> {
        let r_basis = self
            .lattice
            .basis_vectors()
            .iter()
            .zip(&self.r_basis)
            .map(|(v, r)| Ok(r.mul(&chi.eval(v)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(NaLineBundle {
            r_basis,
            ..self.clone()
        })
    }

    /// `T_x^* b`: `r'(λ) = r(λ)·⟨x, H(λ)⟩`.
    pub fn translate(&self, x: &MultiplicativePoint) -> Result<NaLineBundle> {
        let class = self.class();
        let r_basis = self
            .lattice
            .basis_vectors()
            .iter()
            .zip(&self.r_basis)
            .map(|(v, r)| {
                let m = integral_image(&class, v)?;
                Ok(r.mul(&x.eval_character(&m)?))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(NaLineBundle {
            r_basis,
            ..self.clone()
        })
    }
}

fn integral_image(h: &NsClass, lambda: &[i64]) -> Result<Vec<i64>> {
    h.matrix()
        .mul_int_vec(lambda)?
        .iter()
        .map(Rational::to_i64)
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| Error::NotInLargeLattice(lambda.to_vec()))
}

/// The cocycle correction `∏_{i<j} [b_i,b_j]^{a_i a_j} · ∏_i [b_i,b_i]^{a_i(a_i−1)/2}`.
fn cocycle_correction(
    torus: &NaTorus,
    class: &NsClass,
    basis: &[Vec<i64>],
    a: &[i64],
) -> Result<ValuedMonomial> {
    let mut acc = ValuedMonomial::one();
    for i in 0..basis.len() {
        if a[i] == 0 {
            continue;
        }
        let diag = torus.gm_pairing(class, &basis[i], &basis[i])?;
        acc = acc.mul(&diag.pow(a[i] * (a[i] - 1) / 2));
        for j in i + 1..basis.len() {
            if a[j] != 0 {
                let p = torus.gm_pairing(class, &basis[i], &basis[j])?;
                acc = acc.mul(&p.pow(a[i] * a[j]));
            }
        }
    }
    Ok(acc)
}

/// `r(λ)` for `λ ∈ Λ'`, extended from the basis values by the cocycle rule.
pub fn extend_r(torus: &NaTorus, b: &NaLineBundle, lambda: &[i64]) -> Result<ValuedMonomial> {
    let a = b
        .lattice
        .coordinates(lambda)?
        .ok_or_else(|| Error::NotInLattice(lambda.to_vec()))?;
    let basis = b.lattice.basis_vectors();
    let linear = monomial_product(&b.r_basis, &a);
    Ok(linear.mul(&cocycle_correction(torus, &b.class(), &basis, &a)?))
}

/// Pullback along `sub ⊆ Λ'`.
pub fn restrict(torus: &NaTorus, b: &NaLineBundle, sub: &Sublattice) -> Result<NaLineBundle> {
    if !sub.is_subset_of(&b.lattice)? {
        return Err(Error::NotCompatible);
    }
    let r_basis = sub
        .basis_vectors()
        .iter()
        .map(|v| extend_r(torus, b, v))
        .collect::<Result<Vec<_>>>()?;
    Ok(NaLineBundle {
        lattice: sub.clone(),
        h: b.h.clone(),
        r_basis,
    })
}

/// A factor on `larger ⊇ Λ'` restricting to `b`; errors when the needed roots
/// leave the monomial model.
pub fn extend_to(torus: &NaTorus, b: &NaLineBundle, larger: &Sublattice) -> Result<NaLineBundle> {
    let class = b.class();
    let k = larger.relative_basis(&b.lattice)?;
    let big_basis = larger.basis_vectors();
    // targets[c] = value the linear part must take on the c-th basis vector of Λ'.
    let targets = (0..k.cols())
        .map(|c| {
            let coords = k.column(c);
            let correction = cocycle_correction(torus, &class, &big_basis, &coords)?;
            Ok(b.r_basis[c].div(&correction))
        })
        .collect::<Result<Vec<_>>>()?;
    let k_inv_t = k
        .to_rational()
        .transpose()
        .inverse()?
        .ok_or(Error::SingularLattice)?;
    let r_basis = (0..big_basis.len())
        .map(|j| {
            (0..targets.len()).try_fold(ValuedMonomial::one(), |acc, c| {
                Ok(acc.mul(&targets[c].pow_rational(&k_inv_t[(j, c)])?))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    NaLineBundle::new(torus, larger.clone(), b.h.clone(), r_basis)
}

/// `(H, l)` with `l(λ) = ν(r(λ)) − ½[λ, λ]^R_H` on the basis of `Λ'`.
pub fn tropicalize_line_bundle(torus: &NaTorus, b: &NaLineBundle) -> Result<TropLineBundle> {
    let trop = torus.trop();
    let l = b
        .lattice
        .basis_vectors()
        .iter()
        .zip(&b.r_basis)
        .map(|(v, r)| Ok(r.valuation() - trop.real_pairing(&b.h, v, v)? * Rational::half()))
        .collect::<Result<Vec<_>>>()?;
    TropLineBundle::new(b.lattice.clone(), b.h.clone(), l)
}

/// The moduli coordinate of the simple bundle `f_* b` for an admissible `Λ'`.
pub fn tropicalize_simple(
    torus: &NaTorus,
    h: &NsClass,
    lattice: &Sublattice,
    b: &NaLineBundle,
    bound: u64,
) -> Result<ModuliPoint> {
    if !torus.admissible_lattices(h, bound)?.contains(lattice) {
        return Err(Error::NotAdmissible);
    }
    if b.lattice != *lattice {
        return Err(Error::LatticeMismatch);
    }
    if b.h != *h.matrix() {
        return Err(Error::SlopeMismatch);
    }
    let gamma = torus.small_lattice(h)?;
    let on_gamma = restrict(torus, b, &gamma)?;
    let s = tropicalize_line_bundle(torus, &on_gamma)?;
    let full = Sublattice::full(torus.rank());
    moduli_point(torus.trop(), &full, &s, &gamma, h.matrix())
}

/// A direct sum of characters, kept in canonical order.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(try_from = "RawSemisimple", into = "RawSemisimple")]
pub struct NaSemisimpleRep {
    characters: Vec<NaCharacter>,
}

#[derive(Serialize, Deserialize)]
struct RawSemisimple {
    r: usize,
    characters: Vec<NaCharacter>,
}

impl TryFrom<RawSemisimple> for NaSemisimpleRep {
    type Error = Error;
    fn try_from(raw: RawSemisimple) -> Result<Self> {
        if raw.r != raw.characters.len() {
            return Err(Error::DimensionMismatch(format!(
                "r = {} but {} characters given",
                raw.r,
                raw.characters.len()
            )));
        }
        NaSemisimpleRep::new(raw.characters)
    }
}

impl From<NaSemisimpleRep> for RawSemisimple {
    fn from(rep: NaSemisimpleRep) -> Self {
        RawSemisimple {
            r: rep.characters.len(),
            characters: rep.characters,
        }
    }
}

impl NaSemisimpleRep {
    pub fn new(mut characters: Vec<NaCharacter>) -> Result<Self> {
        let g = characters.first().ok_or(Error::EmptyBundle)?.rank();
        if characters.iter().any(|c| c.rank() != g) {
            return Err(Error::DimensionMismatch("characters of different rank".into()));
        }
        characters.sort();
        Ok(NaSemisimpleRep { characters })
    }

    pub fn r(&self) -> usize {
        self.characters.len()
    }

    pub fn g(&self) -> usize {
        self.characters[0].rank()
    }

    pub fn characters(&self) -> &[NaCharacter] {
        &self.characters
    }

    /// Multiplies every character by the corresponding entry of `chis`.
    pub fn twist(&self, chis: &[NaCharacter]) -> Result<NaSemisimpleRep> {
        if chis.len() != self.r() {
            return Err(Error::SizeMismatch);
        }
        let characters = self
            .characters
            .iter()
            .zip(chis)
            .map(|(a, b)| a.mul(b))
            .collect::<Result<Vec<_>>>()?;
        NaSemisimpleRep::new(characters)
    }
}

pub fn trop_rep(rho: &NaSemisimpleRep) -> Result<TropRepresentation> {
    let chars: Vec<Vec<Rational>> = rho.characters.iter().map(NaCharacter::tropicalize).collect();
    TropRepresentation::diagonal(rho.g(), &chars)
}

/// `E(ρ) = ⊕ L(0, ρ^i)`.
pub fn eta_a(torus: &NaTorus, rho: &NaSemisimpleRep) -> Result<Vec<NaLineBundle>> {
    let g = torus.rank();
    if rho.g() != g {
        return Err(Error::AmbientMismatch);
    }
    rho.characters
        .iter()
        .map(|c| {
            NaLineBundle::new(
                torus,
                Sublattice::full(g),
                RationalMatrix::zeros(g, g),
                c.values.clone(),
            )
        })
        .collect()
}

/// Whether `ρ2 / ρ1 = ⟨−, m⟩` for some `m ∈ M`.
pub fn characters_equal_mod_m(torus: &NaTorus, rho1: &NaCharacter, rho2: &NaCharacter) -> Result<bool> {
    if rho1.rank() != torus.rank() || rho2.rank() != torus.rank() {
        return Err(Error::AmbientMismatch);
    }
    let ratio: Vec<ValuedMonomial> = rho1
        .values
        .iter()
        .zip(&rho2.values)
        .map(|(a, b)| b.div(a))
        .collect();
    let vals: Vec<Rational> = ratio.iter().map(ValuedMonomial::valuation).collect();
    let v_t = torus.trop().valuation_matrix().transpose();
    let Some(m) = v_t.solve_vec(&vals)? else {
        return Ok(false);
    };
    let Some(m) = m.iter().map(Rational::to_i64).collect::<Option<Vec<_>>>() else {
        return Ok(false);
    };
    Ok(character_of(torus, &m)?.values == ratio)
}

/// Both routes around the square, as symmetric products of moduli points.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct SquareReport {
    pub algebraic: SymPoint,
    pub tropical: SymPoint,
    pub commutes: bool,
}

pub fn verify_commuting_square(torus: &NaTorus, rho: &NaSemisimpleRep) -> Result<SquareReport> {
    let g = torus.rank();
    let full = Sublattice::full(g);
    let zero = RationalMatrix::zeros(g, g);
    let trop = torus.trop();
    let algebraic = eta_a(torus, rho)?
        .iter()
        .map(|b| {
            let s = tropicalize_line_bundle(torus, b)?;
            moduli_point(trop, &full, &s, &full, &zero)
        })
        .collect::<Result<Vec<_>>>()?;
    let bundle = eta_trop(&trop_rep(rho)?)?;
    let tropical = bundle
        .summands()
        .iter()
        .map(|s| moduli_point(trop, &full, s, &full, &zero))
        .collect::<Result<Vec<_>>>()?;
    let algebraic = sym_point(&algebraic)?;
    let tropical = sym_point(&tropical)?;
    let commutes = algebraic == tropical;
    Ok(SquareReport {
        algebraic,
        tropical,
        commutes,
    })
}
