//! Néron–Severi classes on a uniformized torus and the lattices they cut out.
//!
//! A class `H` is a rational `g × g` matrix whose column `j` is `H(λ_j)` in
//! `M`-coordinates. On the tropical side only the valuation matrix `V` of the
//! lattice generators matters; the `G_m`-valued pairings need the full
//! monomial coordinates of the generators.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{
    integrality_lattice, FiniteAbelianGroup, RationalLattice, Sublattice,
};
use crate::monomial::{MultiplicativePoint, ValuedMonomial};
use crate::rational::{Rational, RationalMatrix};

/// The real torus `N_R / Λ`, given by the images of the lattice basis.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(try_from = "RawTropTorus", into = "RawTropTorus")]
pub struct TropTorus {
    v: RationalMatrix,
    v_inv: RationalMatrix,
}

#[derive(Serialize, Deserialize)]
struct RawTropTorus {
    g: usize,
    #[serde(rename = "V")]
    v: RationalMatrix,
}

impl TryFrom<RawTropTorus> for TropTorus {
    type Error = Error;
    fn try_from(raw: RawTropTorus) -> Result<Self> {
        if raw.v.rows() != raw.g {
            return Err(Error::DimensionMismatch(format!(
                "g = {} but V has {} rows",
                raw.g,
                raw.v.rows()
            )));
        }
        TropTorus::new(raw.v)
    }
}

impl From<TropTorus> for RawTropTorus {
    fn from(t: TropTorus) -> Self {
        RawTropTorus {
            g: t.rank(),
            v: t.v,
        }
    }
}

impl TropTorus {
    /// Column `j` of `v` is `trop(λ_j) ∈ N_Q`; `v` must be nonsingular.
    pub fn new(v: RationalMatrix) -> Result<Self> {
        if !v.is_square() {
            return Err(Error::DimensionMismatch("valuation matrix must be square".into()));
        }
        let v_inv = v.inverse()?.ok_or(Error::SingularLattice)?;
        Ok(TropTorus { v, v_inv })
    }

    /// `N_R / Z^g` with the standard basis.
    pub fn standard(g: usize) -> Self {
        TropTorus::new(RationalMatrix::identity(g)).expect("identity is invertible")
    }

    pub fn rank(&self) -> usize {
        self.v.rows()
    }

    pub fn valuation_matrix(&self) -> &RationalMatrix {
        &self.v
    }

    /// Point of `N_Q` represented by a lattice vector.
    pub fn embed(&self, lambda: &[i64]) -> Result<Vec<Rational>> {
        self.v.mul_int_vec(lambda)
    }

    /// Gram matrix `V^T H` of the real pairing `[λ, λ']^R_H = ⟨trop λ, H(λ')⟩`.
    pub fn real_gram(&self, h: &RationalMatrix) -> Result<RationalMatrix> {
        self.v.transpose().mul(h)
    }

    pub fn real_pairing(&self, h: &RationalMatrix, a: &[i64], b: &[i64]) -> Result<Rational> {
        let gram = self.real_gram(h)?;
        let hb = gram.mul_int_vec(b)?;
        Ok(a.iter().zip(&hb).map(|(&x, y)| y.mul_int(x)).sum())
    }

    pub fn is_r_symmetric(&self, h: &RationalMatrix) -> Result<bool> {
        is_r_symmetric(h, &self.v)
    }

    /// The characters `M` restricted to `sub`, as covectors on its basis.
    pub fn characters_on(&self, sub: &Sublattice) -> Result<Vec<Vec<Rational>>> {
        let vb = self.v.mul(&sub.basis().to_rational())?;
        Ok(vb.to_rows())
    }

    /// The covector `λ' ↦ ⟨λ', m⟩` on the basis of `sub` for `m ∈ M_Q`.
    pub fn covector_on(&self, m: &[Rational], sub: &Sublattice) -> Result<Vec<Rational>> {
        let vb = self.v.mul(&sub.basis().to_rational())?;
        vb.transpose().mul_vec(m)
    }

    /// `H(λ)` restricted to `sub`, for a lattice vector `λ`.
    pub fn class_image_on(
        &self,
        h: &RationalMatrix,
        lambda: &[i64],
        sub: &Sublattice,
    ) -> Result<Vec<Rational>> {
        let m = h.mul_int_vec(lambda)?;
        self.covector_on(&m, sub)
    }

    /// `H_R(x)` restricted to `sub`, for a point `x ∈ N_Q`.
    pub fn class_image_of_point_on(
        &self,
        h: &RationalMatrix,
        x: &[Rational],
        sub: &Sublattice,
    ) -> Result<Vec<Rational>> {
        let coords = self.v_inv.mul_vec(x)?;
        let m = h.mul_vec(&coords)?;
        self.covector_on(&m, sub)
    }

    /// The lattice `M|_Γ + H(base)|_Γ` of covectors on the basis of `gamma`.
    pub fn moduli_lattice(
        &self,
        h: &RationalMatrix,
        base: &Sublattice,
        gamma: &Sublattice,
    ) -> Result<RationalLattice> {
        let mut gens = self.characters_on(gamma)?;
        for lambda in base.basis_vectors() {
            gens.push(self.class_image_on(h, &lambda, gamma)?);
        }
        RationalLattice::from_generators(self.rank(), &gens)
    }
}

/// `true` iff `V^T H` is symmetric.
pub fn is_r_symmetric(h: &RationalMatrix, v: &RationalMatrix) -> Result<bool> {
    if !h.is_square() || h.rows() != v.rows() {
        return Err(Error::DimensionMismatch("H and V must be g×g".into()));
    }
    Ok(v.transpose().mul(h)?.is_symmetric())
}

/// A rational Néron–Severi class: `H: Λ → M_Q` with `V^T H` symmetric.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NsClass {
    h: RationalMatrix,
}

impl NsClass {
    pub fn new(h: RationalMatrix, torus: &TropTorus) -> Result<Self> {
        if h.rows() != torus.rank() || !h.is_square() {
            return Err(Error::DimensionMismatch("class must be g×g".into()));
        }
        if !torus.is_r_symmetric(&h)? {
            return Err(Error::Invalid("class is not R-symmetric".into()));
        }
        Ok(NsClass { h })
    }

    /// Skips the symmetry check; used when the context is validated elsewhere.
    pub fn unchecked(h: RationalMatrix) -> Self {
        NsClass { h }
    }

    pub fn zero(g: usize) -> Self {
        NsClass {
            h: RationalMatrix::zeros(g, g),
        }
    }

    pub fn matrix(&self) -> &RationalMatrix {
        &self.h
    }

    pub fn scale(&self, k: i64) -> Self {
        NsClass {
            h: self.h.scale(&Rational::from_int(k)),
        }
    }

    pub fn is_integral_on(&self, sub: &Sublattice) -> Result<bool> {
        Ok(self.h.mul(&sub.basis().to_rational())?.is_integral())
    }

    /// `Λ_H = {λ : H(λ) ∈ M}`.
    pub fn large_lattice(&self) -> Result<Sublattice> {
        integrality_lattice(&self.h)
    }

    /// `M_H = M + H(Λ)`.
    pub fn m_large(&self) -> Result<RationalLattice> {
        let g = self.h.rows();
        let mut gens: Vec<Vec<Rational>> = (0..g)
            .map(|i| (0..g).map(|j| Rational::from_int(i64::from(i == j))).collect())
            .collect();
        gens.extend((0..g).map(|j| self.h.column(j)));
        RationalLattice::from_generators(g, &gens)
    }

    /// `N_H = {n ∈ N : H^T n ∈ Z^g}`.
    pub fn n_large(&self) -> Result<Sublattice> {
        integrality_lattice(&self.h.transpose())
    }

    fn integral_image(&self, lambda: &[i64]) -> Result<Vec<i64>> {
        let img = self.h.mul_int_vec(lambda)?;
        img.iter()
            .map(|x| x.to_i64())
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::NotInLargeLattice(lambda.to_vec()))
    }
}

/// The analytic torus `T / Λ` with `Λ` spanned by points of `(K*)^g`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(try_from = "RawNaTorus", into = "RawNaTorus")]
pub struct NaTorus {
    generators: Vec<MultiplicativePoint>,
    trop: TropTorus,
}

#[derive(Serialize, Deserialize)]
struct RawNaTorus {
    g: usize,
    generators: Vec<MultiplicativePoint>,
}

impl TryFrom<RawNaTorus> for NaTorus {
    type Error = Error;
    fn try_from(raw: RawNaTorus) -> Result<Self> {
        if raw.generators.len() != raw.g {
            return Err(Error::DimensionMismatch(format!(
                "g = {} but {} generators given",
                raw.g,
                raw.generators.len()
            )));
        }
        NaTorus::new(raw.generators)
    }
}

impl From<NaTorus> for RawNaTorus {
    fn from(t: NaTorus) -> Self {
        RawNaTorus {
            g: t.rank(),
            generators: t.generators,
        }
    }
}

impl NaTorus {
    /// Generator `j` is `λ_j`; their valuations must span a full lattice.
    pub fn new(generators: Vec<MultiplicativePoint>) -> Result<Self> {
        let g = generators.len();
        if generators.iter().any(|p| p.dim() != g) {
            return Err(Error::DimensionMismatch(
                "each generator needs g coordinates".into(),
            ));
        }
        let cols: Vec<Vec<Rational>> = generators.iter().map(|p| p.tropicalize()).collect();
        let v = RationalMatrix::from_columns(&cols);
        let trop = TropTorus::new(v).map_err(|e| match e {
            Error::SingularLattice => {
                Error::Invalid("generators do not tropicalize to a full lattice".into())
            }
            other => other,
        })?;
        Ok(NaTorus { generators, trop })
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[MultiplicativePoint] {
        &self.generators
    }

    pub fn trop(&self) -> &TropTorus {
        &self.trop
    }

    /// The point `∏ λ_j^{a_j}` of `T(K)`.
    pub fn embed(&self, lambda: &[i64]) -> Result<MultiplicativePoint> {
        if lambda.len() != self.rank() {
            return Err(Error::DimensionMismatch("lattice vector of wrong length".into()));
        }
        self.generators
            .iter()
            .zip(lambda)
            .try_fold(MultiplicativePoint::identity(self.rank()), |acc, (p, &a)| {
                acc.mul(&p.pow(a))
            })
    }

    /// `[λ, λ']_H = ⟨λ, H(λ')⟩`, defined for `λ' ∈ Λ_H`.
    pub fn gm_pairing(&self, h: &NsClass, lambda: &[i64], lambda2: &[i64]) -> Result<ValuedMonomial> {
        let m = h.integral_image(lambda2)?;
        self.embed(lambda)?.eval_character(&m)
    }

    /// `B(γ, λ) = [γ, λ]_H / [λ, γ]_H` on `Λ_H × Λ_H`.
    pub fn b_pairing(&self, h: &NsClass, gamma: &[i64], lambda: &[i64]) -> Result<ValuedMonomial> {
        h.integral_image(gamma)?;
        let ab = self.gm_pairing(h, gamma, lambda)?;
        let ba = self.gm_pairing(h, lambda, gamma)?;
        Ok(ab.div(&ba))
    }

    /// Phase of `B(γ, λ)` in `Q/Z`; errors unless the value is a root of unity.
    pub fn b_phase(&self, h: &NsClass, gamma: &[i64], lambda: &[i64]) -> Result<Rational> {
        let b = self.b_pairing(h, gamma, lambda)?;
        if b.torsion_order().is_none() {
            return Err(Error::NotRationalClass(b.to_string()));
        }
        Ok(b.phase().clone())
    }

    /// Whether `[−,−]_H` is symmetric on `sub`; checked on basis pairs.
    pub fn is_gm_symmetric_on(&self, h: &NsClass, sub: &Sublattice) -> Result<bool> {
        let basis = sub.basis_vectors();
        for b in &basis {
            h.integral_image(b)?;
        }
        for (i, a) in basis.iter().enumerate() {
            for b in &basis[i + 1..] {
                if !self.b_pairing(h, a, b)?.is_one() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    pub fn is_gm_symmetric(&self, h: &NsClass) -> Result<bool> {
        self.is_gm_symmetric_on(h, &Sublattice::full(self.rank()))
    }

    /// `Γ_H = {γ ∈ Λ_H : B(γ, λ) = 1 for all λ ∈ Λ_H}`.
    pub fn small_lattice(&self, h: &NsClass) -> Result<Sublattice> {
        let large = h.large_lattice()?;
        let basis = large.basis_vectors();
        let g = self.rank();
        // γ = Σ c_i b_i lies in Γ_H iff Θ^T c is integral, Θ_ij = phase B(b_i, b_j).
        let theta_t = RationalMatrix::from_fn(g, g, |_, _| Rational::zero());
        let mut theta_t = theta_t;
        for i in 0..g {
            for j in 0..g {
                theta_t[(j, i)] = self.b_phase(h, &basis[i], &basis[j])?;
            }
        }
        let coeffs = integrality_lattice(&theta_t)?;
        let gens = coeffs
            .basis_vectors()
            .iter()
            .map(|c| large.basis().mul_vec(c))
            .collect::<Result<Vec<_>>>()?;
        Sublattice::from_generators(g, &gens)
    }

    /// `Λ_H / Γ_H` together with the phase matrix of `B` on its generator lifts.
    pub fn commutator_group(&self, h: &NsClass) -> Result<CommutatorGroup> {
        let large = h.large_lattice()?;
        let small = self.small_lattice(h)?;
        let group = large.quotient(&small)?;
        let lifts = group.generator_lifts();
        let k = lifts.len();
        let mut phases = RationalMatrix::zeros(k, k);
        for i in 0..k {
            for j in 0..k {
                phases[(i, j)] = self.b_phase(h, &lifts[i], &lifts[j])?;
            }
        }
        Ok(CommutatorGroup {
            large,
            small,
            group,
            phases,
        })
    }

    /// The `H`-admissible sublattices, sorted by HNF basis.
    pub fn admissible_lattices(&self, h: &NsClass, bound: u64) -> Result<Vec<Sublattice>> {
        self.commutator_group(h)?.admissible_lattices(bound)
    }

    /// `n(H)`: the common index of the admissible lattices in `Λ`.
    pub fn rank_of_class(&self, h: &NsClass, bound: u64) -> Result<u64> {
        let cg = self.commutator_group(h)?;
        let lattices = cg.admissible_lattices(bound)?;
        let first = lattices
            .first()
            .ok_or_else(|| Error::Inconsistent("no admissible lattice".into()))?
            .index();
        if lattices.iter().any(|l| l.index() != first) {
            return Err(Error::Inconsistent(
                "admissible lattices have different indices".into(),
            ));
        }
        let q = cg.group.order();
        let root = (q as f64).sqrt().round() as u64;
        if root * root != q || root * cg.large.index() != first {
            return Err(Error::Inconsistent(format!(
                "n(H) = {first} but |Λ_H/Γ_H| = {q}, [Λ:Λ_H] = {}",
                cg.large.index()
            )));
        }
        Ok(first)
    }

    /// The pairing `Γ_H × M_H → G_m` evaluated at `m = m₀ + H(λ')`.
    pub fn extended_pairing(
        &self,
        h: &NsClass,
        gamma: &[i64],
        m0: &[i64],
        lambda2: &[i64],
    ) -> Result<ValuedMonomial> {
        let small = self.small_lattice(h)?;
        if !small.contains(gamma)? {
            return Err(Error::NotInSmallLattice(gamma.to_vec()));
        }
        let base = self.embed(gamma)?.eval_character(m0)?;
        Ok(base.mul(&self.gm_pairing(h, lambda2, gamma)?))
    }
}

/// The finite group `Λ_H / Γ_H` with its commutator pairing.
#[derive(Clone, Debug)]
pub struct CommutatorGroup {
    pub large: Sublattice,
    pub small: Sublattice,
    pub group: FiniteAbelianGroup,
    /// `phases[i][j]` is the phase of `B(lift_i, lift_j)`.
    pub phases: RationalMatrix,
}

impl CommutatorGroup {
    /// Phase of `B(x, y)` for group elements in generator coordinates.
    pub fn pairing_phase(&self, x: &[i64], y: &[i64]) -> Rational {
        let mut acc = Rational::zero();
        for (i, &a) in x.iter().enumerate() {
            for (j, &b) in y.iter().enumerate() {
                acc += self.phases[(i, j)].mul_int(a * b);
            }
        }
        acc.fract_positive()
    }

    pub fn is_isotropic(&self, gens: &[Vec<i64>]) -> bool {
        gens.iter()
            .all(|x| gens.iter().all(|y| self.pairing_phase(x, y).is_zero()))
    }

    /// Elements `x ≠ 0` with `B(x, −)` trivial; empty iff `B` is nondegenerate.
    pub fn radical(&self) -> Vec<Vec<i64>> {
        let k = self.group.num_generators();
        let basis: Vec<Vec<i64>> = (0..k)
            .map(|i| (0..k).map(|j| i64::from(i == j)).collect())
            .collect();
        self.group
            .elements()
            .into_iter()
            .filter(|x| x.iter().any(|&c| c != 0))
            .filter(|x| basis.iter().all(|e| self.pairing_phase(x, e).is_zero()))
            .collect()
    }

    /// Preimage in `Λ_H` of a subgroup given by generator coordinates.
    pub fn preimage(&self, gens: &[Vec<i64>]) -> Result<Sublattice> {
        let mut vecs = self.small.basis_vectors();
        vecs.extend(gens.iter().map(|c| self.group.lift(c)));
        Sublattice::from_generators(self.small.rank(), &vecs)
    }

    /// Preimages of the maximal isotropic subgroups, sorted.
    pub fn admissible_lattices(&self, bound: u64) -> Result<Vec<Sublattice>> {
        let subgroups = self.group.enumerate_subgroups(bound)?;
        type Span<'a> = (BTreeSet<Vec<i64>>, &'a [Vec<i64>]);
        let isotropic: Vec<Span> = subgroups
            .iter()
            .filter(|s| self.is_isotropic(&s.generators))
            .map(|s| {
                let elems: BTreeSet<Vec<i64>> =
                    self.group.span(&s.generators).into_iter().collect();
                (elems, s.generators.as_slice())
            })
            .collect();
        let maximal: Vec<&[Vec<i64>]> = isotropic
            .iter()
            .filter(|(elems, _)| {
                !isotropic
                    .iter()
                    .any(|(other, _)| other.len() > elems.len() && elems.is_subset(other))
            })
            .map(|(_, gens)| *gens)
            .collect();
        let mut out = maximal
            .iter()
            .map(|gens| self.preimage(gens))
            .collect::<Result<Vec<_>>>()?;
        out.sort();
        out.dedup();
        Ok(out)
    }
}
