//! Tropical line and vector bundles on a real torus `N_R / Λ`.
//!
//! A line bundle on the cover `N_R / Λ'` is a factor of automorphy `(H, l)`:
//! `H` is stored as its rational extension to all of `Λ` (so it is integral on
//! `Λ'` but possibly not elsewhere) and `l` by its values on the HNF basis of
//! `Λ'`. A vector bundle is the multiset of its indecomposable summands, each
//! pushed forward from its own cover to a common base lattice.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{RationalLattice, Sublattice};
use crate::ns::TropTorus;
use crate::rational::{Rational, RationalMatrix};

/// Values on the basis of `sub` of the covector with values `l` on the basis of `lattice`.
pub fn restrict_covector(
    l: &[Rational],
    lattice: &Sublattice,
    sub: &Sublattice,
) -> Result<Vec<Rational>> {
    let k = lattice.relative_basis(sub)?;
    k.to_rational().transpose().mul_vec(l)
}

fn sub_vec(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn add_vec(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
#[serde(try_from = "RawLineBundle", into = "RawLineBundle")]
pub struct TropLineBundle {
    lattice: Sublattice,
    h: RationalMatrix,
    l: Vec<Rational>,
}

#[derive(Serialize, Deserialize)]
struct RawLineBundle {
    lattice: Sublattice,
    #[serde(rename = "H")]
    h: RationalMatrix,
    l: Vec<Rational>,
}

impl TryFrom<RawLineBundle> for TropLineBundle {
    type Error = Error;
    fn try_from(raw: RawLineBundle) -> Result<Self> {
        TropLineBundle::new(raw.lattice, raw.h, raw.l)
    }
}

impl From<TropLineBundle> for RawLineBundle {
    fn from(b: TropLineBundle) -> Self {
        RawLineBundle {
            lattice: b.lattice,
            h: b.h,
            l: b.l,
        }
    }
}

impl TropLineBundle {
    pub fn new(lattice: Sublattice, h: RationalMatrix, l: Vec<Rational>) -> Result<Self> {
        let g = lattice.rank();
        if h.rows() != g || h.cols() != g || l.len() != g {
            return Err(Error::DimensionMismatch(format!(
                "line bundle on rank {g} lattice needs a {g}x{g} class and {g} values"
            )));
        }
        if !h.mul(&lattice.basis().to_rational())?.is_integral() {
            return Err(Error::Invalid("class is not integral on the lattice".into()));
        }
        Ok(TropLineBundle { lattice, h, l })
    }

    /// `L(H, l)` on `Λ` itself, with `l` given on the standard basis.
    pub fn on_base(h: RationalMatrix, l: Vec<Rational>) -> Result<Self> {
        let g = l.len();
        TropLineBundle::new(Sublattice::full(g), h, l)
    }

    /// Checks `V^T H` symmetric.
    pub fn validate(&self, torus: &TropTorus) -> Result<()> {
        if torus.rank() != self.rank() {
            return Err(Error::AmbientMismatch);
        }
        if !torus.is_r_symmetric(&self.h)? {
            return Err(Error::Invalid("class is not R-symmetric".into()));
        }
        Ok(())
    }

    pub fn rank(&self) -> usize {
        self.lattice.rank()
    }

    pub fn lattice(&self) -> &Sublattice {
        &self.lattice
    }

    pub fn class(&self) -> &RationalMatrix {
        &self.h
    }

    pub fn l(&self) -> &[Rational] {
        &self.l
    }

    /// `l(λ)` for `λ ∈ Λ'`.
    pub fn eval_l(&self, lambda: &[i64]) -> Result<Rational> {
        let coords = self
            .lattice
            .coordinates(lambda)?
            .ok_or_else(|| Error::NotInLattice(lambda.to_vec()))?;
        Ok(coords.iter().zip(&self.l).map(|(&a, x)| x.mul_int(a)).sum())
    }

    /// Pullback along `sub ⊆ Λ'` without translation.
    pub fn restrict(&self, sub: &Sublattice) -> Result<TropLineBundle> {
        if !sub.is_subset_of(&self.lattice)? {
            return Err(Error::NotCompatible);
        }
        Ok(TropLineBundle {
            lattice: sub.clone(),
            h: self.h.clone(),
            l: restrict_covector(&self.l, &self.lattice, sub)?,
        })
    }

    /// `T_x^{-1} L(H, l) = L(H, l − H(x))` for `x ∈ N_Q`.
    pub fn translate(&self, torus: &TropTorus, x: &[Rational]) -> Result<TropLineBundle> {
        let shift = torus.class_image_of_point_on(&self.h, x, &self.lattice)?;
        Ok(TropLineBundle {
            lattice: self.lattice.clone(),
            h: self.h.clone(),
            l: sub_vec(&self.l, &shift),
        })
    }

    /// Translation by the image of a lattice vector `δ ∈ Λ`.
    pub fn translate_by_lattice(&self, torus: &TropTorus, delta: &[i64]) -> Result<TropLineBundle> {
        let shift = torus.class_image_on(&self.h, delta, &self.lattice)?;
        Ok(TropLineBundle {
            lattice: self.lattice.clone(),
            h: self.h.clone(),
            l: sub_vec(&self.l, &shift),
        })
    }

    /// `L ⊗ L(0, c)` for a covector `c ∈ M_Q`.
    pub fn twist_by_covector(&self, torus: &TropTorus, c: &[Rational]) -> Result<TropLineBundle> {
        let shift = torus.covector_on(c, &self.lattice)?;
        Ok(TropLineBundle {
            lattice: self.lattice.clone(),
            h: self.h.clone(),
            l: add_vec(&self.l, &shift),
        })
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(try_from = "RawVectorBundle", into = "RawVectorBundle")]
pub struct TropVectorBundle {
    base: Sublattice,
    summands: Vec<TropLineBundle>,
}

#[derive(Serialize, Deserialize)]
struct RawVectorBundle {
    summands: Vec<TropLineBundle>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    base: Option<Sublattice>,
}

impl TryFrom<RawVectorBundle> for TropVectorBundle {
    type Error = Error;
    fn try_from(raw: RawVectorBundle) -> Result<Self> {
        let g = raw
            .base
            .as_ref()
            .map(Sublattice::rank)
            .or_else(|| raw.summands.first().map(TropLineBundle::rank))
            .ok_or(Error::EmptyBundle)?;
        let base = raw.base.unwrap_or_else(|| Sublattice::full(g));
        TropVectorBundle::new(base, raw.summands)
    }
}

impl From<TropVectorBundle> for RawVectorBundle {
    fn from(e: TropVectorBundle) -> Self {
        RawVectorBundle {
            base: (!e.base.is_full()).then_some(e.base),
            summands: e.summands,
        }
    }
}

impl TropVectorBundle {
    /// Summands are sorted into canonical order.
    pub fn new(base: Sublattice, mut summands: Vec<TropLineBundle>) -> Result<Self> {
        for s in &summands {
            if s.rank() != base.rank() {
                return Err(Error::AmbientMismatch);
            }
            if !s.lattice.is_subset_of(&base)? {
                return Err(Error::AmbientMismatch);
            }
        }
        summands.sort();
        Ok(TropVectorBundle { base, summands })
    }

    /// The bundle on `N_R / Λ` with the given summands.
    pub fn over_full(g: usize, summands: Vec<TropLineBundle>) -> Result<Self> {
        TropVectorBundle::new(Sublattice::full(g), summands)
    }

    pub fn line(s: TropLineBundle) -> Self {
        let g = s.rank();
        TropVectorBundle {
            base: Sublattice::full(g),
            summands: vec![s],
        }
    }

    pub fn empty(g: usize) -> Self {
        TropVectorBundle {
            base: Sublattice::full(g),
            summands: Vec::new(),
        }
    }

    pub fn validate(&self, torus: &TropTorus) -> Result<()> {
        if torus.rank() != self.dim() {
            return Err(Error::AmbientMismatch);
        }
        self.summands.iter().try_for_each(|s| s.validate(torus))
    }

    pub fn dim(&self) -> usize {
        self.base.rank()
    }

    pub fn base(&self) -> &Sublattice {
        &self.base
    }

    pub fn summands(&self) -> &[TropLineBundle] {
        &self.summands
    }

    /// Degree of the cover of the summand over the base torus.
    pub fn summand_rank(&self, s: &TropLineBundle) -> u64 {
        s.lattice.index() / self.base.index()
    }

    pub fn rank(&self) -> u64 {
        self.summands.iter().map(|s| self.summand_rank(s)).sum()
    }

    fn check_same_base(&self, other: &TropVectorBundle) -> Result<()> {
        if self.base != other.base {
            return Err(Error::AmbientMismatch);
        }
        Ok(())
    }
}

pub fn direct_sum(e1: &TropVectorBundle, e2: &TropVectorBundle) -> Result<TropVectorBundle> {
    e1.check_same_base(e2)?;
    let mut summands = e1.summands.clone();
    summands.extend(e2.summands.iter().cloned());
    TropVectorBundle::new(e1.base.clone(), summands)
}

/// Components of `g_1^{-1} L_1 ⊗ g_2^{-1} L_2` over the fibre product of the two covers.
pub fn tensor_line(
    torus: &TropTorus,
    base: &Sublattice,
    s1: &TropLineBundle,
    s2: &TropLineBundle,
) -> Result<Vec<TropLineBundle>> {
    let meet = s1.lattice.intersect(&s2.lattice)?;
    let join = s1.lattice.sum(&s2.lattice)?;
    let h = s1.h.add(&s2.h)?;
    let l1 = restrict_covector(&s1.l, &s1.lattice, &meet)?;
    let l2 = restrict_covector(&s2.l, &s2.lattice, &meet)?;
    base.coset_representatives(&join)?
        .iter()
        .map(|delta| {
            let twist = torus.class_image_on(&s2.h, delta, &meet)?;
            let l = add_vec(&l1, &sub_vec(&l2, &twist));
            TropLineBundle::new(meet.clone(), h.clone(), l)
        })
        .collect()
}

pub fn tensor(
    torus: &TropTorus,
    e1: &TropVectorBundle,
    e2: &TropVectorBundle,
) -> Result<TropVectorBundle> {
    e1.check_same_base(e2)?;
    let mut summands = Vec::new();
    for s1 in &e1.summands {
        for s2 in &e2.summands {
            summands.extend(tensor_line(torus, &e1.base, s1, s2)?);
        }
    }
    TropVectorBundle::new(e1.base.clone(), summands)
}

/// Pullback along the cover `N_R / sub → N_R / base`.
pub fn pullback(
    torus: &TropTorus,
    e: &TropVectorBundle,
    sub: &Sublattice,
) -> Result<TropVectorBundle> {
    if sub.rank() != e.dim() || !sub.is_subset_of(&e.base)? {
        return Err(Error::AmbientMismatch);
    }
    let mut summands = Vec::new();
    for s in &e.summands {
        let meet = s.lattice.intersect(sub)?;
        let join = s.lattice.sum(sub)?;
        for delta in e.base.coset_representatives(&join)? {
            summands.push(s.translate_by_lattice(torus, &delta)?.restrict(&meet)?);
        }
    }
    TropVectorBundle::new(sub.clone(), summands)
}

/// Pushforward along `N_R / base → N_R / target` for `base ⊆ target`.
pub fn pushforward(e: &TropVectorBundle, target: &Sublattice) -> Result<TropVectorBundle> {
    if target.rank() != e.dim() || !e.base.is_subset_of(target)? {
        return Err(Error::AmbientMismatch);
    }
    TropVectorBundle::new(target.clone(), e.summands.clone())
}

pub fn translate(
    torus: &TropTorus,
    e: &TropVectorBundle,
    x: &[Rational],
) -> Result<TropVectorBundle> {
    let summands = e
        .summands
        .iter()
        .map(|s| s.translate(torus, x))
        .collect::<Result<Vec<_>>>()?;
    TropVectorBundle::new(e.base.clone(), summands)
}

/// Rank-weighted average of the summand classes.
pub fn slope(e: &TropVectorBundle) -> Result<RationalMatrix> {
    if e.summands.is_empty() {
        return Err(Error::EmptyBundle);
    }
    let g = e.dim();
    let mut acc = RationalMatrix::zeros(g, g);
    for s in &e.summands {
        let r = e.summand_rank(s) as i64;
        acc = acc.add(&s.h.scale(&Rational::from_int(r)))?;
    }
    Ok(acc.scale(&Rational::new(1, e.rank() as i64)))
}

pub fn is_homogeneous(e: &TropVectorBundle) -> bool {
    e.summands.iter().all(|s| s.h.is_zero())
}

pub fn is_semi_homogeneous(e: &TropVectorBundle) -> bool {
    e.summands.windows(2).all(|w| w[0].h == w[1].h)
}

/// Whether the pushforwards of two line bundles on the same cover to
/// `N_R / base` are isomorphic.
pub fn iso_pushforward(
    torus: &TropTorus,
    base: &Sublattice,
    s1: &TropLineBundle,
    s2: &TropLineBundle,
) -> Result<bool> {
    if s1.lattice != s2.lattice {
        return Err(Error::LatticeMismatch);
    }
    if s1.h != s2.h {
        return Ok(false);
    }
    let lattice = torus.moduli_lattice(&s1.h, base, &s1.lattice)?;
    lattice.contains(&sub_vec(&s1.l, &s2.l))
}

/// Equivalence after pulling back to the common cover `Λ_1 ∩ Λ_2`.
pub fn equivalent(
    torus: &TropTorus,
    base: &Sublattice,
    s1: &TropLineBundle,
    s2: &TropLineBundle,
) -> Result<bool> {
    let meet = s1.lattice.intersect(&s2.lattice)?;
    equivalent_on(torus, base, s1, s2, &meet)
}

/// Equivalence tested on a chosen common cover `cover ⊆ Λ_1 ∩ Λ_2`.
pub fn equivalent_on(
    torus: &TropTorus,
    base: &Sublattice,
    s1: &TropLineBundle,
    s2: &TropLineBundle,
    cover: &Sublattice,
) -> Result<bool> {
    if s1.rank() != s2.rank() || s1.rank() != torus.rank() {
        return Err(Error::AmbientMismatch);
    }
    if !s1.lattice.is_subset_of(base)? || !s2.lattice.is_subset_of(base)? {
        return Err(Error::AmbientMismatch);
    }
    iso_pushforward(torus, base, &s1.restrict(cover)?, &s2.restrict(cover)?)
}

/// Whether the summands of two bundles over the same base match up to equivalence.
pub fn equivalent_bundles(
    torus: &TropTorus,
    e1: &TropVectorBundle,
    e2: &TropVectorBundle,
) -> Result<bool> {
    e1.check_same_base(e2)?;
    if e1.summands.len() != e2.summands.len() {
        return Ok(false);
    }
    let mut unused: Vec<&TropLineBundle> = e2.summands.iter().collect();
    for s in &e1.summands {
        let mut found = None;
        for (i, t) in unused.iter().enumerate() {
            if equivalent(torus, &e1.base, s, t)? {
                found = Some(i);
                break;
            }
        }
        match found {
            Some(i) => {
                unused.remove(i);
            }
            None => return Ok(false),
        }
    }
    Ok(true)
}

pub fn gamma_compatible(e: &TropVectorBundle, gamma: &Sublattice) -> Result<bool> {
    for s in &e.summands {
        if !gamma.is_subset_of(&s.lattice)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A point of `Hom(Γ, R) / (M + H(Λ))`, stored by its coordinates in `[0,1)^g`
/// with respect to the canonical basis of `M' = M|_Γ + H(Λ)|_Γ`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct ModuliPoint {
    pub gamma: Sublattice,
    #[serde(rename = "H")]
    pub h: RationalMatrix,
    pub coords: Vec<Rational>,
}

impl ModuliPoint {
    /// The canonical covector on the basis of `Γ` representing the point.
    pub fn covector(
        &self,
        torus: &TropTorus,
        base: &Sublattice,
    ) -> Result<Vec<Rational>> {
        torus
            .moduli_lattice(&self.h, base, &self.gamma)?
            .basis()
            .mul_vec(&self.coords)
    }
}

pub fn moduli_point(
    torus: &TropTorus,
    base: &Sublattice,
    s: &TropLineBundle,
    gamma: &Sublattice,
    h: &RationalMatrix,
) -> Result<ModuliPoint> {
    if !gamma.is_subset_of(&s.lattice)? {
        return Err(Error::NotCompatible);
    }
    if &s.h != h {
        return Err(Error::SlopeMismatch);
    }
    let l = restrict_covector(&s.l, &s.lattice, gamma)?;
    let lattice = torus.moduli_lattice(h, base, gamma)?;
    let coords = lattice
        .basis()
        .solve_vec(&l)?
        .ok_or(Error::SingularLattice)?
        .iter()
        .map(Rational::fract_positive)
        .collect();
    Ok(ModuliPoint {
        gamma: gamma.clone(),
        h: h.clone(),
        coords,
    })
}

/// The lattice `M' = M|_Γ + H(base)|_Γ` in which moduli coordinates are taken.
pub fn moduli_lattice(
    torus: &TropTorus,
    base: &Sublattice,
    gamma: &Sublattice,
    h: &RationalMatrix,
) -> Result<RationalLattice> {
    torus.moduli_lattice(h, base, gamma)
}

/// An unordered `k`-tuple of moduli points with common `Γ` and class.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct SymPoint {
    pub gamma: Sublattice,
    #[serde(rename = "H")]
    pub h: RationalMatrix,
    pub points: Vec<Vec<Rational>>,
}

pub fn sym_point(points: &[ModuliPoint]) -> Result<SymPoint> {
    let first = points.first().ok_or(Error::EmptyBundle)?;
    if points
        .iter()
        .any(|p| p.gamma != first.gamma || p.h != first.h)
    {
        return Err(Error::MixedClasses);
    }
    let mut coords: Vec<Vec<Rational>> = points.iter().map(|p| p.coords.clone()).collect();
    coords.sort();
    Ok(SymPoint {
        gamma: first.gamma.clone(),
        h: first.h.clone(),
        points: coords,
    })
}
