//! Representations `Λ → GL_r(T) = S_r ⋉ R^r` and their decomposition into
//! indecomposables, which are induced from characters of finite-index
//! sublattices.

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::bundle::{TropLineBundle, TropVectorBundle};
use crate::error::{Error, Result};
use crate::lattice::Sublattice;
use crate::rational::{Rational, RationalMatrix};

/// The min-plus matrix with entry `d_i` at `(i, σ^{-1}(i))` and `∞` elsewhere,
/// acting by `(Ax)_i = d_i + x_{σ^{-1}(i)}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
#[serde(try_from = "RawElement", into = "RawElement")]
pub struct TropGlElement {
    perm: Vec<usize>,
    d: Vec<Rational>,
}

#[derive(Serialize, Deserialize)]
struct RawElement {
    perm: Vec<usize>,
    d: Vec<Rational>,
}

impl TryFrom<RawElement> for TropGlElement {
    type Error = Error;
    fn try_from(raw: RawElement) -> Result<Self> {
        if raw.perm.contains(&0) {
            return Err(Error::Invalid("permutation entries are 1-based".into()));
        }
        TropGlElement::new(raw.perm.iter().map(|i| i - 1).collect(), raw.d)
    }
}

impl From<TropGlElement> for RawElement {
    fn from(a: TropGlElement) -> Self {
        RawElement {
            perm: a.perm.iter().map(|i| i + 1).collect(),
            d: a.d,
        }
    }
}

impl TropGlElement {
    /// `perm[i] = σ(i)` (0-based).
    pub fn new(perm: Vec<usize>, d: Vec<Rational>) -> Result<Self> {
        let r = perm.len();
        if d.len() != r {
            return Err(Error::SizeMismatch);
        }
        let mut seen = vec![false; r];
        for &p in &perm {
            if p >= r || seen[p] {
                return Err(Error::Invalid(format!("{perm:?} is not a permutation")));
            }
            seen[p] = true;
        }
        Ok(TropGlElement { perm, d })
    }

    pub fn identity(r: usize) -> Self {
        TropGlElement {
            perm: (0..r).collect(),
            d: vec![Rational::zero(); r],
        }
    }

    pub fn diagonal(d: Vec<Rational>) -> Self {
        TropGlElement {
            perm: (0..d.len()).collect(),
            d,
        }
    }

    pub fn size(&self) -> usize {
        self.perm.len()
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn translation(&self) -> &[Rational] {
        &self.d
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| i == p) && self.d.iter().all(Rational::is_zero)
    }

    fn inverse_perm(&self) -> Vec<usize> {
        let mut inv = vec![0; self.size()];
        for (i, &p) in self.perm.iter().enumerate() {
            inv[p] = i;
        }
        inv
    }

    /// `(σ·v)_i = v_{σ^{-1}(i)}`.
    fn permute(&self, v: &[Rational]) -> Vec<Rational> {
        self.inverse_perm().iter().map(|&j| v[j].clone()).collect()
    }

    /// `(σ, d) ∘ (σ', d') = (σσ', d + σ·d')`.
    pub fn compose(&self, other: &TropGlElement) -> Result<TropGlElement> {
        if self.size() != other.size() {
            return Err(Error::SizeMismatch);
        }
        let perm = other.perm.iter().map(|&j| self.perm[j]).collect();
        let d = self
            .d
            .iter()
            .zip(self.permute(&other.d))
            .map(|(a, b)| a + &b)
            .collect();
        Ok(TropGlElement { perm, d })
    }

    pub fn inverse(&self) -> TropGlElement {
        let perm = self.inverse_perm();
        let inv = TropGlElement {
            perm,
            d: vec![Rational::zero(); self.size()],
        };
        let d = inv.permute(&self.d).into_iter().map(|x| -x).collect();
        TropGlElement { d, ..inv }
    }

    pub fn pow(&self, n: i64) -> TropGlElement {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut acc = TropGlElement::identity(self.size());
        for _ in 0..n.unsigned_abs() {
            acc = acc.compose(&base).expect("same size");
        }
        acc
    }

    /// `(Ax)_i = d_i + x_{σ^{-1}(i)}`.
    pub fn apply(&self, x: &[Rational]) -> Result<Vec<Rational>> {
        if x.len() != self.size() {
            return Err(Error::SizeMismatch);
        }
        Ok(self
            .d
            .iter()
            .zip(self.permute(x))
            .map(|(a, b)| a + &b)
            .collect())
    }

    /// Entries with `None` for `∞`.
    pub fn to_matrix(&self) -> Vec<Vec<Option<Rational>>> {
        let inv = self.inverse_perm();
        (0..self.size())
            .map(|i| {
                (0..self.size())
                    .map(|j| (j == inv[i]).then(|| self.d[i].clone()))
                    .collect()
            })
            .collect()
    }

    pub fn from_matrix(m: &[Vec<Option<Rational>>]) -> Result<TropGlElement> {
        let r = m.len();
        if m.iter().any(|row| row.len() != r) {
            return Err(Error::SizeMismatch);
        }
        let mut perm = vec![usize::MAX; r];
        let mut d = vec![Rational::zero(); r];
        for (i, row) in m.iter().enumerate() {
            let finite: Vec<usize> = (0..r).filter(|&j| row[j].is_some()).collect();
            let [j] = finite[..] else {
                return Err(Error::NotInvertible);
            };
            if perm[j] != usize::MAX {
                return Err(Error::NotInvertible);
            }
            perm[j] = i;
            d[i] = row[j].clone().expect("finite");
        }
        TropGlElement::new(perm, d)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(try_from = "RawRepresentation", into = "RawRepresentation")]
pub struct TropRepresentation {
    r: usize,
    images: Vec<TropGlElement>,
}

#[derive(Serialize, Deserialize)]
struct RawRepresentation {
    r: usize,
    images: Vec<TropGlElement>,
}

impl TryFrom<RawRepresentation> for TropRepresentation {
    type Error = Error;
    fn try_from(raw: RawRepresentation) -> Result<Self> {
        TropRepresentation::new(raw.r, raw.images)
    }
}

impl From<TropRepresentation> for RawRepresentation {
    fn from(rep: TropRepresentation) -> Self {
        RawRepresentation {
            r: rep.r,
            images: rep.images,
        }
    }
}

impl TropRepresentation {
    /// `images[j]` is the image of the `j`-th basis vector of `Λ`.
    pub fn new(r: usize, images: Vec<TropGlElement>) -> Result<Self> {
        if images.is_empty() {
            return Err(Error::Invalid("representation needs at least one generator".into()));
        }
        if images.iter().any(|a| a.size() != r) {
            return Err(Error::SizeMismatch);
        }
        Ok(TropRepresentation { r, images })
    }

    pub fn diagonal(g: usize, characters: &[Vec<Rational>]) -> Result<Self> {
        let images = (0..g)
            .map(|j| TropGlElement::diagonal(characters.iter().map(|c| c[j].clone()).collect()))
            .collect();
        TropRepresentation::new(characters.len(), images)
    }

    pub fn trivial(g: usize, r: usize) -> Self {
        TropRepresentation {
            r,
            images: vec![TropGlElement::identity(r); g],
        }
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn g(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[TropGlElement] {
        &self.images
    }

    pub fn check_commuting(&self) -> bool {
        self.images.iter().enumerate().all(|(i, a)| {
            self.images[i + 1..]
                .iter()
                .all(|b| a.compose(b).ok() == b.compose(a).ok())
        })
    }

    fn require_commuting(&self) -> Result<()> {
        if self.check_commuting() {
            Ok(())
        } else {
            Err(Error::NotCommuting)
        }
    }

    /// `ρ(λ)` for a lattice vector.
    pub fn evaluate(&self, lambda: &[i64]) -> Result<TropGlElement> {
        if lambda.len() != self.g() {
            return Err(Error::DimensionMismatch("lattice vector of wrong length".into()));
        }
        self.images
            .iter()
            .zip(lambda)
            .try_fold(TropGlElement::identity(self.r), |acc, (a, &k)| {
                acc.compose(&a.pow(k))
            })
    }

    /// `c ρ c^{-1}`.
    pub fn conjugate(&self, c: &TropGlElement) -> Result<TropRepresentation> {
        let c_inv = c.inverse();
        let images = self
            .images
            .iter()
            .map(|a| c.compose(a)?.compose(&c_inv))
            .collect::<Result<Vec<_>>>()?;
        TropRepresentation::new(self.r, images)
    }

    pub fn direct_sum(&self, other: &TropRepresentation) -> Result<TropRepresentation> {
        if self.g() != other.g() {
            return Err(Error::DimensionMismatch("representations of different lattices".into()));
        }
        let shift = self.r;
        let images = self
            .images
            .iter()
            .zip(&other.images)
            .map(|(a, b)| {
                let mut perm = a.perm.clone();
                perm.extend(b.perm.iter().map(|p| p + shift));
                let mut d = a.d.clone();
                d.extend(b.d.iter().cloned());
                TropGlElement::new(perm, d)
            })
            .collect::<Result<Vec<_>>>()?;
        TropRepresentation::new(self.r + other.r, images)
    }
}

/// One orbit of the permutation action with its stabilizer and character.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct OrbitComponent {
    /// Orbit elements, 1-based and sorted; the first is the base point.
    pub orbit: Vec<usize>,
    pub lattice: Sublattice,
    /// Values of the character on the HNF basis of `lattice`.
    pub l: Vec<Rational>,
}

/// A pair `(Λ', l)` up to which an indecomposable representation is determined.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct IndecomposablePiece {
    pub lattice: Sublattice,
    pub l: Vec<Rational>,
}

pub fn decompose_rep(rho: &TropRepresentation) -> Result<Vec<OrbitComponent>> {
    rho.require_commuting()?;
    let g = rho.g();
    let r = rho.r();
    let mut assigned = vec![false; r];
    let mut out = Vec::new();
    for p in 0..r {
        if assigned[p] {
            continue;
        }
        // Breadth-first paths μ_q with σ_{μ_q}(p) = q.
        let mut paths: BTreeMap<usize, Vec<i64>> = BTreeMap::new();
        paths.insert(p, vec![0; g]);
        let mut queue = VecDeque::from([p]);
        while let Some(q) = queue.pop_front() {
            for (j, a) in rho.images.iter().enumerate() {
                let next = a.perm[q];
                if !paths.contains_key(&next) {
                    let mut path = paths[&q].clone();
                    path[j] += 1;
                    paths.insert(next, path);
                    queue.push_back(next);
                }
            }
        }
        let mut schreier = Vec::new();
        for (&q, path) in &paths {
            assigned[q] = true;
            for (j, a) in rho.images.iter().enumerate() {
                let target = &paths[&a.perm[q]];
                let v: Vec<i64> = (0..g)
                    .map(|k| path[k] + i64::from(k == j) - target[k])
                    .collect();
                schreier.push(v);
            }
        }
        let lattice = Sublattice::from_generators(g, &schreier)?;
        if lattice.index() != paths.len() as u64 {
            return Err(Error::Inconsistent(format!(
                "stabilizer index {} differs from orbit size {}",
                lattice.index(),
                paths.len()
            )));
        }
        let l = lattice
            .basis_vectors()
            .iter()
            .map(|v| {
                let a = rho.evaluate(v)?;
                if a.perm[p] != p {
                    return Err(Error::Inconsistent("stabilizer element moves base point".into()));
                }
                Ok(a.d[p].clone())
            })
            .collect::<Result<Vec<_>>>()?;
        out.push(OrbitComponent {
            orbit: paths.keys().map(|q| q + 1).collect(),
            lattice,
            l,
        });
    }
    Ok(out)
}

pub fn canonical_form(rho: &TropRepresentation) -> Result<Vec<IndecomposablePiece>> {
    let mut pieces: Vec<IndecomposablePiece> = decompose_rep(rho)?
        .into_iter()
        .map(|c| IndecomposablePiece {
            lattice: c.lattice,
            l: c.l,
        })
        .collect();
    pieces.sort();
    Ok(pieces)
}

/// The homogeneous bundle `⊕_O f_{O*} L(0, l_O)`.
pub fn eta_trop(rho: &TropRepresentation) -> Result<TropVectorBundle> {
    let g = rho.g();
    let summands = decompose_rep(rho)?
        .into_iter()
        .map(|c| TropLineBundle::new(c.lattice, RationalMatrix::zeros(g, g), c.l))
        .collect::<Result<Vec<_>>>()?;
    TropVectorBundle::over_full(g, summands)
}

pub fn stratum(rho: &TropRepresentation) -> Result<Vec<Sublattice>> {
    let mut lattices: Vec<Sublattice> = decompose_rep(rho)?.into_iter().map(|c| c.lattice).collect();
    lattices.sort();
    Ok(lattices)
}

/// The representation induced from the character `l` of `lattice ⊆ Λ`:
/// slots are the cosets of `Λ / lattice`, with the zero coset as base point.
pub fn induced_representation(lattice: &Sublattice, l: &[Rational]) -> Result<TropRepresentation> {
    let g = lattice.rank();
    let full = Sublattice::full(g);
    let reps = full.coset_representatives(lattice)?;
    let slot = |v: &[i64]| -> Result<usize> {
        let red = lattice.reduce(v)?;
        reps.binary_search(&red)
            .map_err(|_| Error::Inconsistent("coset representative not found".into()))
    };
    let character = |v: &[i64]| -> Result<Rational> {
        let coords = lattice
            .coordinates(v)?
            .ok_or_else(|| Error::NotInLattice(v.to_vec()))?;
        Ok(coords.iter().zip(l).map(|(&a, x)| x.mul_int(a)).sum())
    };
    let zero = slot(&vec![0; g])?;
    let mut order: Vec<usize> = (0..reps.len()).collect();
    order.swap(0, zero);
    let images = (0..g)
        .map(|j| {
            let mut perm = vec![0; reps.len()];
            let mut d = vec![Rational::zero(); reps.len()];
            for (a, &ra) in order.iter().enumerate() {
                let mut w = reps[ra].clone();
                w[j] += 1;
                let rb = slot(&w)?;
                let b = order.iter().position(|&x| x == rb).expect("slot exists");
                let diff: Vec<i64> = w.iter().zip(&reps[rb]).map(|(x, y)| x - y).collect();
                perm[a] = b;
                d[b] = character(&diff)?;
            }
            TropGlElement::new(perm, d)
        })
        .collect::<Result<Vec<_>>>()?;
    TropRepresentation::new(reps.len(), images)
}

/// A representation whose associated bundle is the given homogeneous bundle.
pub fn representation_of_bundle(e: &TropVectorBundle) -> Result<TropRepresentation> {
    if !e.base().is_full() {
        return Err(Error::Invalid("bundle must live on the base torus".into()));
    }
    if e.summands().iter().any(|s| !s.class().is_zero()) {
        return Err(Error::Invalid("bundle is not homogeneous".into()));
    }
    let mut pieces = e
        .summands()
        .iter()
        .map(|s| induced_representation(s.lattice(), s.l()));
    let first = pieces.next().ok_or(Error::EmptyBundle)??;
    pieces.try_fold(first, |acc, rep| acc.direct_sum(&rep?))
}
