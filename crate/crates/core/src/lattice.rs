//! Integer normal forms and arithmetic of finite-index sublattices of `Z^g`.
//!
//! Lattices are stored by a column basis in Hermite normal form using one
//! fixed convention: lower triangular, positive diagonal, and every entry to
//! the left of a pivot reduced into `[0, pivot)`. Two lattices are equal iff
//! their stored bases are equal.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::{common_denominator, Rational, RationalMatrix};

/// Default cap on the order of a finite group handed to subgroup enumeration.
pub const DEFAULT_ENUMERATION_BOUND: u64 = 10_000;

/// Dense row-major integer matrix.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("matrix rows have unequal lengths".into()));
        }
        Ok(IntMatrix {
            rows: r,
            cols: c,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    /// Builds a `dim × cols.len()` matrix whose columns are `cols`.
    pub fn from_columns(dim: usize, cols: &[Vec<i64>]) -> Result<Self> {
        if cols.iter().any(|c| c.len() != dim) {
            return Err(Error::DimensionMismatch("generator of wrong length".into()));
        }
        let mut m = Self::zeros(dim, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for (i, &x) in c.iter().enumerate() {
                m[(i, j)] = x;
            }
        }
        Ok(m)
    }

    pub fn diagonal(entries: &[i64]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &d) in entries.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn columns(&self) -> Vec<Vec<i64>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows)
            .map(|i| self.data[i * self.cols..(i + 1) * self.cols].to_vec())
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mul(&self, rhs: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                out[(i, j)] = (0..self.cols).map(|k| self[(i, k)] * rhs[(k, j)]).sum();
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[i64]) -> Result<Vec<i64>> {
        if self.cols != v.len() {
            return Err(Error::DimensionMismatch(format!(
                "cannot apply {}x{} matrix to vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| (0..self.cols).map(|k| self[(i, k)] * v[k]).sum())
            .collect())
    }

    pub fn to_rational(&self) -> RationalMatrix {
        RationalMatrix::from_fn(self.rows, self.cols, |i, j| Rational::from_int(self[(i, j)]))
    }

    pub fn determinant(&self) -> Result<i64> {
        let det = self.to_rational().determinant()?;
        det.to_i64()
            .ok_or_else(|| Error::Inconsistent("integer determinant overflow".into()))
    }

    /// Inverse of a unimodular matrix.
    pub fn unimodular_inverse(&self) -> Result<IntMatrix> {
        let inv = self
            .to_rational()
            .inverse()?
            .ok_or(Error::SingularLattice)?;
        rational_to_int(&inv)
            .ok_or_else(|| Error::Invalid("matrix is not unimodular".into()))
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = i64;
    fn index(&self, (i, j): (usize, usize)) -> &i64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut i64 {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.to_rows()).finish()
    }
}

impl Serialize for IntMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<i64>>::deserialize(deserializer)?;
        IntMatrix::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

/// Converts an integral rational matrix; `None` if any entry is fractional.
pub fn rational_to_int(m: &RationalMatrix) -> Option<IntMatrix> {
    let mut out = IntMatrix::zeros(m.rows(), m.cols());
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            out[(i, j)] = m[(i, j)].to_i64()?;
        }
    }
    Some(out)
}

/// Extended gcd: returns `(g, x, y)` with `g = a·x + b·y`, `g >= 0`.
pub fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i64, 0i64);
    let (mut old_t, mut t) = (0i64, 1i64);
    while r != 0 {
        let q = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

/// Dense `i128` matrix used as scratch space during echelon reduction.
struct Wide {
    rows: usize,
    cols: usize,
    data: Vec<i128>,
}

impl Wide {
    fn from_int(m: &IntMatrix) -> Self {
        Wide {
            rows: m.rows,
            cols: m.cols,
            data: m.data.iter().map(|&x| i128::from(x)).collect(),
        }
    }

    fn identity(n: usize) -> Self {
        let mut data = vec![0; n * n];
        for i in 0..n {
            data[i * n + i] = 1;
        }
        Wide { rows: n, cols: n, data }
    }

    fn at(&self, i: usize, j: usize) -> i128 {
        self.data[i * self.cols + j]
    }

    fn set(&mut self, i: usize, j: usize, x: i128) {
        self.data[i * self.cols + j] = x;
    }

    fn combine_cols(&mut self, a: usize, b: usize, x: i128, y: i128, u: i128, v: i128) {
        for i in 0..self.rows {
            let (ca, cb) = (self.at(i, a), self.at(i, b));
            self.set(i, a, x * ca + y * cb);
            self.set(i, b, u * ca + v * cb);
        }
    }

    fn sub_col(&mut self, dst: usize, src: usize, k: i128) {
        if k == 0 {
            return;
        }
        for i in 0..self.rows {
            let x = self.at(i, dst) - k * self.at(i, src);
            self.set(i, dst, x);
        }
    }

    fn combine_rows(&mut self, a: usize, b: usize, x: i128, y: i128, u: i128, v: i128) {
        for j in 0..self.cols {
            let (ra, rb) = (self.at(a, j), self.at(b, j));
            self.set(a, j, x * ra + y * rb);
            self.set(b, j, u * ra + v * rb);
        }
    }

    fn sub_row(&mut self, dst: usize, src: usize, k: i128) {
        if k == 0 {
            return;
        }
        for j in 0..self.cols {
            let x = self.at(dst, j) - k * self.at(src, j);
            self.set(dst, j, x);
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            let x = -self.at(r, j);
            self.set(r, j, x);
        }
    }

    fn negate_col(&mut self, c: usize) {
        for i in 0..self.rows {
            let x = -self.at(i, c);
            self.set(i, c, x);
        }
    }

    fn narrow(&self) -> Result<IntMatrix> {
        let data = self
            .data
            .iter()
            .map(|&x| i64::try_from(x))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| Error::Invalid("lattice entries exceed 64 bits".into()))?;
        Ok(IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }
}

fn ext_gcd_wide(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

/// Result of column echelon reduction `m·U = H`.
struct ColumnEchelon {
    h: IntMatrix,
    u: Wide,
    rank: usize,
}

/// Column-style Hermite reduction of an arbitrary integer matrix.
///
/// The first `rank` columns of `h` form the canonical echelon basis of the
/// column span; the remaining columns are zero and the matching columns of
/// `u` span the integer kernel of `m`.
fn column_echelon(m: &IntMatrix) -> Result<ColumnEchelon> {
    let mut h = Wide::from_int(m);
    let mut u = Wide::identity(m.cols());
    let mut c = 0;
    for r in 0..h.rows {
        if c == h.cols {
            break;
        }
        for j in c + 1..h.cols {
            let b = h.at(r, j);
            if b == 0 {
                continue;
            }
            let a = h.at(r, c);
            if a != 0 && b % a == 0 {
                h.sub_col(j, c, b / a);
                u.sub_col(j, c, b / a);
                continue;
            }
            let (g, x, y) = ext_gcd_wide(a, b);
            let (p, q) = (a / g, b / g);
            // [x y; -q p] has determinant x·p + y·q = 1.
            h.combine_cols(c, j, x, y, -q, p);
            u.combine_cols(c, j, x, y, -q, p);
        }
        if h.at(r, c) == 0 {
            continue;
        }
        if h.at(r, c) < 0 {
            h.negate_col(c);
            u.negate_col(c);
        }
        let pivot = h.at(r, c);
        for j in 0..c {
            let k = h.at(r, j).div_euclid(pivot);
            h.sub_col(j, c, k);
            u.sub_col(j, c, k);
        }
        c += 1;
    }
    Ok(ColumnEchelon {
        h: h.narrow()?,
        u,
        rank: c,
    })
}

/// Hermite normal form of a matrix with full column rank.
///
/// Returns `(H, U)` with `H = m·U`, `U` unimodular and `H` the canonical
/// lower-echelon basis of the column span.
pub fn hnf(m: &IntMatrix) -> Result<(IntMatrix, IntMatrix)> {
    let ech = column_echelon(m)?;
    if ech.rank < m.cols() {
        return Err(Error::RankDeficient);
    }
    Ok((ech.h, ech.u.narrow()?))
}

/// Canonical basis (as columns) of the subgroup of `Z^dim` spanned by `gens`.
///
/// Generators are added one at a time; once the span has full rank each new
/// vector is first reduced against the triangular basis, which keeps entries small.
pub fn span_basis(dim: usize, gens: &[Vec<i64>]) -> Result<IntMatrix> {
    let mut basis: Vec<Vec<i64>> = Vec::new();
    for v in gens {
        if v.len() != dim {
            return Err(Error::DimensionMismatch("generator of wrong length".into()));
        }
        let mut v = v.clone();
        if basis.len() == dim {
            for (r, col) in basis.iter().enumerate() {
                let k = v[r].div_euclid(col[r]);
                if k != 0 {
                    for (x, &c) in v[r..].iter_mut().zip(&col[r..]) {
                        *x -= k * c;
                    }
                }
            }
            if v.iter().all(|&x| x == 0) {
                continue;
            }
        }
        basis.push(v);
        let m = IntMatrix::from_columns(dim, &basis)?;
        let ech = column_echelon(&m)?;
        basis = (0..ech.rank).map(|j| ech.h.column(j)).collect();
    }
    IntMatrix::from_columns(dim, &basis)
}

/// Integer kernel basis of `m` (columns).
pub fn integer_kernel(m: &IntMatrix) -> Result<IntMatrix> {
    let cols = kernel_wide(m)?;
    let mut out = IntMatrix::zeros(m.cols(), cols.len());
    for (j, col) in cols.iter().enumerate() {
        for (i, &x) in col.iter().enumerate() {
            out[(i, j)] = i64::try_from(x)
                .map_err(|_| Error::Invalid("kernel entries exceed 64 bits".into()))?;
        }
    }
    Ok(out)
}

fn kernel_wide(m: &IntMatrix) -> Result<Vec<Vec<i128>>> {
    let ech = column_echelon(m)?;
    Ok((ech.rank..m.cols())
        .map(|j| (0..m.cols()).map(|i| ech.u.at(i, j)).collect())
        .collect())
}

/// Smith normal form: returns `(U, D, W)` with `U·m·W = D`, `D` diagonal
/// with nonnegative entries `d_1 | d_2 | …`, and `U`, `W` unimodular.
pub fn snf(m: &IntMatrix) -> Result<(IntMatrix, IntMatrix, IntMatrix)> {
    let mut d = Wide::from_int(m);
    let mut u = Wide::identity(m.rows());
    let mut w = Wide::identity(m.cols());
    let n = m.rows().min(m.cols());
    let mut t = 0;
    while t < n {
        // Pivot: nonzero entry of least absolute value in the trailing block.
        let mut best: Option<(usize, usize)> = None;
        for i in t..d.rows {
            for j in t..d.cols {
                if d.at(i, j) != 0 && best.is_none_or(|(bi, bj)| d.at(i, j).abs() < d.at(bi, bj).abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        d.swap_rows(t, pi);
        u.swap_rows(t, pi);
        d.swap_cols(t, pj);
        w.swap_cols(t, pj);

        loop {
            let mut changed = false;
            for j in t + 1..d.cols {
                let b = d.at(t, j);
                if b == 0 {
                    continue;
                }
                let a = d.at(t, t);
                if b % a == 0 {
                    d.sub_col(j, t, b / a);
                    w.sub_col(j, t, b / a);
                    continue;
                }
                let (g, x, y) = ext_gcd_wide(a, b);
                let (p, q) = (a / g, b / g);
                d.combine_cols(t, j, x, y, -q, p);
                w.combine_cols(t, j, x, y, -q, p);
                changed = true;
            }
            for i in t + 1..d.rows {
                let b = d.at(i, t);
                if b == 0 {
                    continue;
                }
                let a = d.at(t, t);
                if b % a == 0 {
                    d.sub_row(i, t, b / a);
                    u.sub_row(i, t, b / a);
                    continue;
                }
                let (g, x, y) = ext_gcd_wide(a, b);
                let (p, q) = (a / g, b / g);
                d.combine_rows(t, i, x, y, -q, p);
                u.combine_rows(t, i, x, y, -q, p);
                changed = true;
            }
            if changed {
                continue;
            }
            // Pivot must divide the whole trailing block; fold offenders in.
            let a = d.at(t, t);
            let offender = (t + 1..d.rows)
                .flat_map(|i| (t + 1..d.cols).map(move |j| (i, j)))
                .find(|&(i, j)| d.at(i, j) % a != 0);
            match offender {
                Some((i, _)) => {
                    d.sub_row(t, i, -1);
                    u.sub_row(t, i, -1);
                }
                None => break,
            }
        }
        if d.at(t, t) < 0 {
            d.negate_row(t);
            u.negate_row(t);
        }
        t += 1;
    }
    Ok((u.narrow()?, d.narrow()?, w.narrow()?))
}

/// A finite-index sublattice of `Z^g`, stored by its canonical HNF basis.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sublattice {
    basis: IntMatrix,
}

impl Sublattice {
    /// Lattice spanned by `gens`; fails unless the span has full rank `dim`.
    pub fn from_generators(dim: usize, gens: &[Vec<i64>]) -> Result<Self> {
        let basis = span_basis(dim, gens)?;
        if basis.cols() != dim {
            return Err(Error::RankDeficient);
        }
        Ok(Sublattice { basis })
    }

    /// Lattice whose basis is the columns of `m` (any basis, not necessarily HNF).
    pub fn from_basis(m: &IntMatrix) -> Result<Self> {
        if m.rows() != m.cols() {
            return Err(Error::DimensionMismatch("lattice basis must be square".into()));
        }
        let (h, _) = hnf(m)?;
        Ok(Sublattice { basis: h })
    }

    pub fn full(dim: usize) -> Self {
        Sublattice {
            basis: IntMatrix::identity(dim),
        }
    }

    pub fn scaled(dim: usize, k: i64) -> Self {
        assert!(k > 0, "scale must be positive");
        Sublattice {
            basis: IntMatrix::diagonal(&vec![k; dim]),
        }
    }

    pub fn rank(&self) -> usize {
        self.basis.rows()
    }

    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    pub fn basis_vectors(&self) -> Vec<Vec<i64>> {
        self.basis.columns()
    }

    /// `[Z^g : self]`.
    pub fn index(&self) -> u64 {
        (0..self.rank()).map(|i| self.basis[(i, i)] as u64).product()
    }

    pub fn is_full(&self) -> bool {
        self.index() == 1
    }

    /// Coordinates of `v` in the stored basis, if `v` lies in the lattice.
    pub fn coordinates(&self, v: &[i64]) -> Result<Option<Vec<i64>>> {
        let g = self.rank();
        if v.len() != g {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} in rank {g} lattice",
                v.len()
            )));
        }
        // Forward substitution; the basis is lower triangular.
        let mut x = vec![0i64; g];
        for i in 0..g {
            let rest: i64 = (0..i).map(|j| self.basis[(i, j)] * x[j]).sum();
            let num = v[i] - rest;
            let piv = self.basis[(i, i)];
            if num % piv != 0 {
                return Ok(None);
            }
            x[i] = num / piv;
        }
        Ok(Some(x))
    }

    pub fn contains(&self, v: &[i64]) -> Result<bool> {
        Ok(self.coordinates(v)?.is_some())
    }

    pub fn is_subset_of(&self, other: &Sublattice) -> Result<bool> {
        self.check_rank(other)?;
        for v in self.basis_vectors() {
            if !other.contains(&v)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Matrix whose columns are the coordinates of `sub`'s basis in `self`'s basis.
    pub fn relative_basis(&self, sub: &Sublattice) -> Result<IntMatrix> {
        self.check_rank(sub)?;
        let cols = sub
            .basis_vectors()
            .iter()
            .map(|v| self.coordinates(v)?.ok_or(Error::NotContained))
            .collect::<Result<Vec<_>>>()?;
        IntMatrix::from_columns(self.rank(), &cols)
    }

    pub fn intersect(&self, other: &Sublattice) -> Result<Sublattice> {
        self.check_rank(other)?;
        let g = self.rank();
        // Kernel of [A | -B] gives pairs (x, y) with A·x = B·y.
        let mut joint = IntMatrix::zeros(g, 2 * g);
        for i in 0..g {
            for j in 0..g {
                joint[(i, j)] = self.basis[(i, j)];
                joint[(i, g + j)] = -other.basis[(i, j)];
            }
        }
        // Both lattices contain d·Z^g, so generators are reduced mod d.
        let d = i128::from(num_integer::lcm(self.index(), other.index()));
        let mut gens: Vec<Vec<i64>> = kernel_wide(&joint)?
            .iter()
            .map(|x| {
                (0..g)
                    .map(|i| {
                        let v: i128 = (0..g).map(|j| i128::from(self.basis[(i, j)]) * x[j]).sum();
                        v.rem_euclid(d) as i64
                    })
                    .collect()
            })
            .collect();
        gens.extend((0..g).map(|i| (0..g).map(|j| if i == j { d as i64 } else { 0 }).collect()));
        Sublattice::from_generators(g, &gens)
    }

    pub fn sum(&self, other: &Sublattice) -> Result<Sublattice> {
        self.check_rank(other)?;
        let mut gens = self.basis_vectors();
        gens.extend(other.basis_vectors());
        Sublattice::from_generators(self.rank(), &gens)
    }

    /// The finite group `self / sub`.
    pub fn quotient(&self, sub: &Sublattice) -> Result<FiniteAbelianGroup> {
        FiniteAbelianGroup::quotient(self, sub)
    }

    /// Canonical coset representative of `v` modulo this lattice: the unique
    /// `v - B·k` whose coordinates in the HNF basis lie in `[0,1)^g`.
    pub fn reduce(&self, v: &[i64]) -> Result<Vec<i64>> {
        let v: Vec<Rational> = v.iter().map(|&x| Rational::from_int(x)).collect();
        let r = reduce_mod_lattice(&v, &self.basis.to_rational())?;
        Ok(r.iter().map(|x| x.to_i64().expect("integral")).collect())
    }

    /// Canonical coset representatives of `self / sub`, sorted.
    pub fn coset_representatives(&self, sub: &Sublattice) -> Result<Vec<Vec<i64>>> {
        let q = self.quotient(sub)?;
        let mut reps: Vec<Vec<i64>> = q
            .elements()
            .iter()
            .map(|c| sub.reduce(&q.lift(c)))
            .collect::<Result<_>>()?;
        reps.sort();
        reps.dedup();
        if reps.len() as u64 != q.order() {
            return Err(Error::Inconsistent("coset enumeration lost elements".into()));
        }
        Ok(reps)
    }

    fn check_rank(&self, other: &Sublattice) -> Result<()> {
        if self.rank() != other.rank() {
            return Err(Error::DimensionMismatch(format!(
                "lattices of rank {} and {}",
                self.rank(),
                other.rank()
            )));
        }
        Ok(())
    }
}

impl fmt::Debug for Sublattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Sublattice{:?}", self.basis)
    }
}

impl Serialize for Sublattice {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.basis.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Sublattice {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let m = IntMatrix::deserialize(deserializer)?;
        Sublattice::from_basis(&m).map_err(serde::de::Error::custom)
    }
}

/// Unique representative of `v` modulo the lattice spanned by the columns of
/// `basis` whose coordinates in that basis lie in `[0,1)^g`.
pub fn reduce_mod_lattice(v: &[Rational], basis: &RationalMatrix) -> Result<Vec<Rational>> {
    if !basis.is_square() || basis.rows() != v.len() {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} modulo {}x{} lattice",
            v.len(),
            basis.rows(),
            basis.cols()
        )));
    }
    let coords = basis.solve_vec(v)?.ok_or(Error::SingularLattice)?;
    let frac: Vec<Rational> = coords.iter().map(Rational::fract_positive).collect();
    basis.mul_vec(&frac)
}

/// A full-rank lattice in `Q^g` (e.g. `M + H(Λ)`), stored by a canonical basis.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalLattice {
    basis: RationalMatrix,
}

impl RationalLattice {
    /// Lattice generated by `gens`; the span must have full rank.
    pub fn from_generators(dim: usize, gens: &[Vec<Rational>]) -> Result<Self> {
        let den = common_denominator(gens.iter().flatten());
        let scaled = gens
            .iter()
            .map(|v| {
                v.iter()
                    .map(|x| {
                        let y = x * &Rational::from(den.clone());
                        y.to_i64()
                            .ok_or_else(|| Error::Invalid("lattice entry too large".into()))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let ib = span_basis(dim, &scaled)?;
        if ib.cols() != dim {
            return Err(Error::RankDeficient);
        }
        // HNF commutes with positive scaling, so dividing back is canonical.
        let inv = Rational::from_big(BigInt::one(), den);
        let basis = ib.to_rational().scale(&inv);
        Ok(RationalLattice { basis })
    }

    pub fn basis(&self) -> &RationalMatrix {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.rows()
    }

    /// Absolute determinant (covolume).
    pub fn covolume(&self) -> Rational {
        self.basis.determinant().expect("square").abs()
    }

    pub fn contains(&self, v: &[Rational]) -> Result<bool> {
        let coords = self.basis.solve_vec(v)?.ok_or(Error::SingularLattice)?;
        Ok(coords.iter().all(Rational::is_integer))
    }

    pub fn reduce(&self, v: &[Rational]) -> Result<Vec<Rational>> {
        reduce_mod_lattice(v, &self.basis)
    }

    /// `[self : sub]` for a sublattice; errors if `sub` is not contained.
    pub fn index_of(&self, sub: &RationalLattice) -> Result<u64> {
        for j in 0..sub.rank() {
            if !self.contains(&sub.basis.column(j))? {
                return Err(Error::NotContained);
            }
        }
        let ratio = sub.covolume() / self.covolume();
        ratio
            .to_i64()
            .map(|x| x as u64)
            .ok_or_else(|| Error::Inconsistent("non-integral lattice index".into()))
    }
}

impl fmt::Debug for RationalLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalLattice{:?}", self.basis)
    }
}

impl Serialize for RationalLattice {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.basis.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RationalLattice {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let m = RationalMatrix::deserialize(deserializer)?;
        let gens: Vec<Vec<Rational>> = (0..m.cols()).map(|j| m.column(j)).collect();
        RationalLattice::from_generators(m.rows(), &gens).map_err(serde::de::Error::custom)
    }
}

/// Sublattice `{λ : A·λ ∈ Z^m}` of `Z^g` for a rational `m × g` matrix `A`.
pub fn integrality_lattice(a: &RationalMatrix) -> Result<Sublattice> {
    let g = a.cols();
    let den = common_denominator(a.entries());
    let d = den
        .to_i64()
        .ok_or_else(|| Error::Invalid("denominator too large".into()))?;
    let scaled = rational_to_int(&a.scale(&Rational::from_int(d)))
        .ok_or_else(|| Error::Inconsistent("scaling failed to clear denominators".into()))?;
    // Impose a_i·λ ≡ 0 (mod d) one row at a time; d·Z^g stays inside throughout.
    let mut lat = Sublattice::full(g);
    for i in 0..scaled.rows() {
        let basis = lat.basis_vectors();
        let mut row = IntMatrix::zeros(1, g + 1);
        for (j, b) in basis.iter().enumerate() {
            let v: i128 = (0..g).map(|k| i128::from(scaled[(i, k)]) * i128::from(b[k])).sum();
            row[(0, j)] = v.rem_euclid(i128::from(d)) as i64;
        }
        row[(0, g)] = d;
        let mut gens: Vec<Vec<i64>> = kernel_wide(&row)?
            .iter()
            .map(|x| {
                (0..g)
                    .map(|k| {
                        let v: i128 = (0..g).map(|j| i128::from(basis[j][k]) * x[j]).sum();
                        v.rem_euclid(i128::from(d)) as i64
                    })
                    .collect()
            })
            .collect();
        gens.extend((0..g).map(|k| (0..g).map(|j| if j == k { d } else { 0 }).collect()));
        lat = Sublattice::from_generators(g, &gens)?;
    }
    Ok(lat)
}

/// A finite abelian group `⊕ Z/d_i` with `d_1 | d_2 | …`, each `d_i > 1`,
/// realized as a quotient of lattices in `Z^g`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FiniteAbelianGroup {
    invariant_factors: Vec<i64>,
    generator_lifts: Vec<Vec<i64>>,
    /// Rows map an ambient vector to its coordinates (before reduction mod d_i).
    coordinate_map: RationalMatrix,
}

/// A subgroup of a [`FiniteAbelianGroup`], given by generating cosets in
/// coordinates with respect to the group's generators.
#[derive(Clone, PartialEq, Eq, Debug, PartialOrd, Ord)]
pub struct Subgroup {
    pub order: u64,
    pub generators: Vec<Vec<i64>>,
}

impl FiniteAbelianGroup {
    /// Abstract group `⊕ Z/d_i` with standard generators as lifts.
    pub fn from_invariant_factors(factors: &[i64]) -> Result<Self> {
        if factors.iter().any(|&d| d < 2) {
            return Err(Error::Invalid("invariant factors must exceed 1".into()));
        }
        if factors.windows(2).any(|w| w[1] % w[0] != 0) {
            return Err(Error::Invalid("invariant factors must form a divisibility chain".into()));
        }
        let k = factors.len();
        let lifts = (0..k)
            .map(|i| (0..k).map(|j| i64::from(i == j)).collect())
            .collect();
        Ok(FiniteAbelianGroup {
            invariant_factors: factors.to_vec(),
            generator_lifts: lifts,
            coordinate_map: RationalMatrix::identity(k),
        })
    }

    /// The quotient `a / b`; requires `b ⊆ a`.
    pub fn quotient(a: &Sublattice, b: &Sublattice) -> Result<Self> {
        if !b.is_subset_of(a)? {
            return Err(Error::NotContained);
        }
        let g = a.rank();
        let k = a.relative_basis(b)?;
        let (u, d, _) = snf(&k)?;
        let u_inv = u.unimodular_inverse()?;
        let a_inv = a
            .basis()
            .to_rational()
            .inverse()?
            .ok_or(Error::SingularLattice)?;
        let full_map = u.to_rational().mul(&a_inv)?;
        let mut factors = Vec::new();
        let mut lifts = Vec::new();
        let mut map_rows = Vec::new();
        for i in 0..g {
            let di = d[(i, i)];
            if di == 1 {
                continue;
            }
            factors.push(di);
            lifts.push(a.basis().mul_vec(&u_inv.column(i))?);
            map_rows.push(full_map.row(i).to_vec());
        }
        let coordinate_map = if map_rows.is_empty() {
            RationalMatrix::zeros(0, g)
        } else {
            RationalMatrix::from_rows(map_rows)?
        };
        Ok(FiniteAbelianGroup {
            invariant_factors: factors,
            generator_lifts: lifts,
            coordinate_map,
        })
    }

    pub fn invariant_factors(&self) -> &[i64] {
        &self.invariant_factors
    }

    pub fn generator_lifts(&self) -> &[Vec<i64>] {
        &self.generator_lifts
    }

    pub fn order(&self) -> u64 {
        self.invariant_factors.iter().map(|&d| d as u64).product()
    }

    pub fn num_generators(&self) -> usize {
        self.invariant_factors.len()
    }

    /// Reduces coordinates into `[0, d_i)`.
    pub fn normalize(&self, coords: &[i64]) -> Vec<i64> {
        coords
            .iter()
            .zip(&self.invariant_factors)
            .map(|(c, d)| c.rem_euclid(*d))
            .collect()
    }

    /// Coordinates of an ambient vector of the top lattice.
    pub fn coordinates_of(&self, v: &[i64]) -> Result<Vec<i64>> {
        let raw = self.coordinate_map.mul_int_vec(v)?;
        let ints = raw
            .iter()
            .map(|x| x.to_i64().ok_or(Error::NotContained))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.normalize(&ints))
    }

    /// Ambient lift `Σ c_i·lift_i`.
    pub fn lift(&self, coords: &[i64]) -> Vec<i64> {
        let dim = self.coordinate_map.cols();
        let mut out = vec![0i64; dim];
        for (c, l) in coords.iter().zip(&self.generator_lifts) {
            for (o, x) in out.iter_mut().zip(l) {
                *o += c * x;
            }
        }
        out
    }

    /// All elements in lexicographic coordinate order.
    pub fn elements(&self) -> Vec<Vec<i64>> {
        let mut out = vec![Vec::new()];
        for &d in &self.invariant_factors {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    (0..d).map(move |x| {
                        let mut p = prefix.clone();
                        p.push(x);
                        p
                    })
                })
                .collect();
        }
        out
    }

    /// Every subgroup exactly once, bounded by `bound` on the group order.
    ///
    /// Subgroups correspond bijectively to lattices `L` with
    /// `diag(d)·Z^k ⊆ L ⊆ Z^k`; each is enumerated through its unique HNF.
    pub fn enumerate_subgroups(&self, bound: u64) -> Result<Vec<Subgroup>> {
        let order = self.order();
        if order > bound {
            return Err(Error::TooLarge { order, bound });
        }
        let d = &self.invariant_factors;
        let k = d.len();
        let mut out = Vec::new();
        let diag_choices: Vec<Vec<i64>> = d
            .iter()
            .map(|&di| (1..=di).filter(|h| di % h == 0).collect())
            .collect();
        let mut diag = vec![0i64; k];
        enumerate_diagonals(&diag_choices, 0, &mut diag, &mut |diag| {
            // Free entries: h[i][j] for j < i, each in [0, diag[i]).
            let slots: Vec<(usize, usize)> =
                (0..k).flat_map(|i| (0..i).map(move |j| (i, j))).collect();
            let mut h = IntMatrix::diagonal(diag);
            let mut counter = vec![0i64; slots.len()];
            loop {
                for (s, &(i, j)) in slots.iter().enumerate() {
                    h[(i, j)] = counter[s];
                }
                if let Some(sg) = self.subgroup_from_hnf(&h) {
                    out.push(sg);
                }
                // Odometer increment.
                let mut s = 0;
                loop {
                    if s == slots.len() {
                        return;
                    }
                    counter[s] += 1;
                    if counter[s] < diag[slots[s].0] {
                        break;
                    }
                    counter[s] = 0;
                    s += 1;
                }
            }
        });
        out.sort();
        Ok(out)
    }

    fn subgroup_from_hnf(&self, h: &IntMatrix) -> Option<Subgroup> {
        let k = h.rows();
        let lattice = Sublattice { basis: h.clone() };
        for (i, &di) in self.invariant_factors.iter().enumerate() {
            let mut e = vec![0i64; k];
            e[i] = di;
            if !lattice.contains(&e).ok()? {
                return None;
            }
        }
        let mut generators: Vec<Vec<i64>> = h
            .columns()
            .iter()
            .map(|c| self.normalize(c))
            .filter(|c| c.iter().any(|&x| x != 0))
            .collect();
        generators.sort();
        generators.dedup();
        Some(Subgroup {
            order: self.order() / lattice.index(),
            generators,
        })
    }

    /// Every element of the subgroup generated by `gens`.
    pub fn span(&self, gens: &[Vec<i64>]) -> Vec<Vec<i64>> {
        let mut seen = std::collections::BTreeSet::new();
        seen.insert(vec![0i64; self.num_generators()]);
        let mut frontier: Vec<Vec<i64>> = seen.iter().cloned().collect();
        while let Some(x) = frontier.pop() {
            for g in gens {
                let y: Vec<i64> = x.iter().zip(g).map(|(a, b)| a + b).collect();
                let y = self.normalize(&y);
                if seen.insert(y.clone()) {
                    frontier.push(y);
                }
            }
        }
        seen.into_iter().collect()
    }
}

fn enumerate_diagonals(
    choices: &[Vec<i64>],
    pos: usize,
    current: &mut Vec<i64>,
    f: &mut impl FnMut(&[i64]),
) {
    if pos == choices.len() {
        f(current);
        return;
    }
    for &c in &choices[pos] {
        current[pos] = c;
        enumerate_diagonals(choices, pos + 1, current, f);
    }
}

/// Absolute value of an integer determinant as a `BigInt` (used in reports).
pub fn abs_det(m: &IntMatrix) -> Result<BigInt> {
    let det = m.to_rational().determinant()?;
    Ok(det.numer().abs())
}
