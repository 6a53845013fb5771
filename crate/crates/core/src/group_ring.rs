//! Exact arithmetic in the group ring `Z[G]`, matrices over it, equivariant
//! chain complexes and their combinatorial Laplacians.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Neg;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, Signed, ToPrimitive};

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::groups::{Group, GroupElement};
use crate::poly::Polynomial;

/// Coefficient rings used with group rings (integers and rationals).
pub trait Coefficient: Clone + fmt::Debug + fmt::Display + PartialEq + Num + Neg<Output = Self> + Signed {}

impl<T: Clone + fmt::Debug + fmt::Display + PartialEq + Num + Neg<Output = T> + Signed> Coefficient for T {}

/// A finite combination `sum c_g g`; zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupRingElement<C = BigInt> {
    terms: BTreeMap<GroupElement, C>,
}

impl<C: Coefficient> Default for GroupRingElement<C> {
    fn default() -> Self {
        GroupRingElement { terms: BTreeMap::new() }
    }
}

impl<C: Coefficient> GroupRingElement<C> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(g: GroupElement, c: C) -> Self {
        Self::from_terms([(g, c)])
    }

    /// Sums repeated elements and drops zero coefficients.
    pub fn from_terms(terms: impl IntoIterator<Item = (GroupElement, C)>) -> Self {
        let mut out = Self::zero();
        for (g, c) in terms {
            out.add_term(g, c);
        }
        out
    }

    fn add_term(&mut self, g: GroupElement, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&g) {
            Some(v) => {
                *v = v.clone() + c;
                if v.is_zero() {
                    self.terms.remove(&g);
                }
            }
            None => {
                self.terms.insert(g, c);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&GroupElement, &C)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, g: &GroupElement) -> C {
        self.terms.get(g).cloned().unwrap_or_else(C::zero)
    }

    /// Coefficient of the identity element.
    pub fn identity_coefficient(&self) -> C {
        self.terms
            .iter()
            .find(|(g, _)| g.is_identity())
            .map(|(_, c)| c.clone())
            .unwrap_or_else(C::zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (g, c) in &other.terms {
            out.add_term(g.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        GroupRingElement {
            terms: self.terms.iter().map(|(g, c)| (g.clone(), -c.clone())).collect(),
        }
    }

    pub fn scale(&self, s: &C) -> Self {
        Self::from_terms(self.terms.iter().map(|(g, c)| (g.clone(), c.clone() * s.clone())))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (g, a) in &self.terms {
            for (h, b) in &other.terms {
                out.add_term(g.mul(h), a.clone() * b.clone());
            }
        }
        out
    }

    /// The involution `g -> g^{-1}`.
    pub fn involution(&self) -> Self {
        GroupRingElement {
            terms: self.terms.iter().map(|(g, c)| (g.inverse(), c.clone())).collect(),
        }
    }

    /// Sum of coefficients (the augmentation).
    pub fn augmentation(&self) -> C {
        self.terms.values().fold(C::zero(), |acc, c| acc + c.clone())
    }

    /// Sum of absolute values of the coefficients.
    pub fn l1_norm(&self) -> C {
        self.terms.values().fold(C::zero(), |acc, c| acc + c.abs())
    }

    pub fn support(&self) -> impl Iterator<Item = &GroupElement> {
        self.terms.keys()
    }

    pub fn map_coefficients<D: Coefficient>(&self, f: impl Fn(&C) -> D) -> GroupRingElement<D> {
        GroupRingElement::from_terms(self.terms.iter().map(|(g, c)| (g.clone(), f(c))))
    }
}

impl GroupRingElement<BigInt> {
    pub fn to_rational(&self) -> GroupRingElement<BigRational> {
        self.map_coefficients(|c| BigRational::from_integer(c.clone()))
    }
}

impl<C: Coefficient> fmt::Display for GroupRingElement<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(g, c)| if g.is_identity() { format!("{c}") } else { format!("{c}*{g}") })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Dense matrix over `C[G]`.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupRingMatrix<C = BigInt> {
    group: Group,
    rows: usize,
    cols: usize,
    entries: Vec<GroupRingElement<C>>,
}

impl<C: Coefficient> GroupRingMatrix<C> {
    pub fn zeros(group: &Group, rows: usize, cols: usize) -> Self {
        GroupRingMatrix {
            group: group.clone(),
            rows,
            cols,
            entries: vec![GroupRingElement::zero(); rows * cols],
        }
    }

    pub fn identity(group: &Group, n: usize) -> Self {
        Self::scalar(group, n, C::one())
    }

    /// `c` times the identity.
    pub fn scalar(group: &Group, n: usize, c: C) -> Self {
        let mut m = Self::zeros(group, n, n);
        for i in 0..n {
            m.set(i, i, GroupRingElement::monomial(group.identity(), c.clone()));
        }
        m
    }

    pub fn from_entries(group: &Group, rows: usize, cols: usize, entries: Vec<GroupRingElement<C>>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::Invalid(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                entries.len()
            )));
        }
        if entries.iter().flat_map(|e| e.support()).any(|g| !group.owns(g)) {
            return Err(Error::Invalid("matrix entry uses an element outside the group".into()));
        }
        Ok(GroupRingMatrix {
            group: group.clone(),
            rows,
            cols,
            entries,
        })
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &GroupRingElement<C> {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: GroupRingElement<C>) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn entries(&self) -> &[GroupRingElement<C>] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(GroupRingElement::is_zero)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Invalid(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(&self.group, self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = other.get(k, c);
                    if !b.is_zero() {
                        let v = out.get(r, c).add(&a.mul(b));
                        out.set(r, c, v);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::Invalid("matrix shapes differ".into()));
        }
        Ok(GroupRingMatrix {
            group: self.group.clone(),
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a.add(b)).collect(),
        })
    }

    pub fn scale(&self, s: &C) -> Self {
        GroupRingMatrix {
            group: self.group.clone(),
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e.scale(s)).collect(),
        }
    }

    /// Conjugate transpose: transpose combined with the involution.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(&self.group, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c).involution());
            }
        }
        out
    }

    pub fn is_self_adjoint(&self) -> bool {
        self.is_square() && self.adjoint() == *self
    }

    /// `Tr_G`: sum of the identity coefficients on the diagonal.
    pub fn gamma_trace(&self) -> C {
        (0..self.rows.min(self.cols)).fold(C::zero(), |acc, i| acc + self.get(i, i).identity_coefficient())
    }

    /// Largest word length of a group element appearing in some entry.
    pub fn support_radius(&self, caps: &Caps) -> Result<u64> {
        let mut support: Vec<GroupElement> = self.entries.iter().flat_map(|e| e.support().cloned()).collect();
        support.sort();
        support.dedup();
        Ok(self.group.word_lengths(&support, caps)?.into_iter().max().unwrap_or(0))
    }

    pub fn map_coefficients<D: Coefficient>(&self, f: impl Fn(&C) -> D) -> GroupRingMatrix<D> {
        GroupRingMatrix {
            group: self.group.clone(),
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e.map_coefficients(&f)).collect(),
        }
    }

    /// Largest row sum of coefficient l1 norms, as a float.
    pub fn max_row_l1(&self) -> f64
    where
        C: ToPrimitive,
    {
        (0..self.rows)
            .map(|r| {
                (0..self.cols)
                    .map(|c| self.get(r, c).l1_norm().to_f64().unwrap_or(f64::INFINITY))
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }
}

impl GroupRingMatrix<BigInt> {
    pub fn to_rational(&self) -> GroupRingMatrix<BigRational> {
        self.map_coefficients(|c| BigRational::from_integer(c.clone()))
    }

    /// `K = max(2, max_i sum_j |B_ij|_1)`; bounds the operator norm on
    /// `l2(G)^a` and on every finite quotient at once.
    pub fn norm_bound(&self) -> f64 {
        self.max_row_l1().max(2.0)
    }
}

impl<C: Coefficient> fmt::Display for GroupRingMatrix<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self.get(r, c).to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// `p(M)` by Horner's rule, over the rationals.
pub fn evaluate_polynomial(p: &Polynomial, m: &GroupRingMatrix<BigInt>) -> Result<GroupRingMatrix<BigRational>> {
    if !m.is_square() {
        return Err(Error::Invalid("polynomial evaluation needs a square matrix".into()));
    }
    let mq = m.to_rational();
    let n = m.rows();
    let mut acc = GroupRingMatrix::<BigRational>::zeros(m.group(), n, n);
    for c in p.coefficients().iter().rev() {
        acc = acc.mul(&mq)?.add(&GroupRingMatrix::scalar(m.group(), n, c.clone()))?;
    }
    Ok(acc)
}

/// Free `Z[G]` chain complex with `cells[q]` generators in dimension `q` and
/// boundaries `d_q : C_q -> C_{q-1}` given as `cells[q-1] x cells[q]`
/// matrices (right action convention).
#[derive(Clone, Debug, PartialEq)]
pub struct EquivariantChainComplex {
    group: Group,
    cells: Vec<usize>,
    boundaries: Vec<GroupRingMatrix>,
}

impl EquivariantChainComplex {
    /// `boundaries[k]` is `d_{k+1}`. Fails unless every `d_q d_{q+1}` vanishes.
    pub fn new(group: Group, cells: Vec<usize>, boundaries: Vec<GroupRingMatrix>) -> Result<Self> {
        if cells.is_empty() {
            return Err(Error::Invalid("complex needs at least one dimension".into()));
        }
        if boundaries.len() + 1 != cells.len() {
            return Err(Error::Invalid(format!(
                "{} cell counts need {} boundary matrices, got {}",
                cells.len(),
                cells.len() - 1,
                boundaries.len()
            )));
        }
        for (k, d) in boundaries.iter().enumerate() {
            if d.group() != &group {
                return Err(Error::Invalid(format!("d_{} is over a different group", k + 1)));
            }
            if d.rows() != cells[k] || d.cols() != cells[k + 1] {
                return Err(Error::Invalid(format!(
                    "d_{} is {}x{}, expected {}x{}",
                    k + 1,
                    d.rows(),
                    d.cols(),
                    cells[k],
                    cells[k + 1]
                )));
            }
        }
        for k in 0..boundaries.len().saturating_sub(1) {
            let prod = boundaries[k].mul(&boundaries[k + 1])?;
            if let Some(pos) = prod.entries().iter().position(|e| !e.is_zero()) {
                return Err(Error::BoundaryNotClosed {
                    q: k + 1,
                    row: pos / prod.cols(),
                    col: pos % prod.cols(),
                });
            }
        }
        Ok(EquivariantChainComplex {
            group,
            cells,
            boundaries,
        })
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn top(&self) -> usize {
        self.cells.len() - 1
    }

    pub fn cells(&self) -> &[usize] {
        &self.cells
    }

    /// Number of cells in dimension `q` (0 beyond the top).
    pub fn cell_count(&self, q: usize) -> usize {
        self.cells.get(q).copied().unwrap_or(0)
    }

    /// `d_q` for `1 <= q <= top`.
    pub fn boundary(&self, q: usize) -> Option<&GroupRingMatrix> {
        q.checked_sub(1).and_then(|k| self.boundaries.get(k))
    }

    pub fn boundaries(&self) -> &[GroupRingMatrix] {
        &self.boundaries
    }

    fn check_dim(&self, q: usize) -> Result<()> {
        if q > self.top() {
            return Err(Error::DimensionOutOfRange { dim: q, top: self.top() });
        }
        Ok(())
    }

    /// `Delta_q = d_q^* d_q + d_{q+1} d_{q+1}^*`.
    pub fn laplacian(&self, q: usize) -> Result<GroupRingMatrix> {
        self.check_dim(q)?;
        let a = self.cells[q];
        let mut lap = GroupRingMatrix::zeros(&self.group, a, a);
        if let Some(d) = self.boundary(q) {
            lap = lap.add(&d.adjoint().mul(d)?)?;
        }
        if let Some(d) = self.boundary(q + 1) {
            lap = lap.add(&d.mul(&d.adjoint())?)?;
        }
        debug_assert!(lap.is_self_adjoint());
        Ok(lap)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z() -> Group {
        Group::free_abelian(1).unwrap()
    }

    fn g(k: i64) -> GroupElement {
        GroupElement::Abelian(vec![k])
    }

    fn elem(terms: &[(i64, i64)]) -> GroupRingElement {
        GroupRingElement::from_terms(terms.iter().map(|&(k, c)| (g(k), BigInt::from(c))))
    }

    fn one_by_one(e: GroupRingElement) -> GroupRingMatrix {
        GroupRingMatrix::from_entries(&z(), 1, 1, vec![e]).unwrap()
    }

    fn complex_1d(d: GroupRingElement) -> EquivariantChainComplex {
        EquivariantChainComplex::new(z(), vec![1, 1], vec![one_by_one(d)]).unwrap()
    }

    #[test]
    fn circle_laplacians() {
        let cx = complex_1d(elem(&[(1, 1), (0, -1)]));
        let lap0 = cx.laplacian(0).unwrap();
        assert_eq!(lap0.get(0, 0), &elem(&[(0, 2), (1, -1), (-1, -1)]));
        assert_eq!(lap0.support_radius(&Caps::default()).unwrap(), 1);
        assert_eq!(lap0.norm_bound(), 4.0);
        assert_eq!(lap0.gamma_trace(), BigInt::from(2));
        let sq = lap0.mul(&lap0).unwrap();
        assert_eq!(sq.gamma_trace(), BigInt::from(6));
        assert_eq!(cx.laplacian(2), Err(Error::DimensionOutOfRange { dim: 2, top: 1 }));
    }

    #[test]
    fn gap_laplacian() {
        let cx = complex_1d(elem(&[(0, 2), (1, -1)]));
        let lap1 = cx.laplacian(1).unwrap();
        assert_eq!(lap1.get(0, 0), &elem(&[(0, 5), (1, -2), (-1, -2)]));
        assert_eq!(lap1.norm_bound(), 9.0);
    }

    #[test]
    fn empty_and_zero_matrices() {
        let cx = EquivariantChainComplex::new(
            z(),
            vec![1, 0],
            vec![GroupRingMatrix::zeros(&z(), 1, 0)],
        )
        .unwrap();
        let lap1 = cx.laplacian(1).unwrap();
        assert_eq!((lap1.rows(), lap1.cols()), (0, 0));
        assert_eq!(GroupRingMatrix::<BigInt>::zeros(&z(), 2, 2).norm_bound(), 2.0);
        assert_eq!(GroupRingMatrix::<BigInt>::identity(&z(), 3).support_radius(&Caps::default()).unwrap(), 0);
        assert_eq!(GroupRingMatrix::<BigInt>::identity(&z(), 3).gamma_trace(), BigInt::from(3));
    }

    #[test]
    fn polynomial_evaluation() {
        let cx = complex_1d(elem(&[(1, 1), (0, -1)]));
        let lap0 = cx.laplacian(0).unwrap();
        let sq = evaluate_polynomial(&Polynomial::from_integers(&[0, 0, 1]), &lap0).unwrap();
        let expected = elem(&[(0, 6), (1, -4), (-1, -4), (2, 1), (-2, 1)]).to_rational();
        assert_eq!(sq.get(0, 0), &expected);
        let shifted = evaluate_polynomial(&Polynomial::from_integers(&[-2, 1]), &lap0).unwrap();
        assert_eq!(shifted.get(0, 0), &elem(&[(1, -1), (-1, -1)]).to_rational());
        let two = GroupRingMatrix::<BigInt>::zeros(&z(), 2, 2);
        let one = evaluate_polynomial(&Polynomial::from_integers(&[1]), &two).unwrap();
        assert_eq!(one, GroupRingMatrix::identity(&z(), 2));
    }

    #[test]
    fn nonclosed_boundaries_are_located() {
        let d1 = one_by_one(elem(&[(1, 1), (0, -1)]));
        let d2 = one_by_one(elem(&[(0, 1)]));
        let err = EquivariantChainComplex::new(z(), vec![1, 1, 1], vec![d1, d2]).unwrap_err();
        assert_eq!(err, Error::BoundaryNotClosed { q: 1, row: 0, col: 0 });
    }

    #[test]
    fn involution_reverses_products() {
        let x = elem(&[(1, 2), (3, -1)]);
        let y = elem(&[(0, 1), (-2, 5)]);
        assert_eq!(x.mul(&y).involution(), y.involution().mul(&x.involution()));
    }
}
