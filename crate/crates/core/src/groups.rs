//! Deck groups, their finite-index normal subgroups and finite quotients.
//!
//! Two kinds of group are supported: the free abelian group `Z^n` with the
//! generating set `{±e_1, ..., ±e_n}` (so word length is the l1 norm), and
//! groups of integral matrices given by invertible generators, whose
//! finite-index subgroups are congruence kernels. All constants derived
//! downstream depend on these pinned generating sets.

use std::collections::{HashMap, HashSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::linalg::{smith_normal_form, SmithForm};

/// Square matrix with arbitrary precision integer entries.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MatrixElement {
    dim: usize,
    entries: Vec<BigInt>,
}

impl MatrixElement {
    pub fn identity(dim: usize) -> MatrixElement {
        let mut entries = vec![BigInt::zero(); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = BigInt::one();
        }
        MatrixElement { dim, entries }
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<MatrixElement> {
        let dim = rows.len();
        if dim == 0 || rows.iter().any(|r| r.len() != dim) {
            return Err(Error::Invalid("matrix generator must be square and nonempty".into()));
        }
        Ok(MatrixElement {
            dim,
            entries: rows.iter().flatten().map(|&v| BigInt::from(v)).collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, r: usize, c: usize) -> &BigInt {
        &self.entries[r * self.dim + c]
    }

    pub fn mul(&self, other: &MatrixElement) -> MatrixElement {
        assert_eq!(self.dim, other.dim, "matrix dimensions differ");
        let n = self.dim;
        let mut entries = vec![BigInt::zero(); n * n];
        for r in 0..n {
            for k in 0..n {
                let a = &self.entries[r * n + k];
                if a.is_zero() {
                    continue;
                }
                for c in 0..n {
                    entries[r * n + c] += a * &other.entries[k * n + c];
                }
            }
        }
        MatrixElement { dim: n, entries }
    }

    pub fn determinant(&self) -> BigInt {
        let n = self.dim;
        let mut a: Vec<Vec<BigRational>> = (0..n)
            .map(|r| {
                (0..n)
                    .map(|c| BigRational::from_integer(self.entry(r, c).clone()))
                    .collect()
            })
            .collect();
        let mut det = BigRational::one();
        for k in 0..n {
            let Some(p) = (k..n).find(|&r| !a[r][k].is_zero()) else {
                return BigInt::zero();
            };
            if p != k {
                a.swap(p, k);
                det = -det;
            }
            det *= a[k][k].clone();
            for i in k + 1..n {
                let f = &a[i][k] / &a[k][k];
                for j in k..n {
                    let v = &f * &a[k][j];
                    a[i][j] -= v;
                }
            }
        }
        det.to_integer()
    }

    /// Inverse over the integers; requires determinant ±1.
    pub fn inverse(&self) -> Result<MatrixElement> {
        let n = self.dim;
        let mut a: Vec<Vec<BigRational>> = (0..n)
            .map(|r| {
                let mut row: Vec<BigRational> = (0..n)
                    .map(|c| BigRational::from_integer(self.entry(r, c).clone()))
                    .collect();
                row.extend((0..n).map(|c| BigRational::from_integer(BigInt::from(u8::from(r == c)))));
                row
            })
            .collect();
        for k in 0..n {
            let p = (k..n)
                .find(|&r| !a[r][k].is_zero())
                .ok_or_else(|| Error::Invalid("singular matrix generator".into()))?;
            a.swap(p, k);
            let pivot = a[k][k].clone();
            for v in a[k].iter_mut() {
                *v /= pivot.clone();
            }
            for i in 0..n {
                if i != k && !a[i][k].is_zero() {
                    let f = a[i][k].clone();
                    for j in 0..2 * n {
                        let v = &f * &a[k][j];
                        a[i][j] -= v;
                    }
                }
            }
        }
        let mut entries = Vec::with_capacity(n * n);
        for row in &a {
            for v in &row[n..] {
                if !v.is_integer() {
                    return Err(Error::Invalid("matrix generator is not invertible over Z".into()));
                }
                entries.push(v.to_integer());
            }
        }
        Ok(MatrixElement { dim: n, entries })
    }

    pub fn is_identity(&self) -> bool {
        let n = self.dim;
        (0..n).all(|r| (0..n).all(|c| *self.entry(r, c) == BigInt::from(u8::from(r == c))))
    }

    /// Entries reduced into `[0, m)`.
    pub fn reduce_mod(&self, m: u64) -> Vec<u32> {
        let modulus = BigInt::from(m);
        self.entries
            .iter()
            .map(|v| v.mod_floor(&modulus).to_u32().expect("residue fits"))
            .collect()
    }

    fn compact(&self) -> Result<Vec<i128>> {
        self.entries
            .iter()
            .map(|v| v.to_i128().ok_or(Error::Overflow))
            .collect()
    }
}

impl fmt::Display for MatrixElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for r in 0..self.dim {
            if r > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = (0..self.dim).map(|c| self.entry(r, c).to_string()).collect();
            write!(f, "{}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

/// An element of a deck group.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupElement {
    /// Exponent vector in `Z^n`.
    Abelian(Vec<i64>),
    Matrix(MatrixElement),
}

impl GroupElement {
    pub fn mul(&self, other: &GroupElement) -> GroupElement {
        match (self, other) {
            (GroupElement::Abelian(a), GroupElement::Abelian(b)) => {
                assert_eq!(a.len(), b.len(), "abelian ranks differ");
                GroupElement::Abelian(a.iter().zip(b).map(|(x, y)| x + y).collect())
            }
            (GroupElement::Matrix(a), GroupElement::Matrix(b)) => GroupElement::Matrix(a.mul(b)),
            _ => panic!("cannot multiply elements of different group kinds"),
        }
    }

    pub fn inverse(&self) -> GroupElement {
        match self {
            GroupElement::Abelian(a) => GroupElement::Abelian(a.iter().map(|x| -x).collect()),
            GroupElement::Matrix(m) => {
                GroupElement::Matrix(m.inverse().expect("group elements are unimodular"))
            }
        }
    }

    pub fn is_identity(&self) -> bool {
        match self {
            GroupElement::Abelian(a) => a.iter().all(|&x| x == 0),
            GroupElement::Matrix(m) => m.is_identity(),
        }
    }

    pub fn identity_like(&self) -> GroupElement {
        match self {
            GroupElement::Abelian(a) => GroupElement::Abelian(vec![0; a.len()]),
            GroupElement::Matrix(m) => GroupElement::Matrix(MatrixElement::identity(m.dim())),
        }
    }

    pub fn pow(&self, k: i64) -> GroupElement {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut acc = self.identity_like();
        for _ in 0..k.unsigned_abs() {
            acc = acc.mul(&base);
        }
        acc
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupElement::Abelian(v) => {
                let parts: Vec<String> = v.iter().map(i64::to_string).collect();
                write!(f, "({})", parts.join(","))
            }
            GroupElement::Matrix(m) => write!(f, "{m}"),
        }
    }
}

/// A finitely generated deck group with a pinned generating set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Group {
    FreeAbelian { rank: usize },
    IntegralMatrix { dim: usize, generators: Vec<MatrixElement> },
}

impl Group {
    pub fn free_abelian(rank: usize) -> Result<Group> {
        if rank == 0 {
            return Err(Error::Invalid("free abelian rank must be at least 1".into()));
        }
        Ok(Group::FreeAbelian { rank })
    }

    pub fn integral_matrix(generators: Vec<MatrixElement>) -> Result<Group> {
        let dim = generators
            .first()
            .ok_or_else(|| Error::Invalid("matrix group needs a generator".into()))?
            .dim();
        for g in &generators {
            if g.dim() != dim {
                return Err(Error::Invalid("matrix generators differ in size".into()));
            }
            if g.determinant().abs() != BigInt::one() {
                return Err(Error::Invalid(format!("generator {g} is not invertible over Z")));
            }
        }
        Ok(Group::IntegralMatrix { dim, generators })
    }

    pub fn is_abelian(&self) -> bool {
        matches!(self, Group::FreeAbelian { .. })
    }

    pub fn rank(&self) -> Option<usize> {
        match self {
            Group::FreeAbelian { rank } => Some(*rank),
            Group::IntegralMatrix { .. } => None,
        }
    }

    pub fn identity(&self) -> GroupElement {
        match self {
            Group::FreeAbelian { rank } => GroupElement::Abelian(vec![0; *rank]),
            Group::IntegralMatrix { dim, .. } => GroupElement::Matrix(MatrixElement::identity(*dim)),
        }
    }

    /// The `i`-th generator (0-based).
    pub fn generator(&self, i: usize) -> Result<GroupElement> {
        match self {
            Group::FreeAbelian { rank } if i < *rank => {
                let mut v = vec![0; *rank];
                v[i] = 1;
                Ok(GroupElement::Abelian(v))
            }
            Group::IntegralMatrix { generators, .. } if i < generators.len() => {
                Ok(GroupElement::Matrix(generators[i].clone()))
            }
            _ => Err(Error::Invalid(format!("no generator with index {i}"))),
        }
    }

    pub fn generator_count(&self) -> usize {
        match self {
            Group::FreeAbelian { rank } => *rank,
            Group::IntegralMatrix { generators, .. } => generators.len(),
        }
    }

    /// Generators followed by their inverses.
    pub fn symmetric_generators(&self) -> Vec<GroupElement> {
        let gens: Vec<GroupElement> = (0..self.generator_count())
            .map(|i| self.generator(i).expect("index in range"))
            .collect();
        let inverses: Vec<GroupElement> = gens.iter().map(GroupElement::inverse).collect();
        gens.into_iter().chain(inverses).collect()
    }

    /// Evaluates a word of signed 1-based generator indices (`-k` is the
    /// inverse of generator `k`).
    pub fn element_from_word(&self, word: &[i64]) -> Result<GroupElement> {
        let mut acc = self.identity();
        for &letter in word {
            if letter == 0 {
                return Err(Error::Invalid("word letters are nonzero".into()));
            }
            let g = self.generator(letter.unsigned_abs() as usize - 1)?;
            let g = if letter < 0 { g.inverse() } else { g };
            acc = acc.mul(&g);
        }
        Ok(acc)
    }

    /// Whether `g` has the shape of an element of this group.
    pub fn owns(&self, g: &GroupElement) -> bool {
        match (self, g) {
            (Group::FreeAbelian { rank }, GroupElement::Abelian(v)) => v.len() == *rank,
            (Group::IntegralMatrix { dim, .. }, GroupElement::Matrix(m)) => m.dim() == *dim,
            _ => false,
        }
    }

    /// Word lengths of several elements, sharing one search.
    pub fn word_lengths(&self, elements: &[GroupElement], caps: &Caps) -> Result<Vec<u64>> {
        match self {
            Group::FreeAbelian { .. } => Ok(elements.iter().map(l1_length).collect()),
            Group::IntegralMatrix { dim, .. } => {
                let mut wanted: HashMap<Vec<i128>, Vec<usize>> = HashMap::new();
                for (i, g) in elements.iter().enumerate() {
                    let GroupElement::Matrix(m) = g else {
                        return Err(Error::Invalid("element is not a matrix".into()));
                    };
                    wanted.entry(m.compact()?).or_default().push(i);
                }
                let mut out = vec![0u64; elements.len()];
                let mut bfs = MatrixBfs::new(self, *dim, caps)?;
                loop {
                    for m in &bfs.frontier {
                        if let Some(idx) = wanted.remove(m) {
                            for i in idx {
                                out[i] = bfs.level;
                            }
                        }
                    }
                    if wanted.is_empty() {
                        return Ok(out);
                    }
                    if bfs.level >= caps.bfs {
                        return Err(Error::SearchCapExceeded {
                            lower_bound: caps.bfs + 1,
                        });
                    }
                    if !bfs.advance()? {
                        return Err(Error::Invalid("element is not in the group".into()));
                    }
                }
            }
        }
    }

    pub fn word_length(&self, g: &GroupElement, caps: &Caps) -> Result<u64> {
        Ok(self.word_lengths(std::slice::from_ref(g), caps)?[0])
    }
}

fn l1_length(g: &GroupElement) -> u64 {
    match g {
        GroupElement::Abelian(v) => v.iter().map(|x| x.unsigned_abs()).sum(),
        GroupElement::Matrix(_) => panic!("l1 length of a matrix element"),
    }
}

/// Level-by-level breadth-first search over a matrix group, deduplicating on
/// the exact integral matrices (the representation is faithful).
struct MatrixBfs<'c> {
    dim: usize,
    gens: Vec<Vec<i128>>,
    visited: HashSet<Vec<i128>>,
    frontier: Vec<Vec<i128>>,
    level: u64,
    caps: &'c Caps,
}

impl<'c> MatrixBfs<'c> {
    fn new(group: &Group, dim: usize, caps: &'c Caps) -> Result<Self> {
        let gens = group
            .symmetric_generators()
            .into_iter()
            .map(|g| match g {
                GroupElement::Matrix(m) => m.compact(),
                GroupElement::Abelian(_) => unreachable!(),
            })
            .collect::<Result<Vec<_>>>()?;
        let id = MatrixElement::identity(dim).compact()?;
        let mut visited = HashSet::new();
        visited.insert(id.clone());
        Ok(MatrixBfs {
            dim,
            gens,
            visited,
            frontier: vec![id],
            level: 0,
            caps,
        })
    }

    /// Expands to the next level; `false` once the group is exhausted.
    fn advance(&mut self) -> Result<bool> {
        let mut next = Vec::new();
        for m in &self.frontier {
            for g in &self.gens {
                let p = mul_compact(self.dim, m, g)?;
                if !self.visited.contains(&p) {
                    if self.visited.len() >= self.caps.visited {
                        return Err(Error::SearchCapExceeded {
                            lower_bound: self.level + 1,
                        });
                    }
                    self.visited.insert(p.clone());
                    next.push(p);
                }
            }
        }
        self.level += 1;
        self.frontier = next;
        Ok(!self.frontier.is_empty())
    }
}

fn mul_compact(n: usize, a: &[i128], b: &[i128]) -> Result<Vec<i128>> {
    let mut out = vec![0i128; n * n];
    for r in 0..n {
        for k in 0..n {
            let x = a[r * n + k];
            if x == 0 {
                continue;
            }
            for c in 0..n {
                let p = x.checked_mul(b[k * n + c]).ok_or(Error::Overflow)?;
                out[r * n + c] = out[r * n + c].checked_add(p).ok_or(Error::Overflow)?;
            }
        }
    }
    Ok(out)
}

fn is_identity_mod(n: usize, a: &[i128], m: u64) -> bool {
    let m = m as i128;
    (0..n).all(|r| (0..n).all(|c| (a[r * n + c] - i128::from(r == c)).rem_euclid(m) == 0))
}

/// A finite-index normal subgroup.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Subgroup {
    /// Sublattice of `Z^n`; the columns of `basis` (given row-major) generate it.
    Lattice { basis: Vec<Vec<i64>> },
    /// Kernel of entrywise reduction modulo `level`.
    Congruence { level: u64 },
}

impl Subgroup {
    pub fn lattice(basis: Vec<Vec<i64>>) -> Result<Subgroup> {
        let n = basis.len();
        if n == 0 || basis.iter().any(|r| r.len() != n) {
            return Err(Error::Invalid("subgroup basis must be a square matrix".into()));
        }
        Ok(Subgroup::Lattice { basis })
    }

    pub fn diagonal(entries: &[i64]) -> Subgroup {
        let n = entries.len();
        let basis = (0..n)
            .map(|i| (0..n).map(|j| if i == j { entries[i] } else { 0 }).collect())
            .collect();
        Subgroup::Lattice { basis }
    }

    /// `i Z` inside `Z`.
    pub fn cyclic(i: i64) -> Subgroup {
        Subgroup::diagonal(&[i])
    }

    pub fn congruence(level: u64) -> Result<Subgroup> {
        if level < 2 {
            return Err(Error::Invalid("congruence level must be at least 2".into()));
        }
        Ok(Subgroup::Congruence { level })
    }

    /// Generating columns of a lattice subgroup.
    pub fn columns(&self) -> Vec<Vec<i64>> {
        match self {
            Subgroup::Lattice { basis } => {
                let n = basis.len();
                (0..n).map(|c| (0..n).map(|r| basis[r][c]).collect()).collect()
            }
            Subgroup::Congruence { .. } => Vec::new(),
        }
    }

    fn check_against(&self, group: &Group) -> Result<()> {
        match (group, self) {
            (Group::FreeAbelian { rank }, Subgroup::Lattice { basis }) if basis.len() == *rank => Ok(()),
            (Group::IntegralMatrix { .. }, Subgroup::Congruence { .. }) => Ok(()),
            _ => Err(Error::Invalid("subgroup does not match the group".into())),
        }
    }
}

impl fmt::Display for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Subgroup::Lattice { basis } => {
                let rows: Vec<String> = basis
                    .iter()
                    .map(|r| r.iter().map(i64::to_string).collect::<Vec<_>>().join(" "))
                    .collect();
                write!(f, "{}", rows.join("; "))
            }
            Subgroup::Congruence { level } => write!(f, "mod {level}"),
        }
    }
}

/// Length of the shortest non-identity element of a subgroup.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Short {
    Finite(u64),
    /// The subgroup is trivial (only possible when the group is finite).
    Infinite,
}

impl Short {
    pub fn finite(self) -> Option<u64> {
        match self {
            Short::Finite(v) => Some(v),
            Short::Infinite => None,
        }
    }
}

impl fmt::Display for Short {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Short::Finite(v) => write!(f, "{v}"),
            Short::Infinite => write!(f, "inf"),
        }
    }
}

/// `short(sub)`: exhaustive l1 enumeration for lattices, breadth-first
/// search over reduced words for congruence subgroups.
pub fn short_length(group: &Group, sub: &Subgroup, caps: &Caps) -> Result<Short> {
    sub.check_against(group)?;
    match (group, sub) {
        (Group::FreeAbelian { rank }, Subgroup::Lattice { basis }) => {
            let smith = smith_normal_form(basis)?;
            if smith.diagonal.contains(&0) {
                return Err(Error::NotFiniteIndex);
            }
            let upper = sub
                .columns()
                .iter()
                .map(|c| c.iter().map(|x| x.unsigned_abs()).sum::<u64>())
                .min()
                .expect("nonempty basis");
            let mut budget = caps.visited;
            for r in 1..upper {
                let mut found = false;
                let mut v = vec![0i64; *rank];
                shell_search(&mut v, 0, r as i64, &mut budget, &mut |w| {
                    if lattice_member(&smith, w) {
                        found = true;
                    }
                    found
                })
                .map_err(|_| Error::SearchCapExceeded { lower_bound: r })?;
                if found {
                    return Ok(Short::Finite(r));
                }
            }
            Ok(Short::Finite(upper))
        }
        (Group::IntegralMatrix { dim, .. }, Subgroup::Congruence { level }) => {
            let mut bfs = MatrixBfs::new(group, *dim, caps)?;
            loop {
                if bfs.level >= caps.bfs {
                    return Err(Error::SearchCapExceeded {
                        lower_bound: caps.bfs + 1,
                    });
                }
                if !bfs.advance()? {
                    return Ok(Short::Infinite);
                }
                if bfs.frontier.iter().any(|m| is_identity_mod(*dim, m, *level)) {
                    return Ok(Short::Finite(bfs.level));
                }
            }
        }
        _ => unreachable!("checked above"),
    }
}

/// Visits every vector of l1 norm exactly `remaining` in the coordinates
/// `v[pos..]`; stops early when `visit` returns true.
fn shell_search(
    v: &mut Vec<i64>,
    pos: usize,
    remaining: i64,
    budget: &mut usize,
    visit: &mut dyn FnMut(&[i64]) -> bool,
) -> std::result::Result<bool, ()> {
    if pos + 1 == v.len() {
        for s in [remaining, -remaining] {
            if *budget == 0 {
                return Err(());
            }
            *budget -= 1;
            v[pos] = s;
            if visit(v) {
                return Ok(true);
            }
            if remaining == 0 {
                break;
            }
        }
        v[pos] = 0;
        return Ok(false);
    }
    for k in 0..=remaining {
        for s in [k, -k] {
            v[pos] = s;
            if shell_search(v, pos + 1, remaining - k, budget, visit)? {
                return Ok(true);
            }
            if k == 0 {
                break;
            }
        }
    }
    v[pos] = 0;
    Ok(false)
}

fn lattice_member(smith: &SmithForm, v: &[i64]) -> bool {
    smith.left.iter().zip(&smith.diagonal).all(|(row, &d)| {
        let w: i128 = row.iter().zip(v).map(|(&a, &b)| a as i128 * b as i128).sum();
        w.rem_euclid(d as i128) == 0
    })
}

/// Number of group elements of word length at most `r`.
pub fn ball_volume(group: &Group, r: u64, caps: &Caps) -> Result<u64> {
    match group {
        Group::FreeAbelian { rank } => {
            // sum_k 2^k C(n,k) C(r,k)
            let n = *rank as u64;
            let mut total: u128 = 0;
            for k in 0..=n.min(r) {
                let term = (1u128 << k) * binomial(n, k) * binomial(r, k);
                total = total.checked_add(term).ok_or(Error::Overflow)?;
            }
            u64::try_from(total).map_err(|_| Error::Overflow)
        }
        Group::IntegralMatrix { dim, .. } => {
            if r > caps.bfs {
                return Err(Error::SearchCapExceeded {
                    lower_bound: caps.bfs + 1,
                });
            }
            let mut bfs = MatrixBfs::new(group, *dim, caps)?;
            while bfs.level < r {
                if !bfs.advance()? {
                    break;
                }
            }
            Ok(bfs.visited.len() as u64)
        }
    }
}

fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

#[derive(Clone, Debug)]
enum QuotientRepr {
    Abelian {
        /// Rows of the Smith left transform with nontrivial modulus.
        projection: Vec<Vec<i64>>,
        moduli: Vec<u64>,
    },
    Congruence {
        level: u64,
        dim: usize,
        elements: Vec<Vec<u32>>,
        lookup: HashMap<Vec<u32>, usize>,
    },
}

/// A concrete finite quotient `group / sub`. Elements are indexed
/// `0..order`, with index 0 the identity.
#[derive(Clone, Debug)]
pub struct FiniteQuotient {
    group: Group,
    subgroup: Subgroup,
    repr: QuotientRepr,
    generator_images: Vec<usize>,
}

/// Builds the quotient; abelian quotients go through Smith normal form,
/// congruence quotients through closure of the reduced generators.
pub fn quotient(group: &Group, sub: &Subgroup, caps: &Caps) -> Result<FiniteQuotient> {
    sub.check_against(group)?;
    let repr = match (group, sub) {
        (Group::FreeAbelian { .. }, Subgroup::Lattice { basis }) => {
            let smith = smith_normal_form(basis)?;
            if smith.diagonal.contains(&0) {
                return Err(Error::NotFiniteIndex);
            }
            let order: u128 = smith.diagonal.iter().map(|&d| d as u128).product();
            if order > caps.order as u128 {
                return Err(Error::OrderCapExceeded { cap: caps.order });
            }
            let (projection, moduli) = smith
                .left
                .iter()
                .zip(&smith.diagonal)
                .filter(|(_, &d)| d > 1)
                .map(|(row, &d)| (row.clone(), d as u64))
                .unzip();
            QuotientRepr::Abelian { projection, moduli }
        }
        (Group::IntegralMatrix { dim, generators }, Subgroup::Congruence { level }) => {
            let mut reduced: Vec<Vec<u32>> = generators.iter().map(|g| g.reduce_mod(*level)).collect();
            for g in generators {
                reduced.push(g.inverse()?.reduce_mod(*level));
            }
            let identity = MatrixElement::identity(*dim).reduce_mod(*level);
            let mut elements = vec![identity.clone()];
            let mut lookup = HashMap::from([(identity, 0usize)]);
            let mut head = 0;
            while head < elements.len() {
                for g in &reduced {
                    let p = mul_mod_matrix(*dim, &elements[head], g, *level);
                    if !lookup.contains_key(&p) {
                        if elements.len() >= caps.order {
                            return Err(Error::OrderCapExceeded { cap: caps.order });
                        }
                        lookup.insert(p.clone(), elements.len());
                        elements.push(p);
                    }
                }
                head += 1;
            }
            QuotientRepr::Congruence {
                level: *level,
                dim: *dim,
                elements,
                lookup,
            }
        }
        _ => unreachable!("checked above"),
    };
    let mut q = FiniteQuotient {
        group: group.clone(),
        subgroup: sub.clone(),
        repr,
        generator_images: Vec::new(),
    };
    q.generator_images = group
        .symmetric_generators()
        .iter()
        .map(|g| q.project(g))
        .collect::<Result<_>>()?;
    Ok(q)
}

fn mul_mod_matrix(n: usize, a: &[u32], b: &[u32], m: u64) -> Vec<u32> {
    let mut out = vec![0u32; n * n];
    for r in 0..n {
        for c in 0..n {
            let s: u64 = (0..n)
                .map(|k| a[r * n + k] as u64 * b[k * n + c] as u64 % m)
                .sum();
            out[r * n + c] = (s % m) as u32;
        }
    }
    out
}

impl FiniteQuotient {
    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn subgroup(&self) -> &Subgroup {
        &self.subgroup
    }

    pub fn order(&self) -> usize {
        match &self.repr {
            QuotientRepr::Abelian { moduli, .. } => moduli.iter().product::<u64>() as usize,
            QuotientRepr::Congruence { elements, .. } => elements.len(),
        }
    }

    pub fn identity(&self) -> usize {
        0
    }

    /// Invariant factors `> 1` of an abelian quotient.
    pub fn invariant_factors(&self) -> Option<&[u64]> {
        match &self.repr {
            QuotientRepr::Abelian { moduli, .. } => Some(moduli),
            QuotientRepr::Congruence { .. } => None,
        }
    }

    /// Rows of the Smith transform paired with their invariant factors: the
    /// residue of `v` for factor `d_k` is `<row_k, v> mod d_k`.
    pub fn abelian_projection(&self) -> Option<(&[Vec<i64>], &[u64])> {
        match &self.repr {
            QuotientRepr::Abelian { projection, moduli } => Some((projection, moduli)),
            QuotientRepr::Congruence { .. } => None,
        }
    }

    /// Residues of an abelian quotient element, one per invariant factor.
    pub fn residues(&self, index: usize) -> Option<Vec<u64>> {
        let QuotientRepr::Abelian { moduli, .. } = &self.repr else {
            return None;
        };
        let mut rest = index as u64;
        Some(
            moduli
                .iter()
                .map(|&m| {
                    let r = rest % m;
                    rest /= m;
                    r
                })
                .collect(),
        )
    }

    fn encode(moduli: &[u64], residues: &[u64]) -> usize {
        let mut idx = 0u64;
        for (&m, &r) in moduli.iter().zip(residues).rev() {
            idx = idx * m + r;
        }
        idx as usize
    }

    /// Image of a group element.
    pub fn project(&self, g: &GroupElement) -> Result<usize> {
        match (&self.repr, g) {
            (QuotientRepr::Abelian { projection, moduli }, GroupElement::Abelian(v)) => {
                if projection.first().is_some_and(|row| row.len() != v.len()) {
                    return Err(Error::Invalid("element rank mismatch".into()));
                }
                let residues: Vec<u64> = projection
                    .iter()
                    .zip(moduli)
                    .map(|(row, &m)| {
                        let w: i128 = row.iter().zip(v).map(|(&a, &b)| a as i128 * b as i128).sum();
                        w.rem_euclid(m as i128) as u64
                    })
                    .collect();
                Ok(Self::encode(moduli, &residues))
            }
            (QuotientRepr::Congruence { level, lookup, .. }, GroupElement::Matrix(m)) => lookup
                .get(&m.reduce_mod(*level))
                .copied()
                .ok_or_else(|| Error::Invalid("element is not in the group".into())),
            _ => Err(Error::Invalid("element does not belong to the quotient's group".into())),
        }
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        match &self.repr {
            QuotientRepr::Abelian { moduli, .. } => {
                let ra = self.residues(a).expect("abelian");
                let rb = self.residues(b).expect("abelian");
                let sum: Vec<u64> = ra
                    .iter()
                    .zip(&rb)
                    .zip(moduli)
                    .map(|((x, y), m)| (x + y) % m)
                    .collect();
                Self::encode(moduli, &sum)
            }
            QuotientRepr::Congruence {
                level,
                dim,
                elements,
                lookup,
            } => {
                let p = mul_mod_matrix(*dim, &elements[a], &elements[b], *level);
                lookup[&p]
            }
        }
    }

    pub fn inverse(&self, a: usize) -> usize {
        match &self.repr {
            QuotientRepr::Abelian { moduli, .. } => {
                let r = self.residues(a).expect("abelian");
                let neg: Vec<u64> = r.iter().zip(moduli).map(|(x, m)| (m - x) % m).collect();
                Self::encode(moduli, &neg)
            }
            QuotientRepr::Congruence { .. } => {
                // a^(k-1) where k is the order of a
                let mut prev = self.identity();
                let mut cur = a;
                while cur != self.identity() {
                    prev = cur;
                    cur = self.mul(cur, a);
                }
                prev
            }
        }
    }

    /// Right multiplication `x -> x * h` as a permutation of indices.
    pub fn right_translation(&self, h: usize) -> Vec<usize> {
        (0..self.order()).map(|x| self.mul(x, h)).collect()
    }

    /// Images of the generators followed by their inverses.
    pub fn generator_images(&self) -> &[usize] {
        &self.generator_images
    }
}

/// Order of the image of `g` in the quotient.
pub fn element_order(q: &FiniteQuotient, g: &GroupElement) -> Result<u64> {
    let h = q.project(g)?;
    if let (Some(moduli), Some(res)) = (q.invariant_factors(), q.residues(h)) {
        return Ok(moduli
            .iter()
            .zip(&res)
            .map(|(&m, &r)| m / m.gcd(&r))
            .fold(1u64, |acc, o| acc.lcm(&o)));
    }
    let mut k = 1;
    let mut cur = h;
    while cur != q.identity() {
        cur = q.mul(cur, h);
        k += 1;
    }
    Ok(k)
}

/// Diameter of the Cayley graph of the quotient under the generator images.
pub fn quotient_diameter(q: &FiniteQuotient) -> u64 {
    let n = q.order();
    let mut dist = vec![u64::MAX; n];
    dist[q.identity()] = 0;
    let mut queue = std::collections::VecDeque::from([q.identity()]);
    let mut far = 0;
    while let Some(x) = queue.pop_front() {
        far = far.max(dist[x]);
        for &g in q.generator_images() {
            let y = q.mul(x, g);
            if dist[y] == u64::MAX {
                dist[y] = dist[x] + 1;
                queue.push_back(y);
            }
        }
    }
    far
}

/// For each member, whether `[G : G_i] <= vol B(floor(c * short(G_i)))`.
pub fn uniformity_check(group: &Group, family: &[Subgroup], c: f64, caps: &Caps) -> Result<Vec<bool>> {
    if !(c > 0.0) {
        return Err(Error::Invalid("uniformity constant must be positive".into()));
    }
    family
        .iter()
        .map(|sub| {
            let index = quotient(group, sub, caps)?.order() as u64;
            let radius = match short_length(group, sub, caps)? {
                Short::Finite(s) => (c * s as f64).floor() as u64,
                Short::Infinite => return Ok(true),
            };
            Ok(index <= ball_volume(group, radius, caps)?)
        })
        .collect()
}
