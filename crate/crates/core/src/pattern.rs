//! The abelian case `G = Z^n`: determinants as Laurent polynomials, the
//! characters of a finite quotient, and Betti numbers counted character by
//! character.
//!
//! A character is a rational point `x` of the torus `[0,1)^n`, acting by
//! `rho(g) = exp(2 pi i <x, g>)`. The characters trivial on `G'` form the
//! lattice `Lambda`; `b(X')` is the sum over `Lambda` of `dim ker rho(Delta)`.
//! Kernels are located numerically and then confirmed by an exact rank over
//! the cyclotomic field `Q(zeta_N)`, realised as an integer matrix.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::caps::Caps;
use crate::covers::instantiate;
use crate::error::{Error, Result};
use crate::group_ring::{EquivariantChainComplex, GroupRingElement, GroupRingMatrix};
use crate::groups::{quotient, FiniteQuotient, Group, GroupElement, Subgroup};
use crate::linalg::{rank, IntMatrix};

/// Eigenvalues of `rho(Delta)` below this count towards the kernel.
pub const KERNEL_TOL: f64 = 1e-8;
/// Eigenvalues inside this band are settled by exact arithmetic only.
pub const AMBIGUOUS_BAND: (f64, f64) = (1e-9, 1e-7);
/// Largest matrix accepted by [`determinant`].
pub const DETERMINANT_CAP: usize = 8;

/// Integer Laurent polynomial in `n` variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentPolynomial {
    vars: usize,
    terms: BTreeMap<Vec<i64>, BigInt>,
}

impl LaurentPolynomial {
    pub fn zero(vars: usize) -> Self {
        LaurentPolynomial { vars, terms: BTreeMap::new() }
    }

    pub fn one(vars: usize) -> Self {
        Self::from_terms(vars, [(vec![0; vars], BigInt::one())])
    }

    pub fn from_terms(vars: usize, terms: impl IntoIterator<Item = (Vec<i64>, BigInt)>) -> Self {
        let mut out = Self::zero(vars);
        for (e, c) in terms {
            assert_eq!(e.len(), vars, "exponent length");
            out.add_term(e, c);
        }
        out
    }

    fn add_term(&mut self, e: Vec<i64>, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e.clone()).or_insert_with(BigInt::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn from_group_ring(vars: usize, e: &GroupRingElement) -> Result<Self> {
        let mut out = Self::zero(vars);
        for (g, c) in e.terms() {
            match g {
                GroupElement::Abelian(v) if v.len() == vars => out.add_term(v.clone(), c.clone()),
                _ => return Err(Error::NotAbelian),
            }
        }
        Ok(out)
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, &BigInt)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        LaurentPolynomial {
            vars: self.vars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.vars);
        for (e, a) in &self.terms {
            for (f, b) in &other.terms {
                out.add_term(e.iter().zip(f).map(|(x, y)| x + y).collect(), a * b);
            }
        }
        out
    }

    /// Sum of the coefficients, i.e. the value at the trivial character.
    pub fn coefficient_sum(&self) -> BigInt {
        self.terms.values().sum()
    }

    /// Value at the character with coordinates `x`.
    pub fn eval(&self, x: &[f64]) -> Complex64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                let phase: f64 = e.iter().zip(x).map(|(&k, &t)| k as f64 * t).sum();
                Complex64::from_polar(c.to_f64().unwrap_or(f64::NAN), std::f64::consts::TAU * phase)
            })
            .sum()
    }

    /// `max - min` exponent of a one-variable polynomial.
    pub fn span(&self) -> Option<u64> {
        if self.vars != 1 {
            return None;
        }
        let lo = self.terms.keys().map(|e| e[0]).min()?;
        let hi = self.terms.keys().map(|e| e[0]).max()?;
        Some(hi.abs_diff(lo))
    }
}

impl fmt::Display for LaurentPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mono: Vec<String> = e
                    .iter()
                    .enumerate()
                    .filter(|(_, &k)| k != 0)
                    .map(|(i, &k)| if k == 1 { format!("g{}", i + 1) } else { format!("g{}^{k}", i + 1) })
                    .collect();
                if mono.is_empty() {
                    c.to_string()
                } else {
                    format!("{c}*{}", mono.join("*"))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Exact determinant of a square matrix over `Z[Z^n]`, by expansion over
/// column subsets.
pub fn determinant(m: &GroupRingMatrix) -> Result<LaurentPolynomial> {
    let vars = m.group().rank().ok_or(Error::NotAbelian)?;
    if !m.is_square() {
        return Err(Error::Invalid("determinant of a non-square matrix".into()));
    }
    let n = m.rows();
    if n > DETERMINANT_CAP {
        return Err(Error::SizeCapExceeded { size: n, cap: DETERMINANT_CAP });
    }
    let entries: Vec<LaurentPolynomial> = m
        .entries()
        .iter()
        .map(|e| LaurentPolynomial::from_group_ring(vars, e))
        .collect::<Result<_>>()?;
    // partial[mask]: signed sum over bijections from the first |mask| rows onto mask.
    let mut partial = vec![LaurentPolynomial::zero(vars); 1 << n];
    partial[0] = LaurentPolynomial::one(vars);
    for mask in 0usize..(1 << n) {
        if partial[mask].is_zero() {
            continue;
        }
        let row = mask.count_ones() as usize;
        if row == n {
            continue;
        }
        for col in (0..n).filter(|c| mask & (1 << c) == 0) {
            let entry = &entries[row * n + col];
            if entry.is_zero() {
                continue;
            }
            let later = (mask >> (col + 1)).count_ones();
            let mut term = partial[mask].mul(entry);
            if later % 2 == 1 {
                term = term.neg();
            }
            partial[mask | (1 << col)] = partial[mask | (1 << col)].add(&term);
        }
    }
    Ok(partial.pop().expect("nonempty table"))
}

/// A character of `Z^n` with rational coordinates in `[0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Character {
    coords: Vec<BigRational>,
}

impl Character {
    pub fn new(coords: Vec<BigRational>) -> Character {
        let one = BigInt::one();
        Character {
            coords: coords
                .into_iter()
                .map(|c| {
                    let f = c.floor();
                    let r = c - f;
                    debug_assert!(r < BigRational::from_integer(one.clone()));
                    r
                })
                .collect(),
        }
    }

    pub fn coords(&self) -> &[BigRational] {
        &self.coords
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coords.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect()
    }

    /// Order of the character: least common multiple of the denominators.
    pub fn order(&self) -> u64 {
        self.coords
            .iter()
            .map(|c| c.denom().to_u64().expect("denominator fits"))
            .fold(1, |acc, d| acc.lcm(&d))
    }

    /// `N <x, g> mod N` with `N` the order, so `rho(g) = zeta_N^k`.
    pub fn exponent(&self, g: &[i64]) -> u64 {
        let n = self.order();
        let pairing: BigRational = self
            .coords
            .iter()
            .zip(g)
            .map(|(c, &k)| c * BigRational::from_integer(k.into()))
            .sum();
        let scaled = pairing * BigRational::from_integer(n.into());
        debug_assert!(scaled.is_integer());
        scaled.to_integer().mod_floor(&BigInt::from(n)).to_u64().expect("fits")
    }

    pub fn kills(&self, g: &[i64]) -> bool {
        self.exponent(g) == 0
    }

    pub fn add(&self, other: &Character) -> Character {
        Character::new(self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect())
    }

    /// `k x` reduced mod 1.
    pub fn scale(&self, k: u64) -> Character {
        let k = BigRational::from_integer(k.into());
        Character::new(self.coords.iter().map(|c| c * &k).collect())
    }

    /// Value of `rho(g)`.
    pub fn eval(&self, g: &[i64]) -> Complex64 {
        let n = self.order();
        Complex64::from_polar(1.0, std::f64::consts::TAU * self.exponent(g) as f64 / n as f64)
    }
}

impl fmt::Display for Character {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// The characters of `Z^n` trivial on `G'`, in the order of the quotient's
/// elements under the duality given by the Smith form.
pub fn character_lattice(q: &FiniteQuotient) -> Result<Vec<Character>> {
    let (rows, moduli) = q.abelian_projection().ok_or(Error::NotAbelian)?;
    let vars = q.group().rank().ok_or(Error::NotAbelian)?;
    Ok((0..q.order())
        .map(|idx| {
            let residues = q.residues(idx).expect("abelian");
            let coords = (0..vars)
                .map(|j| {
                    rows.iter()
                        .zip(moduli)
                        .zip(&residues)
                        .map(|((row, &d), &k)| BigRational::new(BigInt::from(k) * row[j], BigInt::from(d)))
                        .sum()
                })
                .collect();
            Character::new(coords)
        })
        .collect())
}

fn character_matrix(lap: &GroupRingMatrix, chi: &Character) -> DMatrix<Complex64> {
    let a = lap.rows();
    DMatrix::from_fn(a, a, |r, c| {
        lap.get(r, c)
            .terms()
            .map(|(g, coeff)| {
                let GroupElement::Abelian(v) = g else { unreachable!("abelian complex") };
                chi.eval(v) * coeff.to_f64().unwrap_or(f64::NAN)
            })
            .sum()
    })
}

/// Eigenvalues of the Hermitian matrix `rho(Delta)`, ascending.
pub fn character_spectrum(lap: &GroupRingMatrix, chi: &Character) -> Vec<f64> {
    if lap.rows() == 0 {
        return Vec::new();
    }
    let mut eig: Vec<f64> = character_matrix(lap, chi).symmetric_eigenvalues().iter().copied().collect();
    eig.sort_by(f64::total_cmp);
    eig
}

/// Coefficients of the cyclotomic polynomial `Phi_n`, lowest degree first.
pub fn cyclotomic(n: u64) -> Vec<i64> {
    // x^n - 1 divided by Phi_d for every proper divisor d.
    let mut poly = vec![0i64; n as usize + 1];
    poly[0] = -1;
    poly[n as usize] = 1;
    for d in (1..n).filter(|d| n.is_multiple_of(*d)) {
        poly = divide_monic(&poly, &cyclotomic(d));
    }
    poly
}

fn divide_monic(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let mut quot = vec![0i64; rem.len() - dd];
    for k in (0..quot.len()).rev() {
        let c = rem[k + dd];
        quot[k] = c;
        for (j, &b) in den.iter().enumerate() {
            rem[k + j] -= c * b;
        }
    }
    debug_assert!(rem.iter().all(|&v| v == 0), "inexact cyclotomic division");
    quot
}

/// Kernel dimension of `rho(Delta)` over `Q(zeta_N)`, via the rational rank
/// of its `a phi(N)` square integer realisation.
pub fn exact_character_kernel(lap: &GroupRingMatrix, chi: &Character) -> Result<usize> {
    let a = lap.rows();
    let n = chi.order();
    let phi_poly = cyclotomic(n);
    let phi = phi_poly.len() - 1;
    // powers[k] = zeta^k in the basis 1, zeta, ..., zeta^{phi-1}
    let mut powers: Vec<Vec<i64>> = Vec::with_capacity(n as usize);
    let mut cur = vec![0i64; phi];
    cur[0] = 1;
    for _ in 0..n {
        powers.push(cur.clone());
        let top = cur[phi - 1];
        let mut next = vec![0i64; phi];
        for j in (1..phi).rev() {
            next[j] = cur[j - 1];
        }
        for j in 0..phi {
            next[j] = next[j].checked_sub(top.checked_mul(phi_poly[j]).ok_or(Error::Overflow)?).ok_or(Error::Overflow)?;
        }
        cur = next;
    }
    let mut m = IntMatrix::zeros(a * phi, a * phi);
    for r in 0..a {
        for c in 0..a {
            for (g, coeff) in lap.get(r, c).terms() {
                let GroupElement::Abelian(v) = g else { return Err(Error::NotAbelian) };
                let coeff = coeff.to_i64().ok_or(Error::Overflow)?;
                let e = chi.exponent(v);
                for t in 0..phi {
                    let column = &powers[((e + t as u64) % n) as usize];
                    for (s, &w) in column.iter().enumerate() {
                        if w != 0 {
                            m.add_at(r * phi + s, c * phi + t, coeff.checked_mul(w).ok_or(Error::Overflow)?)?;
                        }
                    }
                }
            }
        }
    }
    let rk = rank(&m);
    debug_assert_eq!(rk % phi, 0, "rank over Q(zeta) must be integral");
    Ok(a - rk / phi)
}

/// One character of `Lambda` on the pattern.
#[derive(Clone, Debug, PartialEq)]
pub struct PatternPoint {
    pub character: Character,
    /// Kernel dimension from the eigenvalues.
    pub numeric_kernel: usize,
    /// Kernel dimension over the cyclotomic field.
    pub kernel: usize,
    /// Smallest eigenvalue of `rho(Delta)`.
    pub min_eigenvalue: f64,
}

/// Betti number of a cover computed character by character.
#[derive(Clone, Debug, PartialEq)]
pub struct PatternReport {
    /// Characters in `Lambda` meeting the pattern `K`.
    pub points: Vec<PatternPoint>,
    pub lattice_size: usize,
    pub cells: usize,
    /// Sum of the exact kernel dimensions.
    pub character_sum: usize,
    /// Betti number of the cover by exact rank.
    pub exact: usize,
    pub agrees: bool,
    /// Characters with an eigenvalue inside the ambiguity band.
    pub ambiguous: usize,
    /// Characters whose numeric and exact kernels differ.
    pub numeric_mismatches: usize,
}

impl PatternReport {
    /// The Betti number, with the exact rank taking precedence.
    pub fn betti(&self) -> usize {
        self.exact
    }

    pub fn pattern_count(&self) -> usize {
        self.points.len()
    }

    pub fn diagnostics(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.agrees {
            out.push(format!(
                "character sum {} differs from exact Betti number {}",
                self.character_sum, self.exact
            ));
        }
        if self.ambiguous > 0 {
            out.push(format!("{} characters had eigenvalues in the ambiguity band", self.ambiguous));
        }
        if self.numeric_mismatches > 0 {
            out.push(format!("{} numeric kernels were corrected exactly", self.numeric_mismatches));
        }
        out
    }
}

/// Galois orbit representative of `chi` inside the lattice: the smallest
/// element of `{k chi : gcd(k, N) = 1}`.
fn orbit_key(chi: &Character) -> Character {
    let n = chi.order();
    (1..=n)
        .filter(|k| k.gcd(&n) == 1)
        .map(|k| chi.scale(k))
        .min()
        .expect("1 is a unit")
}

pub fn betti_by_characters(
    cx: &EquivariantChainComplex,
    q: &FiniteQuotient,
    dim: usize,
    caps: &Caps,
) -> Result<PatternReport> {
    if !cx.group().is_abelian() {
        return Err(Error::NotAbelian);
    }
    let lap = cx.laplacian(dim)?;
    let lattice = character_lattice(q)?;
    let spectra: Vec<Vec<f64>> = lattice.par_iter().map(|chi| character_spectrum(&lap, chi)).collect();

    let needs_exact = |eig: &[f64]| {
        eig.iter()
            .any(|&e| e < KERNEL_TOL || (AMBIGUOUS_BAND.0..=AMBIGUOUS_BAND.1).contains(&e))
    };
    let mut orbits: HashMap<Character, usize> = HashMap::new();
    for (chi, eig) in lattice.iter().zip(&spectra) {
        if needs_exact(eig) {
            orbits.entry(orbit_key(chi)).or_insert(0);
        }
    }
    let keys: Vec<Character> = orbits.keys().cloned().collect();
    let kernels = keys
        .par_iter()
        .map(|chi| exact_character_kernel(&lap, chi))
        .collect::<Result<Vec<_>>>()?;
    for (k, v) in keys.into_iter().zip(kernels) {
        orbits.insert(k, v);
    }

    let mut points = Vec::new();
    let mut ambiguous = 0;
    let mut numeric_mismatches = 0;
    for (chi, eig) in lattice.iter().zip(&spectra) {
        let numeric_kernel = eig.iter().filter(|&&e| e < KERNEL_TOL).count();
        if eig
            .iter()
            .any(|&e| (AMBIGUOUS_BAND.0..=AMBIGUOUS_BAND.1).contains(&e))
        {
            ambiguous += 1;
        }
        let kernel = if needs_exact(eig) { orbits[&orbit_key(chi)] } else { 0 };
        if kernel != numeric_kernel {
            numeric_mismatches += 1;
        }
        if kernel > 0 {
            points.push(PatternPoint {
                character: chi.clone(),
                numeric_kernel,
                kernel,
                min_eigenvalue: eig.first().copied().unwrap_or(0.0),
            });
        }
    }
    let character_sum = points.iter().map(|p| p.kernel).sum();
    let exact = instantiate(cx, q, caps)?.betti(dim)?;
    Ok(PatternReport {
        points,
        lattice_size: lattice.len(),
        cells: cx.cell_count(dim),
        character_sum,
        exact,
        agrees: character_sum == exact,
        ambiguous,
        numeric_mismatches,
    })
}

/// `|Lambda cap K| <= b <= a |Lambda cap K|`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SandwichReport {
    pub pattern_count: usize,
    pub betti: usize,
    pub cells: usize,
    pub holds: bool,
}

pub fn sandwich_check(
    cx: &EquivariantChainComplex,
    q: &FiniteQuotient,
    dim: usize,
    caps: &Caps,
) -> Result<SandwichReport> {
    let report = betti_by_characters(cx, q, dim, caps)?;
    let pattern_count = report.pattern_count();
    let betti = report.betti();
    let cells = report.cells;
    Ok(SandwichReport {
        pattern_count,
        betti,
        cells,
        holds: pattern_count <= betti && betti <= cells * pattern_count,
    })
}

/// Growth of `b(X_i)` along the cyclic covers of a complex over `Z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Growth {
    LinearGrowth,
    BoundedBy(u64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dichotomy {
    pub growth: Growth,
    pub determinant: LaurentPolynomial,
    /// `(i, b(X_i))` for the enumerated covers.
    pub witness: Vec<(u64, usize)>,
}

/// Decides the dichotomy from `det Delta`: linear growth exactly when it
/// vanishes, otherwise `b(X_i) <= span(det) * a` for all `i`. The witness
/// lists the Betti numbers of the covers `Z / i` for `i = 1..=witness_up_to`.
pub fn z_dichotomy(cx: &EquivariantChainComplex, dim: usize, witness_up_to: u64, caps: &Caps) -> Result<Dichotomy> {
    if cx.group().rank() != Some(1) {
        return Err(if cx.group().is_abelian() { Error::NotRankOne } else { Error::NotAbelian });
    }
    let det = determinant(&cx.laplacian(dim)?)?;
    let growth = match det.span() {
        None => Growth::LinearGrowth,
        Some(span) => Growth::BoundedBy(span * cx.cell_count(dim) as u64),
    };
    let witness = (1..=witness_up_to)
        .map(|i| {
            let quo = quotient(cx.group(), &Subgroup::cyclic(i as i64), caps)?;
            Ok((i, instantiate(cx, &quo, caps)?.betti(dim)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Dichotomy {
        growth,
        determinant: det,
        witness,
    })
}

/// Whether `det Delta_q` is not identically zero, which for `Z^n` is
/// equivalent to the vanishing of the L2 Betti number.
pub fn l2_betti_vanishes(cx: &EquivariantChainComplex, dim: usize) -> Result<bool> {
    let lap = cx.laplacian(dim)?;
    if lap.rows() == 0 {
        return Ok(true);
    }
    Ok(!determinant(&lap)?.is_zero())
}

/// Shorthand for the character lattice of `group / sub`.
pub fn lattice_of(group: &Group, sub: &Subgroup, caps: &Caps) -> Result<Vec<Character>> {
    character_lattice(&quotient(group, sub, caps)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(n: usize) -> Group {
        Group::free_abelian(n).unwrap()
    }

    fn elem(terms: &[(i64, i64)]) -> GroupRingElement {
        GroupRingElement::from_terms(terms.iter().map(|&(k, c)| (GroupElement::Abelian(vec![k]), BigInt::from(c))))
    }

    fn complex_1d(d: GroupRingElement) -> EquivariantChainComplex {
        let m = GroupRingMatrix::from_entries(&z(1), 1, 1, vec![d]).unwrap();
        EquivariantChainComplex::new(z(1), vec![1, 1], vec![m]).unwrap()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(cyclotomic(1), vec![-1, 1]);
        assert_eq!(cyclotomic(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic(12), vec![1, 0, -1, 0, 1]);
        assert_eq!(cyclotomic(105).len() - 1, 48);
    }

    #[test]
    fn determinant_of_scalar_and_diagonal() {
        let circle = complex_1d(elem(&[(1, 1), (0, -1)]));
        let lap = circle.laplacian(0).unwrap();
        let det = determinant(&lap).unwrap();
        assert_eq!(det, LaurentPolynomial::from_group_ring(1, lap.get(0, 0)).unwrap());
        let u = elem(&[(1, 2), (0, 1)]);
        let v = elem(&[(-1, 3)]);
        let m = GroupRingMatrix::from_entries(&z(1), 2, 2, vec![u.clone(), GroupRingElement::zero(), GroupRingElement::zero(), v.clone()]).unwrap();
        assert_eq!(determinant(&m).unwrap(), LaurentPolynomial::from_group_ring(1, &u.mul(&v)).unwrap());
    }

    #[test]
    fn lattices() {
        let chars = lattice_of(&z(2), &Subgroup::diagonal(&[2, 3]), &Caps::default()).unwrap();
        assert_eq!(chars.len(), 6);
        let mut coords: Vec<(BigRational, BigRational)> =
            chars.iter().map(|c| (c.coords()[0].clone(), c.coords()[1].clone())).collect();
        coords.sort();
        let mut expected: Vec<(BigRational, BigRational)> =
            (0..2).flat_map(|j| (0..3).map(move |k| (q(j, 2), q(k, 3)))).collect();
        expected.sort();
        assert_eq!(coords, expected);

        let skew = Subgroup::lattice(vec![vec![2, 1], vec![0, 3]]).unwrap();
        let chars = lattice_of(&z(2), &skew, &Caps::default()).unwrap();
        assert_eq!(chars.len(), 6);
        for chi in &chars {
            assert!(chi.kills(&[2, 0]) && chi.kills(&[1, 3]));
        }
        let mut dedup = chars.clone();
        dedup.sort();
        dedup.dedup();
        assert_eq!(dedup.len(), 6);
        assert!(chars.iter().all(|a| chars.iter().all(|b| chars.contains(&a.add(b)))));
    }

    #[test]
    fn circle_and_gap_by_characters() {
        let caps = Caps::default();
        let circle = complex_1d(elem(&[(1, 1), (0, -1)]));
        let gap = complex_1d(elem(&[(0, 2), (1, -1)]));
        for i in [1, 2, 7, 12] {
            let quo = quotient(&z(1), &Subgroup::cyclic(i), &caps).unwrap();
            let r = betti_by_characters(&circle, &quo, 1, &caps).unwrap();
            assert_eq!((r.character_sum, r.exact, r.pattern_count()), (1, 1, 1));
            assert!(r.points[0].character.coords()[0].is_zero());
            let r = betti_by_characters(&gap, &quo, 1, &caps).unwrap();
            assert_eq!((r.character_sum, r.exact), (0, 0));
        }
    }

    #[test]
    fn exact_kernels_over_cyclotomic_fields() {
        // 1 + g + g^2 vanishes at primitive cube roots of unity.
        let lap = GroupRingMatrix::from_entries(&z(1), 1, 1, vec![elem(&[(0, 1), (1, 1), (2, 1)])]).unwrap();
        let third = Character::new(vec![q(1, 3)]);
        assert_eq!(exact_character_kernel(&lap, &third).unwrap(), 1);
        let half = Character::new(vec![q(1, 2)]);
        assert_eq!(exact_character_kernel(&lap, &half).unwrap(), 0);
    }

    #[test]
    fn dichotomy() {
        let caps = Caps::default();
        let circle = complex_1d(elem(&[(1, 1), (0, -1)]));
        let d = z_dichotomy(&circle, 1, 20, &caps).unwrap();
        assert_eq!(d.growth, Growth::BoundedBy(2));
        assert!(d.witness.iter().all(|&(_, b)| b == 1));
        let zero = complex_1d(GroupRingElement::zero());
        let d = z_dichotomy(&zero, 1, 10, &caps).unwrap();
        assert_eq!(d.growth, Growth::LinearGrowth);
        assert!(d.witness.iter().all(|&(i, b)| b as u64 == i));
        let torus = EquivariantChainComplex::new(z(2), vec![1], vec![]).unwrap();
        assert_eq!(z_dichotomy(&torus, 0, 1, &caps).unwrap_err(), Error::NotRankOne);
    }
}
