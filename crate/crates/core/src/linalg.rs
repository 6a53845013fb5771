//! Exact integer linear algebra: dense integer matrices, certified rational
//! rank, and Smith normal form for small lattice bases.
//!
//! Ranks over the rationals are computed modulo large primes. A single prime
//! only gives a lower bound, so enough primes are used that their product
//! exceeds the Hadamard bound on every maximal minor; at least one of them
//! then fails to divide a nonzero maximal minor and the largest modular rank
//! is the rational rank.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Dense row-major integer matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> IntMatrix {
        IntMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> IntMatrix {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<IntMatrix> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Invalid("ragged integer matrix".into()));
        }
        Ok(IntMatrix {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> i64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: i64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn add_at(&mut self, r: usize, c: usize, v: i64) -> Result<()> {
        let slot = &mut self.data[r * self.cols + c];
        *slot = slot.checked_add(v).ok_or(Error::Overflow)?;
        Ok(())
    }

    pub fn row(&self, r: usize) -> &[i64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|r| (0..r).all(|c| self.get(r, c) == self.get(c, r)))
    }

    /// Checked product; skips zero entries of the left factor.
    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(Error::Invalid(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a == 0 {
                    continue;
                }
                for c in 0..other.cols {
                    let b = other.get(k, c);
                    if b != 0 {
                        let p = a.checked_mul(b).ok_or(Error::Overflow)?;
                        out.add_at(r, c, p)?;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn trace(&self) -> i64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    pub fn to_f64_rows(&self) -> Vec<f64> {
        self.data.iter().map(|&v| v as f64).collect()
    }

    /// log2 of the Hadamard bound on every minor, the smaller of the row and
    /// column versions.
    fn hadamard_log2(&self) -> f64 {
        let row_bound: f64 = (0..self.rows)
            .map(|r| norm_sq(self.row(r)))
            .filter(|&s| s > 0.0)
            .map(|s| 0.5 * s.log2())
            .sum();
        let col_bound: f64 = (0..self.cols)
            .map(|c| (0..self.rows).map(|r| (self.get(r, c) as f64).powi(2)).sum::<f64>())
            .filter(|&s| s > 0.0)
            .map(|s| 0.5 * s.log2())
            .sum();
        row_bound.min(col_bound)
    }
}

fn norm_sq(row: &[i64]) -> f64 {
    row.iter().map(|&v| (v as f64) * (v as f64)).sum()
}

/// Exact traces `Tr(m^k)` for `k = 0..=degree` of a square integer matrix,
/// computed modulo enough primes to pin each value by the Chinese remainder
/// theorem.
pub fn power_traces(m: &IntMatrix, degree: usize) -> Vec<BigInt> {
    let n = m.rows();
    assert_eq!(n, m.cols(), "power traces need a square matrix");
    let row_l1 = (0..n)
        .map(|r| m.row(r).iter().map(|v| v.unsigned_abs() as f64).sum::<f64>())
        .fold(1.0f64, f64::max);
    // |Tr(m^k)| <= n * row_l1^k; one extra bit for the sign.
    let bits = (n.max(1) as f64).log2() + degree as f64 * row_l1.log2() + 2.0;
    let count = ((bits / 61.0).ceil() as usize).max(1);
    assert!(count <= primes().len(), "trace magnitude beyond the prime table");
    let ps = &primes()[..count];
    let residues: Vec<Vec<u64>> = ps.par_iter().map(|&p| power_traces_mod(m, degree, p)).collect();
    (0..=degree)
        .map(|k| {
            let mut value = BigInt::zero();
            let mut modulus = BigInt::one();
            for (r, &p) in residues.iter().zip(ps) {
                let p_big = BigInt::from(p);
                let current = value.mod_floor(&p_big).to_u64().expect("residue fits");
                let inv = mod_inv((modulus.clone() % &p_big).to_u64().expect("residue fits"), p);
                let t = mul_mod(sub_mod(r[k], current, p), inv, p);
                value += &modulus * BigInt::from(t);
                modulus *= p_big;
            }
            if &value * 2 > modulus {
                value -= modulus;
            }
            value
        })
        .collect()
}

fn power_traces_mod(m: &IntMatrix, degree: usize, p: u64) -> Vec<u64> {
    let n = m.rows();
    let sparse: Vec<Vec<(usize, u64)>> = (0..n)
        .map(|k| {
            m.row(k)
                .iter()
                .enumerate()
                .filter(|(_, &v)| v != 0)
                .map(|(c, &v)| (c, reduce(v, p)))
                .collect()
        })
        .collect();
    let mut power = vec![0u64; n * n];
    for i in 0..n {
        power[i * n + i] = 1;
    }
    let mut out = vec![(n as u64) % p];
    for _ in 0..degree {
        let mut next = vec![0u64; n * n];
        for r in 0..n {
            for (k, entries) in sparse.iter().enumerate() {
                let a = power[r * n + k];
                if a == 0 {
                    continue;
                }
                for &(c, b) in entries {
                    let slot = &mut next[r * n + c];
                    *slot = (*slot + mul_mod(a, b, p)) % p;
                }
            }
        }
        power = next;
        out.push((0..n).fold(0u64, |acc, i| (acc + power[i * n + i]) % p));
    }
    out
}

// ---------------------------------------------------------------------------
// Rank over the rationals.

const SMALL_RANK_SIDE: usize = 24;

/// Exact rank over the rationals.
pub fn rank(m: &IntMatrix) -> usize {
    if m.rows.min(m.cols) <= SMALL_RANK_SIDE {
        return rank_fraction_free(m);
    }
    rank_multimodular(m)
}

/// Rank by fraction-free (Bareiss) elimination over arbitrary precision
/// integers.
pub fn rank_fraction_free(m: &IntMatrix) -> usize {
    let mut a: Vec<Vec<BigInt>> = (0..m.rows)
        .map(|r| m.row(r).iter().map(|&v| BigInt::from(v)).collect())
        .collect();
    let (rows, cols) = (m.rows, m.cols);
    let mut prev = BigInt::from(1);
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(pivot) = (rank..rows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(rank, pivot);
        for r in rank + 1..rows {
            for c in col + 1..cols {
                let v = &a[rank][col] * &a[r][c] - &a[r][col] * &a[rank][c];
                a[r][c] = v / &prev;
            }
            a[r][col] = BigInt::zero();
        }
        prev = a[rank][col].clone();
        rank += 1;
    }
    rank
}

/// Rank via modular elimination, certified by the Hadamard bound.
pub fn rank_multimodular(m: &IntMatrix) -> usize {
    let full = m.rows.min(m.cols);
    if full == 0 {
        return 0;
    }
    let primes = primes();
    let first = rank_mod_p(m, primes[0]);
    if first == full {
        return first;
    }
    let needed = (m.hadamard_log2() / 61.0).floor() as usize + 1;
    if needed > primes.len() {
        // Beyond the prime table: fall back to exact integer elimination.
        return rank_fraction_free(m);
    }
    let rest = primes[1..needed.max(1)]
        .par_iter()
        .map(|&p| rank_mod_p(m, p))
        .max()
        .unwrap_or(0);
    first.max(rest)
}

/// Rank of `m` reduced modulo the prime `p`.
pub fn rank_mod_p(m: &IntMatrix, p: u64) -> usize {
    let cols = m.cols;
    let mut rows: Vec<Vec<u64>> = (0..m.rows)
        .map(|r| m.row(r).iter().map(|&v| reduce(v, p)).collect())
        .filter(|row: &Vec<u64>| row.iter().any(|&v| v != 0))
        .collect();
    let mut active: Vec<usize> = (0..rows.len()).collect();
    let mut rank = 0;
    let mut support = Vec::with_capacity(cols);
    for col in 0..cols {
        if active.is_empty() {
            break;
        }
        // Prefer the pivot row with the fewest nonzeros to limit fill-in.
        let mut best: Option<(usize, usize)> = None;
        for (pos, &r) in active.iter().enumerate() {
            if rows[r][col] != 0 {
                let weight = rows[r][col..].iter().filter(|&&v| v != 0).count();
                if best.is_none_or(|(_, w)| weight < w) {
                    best = Some((pos, weight));
                }
            }
        }
        let Some((pos, _)) = best else { continue };
        let pivot = active.swap_remove(pos);
        rank += 1;
        let inv = mod_inv(rows[pivot][col], p);
        support.clear();
        support.extend((col + 1..cols).filter(|&c| rows[pivot][c] != 0));
        let pivot_row = std::mem::take(&mut rows[pivot]);
        for &r in &active {
            let lead = rows[r][col];
            if lead == 0 {
                continue;
            }
            let factor = mul_mod(lead, inv, p);
            let target = &mut rows[r];
            target[col] = 0;
            for &c in &support {
                let sub = mul_mod(factor, pivot_row[c], p);
                target[c] = sub_mod(target[c], sub, p);
            }
        }
    }
    rank
}

#[inline]
fn reduce(v: i64, p: u64) -> u64 {
    (v as i128).rem_euclid(p as i128) as u64
}

#[inline]
fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

#[inline]
fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + (p - b)
    }
}

fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

fn mod_inv(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

/// Deterministic Miller-Rabin, valid for every 64-bit input.
fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &b in &BASES {
        if n.is_multiple_of(b) {
            return n == b;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

const PRIME_TABLE_LEN: usize = 256;

/// Descending primes just below 2^62.
fn primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let mut out = Vec::with_capacity(PRIME_TABLE_LEN);
        let mut n = (1u64 << 62) - 1;
        while out.len() < PRIME_TABLE_LEN {
            if is_prime(n) {
                out.push(n);
            }
            n -= 2;
        }
        out
    })
}

// ---------------------------------------------------------------------------
// Smith normal form.

/// Smith normal form `P * S * Q = diag(d_1, ..., d_n)` of a square integer
/// matrix. Only the row transformation `P` is retained: a vector `v` lies in
/// the column lattice of `S` exactly when `(P v)_i` is divisible by `d_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithForm {
    pub diagonal: Vec<i64>,
    pub left: Vec<Vec<i64>>,
}

pub fn smith_normal_form(matrix: &[Vec<i64>]) -> Result<SmithForm> {
    let n = matrix.len();
    if matrix.iter().any(|r| r.len() != n) {
        return Err(Error::Invalid("Smith normal form needs a square matrix".into()));
    }
    let mut a: Vec<Vec<i128>> = matrix
        .iter()
        .map(|r| r.iter().map(|&v| v as i128).collect())
        .collect();
    let mut left: Vec<Vec<i128>> = (0..n)
        .map(|i| (0..n).map(|j| i128::from(i == j)).collect())
        .collect();

    for t in 0..n {
        loop {
            // Smallest nonzero entry of the trailing block becomes the pivot.
            let mut best: Option<(usize, usize)> = None;
            for i in t..n {
                for j in t..n {
                    if a[i][j] != 0
                        && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                break;
            };
            a.swap(t, pi);
            left.swap(t, pi);
            for row in a.iter_mut() {
                row.swap(t, pj);
            }

            let mut clean = true;
            for i in t + 1..n {
                let q = a[i][t].div_euclid(a[t][t]);
                if q != 0 {
                    row_axpy(&mut a, i, t, q)?;
                    row_axpy(&mut left, i, t, q)?;
                }
                if a[i][t] != 0 {
                    clean = false;
                }
            }
            for j in t + 1..n {
                let q = a[t][j].div_euclid(a[t][t]);
                if q != 0 {
                    for row in a.iter_mut() {
                        row[j] = row[j]
                            .checked_sub(q.checked_mul(row[t]).ok_or(Error::Overflow)?)
                            .ok_or(Error::Overflow)?;
                    }
                }
                if a[t][j] != 0 {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // Divisibility: fold an offending row into the pivot row.
            let offending = (t + 1..n).find(|&i| (t + 1..n).any(|j| a[i][j] % a[t][t] != 0));
            match offending {
                Some(i) => {
                    row_axpy(&mut a, t, i, -1)?;
                    row_axpy(&mut left, t, i, -1)?;
                }
                None => break,
            }
        }
        if a[t][t] < 0 {
            for v in a[t].iter_mut() {
                *v = -*v;
            }
            for v in left[t].iter_mut() {
                *v = -*v;
            }
        }
    }

    let narrow = |v: i128| i64::try_from(v).map_err(|_| Error::Overflow);
    Ok(SmithForm {
        diagonal: (0..n).map(|i| narrow(a[i][i])).collect::<Result<_>>()?,
        left: left
            .into_iter()
            .map(|r| r.into_iter().map(narrow).collect::<Result<_>>())
            .collect::<Result<_>>()?,
    })
}

/// `rows[target] -= q * rows[source]`
fn row_axpy(rows: &mut [Vec<i128>], target: usize, source: usize, q: i128) -> Result<()> {
    let n = rows[target].len();
    for j in 0..n {
        let s = q.checked_mul(rows[source][j]).ok_or(Error::Overflow)?;
        rows[target][j] = rows[target][j].checked_sub(s).ok_or(Error::Overflow)?;
    }
    Ok(())
}

/// |det| of a small integer matrix, by fraction-free elimination.
pub fn abs_determinant(matrix: &[Vec<i64>]) -> BigInt {
    let n = matrix.len();
    let mut a: Vec<Vec<BigInt>> = matrix
        .iter()
        .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
        .collect();
    let mut prev = BigInt::from(1);
    for k in 0..n {
        let Some(p) = (k..n).find(|&r| !a[r][k].is_zero()) else {
            return BigInt::zero();
        };
        a.swap(k, p);
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[k][k] * &a[i][j] - &a[i][k] * &a[k][j];
                a[i][j] = v.div_floor(&prev);
            }
        }
        prev = a[k][k].clone();
    }
    if n == 0 {
        BigInt::from(1)
    } else {
        a[n - 1][n - 1].abs()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn prime_table_is_prime_and_large() {
        let p = primes();
        assert_eq!(p.len(), PRIME_TABLE_LEN);
        assert!(p.iter().all(|&q| q > (1 << 61) && is_prime(q)));
        assert!(!is_prime(561) && is_prime(1_000_000_007));
    }

    #[test]
    fn circulant_of_g_minus_one_has_corank_one() {
        let n = 60;
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, -1);
            m.set(i, (i + 1) % n, 1);
        }
        assert_eq!(rank(&m), n - 1);
        assert_eq!(rank_fraction_free(&m), n - 1);
    }

    #[test]
    fn modular_rank_drops_only_for_dividing_primes() {
        // diag(1, 7): rank 2 over Q, rank 1 mod 7.
        let m = IntMatrix::from_rows(&[vec![1, 0], vec![0, 7]]).unwrap();
        assert_eq!(rank_mod_p(&m, 7), 1);
        assert_eq!(rank(&m), 2);
    }

    #[test]
    fn smith_form_of_triangular_basis() {
        let s = smith_normal_form(&[vec![2, 1], vec![0, 3]]).unwrap();
        assert_eq!(s.diagonal, vec![1, 6]);
    }

    #[test]
    fn smith_form_detects_singular() {
        let s = smith_normal_form(&[vec![2, 4], vec![1, 2]]).unwrap();
        assert!(s.diagonal.contains(&0));
    }

    #[test]
    fn determinant_matches_hand_values() {
        assert_eq!(abs_determinant(&[vec![2, 1], vec![0, 3]]), BigInt::from(6));
        assert_eq!(abs_determinant(&[vec![0, 1], vec![1, 0]]), BigInt::from(1));
    }

    #[test]
    fn power_traces_match_naive_products() {
        let m = IntMatrix::from_rows(&[vec![5, -2, -2], vec![-2, 5, -2], vec![-2, -2, 5]]).unwrap();
        let traces = power_traces(&m, 30);
        let mut naive: Vec<Vec<BigInt>> = (0..3)
            .map(|i| (0..3).map(|j| BigInt::from(u8::from(i == j))).collect())
            .collect();
        for tr in &traces {
            assert_eq!(*tr, (0..3).map(|i| naive[i][i].clone()).sum::<BigInt>());
            naive = (0..3)
                .map(|i| {
                    (0..3)
                        .map(|j| (0..3).map(|k| &naive[i][k] * BigInt::from(m.get(k, j))).sum())
                        .collect()
                })
                .collect();
        }
        let neg = IntMatrix::from_rows(&[vec![-3]]).unwrap();
        assert_eq!(power_traces(&neg, 41)[41], BigInt::from(-3).pow(41));
    }

    fn small_matrix() -> impl Strategy<Value = IntMatrix> {
        (1usize..40, 1usize..40).prop_flat_map(|(r, c)| {
            proptest::collection::vec(
                prop_oneof![4 => Just(0i64), 1 => -3i64..=3],
                r * c,
            )
            .prop_map(move |data| IntMatrix {
                rows: r,
                cols: c,
                data,
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn multimodular_matches_fraction_free(m in small_matrix()) {
            prop_assert_eq!(rank_multimodular(&m), rank_fraction_free(&m));
        }

        #[test]
        fn rank_is_transpose_invariant(m in small_matrix()) {
            prop_assert_eq!(rank(&m), rank(&m.transpose()));
        }

        #[test]
        fn smith_left_transform_is_membership_test(
            a in -6i64..=6, b in -6i64..=6, c in -6i64..=6, d in -6i64..=6,
            x in -20i64..=20, y in -20i64..=20,
        ) {
            let basis = vec![vec![a, b], vec![c, d]];
            prop_assume!(a * d - b * c != 0);
            let s = smith_normal_form(&basis).unwrap();
            let det: i64 = s.diagonal.iter().product();
            prop_assert_eq!(det.abs(), (a * d - b * c).abs());
            // Membership of (x, y) in the column lattice, by Cramer's rule.
            let dd = a * d - b * c;
            let member = (d * x - b * y) % dd == 0 && (a * y - c * x) % dd == 0;
            let w0 = s.left[0][0] * x + s.left[0][1] * y;
            let w1 = s.left[1][0] * x + s.left[1][1] * y;
            let via_smith = w0 % s.diagonal[0] == 0 && w1 % s.diagonal[1] == 0;
            prop_assert_eq!(member, via_smith);
        }
    }
}
