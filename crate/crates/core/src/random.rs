//! Seeded generators of small abelian complexes, quotients and polynomials
//! for the randomized suites.

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::Result;
use crate::group_ring::{EquivariantChainComplex, GroupRingElement, GroupRingMatrix};
use crate::groups::{Group, GroupElement, Subgroup};
use crate::poly::Polynomial;

/// Largest quotient produced by [`random_subgroup`].
pub const MAX_ORDER: i64 = 200;

fn random_exponent<R: Rng>(rng: &mut R, n: usize) -> Vec<i64> {
    // Coordinates in [-1, 1]: word length at most n <= 2.
    (0..n).map(|_| rng.gen_range(-1..=1)).collect()
}

/// A sparse element of `Z[Z^n]` with support in the unit cube. One time in
/// three it is a multiple of `g - 1`, which vanishes at the trivial
/// character and so produces homology.
pub fn random_element<R: Rng>(rng: &mut R, n: usize) -> GroupRingElement {
    let zero = vec![0; n];
    match rng.gen_range(0..6) {
        0 => GroupRingElement::zero(),
        1 | 2 => {
            let g = random_exponent(rng, n);
            let c = *[-2i64, -1, 1, 2].choose(rng).unwrap();
            GroupRingElement::from_terms([
                (GroupElement::Abelian(g), BigInt::from(c)),
                (GroupElement::Abelian(zero), BigInt::from(-c)),
            ])
        }
        _ => {
            let terms = rng.gen_range(1..=3);
            GroupRingElement::from_terms(
                (0..terms).map(|_| (GroupElement::Abelian(random_exponent(rng, n)), BigInt::from(rng.gen_range(-2i64..=2)))),
            )
        }
    }
}

fn random_matrix<R: Rng>(rng: &mut R, group: &Group, rows: usize, cols: usize) -> Result<GroupRingMatrix> {
    let n = group.rank().expect("abelian");
    let entries = (0..rows * cols).map(|_| random_element(rng, n)).collect();
    GroupRingMatrix::from_entries(group, rows, cols, entries)
}

/// A complex over `Z^n`, `n in {1, 2}`, with at most 3 cells per dimension:
/// either a random two-term complex or the Koszul complex of two random
/// elements, scaled by a random number of copies.
pub fn random_abelian_complex<R: Rng>(rng: &mut R) -> Result<EquivariantChainComplex> {
    let n = rng.gen_range(1..=2);
    let group = Group::free_abelian(n)?;
    if rng.gen_bool(0.6) {
        let a0 = rng.gen_range(1..=3);
        let a1 = rng.gen_range(1..=3);
        let d = random_matrix(rng, &group, a0, a1)?;
        return EquivariantChainComplex::new(group, vec![a0, a1], vec![d]);
    }
    let (f, g) = (random_element(rng, n), random_element(rng, n));
    let d1 = GroupRingMatrix::from_entries(&group, 1, 2, vec![f.clone(), g.clone()])?;
    let d2 = GroupRingMatrix::from_entries(&group, 2, 1, vec![g.neg(), f])?;
    EquivariantChainComplex::new(group, vec![1, 2, 1], vec![d1, d2])
}

/// A finite-index sublattice of `Z^n` with index at most [`MAX_ORDER`], in
/// Hermite form with a random off-diagonal entry.
pub fn random_subgroup<R: Rng>(rng: &mut R, n: usize) -> Subgroup {
    match n {
        1 => Subgroup::cyclic(rng.gen_range(1..=MAX_ORDER)),
        _ => {
            let d1 = rng.gen_range(1..=14i64);
            let d2 = rng.gen_range(1..=MAX_ORDER / d1);
            let c = rng.gen_range(0..d1);
            let mut basis = vec![vec![0; n]; n];
            basis[0][0] = d1;
            basis[0][1] = c;
            basis[1][1] = d2;
            for (i, row) in basis.iter_mut().enumerate().skip(2) {
                row[i] = 1;
            }
            Subgroup::lattice(basis).expect("square")
        }
    }
}

/// Integer polynomial of the given degree with coefficients in `[-3, 3]`
/// and nonzero leading coefficient.
pub fn random_polynomial<R: Rng>(rng: &mut R, degree: usize) -> Polynomial {
    let mut coeffs: Vec<i64> = (0..=degree).map(|_| rng.gen_range(-3..=3)).collect();
    if coeffs[degree] == 0 {
        coeffs[degree] = *[-1, 1].choose(rng).unwrap();
    }
    Polynomial::from_integers(&coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_objects_respect_limits() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let caps = crate::caps::Caps::default();
        for _ in 0..100 {
            let cx = random_abelian_complex(&mut rng).unwrap();
            assert!(cx.cells().iter().all(|&a| a <= 3));
            for d in cx.boundaries() {
                assert!(d.support_radius(&caps).unwrap() <= 2);
            }
            let n = cx.group().rank().unwrap();
            let q = crate::groups::quotient(cx.group(), &random_subgroup(&mut rng, n), &caps).unwrap();
            assert!(q.order() as i64 <= MAX_ORDER);
        }
        assert_eq!(random_polynomial(&mut rng, 4).degree(), 4);
    }
}
