//! Torus complexes, stripes glued along a loop, and the closed-form Betti
//! numbers of the resulting covers.

use num_bigint::BigInt;
use num_traits::One;

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::group_ring::{EquivariantChainComplex, GroupRingElement, GroupRingMatrix};
use crate::groups::{element_order, short_length, FiniteQuotient, Group, GroupElement, Short};

fn unit(g: GroupElement) -> GroupRingElement {
    GroupRingElement::monomial(g, BigInt::one())
}

/// `g - 1`.
fn minus_one(group: &Group, g: &GroupElement) -> GroupRingElement {
    unit(g.clone()).sub(&unit(group.identity()))
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n)
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (0..n).filter(|&i| m >> i & 1 == 1).collect())
        .collect()
}

/// One-vertex product cell structure on the `n`-torus: cells in dimension
/// `q` are the `q`-subsets `S` of the coordinates and
/// `d e_S = sum_j (-1)^j (g_{s_j} - 1) e_{S - s_j}`.
pub fn torus_complex(n: usize) -> Result<EquivariantChainComplex> {
    if !(1..=4).contains(&n) {
        return Err(Error::RankOutOfRange(n));
    }
    let group = Group::free_abelian(n)?;
    let cells: Vec<Vec<Vec<usize>>> = (0..=n).map(|k| subsets(n, k)).collect();
    let mut boundaries = Vec::with_capacity(n);
    for k in 0..n {
        let (lower, upper) = (&cells[k], &cells[k + 1]);
        let mut d = GroupRingMatrix::zeros(&group, lower.len(), upper.len());
        for (col, s) in upper.iter().enumerate() {
            for (j, &coord) in s.iter().enumerate() {
                let face: Vec<usize> = s.iter().copied().filter(|&c| c != coord).collect();
                let row = lower.iter().position(|t| *t == face).expect("face is a subset");
                let entry = minus_one(&group, &group.generator(coord)?);
                d.set(row, col, if j % 2 == 0 { entry } else { entry.neg() });
            }
        }
        boundaries.push(d);
    }
    EquivariantChainComplex::new(group, cells.iter().map(Vec::len).collect(), boundaries)
}

/// The circle with its standard `Z`-cell structure; `Delta_0 = 2 - g - g^{-1}`.
pub fn circle_complex() -> EquivariantChainComplex {
    torus_complex(1).expect("rank 1")
}

/// One cell in each of dimensions 0 and 1 with `d_1 = 2 - g`. The Laplacian
/// `5 - 2g - 2g^{-1}` has spectrum `[1, 9]` whenever `g` has infinite order.
pub fn gap_complex(group: &Group, g: &GroupElement) -> Result<EquivariantChainComplex> {
    if !group.owns(g) {
        return Err(Error::Invalid(format!("{g} is not an element of the group")));
    }
    let two = GroupRingElement::monomial(group.identity(), BigInt::from(2));
    let d = GroupRingMatrix::from_entries(group, 1, 1, vec![two.sub(&unit(g.clone()))])?;
    EquivariantChainComplex::new(group.clone(), vec![1, 1], vec![d])
}

/// One cell in each of dimensions 0 and 1 with zero boundary.
pub fn zero_complex(group: &Group) -> Result<EquivariantChainComplex> {
    EquivariantChainComplex::new(group.clone(), vec![1, 1], vec![GroupRingMatrix::zeros(group, 1, 1)])
}

/// `S^1 x S^q` glued to a base complex along the loop `gamma`.
#[derive(Clone, Debug, PartialEq)]
pub struct StripeSpec {
    base: EquivariantChainComplex,
    gamma: GroupElement,
    q: usize,
}

impl StripeSpec {
    pub fn new(base: EquivariantChainComplex, gamma: GroupElement, q: usize) -> Result<StripeSpec> {
        if !base.group().owns(&gamma) {
            return Err(Error::InvalidStripe(format!("{gamma} is not an element of the group")));
        }
        if gamma.is_identity() {
            return Err(Error::InvalidStripe("gamma must not be the identity".into()));
        }
        let min = 2.max(base.top() + 1);
        if q < min {
            return Err(Error::DimensionTooLow { q, min });
        }
        Ok(StripeSpec { base, gamma, q })
    }

    pub fn base(&self) -> &EquivariantChainComplex {
        &self.base
    }

    pub fn gamma(&self) -> &GroupElement {
        &self.gamma
    }

    pub fn q(&self) -> usize {
        self.q
    }
}

/// Appends a `q`-cell with zero boundary and a `(q+1)`-cell with boundary
/// `(gamma - 1) e_q`, padding with empty dimensions above the base. Only the
/// stripe's cells in dimensions `q` and `q+1` are modelled; the rest of
/// `S^1 x S^q` cannot reach `H_q`.
pub fn glue_stripe(spec: &StripeSpec) -> Result<EquivariantChainComplex> {
    let group = spec.base.group();
    let q = spec.q;
    let mut cells = spec.base.cells().to_vec();
    cells.resize(q + 2, 0);
    cells[q] += 1;
    cells[q + 1] += 1;
    let mut boundaries = spec.base.boundaries().to_vec();
    for k in boundaries.len()..=q {
        boundaries.push(GroupRingMatrix::zeros(group, cells[k], cells[k + 1]));
    }
    let mut dq1 = GroupRingMatrix::zeros(group, cells[q], cells[q + 1]);
    dq1.set(cells[q] - 1, cells[q + 1] - 1, minus_one(group, &spec.gamma));
    boundaries[q] = dq1;
    EquivariantChainComplex::new(group.clone(), cells, boundaries)
}

/// `[G:G'] / o(gamma)`, with `o` the order of the image of `gamma` in `G/G'`.
pub fn stripe_prediction(spec: &StripeSpec, q: &FiniteQuotient) -> Result<u64> {
    Ok(q.order() as u64 / element_order(q, &spec.gamma)?)
}

#[derive(Clone, Debug, PartialEq)]
pub struct StripeBoundReport {
    pub prediction: u64,
    /// Word length of `gamma`.
    pub length: u64,
    pub index: usize,
    pub short: Short,
    /// `length * index / short`.
    pub bound: f64,
    pub holds: bool,
}

/// Checks `[G:G'] / o(gamma) <= |gamma| [G:G'] / short(G')`.
pub fn stripe_bound_check(spec: &StripeSpec, q: &FiniteQuotient, caps: &Caps) -> Result<StripeBoundReport> {
    let prediction = stripe_prediction(spec, q)?;
    let length = spec.base.group().word_length(&spec.gamma, caps)?;
    let short = short_length(spec.base.group(), q.subgroup(), caps)?;
    let bound = match short {
        Short::Finite(s) => length as f64 * q.order() as f64 / s as f64,
        Short::Infinite => 0.0,
    };
    Ok(StripeBoundReport {
        prediction,
        length,
        index: q.order(),
        short,
        bound,
        holds: prediction as f64 <= bound * (1.0 + 1e-12),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covers::instantiate;
    use crate::groups::{quotient, Subgroup};

    #[test]
    fn torus_cells_are_binomial() {
        for n in 1..=4 {
            let t = torus_complex(n).unwrap();
            let expected: Vec<usize> = (0..=n).map(|k| subsets(n, k).len()).collect();
            assert_eq!(t.cells(), expected.as_slice());
        }
        assert_eq!(torus_complex(2).unwrap().cells(), &[1, 2, 1]);
        assert!(matches!(torus_complex(0), Err(Error::RankOutOfRange(0))));
        assert!(matches!(torus_complex(5), Err(Error::RankOutOfRange(5))));
    }

    #[test]
    fn circle_laplacian() {
        let c = circle_complex();
        let lap = c.laplacian(0).unwrap();
        let g = Group::free_abelian(1).unwrap();
        let expected = GroupRingElement::from_terms([
            (GroupElement::Abelian(vec![0]), BigInt::from(2)),
            (GroupElement::Abelian(vec![1]), BigInt::from(-1)),
            (GroupElement::Abelian(vec![-1]), BigInt::from(-1)),
        ]);
        assert_eq!(lap, GroupRingMatrix::from_entries(&g, 1, 1, vec![expected]).unwrap());
    }

    #[test]
    fn torus_covers_have_torus_homology() {
        let t = torus_complex(2).unwrap();
        let caps = Caps::default();
        for sub in [Subgroup::diagonal(&[1, 1]), Subgroup::diagonal(&[2, 3]), Subgroup::diagonal(&[4, 4])] {
            let q = quotient(t.group(), &sub, &caps).unwrap();
            let cover = instantiate(&t, &q, &caps).unwrap();
            let b: Vec<usize> = (0..=2).map(|d| cover.betti(d).unwrap()).collect();
            assert_eq!(b, vec![1, 2, 1]);
        }
    }

    #[test]
    fn stripe_shapes_and_guards() {
        let t = torus_complex(2).unwrap();
        let g = GroupElement::Abelian(vec![1, 0]);
        let glued = glue_stripe(&StripeSpec::new(t.clone(), g.clone(), 3).unwrap()).unwrap();
        assert_eq!(glued.cells(), &[1, 2, 1, 1, 1]);
        assert_eq!(glued.boundary(4).unwrap().get(0, 0), &minus_one(t.group(), &g));
        assert!(matches!(StripeSpec::new(t.clone(), g.clone(), 2), Err(Error::DimensionTooLow { q: 2, min: 3 })));
        assert!(matches!(StripeSpec::new(t, GroupElement::Abelian(vec![0, 0]), 3), Err(Error::InvalidStripe(_))));
        let c = circle_complex();
        let glued = glue_stripe(&StripeSpec::new(c, GroupElement::Abelian(vec![2]), 2).unwrap()).unwrap();
        assert_eq!(glued.cells(), &[1, 1, 1, 1]);
        let caps = Caps::default();
        let q = quotient(glued.group(), &Subgroup::cyclic(6), &caps).unwrap();
        assert_eq!(instantiate(&glued, &q, &caps).unwrap().betti(2).unwrap(), 2);
    }

    #[test]
    fn stripe_above_base_pads_dimensions() {
        let c = circle_complex();
        let spec = StripeSpec::new(c, GroupElement::Abelian(vec![1]), 3).unwrap();
        assert_eq!(glue_stripe(&spec).unwrap().cells(), &[1, 1, 0, 1, 1]);
    }

    #[test]
    fn prediction_examples() {
        let caps = Caps::default();
        let t = torus_complex(2).unwrap();
        let spec = StripeSpec::new(t.clone(), GroupElement::Abelian(vec![1, 0]), 3).unwrap();
        let q = quotient(t.group(), &Subgroup::diagonal(&[2, 3]), &caps).unwrap();
        assert_eq!(stripe_prediction(&spec, &q).unwrap(), 3);
        let diag = GroupElement::Abelian(vec![1, 1]);
        let spec = StripeSpec::new(t.clone(), diag, 3).unwrap();
        let q = quotient(t.group(), &Subgroup::diagonal(&[110, 21]), &caps).unwrap();
        assert_eq!(stripe_prediction(&spec, &q).unwrap(), 1);
        for k in 2..8 {
            let q = quotient(t.group(), &Subgroup::diagonal(&[k, k]), &caps).unwrap();
            let r = stripe_bound_check(&spec, &q, &caps).unwrap();
            assert_eq!(r.prediction, k as u64);
            assert!((r.bound - 2.0 * k as f64).abs() < 1e-12);
            assert!(r.holds);
        }
    }
}
