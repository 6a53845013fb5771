//! Spectral density functions `F(lambda) = Tr_G E(lambda)` and their
//! estimates: closed forms, quadrature over the character torus of `Z^n`,
//! and eigenvalue counts on finite covers.

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::caps::Caps;
use crate::covers::{instantiate, EIG_TOL};
use crate::error::{Error, Result};
use crate::group_ring::{EquivariantChainComplex, GroupRingMatrix};
use crate::groups::{FiniteQuotient, GroupElement};

/// Where a density estimate came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    ClosedForm,
    TorusQuadrature { samples: usize },
    QuotientApproximation { order: usize },
}

/// Eigenvalue-count estimate of one member of a quotient family.
#[derive(Clone, Debug, PartialEq)]
pub struct QuotientMember {
    pub order: usize,
    pub values: Vec<f64>,
}

/// Nondecreasing samples `F(lambda_j)` on an increasing grid in `[0, K]`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityEstimate {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub provenance: Provenance,
    /// Norm bound `K` of the Laplacian.
    pub k: f64,
    /// Number of cells `a` in the dimension.
    pub cells: usize,
    /// Smallest spectral value observed, when known.
    pub infimum: Option<f64>,
    /// Per-member estimates of a quotient family.
    pub members: Vec<QuotientMember>,
}

/// Uniform grid `lo, lo + step, ..., <= hi`.
pub fn uniform_grid(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(hi >= lo) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::Invalid(format!("bad grid {lo}:{hi}:{step}")));
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|j| lo + j as f64 * step).collect())
}

/// `per_decade` logarithmically spaced points from `lo` to `hi`.
pub fn log_grid(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    let decades = (hi / lo).log10();
    let count = (decades * per_decade as f64).round() as usize;
    (0..=count)
        .map(|j| lo * 10f64.powf(decades * j as f64 / count.max(1) as f64))
        .collect()
}

impl DensityEstimate {
    pub fn new(grid: Vec<f64>, values: Vec<f64>, provenance: Provenance, k: f64, cells: usize) -> Result<Self> {
        if grid.len() != values.len() || grid.is_empty() {
            return Err(Error::Invalid("density grid and values differ in length".into()));
        }
        if grid.windows(2).any(|w| !(w[0] < w[1])) || grid[0] < 0.0 {
            return Err(Error::Invalid("density grid must be increasing and nonnegative".into()));
        }
        if values.windows(2).any(|w| w[1] < w[0] - 1e-12) {
            return Err(Error::Invalid("density values must be nondecreasing".into()));
        }
        if values.iter().any(|&v| !(v >= 0.0 && v <= cells as f64 + 1e-9)) {
            return Err(Error::Invalid("density values must lie in [0, a]".into()));
        }
        Ok(DensityEstimate {
            grid,
            values,
            provenance,
            k,
            cells,
            infimum: None,
            members: Vec::new(),
        })
    }

    /// Samples a known distribution function on `grid`.
    pub fn closed_form(grid: Vec<f64>, f: impl Fn(f64) -> f64, k: f64, cells: usize, infimum: Option<f64>) -> Result<Self> {
        let values = grid.iter().map(|&l| f(l)).collect();
        let mut d = DensityEstimate::new(grid, values, Provenance::ClosedForm, k, cells)?;
        d.infimum = infimum;
        Ok(d)
    }

    /// Upper step value: `F` at the smallest grid point `>= lambda`
    /// (`a` beyond the grid). Dominates `F(lambda)` for nondecreasing `F`.
    pub fn value_at(&self, lambda: f64) -> f64 {
        let idx = self.grid.partition_point(|&g| g < lambda);
        self.values.get(idx).copied().unwrap_or(self.cells as f64)
    }

    /// `mu(x) = F(K x) / a`.
    pub fn mu(&self, x: f64) -> f64 {
        if self.cells == 0 {
            return 0.0;
        }
        self.value_at(self.k * x) / self.cells as f64
    }

    /// `F` at `0`, if the grid contains it.
    pub fn at_zero(&self) -> Option<f64> {
        (self.grid[0] == 0.0).then(|| self.values[0])
    }

    /// `integral f dmu` for the measure with atoms at the grid points (and
    /// the remaining mass at `K`).
    pub fn integrate_mu(&self, f: impl Fn(f64) -> f64) -> f64 {
        if self.cells == 0 {
            return 0.0;
        }
        let a = self.cells as f64;
        let mut prev = 0.0;
        let mut total = 0.0;
        for (&l, &v) in self.grid.iter().zip(&self.values) {
            let mass = (v - prev).max(0.0);
            if mass > 0.0 {
                total += mass / a * f(l / self.k);
            }
            prev = v;
        }
        if a > prev {
            total += (a - prev) / a * f(1.0);
        }
        total
    }
}

/// Density of `c - b (g + g^{-1})` for an element `g` of infinite order,
/// `F(lambda) = arccos((c - lambda) / 2b) / pi` on `[c - 2b, c + 2b]`.
pub fn symmetric_cyclic_density(c: f64, b: f64, k: f64, grid: Vec<f64>) -> Result<DensityEstimate> {
    if !(b > 0.0) {
        return Err(Error::Invalid("off-diagonal weight must be positive".into()));
    }
    let f = move |lambda: f64| {
        let t = ((c - lambda) / (2.0 * b)).clamp(-1.0, 1.0);
        t.acos() / std::f64::consts::PI
    };
    DensityEstimate::closed_form(grid, f, k, 1, Some(c - 2.0 * b))
}

/// Golden-ratio generalisation used for quasi-random points in `[0,1)^d`.
fn kronecker_alphas(d: usize) -> Vec<f64> {
    let mut g = 2.0f64;
    for _ in 0..64 {
        g -= (g.powi(d as i32 + 1) - g - 1.0) / ((d as f64 + 1.0) * g.powi(d as i32) - 1.0);
    }
    (1..=d).map(|k| g.powi(-(k as i32)).fract()).collect()
}

/// Hermitian matrix `rho_x(M)` at the character `x` of `Z^n`.
pub fn character_matrix_f64(lap: &GroupRingMatrix, x: &[f64]) -> DMatrix<Complex64> {
    let a = lap.rows();
    DMatrix::from_fn(a, a, |r, c| {
        lap.get(r, c)
            .terms()
            .map(|(g, coeff)| {
                let GroupElement::Abelian(v) = g else { unreachable!("abelian complex") };
                let phase: f64 = v.iter().zip(x).map(|(&k, &t)| k as f64 * t).sum();
                Complex64::from_polar(coeff.to_f64().unwrap_or(f64::NAN), std::f64::consts::TAU * phase)
            })
            .sum()
    })
}

/// Eigenvalues of `rho_x(M)` for a self-adjoint `M`.
pub fn character_eigenvalues(lap: &GroupRingMatrix, x: &[f64]) -> Vec<f64> {
    let m = character_matrix_f64(lap, x);
    match lap.rows() {
        0 => Vec::new(),
        1 => vec![m[(0, 0)].re],
        2 => {
            let h = Matrix2::new(m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
            let (p, q) = (h[(0, 0)].re, h[(1, 1)].re);
            let off = h[(0, 1)].norm();
            let mid = 0.5 * (p + q);
            let rad = (0.25 * (p - q) * (p - q) + off * off).sqrt();
            vec![mid - rad, mid + rad]
        }
        _ => m.symmetric_eigenvalues().iter().copied().collect(),
    }
}

/// Quasi-random quadrature of `F` over the character torus of `Z^n`:
/// `F(lambda)` is the average number of eigenvalues of `rho(Delta_q)` at most
/// `lambda`. Deterministic for a fixed seed.
pub fn density_zn(
    cx: &EquivariantChainComplex,
    dim: usize,
    samples: usize,
    grid: &[f64],
    seed: u64,
) -> Result<DensityEstimate> {
    let n = cx.group().rank().ok_or(Error::NotAbelian)?;
    if samples < 1000 {
        return Err(Error::Invalid(format!("need at least 1000 samples, got {samples}")));
    }
    let lap = cx.laplacian(dim)?;
    let k = lap.norm_bound();
    let alphas = kronecker_alphas(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
    let mut eigs: Vec<f64> = (0..samples)
        .into_par_iter()
        .flat_map_iter(|i| {
            let x: Vec<f64> = shift
                .iter()
                .zip(&alphas)
                .map(|(s, a)| (s + (i as f64 + 1.0) * a).fract())
                .collect();
            character_eigenvalues(&lap, &x)
        })
        .collect();
    eigs.sort_by(f64::total_cmp);
    let values = grid
        .iter()
        .map(|&l| eigs.partition_point(|&e| e <= l + EIG_TOL) as f64 / samples as f64)
        .collect();
    let mut d = DensityEstimate::new(grid.to_vec(), values, Provenance::TorusQuadrature { samples }, k, cx.cell_count(dim))?;
    d.infimum = eigs.first().copied();
    Ok(d)
}

/// `F(lambda) = #{eigenvalues of Delta'_q <= lambda} / |Q|` on each member of
/// a family; the estimate is taken from the largest member.
pub fn density_by_quotients(
    cx: &EquivariantChainComplex,
    dim: usize,
    family: &[FiniteQuotient],
    grid: &[f64],
    caps: &Caps,
) -> Result<DensityEstimate> {
    if family.is_empty() {
        return Err(Error::Invalid("quotient family is empty".into()));
    }
    let lap = cx.laplacian(dim)?;
    let mut members = Vec::with_capacity(family.len());
    let mut infimum = f64::INFINITY;
    for q in family {
        let eig = instantiate(cx, q, caps)?.eigenvalues(dim, caps)?;
        infimum = infimum.min(eig.first().copied().unwrap_or(f64::INFINITY));
        let values = grid
            .iter()
            .map(|&l| eig.partition_point(|&e| e <= l + EIG_TOL) as f64 / q.order() as f64)
            .collect();
        members.push(QuotientMember { order: q.order(), values });
    }
    let largest = members
        .iter()
        .enumerate()
        .max_by_key(|(i, m)| (m.order, usize::MAX - i))
        .map(|(i, _)| i)
        .expect("nonempty family");
    let mut d = DensityEstimate::new(
        grid.to_vec(),
        members[largest].values.clone(),
        Provenance::QuotientApproximation { order: members[largest].order },
        lap.norm_bound(),
        cx.cell_count(dim),
    )?;
    d.infimum = infimum.is_finite().then_some(infimum);
    d.members = members;
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group_ring::GroupRingElement;
    use crate::groups::{quotient, Group, Subgroup};
    use num_bigint::BigInt;

    fn complex_1d(terms: &[(i64, i64)]) -> EquivariantChainComplex {
        let z = Group::free_abelian(1).unwrap();
        let e = GroupRingElement::from_terms(terms.iter().map(|&(k, c)| (GroupElement::Abelian(vec![k]), BigInt::from(c))));
        let m = GroupRingMatrix::from_entries(&z, 1, 1, vec![e]).unwrap();
        EquivariantChainComplex::new(z, vec![1, 1], vec![m]).unwrap()
    }

    #[test]
    fn grids() {
        let g = uniform_grid(0.0, 4.0, 0.01).unwrap();
        assert_eq!(g.len(), 401);
        assert!((g[200] - 2.0).abs() < 1e-12);
        let lg = log_grid(1e-6, 1e-2, 10);
        assert_eq!(lg.len(), 41);
        assert!((lg[40] - 1e-2).abs() < 1e-15);
        assert!(uniform_grid(0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn circle_quadrature() {
        let circle = complex_1d(&[(1, 1), (0, -1)]);
        let d = density_zn(&circle, 0, 20_000, &[0.5, 2.0, 4.0], 7).unwrap();
        assert!((d.values[1] - 0.5).abs() < 0.02);
        assert_eq!(d.values[2], 1.0);
        let again = density_zn(&circle, 0, 20_000, &[0.5, 2.0, 4.0], 7).unwrap();
        assert_eq!(d, again);
        assert!(density_zn(&circle, 0, 10, &[1.0], 7).is_err());
    }

    #[test]
    fn gap_quadrature_has_no_mass_below_one() {
        let gap = complex_1d(&[(0, 2), (1, -1)]);
        let d = density_zn(&gap, 1, 5_000, &[0.5, 0.9, 1.5], 1).unwrap();
        assert_eq!(&d.values[..2], &[0.0, 0.0]);
        assert!(d.infimum.unwrap() >= 1.0 - 1e-12);
    }

    #[test]
    fn quotient_densities() {
        let caps = Caps::default();
        let z = Group::free_abelian(1).unwrap();
        let circle = complex_1d(&[(1, 1), (0, -1)]);
        let fam: Vec<FiniteQuotient> = [10, 100]
            .iter()
            .map(|&i| quotient(&z, &Subgroup::cyclic(i), &caps).unwrap())
            .collect();
        let d = density_by_quotients(&circle, 0, &fam, &[2.0, 4.0], &caps).unwrap();
        assert_eq!(d.members.len(), 2);
        assert!((d.values[0] - 0.5).abs() <= 0.02);
        assert_eq!(d.values[1], 1.0);
        let zero = complex_1d(&[]);
        let d = density_by_quotients(&zero, 0, &fam[..1], &[0.0], &caps).unwrap();
        assert_eq!(d.values[0], 1.0);
    }

    #[test]
    fn measure_integration() {
        let d = DensityEstimate::new(vec![0.0, 1.0, 2.0], vec![0.0, 0.5, 0.5], Provenance::ClosedForm, 2.0, 1).unwrap();
        // atoms: 0.5 at x = 0.5, 0.5 at x = 1
        assert!((d.integrate_mu(|x| x) - 0.75).abs() < 1e-15);
        assert_eq!(d.mu(0.25), 0.5);
        assert_eq!(d.value_at(3.0), 1.0);
    }
}
