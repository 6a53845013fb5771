//! Finite covers: a complex over `Z[G]` made concrete over a finite quotient
//! `G / G'`, with exact Betti numbers and spectral data of the cover.

use std::collections::HashMap;
use std::sync::OnceLock;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::group_ring::{evaluate_polynomial, EquivariantChainComplex, GroupRingMatrix};
use crate::groups::{short_length, FiniteQuotient, GroupElement, Short};
use crate::linalg::{power_traces, rank, IntMatrix};
use crate::poly::Polynomial;

/// Absolute tolerance used when comparing floating eigenvalues.
pub const EIG_TOL: f64 = 1e-9;
/// Eigenvalues below this are counted as zero.
pub const ZERO_EIG_TOL: f64 = 1e-7;

/// The cover `X'` of a complex for a finite quotient, with every group
/// element replaced by its right translation permutation.
#[derive(Debug)]
pub struct CoverInstance {
    complex: EquivariantChainComplex,
    quotient: FiniteQuotient,
    boundaries: Vec<IntMatrix>,
    laplacians: Vec<IntMatrix>,
    ranks: Vec<OnceLock<usize>>,
}

/// Replaces each `g` by the permutation matrix of `x -> x * g`.
pub fn instantiate_matrix(m: &GroupRingMatrix, q: &FiniteQuotient) -> Result<IntMatrix> {
    let n = q.order();
    let mut out = IntMatrix::zeros(m.rows() * n, m.cols() * n);
    let mut images: HashMap<&GroupElement, Vec<usize>> = HashMap::new();
    for r in 0..m.rows() {
        for c in 0..m.cols() {
            for (g, coeff) in m.get(r, c).terms() {
                let coeff = coeff.to_i64().ok_or(Error::Overflow)?;
                if !images.contains_key(g) {
                    images.insert(g, q.right_translation(q.project(g)?));
                }
                for (x, &y) in images[g].iter().enumerate() {
                    out.add_at(r * n + x, c * n + y, coeff)?;
                }
            }
        }
    }
    Ok(out)
}

/// Builds the cover. Fails with `OrderCapExceeded` when some chain group of
/// the cover is larger than `caps.dense`.
pub fn instantiate(cx: &EquivariantChainComplex, q: &FiniteQuotient, caps: &Caps) -> Result<CoverInstance> {
    if cx.group() != q.group() {
        return Err(Error::Invalid("quotient is of a different group".into()));
    }
    let widest = cx.cells().iter().max().copied().unwrap_or(0);
    if widest.saturating_mul(q.order()) > caps.dense {
        return Err(Error::OrderCapExceeded { cap: caps.dense });
    }
    let boundaries = cx
        .boundaries()
        .iter()
        .map(|d| instantiate_matrix(d, q))
        .collect::<Result<Vec<_>>>()?;
    let laplacians = (0..=cx.top())
        .map(|k| instantiate_matrix(&cx.laplacian(k)?, q))
        .collect::<Result<Vec<_>>>()?;
    Ok(CoverInstance {
        complex: cx.clone(),
        quotient: q.clone(),
        ranks: (0..boundaries.len()).map(|_| OnceLock::new()).collect(),
        boundaries,
        laplacians,
    })
}

impl CoverInstance {
    pub fn complex(&self) -> &EquivariantChainComplex {
        &self.complex
    }

    pub fn quotient(&self) -> &FiniteQuotient {
        &self.quotient
    }

    /// Instantiated `d'_q`, for `1 <= q <= top`.
    pub fn boundary(&self, q: usize) -> Option<&IntMatrix> {
        q.checked_sub(1).and_then(|k| self.boundaries.get(k))
    }

    pub fn laplacian(&self, q: usize) -> Result<&IntMatrix> {
        self.laplacians.get(q).ok_or(Error::DimensionOutOfRange {
            dim: q,
            top: self.complex.top(),
        })
    }

    /// Rational rank of `d'_q`, zero outside `1..=top`.
    pub fn boundary_rank(&self, q: usize) -> usize {
        match q.checked_sub(1).filter(|&k| k < self.boundaries.len()) {
            Some(k) => *self.ranks[k].get_or_init(|| rank(&self.boundaries[k])),
            None => 0,
        }
    }

    /// Number of cells of the cover in dimension `q`.
    pub fn dimension(&self, q: usize) -> usize {
        self.complex.cell_count(q) * self.quotient.order()
    }

    /// `b_q(X') = a_q |Q| - rank d'_q - rank d'_{q+1}`.
    pub fn betti(&self, q: usize) -> Result<usize> {
        self.laplacian(q)?;
        Ok(self.dimension(q) - self.boundary_rank(q) - self.boundary_rank(q + 1))
    }

    /// `Tr p(Delta'_q) / |Q|`, exactly.
    pub fn normalized_trace(&self, p: &Polynomial, q: usize) -> Result<BigRational> {
        let lap = self.laplacian(q)?;
        let traces = power_traces(lap, p.degree());
        let total = p
            .coefficients()
            .iter()
            .zip(&traces)
            .fold(BigRational::zero(), |acc, (c, t)| acc + c * BigRational::from_integer(t.clone()));
        Ok(total / BigRational::from_integer(BigInt::from(self.quotient.order())))
    }

    /// All eigenvalues of `Delta'_q`, ascending.
    pub fn eigenvalues(&self, q: usize, caps: &Caps) -> Result<Vec<f64>> {
        let lap = self.laplacian(q)?;
        let n = lap.rows();
        if n > caps.eig {
            return Err(Error::SizeCapExceeded { size: n, cap: caps.eig });
        }
        if n == 0 {
            return Ok(Vec::new());
        }
        let m = DMatrix::from_row_slice(n, n, &lap.to_f64_rows());
        let mut eig: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        eig.sort_by(f64::total_cmp);
        Ok(eig)
    }

    /// `#{mu <= lambda}` among the eigenvalues of `Delta'_q`.
    pub fn count_eigs_below(&self, q: usize, lambda: f64, caps: &Caps) -> Result<usize> {
        Ok(self
            .eigenvalues(q, caps)?
            .iter()
            .filter(|&&mu| mu <= lambda + EIG_TOL)
            .count())
    }
}

/// Outcome of comparing `Tr_G p(Delta)` with `Tr_{G/G'} p(Delta')`.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceReport {
    pub gamma_trace: BigRational,
    pub quotient_trace: BigRational,
    pub degree: usize,
    pub short: Short,
    pub radius: u64,
    /// `deg p < short / R`.
    pub condition_met: bool,
    pub equal: bool,
}

pub fn verify_trace_equality(
    cx: &EquivariantChainComplex,
    q: &FiniteQuotient,
    dim: usize,
    p: &Polynomial,
    caps: &Caps,
) -> Result<TraceReport> {
    let lap = cx.laplacian(dim)?;
    let radius = lap.support_radius(caps)?;
    let short = short_length(cx.group(), q.subgroup(), caps)?;
    let gamma_trace = evaluate_polynomial(p, &lap)?.gamma_trace();
    let cover = instantiate(cx, q, caps)?;
    let quotient_trace = cover.normalized_trace(p, dim)?;
    let condition_met = match short {
        Short::Infinite => true,
        Short::Finite(s) => (p.degree() as u64) * radius < s,
    };
    Ok(TraceReport {
        equal: gamma_trace == quotient_trace,
        gamma_trace,
        quotient_trace,
        degree: p.degree(),
        short,
        radius,
        condition_met,
    })
}
