//! Betti number bounds for finite covers driven by the spectral density of
//! the universal cover.
//!
//! Every bound rests on `b_q(X') <= a [G:G'] J(n, mu)` for `n < short(G')/R`,
//! with `J` estimated through the polynomials `p_n`:
//! `J(n, mu) <= mu(z) + 4 exp(-2 n sqrt z)`.

use std::fmt;

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::caps::Caps;
use crate::covers::{instantiate, CoverInstance};
use crate::error::{Error, Result};
use crate::group_ring::{evaluate_polynomial, EquivariantChainComplex, GroupRingMatrix};
use crate::groups::{quotient, short_length, FiniteQuotient, GroupElement, Short, Subgroup};
use crate::pattern::l2_betti_vanishes;
use crate::poly::Polynomial;
use crate::spectral::chebyshev::{luck_polynomial, luck_polynomial_exact};
use crate::spectral::density::{character_eigenvalues, DensityEstimate, Provenance};

/// Degree used when `short / R` is unbounded.
pub const DEGREE_CAP: u64 = 10_000;
/// Tolerance of the certified eigenvalue minimum in gap verification.
pub const GAP_SLACK: f64 = 1e-6;
/// Largest number of torus cells examined by the certified gap search.
pub const GAP_CELL_BUDGET: usize = 2_000_000;
/// Largest admissible ratio between the extreme values of
/// `short(G_i) / log [G:G_i]` in a family called log-uniform.
pub const LOG_UNIFORM_SPREAD: f64 = 3.0;
/// `epsilon` in the decay hypothesis `F(lambda) < a log K / -log lambda`
/// for `lambda < epsilon`.
pub const SUBLOG_EPSILON: f64 = 1.0;

/// `n = ceil(short / R) - 1`, the largest degree below `short / R`.
pub fn degree_from_short(short: Short, radius: u64) -> u64 {
    match short {
        Short::Finite(s) if radius > 0 => (s.div_ceil(radius) - 1).min(DEGREE_CAP),
        _ => DEGREE_CAP,
    }
}

/// The data every bound needs about one cover.
#[derive(Debug)]
pub struct Setting {
    pub laplacian: GroupRingMatrix,
    pub cells: usize,
    pub k: f64,
    pub r: u64,
    pub index: usize,
    pub short: Short,
    pub n: u64,
    pub cover: CoverInstance,
    pub betti: usize,
}

pub fn setting(cx: &EquivariantChainComplex, q: &FiniteQuotient, dim: usize, caps: &Caps) -> Result<Setting> {
    let laplacian = cx.laplacian(dim)?;
    let k = laplacian.norm_bound();
    let r = laplacian.support_radius(caps)?;
    let short = short_length(cx.group(), q.subgroup(), caps)?;
    let cover = instantiate(cx, q, caps)?;
    let betti = cover.betti(dim)?;
    Ok(Setting {
        cells: cx.cell_count(dim),
        k,
        r,
        index: q.order(),
        n: degree_from_short(short, r),
        short,
        laplacian,
        cover,
        betti,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    Gap,
    EigenCount,
    NovikovShubin,
    Sublog,
    RawJ,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Gap => "gap",
            Regime::EigenCount => "eigen-count",
            Regime::NovikovShubin => "ns",
            Regime::Sublog => "sublog",
            Regime::RawJ => "raw",
        })
    }
}

/// An evaluated bound together with every constant that went into it.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub regime: Regime,
    pub cells: usize,
    pub k: f64,
    pub r: u64,
    pub index: usize,
    pub short: Short,
    pub n: u64,
    pub lambda0: Option<f64>,
    pub lambda: Option<f64>,
    pub beta: Option<f64>,
    pub epsilon: Option<f64>,
    pub z: Option<f64>,
    pub m: Option<f64>,
    pub c: Option<f64>,
    pub c_prime: Option<f64>,
    pub c1: Option<f64>,
    pub bound: f64,
    /// Betti number, or eigenvalue count in the eigen-count regime.
    pub measured: usize,
    pub satisfied: bool,
    pub hypothesis_verified: bool,
    pub verification: String,
    pub notes: Vec<String>,
}

impl BoundReport {
    fn from_setting(regime: Regime, s: &Setting) -> BoundReport {
        BoundReport {
            regime,
            cells: s.cells,
            k: s.k,
            r: s.r,
            index: s.index,
            short: s.short,
            n: s.n,
            lambda0: None,
            lambda: None,
            beta: None,
            epsilon: None,
            z: None,
            m: None,
            c: None,
            c_prime: None,
            c1: None,
            bound: f64::INFINITY,
            measured: s.betti,
            satisfied: true,
            hypothesis_verified: true,
            verification: String::new(),
            notes: Vec::new(),
        }
    }

    fn finish(mut self, bound: f64) -> BoundReport {
        self.bound = bound;
        self.satisfied = dominates(bound, self.measured);
        self
    }

    /// A verified hypothesis with a violated bound: an implementation error.
    pub fn falsified(&self) -> bool {
        self.hypothesis_verified && !self.satisfied
    }
}

/// `measured <= bound` up to rounding in the last bits.
pub fn dominates(bound: f64, measured: usize) -> bool {
    measured as f64 <= bound * (1.0 + 1e-12) + 1e-9
}

impl fmt::Display for BoundReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = vec![
            format!("regime={}", self.regime),
            format!("a={}", self.cells),
            format!("K={}", self.k),
            format!("R={}", self.r),
            format!("index={}", self.index),
            format!("short={}", self.short),
            format!("n={}", self.n),
        ];
        let optional = [
            ("lambda0", self.lambda0),
            ("lambda", self.lambda),
            ("beta", self.beta),
            ("epsilon", self.epsilon),
            ("z", self.z),
            ("M", self.m),
            ("C", self.c),
            ("C'", self.c_prime),
            ("C1", self.c1),
        ];
        parts.extend(optional.iter().filter_map(|(k, v)| v.map(|v| format!("{k}={v}"))));
        let what = if self.regime == Regime::EigenCount { "count" } else { "b" };
        parts.push(format!("bound={}", self.bound));
        parts.push(format!("{what}={}", self.measured));
        write!(f, "{}", parts.join(" "))?;
        if !self.verification.is_empty() {
            write!(f, "\nverification: {}", self.verification)?;
        }
        for note in &self.notes {
            write!(f, "\nnote: {note}")?;
        }
        let verdict = if self.satisfied { "SATISFIED" } else { "VIOLATED" };
        write!(f, "\n{verdict}")?;
        if !self.hypothesis_verified {
            write!(f, " (hypothesis not verified)")?;
        }
        Ok(())
    }
}

/// Terms of the estimate `J(n, mu) <= mu(z) + 4 exp(-2 n sqrt z)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JBound {
    pub mu_z: f64,
    pub tail: f64,
    pub bound: f64,
    /// `integral p_n dmu` for the estimated measure.
    pub direct: f64,
}

pub fn j_bound(n: u64, mu: &DensityEstimate, z: f64) -> Result<JBound> {
    let p = luck_polynomial(n.min(u32::MAX as u64) as u32, z)?;
    let mu_z = mu.mu(z);
    let tail = 4.0 * (-2.0 * n as f64 * z.sqrt()).exp();
    Ok(JBound {
        mu_z,
        tail,
        bound: mu_z + tail,
        direct: mu.integrate_mu(|x| p.value(x)),
    })
}

/// `b_q(X') <= a [G:G'] J(n, mu)` with the `J` estimate at a given `z`.
pub fn betti_bound_general(
    cx: &EquivariantChainComplex,
    q: &FiniteQuotient,
    dim: usize,
    mu: &DensityEstimate,
    z: f64,
    caps: &Caps,
) -> Result<BoundReport> {
    let s = setting(cx, q, dim, caps)?;
    let j = j_bound(s.n, mu, z)?;
    let mut report = BoundReport::from_setting(Regime::RawJ, &s);
    report.z = Some(z);
    report.hypothesis_verified = mu.provenance == Provenance::ClosedForm;
    report.verification = format!("density {:?}", mu.provenance);
    report.notes.push(format!(
        "mu(z)={} tail={} direct integral={}",
        j.mu_z, j.tail, j.direct
    ));
    Ok(report.finish(s.cells as f64 * s.index as f64 * j.bound))
}

/// How a spectral gap was established.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GapVerification {
    /// The density has no spectrum below `lambda0`.
    Density { provenance: Provenance, infimum: f64 },
    /// A certified lower bound on the smallest eigenvalue of `rho(Delta)`
    /// over the whole character torus, from a Taylor bound on each cell.
    Lipschitz { cells: usize, certified_min: f64 },
}

impl fmt::Display for GapVerification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GapVerification::Density { provenance, infimum } => {
                write!(f, "density {provenance:?}, spectrum starts at {infimum}")
            }
            GapVerification::Lipschitz { cells, certified_min } => {
                write!(f, "certified torus minimum {certified_min} over {cells} cells")
            }
        }
    }
}

/// Establishes `F(lambda) = 0` for `lambda < lambda0`.
pub fn verify_gap(
    cx: &EquivariantChainComplex,
    dim: usize,
    lambda0: f64,
    density: Option<&DensityEstimate>,
) -> Result<GapVerification> {
    if !(lambda0 > 0.0) {
        return Err(Error::GapNotVerified { lambda0 });
    }
    if let Some(d) = density {
        let trusted = matches!(d.provenance, Provenance::ClosedForm | Provenance::TorusQuadrature { .. });
        if let (true, Some(inf)) = (trusted, d.infimum) {
            if inf >= lambda0 - crate::covers::EIG_TOL {
                return Ok(GapVerification::Density { provenance: d.provenance, infimum: inf });
            }
        }
    }
    if cx.group().is_abelian() {
        let lap = cx.laplacian(dim)?;
        let (cells, certified_min) = certified_torus_minimum(&lap, lambda0 - GAP_SLACK);
        if certified_min >= lambda0 - GAP_SLACK {
            return Ok(GapVerification::Lipschitz { cells, certified_min });
        }
    }
    Err(Error::GapNotVerified { lambda0 })
}

/// Certified lower bound for `min_x lambda_min(rho_x(M))`, refining cells
/// until every cell is above `target` or the budget runs out. Returns the
/// number of cells examined and the bound.
fn certified_torus_minimum(lap: &GroupRingMatrix, target: f64) -> (usize, f64) {
    let n = lap.group().rank().expect("abelian");
    let a = lap.rows();
    if a == 0 {
        return (0, f64::INFINITY);
    }
    let tau = std::f64::consts::TAU;
    let entries: Vec<Vec<(Vec<f64>, f64)>> = lap
        .entries()
        .iter()
        .map(|e| {
            e.terms()
                .map(|(g, c)| {
                    let GroupElement::Abelian(v) = g else { unreachable!() };
                    (v.iter().map(|&k| k as f64).collect(), c.to_f64().unwrap_or(f64::NAN))
                })
                .collect()
        })
        .collect();
    // Second derivative bound along directions with |h|_inf <= 1.
    let l2 = (0..a)
        .map(|r| {
            (0..a)
                .flat_map(|c| entries[r * a + c].iter())
                .map(|(g, c)| c.abs() * (tau * g.iter().map(|v| v.abs()).sum::<f64>()).powi(2))
                .sum::<f64>()
        })
        .fold(0.0, f64::max);
    let first_order = |x: &[f64]| -> f64 {
        (0..n)
            .map(|k| {
                (0..a)
                    .map(|r| {
                        (0..a)
                            .map(|c| {
                                let s: num_complex::Complex64 = entries[r * a + c]
                                    .iter()
                                    .map(|(g, coeff)| {
                                        let phase: f64 = g.iter().zip(x).map(|(u, v)| u * v).sum();
                                        num_complex::Complex64::from_polar(coeff * tau * g[k], tau * phase)
                                    })
                                    .sum();
                                s.norm()
                            })
                            .sum::<f64>()
                    })
                    .fold(0.0, f64::max)
            })
            .sum()
    };
    let initial = 32usize;
    let mut stack: Vec<(Vec<f64>, f64)> = Vec::new();
    let mut idx = vec![0usize; n];
    loop {
        stack.push((idx.iter().map(|&i| i as f64 / initial as f64).collect(), 0.5 / initial as f64));
        let mut k = 0;
        while k < n {
            idx[k] += 1;
            if idx[k] < initial {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == n {
            break;
        }
    }
    let mut examined = 0usize;
    let mut certified = f64::INFINITY;
    while let Some((x, t)) = stack.pop() {
        examined += 1;
        let lmin = character_eigenvalues(lap, &x).into_iter().fold(f64::INFINITY, f64::min);
        let lower = lmin - (t * first_order(&x) + 0.5 * l2 * t * t);
        if lower >= target {
            certified = certified.min(lower);
            continue;
        }
        if lmin < target || examined + stack.len() + (1 << n) > GAP_CELL_BUDGET {
            return (examined, certified.min(lower));
        }
        let h = t / 2.0;
        for mask in 0..(1usize << n) {
            let child = x
                .iter()
                .enumerate()
                .map(|(k, &v)| if mask >> k & 1 == 1 { v + h } else { v - h })
                .collect();
            stack.push((child, h));
        }
    }
    (examined, certified)
}

/// `b_q(X') <= 4 a [G:G'] exp(-M short(G'))` with `M = (2/R) sqrt(lambda0/K)`.
pub fn gap_bound(
    cx: &EquivariantChainComplex,
    q: &FiniteQuotient,
    dim: usize,
    lambda0: f64,
    density: Option<&DensityEstimate>,
    caps: &Caps,
) -> Result<BoundReport> {
    let verification = verify_gap(cx, dim, lambda0, density)?;
    let s = setting(cx, q, dim, caps)?;
    let mut report = BoundReport::from_setting(Regime::Gap, &s);
    let m = if s.r == 0 {
        f64::INFINITY
    } else {
        2.0 / s.r as f64 * (lambda0 / s.k).sqrt()
    };
    let decay = match s.short {
        Short::Finite(v) => (-m * v as f64).exp(),
        Short::Infinite => 0.0,
    };
    report.lambda0 = Some(lambda0);
    report.m = Some(m);
    report.verification = verification.to_string();
    Ok(report.finish(4.0 * s.cells as f64 * s.index as f64 * decay))
}

/// `#{mu <= lambda} <= a [G:G'] p_n(lambda0/K) / p_n(lambda/K)` for
/// `lambda < lambda0`, with `p_n` built at `z = lambda0 / K`.
pub fn eig_count_bound(
    cx: &EquivariantChainComplex,
    q: &FiniteQuotient,
    dim: usize,
    lambda0: f64,
    lambda: f64,
    density: Option<&DensityEstimate>,
    caps: &Caps,
) -> Result<BoundReport> {
    if lambda >= lambda0 {
        return Err(Error::LambdaAboveGap { lambda, lambda0 });
    }
    let verification = verify_gap(cx, dim, lambda0, density)?;
    let s = setting(cx, q, dim, caps)?;
    let z = lambda0 / s.k;
    let p = luck_polynomial(s.n.min(u32::MAX as u64) as u32, z)?;
    let ratio = p.ratio(z, lambda.max(0.0) / s.k).min(1.0);
    let mut report = BoundReport::from_setting(Regime::EigenCount, &s);
    report.lambda0 = Some(lambda0);
    report.lambda = Some(lambda);
    report.z = Some(z);
    report.measured = s.cover.count_eigs_below(dim, lambda, caps)?;
    report.verification = verification.to_string();
    Ok(report.finish(s.cells as f64 * s.index as f64 * ratio))
}

/// Degree cap for the exact trace in [`eig_count_trace_bound`].
pub const EXACT_TRACE_DEGREE_CAP: u64 = 64;

/// `#{mu <= lambda} <= [G:G'] Tr_G p_n(Delta/K) / p_n(lambda/K)` with `p_n`
/// built at some `z` in `(lambda/K, 1)`, for any `lambda < K`. Every
/// `n < short/R` is admissible; the best over powers of two up to the cap
/// and `z = lambda/K + (1 - lambda/K) / 2^j`, `j = 1..=4`, is reported. No gap is needed:
/// the trace is computed exactly in the group ring.
pub fn eig_count_trace_bound(
    cx: &EquivariantChainComplex,
    q: &FiniteQuotient,
    dim: usize,
    lambda: f64,
    caps: &Caps,
) -> Result<BoundReport> {
    let s = setting(cx, q, dim, caps)?;
    if !(lambda >= 0.0 && lambda < s.k) {
        return Err(Error::Invalid(format!("lambda {lambda} must lie in [0, K) with K = {}", s.k)));
    }
    let n = s.n.min(EXACT_TRACE_DEGREE_CAP);
    let k = BigRational::from_float(s.k).ok_or_else(|| Error::Invalid("K is not finite".into()))?;
    let lambda_k = BigRational::from_float(lambda).ok_or_else(|| Error::Invalid("lambda is not finite".into()))? / &k;
    let scale = Polynomial::new(vec![BigRational::zero(), BigRational::one() / &k]);
    let mut degrees: Vec<u64> = (0..7).map(|e| 1u64 << e).filter(|&d| d < n).collect();
    degrees.push(n);
    let mut best: Option<(f64, u64, BigRational)> = None;
    for &deg in &degrees {
        for j in 1..=4 {
            let z = &lambda_k + (BigRational::one() - &lambda_k) / BigRational::from_integer((1u32 << j).into());
            let p = luck_polynomial_exact(deg as u32, &z)?;
            let trace = evaluate_polynomial(&p.compose(&scale), &s.laplacian)?.gamma_trace();
            let ratio = (trace / p.eval(&lambda_k)).to_f64().unwrap_or(f64::INFINITY);
            if best.as_ref().is_none_or(|(r, _, _)| ratio < *r) {
                best = Some((ratio, deg, z));
            }
        }
    }
    let (ratio, degree, z) = best.expect("nonempty candidate set");
    let mut report = BoundReport::from_setting(Regime::EigenCount, &s);
    report.n = degree;
    report.lambda = Some(lambda);
    report.z = z.to_f64();
    report.measured = s.cover.count_eigs_below(dim, lambda, caps)?;
    report.verification = "exact Gamma-trace of p_n(Delta/K)".into();
    report.notes.push(format!("best of degrees {degrees:?} below min(short/R, {EXACT_TRACE_DEGREE_CAP})"));
    let trivial = (s.cells * s.index) as f64;
    if s.index as f64 * ratio > trivial {
        report.notes.push("trace bound exceeds a[G:G']; trivial bound used".into());
    }
    Ok(report.finish((s.index as f64 * ratio).min(trivial)))
}

/// Checks `F(lambda) <= C lambda^beta` at every grid point in `(0, cutoff]`.
pub fn verify_power_decay(density: &DensityEstimate, beta: f64, c: f64, cutoff: f64) -> Result<()> {
    if !(beta > 0.0 && c > 0.0 && cutoff > 0.0) {
        return Err(Error::HypothesisUnverified("beta, C and the cutoff must be positive".into()));
    }
    if let Some(f0) = density.at_zero() {
        if f0 > 0.0 {
            return Err(Error::HypothesisUnverified(format!("F(0) = {f0} is positive")));
        }
    }
    for (&l, &v) in density.grid.iter().zip(&density.values) {
        if l > 0.0 && l <= cutoff && v > c * l.powf(beta) * (1.0 + 1e-12) {
            return Err(Error::HypothesisUnverified(format!(
                "F({l}) = {v} exceeds C lambda^beta = {}",
                c * l.powf(beta)
            )));
        }
    }
    Ok(())
}

/// `b_q(X') <= C1 [G:G'] (log short / short)^{2 beta}` under
/// `F(lambda) <= C lambda^beta` for `lambda <= cutoff`.
///
/// With `mu(x) <= C_mu x^beta`, `C_mu = max(C K^beta / a, (K / cutoff)^beta)`,
/// `y = n / beta >= e` and `z = (log y / y)^2` one gets
/// `J <= (C_mu + 4)(log y / y)^{2 beta}`. For `s >= max(3, 2R)` and
/// `s / (2 R beta) >= e`, `log y / y <= kappa log s / s` with
/// `kappa = 2 R beta (1 + max(0, ln(1 / 2 R beta)) / ln 3)`, whence
/// `C1 = a (C_mu + 4) kappa^{2 beta}`. Outside that range the trivial bound
/// `a [G:G']` is reported.
pub fn ns_bound(
    cx: &EquivariantChainComplex,
    q: &FiniteQuotient,
    dim: usize,
    beta: f64,
    c_density: f64,
    density: &DensityEstimate,
    cutoff: Option<f64>,
    caps: &Caps,
) -> Result<BoundReport> {
    let s = setting(cx, q, dim, caps)?;
    let cutoff = cutoff.unwrap_or(s.k).min(s.k);
    verify_power_decay(density, beta, c_density, cutoff)?;
    let a = s.cells as f64;
    let c_mu = (c_density * s.k.powf(beta) / a).max((s.k / cutoff).powf(beta));
    let two_r_beta = 2.0 * s.r as f64 * beta;
    let kappa = two_r_beta * (1.0 + (1.0 / two_r_beta).ln().max(0.0) / 3f64.ln());
    let c1 = a * (c_mu + 4.0) * kappa.powf(2.0 * beta);
    let mut report = BoundReport::from_setting(Regime::NovikovShubin, &s);
    report.beta = Some(beta);
    report.c = Some(c_density);
    report.c_prime = Some(c_mu + 4.0);
    report.verification = format!("F <= C lambda^beta on grid points up to {cutoff} ({:?})", density.provenance);
    let trivial = a * s.index as f64;
    let bound = match s.short {
        Short::Finite(sv) if s.r > 0 => {
            let sf = sv as f64;
            if sf >= 3.0 && sf >= 2.0 * s.r as f64 && sf / two_r_beta >= std::f64::consts::E {
                let y = s.n as f64 / beta;
                report.z = Some((y.ln() / y).powi(2));
                report.c1 = Some(c1);
                (c1 * s.index as f64 * (sf.ln() / sf).powf(2.0 * beta)).min(trivial)
            } else {
                report.notes.push("short below the range of the explicit constant; trivial bound a[G:G'] used".into());
                trivial
            }
        }
        _ => {
            report.notes.push("short/R unbounded; trivial bound a[G:G'] used".into());
            trivial
        }
    };
    Ok(report.finish(bound))
}

/// `b_q(X') <= a [G:G'] C' / log n` with `z = (log log n / n)^2`, under the
/// decay `F(lambda) < a log K / -log lambda` for `lambda < epsilon`, which
/// gives `mu(x) < C / -log x` with `C = max(2 log K, -log x_c)`,
/// `x_c = min(epsilon / K, 1 / K^2)`, and `C' = C + 4`.
pub fn sublog_bound(
    cx: &EquivariantChainComplex,
    q: &FiniteQuotient,
    dim: usize,
    density: Option<&DensityEstimate>,
    caps: &Caps,
) -> Result<BoundReport> {
    let lap = cx.laplacian(dim)?;
    let short = short_length(cx.group(), q.subgroup(), caps)?;
    if let Short::Finite(v) = short {
        if v < 3 {
            return Err(Error::ShortTooSmall(v));
        }
    }
    let (verified, how) = if cx.group().is_abelian() && lap.rows() <= crate::pattern::DETERMINANT_CAP {
        let ok = l2_betti_vanishes(cx, dim)?;
        (ok, if ok { "det(Delta) is not identically zero" } else { "det(Delta) vanishes identically" })
    } else if let Some(d) = density.filter(|d| d.infimum.is_some_and(|i| i > 0.0)) {
        let _ = d;
        (true, "density has a gap at zero")
    } else {
        (false, "L2 Betti number not known to vanish")
    };
    let s = setting(cx, q, dim, caps)?;
    let x_c = (SUBLOG_EPSILON / s.k).min(1.0 / (s.k * s.k));
    let c = (2.0 * s.k.ln()).max(-x_c.ln());
    let c_prime = c + 4.0;
    let mut report = BoundReport::from_setting(Regime::Sublog, &s);
    report.epsilon = Some(SUBLOG_EPSILON);
    report.c = Some(c);
    report.c_prime = Some(c_prime);
    report.hypothesis_verified = verified;
    report.verification = how.into();
    let a = s.cells as f64;
    let bound = if s.n >= 3 {
        let nf = s.n as f64;
        report.z = Some((nf.ln().ln() / nf).powi(2));
        if let Short::Finite(sv) = s.short {
            if sv >= 4 * s.r * s.r {
                report.c1 = Some(2.0 * a * c_prime);
            }
        }
        a * s.index as f64 * c_prime / nf.ln()
    } else {
        report.notes.push("n < 3; trivial bound a[G:G'] used".into());
        a * s.index as f64
    };
    Ok(report.finish(bound))
}

/// One member of a family in [`uniform_gap_exponent`].
#[derive(Clone, Debug, PartialEq)]
pub struct MemberCheck {
    pub index: usize,
    pub short: u64,
    pub betti: usize,
    pub bound: f64,
    pub satisfied: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct UniformGapReport {
    /// `D = min short / log index` over members of index at least 2.
    pub d: f64,
    pub m: f64,
    /// `1 - M D`.
    pub exponent: f64,
    /// `C = 4a` in `b < C index^{1 - M D}`.
    pub c: f64,
    pub verification: GapVerification,
    pub members: Vec<MemberCheck>,
}

/// Checks `b_q(X_i) <= 4a [G:G_i]^{1 - M D}` across a log-uniform family.
pub fn uniform_gap_exponent(
    cx: &EquivariantChainComplex,
    dim: usize,
    family: &[Subgroup],
    lambda0: f64,
    density: Option<&DensityEstimate>,
    caps: &Caps,
) -> Result<UniformGapReport> {
    let verification = verify_gap(cx, dim, lambda0, density)?;
    let lap = cx.laplacian(dim)?;
    let k = lap.norm_bound();
    let r = lap.support_radius(caps)?;
    let mut rows = Vec::with_capacity(family.len());
    for sub in family {
        let quo = quotient(cx.group(), sub, caps)?;
        let short = short_length(cx.group(), sub, caps)?
            .finite()
            .ok_or_else(|| Error::FamilyNotLogUniform("a member has trivial intersection".into()))?;
        let betti = instantiate(cx, &quo, caps)?.betti(dim)?;
        rows.push((quo.order(), short, betti));
    }
    let ratios: Vec<f64> = rows
        .iter()
        .filter(|(index, _, _)| *index >= 2)
        .map(|&(index, short, _)| short as f64 / (index as f64).ln())
        .collect();
    if ratios.is_empty() {
        return Err(Error::FamilyNotLogUniform("no member of index at least 2".into()));
    }
    let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().copied().fold(0.0, f64::max);
    if hi > LOG_UNIFORM_SPREAD * lo {
        return Err(Error::FamilyNotLogUniform(format!(
            "short/log(index) ranges over [{lo:.3}, {hi:.3}], spread above {LOG_UNIFORM_SPREAD}"
        )));
    }
    let m = if r == 0 { f64::INFINITY } else { 2.0 / r as f64 * (lambda0 / k).sqrt() };
    let exponent = 1.0 - m * lo;
    let c = 4.0 * cx.cell_count(dim) as f64;
    let members = rows
        .into_iter()
        .map(|(index, short, betti)| {
            let bound = c * (index as f64).powf(exponent);
            MemberCheck {
                index,
                short,
                betti,
                bound,
                satisfied: dominates(bound, betti),
            }
        })
        .collect();
    Ok(UniformGapReport {
        d: lo,
        m,
        exponent,
        c,
        verification,
        members,
    })
}
