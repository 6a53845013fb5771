//! Novikov-Shubin exponent from the small-lambda behaviour of a density.

use crate::error::{Error, Result};
use crate::spectral::density::{DensityEstimate, Provenance};

/// Upper end of the fitting window.
pub const WINDOW: f64 = 0.1;
/// The grid must reach down to this value.
pub const FINEST_REQUIRED: f64 = 1e-3;
/// Quadrature points with fewer than this many eigenvalues below them are
/// dominated by sampling noise.
pub const MIN_QUADRATURE_HITS: f64 = 20.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NsEstimate {
    /// `F(lambda) - F(0) ~ C lambda^{alpha/2}`.
    Alpha(f64),
    /// No spectrum near zero.
    GapDetected,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NsReport {
    pub estimate: NsEstimate,
    pub f0: f64,
    /// Log-log points used in the fit.
    pub points: Vec<(f64, f64)>,
    /// Constant `C` of the fitted power law.
    pub constant: Option<f64>,
    pub residual: Option<f64>,
}

/// Least-squares fit of `log(F(lambda) - F(0))` against `log lambda` on the
/// grid points in `(0, 0.1]`; `alpha` is twice the slope.
pub fn estimate_ns(density: &DensityEstimate) -> Result<NsReport> {
    let finest = density.grid.iter().copied().find(|&l| l > 0.0);
    if !finest.is_some_and(|l| l <= FINEST_REQUIRED) {
        return Err(Error::InsufficientGrid(format!(
            "smallest positive grid point must be at most {FINEST_REQUIRED}"
        )));
    }
    let f0 = density.at_zero().unwrap_or(0.0);
    let floor = match density.provenance {
        Provenance::TorusQuadrature { samples } => MIN_QUADRATURE_HITS / samples as f64,
        _ => 0.0,
    };
    let window: Vec<(f64, f64)> = density
        .grid
        .iter()
        .zip(&density.values)
        .filter(|(&l, _)| l > 0.0 && l <= WINDOW)
        .map(|(&l, &v)| (l, v - f0))
        .collect();
    if window.iter().all(|&(_, e)| e <= 0.0) {
        return Ok(NsReport { estimate: NsEstimate::GapDetected, f0, points: Vec::new(), constant: None, residual: None });
    }
    let points: Vec<(f64, f64)> = window
        .into_iter()
        .filter(|&(_, e)| e > 0.0 && e + f0 >= floor)
        .map(|(l, e)| (l.ln(), e.ln()))
        .collect();
    if points.len() < 3 {
        return Err(Error::InsufficientGrid(format!("{} usable points in (0, {WINDOW}]", points.len())));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientGrid("all usable points coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (points.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum::<f64>() / n).sqrt();
    Ok(NsReport {
        estimate: NsEstimate::Alpha(2.0 * slope),
        f0,
        points,
        constant: Some(intercept.exp()),
        residual: Some(residual),
    })
}
