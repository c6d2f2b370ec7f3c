//! Partial heat traces, window selection, the two-term fit, and the
//! end-to-end geometry recovery with the ball audit.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{
    isoperimetric_audit, recover_geometry, weyl_count_prediction, GeometricData,
    IsoperimetricAudit, DEFAULT_BALL_TOL,
};
use crate::params::{BoundaryCondition, LameParameters};
use crate::special::upper_gamma_half_integer;
use crate::spectrum::Spectrum;

pub const DEFAULT_TRUNCATION_TOL: f64 = 1e-4;
pub const DEFAULT_WINDOW_RATIO: f64 = 20.0;
pub const DEFAULT_SAMPLES: usize = 16;
/// Smallest spectrum accepted by [`select_window`].
pub const MIN_EIGENVALUES: usize = 50;
/// Fits whose weighted normal matrix is worse conditioned are rejected.
pub const MAX_CONDITION: f64 = 1e8;
/// Relative noise floor assigned to every sample on top of its truncation.
const SAMPLE_NOISE_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceSample {
    pub t: f64,
    pub theta: f64,
    /// Estimated heat-trace mass of the eigenvalues beyond the list.
    pub truncation_bound: f64,
}

/// Weyl tail `int_{lambda_N}^inf e^{-t eta} dN(eta)` with
/// `N(eta) = c eta^{n/2}` and `c = N / lambda_N^{n/2}` taken from the list
/// itself, so no geometry is needed.
pub fn truncation_bound(spectrum: &Spectrum, t: f64) -> f64 {
    let top = *spectrum.eigenvalues.last().expect("spectra are non-empty");
    if top <= 0.0 {
        return 0.0;
    }
    let h = spectrum.dim as f64 / 2.0;
    let c = spectrum.count() as f64 / top.powf(h);
    c * h * t.powf(-h) * upper_gamma_half_integer(h, t * top)
}

pub fn heat_trace_partial(spectrum: &Spectrum, t: f64) -> Result<TraceSample> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidInput(format!("t={t} must be positive")));
    }
    // Small terms first.
    let theta = spectrum.eigenvalues.iter().rev().map(|&l| (-l * t).exp()).sum();
    Ok(TraceSample {
        t,
        theta,
        truncation_bound: truncation_bound(spectrum, t),
    })
}

fn truncation_ratio(spectrum: &Spectrum, t: f64) -> f64 {
    let s = heat_trace_partial(spectrum, t).expect("t is positive");
    if s.theta > 0.0 {
        s.truncation_bound / s.theta
    } else {
        f64::INFINITY
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowOptions {
    pub tol: f64,
    /// `t_max <= ratio * t_min`.
    pub ratio: f64,
}

impl Default for WindowOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TRUNCATION_TOL,
            ratio: DEFAULT_WINDOW_RATIO,
        }
    }
}

/// `(t_min, t_max)`: the truncation ratio is `tol` at `t_min`, and
/// `t_max = min(ratio * t_min, 1 / lambda_10)`.
pub fn select_window(spectrum: &Spectrum, opts: &WindowOptions) -> Result<(f64, f64)> {
    if !(opts.tol > 0.0) || !(opts.ratio > 1.0) {
        return Err(Error::InvalidInput(format!(
            "window tol={} must be > 0 and ratio={} > 1",
            opts.tol, opts.ratio
        )));
    }
    let n = spectrum.count();
    if n < MIN_EIGENVALUES {
        return Err(Error::EmptyWindow(format!(
            "spectrum has {n} eigenvalues; at least {MIN_EIGENVALUES} are required"
        )));
    }
    let top = spectrum.eigenvalues[n - 1];
    let tenth = spectrum.eigenvalues[9];
    if !(tenth > 0.0) {
        return Err(Error::EmptyWindow("the ten lowest eigenvalues are all zero".into()));
    }
    let t_cap = 1.0 / tenth;
    if truncation_ratio(spectrum, t_cap) > opts.tol {
        return Err(Error::EmptyWindow(format!(
            "truncation exceeds tol={} for every t <= 1/lambda_10 = {t_cap:e}; supply more eigenvalues",
            opts.tol
        )));
    }
    // The ratio decreases in t; bisect in log t.
    let (mut lo, mut hi) = ((1e-3 / top).min(t_cap).ln(), t_cap.ln());
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if truncation_ratio(spectrum, mid.exp()) > opts.tol {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-12 {
            break;
        }
    }
    let t_min = hi.exp();
    let t_max = (opts.ratio * t_min).min(t_cap);
    if t_max < 2.0 * t_min {
        // lambda_N has to grow by about t_min / (t_max_wanted) to open the window.
        let grow = (2.0 * t_min / t_cap).max(1.0);
        let needed = (n as f64 * grow.powf(spectrum.dim as f64 / 2.0)).ceil();
        return Err(Error::EmptyWindow(format!(
            "t_min = {t_min:e} leaves no room below 1/lambda_10 = {t_cap:e}; about {needed} eigenvalues are required (have {n})"
        )));
    }
    Ok((t_min, t_max))
}

/// `count` geometrically spaced samples over `[t_min, t_max]`.
pub fn sample_window(spectrum: &Spectrum, window: (f64, f64), count: usize) -> Result<Vec<TraceSample>> {
    let (t_min, t_max) = window;
    if !(t_min > 0.0 && t_max > t_min) {
        return Err(Error::InvalidInput(format!("window ({t_min}, {t_max}) is empty")));
    }
    if count < 2 {
        return Err(Error::InvalidInput("need at least two samples".into()));
    }
    let ratio = (t_max / t_min).ln() / (count - 1) as f64;
    (0..count)
        .into_par_iter()
        .map(|i| heat_trace_partial(spectrum, t_min * (ratio * i as f64).exp()))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub a0_hat: f64,
    pub a1_hat: f64,
    pub a0_uncertainty: f64,
    pub a1_uncertainty: f64,
    pub window: (f64, f64),
    pub residual_rms: f64,
    /// Condition number of the weighted 2x2 normal matrix.
    pub condition: f64,
    pub n_samples: usize,
    /// Coefficient of the `C t` guard term in the three-term fit.
    pub guard_c: f64,
    pub guard_c_uncertainty: f64,
}

struct LinearFit {
    coef: Vec<f64>,
    stat_sigma: Vec<f64>,
    condition: f64,
    residual_rms: f64,
}

fn weighted_fit(x: &[Vec<f64>], y: &[f64], sigma: &[f64]) -> Result<LinearFit> {
    let m = y.len();
    let p = x[0].len();
    let mut a = DMatrix::zeros(m, p);
    let mut b = DVector::zeros(m);
    for i in 0..m {
        for j in 0..p {
            a[(i, j)] = x[i][j] / sigma[i];
        }
        b[i] = y[i] / sigma[i];
    }
    let normal = a.transpose() * &a;
    let eig = SymmetricEigen::new(normal.clone());
    let (lo, hi) = eig
        .eigenvalues
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| (lo.min(v), hi.max(v.abs())));
    let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    let inv = normal
        .try_inverse()
        .ok_or(Error::RankDeficientFit(condition))?;
    let coef = &inv * (a.transpose() * &b);
    let resid = &a * &coef - &b;
    let chi2 = resid.norm_squared();
    let dof = (m - p).max(1) as f64;
    let scale = chi2 / dof;
    let residual_rms = (0..m).map(|i| (resid[i] * sigma[i]).powi(2)).sum::<f64>() / m as f64;
    Ok(LinearFit {
        coef: coef.iter().copied().collect(),
        stat_sigma: (0..p).map(|j| (inv[(j, j)] * scale).sqrt()).collect(),
        condition,
        residual_rms: residual_rms.sqrt(),
    })
}

/// Weighted least squares for `theta t^{n/2} = A + B t^{1/2}`.
///
/// Each sample carries the relative error `1e-9 + truncation / theta`. A
/// second fit with an extra `C t` term is reported as a diagnostic; the
/// returned coefficients come from the two-term fit, and the gap between
/// the two fits is folded into the uncertainties.
pub fn fit_asymptotics(samples: &[TraceSample], n: usize) -> Result<FitResult> {
    if samples.len() < 8 {
        return Err(Error::InvalidInput(format!(
            "{} samples given; at least 8 are required",
            samples.len()
        )));
    }
    if n == 0 {
        return Err(Error::InvalidInput("dimension must be >= 1".into()));
    }
    for s in samples {
        if !(s.t > 0.0 && s.theta > 0.0 && s.truncation_bound >= 0.0) {
            return Err(Error::InvalidInput(format!("invalid trace sample {s:?}")));
        }
    }
    let h = n as f64 / 2.0;
    let y: Vec<f64> = samples.iter().map(|s| s.theta * s.t.powf(h)).collect();
    let sigma: Vec<f64> = samples
        .iter()
        .zip(&y)
        .map(|(s, y)| y * (SAMPLE_NOISE_FLOOR + s.truncation_bound / s.theta))
        .collect();
    let two: Vec<Vec<f64>> = samples.iter().map(|s| vec![1.0, s.t.sqrt()]).collect();
    let three: Vec<Vec<f64>> = samples.iter().map(|s| vec![1.0, s.t.sqrt(), s.t]).collect();
    let f2 = weighted_fit(&two, &y, &sigma)?;
    if f2.condition > MAX_CONDITION {
        return Err(Error::RankDeficientFit(f2.condition));
    }
    let f3 = weighted_fit(&three, &y, &sigma)?;
    let (t_min, t_max) = samples
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), s| (lo.min(s.t), hi.max(s.t)));
    Ok(FitResult {
        a0_hat: f2.coef[0],
        a1_hat: f2.coef[1],
        a0_uncertainty: f2.stat_sigma[0].hypot(f2.coef[0] - f3.coef[0]),
        a1_uncertainty: f2.stat_sigma[1].hypot(f2.coef[1] - f3.coef[1]),
        window: (t_min, t_max),
        residual_rms: f2.residual_rms,
        condition: f2.condition,
        n_samples: samples.len(),
        guard_c: f3.coef[2],
        guard_c_uncertainty: f3.stat_sigma[2],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecoverOptions {
    pub window: WindowOptions,
    pub n_samples: usize,
    pub ball_tol: f64,
}

impl Default for RecoverOptions {
    fn default() -> Self {
        Self {
            window: WindowOptions::default(),
            n_samples: DEFAULT_SAMPLES,
            ball_tol: DEFAULT_BALL_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveredGeometry {
    pub geometry: GeometricData,
    pub fit: FitResult,
    pub audit: IsoperimetricAudit,
    /// Propagated one-sigma uncertainty of `audit.ratio`.
    pub ratio_uncertainty: f64,
    pub volume_rel_err: Option<f64>,
    pub boundary_rel_err: Option<f64>,
    pub warnings: Vec<String>,
}

impl RecoveredGeometry {
    /// `ratio - ball_ratio` in units of the ratio uncertainty.
    pub fn ball_separation_sigmas(&self) -> f64 {
        (self.audit.ratio - self.audit.ball_ratio) / self.ratio_uncertainty
    }
}

/// Window, sample, fit, invert the coefficient map and audit against the ball.
pub fn end_to_end_recover(
    spectrum: &Spectrum,
    params: LameParameters,
    n: usize,
    bc: BoundaryCondition,
    opts: &RecoverOptions,
) -> Result<RecoveredGeometry> {
    if spectrum.bc != bc {
        return Err(Error::Consistency(format!(
            "spectrum is {} but {bc} was requested",
            spectrum.bc
        ))
        .at("input"));
    }
    if spectrum.params != params {
        return Err(Error::Consistency(format!(
            "spectrum parameters {:?} differ from {params:?}",
            spectrum.params
        ))
        .at("input"));
    }
    if spectrum.dim != n {
        return Err(Error::Consistency(format!(
            "spectrum is {}-dimensional but n = {n}",
            spectrum.dim
        ))
        .at("input"));
    }
    let window = select_window(spectrum, &opts.window).map_err(|e| e.at("window"))?;
    let samples = sample_window(spectrum, window, opts.n_samples).map_err(|e| e.at("sampling"))?;
    let fit = fit_asymptotics(&samples, n).map_err(|e| e.at("fit"))?;
    let geometry = recover_geometry(fit.a0_hat, fit.a1_hat, params, n, bc).map_err(|e| e.at("recover"))?;
    let audit = isoperimetric_audit(&geometry, opts.ball_tol);
    let exponent = (n as f64 - 1.0) / n as f64;
    let ratio_uncertainty = audit.ratio
        * (fit.a1_uncertainty / fit.a1_hat).hypot(exponent * fit.a0_uncertainty / fit.a0_hat);

    let mut warnings = Vec::new();
    let truth = match &spectrum.domain_meta {
        Some(d) => {
            if d.has_corners() {
                warnings.push("domain has corners; corner terms are absent from the two-term model".to_string());
            }
            Some(d.geometric_data().map_err(|e| e.at("truth"))?)
        }
        None => None,
    };
    if let crate::spectrum::Provenance::Fem { note: Some(note), .. } = &spectrum.provenance {
        warnings.push(note.clone());
    }
    if fit.guard_c.abs() > 3.0 * fit.guard_c_uncertainty && fit.guard_c_uncertainty > 0.0 {
        warnings.push(format!(
            "guard term C = {:.3e} +- {:.1e} is not negligible",
            fit.guard_c, fit.guard_c_uncertainty
        ));
    }
    Ok(RecoveredGeometry {
        geometry,
        fit,
        audit,
        ratio_uncertainty,
        volume_rel_err: truth.map(|g| geometry.volume / g.volume - 1.0),
        boundary_rel_err: truth.map(|g| geometry.boundary_area / g.boundary_area - 1.0),
        warnings,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeylCheck {
    pub eta: f64,
    pub count: usize,
    pub prediction: f64,
    pub rel_deviation: f64,
}

/// `N(eta) / prediction - 1` at `eta = lambda_{ceil(0.9 N)}` using the
/// spectrum's own domain for the volume.
pub fn weyl_empirical_check(spectrum: &Spectrum) -> Result<WeylCheck> {
    let domain = spectrum
        .domain_meta
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("Weyl check needs the domain of the spectrum".into()))?;
    let geom = domain.geometric_data()?;
    weyl_check_with(spectrum, &geom)
}

pub fn weyl_check_with(spectrum: &Spectrum, geom: &GeometricData) -> Result<WeylCheck> {
    let n = spectrum.count();
    let index = ((0.9 * n as f64).ceil() as usize).clamp(1, n);
    let eta = spectrum.eigenvalues[index - 1];
    let count = spectrum.counting_function(eta);
    let prediction = weyl_count_prediction(spectrum.params, spectrum.dim, geom.volume, eta);
    if !(prediction > 0.0) {
        return Err(Error::InvalidInput(format!("Weyl prediction at eta = {eta} is zero")));
    }
    Ok(WeylCheck {
        eta,
        count,
        prediction,
        rel_deviation: count as f64 / prediction - 1.0,
    })
}

/// Samples of `theta t^{n/2}` against `sqrt t` with the fitted line, for plotting.
pub fn fit_curve(samples: &[TraceSample], fit: &FitResult, n: usize) -> Vec<(f64, f64, f64)> {
    let h = n as f64 / 2.0;
    samples
        .iter()
        .map(|s| {
            let x = s.t.sqrt();
            (x, s.theta * s.t.powf(h), fit.a0_hat + fit.a1_hat * x)
        })
        .collect()
}
