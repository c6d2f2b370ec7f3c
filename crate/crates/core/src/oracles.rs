//! Exact and semi-analytic spectra: the interval, its theta-function trace,
//! and the clamped elastic disk.
//!
//! # Disk determinant
//!
//! Write `u = grad phi + curl(psi e_z)` with `phi = J_m(alpha r) cos(m theta)`,
//! `psi = C J_m(beta r) sin(m theta)`, `alpha^2 = lambda / (2 tau + mu)` and
//! `beta^2 = lambda / tau`. Then
//!
//! ```text
//! u_r     = [alpha J_m'(alpha r) + C (m / r) J_m(beta r)] cos(m theta)
//! u_theta = -[(m / r) J_m(alpha r) + C beta J_m'(beta r)] sin(m theta)
//! ```
//!
//! and `u = 0` at `r = R` has a nontrivial `(1, C)` exactly when
//!
//! ```text
//! D_m(lambda) = m^2 J_m(a) J_m(b) - a b J_m'(a) J_m'(b),   a = alpha R, b = beta R
//! ```
//!
//! vanishes (the 2x2 determinant multiplied by `-R^2`). For `m = 0` it
//! factors as `-a b J_1(a) J_1(b)`: pure pressure modes `J_1(a) = 0` and pure
//! torsional modes `J_1(b) = 0`, each simple. For `m >= 1` the `cos/sin`
//! swap gives a second mode, so those roots have multiplicity 2.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{weyl_boundary_correction, weyl_count_prediction, GeometricData};
use crate::mesh::Domain2D;
use crate::params::{BoundaryCondition, LameParameters};
use crate::special::{bessel_j_sequence, bessel_j_with_derivative, find_root_bracketed};
use crate::spectrum::{Domain, Provenance, Spectrum};

/// `lambda_k` of `-(2 tau + mu) u'' = lambda u` on `[0, L]`, `k = 1..=K`.
pub fn interval_spectrum_1d(params: LameParameters, length: f64, bc: BoundaryCondition, k: usize) -> Result<Spectrum> {
    if !(length > 0.0 && length.is_finite()) {
        return Err(Error::InvalidInput(format!("length {length} must be positive")));
    }
    if k == 0 {
        return Err(Error::InvalidInput("K must be >= 1".into()));
    }
    let c = params.pressure() * (std::f64::consts::PI / length).powi(2);
    let offset = match bc {
        BoundaryCondition::Dirichlet => 0,
        BoundaryCondition::Neumann => 1,
    };
    let eigenvalues = (1..=k).map(|j| c * ((j - offset) as f64).powi(2)).collect();
    Spectrum::new(
        1,
        bc,
        params,
        eigenvalues,
        Provenance::AnalyticInterval { length },
        Some(Domain::Interval { length }),
    )
}

/// `sum_k exp(-lambda_k t)` over the whole interval spectrum, stopping once
/// the next term drops below `1e-16`.
pub fn theta_trace_1d(params: LameParameters, length: f64, bc: BoundaryCondition, t: f64) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidInput(format!("t={t} must be positive")));
    }
    if !(length > 0.0 && length.is_finite()) {
        return Err(Error::InvalidInput(format!("length {length} must be positive")));
    }
    let c = params.pressure() * (std::f64::consts::PI / length).powi(2) * t;
    let mut sum = 0.0;
    let mut k = 1.0f64;
    loop {
        let term = (-c * k * k).exp();
        if term < 1e-16 {
            break;
        }
        sum += term;
        k += 1.0;
    }
    Ok(match bc {
        BoundaryCondition::Dirichlet => sum,
        BoundaryCondition::Neumann => 1.0 + sum,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiskModeRoot {
    pub m: usize,
    /// 1-based index within its `(m, branch)` family.
    pub radial_index: usize,
    pub lambda: f64,
    pub multiplicity: usize,
}

/// Bessel arguments `(a, b) = (R sqrt(lambda / (2 tau + mu)), R sqrt(lambda / tau))`.
fn disk_arguments(params: LameParameters, radius: f64, lambda: f64) -> (f64, f64) {
    (
        radius * (lambda / params.pressure()).sqrt(),
        radius * (lambda / params.shear()).sqrt(),
    )
}

/// `(D_m(lambda), scale)` with the envelope
/// `scale = (m + a) (m + b) |(J_m(a), J_m'(a))| |(J_m(b), J_m'(b))|`, which
/// bounds both terms of `D_m` and does not collapse where `J_m` or `J_m'`
/// happens to vanish.
pub fn disk_determinant(params: LameParameters, radius: f64, m: usize, lambda: f64) -> (f64, f64) {
    let (a, b) = disk_arguments(params, radius, lambda);
    let (ja, dja) = bessel_j_with_derivative(m, a);
    let (jb, djb) = bessel_j_with_derivative(m, b);
    let mf = m as f64;
    let d = mf * mf * ja * jb - a * b * dja * djb;
    (d, (mf + a) * (mf + b) * ja.hypot(dja) * jb.hypot(djb))
}

/// `D_m` from precomputed sequences `J_0..J_{m+1}` at `a` and `b`.
fn determinant_from_sequences(m: usize, a: f64, b: f64, ja: &[f64], jb: &[f64]) -> f64 {
    let da = 0.5 * (ja[m - 1] - ja[m + 1]);
    let db = 0.5 * (jb[m - 1] - jb[m + 1]);
    (m * m) as f64 * ja[m] * jb[m] - a * b * da * db
}

/// Lower bound on the lowest root of mode `m`: `tau ((m - 1) / R)^2`.
fn mode_floor(params: LameParameters, radius: f64, m: usize) -> f64 {
    let s = m.saturating_sub(1) as f64 / radius;
    params.shear() * s * s
}

/// Smallest angular index whose modes all lie above `lambda_max`, minus one.
pub fn disk_m_max_for(params: LameParameters, radius: f64, lambda_max: f64) -> usize {
    (radius * (lambda_max / params.shear()).sqrt()).floor() as usize + 1
}

const ROOT_RTOL: f64 = 1e-12;
const RESIDUAL_TOL: f64 = 1e-9;

fn refine_root<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> Result<f64> {
    find_root_bracketed(f, lo, hi, ROOT_RTOL)
}

/// Roots `lambda <= lambda_max` of the single-family condition `J_1(c R sqrt(lambda)) = 0`.
fn j1_family(speed: f64, radius: f64, lambda_max: f64, step: f64) -> Result<Vec<f64>> {
    let arg = |lambda: f64| radius * (lambda / speed).sqrt();
    let f = |lambda: f64| bessel_j_sequence(1, arg(lambda))[1];
    let mut roots = Vec::new();
    let mut lo = step.min(lambda_max);
    let mut flo = f(lo);
    while lo < lambda_max {
        let hi = (lo + step).min(lambda_max);
        let fhi = f(hi);
        if fhi == 0.0 || flo.signum() != fhi.signum() {
            let r = refine_root(f, lo, hi)?;
            let seq = bessel_j_sequence(2, arg(r));
            if seq[1].abs() > RESIDUAL_TOL * (seq[0].abs() + seq[2].abs()) {
                return Err(Error::NonConvergence(format!("J_1 root near {r} did not refine")));
            }
            roots.push(r);
        }
        lo = hi;
        flo = fhi;
    }
    Ok(roots)
}

/// All roots of `D_m` up to `lambda_max` for `m = 0..=m_max`, sorted by `(lambda, m)`.
pub fn disk_dirichlet_roots(
    params: LameParameters,
    radius: f64,
    m_max: usize,
    lambda_max: f64,
) -> Result<Vec<DiskModeRoot>> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidInput(format!("radius {radius} must be positive")));
    }
    if !(lambda_max > 0.0 && lambda_max.is_finite()) {
        return Err(Error::InvalidInput(format!("lambda_max {lambda_max} must be positive")));
    }
    let step = 0.5 * params.shear() / (radius * radius);
    let mut roots = Vec::new();
    for speed in [params.pressure(), params.shear()] {
        for (i, lambda) in j1_family(speed, radius, lambda_max, step)?.into_iter().enumerate() {
            roots.push(DiskModeRoot {
                m: 0,
                radial_index: i + 1,
                lambda,
                multiplicity: 1,
            });
        }
    }

    if m_max >= 1 {
        let top = (lambda_max / step).ceil() as usize;
        let grid: Vec<f64> = (1..=top).map(|i| (i as f64 * step).min(lambda_max)).collect();
        // Signs of D_1..D_{m_max} at every grid point from one pair of
        // Bessel sequences per point.
        let signs: Vec<Vec<i8>> = grid
            .par_iter()
            .map(|&lambda| {
                let (a, b) = disk_arguments(params, radius, lambda);
                let ja = bessel_j_sequence(m_max + 1, a);
                let jb = bessel_j_sequence(m_max + 1, b);
                (1..=m_max)
                    .map(|m| {
                        let d = determinant_from_sequences(m, a, b, &ja, &jb);
                        if d > 0.0 {
                            1
                        } else if d < 0.0 {
                            -1
                        } else {
                            0
                        }
                    })
                    .collect()
            })
            .collect();
        let per_mode: Vec<Result<Vec<DiskModeRoot>>> = (1..=m_max)
            .into_par_iter()
            .map(|m| {
                let floor = mode_floor(params, radius, m);
                let f = |lambda: f64| disk_determinant(params, radius, m, lambda).0;
                let mut found = Vec::new();
                let mut last: Option<(f64, i8)> = None;
                for (i, &lambda) in grid.iter().enumerate() {
                    if lambda < floor {
                        continue;
                    }
                    let s = signs[i][m - 1];
                    if s == 0 {
                        continue;
                    }
                    if let Some((lo, sl)) = last {
                        if sl != s {
                            let r = refine_root(f, lo, lambda)?;
                            let (d, scale) = disk_determinant(params, radius, m, r);
                            if d.abs() > RESIDUAL_TOL * scale {
                                return Err(Error::NonConvergence(format!(
                                    "mode {m} root near {r}: |D| = {:e} exceeds {:e}",
                                    d.abs(),
                                    RESIDUAL_TOL * scale
                                )));
                            }
                            found.push(DiskModeRoot {
                                m,
                                radial_index: found.len() + 1,
                                lambda: r,
                                multiplicity: 2,
                            });
                        }
                    }
                    last = Some((lambda, s));
                }
                Ok(found)
            })
            .collect();
        for r in per_mode {
            roots.extend(r?);
        }
    }
    roots.sort_by(|x, y| x.lambda.total_cmp(&y.lambda).then(x.m.cmp(&y.m)));
    Ok(roots)
}

/// Comparison of an eigenvalue count with the two-term Weyl prediction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeylCountAudit {
    pub eta: f64,
    pub count: usize,
    pub leading: f64,
    pub boundary: f64,
    /// Accepted `|count - leading - boundary|`.
    pub band: f64,
    pub within_band: bool,
}

/// The band is `|boundary| + 2`: the size of the boundary correction itself
/// (whose coefficient carries the largest modelling uncertainty) plus one
/// double mode.
pub fn weyl_count_audit(
    count: usize,
    params: LameParameters,
    geom: &GeometricData,
    bc: BoundaryCondition,
    eta: f64,
) -> WeylCountAudit {
    let leading = weyl_count_prediction(params, geom.dim, geom.volume, eta);
    let boundary = weyl_boundary_correction(params, geom.dim, geom.boundary_area, bc, eta);
    let band = boundary.abs() + 2.0;
    WeylCountAudit {
        eta,
        count,
        leading,
        boundary,
        band,
        within_band: (count as f64 - leading - boundary).abs() <= band,
    }
}

/// Clamped-disk spectrum up to `lambda_max` with multiplicities expanded,
/// checked for completeness against the Weyl count.
pub fn disk_dirichlet_spectrum(
    params: LameParameters,
    radius: f64,
    m_max: usize,
    lambda_max: f64,
) -> Result<Spectrum> {
    let roots = disk_dirichlet_roots(params, radius, m_max, lambda_max)?;
    if roots.is_empty() {
        return Err(Error::IncompleteSpectrum(format!(
            "no eigenvalues below lambda_max = {lambda_max}"
        )));
    }
    let eigenvalues: Vec<f64> = roots
        .iter()
        .flat_map(|r| std::iter::repeat(r.lambda).take(r.multiplicity))
        .collect();
    let domain = Domain2D::Disk { radius };
    let audit = weyl_count_audit(
        eigenvalues.len(),
        params,
        &domain.geometric_data()?,
        BoundaryCondition::Dirichlet,
        lambda_max,
    );
    if !audit.within_band {
        let needed = disk_m_max_for(params, radius, lambda_max);
        return Err(Error::IncompleteSpectrum(format!(
            "{} eigenvalues below {lambda_max}, Weyl predicts {:.1} +- {:.1}{}",
            audit.count,
            audit.leading + audit.boundary,
            audit.band,
            if m_max < needed {
                format!("; m_max = {m_max} is below the {needed} needed to reach lambda_max")
            } else {
                String::new()
            }
        )));
    }
    Spectrum::new(
        2,
        BoundaryCondition::Dirichlet,
        params,
        eigenvalues,
        Provenance::AnalyticDisk {
            radius,
            m_max,
            lambda_max,
        },
        Some(Domain::Planar(domain)),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn params(tau: f64, mu: f64) -> LameParameters {
        LameParameters::new(tau, mu).unwrap()
    }

    #[test]
    fn interval_closed_forms() {
        let p = params(1.0, -0.5);
        let d = interval_spectrum_1d(p, PI, BoundaryCondition::Dirichlet, 5).unwrap();
        for (k, v) in d.eigenvalues.iter().enumerate() {
            assert!((v - 1.5 * ((k + 1) * (k + 1)) as f64).abs() < 1e-12);
        }
        let n = interval_spectrum_1d(p, PI, BoundaryCondition::Neumann, 5).unwrap();
        assert_eq!(n.eigenvalues[0], 0.0);
        for k in 0..4 {
            assert!(n.eigenvalues[k] <= d.eigenvalues[k] && d.eigenvalues[k] <= n.eigenvalues[k + 1]);
        }
        assert!(interval_spectrum_1d(p, 0.0, BoundaryCondition::Dirichlet, 5).is_err());
    }

    #[test]
    fn large_interval_spectrum_is_fast() {
        let start = std::time::Instant::now();
        let s = interval_spectrum_1d(params(1.0, 0.0), 1.0, BoundaryCondition::Dirichlet, 100_000).unwrap();
        assert_eq!(s.count(), 100_000);
        assert!(start.elapsed().as_secs_f64() < 0.1);
    }

    #[test]
    fn theta_trace_matches_poisson_identity() {
        // Poisson summation: sum_{k in Z} e^{-c k^2 t} = sqrt(pi / (c t)) sum_k e^{-pi^2 k^2 / (c t)}.
        let p = params(1.0, -0.5);
        let t = 0.01;
        let got = theta_trace_1d(p, PI, BoundaryCondition::Dirichlet, t).unwrap();
        let expect = PI / (4.0 * PI * 1.5 * t).sqrt() - 0.5;
        assert!((got - expect).abs() < 1e-10, "{got} vs {expect}");
        let neu = theta_trace_1d(p, PI, BoundaryCondition::Neumann, t).unwrap();
        assert_eq!(neu, got + 1.0);
        let late = theta_trace_1d(p, PI, BoundaryCondition::Dirichlet, 10.0).unwrap();
        assert!((late / (-15.0f64).exp() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn determinant_vanishes_on_torsional_roots_at_m0() {
        let p = params(1.0, 1.0);
        let j11 = 3.831_705_970_207_512;
        let (d, scale) = disk_determinant(p, 1.0, 0, j11 * j11);
        assert!(d.abs() < 1e-12 * scale.max(1.0));
    }

    #[test]
    fn m0_families_are_scaled_j1_roots() {
        let p = params(1.0, 1.0);
        let roots = disk_dirichlet_roots(p, 1.0, 0, 200.0).unwrap();
        let j1 = [3.831_705_970_207_512, 7.015_586_669_815_619, 10.173_468_135_062_722, 13.323_691_936_314_223];
        let torsion: Vec<f64> = j1.iter().map(|j| j * j).filter(|&l| l <= 200.0).collect();
        let pressure: Vec<f64> = j1.iter().map(|j| 3.0 * j * j).filter(|&l| l <= 200.0).collect();
        let mut expect: Vec<f64> = torsion.into_iter().chain(pressure).collect();
        expect.sort_by(f64::total_cmp);
        assert_eq!(roots.len(), expect.len());
        for (r, e) in roots.iter().zip(&expect) {
            assert!((r.lambda / e - 1.0).abs() < 1e-11, "{} vs {e}", r.lambda);
            assert_eq!(r.multiplicity, 1);
        }
    }

    #[test]
    fn roots_satisfy_determinant() {
        let p = params(1.0, 1.0);
        let roots = disk_dirichlet_roots(p, 1.0, 12, 400.0).unwrap();
        for r in roots.iter().filter(|r| r.m > 0) {
            let (d, scale) = disk_determinant(p, 1.0, r.m, r.lambda);
            assert!(d.abs() < 1e-9 * scale);
            assert_eq!(r.multiplicity, 2);
        }
        // Lowest clamped-disk eigenvalue for tau = mu = 1 (independent
        // high-precision root of D_1).
        assert_eq!(roots[0].m, 1);
        assert!((roots[0].lambda - 11.3221).abs() < 1e-3, "{}", roots[0].lambda);
    }

    #[test]
    fn spectrum_scales_with_radius() {
        let p = params(1.0, 1.0);
        let a = disk_dirichlet_spectrum(p, 1.0, 30, 800.0).unwrap();
        let b = disk_dirichlet_spectrum(p, 2.0, 60, 200.0).unwrap();
        assert_eq!(a.count(), b.count());
        for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
            assert!((x / 4.0 - y).abs() < 1e-10 * y);
        }
    }

    #[test]
    fn low_m_max_is_reported_incomplete() {
        let p = params(1.0, 1.0);
        let err = disk_dirichlet_spectrum(p, 1.0, 3, 2000.0).unwrap_err();
        assert!(matches!(err, Error::IncompleteSpectrum(_)), "{err}");
    }

    #[test]
    fn counts_grow_linearly() {
        let p = params(1.0, 1.0);
        let top = 12_000.0;
        let s = disk_dirichlet_spectrum(p, 1.0, disk_m_max_for(p, 1.0, top), top).unwrap();
        let geom = Domain2D::Disk { radius: 1.0 }.geometric_data().unwrap();
        // Least-squares slope of N(eta) on a uniform grid over [0, top].
        let pts: Vec<(f64, f64)> = (1..=400)
            .map(|i| {
                let eta = top * i as f64 / 400.0;
                (eta, s.counting_function(eta) as f64)
            })
            .collect();
        let k = pts.len() as f64;
        let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / k, pts.iter().map(|p| p.1).sum::<f64>() / k);
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let predicted = weyl_count_prediction(p, 2, geom.volume, 1.0);
        assert!((sxy / sxx / predicted - 1.0).abs() < 0.03, "slope {} vs {predicted}", sxy / sxx);
    }
}
