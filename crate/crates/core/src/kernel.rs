//! Small-time heat-trace coefficients of the Navier-Lame operator.
//!
//! The trace behaves like `a0 |Omega| t^{-n/2} + a1 |dOmega| t^{-(n-1)/2}`
//! with densities
//!
//! ```text
//! a0 = (n-1) / (4 pi tau)^{n/2} + 1 / (4 pi (2 tau + mu))^{n/2}
//! a1 = -/+ 1/4 [(n-1) / (4 pi tau)^{(n-1)/2} + 1 / (4 pi (2 tau + mu))^{(n-1)/2}]
//! ```
//!
//! (minus for Dirichlet, plus for Neumann). The interior density comes from
//! the residue sum of the symbol resolvent; the boundary density from the
//! reflected Gaussian integrated across a collar.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{BoundaryCondition, LameParameters};
use crate::special::{erfc, gamma, integrate, unit_ball_volume};

/// Relative mismatch tolerated by [`isoperimetric_audit`] before a shape is
/// declared different from a ball.
pub const DEFAULT_BALL_TOL: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeatTraceCoefficients {
    pub dim: usize,
    pub params: LameParameters,
    pub bc: BoundaryCondition,
    /// Coefficient of `t^{-n/2}` per unit volume.
    pub a0_density: f64,
    /// Coefficient of `t^{-(n-1)/2}` per unit boundary area, signed.
    pub a1_density: f64,
}

impl HeatTraceCoefficients {
    pub fn new(params: LameParameters, n: usize, bc: BoundaryCondition) -> Self {
        Self {
            dim: n,
            params,
            bc,
            a0_density: interior_coefficient(params, n),
            a1_density: boundary_coefficient(params, n, bc),
        }
    }
}

/// Volume and boundary measure of a domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometricData {
    pub dim: usize,
    pub volume: f64,
    pub boundary_area: f64,
}

impl GeometricData {
    pub fn new(dim: usize, volume: f64, boundary_area: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("dimension must be >= 1".into()));
        }
        if !(volume > 0.0 && volume.is_finite()) {
            return Err(Error::InvalidInput(format!("volume={volume} must be > 0")));
        }
        if !(boundary_area > 0.0 && boundary_area.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "boundary area={boundary_area} must be > 0"
            )));
        }
        Ok(Self {
            dim,
            volume,
            boundary_area,
        })
    }

    /// `|dOmega| / |Omega|^{(n-1)/n}`, scale invariant.
    pub fn isoperimetric_ratio(&self) -> f64 {
        let n = self.dim as f64;
        self.boundary_area / self.volume.powf((n - 1.0) / n)
    }
}

fn gaussian_sum(params: LameParameters, n: usize, power: f64) -> f64 {
    let shear = (n as f64 - 1.0) / (4.0 * PI * params.shear()).powf(power);
    let pressure = 1.0 / (4.0 * PI * params.pressure()).powf(power);
    shear + pressure
}

/// `(n-1) / (4 pi tau)^{n/2} + 1 / (4 pi (2 tau + mu))^{n/2}`.
pub fn interior_coefficient(params: LameParameters, n: usize) -> f64 {
    gaussian_sum(params, n, n as f64 / 2.0)
}

/// `-/+ (1/4) [(n-1) / (4 pi tau)^{(n-1)/2} + 1 / (4 pi (2 tau + mu))^{(n-1)/2}]`.
pub fn boundary_coefficient(params: LameParameters, n: usize, bc: BoundaryCondition) -> f64 {
    bc.sign() * 0.25 * gaussian_sum(params, n, (n as f64 - 1.0) / 2.0)
}

/// Two-term small-time heat trace of a domain with the given measures.
pub fn theoretical_trace(
    params: LameParameters,
    n: usize,
    geom: &GeometricData,
    bc: BoundaryCondition,
    t: f64,
) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::InvalidInput(format!("t={t} must be > 0")));
    }
    let nf = n as f64;
    Ok(interior_coefficient(params, n) * geom.volume * t.powf(-nf / 2.0)
        + boundary_coefficient(params, n, bc) * geom.boundary_area * t.powf(-(nf - 1.0) / 2.0))
}

/// Reflected-kernel contribution of a boundary collar of width `epsilon`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImageTerm {
    /// Quadrature of the reflected Gaussians over `0 <= x_n <= epsilon`.
    pub collar: f64,
    /// Same integral over the whole half-line, `|a1| t^{-(n-1)/2}`.
    pub half_line: f64,
    /// Exact tail beyond `epsilon` (erfc form); the collar/half-line gap.
    pub remainder: f64,
}

/// Integrates, per unit boundary area,
/// `(n-1) (4 pi tau t)^{-n/2} e^{-(2x)^2 / (4 tau t)} + (4 pi (2tau+mu) t)^{-n/2} e^{-(2x)^2 / (4 (2tau+mu) t)}`
/// over `0 <= x <= epsilon`.
pub fn image_term_quadrature(params: LameParameters, n: usize, t: f64, epsilon: f64) -> Result<ImageTerm> {
    if !(t > 0.0) || !(epsilon > 0.0) {
        return Err(Error::InvalidInput(format!(
            "t={t} and epsilon={epsilon} must be > 0"
        )));
    }
    let nf = n as f64;
    let families = [
        (nf - 1.0, params.shear()),
        (1.0, params.pressure()),
    ];
    let mut collar = 0.0;
    let mut half_line = 0.0;
    let mut remainder = 0.0;
    for (weight, speed) in families {
        if weight == 0.0 {
            continue;
        }
        let amp = weight / (4.0 * PI * speed * t).powf(nf / 2.0);
        let width = (speed * t).sqrt();
        // Beyond ~40 widths the integrand is below 1e-690 and contributes nothing.
        let upper = epsilon.min(40.0 * width);
        let full = amp * 0.5 * (PI * speed * t).sqrt();
        let tol = 1e-15 * full;
        collar += integrate(|x: f64| amp * (-x * x / (speed * t)).exp(), 0.0, upper, tol);
        half_line += full;
        remainder += full * erfc(epsilon / width);
    }
    Ok(ImageTerm {
        collar,
        half_line,
        remainder,
    })
}

/// Leading Weyl count `|Omega| a0 eta^{n/2} / Gamma(n/2 + 1)`.
pub fn weyl_count_prediction(params: LameParameters, n: usize, volume: f64, eta: f64) -> f64 {
    if eta <= 0.0 {
        return 0.0;
    }
    let h = n as f64 / 2.0;
    volume / gamma(h + 1.0) * interior_coefficient(params, n) * eta.powf(h)
}

/// Boundary correction to the count implied by the boundary heat coefficient,
/// `|dOmega| a1 eta^{(n-1)/2} / Gamma((n+1)/2)`.
pub fn weyl_boundary_correction(
    params: LameParameters,
    n: usize,
    boundary_area: f64,
    bc: BoundaryCondition,
    eta: f64,
) -> f64 {
    if eta <= 0.0 {
        return 0.0;
    }
    let h = (n as f64 - 1.0) / 2.0;
    boundary_area / gamma(h + 1.0) * boundary_coefficient(params, n, bc) * eta.powf(h)
}

/// Inverts the coefficient map: `volume = a0_hat / a0`, `area = a1_hat / a1`.
pub fn recover_geometry(
    a0_hat: f64,
    a1_hat: f64,
    params: LameParameters,
    n: usize,
    bc: BoundaryCondition,
) -> Result<GeometricData> {
    if !(a0_hat > 0.0) {
        return Err(Error::InconsistentFit(format!(
            "leading coefficient {a0_hat} must be positive"
        )));
    }
    if a1_hat == 0.0 || a1_hat.signum() != bc.sign() {
        return Err(Error::InconsistentFit(format!(
            "boundary coefficient {a1_hat} has the wrong sign for {bc} (expected {})",
            if bc.sign() < 0.0 { "negative" } else { "positive" }
        )));
    }
    GeometricData::new(
        n,
        a0_hat / interior_coefficient(params, n),
        a1_hat / boundary_coefficient(params, n, bc),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsoperimetricAudit {
    pub ratio: f64,
    pub ball_ratio: f64,
    pub tol: f64,
    pub is_ball_within_tol: bool,
}

/// `|dB_1| / |B_1|^{(n-1)/n} = n |B_1|^{1/n}`.
pub fn ball_isoperimetric_ratio(n: usize) -> f64 {
    n as f64 * unit_ball_volume(n).powf(1.0 / n as f64)
}

/// Compares the isoperimetric ratio of `geom` with the ball's; the two agree
/// (relative `tol`) only if the measured shape can be a ball.
pub fn isoperimetric_audit(geom: &GeometricData, tol: f64) -> IsoperimetricAudit {
    let ratio = geom.isoperimetric_ratio();
    let ball_ratio = ball_isoperimetric_ratio(geom.dim);
    IsoperimetricAudit {
        ratio,
        ball_ratio,
        tol,
        is_ball_within_tol: ((ratio - ball_ratio) / ball_ratio).abs() <= tol,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::erfc;

    fn p(tau: f64, mu: f64) -> LameParameters {
        LameParameters::new(tau, mu).unwrap()
    }

    #[test]
    fn interior_examples() {
        assert!((interior_coefficient(p(1.0, 0.0), 2) - 3.0 / (8.0 * PI)).abs() < 1e-16);
        let q = p(2.0, 3.5);
        assert!((interior_coefficient(q, 1) - 1.0 / (4.0 * PI * 7.5).sqrt()).abs() < 1e-16);
        let expect = 2.0 / (4.0 * PI).powf(1.5) + 1.0 / (12.0 * PI).powf(1.5);
        assert!((interior_coefficient(p(1.0, 1.0), 3) - expect).abs() < 1e-16);
    }

    #[test]
    fn boundary_examples() {
        let d = boundary_coefficient(p(1.0, 0.3), 1, BoundaryCondition::Dirichlet);
        assert_eq!(d, -0.25);
        let neu = boundary_coefficient(p(1.0, 0.0), 2, BoundaryCondition::Neumann);
        let expect = 0.25 * (1.0 / (4.0 * PI).sqrt() + 1.0 / (8.0 * PI).sqrt());
        assert!((neu - expect).abs() < 1e-16);
        for n in 1..6 {
            let q = p(1.7, -0.4);
            assert_eq!(
                boundary_coefficient(q, n, BoundaryCondition::Dirichlet),
                -boundary_coefficient(q, n, BoundaryCondition::Neumann)
            );
        }
    }

    #[test]
    fn interval_trace_formula() {
        let q = p(1.0, -0.5);
        let geom = GeometricData::new(1, PI, 2.0).unwrap();
        let v = theoretical_trace(q, 1, &geom, BoundaryCondition::Dirichlet, 0.01).unwrap();
        assert!((v - (PI / (0.06 * PI).sqrt() - 0.5)).abs() < 1e-13);
    }

    #[test]
    fn volume_scaling_touches_only_leading_term() {
        let q = p(1.0, 1.0);
        let g1 = GeometricData::new(2, 1.0, 4.0).unwrap();
        let g2 = GeometricData::new(2, 3.0, 4.0).unwrap();
        let t = 0.02;
        let d = theoretical_trace(q, 2, &g2, BoundaryCondition::Neumann, t).unwrap()
            - theoretical_trace(q, 2, &g1, BoundaryCondition::Neumann, t).unwrap();
        assert!((d - 2.0 * interior_coefficient(q, 2) / t).abs() < 1e-12);
    }

    #[test]
    fn image_term_example() {
        let img = image_term_quadrature(p(1.0, 0.0), 2, 0.01, 1.0).unwrap();
        let closed = 0.25 * (1.0 / (0.04 * PI).sqrt() + 1.0 / (0.08 * PI).sqrt());
        assert!((img.half_line - closed).abs() < 1e-14 * closed);
        assert!(((img.collar - closed) / closed).abs() < 1e-10);
        let big = image_term_quadrature(p(1.0, 0.0), 2, 0.01, 1e6).unwrap();
        assert_eq!(big.remainder, 0.0);
        let tiny = image_term_quadrature(p(1.0, 0.0), 2, 1e-4, 1.0).unwrap();
        assert!(tiny.remainder < 1e-30);
    }

    #[test]
    fn image_term_remainder_is_the_gap() {
        let q = p(1.0, 0.5);
        let img = image_term_quadrature(q, 3, 0.2, 0.5).unwrap();
        assert!(img.remainder > 1e-4);
        assert!((img.half_line - img.collar - img.remainder).abs() < 1e-12 * img.half_line);
        // Tail bound by the slowest (pressure) Gaussian.
        let bound = img.half_line * erfc(0.5 / (q.pressure() * 0.2).sqrt());
        assert!(img.remainder <= bound);
    }

    #[test]
    fn weyl_examples() {
        let q = p(1.0, 0.0);
        assert!((weyl_count_prediction(q, 2, PI, 7.0) - 0.375 * 7.0).abs() < 1e-13);
        let r = p(1.0, 2.0);
        let l = 2.5;
        let expect = l / PI * (9.0 / r.pressure()).sqrt();
        assert!((weyl_count_prediction(r, 1, l, 9.0) - expect).abs() < 1e-13);
        assert_eq!(weyl_count_prediction(q, 2, 1.0, 0.0), 0.0);
    }

    #[test]
    fn recovery_round_trip() {
        let q = p(1.0, 0.0);
        let bc = BoundaryCondition::Dirichlet;
        let a0 = interior_coefficient(q, 2) * PI;
        let a1 = boundary_coefficient(q, 2, bc) * 2.0 * PI;
        let g = recover_geometry(a0, a1, q, 2, bc).unwrap();
        assert!((g.volume - PI).abs() < 1e-15 && (g.boundary_area - 2.0 * PI).abs() < 1e-15);
        assert!(recover_geometry(a0, 0.0, q, 2, bc).is_err());
        assert!(recover_geometry(a0, 0.0, q, 2, BoundaryCondition::Neumann).is_err());
        assert!(matches!(
            recover_geometry(a0, -a1, q, 2, bc),
            Err(Error::InconsistentFit(_))
        ));
        assert!(recover_geometry(-1.0, a1, q, 2, bc).is_err());
    }

    #[test]
    fn audit_examples() {
        let disk = GeometricData::new(2, PI, 2.0 * PI).unwrap();
        let a = isoperimetric_audit(&disk, DEFAULT_BALL_TOL);
        assert!((a.ratio - 2.0 * PI.sqrt()).abs() < 1e-14 && a.is_ball_within_tol);
        let square = GeometricData::new(2, 1.0, 4.0).unwrap();
        let s = isoperimetric_audit(&square, DEFAULT_BALL_TOL);
        assert_eq!(s.ratio, 4.0);
        assert!(!s.is_ball_within_tol);
        let ratios: Vec<f64> = [0.3, 1.0, 7.0]
            .iter()
            .map(|r: &f64| {
                let g = GeometricData::new(3, 4.0 / 3.0 * PI * r.powi(3), 4.0 * PI * r * r).unwrap();
                isoperimetric_audit(&g, 1e-12).ratio
            })
            .collect();
        assert!((ratios[0] - ratios[2]).abs() < 1e-12 && (ratios[1] - ball_isoperimetric_ratio(3)).abs() < 1e-12);
    }
}
