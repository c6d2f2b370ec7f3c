//! Principal symbol of the Navier-Lame operator and its resolvent calculus.
//!
//! For `P u = -tau Lap u - (tau + mu) grad div u` the symbol is
//! `A(xi) = tau |xi|^2 I + (tau + mu) xi xi^T`, with eigenvalue `tau |xi|^2`
//! on the plane orthogonal to `xi` and `(2 tau + mu) |xi|^2` along `xi`.
//! Every closed form below has a brute-force counterpart built on
//! [`crate::dense`] so the two routes can be compared.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::complex::ComplexScalar;
use crate::dense::{ComplexLu, ComplexMatrix};
use crate::error::{Error, Result};
use crate::params::LameParameters;

/// Relative distance from a pole below which the resolvent is refused.
pub const DEFAULT_POLE_TOL: f64 = 1e-8;

/// Trapezoid nodes used on the residue contour.
pub const DEFAULT_CONTOUR_NODES: usize = 4096;

#[derive(Debug, Clone, PartialEq)]
pub struct SymbolMatrix {
    pub dim: usize,
    pub params: LameParameters,
    pub xi: Vec<f64>,
    /// Row-major `dim x dim` entries.
    pub entries: Vec<f64>,
}

impl SymbolMatrix {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }

    pub fn xi_norm_sq(&self) -> f64 {
        self.xi.iter().map(|x| x * x).sum()
    }

    /// `lambda I - A` as a complex matrix.
    pub fn shifted(&self, lambda: ComplexScalar) -> ComplexMatrix {
        let n = self.dim;
        let mut m = ComplexMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = ComplexScalar::real(-self.get(i, j));
            }
            m[(i, i)] = m[(i, i)] + lambda;
        }
        m
    }

    /// Eigenvalues of the symmetric entries by cyclic Jacobi rotations, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let n = self.dim;
        let mut a = self.entries.clone();
        for _sweep in 0..100 {
            let off: f64 = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| a[i * n + j] * a[i * n + j])
                .sum();
            if off.sqrt() <= 1e-15 * a.iter().map(|x| x.abs()).fold(0.0, f64::max) {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    let apq = a[p * n + q];
                    if apq == 0.0 {
                        continue;
                    }
                    let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let akp = a[k * n + p];
                        let akq = a[k * n + q];
                        a[k * n + p] = c * akp - s * akq;
                        a[k * n + q] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a[p * n + k];
                        let aqk = a[q * n + k];
                        a[p * n + k] = c * apk - s * aqk;
                        a[q * n + k] = s * apk + c * aqk;
                    }
                }
            }
        }
        let mut ev: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
        ev.sort_by(f64::total_cmp);
        ev
    }
}

/// `A(xi)_{ij} = tau |xi|^2 delta_ij + (tau + mu) xi_i xi_j`.
pub fn build_symbol(params: LameParameters, xi: &[f64]) -> Result<SymbolMatrix> {
    if xi.is_empty() {
        return Err(Error::InvalidInput("xi must have at least one component".into()));
    }
    let n = xi.len();
    let norm_sq: f64 = xi.iter().map(|x| x * x).sum();
    let mut entries = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let diag = if i == j { params.tau() * norm_sq } else { 0.0 };
            entries[i * n + j] = diag + params.grad_div() * xi[i] * xi[j];
        }
    }
    Ok(SymbolMatrix {
        dim: n,
        params,
        xi: xi.to_vec(),
        entries,
    })
}

/// The two symbol eigenvalues `(tau |xi|^2, (2 tau + mu) |xi|^2)`.
pub fn symbol_poles(params: LameParameters, xi_norm_sq: f64) -> (f64, f64) {
    (params.shear() * xi_norm_sq, params.pressure() * xi_norm_sq)
}

fn check_poles(
    params: LameParameters,
    xi_norm_sq: f64,
    lambda: ComplexScalar,
    rel_tol: f64,
) -> Result<()> {
    let (p1, p2) = symbol_poles(params, xi_norm_sq);
    let tol = rel_tol * p2.max(1.0);
    for pole in [p1, p2] {
        if (lambda - pole).abs() < tol {
            return Err(Error::PoleProximity {
                lambda: lambda.to_string(),
                pole,
                tol,
            });
        }
    }
    Ok(())
}

/// `Tr (lambda I - A(xi))^{-1}` in closed form:
/// `[n lambda - ((2n-1) tau + (n-1) mu) |xi|^2] / ((lambda - tau |xi|^2)(lambda - (2 tau + mu) |xi|^2))`.
pub fn resolvent_trace_closed(
    params: LameParameters,
    n: usize,
    xi_norm_sq: f64,
    lambda: ComplexScalar,
) -> Result<ComplexScalar> {
    resolvent_trace_closed_with_tol(params, n, xi_norm_sq, lambda, DEFAULT_POLE_TOL)
}

pub fn resolvent_trace_closed_with_tol(
    params: LameParameters,
    n: usize,
    xi_norm_sq: f64,
    lambda: ComplexScalar,
    pole_tol: f64,
) -> Result<ComplexScalar> {
    if n == 0 {
        return Err(Error::InvalidInput("dimension must be >= 1".into()));
    }
    check_poles(params, xi_norm_sq, lambda, pole_tol)?;
    Ok(resolvent_trace_unchecked(params, n, xi_norm_sq, lambda))
}

fn resolvent_trace_unchecked(
    params: LameParameters,
    n: usize,
    xi_norm_sq: f64,
    lambda: ComplexScalar,
) -> ComplexScalar {
    let (p1, p2) = symbol_poles(params, xi_norm_sq);
    let nf = n as f64;
    let weight = ((2.0 * nf - 1.0) * params.tau() + (nf - 1.0) * params.mu()) * xi_norm_sq;
    let numerator = lambda * nf - weight;
    numerator / ((lambda - p1) * (lambda - p2))
}

fn pivot_tolerance(params: LameParameters, xi_norm_sq: f64) -> f64 {
    let (_, p2) = symbol_poles(params, xi_norm_sq);
    1e-12 * p2.max(1.0)
}

/// Trace of the numerically inverted `lambda I - A(xi)` (partial-pivot LU).
pub fn resolvent_trace_bruteforce(
    params: LameParameters,
    xi: &[f64],
    lambda: ComplexScalar,
) -> Result<ComplexScalar> {
    let symbol = build_symbol(params, xi)?;
    let lu = ComplexLu::factor(
        &symbol.shifted(lambda),
        pivot_tolerance(params, symbol.xi_norm_sq()),
    )?;
    Ok(lu.inverse().trace())
}

/// `det(lambda I - A) = (lambda - tau |xi|^2)^{n-1} (lambda - (2 tau + mu) |xi|^2)`.
pub fn symbol_determinant_closed(
    params: LameParameters,
    n: usize,
    xi_norm_sq: f64,
    lambda: ComplexScalar,
) -> ComplexScalar {
    let (p1, p2) = symbol_poles(params, xi_norm_sq);
    (lambda - p1).powi(n.saturating_sub(1) as u32) * (lambda - p2)
}

/// Dense LU determinant of `lambda I - A(xi)`.
pub fn symbol_determinant_dense(
    params: LameParameters,
    xi: &[f64],
    lambda: ComplexScalar,
) -> Result<ComplexScalar> {
    let symbol = build_symbol(params, xi)?;
    match ComplexLu::factor(&symbol.shifted(lambda), 0.0) {
        Ok(lu) => Ok(lu.determinant()),
        Err(Error::SingularMatrix { .. }) => Ok(ComplexScalar::ZERO),
        Err(e) => Err(e),
    }
}

/// Operator norm of `b0 (lambda I - A) - I` with `b0 = (lambda I - A)^{-1}`.
///
/// The symbol does not depend on `x`, so every higher parametrix term is zero
/// and the leading term alone is an exact inverse; the residual only measures
/// rounding.
pub fn parametrix_residual(
    params: LameParameters,
    xi: &[f64],
    lambda: ComplexScalar,
) -> Result<f64> {
    let symbol = build_symbol(params, xi)?;
    check_poles(params, symbol.xi_norm_sq(), lambda, DEFAULT_POLE_TOL)?;
    let shifted = symbol.shifted(lambda);
    let b0 = ComplexLu::factor(&shifted, pivot_tolerance(params, symbol.xi_norm_sq()))?.inverse();
    let residual = b0.mul(&shifted).sub(&ComplexMatrix::identity(symbol.dim));
    Ok(residual.operator_norm())
}

/// `(n-1) exp(-t tau |xi|^2) + exp(-t (2 tau + mu) |xi|^2)`: the sum of
/// residues of `e^{-t lambda} Tr (lambda I - A)^{-1}`.
pub fn residue_heat_symbol(params: LameParameters, n: usize, xi_norm_sq: f64, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::InvalidInput(format!("t={t} must be > 0")));
    }
    let (p1, p2) = symbol_poles(params, xi_norm_sq);
    Ok((n as f64 - 1.0) * (-t * p1).exp() + (-t * p2).exp())
}

/// Circle enclosing both symbol poles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Contour {
    pub center: f64,
    pub radius: f64,
    pub nodes: usize,
}

impl Contour {
    /// Centered between the poles with radius `1.5 * half_separation + |center|`.
    /// At `xi = 0` both poles collapse to the origin and a unit circle is used.
    pub fn around_poles(params: LameParameters, xi_norm_sq: f64, nodes: usize) -> Self {
        let (p1, p2) = symbol_poles(params, xi_norm_sq);
        let center = 0.5 * (p1 + p2);
        let half = 0.5 * (p2 - p1);
        let radius = 1.5 * half + center.abs();
        Contour {
            center,
            radius: if radius > 0.0 { radius } else { 1.0 },
            nodes,
        }
    }
}

/// `(1 / 2 pi i) \oint e^{-t lambda} Tr (lambda I - A)^{-1} d lambda` by the
/// composite trapezoid rule on the default contour.
pub fn contour_integral_oracle(params: LameParameters, n: usize, xi_norm_sq: f64, t: f64) -> Result<f64> {
    let contour = Contour::around_poles(params, xi_norm_sq, DEFAULT_CONTOUR_NODES);
    contour_integral_on(params, n, xi_norm_sq, t, contour)
}

pub fn contour_integral_on(
    params: LameParameters,
    n: usize,
    xi_norm_sq: f64,
    t: f64,
    contour: Contour,
) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::InvalidInput(format!("t={t} must be > 0")));
    }
    if contour.nodes < 8 {
        return Err(Error::ContourMisconfigured(format!(
            "{} nodes is too few",
            contour.nodes
        )));
    }
    let (p1, p2) = symbol_poles(params, xi_norm_sq);
    for pole in [p1, p2] {
        let gap = contour.radius - (pole - contour.center).abs();
        if !(gap > 1e-8 * contour.radius) {
            return Err(Error::ContourMisconfigured(format!(
                "circle center {} radius {} does not strictly enclose pole {pole}",
                contour.center, contour.radius
            )));
        }
    }
    // lambda(theta) = c + r e^{i theta}, d lambda = i r e^{i theta} d theta, so
    // (1 / 2 pi i) \oint f d lambda = (r / N) sum f(lambda_k) e^{i theta_k}.
    let step = 2.0 * PI / contour.nodes as f64;
    let mut acc = ComplexScalar::ZERO;
    for k in 0..contour.nodes {
        let w = ComplexScalar::cis(step * k as f64);
        let lambda = w.scale(contour.radius) + contour.center;
        let f = (-lambda.scale(t)).exp() * resolvent_trace_unchecked(params, n, xi_norm_sq, lambda);
        acc = acc + f * w;
    }
    Ok(acc.re * contour.radius / contour.nodes as f64)
}

/// Summary emitted by the `symbol-check` suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolCheckReport {
    pub n: usize,
    pub draws: usize,
    /// Worst closed-form vs dense-inversion trace error.
    pub max_rel_err: f64,
    pub max_det_rel_err: f64,
    pub max_parametrix_residual: f64,
    pub pass: bool,
}

/// One random admissible draw `(params, xi, lambda)` with `lambda` kept at
/// least `0.1 (2 tau + mu) |xi|^2` away from both poles.
pub fn random_draw(rng: &mut impl Rng, n: usize) -> (LameParameters, Vec<f64>, ComplexScalar) {
    let tau = rng.random_range(0.1..5.0);
    let mu = rng.random_range((-tau + 0.05)..5.0);
    let params = LameParameters::new(tau, mu).expect("draw is admissible");
    let xi: Vec<f64> = loop {
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
        if v.iter().map(|x| x * x).sum::<f64>() > 1e-2 {
            break v;
        }
    };
    let s: f64 = xi.iter().map(|x| x * x).sum();
    let (p1, p2) = symbol_poles(params, s);
    let min_gap = 0.1 * p2;
    let lambda = loop {
        let z = ComplexScalar::new(
            rng.random_range(-2.0 * p2..3.0 * p2),
            rng.random_range(-2.0 * p2..2.0 * p2),
        );
        if (z - p1).abs() >= min_gap && (z - p2).abs() >= min_gap {
            break z;
        }
    };
    (params, xi, lambda)
}

/// Runs the closed-form vs brute-force comparisons for one dimension.
pub fn symbol_check(n: usize, draws: usize, seed: u64) -> Result<SymbolCheckReport> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_rel_err: f64 = 0.0;
    let mut max_det: f64 = 0.0;
    let mut max_res: f64 = 0.0;
    for _ in 0..draws {
        let (params, xi, lambda) = random_draw(&mut rng, n);
        let s: f64 = xi.iter().map(|x| x * x).sum();
        let closed = resolvent_trace_closed(params, n, s, lambda)?;
        let brute = resolvent_trace_bruteforce(params, &xi, lambda)?;
        max_rel_err = max_rel_err.max((closed - brute).abs() / brute.abs());
        let det_c = symbol_determinant_closed(params, n, s, lambda);
        let det_d = symbol_determinant_dense(params, &xi, lambda)?;
        max_det = max_det.max((det_c - det_d).abs() / det_d.abs());
        max_res = max_res.max(parametrix_residual(params, &xi, lambda)?);
    }
    Ok(SymbolCheckReport {
        n,
        draws,
        max_rel_err,
        max_det_rel_err: max_det,
        max_parametrix_residual: max_res,
        pass: max_rel_err < 1e-10 && max_det < 1e-10 && max_res < 1e-10,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(tau: f64, mu: f64) -> LameParameters {
        LameParameters::new(tau, mu).unwrap()
    }

    #[test]
    fn symbol_examples() {
        let a = build_symbol(p(1.0, 0.0), &[1.0, 0.0]).unwrap();
        assert_eq!(a.entries, vec![2.0, 0.0, 0.0, 1.0]);
        let z = build_symbol(p(1.0, 1.0), &[0.0, 0.0]).unwrap();
        assert!(z.entries.iter().all(|&x| x == 0.0));
        // |xi|^2 = 2: 1*2*I + 1*[[1,1],[1,1]].
        let b = build_symbol(p(1.0, 0.0), &[1.0, 1.0]).unwrap();
        assert_eq!(b.entries, vec![3.0, 1.0, 1.0, 3.0]);
        assert!(build_symbol(p(1.0, 0.0), &[]).is_err());
    }

    #[test]
    fn symbol_spectrum_structure() {
        let a = build_symbol(p(1.5, 0.7), &[0.3, -1.2, 2.0]).unwrap();
        let s = a.xi_norm_sq();
        let ev = a.eigenvalues();
        assert!((ev[0] - 1.5 * s).abs() < 1e-12 * s);
        assert!((ev[1] - 1.5 * s).abs() < 1e-12 * s);
        assert!((ev[2] - 3.7 * s).abs() < 1e-12 * s);
    }

    #[test]
    fn resolvent_examples() {
        let params = p(1.0, 0.0);
        let r = resolvent_trace_closed(params, 2, 1.0, 5.0.into()).unwrap();
        assert!((r.re - 7.0 / 12.0).abs() < 1e-15 && r.im == 0.0);
        let b = resolvent_trace_bruteforce(params, &[1.0, 0.0], 5.0.into()).unwrap();
        assert!((b.re - 7.0 / 12.0).abs() < 1e-15);
        let scalar = resolvent_trace_bruteforce(params, &[2.0], 10.0.into()).unwrap();
        assert!((scalar.re - 0.5).abs() < 1e-15);
        for n in 1..=6 {
            let r0 = resolvent_trace_closed(p(2.0, 3.0), n, 0.0, 1.0.into()).unwrap();
            assert!((r0.re - n as f64).abs() < 1e-15);
        }
    }

    #[test]
    fn one_dimensional_resolvent_is_pressure_only() {
        let params = p(1.3, 0.4);
        let lambda = ComplexScalar::new(2.0, 0.7);
        let r = resolvent_trace_closed(params, 1, 2.5, lambda).unwrap();
        let expect = (lambda - params.pressure() * 2.5).recip();
        assert!((r - expect).abs() < 1e-15);
    }

    #[test]
    fn pole_proximity_is_rejected() {
        let params = p(1.0, 0.0);
        let err = resolvent_trace_closed(params, 2, 1.0, 2.0.into()).unwrap_err();
        assert!(matches!(err, Error::PoleProximity { pole, .. } if pole == 2.0));
        assert!(resolvent_trace_closed(params, 2, 1.0, (1.0 + 1e-9).into()).is_err());
        assert!(resolvent_trace_closed(params, 2, 1.0, (1.0 + 1e-6).into()).is_ok());
        assert!(matches!(
            resolvent_trace_bruteforce(params, &[1.0, 0.0], 2.0.into()),
            Err(Error::SingularMatrix { .. })
        ));
        assert!(parametrix_residual(params, &[1.0, 0.0], 1.0.into()).is_err());
    }

    #[test]
    fn determinant_examples() {
        let params = p(1.0, 0.0);
        let d = symbol_determinant_closed(params, 2, 1.0, 5.0.into());
        assert_eq!(d.re, 12.0);
        let dd = symbol_determinant_dense(params, &[1.0, 0.0], 5.0.into()).unwrap();
        assert!((dd.re - 12.0).abs() < 1e-13);
        let lambda = ComplexScalar::new(0.5, -2.0);
        let d0 = symbol_determinant_closed(p(3.0, 1.0), 4, 0.0, lambda);
        assert!((d0 - lambda.powi(4)).abs() < 1e-14);
    }

    #[test]
    fn parametrix_examples() {
        let r = parametrix_residual(p(1.0, 1.0), &[1.0, 2.0], (-3.0).into()).unwrap();
        assert!(r < 1e-12);
        assert_eq!(parametrix_residual(p(1.0, 1.0), &[0.0, 0.0], 1.0.into()).unwrap(), 0.0);
    }

    #[test]
    fn residue_examples() {
        for n in 1..=4 {
            assert_eq!(residue_heat_symbol(p(1.0, 2.0), n, 0.0, 0.7).unwrap(), n as f64);
        }
        let v = residue_heat_symbol(p(1.0, 0.0), 2, 1.0, 1.0).unwrap();
        assert!((v - ((-1.0f64).exp() + (-2.0f64).exp())).abs() < 1e-15);
        assert!((v - 0.503_214_724_408_055).abs() < 1e-12);
        let small_t = residue_heat_symbol(p(1.0, 0.0), 3, 4.0, 1e-12).unwrap();
        assert!((small_t - 3.0).abs() < 1e-10);
        assert!(residue_heat_symbol(p(1.0, 0.0), 3, 4.0, 0.0).is_err());
    }

    #[test]
    fn contour_matches_residues() {
        let v = contour_integral_oracle(p(1.0, 0.0), 2, 1.0, 1.0).unwrap();
        assert!((v - 0.503_214_724_408_055).abs() < 1e-12);
        let c = contour_integral_oracle(p(2.0, -1.0), 3, 4.0, 0.5).unwrap();
        let r = residue_heat_symbol(p(2.0, -1.0), 3, 4.0, 0.5).unwrap();
        assert!(((c - r) / r).abs() < 1e-8);
        let z = contour_integral_oracle(p(1.0, 1.0), 4, 0.0, 0.3).unwrap();
        assert!((z - 4.0).abs() < 1e-12);
    }

    #[test]
    fn contour_must_enclose_poles() {
        let bad = Contour {
            center: 0.0,
            radius: 1.0,
            nodes: 64,
        };
        assert!(matches!(
            contour_integral_on(p(1.0, 0.0), 2, 1.0, 1.0, bad),
            Err(Error::ContourMisconfigured(_))
        ));
    }

    #[test]
    fn scaling_homogeneity() {
        let params = p(1.2, 0.3);
        let lambda = ComplexScalar::new(0.4, 1.1);
        let base = resolvent_trace_closed(params, 3, 0.8, lambda).unwrap();
        for s in [0.1, 2.0, 17.0] {
            let scaled = resolvent_trace_closed(params, 3, s * 0.8, lambda.scale(s)).unwrap();
            assert!((scaled.scale(s) - base).abs() < 1e-13 * base.abs());
        }
    }

    #[test]
    fn check_suite_is_deterministic() {
        let a = symbol_check(3, 50, 42).unwrap();
        let b = symbol_check(3, 50, 42).unwrap();
        assert_eq!(a, b);
        assert!(a.pass);
    }
}
