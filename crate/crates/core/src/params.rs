use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Isotropic Lame constants of the elastic medium.
///
/// `tau` multiplies the Laplacian and `mu` enters through `tau + mu` in the
/// grad-div term. Admissible pairs satisfy `tau > 0` and `tau + mu > 0`, which
/// makes the shear factor `tau` and the pressure factor `2 tau + mu` distinct
/// and positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct LameParameters {
    tau: f64,
    mu: f64,
}

#[derive(Deserialize)]
struct RawParams {
    tau: f64,
    mu: f64,
}

impl TryFrom<RawParams> for LameParameters {
    type Error = Error;
    fn try_from(raw: RawParams) -> Result<Self> {
        LameParameters::new(raw.tau, raw.mu)
    }
}

impl LameParameters {
    pub fn new(tau: f64, mu: f64) -> Result<Self> {
        if !tau.is_finite() || !mu.is_finite() {
            return Err(Error::InvalidParameters(format!(
                "tau={tau}, mu={mu} must be finite"
            )));
        }
        if tau <= 0.0 {
            return Err(Error::InvalidParameters(format!("tau={tau} must be > 0")));
        }
        if tau + mu <= 0.0 {
            return Err(Error::InvalidParameters(format!(
                "tau + mu = {} must be > 0",
                tau + mu
            )));
        }
        Ok(Self { tau, mu })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Shear (S-wave) factor `tau`.
    pub fn shear(&self) -> f64 {
        self.tau
    }

    /// Pressure (P-wave) factor `2 tau + mu`.
    pub fn pressure(&self) -> f64 {
        2.0 * self.tau + self.mu
    }

    /// Coefficient of the grad-div term, `tau + mu`.
    pub fn grad_div(&self) -> f64 {
        self.tau + self.mu
    }

    /// Both constants multiplied by `s > 0`.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        Self::new(self.tau * s, self.mu * s)
    }
}

impl fmt::Display for LameParameters {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "tau={}, mu={}", self.tau, self.mu)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryCondition {
    Dirichlet,
    Neumann,
}

impl BoundaryCondition {
    /// Sign of the boundary heat-trace term: -1 for Dirichlet, +1 for Neumann.
    pub fn sign(self) -> f64 {
        match self {
            BoundaryCondition::Dirichlet => -1.0,
            BoundaryCondition::Neumann => 1.0,
        }
    }
}

impl fmt::Display for BoundaryCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryCondition::Dirichlet => f.write_str("dirichlet"),
            BoundaryCondition::Neumann => f.write_str("neumann"),
        }
    }
}

impl std::str::FromStr for BoundaryCondition {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dirichlet" => Ok(BoundaryCondition::Dirichlet),
            "neumann" => Ok(BoundaryCondition::Neumann),
            other => Err(Error::InvalidInput(format!(
                "unknown boundary condition '{other}' (expected dirichlet|neumann)"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn admissibility() {
        assert!(LameParameters::new(1.0, 0.0).is_ok());
        assert!(LameParameters::new(1.0, -0.5).is_ok());
        assert!(LameParameters::new(0.0, 1.0).is_err());
        assert!(LameParameters::new(1.0, -1.0).is_err());
        assert!(LameParameters::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn wave_factors_are_ordered() {
        let p = LameParameters::new(2.0, -1.5).unwrap();
        assert!(p.pressure() > p.shear() && p.shear() > 0.0);
    }

    #[test]
    fn deserialization_validates() {
        let ok: LameParameters = serde_json::from_str(r#"{"tau":1.0,"mu":1.0}"#).unwrap();
        assert_eq!(ok.pressure(), 3.0);
        assert!(serde_json::from_str::<LameParameters>(r#"{"tau":-1.0,"mu":1.0}"#).is_err());
    }
}
