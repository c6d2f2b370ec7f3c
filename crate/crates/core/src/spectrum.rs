use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::GeometricData;
use crate::mesh::Domain2D;
use crate::params::{BoundaryCondition, LameParameters};

/// Label attached to every Neumann run computed with the free (natural)
/// boundary condition of the bilinear form.
pub const NATURAL_BC_LABEL: &str = "natural-BC approximation";

/// Where the eigenvalues came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    Fem {
        mesh: FemMeshInfo,
        extrapolated: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        note: Option<String>,
    },
    AnalyticInterval {
        length: f64,
    },
    AnalyticDisk {
        radius: f64,
        m_max: usize,
        lambda_max: f64,
    },
    External,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FemMeshInfo {
    pub nodes: usize,
    pub triangles: usize,
    pub unknowns: usize,
    pub max_edge: f64,
    pub levels: usize,
}

/// Domain a spectrum belongs to, when known.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Domain {
    Interval {
        length: f64,
    },
    Planar(Domain2D),
}

impl Domain {
    pub fn dim(&self) -> usize {
        match self {
            Domain::Interval { .. } => 1,
            Domain::Planar(_) => 2,
        }
    }

    /// Exact volume and boundary measure.
    pub fn geometric_data(&self) -> Result<GeometricData> {
        match self {
            Domain::Interval { length } => GeometricData::new(1, *length, 2.0),
            Domain::Planar(d) => d.geometric_data(),
        }
    }

    pub fn has_corners(&self) -> bool {
        match self {
            Domain::Interval { .. } => false,
            Domain::Planar(d) => d.has_corners(),
        }
    }
}

/// Ascending eigenvalue list of the Navier-Lame operator on one domain.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub dim: usize,
    pub bc: BoundaryCondition,
    pub params: LameParameters,
    pub eigenvalues: Vec<f64>,
    pub provenance: Provenance,
    pub domain_meta: Option<Domain>,
}

impl Spectrum {
    /// Validates ordering and sign rules. Values within `1e-8 * lambda_max`
    /// below zero are rounding noise of a zero mode and are clamped to 0.
    pub fn new(
        dim: usize,
        bc: BoundaryCondition,
        params: LameParameters,
        mut eigenvalues: Vec<f64>,
        provenance: Provenance,
        domain_meta: Option<Domain>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("dimension must be >= 1".into()));
        }
        if eigenvalues.is_empty() {
            return Err(Error::InvalidInput("spectrum is empty".into()));
        }
        if eigenvalues.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("spectrum has non-finite values".into()));
        }
        if eigenvalues.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidInput("eigenvalues must be ascending".into()));
        }
        let top = eigenvalues.last().copied().unwrap_or(0.0).abs().max(1.0);
        let zero_tol = 1e-8 * top;
        if eigenvalues[0] < -zero_tol {
            return Err(Error::InvalidInput(format!(
                "negative eigenvalue {}",
                eigenvalues[0]
            )));
        }
        for v in eigenvalues.iter_mut() {
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        match bc {
            BoundaryCondition::Dirichlet if eigenvalues[0] <= 0.0 => {
                return Err(Error::InvalidInput(format!(
                    "Dirichlet spectrum must start above zero, got {}",
                    eigenvalues[0]
                )));
            }
            BoundaryCondition::Neumann if eigenvalues[0] > zero_tol => {
                return Err(Error::InvalidInput(format!(
                    "Neumann spectrum must start at zero, got {}",
                    eigenvalues[0]
                )));
            }
            _ => {}
        }
        if let Some(d) = &domain_meta {
            if d.dim() != dim {
                return Err(Error::Consistency(format!(
                    "domain is {}-dimensional but the spectrum is {dim}-dimensional",
                    d.dim()
                )));
            }
        }
        Ok(Self {
            dim,
            bc,
            params,
            eigenvalues,
            provenance,
            domain_meta,
        })
    }

    pub fn count(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Eigenvalues counted with multiplicity that are `<= eta`.
    pub fn counting_function(&self, eta: f64) -> usize {
        self.eigenvalues.partition_point(|&v| v <= eta)
    }

    /// Number of eigenvalues at or below `tol` (zero modes).
    pub fn zero_mode_count(&self, tol: f64) -> usize {
        self.counting_function(tol)
    }

    /// Copy keeping only the lowest `n` eigenvalues.
    pub fn truncated(&self, n: usize) -> Spectrum {
        let mut s = self.clone();
        s.eigenvalues.truncate(n.max(1));
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> LameParameters {
        LameParameters::new(1.0, 0.0).unwrap()
    }

    #[test]
    fn sign_rules() {
        let d = BoundaryCondition::Dirichlet;
        let n = BoundaryCondition::Neumann;
        assert!(Spectrum::new(1, d, params(), vec![1.0, 2.0], Provenance::External, None).is_ok());
        assert!(Spectrum::new(1, d, params(), vec![0.0, 2.0], Provenance::External, None).is_err());
        assert!(Spectrum::new(1, n, params(), vec![1.0, 2.0], Provenance::External, None).is_err());
        let s = Spectrum::new(1, n, params(), vec![-1e-12, 2.0], Provenance::External, None).unwrap();
        assert_eq!(s.eigenvalues[0], 0.0);
        assert!(Spectrum::new(1, d, params(), vec![2.0, 1.0], Provenance::External, None).is_err());
        assert!(Spectrum::new(1, d, params(), vec![], Provenance::External, None).is_err());
    }

    #[test]
    fn counting_function_includes_ties() {
        let s = Spectrum::new(2, BoundaryCondition::Dirichlet, params(), vec![1.0, 2.0, 2.0, 3.0], Provenance::External, None).unwrap();
        assert_eq!(s.counting_function(2.0), 3);
        assert_eq!(s.counting_function(0.5), 0);
        assert_eq!(s.counting_function(10.0), 4);
    }

    #[test]
    fn domain_json_shapes() {
        let i: Domain = serde_json::from_str(r#"{"length": 3.0}"#).unwrap();
        assert_eq!(i, Domain::Interval { length: 3.0 });
        let d: Domain = serde_json::from_str(r#"{"kind": "disk", "radius": 1.0}"#).unwrap();
        assert_eq!(d, Domain::Planar(Domain2D::Disk { radius: 1.0 }));
        assert_eq!(d.dim(), 2);
        let g = d.geometric_data().unwrap();
        assert!((g.volume - std::f64::consts::PI).abs() < 1e-15);
    }

    #[test]
    fn dimension_must_match_domain() {
        let r = Spectrum::new(
            1,
            BoundaryCondition::Dirichlet,
            params(),
            vec![1.0],
            Provenance::External,
            Some(Domain::Planar(Domain2D::Disk { radius: 1.0 })),
        );
        assert!(matches!(r, Err(Error::Consistency(_))));
    }
}
