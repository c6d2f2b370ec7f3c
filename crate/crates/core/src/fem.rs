//! Vector P1 finite elements for the Navier-Lame eigenvalue problem.
//!
//! The weak form is `tau (grad u : grad v) + (tau + mu) (div u)(div v)`
//! against the `L^2` mass. Dirichlet eliminates boundary-node unknowns;
//! Neumann keeps every unknown, which realizes the natural condition of this
//! form (see [`NATURAL_BC_LABEL`]).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lanczos::{shift_invert_lanczos, EigenPairs, LanczosOptions};
use crate::mesh::{generate_mesh, refine, Domain2D, Mesh};
use crate::params::{BoundaryCondition, LameParameters};
use crate::sparse::SparseSymmetricMatrix;
use crate::spectrum::{Domain, FemMeshInfo, Provenance, Spectrum, NATURAL_BC_LABEL};

/// Element matrices are ordered `(node0 x, node0 y, node1 x, ..., node2 y)`.
pub type ElementMatrix = [[f64; 6]; 6];

#[derive(Debug, Clone)]
pub struct Assembly {
    pub stiffness: SparseSymmetricMatrix,
    pub mass: SparseSymmetricMatrix,
    /// First global unknown of each node (x; y follows), `None` if eliminated.
    pub node_dof: Vec<Option<usize>>,
    pub bc: BoundaryCondition,
}

impl Assembly {
    pub fn unknowns(&self) -> usize {
        self.stiffness.dim()
    }
}

/// Gradients of the three barycentric hat functions and the triangle area.
fn hat_gradients(p: [[f64; 2]; 3]) -> ([[f64; 2]; 3], f64) {
    let twice_area = (p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]);
    let mut g = [[0.0; 2]; 3];
    for a in 0..3 {
        let b = (a + 1) % 3;
        let c = (a + 2) % 3;
        g[a] = [(p[b][1] - p[c][1]) / twice_area, (p[c][0] - p[b][0]) / twice_area];
    }
    (g, 0.5 * twice_area)
}

pub fn element_stiffness(p: [[f64; 2]; 3], params: LameParameters) -> ElementMatrix {
    let (g, area) = hat_gradients(p);
    let mut k = [[0.0; 6]; 6];
    for a in 0..3 {
        for b in 0..3 {
            let lap = params.tau() * area * (g[a][0] * g[b][0] + g[a][1] * g[b][1]);
            for i in 0..2 {
                for j in 0..2 {
                    let div = params.grad_div() * area * g[a][i] * g[b][j];
                    k[2 * a + i][2 * b + j] = div + if i == j { lap } else { 0.0 };
                }
            }
        }
    }
    k
}

/// Consistent mass: `area / 12 * (1 + delta_ab)` per component.
pub fn element_mass(area: f64) -> ElementMatrix {
    let mut m = [[0.0; 6]; 6];
    for a in 0..3 {
        for b in 0..3 {
            let v = area / 12.0 * if a == b { 2.0 } else { 1.0 };
            for i in 0..2 {
                m[2 * a + i][2 * b + i] = v;
            }
        }
    }
    m
}

pub fn assemble(mesh: &Mesh, params: LameParameters, bc: BoundaryCondition) -> Result<Assembly> {
    let mut node_dof = Vec::with_capacity(mesh.nodes.len());
    let mut next = 0;
    for &on_boundary in &mesh.boundary_node_flags {
        if bc == BoundaryCondition::Dirichlet && on_boundary {
            node_dof.push(None);
        } else {
            node_dof.push(Some(next));
            next += 2;
        }
    }
    if next == 0 {
        return Err(Error::EmptyInterior);
    }
    type Entries = Vec<(usize, usize, f64)>;
    let (k_entries, m_entries): (Entries, Entries) = mesh
        .triangles
        .par_iter()
        .map(|tri| {
            let p = [mesh.nodes[tri[0]], mesh.nodes[tri[1]], mesh.nodes[tri[2]]];
            let ke = element_stiffness(p, params);
            let me = element_mass(hat_gradients(p).1);
            let mut kk = Vec::with_capacity(21);
            let mut mm = Vec::with_capacity(12);
            for a in 0..3 {
                let Some(da) = node_dof[tri[a]] else { continue };
                for b in 0..3 {
                    let Some(db) = node_dof[tri[b]] else { continue };
                    for i in 0..2 {
                        for j in 0..2 {
                            let (r, c) = (da + i, db + j);
                            if r > c {
                                continue;
                            }
                            kk.push((r, c, ke[2 * a + i][2 * b + j]));
                            if me[2 * a + i][2 * b + j] != 0.0 {
                                mm.push((r, c, me[2 * a + i][2 * b + j]));
                            }
                        }
                    }
                }
            }
            (kk, mm)
        })
        .reduce(
            || (Vec::new(), Vec::new()),
            |mut acc, (k, m)| {
                acc.0.extend(k);
                acc.1.extend(m);
                acc
            },
        );
    Ok(Assembly {
        stiffness: SparseSymmetricMatrix::from_triplets(next, k_entries)?,
        mass: SparseSymmetricMatrix::from_triplets(next, m_entries)?,
        node_dof,
        bc,
    })
}

/// Lowest `k` generalized eigenpairs of `K x = lambda M x`.
pub fn solve_lowest(
    stiffness: &SparseSymmetricMatrix,
    mass: &SparseSymmetricMatrix,
    k: usize,
    sigma: f64,
) -> Result<EigenPairs> {
    shift_invert_lanczos(stiffness, mass, &LanczosOptions::new(k, sigma))
}

/// Negative shift below the whole spectrum, scaled to the problem.
pub fn default_shift(params: LameParameters, diameter: f64) -> f64 {
    -params.tau() / (diameter * diameter)
}

fn mesh_diameter(mesh: &Mesh) -> f64 {
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in &mesh.nodes {
        for c in 0..2 {
            lo[c] = lo[c].min(p[c]);
            hi[c] = hi[c].max(p[c]);
        }
    }
    (hi[0] - lo[0]).hypot(hi[1] - lo[1])
}

fn provenance_note(bc: BoundaryCondition) -> Option<String> {
    (bc == BoundaryCondition::Neumann).then(|| NATURAL_BC_LABEL.to_string())
}

/// Lowest `k` eigenvalues on one mesh as a [`Spectrum`].
pub fn fem_spectrum(mesh: &Mesh, params: LameParameters, bc: BoundaryCondition, k: usize) -> Result<Spectrum> {
    let asm = assemble(mesh, params, bc)?;
    let k = k.min(asm.unknowns());
    let pairs = solve_lowest(&asm.stiffness, &asm.mass, k, default_shift(params, mesh_diameter(mesh)))?;
    Spectrum::new(
        2,
        bc,
        params,
        pairs.values,
        Provenance::Fem {
            mesh: FemMeshInfo {
                nodes: mesh.nodes.len(),
                triangles: mesh.triangles.len(),
                unknowns: asm.unknowns(),
                max_edge: mesh.max_edge_length(),
                levels: 1,
            },
            extrapolated: false,
            note: provenance_note(bc),
        },
        mesh.domain.clone().map(Domain::Planar),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelResult {
    pub max_edge: f64,
    pub unknowns: usize,
    pub eigenvalues: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct ConvergenceStudy {
    pub levels: Vec<LevelResult>,
    /// Observed order per eigenvalue from the three finest levels.
    pub orders: Vec<f64>,
    /// Richardson-extrapolated spectrum (order 2, ratio 2).
    pub extrapolated: Spectrum,
    pub warnings: Vec<String>,
}

/// Three-level observed order `log2((l_h - l_{h/2}) / (l_{h/2} - l_{h/4}))`.
pub fn observed_order(coarse: f64, medium: f64, fine: f64) -> f64 {
    ((coarse - medium) / (medium - fine)).log2()
}

/// Solves on `levels` uniformly refined meshes starting from `base_h`.
pub fn convergence_study(
    domain: &Domain2D,
    params: LameParameters,
    bc: BoundaryCondition,
    k: usize,
    levels: usize,
    base_h: f64,
) -> Result<ConvergenceStudy> {
    if levels < 3 {
        return Err(Error::InvalidInput(format!("levels={levels} must be >= 3")));
    }
    let mut mesh = generate_mesh(domain, base_h)?;
    let shift = default_shift(params, domain.diameter());
    let mut results = Vec::with_capacity(levels);
    let mut finest_info = None;
    for level in 0..levels {
        if level > 0 {
            mesh = refine(&mesh);
        }
        let asm = assemble(&mesh, params, bc)?;
        if asm.unknowns() < k {
            return Err(Error::InvalidInput(format!(
                "level {level} has only {} unknowns for k={k}; use a smaller base_h",
                asm.unknowns()
            )));
        }
        let pairs = solve_lowest(&asm.stiffness, &asm.mass, k, shift)?;
        results.push(LevelResult {
            max_edge: mesh.max_edge_length(),
            unknowns: asm.unknowns(),
            eigenvalues: pairs.values,
        });
        finest_info = Some(FemMeshInfo {
            nodes: mesh.nodes.len(),
            triangles: mesh.triangles.len(),
            unknowns: asm.unknowns(),
            max_edge: mesh.max_edge_length(),
            levels,
        });
    }
    let [c, m, f] = [&results[levels - 3], &results[levels - 2], &results[levels - 1]];
    let mut orders = Vec::with_capacity(k);
    let mut warnings = Vec::new();
    let mut extrapolated = Vec::with_capacity(k);
    for i in 0..k {
        let (lc, lm, lf) = (c.eigenvalues[i], m.eigenvalues[i], f.eigenvalues[i]);
        if !(lc >= lm && lm >= lf) {
            warnings.push(format!(
                "eigenvalue {}: non-monotone convergence {lc} -> {lm} -> {lf}",
                i + 1
            ));
        }
        orders.push(observed_order(lc, lm, lf));
        extrapolated.push((4.0 * lf - lm) / 3.0);
    }
    extrapolated.sort_by(f64::total_cmp);
    let spectrum = Spectrum::new(
        2,
        bc,
        params,
        extrapolated,
        Provenance::Fem {
            mesh: finest_info.expect("at least three levels"),
            extrapolated: true,
            note: provenance_note(bc),
        },
        Some(Domain::Planar(domain.clone())),
    )?;
    Ok(ConvergenceStudy {
        levels: results,
        orders,
        extrapolated: spectrum,
        warnings,
    })
}
