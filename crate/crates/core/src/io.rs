//! Versioned JSON documents for spectra, meshes, domains and recovery results.
//!
//! Every document carries `"schema_version": 1`. Floats are written in the
//! shortest form that parses back to the same `f64`, so a read/write cycle
//! reproduces the input bit for bit.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::mesh::{Domain2D, Mesh};
use crate::params::{BoundaryCondition, LameParameters};
use crate::spectrum::{Domain, Provenance, Spectrum};
use crate::trace::RecoveredGeometry;

pub const SCHEMA_VERSION: u64 = 1;

fn check_version(value: &Value) -> Result<()> {
    match value.get("schema_version") {
        None => Err(Error::Format("missing schema_version".into())),
        Some(v) if v.as_u64() == Some(SCHEMA_VERSION) => Ok(()),
        Some(v) => Err(Error::Format(format!(
            "unsupported schema_version {v}; expected {SCHEMA_VERSION}"
        ))),
    }
}

fn read_document<T: DeserializeOwned>(text: &str) -> Result<T> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::Format(format!("malformed JSON: {e}")))?;
    if !value.is_object() {
        return Err(Error::Format("expected a JSON object".into()));
    }
    check_version(&value)?;
    serde_json::from_value(value).map_err(|e| Error::Format(e.to_string()))
}

fn write_document<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents serialize");
    s.push('\n');
    s
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpectrumDoc {
    schema_version: u64,
    dim: usize,
    bc: BoundaryCondition,
    tau: f64,
    mu: f64,
    eigenvalues: Vec<f64>,
    #[serde(default = "external")]
    provenance: Provenance,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    domain: Option<Domain>,
}

fn external() -> Provenance {
    Provenance::External
}

pub fn spectrum_to_json(s: &Spectrum) -> String {
    write_document(&SpectrumDoc {
        schema_version: SCHEMA_VERSION,
        dim: s.dim,
        bc: s.bc,
        tau: s.params.tau(),
        mu: s.params.mu(),
        eigenvalues: s.eigenvalues.clone(),
        provenance: s.provenance.clone(),
        domain: s.domain_meta.clone(),
    })
}

/// Parses and validates a spectrum. A missing `provenance` means External.
pub fn spectrum_from_json(text: &str) -> Result<Spectrum> {
    let doc: SpectrumDoc = read_document(text)?;
    Spectrum::new(
        doc.dim,
        doc.bc,
        LameParameters::new(doc.tau, doc.mu)?,
        doc.eigenvalues,
        doc.provenance,
        doc.domain,
    )
}

#[derive(Serialize, Deserialize)]
struct RecoveredDoc {
    schema_version: u64,
    #[serde(flatten)]
    result: RecoveredGeometry,
}

pub fn recovered_to_json(r: &RecoveredGeometry) -> String {
    write_document(&RecoveredDoc {
        schema_version: SCHEMA_VERSION,
        result: r.clone(),
    })
}

pub fn recovered_from_json(text: &str) -> Result<RecoveredGeometry> {
    read_document::<RecoveredDoc>(text).map(|d| d.result)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DomainDoc {
    schema_version: u64,
    domain: Domain,
}

pub fn domain_to_json(d: &Domain) -> String {
    write_document(&DomainDoc {
        schema_version: SCHEMA_VERSION,
        domain: d.clone(),
    })
}

pub fn domain_from_json(text: &str) -> Result<Domain> {
    let d = read_document::<DomainDoc>(text)?.domain;
    if let Domain::Planar(p) = &d {
        p.validate()?;
    }
    Ok(d)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MeshDoc {
    schema_version: u64,
    nodes: Vec<[f64; 2]>,
    triangles: Vec<[usize; 3]>,
    boundary_edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    domain: Option<Domain2D>,
}

pub fn mesh_to_json(m: &Mesh) -> String {
    write_document(&MeshDoc {
        schema_version: SCHEMA_VERSION,
        nodes: m.nodes.clone(),
        triangles: m.triangles.clone(),
        boundary_edges: m.boundary_edges.clone(),
        domain: m.domain.clone(),
    })
}

pub fn mesh_from_json(text: &str) -> Result<Mesh> {
    let doc: MeshDoc = read_document(text)?;
    let mut flags = vec![false; doc.nodes.len()];
    for e in &doc.boundary_edges {
        for &i in e {
            *flags
                .get_mut(i)
                .ok_or_else(|| Error::Format(format!("boundary edge references node {i}")))? = true;
        }
    }
    let mesh = Mesh {
        nodes: doc.nodes,
        triangles: doc.triangles,
        boundary_edges: doc.boundary_edges,
        boundary_node_flags: flags,
        domain: doc.domain,
    };
    mesh.validate()?;
    Ok(mesh)
}
