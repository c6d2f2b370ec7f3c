//! Planar domains, triangular meshes and their discrete measures.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::GeometricData;
use crate::special::integrate;

/// Meshes are refused beyond this many nodes.
const MAX_NODES: usize = 4_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Domain2D {
    /// Disk of the given radius centered at the origin.
    Disk { radius: f64 },
    /// `[0, lx] x [0, ly]`.
    Rectangle { lx: f64, ly: f64 },
    /// Ellipse with semi-axes `a` (along x) and `b` centered at the origin.
    Ellipse { a: f64, b: f64 },
    /// Simple polygon, vertices listed counterclockwise.
    Polygon { vertices: Vec<[f64; 2]> },
}

impl Domain2D {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::DegenerateDomain(format!("{name}={v} must be > 0")))
            }
        };
        match self {
            Domain2D::Disk { radius } => positive("radius", *radius),
            Domain2D::Rectangle { lx, ly } => {
                positive("lx", *lx)?;
                positive("ly", *ly)
            }
            Domain2D::Ellipse { a, b } => {
                positive("a", *a)?;
                positive("b", *b)
            }
            Domain2D::Polygon { vertices } => validate_polygon(vertices),
        }
    }

    /// Largest distance between two points of the domain.
    pub fn diameter(&self) -> f64 {
        match self {
            Domain2D::Disk { radius } => 2.0 * radius,
            Domain2D::Rectangle { lx, ly } => lx.hypot(*ly),
            Domain2D::Ellipse { a, b } => 2.0 * a.max(*b),
            Domain2D::Polygon { vertices } => {
                let mut d: f64 = 0.0;
                for p in vertices {
                    for q in vertices {
                        d = d.max((p[0] - q[0]).hypot(p[1] - q[1]));
                    }
                }
                d
            }
        }
    }

    pub fn area(&self) -> f64 {
        match self {
            Domain2D::Disk { radius } => PI * radius * radius,
            Domain2D::Rectangle { lx, ly } => lx * ly,
            Domain2D::Ellipse { a, b } => PI * a * b,
            Domain2D::Polygon { vertices } => signed_polygon_area(vertices),
        }
    }

    pub fn perimeter(&self) -> f64 {
        match self {
            Domain2D::Disk { radius } => 2.0 * PI * radius,
            Domain2D::Rectangle { lx, ly } => 2.0 * (lx + ly),
            Domain2D::Ellipse { a, b } => {
                let (a, b) = (*a, *b);
                let speed = |s: f64| (a * a * s.sin().powi(2) + b * b * s.cos().powi(2)).sqrt();
                4.0 * integrate(speed, 0.0, 0.5 * PI, 1e-14 * (a + b))
            }
            Domain2D::Polygon { vertices } => (0..vertices.len())
                .map(|i| {
                    let p = vertices[i];
                    let q = vertices[(i + 1) % vertices.len()];
                    (q[0] - p[0]).hypot(q[1] - p[1])
                })
                .sum(),
        }
    }

    /// Polygons have corners, which the smooth-boundary heat expansion does not cover.
    pub fn has_corners(&self) -> bool {
        matches!(self, Domain2D::Rectangle { .. } | Domain2D::Polygon { .. })
    }

    pub fn geometric_data(&self) -> Result<GeometricData> {
        self.validate()?;
        GeometricData::new(2, self.area(), self.perimeter())
    }

    /// Moves a point near the boundary onto it; straight boundaries are left alone.
    fn project_to_boundary(&self, p: [f64; 2]) -> [f64; 2] {
        match self {
            Domain2D::Disk { radius } => {
                let r = p[0].hypot(p[1]);
                [p[0] * radius / r, p[1] * radius / r]
            }
            Domain2D::Ellipse { a, b } => {
                let s = (p[1] / b).atan2(p[0] / a);
                [a * s.cos(), b * s.sin()]
            }
            _ => p,
        }
    }
}

fn signed_polygon_area(v: &[[f64; 2]]) -> f64 {
    0.5 * (0..v.len())
        .map(|i| {
            let p = v[i];
            let q = v[(i + 1) % v.len()];
            p[0] * q[1] - q[0] * p[1]
        })
        .sum::<f64>()
}

fn orient(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

fn segments_cross(p1: [f64; 2], p2: [f64; 2], q1: [f64; 2], q2: [f64; 2]) -> bool {
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}

fn validate_polygon(v: &[[f64; 2]]) -> Result<()> {
    if v.len() < 3 {
        return Err(Error::DegenerateDomain("polygon needs at least 3 vertices".into()));
    }
    if v.iter().flatten().any(|c| !c.is_finite()) {
        return Err(Error::DegenerateDomain("non-finite polygon vertex".into()));
    }
    let area = signed_polygon_area(v);
    if area <= 0.0 {
        return Err(Error::DegenerateDomain(format!(
            "polygon signed area {area} is not positive (vertices must be counterclockwise)"
        )));
    }
    let n = v.len();
    for i in 0..n {
        let (a, b) = (v[i], v[(i + 1) % n]);
        if a == b {
            return Err(Error::DegenerateDomain(format!("repeated vertex {i}")));
        }
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            if segments_cross(a, b, v[j], v[(j + 1) % n]) {
                return Err(Error::DegenerateDomain(format!(
                    "polygon edges {i} and {j} intersect"
                )));
            }
        }
    }
    Ok(())
}

/// Conforming triangulation with counterclockwise triangles.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub nodes: Vec<[f64; 2]>,
    pub triangles: Vec<[usize; 3]>,
    /// Boundary edges oriented with the domain on their left.
    pub boundary_edges: Vec<[usize; 2]>,
    pub boundary_node_flags: Vec<bool>,
    /// Domain the mesh approximates; drives boundary projection on refinement.
    pub domain: Option<Domain2D>,
}

/// Summary returned by [`Mesh::validate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeshReport {
    pub nodes: usize,
    pub triangles: usize,
    pub boundary_edges: usize,
    pub boundary_loops: usize,
    pub min_area: f64,
    pub max_edge: f64,
}

impl Mesh {
    /// Builds a mesh from nodes and triangles, deriving the boundary.
    pub fn from_triangles(
        nodes: Vec<[f64; 2]>,
        mut triangles: Vec<[usize; 3]>,
        domain: Option<Domain2D>,
    ) -> Result<Self> {
        for tri in triangles.iter_mut() {
            if tri.iter().any(|&i| i >= nodes.len()) {
                return Err(Error::Mesh(format!("triangle {tri:?} references a missing node")));
            }
            if orient(nodes[tri[0]], nodes[tri[1]], nodes[tri[2]]) < 0.0 {
                tri.swap(1, 2);
            }
        }
        let boundary_edges = boundary_of(&triangles);
        let mut flags = vec![false; nodes.len()];
        for e in &boundary_edges {
            flags[e[0]] = true;
            flags[e[1]] = true;
        }
        Ok(Mesh {
            nodes,
            triangles,
            boundary_edges,
            boundary_node_flags: flags,
            domain,
        })
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t];
        0.5 * orient(self.nodes[a], self.nodes[b], self.nodes[c])
    }

    fn edge_length(&self, i: usize, j: usize) -> f64 {
        let (p, q) = (self.nodes[i], self.nodes[j]);
        (p[0] - q[0]).hypot(p[1] - q[1])
    }

    pub fn max_edge_length(&self) -> f64 {
        self.triangles
            .iter()
            .flat_map(|t| [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])])
            .map(|(i, j)| self.edge_length(i, j))
            .fold(0.0, f64::max)
    }

    pub fn interior_node_count(&self) -> usize {
        self.boundary_node_flags.iter().filter(|b| !**b).count()
    }

    /// Checks orientation, edge conformity and closed boundary loops.
    pub fn validate(&self) -> Result<MeshReport> {
        if self.triangles.is_empty() {
            return Err(Error::Mesh("mesh has no triangles".into()));
        }
        if self.boundary_node_flags.len() != self.nodes.len() {
            return Err(Error::Mesh("boundary flag count differs from node count".into()));
        }
        let mut min_area = f64::INFINITY;
        for (t, tri) in self.triangles.iter().enumerate() {
            if tri.iter().any(|&i| i >= self.nodes.len()) {
                return Err(Error::Mesh(format!("triangle {t} references a missing node")));
            }
            let area = self.triangle_area(t);
            if !(area > 0.0) {
                return Err(Error::Mesh(format!("triangle {t} has signed area {area}")));
            }
            min_area = min_area.min(area);
        }
        let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
        for tri in &self.triangles {
            for (a, b) in [(tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])] {
                let c = directed.entry((a, b)).or_insert(0);
                *c += 1;
                if *c > 1 {
                    return Err(Error::Mesh(format!(
                        "edge ({a}, {b}) appears twice with the same orientation"
                    )));
                }
            }
        }
        let mut expected: Vec<[usize; 2]> = directed
            .keys()
            .filter(|(a, b)| !directed.contains_key(&(*b, *a)))
            .map(|&(a, b)| [a, b])
            .collect();
        expected.sort_unstable();
        let mut given = self.boundary_edges.clone();
        given.sort_unstable();
        if expected != given {
            return Err(Error::Mesh(format!(
                "boundary edges do not match the unshared triangle edges ({} listed, {} found)",
                given.len(),
                expected.len()
            )));
        }
        let mut next: HashMap<usize, usize> = HashMap::new();
        for e in &self.boundary_edges {
            if next.insert(e[0], e[1]).is_some() {
                return Err(Error::Mesh(format!("boundary node {} starts two edges", e[0])));
            }
        }
        let mut seen: HashMap<usize, bool> = HashMap::new();
        let mut loops = 0;
        for e in &self.boundary_edges {
            if seen.contains_key(&e[0]) {
                continue;
            }
            loops += 1;
            let start = e[0];
            let mut cur = start;
            loop {
                seen.insert(cur, true);
                cur = *next.get(&cur).ok_or_else(|| {
                    Error::Mesh(format!("boundary loop through node {start} is not closed"))
                })?;
                if cur == start {
                    break;
                }
                if seen.contains_key(&cur) {
                    return Err(Error::Mesh("boundary loops overlap".into()));
                }
            }
        }
        for (i, flag) in self.boundary_node_flags.iter().enumerate() {
            if *flag != seen.contains_key(&i) {
                return Err(Error::Mesh(format!("boundary flag of node {i} is wrong")));
            }
        }
        Ok(MeshReport {
            nodes: self.nodes.len(),
            triangles: self.triangles.len(),
            boundary_edges: self.boundary_edges.len(),
            boundary_loops: loops,
            min_area,
            max_edge: self.max_edge_length(),
        })
    }

    /// Plain-text form with `NODES`, `TRIANGLES` and `BOUNDARY_EDGES` sections.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "NODES {}", self.nodes.len());
        for p in &self.nodes {
            let _ = writeln!(s, "{:?} {:?}", p[0], p[1]);
        }
        let _ = writeln!(s, "TRIANGLES {}", self.triangles.len());
        for t in &self.triangles {
            let _ = writeln!(s, "{} {} {}", t[0], t[1], t[2]);
        }
        let _ = writeln!(s, "BOUNDARY_EDGES {}", self.boundary_edges.len());
        for e in &self.boundary_edges {
            let _ = writeln!(s, "{} {}", e[0], e[1]);
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let lines: Vec<&str> = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .collect();
        let mut reader = TextReader { lines, cursor: 0 };
        let n_nodes = reader.header("NODES")?;
        let nodes = (0..n_nodes)
            .map(|_| {
                let p = reader.row::<f64>(2, "NODES")?;
                Ok([p[0], p[1]])
            })
            .collect::<Result<Vec<_>>>()?;
        let n_tri = reader.header("TRIANGLES")?;
        let triangles = (0..n_tri)
            .map(|_| {
                let t = reader.row::<usize>(3, "TRIANGLES")?;
                Ok([t[0], t[1], t[2]])
            })
            .collect::<Result<Vec<_>>>()?;
        let n_edges = reader.header("BOUNDARY_EDGES")?;
        let boundary_edges = (0..n_edges)
            .map(|_| {
                let e = reader.row::<usize>(2, "BOUNDARY_EDGES")?;
                Ok([e[0], e[1]])
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(extra) = reader.lines.get(reader.cursor) {
            return Err(Error::Format(format!("trailing content: '{extra}'")));
        }
        let mut flags = vec![false; nodes.len()];
        for e in &boundary_edges {
            for &i in e {
                *flags
                    .get_mut(i)
                    .ok_or_else(|| Error::Format(format!("boundary edge references node {i}")))? = true;
            }
        }
        let mesh = Mesh {
            nodes,
            triangles,
            boundary_edges,
            boundary_node_flags: flags,
            domain: None,
        };
        mesh.validate()?;
        Ok(mesh)
    }
}

struct TextReader<'a> {
    lines: Vec<&'a str>,
    cursor: usize,
}

impl TextReader<'_> {
    fn next_line(&mut self, what: &str) -> Result<&str> {
        let line = self
            .lines
            .get(self.cursor)
            .ok_or_else(|| Error::Format(format!("truncated input: expected {what}")))?;
        self.cursor += 1;
        Ok(line)
    }

    fn header(&mut self, name: &str) -> Result<usize> {
        let line = self.next_line(name)?;
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 2 || parts[0] != name {
            return Err(Error::Format(format!("expected '{name} <count>', got '{line}'")));
        }
        parts[1]
            .parse()
            .map_err(|_| Error::Format(format!("bad count in '{line}'")))
    }

    fn row<T: std::str::FromStr>(&mut self, width: usize, section: &str) -> Result<Vec<T>> {
        let line = self.next_line(section)?;
        let values = line
            .split_whitespace()
            .map(|s| s.parse::<T>())
            .collect::<std::result::Result<Vec<T>, _>>()
            .map_err(|_| Error::Format(format!("bad {section} line '{line}'")))?;
        if values.len() != width {
            return Err(Error::Format(format!("bad {section} line '{line}'")));
        }
        Ok(values)
    }
}

fn boundary_of(triangles: &[[usize; 3]]) -> Vec<[usize; 2]> {
    let mut count: HashMap<(usize, usize), (usize, [usize; 2])> = HashMap::new();
    for tri in triangles {
        for (a, b) in [(tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])] {
            let key = (a.min(b), a.max(b));
            count.entry(key).or_insert((0, [a, b])).0 += 1;
        }
    }
    let mut edges: Vec<[usize; 2]> = count
        .into_values()
        .filter(|(c, _)| *c == 1)
        .map(|(_, e)| e)
        .collect();
    edges.sort_unstable();
    edges
}

/// Triangulates `domain` with maximum edge length at most `1.5 * target_h`.
pub fn generate_mesh(domain: &Domain2D, target_h: f64) -> Result<Mesh> {
    domain.validate()?;
    if !(target_h > 0.0) || !target_h.is_finite() {
        return Err(Error::InvalidInput(format!("target_h={target_h} must be > 0")));
    }
    if target_h >= domain.diameter() {
        return Err(Error::InvalidInput(format!(
            "target_h={target_h} is not smaller than the domain diameter {}",
            domain.diameter()
        )));
    }
    let estimate = domain.area() / (0.5 * target_h * target_h);
    if estimate > MAX_NODES as f64 {
        return Err(Error::InvalidInput(format!(
            "target_h={target_h} would need ~{estimate:.0} nodes (limit {MAX_NODES})"
        )));
    }
    match domain {
        Domain2D::Rectangle { lx, ly } => rectangle_mesh(*lx, *ly, target_h, domain.clone()),
        Domain2D::Disk { radius } => {
            let rings = (radius / target_h).ceil().max(1.0) as usize;
            ring_mesh(rings, |p| [radius * p[0], radius * p[1]], domain.clone())
        }
        Domain2D::Ellipse { a, b } => {
            let rings = (a.max(*b) / target_h).ceil().max(1.0) as usize;
            ring_mesh(rings, |p| [a * p[0], b * p[1]], domain.clone())
        }
        Domain2D::Polygon { vertices } => polygon_mesh(vertices, target_h, domain.clone()),
    }
}

fn rectangle_mesh(lx: f64, ly: f64, h: f64, domain: Domain2D) -> Result<Mesh> {
    let nx = (lx / h).ceil().max(1.0) as usize;
    let ny = (ly / h).ceil().max(1.0) as usize;
    let mut nodes = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            let x = if i == nx { lx } else { lx * i as f64 / nx as f64 };
            let y = if j == ny { ly } else { ly * j as f64 / ny as f64 };
            nodes.push([x, y]);
        }
    }
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut triangles = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            triangles.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            triangles.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    Mesh::from_triangles(nodes, triangles, Some(domain))
}

/// Concentric-ring mesh of the unit disk (ring `i` carries `6 i` nodes),
/// pushed through `map`.
fn ring_mesh(rings: usize, map: impl Fn([f64; 2]) -> [f64; 2], domain: Domain2D) -> Result<Mesh> {
    let mut nodes = vec![map([0.0, 0.0])];
    let mut ring_start = vec![0usize];
    for i in 1..=rings {
        ring_start.push(nodes.len());
        let r = i as f64 / rings as f64;
        let count = 6 * i;
        for j in 0..count {
            let theta = 2.0 * PI * j as f64 / count as f64;
            let p = if i == rings {
                [theta.cos(), theta.sin()]
            } else {
                [r * theta.cos(), r * theta.sin()]
            };
            nodes.push(map(p));
        }
    }
    let mut triangles = Vec::with_capacity(6 * rings * rings);
    for j in 0..6 {
        triangles.push([0, 1 + j, 1 + (j + 1) % 6]);
    }
    for i in 2..=rings {
        let (n_in, n_out) = (6 * (i - 1), 6 * i);
        let inner = |k: usize| ring_start[i - 1] + k % n_in;
        let outer = |k: usize| ring_start[i] + k % n_out;
        let (mut a, mut b) = (0usize, 0usize);
        let dist = |p: usize, q: usize| (nodes[p][0] - nodes[q][0]).hypot(nodes[p][1] - nodes[q][1]);
        // Advance along whichever ring gives the shorter new diagonal.
        while a < n_in || b < n_out {
            let advance_outer = b < n_out && (a == n_in || dist(inner(a), outer(b + 1)) <= dist(inner(a + 1), outer(b)));
            if advance_outer {
                triangles.push([inner(a), outer(b), outer(b + 1)]);
                b += 1;
            } else {
                triangles.push([inner(a), outer(b), inner(a + 1)]);
                a += 1;
            }
        }
    }
    Mesh::from_triangles(nodes, triangles, Some(domain))
}

/// Ear-clipping triangulation of a simple counterclockwise polygon.
fn ear_clip(v: &[[f64; 2]]) -> Result<Vec<[usize; 3]>> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    let mut out = Vec::with_capacity(v.len() - 2);
    let mut guard = 0;
    while idx.len() > 3 {
        let m = idx.len();
        let mut clipped = false;
        for k in 0..m {
            let (a, b, c) = (idx[(k + m - 1) % m], idx[k], idx[(k + 1) % m]);
            if orient(v[a], v[b], v[c]) <= 0.0 {
                continue;
            }
            let contains = idx.iter().any(|&p| {
                p != a
                    && p != b
                    && p != c
                    && orient(v[a], v[b], v[p]) >= 0.0
                    && orient(v[b], v[c], v[p]) >= 0.0
                    && orient(v[c], v[a], v[p]) >= 0.0
            });
            if !contains {
                out.push([a, b, c]);
                idx.remove(k);
                clipped = true;
                break;
            }
        }
        guard += 1;
        if !clipped || guard > 10 * v.len() {
            return Err(Error::DegenerateDomain("polygon could not be triangulated".into()));
        }
    }
    out.push([idx[0], idx[1], idx[2]]);
    Ok(out)
}

fn polygon_mesh(vertices: &[[f64; 2]], h: f64, domain: Domain2D) -> Result<Mesh> {
    let triangles = ear_clip(vertices)?;
    let mut mesh = Mesh::from_triangles(vertices.to_vec(), triangles, Some(domain))?;
    while mesh.max_edge_length() > 1.5 * h {
        if mesh.nodes.len() * 4 > MAX_NODES {
            return Err(Error::InvalidInput(format!("target_h={h} is unachievable")));
        }
        mesh = refine(&mesh);
    }
    Ok(mesh)
}

/// Splits every triangle into four through its edge midpoints. Boundary
/// midpoints are projected onto curved boundaries.
pub fn refine(mesh: &Mesh) -> Mesh {
    let mut nodes = mesh.nodes.clone();
    let mut flags = mesh.boundary_node_flags.clone();
    let boundary: HashMap<(usize, usize), ()> = mesh
        .boundary_edges
        .iter()
        .map(|e| ((e[0].min(e[1]), e[0].max(e[1])), ()))
        .collect();
    let mut midpoint: HashMap<(usize, usize), usize> = HashMap::new();
    let mut mid = |a: usize, b: usize, nodes: &mut Vec<[f64; 2]>, flags: &mut Vec<bool>| -> usize {
        let key = (a.min(b), a.max(b));
        *midpoint.entry(key).or_insert_with(|| {
            let (p, q) = (nodes[a], nodes[b]);
            let mut m = [0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])];
            let on_boundary = boundary.contains_key(&key);
            if on_boundary {
                if let Some(d) = &mesh.domain {
                    m = d.project_to_boundary(m);
                }
            }
            nodes.push(m);
            flags.push(on_boundary);
            nodes.len() - 1
        })
    };
    let mut triangles = Vec::with_capacity(4 * mesh.triangles.len());
    for &[a, b, c] in &mesh.triangles {
        let ab = mid(a, b, &mut nodes, &mut flags);
        let bc = mid(b, c, &mut nodes, &mut flags);
        let ca = mid(c, a, &mut nodes, &mut flags);
        triangles.push([a, ab, ca]);
        triangles.push([ab, b, bc]);
        triangles.push([ca, bc, c]);
        triangles.push([ab, bc, ca]);
    }
    let mut boundary_edges = Vec::with_capacity(2 * mesh.boundary_edges.len());
    for &[a, b] in &mesh.boundary_edges {
        let m = mid(a, b, &mut nodes, &mut flags);
        boundary_edges.push([a, m]);
        boundary_edges.push([m, b]);
    }
    boundary_edges.sort_unstable();
    Mesh {
        nodes,
        triangles,
        boundary_edges,
        boundary_node_flags: flags,
        domain: mesh.domain.clone(),
    }
}

pub fn mesh_volume(mesh: &Mesh) -> f64 {
    (0..mesh.triangles.len()).map(|t| mesh.triangle_area(t)).sum()
}

pub fn mesh_boundary_length(mesh: &Mesh) -> f64 {
    mesh.boundary_edges
        .iter()
        .map(|e| mesh.edge_length(e[0], e[1]))
        .sum()
}
