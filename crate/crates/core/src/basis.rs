//! Tensor-product Legendre bases, Gauss quadrature and DG fields.
//!
//! On the reference interval the basis is `φ_r(ξ) = sqrt((2r+1)/2) P_r(ξ)`,
//! orthonormal on `[-1, 1]`. On a physical cell of size `hx x hy` the
//! cell mass matrix is therefore `(hx hy / 4) I`.

use std::io::{self, Write};
use std::sync::Arc;

use crate::error::{invalid, Result};
use crate::mesh::{Edge, SpatialMesh};

/// Legendre polynomial `P_n(x)` and its derivative.
pub fn legendre(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let (mut p_prev, mut p) = (1.0, x);
    let (mut d_prev, mut d) = (0.0, 1.0);
    for m in 1..n {
        let mf = m as f64;
        let p_next = ((2.0 * mf + 1.0) * x * p - mf * p_prev) / (mf + 1.0);
        // P'_{m+1} = P'_{m-1} + (2m+1) P_m
        let d_next = d_prev + (2.0 * mf + 1.0) * p;
        p_prev = p;
        p = p_next;
        d_prev = d;
        d = d_next;
    }
    (p, d)
}

/// Orthonormal Legendre function `φ_r` on `[-1, 1]` and its derivative.
pub fn ortho_legendre(r: usize, x: f64) -> (f64, f64) {
    let s = ((2 * r + 1) as f64 / 2.0).sqrt();
    let (p, d) = legendre(r, x);
    (s * p, s * d)
}

/// One-dimensional Gauss-Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Integrates `f` over `[a, b]`.
    pub fn integrate(&self, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }
}

/// Gauss-Legendre rule with `npoints` nodes (exact to degree `2 npoints - 1`).
pub fn gauss_rule(npoints: usize) -> Result<QuadRule> {
    if !(1..=64).contains(&npoints) {
        return invalid(format!("Gauss rule size must lie in 1..=64, got {npoints}"));
    }
    let n = npoints;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        let w = 2.0 / ((1.0 - x * x) * d * d);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Ok(QuadRule { nodes, weights })
}

/// Tensor-product `Q^k` space description.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasisSpec {
    pub degree: usize,
}

impl BasisSpec {
    pub fn new(degree: usize) -> Self {
        Self { degree }
    }

    /// Modes per axis, `k + 1`.
    pub fn n1d(&self) -> usize {
        self.degree + 1
    }

    pub fn dofs_per_cell(&self) -> usize {
        self.n1d() * self.n1d()
    }

    /// Default quadrature size per axis, `k + 3`.
    pub fn default_quad_points(&self) -> usize {
        self.degree + 3
    }

    pub fn default_rule(&self) -> QuadRule {
        gauss_rule(self.default_quad_points()).expect("k + 3 is a valid rule size")
    }
}

/// Values of the 1D reference basis tabulated on a quadrature rule.
#[derive(Debug, Clone)]
pub struct RefTable {
    pub rule: QuadRule,
    n1d: usize,
    /// `phi[q * n1d + r] = φ_r(ξ_q)`
    pub phi: Vec<f64>,
    /// `dphi[q * n1d + r] = φ_r'(ξ_q)`
    pub dphi: Vec<f64>,
    /// `φ_r(-1)`
    pub left: Vec<f64>,
    /// `φ_r(+1)`
    pub right: Vec<f64>,
}

impl RefTable {
    pub fn new(basis: BasisSpec, rule: QuadRule) -> Self {
        let n1d = basis.n1d();
        let mut phi = Vec::with_capacity(rule.len() * n1d);
        let mut dphi = Vec::with_capacity(rule.len() * n1d);
        for &x in &rule.nodes {
            for r in 0..n1d {
                let (p, d) = ortho_legendre(r, x);
                phi.push(p);
                dphi.push(d);
            }
        }
        let left = (0..n1d).map(|r| ortho_legendre(r, -1.0).0).collect();
        let right = (0..n1d).map(|r| ortho_legendre(r, 1.0).0).collect();
        Self {
            rule,
            n1d,
            phi,
            dphi,
            left,
            right,
        }
    }

    pub fn n1d(&self) -> usize {
        self.n1d
    }

    pub fn nq(&self) -> usize {
        self.rule.len()
    }

    #[inline]
    pub fn phi(&self, q: usize, r: usize) -> f64 {
        self.phi[q * self.n1d + r]
    }

    #[inline]
    pub fn dphi(&self, q: usize, r: usize) -> f64 {
        self.dphi[q * self.n1d + r]
    }
}

/// Which one-sided limit to take on a cell boundary.
///
/// `Minus` is the limit from smaller coordinates, `Plus` from larger ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Minus,
    Plus,
}

/// Side of an edge relative to a given cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceSide {
    /// Limit from inside the cell.
    Interior,
    /// Limit from the neighbouring cell across the edge.
    Exterior,
}

/// Piecewise `Q^k` function with coefficients `u_{ij}^{rs}`.
///
/// Storage is row-major: cell `(i, j)` at `i * ny + j`, then `r` (x-mode),
/// then `s` (y-mode).
#[derive(Debug, Clone, PartialEq)]
pub struct DgField {
    mesh: Arc<SpatialMesh>,
    basis: BasisSpec,
    coeffs: Vec<f64>,
}

impl DgField {
    pub fn zeros(mesh: Arc<SpatialMesh>, basis: BasisSpec) -> Self {
        let n = mesh.num_cells() * basis.dofs_per_cell();
        Self {
            mesh,
            basis,
            coeffs: vec![0.0; n],
        }
    }

    pub fn from_coeffs(mesh: Arc<SpatialMesh>, basis: BasisSpec, coeffs: Vec<f64>) -> Result<Self> {
        let n = mesh.num_cells() * basis.dofs_per_cell();
        if coeffs.len() != n {
            return invalid(format!("expected {n} coefficients, got {}", coeffs.len()));
        }
        Ok(Self {
            mesh,
            basis,
            coeffs,
        })
    }

    pub fn mesh(&self) -> &Arc<SpatialMesh> {
        &self.mesh
    }

    pub fn basis(&self) -> BasisSpec {
        self.basis
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, r: usize, s: usize) -> usize {
        let n1 = self.basis.n1d();
        (self.mesh.cell_index(i, j) * n1 + r) * n1 + s
    }

    pub fn get(&self, i: usize, j: usize, r: usize, s: usize) -> f64 {
        self.coeffs[self.index(i, j, r, s)]
    }

    /// Coefficients of cell `(i, j)`.
    pub fn cell(&self, i: usize, j: usize) -> &[f64] {
        let nb = self.basis.dofs_per_cell();
        let c = self.mesh.cell_index(i, j);
        &self.coeffs[c * nb..(c + 1) * nb]
    }

    /// Evaluates the expansion of cell `(i, j)` at reference point `(ξ, η)`.
    pub fn eval_reference(&self, i: usize, j: usize, xi: f64, eta: f64) -> f64 {
        let n1 = self.basis.n1d();
        let px: Vec<f64> = (0..n1).map(|r| ortho_legendre(r, xi).0).collect();
        let py: Vec<f64> = (0..n1).map(|s| ortho_legendre(s, eta).0).collect();
        let c = self.cell(i, j);
        let mut v = 0.0;
        for r in 0..n1 {
            for s in 0..n1 {
                v += c[r * n1 + s] * px[r] * py[s];
            }
        }
        v
    }

    /// Gradient of the cell-`(i, j)` expansion at reference point `(ξ, η)`,
    /// in physical coordinates.
    pub fn grad_reference(&self, i: usize, j: usize, xi: f64, eta: f64) -> (f64, f64) {
        let n1 = self.basis.n1d();
        let px: Vec<(f64, f64)> = (0..n1).map(|r| ortho_legendre(r, xi)).collect();
        let py: Vec<(f64, f64)> = (0..n1).map(|s| ortho_legendre(s, eta)).collect();
        let c = self.cell(i, j);
        let (mut gx, mut gy) = (0.0, 0.0);
        for r in 0..n1 {
            for s in 0..n1 {
                gx += c[r * n1 + s] * px[r].1 * py[s].0;
                gy += c[r * n1 + s] * px[r].0 * py[s].1;
            }
        }
        (gx * 2.0 / self.mesh.hx(i), gy * 2.0 / self.mesh.hy(j))
    }

    /// Point value with explicit one-sided limits on cell boundaries.
    pub fn eval_sided(&self, x: f64, y: f64, side_x: Side, side_y: Side) -> f64 {
        let (x, y) = self.mesh.wrap(x, y);
        let (i, xi) = locate_sided(self.mesh.x_edges(), x, side_x);
        let (j, eta) = locate_sided(self.mesh.y_edges(), y, side_y);
        self.eval_reference(i, j, xi, eta)
    }

    /// Point value after periodic wrap; on a cell boundary the limit from
    /// the `Plus` side is returned.
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.eval_sided(x, y, Side::Plus, Side::Plus)
    }

    /// One-sided trace on an edge of cell `(i, j)` at edge coordinate
    /// `t ∈ [-1, 1]`.
    pub fn edge_trace(&self, i: usize, j: usize, edge: Edge, side: TraceSide, t: f64) -> f64 {
        match side {
            TraceSide::Interior => {
                let (xi, eta) = edge_point(edge, t);
                self.eval_reference(i, j, xi, eta)
            }
            TraceSide::Exterior => {
                let (ni, nj) = self.mesh.neighbor(i, j, edge);
                let (xi, eta) = edge_point(opposite(edge), t);
                self.eval_reference(ni, nj, xi, eta)
            }
        }
    }

    /// `a * self + b * other`
    pub fn lin_comb(&self, a: f64, other: &DgField, b: f64) -> DgField {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&x, &y)| a * x + b * y)
            .collect();
        DgField {
            mesh: self.mesh.clone(),
            basis: self.basis,
            coeffs,
        }
    }

    /// Exact L2 norm (uses orthonormality of the basis).
    pub fn l2_norm(&self) -> f64 {
        let nb = self.basis.dofs_per_cell();
        let mut acc = 0.0;
        for c in 0..self.mesh.num_cells() {
            let (i, j) = self.mesh.cell_coords(c);
            let jac = 0.25 * self.mesh.hx(i) * self.mesh.hy(j);
            let s: f64 = self.coeffs[c * nb..(c + 1) * nb]
                .iter()
                .map(|v| v * v)
                .sum();
            acc += jac * s;
        }
        acc.sqrt()
    }

    /// Writes a flat CSV dump: `i,j,r,s,value`, cells row-major then modes.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "i,j,r,s,value")?;
        let n1 = self.basis.n1d();
        for i in 0..self.mesh.nx() {
            for j in 0..self.mesh.ny() {
                for r in 0..n1 {
                    for s in 0..n1 {
                        writeln!(w, "{i},{j},{r},{s},{:e}", self.get(i, j, r, s))?;
                    }
                }
            }
        }
        Ok(())
    }
}

fn opposite(edge: Edge) -> Edge {
    match edge {
        Edge::East => Edge::West,
        Edge::West => Edge::East,
        Edge::North => Edge::South,
        Edge::South => Edge::North,
    }
}

fn edge_point(edge: Edge, t: f64) -> (f64, f64) {
    match edge {
        Edge::East => (1.0, t),
        Edge::West => (-1.0, t),
        Edge::North => (t, 1.0),
        Edge::South => (t, -1.0),
    }
}

fn locate_sided(edges: &[f64], v: f64, side: Side) -> (usize, f64) {
    let n = edges.len() - 1;
    let mut c = match edges.partition_point(|&e| e <= v) {
        0 => 0,
        p => (p - 1).min(n - 1),
    };
    let on_left_edge = v == edges[c];
    if on_left_edge && side == Side::Minus {
        // Wrap to the previous cell (periodic), evaluated at its right end.
        c = (c + n - 1) % n;
        return (c, 1.0);
    }
    let xi = 2.0 * (v - edges[c]) / (edges[c + 1] - edges[c]) - 1.0;
    (c, xi.clamp(-1.0, 1.0))
}

/// Physical coordinates of the volume quadrature points of every cell.
///
/// Point `q = qx * nq + qy` of cell `c` sits at index `c * nq^2 + q`.
#[derive(Debug, Clone)]
pub struct VolumeQuad {
    pub table: RefTable,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// Quadrature weight times Jacobian.
    pub w: Vec<f64>,
}

impl VolumeQuad {
    pub fn new(mesh: &SpatialMesh, basis: BasisSpec, rule: QuadRule) -> Self {
        let table = RefTable::new(basis, rule);
        let nq = table.nq();
        let npts = mesh.num_cells() * nq * nq;
        let (mut x, mut y, mut w) = (
            Vec::with_capacity(npts),
            Vec::with_capacity(npts),
            Vec::with_capacity(npts),
        );
        for c in 0..mesh.num_cells() {
            let (i, j) = mesh.cell_coords(c);
            let (xc, yc) = mesh.center(i, j);
            let (hx, hy) = (mesh.hx(i), mesh.hy(j));
            for qx in 0..nq {
                for qy in 0..nq {
                    x.push(xc + 0.5 * hx * table.rule.nodes[qx]);
                    y.push(yc + 0.5 * hy * table.rule.nodes[qy]);
                    w.push(table.rule.weights[qx] * table.rule.weights[qy] * 0.25 * hx * hy);
                }
            }
        }
        Self { table, x, y, w }
    }

    pub fn points_per_cell(&self) -> usize {
        self.table.nq() * self.table.nq()
    }

    /// Values of `field` at every quadrature point.
    pub fn eval_field(&self, field: &DgField) -> Vec<f64> {
        let nq = self.table.nq();
        let n1 = self.table.n1d();
        let nb = n1 * n1;
        let ppc = nq * nq;
        let ncell = field.mesh().num_cells();
        let mut out = vec![0.0; ncell * ppc];
        let coeffs = field.coeffs();
        // sum-factorized: first contract over s, then r
        let mut tmp = vec![0.0; n1 * nq];
        for c in 0..ncell {
            let cc = &coeffs[c * nb..(c + 1) * nb];
            for r in 0..n1 {
                for qy in 0..nq {
                    let mut v = 0.0;
                    for s in 0..n1 {
                        v += cc[r * n1 + s] * self.table.phi(qy, s);
                    }
                    tmp[r * nq + qy] = v;
                }
            }
            let o = &mut out[c * ppc..(c + 1) * ppc];
            for qx in 0..nq {
                for qy in 0..nq {
                    let mut v = 0.0;
                    for r in 0..n1 {
                        v += self.table.phi(qx, r) * tmp[r * nq + qy];
                    }
                    o[qx * nq + qy] = v;
                }
            }
        }
        out
    }

    /// Values of `g` at every quadrature point.
    pub fn eval_fn(&self, g: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        self.x.iter().zip(&self.y).map(|(&x, &y)| g(x, y)).collect()
    }

    /// Moments `∫_cell v φ_r φ_s` of quadrature-point data `v`.
    pub fn moments(&self, values: &[f64], ncell: usize) -> Vec<f64> {
        let nq = self.table.nq();
        let n1 = self.table.n1d();
        let nb = n1 * n1;
        let ppc = nq * nq;
        let mut out = vec![0.0; ncell * nb];
        let mut tmp = vec![0.0; n1 * nq];
        for c in 0..ncell {
            let vals = &values[c * ppc..(c + 1) * ppc];
            let ws = &self.w[c * ppc..(c + 1) * ppc];
            for r in 0..n1 {
                for qy in 0..nq {
                    let mut acc = 0.0;
                    for qx in 0..nq {
                        let q = qx * nq + qy;
                        acc += ws[q] * vals[q] * self.table.phi(qx, r);
                    }
                    tmp[r * nq + qy] = acc;
                }
            }
            let o = &mut out[c * nb..(c + 1) * nb];
            for r in 0..n1 {
                for s in 0..n1 {
                    let mut acc = 0.0;
                    for qy in 0..nq {
                        acc += tmp[r * nq + qy] * self.table.phi(qy, s);
                    }
                    o[r * n1 + s] = acc;
                }
            }
        }
        out
    }
}

/// L2 projection of `g` onto `V_h^k` using the tensor rule built from `quad`.
pub fn l2_project(
    g: impl Fn(f64, f64) -> f64,
    mesh: &Arc<SpatialMesh>,
    basis: BasisSpec,
    quad: &QuadRule,
) -> DgField {
    let vq = VolumeQuad::new(mesh, basis, quad.clone());
    l2_project_with(&vq, mesh, basis, vq.eval_fn(g))
}

/// L2 projection from values already sampled on `vq`'s points.
pub fn l2_project_with(
    vq: &VolumeQuad,
    mesh: &Arc<SpatialMesh>,
    basis: BasisSpec,
    values: Vec<f64>,
) -> DgField {
    let mut coeffs = vq.moments(&values, mesh.num_cells());
    let nb = basis.dofs_per_cell();
    for c in 0..mesh.num_cells() {
        let (i, j) = mesh.cell_coords(c);
        let inv = 4.0 / (mesh.hx(i) * mesh.hy(j));
        for v in &mut coeffs[c * nb..(c + 1) * nb] {
            *v *= inv;
        }
    }
    DgField {
        mesh: mesh.clone(),
        basis,
        coeffs,
    }
}
