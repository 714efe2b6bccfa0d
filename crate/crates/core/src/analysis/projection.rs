use std::sync::Arc;

use crate::basis::{gauss_rule, ortho_legendre, BasisSpec, DgField, QuadRule};
use crate::error::{invalid, Result};
use crate::ldg::{FluxWeights, LdgOperators};
use crate::mesh::SpatialMesh;

/// Coordinate axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// One-dimensional factor of a tensor-product projection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProjectionMode {
    /// Orthogonal L2 projection onto `P^k`.
    L2,
    /// Generalized Gauss-Radau projection: moments against `P^{k-1}` plus
    /// `σ (Pg)⁻ + (1-σ) (Pg)⁺ = g` at every cell's upper end point.
    Radau(f64),
}

/// Data of one cell along one axis: slot `r < k` (or every slot for L2) is the
/// normalized moment `(2/h) ∫ g φ_r`, slot `k` of a Radau factor is the point
/// value at the upper end.
struct AxisData<'a> {
    edges: &'a [f64],
    mode: ProjectionMode,
    n1: usize,
    rule: &'a QuadRule,
}

impl AxisData<'_> {
    fn is_point(&self, slot: usize) -> bool {
        matches!(self.mode, ProjectionMode::Radau(_)) && slot + 1 == self.n1
    }

    /// Sample positions and weights realising slot `slot` of cell `c`.
    fn functional(&self, c: usize, slot: usize) -> Vec<(f64, f64)> {
        let (a, b) = (self.edges[c], self.edges[c + 1]);
        if self.is_point(slot) {
            return vec![(b, 1.0)];
        }
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        // (2/h) ∫ g φ dx = Σ w_q φ(ξ_q) g(x_q)
        self.rule
            .nodes
            .iter()
            .zip(&self.rule.weights)
            .map(|(&xi, &w)| (mid + half * xi, w * ortho_legendre(slot, xi).0))
            .collect()
    }

    /// Maps cell data `d[c * n1 + slot]` to coefficients `c[c * n1 + r]`.
    fn solve(&self, data: &[f64]) -> Result<Vec<f64>> {
        let n1 = self.n1;
        let ncell = self.edges.len() - 1;
        let mut out = data.to_vec();
        let sigma = match self.mode {
            ProjectionMode::L2 => return Ok(out),
            ProjectionMode::Radau(s) => s,
        };
        let k = n1 - 1;
        let up = |r: usize| ortho_legendre(r, 1.0).0;
        let lo = |r: usize| ortho_legendre(r, -1.0).0;
        // a c_i + b c_{i+1} = rhs_i for the top coefficients (periodic)
        let a = sigma * up(k);
        let b = (1.0 - sigma) * lo(k);
        let rhs: Vec<f64> = (0..ncell)
            .map(|i| {
                let ip = (i + 1) % ncell;
                let mut v = data[i * n1 + k];
                for r in 0..k {
                    v -= sigma * up(r) * data[i * n1 + r]
                        + (1.0 - sigma) * lo(r) * data[ip * n1 + r];
                }
                v
            })
            .collect();
        let top = solve_cyclic_bidiagonal(a, b, &rhs)?;
        for (i, t) in top.into_iter().enumerate() {
            out[i * n1 + k] = t;
        }
        Ok(out)
    }
}

/// Solves `a c_i + b c_{i+1 mod N} = rhs_i`.
fn solve_cyclic_bidiagonal(a: f64, b: f64, rhs: &[f64]) -> Result<Vec<f64>> {
    let n = rhs.len();
    let mut c = vec![0.0; n];
    if a.abs() >= b.abs() {
        // c_i = rhs_i / a + ρ c_{i+1} with ρ = -b/a
        let rho = -b / a;
        let denom = 1.0 - rho.powi(n as i32);
        if denom.abs() < 1e-12 {
            return invalid("Gauss-Radau projection is singular for this weight (σ = 1/2)");
        }
        let mut s = 0.0;
        let mut pw = 1.0;
        for m in 0..n {
            s += pw * rhs[m] / a;
            pw *= rho;
        }
        c[0] = s / denom;
        for i in (1..n).rev() {
            let next = if i + 1 == n { c[0] } else { c[i + 1] };
            c[i] = rhs[i] / a + rho * next;
        }
    } else {
        // c_{i+1} = rhs_i / b + ρ c_i with ρ = -a/b
        let rho = -a / b;
        let denom = 1.0 - rho.powi(n as i32);
        if denom.abs() < 1e-12 {
            return invalid("Gauss-Radau projection is singular for this weight (σ = 1/2)");
        }
        // c_0 = Σ_m ρ^m rhs_{N-1-m} / b + ρ^N c_0
        let mut s = 0.0;
        let mut pw = 1.0;
        for m in 0..n {
            s += pw * rhs[n - 1 - m] / b;
            pw *= rho;
        }
        c[0] = s / denom;
        for i in 0..n - 1 {
            c[i + 1] = rhs[i] / b + rho * c[i];
        }
    }
    Ok(c)
}

/// Tensor-product projection `Πx ⊗ Πy` of `g`.
pub fn tensor_projection(
    g: impl Fn(f64, f64) -> f64 + Sync,
    mesh: &Arc<SpatialMesh>,
    basis: BasisSpec,
    mode_x: ProjectionMode,
    mode_y: ProjectionMode,
) -> Result<DgField> {
    let n1 = basis.n1d();
    let rule = gauss_rule(basis.degree + 4)?;
    let ax = AxisData {
        edges: mesh.x_edges(),
        mode: mode_x,
        n1,
        rule: &rule,
    };
    let ay = AxisData {
        edges: mesh.y_edges(),
        mode: mode_y,
        n1,
        rule: &rule,
    };
    let (nx, ny) = (mesh.nx(), mesh.ny());
    // data[(i * n1 + a) * (ny * n1) + j * n1 + b]
    let stride = ny * n1;
    let mut data = vec![0.0; nx * n1 * stride];
    for i in 0..nx {
        for a in 0..n1 {
            let fx = ax.functional(i, a);
            for j in 0..ny {
                for b in 0..n1 {
                    let fy = ay.functional(j, b);
                    let mut v = 0.0;
                    for &(x, wx) in &fx {
                        for &(y, wy) in &fy {
                            v += wx * wy * g(x, y);
                        }
                    }
                    data[(i * n1 + a) * stride + j * n1 + b] = v;
                }
            }
        }
    }
    // x-solve for every y slot
    let mut col = vec![0.0; nx * n1];
    for jb in 0..stride {
        for ia in 0..nx * n1 {
            col[ia] = data[ia * stride + jb];
        }
        let solved = ax.solve(&col)?;
        for ia in 0..nx * n1 {
            data[ia * stride + jb] = solved[ia];
        }
    }
    // y-solve for every x coefficient
    for ia in 0..nx * n1 {
        let row = &mut data[ia * stride..(ia + 1) * stride];
        let solved = ay.solve(row)?;
        row.copy_from_slice(&solved);
    }
    // reorder to cell-major storage
    let mut coeffs = vec![0.0; nx * ny * n1 * n1];
    for i in 0..nx {
        for j in 0..ny {
            for r in 0..n1 {
                for s in 0..n1 {
                    coeffs[((i * ny + j) * n1 + r) * n1 + s] =
                        data[(i * n1 + r) * stride + j * n1 + s];
                }
            }
        }
    }
    DgField::from_coeffs(mesh.clone(), basis, coeffs)
}

/// Generalized Gauss-Radau projection `P_{σ₁,σ₂}` of a smooth periodic `u`.
///
/// Realized as the tensor product of one-dimensional Radau projections,
/// which is the unique element of `V_h^k` satisfying the interior-moment,
/// weighted edge-moment and weighted corner conditions.
pub fn project_p(
    u: impl Fn(f64, f64) -> f64 + Sync,
    fw: FluxWeights,
    mesh: &Arc<SpatialMesh>,
    basis: BasisSpec,
) -> Result<DgField> {
    tensor_projection(
        u,
        mesh,
        basis,
        ProjectionMode::Radau(fw.sigma1),
        ProjectionMode::Radau(fw.sigma2),
    )
}

/// Projection `Q_σ` along `axis`: Radau in that direction, L2 in the other.
pub fn project_q(
    u: impl Fn(f64, f64) -> f64 + Sync,
    sigma: f64,
    axis: Axis,
    mesh: &Arc<SpatialMesh>,
    basis: BasisSpec,
) -> Result<DgField> {
    match axis {
        Axis::X => tensor_projection(
            u,
            mesh,
            basis,
            ProjectionMode::Radau(sigma),
            ProjectionMode::L2,
        ),
        Axis::Y => tensor_projection(
            u,
            mesh,
            basis,
            ProjectionMode::L2,
            ProjectionMode::Radau(sigma),
        ),
    }
}

/// `sup_v |(η, ∇·v) - ⟨η̂, v·n⟩| / ‖v‖` over vector fields `v ∈ V_h^k × V_h^k`,
/// with `η = field - u` and `η̂` built with the weights of `ops`.
pub fn dual_norm_pairing(ops: &LdgOperators, field: &DgField, u: impl Fn(f64, f64) -> f64) -> f64 {
    let mesh = &ops.mesh;
    let n1 = ops.basis.n1d();
    let fx = ops.gx.matvec(field.coeffs());
    let fy = ops.gy.matvec(field.coeffs());
    let rule = gauss_rule(ops.basis.degree + 6).expect("valid rule size");
    let phi: Vec<Vec<(f64, f64)>> = rule
        .nodes
        .iter()
        .map(|&x| (0..n1).map(|r| ortho_legendre(r, x)).collect())
        .collect();
    let mut total = 0.0;
    for c in 0..mesh.num_cells() {
        let (i, j) = mesh.cell_coords(c);
        let (hx, hy) = (mesh.hx(i), mesh.hy(j));
        let (xc, yc) = mesh.center(i, j);
        let (x_lo, x_hi) = (mesh.x_edges()[i], mesh.x_edges()[i + 1]);
        let (y_lo, y_hi) = (mesh.y_edges()[j], mesh.y_edges()[j + 1]);
        for a in 0..n1 {
            for b in 0..n1 {
                // the same functional applied to the smooth u (û = u)
                let (mut gx, mut gy) = (0.0, 0.0);
                for (qx, &xi) in rule.nodes.iter().enumerate() {
                    for (qy, &eta) in rule.nodes.iter().enumerate() {
                        let w = rule.weights[qx] * rule.weights[qy] * 0.25 * hx * hy;
                        let uq = u(xc + 0.5 * hx * xi, yc + 0.5 * hy * eta);
                        gx += w * uq * phi[qx][a].1 * (2.0 / hx) * phi[qy][b].0;
                        gy += w * uq * phi[qx][a].0 * phi[qy][b].1 * (2.0 / hy);
                    }
                }
                for (q, &t) in rule.nodes.iter().enumerate() {
                    let wy = rule.weights[q] * 0.5 * hy;
                    let y = yc + 0.5 * hy * t;
                    gx -= wy
                        * phi[q][b].0
                        * (u(x_hi, y) * ortho_legendre(a, 1.0).0
                            - u(x_lo, y) * ortho_legendre(a, -1.0).0);
                    let wx = rule.weights[q] * 0.5 * hx;
                    let x = xc + 0.5 * hx * t;
                    gy -= wx
                        * phi[q][a].0
                        * (u(x, y_hi) * ortho_legendre(b, 1.0).0
                            - u(x, y_lo) * ortho_legendre(b, -1.0).0);
                }
                let dof = (c * n1 + a) * n1 + b;
                let (ex, ey) = (fx[dof] - gx, fy[dof] - gy);
                total += (ex * ex + ey * ey) / (0.25 * hx * hy);
            }
        }
    }
    total.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Rect;

    #[test]
    fn cyclic_solver() {
        for (a, b) in [(2.0, 0.5), (0.3, -1.0), (1.0, 1.0)] {
            let rhs: Vec<f64> = (0..7).map(|i| (i as f64).sin()).collect();
            let c = solve_cyclic_bidiagonal(a, b, &rhs).unwrap();
            for i in 0..7 {
                assert!((a * c[i] + b * c[(i + 1) % 7] - rhs[i]).abs() < 1e-13);
            }
        }
        // ρ = 1
        assert!(solve_cyclic_bidiagonal(1.0, -1.0, &[1.0; 4]).is_err());
        // ρ = -1 with an even count
        assert!(solve_cyclic_bidiagonal(1.0, 1.0, &[1.0; 4]).is_err());
    }

    #[test]
    fn central_weight_is_rejected_for_odd_degree() {
        let mesh = Arc::new(SpatialMesh::uniform(4, 4, Rect::unit_square()).unwrap());
        let fw = FluxWeights::new(0.5, 0.5).unwrap();
        assert!(project_p(|x, _| x, fw, &mesh, BasisSpec::new(1)).is_err());
        assert!(project_q(|x, _| x, 0.5, Axis::Y, &mesh, BasisSpec::new(1)).is_err());
    }
}
