use std::sync::Arc;

use rayon::prelude::*;

use crate::basis::{gauss_rule, ortho_legendre, BasisSpec};
use crate::mesh::SpatialMesh;
use crate::sparse::CsrMatrix;

use super::flux::FluxWeights;

/// Global LDG operators on the coefficient vectors of `V_h^k`.
///
/// With `P = (P₁, P₂)` the coefficients of the auxiliary variable, the
/// semi-discrete scheme reads
///
/// ```text
///   M Pₓ = -Gₓ U,   M P_y = -G_y U,   M dU = Hₓ Pₓ + H_y P_y + F
/// ```
///
/// where `G` carries the flux weights `σ` and `H` the complementary ones, and
/// eliminating `P` gives `M dU + K U = F` with `K = -(Hₓ M⁻¹ Gₓ + H_y M⁻¹ G_y)`.
#[derive(Debug, Clone)]
pub struct LdgOperators {
    pub mesh: Arc<SpatialMesh>,
    pub basis: BasisSpec,
    pub flux: FluxWeights,
    pub k: CsrMatrix,
    pub gx: CsrMatrix,
    pub gy: CsrMatrix,
    pub hx: CsrMatrix,
    pub hy: CsrMatrix,
    /// Diagonal of the mass matrix.
    pub mass: Vec<f64>,
}

impl LdgOperators {
    pub fn ndofs(&self) -> usize {
        self.mass.len()
    }

    /// Coefficients of the auxiliary variable `p ≈ ∇u`.
    pub fn auxiliary(&self, u: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut px = self.gx.matvec(u);
        let mut py = self.gy.matvec(u);
        for ((a, b), m) in px.iter_mut().zip(py.iter_mut()).zip(&self.mass) {
            *a = -*a / m;
            *b = -*b / m;
        }
        (px, py)
    }

    pub fn apply_k(&self, u: &[f64]) -> Vec<f64> {
        self.k.matvec(u)
    }

    /// `K + a M`
    pub fn system_matrix(&self, a: f64) -> CsrMatrix {
        let m = CsrMatrix::from_diagonal(&self.mass);
        self.k.add(1.0, &m, a)
    }
}

/// `∫_{-1}^{1} φ_r φ_a' dξ` as `s[a][r]`.
fn stiffness_1d(n1: usize) -> Vec<Vec<f64>> {
    let rule = gauss_rule(n1 + 1).expect("valid rule size");
    (0..n1)
        .map(|a| {
            (0..n1)
                .map(|r| {
                    rule.nodes
                        .iter()
                        .zip(&rule.weights)
                        .map(|(&x, &w)| w * ortho_legendre(r, x).0 * ortho_legendre(a, x).1)
                        .sum()
                })
                .collect()
        })
        .collect()
}

#[derive(Clone, Copy)]
enum Axis {
    X,
    Y,
}

/// Matrix of `u ↦ (u, ∂ w) - ⟨û, w n⟩` along one axis, tested against the
/// basis; `û` uses weight `sigma` on the lower-coordinate trace.
fn divergence_operator(mesh: &SpatialMesh, basis: BasisSpec, sigma: f64, axis: Axis) -> CsrMatrix {
    let n1 = basis.n1d();
    let nb = n1 * n1;
    let ndofs = mesh.num_cells() * nb;
    let s = stiffness_1d(n1);
    let right: Vec<f64> = (0..n1).map(|r| ortho_legendre(r, 1.0).0).collect();
    let left: Vec<f64> = (0..n1).map(|r| ortho_legendre(r, -1.0).0).collect();
    let blocks: Vec<Vec<(usize, usize, f64)>> = (0..mesh.num_cells())
        .into_par_iter()
        .map(|c| {
            let (i, j) = mesh.cell_coords(c);
            let (c_up, c_down, half) = match axis {
                Axis::X => (
                    mesh.cell_index(mesh.east(i), j),
                    mesh.cell_index(mesh.west(i), j),
                    0.5 * mesh.hy(j),
                ),
                Axis::Y => (
                    mesh.cell_index(i, mesh.north(j)),
                    mesh.cell_index(i, mesh.south(j)),
                    0.5 * mesh.hx(i),
                ),
            };
            // dof of cell `cell`, with `m` the mode along the axis and `o` the other
            let dof = |cell: usize, m: usize, o: usize| match axis {
                Axis::X => (cell * n1 + m) * n1 + o,
                Axis::Y => (cell * n1 + o) * n1 + m,
            };
            let mut t = Vec::with_capacity(nb * n1 * 5);
            for a in 0..n1 {
                for o in 0..n1 {
                    let row = dof(c, a, o);
                    for r in 0..n1 {
                        // volume
                        t.push((row, dof(c, r, o), half * s[a][r]));
                        // upper edge, outward normal +1
                        t.push((row, dof(c, r, o), -half * right[a] * sigma * right[r]));
                        t.push((
                            row,
                            dof(c_up, r, o),
                            -half * right[a] * (1.0 - sigma) * left[r],
                        ));
                        // lower edge, outward normal -1
                        t.push((row, dof(c_down, r, o), half * left[a] * sigma * right[r]));
                        t.push((row, dof(c, r, o), half * left[a] * (1.0 - sigma) * left[r]));
                    }
                }
            }
            // one-sided fluxes leave structural zeros
            t.retain(|e| e.2 != 0.0);
            t
        })
        .collect();
    let triplets: Vec<_> = blocks.into_iter().flatten().collect();
    CsrMatrix::from_triplets(ndofs, ndofs, &triplets)
}

/// Assembles the LDG operators for flux weights `fw`.
pub fn assemble_operators(
    mesh: &Arc<SpatialMesh>,
    basis: BasisSpec,
    fw: FluxWeights,
) -> LdgOperators {
    let gx = divergence_operator(mesh, basis, fw.sigma1, Axis::X);
    let gy = divergence_operator(mesh, basis, fw.sigma2, Axis::Y);
    let hx = divergence_operator(mesh, basis, 1.0 - fw.sigma1, Axis::X);
    let hy = divergence_operator(mesh, basis, 1.0 - fw.sigma2, Axis::Y);
    let nb = basis.dofs_per_cell();
    let mut mass = Vec::with_capacity(mesh.num_cells() * nb);
    for c in 0..mesh.num_cells() {
        let (i, j) = mesh.cell_coords(c);
        mass.extend(std::iter::repeat_n(0.25 * mesh.hx(i) * mesh.hy(j), nb));
    }
    let minv: Vec<f64> = mass.iter().map(|m| 1.0 / m).collect();
    let kx = hx.matmul(&gx.scale_rows(&minv));
    let ky = hy.matmul(&gy.scale_rows(&minv));
    let k = kx.add(-1.0, &ky, -1.0);
    LdgOperators {
        mesh: mesh.clone(),
        basis,
        flux: fw,
        k,
        gx,
        gy,
        hx,
        hy,
        mass,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Rect;

    fn mesh(n: usize) -> Arc<SpatialMesh> {
        Arc::new(SpatialMesh::uniform(n, n, Rect::unit_square()).unwrap())
    }

    #[test]
    fn stiffness_is_strictly_lower() {
        // ∫ φ_r φ_a' vanishes unless r < a
        let s = stiffness_1d(4);
        for a in 0..4 {
            for r in a..4 {
                assert!(s[a][r].abs() < 1e-14);
            }
        }
        // φ_1' = sqrt(3/2), φ_0 = 1/sqrt(2)
        assert!((s[1][0] - 3f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn constants_in_kernel() {
        for k in 0..3 {
            let basis = BasisSpec::new(k);
            let m = mesh(5);
            let ops = assemble_operators(&m, basis, FluxWeights::new(0.7, 0.2).unwrap());
            let mut u = vec![0.0; ops.ndofs()];
            for c in 0..m.num_cells() {
                u[c * basis.dofs_per_cell()] = 1.3;
            }
            assert!(ops.apply_k(&u).iter().all(|v| v.abs() < 1e-12));
        }
    }

    #[test]
    fn piecewise_constant_five_point_stencil() {
        let m = mesh(4);
        let ops = assemble_operators(&m, BasisSpec::new(0), FluxWeights::new(1.0, 0.0).unwrap());
        // with φ₀φ₀ = 1/2 and mass h²/4 this is (h²/4)·(5-point Laplacian / h²)
        let c = m.cell_index(1, 2);
        assert!((ops.k.get(c, c) - 1.0).abs() < 1e-12);
        for (i, j) in [(0, 2), (2, 2), (1, 1), (1, 3)] {
            assert!((ops.k.get(c, m.cell_index(i, j)) + 0.25).abs() < 1e-12);
        }
        assert_eq!(ops.k.nnz(), 16 * 5);
    }

    #[test]
    fn symmetric_for_alternating_fluxes() {
        let m = mesh(6);
        for (s1, s2) in [(1.0, 0.0), (0.0, 1.0)] {
            let ops = assemble_operators(&m, BasisSpec::new(2), FluxWeights::new(s1, s2).unwrap());
            assert!(ops.k.max_asymmetry() <= 1e-10);
        }
    }

    #[test]
    fn system_matrix_shift() {
        let m = mesh(3);
        let ops = assemble_operators(&m, BasisSpec::new(1), FluxWeights::new(1.0, 0.0).unwrap());
        let f1 = ops.system_matrix(2.0).to_dense();
        let f2 = ops.system_matrix(5.0).to_dense();
        for r in 0..ops.ndofs() {
            for c in 0..ops.ndofs() {
                let want = if r == c { 3.0 * ops.mass[r] } else { 0.0 };
                assert!((f2[r][c] - f1[r][c] - want).abs() < 1e-14);
            }
        }
    }
}
