use crate::basis::{gauss_rule, DgField, TraceSide};
use crate::mesh::Edge;

use super::flux::{weighted_average, FluxWeights};

/// Pair of scalar DG fields on the same mesh and basis.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub x: DgField,
    pub y: DgField,
}

impl VectorField {
    pub fn new(x: DgField, y: DgField) -> Self {
        Self { x, y }
    }
}

/// `B(u, v; p, w) = (u, ∇·w) - ⟨û, w·n⟩ + (p, ∇v) - ⟨p̂·n, v⟩`, evaluated by
/// quadrature directly from the fields (no assembled matrices).
pub fn bilinear_form_b(
    u: &DgField,
    v: &DgField,
    p: &VectorField,
    w: &VectorField,
    fw: FluxWeights,
) -> f64 {
    let mesh = u.mesh().clone();
    let basis = u.basis();
    let rule = gauss_rule(basis.default_quad_points()).expect("valid rule size");
    let pc = fw.complement();
    let mut total = 0.0;
    for i in 0..mesh.nx() {
        for j in 0..mesh.ny() {
            let (hx, hy) = (mesh.hx(i), mesh.hy(j));
            let jac = 0.25 * hx * hy;
            // volume terms
            for (qx, &xi) in rule.nodes.iter().enumerate() {
                for (qy, &eta) in rule.nodes.iter().enumerate() {
                    let wq = rule.weights[qx] * rule.weights[qy] * jac;
                    let uq = u.eval_reference(i, j, xi, eta);
                    let div_w =
                        w.x.grad_reference(i, j, xi, eta).0 + w.y.grad_reference(i, j, xi, eta).1;
                    let gv = v.grad_reference(i, j, xi, eta);
                    let p1 = p.x.eval_reference(i, j, xi, eta);
                    let p2 = p.y.eval_reference(i, j, xi, eta);
                    total += wq * (uq * div_w + p1 * gv.0 + p2 * gv.1);
                }
            }
            // edge terms; on East/North the cell is the lower side
            for (edge, normal, len, s_u, s_p, wf, pf) in [
                (Edge::East, 1.0, hy, fw.sigma1, pc.sigma1, &w.x, &p.x),
                (Edge::West, -1.0, hy, fw.sigma1, pc.sigma1, &w.x, &p.x),
                (Edge::North, 1.0, hx, fw.sigma2, pc.sigma2, &w.y, &p.y),
                (Edge::South, -1.0, hx, fw.sigma2, pc.sigma2, &w.y, &p.y),
            ] {
                for (q, &t) in rule.nodes.iter().enumerate() {
                    let wq = rule.weights[q] * 0.5 * len;
                    let ui = u.edge_trace(i, j, edge, TraceSide::Interior, t);
                    let ue = u.edge_trace(i, j, edge, TraceSide::Exterior, t);
                    let pi = pf.edge_trace(i, j, edge, TraceSide::Interior, t);
                    let pe = pf.edge_trace(i, j, edge, TraceSide::Exterior, t);
                    let (u_hat, p_hat) = if normal > 0.0 {
                        (weighted_average(ui, ue, s_u), weighted_average(pi, pe, s_p))
                    } else {
                        (weighted_average(ue, ui, s_u), weighted_average(pe, pi, s_p))
                    };
                    let wi = wf.edge_trace(i, j, edge, TraceSide::Interior, t);
                    let vi = v.edge_trace(i, j, edge, TraceSide::Interior, t);
                    total -= wq * normal * (u_hat * wi + p_hat * vi);
                }
            }
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::BasisSpec;
    use crate::ldg::assemble_operators;
    use crate::mesh::{Rect, SpatialMesh};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn random_field(mesh: &Arc<SpatialMesh>, basis: BasisSpec, rng: &mut ChaCha8Rng) -> DgField {
        let n = mesh.num_cells() * basis.dofs_per_cell();
        DgField::from_coeffs(
            mesh.clone(),
            basis,
            (0..n).map(|_| rng.random_range(-1.0..1.0)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn zero_fields() {
        let mesh = Arc::new(SpatialMesh::uniform(3, 2, Rect::unit_square()).unwrap());
        let basis = BasisSpec::new(1);
        let z = DgField::zeros(mesh, basis);
        let zv = VectorField::new(z.clone(), z.clone());
        assert_eq!(
            bilinear_form_b(&z, &z, &zv, &zv, FluxWeights::new(0.3, 0.8).unwrap()),
            0.0
        );
    }

    #[test]
    fn vanishes_on_the_diagonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mesh = Arc::new(SpatialMesh::uniform(4, 3, Rect::new(0.0, 1.0, 0.0, 2.0)).unwrap());
        for k in 0..3 {
            let basis = BasisSpec::new(k);
            for (s1, s2) in [(1.0, 0.0), (0.3, 0.9), (0.5, 0.5)] {
                let fw = FluxWeights::new(s1, s2).unwrap();
                let u = random_field(&mesh, basis, &mut rng);
                let p = VectorField::new(
                    random_field(&mesh, basis, &mut rng),
                    random_field(&mesh, basis, &mut rng),
                );
                assert!(bilinear_form_b(&u, &u, &p, &p, fw).abs() < 1e-11);
            }
        }
    }

    #[test]
    fn matches_assembled_operators() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mesh = Arc::new(SpatialMesh::uniform(3, 4, Rect::unit_square()).unwrap());
        let basis = BasisSpec::new(2);
        let fw = FluxWeights::new(0.8, 0.1).unwrap();
        let ops = assemble_operators(&mesh, basis, fw);
        let u = random_field(&mesh, basis, &mut rng);
        let v = random_field(&mesh, basis, &mut rng);
        let p = VectorField::new(
            random_field(&mesh, basis, &mut rng),
            random_field(&mesh, basis, &mut rng),
        );
        let w = VectorField::new(
            random_field(&mesh, basis, &mut rng),
            random_field(&mesh, basis, &mut rng),
        );
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        let via_ops = dot(w.x.coeffs(), &ops.gx.matvec(u.coeffs()))
            + dot(w.y.coeffs(), &ops.gy.matvec(u.coeffs()))
            + dot(v.coeffs(), &ops.hx.matvec(p.x.coeffs()))
            + dot(v.coeffs(), &ops.hy.matvec(p.y.coeffs()));
        let direct = bilinear_form_b(&u, &v, &p, &w, fw);
        assert!((via_ops - direct).abs() < 1e-10, "{via_ops} vs {direct}");
    }
}
