use nalgebra::Vector3;

use super::{BaseModel, SecondFrame};
use crate::Vector;

/// The unit sphere S² ⊂ ℝ³.
///
/// Tangent vectors and covectors at `n` are ambient vectors orthogonal to
/// `n`. An element `(n, v, w, u)` of TTS² satisfies `⟨n, u⟩ = −⟨v, w⟩`, and the
/// same holds for `(n, μ, w, m)` in TT*S². Covectors on TS² at `(n, w)` are
/// ambient pairs modulo `span{(n, 0), (w, n)}`.
#[derive(Debug, Clone, Copy, Default)]
pub struct SphereBase;

fn v3(v: &Vector) -> Vector3<f64> {
    Vector3::new(v[0], v[1], v[2])
}

fn dv(v: Vector3<f64>) -> Vector {
    Vector::from_column_slice(v.as_slice())
}

/// Orthonormal `(t₁, t₂)` spanning `T_nS²` with `t₂ = n × t₁`. The seed axis
/// is the coordinate axis least aligned with `n`, ties to the lowest index.
pub fn tangent_basis(n: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let mut k = 0;
    for i in 1..3 {
        if n[i].abs() < n[k].abs() {
            k = i;
        }
    }
    let mut e = Vector3::zeros();
    e[k] = 1.0;
    let t1 = (e - n * n.dot(&e)).normalize();
    let t2 = n.cross(&t1);
    (t1, t2)
}

impl BaseModel for SphereBase {
    fn name(&self) -> &'static str {
        "sphere"
    }

    fn dim(&self) -> usize {
        2
    }

    fn ambient_dim(&self) -> usize {
        3
    }

    fn point_residual(&self, q: &Vector) -> f64 {
        (q.norm() - 1.0).abs()
    }

    fn project_point(&self, raw: &Vector) -> Vector {
        raw / raw.norm()
    }

    fn tangent_residual(&self, q: &Vector, v: &Vector) -> f64 {
        q.dot(v).abs()
    }

    fn project_tangent(&self, q: &Vector, raw: &Vector) -> Vector {
        raw - q * q.dot(raw)
    }

    fn second_residual(&self, q: &Vector, a: &Vector, b: &Vector, c: &Vector) -> f64 {
        (q.dot(c) + a.dot(b)).abs()
    }

    fn complete_second(&self, q: &Vector, a: &Vector, b: &Vector, raw: &Vector) -> Vector {
        raw - q * (q.dot(raw) + a.dot(b))
    }

    fn canonical_pair(&self, q: &Vector, w: &Vector, a: &Vector, b: &Vector) -> (Vector, Vector) {
        let t = -q.dot(b);
        let b = b + q * t;
        let a = a + w * t;
        let a = &a - q * q.dot(&a);
        (a, b)
    }

    fn second_frame(&self, q: &Vector, w: &Vector) -> SecondFrame {
        let (t1, t2) = tangent_basis(&v3(q));
        let z = || Vector::zeros(3);
        let mut directions = Vec::with_capacity(4);
        let mut duals = Vec::with_capacity(4);
        for t in [t1, t2] {
            let t = dv(t);
            directions.push((t.clone(), q * (-w.dot(&t))));
            duals.push((t, z()));
        }
        for t in [t1, t2] {
            directions.push((z(), dv(t)));
            duals.push((z(), dv(t)));
        }
        SecondFrame { directions, duals }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::{CoreCovector, CotangentTangent, SecondTangent, TangentCotangent};
    use approx::assert_abs_diff_eq;

    fn v(x: &[f64]) -> Vector {
        Vector::from_column_slice(x)
    }

    #[test]
    fn flip_on_the_sphere() {
        let s = SphereBase;
        let t = SecondTangent::new(v(&[0., 0., 1.]), v(&[1., 0., 0.]), v(&[0., 2., 0.]), v(&[0.3, 0.1, 0.]));
        let k = s.kappa(&t).unwrap();
        assert_eq!(k.q_dot, t.dq);
        assert_eq!(k.dq, t.q_dot);
        assert_eq!(k.dq_dot, t.dq_dot);
    }

    #[test]
    fn constraint_violations_are_rejected() {
        let s = SphereBase;
        let bad_u = SecondTangent::new(v(&[0., 0., 1.]), v(&[1., 0., 0.]), v(&[1., 0., 0.]), v(&[0., 0., 0.]));
        assert!(s.kappa(&bad_u).is_err());
        let off = SecondTangent::new(v(&[0., 0., 1.1]), v(&[1., 0., 0.]), v(&[0., 1., 0.]), v(&[0., 0., 0.]));
        assert!(s.kappa(&off).is_err());
    }

    #[test]
    fn core_add_example() {
        let s = SphereBase;
        let n = v(&[0., 0., 1.]);
        let vel = v(&[1., 0., 0.]);
        let rho = CotangentTangent::new(n.clone(), vel.clone(), v(&[0.2, 0.1, 0.]), v(&[0., 0.4, 0.]));
        let a = 1.5;
        let vxn = v(&[0., -1., 0.]) * a;
        let c = CoreCovector::new(n.clone(), vxn.clone());
        let out = s.core_add(&rho, &c).unwrap();
        assert_eq!(out.dual_q, &rho.dual_q + &vxn);
        assert_eq!(out.dual_q_dot, rho.dual_q_dot);
        assert!(s.core_sub(&out, &c).unwrap().max_abs_diff(&rho) < 1e-15);
    }

    #[test]
    fn canonical_pair_is_class_invariant() {
        let s = SphereBase;
        let n = v(&[0.6, 0., 0.8]);
        let w = v(&[0., 1., 0.]);
        let a = v(&[0.3, -0.2, 0.5]);
        let b = v(&[1.0, 0.4, -0.1]);
        let (ca, cb) = s.canonical_pair(&n, &w, &a, &b);
        let a2 = &a + &n * 0.7 + &w * (-1.3);
        let b2 = &b + &n * (-1.3);
        let (da, db) = s.canonical_pair(&n, &w, &a2, &b2);
        assert_abs_diff_eq!((&ca - &da).amax(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((&cb - &db).amax(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(n.dot(&ca), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(n.dot(&cb), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn alpha_inverse_resolves_the_multiplier() {
        // α⁻¹ of (n, v; c n, I v) has δp = −I‖v‖² n whatever c is.
        let s = SphereBase;
        let n = v(&[0., 0., 1.]);
        let vel = v(&[0.6, 0.8, 0.]);
        for c in [-3.0, 0.0, 2.5] {
            let rho = CotangentTangent::new(n.clone(), vel.clone(), &n * c, &vel * 2.0);
            let phi = s.alpha_inv(&rho).unwrap();
            assert_abs_diff_eq!((&phi.dp - &n * -2.0).amax(), 0.0, epsilon = 1e-15);
            assert_abs_diff_eq!((&phi.p - &vel * 2.0).amax(), 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn second_frame_is_biorthogonal_and_tangent() {
        let s = SphereBase;
        let n = v(&[0.48, -0.6, 0.64]);
        let w = s.project_tangent(&n, &v(&[0.3, 1.0, -0.2]));
        let f = s.second_frame(&n, &w);
        for (i, (dq, dw)) in f.directions.iter().enumerate() {
            assert_abs_diff_eq!(n.dot(dq), 0.0, epsilon = 1e-15);
            assert_abs_diff_eq!(s.second_residual(&n, &w, dq, dw), 0.0, epsilon = 1e-15);
            for (j, (a, b)) in f.duals.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(a.dot(dq) + b.dot(dw), want, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn tangent_basis_is_right_handed() {
        for n in [Vector3::new(0., 0., 1.), Vector3::new(1., 0., 0.), Vector3::new(0.36, 0.48, 0.8)] {
            let (t1, t2) = tangent_basis(&n);
            assert_abs_diff_eq!(nalgebra::Matrix3::from_columns(&[n, t1, t2]).determinant(), 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn tangent_cotangent_completion() {
        let s = SphereBase;
        let n = v(&[0., 1., 0.]);
        let mu = v(&[1., 0., 0.]);
        let w = v(&[1., 0., 2.]);
        let m = s.complete_second(&n, &mu, &w, &v(&[0.1, 0.5, 0.2]));
        let phi = TangentCotangent::new(n, mu, w, m);
        assert!(s.check_tangent_cotangent(&phi).is_ok());
    }
}
