//! The frame bundle `SO(3) → S²` with the Levi-Civita connection.
//!
//! A point is an orthonormal right-handed frame `R = [n f₁ f₂]` whose first
//! column is the base point. Tangent vectors are written `Ṙ = hat(x) R` with
//! `x ∈ ℝ³`.
//!
//! Sign convention: `θ ∈ SO(2)` acts on the right by `R ↦ R·Rot_{e₁}(θ)`,
//! which turns `(f₁, f₂)` by `+θ` about `n`. The fundamental vector of
//! `θ ∈ so(2)` is therefore `x = θ n`, and `ω(σ(θ)) = θ` holds with
//! `ω(x) = ⟨n, x⟩`. This absorbs the sign that an antihomomorphism
//! convention for fundamental fields would otherwise introduce.

use std::sync::Arc;

use nalgebra::{Matrix3, Vector3};
use rand::RngCore;

use super::PrincipalBundle;
use crate::base::{tangent_basis, CoreCovector, SphereBase, TangentVec};
use crate::error::{Error, Result};
use crate::lie::{random_group_element, random_rotation, so3, DualAlgebraElement, GroupElement, LieAlgebra, LieAlgebraElement, So3Vector};
use crate::tol;
use crate::Vector;

/// Frame tolerance for orthonormality and handedness.
pub const FRAME_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FramePoint {
    pub n: Vector3<f64>,
    pub f1: Vector3<f64>,
    pub f2: Vector3<f64>,
}

impl FramePoint {
    pub fn new(n: Vector3<f64>, f1: Vector3<f64>, f2: Vector3<f64>) -> Result<Self> {
        let p = FramePoint { n, f1, f2 };
        p.validate()?;
        Ok(p)
    }

    pub fn from_matrix(r: &Matrix3<f64>) -> Self {
        FramePoint {
            n: r.column(0).into(),
            f1: r.column(1).into(),
            f2: r.column(2).into(),
        }
    }

    pub fn matrix(&self) -> Matrix3<f64> {
        Matrix3::from_columns(&[self.n, self.f1, self.f2])
    }

    /// The frame of the deterministic section over `n`.
    pub fn reference(n: &Vector3<f64>) -> Self {
        let n = n.normalize();
        let (f1, f2) = tangent_basis(&n);
        FramePoint { n, f1, f2 }
    }

    pub fn validate(&self) -> Result<()> {
        let r = self.matrix();
        let e = (r.transpose() * r - Matrix3::identity()).amax();
        if !e.is_finite() || e > FRAME_TOL {
            return Err(Error::NotOrthogonal(e));
        }
        let d = (r.determinant() - 1.0).abs();
        if d > FRAME_TOL {
            return Err(Error::NotOrthogonal(d));
        }
        Ok(())
    }

    /// Turns `(f₁, f₂)` about `n` by `θ`, then re-orthonormalizes.
    pub fn rotate(&self, theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        let f1 = self.f1 * c + self.f2 * s;
        let f2 = -self.f1 * s + self.f2 * c;
        FramePoint::from_matrix(&so3::orthonormalize(&Matrix3::from_columns(&[self.n, f1, f2])))
    }

    pub fn base(&self) -> Vector {
        Vector::from_column_slice(self.n.as_slice())
    }
}

/// `P_{S²} = SO(3)` over the sphere, structure group SO(2).
#[derive(Debug, Clone)]
pub struct FrameBundle {
    base: SphereBase,
    algebra: Arc<LieAlgebra>,
}

impl Default for FrameBundle {
    fn default() -> Self {
        Self::new()
    }
}

impl FrameBundle {
    pub fn new() -> Self {
        FrameBundle {
            base: SphereBase,
            algebra: LieAlgebra::so2(),
        }
    }

    fn scalar(&self, x: f64) -> LieAlgebraElement {
        self.algebra.zero().with_coeffs(Vector::from_element(1, x))
    }
}

fn v3(v: &Vector) -> Vector3<f64> {
    Vector3::new(v[0], v[1], v[2])
}

impl PrincipalBundle for FrameBundle {
    type Base = SphereBase;
    type Point = FramePoint;
    type RawTangent = So3Vector;

    fn name(&self) -> &'static str {
        "sphere-frame"
    }

    fn base(&self) -> &SphereBase {
        &self.base
    }

    fn algebra(&self) -> &Arc<LieAlgebra> {
        &self.algebra
    }

    fn project(&self, p: &FramePoint) -> Vector {
        p.base()
    }

    fn check_bundle_point(&self, p: &FramePoint) -> Result<()> {
        p.validate()
    }

    /// `ω(p, x) = ⟨n, x⟩`.
    fn connection_form(&self, p: &FramePoint, raw: &So3Vector) -> Result<LieAlgebraElement> {
        Ok(self.scalar(p.n.dot(&raw.0)))
    }

    /// `Tπ(p, x) = x × n`.
    fn push_forward(&self, p: &FramePoint, raw: &So3Vector) -> Result<Vector> {
        Ok(Vector::from_column_slice(raw.0.cross(&p.n).as_slice()))
    }

    /// `v^H = n × v`.
    fn horizontal_lift(&self, p: &FramePoint, v: &TangentVec) -> Result<So3Vector> {
        self.check_over(p, v)?;
        Ok(So3Vector(p.n.cross(&v3(&v.v))))
    }

    fn fundamental(&self, p: &FramePoint, x: &LieAlgebraElement) -> Result<So3Vector> {
        x.ensure_same_algebra(&self.algebra)?;
        Ok(So3Vector(p.n * x.coeffs()[0]))
    }

    fn raw_add(&self, a: &So3Vector, b: &So3Vector) -> So3Vector {
        *a + *b
    }

    fn raw_distance(&self, a: &So3Vector, b: &So3Vector) -> f64 {
        (a.0 - b.0).amax()
    }

    /// `Ω_p(u, w) = ⟨n, w × u⟩`.
    fn curvature_unchecked(&self, p: &FramePoint, u: &Vector, w: &Vector) -> LieAlgebraElement {
        self.scalar(p.n.dot(&v3(w).cross(&v3(u))))
    }

    /// `Ω*_{(p,u)}(a) = a (u × n)`.
    fn curvature_dual(&self, p: &FramePoint, u: &TangentVec, a: &DualAlgebraElement) -> Result<CoreCovector> {
        self.check_over(p, u)?;
        a.ensure_same_algebra(&self.algebra)?;
        let c = v3(&u.v).cross(&p.n) * a.coeffs()[0];
        Ok(CoreCovector::new(p.base(), Vector::from_column_slice(c.as_slice())))
    }

    fn flow(&self, p: &FramePoint, raw: &So3Vector, t: f64) -> FramePoint {
        let r = so3::exp(&(raw.0 * t)) * p.matrix();
        FramePoint::from_matrix(&so3::orthonormalize(&r))
    }

    fn point_distance(&self, a: &FramePoint, b: &FramePoint) -> f64 {
        (a.matrix() - b.matrix()).amax()
    }

    fn random_point(&self, rng: &mut dyn RngCore) -> FramePoint {
        FramePoint::from_matrix(&random_rotation(rng))
    }

    fn right_act(&self, p: &FramePoint, g: &GroupElement) -> Result<FramePoint> {
        match g {
            GroupElement::So2(theta) => Ok(p.rotate(*theta)),
            _ => Err(Error::AlgebraMismatch("frame bundle acted on by a non-SO(2) element".into())),
        }
    }

    fn gauge_between(&self, p: &FramePoint, q: &FramePoint) -> Result<GroupElement> {
        let r = (p.n - q.n).amax();
        if r > tol::BASE_MATCH {
            return Err(Error::ProjectionMismatch {
                what: "frames over different base points",
                residual: r,
            });
        }
        Ok(GroupElement::So2(q.f1.dot(&p.f2).atan2(q.f1.dot(&p.f1))))
    }

    fn reference_point(&self, p: &FramePoint) -> Result<FramePoint> {
        Ok(FramePoint::reference(&p.n))
    }

    fn random_group_element(&self, rng: &mut dyn RngCore) -> Option<GroupElement> {
        random_group_element(self.algebra.kind(), rng)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::curvature_dual_by_basis;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn e3() -> FramePoint {
        FramePoint::new(Vector3::z(), Vector3::x(), Vector3::y()).unwrap()
    }

    fn dv(x: Vector3<f64>) -> Vector {
        Vector::from_column_slice(x.as_slice())
    }

    #[test]
    fn connection_examples() {
        let b = FrameBundle::new();
        let p = e3();
        assert_eq!(b.connection_form(&p, &So3Vector(p.n)).unwrap().coeffs()[0], 1.0);
        assert_eq!(b.connection_form(&p, &So3Vector::new(0.3, -2.0, 0.0)).unwrap().coeffs()[0], 0.0);
    }

    #[test]
    fn connection_matches_vertical_projection() {
        let b = FrameBundle::new();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let p = b.random_point(&mut rng);
            let x = So3Vector(random_rotation(&mut rng) * Vector3::new(0.3, -1.1, 0.8));
            // id − pr_H, with pr_H = lift ∘ Tπ
            let v = TangentVec::new(p.base(), b.push_forward(&p, &x).unwrap());
            let h = b.horizontal_lift(&p, &v).unwrap();
            let vert = x - h;
            let omega = b.connection_form(&p, &x).unwrap().coeffs()[0];
            assert_abs_diff_eq!((vert.0 - p.n * omega).amax(), 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn curvature_example_and_antisymmetry() {
        let b = FrameBundle::new();
        let p = e3();
        let v = TangentVec::new(p.base(), dv(Vector3::x()));
        let w = TangentVec::new(p.base(), dv(Vector3::y()));
        assert_eq!(b.curvature(&p, &v, &w).unwrap().coeffs()[0], -1.0);
        assert_eq!(b.curvature(&p, &w, &v).unwrap().coeffs()[0], 1.0);
        assert_eq!(b.curvature(&p, &v, &v).unwrap().coeffs()[0], 0.0);
    }

    #[test]
    fn curvature_dual_closed_form_matches_basis_assembly() {
        let b = FrameBundle::new();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let p = b.random_point(&mut rng);
            let q = p.base();
            let u = TangentVec::new(q.clone(), crate::base::BaseModel::random_tangent_at(&SphereBase, &q, &mut rng));
            let a = b.algebra().dual_from_slice(&[1.7]).unwrap();
            let closed = b.curvature_dual(&p, &u, &a).unwrap();
            let generic = curvature_dual_by_basis(&b, &p, &u.v, &a);
            assert_abs_diff_eq!((closed.covector - generic.covector).amax(), 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn horizontal_lift_example() {
        let b = FrameBundle::new();
        let p = e3();
        let v = TangentVec::new(p.base(), dv(Vector3::x()));
        assert_eq!(b.horizontal_lift(&p, &v).unwrap().0, Vector3::y());
        let z = TangentVec::new(p.base(), Vector::zeros(3));
        assert_eq!(b.horizontal_lift(&p, &z).unwrap().0, Vector3::zeros());
    }

    #[test]
    fn trivialisation_formula() {
        let b = FrameBundle::new();
        let p = b.random_point(&mut ChaCha8Rng::seed_from_u64(11));
        let x = So3Vector::new(0.4, -0.9, 1.3);
        let t = b.trivialize_tp(&p, &x).unwrap();
        assert_abs_diff_eq!((&t.tangent.v - dv(x.0.cross(&p.n))).amax(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(t.vertical.coeffs()[0], p.n.dot(&x.0), epsilon = 1e-15);
        let back = b.untrivialize_tp(&t).unwrap();
        assert!(b.raw_distance(&back, &x) < 1e-12);
    }

    #[test]
    fn vertical_and_horizontal_trivialise_cleanly() {
        let b = FrameBundle::new();
        let p = b.random_point(&mut ChaCha8Rng::seed_from_u64(12));
        let x = b.algebra().element_from_slice(&[0.8]).unwrap();
        let s = b.fundamental(&p, &x).unwrap();
        let t = b.trivialize_tp(&p, &s).unwrap();
        assert!(t.tangent.v.amax() < 1e-15);
        assert!(t.vertical.max_abs_diff(&x) < 1e-15);
    }

    #[test]
    fn right_action_matches_fundamental_flow() {
        let b = FrameBundle::new();
        let p = b.random_point(&mut ChaCha8Rng::seed_from_u64(13));
        let x = b.algebra().element_from_slice(&[0.6]).unwrap();
        let via_flow = b.vertical_flow(&p, &x, 1.0).unwrap();
        let via_action = b.right_act(&p, &GroupElement::So2(0.6)).unwrap();
        assert!(b.point_distance(&via_flow, &via_action) < 1e-14);
        let g = b.gauge_between(&p, &via_action).unwrap();
        assert!(g.max_abs_diff(&GroupElement::So2(0.6)) < 1e-14);
    }

    #[test]
    fn connection_is_invariant_under_so2() {
        let b = FrameBundle::new();
        let p = b.random_point(&mut ChaCha8Rng::seed_from_u64(14));
        let x = So3Vector::new(0.1, 0.2, -0.5);
        let q = b.right_act(&p, &GroupElement::So2(1.1)).unwrap();
        let d = b.connection_form(&p, &x).unwrap().max_abs_diff(&b.connection_form(&q, &x).unwrap());
        assert!(d < 1e-15);
    }

    #[test]
    fn structure_equation_by_finite_differences() {
        // Right-invariant fields R ↦ hat(x)R bracket to R ↦ hat(y × x)R.
        let b = FrameBundle::new();
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let h = 1e-5;
        for _ in 0..20 {
            let p = b.random_point(&mut rng);
            let x = So3Vector(random_rotation(&mut rng) * Vector3::new(0.7, 0.0, 0.4));
            let y = So3Vector(random_rotation(&mut rng) * Vector3::new(-0.2, 1.0, 0.3));
            let omega = |q: &FramePoint, z: &So3Vector| b.connection_form(q, z).unwrap().coeffs()[0];
            let deriv = |along: &So3Vector, of: &So3Vector| {
                (omega(&b.flow(&p, along, h), of) - omega(&b.flow(&p, along, -h), of)) / (2.0 * h)
            };
            let bracket = So3Vector(y.0.cross(&x.0));
            let d_omega = deriv(&x, &y) - deriv(&y, &x) - omega(&p, &bracket);
            let u = b.push_forward(&p, &x).unwrap();
            let w = b.push_forward(&p, &y).unwrap();
            let curv = b.curvature_unchecked(&p, &u, &w).coeffs()[0];
            assert!((d_omega - curv).abs() < 1e-6, "{d_omega} vs {curv}");
        }
    }

    #[test]
    fn rejects_bad_frames() {
        assert!(FramePoint::new(Vector3::z(), Vector3::y(), Vector3::x()).is_err());
        assert!(FramePoint::new(Vector3::z() * 1.01, Vector3::x(), Vector3::y()).is_err());
    }
}
