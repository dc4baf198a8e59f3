use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use rand::RngCore;
use rand_distr::{Distribution, StandardNormal};

use super::PrincipalBundle;
use crate::base::{EuclideanBase, TangentVec};
use crate::error::{Error, Result};
use crate::lie::{adjoint, exp, random_group_element, AlgebraKind, GroupElement, LieAlgebra, LieAlgebraElement};
use crate::Vector;

/// Matrix of the gauge potential at `q`, of shape `dim 𝔤 × m`.
pub type Potential = Arc<dyn Fn(&Vector) -> DMatrix<f64> + Send + Sync>;
/// Directional derivative `D_u A` of the potential at `q`.
pub type PotentialDerivative = Arc<dyn Fn(&Vector, &Vector) -> DMatrix<f64> + Send + Sync>;

/// `(q, g) ∈ ℝᵐ × G`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalPoint {
    pub q: Vector,
    pub g: GroupElement,
}

/// `(q̇, X)` with `ġ = gX`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalTangent {
    pub dq: Vector,
    pub x: LieAlgebraElement,
}

/// The trivial bundle `ℝᵐ × G` with connection
/// `ω(q̇, X) = X + Ad_{g⁻¹}(A(q) q̇)`.
#[derive(Clone)]
pub struct EuclideanBundle {
    base: EuclideanBase,
    algebra: Arc<LieAlgebra>,
    potential: Potential,
    derivative: PotentialDerivative,
}

impl fmt::Debug for EuclideanBundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EuclideanBundle")
            .field("base", &self.base)
            .field("algebra", &self.algebra.kind())
            .finish_non_exhaustive()
    }
}

impl EuclideanBundle {
    pub fn new(dim: usize, algebra: Arc<LieAlgebra>, potential: Potential, derivative: PotentialDerivative) -> Result<Self> {
        if algebra.kind() == AlgebraKind::Abstract {
            return Err(Error::Unsupported("euclidean bundle needs a matrix group"));
        }
        let a = potential(&Vector::zeros(dim));
        if a.shape() != (algebra.dim(), dim) {
            return Err(Error::Dimension {
                what: "gauge potential columns",
                expected: dim,
                got: a.ncols(),
            });
        }
        Ok(EuclideanBundle {
            base: EuclideanBase::new(dim),
            algebra,
            potential,
            derivative,
        })
    }

    /// The product connection, `A = 0`.
    pub fn flat(dim: usize, algebra: Arc<LieAlgebra>) -> Result<Self> {
        let k = algebra.dim();
        Self::new(
            dim,
            algebra,
            Arc::new(move |_| DMatrix::zeros(k, dim)),
            Arc::new(move |_, _| DMatrix::zeros(k, dim)),
        )
    }

    /// `A(q) = A₀ + Σᵢ qᵢ Aᵢ`.
    pub fn affine(dim: usize, algebra: Arc<LieAlgebra>, a0: DMatrix<f64>, slopes: Vec<DMatrix<f64>>) -> Result<Self> {
        if slopes.len() != dim {
            return Err(Error::Dimension {
                what: "potential slopes",
                expected: dim,
                got: slopes.len(),
            });
        }
        let slopes = Arc::new(slopes);
        let s2 = slopes.clone();
        Self::new(
            dim,
            algebra,
            Arc::new(move |q: &Vector| {
                let mut a = a0.clone();
                for (i, s) in slopes.iter().enumerate() {
                    a += s * q[i];
                }
                a
            }),
            Arc::new(move |_q: &Vector, u: &Vector| {
                let mut d = DMatrix::zeros(s2[0].nrows(), s2[0].ncols());
                for (i, s) in s2.iter().enumerate() {
                    d += s * u[i];
                }
                d
            }),
        )
    }

    fn potential_at(&self, p: &LocalPoint, v: &Vector) -> LieAlgebraElement {
        let a = self.algebra.zero().with_coeffs((self.potential)(&p.q) * v);
        adjoint(&p.g.inverse(), &a).expect("checked group")
    }

    /// `F(u, w) = D_u A·w − D_w A·u + [A u, A w]` at `q`.
    pub fn field_strength(&self, q: &Vector, u: &Vector, w: &Vector) -> LieAlgebraElement {
        let a = (self.potential)(q);
        let au = self.algebra.zero().with_coeffs(&a * u);
        let aw = self.algebra.zero().with_coeffs(&a * w);
        let d = (self.derivative)(q, u) * w - (self.derivative)(q, w) * u;
        self.algebra.zero().with_coeffs(d) + au.bracket(&aw).expect("same algebra")
    }
}

impl PrincipalBundle for EuclideanBundle {
    type Base = EuclideanBase;
    type Point = LocalPoint;
    type RawTangent = LocalTangent;

    fn name(&self) -> &'static str {
        "euclidean-local"
    }

    fn base(&self) -> &EuclideanBase {
        &self.base
    }

    fn algebra(&self) -> &Arc<LieAlgebra> {
        &self.algebra
    }

    fn project(&self, p: &LocalPoint) -> Vector {
        p.q.clone()
    }

    fn check_bundle_point(&self, p: &LocalPoint) -> Result<()> {
        crate::base::BaseModel::check_point(&self.base, &p.q)?;
        if p.g.kind() != self.algebra.kind() {
            return Err(Error::AlgebraMismatch("group element of the wrong group".into()));
        }
        p.g.validate()
    }

    fn connection_form(&self, p: &LocalPoint, raw: &LocalTangent) -> Result<LieAlgebraElement> {
        raw.x.ensure_same_algebra(&self.algebra)?;
        Ok(&raw.x + &self.potential_at(p, &raw.dq))
    }

    fn push_forward(&self, _p: &LocalPoint, raw: &LocalTangent) -> Result<Vector> {
        Ok(raw.dq.clone())
    }

    fn horizontal_lift(&self, p: &LocalPoint, v: &TangentVec) -> Result<LocalTangent> {
        self.check_over(p, v)?;
        Ok(LocalTangent {
            dq: v.v.clone(),
            x: -self.potential_at(p, &v.v),
        })
    }

    fn fundamental(&self, p: &LocalPoint, x: &LieAlgebraElement) -> Result<LocalTangent> {
        x.ensure_same_algebra(&self.algebra)?;
        Ok(LocalTangent {
            dq: Vector::zeros(p.q.len()),
            x: x.clone(),
        })
    }

    fn raw_add(&self, a: &LocalTangent, b: &LocalTangent) -> LocalTangent {
        LocalTangent {
            dq: &a.dq + &b.dq,
            x: &a.x + &b.x,
        }
    }

    fn raw_distance(&self, a: &LocalTangent, b: &LocalTangent) -> f64 {
        let dq = if a.dq.is_empty() { 0.0 } else { (&a.dq - &b.dq).amax() };
        dq.max(a.x.max_abs_diff(&b.x))
    }

    fn curvature_unchecked(&self, p: &LocalPoint, u: &Vector, w: &Vector) -> LieAlgebraElement {
        adjoint(&p.g.inverse(), &self.field_strength(&p.q, u, w)).expect("checked group")
    }

    fn flow(&self, p: &LocalPoint, raw: &LocalTangent, t: f64) -> LocalPoint {
        let step = exp(&(&raw.x * t)).expect("matrix group exponential");
        LocalPoint {
            q: &p.q + &raw.dq * t,
            g: p.g.compose(&step).expect("same group"),
        }
    }

    fn point_distance(&self, a: &LocalPoint, b: &LocalPoint) -> f64 {
        let dq = if a.q.is_empty() { 0.0 } else { (&a.q - &b.q).amax() };
        dq.max(a.g.max_abs_diff(&b.g))
    }

    fn random_point(&self, rng: &mut dyn RngCore) -> LocalPoint {
        let m = crate::base::BaseModel::ambient_dim(&self.base);
        LocalPoint {
            q: Vector::from_fn(m, |_, _| StandardNormal.sample(rng)),
            g: random_group_element(self.algebra.kind(), rng).expect("matrix group"),
        }
    }

    fn right_act(&self, p: &LocalPoint, g: &GroupElement) -> Result<LocalPoint> {
        g.validate()?;
        Ok(LocalPoint {
            q: p.q.clone(),
            g: p.g.compose(g)?,
        })
    }

    fn gauge_between(&self, p: &LocalPoint, q: &LocalPoint) -> Result<GroupElement> {
        crate::base::ensure_close("fibre of gauge transport", &p.q, &q.q)?;
        p.g.inverse().compose(&q.g)
    }

    fn reference_point(&self, p: &LocalPoint) -> Result<LocalPoint> {
        Ok(LocalPoint {
            q: p.q.clone(),
            g: GroupElement::identity(self.algebra.kind())?,
        })
    }

    fn random_group_element(&self, rng: &mut dyn RngCore) -> Option<GroupElement> {
        random_group_element(self.algebra.kind(), rng)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::curvature_dual_by_basis;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn twisted() -> EuclideanBundle {
        let alg = LieAlgebra::so3();
        let a0 = DMatrix::from_row_slice(3, 2, &[0.3, -0.1, 0.0, 0.5, 0.2, 0.0]);
        let s1 = DMatrix::from_row_slice(3, 2, &[0.0, 1.0, 0.4, 0.0, -0.2, 0.3]);
        let s2 = DMatrix::from_row_slice(3, 2, &[-0.5, 0.0, 0.1, 0.2, 0.0, 0.7]);
        EuclideanBundle::affine(2, alg, a0, vec![s1, s2]).unwrap()
    }

    fn random_raw(b: &EuclideanBundle, rng: &mut ChaCha8Rng) -> LocalTangent {
        LocalTangent {
            dq: Vector::from_fn(2, |_, _| StandardNormal.sample(rng)),
            x: b.algebra().zero().with_coeffs(Vector::from_fn(3, |_, _| StandardNormal.sample(rng))),
        }
    }

    #[test]
    fn lift_is_horizontal_and_projects_back() {
        let b = twisted();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let p = b.random_point(&mut rng);
        let v = TangentVec::new(p.q.clone(), Vector::from_vec(vec![0.4, -1.2]));
        let h = b.horizontal_lift(&p, &v).unwrap();
        assert!(b.connection_form(&p, &h).unwrap().norm() < 1e-15);
        assert_eq!(b.push_forward(&p, &h).unwrap(), v.v);
        let raw = random_raw(&b, &mut rng);
        let back = b.untrivialize_tp(&b.trivialize_tp(&p, &raw).unwrap()).unwrap();
        assert!(b.raw_distance(&back, &raw) < 1e-14);
    }

    #[test]
    fn connection_is_equivariant() {
        let b = twisted();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let p = b.random_point(&mut rng);
        let raw = random_raw(&b, &mut rng);
        let g = b.random_group_element(&mut rng).unwrap();
        let pg = b.right_act(&p, &g).unwrap();
        // (R_g)_* (q̇, X) = (q̇, Ad_{g⁻¹} X)
        let moved = LocalTangent {
            dq: raw.dq.clone(),
            x: adjoint(&g.inverse(), &raw.x).unwrap(),
        };
        let lhs = b.connection_form(&pg, &moved).unwrap();
        let rhs = adjoint(&g.inverse(), &b.connection_form(&p, &raw).unwrap()).unwrap();
        assert!(lhs.max_abs_diff(&rhs) < 1e-14);
    }

    #[test]
    fn structure_equation_by_finite_differences() {
        // Fields with constant (q̇, X) in the left trivialisation bracket to
        // (0, [X, Y]).
        let b = twisted();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let h = 1e-5;
        for _ in 0..20 {
            let p = b.random_point(&mut rng);
            let u = random_raw(&b, &mut rng);
            let w = random_raw(&b, &mut rng);
            let deriv = |along: &LocalTangent, of: &LocalTangent| {
                let f = b.connection_form(&b.flow(&p, along, h), of).unwrap();
                let g = b.connection_form(&b.flow(&p, along, -h), of).unwrap();
                (f - g) * (0.5 / h)
            };
            let br = LocalTangent {
                dq: Vector::zeros(2),
                x: u.x.bracket(&w.x).unwrap(),
            };
            let d_omega = deriv(&u, &w) - deriv(&w, &u) - b.connection_form(&p, &br).unwrap();
            let ou = b.connection_form(&p, &u).unwrap();
            let ow = b.connection_form(&p, &w).unwrap();
            let expected = d_omega + ou.bracket(&ow).unwrap();
            let curv = b.curvature_unchecked(&p, &u.dq, &w.dq);
            assert!(curv.max_abs_diff(&expected) < 1e-6, "{curv} vs {expected}");
        }
    }

    #[test]
    fn curvature_dual_pairs_with_curvature() {
        let b = twisted();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let p = b.random_point(&mut rng);
        let u = TangentVec::new(p.q.clone(), Vector::from_vec(vec![0.3, 0.9]));
        let w = Vector::from_vec(vec![-1.1, 0.2]);
        let a = b.algebra().dual_from_slice(&[0.5, -0.7, 1.3]).unwrap();
        let c = curvature_dual_by_basis(&b, &p, &u.v, &a);
        let direct = a.pair(&b.curvature_unchecked(&p, &u.v, &w)).unwrap();
        assert!((c.covector.dot(&w) - direct).abs() < 1e-14);
    }

    #[test]
    fn flat_bundle_has_no_curvature() {
        let b = EuclideanBundle::flat(3, LieAlgebra::so2()).unwrap();
        let p = b.random_point(&mut ChaCha8Rng::seed_from_u64(9));
        let u = Vector::from_vec(vec![1.0, 0.0, 0.0]);
        let w = Vector::from_vec(vec![0.0, 1.0, 0.0]);
        assert_eq!(b.curvature_unchecked(&p, &u, &w).coeffs()[0], 0.0);
    }
}
