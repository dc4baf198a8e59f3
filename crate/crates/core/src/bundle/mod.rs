//! Principal bundles with connection, seen through the trivialisations
//! `TP ≅ P ×_M TM × 𝔤` and `T*P ≅ P ×_M T*M × 𝔤*` induced by the connection.

mod euclidean;
mod group;
mod sphere;

use std::fmt::Debug;
use std::sync::Arc;

use rand::RngCore;

use crate::base::{ensure_close, BaseModel, CoreCovector, CotangentVec, TangentVec};
use crate::error::{Error, Result};
use crate::lie::{DualAlgebraElement, GroupElement, LieAlgebra, LieAlgebraElement};
use crate::Vector;

pub use euclidean::{EuclideanBundle, LocalPoint, LocalTangent};
pub use group::GroupBundle;
pub use sphere::{FrameBundle, FramePoint};

/// `(p, v, X) ∈ P ×_M TM × 𝔤`.
#[derive(Debug, Clone)]
pub struct TrivTangent<P> {
    pub point: P,
    pub tangent: TangentVec,
    pub vertical: LieAlgebraElement,
}

/// `(p, φ, A) ∈ P ×_M T*M × 𝔤*`.
#[derive(Debug, Clone)]
pub struct TrivCotangent<P> {
    pub point: P,
    pub covector: CotangentVec,
    pub momentum: DualAlgebraElement,
}

/// A principal G-bundle `π: P → M` with a connection.
///
/// Curvature follows the sign of the sphere example: on the frame bundle of
/// S², `Ω_p(v, w) = ⟨n, w × v⟩`.
pub trait PrincipalBundle: Debug + Send + Sync {
    type Base: BaseModel;
    type Point: Clone + Debug + Send + Sync;
    /// A tangent vector of P at a given point, in the model's own coordinates.
    type RawTangent: Clone + Debug;

    fn name(&self) -> &'static str;

    fn base(&self) -> &Self::Base;

    fn algebra(&self) -> &Arc<LieAlgebra>;

    /// `π(p)`.
    fn project(&self, p: &Self::Point) -> Vector;

    fn check_bundle_point(&self, p: &Self::Point) -> Result<()>;

    /// `ω_p(V)`.
    fn connection_form(&self, p: &Self::Point, raw: &Self::RawTangent) -> Result<LieAlgebraElement>;

    /// Fibre part of `Tπ(V)`, a tangent vector at `π(p)`.
    fn push_forward(&self, p: &Self::Point, raw: &Self::RawTangent) -> Result<Vector>;

    /// `v^H_p`.
    fn horizontal_lift(&self, p: &Self::Point, v: &TangentVec) -> Result<Self::RawTangent>;

    /// The fundamental vector `σ(X)_p`.
    fn fundamental(&self, p: &Self::Point, x: &LieAlgebraElement) -> Result<Self::RawTangent>;

    fn raw_add(&self, a: &Self::RawTangent, b: &Self::RawTangent) -> Self::RawTangent;

    fn raw_distance(&self, a: &Self::RawTangent, b: &Self::RawTangent) -> f64;

    /// `Ω_p(u, w)` for ambient vectors at `π(p)`, bilinear and unchecked.
    fn curvature_unchecked(&self, p: &Self::Point, u: &Vector, w: &Vector) -> LieAlgebraElement;

    /// A curve through `p` with initial velocity `raw`, evaluated at `t`.
    fn flow(&self, p: &Self::Point, raw: &Self::RawTangent, t: f64) -> Self::Point;

    fn point_distance(&self, a: &Self::Point, b: &Self::Point) -> f64;

    fn random_point(&self, rng: &mut dyn RngCore) -> Self::Point;

    /// `p · g`.
    fn right_act(&self, _p: &Self::Point, _g: &GroupElement) -> Result<Self::Point> {
        Err(Error::Unsupported("group action on this bundle"))
    }

    /// The `g` with `p · g = q` for `p, q` in one fibre.
    fn gauge_between(&self, _p: &Self::Point, _q: &Self::Point) -> Result<GroupElement> {
        Err(Error::Unsupported("gauge transport on this bundle"))
    }

    /// The point of a deterministic section over `π(p)`.
    fn reference_point(&self, _p: &Self::Point) -> Result<Self::Point> {
        Err(Error::Unsupported("canonical section on this bundle"))
    }

    fn random_group_element(&self, _rng: &mut dyn RngCore) -> Option<GroupElement> {
        None
    }

    // ---------------------------------------------------------------------

    fn check_over(&self, p: &Self::Point, v: &TangentVec) -> Result<()> {
        self.check_bundle_point(p)?;
        self.base().check_tangent(v)?;
        ensure_close("π(p) vs base point", &self.project(p), &v.q)
    }

    /// `Ω_p(u, w)` on tangent vectors at `π(p)`.
    fn curvature(&self, p: &Self::Point, u: &TangentVec, w: &TangentVec) -> Result<LieAlgebraElement> {
        self.check_over(p, u)?;
        self.check_over(p, w)?;
        Ok(self.curvature_unchecked(p, &u.v, &w.v))
    }

    /// `Ω*_{(p,u)}(A)`: the core covector `c` at `π(p)` with
    /// `⟨c, w⟩ = ⟨A, Ω_p(u, w)⟩`.
    fn curvature_dual(&self, p: &Self::Point, u: &TangentVec, a: &DualAlgebraElement) -> Result<CoreCovector> {
        self.check_over(p, u)?;
        a.ensure_same_algebra(self.algebra())?;
        Ok(curvature_dual_by_basis(self, p, &u.v, a))
    }

    /// `ı_TP(V) = (p, Tπ V, ω(V))`.
    fn trivialize_tp(&self, p: &Self::Point, raw: &Self::RawTangent) -> Result<TrivTangent<Self::Point>> {
        self.check_bundle_point(p)?;
        let q = self.project(p);
        Ok(TrivTangent {
            point: p.clone(),
            tangent: TangentVec::new(q, self.push_forward(p, raw)?),
            vertical: self.connection_form(p, raw)?,
        })
    }

    /// `ı_TP⁻¹(p, v, X) = v^H_p + σ(X)_p`.
    fn untrivialize_tp(&self, t: &TrivTangent<Self::Point>) -> Result<Self::RawTangent> {
        self.check_over(&t.point, &t.tangent)?;
        let h = self.horizontal_lift(&t.point, &t.tangent)?;
        let s = self.fundamental(&t.point, &t.vertical)?;
        Ok(self.raw_add(&h, &s))
    }

    /// `p exp(tX)`.
    fn vertical_flow(&self, p: &Self::Point, x: &LieAlgebraElement, t: f64) -> Result<Self::Point> {
        let raw = self.fundamental(p, x)?;
        Ok(self.flow(p, &raw, t))
    }
}

/// `Ω*` assembled from curvature values on the ambient basis, then projected
/// onto `T*_qM`. Models may override [`PrincipalBundle::curvature_dual`] with
/// a closed form; this is the reference it must agree with.
pub fn curvature_dual_by_basis<B: PrincipalBundle + ?Sized>(
    bundle: &B,
    p: &B::Point,
    u: &Vector,
    a: &DualAlgebraElement,
) -> CoreCovector {
    let q = bundle.project(p);
    let n = q.len();
    let mut c = Vector::zeros(n);
    for j in 0..n {
        let mut e = Vector::zeros(n);
        e[j] = 1.0;
        c[j] = a.coeffs().dot(bundle.curvature_unchecked(p, u, &e).coeffs());
    }
    let c = bundle.base().project_tangent(&q, &c);
    CoreCovector::new(q, c)
}
