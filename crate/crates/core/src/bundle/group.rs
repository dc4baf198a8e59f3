use std::sync::Arc;

use rand::RngCore;

use super::PrincipalBundle;
use crate::base::{PointBase, TangentVec};
use crate::error::{Error, Result};
use crate::lie::{exp, random_group_element, AlgebraKind, GroupElement, LieAlgebra, LieAlgebraElement};
use crate::Vector;

/// The group itself as a bundle over a point. Tangent vectors are
/// left-trivialised, `V = pX`, so `ω(V) = X` and the curvature vanishes.
#[derive(Debug, Clone)]
pub struct GroupBundle {
    base: PointBase,
    algebra: Arc<LieAlgebra>,
}

impl GroupBundle {
    pub fn new(algebra: Arc<LieAlgebra>) -> Result<Self> {
        if algebra.kind() == AlgebraKind::Abstract {
            return Err(Error::Unsupported("group bundle needs a matrix group"));
        }
        Ok(GroupBundle {
            base: PointBase,
            algebra,
        })
    }

    pub fn so3() -> Self {
        GroupBundle {
            base: PointBase,
            algebra: LieAlgebra::so3(),
        }
    }

    pub fn so2() -> Self {
        GroupBundle {
            base: PointBase,
            algebra: LieAlgebra::so2(),
        }
    }
}

impl PrincipalBundle for GroupBundle {
    type Base = PointBase;
    type Point = GroupElement;
    type RawTangent = LieAlgebraElement;

    fn name(&self) -> &'static str {
        match self.algebra.kind() {
            AlgebraKind::So3 => "group-so3",
            _ => "group-so2",
        }
    }

    fn base(&self) -> &PointBase {
        &self.base
    }

    fn algebra(&self) -> &Arc<LieAlgebra> {
        &self.algebra
    }

    fn project(&self, _p: &GroupElement) -> Vector {
        Vector::zeros(0)
    }

    fn check_bundle_point(&self, p: &GroupElement) -> Result<()> {
        if p.kind() != self.algebra.kind() {
            return Err(Error::AlgebraMismatch("group element of the wrong group".into()));
        }
        p.validate()
    }

    fn connection_form(&self, _p: &GroupElement, raw: &LieAlgebraElement) -> Result<LieAlgebraElement> {
        raw.ensure_same_algebra(&self.algebra)?;
        Ok(raw.clone())
    }

    fn push_forward(&self, _p: &GroupElement, _raw: &LieAlgebraElement) -> Result<Vector> {
        Ok(Vector::zeros(0))
    }

    fn horizontal_lift(&self, p: &GroupElement, v: &TangentVec) -> Result<LieAlgebraElement> {
        self.check_over(p, v)?;
        Ok(self.algebra.zero())
    }

    fn fundamental(&self, _p: &GroupElement, x: &LieAlgebraElement) -> Result<LieAlgebraElement> {
        x.ensure_same_algebra(&self.algebra)?;
        Ok(x.clone())
    }

    fn raw_add(&self, a: &LieAlgebraElement, b: &LieAlgebraElement) -> LieAlgebraElement {
        a + b
    }

    fn raw_distance(&self, a: &LieAlgebraElement, b: &LieAlgebraElement) -> f64 {
        a.max_abs_diff(b)
    }

    fn curvature_unchecked(&self, _p: &GroupElement, _u: &Vector, _w: &Vector) -> LieAlgebraElement {
        self.algebra.zero()
    }

    fn flow(&self, p: &GroupElement, raw: &LieAlgebraElement, t: f64) -> GroupElement {
        let step = exp(&(raw * t)).expect("matrix group exponential");
        p.compose(&step).expect("same group")
    }

    fn point_distance(&self, a: &GroupElement, b: &GroupElement) -> f64 {
        a.max_abs_diff(b)
    }

    fn random_point(&self, rng: &mut dyn RngCore) -> GroupElement {
        random_group_element(self.algebra.kind(), rng).expect("matrix group")
    }

    fn right_act(&self, p: &GroupElement, g: &GroupElement) -> Result<GroupElement> {
        g.validate()?;
        p.compose(g)
    }

    fn gauge_between(&self, p: &GroupElement, q: &GroupElement) -> Result<GroupElement> {
        p.inverse().compose(q)
    }

    fn reference_point(&self, _p: &GroupElement) -> Result<GroupElement> {
        GroupElement::identity(self.algebra.kind())
    }

    fn random_group_element(&self, rng: &mut dyn RngCore) -> Option<GroupElement> {
        random_group_element(self.algebra.kind(), rng)
    }
}
