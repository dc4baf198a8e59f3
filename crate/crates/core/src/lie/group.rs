use std::sync::Arc;

use nalgebra::{DMatrix, Matrix3, Quaternion, UnitQuaternion, Vector3};
use rand::{Rng, RngCore};
use rand_distr::StandardNormal;

use super::algebra::{AlgebraKind, DualAlgebraElement, LieAlgebra, LieAlgebraElement};
use super::so3;
use crate::error::{Error, Result};

/// Orthogonality tolerance for group matrices.
pub const ORTHO_TOL: f64 = 1e-10;

/// An element of SO(3) or SO(2).
#[derive(Debug, Clone, PartialEq)]
pub enum GroupElement {
    So3(Matrix3<f64>),
    /// Rotation angle.
    So2(f64),
}

impl GroupElement {
    pub fn identity(kind: AlgebraKind) -> Result<Self> {
        match kind {
            AlgebraKind::So3 => Ok(GroupElement::So3(Matrix3::identity())),
            AlgebraKind::So2 => Ok(GroupElement::So2(0.0)),
            AlgebraKind::Abstract => Err(Error::Unsupported("group of an abstract algebra")),
        }
    }

    /// Checked constructor: `‖gᵀg − I‖ ≤ 1e-10` and `det g > 0`.
    pub fn so3(m: Matrix3<f64>) -> Result<Self> {
        let g = GroupElement::So3(m);
        g.validate()?;
        Ok(g)
    }

    pub fn so2(angle: f64) -> Result<Self> {
        if !angle.is_finite() {
            return Err(Error::NonFinite("so(2) angle"));
        }
        Ok(GroupElement::So2(angle))
    }

    pub fn kind(&self) -> AlgebraKind {
        match self {
            GroupElement::So3(_) => AlgebraKind::So3,
            GroupElement::So2(_) => AlgebraKind::So2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            GroupElement::So3(m) => {
                let r = (m.transpose() * m - Matrix3::identity()).amax();
                if !r.is_finite() || r > ORTHO_TOL {
                    return Err(Error::NotOrthogonal(r));
                }
                let d = m.determinant();
                if (d - 1.0).abs() > ORTHO_TOL.sqrt() {
                    return Err(Error::NotOrthogonal((d - 1.0).abs()));
                }
                Ok(())
            }
            GroupElement::So2(a) if a.is_finite() => Ok(()),
            GroupElement::So2(_) => Err(Error::NonFinite("so(2) angle")),
        }
    }

    /// The defining matrix representative (3×3 or 2×2).
    pub fn matrix(&self) -> DMatrix<f64> {
        match self {
            GroupElement::So3(m) => DMatrix::from_iterator(3, 3, m.iter().copied()),
            GroupElement::So2(a) => {
                let (s, c) = a.sin_cos();
                DMatrix::from_row_slice(2, 2, &[c, -s, s, c])
            }
        }
    }

    pub fn compose(&self, other: &Self) -> Result<Self> {
        match (self, other) {
            (GroupElement::So3(a), GroupElement::So3(b)) => Ok(GroupElement::So3(a * b)),
            (GroupElement::So2(a), GroupElement::So2(b)) => Ok(GroupElement::So2(a + b)),
            _ => Err(Error::AlgebraMismatch("compose across groups".into())),
        }
    }

    pub fn inverse(&self) -> Self {
        match self {
            GroupElement::So3(a) => GroupElement::So3(a.transpose()),
            GroupElement::So2(a) => GroupElement::So2(-a),
        }
    }

    /// Matrix of `Ad_g` on coefficient vectors.
    pub fn adjoint_matrix(&self) -> DMatrix<f64> {
        match self {
            GroupElement::So3(m) => DMatrix::from_iterator(3, 3, m.iter().copied()),
            GroupElement::So2(_) => DMatrix::identity(1, 1),
        }
    }

    fn check_algebra(&self, alg: &Arc<LieAlgebra>) -> Result<()> {
        if alg.kind() != self.kind() {
            return Err(Error::AlgebraMismatch(format!(
                "group {:?} acting on algebra {:?}",
                self.kind(),
                alg.kind()
            )));
        }
        self.validate()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        match (self, other) {
            (GroupElement::So3(a), GroupElement::So3(b)) => (a - b).amax(),
            (GroupElement::So2(a), GroupElement::So2(b)) => {
                let d = (a - b).rem_euclid(std::f64::consts::TAU);
                d.min(std::f64::consts::TAU - d)
            }
            _ => f64::INFINITY,
        }
    }
}

/// `Ad_g X`. For SO(3) this is `g x`, i.e. `g hat(x) gᵀ = hat(g x)`.
pub fn adjoint(g: &GroupElement, x: &LieAlgebraElement) -> Result<LieAlgebraElement> {
    g.check_algebra(x.algebra())?;
    Ok(x.with_coeffs(g.adjoint_matrix() * x.coeffs()))
}

/// `Ad*_g A`, the dual of `Ad_g`: `⟨Ad*_g A, X⟩ = ⟨A, Ad_g X⟩`.
pub fn coadjoint(g: &GroupElement, a: &DualAlgebraElement) -> Result<DualAlgebraElement> {
    g.check_algebra(a.algebra())?;
    Ok(a.with_coeffs(g.adjoint_matrix().transpose() * a.coeffs()))
}

/// Group exponential; Rodrigues for so(3).
pub fn exp(x: &LieAlgebraElement) -> Result<GroupElement> {
    if !x.is_finite() {
        return Err(Error::NonFinite("exp argument"));
    }
    match x.algebra().kind() {
        AlgebraKind::So3 => {
            let c = x.coeffs();
            Ok(GroupElement::So3(so3::exp(&Vector3::new(c[0], c[1], c[2]))))
        }
        AlgebraKind::So2 => Ok(GroupElement::So2(x.coeffs()[0])),
        AlgebraKind::Abstract => Err(Error::Unsupported("exp on an abstract algebra")),
    }
}

/// Haar-distributed rotation from a normalized Gaussian quaternion.
pub fn random_rotation(rng: &mut dyn RngCore) -> Matrix3<f64> {
    loop {
        let q = Quaternion::new(
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        );
        if q.norm() > 1e-6 {
            return UnitQuaternion::from_quaternion(q).to_rotation_matrix().into_inner();
        }
    }
}

pub fn random_group_element(kind: AlgebraKind, rng: &mut dyn RngCore) -> Option<GroupElement> {
    match kind {
        AlgebraKind::So3 => Some(GroupElement::So3(random_rotation(rng))),
        AlgebraKind::So2 => Some(GroupElement::So2(rng.random_range(-std::f64::consts::PI..std::f64::consts::PI))),
        AlgebraKind::Abstract => None,
    }
}
