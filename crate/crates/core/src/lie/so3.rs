//! so(3) ≅ (ℝ³, ×) through the hat map, and the Rodrigues exponential.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{Matrix3, Vector3};

/// Below this angle exp switches to a truncated series.
pub const SMALL_ANGLE: f64 = 1e-6;

/// A 3-vector standing for the skew matrix `hat(x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct So3Vector(pub Vector3<f64>);

impl So3Vector {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        So3Vector(Vector3::new(x, y, z))
    }

    pub fn zero() -> Self {
        So3Vector(Vector3::zeros())
    }

    pub fn hat(&self) -> Matrix3<f64> {
        hat(&self.0)
    }

    pub fn from_matrix(m: &Matrix3<f64>) -> Self {
        So3Vector(vee(m))
    }

    pub fn vector(&self) -> &Vector3<f64> {
        &self.0
    }

    /// Rodrigues rotation `exp(hat(x))`.
    pub fn exp(&self) -> Matrix3<f64> {
        exp(&self.0)
    }
}

impl Add for So3Vector {
    type Output = So3Vector;
    fn add(self, o: So3Vector) -> So3Vector {
        So3Vector(self.0 + o.0)
    }
}

impl Sub for So3Vector {
    type Output = So3Vector;
    fn sub(self, o: So3Vector) -> So3Vector {
        So3Vector(self.0 - o.0)
    }
}

impl Neg for So3Vector {
    type Output = So3Vector;
    fn neg(self) -> So3Vector {
        So3Vector(-self.0)
    }
}

impl Mul<f64> for So3Vector {
    type Output = So3Vector;
    fn mul(self, s: f64) -> So3Vector {
        So3Vector(self.0 * s)
    }
}

pub fn hat(x: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -x.z, x.y, x.z, 0.0, -x.x, -x.y, x.x, 0.0)
}

/// Reads the axial vector of the skew part; exact inverse of [`hat`].
pub fn vee(m: &Matrix3<f64>) -> Vector3<f64> {
    Vector3::new(m[(2, 1)], m[(0, 2)], m[(1, 0)])
}

pub fn exp(x: &Vector3<f64>) -> Matrix3<f64> {
    let theta2 = x.norm_squared();
    let theta = theta2.sqrt();
    let (a, b) = if theta < SMALL_ANGLE {
        (
            1.0 - theta2 / 6.0 + theta2 * theta2 / 120.0,
            0.5 - theta2 / 24.0 + theta2 * theta2 / 720.0,
        )
    } else {
        (theta.sin() / theta, (1.0 - theta.cos()) / theta2)
    };
    let k = hat(x);
    Matrix3::identity() + k * a + k * k * b
}

/// Re-orthonormalizes a near-rotation with modified Gram–Schmidt on its columns.
pub fn orthonormalize(m: &Matrix3<f64>) -> Matrix3<f64> {
    let c0 = m.column(0).normalize();
    let mut c1 = m.column(1) - c0 * c0.dot(&m.column(1));
    c1 /= c1.norm();
    let c2 = c0.cross(&c1);
    Matrix3::from_columns(&[c0, c1, c2])
}
