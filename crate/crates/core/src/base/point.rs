use super::{BaseModel, SecondFrame};
use crate::Vector;

/// The one-point manifold. All fibre data is zero-dimensional.
#[derive(Debug, Clone, Copy, Default)]
pub struct PointBase;

impl BaseModel for PointBase {
    fn name(&self) -> &'static str {
        "point"
    }

    fn dim(&self) -> usize {
        0
    }

    fn ambient_dim(&self) -> usize {
        0
    }

    fn point_residual(&self, _q: &Vector) -> f64 {
        0.0
    }

    fn project_point(&self, _raw: &Vector) -> Vector {
        Vector::zeros(0)
    }

    fn tangent_residual(&self, _q: &Vector, _v: &Vector) -> f64 {
        0.0
    }

    fn project_tangent(&self, _q: &Vector, _raw: &Vector) -> Vector {
        Vector::zeros(0)
    }

    fn second_residual(&self, _q: &Vector, _a: &Vector, _b: &Vector, _c: &Vector) -> f64 {
        0.0
    }

    fn complete_second(&self, _q: &Vector, _a: &Vector, _b: &Vector, _raw: &Vector) -> Vector {
        Vector::zeros(0)
    }

    fn canonical_pair(&self, _q: &Vector, _w: &Vector, _a: &Vector, _b: &Vector) -> (Vector, Vector) {
        (Vector::zeros(0), Vector::zeros(0))
    }

    fn second_frame(&self, _q: &Vector, _w: &Vector) -> SecondFrame {
        SecondFrame {
            directions: Vec::new(),
            duals: Vec::new(),
        }
    }
}
