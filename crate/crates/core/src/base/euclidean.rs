use super::{BaseModel, SecondFrame};
use crate::Vector;

/// `M = ℝᵐ` in its standard coordinates.
#[derive(Debug, Clone, Copy)]
pub struct EuclideanBase {
    dim: usize,
}

impl EuclideanBase {
    pub fn new(dim: usize) -> Self {
        EuclideanBase { dim }
    }
}

impl BaseModel for EuclideanBase {
    fn name(&self) -> &'static str {
        "euclidean"
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn ambient_dim(&self) -> usize {
        self.dim
    }

    fn point_residual(&self, _q: &Vector) -> f64 {
        0.0
    }

    fn project_point(&self, raw: &Vector) -> Vector {
        raw.clone()
    }

    fn tangent_residual(&self, _q: &Vector, _v: &Vector) -> f64 {
        0.0
    }

    fn project_tangent(&self, _q: &Vector, raw: &Vector) -> Vector {
        raw.clone()
    }

    fn second_residual(&self, _q: &Vector, _a: &Vector, _b: &Vector, _c: &Vector) -> f64 {
        0.0
    }

    fn complete_second(&self, _q: &Vector, _a: &Vector, _b: &Vector, raw: &Vector) -> Vector {
        raw.clone()
    }

    fn canonical_pair(&self, _q: &Vector, _w: &Vector, a: &Vector, b: &Vector) -> (Vector, Vector) {
        (a.clone(), b.clone())
    }

    fn second_frame(&self, _q: &Vector, _w: &Vector) -> SecondFrame {
        let m = self.dim;
        let e = |i: usize| Vector::from_fn(m, |k, _| if k == i { 1.0 } else { 0.0 });
        let z = || Vector::zeros(m);
        let mut directions = Vec::with_capacity(2 * m);
        for i in 0..m {
            directions.push((e(i), z()));
        }
        for i in 0..m {
            directions.push((z(), e(i)));
        }
        SecondFrame {
            duals: directions.clone(),
            directions,
        }
    }
}
