//! Two-chart stereographic atlas of S².
//!
//! In a chart every bundle over S² is a product and the canonical maps take
//! their flat coordinate form, so converting embedded objects into a chart,
//! applying the flat maps and converting back gives an independent oracle for
//! the embedded formulas of [`SphereBase`].

use nalgebra::{Matrix2, Matrix3x2, Vector2, Vector3};
use rand::RngCore;

use super::{
    BaseModel, CotangentCotangent, CotangentTangent, EuclideanBase, SecondTangent, SphereBase,
    TangentCotangent,
};
use crate::error::Result;
use crate::Vector;

/// Stereographic projection from the north (`North`) or south pole.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chart {
    North,
    South,
}

fn v3(v: &Vector) -> Vector3<f64> {
    Vector3::new(v[0], v[1], v[2])
}

fn v2(v: &Vector) -> Vector2<f64> {
    Vector2::new(v[0], v[1])
}

fn d3(v: Vector3<f64>) -> Vector {
    Vector::from_column_slice(v.as_slice())
}

fn d2(v: Vector2<f64>) -> Vector {
    Vector::from_column_slice(v.as_slice())
}

impl Chart {
    pub const BOTH: [Chart; 2] = [Chart::North, Chart::South];

    fn sign(self) -> f64 {
        match self {
            Chart::North => 1.0,
            Chart::South => -1.0,
        }
    }

    /// True when `n` is comfortably inside the chart domain.
    pub fn covers(self, n: &Vector3<f64>) -> bool {
        1.0 - self.sign() * n.z > 0.2
    }

    pub fn to_chart(self, n: &Vector3<f64>) -> Vector2<f64> {
        Vector2::new(n.x, n.y) / (1.0 - self.sign() * n.z)
    }

    pub fn from_chart(self, x: &Vector2<f64>) -> Vector3<f64> {
        let s = 1.0 + x.norm_squared();
        Vector3::new(2.0 * x.x / s, 2.0 * x.y / s, self.sign() * (1.0 - 2.0 / s))
    }

    /// `Dψ(n)[v]` of the chart map `ψ(n) = (n₁, n₂) / (1 − σ n₃)`.
    pub fn chart_derivative(self, n: &Vector3<f64>, v: &Vector3<f64>) -> Vector2<f64> {
        let sg = self.sign();
        let d = 1.0 - sg * n.z;
        Vector2::new(
            v.x / d + n.x * sg * v.z / (d * d),
            v.y / d + n.y * sg * v.z / (d * d),
        )
    }

    /// `D²ψ(n)[v, w]`.
    pub fn chart_second_derivative(self, n: &Vector3<f64>, v: &Vector3<f64>, w: &Vector3<f64>) -> Vector2<f64> {
        let sg = self.sign();
        let d = 1.0 - sg * n.z;
        let f = |ni: f64, vi: f64, wi: f64| {
            sg * (wi * v.z + vi * w.z) / (d * d) + 2.0 * ni * v.z * w.z / (d * d * d)
        };
        Vector2::new(f(n.x, v.x, w.x), f(n.y, v.y, w.y))
    }

    /// Jacobian `J` of the inverse chart, 3×2.
    pub fn jacobian(self, x: &Vector2<f64>) -> Matrix3x2<f64> {
        let s = 1.0 + x.norm_squared();
        let sg = self.sign();
        Matrix3x2::from_fn(|k, i| {
            if k < 2 {
                let dki = if k == i { 1.0 } else { 0.0 };
                2.0 * dki / s - 4.0 * x[k] * x[i] / (s * s)
            } else {
                sg * 4.0 * x[i] / (s * s)
            }
        })
    }

    /// `DJ[d] = Σⱼ dⱼ ∂ⱼJ`.
    pub fn jacobian_derivative(self, x: &Vector2<f64>, d: &Vector2<f64>) -> Matrix3x2<f64> {
        let s = 1.0 + x.norm_squared();
        let s2 = s * s;
        let s3 = s2 * s;
        let xd = x.dot(d);
        let sg = self.sign();
        Matrix3x2::from_fn(|k, i| {
            if k < 2 {
                let dki = if k == i { 1.0 } else { 0.0 };
                -4.0 * dki * xd / s2 - 4.0 * d[k] * x[i] / s2 - 4.0 * x[k] * d[i] / s2
                    + 16.0 * x[k] * x[i] * xd / s3
            } else {
                sg * (4.0 * d[i] / s2 - 16.0 * x[i] * xd / s3)
            }
        })
    }

    /// `E = J G⁻¹`, sending chart covectors to tangent vectors. The chart is
    /// conformal: `JᵀJ = (4 / s²) I`.
    fn raise(self, x: &Vector2<f64>) -> Matrix3x2<f64> {
        let s = 1.0 + x.norm_squared();
        self.jacobian(x) * (s * s / 4.0)
    }

    fn raise_derivative(self, x: &Vector2<f64>, d: &Vector2<f64>) -> Matrix3x2<f64> {
        let s = 1.0 + x.norm_squared();
        self.jacobian_derivative(x, d) * (s * s / 4.0) + self.jacobian(x) * (s * x.dot(d))
    }

    /// Columns `DJ[eᵢ] ẋ`.
    fn velocity_hessian(self, x: &Vector2<f64>, xd: &Vector2<f64>) -> Matrix3x2<f64> {
        let c0 = self.jacobian_derivative(x, &Vector2::x()) * xd;
        let c1 = self.jacobian_derivative(x, &Vector2::y()) * xd;
        Matrix3x2::from_columns(&[c0, c1])
    }

    /// Columns `DE[eᵢ] p`.
    fn momentum_hessian(self, x: &Vector2<f64>, p: &Vector2<f64>) -> Matrix3x2<f64> {
        let c0 = self.raise_derivative(x, &Vector2::x()) * p;
        let c1 = self.raise_derivative(x, &Vector2::y()) * p;
        Matrix3x2::from_columns(&[c0, c1])
    }

    // ---------------------------------------------------------------------
    // embedded → chart

    pub fn second_tangent_to_chart(self, t: &SecondTangent) -> SecondTangent {
        let n = v3(&t.q);
        let (v, w, u) = (v3(&t.q_dot), v3(&t.dq), v3(&t.dq_dot));
        let x = self.to_chart(&n);
        let xd = self.chart_derivative(&n, &v);
        let dx = self.chart_derivative(&n, &w);
        let dxd = self.chart_second_derivative(&n, &v, &w) + self.chart_derivative(&n, &u);
        SecondTangent::new(d2(x), d2(xd), d2(dx), d2(dxd))
    }

    pub fn tangent_cotangent_to_chart(self, t: &TangentCotangent) -> TangentCotangent {
        let n = v3(&t.q);
        let (mu, w, m) = (v3(&t.p), v3(&t.dq), v3(&t.dp));
        let x = self.to_chart(&n);
        let j = self.jacobian(&x);
        let dx = self.chart_derivative(&n, &w);
        let p = j.transpose() * mu;
        let dp = j.transpose() * m + self.jacobian_derivative(&x, &dx).transpose() * mu;
        TangentCotangent::new(d2(x), d2(p), d2(dx), d2(dp))
    }

    pub fn cotangent_tangent_to_chart(self, t: &CotangentTangent) -> CotangentTangent {
        let n = v3(&t.q);
        let x = self.to_chart(&n);
        let xd = self.chart_derivative(&n, &v3(&t.q_dot));
        let j = self.jacobian(&x);
        let k = self.velocity_hessian(&x, &xd);
        let (a, b) = (v3(&t.dual_q), v3(&t.dual_q_dot));
        let xi = j.transpose() * a + k.transpose() * b;
        let eta = j.transpose() * b;
        CotangentTangent::new(d2(x), d2(xd), d2(xi), d2(eta))
    }

    pub fn cotangent_cotangent_to_chart(self, t: &CotangentCotangent) -> CotangentCotangent {
        let n = v3(&t.q);
        let x = self.to_chart(&n);
        let j = self.jacobian(&x);
        let p = j.transpose() * v3(&t.p);
        let l = self.momentum_hessian(&x, &p);
        let e = self.raise(&x);
        let (a, b) = (v3(&t.dual_q), v3(&t.dual_p));
        let xi = j.transpose() * a + l.transpose() * b;
        let eta = e.transpose() * b;
        CotangentCotangent::new(d2(x), d2(p), d2(xi), d2(eta))
    }

    // ---------------------------------------------------------------------
    // chart → embedded

    pub fn second_tangent_from_chart(self, t: &SecondTangent) -> SecondTangent {
        let (x, xd, dx, dxd) = (v2(&t.q), v2(&t.q_dot), v2(&t.dq), v2(&t.dq_dot));
        let j = self.jacobian(&x);
        let u = self.jacobian_derivative(&x, &dx) * xd + j * dxd;
        SecondTangent::new(d3(self.from_chart(&x)), d3(j * xd), d3(j * dx), d3(u))
    }

    pub fn tangent_cotangent_from_chart(self, t: &TangentCotangent) -> TangentCotangent {
        let (x, p, dx, dp) = (v2(&t.q), v2(&t.p), v2(&t.dq), v2(&t.dp));
        let e = self.raise(&x);
        let m = self.raise_derivative(&x, &dx) * p + e * dp;
        TangentCotangent::new(d3(self.from_chart(&x)), d3(e * p), d3(self.jacobian(&x) * dx), d3(m))
    }

    pub fn cotangent_tangent_from_chart(self, t: &CotangentTangent) -> CotangentTangent {
        let (x, xd, xi, eta) = (v2(&t.q), v2(&t.q_dot), v2(&t.dual_q), v2(&t.dual_q_dot));
        let j = self.jacobian(&x);
        let e = self.raise(&x);
        let k = self.velocity_hessian(&x, &xd);
        let b = e * eta;
        let a = e * (xi - k.transpose() * b);
        CotangentTangent::new(d3(self.from_chart(&x)), d3(j * xd), d3(a), d3(b))
    }

    pub fn cotangent_cotangent_from_chart(self, t: &CotangentCotangent) -> CotangentCotangent {
        let (x, p, xi, eta) = (v2(&t.q), v2(&t.p), v2(&t.dual_q), v2(&t.dual_p));
        let j = self.jacobian(&x);
        let e = self.raise(&x);
        let l = self.momentum_hessian(&x, &p);
        let b = j * eta;
        let a = e * (xi - l.transpose() * b);
        CotangentCotangent::new(d3(self.from_chart(&x)), d3(e * p), d3(a), d3(b))
    }

    /// Metric `G = JᵀJ` at `x`.
    pub fn metric(self, x: &Vector2<f64>) -> Matrix2<f64> {
        let j = self.jacobian(x);
        j.transpose() * j
    }
}

/// Random compatible embedded data at one point of the sphere.
#[derive(Debug, Clone)]
pub struct ChartSample {
    pub second: SecondTangent,
    pub tangent_cotangent: TangentCotangent,
    pub cotangent_tangent: CotangentTangent,
    pub cotangent_cotangent: CotangentCotangent,
}

impl ChartSample {
    /// `second` and `tangent_cotangent` share the direction slot so they can
    /// be paired; the covector records are raw (non-canonical) representatives.
    pub fn random(rng: &mut dyn RngCore) -> Self {
        let s = SphereBase;
        let n = s.random_point(rng);
        let v = s.random_tangent_at(&n, rng);
        let w = s.random_tangent_at(&n, rng);
        let mu = s.random_tangent_at(&n, rng);
        let second = s.random_second_tangent_at(&n, &v, &w, rng);
        let tangent_cotangent = s.random_tangent_cotangent_at(&n, &mu, &w, rng);
        let cotangent_tangent = s.random_cotangent_tangent_at(&n, &v, rng);
        let cotangent_cotangent = s.random_cotangent_cotangent_at(&n, &mu, rng);
        ChartSample {
            second,
            tangent_cotangent,
            cotangent_tangent,
            cotangent_cotangent,
        }
    }
}

/// Largest disagreement between the embedded maps and the chart maps, over
/// every chart that covers the sample point.
pub fn chart_discrepancy(sample: &ChartSample) -> Result<f64> {
    let s = SphereBase;
    let flat = EuclideanBase::new(2);
    let n = v3(&sample.second.q);
    let mut worst = 0.0_f64;
    let mut upd = |r: f64| worst = worst.max(if r.is_nan() { f64::INFINITY } else { r });

    let phi = &sample.tangent_cotangent;
    let vv = &sample.second;
    let rho = &sample.cotangent_tangent;
    let theta = &sample.cotangent_cotangent;

    let kappa = s.kappa(vv)?;
    let alpha = s.alpha(phi)?;
    let beta = s.beta(phi)?;
    let gamma = s.gamma(theta)?;
    let gamma_inv = s.gamma_inv(rho)?;
    let alpha_inv = s.alpha_inv(rho)?;
    let beta_inv = s.beta_inv(theta)?;
    let pairing = s.tangent_pairing(phi, vv)?;

    for chart in Chart::BOTH {
        if !chart.covers(&n) {
            continue;
        }
        let c_v = chart.second_tangent_to_chart(vv);
        let c_phi = chart.tangent_cotangent_to_chart(phi);
        let c_rho = chart.cotangent_tangent_to_chart(rho);
        let c_theta = chart.cotangent_cotangent_to_chart(theta);

        upd(chart.second_tangent_from_chart(&c_v).max_abs_diff(vv));
        upd(chart.tangent_cotangent_from_chart(&c_phi).max_abs_diff(phi));
        upd(s.cotangent_tangent_distance(&chart.cotangent_tangent_from_chart(&c_rho), rho));
        upd(s.cotangent_cotangent_distance(&chart.cotangent_cotangent_from_chart(&c_theta), theta));

        upd(chart.second_tangent_from_chart(&flat.kappa(&c_v)?).max_abs_diff(&kappa));
        upd(s.cotangent_tangent_distance(&chart.cotangent_tangent_from_chart(&flat.alpha(&c_phi)?), &alpha));
        upd(s.cotangent_cotangent_distance(&chart.cotangent_cotangent_from_chart(&flat.beta(&c_phi)?), &beta));
        upd(s.cotangent_tangent_distance(&chart.cotangent_tangent_from_chart(&flat.gamma(&c_theta)?), &gamma));
        upd(s.cotangent_cotangent_distance(&chart.cotangent_cotangent_from_chart(&flat.gamma_inv(&c_rho)?), &gamma_inv));
        upd(chart.tangent_cotangent_from_chart(&flat.alpha_inv(&c_rho)?).max_abs_diff(&alpha_inv));
        upd(chart.tangent_cotangent_from_chart(&flat.beta_inv(&c_theta)?).max_abs_diff(&beta_inv));
        upd((flat.tangent_pairing(&c_phi, &c_v)? - pairing).abs());
    }
    Ok(worst)
}
