use nalgebra::Vector3;

use super::{DynamicsPoint, Hamiltonian, Lagrangian};
use crate::base::{CotangentCotangent, CotangentTangent, CotangentVec, TangentCotangent, TangentVec};
use crate::bundle::{FrameBundle, FramePoint, PrincipalBundle, TrivCotangent, TrivTangent};
use crate::error::{Error, Result};
use crate::triple::{TrivTTsP, TrivTsTP, TrivTsTsP};
use crate::Vector;

/// Accepted drift of `‖n‖ − 1` and `⟨n, v⟩` on a state handed in by a caller.
pub const STATE_TOL: f64 = 1e-9;

fn dv(v: &Vector3<f64>) -> Vector {
    Vector::from_column_slice(v.as_slice())
}

/// `(n, v, r)`: axis on the sphere, its velocity and the spin about the axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BodyState {
    pub n: Vector3<f64>,
    pub v: Vector3<f64>,
    pub r: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BodyDerivative {
    pub n: Vector3<f64>,
    pub v: Vector3<f64>,
    pub r: f64,
}

/// Coefficient of the annihilator representative `c n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultiplierC(pub f64);

impl BodyState {
    pub fn new(n: Vector3<f64>, v: Vector3<f64>, r: f64) -> Result<Self> {
        let s = BodyState { n, v, r };
        s.validate()?;
        Ok(s)
    }

    /// Normalizes `n` and removes the normal part of `v`. Also returns the
    /// size of the adjustment.
    pub fn projected(n: Vector3<f64>, v: Vector3<f64>, r: f64) -> Result<(Self, f64)> {
        if !(n.iter().chain(v.iter()).all(|x| x.is_finite()) && r.is_finite()) {
            return Err(Error::NonFinite("body state"));
        }
        let len = n.norm();
        if len < 1e-12 {
            return Err(Error::Constraint {
                what: "axis length",
                residual: len,
            });
        }
        let m = n / len;
        let w = v - m * m.dot(&v);
        let adjustment = (m - n).amax().max((w - v).amax());
        Ok((BodyState { n: m, v: w, r }, adjustment))
    }

    pub fn validate(&self) -> Result<()> {
        if !self.is_finite() {
            return Err(Error::NonFinite("body state"));
        }
        let a = self.constraint_norm().abs();
        if a > STATE_TOL {
            return Err(Error::Constraint {
                what: "‖n‖ = 1",
                residual: a,
            });
        }
        let b = self.constraint_orth().abs();
        if b > STATE_TOL {
            return Err(Error::Constraint {
                what: "⟨n, v⟩ = 0",
                residual: b,
            });
        }
        Ok(())
    }

    pub fn is_finite(&self) -> bool {
        self.n.iter().chain(self.v.iter()).all(|x| x.is_finite()) && self.r.is_finite()
    }

    /// `‖n‖ − 1`.
    pub fn constraint_norm(&self) -> f64 {
        self.n.norm() - 1.0
    }

    /// `⟨n, v⟩`.
    pub fn constraint_orth(&self) -> f64 {
        self.n.dot(&self.v)
    }

    pub fn tangent(&self) -> TangentVec {
        TangentVec::new(dv(&self.n), dv(&self.v))
    }

    fn axpy(&self, h: f64, d: &BodyDerivative) -> BodyState {
        BodyState {
            n: self.n + d.n * h,
            v: self.v + d.v * h,
            r: self.r + d.r * h,
        }
    }
}

/// Axially symmetric rigid body whose axis stays normal to the sphere,
/// `L = ½ I⊥ ‖n × v‖² + ½ I_ax r²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereBody {
    pub i_perp: f64,
    pub i_ax: f64,
}

impl SphereBody {
    pub fn new(i_perp: f64, i_ax: f64) -> Result<Self> {
        for (what, x) in [("I_perp", i_perp), ("I_ax", i_ax)] {
            if !x.is_finite() {
                return Err(Error::NonFinite(what));
            }
            if x <= 0.0 {
                return Err(Error::Constraint { what, residual: x });
            }
        }
        Ok(SphereBody { i_perp, i_ax })
    }

    pub fn lagrangian_value(&self, v: &TangentVec, r: f64) -> f64 {
        let n = Vector3::new(v.q[0], v.q[1], v.q[2]);
        let w = Vector3::new(v.v[0], v.v[1], v.v[2]);
        0.5 * self.i_perp * n.cross(&w).norm_squared() + 0.5 * self.i_ax * r * r
    }

    /// The trivialised Lagrangian with the closed-form differential
    /// `dL̃ = (p, (n, v, c n, I⊥ v), r, 0, I_ax r)`, `c n` dropped as a class.
    pub fn lagrangian(&self) -> Lagrangian<FrameBundle> {
        let body = *self;
        Lagrangian::new(move |_p: &FramePoint, v: &TangentVec, x| body.lagrangian_value(v, x.coeffs()[0]))
            .with_differential(move |bundle: &FrameBundle, t: &TrivTangent<FramePoint>| {
                let q = &t.tangent.q;
                let w = &t.tangent.v;
                let mom = (w - q * q.dot(w)) * body.i_perp;
                let r = t.vertical.coeffs()[0];
                let alg = bundle.algebra();
                Ok(TrivTsTP {
                    p: t.point,
                    rho: CotangentTangent::new(q.clone(), w.clone(), Vector::zeros(3), mom),
                    x: t.vertical.clone(),
                    a: alg.dual_zero(),
                    b: alg.dual_from_slice(&[body.i_ax * r])?,
                })
            })
            .invariant(true)
    }

    /// A frame-dependent variant `L + ε ⟨f₁, e₁⟩ r²`, not invariant for `ε ≠ 0`.
    pub fn perturbed_lagrangian(&self, eps: f64) -> Lagrangian<FrameBundle> {
        let body = *self;
        Lagrangian::new(move |p: &FramePoint, v: &TangentVec, x| {
            let r = x.coeffs()[0];
            body.lagrangian_value(v, r) + eps * p.f1.x * r * r
        })
        .invariant(eps == 0.0)
    }

    /// Legendre dual of [`SphereBody::lagrangian`],
    /// `H = ‖μ‖² / (2 I⊥) + a² / (2 I_ax)`.
    pub fn hamiltonian(&self) -> Hamiltonian<FrameBundle> {
        let body = *self;
        Hamiltonian::new(move |_p: &FramePoint, a: &CotangentVec, m| {
            let s = m.coeffs()[0];
            a.p.norm_squared() / (2.0 * body.i_perp) + s * s / (2.0 * body.i_ax)
        })
        .with_differential(move |bundle: &FrameBundle, c: &TrivCotangent<FramePoint>| {
            let q = &c.covector.q;
            let mu = &c.covector.p;
            let vel = (mu - q * q.dot(mu)) / body.i_perp;
            let s = c.momentum.coeffs()[0];
            let alg = bundle.algebra();
            Ok(TrivTsTsP {
                p: c.point,
                theta: CotangentCotangent::new(q.clone(), mu.clone(), Vector::zeros(3), vel),
                a: c.momentum.clone(),
                b: alg.dual_zero(),
                x: alg.element_from_slice(&[s / body.i_ax])?,
            })
        })
        .invariant(true)
    }

    /// `V = (p, (n, v), r)`.
    pub fn trivial_tangent(&self, bundle: &FrameBundle, p: &FramePoint, s: &BodyState) -> Result<TrivTangent<FramePoint>> {
        let t = TrivTangent {
            point: *p,
            tangent: s.tangent(),
            vertical: bundle.algebra().element_from_slice(&[s.r])?,
        };
        bundle.check_over(p, &t.tangent)?;
        Ok(t)
    }

    /// `(p, (n, μ), a)` with `μ = I⊥ v`, `a = I_ax r`.
    pub fn legendre(&self, bundle: &FrameBundle, p: &FramePoint, s: &BodyState) -> Result<TrivCotangent<FramePoint>> {
        Ok(TrivCotangent {
            point: *p,
            covector: CotangentVec::new(dv(&s.n), dv(&(s.v * self.i_perp))),
            momentum: bundle.algebra().dual_from_slice(&[self.i_ax * s.r])?,
        })
    }

    /// `c = −I⊥ ‖v‖²`, forced by `d/dt ⟨n, v⟩ = 0`.
    pub fn multiplier(&self, s: &BodyState) -> MultiplierC {
        MultiplierC(-self.i_perp * s.v.norm_squared())
    }

    /// `(p, (n, I⊥ v, v, c n − I_ax r v × n), I_ax r, r, 0)` for a given `c`.
    pub fn closed_form_point(&self, bundle: &FrameBundle, p: &FramePoint, s: &BodyState, c: MultiplierC) -> Result<DynamicsPoint<FramePoint>> {
        let dp = s.n * c.0 - s.v.cross(&s.n) * (self.i_ax * s.r);
        let alg = bundle.algebra();
        Ok(TrivTTsP {
            p: *p,
            phi: TangentCotangent::new(dv(&s.n), dv(&(s.v * self.i_perp)), dv(&s.v), dv(&dp)),
            a: alg.dual_from_slice(&[self.i_ax * s.r])?,
            y: alg.element_from_slice(&[s.r])?,
            b: alg.dual_zero(),
        })
    }

    /// `ṅ = v`, `I⊥ v̇ = c n − I_ax r v × n`, `ṙ = 0`.
    pub fn vector_field(&self, s: &BodyState) -> BodyDerivative {
        let c = self.multiplier(s).0;
        BodyDerivative {
            n: s.v,
            v: (s.n * c - s.v.cross(&s.n) * (self.i_ax * s.r)) / self.i_perp,
            r: 0.0,
        }
    }

    pub fn energy(&self, s: &BodyState) -> f64 {
        0.5 * self.i_perp * s.n.cross(&s.v).norm_squared() + 0.5 * self.i_ax * s.r * s.r
    }

    /// One classical Runge–Kutta step followed by projection onto
    /// `‖n‖ = 1, ⟨n, v⟩ = 0`.
    pub fn step(&self, s: &BodyState, dt: f64) -> BodyState {
        let k1 = self.vector_field(s);
        let k2 = self.vector_field(&s.axpy(0.5 * dt, &k1));
        let k3 = self.vector_field(&s.axpy(0.5 * dt, &k2));
        let k4 = self.vector_field(&s.axpy(dt, &k3));
        let w = dt / 6.0;
        let n = s.n + (k1.n + (k2.n + k3.n) * 2.0 + k4.n) * w;
        let v = s.v + (k1.v + (k2.v + k3.v) * 2.0 + k4.v) * w;
        let n = n / n.norm();
        BodyState {
            v: v - n * n.dot(&v),
            n,
            r: s.r,
        }
    }

    /// `steps + 1` states starting with `s0`.
    pub fn integrate(&self, s0: &BodyState, dt: f64, steps: usize) -> Result<Vec<BodyState>> {
        let mut out = Vec::with_capacity(steps + 1);
        self.integrate_with(s0, dt, steps, |_, s| {
            out.push(*s);
            Ok(())
        })?;
        Ok(out)
    }

    /// Streams every state, the initial one included, into `visit`.
    pub fn integrate_with(
        &self,
        s0: &BodyState,
        dt: f64,
        steps: usize,
        mut visit: impl FnMut(usize, &BodyState) -> Result<()>,
    ) -> Result<BodyState> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::Constraint { what: "dt > 0", residual: dt });
        }
        s0.validate()?;
        let mut s = *s0;
        visit(0, &s)?;
        for k in 1..=steps {
            s = self.step(&s, dt);
            if !s.is_finite() || !s.n.norm().is_normal() {
                return Err(Error::NumericAbort { step: k });
            }
            visit(k, &s)?;
        }
        Ok(s)
    }
}
