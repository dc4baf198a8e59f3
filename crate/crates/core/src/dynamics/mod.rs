//! Lagrangian and Hamiltonian dynamics on a principal bundle with connection,
//! their reduction to the Atiyah algebroid, and the sphere body.
//!
//! `dL̃(p, v, X) = (p, ∂_TM L̃, X, ∂_G L̃, ∂_𝔤 L̃)` is assembled slot by slot:
//! `∂_TM` moves `v` along TTM while `p` follows the horizontal lift,
//! `∂_G` moves `p` along `p exp(tX_a)` and `∂_𝔤` moves `X` alone.

mod body;

use std::fmt;
use std::sync::Arc;

use rand::RngCore;

use crate::base::{BaseModel, CotangentCotangent, CotangentTangent, CotangentVec, TangentVec};
use crate::bundle::{PrincipalBundle, TrivCotangent, TrivTangent};
use crate::error::{Error, Result};
use crate::lie::{ad_star, adjoint, coadjoint, DualAlgebraElement, LieAlgebraElement};
use crate::reduce::{epsilon_a, eta_a, AdClass, AdStarClass, TaspElement, TsapElement, TsaspElement};
use crate::tol;
use crate::triple::{check_tstp, check_tstsp, random_base_tangent, TrivTTsP, TrivTsTP, TrivTsTsP};
use crate::Vector;

pub use body::{BodyDerivative, BodyState, MultiplierC, SphereBody};

/// A point `(p, φ, A, X, B)` of the trivialised dynamics, stored in TT*P.
pub type DynamicsPoint<P> = TrivTTsP<P>;

type LagrangianFn<P> = dyn Fn(&P, &TangentVec, &LieAlgebraElement) -> f64 + Send + Sync;
type LagrangianDiff<B> = dyn Fn(&B, &TrivTangent<<B as PrincipalBundle>::Point>) -> Result<TrivTsTP<<B as PrincipalBundle>::Point>> + Send + Sync;
type HamiltonianFn<P> = dyn Fn(&P, &CotangentVec, &DualAlgebraElement) -> f64 + Send + Sync;
type HamiltonianDiff<B> = dyn Fn(&B, &TrivCotangent<<B as PrincipalBundle>::Point>) -> Result<TrivTsTsP<<B as PrincipalBundle>::Point>> + Send + Sync;

/// `L̃ : P ×_M TM × 𝔤 → ℝ`.
pub struct Lagrangian<B: PrincipalBundle> {
    eval: Arc<LagrangianFn<B::Point>>,
    analytic: Option<Arc<LagrangianDiff<B>>>,
    invariant: bool,
}

impl<B: PrincipalBundle> Clone for Lagrangian<B> {
    fn clone(&self) -> Self {
        Lagrangian {
            eval: self.eval.clone(),
            analytic: self.analytic.clone(),
            invariant: self.invariant,
        }
    }
}

impl<B: PrincipalBundle> fmt::Debug for Lagrangian<B> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Lagrangian")
            .field("analytic", &self.analytic.is_some())
            .field("invariant", &self.invariant)
            .finish()
    }
}

impl<B: PrincipalBundle> Lagrangian<B> {
    pub fn new(eval: impl Fn(&B::Point, &TangentVec, &LieAlgebraElement) -> f64 + Send + Sync + 'static) -> Self {
        Lagrangian {
            eval: Arc::new(eval),
            analytic: None,
            invariant: false,
        }
    }

    /// Supplies a closed-form differential used instead of finite differences.
    pub fn with_differential(
        mut self,
        d: impl Fn(&B, &TrivTangent<B::Point>) -> Result<TrivTsTP<B::Point>> + Send + Sync + 'static,
    ) -> Self {
        self.analytic = Some(Arc::new(d));
        self
    }

    /// Declares `L̃(pg, v, Ad_{g⁻¹}X) = L̃(p, v, X)`.
    pub fn invariant(mut self, flag: bool) -> Self {
        self.invariant = flag;
        self
    }

    pub fn is_invariant(&self) -> bool {
        self.invariant
    }

    pub fn has_differential(&self) -> bool {
        self.analytic.is_some()
    }

    pub fn value(&self, p: &B::Point, v: &TangentVec, x: &LieAlgebraElement) -> f64 {
        (self.eval)(p, v, x)
    }

    /// The same Lagrangian with the closed-form differential dropped.
    pub fn numeric(&self) -> Self {
        Lagrangian {
            analytic: None,
            ..self.clone()
        }
    }
}

/// `H̃ : P ×_M T*M × 𝔤* → ℝ`.
pub struct Hamiltonian<B: PrincipalBundle> {
    eval: Arc<HamiltonianFn<B::Point>>,
    analytic: Option<Arc<HamiltonianDiff<B>>>,
    invariant: bool,
}

impl<B: PrincipalBundle> Clone for Hamiltonian<B> {
    fn clone(&self) -> Self {
        Hamiltonian {
            eval: self.eval.clone(),
            analytic: self.analytic.clone(),
            invariant: self.invariant,
        }
    }
}

impl<B: PrincipalBundle> fmt::Debug for Hamiltonian<B> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Hamiltonian")
            .field("analytic", &self.analytic.is_some())
            .field("invariant", &self.invariant)
            .finish()
    }
}

impl<B: PrincipalBundle> Hamiltonian<B> {
    pub fn new(eval: impl Fn(&B::Point, &CotangentVec, &DualAlgebraElement) -> f64 + Send + Sync + 'static) -> Self {
        Hamiltonian {
            eval: Arc::new(eval),
            analytic: None,
            invariant: false,
        }
    }

    pub fn with_differential(
        mut self,
        d: impl Fn(&B, &TrivCotangent<B::Point>) -> Result<TrivTsTsP<B::Point>> + Send + Sync + 'static,
    ) -> Self {
        self.analytic = Some(Arc::new(d));
        self
    }

    /// Declares `H̃(pg, α, Ad*_g A) = H̃(p, α, A)`.
    pub fn invariant(mut self, flag: bool) -> Self {
        self.invariant = flag;
        self
    }

    pub fn is_invariant(&self) -> bool {
        self.invariant
    }

    pub fn value(&self, p: &B::Point, a: &CotangentVec, m: &DualAlgebraElement) -> f64 {
        (self.eval)(p, a, m)
    }

    pub fn numeric(&self) -> Self {
        Hamiltonian {
            analytic: None,
            ..self.clone()
        }
    }
}

// -------------------------------------------------------------------------
// finite differences

/// Fourth-order central difference of `f` at 0 with step [`tol::FD_STEP`].
fn central(mut f: impl FnMut(f64) -> f64) -> Result<f64> {
    let h = tol::FD_STEP;
    let (a, b, c, d) = (f(-2.0 * h), f(-h), f(h), f(2.0 * h));
    let out = (a - 8.0 * b + 8.0 * c - d) / (12.0 * h);
    if !out.is_finite() {
        return Err(Error::NonFinite("finite-difference probe"));
    }
    Ok(out)
}

/// A point moved along the horizontal lift of `δq` together with a base
/// curve `(q(t), w(t))` through `(q, w)` with velocity `(δq, δw)`.
fn horizontal_probe<B: PrincipalBundle>(
    bundle: &B,
    p: &B::Point,
    w: &Vector,
    dir: &(Vector, Vector),
    t: f64,
) -> Result<(B::Point, Vector, Vector)> {
    let base = bundle.base();
    let q = bundle.project(p);
    let lift = bundle.horizontal_lift(p, &TangentVec::new(q.clone(), dir.0.clone()))?;
    let pt = bundle.flow(p, &lift, t);
    let qt = bundle.project(&pt);
    let wt = base.project_tangent(&qt, &(w + &dir.1 * t));
    Ok((pt, qt, wt))
}

fn numeric_dl<B: PrincipalBundle>(bundle: &B, l: &Lagrangian<B>, v: &TrivTangent<B::Point>) -> Result<TrivTsTP<B::Point>> {
    let (p, x) = (&v.point, &v.vertical);
    let q = bundle.project(p);
    let w = &v.tangent.v;
    let frame = bundle.base().second_frame(&q, w);
    let mut dual_q = Vector::zeros(q.len());
    let mut dual_w = Vector::zeros(q.len());
    for (dir, dual) in frame.directions.iter().zip(&frame.duals) {
        let mut failed = None;
        let d = central(|t| match horizontal_probe(bundle, p, w, dir, t) {
            Ok((pt, qt, wt)) => l.value(&pt, &TangentVec::new(qt, wt), x),
            Err(e) => {
                failed = Some(e);
                f64::NAN
            }
        });
        if let Some(e) = failed {
            return Err(e);
        }
        let d = d?;
        dual_q += &dual.0 * d;
        dual_w += &dual.1 * d;
    }
    let alg = bundle.algebra();
    let mut dg = Vector::zeros(alg.dim());
    let mut dx = Vector::zeros(alg.dim());
    for a in 0..alg.dim() {
        let e = alg.basis(a);
        let raw = bundle.fundamental(p, &e)?;
        dg[a] = central(|t| l.value(&bundle.flow(p, &raw, t), &v.tangent, x))?;
        dx[a] = central(|t| l.value(p, &v.tangent, &(x + &(&e * t))))?;
    }
    Ok(TrivTsTP {
        p: p.clone(),
        rho: bundle.base().canonical_cotangent_tangent(&CotangentTangent::new(q, w.clone(), dual_q, dual_w)),
        x: x.clone(),
        a: alg.dual(dg)?,
        b: alg.dual(dx)?,
    })
}

fn numeric_dh<B: PrincipalBundle>(bundle: &B, h: &Hamiltonian<B>, c: &TrivCotangent<B::Point>) -> Result<TrivTsTsP<B::Point>> {
    let (p, m) = (&c.point, &c.momentum);
    let q = bundle.project(p);
    let w = &c.covector.p;
    let frame = bundle.base().second_frame(&q, w);
    let mut dual_q = Vector::zeros(q.len());
    let mut dual_p = Vector::zeros(q.len());
    for (dir, dual) in frame.directions.iter().zip(&frame.duals) {
        let mut failed = None;
        let d = central(|t| match horizontal_probe(bundle, p, w, dir, t) {
            Ok((pt, qt, wt)) => h.value(&pt, &CotangentVec::new(qt, wt), m),
            Err(e) => {
                failed = Some(e);
                f64::NAN
            }
        });
        if let Some(e) = failed {
            return Err(e);
        }
        let d = d?;
        dual_q += &dual.0 * d;
        dual_p += &dual.1 * d;
    }
    let alg = bundle.algebra();
    let mut dg = Vector::zeros(alg.dim());
    let mut da = Vector::zeros(alg.dim());
    for a in 0..alg.dim() {
        let raw = bundle.fundamental(p, &alg.basis(a))?;
        dg[a] = central(|t| h.value(&bundle.flow(p, &raw, t), &c.covector, m))?;
        let e = alg.dual_basis(a);
        da[a] = central(|t| h.value(p, &c.covector, &(m + &(&e * t))))?;
    }
    Ok(TrivTsTsP {
        p: p.clone(),
        theta: bundle.base().canonical_cotangent_cotangent(&CotangentCotangent::new(q, w.clone(), dual_q, dual_p)),
        a: m.clone(),
        b: alg.dual(dg)?,
        x: alg.element(da)?,
    })
}

// -------------------------------------------------------------------------
// differentials and dynamics

/// `dL̃(p, v, X) = (p, ∂_TM L̃, X, ∂_G L̃, ∂_𝔤 L̃)`.
///
/// On constrained bases the `∂_TM` slot is a class modulo the annihilator of
/// the constraint surface; the canonical representative is returned.
pub fn differential_l<B: PrincipalBundle>(bundle: &B, l: &Lagrangian<B>, v: &TrivTangent<B::Point>) -> Result<TrivTsTP<B::Point>> {
    bundle.check_over(&v.point, &v.tangent)?;
    v.vertical.ensure_same_algebra(bundle.algebra())?;
    let d = match &l.analytic {
        Some(f) => f(bundle, v)?,
        None => numeric_dl(bundle, l, v)?,
    };
    check_tstp(bundle, &d)?;
    Ok(d)
}

/// `dH̃(p, α, A) = (p, ∂_T*M H̃, A, ∂_G H̃, ∂_𝔤* H̃)`.
pub fn differential_h<B: PrincipalBundle>(bundle: &B, h: &Hamiltonian<B>, c: &TrivCotangent<B::Point>) -> Result<TrivTsTsP<B::Point>> {
    bundle.check_bundle_point(&c.point)?;
    bundle.base().check_cotangent(&c.covector)?;
    c.momentum.ensure_same_algebra(bundle.algebra())?;
    let d = match &h.analytic {
        Some(f) => f(bundle, c)?,
        None => numeric_dh(bundle, h, c)?,
    };
    check_tstsp(bundle, &d)?;
    Ok(d)
}

/// The point of `D̃` generated at `V = (p, v, X)`:
/// `φ = α_M⁻¹(∂_TM L̃) ∸ Ω*(∂_𝔤 L̃)`, `A = ∂_𝔤 L̃`, `Y = X`,
/// `B = ∂_G L̃ + ad*_X ∂_𝔤 L̃`.
pub fn lagrangian_dynamics_point<B: PrincipalBundle>(bundle: &B, l: &Lagrangian<B>, v: &TrivTangent<B::Point>) -> Result<DynamicsPoint<B::Point>> {
    let d = differential_l(bundle, l, v)?;
    let base = bundle.base();
    let c = bundle.curvature_dual(&d.p, &d.rho.base_tangent(), &d.b)?;
    let phi = base.core_sub_tc(&base.alpha_inv(&d.rho)?, &c)?;
    Ok(TrivTTsP {
        p: d.p.clone(),
        phi,
        y: d.x.clone(),
        b: &d.a + &ad_star(&d.x, &d.b)?,
        a: d.b,
    })
}

/// The value of `X̃_H` at `(p, α, A)`:
/// `φ = β_M⁻¹(∂_T*M H̃) ∸ Ω*(A)`, `Y = ∂_𝔤* H̃`, `B = ad*_Y A − ∂_G H̃`.
pub fn hamiltonian_dynamics_point<B: PrincipalBundle>(bundle: &B, h: &Hamiltonian<B>, c: &TrivCotangent<B::Point>) -> Result<DynamicsPoint<B::Point>> {
    let d = differential_h(bundle, h, c)?;
    let base = bundle.base();
    let c = bundle.curvature_dual(&d.p, &d.theta.fiber_velocity(), &d.a)?;
    let phi = base.core_sub_tc(&base.beta_inv(&d.theta)?, &c)?;
    Ok(TrivTTsP {
        p: d.p.clone(),
        phi,
        b: &ad_star(&d.x, &d.a)? - &d.b,
        y: d.x,
        a: d.a,
    })
}

/// `d̃ = ε̃_{A(P)}(∂_TM L̃, [(p, X)], [(p, ∂_𝔤 L̃)])` for an invariant Lagrangian.
pub fn reduced_dynamics_point<B: PrincipalBundle>(bundle: &B, l: &Lagrangian<B>, v: &TrivTangent<B::Point>) -> Result<TaspElement<B::Point>> {
    if !l.is_invariant() {
        return Err(Error::NotInvariant(": the reduced Lagrangian is undefined".into()));
    }
    let d = differential_l(bundle, l, v)?;
    epsilon_a(
        bundle,
        &TsapElement {
            rho: d.rho,
            x: AdClass::new(d.p.clone(), d.x),
            c: AdStarClass::new(d.p, d.b),
        },
    )
}

/// `X̃_h = η̃_{A(P)}(∂_T*M H̃, [(p, A)], [(p, ∂_𝔤* H̃)])` for an invariant Hamiltonian.
pub fn reduced_hamiltonian_point<B: PrincipalBundle>(bundle: &B, h: &Hamiltonian<B>, c: &TrivCotangent<B::Point>) -> Result<TaspElement<B::Point>> {
    if !h.is_invariant() {
        return Err(Error::NotInvariant(": the reduced Hamiltonian is undefined".into()));
    }
    let d = differential_h(bundle, h, c)?;
    eta_a(
        bundle,
        &TsaspElement {
            theta: d.theta,
            a: AdStarClass::new(d.p.clone(), d.a),
            z: AdClass::new(d.p, d.x),
        },
    )
}

/// Largest `|L̃(pg, v, Ad_{g⁻¹}X) − L̃(p, v, X)|` over random probes.
pub fn lagrangian_invariance_residual<B: PrincipalBundle>(bundle: &B, l: &Lagrangian<B>, probes: usize, rng: &mut dyn RngCore) -> Result<f64> {
    let mut worst = 0.0_f64;
    for _ in 0..probes {
        let p = bundle.random_point(rng);
        let v = random_base_tangent(bundle, &p, rng);
        let x = bundle.algebra().random_element(rng);
        let g = bundle
            .random_group_element(rng)
            .ok_or(Error::Unsupported("random group elements on this bundle"))?;
        let moved = l.value(&bundle.right_act(&p, &g)?, &v, &adjoint(&g.inverse(), &x)?);
        let here = l.value(&p, &v, &x);
        worst = worst.max((moved - here).abs() / (1.0 + here.abs()));
    }
    Ok(worst)
}

/// Rejects a Lagrangian flagged invariant whose probes disagree beyond 1e-10.
pub fn check_lagrangian_invariance<B: PrincipalBundle>(bundle: &B, l: &Lagrangian<B>, probes: usize, rng: &mut dyn RngCore) -> Result<f64> {
    let r = lagrangian_invariance_residual(bundle, l, probes, rng)?;
    if !l.is_invariant() {
        return Err(Error::NotInvariant(": flag unset".into()));
    }
    if !(r <= 1e-10) {
        return Err(Error::NotInvariant(format!(": probe residual {r:.3e}")));
    }
    Ok(r)
}

/// Largest `|H̃(pg, α, Ad*_g A) − H̃(p, α, A)|` over random probes.
pub fn hamiltonian_invariance_residual<B: PrincipalBundle>(bundle: &B, h: &Hamiltonian<B>, probes: usize, rng: &mut dyn RngCore) -> Result<f64> {
    let mut worst = 0.0_f64;
    for _ in 0..probes {
        let p = bundle.random_point(rng);
        let t = random_base_tangent(bundle, &p, rng);
        let a = CotangentVec::new(t.q, t.v);
        let m = bundle.algebra().random_dual(rng);
        let g = bundle
            .random_group_element(rng)
            .ok_or(Error::Unsupported("random group elements on this bundle"))?;
        let moved = h.value(&bundle.right_act(&p, &g)?, &a, &coadjoint(&g, &m)?);
        let here = h.value(&p, &a, &m);
        worst = worst.max((moved - here).abs() / (1.0 + here.abs()));
    }
    Ok(worst)
}
