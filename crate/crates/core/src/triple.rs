//! The trivialised Tulczyjew triple on a principal bundle with connection.
//!
//! Every iterated bundle of P is stored as `P ×_M (base object) × three
//! algebra slots`. Field names follow the tuples literally:
//!
//! | type          | tuple                | pairs with        | shared slots          |
//! |---------------|----------------------|-------------------|-----------------------|
//! | [`TrivTTP`]   | `(p, 𝒱, X, Y, Z)`    |                   |                       |
//! | [`TrivTTsP`]  | `(p, φ, A, Y, B)`    | TTP               | `p`, `Y`, `Tτ𝒱 = Tπφ` |
//! | [`TrivTsTP`]  | `(p, ρ, X, A, B)`    | TTP               | `p`, `X`, `πρ = τ𝒱`   |
//! | [`TrivTsTsP`] | `(p, Θ, A, B, X)`    | TT*P              | `p`, `A`, `πΘ = τφ`   |
//!
//! In TTP the slots are: `X` the algebra part of the foot point in TP, `Y`
//! the vertical velocity of the curve in P, `Z` the derivative of `X`.
//! In TT*P, `A` is the momentum, `Y` the vertical velocity and `B` the
//! derivative of `A`.

use rand::RngCore;

use crate::base::{ensure_close, BaseModel, CotangentCotangent, CotangentTangent, SecondTangent, TangentCotangent, TangentVec};
use crate::bundle::PrincipalBundle;
use crate::error::{Error, Result};
use crate::lie::{ad_star, bracket, DualAlgebraElement, LieAlgebraElement};
use crate::tol;

#[derive(Debug, Clone)]
pub struct TrivTTP<P> {
    pub p: P,
    pub v: SecondTangent,
    pub x: LieAlgebraElement,
    pub y: LieAlgebraElement,
    pub z: LieAlgebraElement,
}

#[derive(Debug, Clone)]
pub struct TrivTTsP<P> {
    pub p: P,
    pub phi: TangentCotangent,
    pub a: DualAlgebraElement,
    pub y: LieAlgebraElement,
    pub b: DualAlgebraElement,
}

#[derive(Debug, Clone)]
pub struct TrivTsTP<P> {
    pub p: P,
    pub rho: CotangentTangent,
    pub x: LieAlgebraElement,
    pub a: DualAlgebraElement,
    pub b: DualAlgebraElement,
}

#[derive(Debug, Clone)]
pub struct TrivTsTsP<P> {
    pub p: P,
    pub theta: CotangentCotangent,
    pub a: DualAlgebraElement,
    pub b: DualAlgebraElement,
    pub x: LieAlgebraElement,
}

// -------------------------------------------------------------------------
// validation

fn check_foot<B: PrincipalBundle>(bundle: &B, p: &B::Point, q: &crate::Vector) -> Result<()> {
    bundle.check_bundle_point(p)?;
    ensure_close("π(p) vs base object", &bundle.project(p), q)
}

fn check_same_point<B: PrincipalBundle>(bundle: &B, a: &B::Point, b: &B::Point) -> Result<()> {
    let r = bundle.point_distance(a, b);
    if !(r <= tol::BASE_MATCH) {
        return Err(Error::ProjectionMismatch {
            what: "bundle point",
            residual: r,
        });
    }
    Ok(())
}

fn check_same_element(what: &'static str, a: &LieAlgebraElement, b: &LieAlgebraElement) -> Result<()> {
    b.ensure_same_algebra(a.algebra())?;
    let r = a.max_abs_diff(b);
    if !(r <= tol::BASE_MATCH) {
        return Err(Error::ProjectionMismatch { what, residual: r });
    }
    Ok(())
}

fn check_same_dual(what: &'static str, a: &DualAlgebraElement, b: &DualAlgebraElement) -> Result<()> {
    b.ensure_same_algebra(a.algebra())?;
    let r = a.max_abs_diff(b);
    if !(r <= tol::BASE_MATCH) {
        return Err(Error::ProjectionMismatch { what, residual: r });
    }
    Ok(())
}

pub fn check_ttp<B: PrincipalBundle>(bundle: &B, t: &TrivTTP<B::Point>) -> Result<()> {
    bundle.base().check_second_tangent(&t.v)?;
    check_foot(bundle, &t.p, &t.v.q)?;
    let g = bundle.algebra();
    t.x.ensure_same_algebra(g)?;
    t.y.ensure_same_algebra(g)?;
    t.z.ensure_same_algebra(g)
}

pub fn check_ttsp<B: PrincipalBundle>(bundle: &B, t: &TrivTTsP<B::Point>) -> Result<()> {
    bundle.base().check_tangent_cotangent(&t.phi)?;
    check_foot(bundle, &t.p, &t.phi.q)?;
    let g = bundle.algebra();
    t.a.ensure_same_algebra(g)?;
    t.y.ensure_same_algebra(g)?;
    t.b.ensure_same_algebra(g)
}

pub fn check_tstp<B: PrincipalBundle>(bundle: &B, t: &TrivTsTP<B::Point>) -> Result<()> {
    bundle.base().check_cotangent_tangent(&t.rho)?;
    check_foot(bundle, &t.p, &t.rho.q)?;
    let g = bundle.algebra();
    t.x.ensure_same_algebra(g)?;
    t.a.ensure_same_algebra(g)?;
    t.b.ensure_same_algebra(g)
}

pub fn check_tstsp<B: PrincipalBundle>(bundle: &B, t: &TrivTsTsP<B::Point>) -> Result<()> {
    bundle.base().check_cotangent_cotangent(&t.theta)?;
    check_foot(bundle, &t.p, &t.theta.q)?;
    let g = bundle.algebra();
    t.a.ensure_same_algebra(g)?;
    t.b.ensure_same_algebra(g)?;
    t.x.ensure_same_algebra(g)
}

// -------------------------------------------------------------------------
// distances

pub fn ttp_distance<B: PrincipalBundle>(bundle: &B, a: &TrivTTP<B::Point>, b: &TrivTTP<B::Point>) -> f64 {
    bundle
        .point_distance(&a.p, &b.p)
        .max(a.v.max_abs_diff(&b.v))
        .max(a.x.max_abs_diff(&b.x))
        .max(a.y.max_abs_diff(&b.y))
        .max(a.z.max_abs_diff(&b.z))
}

pub fn ttsp_distance<B: PrincipalBundle>(bundle: &B, a: &TrivTTsP<B::Point>, b: &TrivTTsP<B::Point>) -> f64 {
    bundle
        .point_distance(&a.p, &b.p)
        .max(a.phi.max_abs_diff(&b.phi))
        .max(a.a.max_abs_diff(&b.a))
        .max(a.y.max_abs_diff(&b.y))
        .max(a.b.max_abs_diff(&b.b))
}

/// Distance with the base covector compared as a class.
pub fn tstp_distance<B: PrincipalBundle>(bundle: &B, a: &TrivTsTP<B::Point>, b: &TrivTsTP<B::Point>) -> f64 {
    bundle
        .point_distance(&a.p, &b.p)
        .max(bundle.base().cotangent_tangent_distance(&a.rho, &b.rho))
        .max(a.x.max_abs_diff(&b.x))
        .max(a.a.max_abs_diff(&b.a))
        .max(a.b.max_abs_diff(&b.b))
}

pub fn tstsp_distance<B: PrincipalBundle>(bundle: &B, a: &TrivTsTsP<B::Point>, b: &TrivTsTsP<B::Point>) -> f64 {
    bundle
        .point_distance(&a.p, &b.p)
        .max(bundle.base().cotangent_cotangent_distance(&a.theta, &b.theta))
        .max(a.a.max_abs_diff(&b.a))
        .max(a.b.max_abs_diff(&b.b))
        .max(a.x.max_abs_diff(&b.x))
}

// -------------------------------------------------------------------------
// the four morphisms

/// `κ̃_P(p, 𝒱, X, Y, Z) = (p, κ_M 𝒱, Y, X, Z + Ω_p(τ𝒱, Tτ𝒱) + [Y, X])`.
pub fn flip<B: PrincipalBundle>(bundle: &B, t: &TrivTTP<B::Point>) -> Result<TrivTTP<B::Point>> {
    check_ttp(bundle, t)?;
    let omega = bundle.curvature(&t.p, &t.v.base_tangent(), &t.v.tangent_direction())?;
    let z = &(&t.z + &omega) + &bracket(&t.y, &t.x)?;
    Ok(TrivTTP {
        p: t.p.clone(),
        v: bundle.base().kappa(&t.v)?,
        x: t.y.clone(),
        y: t.x.clone(),
        z,
    })
}

/// `α̃_P(p, φ, A, Y, B) = (p, α_M(φ) ∔ Ω*_φ(A), Y, B − ad*_Y A, A)`.
pub fn tulczyjew_alpha<B: PrincipalBundle>(bundle: &B, t: &TrivTTsP<B::Point>) -> Result<TrivTsTP<B::Point>> {
    check_ttsp(bundle, t)?;
    let base = bundle.base();
    let c = bundle.curvature_dual(&t.p, &t.phi.base_velocity(), &t.a)?;
    let rho = base.core_add(&base.alpha(&t.phi)?, &c)?;
    Ok(TrivTsTP {
        p: t.p.clone(),
        rho: base.canonical_cotangent_tangent(&rho),
        x: t.y.clone(),
        a: &t.b - &ad_star(&t.y, &t.a)?,
        b: t.a.clone(),
    })
}

/// Slot-wise inverse of [`tulczyjew_alpha`]:
/// `(p, ρ, X, A, B) ↦ (p, α_M⁻¹(ρ ∸ Ω*_{(p, πρ)}(B)), B, X, A + ad*_X B)`.
pub fn tulczyjew_alpha_inv<B: PrincipalBundle>(bundle: &B, t: &TrivTsTP<B::Point>) -> Result<TrivTTsP<B::Point>> {
    check_tstp(bundle, t)?;
    let base = bundle.base();
    let c = bundle.curvature_dual(&t.p, &t.rho.base_tangent(), &t.b)?;
    let phi = base.alpha_inv(&base.core_sub(&t.rho, &c)?)?;
    Ok(TrivTTsP {
        p: t.p.clone(),
        phi,
        a: t.b.clone(),
        y: t.x.clone(),
        b: &t.a + &ad_star(&t.x, &t.b)?,
    })
}

/// `γ̃_TP(p, Θ, A, B, X) = (p, γ_TM(Θ), X, −B, A)`.
pub fn gamma_tp<B: PrincipalBundle>(bundle: &B, t: &TrivTsTsP<B::Point>) -> Result<TrivTsTP<B::Point>> {
    check_tstsp(bundle, t)?;
    Ok(TrivTsTP {
        p: t.p.clone(),
        rho: bundle.base().gamma(&t.theta)?,
        x: t.x.clone(),
        a: -&t.b,
        b: t.a.clone(),
    })
}

/// `γ̃_TP⁻¹(p, ρ, X, A, B) = (p, γ_TM⁻¹(ρ), B, −A, X)`.
pub fn gamma_tp_inv<B: PrincipalBundle>(bundle: &B, t: &TrivTsTP<B::Point>) -> Result<TrivTsTsP<B::Point>> {
    check_tstp(bundle, t)?;
    Ok(TrivTsTsP {
        p: t.p.clone(),
        theta: bundle.base().gamma_inv(&t.rho)?,
        a: t.b.clone(),
        b: -&t.a,
        x: t.x.clone(),
    })
}

/// `β̃_P(p, φ, A, Y, B) = (p, β_M(φ) ∸ Ω*_φ(A), A, ad*_Y A − B, Y)`.
pub fn beta<B: PrincipalBundle>(bundle: &B, t: &TrivTTsP<B::Point>) -> Result<TrivTsTsP<B::Point>> {
    check_ttsp(bundle, t)?;
    let base = bundle.base();
    let c = bundle.curvature_dual(&t.p, &t.phi.base_velocity(), &t.a)?;
    let theta = base.core_sub_cc(&base.beta(&t.phi)?, &c)?;
    Ok(TrivTsTsP {
        p: t.p.clone(),
        theta: base.canonical_cotangent_cotangent(&theta),
        a: t.a.clone(),
        b: &ad_star(&t.y, &t.a)? - &t.b,
        x: t.y.clone(),
    })
}

/// Slot-wise inverse of [`beta`]. The base velocity is read off the fibre
/// slot of Θ, which the core correction leaves untouched.
pub fn beta_inv<B: PrincipalBundle>(bundle: &B, t: &TrivTsTsP<B::Point>) -> Result<TrivTTsP<B::Point>> {
    check_tstsp(bundle, t)?;
    let base = bundle.base();
    let theta = base.canonical_cotangent_cotangent(&t.theta);
    let u = theta.fiber_velocity();
    let c = bundle.curvature_dual(&t.p, &u, &t.a)?;
    let phi = base.beta_inv(&base.core_add_cc(&theta, &c)?)?;
    Ok(TrivTTsP {
        p: t.p.clone(),
        phi,
        a: t.a.clone(),
        y: t.x.clone(),
        b: &ad_star(&t.x, &t.a)? - &t.b,
    })
}

// -------------------------------------------------------------------------
// pairings

/// `⟨⟨φ̃, ṽ⟩⟩ = ⟨⟨φ, 𝒱⟩⟩ + ⟨A, Z⟩ + ⟨B, X⟩`.
pub fn pair_ttsp_ttp<B: PrincipalBundle>(bundle: &B, phi: &TrivTTsP<B::Point>, v: &TrivTTP<B::Point>) -> Result<f64> {
    check_ttsp(bundle, phi)?;
    check_ttp(bundle, v)?;
    check_same_point(bundle, &phi.p, &v.p)?;
    check_same_element("Y slot of TT*P vs TTP", &phi.y, &v.y)?;
    let base = bundle.base().tangent_pairing(&phi.phi, &v.v)?;
    Ok(base + phi.a.pair(&v.z)? + phi.b.pair(&v.x)?)
}

/// `⟨ψ̃, ṽ⟩ = ⟨ρ, 𝒱⟩ + ⟨A, Y⟩ + ⟨B, Z⟩`.
pub fn pair_tstp_ttp<B: PrincipalBundle>(bundle: &B, psi: &TrivTsTP<B::Point>, v: &TrivTTP<B::Point>) -> Result<f64> {
    check_tstp(bundle, psi)?;
    check_ttp(bundle, v)?;
    check_same_point(bundle, &psi.p, &v.p)?;
    check_same_element("X slot of T*TP vs TTP", &psi.x, &v.x)?;
    let base = bundle.base().pair_cotangent_tangent(&psi.rho, &v.v)?;
    Ok(base + psi.a.pair(&v.y)? + psi.b.pair(&v.z)?)
}

/// `⟨θ̃, ψ̃⟩ = ⟨Θ, φ⟩ + ⟨B, Y⟩ + ⟨C, X⟩` for `θ̃ = (p, Θ, A, B, X)` and
/// `ψ̃ = (p, φ, A, Y, C)`.
pub fn pair_tstsp_ttsp<B: PrincipalBundle>(bundle: &B, theta: &TrivTsTsP<B::Point>, psi: &TrivTTsP<B::Point>) -> Result<f64> {
    check_tstsp(bundle, theta)?;
    check_ttsp(bundle, psi)?;
    check_same_point(bundle, &theta.p, &psi.p)?;
    check_same_dual("A slot of T*T*P vs TT*P", &theta.a, &psi.a)?;
    let base = bundle.base().pair_cotangent_cotangent(&theta.theta, &psi.phi)?;
    Ok(base + theta.b.pair(&psi.y)? + psi.b.pair(&theta.x)?)
}

// -------------------------------------------------------------------------
// sampling

/// A random tangent vector at `π(p)`.
pub fn random_base_tangent<B: PrincipalBundle>(bundle: &B, p: &B::Point, rng: &mut dyn RngCore) -> TangentVec {
    let q = bundle.project(p);
    let v = bundle.base().random_tangent_at(&q, rng);
    TangentVec::new(q, v)
}

pub fn random_ttp<B: PrincipalBundle>(bundle: &B, rng: &mut dyn RngCore) -> TrivTTP<B::Point> {
    let p = bundle.random_point(rng);
    let a = random_base_tangent(bundle, &p, rng).v;
    let b = random_base_tangent(bundle, &p, rng).v;
    let x = bundle.algebra().random_element(rng);
    let y = bundle.algebra().random_element(rng);
    random_ttp_over(bundle, p, &a, &b, x, y, rng)
}

/// A TTP element with prescribed `p, τ𝒱 = a, Tτ𝒱 = b, X, Y`.
pub fn random_ttp_over<B: PrincipalBundle>(
    bundle: &B,
    p: B::Point,
    a: &crate::Vector,
    b: &crate::Vector,
    x: LieAlgebraElement,
    y: LieAlgebraElement,
    rng: &mut dyn RngCore,
) -> TrivTTP<B::Point> {
    let q = bundle.project(&p);
    let v = bundle.base().random_second_tangent_at(&q, a, b, rng);
    let z = bundle.algebra().random_element(rng);
    TrivTTP { p, v, x, y, z }
}

pub fn random_ttsp<B: PrincipalBundle>(bundle: &B, rng: &mut dyn RngCore) -> TrivTTsP<B::Point> {
    let p = bundle.random_point(rng);
    let q = bundle.project(&p);
    let mom = random_base_tangent(bundle, &p, rng).v;
    let dq = random_base_tangent(bundle, &p, rng).v;
    let phi = bundle.base().random_tangent_cotangent_at(&q, &mom, &dq, rng);
    let g = bundle.algebra();
    TrivTTsP {
        p,
        phi,
        a: g.random_dual(rng),
        y: g.random_element(rng),
        b: g.random_dual(rng),
    }
}

pub fn random_tstp<B: PrincipalBundle>(bundle: &B, rng: &mut dyn RngCore) -> TrivTsTP<B::Point> {
    let p = bundle.random_point(rng);
    let q = bundle.project(&p);
    let vel = random_base_tangent(bundle, &p, rng).v;
    let rho = bundle.base().random_cotangent_tangent_at(&q, &vel, rng);
    let g = bundle.algebra();
    TrivTsTP {
        p,
        rho,
        x: g.random_element(rng),
        a: g.random_dual(rng),
        b: g.random_dual(rng),
    }
}

pub fn random_tstsp<B: PrincipalBundle>(bundle: &B, rng: &mut dyn RngCore) -> TrivTsTsP<B::Point> {
    let p = bundle.random_point(rng);
    let q = bundle.project(&p);
    let mom = random_base_tangent(bundle, &p, rng).v;
    let theta = bundle.base().random_cotangent_cotangent_at(&q, &mom, rng);
    let g = bundle.algebra();
    TrivTsTsP {
        p,
        theta,
        a: g.random_dual(rng),
        b: g.random_dual(rng),
        x: g.random_element(rng),
    }
}

/// A TTP element `ṽ` for which `⟨⟨φ̃, κ̃_P(ṽ)⟩⟩` is defined.
pub fn random_flip_partner<B: PrincipalBundle>(bundle: &B, phi: &TrivTTsP<B::Point>, rng: &mut dyn RngCore) -> TrivTTP<B::Point> {
    let dq = random_base_tangent(bundle, &phi.p, rng).v;
    let y = bundle.algebra().random_element(rng);
    random_ttp_over(bundle, phi.p.clone(), &phi.phi.dq, &dq, phi.y.clone(), y, rng)
}

/// A TTP element `ṽ` for which `⟨⟨φ̃, ṽ⟩⟩` is defined.
pub fn random_ttsp_partner<B: PrincipalBundle>(bundle: &B, phi: &TrivTTsP<B::Point>, rng: &mut dyn RngCore) -> TrivTTP<B::Point> {
    let vel = random_base_tangent(bundle, &phi.p, rng).v;
    let x = bundle.algebra().random_element(rng);
    random_ttp_over(bundle, phi.p.clone(), &vel, &phi.phi.dq, x, phi.y.clone(), rng)
}

/// A TTP element `ṽ` for which `⟨ψ̃, ṽ⟩` is defined.
pub fn random_tstp_partner<B: PrincipalBundle>(bundle: &B, psi: &TrivTsTP<B::Point>, rng: &mut dyn RngCore) -> TrivTTP<B::Point> {
    let dq = random_base_tangent(bundle, &psi.p, rng).v;
    let y = bundle.algebra().random_element(rng);
    random_ttp_over(bundle, psi.p.clone(), &psi.rho.q_dot, &dq, psi.x.clone(), y, rng)
}

/// A TT*P element over the same point of T*P as `θ̃`.
pub fn random_tstsp_partner<B: PrincipalBundle>(bundle: &B, theta: &TrivTsTsP<B::Point>, rng: &mut dyn RngCore) -> TrivTTsP<B::Point> {
    let q = bundle.project(&theta.p);
    let dq = random_base_tangent(bundle, &theta.p, rng).v;
    let phi = bundle.base().random_tangent_cotangent_at(&q, &theta.theta.p, &dq, rng);
    let g = bundle.algebra();
    TrivTTsP {
        p: theta.p.clone(),
        phi,
        a: theta.a.clone(),
        y: g.random_element(rng),
        b: g.random_dual(rng),
    }
}
