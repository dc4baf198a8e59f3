//! Reduction of the trivialised triple by the tangent group `TG ≅ G × 𝔤`,
//! giving the triple on the trivialised Atiyah algebroid.
//!
//! Sections of `adP` and `ad*P` are stored as a representative `(p, X)` or
//! `(p, A)`. Two representatives in one fibre are compared by carrying both to
//! [`PrincipalBundle::reference_point`], so class equality is available only
//! on bundles with a canonical section.
//!
//! | type             | tuple          | from          |
//! |------------------|----------------|---------------|
//! | [`TapElement`]   | `(𝒱, 𝒳, 𝒵)`    | [`project_ttp`]   |
//! | [`TaspElement`]  | `(φ, 𝒜, ℬ)`    | [`project_ttsp`]  |
//! | [`TsapElement`]  | `(ρ, 𝒳, 𝒞)`    | [`project_tstp`]  |
//! | [`TsaspElement`] | `(Θ, 𝒜, 𝒵)`    | [`project_tstsp`] |

use crate::base::{ensure_close, BaseModel, CotangentCotangent, CotangentTangent, SecondTangent, TangentCotangent, TangentVec};
use crate::bundle::PrincipalBundle;
use crate::error::{Error, Result};
use crate::lie::{adjoint, ad_star, bracket, coadjoint, DualAlgebraElement, GroupElement, LieAlgebraElement};
use crate::tol;
use crate::triple::{check_tstp, check_tstsp, check_ttp, check_ttsp, TrivTTP, TrivTTsP, TrivTsTP, TrivTsTsP};

fn same_fibre<B: PrincipalBundle>(bundle: &B, p: &B::Point, q: &B::Point) -> Result<()> {
    ensure_close("fibre of class representatives", &bundle.project(p), &bundle.project(q))
}

/// The `g` with `p · g = q`, or the identity when `p` and `q` coincide on a
/// bundle without gauge transport.
fn gauge<B: PrincipalBundle>(bundle: &B, p: &B::Point, q: &B::Point) -> Result<Option<GroupElement>> {
    same_fibre(bundle, p, q)?;
    match bundle.gauge_between(p, q) {
        Ok(g) => Ok(Some(g)),
        Err(Error::Unsupported(_)) if bundle.point_distance(p, q) == 0.0 => Ok(None),
        Err(e) => Err(e),
    }
}

/// `[(p, X)]` in `adP = (P × 𝔤)/G`.
#[derive(Debug, Clone)]
pub struct AdClass<P> {
    pub p: P,
    pub x: LieAlgebraElement,
}

impl<P: Clone> AdClass<P> {
    pub fn new(p: P, x: LieAlgebraElement) -> Self {
        AdClass { p, x }
    }

    /// The representative at `q`: with `p · g = q`, it is `Ad_{g⁻¹} X`.
    pub fn at<B: PrincipalBundle<Point = P>>(&self, bundle: &B, q: &P) -> Result<LieAlgebraElement> {
        self.x.ensure_same_algebra(bundle.algebra())?;
        match gauge(bundle, &self.p, q)? {
            Some(g) => adjoint(&g.inverse(), &self.x),
            None => Ok(self.x.clone()),
        }
    }

    /// The same class with its representative moved to `q`.
    pub fn moved_to<B: PrincipalBundle<Point = P>>(&self, bundle: &B, q: &P) -> Result<Self> {
        Ok(AdClass::new(q.clone(), self.at(bundle, q)?))
    }

    /// The algebra value at the reference point over `π(p)`.
    pub fn canonical<B: PrincipalBundle<Point = P>>(&self, bundle: &B) -> Result<LieAlgebraElement> {
        self.at(bundle, &bundle.reference_point(&self.p)?)
    }

    pub fn distance<B: PrincipalBundle<Point = P>>(&self, bundle: &B, other: &Self) -> Result<f64> {
        same_fibre(bundle, &self.p, &other.p)?;
        Ok(self.canonical(bundle)?.max_abs_diff(&other.canonical(bundle)?))
    }

    pub fn add<B: PrincipalBundle<Point = P>>(&self, bundle: &B, other: &Self) -> Result<Self> {
        Ok(AdClass::new(self.p.clone(), &self.x + &other.at(bundle, &self.p)?))
    }

    pub fn sub<B: PrincipalBundle<Point = P>>(&self, bundle: &B, other: &Self) -> Result<Self> {
        Ok(AdClass::new(self.p.clone(), &self.x - &other.at(bundle, &self.p)?))
    }

    pub fn scale(&self, s: f64) -> Self {
        AdClass::new(self.p.clone(), &self.x * s)
    }

    /// `[[(p, X)], [(p, Y)]] = [(p, [X, Y])]`.
    pub fn bracket<B: PrincipalBundle<Point = P>>(&self, bundle: &B, other: &Self) -> Result<Self> {
        Ok(AdClass::new(self.p.clone(), bracket(&self.x, &other.at(bundle, &self.p)?)?))
    }
}

/// `[(p, A)]` in `ad*P = (P × 𝔤*)/G`.
#[derive(Debug, Clone)]
pub struct AdStarClass<P> {
    pub p: P,
    pub a: DualAlgebraElement,
}

impl<P: Clone> AdStarClass<P> {
    pub fn new(p: P, a: DualAlgebraElement) -> Self {
        AdStarClass { p, a }
    }

    /// The representative at `q`: with `p · g = q`, it is `Ad*_g A`.
    pub fn at<B: PrincipalBundle<Point = P>>(&self, bundle: &B, q: &P) -> Result<DualAlgebraElement> {
        self.a.ensure_same_algebra(bundle.algebra())?;
        match gauge(bundle, &self.p, q)? {
            Some(g) => coadjoint(&g, &self.a),
            None => Ok(self.a.clone()),
        }
    }

    pub fn moved_to<B: PrincipalBundle<Point = P>>(&self, bundle: &B, q: &P) -> Result<Self> {
        Ok(AdStarClass::new(q.clone(), self.at(bundle, q)?))
    }

    pub fn canonical<B: PrincipalBundle<Point = P>>(&self, bundle: &B) -> Result<DualAlgebraElement> {
        self.at(bundle, &bundle.reference_point(&self.p)?)
    }

    pub fn distance<B: PrincipalBundle<Point = P>>(&self, bundle: &B, other: &Self) -> Result<f64> {
        same_fibre(bundle, &self.p, &other.p)?;
        Ok(self.canonical(bundle)?.max_abs_diff(&other.canonical(bundle)?))
    }

    pub fn add<B: PrincipalBundle<Point = P>>(&self, bundle: &B, other: &Self) -> Result<Self> {
        Ok(AdStarClass::new(self.p.clone(), &self.a + &other.at(bundle, &self.p)?))
    }

    pub fn scale(&self, s: f64) -> Self {
        AdStarClass::new(self.p.clone(), &self.a * s)
    }

    /// `⟨[(p, A)], [(p, X)]⟩ = ⟨A, X⟩`.
    pub fn pair<B: PrincipalBundle<Point = P>>(&self, bundle: &B, x: &AdClass<P>) -> Result<f64> {
        self.a.pair(&x.at(bundle, &self.p)?)
    }
}

#[derive(Debug, Clone)]
pub struct TapElement<P> {
    pub v: SecondTangent,
    pub x: AdClass<P>,
    pub z: AdClass<P>,
}

#[derive(Debug, Clone)]
pub struct TaspElement<P> {
    pub phi: TangentCotangent,
    pub a: AdStarClass<P>,
    pub b: AdStarClass<P>,
}

#[derive(Debug, Clone)]
pub struct TsapElement<P> {
    pub rho: CotangentTangent,
    pub x: AdClass<P>,
    pub c: AdStarClass<P>,
}

#[derive(Debug, Clone)]
pub struct TsaspElement<P> {
    pub theta: CotangentCotangent,
    pub a: AdStarClass<P>,
    pub z: AdClass<P>,
}

/// An element `(v, 𝒳)` of `TM ⊕ adP`.
#[derive(Debug, Clone)]
pub struct AtiyahVector<P> {
    pub v: TangentVec,
    pub x: AdClass<P>,
}

pub fn tap_distance<B: PrincipalBundle>(bundle: &B, a: &TapElement<B::Point>, b: &TapElement<B::Point>) -> Result<f64> {
    Ok(a.v
        .max_abs_diff(&b.v)
        .max(a.x.distance(bundle, &b.x)?)
        .max(a.z.distance(bundle, &b.z)?))
}

pub fn tasp_distance<B: PrincipalBundle>(bundle: &B, a: &TaspElement<B::Point>, b: &TaspElement<B::Point>) -> Result<f64> {
    Ok(a.phi
        .max_abs_diff(&b.phi)
        .max(a.a.distance(bundle, &b.a)?)
        .max(a.b.distance(bundle, &b.b)?))
}

pub fn tsap_distance<B: PrincipalBundle>(bundle: &B, a: &TsapElement<B::Point>, b: &TsapElement<B::Point>) -> Result<f64> {
    Ok(bundle
        .base()
        .cotangent_tangent_distance(&a.rho, &b.rho)
        .max(a.x.distance(bundle, &b.x)?)
        .max(a.c.distance(bundle, &b.c)?))
}

pub fn tsasp_distance<B: PrincipalBundle>(bundle: &B, a: &TsaspElement<B::Point>, b: &TsaspElement<B::Point>) -> Result<f64> {
    Ok(bundle
        .base()
        .cotangent_cotangent_distance(&a.theta, &b.theta)
        .max(a.a.distance(bundle, &b.a)?)
        .max(a.z.distance(bundle, &b.z)?))
}

// -------------------------------------------------------------------------
// projections

/// `(p, 𝒱, X, Y, Z) ↦ (𝒱, [(p, X)], [(p, [Y, X] + Z)])`.
pub fn project_ttp<B: PrincipalBundle>(bundle: &B, t: &TrivTTP<B::Point>) -> Result<TapElement<B::Point>> {
    check_ttp(bundle, t)?;
    Ok(TapElement {
        v: t.v.clone(),
        x: AdClass::new(t.p.clone(), t.x.clone()),
        z: AdClass::new(t.p.clone(), &bracket(&t.y, &t.x)? + &t.z),
    })
}

/// `(p, φ, A, Y, B) ↦ (φ, [(p, A)], [(p, B − ad*_Y A)])`.
pub fn project_ttsp<B: PrincipalBundle>(bundle: &B, t: &TrivTTsP<B::Point>) -> Result<TaspElement<B::Point>> {
    check_ttsp(bundle, t)?;
    Ok(TaspElement {
        phi: t.phi.clone(),
        a: AdStarClass::new(t.p.clone(), t.a.clone()),
        b: AdStarClass::new(t.p.clone(), &t.b - &ad_star(&t.y, &t.a)?),
    })
}

/// `‖A + ad*_X B‖` for `(p, ρ, X, A, B)`.
pub fn tstp_residual<B: PrincipalBundle>(bundle: &B, t: &TrivTsTP<B::Point>) -> Result<f64> {
    check_tstp(bundle, t)?;
    Ok((&t.a + &ad_star(&t.x, &t.b)?).norm())
}

pub fn reducible_tstp<B: PrincipalBundle>(bundle: &B, t: &TrivTsTP<B::Point>) -> Result<bool> {
    Ok(tstp_residual(bundle, t)? <= tol::REDUCIBLE)
}

/// Overwrites `A := −ad*_X B`, landing on the reducible set.
pub fn coisotropic_tstp<B: PrincipalBundle>(bundle: &B, t: &TrivTsTP<B::Point>) -> Result<TrivTsTP<B::Point>> {
    check_tstp(bundle, t)?;
    log::debug!("overwriting the A slot of a T*TP element to make it reducible");
    Ok(TrivTsTP {
        a: -&ad_star(&t.x, &t.b)?,
        ..t.clone()
    })
}

/// `(p, ρ, X, −ad*_X C, C) ↦ (ρ, [(p, X)], [(p, C)])`.
pub fn project_tstp<B: PrincipalBundle>(bundle: &B, t: &TrivTsTP<B::Point>) -> Result<TsapElement<B::Point>> {
    let residual = tstp_residual(bundle, t)?;
    if !(residual <= tol::REDUCIBLE) {
        return Err(Error::NotReducible { residual });
    }
    Ok(TsapElement {
        rho: bundle.base().canonical_cotangent_tangent(&t.rho),
        x: AdClass::new(t.p.clone(), t.x.clone()),
        c: AdStarClass::new(t.p.clone(), t.b.clone()),
    })
}

/// `‖B − ad*_Z A‖` for `(p, Θ, A, B, Z)`.
pub fn tstsp_residual<B: PrincipalBundle>(bundle: &B, t: &TrivTsTsP<B::Point>) -> Result<f64> {
    check_tstsp(bundle, t)?;
    Ok((&t.b - &ad_star(&t.x, &t.a)?).norm())
}

pub fn reducible_tstsp<B: PrincipalBundle>(bundle: &B, t: &TrivTsTsP<B::Point>) -> Result<bool> {
    Ok(tstsp_residual(bundle, t)? <= tol::REDUCIBLE)
}

/// Overwrites `B := ad*_Z A`.
pub fn coisotropic_tstsp<B: PrincipalBundle>(bundle: &B, t: &TrivTsTsP<B::Point>) -> Result<TrivTsTsP<B::Point>> {
    check_tstsp(bundle, t)?;
    log::debug!("overwriting the B slot of a T*T*P element to make it reducible");
    Ok(TrivTsTsP {
        b: ad_star(&t.x, &t.a)?,
        ..t.clone()
    })
}

/// `(p, Θ, A, ad*_Z A, Z) ↦ (Θ, [(p, A)], [(p, Z)])`.
pub fn project_tstsp<B: PrincipalBundle>(bundle: &B, t: &TrivTsTsP<B::Point>) -> Result<TsaspElement<B::Point>> {
    let residual = tstsp_residual(bundle, t)?;
    if !(residual <= tol::REDUCIBLE) {
        return Err(Error::NotReducible { residual });
    }
    Ok(TsaspElement {
        theta: bundle.base().canonical_cotangent_cotangent(&t.theta),
        a: AdStarClass::new(t.p.clone(), t.a.clone()),
        z: AdClass::new(t.p.clone(), t.x.clone()),
    })
}

// -------------------------------------------------------------------------
// reduced maps

/// `ε̃(ω, [(p, X)], [(p, C)]) = (α_M⁻¹(ω) ∸ Ω*_{(p, πω)}(C), [(p, C)], [(p, −ad*_X C)])`.
pub fn epsilon_a<B: PrincipalBundle>(bundle: &B, e: &TsapElement<B::Point>) -> Result<TaspElement<B::Point>> {
    let p = &e.c.p;
    let base = bundle.base();
    let x = e.x.at(bundle, p)?;
    let c = bundle.curvature_dual(p, &e.rho.base_tangent(), &e.c.a)?;
    let phi = base.core_sub_tc(&base.alpha_inv(&e.rho)?, &c)?;
    Ok(TaspElement {
        phi,
        a: e.c.clone(),
        b: AdStarClass::new(p.clone(), -&ad_star(&x, &e.c.a)?),
    })
}

/// `η̃(Θ, [(p, A)], [(p, Z)]) = (β_M⁻¹(Θ) ∸ Ω*_{(p, u)}(A), [(p, A)], [(p, −ad*_Z A)])`
/// where `u` is the velocity carried by the fibre slot of Θ.
pub fn eta_a<B: PrincipalBundle>(bundle: &B, e: &TsaspElement<B::Point>) -> Result<TaspElement<B::Point>> {
    let p = &e.a.p;
    let base = bundle.base();
    let z = e.z.at(bundle, p)?;
    let theta = base.canonical_cotangent_cotangent(&e.theta);
    let c = bundle.curvature_dual(p, &theta.fiber_velocity(), &e.a.a)?;
    let phi = base.core_sub_tc(&base.beta_inv(&theta)?, &c)?;
    Ok(TaspElement {
        phi,
        a: e.a.clone(),
        b: AdStarClass::new(p.clone(), -&ad_star(&z, &e.a.a)?),
    })
}

/// `[(p, Ω_p(τ𝒱, Tτ𝒱))]` with the representative at `p`.
fn curvature_class<B: PrincipalBundle>(bundle: &B, p: &B::Point, v: &SecondTangent) -> Result<AdClass<B::Point>> {
    let w = bundle.curvature(p, &v.base_tangent(), &v.tangent_direction())?;
    Ok(AdClass::new(p.clone(), w))
}

/// Residual of the reduced flip relation between `(𝒱, 𝒳, 𝒵₁)` and
/// `(𝒰, 𝒴, 𝒵₂)`: `𝒰 = κ𝒱` and `𝒵₂ = 𝒵₁ + [𝒳, 𝒴] + [(p, Ω_p(τ𝒱, Tτ𝒱))]`.
pub fn reduced_flip_residual<B: PrincipalBundle>(bundle: &B, a: &TapElement<B::Point>, b: &TapElement<B::Point>) -> Result<f64> {
    let base = bundle.base();
    base.check_second_tangent(&a.v)?;
    base.check_second_tangent(&b.v)?;
    let mut r = base.kappa(&a.v)?.max_abs_diff(&b.v);
    if !(r <= tol::BASE_MATCH) {
        return Ok(r);
    }
    let p = &a.x.p;
    let rhs = a
        .z
        .add(bundle, &a.x.bracket(bundle, &b.x)?)?
        .add(bundle, &curvature_class(bundle, p, &a.v)?)?;
    r = r.max(b.z.distance(bundle, &rhs)?);
    Ok(r)
}

pub fn reduced_flip_related<B: PrincipalBundle>(bundle: &B, a: &TapElement<B::Point>, b: &TapElement<B::Point>) -> Result<bool> {
    Ok(reduced_flip_residual(bundle, a, b)? <= tol::BASE_MATCH)
}

/// The relation read as a linear map once `𝒴` is fixed:
/// `(𝒱, 𝒳, 𝒵₁) ↦ (κ𝒱, 𝒴, 𝒵₁ + [𝒳, 𝒴] + [(p, Ω_p(τ𝒱, Tτ𝒱))])`.
pub fn reduced_flip_forward<B: PrincipalBundle>(
    bundle: &B,
    a: &TapElement<B::Point>,
    y: &AdClass<B::Point>,
) -> Result<TapElement<B::Point>> {
    let p = &a.x.p;
    let z = a
        .z
        .moved_to(bundle, p)?
        .add(bundle, &a.x.bracket(bundle, y)?)?
        .add(bundle, &curvature_class(bundle, p, &a.v)?)?;
    Ok(TapElement {
        v: bundle.base().kappa(&a.v)?,
        x: y.clone(),
        z,
    })
}

/// The inverse reading once `𝒳` is fixed:
/// `(𝒰, 𝒴, 𝒵₂) ↦ (κ𝒰, 𝒳, 𝒵₂ − [𝒳, 𝒴] − [(p, Ω_p(τκ𝒰, Tτκ𝒰))])`.
pub fn reduced_flip_backward<B: PrincipalBundle>(
    bundle: &B,
    b: &TapElement<B::Point>,
    x: &AdClass<B::Point>,
) -> Result<TapElement<B::Point>> {
    let p = &x.p;
    let v = bundle.base().kappa(&b.v)?;
    let z = b
        .z
        .moved_to(bundle, p)?
        .sub(bundle, &x.bracket(bundle, &b.x)?)?
        .sub(bundle, &curvature_class(bundle, p, &v)?)?;
    Ok(TapElement { v, x: x.clone(), z })
}

/// The trivialised anchor `pr₁ : TM ⊕ adP → TM`.
pub fn anchor<P>(e: &AtiyahVector<P>) -> TangentVec {
    e.v.clone()
}

// -------------------------------------------------------------------------
// orbit actions of G × 𝔤

fn act_point<B: PrincipalBundle>(bundle: &B, p: &B::Point, g: &GroupElement) -> Result<B::Point> {
    bundle.right_act(p, g)
}

/// `(p, 𝒱, X, Y, Z)·(g, W) = (pg, 𝒱, Ad_{g⁻¹}X, Ad_{g⁻¹}Y + W, [Ad_{g⁻¹}X, W] + Ad_{g⁻¹}Z)`.
pub fn act_ttp<B: PrincipalBundle>(
    bundle: &B,
    t: &TrivTTP<B::Point>,
    g: &GroupElement,
    w: &LieAlgebraElement,
) -> Result<TrivTTP<B::Point>> {
    check_ttp(bundle, t)?;
    let gi = g.inverse();
    let x = adjoint(&gi, &t.x)?;
    Ok(TrivTTP {
        p: act_point(bundle, &t.p, g)?,
        v: t.v.clone(),
        y: &adjoint(&gi, &t.y)? + w,
        z: &bracket(&x, w)? + &adjoint(&gi, &t.z)?,
        x,
    })
}

/// `(p, φ, A, Y, B)·(g, W) = (pg, φ, Ad*_g A, Ad_{g⁻¹}Y + W, Ad*_g B + ad*_W Ad*_g A)`.
pub fn act_ttsp<B: PrincipalBundle>(
    bundle: &B,
    t: &TrivTTsP<B::Point>,
    g: &GroupElement,
    w: &LieAlgebraElement,
) -> Result<TrivTTsP<B::Point>> {
    check_ttsp(bundle, t)?;
    let a = coadjoint(g, &t.a)?;
    Ok(TrivTTsP {
        p: act_point(bundle, &t.p, g)?,
        phi: t.phi.clone(),
        y: &adjoint(&g.inverse(), &t.y)? + w,
        b: &coadjoint(g, &t.b)? + &ad_star(w, &a)?,
        a,
    })
}

/// `(p, ρ, X, A, B)·g = (pg, ρ, Ad_{g⁻¹}X, Ad*_g A, Ad*_g B)`.
pub fn act_tstp<B: PrincipalBundle>(bundle: &B, t: &TrivTsTP<B::Point>, g: &GroupElement) -> Result<TrivTsTP<B::Point>> {
    check_tstp(bundle, t)?;
    Ok(TrivTsTP {
        p: act_point(bundle, &t.p, g)?,
        rho: t.rho.clone(),
        x: adjoint(&g.inverse(), &t.x)?,
        a: coadjoint(g, &t.a)?,
        b: coadjoint(g, &t.b)?,
    })
}

/// `(p, Θ, A, B, Z)·g = (pg, Θ, Ad*_g A, Ad*_g B, Ad_{g⁻¹}Z)`.
pub fn act_tstsp<B: PrincipalBundle>(bundle: &B, t: &TrivTsTsP<B::Point>, g: &GroupElement) -> Result<TrivTsTsP<B::Point>> {
    check_tstsp(bundle, t)?;
    Ok(TrivTsTsP {
        p: act_point(bundle, &t.p, g)?,
        theta: t.theta.clone(),
        a: coadjoint(g, &t.a)?,
        b: coadjoint(g, &t.b)?,
        x: adjoint(&g.inverse(), &t.x)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::{EuclideanBundle, FrameBundle, FramePoint, GroupBundle};
    use crate::lie::LieAlgebra;
    use crate::triple::{
        beta_inv, flip, pair_tstp_ttp, pair_ttsp_ttp, random_base_tangent, random_flip_partner, random_tstp, random_tstsp,
        random_ttp, random_ttsp, tulczyjew_alpha, tulczyjew_alpha_inv,
    };
    use crate::Vector;
    use nalgebra::{DMatrix, Vector3};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn twisted() -> EuclideanBundle {
        let a0 = DMatrix::from_row_slice(3, 2, &[0.3, -0.1, 0.0, 0.5, 0.2, 0.0]);
        let s1 = DMatrix::from_row_slice(3, 2, &[0.0, 1.0, 0.4, 0.0, -0.2, 0.3]);
        let s2 = DMatrix::from_row_slice(3, 2, &[-0.5, 0.0, 0.1, 0.2, 0.0, 0.7]);
        EuclideanBundle::affine(2, LieAlgebra::so3(), a0, vec![s1, s2]).unwrap()
    }

    fn v3(x: f64, y: f64, z: f64) -> Vector {
        Vector::from_vec(vec![x, y, z])
    }

    fn gauge_sample<B: PrincipalBundle>(b: &B, r: &mut ChaCha8Rng) -> (GroupElement, LieAlgebraElement) {
        (b.random_group_element(r).unwrap(), b.algebra().random_element(r))
    }

    fn projections_are_gauge_invariant<B: PrincipalBundle>(b: &B, seed: u64) {
        let mut r = rng(seed);
        for _ in 0..200 {
            let (g, w) = gauge_sample(b, &mut r);
            let t = random_ttp(b, &mut r);
            let d = tap_distance(b, &project_ttp(b, &t).unwrap(), &project_ttp(b, &act_ttp(b, &t, &g, &w).unwrap()).unwrap());
            assert!(d.unwrap() < 1e-12);

            let t = random_ttsp(b, &mut r);
            let moved = act_ttsp(b, &t, &g, &w).unwrap();
            let d = tasp_distance(b, &project_ttsp(b, &t).unwrap(), &project_ttsp(b, &moved).unwrap());
            assert!(d.unwrap() < 1e-12);

            let t = coisotropic_tstp(b, &random_tstp(b, &mut r)).unwrap();
            let moved = act_tstp(b, &t, &g).unwrap();
            assert!(tstp_residual(b, &moved).unwrap() < 1e-12);
            let d = tsap_distance(b, &project_tstp(b, &t).unwrap(), &project_tstp(b, &moved).unwrap());
            assert!(d.unwrap() < 1e-12);

            let t = coisotropic_tstsp(b, &random_tstsp(b, &mut r)).unwrap();
            let moved = act_tstsp(b, &t, &g).unwrap();
            assert!(tstsp_residual(b, &moved).unwrap() < 1e-12);
            let d = tsasp_distance(b, &project_tstsp(b, &t).unwrap(), &project_tstsp(b, &moved).unwrap());
            assert!(d.unwrap() < 1e-12);
        }
    }

    #[test]
    fn projections_are_constant_on_orbits() {
        projections_are_gauge_invariant(&FrameBundle::new(), 1);
        projections_are_gauge_invariant(&GroupBundle::so3(), 2);
        projections_are_gauge_invariant(&twisted(), 3);
    }

    #[test]
    fn orbit_actions_preserve_the_pairings() {
        // the tangent group acts by symplectomorphisms, so the duality pairing is preserved
        let b = twisted();
        let mut r = rng(4);
        for _ in 0..200 {
            let (g, w) = gauge_sample(&b, &mut r);
            let phi = random_ttsp(&b, &mut r);
            let v = crate::triple::random_ttsp_partner(&b, &phi, &mut r);
            let before = pair_ttsp_ttp(&b, &phi, &v).unwrap();
            let after = pair_ttsp_ttp(&b, &act_ttsp(&b, &phi, &g, &w).unwrap(), &act_ttp(&b, &v, &g, &w).unwrap()).unwrap();
            assert!((before - after).abs() < 1e-10 * (1.0 + before.abs()));

            let psi = coisotropic_tstp(&b, &random_tstp(&b, &mut r)).unwrap();
            let v = crate::triple::random_tstp_partner(&b, &psi, &mut r);
            let before = pair_tstp_ttp(&b, &psi, &v).unwrap();
            let after = pair_tstp_ttp(&b, &act_tstp(&b, &psi, &g).unwrap(), &act_ttp(&b, &v, &g, &w).unwrap()).unwrap();
            assert!((before - after).abs() < 1e-10 * (1.0 + before.abs()));
        }
    }

    #[test]
    fn ttsp_orbit_term_matches_its_dual_form() {
        // (Ad_g ∘ ad_W)* A computed by pairing against a basis
        let alg = LieAlgebra::so3();
        let mut r = rng(5);
        for _ in 0..100 {
            let g = GroupBundle::so3().random_group_element(&mut r).unwrap();
            let w = alg.random_element(&mut r);
            let a = alg.random_dual(&mut r);
            let direct = ad_star(&w, &coadjoint(&g, &a).unwrap()).unwrap();
            for i in 0..3 {
                let e = alg.basis(i);
                let lhs = a.pair(&adjoint(&g, &bracket(&w, &e).unwrap()).unwrap()).unwrap();
                assert!((direct.coeffs()[i] - lhs).abs() < 1e-12);
            }
        }
    }

    fn commuting_epsilon<B: PrincipalBundle>(b: &B, seed: u64) -> f64 {
        let mut r = rng(seed);
        let mut worst = 0.0_f64;
        for _ in 0..500 {
            let t = coisotropic_tstp(b, &random_tstp(b, &mut r)).unwrap();
            let lhs = project_ttsp(b, &tulczyjew_alpha_inv(b, &t).unwrap()).unwrap();
            let rhs = epsilon_a(b, &project_tstp(b, &t).unwrap()).unwrap();
            worst = worst.max(tasp_distance(b, &lhs, &rhs).unwrap());
        }
        worst
    }

    fn commuting_eta<B: PrincipalBundle>(b: &B, seed: u64) -> f64 {
        let mut r = rng(seed);
        let mut worst = 0.0_f64;
        for _ in 0..500 {
            let t = coisotropic_tstsp(b, &random_tstsp(b, &mut r)).unwrap();
            let lhs = project_ttsp(b, &beta_inv(b, &t).unwrap()).unwrap();
            let rhs = eta_a(b, &project_tstsp(b, &t).unwrap()).unwrap();
            worst = worst.max(tasp_distance(b, &lhs, &rhs).unwrap());
        }
        worst
    }

    #[test]
    fn reductions_commute_with_the_triple_maps() {
        assert!(commuting_epsilon(&FrameBundle::new(), 6) < 1e-10);
        assert!(commuting_epsilon(&GroupBundle::so3(), 7) < 1e-10);
        assert!(commuting_epsilon(&twisted(), 8) < 1e-10);
        assert!(commuting_eta(&FrameBundle::new(), 9) < 1e-10);
        assert!(commuting_eta(&GroupBundle::so3(), 10) < 1e-10);
        assert!(commuting_eta(&twisted(), 11) < 1e-10);
    }

    #[test]
    fn reduced_flip_commutes_with_projection() {
        let b = twisted();
        let sphere = FrameBundle::new();
        let mut r = rng(12);
        for _ in 0..1000 {
            let t = random_ttp(&b, &mut r);
            let lhs = project_ttp(&b, &t).unwrap();
            let rhs = project_ttp(&b, &flip(&b, &t).unwrap()).unwrap();
            assert!(reduced_flip_residual(&b, &lhs, &rhs).unwrap() < 1e-12);
            let fwd = reduced_flip_forward(&b, &lhs, &rhs.x).unwrap();
            assert!(tap_distance(&b, &fwd, &rhs).unwrap() < 1e-12);
            let back = reduced_flip_backward(&b, &rhs, &lhs.x).unwrap();
            assert!(tap_distance(&b, &back, &lhs).unwrap() < 1e-12);

            let t = random_ttp(&sphere, &mut r);
            let lhs = project_ttp(&sphere, &t).unwrap();
            let rhs = project_ttp(&sphere, &flip(&sphere, &t).unwrap()).unwrap();
            assert!(reduced_flip_related(&sphere, &lhs, &rhs).unwrap());
        }
    }

    #[test]
    fn reduced_flip_rejects_wrong_partners() {
        let b = twisted();
        let mut r = rng(13);
        let t = random_ttp(&b, &mut r);
        let lhs = project_ttp(&b, &t).unwrap();
        let mut rhs = project_ttp(&b, &flip(&b, &t).unwrap()).unwrap();
        rhs.z.x = &rhs.z.x + &b.algebra().basis(0);
        assert!(!reduced_flip_related(&b, &lhs, &rhs).unwrap());
        let mut rhs = project_ttp(&b, &flip(&b, &t).unwrap()).unwrap();
        rhs.v.dq_dot = -&rhs.v.dq_dot;
        assert!(!reduced_flip_related(&b, &lhs, &rhs).unwrap());
    }

    fn combine(a: &Vector, b: &Vector, s1: f64, s2: f64) -> Vector {
        a * s1 + b * s2
    }

    #[test]
    fn fixed_side_maps_are_linear() {
        let b = twisted();
        let mut r = rng(14);
        let t1 = random_ttp(&b, &mut r);
        let q_dot = random_base_tangent(&b, &t1.p, &mut r).v;
        let t2 = crate::triple::random_ttp_over(
            &b,
            t1.p.clone(),
            &q_dot,
            &t1.v.dq,
            b.algebra().random_element(&mut r),
            b.algebra().random_element(&mut r),
            &mut r,
        );
        let y = AdClass::new(t1.p.clone(), b.algebra().random_element(&mut r));
        let a1 = project_ttp(&b, &t1).unwrap();
        let a2 = project_ttp(&b, &t2).unwrap();
        let (s1, s2) = (0.7, -1.3);
        // the vector structure over Tτ𝒱 on the left
        let v = SecondTangent::new(
            t1.v.q.clone(),
            combine(&t1.v.q_dot, &t2.v.q_dot, s1, s2),
            t1.v.dq.clone(),
            combine(&t1.v.dq_dot, &t2.v.dq_dot, s1, s2),
        );
        let combo = TapElement {
            v,
            x: a1.x.scale(s1).add(&b, &a2.x.scale(s2)).unwrap(),
            z: a1.z.scale(s1).add(&b, &a2.z.scale(s2)).unwrap(),
        };
        let f1 = reduced_flip_forward(&b, &a1, &y).unwrap();
        let f2 = reduced_flip_forward(&b, &a2, &y).unwrap();
        let f = reduced_flip_forward(&b, &combo, &y).unwrap();
        // and over τ𝒰 on the right
        let expect = TapElement {
            v: SecondTangent::new(
                f1.v.q.clone(),
                f1.v.q_dot.clone(),
                combine(&f1.v.dq, &f2.v.dq, s1, s2),
                combine(&f1.v.dq_dot, &f2.v.dq_dot, s1, s2),
            ),
            x: y.clone(),
            z: f1.z.scale(s1).add(&b, &f2.z.scale(s2)).unwrap(),
        };
        assert!(tap_distance(&b, &f, &expect).unwrap() < 1e-12);
    }

    #[test]
    fn sphere_examples() {
        let b = FrameBundle::new();
        let g = b.algebra();
        let p = FramePoint::new(Vector3::z(), Vector3::x(), Vector3::y()).unwrap();
        let n = v3(0.0, 0.0, 1.0);
        let (v, w, u) = (v3(1.0, 0.0, 0.0), v3(0.0, 2.0, 0.0), v3(0.5, 0.5, 0.0));
        let t = TrivTTP {
            p: p.clone(),
            v: SecondTangent::new(n.clone(), v.clone(), w.clone(), u.clone()),
            x: g.element_from_slice(&[0.3]).unwrap(),
            y: g.element_from_slice(&[-0.7]).unwrap(),
            z: g.element_from_slice(&[1.1]).unwrap(),
        };
        let red = project_ttp(&b, &t).unwrap();
        assert_eq!(red.v, t.v);
        assert_eq!(red.x.canonical(&b).unwrap(), t.x);
        assert_eq!(red.z.canonical(&b).unwrap(), t.z);

        // z₂ = z₁ + ⟨w × v | n⟩
        let other = TapElement {
            v: SecondTangent::new(n.clone(), w.clone(), v.clone(), u.clone()),
            x: AdClass::new(p.clone(), g.element_from_slice(&[5.0]).unwrap()),
            z: AdClass::new(p.clone(), g.element_from_slice(&[1.1 - 2.0]).unwrap()),
        };
        assert!(reduced_flip_related(&b, &red, &other).unwrap());

        // ε̃(ω, x, c) = (α⁻¹(ω) ∸ c⟨v × n | ·⟩, c, 0)
        let rho = CotangentTangent::new(n.clone(), v.clone(), v3(0.0, 0.4, 0.0), v3(0.2, -0.3, 0.0));
        let c = 0.8;
        let e = TsapElement {
            rho: rho.clone(),
            x: AdClass::new(p.clone(), g.element_from_slice(&[2.0]).unwrap()),
            c: AdStarClass::new(p.clone(), g.dual_from_slice(&[c]).unwrap()),
        };
        let out = epsilon_a(&b, &e).unwrap();
        let mut expect = b.base().alpha_inv(&rho).unwrap();
        expect.dp -= v3(0.0, 1.0, 0.0) * -c; // v × n = e₁ × e₃ = −e₂
        assert!(out.phi.max_abs_diff(&expect) < 1e-15);
        assert_eq!(out.a.a.coeffs()[0], c);
        assert_eq!(out.b.a.coeffs()[0], 0.0);

        // η̃(Θ, a, z) = (β⁻¹(Θ) ∸ a⟨v × n | ·⟩, a, 0), v the fibre velocity of Θ
        let theta = CotangentCotangent::new(n.clone(), v3(0.0, 0.5, 0.0), v3(0.1, 0.0, 0.0), v.clone());
        let e = TsaspElement {
            theta: theta.clone(),
            a: AdStarClass::new(p.clone(), g.dual_from_slice(&[c]).unwrap()),
            z: AdClass::new(p.clone(), g.element_from_slice(&[-1.0]).unwrap()),
        };
        let out = eta_a(&b, &e).unwrap();
        let mut expect = b.base().beta_inv(&theta).unwrap();
        expect.dp -= v3(0.0, 1.0, 0.0) * -c;
        assert!(out.phi.max_abs_diff(&expect) < 1e-15);
        assert_eq!(out.b.a.coeffs()[0], 0.0);
    }

    #[test]
    fn sphere_classes_are_plain_scalars() {
        let b = FrameBundle::new();
        let mut r = rng(15);
        for _ in 0..100 {
            let p = b.random_point(&mut r);
            let x = AdClass::new(p.clone(), b.algebra().random_element(&mut r));
            let a = AdStarClass::new(p.clone(), b.algebra().random_dual(&mut r));
            let q = b.right_act(&p, &b.random_group_element(&mut r).unwrap()).unwrap();
            assert!(x.at(&b, &q).unwrap().max_abs_diff(&x.x) < 1e-15);
            assert!(a.at(&b, &q).unwrap().max_abs_diff(&a.a) < 1e-15);
            assert!(x.canonical(&b).unwrap().max_abs_diff(&x.x) < 1e-15);
        }
    }

    #[test]
    fn class_operations_are_well_defined() {
        for seed in 0..2 {
            let b = GroupBundle::so3();
            let t = twisted();
            let mut r = rng(16 + seed);
            for _ in 0..200 {
                check_bracket_and_pairing(&b, &mut r);
                check_bracket_and_pairing(&t, &mut r);
            }
        }
    }

    fn check_bracket_and_pairing<B: PrincipalBundle>(b: &B, r: &mut ChaCha8Rng) {
        let p = b.random_point(r);
        let g = b.random_group_element(r).unwrap();
        let h = b.random_group_element(r).unwrap();
        let x = AdClass::new(p.clone(), b.algebra().random_element(r));
        let y = AdClass::new(p.clone(), b.algebra().random_element(r));
        let a = AdStarClass::new(p.clone(), b.algebra().random_dual(r));
        let xg = x.moved_to(b, &b.right_act(&p, &g).unwrap()).unwrap();
        let yh = y.moved_to(b, &b.right_act(&p, &h).unwrap()).unwrap();
        let direct = AdClass::new(p.clone(), bracket(&x.x, &y.x).unwrap());
        assert!(xg.bracket(b, &yh).unwrap().distance(b, &direct).unwrap() < 1e-12);
        let ag = a.moved_to(b, &b.right_act(&p, &h).unwrap()).unwrap();
        let before = a.a.pair(&x.x).unwrap();
        assert!((ag.pair(b, &xg).unwrap() - before).abs() < 1e-12);
        assert!(xg.distance(b, &x).unwrap() < 1e-12);
        assert!(ag.distance(b, &a).unwrap() < 1e-12);
    }

    #[test]
    fn representative_change_leaves_epsilon_unchanged() {
        let b = GroupBundle::so3();
        let mut r = rng(18);
        for _ in 0..100 {
            let t = coisotropic_tstp(&b, &random_tstp(&b, &mut r)).unwrap();
            let e = project_tstp(&b, &t).unwrap();
            let g = b.random_group_element(&mut r).unwrap();
            let q = b.right_act(&e.c.p, &g).unwrap();
            let moved = TsapElement {
                rho: e.rho.clone(),
                x: e.x.moved_to(&b, &q).unwrap(),
                c: e.c.moved_to(&b, &q).unwrap(),
            };
            let d = tasp_distance(&b, &epsilon_a(&b, &e).unwrap(), &epsilon_a(&b, &moved).unwrap()).unwrap();
            assert!(d < 1e-12);

            let t = coisotropic_tstsp(&b, &random_tstsp(&b, &mut r)).unwrap();
            let e = project_tstsp(&b, &t).unwrap();
            let moved = TsaspElement {
                theta: e.theta.clone(),
                a: e.a.moved_to(&b, &q).unwrap(),
                z: e.z.moved_to(&b, &q).unwrap(),
            };
            let d = tasp_distance(&b, &eta_a(&b, &e).unwrap(), &eta_a(&b, &moved).unwrap()).unwrap();
            assert!(d < 1e-12);
        }
    }

    #[test]
    fn reducibility_examples() {
        let b = GroupBundle::so3();
        let mut r = rng(19);
        let mut t = random_tstp(&b, &mut r);
        t.x = b.algebra().zero();
        assert!(!reducible_tstp(&b, &t).unwrap());
        t.a = b.algebra().dual_zero();
        assert!(reducible_tstp(&b, &t).unwrap());

        let t = random_tstp(&b, &mut r);
        let res = tstp_residual(&b, &t).unwrap();
        assert!(matches!(project_tstp(&b, &t), Err(Error::NotReducible { residual }) if residual == res));
        let fixed = coisotropic_tstp(&b, &t).unwrap();
        let e = project_tstp(&b, &fixed).unwrap();
        assert_eq!(e.x.x, t.x);
        assert_eq!(e.c.a, t.b);

        let t = random_tstsp(&b, &mut r);
        assert!(matches!(project_tstsp(&b, &t), Err(Error::NotReducible { .. })));
        let e = project_tstsp(&b, &coisotropic_tstsp(&b, &t).unwrap()).unwrap();
        assert_eq!(e.a.a, t.a);
        assert_eq!(e.z.x, t.x);

        // abelian: reducible exactly when the free slot vanishes
        let s = FrameBundle::new();
        let mut t = random_tstp(&s, &mut r);
        assert!(!reducible_tstp(&s, &t).unwrap());
        t.a = s.algebra().dual_zero();
        assert!(reducible_tstp(&s, &t).unwrap());
    }

    #[test]
    fn flat_abelian_cases() {
        let b = EuclideanBundle::flat(2, LieAlgebra::so2()).unwrap();
        let mut r = rng(20);
        let t = random_ttp(&b, &mut r);
        let red = project_ttp(&b, &t).unwrap();
        assert!(red.z.x.max_abs_diff(&t.z) < 1e-15);
        let t = random_ttsp(&b, &mut r);
        assert!(project_ttsp(&b, &t).unwrap().b.a.max_abs_diff(&t.b) < 1e-15);
        let mut t = random_tstp(&b, &mut r);
        t.a = b.algebra().dual_zero();
        let e = project_tstp(&b, &t).unwrap();
        let out = epsilon_a(&b, &e).unwrap();
        assert!(out.phi.max_abs_diff(&b.base().alpha_inv(&t.rho).unwrap()) < 1e-15);
        assert_eq!(out.b.a.coeffs()[0], 0.0);
    }

    #[test]
    fn anchor_is_first_projection_and_closes_the_square() {
        let b = twisted();
        let mut r = rng(21);
        for _ in 0..100 {
            let p = b.random_point(&mut r);
            let v = random_base_tangent(&b, &p, &mut r);
            let e = AtiyahVector {
                v: v.clone(),
                x: AdClass::new(p.clone(), b.algebra().random_element(&mut r)),
            };
            assert_eq!(anchor(&e), v);
            let zero = AtiyahVector {
                v: v.clone(),
                x: AdClass::new(p.clone(), b.algebra().zero()),
            };
            assert_eq!(anchor(&zero), v);

            // ρ̃ ∘ (π_TM ∘ pr₁, pr₂) = Tπ_M ∘ pr₁ ∘ ε̃
            let t = coisotropic_tstp(&b, &random_tstp(&b, &mut r)).unwrap();
            let red = project_tstp(&b, &t).unwrap();
            let down = anchor(&AtiyahVector {
                v: red.rho.base_tangent(),
                x: red.x.clone(),
            });
            let across = epsilon_a(&b, &red).unwrap().phi.base_velocity();
            assert!(down.max_abs_diff(&across) < 1e-15);
        }
    }

    #[test]
    fn reduced_duality_descends_from_the_triple() {
        // ⟨⟨φ̃, κ̃ṽ⟩⟩ = ⟨α̃φ̃, ṽ⟩ with φ̃ reconstructed from ε̃ on the reducible set
        let b = twisted();
        let mut r = rng(22);
        for _ in 0..200 {
            let t = coisotropic_tstp(&b, &random_tstp(&b, &mut r)).unwrap();
            let phi = tulczyjew_alpha_inv(&b, &t).unwrap();
            let back = tulczyjew_alpha(&b, &phi).unwrap();
            assert!(tstp_residual(&b, &back).unwrap() < 1e-10);
            let v = random_flip_partner(&b, &phi, &mut r);
            let lhs = pair_ttsp_ttp(&b, &phi, &flip(&b, &v).unwrap()).unwrap();
            let rhs = pair_tstp_ttp(&b, &back, &v).unwrap();
            assert!((lhs - rhs).abs() < 1e-10 * (1.0 + lhs.abs()));
        }
    }
}
