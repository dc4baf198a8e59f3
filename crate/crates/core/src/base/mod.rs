//! Base-manifold objects and the canonical maps κ, α, β, γ between the
//! iterated tangent and cotangent bundles of M.
//!
//! Every object is a record of ambient coordinate vectors. The point base has
//! empty vectors, the vector-space base uses ℝᵐ directly and the sphere lives
//! in ℝ³ with explicit constraints. Covectors on the sphere are identified
//! with tangent vectors through the dot product.
//!
//! Slot layout, written as tuples:
//!
//! | type                  | slots                          | core slot  |
//! |-----------------------|--------------------------------|------------|
//! | [`SecondTangent`]     | `(q, q̇, δq, δq̇)`              | `δq̇`       |
//! | [`TangentCotangent`]  | `(q, p, δq, δp)`               | `δp`       |
//! | [`CotangentTangent`]  | `(q, q̇; dual_q, dual_q̇)`      | `dual_q`   |
//! | [`CotangentCotangent`]| `(q, p; dual_q, dual_p)`       | `dual_q`   |
//!
//! Elements of T*TM and T*T*M on the sphere are classes modulo the
//! annihilator of the constraint surface; [`BaseModel::canonical_cotangent_tangent`]
//! and [`BaseModel::canonical_cotangent_cotangent`] pick the representative
//! with both covector slots tangent to the sphere.

mod euclidean;
mod point;
mod sphere;
pub mod stereo;

use std::fmt::Debug;

use rand::RngCore;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::tol;
use crate::Vector;

pub use euclidean::EuclideanBase;
pub use point::PointBase;
pub use sphere::{tangent_basis, SphereBase};

macro_rules! slot_record {
    ($(#[$m:meta])* $name:ident { $($field:ident),+ }) => {
        $(#[$m])*
        #[derive(Debug, Clone, PartialEq)]
        pub struct $name {
            $(pub $field: Vector,)+
        }

        impl $name {
            pub fn new($($field: Vector),+) -> Self {
                Self { $($field),+ }
            }

            /// Largest componentwise difference over all slots.
            pub fn max_abs_diff(&self, other: &Self) -> f64 {
                let mut worst = 0.0_f64;
                $(
                    if self.$field.len() != other.$field.len() {
                        return f64::INFINITY;
                    }
                    if !self.$field.is_empty() {
                        worst = worst.max((&self.$field - &other.$field).amax());
                    }
                )+
                worst
            }

            pub fn is_finite(&self) -> bool {
                true $(&& self.$field.iter().all(|x| x.is_finite()))+
            }
        }
    };
}

slot_record!(
    /// `v ∈ T_qM`.
    TangentVec { q, v }
);
slot_record!(
    /// `p ∈ T*_qM`.
    CotangentVec { q, p }
);
slot_record!(
    /// An element of TTM, `(q, q̇, δq, δq̇)`; on the sphere `(n, v, w, u)`.
    SecondTangent { q, q_dot, dq, dq_dot }
);
slot_record!(
    /// An element of TT*M, `(q, p, δq, δp)`.
    TangentCotangent { q, p, dq, dp }
);
slot_record!(
    /// An element of T*TM over `(q, q̇)`, pairing with TTM as
    /// `⟨dual_q, δq⟩ + ⟨dual_q_dot, δq̇⟩`.
    CotangentTangent { q, q_dot, dual_q, dual_q_dot }
);
slot_record!(
    /// An element of T*T*M over `(q, p)`, pairing with TT*M as
    /// `⟨dual_q, δq⟩ + ⟨dual_p, δp⟩`.
    CotangentCotangent { q, p, dual_q, dual_p }
);
slot_record!(
    /// A covector at `q` seen as an element of a core.
    CoreCovector { q, covector }
);

impl TangentCotangent {
    /// `Tπ_M`, the velocity of the base curve.
    pub fn base_velocity(&self) -> TangentVec {
        TangentVec::new(self.q.clone(), self.dq.clone())
    }

    /// `τ_{T*M}`.
    pub fn base_covector(&self) -> CotangentVec {
        CotangentVec::new(self.q.clone(), self.p.clone())
    }
}

impl SecondTangent {
    /// `τ_TM`.
    pub fn base_tangent(&self) -> TangentVec {
        TangentVec::new(self.q.clone(), self.q_dot.clone())
    }

    /// `Tτ_M`.
    pub fn tangent_direction(&self) -> TangentVec {
        TangentVec::new(self.q.clone(), self.dq.clone())
    }
}

impl CotangentTangent {
    /// `π_TM`.
    pub fn base_tangent(&self) -> TangentVec {
        TangentVec::new(self.q.clone(), self.q_dot.clone())
    }
}

impl CotangentCotangent {
    /// `π_{T*M}`.
    pub fn base_covector(&self) -> CotangentVec {
        CotangentVec::new(self.q.clone(), self.p.clone())
    }

    /// The velocity carried by the fibre slot.
    pub fn fiber_velocity(&self) -> TangentVec {
        TangentVec::new(self.q.clone(), self.dual_p.clone())
    }
}

impl CoreCovector {
    pub fn zero(q: &Vector) -> Self {
        CoreCovector::new(q.clone(), Vector::zeros(q.len()))
    }
}

/// Basis of `T_{(q,w)}TM` together with the canonical dual covectors.
#[derive(Debug, Clone)]
pub struct SecondFrame {
    pub directions: Vec<(Vector, Vector)>,
    pub duals: Vec<(Vector, Vector)>,
}

pub(crate) fn ensure_close(what: &'static str, a: &Vector, b: &Vector) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::Dimension {
            what,
            expected: a.len(),
            got: b.len(),
        });
    }
    if a.is_empty() {
        return Ok(());
    }
    let r = (a - b).amax();
    if !r.is_finite() || r > tol::BASE_MATCH {
        return Err(Error::ProjectionMismatch { what, residual: r });
    }
    Ok(())
}

fn gaussian(n: usize, rng: &mut dyn RngCore) -> Vector {
    Vector::from_fn(n, |_, _| StandardNormal.sample(rng))
}

/// A base manifold M presented in ambient coordinates.
///
/// Implementors provide the constraint geometry; the canonical maps are
/// provided on top of it.
pub trait BaseModel: Debug + Send + Sync {
    fn name(&self) -> &'static str;

    /// Intrinsic dimension.
    fn dim(&self) -> usize;

    /// Length of every coordinate slot.
    fn ambient_dim(&self) -> usize;

    fn point_residual(&self, q: &Vector) -> f64;

    fn project_point(&self, raw: &Vector) -> Vector;

    /// Residual of `v ∈ T_qM`, also used for covectors.
    fn tangent_residual(&self, q: &Vector, v: &Vector) -> f64;

    fn project_tangent(&self, q: &Vector, raw: &Vector) -> Vector;

    /// Residual of the differentiated constraint on the last slot of a
    /// second-order element `(q, a, b, c)`.
    fn second_residual(&self, q: &Vector, a: &Vector, b: &Vector, c: &Vector) -> f64;

    /// Adjusts `raw` so that `(q, a, b, raw)` satisfies the differentiated
    /// constraint, leaving its tangential part untouched.
    fn complete_second(&self, q: &Vector, a: &Vector, b: &Vector, raw: &Vector) -> Vector;

    /// Canonical representative of the class `(dual_q, dual_w)` of a
    /// covector on TM (or T*M) at `(q, w)`.
    fn canonical_pair(&self, q: &Vector, w: &Vector, dual_q: &Vector, dual_w: &Vector) -> (Vector, Vector);

    /// A basis of `T_{(q,w)}TM` and its dual in canonical form.
    fn second_frame(&self, q: &Vector, w: &Vector) -> SecondFrame;

    // ---------------------------------------------------------------------
    // validation

    fn check_len(&self, what: &'static str, v: &Vector) -> Result<()> {
        if v.len() != self.ambient_dim() {
            return Err(Error::Dimension {
                what,
                expected: self.ambient_dim(),
                got: v.len(),
            });
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite(what));
        }
        Ok(())
    }

    fn check_point(&self, q: &Vector) -> Result<()> {
        self.check_len("base point", q)?;
        let r = self.point_residual(q);
        if r > tol::CONSTRAINT {
            return Err(Error::Constraint {
                what: "base point",
                residual: r,
            });
        }
        Ok(())
    }

    fn check_fiber(&self, what: &'static str, q: &Vector, v: &Vector) -> Result<()> {
        self.check_len(what, v)?;
        let r = self.tangent_residual(q, v);
        if r > tol::CONSTRAINT * (1.0 + v.norm()) {
            return Err(Error::Constraint { what, residual: r });
        }
        Ok(())
    }

    fn check_second_slot(&self, what: &'static str, q: &Vector, a: &Vector, b: &Vector, c: &Vector) -> Result<()> {
        self.check_len(what, c)?;
        let r = self.second_residual(q, a, b, c);
        if r > tol::CONSTRAINT * (1.0 + a.norm() * b.norm() + c.norm()) {
            return Err(Error::Constraint { what, residual: r });
        }
        Ok(())
    }

    fn check_tangent(&self, v: &TangentVec) -> Result<()> {
        self.check_point(&v.q)?;
        self.check_fiber("tangent vector", &v.q, &v.v)
    }

    fn check_cotangent(&self, p: &CotangentVec) -> Result<()> {
        self.check_point(&p.q)?;
        self.check_fiber("covector", &p.q, &p.p)
    }

    fn check_second_tangent(&self, t: &SecondTangent) -> Result<()> {
        self.check_point(&t.q)?;
        self.check_fiber("TTM velocity slot", &t.q, &t.q_dot)?;
        self.check_fiber("TTM variation slot", &t.q, &t.dq)?;
        self.check_second_slot("TTM second-order slot", &t.q, &t.q_dot, &t.dq, &t.dq_dot)
    }

    fn check_tangent_cotangent(&self, t: &TangentCotangent) -> Result<()> {
        self.check_point(&t.q)?;
        self.check_fiber("TT*M momentum slot", &t.q, &t.p)?;
        self.check_fiber("TT*M variation slot", &t.q, &t.dq)?;
        self.check_second_slot("TT*M force slot", &t.q, &t.p, &t.dq, &t.dp)
    }

    fn check_cotangent_tangent(&self, t: &CotangentTangent) -> Result<()> {
        self.check_point(&t.q)?;
        self.check_fiber("T*TM velocity slot", &t.q, &t.q_dot)?;
        self.check_len("T*TM core slot", &t.dual_q)?;
        self.check_len("T*TM fibre slot", &t.dual_q_dot)
    }

    fn check_cotangent_cotangent(&self, t: &CotangentCotangent) -> Result<()> {
        self.check_point(&t.q)?;
        self.check_fiber("T*T*M momentum slot", &t.q, &t.p)?;
        self.check_len("T*T*M core slot", &t.dual_q)?;
        self.check_len("T*T*M fibre slot", &t.dual_p)
    }

    fn check_core(&self, c: &CoreCovector) -> Result<()> {
        self.check_point(&c.q)?;
        self.check_len("core covector", &c.covector)
    }

    // ---------------------------------------------------------------------
    // canonical forms

    fn canonical_cotangent_tangent(&self, t: &CotangentTangent) -> CotangentTangent {
        let (a, b) = self.canonical_pair(&t.q, &t.q_dot, &t.dual_q, &t.dual_q_dot);
        CotangentTangent::new(t.q.clone(), t.q_dot.clone(), a, b)
    }

    fn canonical_cotangent_cotangent(&self, t: &CotangentCotangent) -> CotangentCotangent {
        let (a, b) = self.canonical_pair(&t.q, &t.p, &t.dual_q, &t.dual_p);
        CotangentCotangent::new(t.q.clone(), t.p.clone(), a, b)
    }

    /// Core covectors are classes modulo the normal directions.
    fn canonical_core(&self, c: &CoreCovector) -> CoreCovector {
        CoreCovector::new(c.q.clone(), self.project_tangent(&c.q, &c.covector))
    }

    /// Distance between two T*TM classes.
    fn cotangent_tangent_distance(&self, a: &CotangentTangent, b: &CotangentTangent) -> f64 {
        self.canonical_cotangent_tangent(a)
            .max_abs_diff(&self.canonical_cotangent_tangent(b))
    }

    /// Distance between two T*T*M classes.
    fn cotangent_cotangent_distance(&self, a: &CotangentCotangent, b: &CotangentCotangent) -> f64 {
        self.canonical_cotangent_cotangent(a)
            .max_abs_diff(&self.canonical_cotangent_cotangent(b))
    }

    // ---------------------------------------------------------------------
    // canonical maps

    /// The canonical flip `κ_M(q, q̇, δq, δq̇) = (q, δq, q̇, δq̇)`.
    fn kappa(&self, t: &SecondTangent) -> Result<SecondTangent> {
        self.check_second_tangent(t)?;
        Ok(SecondTangent::new(
            t.q.clone(),
            t.dq.clone(),
            t.q_dot.clone(),
            t.dq_dot.clone(),
        ))
    }

    /// Tulczyjew's `α_M(q, p, δq, δp) = (q, δq; δp, p)`.
    fn alpha(&self, t: &TangentCotangent) -> Result<CotangentTangent> {
        self.check_tangent_cotangent(t)?;
        Ok(self.canonical_cotangent_tangent(&CotangentTangent::new(
            t.q.clone(),
            t.dq.clone(),
            t.dp.clone(),
            t.p.clone(),
        )))
    }

    fn alpha_inv(&self, t: &CotangentTangent) -> Result<TangentCotangent> {
        self.check_cotangent_tangent(t)?;
        let c = self.canonical_cotangent_tangent(t);
        let dp = self.complete_second(&c.q, &c.dual_q_dot, &c.q_dot, &c.dual_q);
        Ok(TangentCotangent::new(c.q, c.dual_q_dot, c.q_dot, dp))
    }

    /// `β_M(q, p, δq, δp) = (q, p; −δp, δq)`.
    fn beta(&self, t: &TangentCotangent) -> Result<CotangentCotangent> {
        self.check_tangent_cotangent(t)?;
        Ok(self.canonical_cotangent_cotangent(&CotangentCotangent::new(
            t.q.clone(),
            t.p.clone(),
            -&t.dp,
            t.dq.clone(),
        )))
    }

    fn beta_inv(&self, t: &CotangentCotangent) -> Result<TangentCotangent> {
        self.check_cotangent_cotangent(t)?;
        let c = self.canonical_cotangent_cotangent(t);
        let dp = self.complete_second(&c.q, &c.p, &c.dual_p, &(-&c.dual_q));
        Ok(TangentCotangent::new(c.q, c.p, c.dual_p, dp))
    }

    /// Dufour's `γ_TM(q, p; a, b) = (q, b; −a, p)`.
    fn gamma(&self, t: &CotangentCotangent) -> Result<CotangentTangent> {
        self.check_cotangent_cotangent(t)?;
        let c = self.canonical_cotangent_cotangent(t);
        Ok(self.canonical_cotangent_tangent(&CotangentTangent::new(
            c.q,
            c.dual_p,
            -c.dual_q,
            c.p,
        )))
    }

    fn gamma_inv(&self, t: &CotangentTangent) -> Result<CotangentCotangent> {
        self.check_cotangent_tangent(t)?;
        let c = self.canonical_cotangent_tangent(t);
        Ok(self.canonical_cotangent_cotangent(&CotangentCotangent::new(
            c.q,
            c.dual_q_dot,
            -c.dual_q,
            c.q_dot,
        )))
    }

    // ---------------------------------------------------------------------
    // pairings

    /// `⟨⟨φ, 𝒱⟩⟩ = ⟨δp, q̇⟩ + ⟨p, δq̇⟩`, defined when `Tπ_M φ = Tτ_M 𝒱`.
    fn tangent_pairing(&self, phi: &TangentCotangent, v: &SecondTangent) -> Result<f64> {
        self.check_tangent_cotangent(phi)?;
        self.check_second_tangent(v)?;
        ensure_close("Tπ(φ) vs Tτ(𝒱): base point", &phi.q, &v.q)?;
        ensure_close("Tπ(φ) vs Tτ(𝒱): direction", &phi.dq, &v.dq)?;
        Ok(phi.dp.dot(&v.q_dot) + phi.p.dot(&v.dq_dot))
    }

    /// `⟨ρ, 𝒱⟩` for `ρ ∈ T*TM` over `τ_TM(𝒱)`.
    fn pair_cotangent_tangent(&self, rho: &CotangentTangent, v: &SecondTangent) -> Result<f64> {
        self.check_cotangent_tangent(rho)?;
        self.check_second_tangent(v)?;
        ensure_close("π(ρ) vs τ(𝒱): base point", &rho.q, &v.q)?;
        ensure_close("π(ρ) vs τ(𝒱): velocity", &rho.q_dot, &v.q_dot)?;
        Ok(rho.dual_q.dot(&v.dq) + rho.dual_q_dot.dot(&v.dq_dot))
    }

    /// `⟨Θ, f⟩` for `Θ ∈ T*T*M` over `τ_{T*M}(f)`.
    fn pair_cotangent_cotangent(&self, theta: &CotangentCotangent, f: &TangentCotangent) -> Result<f64> {
        self.check_cotangent_cotangent(theta)?;
        self.check_tangent_cotangent(f)?;
        ensure_close("π(Θ) vs τ(f): base point", &theta.q, &f.q)?;
        ensure_close("π(Θ) vs τ(f): momentum", &theta.p, &f.p)?;
        Ok(theta.dual_q.dot(&f.dq) + theta.dual_p.dot(&f.dp))
    }

    // ---------------------------------------------------------------------
    // core arithmetic

    /// `ρ ∔ c` in the core of T*TM.
    fn core_add(&self, rho: &CotangentTangent, c: &CoreCovector) -> Result<CotangentTangent> {
        self.check_cotangent_tangent(rho)?;
        self.check_core(c)?;
        ensure_close("core base point", &rho.q, &c.q)?;
        let mut out = rho.clone();
        out.dual_q += &c.covector;
        Ok(out)
    }

    /// `ρ ∸ c` in the core of T*TM.
    fn core_sub(&self, rho: &CotangentTangent, c: &CoreCovector) -> Result<CotangentTangent> {
        self.core_add(rho, &CoreCovector::new(c.q.clone(), -&c.covector))
    }

    /// `Θ ∔ c` in the core of T*T*M.
    fn core_add_cc(&self, theta: &CotangentCotangent, c: &CoreCovector) -> Result<CotangentCotangent> {
        self.check_cotangent_cotangent(theta)?;
        self.check_core(c)?;
        ensure_close("core base point", &theta.q, &c.q)?;
        let mut out = theta.clone();
        out.dual_q += &c.covector;
        Ok(out)
    }

    fn core_sub_cc(&self, theta: &CotangentCotangent, c: &CoreCovector) -> Result<CotangentCotangent> {
        self.core_add_cc(theta, &CoreCovector::new(c.q.clone(), -&c.covector))
    }

    /// `φ ∔ c` in the core of TT*M. The covector is projected onto `T*_qM`
    /// first so the result stays on the constraint surface.
    fn core_add_tc(&self, phi: &TangentCotangent, c: &CoreCovector) -> Result<TangentCotangent> {
        self.check_tangent_cotangent(phi)?;
        self.check_core(c)?;
        ensure_close("core base point", &phi.q, &c.q)?;
        let mut out = phi.clone();
        out.dp += self.project_tangent(&c.q, &c.covector);
        Ok(out)
    }

    fn core_sub_tc(&self, phi: &TangentCotangent, c: &CoreCovector) -> Result<TangentCotangent> {
        self.core_add_tc(phi, &CoreCovector::new(c.q.clone(), -&c.covector))
    }

    // ---------------------------------------------------------------------
    // sampling

    fn random_point(&self, rng: &mut dyn RngCore) -> Vector {
        loop {
            let raw = gaussian(self.ambient_dim(), rng);
            if self.ambient_dim() == 0 || raw.norm() > 1e-3 {
                return self.project_point(&raw);
            }
        }
    }

    fn random_tangent_at(&self, q: &Vector, rng: &mut dyn RngCore) -> Vector {
        self.project_tangent(q, &gaussian(self.ambient_dim(), rng))
    }

    fn random_ambient(&self, rng: &mut dyn RngCore) -> Vector {
        gaussian(self.ambient_dim(), rng)
    }

    fn random_second_tangent_at(&self, q: &Vector, q_dot: &Vector, dq: &Vector, rng: &mut dyn RngCore) -> SecondTangent {
        let raw = gaussian(self.ambient_dim(), rng);
        let dq_dot = self.complete_second(q, q_dot, dq, &self.project_tangent(q, &raw));
        SecondTangent::new(q.clone(), q_dot.clone(), dq.clone(), dq_dot)
    }

    fn random_tangent_cotangent_at(&self, q: &Vector, p: &Vector, dq: &Vector, rng: &mut dyn RngCore) -> TangentCotangent {
        let raw = gaussian(self.ambient_dim(), rng);
        let dp = self.complete_second(q, p, dq, &self.project_tangent(q, &raw));
        TangentCotangent::new(q.clone(), p.clone(), dq.clone(), dp)
    }

    /// A raw (not canonicalized) representative over `(q, q̇)`.
    fn random_cotangent_tangent_at(&self, q: &Vector, q_dot: &Vector, rng: &mut dyn RngCore) -> CotangentTangent {
        CotangentTangent::new(q.clone(), q_dot.clone(), gaussian(self.ambient_dim(), rng), gaussian(self.ambient_dim(), rng))
    }

    /// A raw (not canonicalized) representative over `(q, p)`.
    fn random_cotangent_cotangent_at(&self, q: &Vector, p: &Vector, rng: &mut dyn RngCore) -> CotangentCotangent {
        CotangentCotangent::new(q.clone(), p.clone(), gaussian(self.ambient_dim(), rng), gaussian(self.ambient_dim(), rng))
    }
}
