//! Randomised property suite behind the `check` command and the acceptance
//! test. Every sample draws from its own ChaCha stream keyed by
//! `(seed, property, sample)`, so reports do not depend on scheduling.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::base::stereo::{chart_discrepancy, ChartSample};
use crate::base::BaseModel;
use crate::bundle::{EuclideanBundle, FrameBundle, FramePoint, GroupBundle, PrincipalBundle};
use crate::dynamics::{
    differential_l, hamiltonian_dynamics_point, lagrangian_dynamics_point, reduced_dynamics_point, BodyState, SphereBody,
};
use crate::error::{Error, Result};
use crate::lie::{ad_star, adjoint, bracket, coadjoint, LieAlgebra};
use crate::reduce::{
    coisotropic_tstp, coisotropic_tstsp, epsilon_a, eta_a, project_tstp, project_tstsp, project_ttp, project_ttsp,
    reduced_flip_residual, tasp_distance, TsapElement, TsaspElement,
};
use crate::triple::{
    beta, beta_inv, flip, gamma_tp, gamma_tp_inv, pair_tstp_ttp, pair_ttsp_ttp, random_flip_partner, random_tstp,
    random_tstsp, random_ttp, random_ttsp, tstp_distance, tstsp_distance, ttp_distance, ttsp_distance, tulczyjew_alpha,
    tulczyjew_alpha_inv, TrivTTP, TrivTTsP, TrivTsTP,
};

/// Deliberate defects used to show that the suite notices them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    /// The flip adds `[X, Y]` where it should add `[Y, X]`.
    CorruptedBracket,
    /// α̃ and its inverse use `−Ω*`.
    CurvatureSign,
}

impl Fault {
    pub const ALL: [Fault; 2] = [Fault::CorruptedBracket, Fault::CurvatureSign];

    pub fn name(self) -> &'static str {
        match self {
            Fault::CorruptedBracket => "corrupted-bracket",
            Fault::CurvatureSign => "curvature-sign",
        }
    }
}

impl fmt::Display for Fault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Fault {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Fault::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Unsupported("unknown fault; expected corrupted-bracket or curvature-sign"))
    }
}

/// How samples of one property are spread over threads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    /// Rayon data parallelism; sequential when built without `parallel`.
    #[cfg_attr(feature = "parallel", default)]
    Parallel,
    #[cfg_attr(not(feature = "parallel"), default)]
    Sequential,
}

/// The generator for one sample of one property.
pub fn sample_rng(seed: u64, property: usize, sample: usize) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(property as u64);
    r.set_word_pos((sample as u128) << 24);
    r
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyReport {
    pub name: &'static str,
    pub passed: bool,
    pub max_residual: f64,
    pub threshold: f64,
    pub samples: usize,
    /// First error raised by a sample, by sample index.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub seed: u64,
    pub samples: usize,
    pub fault: Option<Fault>,
    pub properties: Vec<PropertyReport>,
}

impl CheckReport {
    pub fn all_passed(&self) -> bool {
        self.properties.iter().all(|p| p.passed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn failures(&self) -> impl Iterator<Item = &PropertyReport> {
        self.properties.iter().filter(|p| !p.passed)
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "seed {} samples {}", self.seed, self.samples)?;
        if let Some(fault) = self.fault {
            writeln!(f, "injected fault: {fault}")?;
        }
        for p in &self.properties {
            write!(
                f,
                "{} {:<32} max {:.3e} (≤ {:.0e}, n = {})",
                if p.passed { "PASS" } else { "FAIL" },
                p.name,
                p.max_residual,
                p.threshold,
                p.samples
            )?;
            if let Some(e) = &p.error {
                write!(f, " error: {e}")?;
            }
            writeln!(f)?;
        }
        let failed = self.failures().count();
        write!(f, "{} of {} properties passed", self.properties.len() - failed, self.properties.len())
    }
}

/// Shared models and the active fault.
pub struct Context {
    pub fault: Option<Fault>,
    pub sphere: FrameBundle,
    pub group: GroupBundle,
    pub twisted: EuclideanBundle,
    pub body: SphereBody,
}

impl Context {
    pub fn new(fault: Option<Fault>) -> Self {
        Context {
            fault,
            sphere: FrameBundle::new(),
            group: GroupBundle::so3(),
            twisted: twisted_plane(),
            body: SphereBody::new(1.3, 0.6).expect("positive inertia"),
        }
    }
}

/// A trivial SO(3) bundle over the plane with an affine, non-flat connection.
pub fn twisted_plane() -> EuclideanBundle {
    let a0 = DMatrix::from_row_slice(3, 2, &[0.3, -0.1, 0.0, 0.5, 0.2, 0.0]);
    let s1 = DMatrix::from_row_slice(3, 2, &[0.0, 1.0, 0.4, 0.0, -0.2, 0.3]);
    let s2 = DMatrix::from_row_slice(3, 2, &[-0.5, 0.0, 0.1, 0.2, 0.0, 0.7]);
    EuclideanBundle::affine(2, LieAlgebra::so3(), a0, vec![s1, s2]).expect("valid potential")
}

type SampleFn = fn(&Context, &mut ChaCha8Rng) -> Result<f64>;

/// One named identity, its tolerance and a per-sample residual.
#[derive(Clone, Copy)]
pub struct Property {
    pub name: &'static str,
    pub threshold: f64,
    sample: SampleFn,
}

impl fmt::Debug for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Property").field("name", &self.name).field("threshold", &self.threshold).finish()
    }
}

impl Property {
    pub fn residual(&self, ctx: &Context, rng: &mut ChaCha8Rng) -> Result<f64> {
        (self.sample)(ctx, rng)
    }
}

pub fn properties() -> Vec<Property> {
    macro_rules! prop {
        ($name:expr, $tol:expr, $f:expr) => {
            Property {
                name: $name,
                threshold: $tol,
                sample: $f,
            }
        };
    }
    vec![
        prop!("lie/jacobi", 1e-12, jacobi),
        prop!("lie/ad-star-duality", 1e-12, ad_star_duality),
        prop!("lie/coadjoint-duality", 1e-12, coadjoint_duality),
        prop!("base/chart-vs-embedded", 1e-8, chart),
        prop!("triple/duality-point-so3", 1e-10, |c, r| duality(c, &c.group, r)),
        prop!("triple/duality-sphere-so2", 1e-10, |c, r| duality(c, &c.sphere, r)),
        prop!("triple/duality-plane-so3", 1e-10, |c, r| duality(c, &c.twisted, r)),
        prop!("triple/flip-involution", 1e-12, involution),
        prop!("triple/beta-factorization", 1e-12, factorization),
        prop!("triple/inverses", 1e-12, inverses),
        prop!("triple/group-degeneration", 1e-12, degeneration),
        prop!("reduce/epsilon-square", 1e-10, epsilon_square),
        prop!("reduce/eta-square", 1e-10, eta_square),
        prop!("reduce/gauge-invariance", 1e-10, gauge_invariance),
        prop!("reduce/flip-square", 1e-12, reduced_flip),
        prop!("dynamics/alpha-identity", 1e-10, alpha_identity),
        prop!("dynamics/sphere-closed-form", 1e-10, closed_form),
        prop!("dynamics/legendre", 1e-10, legendre),
        prop!("dynamics/reduction-commutes", 1e-10, reduction_commutes),
    ]
}

/// Runs one property over `samples` independent draws.
pub fn run_property(ctx: &Context, index: usize, prop: &Property, seed: u64, samples: usize, exec: Execution) -> PropertyReport {
    let one = |k: usize| prop.residual(ctx, &mut sample_rng(seed, index, k));
    let results: Vec<Result<f64>> = match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..samples).into_par_iter().map(one).collect()
        }
        _ => (0..samples).map(one).collect(),
    };
    let mut max_residual = 0.0_f64;
    let mut error = None;
    for r in results {
        match r {
            Ok(x) if x.is_nan() => max_residual = f64::INFINITY,
            Ok(x) => max_residual = max_residual.max(x),
            Err(e) => {
                error.get_or_insert_with(|| e.to_string());
            }
        }
    }
    PropertyReport {
        name: prop.name,
        passed: error.is_none() && max_residual <= prop.threshold,
        max_residual,
        threshold: prop.threshold,
        samples,
        error,
    }
}

pub fn run_suite(seed: u64, samples: usize, fault: Option<Fault>, exec: Execution) -> Result<CheckReport> {
    if samples == 0 {
        return Err(Error::Unsupported("samples must be at least 1"));
    }
    let ctx = Context::new(fault);
    let properties = properties()
        .iter()
        .enumerate()
        .map(|(i, p)| run_property(&ctx, i, p, seed, samples, exec))
        .collect();
    Ok(CheckReport {
        seed,
        samples,
        fault,
        properties,
    })
}

// -------------------------------------------------------------------------
// maps under test, with the optional fault applied

fn flip_under<B: PrincipalBundle>(ctx: &Context, b: &B, t: &TrivTTP<B::Point>) -> Result<TrivTTP<B::Point>> {
    let mut out = flip(b, t)?;
    if ctx.fault == Some(Fault::CorruptedBracket) {
        // [X, Y] − [Y, X]
        let d = bracket(&t.x, &t.y)?;
        out.z = &(&out.z + &d) + &d;
    }
    Ok(out)
}

fn alpha_under<B: PrincipalBundle>(ctx: &Context, b: &B, t: &TrivTTsP<B::Point>) -> Result<TrivTsTP<B::Point>> {
    let mut out = tulczyjew_alpha(b, t)?;
    if ctx.fault == Some(Fault::CurvatureSign) {
        let mut c = b.curvature_dual(&t.p, &t.phi.base_velocity(), &t.a)?;
        c.covector *= 2.0;
        out.rho = b.base().canonical_cotangent_tangent(&b.base().core_sub(&out.rho, &c)?);
    }
    Ok(out)
}

fn alpha_inv_under<B: PrincipalBundle>(ctx: &Context, b: &B, t: &TrivTsTP<B::Point>) -> Result<TrivTTsP<B::Point>> {
    let mut out = tulczyjew_alpha_inv(b, t)?;
    if ctx.fault == Some(Fault::CurvatureSign) {
        let mut c = b.curvature_dual(&t.p, &t.rho.base_tangent(), &t.b)?;
        c.covector *= 2.0;
        out.phi = b.base().core_add_tc(&out.phi, &c)?;
    }
    Ok(out)
}

// -------------------------------------------------------------------------
// lie and base

fn jacobi(_: &Context, r: &mut ChaCha8Rng) -> Result<f64> {
    let g = LieAlgebra::so3();
    let (x, y, z) = (g.random_element(r), g.random_element(r), g.random_element(r));
    let s = &(&bracket(&x, &bracket(&y, &z)?)? + &bracket(&y, &bracket(&z, &x)?)?) + &bracket(&z, &bracket(&x, &y)?)?;
    Ok(s.norm().max(g.jacobi_residual()).max(LieAlgebra::so2().jacobi_residual()))
}

fn ad_star_duality(_: &Context, r: &mut ChaCha8Rng) -> Result<f64> {
    let g = LieAlgebra::so3();
    let (x, y, a) = (g.random_element(r), g.random_element(r), g.random_dual(r));
    Ok((ad_star(&x, &a)?.pair(&y)? - a.pair(&bracket(&x, &y)?)?).abs())
}

fn coadjoint_duality(ctx: &Context, r: &mut ChaCha8Rng) -> Result<f64> {
    let g = ctx.group.random_group_element(r).ok_or(Error::Unsupported("group sampling"))?;
    let alg = ctx.group.algebra();
    let (x, a) = (alg.random_element(r), alg.random_dual(r));
    Ok((coadjoint(&g, &a)?.pair(&x)? - a.pair(&adjoint(&g, &x)?)?).abs())
}

fn chart(_: &Context, r: &mut ChaCha8Rng) -> Result<f64> {
    chart_discrepancy(&ChartSample::random(r))
}

// -------------------------------------------------------------------------
// triple

fn duality<B: PrincipalBundle>(ctx: &Context, b: &B, r: &mut ChaCha8Rng) -> Result<f64> {
    let phi = random_ttsp(b, r);
    let v = random_flip_partner(b, &phi, r);
    let lhs = pair_ttsp_ttp(b, &phi, &flip_under(ctx, b, &v)?)?;
    let rhs = pair_tstp_ttp(b, &alpha_under(ctx, b, &phi)?, &v)?;
    Ok((lhs - rhs).abs())
}

fn involution(ctx: &Context, r: &mut ChaCha8Rng) -> Result<f64> {
    fn one<B: PrincipalBundle>(ctx: &Context, b: &B, r: &mut ChaCha8Rng) -> Result<f64> {
        let t = random_ttp(b, r);
        Ok(ttp_distance(b, &flip_under(ctx, b, &flip_under(ctx, b, &t)?)?, &t))
    }
    Ok(one(ctx, &ctx.sphere, r)?.max(one(ctx, &ctx.group, r)?).max(one(ctx, &ctx.twisted, r)?))
}

fn factorization(ctx: &Context, r: &mut ChaCha8Rng) -> Result<f64> {
    fn one<B: PrincipalBundle>(ctx: &Context, b: &B, r: &mut ChaCha8Rng) -> Result<f64> {
        let t = random_ttsp(b, r);
        Ok(tstsp_distance(b, &beta(b, &t)?, &gamma_tp_inv(b, &alpha_under(ctx, b, &t)?)?))
    }
    Ok(one(ctx, &ctx.sphere, r)?.max(one(ctx, &ctx.group, r)?).max(one(ctx, &ctx.twisted, r)?))
}

fn inverses(ctx: &Context, r: &mut ChaCha8Rng) -> Result<f64> {
    fn one<B: PrincipalBundle>(ctx: &Context, b: &B, r: &mut ChaCha8Rng) -> Result<f64> {
        let t = random_ttsp(b, r);
        let mut worst = ttsp_distance(b, &alpha_inv_under(ctx, b, &alpha_under(ctx, b, &t)?)?, &t);
        worst = worst.max(ttsp_distance(b, &beta_inv(b, &beta(b, &t)?)?, &t));
        let s = random_tstp(b, r);
        worst = worst.max(tstp_distance(b, &gamma_tp(b, &gamma_tp_inv(b, &s)?)?, &s));
        Ok(worst)
    }
    Ok(one(ctx, &ctx.sphere, r)?.max(one(ctx, &ctx.group, r)?).max(one(ctx, &ctx.twisted, r)?))
}

/// Over a point the maps must reduce to the group formulas
/// `α̃_G(g, A, X, B) = (g, X, B − ad*_X A, A)` and
/// `β̃_G(g, A, X, B) = (g, A, ad*_X A − B, X)`.
fn degeneration(ctx: &Context, r: &mut ChaCha8Rng) -> Result<f64> {
    let b = &ctx.group;
    let t = random_ttsp(b, r);
    let adx = ad_star(&t.y, &t.a)?;
    let al = alpha_under(ctx, b, &t)?;
    let be = beta(b, &t)?;
    let slots = [
        al.x.max_abs_diff(&t.y),
        al.a.max_abs_diff(&(&t.b - &adx)),
        al.b.max_abs_diff(&t.a),
        be.a.max_abs_diff(&t.a),
        be.b.max_abs_diff(&(&adx - &t.b)),
        be.x.max_abs_diff(&t.y),
        b.point_distance(&al.p, &t.p),
        b.point_distance(&be.p, &t.p),
    ];
    let empty = al.rho.dual_q.is_empty() && be.theta.dual_q.is_empty();
    Ok(if empty { slots.into_iter().fold(0.0, f64::max) } else { f64::INFINITY })
}

// -------------------------------------------------------------------------
// reduce

fn epsilon_square(ctx: &Context, r: &mut ChaCha8Rng) -> Result<f64> {
    fn one<B: PrincipalBundle>(ctx: &Context, b: &B, r: &mut ChaCha8Rng) -> Result<f64> {
        let t = coisotropic_tstp(b, &random_tstp(b, r))?;
        let lhs = project_ttsp(b, &alpha_inv_under(ctx, b, &t)?)?;
        let rhs = epsilon_a(b, &project_tstp(b, &t)?)?;
        tasp_distance(b, &lhs, &rhs)
    }
    Ok(one(ctx, &ctx.sphere, r)?.max(one(ctx, &ctx.group, r)?).max(one(ctx, &ctx.twisted, r)?))
}

fn eta_square(ctx: &Context, r: &mut ChaCha8Rng) -> Result<f64> {
    fn one<B: PrincipalBundle>(b: &B, r: &mut ChaCha8Rng) -> Result<f64> {
        let t = coisotropic_tstsp(b, &random_tstsp(b, r))?;
        let lhs = project_ttsp(b, &beta_inv(b, &t)?)?;
        let rhs = eta_a(b, &project_tstsp(b, &t)?)?;
        tasp_distance(b, &lhs, &rhs)
    }
    Ok(one(&ctx.sphere, r)?.max(one(&ctx.group, r)?).max(one(&ctx.twisted, r)?))
}

/// ε̃ and η̃ must not see which representative of a class was handed in.
fn gauge_invariance(ctx: &Context, r: &mut ChaCha8Rng) -> Result<f64> {
    fn one<B: PrincipalBundle>(b: &B, r: &mut ChaCha8Rng) -> Result<f64> {
        let g = b.random_group_element(r).ok_or(Error::Unsupported("group sampling"))?;
        let e = project_tstp(b, &coisotropic_tstp(b, &random_tstp(b, r))?)?;
        let q = b.right_act(&e.x.p, &g)?;
        let moved = TsapElement {
            rho: e.rho.clone(),
            x: e.x.moved_to(b, &q)?,
            c: e.c.moved_to(b, &q)?,
        };
        let d1 = tasp_distance(b, &epsilon_a(b, &e)?, &epsilon_a(b, &moved)?)?;
        let h = project_tstsp(b, &coisotropic_tstsp(b, &random_tstsp(b, r))?)?;
        let q = b.right_act(&h.a.p, &g)?;
        let moved = TsaspElement {
            theta: h.theta.clone(),
            a: h.a.moved_to(b, &q)?,
            z: h.z.moved_to(b, &q)?,
        };
        let d2 = tasp_distance(b, &eta_a(b, &h)?, &eta_a(b, &moved)?)?;
        Ok(d1.max(d2))
    }
    Ok(one(&ctx.sphere, r)?.max(one(&ctx.group, r)?).max(one(&ctx.twisted, r)?))
}

fn reduced_flip(ctx: &Context, r: &mut ChaCha8Rng) -> Result<f64> {
    fn one<B: PrincipalBundle>(ctx: &Context, b: &B, r: &mut ChaCha8Rng) -> Result<f64> {
        let t = random_ttp(b, r);
        let lhs = project_ttp(b, &t)?;
        let rhs = project_ttp(b, &flip_under(ctx, b, &t)?)?;
        reduced_flip_residual(b, &lhs, &rhs)
    }
    Ok(one(ctx, &ctx.sphere, r)?.max(one(ctx, &ctx.twisted, r)?))
}

// -------------------------------------------------------------------------
// dynamics

fn body_sample(r: &mut ChaCha8Rng) -> Result<(FramePoint, BodyState)> {
    let n = Vector3::from_fn(|_, _| r.sample::<f64, _>(rand_distr::StandardNormal));
    let v = Vector3::from_fn(|_, _| r.sample::<f64, _>(rand_distr::StandardNormal));
    let (s, _) = BodyState::projected(n, v, r.sample(rand_distr::StandardNormal))?;
    let p = FramePoint::reference(&s.n).rotate(r.random_range(-std::f64::consts::PI..std::f64::consts::PI));
    Ok((p, s))
}

fn alpha_identity(ctx: &Context, r: &mut ChaCha8Rng) -> Result<f64> {
    let b = &ctx.sphere;
    let (p, s) = body_sample(r)?;
    let l = ctx.body.lagrangian();
    let v = ctx.body.trivial_tangent(b, &p, &s)?;
    let direct = lagrangian_dynamics_point(b, &l, &v)?;
    let via = alpha_inv_under(ctx, b, &differential_l(b, &l, &v)?)?;
    Ok(ttsp_distance(b, &direct, &via))
}

fn closed_form(ctx: &Context, r: &mut ChaCha8Rng) -> Result<f64> {
    let b = &ctx.sphere;
    let (p, s) = body_sample(r)?;
    let l = ctx.body.lagrangian();
    let v = ctx.body.trivial_tangent(b, &p, &s)?;
    let got = alpha_inv_under(ctx, b, &differential_l(b, &l, &v)?)?;
    let want = ctx.body.closed_form_point(b, &p, &s, ctx.body.multiplier(&s))?;
    Ok(ttsp_distance(b, &got, &want))
}

fn legendre(ctx: &Context, r: &mut ChaCha8Rng) -> Result<f64> {
    let b = &ctx.sphere;
    let (p, s) = body_sample(r)?;
    let lag = lagrangian_dynamics_point(b, &ctx.body.lagrangian(), &ctx.body.trivial_tangent(b, &p, &s)?)?;
    let ham = hamiltonian_dynamics_point(b, &ctx.body.hamiltonian(), &ctx.body.legendre(b, &p, &s)?)?;
    Ok(ttsp_distance(b, &lag, &ham))
}

fn reduction_commutes(ctx: &Context, r: &mut ChaCha8Rng) -> Result<f64> {
    let b = &ctx.sphere;
    let (p, s) = body_sample(r)?;
    let l = ctx.body.lagrangian();
    let v = ctx.body.trivial_tangent(b, &p, &s)?;
    let red = reduced_dynamics_point(b, &l, &v)?;
    let full = project_ttsp(b, &alpha_inv_under(ctx, b, &differential_l(b, &l, &v)?)?)?;
    tasp_distance(b, &red, &full)
}
