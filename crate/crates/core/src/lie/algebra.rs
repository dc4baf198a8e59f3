use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use nalgebra::DMatrix;
use rand::RngCore;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::Vector;

/// Which concrete group, if any, sits over the algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlgebraKind {
    So3,
    So2,
    /// Structure constants only; no exponential or adjoint group action.
    Abstract,
}

/// A finite-dimensional Lie algebra given by structure constants over a
/// fixed ordered basis: `[X_a, X_b] = Σ_k c[a][b][k] X_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct LieAlgebra {
    dim: usize,
    constants: Vec<f64>,
    labels: Vec<String>,
    kind: AlgebraKind,
}

impl LieAlgebra {
    /// Builds an abstract algebra. `constants` is laid out as `c[a][b][k]`
    /// at index `(a * dim + b) * dim + k`.
    ///
    /// Antisymmetry is enforced here; the Jacobi identity is not, see
    /// [`LieAlgebra::jacobi_residual`].
    pub fn new(dim: usize, constants: Vec<f64>, labels: Vec<String>) -> Result<Arc<Self>> {
        Self::with_kind(dim, constants, labels, AlgebraKind::Abstract)
    }

    fn with_kind(
        dim: usize,
        constants: Vec<f64>,
        labels: Vec<String>,
        kind: AlgebraKind,
    ) -> Result<Arc<Self>> {
        if dim == 0 {
            return Err(Error::InvalidAlgebra("dimension must be positive".into()));
        }
        if constants.len() != dim * dim * dim {
            return Err(Error::Dimension {
                what: "structure constants",
                expected: dim * dim * dim,
                got: constants.len(),
            });
        }
        if labels.len() != dim {
            return Err(Error::Dimension {
                what: "basis labels",
                expected: dim,
                got: labels.len(),
            });
        }
        if constants.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("structure constants"));
        }
        let alg = LieAlgebra {
            dim,
            constants,
            labels,
            kind,
        };
        for a in 0..dim {
            for b in 0..dim {
                for k in 0..dim {
                    let s = alg.constant(a, b, k) + alg.constant(b, a, k);
                    if s.abs() > 1e-14 {
                        return Err(Error::InvalidAlgebra(format!(
                            "c[{a}][{b}][{k}] is not antisymmetric"
                        )));
                    }
                }
            }
        }
        Ok(Arc::new(alg))
    }

    /// so(3) in the basis of infinitesimal rotations about e₁, e₂, e₃, so the
    /// bracket is the cross product.
    pub fn so3() -> Arc<Self> {
        let mut c = vec![0.0; 27];
        let idx = |a: usize, b: usize, k: usize| (a * 3 + b) * 3 + k;
        for (a, b, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
            c[idx(a, b, k)] = 1.0;
            c[idx(b, a, k)] = -1.0;
        }
        let labels = ["e1", "e2", "e3"].iter().map(|s| s.to_string()).collect();
        Self::with_kind(3, c, labels, AlgebraKind::So3).expect("so(3) constants are valid")
    }

    /// so(2) ≅ ℝ, commutative.
    pub fn so2() -> Arc<Self> {
        Self::with_kind(1, vec![0.0], vec!["theta".into()], AlgebraKind::So2)
            .expect("so(2) constants are valid")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> AlgebraKind {
        self.kind
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    #[inline]
    pub fn constant(&self, a: usize, b: usize, k: usize) -> f64 {
        self.constants[(a * self.dim + b) * self.dim + k]
    }

    /// Largest coefficient of the cyclic Jacobi sum over basis triples.
    pub fn jacobi_residual(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0_f64;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for m in 0..n {
                        let mut s = 0.0;
                        for k in 0..n {
                            s += self.constant(b, c, k) * self.constant(a, k, m)
                                + self.constant(c, a, k) * self.constant(b, k, m)
                                + self.constant(a, b, k) * self.constant(c, k, m);
                        }
                        worst = worst.max(s.abs());
                    }
                }
            }
        }
        worst
    }

    /// Matrix of `ad_X` acting on coefficient vectors.
    pub fn ad_matrix(&self, x: &Vector) -> DMatrix<f64> {
        let n = self.dim;
        DMatrix::from_fn(n, n, |k, b| {
            (0..n).map(|a| x[a] * self.constant(a, b, k)).sum()
        })
    }

    fn bracket_coeffs(&self, x: &Vector, y: &Vector) -> Vector {
        let n = self.dim;
        let mut out = Vector::zeros(n);
        for a in 0..n {
            if x[a] == 0.0 {
                continue;
            }
            for b in 0..n {
                let xy = x[a] * y[b];
                if xy == 0.0 {
                    continue;
                }
                for k in 0..n {
                    out[k] += xy * self.constant(a, b, k);
                }
            }
        }
        out
    }

    pub fn zero(self: &Arc<Self>) -> LieAlgebraElement {
        LieAlgebraElement {
            algebra: self.clone(),
            coeffs: Vector::zeros(self.dim),
        }
    }

    pub fn dual_zero(self: &Arc<Self>) -> DualAlgebraElement {
        DualAlgebraElement {
            algebra: self.clone(),
            coeffs: Vector::zeros(self.dim),
        }
    }

    pub fn basis(self: &Arc<Self>, i: usize) -> LieAlgebraElement {
        let mut e = self.zero();
        e.coeffs[i] = 1.0;
        e
    }

    pub fn dual_basis(self: &Arc<Self>, i: usize) -> DualAlgebraElement {
        let mut e = self.dual_zero();
        e.coeffs[i] = 1.0;
        e
    }

    /// Standard Gaussian coefficients.
    pub fn random_element(self: &Arc<Self>, rng: &mut dyn RngCore) -> LieAlgebraElement {
        LieAlgebraElement {
            algebra: self.clone(),
            coeffs: Vector::from_fn(self.dim, |_, _| StandardNormal.sample(rng)),
        }
    }

    pub fn random_dual(self: &Arc<Self>, rng: &mut dyn RngCore) -> DualAlgebraElement {
        DualAlgebraElement {
            algebra: self.clone(),
            coeffs: Vector::from_fn(self.dim, |_, _| StandardNormal.sample(rng)),
        }
    }

    pub fn element(self: &Arc<Self>, coeffs: Vector) -> Result<LieAlgebraElement> {
        self.check_coeffs(&coeffs, "algebra element")?;
        Ok(LieAlgebraElement {
            algebra: self.clone(),
            coeffs,
        })
    }

    pub fn dual(self: &Arc<Self>, coeffs: Vector) -> Result<DualAlgebraElement> {
        self.check_coeffs(&coeffs, "dual element")?;
        Ok(DualAlgebraElement {
            algebra: self.clone(),
            coeffs,
        })
    }

    pub fn element_from_slice(self: &Arc<Self>, c: &[f64]) -> Result<LieAlgebraElement> {
        self.element(Vector::from_column_slice(c))
    }

    pub fn dual_from_slice(self: &Arc<Self>, c: &[f64]) -> Result<DualAlgebraElement> {
        self.dual(Vector::from_column_slice(c))
    }

    fn check_coeffs(&self, c: &Vector, what: &'static str) -> Result<()> {
        if c.len() != self.dim {
            return Err(Error::Dimension {
                what,
                expected: self.dim,
                got: c.len(),
            });
        }
        if c.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite(what));
        }
        Ok(())
    }
}

fn same(a: &Arc<LieAlgebra>, b: &Arc<LieAlgebra>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

fn ensure_same(a: &Arc<LieAlgebra>, b: &Arc<LieAlgebra>, op: &str) -> Result<()> {
    if same(a, b) {
        Ok(())
    } else {
        Err(Error::AlgebraMismatch(format!(
            "{op}: {:?}({}) vs {:?}({})",
            a.kind, a.dim, b.kind, b.dim
        )))
    }
}

macro_rules! algebra_vector {
    ($name:ident) => {
        #[derive(Debug, Clone)]
        pub struct $name {
            algebra: Arc<LieAlgebra>,
            coeffs: Vector,
        }

        impl $name {
            pub fn algebra(&self) -> &Arc<LieAlgebra> {
                &self.algebra
            }

            pub fn coeffs(&self) -> &Vector {
                &self.coeffs
            }

            pub fn into_coeffs(self) -> Vector {
                self.coeffs
            }

            pub fn norm(&self) -> f64 {
                self.coeffs.norm()
            }

            pub fn is_finite(&self) -> bool {
                self.coeffs.iter().all(|x| x.is_finite())
            }

            /// Largest coefficient difference; infinite across algebras.
            pub fn max_abs_diff(&self, other: &Self) -> f64 {
                if !same(&self.algebra, &other.algebra) {
                    return f64::INFINITY;
                }
                (&self.coeffs - &other.coeffs).amax()
            }

            pub fn ensure_same_algebra(&self, other: &Arc<LieAlgebra>) -> Result<()> {
                ensure_same(&self.algebra, other, stringify!($name))
            }

            pub(crate) fn with_coeffs(&self, coeffs: Vector) -> Self {
                Self {
                    algebra: self.algebra.clone(),
                    coeffs,
                }
            }
        }

        impl PartialEq for $name {
            fn eq(&self, other: &Self) -> bool {
                same(&self.algebra, &other.algebra) && self.coeffs == other.coeffs
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "[")?;
                for (i, c) in self.coeffs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{c}")?;
                }
                write!(f, "]")
            }
        }

        /// # Panics
        /// On operands from different algebras.
        impl Add<&$name> for &$name {
            type Output = $name;
            fn add(self, rhs: &$name) -> $name {
                assert!(same(&self.algebra, &rhs.algebra), "algebra mismatch in add");
                self.with_coeffs(&self.coeffs + &rhs.coeffs)
            }
        }

        /// # Panics
        /// On operands from different algebras.
        impl Sub<&$name> for &$name {
            type Output = $name;
            fn sub(self, rhs: &$name) -> $name {
                assert!(same(&self.algebra, &rhs.algebra), "algebra mismatch in sub");
                self.with_coeffs(&self.coeffs - &rhs.coeffs)
            }
        }

        impl Add for $name {
            type Output = $name;
            fn add(self, rhs: $name) -> $name {
                &self + &rhs
            }
        }

        impl Sub for $name {
            type Output = $name;
            fn sub(self, rhs: $name) -> $name {
                &self - &rhs
            }
        }

        impl Neg for &$name {
            type Output = $name;
            fn neg(self) -> $name {
                self.with_coeffs(-&self.coeffs)
            }
        }

        impl Neg for $name {
            type Output = $name;
            fn neg(self) -> $name {
                -&self
            }
        }

        impl Mul<f64> for &$name {
            type Output = $name;
            fn mul(self, s: f64) -> $name {
                self.with_coeffs(&self.coeffs * s)
            }
        }

        impl Mul<f64> for $name {
            type Output = $name;
            fn mul(self, s: f64) -> $name {
                &self * s
            }
        }
    };
}

algebra_vector!(LieAlgebraElement);
algebra_vector!(DualAlgebraElement);

impl LieAlgebraElement {
    pub fn bracket(&self, other: &Self) -> Result<Self> {
        bracket(self, other)
    }
}

impl DualAlgebraElement {
    /// The dual-basis pairing `⟨A, X⟩`.
    pub fn pair(&self, x: &LieAlgebraElement) -> Result<f64> {
        ensure_same(&self.algebra, &x.algebra, "pairing")?;
        Ok(self.coeffs.dot(&x.coeffs))
    }
}

/// `[X, Y]` from the structure constants.
pub fn bracket(x: &LieAlgebraElement, y: &LieAlgebraElement) -> Result<LieAlgebraElement> {
    ensure_same(&x.algebra, &y.algebra, "bracket")?;
    Ok(x.with_coeffs(x.algebra.bracket_coeffs(&x.coeffs, &y.coeffs)))
}

/// `ad_X` as a map on the algebra.
pub fn ad(x: &LieAlgebraElement, y: &LieAlgebraElement) -> Result<LieAlgebraElement> {
    bracket(x, y)
}

/// The dual of `ad_X`: `⟨ad*_X A, Y⟩ = ⟨A, [X, Y]⟩`.
pub fn ad_star(x: &LieAlgebraElement, a: &DualAlgebraElement) -> Result<DualAlgebraElement> {
    ensure_same(&x.algebra, &a.algebra, "ad_star")?;
    let alg = &x.algebra;
    let n = alg.dim;
    let mut out = Vector::zeros(n);
    for b in 0..n {
        let mut s = 0.0;
        for aa in 0..n {
            if x.coeffs[aa] == 0.0 {
                continue;
            }
            for k in 0..n {
                s += x.coeffs[aa] * alg.constant(aa, b, k) * a.coeffs[k];
            }
        }
        out[b] = s;
    }
    Ok(a.with_coeffs(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn so3_bracket_is_cross_product() {
        let g = LieAlgebra::so3();
        let z = bracket(&g.basis(0), &g.basis(1)).unwrap();
        assert_eq!(z, g.basis(2));
        let x = g.element_from_slice(&[0.3, -1.2, 2.0]).unwrap();
        let y = g.element_from_slice(&[1.1, 0.4, -0.7]).unwrap();
        let cross = nalgebra::Vector3::new(0.3, -1.2, 2.0).cross(&nalgebra::Vector3::new(1.1, 0.4, -0.7));
        let b = bracket(&x, &y).unwrap();
        for i in 0..3 {
            assert_abs_diff_eq!(b.coeffs()[i], cross[i], epsilon = 1e-15);
        }
        assert_eq!(bracket(&x, &x).unwrap().norm(), 0.0);
    }

    #[test]
    fn so2_is_commutative() {
        let g = LieAlgebra::so2();
        let x = g.element_from_slice(&[1.5]).unwrap();
        let y = g.element_from_slice(&[-0.25]).unwrap();
        assert_eq!(bracket(&x, &y).unwrap().norm(), 0.0);
        let a = g.dual_from_slice(&[3.0]).unwrap();
        assert_eq!(ad_star(&x, &a).unwrap().norm(), 0.0);
    }

    #[test]
    fn ad_star_basis_example() {
        let g = LieAlgebra::so3();
        let out = ad_star(&g.basis(0), &g.dual_basis(1)).unwrap();
        assert_eq!(out.coeffs().as_slice(), &[0.0, 0.0, -1.0]);
        let zero = ad_star(&g.zero(), &g.dual_basis(1)).unwrap();
        assert_eq!(zero.norm(), 0.0);
    }

    #[test]
    fn ad_star_matches_brute_force_pairing() {
        let g = LieAlgebra::so3();
        let x = g.element_from_slice(&[0.7, -0.1, 0.5]).unwrap();
        let a = g.dual_from_slice(&[-1.0, 2.0, 0.25]).unwrap();
        let out = ad_star(&x, &a).unwrap();
        for b in 0..3 {
            let want = a.pair(&bracket(&x, &g.basis(b)).unwrap()).unwrap();
            assert_abs_diff_eq!(out.coeffs()[b], want, epsilon = 1e-15);
        }
    }

    #[test]
    fn ad_matrix_agrees_with_bracket() {
        let g = LieAlgebra::so3();
        let x = Vector::from_column_slice(&[0.2, 0.9, -0.4]);
        let y = Vector::from_column_slice(&[1.0, -0.3, 0.8]);
        let via_matrix = g.ad_matrix(&x) * &y;
        let via_bracket = bracket(&g.element(x).unwrap(), &g.element(y).unwrap()).unwrap();
        assert_abs_diff_eq!((via_matrix - via_bracket.coeffs()).amax(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn jacobi_holds_for_builtins() {
        assert_eq!(LieAlgebra::so3().jacobi_residual(), 0.0);
        assert_eq!(LieAlgebra::so2().jacobi_residual(), 0.0);
    }

    #[test]
    fn mismatch_is_rejected() {
        let a = LieAlgebra::so3();
        let b = LieAlgebra::so2();
        assert!(matches!(
            bracket(&a.basis(0), &b.basis(0)),
            Err(Error::AlgebraMismatch(_))
        ));
        assert!(matches!(
            ad_star(&a.basis(0), &b.dual_basis(0)),
            Err(Error::AlgebraMismatch(_))
        ));
    }

    #[test]
    fn rejects_non_antisymmetric_constants() {
        let mut c = vec![0.0; 8];
        c[(0 * 2 + 1) * 2] = 1.0;
        assert!(LieAlgebra::new(2, c, vec!["a".into(), "b".into()]).is_err());
    }

    #[test]
    fn equal_constants_compare_equal_across_handles() {
        let a = LieAlgebra::so3();
        let b = LieAlgebra::so3();
        assert!(bracket(&a.basis(0), &b.basis(1)).is_ok());
    }
}
