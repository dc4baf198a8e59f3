//! Lie algebras by structure constants, SO(3) and SO(2), and the adjoint and
//! coadjoint actions.

mod algebra;
mod group;
pub mod so3;

pub use algebra::{ad, ad_star, bracket, AlgebraKind, DualAlgebraElement, LieAlgebra, LieAlgebraElement};
pub use group::{adjoint, coadjoint, exp, random_group_element, random_rotation, GroupElement, ORTHO_TOL};
pub use so3::So3Vector;
