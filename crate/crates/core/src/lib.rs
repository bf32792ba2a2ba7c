//! Exact computation of L2-signatures and L2-Betti numbers of chain
//! complexes over group rings.
//!
//! Two approximation schemes are implemented:
//!
//! * towers of finite quotients of a residually finite deck group
//!   ([`quotient::run_tower`]), and
//! * balanced Folner exhaustions of covers with amenable deck group
//!   ([`amenable`]).
//!
//! Everything on the theorem path (traces, kernels, inertia, signatures)
//! is computed over arbitrary-precision rationals; floating point is
//! confined to the sampling oracle in [`l2oracle`] and to display.

pub mod amenable;
pub mod chain;
pub mod error;
pub mod groupring;
pub mod groups;
pub mod io;
pub mod l2oracle;
pub mod linalg;
pub mod quotient;
pub mod ratio;
pub mod simplicial;
pub mod spectral;

pub use chain::{AlgebraicForm, FreeComplex, SymmetricComplex};
pub use error::CoreError;
pub use groupring::{GroupRingElement, GroupRingMatrix};
pub use groups::{GroupDescriptor, GroupElement, GroupTower, TowerLevel};
pub use linalg::QMatrix;
pub use quotient::{ConvergenceRow, QuotientSnapshot};
pub use ratio::Q;
pub use simplicial::{EquivariantComplex, FiniteSubcomplex};
