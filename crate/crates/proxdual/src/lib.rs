//! Exact proximal mappings and projections of (possibly nonconvex) functions
//! under affine constraints, computed through an unconstrained convex dual.
//!
//! The primal problem is
//!
//! ```text
//! min_x  lambda * f(x) + 1/2 ||x - z||^2   subject to  A x = b,
//! ```
//!
//! with `A` a surjective linear operator. Its dual is the unconstrained
//! convex problem `min_y Phi_z(y)` with
//!
//! ```text
//! Phi_z(y) = 1/2 ||v||^2 - E_{lambda f}(v) - <b, y> - 1/2 ||z||^2,
//! v = z + A* y,
//! ```
//!
//! where `E_{lambda f}` is the Moreau envelope of `lambda * f`. Whenever the
//! dual inclusion `0 in A Prox_{lambda f}(z + A* y) - b` has a solution,
//! strong duality holds and a globally optimal primal point is recovered as
//! `x = Prox_{lambda f}(z + A* y)`. The pair `(x, y)` carries a verifiable
//! certificate: zero feasibility residual plus zero duality gap.
//!
//! Crate layout:
//! - [`linmap`]: the constraint operator `A` with adjoint and Gram checks.
//! - [`proxlib`]: the catalog of proximal operators and set projections.
//! - [`dualcore`]: dual value/gradient, primal recovery, residuals and
//!   optimality certificates.
//! - [`solvers`]: BB gradient descent, LBFGS and semismooth Newton on the
//!   dual; ADMM and alternating projection on the primal.
//! - [`problems`]: reproducible instance generators and closed-form
//!   specialist solvers that double as test oracles.

pub mod dualcore;
pub mod linmap;
pub mod problems;
pub mod proxlib;
pub mod rng;
pub mod shape;
pub mod solvers;

mod error;

pub use error::{Error, Result};
