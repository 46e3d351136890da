//! Holomorphic factors with piecewise constant jumps across ℝ and the unit
//! circle, and the factorization `N(z) = R(z)R(1/z)` built from them.
//!
//! The guide in `book/` walks through the pieces with runnable examples.

pub mod boundary;
pub mod cauchy;
pub mod cli;
pub mod factorization;
pub mod numbers;
pub mod quadrature;
pub mod sampling;
pub mod sets;
pub mod solver;
pub mod verification;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/sets.md")]
    mod sets {}
    #[doc = include_str!("../../../book/src/kernels.md")]
    mod kernels {}
    #[doc = include_str!("../../../book/src/riemann.md")]
    mod riemann {}
    #[doc = include_str!("../../../book/src/factorization.md")]
    mod factorization {}
    #[doc = include_str!("../../../book/src/hardy.md")]
    mod hardy {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
