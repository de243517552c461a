//! Bounds and minimization for submodular set functions.
//!
//! Everything works through the [`SetFunction`] oracle. Modular bounds
//! `s(X) + c` give closed-form partition functions and marginals; a greedy
//! chain yields a lower bound, supergradients at a chosen anchor yield upper
//! bounds, and the anchor comes from minimizing `F + m` with Wolfe's
//! minimum-norm-point algorithm.

mod bounds;
mod function;
mod greedy;
mod minnorm;
mod supergradient;
mod upper;

pub use bounds::{log_partition, marginal_bound_expression, BoundKind, ModularBound};
pub use function::{FnSetFunction, Modular, PlusModular, SetCursor, SetFunction};
pub use greedy::{greedy_lower_bound, greedy_lower_bound_naive, GreedyResult};
pub use minnorm::{minimize_submodular, MinNormResult, MinimizeOptions};
pub use supergradient::{m_function, supergradient, supergradients};
pub use upper::{upper_bound, UpperBoundResult};
