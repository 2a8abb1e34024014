//! Two-firm spatial market on a ring with transaction-cost schemes.
//!
//! Buyers and firms sit on a one-dimensional ring. Each buyer faces an
//! effective price that depends on the posted price and, depending on the
//! [`TaxScheme`](taxation::TaxScheme), on its physical or ranked distance to
//! the firm. Firms first commit capacities, then compete on price; the
//! [`equilibrium`] module computes the subgame-perfect equilibrium of that
//! game on a discrete strategy grid.
//!
//! The crate is `no_std` and only needs `alloc`. Parallel evaluation is
//! injected through the [`Executor`](exec::Executor) trait so that hosts with
//! threads can fan out price subgames without the core depending on `std`.
#![cfg_attr(not(any(feature = "std", test)), no_std)]

extern crate alloc;

pub mod error;
pub mod exec;
pub mod experiments;
pub mod equilibrium;
pub mod geography;
pub mod market;
pub mod numeric;
pub mod taxation;

pub use error::{Error, Result};
pub use exec::{Executor, Sequential};
pub use geography::Geography;
pub use market::{MarketConfig, MarketOutcome};
pub use taxation::{TaxKind, TaxScheme};
