//! Population-protocol simulator built around a loosely-stabilizing dynamic
//! size counting protocol that doubles as a uniform phase clock.
//!
//! * [`sampling`]: coins and geometric random variables.
//! * [`protocols`]: one-sided transition functions and phase rules.
//! * [`engine`]: the uniform random scheduler, adversary and snapshots.
//! * [`analysis`]: observables, predicates and Monte Carlo bound checks.

pub mod analysis;
pub mod engine;
pub mod protocols;
pub mod sampling;
