//! Propositional reasoning about expectation: exact semantics for
//! probability, credal, belief and possibility structures, model checking,
//! decision procedures and proof checking.

pub mod checker;
pub mod decide;
pub mod expectation;
pub mod gamble;
pub mod lp;
pub mod models;
pub mod proof;
pub mod rational;
pub mod search;
pub mod separation;
pub mod syntax;
pub mod translate;

pub use rational::Rational;
