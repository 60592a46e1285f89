//! Exact arithmetic for divisor sequences of points on split semiabelian
//! group schemes over the rational function field Q(t).
//!
//! The crate computes, entirely in exact arithmetic, the sequence of
//! "intersection with the identity section" divisors attached to the
//! multiples nP of a point P on a split torus, on an elliptic curve given by
//! a Weierstrass model over Q(t), or on a product of the two.  On top of the
//! raw sequences it provides the bookkeeping needed to check the structural
//! facts these sequences obey: bounded multiplicities, a uniform bound
//! divisor, and support that recurs along arithmetic progressions.
//!
//! Layout:
//!
//! * [`poly`], [`ratfun`], [`parse`]: dense polynomials and reduced rational
//!   functions over Q, with a small expression parser.
//! * [`zp`], [`gcd`]: word-sized prime fields and the modular gcd / fraction
//!   reduction engine with an exact subresultant fallback.
//! * [`places`]: closed points of the projective line kept as squarefree
//!   pairwise-coprime clusters that refine on demand, plus divisors.
//! * [`mulgrp`]: split tori, multiplicative independence, power relations.
//! * [`ellff`]: Weierstrass curves over Q(t), the group law, local reduction
//!   types, section divisors, and a nontorsion certificate.
//! * [`seqlab`]: sequence reports (support table, bound divisor, exceptional
//!   set), mixed products, and integer gcd sequences.
//! * [`intlin`]: integer left kernels used by the independence tests.

pub mod ellff;
pub mod error;
pub mod gcd;
pub mod intlin;
pub mod mulgrp;
pub mod parse;
pub mod places;
pub mod poly;
pub mod rat;
pub mod ratfun;
pub mod seqlab;
pub mod zp;

pub use error::{Error, Result};
pub use places::{Divisor, Place, PlaceRegistry};
pub use poly::Polynomial;
pub use rat::Rat;
pub use ratfun::RationalFunction;
