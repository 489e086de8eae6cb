//! Exact arithmetic: rationals, polynomials, rational functions and the rings `Z_{p,n}`.

pub mod cycmod;
pub mod poly;
pub mod ratfun;
pub mod rational;
pub mod zring;

pub use cycmod::{inv_qint_closed_form, qint_power, reduce, CycModElement, ModInt, PrimeSlice};
pub use poly::{cyclotomic, q_binom, q_int, Poly};
pub use ratfun::RatFun;
pub use rational::{fmt_rational, parse_rational, rat, ratio, Rational};
