//! Arbitrary-precision substrate: scalars, polynomials in `E` and `r`,
//! rational functions of `r`, and real-root isolation.

mod bigreal;
mod mpoly;
mod poly;
mod quad;
mod rational;
mod roots;

pub use bigreal::{BigReal, Precision};
pub use mpoly::{BiPoly, MPoly, Var};
pub use poly::{Coeff, EPoly, Poly, RPoly};
pub use quad::tanh_sinh;
pub use rational::{Denominator, RationalFn};
pub use roots::{isolate_real_roots, refine_root, scan_real_roots, RealRoot};
