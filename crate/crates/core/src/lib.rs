//! Counting roots of random polynomials over the p-adic integers.
//!
//! * [`padic`]: primes, valuations, integer and finite-precision polynomials.
//! * [`roots`]: exact `Z_p` root counts and k-Henselian counts.
//! * [`moments`]: exact factorial moments of the root count.
//! * [`monte_carlo`]: sampling experiments against the exact moments.
//! * [`oracle`]: slow enumeration-based references.
//! * [`verify`]: self-checks reported criterion by criterion.

pub mod error;
pub mod moments;
pub mod monte_carlo;
pub mod oracle;
pub mod padic;
pub mod roots;
pub mod verify;

mod residue;

pub use error::{Error, Result};
pub use padic::{IntPolynomial, PAdicApproxPolynomial, Prime, Valuation};
