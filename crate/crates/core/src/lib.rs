//! Correlations between the zeros of Gaussian random holomorphic sections.
//!
//! Four independent routes to the same numbers:
//!
//! * [`kac_rice`]: the Kac-Rice formula with Gaussian expectations evaluated
//!   exactly through Wick's theorem or by Monte Carlo ([`gaussian`]);
//! * [`closed_form`]: explicit scaling-limit pair correlations κ_km(r);
//! * [`empirical`]: pair statistics of the roots of sampled SU(2) polynomials.
//!
//! ```
//! use zerocorr::closed_form::{kappa, KappaQuery};
//! let k = kappa(KappaQuery::new(1.0, 1, 1)).unwrap();
//! assert!((k - 0.4736).abs() < 1e-4);
//! ```

pub mod closed_form;
pub mod empirical;
pub mod error;
pub mod gaussian;
pub mod kac_rice;
pub mod kernels;
pub mod numeric;
pub mod rng;

pub use error::{Error, Result};
pub use gaussian::{Estimate, Method};
pub use kernels::KernelModel;
pub use numeric::ComplexMatrix;
