//! Numerical radius and numerical index of finite-dimensional real normed
//! spaces, absolute sums with Köthe duals, and a scenario harness that checks
//! the known sum and subspace results on concrete examples.
//!
//! ```
//! use numindex::{numerical_radius_exact, NormSpace, OperatorMatrix};
//!
//! let x = NormSpace::lp(2, f64::INFINITY).unwrap();
//! let shift = OperatorMatrix::from_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
//! assert_eq!(numerical_radius_exact(&x, &shift).unwrap().value, 1.0);
//! ```

pub mod error;
pub mod lp;
pub mod numrange;
pub mod operator;
mod parallel;
pub mod point;
pub mod polytope;
pub mod search;
pub mod spaces;
pub mod sums;
pub mod verify;

pub use error::{Error, Result};
pub use numrange::{
    certified_lower_bound, numerical_index, numerical_radius, numerical_radius_exact,
    numerical_radius_sampled, operator_norm, zero_radius_certificate, CertificateTag,
    IndexEstimate, IndexOptions, RadiusEstimate, RadiusMethod,
};
pub use operator::OperatorMatrix;
pub use point::Point;
pub use polytope::{ClCertificate, PolytopeBall};
pub use spaces::{Descriptor, NormSpace, SupportPair};
pub use sums::{koethe_dual, lift_operator, sum_space, SumSpace};
