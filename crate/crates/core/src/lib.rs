//! Exact function-field arithmetic for Drinfeld modules and their motives.
//!
//! The crate is organized bottom-up:
//!
//! - [`field`]: table-backed finite constants F_{q^m} and the ambient [`field::Ctx`];
//! - [`poly`]: dense polynomials, rational functions, characteristic-p
//!   binomials and hyperderivatives;
//! - [`exact`]: rational functions in the perfected variable w (theta = w^{q^D})
//!   carrying Frobenius twists in both directions, and t-polynomials over them;
//! - [`series`]: truncated Laurent series in a ramified variable with an
//!   explicit precision ledger;
//! - [`tate`]: t-polynomials with series coefficients, d-matrices, the
//!   evaluation t = theta, and the digit-expansion map at constant points;
//! - [`twisted`]: twisted polynomial rings in tau and sigma with the star
//!   anti-involution;
//! - [`drinfeld`]: Drinfeld module data, exponential / logarithm /
//!   quasi-periodic series, entire evaluation with convergence certificates;
//! - [`motive`]: dual-motive matrices, Anderson generating functions, rigid
//!   analytic trivializations, prolongations, and extension motives;
//! - [`galois`]: endomorphism matrices, Betti conjugation with rational
//!   reconstruction, centralizer systems and dimension counts;
//! - [`diffalg`]: the linear fragment of hyperdifferential polynomial
//!   algebra: ordering, division, prolongation ideals, elimination.

pub mod diffalg;
pub mod drinfeld;
pub mod error;
pub mod exact;
pub mod field;
pub mod galois;
pub mod mat;
pub mod motive;
pub mod poly;
pub mod report;
pub mod series;
pub mod tate;
pub mod twisted;
pub mod util;

pub use error::{Error, Result};
pub use field::{Ctx, FieldSpec, Fq, K};
