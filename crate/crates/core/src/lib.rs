//! Exact p-adic computations around arithmetic jet spaces of one-dimensional
//! formal groups: Witt vectors and p-derivations, jet group laws, delta
//! characters with their delta isocrystal, and an independent crystalline
//! Frobenius computed by Monsky-Washnitzer reduction.
//!
//! Everything works over `Z_p` for an odd prime `p`, with explicit p-adic
//! precision `N` and a total-degree truncation `M` for power series.

pub mod characters;
pub mod check;
pub mod crystalline;
pub mod error;
pub mod formalgroup;
pub mod jet;
pub mod ring;
pub mod witt;

pub use check::Check;
pub use error::{Error, Result};
pub use ring::{Context, Qp, Series, Zp};
