//! Mixed norms, sup norms and ratio certificates for real multilinear forms.
//!
//! The crate evaluates the quantities that appear in mixed Littlewood,
//! Bohnenblust–Hille and cotype inequalities over `c0`: sup norms of finitely
//! supported forms, nested mixed `ℓ_q` norms of their coefficients, the
//! resulting ratio lower bounds, the Khinchin-constant recursion, and exact
//! Rademacher averages in `ℓ_r`.

pub mod cli;
pub mod constants;
pub mod cotype;
pub mod error;
pub mod forms;
pub mod mixed_norms;
mod numeric;
pub mod search;

pub use error::{Error, Result};
pub use forms::MultilinearForm;
pub use mixed_norms::ExponentTuple;
