//! p-adic polynomial factorization through OM types and single-factor lifting.

pub mod error;
pub mod factor;
pub mod hensel;
pub mod invariants;
pub mod montes;
pub mod omtype;
pub mod padic;
pub mod polygon;
pub mod sfl;
pub mod suites;
pub mod testpolys;
pub mod tower;
pub mod zpoly;

pub use error::{Error, Result};
pub use padic::{PadicElement, PadicPoly};
pub use zpoly::ZPoly;
