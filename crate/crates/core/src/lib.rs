//! Exact construction of the Eisenstein cycles of the modular curve X(N), N odd, as
//! combinations of Manin symbols, together with verifiers for their Hecke, boundary,
//! retraction and L-value properties.

pub mod eisen;
pub mod eisfun;
pub mod error;
pub mod exactnum;
pub mod hecke;
pub mod linalg;
pub mod modgroup;
pub mod msym;
pub mod verify;

pub use error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
