pub mod classical;
pub mod ctypes;
pub mod error;
pub mod forms;
pub mod genball;
pub mod gf;
pub mod lengths;
pub mod linalg;
pub mod obstruction;
pub mod perm;

pub use error::{Error, Result};
