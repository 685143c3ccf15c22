pub mod cocycle;
pub mod error;
pub mod gabor;
pub mod linalg;
pub mod numerics;
pub mod orbit;
pub mod remark;
pub mod trigpoly;
pub mod windows;
pub mod zak;

pub use error::{GrlError, Result};
