pub mod eigen;
pub mod intlat;
pub mod lll;

pub use eigen::{hermitian_eigen, pinv_solve, CMatrix, Eigen};
