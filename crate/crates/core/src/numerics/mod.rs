pub mod coordinate;
pub mod dd;
pub mod quadrature;
pub mod sum;
pub mod symbolic;
pub mod torus;

pub use coordinate::{inner_product, Coordinate};
pub use dd::DoubleDouble;
pub use quadrature::{integrate_1d, integrate_interval, integrate_nd, QuadratureSpec, Rule, Scheme};
pub use sum::{stable_sum, stable_sum_real, StableComplexSum, StableSum};
pub use torus::{frac, frac_int_split, reduce_mod1, TorusPoint};
