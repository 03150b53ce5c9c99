//! The benchmark targets: two closed forms with steep or oscillatory
//! features, the viscous Burgers solution and two near-singular functions.

mod bessel;
mod burgers;
mod functions;

pub use bessel::{scaled_bessel_i, scaled_bessel_i_all};
pub use burgers::{cospi, sinpi, BurgersMethod, BurgersSeriesConfig, BurgersSolution};
pub use functions::{f1, f2, f4, f5, BenchmarkFunction, FunctionSpec, DEFAULT_EPS};
