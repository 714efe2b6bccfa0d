//! Time-fractional machinery: the L1 scheme on graded meshes, its
//! complementary convolution kernel, the substantial history operator and
//! the Mittag-Leffler function.

mod gamma;
mod history;
mod l1;
mod mittag_leffler;

pub use gamma::{gamma, ln_gamma};
pub use history::{substantial_history, substantial_history_fields};
pub use l1::{ConvKernel, L1Kernel};
pub use mittag_leffler::{
    mittag_leffler, mittag_leffler_contour, mittag_leffler_series, SeriesResult,
};
