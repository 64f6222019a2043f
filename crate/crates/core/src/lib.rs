//! Density estimation with piecewise polynomials.
//!
//! Hypotheses are built by greedily merging the intervals of a fine
//! partition induced by the samples. Each candidate interval is scored by
//! the Ak distance between the empirical distribution and its best
//! nonnegative polynomial fit.

pub mod ak;
pub mod discrete;
pub mod empirical;
pub mod error;
pub mod experiment;
pub mod interval;
pub mod merging;
pub mod poly;
pub mod projection;
pub mod roots;

pub use ak::{compute_ak, discrete_ak, AkResult, IntervalSelection, WeightedSequence};
pub use empirical::{build_empirical, initial_partition, EmpiricalDistribution, IntervalPartition};
pub use error::{Error, Result};
pub use interval::Interval;
pub use merging::{
    construct_histogram, general_merging, required_samples, HistogramOracles, MergeConfig,
    MergeOracle, PieceFunction, PiecewiseHypothesis, PolynomialOracles, Solver,
};
pub use poly::{AffineMap, Polynomial};
pub use roots::{test_nonneg, NonnegResult, RootReport};
