//! Line and pseudoline arrangements encoded by their O-matrix (order matrix).
//!
//! * [`exactnum`]: exact rationals, outward-rounded intervals, `tan(kπ/n)` enclosures.
//! * [`arrangement`]: concrete straight-line arrangements and sweep-based O-matrix extraction.
//! * [`omatrix`]: bounded faces, triangle, touching and defect censuses, bounds.
//! * [`certify`]: interval verification that a parameter box realizes a target O-matrix.
//! * [`stretch`]: exact LP feasibility with Farkas certificates and gradient stretching.

pub mod arrangement;
pub mod certify;
pub mod exactnum;
pub mod omatrix;
pub mod stretch;

pub use arrangement::{AffineLine, NormalizedFamily, NormalizedLine, SweepLabeling};
pub use exactnum::{Interval, Rational, SignClass};
pub use omatrix::{FaceCensus, OMatrix};
