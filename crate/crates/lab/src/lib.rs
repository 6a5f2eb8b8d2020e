//! File formats, parallel Monte Carlo driver and command-line front end for
//! [`minami_core`].

pub mod cli;
pub mod formats;
pub mod parallel;
pub mod suite;
