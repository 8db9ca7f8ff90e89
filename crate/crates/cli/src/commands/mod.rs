pub mod boltzmann;
pub mod chain;
pub mod compare;
pub mod ctrw;
pub mod fit;
pub mod fracdiff;
pub mod tail;

use crate::CliError;

/// Stream indices per subcommand, so that runs of different subcommands
/// with one master seed never share random numbers.
pub(crate) mod streams {
    pub const TAIL: u64 = 1;
    pub const CTRW: u64 = 1_000;
    pub const COMPARE: u64 = 2_000;
    pub const BOLTZMANN: u64 = 3_000;
    pub const CHAIN: u64 = 4_000;
}

pub(crate) fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|j| lo + (hi - lo) * j as f64 / (n - 1) as f64).collect(),
    }
}

pub(crate) fn require(cond: bool, msg: impl Into<String>) -> Result<(), CliError> {
    if cond {
        Ok(())
    } else {
        Err(CliError::Config(msg.into()))
    }
}
